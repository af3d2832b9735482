import io
import json

import pandas as pd
import pytest

from config.settings import SEED_ENV_VAR, TOOL_VERSION
from interval_median.main import main

BREAKDOWN_DATA = 'inf,sup\n0,2\n2,4\n2,2\n0,4\n1,3\n'

SIMULATION_SPEC = """\
mid_law=normal(0, 1)
spr_law=uniform(1, 3)
theta=1
sample_sizes=5,20
replications=6
seed=1
"""


def read_table(text: str) -> pd.DataFrame:
    return pd.read_csv(io.StringIO(text), comment='#')


def metadata_lines(text: str) -> dict:
    lines = [line[2:] for line in text.splitlines() if line.startswith('# ')]
    return dict(line.split('=', 1) for line in lines)


class TestEstimate:
    def test_single_row_json(self, write_file, capsys):
        path = write_file('one.csv', 'inf,sup\n3,7\n')
        assert main(['estimate', str(path)]) == 0
        document = json.loads(capsys.readouterr().out)
        assert (document['median']['inf'], document['median']['sup']) == (3.0, 7.0)
        assert (document['mean']['inf'], document['mean']['sup']) == (3.0, 7.0)
        assert document['median']['objective'] == 0.0
        assert document['n'] == 1
        assert document['tool'] == {'name': 'interval-median', 'version': TOOL_VERSION}
        assert document['params'] == {'theta': 1.0, 'tol': 1e-10, 'max_iter': 1000, 'seed': None}

    def test_mean_of_two_rows(self, write_file, capsys):
        path = write_file('two.csv', 'inf,sup\n0,2\n2,4\n')
        assert main(['estimate', str(path), '--theta', '2']) == 0
        document = json.loads(capsys.readouterr().out)
        assert (document['mean']['inf'], document['mean']['sup']) == (1.0, 3.0)
        assert document['params']['theta'] == 2.0

    def test_csv_output(self, write_file, capsys):
        path = write_file('data.csv', BREAKDOWN_DATA)
        assert main(['estimate', str(path), '--format', 'csv']) == 0
        out = capsys.readouterr().out
        assert 'np.float64' not in out
        table = read_table(out)
        assert list(table['estimator']) == ['aumann_mean', 'dtheta_median']
        median = table.set_index('estimator').loc['dtheta_median']
        assert (median['inf'], median['sup']) == (1.0, 3.0)
        meta = metadata_lines(out)
        assert meta['theta'] == '1.0'
        assert meta['version'] == TOOL_VERSION
        assert meta['fsbp'] == '0.6 (3/5)'

    def test_output_file(self, write_file, tmp_path, capsys):
        path = write_file('data.csv', BREAKDOWN_DATA)
        out = tmp_path / 'report.json'
        assert main(['estimate', str(path), '--output', str(out)]) == 0
        assert capsys.readouterr().out == ''
        assert json.loads(out.read_text(encoding='utf-8'))['n'] == 5

    def test_non_unique_median_warns(self, write_file, capsys):
        path = write_file('line.csv', 'inf,sup\n0,0\n1,1\n2,2\n')
        assert main(['estimate', str(path)]) == 0
        captured = capsys.readouterr()
        assert json.loads(captured.out)['median']['unique'] is False
        assert 'unique=false' in captured.err

    def test_parse_error_exit_code(self, write_file, capsys):
        path = write_file('bad.csv', 'mid,spr\n1,-0.5\n')
        assert main(['estimate', str(path)]) == 2
        assert 'line 2' in capsys.readouterr().err

    def test_missing_file_is_a_data_error(self, tmp_path):
        assert main(['estimate', str(tmp_path / 'absent.csv')]) == 2

    @pytest.mark.parametrize('flags', [['--theta=0'], ['--theta=-1'], ['--tol=0'], ['--max-iter=0']])
    def test_invalid_parameters_exit_code(self, write_file, flags):
        path = write_file('data.csv', BREAKDOWN_DATA)
        assert main(['estimate', str(path), *flags]) == 64

    def test_bad_flags_exit_code(self, write_file):
        path = write_file('data.csv', BREAKDOWN_DATA)
        assert main(['estimate', str(path), '--format', 'xml']) == 64
        assert main(['estimate', str(path), '--no-such-flag']) == 64
        assert main([]) == 64

    def test_version(self, capsys):
        assert main(['--version']) == 0
        assert TOOL_VERSION in capsys.readouterr().out


class TestBreakdown:
    def test_table_and_fsbp(self, write_file, capsys):
        path = write_file('data.csv', BREAKDOWN_DATA)
        assert main(['breakdown', str(path), '--magnitudes', '1e4,1e8', '--k', '0,1,2,3']) == 0
        captured = capsys.readouterr()
        assert 'fsbp(n=5) = 0.6 (3/5)' in captured.err
        assert metadata_lines(captured.out)['fsbp'] == '0.6 (3/5)'

        table = read_table(captured.out)
        assert list(table.columns) == ['k', 'magnitude', 'median_drift', 'mean_drift']
        assert table['median_drift'].dtype == float
        assert len(table) == 8
        clean = table[table['k'] == 0]
        assert (clean['median_drift'] == 0).all() and (clean['mean_drift'] == 0).all()
        resisted = table[table['k'] == 2]
        assert (resisted['median_drift'] < 20).all()
        broken = table[(table['k'] == 3) & (table['magnitude'] == 1e8)]
        assert broken['median_drift'].iloc[0] > 1e3

    def test_json_format(self, write_file, capsys):
        path = write_file('data.csv', BREAKDOWN_DATA)
        assert main(['breakdown', str(path), '--magnitudes', '1e4', '--k', '3', '--format', 'json']) == 0
        document = json.loads(capsys.readouterr().out)
        assert document['fsbp'] == {'value': 0.6, 'fraction': '3/5', 'text': '0.6 (3/5)'}
        assert document['rows'][0]['k'] == 3

    def test_k_larger_than_n(self, write_file):
        path = write_file('data.csv', BREAKDOWN_DATA)
        assert main(['breakdown', str(path), '--magnitudes', '1e4', '--k', '6']) == 64

    @pytest.mark.parametrize('magnitudes', ['1e8,1e4', '0,1', 'big', '1e4,1e400', 'nan'])
    def test_bad_magnitudes(self, write_file, magnitudes):
        path = write_file('data.csv', BREAKDOWN_DATA)
        assert main(['breakdown', str(path), '--magnitudes', magnitudes, '--k', '1']) == 64


class TestSimulate:
    @pytest.fixture(autouse=True)
    def no_env_seed(self, monkeypatch):
        monkeypatch.delenv(SEED_ENV_VAR, raising=False)

    def run(self, spec_path, out_dir, *extra):
        return main(['simulate', str(spec_path), '--output', str(out_dir), *extra])

    def test_outputs(self, write_file, tmp_path, capsys):
        spec = write_file('exp.env', SIMULATION_SPEC)
        assert self.run(spec, tmp_path / 'out') == 0
        captured = capsys.readouterr()
        assert 'truth = [-2.0, 2.0] (symmetry)' in captured.err

        summary = json.loads(captured.out)
        assert summary == json.loads((tmp_path / 'out' / 'summary.json').read_text(encoding='utf-8'))
        assert (summary['truth']['inf'], summary['truth']['sup']) == (-2.0, 2.0)
        assert summary['truth_provenance'] == 'symmetry'
        assert summary['params']['seed'] == 1
        assert [row['n'] for row in summary['summary']] == [5, 20]

        rows_text = (tmp_path / 'out' / 'rows.csv').read_text(encoding='utf-8')
        rows = read_table(rows_text)
        assert len(rows) == 12
        assert rows['error'].dtype == float
        assert 'np.float64' not in rows_text
        assert metadata_lines(rows_text)['seed'] == '1'

    def test_byte_identical_reruns(self, write_file, tmp_path):
        spec = write_file('exp.env', SIMULATION_SPEC)
        assert self.run(spec, tmp_path / 'a', '--workers', '1') == 0
        assert self.run(spec, tmp_path / 'b', '--workers', '1') == 0
        assert self.run(spec, tmp_path / 'c', '--workers', '4') == 0
        for name in ('rows.csv', 'summary.json'):
            first = (tmp_path / 'a' / name).read_bytes()
            assert first == (tmp_path / 'b' / name).read_bytes()
            assert first == (tmp_path / 'c' / name).read_bytes()

    def test_seed_precedence(self, write_file, tmp_path, capsys, monkeypatch):
        spec = write_file('exp.env', SIMULATION_SPEC)
        monkeypatch.setenv(SEED_ENV_VAR, '99')
        assert self.run(spec, tmp_path / 'env') == 0
        assert json.loads(capsys.readouterr().out)['params']['seed'] == 99
        assert self.run(spec, tmp_path / 'flag', '--seed', '5') == 0
        assert json.loads(capsys.readouterr().out)['params']['seed'] == 5

    def test_env_seed_replaces_missing_spec_seed(self, write_file, tmp_path, monkeypatch):
        spec = write_file('exp.env', SIMULATION_SPEC.replace('seed=1\n', ''))
        monkeypatch.delenv(SEED_ENV_VAR, raising=False)
        assert self.run(spec, tmp_path / 'none') == 64
        monkeypatch.setenv(SEED_ENV_VAR, '3')
        assert self.run(spec, tmp_path / 'env') == 0

    @pytest.mark.parametrize('edit', [
        ('replications=6\n', 'replications=0\n'),
        ('seed=1\n', 'seed=1\ncolour=blue\n'),
        ('spr_law=uniform(1, 3)\n', 'spr_law=normal(1, 3)\n'),
    ])
    def test_invalid_spec_exit_code(self, write_file, tmp_path, edit):
        spec = write_file('exp.env', SIMULATION_SPEC.replace(*edit))
        assert self.run(spec, tmp_path / 'out') == 64

    def test_invalid_env_seed(self, write_file, tmp_path, monkeypatch):
        spec = write_file('exp.env', SIMULATION_SPEC)
        monkeypatch.setenv(SEED_ENV_VAR, 'abc')
        assert self.run(spec, tmp_path / 'out') == 64

    def test_missing_spec_file(self, tmp_path):
        assert self.run(tmp_path / 'absent.env', tmp_path / 'out') == 64
