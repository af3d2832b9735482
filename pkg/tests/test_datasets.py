import math

import numpy as np
import pytest

from interval_median import DatasetParseError, Interval, InvalidInputError, Sample
from interval_median.database.datasets import parse_dataset, read_dataset, read_spec_file, write_dataset


class TestParseDataset:
    def test_inf_sup(self):
        assert parse_dataset('inf,sup\n3,7\n') == Sample([Interval(3, 7)])

    def test_mid_spr(self):
        assert parse_dataset('mid,spr\n1,0.5\n-2,0\n') == Sample([Interval(0.5, 1.5), Interval(-2, -2)])

    def test_comments_blank_lines_and_crlf(self):
        text = '# measured 2024-01-01\r\ninf,sup\r\n\r\n0,2\r\n# outlier below\r\n2,4\r\n'
        assert parse_dataset(text) == Sample([Interval(0, 2), Interval(2, 4)])

    def test_scientific_notation(self):
        sample = parse_dataset('inf,sup\n-1.5e3,2E-2\n.5,+7.\n')
        assert list(sample) == [Interval(-1500, 0.02), Interval(0.5, 7)]

    @pytest.mark.parametrize('text,line', [
        ('mid,spr\n1,-0.5\n', 2),
        ('inf,sup\n0,1\n2,1\n', 3),
        ('inf,sup\n0,1\n1,2,3\n', 3),
        ('inf,sup\n# c\n1,abc\n', 3),
        ('inf,sup\n1,nan\n', 2),
        ('inf,sup\n1,inf\n', 2),
        ('inf,sup\n1,1e999\n', 2),
        ('inf,sup\n1;2\n', 2),
        ('inf,sup\n1,0x10\n', 2),
        ('lower,upper\n0,1\n', 1),
        ('\n\nsup,inf\n0,1\n', 3),
        (' inf,sup\n0,1\n', 1),
        ('inf , sup\n0,1\n', 1),
        ('mid,spr \n0,1\n', 1),
        ('', 1),
    ])
    def test_errors_name_the_line(self, text, line):
        with pytest.raises(DatasetParseError) as excinfo:
            parse_dataset(text)
        assert excinfo.value.line_number == line
        assert str(excinfo.value).startswith(f'line {line}: ')

    def test_header_without_rows(self):
        with pytest.raises(DatasetParseError, match='no rows'):
            parse_dataset('inf,sup\n# nothing here\n')

    def test_parse_error_is_an_input_error(self):
        with pytest.raises(InvalidInputError):
            parse_dataset('mid,spr\n1,-0.5\n')


class TestReadWrite:
    def test_read_dataset(self, write_file):
        path = write_file('data.csv', 'inf,sup\n0,2\n2,4\n', newline='\r\n')
        assert read_dataset(path) == Sample([Interval(0, 2), Interval(2, 4)])

    def test_read_rejects_non_utf8(self, tmp_path):
        path = tmp_path / 'bad.csv'
        path.write_bytes(b'inf,sup\n\xff\xfe,1\n')
        with pytest.raises(DatasetParseError):
            read_dataset(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            read_dataset(tmp_path / 'absent.csv')

    def test_exact_round_trip_between_formats(self, tmp_path):
        sample = Sample.from_bounds([0.0, -1.5, 3.25], [2.0, 0.5, 3.25])
        write_dataset(sample, tmp_path / 'a.csv', 'inf,sup')
        write_dataset(sample, tmp_path / 'b.csv', 'mid,spr')
        assert (tmp_path / 'b.csv').read_text().splitlines()[0] == 'mid,spr'
        assert read_dataset(tmp_path / 'a.csv') == read_dataset(tmp_path / 'b.csv') == sample

    def test_round_trip_within_an_ulp(self, tmp_path, rng):
        ends = np.sort(rng.normal(0, 100, size=(200, 2)), axis=1)
        sample = Sample.from_bounds(ends[:, 0], ends[:, 1])
        write_dataset(sample, tmp_path / 'a.csv', 'inf,sup')
        write_dataset(sample, tmp_path / 'b.csv', 'mid,spr')
        by_bounds = read_dataset(tmp_path / 'a.csv')
        by_mid_spr = read_dataset(tmp_path / 'b.csv')
        assert by_bounds == sample
        for K, K2 in zip(by_bounds, by_mid_spr):
            assert abs(K.inf - K2.inf) <= 2 * math.ulp(max(abs(K.inf), abs(K.sup)))
            assert abs(K.sup - K2.sup) <= 2 * math.ulp(max(abs(K.inf), abs(K.sup)))

    def test_unknown_format(self, tmp_path):
        with pytest.raises(InvalidInputError):
            write_dataset(Sample([Interval(0, 1)]), tmp_path / 'x.csv', 'lo,hi')


SPEC_TEXT = """\
# consistency run
mid_law=normal(0, 1)
spr_law=uniform(1, 3)
theta=1
sample_sizes=100,1000,10000
replications=200
seed=1
"""


class TestSpecFile:
    def test_read_spec_file(self, write_file):
        spec = read_spec_file(write_file('exp.env', SPEC_TEXT))
        assert str(spec.distribution.mid_law) == 'normal(0.0, 1.0)'
        assert str(spec.distribution.spr_law) == 'uniform(1.0, 3.0)'
        assert spec.distribution.contamination is None
        assert spec.sample_sizes == (100, 1000, 10000)
        assert spec.replications == 200
        assert spec.seed == 1
        assert spec.theta == 1.0
        assert spec.tol == 1e-10
        assert spec.max_iter == 1000

    def test_contamination_and_solver_keys(self, write_file):
        text = SPEC_TEXT + 'contamination.fraction=0.1\ncontamination.mid_shift=50\ntol=1e-8\nmax_iter=50\nworkers=2\n'
        spec = read_spec_file(write_file('exp.env', text))
        contamination = spec.distribution.contamination
        assert (contamination.fraction, contamination.mid_shift, contamination.spr_shift) == (0.1, 50.0, 0.0)
        assert (spec.tol, spec.max_iter, spec.workers) == (1e-8, 50, 2)

    def test_overrides(self, write_file):
        spec = read_spec_file(write_file('exp.env', SPEC_TEXT), seed_override=77, workers_override=3)
        assert spec.seed == 77
        assert spec.workers == 3

    def test_seed_may_come_from_override_only(self, write_file):
        text = SPEC_TEXT.replace('seed=1\n', '')
        with pytest.raises(InvalidInputError, match='seed'):
            read_spec_file(write_file('exp.env', text))
        assert read_spec_file(write_file('exp.env', text), seed_override=5).seed == 5

    @pytest.mark.parametrize('edit', [
        ('replications=200\n', ''),
        ('mid_law=normal(0, 1)\n', ''),
        ('seed=1\n', 'seed=one\n'),
        ('sample_sizes=100,1000,10000\n', 'sample_sizes=100,x\n'),
        ('sample_sizes=100,1000,10000\n', 'sample_sizes=1000,100\n'),
        ('mid_law=normal(0, 1)\n', 'mid_law=student(3)\n'),
        ('theta=1\n', 'theta=0\n'),
        ('theta=1\n', 'theta=1\ncolour=blue\n'),
    ])
    def test_invalid_spec(self, write_file, edit):
        text = SPEC_TEXT.replace(*edit)
        with pytest.raises((InvalidInputError, ValueError)):
            read_spec_file(write_file('exp.env', text))

    def test_missing_spec_file(self, tmp_path):
        with pytest.raises(InvalidInputError):
            read_spec_file(tmp_path / 'absent.env')
