from setuptools import setup, find_packages

setup(
    name="interval-median",
    version="1.0.0",
    python_requires=">=3.10",
    packages=find_packages(include=["interval_median*", "config*"]),
    install_requires=[
        "numpy==2.0.0",
        "pandas==2.2.2",
        "cachetools==5.3.3",
        "python-dotenv==1.0.1",
    ],
    extras_require={
        "dev": ["pytest==8.2.2", "hypothesis==6.103.1"],
    },
    entry_points={
        "console_scripts": ["interval-median=interval_median.main:run"],
    },
)
