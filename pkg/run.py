"""
Simple entry point to run the uqpe command line.

Usage:
    python run.py estimate --data data/engel_synthetic.csv --outcome food --target income
    python run.py simulate --dgp locscale-normal --n 500 --reps 200
    uqpe --help   (after installing the package)

Environment:
    LOG_LEVEL, UQPE_SEED, UQPE_THREADS (see src/core/config.py).
"""

from src.main import cli

if __name__ == "__main__":
    cli()
