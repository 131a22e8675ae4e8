"""Regenerate the synthetic vacuum-Rabi fixture used by the fit tests.

The clean curve comes from the ``rabi`` command's single-term lossy
evaluator; Gaussian noise with standard deviation 0.01 is added with a fixed
seed.

    python scripts/make_synthetic_trace.py configs/fit_vacuum.json tests/fixtures/vacuum_rabi_trace.csv
"""
import argparse

import numpy as np

from einsteinrabi.cli import rabi_series
from einsteinrabi.config import build_setup, load_config

NOISE = 0.01
SEED = 20240601


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("config")
    parser.add_argument("out")
    args = parser.parse_args()
    series = rabi_series(build_setup(load_config(args.config)))
    rng = np.random.default_rng(SEED)
    noisy = series["p21"] + NOISE * rng.standard_normal(len(series))
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# synthetic vacuum Rabi trace, sigma={NOISE}, seed={SEED}\n")
        fh.write("t_s,value\n")
        for t, v in zip(series.t, noisy):
            fh.write(f"{t:.14e},{v:.14e}\n")


if __name__ == "__main__":
    main()
