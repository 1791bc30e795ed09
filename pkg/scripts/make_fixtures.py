"""Regenerate the CSV fixtures under tests/fixtures/."""

from pathlib import Path

import numpy as np

from ecrscreen import SimModelSpec, generate, substream
from ecrscreen.data import DataMatrix, write_csv

OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures"
MODEL1_SEED = 20240


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    sample = generate(SimModelSpec("M1", p=100, n=20, rho=0.0), substream(MODEL1_SEED, 0))
    write_csv(sample.data, OUT / f"model1_n20_p100_seed{MODEL1_SEED}.csv")

    rng = np.random.default_rng(7)
    X = rng.standard_normal((25, 3))
    write_csv(DataMatrix.from_arrays(X[:, 1], X, ("target", "a", "b", "c")), OUT / "toy_response_is_b.csv")


if __name__ == "__main__":
    main()
