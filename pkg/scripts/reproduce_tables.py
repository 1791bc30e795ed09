"""Run a grid config and print containment proportions as method-by-cell tables.

    python3 scripts/reproduce_tables.py configs/acceptance_cells.toml --out acceptance_cells.csv
    python3 scripts/reproduce_tables.py configs/full_grid.toml --out full_grid.csv --workers 4
"""

import argparse
import logging
import sys
from collections import defaultdict

from ecrscreen.harness import load_run_config, run_grid


def describe(spec) -> str:
    if spec.model in ("M4", "M5"):
        return f"t={spec.t_mix:g}"
    cov = "N" if spec.cov_family == "normal" else f"t{spec.cov_dof:g}"
    noise = "N" if spec.noise_family == "normal" else f"t{spec.noise_dof:g}"
    return f"{cov}/{noise} rho={spec.rho:g}"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("config")
    ap.add_argument("--out", required=True, help="CSV file for the per-cell rows")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)

    cells, _ = load_run_config(args.config)
    results = run_grid(cells, args.out, workers=args.workers)

    # one table per (model, p, n); columns are the remaining design settings
    tables = defaultdict(list)
    for res in results:
        s = res.cell.spec
        tables[(s.model, s.p, s.n)].append(res)
    for (model, p, n), group in tables.items():
        cols = [describe(r.cell.spec) for r in group]
        labels = [r.label for r in group[0].results]
        width = max(len(c) for c in cols + ["0.000"])
        print(f"\n{model} (p, n) = ({p}, {n})")
        print(" " * 6 + "".join(c.rjust(width + 2) for c in cols))
        for lab in labels:
            row = "".join(f"{r[lab].proportion:.3f}".rjust(width + 2) if lab in [x.label for x in r.results]
                          else "-".rjust(width + 2) for r in group)
            print(lab.ljust(6) + row)
    return 0


if __name__ == "__main__":
    sys.exit(main())
