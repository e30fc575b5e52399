"""Write a random lattice grid document for scale runs.

    python3 scripts/make_synthetic_grid.py --buses 10000 --seed 2024 --out grid10k.json
"""
import argparse
from pathlib import Path

from gicflow.gridio import save_grid
from gicflow.synthetic import random_grid


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--buses", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--offline-fraction", type=float, default=0.35)
    p.add_argument("--out", type=Path, required=True)
    a = p.parse_args()
    m = random_grid(a.buses, a.seed, offline_fraction=a.offline_fraction)
    save_grid(m, a.out)
    print(f"{a.out}: {len(m.substations)} substations, {len(m.buses)} buses, {len(m.branches)} lines, "
          f"{len(m.transformers)} transformers, {len(m.generators)} generators")


if __name__ == "__main__":
    main()
