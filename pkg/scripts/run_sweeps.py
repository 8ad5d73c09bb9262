#!/usr/bin/env python3
"""Write one CSV per quotient kind over a grid of (d, p, q).

    python3 scripts/run_sweeps.py --out results/ --steps 20
"""

import argparse
import itertools
from dataclasses import dataclass, field
from pathlib import Path

from morreygeom.constants import QuotientKind, default_epsilon_grid, sweep, write_csv
from morreygeom.space import SpaceParams, Variant


@dataclass
class SweepConfig:
    out: Path = Path("results")
    steps: int = 20
    dims: tuple = (1, 2, 3)
    exponents: tuple = ((1.0, 2.0), (2.0, 3.0), (1.5, 4.0))
    kinds: tuple = field(default_factory=lambda: tuple(QuotientKind))


def run(cfg: SweepConfig) -> None:
    cfg.out.mkdir(parents=True, exist_ok=True)
    grid = default_epsilon_grid(cfg.steps)
    for kind in cfg.kinds:
        # the octahedral family lives on all of R^d
        variant = Variant.CLASSICAL if kind is QuotientKind.OCTAHEDRAL else Variant.SMALL
        reports = []
        for d, (p, q) in itertools.product(cfg.dims, cfg.exponents):
            reports += sweep(kind, SpaceParams(d, p, q, variant), grid)
        path = cfg.out / f"{kind.value}.csv"
        with path.open("w", encoding="utf-8", newline="") as fh:
            write_csv(reports, fh)
        worst = max(r.deviation for r in reports)
        best = max(r.computed for r in reports)
        print(f"{kind.value:6s} {len(reports):4d} rows  max computed {best:.12f}  "
              f"target {kind.target:g}  max deviation {worst:.2e}  -> {path}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=SweepConfig.out)
    ap.add_argument("--steps", type=int, default=SweepConfig.steps)
    args = ap.parse_args()
    run(SweepConfig(out=args.out, steps=args.steps))


if __name__ == "__main__":
    main()
