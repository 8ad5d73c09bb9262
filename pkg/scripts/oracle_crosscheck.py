#!/usr/bin/env python3
"""Closed-form engine vs. quadrature oracle on a random corpus.

Prints a histogram of relative differences by decade and the worst case.
"""

import argparse
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from morreygeom import RadialFunction, SpaceParams, Variant, centered_norm, oracle_norm, validate_membership
from morreygeom.space import INF


@dataclass
class CrosscheckConfig:
    n_functions: int = 500
    seed: int = 0
    tol: float = 1e-9
    max_pieces: int = 6


def random_case(rng):
    d = int(rng.choice([1, 2, 3, 5]))
    p = rng.uniform(1.0, 7.5)
    q = rng.uniform(p + 0.25, 8.0)
    sp = SpaceParams(d, p, q, Variant.SMALL if rng.random() < 0.5 else Variant.CLASSICAL)
    while True:
        n = int(rng.integers(1, 7))
        from_origin = rng.random() < 0.5
        tail = sp.variant is Variant.CLASSICAL and rng.random() < 0.3
        if tail:
            alpha = sp.critical_alpha - rng.uniform(0.0, 1.0)
        elif from_origin:
            alpha = sp.critical_alpha + rng.uniform(0.0, 2.0)
        else:
            alpha = rng.uniform(sp.critical_alpha - 3.0, 1.0)
        start = 0.0 if from_origin else rng.uniform(0.01, 0.5)
        edges = start + np.concatenate(([0.0], np.cumsum(rng.uniform(0.05, 1.2, n))))
        pieces = [(edges[i], edges[i + 1], rng.uniform(-3, 3) or 1.0, alpha) for i in range(n)]
        if tail:
            pieces.append((edges[-1], INF, 1.0, alpha))
        f = RadialFunction.from_pieces(pieces)
        if validate_membership(f, sp):
            return sp, f


def run(cfg: CrosscheckConfig) -> float:
    rng = np.random.default_rng(cfg.seed)
    decades = Counter()
    worst, worst_case = 0.0, None
    for _ in range(cfg.n_functions):
        sp, f = random_case(rng)
        closed = centered_norm(f, sp).value
        quad = oracle_norm(f, sp, cfg.tol).value
        rel = abs(closed - quad) / closed if closed else abs(quad)
        decades[math.floor(math.log10(rel)) if rel > 0 else -17] += 1
        if rel >= worst:
            worst, worst_case = rel, (sp, f)
    for k in sorted(decades):
        label = "exact" if k == -17 else f"1e{k}"
        print(f"{label:>7s}  {decades[k]}")
    print(f"worst relative difference {worst:.3e}")
    if worst_case is not None:
        sp, f = worst_case
        print(f"  at {sp}\n  f = {f.dumps()}")
    return worst


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=CrosscheckConfig.n_functions)
    ap.add_argument("--seed", type=int, default=CrosscheckConfig.seed)
    ap.add_argument("--tol", type=float, default=CrosscheckConfig.tol)
    args = ap.parse_args()
    run(CrosscheckConfig(n_functions=args.n, seed=args.seed, tol=args.tol))


if __name__ == "__main__":
    main()
