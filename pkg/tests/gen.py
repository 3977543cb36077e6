"""Random inputs shared by the property tests."""

from __future__ import annotations

import numpy as np

from knotspec.diagrams import KnotoidDiagram, apply_move, available_moves
from knotspec.errors import DegenerateProjection
from knotspec.projection import project


def random_walk(rng, n: int = 14) -> np.ndarray:
    return np.cumsum(rng.standard_normal((n, 3)), axis=0)


def random_diagram(seed: int, lo: int = 2, hi: int = 10, closed: bool = False) -> KnotoidDiagram:
    """Projection of a random-walk polygon with a crossing count in ``[lo, hi]``."""
    from knotspec.curves import OpenCurve, PolyCurve
    from knotspec.errors import InputError

    rng = np.random.default_rng(seed)
    while True:
        v = random_walk(rng, int(rng.integers(8, 16)))
        try:
            c = PolyCurve(v, closed=True) if closed else OpenCurve.from_vertices(v)
            d = project(c, rng.standard_normal(3)).to_diagram()
        except (DegenerateProjection, InputError):
            continue
        if lo <= d.n_crossings <= hi:
            return d


def random_moves(d: KnotoidDiagram, n: int, rng, max_crossings: int = 12):
    """Apply ``n`` uniformly chosen valid moves; yields every intermediate diagram."""
    for _ in range(n):
        moves = available_moves(d, increasing=d.n_crossings <= max_crossings)
        if not moves:
            moves = available_moves(d, increasing=True)
        d = apply_move(d, moves[int(rng.integers(len(moves)))])
        yield d
