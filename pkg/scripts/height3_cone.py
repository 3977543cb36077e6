"""Height statistics for projections close to each quadrisecant of a knot.

For every quadrisecant the knot is opened at the first hit point, and the
open curve is projected along directions inside a small cone around the
secant line.  Prints one JSON object per secant.

    python scripts/height3_cone.py [--curve torus_knot:p=2,q=3,n=32] [--eps 1e-4] [--dirs 200]
"""

from __future__ import annotations

import argparse
import json

from knotspec.cli import _closed
from knotspec.secants import height3_link, quadrisecants


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--curve", default="torus_knot:p=2,q=3,n=32")
    ap.add_argument("--eps", type=float, default=1e-4)
    ap.add_argument("--dirs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    K = _closed(args.curve)
    for q in quadrisecants(K):
        ex = height3_link(K, q, args.dirs, args.seed, args.eps)
        print(json.dumps({"edges": list(q.edges), "alternation": q.alternation, **ex.to_json()}, sort_keys=True))


if __name__ == "__main__":
    main()
