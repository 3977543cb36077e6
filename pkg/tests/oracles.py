"""Independent reference implementations used to freeze derived test values.

Nothing here imports knotspec: each oracle is a slow, direct computation
written from the definitions so that agreement with the package is
evidence rather than tautology.
"""

from __future__ import annotations

import itertools
import re

import numpy as np

# ----------------------------------------------------------- state sums

_EVENT = re.compile(r"([OU])(\d+)([+-])")


def parse_code(code: str):
    """(closed, [(cid, is_over, sign), ...]) from a signed Gauss code."""
    kind, _, body = code.partition(":")
    events = [(int(c), o == "O", 1 if s == "+" else -1) for o, c, s in _EVENT.findall(body)]
    assert "".join(f"{'O' if o else 'U'}{c}{'+' if s > 0 else '-'}" for c, o, s in events) == body, code
    return kind == "c", events


def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def state_sum_bracket(code: str) -> dict[int, int]:
    """Kauffman bracket by enumerating all 2^c states; exponent of A -> coefficient.

    Arc ends are graph nodes: arc k runs from node (k, 0) to node (k, 1).
    Each smoothing glues four arc ends in two pairs.  Closed loops count
    with d = -A^2 - A^-2; for a closed diagram one loop is free, for a
    knotoid the component through the leg is the open arc (weight 1).
    """
    closed, events = parse_code(code)
    m = len(events)
    if m == 0:
        return {0: 1}
    n_arcs = m if closed else m + 1
    pos = {}
    for i, (c, over, s) in enumerate(events):
        pos.setdefault(c, {})["o" if over else "u"] = i
        pos[c]["s"] = s

    def node(arc, end):
        return 2 * (arc % n_arcs) + end

    ports = {}
    for c, p in pos.items():
        io, iu = p["o"], p["u"]
        # arc i ends at event i, arc i+1 starts there
        ports[c] = (node(io, 1), node(io + 1, 0), node(iu, 1), node(iu + 1, 0), p["s"])

    crossings = sorted(ports)
    out: dict[int, int] = {}
    for choice in itertools.product((1, -1), repeat=len(crossings)):
        parent = list(range(2 * n_arcs))

        def join(a, b):
            ra, rb = _find(parent, a), _find(parent, b)
            if ra != rb:
                parent[ra] = rb

        for k in range(n_arcs):
            join(2 * k, 2 * k + 1)
        for c, a_state in zip(crossings, choice):
            o_in, o_out, u_in, u_out, s = ports[c]
            # positive: under-out sits 90 degrees counterclockwise of over-out
            if (s > 0) == (a_state > 0):
                join(u_out, o_in)
                join(u_in, o_out)
            else:
                join(o_out, u_out)
                join(o_in, u_in)
        comps = len({_find(parent, x) for x in range(2 * n_arcs)})
        loops = comps - 1  # closed: one loop is free; open: one component is the arc
        poly = {sum(choice): 1}
        for _ in range(loops):
            nxt: dict[int, int] = {}
            for e, v in poly.items():
                nxt[e + 2] = nxt.get(e + 2, 0) - v
                nxt[e - 2] = nxt.get(e - 2, 0) - v
            poly = nxt
        for e, v in poly.items():
            out[e] = out.get(e, 0) + v
    return {e: v for e, v in out.items() if v}


def writhe_of(code: str) -> int:
    _, events = parse_code(code)
    return sum(s for _, over, s in events if over)


def state_sum_jones(code: str) -> dict[int, int]:
    w = writhe_of(code)
    sign = -1 if w % 2 else 1
    return {e - 3 * w: sign * v for e, v in state_sum_bracket(code).items()}


# the right-handed closed trefoil and its Jones polynomial in A
TREFOIL_CODE = "c:O1+U2+O3+U1+O2+U3+"
TREFOIL_JONES = {-4: 1, -12: 1, -16: -1}

# ------------------------------------------------------------- geometry


def point_segment(p, a, b) -> np.ndarray:
    """Distance from each row of ``p`` to segment ``ab``."""
    p = np.atleast_2d(p)
    d = b - a
    dd = float(d @ d)
    t = np.clip(((p - a) @ d) / dd, 0.0, 1.0)
    return np.linalg.norm(p - (a + t[:, None] * d), axis=1)


def segment_segment(a0, a1, b0, b1) -> float:
    """Exact distance between two segments: boundary cases plus the interior critical point."""
    cands = [
        point_segment(a0, b0, b1)[0],
        point_segment(a1, b0, b1)[0],
        point_segment(b0, a0, a1)[0],
        point_segment(b1, a0, a1)[0],
    ]
    u, v, w = a1 - a0, b1 - b0, a0 - b0
    M = np.array([[u @ u, -(u @ v)], [-(u @ v), v @ v]])
    rhs = np.array([-(u @ w), v @ w])
    if abs(np.linalg.det(M)) > 1e-14 * (u @ u) * (v @ v):
        s, t = np.linalg.solve(M, rhs)
        if 0 <= s <= 1 and 0 <= t <= 1:
            cands.append(float(np.linalg.norm(a0 + s * u - (b0 + t * v))))
    return float(min(cands))


def edges_of(vertices, closed):
    v = np.asarray(vertices, dtype=float)
    if closed:
        return v, np.roll(v, -1, axis=0)
    return v[:-1], v[1:]


def _adjacent(i, j, n_edges, closed):
    if abs(i - j) <= 1:
        return True
    return closed and {i, j} == {0, n_edges - 1}


def min_nonadjacent_gap(vertices, closed) -> float:
    a, b = edges_of(vertices, closed)
    n = len(a)
    best = np.inf
    for i in range(n):
        for j in range(i + 1, n):
            if not _adjacent(i, j, n, closed):
                best = min(best, segment_segment(a[i], b[i], a[j], b[j]))
    return best


def is_simple(vertices, closed) -> bool:
    return min_nonadjacent_gap(vertices, closed) > 1e-12


def dense_points(vertices, closed, per_edge=200) -> np.ndarray:
    a, b = edges_of(vertices, closed)
    t = np.linspace(0.0, 1.0, per_edge + 1)
    return (a[:, None, :] + t[None, :, None] * (b - a)[:, None, :]).reshape(-1, 3)


def dense_hausdorff(va, ca, vb, cb, per_edge=200) -> float:
    """Hausdorff distance with one side sampled densely and the other exact."""

    def one(v1, c1, v2, c2):
        pts = dense_points(v1, c1, per_edge)
        a, b = edges_of(v2, c2)
        d = np.min(np.stack([point_segment(pts, a[k], b[k]) for k in range(len(a))]), axis=0)
        return float(d.max())

    return max(one(va, ca, vb, cb), one(vb, cb, va, ca))


# --------------------------------------------------------- quadrisecants


def _bilinear(A0, dA, B0, dB, C0, dC):
    """Coefficients of f(s, t) = det[Y - X, C0 - X, dC], X = A0 + s dA, Y = B0 + t dB."""

    def f(s, t):
        X = A0 + s * dA
        Y = B0 + t * dB
        return np.einsum("...i,...i->...", np.cross(Y - X, C0 - X), dC)

    f00, f10, f01, f11 = f(0.0, 0.0), f(1.0, 0.0), f(0.0, 1.0), f(1.0, 1.0)
    return f00, f10 - f00, f01 - f00, f11 - f10 - f01 + f00


def _line_hit(X, Y, C0, dC):
    """Parameter on line C of its closest point to line XY, and the gap."""
    u = Y - X
    w = C0 - X
    a, b, c = u @ u, u @ dC, dC @ dC
    den = a * c - b * b
    if den <= 1e-300:
        return None, np.inf
    mu = (b * (u @ w) - a * (dC @ w)) / den
    lam = (c * (u @ w) - b * (dC @ w)) / den
    return mu, float(np.linalg.norm(X + lam * u - (C0 + mu * dC)))


def grid_quadrisecants(vertices, closed, grid=64, tol=1e-9, batch=4000):
    """Lines through four pairwise non-adjacent edges, by grid sign tests plus Newton.

    Returns a sorted list of (edge quadruple, (s, t)) with s, t the hit
    parameters on the first two edges of the quadruple.
    """
    a, b = edges_of(vertices, closed)
    d = b - a
    n = len(a)
    scale = float(np.ptp(np.asarray(vertices), axis=0).max())
    quads = [
        q for q in itertools.combinations(range(n), 4)
        if not any(_adjacent(i, j, n, closed) for i, j in itertools.combinations(q, 2))
    ]
    quads = np.array(quads)
    g = np.linspace(0.0, 1.0, grid + 1)
    S, T = np.meshgrid(g, g, indexing="ij")
    found = []
    for lo in range(0, len(quads), batch):
        Q = quads[lo:lo + batch]
        i, j, k, l = Q.T
        cf = [_bilinear(a[i], d[i], a[j], d[j], a[x], d[x]) for x in (k, l)]
        vals = []
        for al, be, ga, de in cf:
            v = al[:, None, None] + be[:, None, None] * S + ga[:, None, None] * T + de[:, None, None] * S * T
            vals.append(v)
        hits = np.ones((len(Q), grid, grid), dtype=bool)
        for v in vals:
            corners = np.stack([v[:, :-1, :-1], v[:, 1:, :-1], v[:, :-1, 1:], v[:, 1:, 1:]])
            hits &= (corners.min(axis=0) <= 0) & (corners.max(axis=0) >= 0)
        for qi, ci, cj in zip(*np.nonzero(hits)):
            coef = [tuple(float(c[qi]) for c in cf[m]) for m in range(2)]
            s, t = (ci + 0.5) / grid, (cj + 0.5) / grid
            for _ in range(50):
                F = np.array([al + be * s + ga * t + de * s * t for al, be, ga, de in coef])
                J = np.array([[be + de * t, ga + de * s] for al, be, ga, de in coef])
                try:
                    step = np.linalg.solve(J, F)
                except np.linalg.LinAlgError:
                    break
                s, t = s - step[0], t - step[1]
                if np.abs(step).max() < 1e-15:
                    break
            if not (0 < s < 1 and 0 < t < 1):
                continue
            qq = tuple(int(x) for x in Q[qi])
            X = a[qq[0]] + s * d[qq[0]]
            Y = a[qq[1]] + t * d[qq[1]]
            ok = True
            for e in qq[2:]:
                mu, gap = _line_hit(X, Y, a[e], d[e])
                if mu is None or not 0 < mu < 1 or gap > 1e-7 * scale:
                    ok = False
            if ok:
                found.append((qq, (round(s, 8), round(t, 8))))
    return sorted(set(found))


def random_rotation(rng) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
