"""Quadrisecants of polygonal curves.

A line through ``X(s)`` on one edge and ``Y(t)`` on another meets the
supporting line of a third edge exactly when a determinant vanishes, and
that determinant is bilinear in ``(s, t)``.  Two further edges therefore
give a pair of bilinear equations, which reduce to one quadratic in
``s``.  Every quadruple of pairwise skew, pairwise non-adjacent edges is
solved this way, then the four hits are checked to lie inside their
edges.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .curves import OpenCurve, PolyCurve, _base, _entropy, nonadjacent_pairs
from .errors import InputError

ALTERNATION = ("simple", "flipped", "alternating")
CHUNK = 200_000


@dataclass(frozen=True)
class Quadrisecant:
    point: tuple  # first hit in curve order
    direction: tuple  # unit vector, first nonzero component positive
    edges: tuple  # four edge indices in curve order
    edge_params: tuple  # parameter in (0, 1) on each edge
    line_params: tuple  # signed position of each hit along the line
    alternation: str

    @property
    def curve_params(self) -> tuple:
        return tuple(e + t for e, t in zip(self.edges, self.edge_params))

    @property
    def line_order(self) -> tuple:
        """Curve-order labels 0..3 listed in the order they occur along the line."""
        return tuple(int(k) for k in np.argsort(self.line_params, kind="stable"))

    def points(self) -> np.ndarray:
        p = np.asarray(self.point)
        u = np.asarray(self.direction)
        return p + np.outer(self.line_params, u)

    def plucker(self) -> np.ndarray:
        u = np.asarray(self.direction)
        return np.concatenate([u, np.cross(np.asarray(self.point), u)])

    def verify(self, K, tol: float) -> bool:
        """Hits lie on their edges (strictly inside) and on one line, within ``tol``."""
        K = _base(K)
        a, b = K.edges()
        pts = self.points()
        scale = K.diameter
        for e, t, p in zip(self.edges, self.edge_params, pts):
            if not 0 < t < 1:
                return False
            q = a[e] + t * (b[e] - a[e])
            if np.linalg.norm(q - p) > tol * scale:
                return False
        return True

    def to_json(self) -> dict:
        return {
            "point": list(self.point),
            "direction": list(self.direction),
            "edges": list(self.edges),
            "edge_params": list(self.edge_params),
            "line_params": list(self.line_params),
            "alternation": self.alternation,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Quadrisecant":
        return cls(
            tuple(obj["point"]),
            tuple(obj["direction"]),
            tuple(obj["edges"]),
            tuple(obj["edge_params"]),
            tuple(obj["line_params"]),
            obj["alternation"],
        )


def classify(line_order) -> str:
    """Alternation class from the line order of curve-order labels 0..3.

    Labels are read cyclically along the curve, so 0-2 and 1-3 are the
    opposite pairs.  No opposite neighbours along the line gives
    ``simple``; an opposite middle pair gives ``flipped``; opposite outer
    pairs (the pattern a_{i-1} a_{i+1} a_i a_{i+2}) give ``alternating``.
    """
    p = list(line_order)
    if sorted(p) != [0, 1, 2, 3]:
        raise InputError("line order must be a permutation of 0..3")
    opp = [abs(p[k] - p[k + 1]) == 2 for k in range(3)]
    if not any(opp):
        return "simple"
    if opp[1] and not opp[0] and not opp[2]:
        return "flipped"
    if opp[0] and opp[2] and not opp[1]:
        return "alternating"
    raise AssertionError(f"impossible line order {p}")


def _quadruples(E: int, closed: bool, ok: np.ndarray):
    """Chunks of index quadruples i<j<k<l whose six pairs all satisfy ``ok``."""
    buf = []
    size = 0
    for i in range(E):
        js = np.nonzero(ok[i, i + 1:])[0] + i + 1
        for j in js.tolist():
            ks = js[(js > j) & ok[j, js]]
            if len(ks) < 2:
                continue
            kk, ll = np.triu_indices(len(ks), k=1)
            k, l = ks[kk], ks[ll]
            m = ok[k, l]
            if not m.any():
                continue
            k, l = k[m], l[m]
            block = np.column_stack([np.full(len(k), i), np.full(len(k), j), k, l])
            buf.append(block)
            size += len(block)
            if size >= CHUNK:
                yield np.concatenate(buf)
                buf, size = [], 0
    if buf:
        yield np.concatenate(buf)


_PAIRS = ((0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2), (1, 2, 0, 3), (1, 3, 0, 2), (2, 3, 0, 1))


def _coeffs(A1, d1, A2, d2, A3, d3):
    """g(s, t) = alpha + beta s + gamma t + delta s t for the line through X(s), Y(t) meeting line 3."""
    c0 = A2 - A1
    c3 = A3 - A1
    d3c3 = np.cross(d3, c3)
    d3d1 = np.cross(d3, d1)
    alpha = (c0 * d3c3).sum(-1)
    beta = -(c0 * d3d1).sum(-1) - (d1 * d3c3).sum(-1)
    gamma = (d2 * d3c3).sum(-1)
    delta = -(d2 * d3d1).sum(-1)
    return alpha, beta, gamma, delta


def _line_param(P, u, A, d):
    """Parameter on line (A, d) of its closest point to line (P, u), and the gap."""
    w = P - A
    a = (u * u).sum(-1)
    b = (u * d).sum(-1)
    c = (d * d).sum(-1)
    dd = (u * w).sum(-1)
    e = (d * w).sum(-1)
    den = a * c - b * b
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = (b * e - c * dd) / den
        mu = (a * e - b * dd) / den
    gap = np.linalg.norm(P + lam[..., None] * u - (A + mu[..., None] * d), axis=-1)
    return mu, gap


def quadrisecants(K, tol: float = 1e-9) -> list[Quadrisecant]:
    """All isolated quadrisecant lines meeting four pairwise non-adjacent edges.

    ``tol`` is relative to the curve diameter and is used for the skewness
    filter, the on-edge check and the duplicate merge.  Results are ordered
    by edge tuple.
    """
    K = _base(K)
    if not tol > 0:
        raise InputError("tol must be positive")
    a, b = K.edges()
    E = len(a)
    if E < 4:
        return []
    center = K.vertices.mean(axis=0)
    scale = K.diameter
    A = (a - center) / scale
    D = (b - a) / scale
    i, j = nonadjacent_pairs(E, K.closed)
    cr = np.cross(D[i], D[j])
    crn = np.linalg.norm(cr, axis=1)
    dn = np.linalg.norm(D, axis=1)
    skew = np.abs(((A[j] - A[i]) * cr).sum(-1)) / (dn[i] * dn[j])
    S = np.zeros((E, E))
    S[i, j] = S[j, i] = skew
    ok = S > tol
    found: list[tuple] = []
    for Q in _quadruples(E, K.closed, ok):
        pair_skew = np.stack([S[Q[:, p[0]], Q[:, p[1]]] for p in _PAIRS], axis=1)
        choice = np.argmax(pair_skew, axis=1)
        perm = np.array(_PAIRS)[choice]
        R = np.take_along_axis(Q, perm, axis=1)  # carriers first
        A1, A2, A3, A4 = (A[R[:, k]] for k in range(4))
        D1, D2, D3, D4 = (D[R[:, k]] for k in range(4))
        a3, b3, g3, h3 = _coeffs(A1, D1, A2, D2, A3, D3)
        a4, b4, g4, h4 = _coeffs(A1, D1, A2, D2, A4, D4)
        qa = b4 * h3 - h4 * b3
        qb = a4 * h3 + b4 * g3 - g4 * b3 - h4 * a3
        qc = a4 * g3 - g4 * a3
        roots = _quadratic_roots(qa, qb, qc)
        for s in roots:
            good = np.isfinite(s) & (s > 0) & (s < 1)
            if not good.any():
                continue
            idx = np.nonzero(good)[0]
            ss = s[idx]
            den3 = g3[idx] + h3[idx] * ss
            den4 = g4[idx] + h4[idx] * ss
            with np.errstate(divide="ignore", invalid="ignore"):
                t = np.where(
                    np.abs(den3) >= np.abs(den4),
                    -(a3[idx] + b3[idx] * ss) / den3,
                    -(a4[idx] + b4[idx] * ss) / den4,
                )
            good2 = np.isfinite(t) & (t > 0) & (t < 1)
            idx, ss, t = idx[good2], ss[good2], t[good2]
            if not len(idx):
                continue
            X = A1[idx] + ss[:, None] * D1[idx]
            Y = A2[idx] + t[:, None] * D2[idx]
            u = Y - X
            un = np.linalg.norm(u, axis=1)
            keep = un > tol
            idx, ss, t, X, u, un = idx[keep], ss[keep], t[keep], X[keep], u[keep], un[keep]
            u = u / un[:, None]
            m3, gap3 = _line_param(X, u, A3[idx], D3[idx])
            m4, gap4 = _line_param(X, u, A4[idx], D4[idx])
            hit = (m3 > 0) & (m3 < 1) & (m4 > 0) & (m4 < 1) & (gap3 <= tol) & (gap4 <= tol)
            for k in np.nonzero(hit)[0].tolist():
                r = idx[k]
                params = {
                    int(R[r, 0]): float(ss[k]),
                    int(R[r, 1]): float(t[k]),
                    int(R[r, 2]): float(m3[k]),
                    int(R[r, 3]): float(m4[k]),
                }
                found.append((tuple(sorted(params)), params))
    return _assemble(K, found, tol, center, scale)


def _quadratic_roots(qa, qb, qc):
    """Both real roots per row (NaN where missing); linear rows give one root."""
    with np.errstate(divide="ignore", invalid="ignore"):
        mag = np.maximum(np.maximum(np.abs(qa), np.abs(qb)), np.abs(qc))
        lin = np.abs(qa) <= 1e-12 * mag
        disc = qb * qb - 4 * qa * qc
        sq = np.sqrt(np.where(disc >= 0, disc, np.nan))
        # numerically stable pair
        qq = -0.5 * (qb + np.copysign(sq, qb))
        r1 = np.where(lin, -qc / qb, qq / qa)
        r2 = np.where(lin, np.nan, qc / qq)
    return r1, r2


def _assemble(K: PolyCurve, found, tol, center, scale) -> list[Quadrisecant]:
    a, b = K.edges()
    out: list[Quadrisecant] = []
    plk = np.zeros((0, 6))
    for edges, params in sorted(found, key=lambda x: (x[0], [x[1][e] for e in x[0]])):
        pts = np.array([a[e] + params[e] * (b[e] - a[e]) for e in edges])
        u = pts[-1] - pts[0]
        # best-fit direction through all four points
        _, _, vt = np.linalg.svd(pts - pts.mean(axis=0))
        u = vt[0] * np.sign(vt[0] @ u)
        nz = np.nonzero(np.abs(u) > 1e-12)[0][0]
        if u[nz] < 0:
            u = -u
        p0 = pts[0]
        lam = tuple(float(x) for x in (pts - p0) @ u)
        order = tuple(int(k) for k in np.argsort(lam, kind="stable"))
        q = Quadrisecant(
            tuple(float(x) for x in p0),
            tuple(float(x) for x in u),
            edges,
            tuple(params[e] for e in edges),
            lam,
            classify(order),
        )
        pl = q.plucker() / scale
        dup = None
        if out:
            near = (np.linalg.norm(plk[:, :3] - pl[:3], axis=1) <= tol) & (
                np.linalg.norm(plk[:, 3:] - pl[3:], axis=1) <= tol * 10
            )
            if near.any():
                dup = int(np.argmax(near))
        if dup is None:
            out.append(q)
            plk = np.vstack([plk, pl]) if out[:-1] else pl[None]
        elif out[dup].edges != q.edges:
            warnings.warn(
                f"lines through edges {out[dup].edges} and {q.edges} coincide within tol; "
                "the curve has a higher-order secant or tol is too coarse",
                RuntimeWarning,
                stacklevel=3,
            )
            out.append(q)
            plk = np.vstack([plk, pl])
    return out


def count_upper_bound(n_edges: int) -> Fraction:
    """n/12 (n-3)(n-4)(n-5), exact."""
    n = n_edges
    return Fraction(n * (n - 3) * (n - 4) * (n - 5), 12)


def summary(qs: list[Quadrisecant]) -> dict:
    counts = {k: 0 for k in ALTERNATION}
    for q in qs:
        counts[q.alternation] += 1
    return {"total": len(qs), **counts}


# ---------------------------------------------------------------- height 3

def secant_opening(K: PolyCurve, q: Quadrisecant, gap: float = 1e-3, which: int = 0) -> OpenCurve:
    """Open ``K`` at the point where ``q`` meets its ``which``-th edge.

    Two vertices are inserted on that edge: the hit point ``x0`` (the new
    leg) and a point ``gap`` (fraction of the edge length) before it (the
    new head), and the short edge between them is deleted.
    """
    K = _base(K)
    if not K.closed:
        raise InputError("secant_opening needs a closed curve")
    e = q.edges[which]
    t = q.edge_params[which]
    if not 0 < gap < t:
        raise InputError(f"gap must lie in (0, {t:.3g}) for this hit")
    n = K.n_vertices
    a, b = K.vertices[e], K.vertices[(e + 1) % n]
    x0 = a + t * (b - a)
    x1 = a + (t - gap) * (b - a)
    rest = np.roll(K.vertices, -(e + 1), axis=0)  # b, ..., a
    v = np.vstack([x0[None], rest, x1[None]])
    return OpenCurve(PolyCurve(v, closed=False, label=f"{K.label}@secant{q.edges}"))


def cone_directions(axis, eps: float, n: int, seed: int) -> np.ndarray:
    """``n`` directions uniform in the spherical cap of half-angle ``eps`` around ``axis``."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    rng = np.random.default_rng(_entropy(seed))
    z = 1 - rng.uniform(0, 1, n) * (1 - math.cos(eps))
    phi = rng.uniform(0, 2 * math.pi, n)
    r = np.sqrt(np.clip(1 - z * z, 0, None))
    local = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    helper = np.eye(3)[np.argmin(np.abs(axis))]
    e1 = np.cross(axis, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    return local @ np.vstack([e1, e2, axis])


@dataclass(frozen=True)
class Height3Excerpt:
    eps: float
    n_dirs: int
    degenerate: int
    closure_crossings: dict  # straight closure-segment crossings -> count
    raw_heights: dict  # diagrammatic height of the raw projection -> count
    height_bounds: dict  # height bound after simplification -> count
    classes: dict  # fingerprint key -> count

    def fraction(self, table: str, value: int) -> float:
        counts = getattr(self, table)
        total = sum(counts.values())
        return counts.get(value, 0) / total if total else 0.0

    def to_json(self) -> dict:
        return {
            "eps": self.eps,
            "n_dirs": self.n_dirs,
            "degenerate": self.degenerate,
            "closure_crossings": {str(k): v for k, v in sorted(self.closure_crossings.items())},
            "raw_heights": {str(k): v for k, v in sorted(self.raw_heights.items())},
            "height_bounds": {str(k): v for k, v in sorted(self.height_bounds.items())},
            "classes": dict(sorted(self.classes.items())),
        }


def height3_link(
    K: PolyCurve,
    q: Quadrisecant,
    n_dirs_local: int = 200,
    seed: int = 0,
    eps: float = 1e-4,
    gap: float | None = None,
    which: int = 0,
) -> Height3Excerpt:
    """Projections of ``K`` opened on ``q`` along directions close to ``q``.

    The cone must be narrow compared with the opening gap: the three other
    strands through the secant pass within about ``eps`` x distance of the
    leg, and only separate it from the head when that is below the gap.
    ``gap`` defaults to min(0.01, t/2) of the edge, t the hit parameter.
    """
    if gap is None:
        gap = min(0.01, q.edge_params[which] / 2)
    from .diagrams import KnotoidDiagram, diagrammatic_height
    from .invariants import fingerprint
    from .projection import _Geometry, decode_key, project_keys, straight_closure_crossings

    l = secant_opening(K, q, gap, which)
    dirs = cone_directions(q.direction, eps, n_dirs_local, seed)
    keys = project_keys(_Geometry(l.vertices, False), dirs)
    cc = straight_closure_crossings(l.vertices, dirs)
    crossings: dict = {}
    raw: dict = {}
    bounds: dict = {}
    classes: dict = {}
    degenerate = 0
    for key, c in zip(keys, cc.tolist()):
        if key is None:
            degenerate += 1
            continue
        code = decode_key(key)
        d = KnotoidDiagram.from_code(code)
        crossings[c] = crossings.get(c, 0) + 1
        h = diagrammatic_height(d)
        raw[h] = raw.get(h, 0) + 1
        fp = fingerprint(d)
        hb = getattr(fp, "height", None)
        if hb is not None:
            hb = min(hb, h)
            bounds[hb] = bounds.get(hb, 0) + 1
        classes[fp.key] = classes.get(fp.key, 0) + 1
    return Height3Excerpt(eps, n_dirs_local, degenerate, crossings, raw, bounds, classes)
