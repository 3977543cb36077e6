"""Polygonal curves in 3-space.

Closed curves model knots, open curves model the objects whose spectra
we compute.  Everything here works in float64 and treats vertex arrays
as read-only.
"""

from __future__ import annotations

import itertools
import math
import os
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import InputError, SamplingError

DATA_ENV = "KNOTSPEC_DATA"
BUNDLED = ("3_1", "4_1", "5_2", "kinoshita_terasaka", "conway")


def _entropy(seed: int) -> int:
    return int(seed) % (1 << 64)


# ---------------------------------------------------------------- geometry

def segment_distance(p0, p1, q0, q1) -> np.ndarray:
    """Distance between segments [p0,p1] and [q0,q1]; broadcasts over leading axes."""
    p0, p1, q0, q1 = (np.asarray(x, dtype=float) for x in (p0, p1, q0, q1))
    d1, d2, r = p1 - p0, q1 - q0, p0 - q0
    a = (d1 * d1).sum(-1)
    e = (d2 * d2).sum(-1)
    f = (d2 * r).sum(-1)
    c = (d1 * r).sum(-1)
    b = (d1 * d2).sum(-1)
    denom = a * e - b * b
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(denom > 1e-14 * a * e, np.clip((b * f - c * e) / denom, 0.0, 1.0), 0.0)
        t = (b * s + f) / e
        s = np.where(t < 0, np.clip(-c / a, 0.0, 1.0), np.where(t > 1, np.clip((b - c) / a, 0.0, 1.0), s))
    t = np.clip(t, 0.0, 1.0)
    diff = (p0 + s[..., None] * d1) - (q0 + t[..., None] * d2)
    return np.sqrt((diff * diff).sum(-1))


def point_segment_distance(pts, q0, q1) -> np.ndarray:
    """Distances from points (m,3) to segments (k,3)-(k,3); shape (m,k)."""
    pts = np.asarray(pts, dtype=float)[:, None, :]
    d = np.asarray(q1, dtype=float) - q0
    dd = np.maximum((d * d).sum(-1), 1e-300)
    t = np.clip(((pts - q0) * d).sum(-1) / dd, 0.0, 1.0)
    diff = pts - (q0 + t[..., None] * d)
    return np.sqrt((diff * diff).sum(-1))


def _edges(v: np.ndarray, closed: bool) -> tuple[np.ndarray, np.ndarray]:
    if closed:
        return v, np.roll(v, -1, axis=0)
    return v[:-1], v[1:]


def nonadjacent_pairs(n_edges: int, closed: bool) -> tuple[np.ndarray, np.ndarray]:
    i, j = np.triu_indices(n_edges, k=2)
    if closed and n_edges > 2:
        keep = ~((i == 0) & (j == n_edges - 1))
        i, j = i[keep], j[keep]
    return i, j


def min_nonadjacent_distance(v: np.ndarray, closed: bool) -> float:
    a, b = _edges(v, closed)
    i, j = nonadjacent_pairs(len(a), closed)
    if len(i) == 0:
        return math.inf
    return float(segment_distance(a[i], b[i], a[j], b[j]).min())


def diameter(v: np.ndarray) -> float:
    """Largest vertex-to-vertex distance (equal to the diameter of the polygon)."""
    v = np.asarray(v, dtype=float)
    diff = v[:, None, :] - v[None, :, :]
    return float(np.sqrt((diff * diff).sum(-1)).max())


# ------------------------------------------------------------------ types

@dataclass(frozen=True, eq=False)
class PolyCurve:
    """Polygonal curve; ``closed`` joins the last vertex back to the first."""

    vertices: np.ndarray
    closed: bool = True
    label: str = ""

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3:
            raise InputError("vertices must be an (n, 3) array")
        if not np.isfinite(v).all():
            raise InputError("vertices must be finite")
        need = 3 if self.closed else 2
        if len(v) < need:
            raise InputError(f"{'closed' if self.closed else 'open'} curve needs at least {need} vertices")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        a, b = _edges(v, self.closed)
        d = b - a
        lens = np.linalg.norm(d, axis=1)
        scale = max(diameter(v), 1e-300)
        if (lens <= 1e-14 * scale).any():
            k = int(np.argmin(lens))
            raise InputError(f"edge {k} has zero length (repeated vertex)")
        if len(d) > 1:
            if self.closed:
                d0, d1 = d, np.roll(d, -1, axis=0)
            else:
                d0, d1 = d[:-1], d[1:]
            cr = np.linalg.norm(np.cross(d0, d1), axis=1)
            l0, l1 = np.linalg.norm(d0, axis=1), np.linalg.norm(d1, axis=1)
            back = (cr <= 1e-12 * l0 * l1) & ((d0 * d1).sum(1) < 0)
            if back.any():
                k = int(np.argmax(back))
                raise InputError(f"consecutive edges {k} and {(k + 1) % len(d)} fold back onto each other")
        if self.closed and min_nonadjacent_distance(v, True) <= 1e-12 * scale:
            raise InputError("closed curve is not simple (two non-adjacent edges meet)")

    def __eq__(self, other):
        if not isinstance(other, PolyCurve):
            return NotImplemented
        return self.closed == other.closed and np.array_equal(self.vertices, other.vertices)

    def __hash__(self):
        return hash((self.closed, self.vertices.tobytes()))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.vertices) if self.closed else len(self.vertices) - 1

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        return _edges(self.vertices, self.closed)

    @property
    def diameter(self) -> float:
        return diameter(self.vertices)

    @property
    def length(self) -> float:
        a, b = self.edges()
        return float(np.linalg.norm(b - a, axis=1).sum())

    @property
    def base(self) -> "PolyCurve":
        return self

    def is_simple(self) -> bool:
        return min_nonadjacent_distance(self.vertices, self.closed) > 1e-12 * self.diameter

    def transformed(self, rotation=None, translation=None, scale: float = 1.0, label: str | None = None) -> "PolyCurve":
        v = self.vertices * scale
        if rotation is not None:
            v = v @ np.asarray(rotation, dtype=float).T
        if translation is not None:
            v = v + np.asarray(translation, dtype=float)
        return PolyCurve(v, self.closed, self.label if label is None else label)

    def subdivided(self, k: int = 2) -> "PolyCurve":
        """Each edge split into ``k`` equal pieces (same point set)."""
        a, b = self.edges()
        t = np.arange(k)[:, None, None] / k
        pts = (a[None] * (1 - t) + b[None] * t).transpose(1, 0, 2).reshape(-1, 3)
        if not self.closed:
            pts = np.vstack([pts, self.vertices[-1:]])
        return PolyCurve(pts, self.closed, self.label)


@dataclass(frozen=True)
class Origin:
    knot: str
    vertex: int
    deleted_edge: tuple  # ((x, y, z), (x, y, z)): tail and head of the removed edge
    sample: int | None = None
    seed: int | None = None


@dataclass(frozen=True, eq=False)
class OpenCurve:
    """Open polygon, optionally remembering the knot it was cut from."""

    base: PolyCurve
    origin: Origin | None = None

    def __post_init__(self):
        if self.base.closed:
            raise InputError("OpenCurve needs an open base polygon")
        if self.gap <= 0:
            raise InputError("open curve endpoints coincide (zero end-to-end gap)")

    def __eq__(self, other):
        if not isinstance(other, OpenCurve):
            return NotImplemented
        return self.base == other.base and self.origin == other.origin

    def __hash__(self):
        return hash(self.base)

    @classmethod
    def from_vertices(cls, vertices, label: str = "") -> "OpenCurve":
        return cls(PolyCurve(vertices, closed=False, label=label))

    @property
    def vertices(self) -> np.ndarray:
        return self.base.vertices

    @property
    def closed(self) -> bool:
        return False

    @property
    def label(self) -> str:
        return self.base.label

    @property
    def gap(self) -> float:
        v = self.base.vertices
        return float(np.linalg.norm(v[-1] - v[0]))

    @property
    def diameter(self) -> float:
        return self.base.diameter

    @property
    def n_vertices(self) -> int:
        return self.base.n_vertices

    def is_simple(self) -> bool:
        return self.base.is_simple()


def _base(c) -> PolyCurve:
    return c.base if isinstance(c, OpenCurve) else c


# -------------------------------------------------------------- distances

def _one_sided(a: PolyCurve, b: PolyCurve, tol: float) -> float:
    """sup over points of a of the distance to b, by branch and bound.

    Two upper bounds on a piece of an edge are combined: the distance is
    1-Lipschitz along the edge, and the distance to any single segment of
    b is convex there, so it is at most its larger endpoint value.  The
    second bound is exact on pieces that lie on b.
    """
    a0, a1 = a.edges()
    b0, b1 = b.edges()

    def dists(pts):
        return point_segment_distance(pts, b0, b1)

    seg = np.arange(len(a0))
    lo = np.zeros(len(a0))
    hi = np.ones(len(a0))
    dlo = dists(a0)
    dhi = dists(a1)
    best = float(max(dlo.min(axis=1).max(), dhi.min(axis=1).max()))
    elen = np.linalg.norm(a1 - a0, axis=1)
    while len(seg):
        length = elen[seg] * (hi - lo)
        lip = (dlo.min(axis=1) + dhi.min(axis=1) + length) / 2
        convex = np.maximum(dlo, dhi).min(axis=1)
        keep = np.minimum(lip, convex) > best + tol
        if not keep.any():
            break
        seg, lo, hi, dlo, dhi = seg[keep], lo[keep], hi[keep], dlo[keep], dhi[keep]
        mid = (lo + hi) / 2
        pts = a0[seg] + mid[:, None] * (a1[seg] - a0[seg])
        dm = dists(pts)
        best = max(best, float(dm.min(axis=1).max()))
        seg = np.concatenate([seg, seg])
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        dlo, dhi = np.concatenate([dlo, dm]), np.concatenate([dm, dhi])
    return best


def hausdorff(a, b, tol: float | None = None) -> float:
    """Hausdorff distance between the point sets of two polygonal curves.

    Both one-sided distances are maximized over the continuous edges of the
    first curve; the answer is exact up to ``tol`` (default 1e-12 times the
    larger diameter).
    """
    a, b = _base(a), _base(b)
    if tol is None:
        tol = 1e-12 * max(a.diameter, b.diameter, 1e-300)
    return max(_one_sided(a, b, tol), _one_sided(b, a, tol))


def tube_radius(K) -> float:
    """Half the minimum distance between non-adjacent edges (``inf`` if none)."""
    K = _base(K)
    dmin = min_nonadjacent_distance(K.vertices, K.closed)
    if math.isinf(dmin):
        return math.inf
    if dmin <= 1e-12 * K.diameter:
        raise InputError("curve self-intersects; tube radius undefined")
    return dmin / 2


# ---------------------------------------------------------- neighborhoods

def open_at(K: PolyCurve, x: int) -> OpenCurve:
    """Delete the edge ending at vertex ``x``; the result runs from ``x`` around to ``x - 1``."""
    if not isinstance(K, PolyCurve) or not K.closed:
        raise InputError("open_at needs a closed curve")
    n = K.n_vertices
    if not isinstance(x, (int, np.integer)) or not 0 <= x < n:
        raise InputError(f"vertex index {x} out of range 0..{n - 1}")
    x = int(x)
    v = np.roll(K.vertices, -x, axis=0)
    tail, head = K.vertices[(x - 1) % n], K.vertices[x]
    origin = Origin(K.label, x, (tuple(map(float, tail)), tuple(map(float, head))))
    return OpenCurve(PolyCurve(v, closed=False, label=f"{K.label}@{x}"), origin)


def open_with_gap(K: PolyCurve, edge: int, gap: float) -> OpenCurve:
    """Remove a sub-arc centred on the midpoint of ``edge`` so the endpoints are ``gap`` apart.

    The cut points sit at equal arc length on either side of the midpoint;
    smaller gaps give nested curves (each contains the previous one).
    ``gap`` is absolute; pass ``frac * K.diameter`` for a relative gap.
    """
    if not K.closed:
        raise InputError("open_with_gap needs a closed curve")
    n = K.n_vertices
    if not 0 <= edge < n:
        raise InputError(f"edge {edge} out of range")
    if not gap > 0:
        raise InputError("gap must be positive")
    v = np.roll(K.vertices, -(edge + 1), axis=0)  # v[-1] -> v[0] is the cut edge
    a, b = v[-1], v[0]
    # arc-length parametrization starting at the midpoint, going forward
    pts = np.vstack([(a + b) / 2, v, (a + b) / 2])
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    L = cum[-1]

    def at(s):
        k = min(int(np.searchsorted(cum, s, side="right")) - 1, len(seg) - 1)
        t = (s - cum[k]) / seg[k]
        return pts[k] + t * (pts[k + 1] - pts[k]), k

    def chord(s):
        return float(np.linalg.norm(at(s)[0] - at(L - s)[0]))

    # first arc length where the chord reaches the requested gap
    grid = np.linspace(0.0, L / 2, 4001)
    vals = np.array([chord(s) for s in grid])
    above = np.nonzero(vals >= gap)[0]
    if len(above) == 0:
        raise InputError(f"gap {gap:g} is larger than any chord through this edge midpoint")
    hi = grid[above[0]]
    lo = grid[above[0] - 1] if above[0] > 0 else 0.0
    for _ in range(200):
        mid = (lo + hi) / 2
        if chord(mid) >= gap:
            hi = mid
        else:
            lo = mid
    s = hi
    p_start, k_start = at(s)
    p_end, k_end = at(L - s)
    inner = pts[k_start + 1:k_end + 1]
    verts = [p_start]
    for q in inner:
        if np.linalg.norm(q - verts[-1]) > 1e-12 * K.diameter:
            verts.append(q)
    if np.linalg.norm(p_end - verts[-1]) > 1e-12 * K.diameter:
        verts.append(p_end)
    label = f"{K.label}@edge{edge}-gap{gap:.4g}"
    return OpenCurve(PolyCurve(np.array(verts), closed=False, label=label))


def sample_neighborhood(
    K: PolyCurve,
    x: int,
    h: float,
    n: int,
    seed: int = 0,
    amplitude: float | None = None,
    max_tries: int = 100,
) -> list[OpenCurve]:
    """Open curves near ``K`` opened at ``x``.

    Every coordinate of every vertex of ``open_at(K, x)`` is jittered
    uniformly on ``[-amplitude, amplitude]`` (default ``h / sqrt(3)``).
    Samples are kept when each vertex moved by less than ``h`` and the
    result is simple; with ``h`` below the tube radius the straight-line
    homotopy back to ``K_x`` is an isotopy that never touches the deleted
    edge, and the Hausdorff distance to ``K_x`` is below ``h``.  Sample
    ``i`` draws from its own stream seeded by ``(seed, x, i)``.
    """
    if not K.closed:
        raise InputError("sample_neighborhood needs a closed curve")
    if not h > 0:
        raise InputError("h must be positive")
    if n < 1:
        raise InputError("need at least one sample")
    tr = tube_radius(K)
    if not h < tr:
        raise InputError(
            f"h={h:g} is not below the tube radius {tr:g}; use h < {tr:g} (default 0.1 x tube radius)"
        )
    kx = open_at(K, x)
    amp = h / math.sqrt(3) if amplitude is None else float(amplitude)
    if amp < 0:
        raise InputError("amplitude must be nonnegative")
    v0 = kx.vertices
    scale = kx.diameter
    out = []
    for i in range(n):
        rng = np.random.default_rng([_entropy(seed), int(x), i])
        for _ in range(max_tries):
            jitter = rng.uniform(-amp, amp, size=v0.shape)
            if np.linalg.norm(jitter, axis=1).max() >= h:
                continue
            v = v0 + jitter
            if min_nonadjacent_distance(v, False) <= 1e-12 * scale:
                continue
            try:
                base = PolyCurve(v, closed=False, label=f"{K.label}@{x}#{i}")
            except InputError:
                continue
            out.append(OpenCurve(base, Origin(K.label, int(x), kx.origin.deleted_edge, i, int(seed))))
            break
        else:
            raise SamplingError(f"sample {i} at base {x}: no valid jitter in {max_tries} tries")
    return out


# ------------------------------------------------------------- genericity

@dataclass(frozen=True)
class ConditionResult:
    passed: bool
    residual: float  # smallest residual seen (inf when vacuous)
    offenders: tuple = ()

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "residual": None if math.isinf(self.residual) else self.residual,
            "offenders": [list(o) for o in self.offenders],
        }


@dataclass(frozen=True)
class GenericityReport:
    doubly_ruled: ConditionResult  # (i)
    quintisecant: ConditionResult  # (ii)
    osculating_trisecant: ConditionResult  # (iii)
    tol: float

    @property
    def passed(self) -> bool:
        return self.doubly_ruled.passed and self.quintisecant.passed and self.osculating_trisecant.passed

    def violations(self) -> list[str]:
        names = {"i": self.doubly_ruled, "ii": self.quintisecant, "iii": self.osculating_trisecant}
        return [k for k, r in names.items() if not r.passed]

    def to_json(self) -> dict:
        return {
            "tol": self.tol,
            "passed": self.passed,
            "i_doubly_ruled": self.doubly_ruled.to_json(),
            "ii_quintisecant": self.quintisecant.to_json(),
            "iii_osculating_trisecant": self.osculating_trisecant.to_json(),
        }


MAX_OFFENDERS = 20


def _result(residuals, labels, tol) -> ConditionResult:
    residuals = np.asarray(residuals, dtype=float)
    if residuals.size == 0:
        return ConditionResult(True, math.inf)
    bad = np.nonzero(residuals <= tol)[0][:MAX_OFFENDERS]
    return ConditionResult(len(bad) == 0, float(residuals.min()), tuple(tuple(int(x) for x in labels[k]) for k in bad))


def _incident_vertices(c: PolyCurve, e: int) -> tuple[int, int]:
    return e, (e + 1) % c.n_vertices


def _check_doubly_ruled(c: PolyCurve, tol: float) -> ConditionResult:
    a, b = c.edges()
    d = b - a
    E = len(a)
    i, j = nonadjacent_pairs(E, c.closed)
    nonadj = np.zeros((E, E), dtype=bool)
    nonadj[i, j] = nonadj[j, i] = True
    # skew distance between the supporting lines
    cr = np.cross(d[:, None, :], d[None, :, :])
    crn = np.linalg.norm(cr, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        skew = np.abs(((a[None, :, :] - a[:, None, :]) * cr).sum(-1)) / crn
    skew = np.where(crn > 1e-12, skew, 0.0)
    ok = nonadj & (skew > tol)
    triples = [t for t in itertools.combinations(range(E), 3) if ok[t[0], t[1]] and ok[t[0], t[2]] and ok[t[1], t[2]]]
    if not triples:
        return ConditionResult(True, math.inf)
    T = np.array(triples)
    V = c.vertices
    nV = len(V)
    residuals, labels = [], []
    for start in range(0, len(T), 2000):
        t = T[start:start + 2000]
        A1, A2, A3 = a[t[:, 0]], a[t[:, 1]], a[t[:, 2]]
        D1, D2, D3 = d[t[:, 0]], d[t[:, 1]], d[t[:, 2]]
        P = V[None, :, :]
        n1 = np.cross(A1[:, None] - P, D1[:, None])
        n2 = np.cross(A2[:, None] - P, D2[:, None])
        m = np.cross(n1, n2)
        w = np.cross(m, D3[:, None])
        wn = np.linalg.norm(w, axis=-1)
        A3P = A3[:, None] - P
        with np.errstate(divide="ignore", invalid="ignore"):
            r_skew = np.abs((A3P * w).sum(-1)) / wn
            r_par = np.linalg.norm(np.cross(A3P, D3[:, None]), axis=-1) / np.linalg.norm(D3, axis=-1)[:, None]
        mn = np.linalg.norm(m, axis=-1)
        scale = np.linalg.norm(n1, axis=-1) * np.linalg.norm(n2, axis=-1)
        res = np.where(wn > 1e-12 * mn * np.linalg.norm(D3, axis=-1)[:, None], r_skew, r_par)
        res = np.where(mn <= 1e-12 * scale, 0.0, res)
        # ignore the endpoints of the three generating edges
        excl = np.zeros_like(res, dtype=bool)
        for col in range(3):
            e = t[:, col]
            excl[np.arange(len(t)), e] = True
            excl[np.arange(len(t)), (e + 1) % nV] = True
        res = np.where(excl, np.inf, res)
        residuals.append(res.min(axis=1))
        arg = res.argmin(axis=1)
        labels.append(np.column_stack([t, arg]))
    return _result(np.concatenate(residuals), np.concatenate(labels), tol)


def _check_quintisecant(c: PolyCurve, tol: float) -> ConditionResult:
    from .secants import quadrisecants  # deferred: secants builds on this module

    a, b = c.edges()
    d = b - a
    E = len(a)
    residuals, labels = [], []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # coincident lines are what we are looking for
        qs = quadrisecants(c, tol=max(tol, 1e-9))
    for q in qs:
        p0 = np.asarray(q.point)
        u = np.asarray(q.direction)
        others = [e for e in range(E) if e not in q.edges]
        if not others:
            continue
        o = np.array(others)
        # distance from the line to each remaining edge segment
        far = 4 * c.diameter
        dist = segment_distance(p0 - far * u, p0 + far * u, a[o], b[o])
        k = int(np.argmin(dist))
        residuals.append(float(dist[k]))
        labels.append(tuple(q.edges) + (others[k],))
    # five pairwise non-adjacent edges in one plane: every line of that plane
    # meets all five supporting lines, so the secant structure is not isolated
    i, j = nonadjacent_pairs(E, c.closed)
    V = c.vertices
    for e1, e2 in zip(i.tolist(), j.tolist()):
        nrm = np.cross(d[e1], a[e2] - a[e1])
        nn = np.linalg.norm(nrm)
        if nn <= 1e-12 * np.linalg.norm(d[e1]) * np.linalg.norm(a[e2] - a[e1]):
            nrm = np.cross(d[e1], b[e2] - a[e1])
            nn = np.linalg.norm(nrm)
            if nn == 0:
                continue
        h = np.abs((V - a[e1]) @ (nrm / nn))
        off = np.maximum(h[np.arange(E)], h[(np.arange(E) + 1) % len(V)])
        chosen = [e1]
        for e in np.argsort(off, kind="stable").tolist():
            if e in chosen:
                continue
            if all(_edges_apart(e, f, E, c.closed) for f in chosen):
                chosen.append(e)
            if len(chosen) == 5:
                break
        if len(chosen) == 5:
            residuals.append(float(off[chosen].max()))
            labels.append(tuple(sorted(chosen)))
    if not residuals:
        return ConditionResult(True, math.inf)
    return _result(residuals, np.array(labels, dtype=object), tol)


def _edges_apart(e: int, f: int, E: int, closed: bool) -> bool:
    diff = abs(e - f)
    if diff <= 1:
        return False
    return not (closed and diff == E - 1)


def _check_osculating(c: PolyCurve, tol: float) -> ConditionResult:
    V = c.vertices
    n = len(V)
    a, b = c.edges()
    E = len(a)
    verts = range(n) if c.closed else range(1, n - 1)
    residuals, labels = [], []
    for k in verts:
        p, prev, nxt = V[k], V[(k - 1) % n], V[(k + 1) % n]
        nrm = np.cross(prev - p, nxt - p)
        nn = np.linalg.norm(nrm)
        if nn <= 1e-12 * np.linalg.norm(prev - p) * np.linalg.norm(nxt - p):
            continue
        nrm /= nn
        e1 = (prev - p) / np.linalg.norm(prev - p)
        e2 = np.cross(nrm, e1)
        hits = []  # (edge, angle mod pi, angular half-width or 0, point)
        intervals = []
        for e in range(E):
            if k in _incident_vertices(c, e):
                continue
            s0, s1 = (a[e] - p) @ nrm, (b[e] - p) @ nrm
            if abs(s0) <= tol and abs(s1) <= tol:
                th = sorted(math.atan2((x - p) @ e2, (x - p) @ e1) % math.pi for x in (a[e], b[e]))
                intervals.append((e, th))
                hits.extend((e, (a[e] if j == 0 else b[e])) for j in range(2))
                continue
            if s0 * s1 > 0 and min(abs(s0), abs(s1)) > tol:
                continue
            t = s0 / (s0 - s1) if s0 != s1 else 0.0
            hits.append((e, a[e] + t * (b[e] - a[e])))
        pts = [(e, q) for e, q in hits]
        best = math.inf
        lab = None
        for (ea, qa), (eb, qb) in itertools.combinations(pts, 2):
            if ea == eb:
                continue
            shared = _shared_vertex(c, ea, eb)
            if shared is not None and np.linalg.norm(qa - V[shared]) <= tol and np.linalg.norm(qb - V[shared]) <= tol:
                continue  # one curve point reached through two adjacent edges
            ua, ub = qa - p, qb - p
            la, lb = np.linalg.norm(ua), np.linalg.norm(ub)
            if la == 0 or lb == 0:
                r = 0.0
            else:
                sin = np.linalg.norm(np.cross(ua, ub)) / (la * lb)
                r = sin * min(la, lb)
            if r < best:
                best, lab = r, (k, ea, eb)
        # two in-plane edges seen from the vertex under overlapping angles
        for (ea, ta), (eb, tb) in itertools.combinations(intervals, 2):
            if _arcs_overlap(ta, tb, 1e-12):
                best, lab = 0.0, (k, ea, eb)
        if lab is not None:
            residuals.append(best)
            labels.append(lab)
    if not residuals:
        return ConditionResult(True, math.inf)
    return _result(residuals, np.array(labels), tol)


def _shared_vertex(c: PolyCurve, e: int, f: int) -> int | None:
    ve, vf = set(_incident_vertices(c, e)), set(_incident_vertices(c, f))
    common = ve & vf
    return common.pop() if common else None


def _arcs_overlap(ta, tb, margin: float = 0.0) -> bool:
    """Overlap of two angular intervals on the circle of line directions (mod pi)."""

    def spans(t):
        lo, hi = t
        # the shorter way round is the span of a segment seen from a point
        return [(lo, hi)] if hi - lo <= math.pi / 2 else [(hi, math.pi), (0.0, lo)]

    return any(max(x0, y0) + margin < min(x1, y1) for x0, x1 in spans(ta) for y0, y1 in spans(tb))


def genericity_check(c, tol: float = 1e-9) -> GenericityReport:
    """Numeric diagnostics for the three genericity conditions.

    (i)   no vertex on the doubly ruled surface of three pairwise skew edges
          (residual: distance from the third edge line to the line through
          the vertex meeting the first two);
    (ii)  no line meets five edges (residual: distance from each
          quadrisecant to the nearest further edge, and out-of-plane spread
          of five pairwise non-adjacent edges);
    (iii) no trisecant through a vertex inside its osculating plane.
    """
    c = _base(c)
    return GenericityReport(
        _check_doubly_ruled(c, tol),
        _check_quintisecant(c, tol),
        _check_osculating(c, tol),
        tol,
    )


# -------------------------------------------------------------- generators

def planar_ngon(n: int, radius: float = 1.0) -> PolyCurve:
    if n < 3:
        raise InputError("planar_ngon needs n >= 3")
    t = 2 * np.pi * np.arange(n) / n
    v = np.column_stack([radius * np.cos(t), radius * np.sin(t), np.zeros(n)])
    return PolyCurve(v, True, f"planar_{n}gon")


def torus_knot(p: int, q: int, n: int) -> PolyCurve:
    """(p, q) torus knot ``r = 2 + cos(q t)`` sampled at ``n`` points."""
    if p < 1 or q < 1 or math.gcd(p, q) != 1:
        raise InputError("torus_knot needs coprime positive p, q")
    if n < 3:
        raise InputError("torus_knot needs n >= 3")
    t = 2 * np.pi * np.arange(n) / n
    r = 2 + np.cos(q * t)
    v = np.column_stack([r * np.cos(p * t), r * np.sin(p * t), -np.sin(q * t)])
    try:
        return PolyCurve(v, True, f"torus_{p}_{q}_{n}")
    except InputError as exc:
        raise InputError(f"torus_knot({p},{q},{n}) is not simple; use more points") from exc


def data_dir() -> Path:
    env = os.environ.get(DATA_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("knotspec") / "data"))


def parse_curve(text: str, label: str = ""):
    kind = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if kind is None:
            if line not in ("open", "closed"):
                raise InputError(f"line {lineno}: expected 'open' or 'closed', got {line!r}")
            kind = line
            continue
        parts = line.split()
        if len(parts) != 3:
            raise InputError(f"line {lineno}: expected three coordinates")
        try:
            rows.append([float(x) for x in parts])
        except ValueError as exc:
            raise InputError(f"line {lineno}: {exc}") from None
    if kind is None:
        raise InputError("empty curve file")
    if not rows:
        raise InputError("curve file has no vertices")
    base = PolyCurve(np.array(rows), kind == "closed", label)
    return base if base.closed else OpenCurve(base)


def load_curve(path) -> PolyCurve | OpenCurve:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read curve file {path}: {exc.strerror}") from None
    return parse_curve(text, path.stem)


def format_curve(c, comment: str | None = None) -> str:
    b = _base(c)
    lines = []
    if comment:
        lines.extend(f"# {line}" for line in comment.splitlines())
    lines.append("closed" if b.closed else "open")
    lines.extend(" ".join(repr(float(x)) for x in row) for row in b.vertices)
    return "\n".join(lines) + "\n"


def save_curve(c, path, comment: str | None = None) -> None:
    Path(path).write_text(format_curve(c, comment))


def bundled(name: str) -> PolyCurve:
    path = data_dir() / f"{name}.txt"
    if not path.exists():
        raise InputError(f"no bundled curve {name!r}; available: {', '.join(BUNDLED)}")
    return load_curve(path)


def make_curve(kind: str, **params):
    """Curve generators: ``planar_ngon``, ``torus_knot``, ``from_file`` and ``bundled``."""
    try:
        if kind == "planar_ngon":
            return planar_ngon(int(params["n"]), float(params.get("radius", 1.0)))
        if kind == "torus_knot":
            return torus_knot(int(params["p"]), int(params["q"]), int(params["n"]))
        if kind == "from_file":
            return load_curve(params["path"])
        if kind == "bundled":
            return bundled(params["name"])
    except KeyError as exc:
        raise InputError(f"{kind}: missing parameter {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"{kind}: bad parameters ({exc})") from None
    raise InputError(f"unknown curve kind {kind!r}")


def jittered(c: PolyCurve, amplitude: float, seed: int, label: str | None = None) -> PolyCurve:
    """Copy with every coordinate moved uniformly within ``amplitude`` (for genericity)."""
    rng = np.random.default_rng(_entropy(seed))
    v = c.vertices + rng.uniform(-amplitude, amplitude, size=c.vertices.shape)
    return PolyCurve(v, c.closed, c.label if label is None else label)
