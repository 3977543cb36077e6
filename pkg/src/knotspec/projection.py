"""Projecting polygonal curves along directions on S^2 into diagrams.

The hot path is :func:`project_keys`, which handles a whole batch of
directions with array arithmetic and returns one canonical diagram code
per direction (``None`` for degenerate directions).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .diagrams import KnotoidDiagram, _events_str
from .errors import DegenerateProjection, InputError

DEGENERACY_TOL = 1e-9  # relative to curve diameter
BATCH = 512


@dataclass(frozen=True)
class Direction:
    vector: tuple[float, float, float]
    index: int = 0
    seed: int | None = None
    attempt: int = 0

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=float)
        n = np.linalg.norm(v)
        if not np.isfinite(n) or n == 0:
            raise InputError("direction must be a nonzero finite vector")
        if abs(n - 1.0) > 1e-12:
            v = v / n
        object.__setattr__(self, "vector", tuple(float(x) for x in v))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.vector)


def uniform_directions(n: int, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def fibonacci_directions(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = np.pi * (3.0 - np.sqrt(5.0)) * np.arange(n)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def direction_array(n: int, seed: int = 0, scheme: str = "uniform") -> np.ndarray:
    if n < 1:
        raise InputError("need at least one direction")
    if scheme in ("uniform", "uniform-random"):
        return uniform_directions(n, seed)
    if scheme == "fibonacci":
        return fibonacci_directions(n)
    raise InputError(f"unknown direction scheme {scheme!r}")


def sample_directions(n: int, seed: int = 0, scheme: str = "uniform") -> list[Direction]:
    arr = direction_array(n, seed, scheme)
    return [Direction(tuple(v), i, seed) for i, v in enumerate(arr)]


def resample_direction(seed: int, index: int, attempt: int) -> np.ndarray:
    """Replacement for a degenerate direction; a pure function of its lineage."""
    rng = np.random.default_rng([int(seed) & 0xFFFFFFFF, index, attempt, 0x5EED])
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def frames(dirs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Right-handed in-plane bases ``(u, w)`` with ``u x w = xi``."""
    dirs = np.atleast_2d(dirs)
    axis = np.zeros_like(dirs)
    axis[np.arange(len(dirs)), np.argmin(np.abs(dirs), axis=1)] = 1.0
    u = np.cross(dirs, axis)
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    w = np.cross(dirs, u)
    return u, w


def _cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


class _Geometry:
    """Edge bookkeeping shared by all directions for one curve."""

    def __init__(self, vertices: np.ndarray, closed: bool):
        v = np.asarray(vertices, dtype=float)
        self.v = v
        self.closed = closed
        n = len(v)
        if closed:
            self.e0 = np.arange(n)
            self.e1 = (np.arange(n) + 1) % n
        else:
            self.e0 = np.arange(n - 1)
            self.e1 = np.arange(1, n)
        ne = len(self.e0)
        self.n_edges = ne
        ia, ib = np.triu_indices(ne, k=2)
        if closed and ne > 2:
            keep = ~((ia == 0) & (ib == ne - 1))
            ia, ib = ia[keep], ib[keep]
        self.pa, self.pb = ia, ib
        # consecutive edge pairs (for the fold check)
        if closed:
            self.adj0 = np.arange(ne)
            self.adj1 = (np.arange(ne) + 1) % ne
        else:
            self.adj0 = np.arange(ne - 1)
            self.adj1 = np.arange(1, ne)
        span = v.max(axis=0) - v.min(axis=0)
        self.diameter = float(np.linalg.norm(span)) or 1.0


def _project_core(geo: _Geometry, dirs: np.ndarray, tol_rel: float):
    """Crossing records for a batch of directions.

    Returns (degenerate mask, dict of per-crossing arrays, projected vertices).
    Endpoint-on-strand and vertex-on-strand cases show up as edge pairs whose
    intersection parameters sit within the guard band of 0 or 1, so they are
    detected from the same pairwise arrays as the crossings themselves.
    """
    tol = tol_rel * geo.diameter
    u, w = frames(dirs)
    v = geo.v
    P = np.stack([u @ v.T, w @ v.T], axis=-1)  # (D, n, 2)
    H = dirs @ v.T  # (D, n)
    A0 = P[:, geo.e0]
    evec = P[:, geo.e1] - A0  # (D, E, 2)
    elen = np.sqrt((evec * evec).sum(-1))
    degenerate = (elen < tol).any(axis=1)
    # consecutive edges folded onto each other in the projection
    if geo.n_edges > 1:
        r0, r1 = evec[:, geo.adj0], evec[:, geo.adj1]
        folded = (np.abs(_cross2(r0, r1)) <= tol * (elen[:, geo.adj0] + elen[:, geo.adj1])) & (
            (r0 * r1).sum(-1) < 0
        )
        degenerate |= folded.any(axis=1)

    pa, pb = geo.pa, geo.pb
    p, r = A0[:, pa], evec[:, pa]
    q, s = A0[:, pb], evec[:, pb]
    la, lb = elen[:, pa], elen[:, pb]
    den = _cross2(r, s)
    qp = q - p
    with np.errstate(divide="ignore", invalid="ignore"):
        ta = _cross2(qp, s) / den
        tb = _cross2(qp, r) / den
        ga = tol / la  # guard band in parameter units
        gb = tol / lb
    par = np.abs(den) <= 1e-12 * la * lb
    inside_a = (ta > -ga) & (ta < 1 + ga)
    inside_b = (tb > -gb) & (tb < 1 + gb)
    near = ~par & inside_a & inside_b
    clean = (ta > ga) & (ta < 1 - ga) & (tb > gb) & (tb < 1 - gb)
    degenerate |= (near & ~clean).any(axis=1)
    if par.any():
        # parallel projected edges: degenerate when they overlap on a common line
        with np.errstate(divide="ignore", invalid="ignore"):
            off = np.abs(_cross2(qp, r)) / la
            rr = np.maximum(la * la, 1e-300)
            s0 = (qp * r).sum(-1) / rr
            s1 = s0 + (s * r).sum(-1) / rr
        overlap = (np.maximum(s0, s1) > -ga) & (np.minimum(s0, s1) < 1 + ga)
        degenerate |= (par & (off < tol) & overlap).any(axis=1)
    hit = near & clean

    di, pi = np.nonzero(hit)
    ea, eb = pa[pi], pb[pi]
    tA, tB = ta[di, pi], tb[di, pi]
    ha = H[di, geo.e0[ea]] * (1 - tA) + H[di, geo.e1[ea]] * tA
    hb = H[di, geo.e0[eb]] * (1 - tB) + H[di, geo.e1[eb]] * tB
    a_over = ha > hb
    degenerate[di[np.abs(ha - hb) < tol]] = True
    ra, rb = r[di, pi], s[di, pi]
    cr = _cross2(ra, rb)
    sign = np.where((cr > 0) == a_over, 1, -1)
    points = p[di, pi] + tA[:, None] * ra

    # coincident crossings (triple points): a crossing point close to a third edge
    if len(di):
        d2 = points[:, None, :] - A0[di]  # (K, E, 2)
        ev_k = evec[di]
        den2 = np.maximum((ev_k * ev_k).sum(-1), 1e-300)
        t2 = np.clip((d2 * ev_k).sum(-1) / den2, 0.0, 1.0)
        off2 = d2 - t2[..., None] * ev_k
        dd = (off2 * off2).sum(-1)
        K = len(di)
        dd[np.arange(K), ea] = np.inf
        dd[np.arange(K), eb] = np.inf
        degenerate[di[(dd < tol * tol).any(axis=1)]] = True

    rec = dict(dir=di, ea=ea, eb=eb, ta=tA, tb=tB, a_over=a_over, sign=sign, points=points)
    return degenerate, rec, P


def _events_by_direction(rec: dict, D: int) -> list[list[tuple]]:
    """Per direction: events (crossing index, over, sign) in curve order."""
    K = len(rec["dir"])
    out: list[list[tuple]] = [[] for _ in range(D)]
    if K == 0:
        return out
    dirs = np.concatenate([rec["dir"], rec["dir"]])
    pos = np.concatenate([rec["ea"] + rec["ta"], rec["eb"] + rec["tb"]])
    cid = np.concatenate([np.arange(K), np.arange(K)])
    over = np.concatenate([rec["a_over"], ~rec["a_over"]])
    sign = np.concatenate([rec["sign"], rec["sign"]])
    order = np.lexsort((pos, dirs))
    for d, c, o, s in zip(dirs[order].tolist(), cid[order].tolist(), over[order].tolist(), sign[order].tolist()):
        out[d].append((c, o, s))
    return out


def _keys(rec: dict, D: int) -> list[bytes]:
    """Per direction: the relabeled event sequence packed as uint16 bytes.

    Each event is ``id * 4 + over * 2 + (sign > 0)``.  Strand ``a`` of every
    crossing lies on the lower-indexed edge, so it is always the first
    appearance and ids follow the order of those positions.
    """
    K = len(rec["dir"])
    if K == 0:
        return [b""] * D
    di = rec["dir"]
    pos_a = rec["ea"] + rec["ta"]
    first = np.lexsort((pos_a, di))
    counts = np.bincount(di, minlength=D)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    new_id = np.empty(K, dtype=np.int64)
    new_id[first] = np.arange(K) - starts[di[first]] + 1
    if new_id.max() >= 1 << 14:
        raise InputError("too many crossings in one projection")
    sgn = (rec["sign"] > 0).astype(np.int64)
    val_a = new_id * 4 + rec["a_over"] * 2 + sgn
    val_b = new_id * 4 + (~rec["a_over"]) * 2 + sgn
    dirs = np.concatenate([di, di])
    pos = np.concatenate([pos_a, rec["eb"] + rec["tb"]])
    vals = np.concatenate([val_a, val_b]).astype(np.uint16)
    order = np.lexsort((pos, dirs))
    vals = vals[order]
    ends = np.cumsum(2 * counts)
    buf = vals.tobytes()
    out = []
    prev = 0
    for e in ends.tolist():
        out.append(buf[2 * prev:2 * e])
        prev = e
    return out


def decode_key(key: bytes, closed: bool = False) -> str:
    """Canonical code for a packed event sequence from :func:`project_keys`."""
    if not key:
        return "c:" if closed else "o:"
    vals = np.frombuffer(key, dtype=np.uint16).tolist()
    events = [(v >> 2, bool(v & 2), 1 if v & 1 else -1) for v in vals]
    if closed:
        return KnotoidDiagram(tuple(events), closed=True).code
    return "o:" + _events_str(events)


def project_keys(geo: "_Geometry", dirs: np.ndarray, tol_rel: float = DEGENERACY_TOL) -> list[bytes | None]:
    """Packed diagram keys per direction (``None`` when degenerate)."""
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    out: list[bytes | None] = []
    for start in range(0, len(dirs), BATCH):
        chunk = dirs[start:start + BATCH]
        degenerate, rec, _ = _project_core(geo, chunk, tol_rel)
        keys = _keys(rec, len(chunk))
        for d in np.nonzero(degenerate)[0].tolist():
            keys[d] = None
        out.extend(keys)
    return out


def project_codes(vertices, closed: bool, dirs: np.ndarray, tol_rel: float = DEGENERACY_TOL) -> list[str | None]:
    """Canonical diagram code for each direction; ``None`` marks degeneracy."""
    geo = vertices if isinstance(vertices, _Geometry) else _Geometry(vertices, closed)
    cache: dict[bytes, str] = {}
    out: list[str | None] = []
    for k in project_keys(geo, dirs, tol_rel):
        if k is None:
            out.append(None)
            continue
        c = cache.get(k)
        if c is None:
            c = cache[k] = decode_key(k, geo.closed)
        out.append(c)
    return out


@dataclass(frozen=True)
class RawDiagram:
    """One projection: events from leg to head plus the planar geometry."""

    events: tuple  # (cid, over, sign), cids numbered by first appearance
    crossing_points: tuple  # (x, y) per cid, index cid - 1
    endpoints: tuple | None  # ((x, y) leg, (x, y) head); None when closed
    closed: bool
    direction: tuple
    label: str = ""
    edges: tuple = field(default=(), compare=False)  # (edge of first pass, edge of second pass) per cid

    def to_diagram(self) -> KnotoidDiagram:
        return KnotoidDiagram(self.events, closed=self.closed, label=self.label)

    @property
    def code(self) -> str:
        return self.to_diagram().code

    def to_json(self) -> dict:
        return {
            "events": [[c, "O" if o else "U", s] for c, o, s in self.events],
            "crossing_points": [list(p) for p in self.crossing_points],
            "endpoints": None if self.endpoints is None else [list(p) for p in self.endpoints],
            "closed": self.closed,
            "provenance": {"label": self.label, "direction": list(self.direction)},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj: dict) -> "RawDiagram":
        return cls(
            tuple((int(c), o == "O", int(s)) for c, o, s in obj["events"]),
            tuple(tuple(p) for p in obj["crossing_points"]),
            None if obj["endpoints"] is None else tuple(tuple(p) for p in obj["endpoints"]),
            bool(obj["closed"]),
            tuple(obj["provenance"]["direction"]),
            obj["provenance"].get("label", ""),
        )


def project(curve, xi, tol_rel: float = DEGENERACY_TOL) -> RawDiagram:
    """Orthogonal projection of ``curve`` along ``xi``.

    ``curve`` is a PolyCurve/OpenCurve (anything with ``vertices`` and
    ``closed``).  Over/under is decided by height along ``xi`` (larger is
    closer to the viewer).  Raises DegenerateProjection on non-generic
    directions.
    """
    base = getattr(curve, "base", curve)
    vec = xi.array if isinstance(xi, Direction) else np.asarray(xi, dtype=float)
    vec = vec / np.linalg.norm(vec)
    geo = _Geometry(base.vertices, base.closed)
    degenerate, rec, P = _project_core(geo, vec[None, :], tol_rel)
    if degenerate[0]:
        raise DegenerateProjection(f"direction {tuple(vec)} is not generic for {base.label or 'curve'}")
    events_raw = _events_by_direction(rec, 1)[0]
    mapping: dict[int, int] = {}
    events = []
    for c, o, s in events_raw:
        if c not in mapping:
            mapping[c] = len(mapping) + 1
        events.append((mapping[c], o, s))
    pts = [None] * len(mapping)
    edges = [None] * len(mapping)
    for k, new in mapping.items():
        pts[new - 1] = tuple(float(x) for x in rec["points"][k])
        edges[new - 1] = (int(rec["ea"][k]), int(rec["eb"][k]))
    ends = None
    if not base.closed:
        ends = (tuple(float(x) for x in P[0, 0]), tuple(float(x) for x in P[0, -1]))
    return RawDiagram(tuple(events), tuple(pts), ends, base.closed, tuple(float(x) for x in vec), base.label, tuple(edges))


def straight_closure_crossings(vertices, dirs: np.ndarray) -> np.ndarray:
    """Crossings of the projected head-to-leg segment with the projected open curve."""
    v = np.asarray(vertices, dtype=float)
    dirs = np.atleast_2d(dirs)
    u, w = frames(dirs)
    P = np.stack([u @ v.T, w @ v.T], axis=-1)
    a = P[:, -1]
    r = P[:, 0] - a
    # skip the first and last edge, which share an endpoint with the segment
    q = P[:, 1:-2]
    s = P[:, 2:-1] - q
    qp = q - a[:, None, :]
    den = _cross2(r[:, None, :], s)
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = _cross2(qp, s) / den
        t2 = _cross2(qp, r[:, None, :]) / den
    hit = (t1 > 0) & (t1 < 1) & (t2 > 0) & (t2 < 1)
    return hit.sum(axis=1)
