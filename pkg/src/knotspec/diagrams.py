"""Combinatorial knotoid and knot diagrams on the 2-sphere.

A diagram is a signed Gauss code: the sequence of crossing events met
while walking the curve (leg to head for a knotoid, once around for a
closed diagram).  Each event is ``(cid, over, sign)``.  The over/under
flag and the crossing sign fix the cyclic order of the four half-edges at
every crossing, so the code alone determines the embedding in S^2.

Sign convention: a crossing is positive when the over-strand direction,
rotated +90 degrees, is the under-strand direction.

Canonical code grammar (used for hashing, dedup and JSON)::

    code   := kind ":" event*
    kind   := "o" (knotoid, leg to head) | "c" (closed diagram)
    event  := ("O" | "U") id ("+" | "-")
    id     := positive integer, numbered by first appearance

Closed codes are additionally rotated to the lexicographically smallest
form.  Virtual crossings are never written (virtual Gauss code).
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .errors import InputError, InvalidMove, StructuralError

Event = tuple  # (cid, over, sign)

LEG = -1
HEAD = -2

_EVENT_RE = re.compile(r"([OU])(\d+)([+-])")


def _relabel(events: Iterable[Event]) -> tuple[Event, ...]:
    mapping: dict[int, int] = {}
    out = []
    for cid, over, s in events:
        new = mapping.get(cid)
        if new is None:
            new = mapping[cid] = len(mapping) + 1
        out.append((new, over, s))
    return tuple(out)


def _events_str(events: Iterable[Event]) -> str:
    return "".join(f"{'O' if o else 'U'}{c}{'+' if s > 0 else '-'}" for c, o, s in events)


@dataclass(frozen=True)
class Faces:
    """Faces of the planar subdivision and its dual graph."""

    cycles: tuple[tuple[tuple[int, int], ...], ...]  # dart cycles, face on the left
    face_of: dict  # dart -> face id
    dual: tuple[tuple[int, int, int], ...]  # (arc, left face, right face)
    leg_face: int | None
    head_face: int | None
    n_vertices: int
    n_edges: int

    @property
    def count(self) -> int:
        return len(self.cycles)

    @property
    def euler(self) -> int:
        return self.n_vertices - self.n_edges + self.count

    def neighbors(self) -> dict[int, list[tuple[int, int]]]:
        nb: dict[int, list[tuple[int, int]]] = {f: [] for f in range(self.count)}
        for arc, left, right in self.dual:
            if left != right:
                nb[left].append((right, arc))
                nb[right].append((left, arc))
        for f in nb:
            nb[f].sort()
        return nb


@dataclass(frozen=True)
class KnotoidDiagram:
    """Immutable signed Gauss code; ``closed`` distinguishes knots from knotoids."""

    events: tuple[Event, ...]
    closed: bool = False
    label: str = field(default="", compare=False)

    def __post_init__(self):
        ev = tuple((int(c), bool(o), int(s)) for c, o, s in self.events)
        object.__setattr__(self, "events", ev)
        seen: dict[int, list] = {}
        for i, (c, o, s) in enumerate(ev):
            if s not in (1, -1):
                raise StructuralError(f"crossing {c}: sign must be +1 or -1")
            seen.setdefault(c, []).append((i, o, s))
        for c, occ in seen.items():
            if len(occ) != 2:
                raise StructuralError(f"crossing {c} appears {len(occ)} times, expected 2")
            (_, o1, s1), (_, o2, s2) = occ
            if o1 == o2:
                raise StructuralError(f"crossing {c} needs one over and one under event")
            if s1 != s2:
                raise StructuralError(f"crossing {c} has inconsistent signs")

    # ------------------------------------------------------------------ basics
    @classmethod
    def trivial(cls) -> "KnotoidDiagram":
        return cls(())

    @classmethod
    def from_code(cls, code: str) -> "KnotoidDiagram":
        kind, sep, body = code.strip().partition(":")
        if not sep or kind not in ("o", "c"):
            raise InputError(f"malformed diagram code {code!r}")
        events = []
        pos = 0
        for m in _EVENT_RE.finditer(body):
            if m.start() != pos:
                raise InputError(f"malformed diagram code {code!r}")
            pos = m.end()
            events.append((int(m.group(2)), m.group(1) == "O", 1 if m.group(3) == "+" else -1))
        if pos != len(body):
            raise InputError(f"malformed diagram code {code!r}")
        return cls(tuple(events), closed=(kind == "c"))

    @property
    def n_crossings(self) -> int:
        return len(self.events) // 2

    @cached_property
    def positions(self) -> dict[int, tuple[int, int]]:
        """cid -> (index of over event, index of under event)."""
        over: dict[int, int] = {}
        under: dict[int, int] = {}
        for i, (c, o, _) in enumerate(self.events):
            (over if o else under)[c] = i
        return {c: (over[c], under[c]) for c in over}

    @cached_property
    def signs(self) -> dict[int, int]:
        return {c: s for c, _, s in self.events}

    def writhe(self) -> int:
        return sum(self.signs.values())

    @cached_property
    def code(self) -> str:
        if not self.closed:
            return "o:" + _events_str(_relabel(self.events))
        m = len(self.events)
        if m == 0:
            return "c:"
        best = min(_events_str(_relabel(self.events[i:] + self.events[:i])) for i in range(m))
        return "c:" + best

    def canonical(self) -> "KnotoidDiagram":
        return KnotoidDiagram.from_code(self.code)

    def mirror(self) -> "KnotoidDiagram":
        return KnotoidDiagram(tuple((c, not o, -s) for c, o, s in self.events), self.closed)

    def relabel(self, mapping: dict[int, int]) -> "KnotoidDiagram":
        return KnotoidDiagram(tuple((mapping[c], o, s) for c, o, s in self.events), self.closed)

    def is_knot_type(self) -> bool:
        return not self.closed and diagrammatic_height(self) == 0

    def __str__(self):
        return self.code

    # ------------------------------------------------------------ arc helpers
    @property
    def n_arcs(self) -> int:
        m = len(self.events)
        if self.closed:
            return max(m, 1)
        return m + 1

    def arc_tail(self, k: int):
        """Vertex at the start of arc ``k`` (crossing id, LEG)."""
        m = len(self.events)
        if not self.closed and k == 0:
            return LEG
        return self.events[(k - 1) % m][0]

    def arc_head(self, k: int):
        m = len(self.events)
        if not self.closed and k == m:
            return HEAD
        return self.events[k % m][0]

    def arc_events(self, k: int) -> tuple[int | None, int | None]:
        """Event indices at the two ends of arc ``k`` (None at an endpoint)."""
        m = len(self.events)
        if self.closed:
            return (k - 1) % m, k % m
        return (k - 1 if k > 0 else None), (k if k < m else None)

    # ------------------------------------------------------------ embedding
    @cached_property
    def _rotation(self) -> dict:
        """vertex -> ccw list of half-edges (darts leaving the vertex)."""
        m = len(self.events)
        rot: dict = {}
        if not self.closed:
            rot[LEG] = [(0, 1)]
            rot[HEAD] = [(m, -1)]
        for c, (io, iu) in self.positions.items():
            if self.closed:
                o_in, o_out = (io, -1), ((io + 1) % m, 1)
                u_in, u_out = (iu, -1), ((iu + 1) % m, 1)
            else:
                o_in, o_out = (io, -1), (io + 1, 1)
                u_in, u_out = (iu, -1), (iu + 1, 1)
            if self.signs[c] > 0:
                rot[c] = [o_out, u_out, o_in, u_in]
            else:
                rot[c] = [o_out, u_in, o_in, u_out]
        return rot


def faces(d: KnotoidDiagram) -> Faces:
    """Faces of the diagram's planar subdivision plus the dual graph.

    Raises StructuralError when the code is not realizable on the sphere
    (Euler characteristic differs from 2).
    """
    return _faces(d)


def _faces(d: KnotoidDiagram, check: bool = True) -> Faces:
    cached = d.__dict__.get("_faces_cache")
    if cached is not None and (cached[1] or not check):
        return cached[0]
    m = len(d.events)
    if d.closed and m == 0:
        # a plain circle: one loop splits the sphere in two
        f = Faces(((( 0, 1),), ((0, -1),)), {(0, 1): 0, (0, -1): 1}, ((0, 0, 1),), None, None, 1, 1)
        d.__dict__["_faces_cache"] = (f, True)
        return f
    rot = d._rotation
    where: dict = {}
    for v, lst in rot.items():
        for i, h in enumerate(lst):
            where[h] = (v, i)
    n_arcs = d.n_arcs
    darts = [(k, s) for k in range(n_arcs) for s in (1, -1)]
    face_of: dict = {}
    cycles = []
    for start in darts:
        if start in face_of:
            continue
        fid = len(cycles)
        cyc = []
        cur = start
        while cur not in face_of:
            face_of[cur] = fid
            cyc.append(cur)
            rev = (cur[0], -cur[1])
            v, i = where[rev]
            lst = rot[v]
            cur = lst[(i - 1) % len(lst)]
        if cur != start:
            raise StructuralError("face tracing did not close up; code is inconsistent")
        cycles.append(tuple(cyc))
    dual = tuple((k, face_of[(k, 1)], face_of[(k, -1)]) for k in range(n_arcs))
    n_vertices = len(rot)
    f = Faces(
        tuple(cycles),
        face_of,
        dual,
        None if d.closed else face_of[(0, 1)],
        None if d.closed else face_of[(m, -1)],
        n_vertices,
        n_arcs,
    )
    ok = f.euler == 2
    d.__dict__["_faces_cache"] = (f, ok)
    if check and not ok:
        raise StructuralError(
            f"code {d.code} is not planar: V-E+F = {f.euler} (expected 2)"
        )
    return f


def is_realizable(d: KnotoidDiagram) -> bool:
    try:
        _faces(d)
    except StructuralError:
        return False
    return True


def _bfs_dist(f: Faces, source: int) -> dict[int, int]:
    nb = f.neighbors()
    dist = {source: 0}
    q = deque([source])
    while q:
        u = q.popleft()
        for v, _ in nb[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                q.append(v)
    return dist


def diagrammatic_height(d: KnotoidDiagram) -> int:
    """Fewest diagram arcs an end-to-end closure arc must cross."""
    if d.closed:
        raise InputError("height is defined for knotoid (open) diagrams")
    if not d.events:
        return 0
    f = _faces(d)
    return _bfs_dist(f, f.leg_face)[f.head_face]


def closure_path(d: KnotoidDiagram) -> list[tuple[int, int, int]]:
    """Shortest dual path head face -> leg face as (arc, from face, to face).

    Ties go to the lexicographically smallest face sequence.
    """
    if not d.events:
        return []
    f = _faces(d)
    dist = _bfs_dist(f, f.leg_face)
    nb = f.neighbors()
    path = []
    cur = f.head_face
    while dist[cur] > 0:
        nxt, arc = min((v, a) for v, a in nb[cur] if dist.get(v, -1) == dist[cur] - 1)
        path.append((arc, cur, nxt))
        cur = nxt
    return path


@dataclass(frozen=True)
class ClosureResult:
    diagram: KnotoidDiagram  # closed diagram; virtual crossings omitted
    kind: str
    arc_crossings: int

    @property
    def code(self) -> str:
        return self.diagram.code


def _crossing_sign(over_dir: tuple[int, int], under_dir: tuple[int, int]) -> int:
    cross = over_dir[0] * under_dir[1] - over_dir[1] * under_dir[0]
    return 1 if cross > 0 else -1


def closure(d: KnotoidDiagram, kind: str = "under") -> ClosureResult:
    """Close the knotoid with an arc routed along a shortest dual path.

    ``over``/``under``: the arc passes over/under every strand it meets.
    ``virtual``: the met strands become virtual crossings.
    """
    if d.closed:
        raise InputError("closure applies to knotoid (open) diagrams")
    if kind not in ("over", "under", "virtual"):
        raise InputError(f"unknown closure kind {kind!r}")
    path = closure_path(d)
    if kind == "virtual":
        return ClosureResult(KnotoidDiagram(d.events, closed=True), kind, len(path))
    f = _faces(d)
    next_id = max((c for c, _, _ in d.events), default=0) + 1
    inserts: dict[int, Event] = {}
    tail = []
    closure_over = kind == "over"
    for arc, src, _ in path:
        # arc runs along +x; its left face is on +y
        left = f.face_of[(arc, 1)]
        closure_dir = (0, -1) if src == left else (0, 1)
        arc_dir = (1, 0)
        if closure_over:
            s = _crossing_sign(closure_dir, arc_dir)
        else:
            s = _crossing_sign(arc_dir, closure_dir)
        inserts[arc] = (next_id, not closure_over, s)
        tail.append((next_id, closure_over, s))
        next_id += 1
    events = list(d.events)
    for arc in sorted(inserts, reverse=True):
        events.insert(arc, inserts[arc])
    out = KnotoidDiagram(tuple(events) + tuple(tail), closed=True)
    return ClosureResult(out, kind, len(path))


# ---------------------------------------------------------------- moves


@dataclass(frozen=True)
class Move:
    """A Reidemeister move site.

    kind ``R1-``: ``args=(cid,)``; ``R1+``: ``(arc, first_over, sign)``;
    ``R2-``: ``(cid_a, cid_b)``; ``R2+``: ``(face, dart_1, dart_2, finger_over)``;
    ``R3``: ``(face,)`` naming a triangular face.
    """

    kind: str
    args: tuple


def _consecutive(d: KnotoidDiagram, i: int, j: int) -> bool:
    m = len(d.events)
    if d.closed:
        return (i + 1) % m == j
    return i + 1 == j


def r1_removals(d: KnotoidDiagram) -> list[Move]:
    out = []
    for c, (io, iu) in sorted(d.positions.items()):
        a, b = min(io, iu), max(io, iu)
        if _consecutive(d, a, b) or (d.closed and _consecutive(d, b, a)):
            out.append(Move("R1-", (c,)))
    return out


def _interior_arc(d: KnotoidDiagram, k: int) -> tuple[int, int] | None:
    a, b = d.arc_events(k)
    if a is None or b is None:
        return None
    return a, b


def r2_removals(d: KnotoidDiagram) -> list[Move]:
    if len(d.events) < 4:
        return []
    f = _faces(d)
    out = set()
    for cyc in f.cycles:
        if len(cyc) != 2:
            continue
        (k1, _), (k2, _) = cyc
        if k1 == k2:
            continue
        e1, e2 = _interior_arc(d, k1), _interior_arc(d, k2)
        if e1 is None or e2 is None:
            continue
        ev = d.events
        c1 = {ev[e1[0]][0], ev[e1[1]][0]}
        c2 = {ev[e2[0]][0], ev[e2[1]][0]}
        if len(c1) != 2 or c1 != c2:
            continue
        if ev[e1[0]][1] != ev[e1[1]][1]:
            continue  # strand is over at one crossing and under at the other
        a, b = sorted(c1)
        out.add(Move("R2-", (a, b)))
    return sorted(out, key=lambda mv: mv.args)


def r3_sites(d: KnotoidDiagram) -> list[Move]:
    if len(d.events) < 6:
        return []
    f = _faces(d)
    out = []
    ev = d.events
    for fid, cyc in enumerate(f.cycles):
        if len(cyc) != 3:
            continue
        arcs = [k for k, _ in cyc]
        if len(set(arcs)) != 3:
            continue
        ends = [_interior_arc(d, k) for k in arcs]
        if any(e is None for e in ends):
            continue
        cids = [frozenset((ev[a][0], ev[b][0])) for a, b in ends]
        if any(len(c) != 2 for c in cids) or len(frozenset().union(*cids)) != 3:
            continue
        pattern = sorted(ev[a][1] + ev[b][1] for a, b in ends)
        if pattern != [0, 1, 2]:
            continue  # needs a top, a middle and a bottom strand
        out.append(Move("R3", (fid,)))
    return out


def r1_insertions(d: KnotoidDiagram) -> list[Move]:
    return [Move("R1+", (k, fo, s)) for k in range(d.n_arcs) for fo in (True, False) for s in (1, -1)]


def r2_insertions(d: KnotoidDiagram) -> list[Move]:
    f = _faces(d)
    out = []
    for fid, cyc in enumerate(f.cycles):
        for i, d1 in enumerate(cyc):
            for d2 in cyc[i + 1:]:
                if d1[0] == d2[0]:
                    continue
                for over in (True, False):
                    out.append(Move("R2+", (fid, d1, d2, over)))
    return out


def available_moves(d: KnotoidDiagram, increasing: bool = True) -> list[Move]:
    moves = r1_removals(d) + r2_removals(d) + r3_sites(d)
    if increasing:
        moves += r1_insertions(d) + r2_insertions(d)
    return moves


def _new_id(d: KnotoidDiagram) -> int:
    return max((c for c, _, _ in d.events), default=0) + 1


def apply_move(d: KnotoidDiagram, move: Move) -> KnotoidDiagram:
    """Rewrite ``d`` by one Reidemeister move; InvalidMove if the site is bad."""
    kind, args = move.kind, move.args
    if d.closed and len(d.events) == 0 and kind in ("R1+", "R2+"):
        raise InvalidMove("moves on a crossingless circle are not supported")
    if kind == "R1-":
        if move not in r1_removals(d):
            raise InvalidMove(f"crossing {args[0]} is not a removable kink")
        (c,) = args
        return KnotoidDiagram(tuple(e for e in d.events if e[0] != c), d.closed)
    if kind == "R2-":
        if Move("R2-", tuple(sorted(args))) not in r2_removals(d):
            raise InvalidMove(f"crossings {args} do not bound an empty bigon with one strand over")
        drop = set(args)
        return KnotoidDiagram(tuple(e for e in d.events if e[0] not in drop), d.closed)
    if kind == "R3":
        if move not in r3_sites(d):
            raise InvalidMove(f"face {args[0]} is not a valid R3 triangle")
        f = _faces(d)
        events = list(d.events)
        for k, _ in f.cycles[args[0]]:
            a, b = d.arc_events(k)
            events[a], events[b] = events[b], events[a]
        return KnotoidDiagram(tuple(events), d.closed)
    if kind == "R1+":
        k, first_over, s = args
        if not 0 <= k < d.n_arcs or s not in (1, -1):
            raise InvalidMove(f"bad R1 insertion site {args}")
        c = _new_id(d)
        events = list(d.events)
        events[k:k] = [(c, bool(first_over), s), (c, not first_over, s)]
        return KnotoidDiagram(tuple(events), d.closed)
    if kind == "R2+":
        return _r2_insert(d, *args)
    raise InvalidMove(f"unknown move kind {kind!r}")


def _r2_insert(d: KnotoidDiagram, fid: int, d1, d2, finger_over: bool) -> KnotoidDiagram:
    f = _faces(d)
    if not 0 <= fid < f.count or d1 not in f.cycles[fid] or d2 not in f.cycles[fid]:
        raise InvalidMove("R2 insertion darts must lie on the named face")
    (k1, s1), (k2, s2) = d1, d2
    if k1 == k2:
        raise InvalidMove("R2 insertion between two sides of one arc is not supported")
    # frame: arc k2 on the x axis with the face to the north; arc k1 above it
    sigma2 = s2
    sigma1 = -s1
    x_first, y_second = (0, 1) if sigma1 > 0 else (1, 0)
    a = _new_id(d)
    b = a + 1
    dir_a = (0, -1)  # finger going south at its first crossing
    dir_b = (0, 1)
    dir2 = (sigma2, 0)
    if finger_over:
        sa, sb = _crossing_sign(dir_a, dir2), _crossing_sign(dir_b, dir2)
    else:
        sa, sb = _crossing_sign(dir2, dir_a), _crossing_sign(dir2, dir_b)
    on_k1 = [(a, finger_over, sa), (b, finger_over, sb)]
    xs = {a: x_first, b: y_second}
    order2 = sorted((a, b), key=lambda c: xs[c] * sigma2)
    sg = {a: sa, b: sb}
    on_k2 = [(c, not finger_over, sg[c]) for c in order2]
    events = list(d.events)
    for k, new in sorted(((k1, on_k1), (k2, on_k2)), key=lambda t: -t[0]):
        events[k:k] = new
    return KnotoidDiagram(tuple(events), d.closed)


# ------------------------------------------------------------- simplify


@dataclass(frozen=True)
class SimplifyResult:
    diagram: KnotoidDiagram
    moves: int
    exhausted: bool
    height_bound: int | None  # min diagrammatic height over every diagram visited
    height_increases: int = 0  # crossing-reducing steps that raised the height


def _first_reduction(d: KnotoidDiagram) -> Move | None:
    r1 = r1_removals(d)
    if r1:
        return r1[0]
    r2 = r2_removals(d)
    if r2:
        return r2[0]
    return None


def simplify(d: KnotoidDiagram, budget: int = 500, r3_depth: int = 3) -> SimplifyResult:
    """Greedy crossing reduction with bounded R3 exploration.

    R1/R2 deletions are applied whenever available; otherwise a
    breadth-first search over R3 moves (depth ``r3_depth``, memoized by
    canonical code, ties to the smallest code) looks for a diagram that
    admits a deletion.  Every move counts against ``budget``.
    """
    is_open = not d.closed
    height = (lambda x: diagrammatic_height(x)) if is_open else (lambda x: None)
    cur = d
    best_h = height(cur)
    moves = 0
    increases = 0
    exhausted = False
    while True:
        mv = _first_reduction(cur)
        if mv is not None:
            if moves >= budget:
                exhausted = True
                break
            nxt = apply_move(cur, mv)
            moves += 1
            if is_open:
                h_old, h_new = height(cur), height(nxt)
                if h_new > h_old:
                    increases += 1
                best_h = min(best_h, h_new)
            cur = nxt
            continue
        found = _r3_search(cur, r3_depth, budget - moves)
        if found is None:
            break
        path, visited = found
        if is_open:
            for x in visited:
                best_h = min(best_h, height(x))
        if moves + len(path) > budget:
            exhausted = True
            break
        moves += len(path)
        cur = path[-1]
    return SimplifyResult(cur, moves, exhausted, best_h, increases)


def _r3_search(d: KnotoidDiagram, depth: int, budget: int):
    if depth <= 0 or budget <= 0:
        return None
    seen = {d.code}
    frontier = [(d, [])]
    visited = []
    for _ in range(min(depth, budget)):
        nxt_frontier = []
        hits = []
        for x, path in frontier:
            for mv in r3_sites(x):
                y = apply_move(x, mv)
                if y.code in seen:
                    continue
                seen.add(y.code)
                visited.append(y)
                p = path + [y]
                if _first_reduction(y) is not None:
                    hits.append((y.code, p))
                nxt_frontier.append((y, p))
        if hits:
            hits.sort(key=lambda t: t[0])
            return hits[0][1], visited
        frontier = sorted(nxt_frontier, key=lambda t: t[0].code)
        if not frontier:
            break
    return None
