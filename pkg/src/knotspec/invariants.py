"""Kauffman bracket, normalized Jones polynomial and spectrum fingerprints.

The bracket of a knotoid diagram is the usual state sum in which every
closed loop contributes ``-A^2 - A^-2`` and the single open arc
contributes 1.  A closed diagram is evaluated with the standard
normalization (one loop is free), which agrees with cutting it open
anywhere; so both cases share one routine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .diagrams import KnotoidDiagram, closure, simplify
from .errors import CapExceeded
from .polynomial import LaurentPolynomial

DEFAULT_CAP = 24
DEFAULT_BUDGET = 500


def writhe(d: KnotoidDiagram) -> int:
    return d.writhe()


def _ports(d: KnotoidDiagram):
    """Per crossing: (o_in, o_out, u_in, u_out) as arc-end ids.

    Arc ``k`` has tail end ``2k`` and head end ``2k+1``.
    """
    m = len(d.events)
    n_arcs = m + 1  # closed codes are evaluated cut open at arc 0
    out = {}
    for c, (io, iu) in d.positions.items():
        out[c] = (2 * io + 1, 2 * (io + 1), 2 * iu + 1, 2 * (iu + 1))
    return out, n_arcs


def _smoothings(sign: int, o_in: int, o_out: int, u_in: int, u_out: int):
    """(A pairs, B pairs) for one crossing."""
    if sign > 0:
        return ((u_out, o_in), (u_in, o_out)), ((o_out, u_out), (o_in, u_in))
    return ((u_in, o_in), (u_out, o_out)), ((o_out, u_in), (o_in, u_out))


def _poly_add(acc: dict, poly: dict, shift: int, loops: int) -> None:
    # multiply by A^shift * (-A^2 - A^-2)^loops, then add into acc
    cur = poly
    for _ in range(loops):
        nxt: dict = {}
        for e, c in cur.items():
            nxt[e + 2] = nxt.get(e + 2, 0) - c
            nxt[e - 2] = nxt.get(e - 2, 0) - c
        cur = nxt
    for e, c in cur.items():
        k = e + shift
        acc[k] = acc.get(k, 0) + c


def bracket(d: KnotoidDiagram, cap: int = DEFAULT_CAP) -> LaurentPolynomial:
    """Kauffman bracket by contracting crossings one at a time.

    Partial states are keyed by how the remaining arc ends are joined, so
    states that agree on the frontier are merged before branching again.
    """
    if d.n_crossings > cap:
        raise CapExceeded(f"{d.n_crossings} crossings exceeds bracket cap {cap}; simplify first")
    if not d.events:
        return LaurentPolynomial.one()
    ports, n_arcs = _ports(d)
    init = []
    for k in range(n_arcs):
        init.extend((2 * k + 1, 2 * k))
    states: dict[tuple, dict] = {tuple(init): {0: 1}}
    order = []
    for c, _, _ in d.events:
        if c not in order:
            order.append(c)
    signs = d.signs
    for c in order:
        a_pairs, b_pairs = _smoothings(signs[c], *ports[c])
        new_states: dict[tuple, dict] = {}
        for key, poly in states.items():
            for pairs, shift in ((a_pairs, 1), (b_pairs, -1)):
                p = list(key)
                loops = 0
                for u, v in pairs:
                    if p[u] == v:
                        loops += 1
                    else:
                        pu, pv = p[u], p[v]
                        p[pu] = pv
                        p[pv] = pu
                    p[u] = p[v] = -1
                t = tuple(p)
                acc = new_states.get(t)
                if acc is None:
                    acc = new_states[t] = {}
                _poly_add(acc, poly, shift, loops)
        states = new_states
    total: dict = {}
    for poly in states.values():
        for e, c in poly.items():
            total[e] = total.get(e, 0) + c
    return LaurentPolynomial(total)


def jones_normalized(d: KnotoidDiagram, cap: int = DEFAULT_CAP) -> LaurentPolynomial:
    """``(-A^3)^(-writhe) * <d>``; invariant under all three moves."""
    w = d.writhe()
    factor = LaurentPolynomial({-3 * w: -1 if w % 2 else 1})
    return factor * bracket(d, cap)


def jones_t(d: KnotoidDiagram, cap: int = DEFAULT_CAP) -> dict:
    """Normalized Jones with ``t = A^-4`` (classical knots give integer exponents)."""
    return jones_normalized(d, cap).to_t()


@dataclass(frozen=True)
class Fingerprint:
    """Bucketing key for spectrum classes.

    Equality compares the three polynomials only.  ``height`` is an upper
    bound on the knotoid height from the diagrams this fingerprint was
    computed from, and ``knot_type`` is ``height == 0``; both are class
    attributes refined by taking minima, not part of the identity.
    """

    jones: LaurentPolynomial
    under: LaurentPolynomial
    over: LaurentPolynomial
    height: int = field(compare=False)
    knot_type: bool = field(compare=False)

    @property
    def key(self) -> str:
        return f"J[{self.jones}];U[{self.under}];O[{self.over}]"

    def is_trivial(self) -> bool:
        one = LaurentPolynomial.one()
        return self.jones == one and self.under == one and self.over == one

    def to_json(self) -> dict:
        return {
            "jones": str(self.jones),
            "under_closure_jones": str(self.under),
            "over_closure_jones": str(self.over),
            "height_bound": self.height,
            "knot_type": self.knot_type,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Fingerprint":
        return cls(
            LaurentPolynomial.parse(obj["jones"]),
            LaurentPolynomial.parse(obj["under_closure_jones"]),
            LaurentPolynomial.parse(obj["over_closure_jones"]),
            int(obj["height_bound"]),
            bool(obj["knot_type"]),
        )


@dataclass(frozen=True)
class UnresolvedClass:
    """Marker for diagrams still above the bracket cap after simplification."""

    crossings: int
    code: str

    key = "UNRESOLVED"


TRIVIAL = Fingerprint(LaurentPolynomial.one(), LaurentPolynomial.one(), LaurentPolynomial.one(), 0, True)


def fingerprint(d: KnotoidDiagram, cap: int = DEFAULT_CAP, budget: int = DEFAULT_BUDGET):
    """Fingerprint of a knotoid diagram (simplified first); memoized by code."""
    return _fingerprint_code(d.code, cap, budget)


@lru_cache(maxsize=200_000)
def _fingerprint_code(code: str, cap: int, budget: int):
    d = KnotoidDiagram.from_code(code)
    if not d.events:
        return TRIVIAL
    res = simplify(d, budget=budget)
    s = res.diagram
    if s.n_crossings > cap:
        return UnresolvedClass(s.n_crossings, s.code)
    h = res.height_bound
    if h == 0:
        j = jones_normalized(s, cap)
        return Fingerprint(j, j, j, 0, True)
    extra = cap + len(s.events)
    return Fingerprint(
        jones_normalized(s, cap),
        jones_normalized(closure(s, "under").diagram, extra),
        jones_normalized(closure(s, "over").diagram, extra),
        h,
        False,
    )


def clear_caches() -> None:
    _fingerprint_code.cache_clear()
