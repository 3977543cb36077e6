"""Exact Laurent polynomials in one variable ``A`` with integer coefficients."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping


class LaurentPolynomial:
    """Immutable sparse Laurent polynomial ``sum c_e * A**e``.

    Coefficients are Python ints, so arithmetic is exact at any size.
    Zero coefficients are never stored.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, int] = {}
        for e, c in items:
            if not isinstance(c, int) or isinstance(c, bool):
                raise TypeError(f"coefficient for A^{e} must be int, got {type(c).__name__}")
            acc[int(e)] = acc.get(int(e), 0) + c
        self._terms = {e: c for e, c in sorted(acc.items()) if c != 0}
        self._hash = None

    @classmethod
    def monomial(cls, exp: int, coeff: int = 1) -> "LaurentPolynomial":
        return cls({exp: coeff})

    @classmethod
    def one(cls) -> "LaurentPolynomial":
        return cls({0: 1})

    @classmethod
    def zero(cls) -> "LaurentPolynomial":
        return cls()

    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def coeff(self, exp: int) -> int:
        return self._terms.get(exp, 0)

    def is_zero(self) -> bool:
        return not self._terms

    def min_degree(self) -> int:
        return min(self._terms) if self._terms else 0

    def max_degree(self) -> int:
        return max(self._terms) if self._terms else 0

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPolynomial({0: other})
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __add__(self, other):
        if isinstance(other, int):
            other = LaurentPolynomial({0: other})
        acc = dict(self._terms)
        for e, c in other._terms.items():
            acc[e] = acc.get(e, 0) + c
        return LaurentPolynomial(acc)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = LaurentPolynomial({0: other})
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return LaurentPolynomial({e: c * other for e, c in self._terms.items()})
        acc: dict[int, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                acc[e1 + e2] = acc.get(e1 + e2, 0) + c1 * c2
        return LaurentPolynomial(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self._terms) != 1:
                raise ValueError("only monomials have Laurent inverses")
            ((e, c),) = self._terms.items()
            if c not in (1, -1):
                raise ValueError("monomial inverse requires a unit coefficient")
            return LaurentPolynomial({e * n: c if n % 2 else 1})
        out = LaurentPolynomial.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, k: int) -> "LaurentPolynomial":
        """Multiply by ``A**k``."""
        return LaurentPolynomial({e + k: c for e, c in self._terms.items()})

    def mirror(self) -> "LaurentPolynomial":
        """Substitute ``A -> A**-1``."""
        return LaurentPolynomial({-e: c for e, c in self._terms.items()})

    def evaluate(self, a: complex | float | Fraction):
        return sum(c * a ** e for e, c in self._terms.items())

    def to_t(self) -> dict[Fraction, int]:
        """Rewrite in ``t = A**-4``; exponents may be fractional."""
        return {Fraction(-e, 4): c for e, c in self._terms.items()}

    # canonical string: descending exponents, "c*A^e" joined by " + "
    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e in sorted(self._terms, reverse=True):
            parts.append(f"{self._terms[e]}*A^{e}")
        return " + ".join(parts)

    def __repr__(self):
        return f"LaurentPolynomial({self._terms!r})"

    @classmethod
    def parse(cls, text: str) -> "LaurentPolynomial":
        text = text.strip()
        if text == "0":
            return cls()
        terms = {}
        for part in text.split(" + "):
            c, _, e = part.partition("*A^")
            if not _:
                raise ValueError(f"malformed term {part!r}")
            terms[int(e)] = terms.get(int(e), 0) + int(c)
        return cls(terms)

    def to_json(self) -> dict[str, int]:
        return {str(e): c for e, c in sorted(self._terms.items())}

    @classmethod
    def from_json(cls, obj: Mapping[str, int]) -> "LaurentPolynomial":
        return cls({int(e): int(c) for e, c in obj.items()})


# loop value -A^2 - A^-2
LOOP = LaurentPolynomial({2: -1, -2: -1})
