"""Laurent polynomials in q with integer coefficients.

Class polynomials live naturally in the basis of powers of (q-1); the
conversion helpers below move between the two bases exactly.
"""

import re
from math import comb

from .errors import ContractError


class QLaurent:
    """Finitely supported map exponent -> nonzero integer coefficient."""

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs=None):
        items = coeffs.items() if isinstance(coeffs, dict) else (coeffs or ())
        c = {}
        for e, a in items:
            a = c.get(int(e), 0) + int(a)
            if a:
                c[int(e)] = a
            else:
                c.pop(int(e), None)
        self._c = c
        self._hash = None

    @classmethod
    def const(cls, a):
        return cls({0: a})

    @classmethod
    def q_power(cls, e):
        return cls({e: 1})

    # -- inspection ------------------------------------------------------------

    def coeffs(self):
        return dict(self._c)

    def coeff(self, e):
        return self._c.get(e, 0)

    def is_zero(self):
        return not self._c

    def degree(self):
        if not self._c:
            raise ValueError("degree of the zero polynomial")
        return max(self._c)

    def low_degree(self):
        if not self._c:
            raise ValueError("degree of the zero polynomial")
        return min(self._c)

    def evaluate(self, q):
        return sum(a * q ** e for e, a in self._c.items())

    # -- ring structure --------------------------------------------------------

    @staticmethod
    def _coerce(x):
        if isinstance(x, QLaurent):
            return x
        if isinstance(x, int):
            return QLaurent.const(x)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        c = dict(self._c)
        for e, a in other._c.items():
            c[e] = c.get(e, 0) + a
        return QLaurent(c)

    __radd__ = __add__

    def __neg__(self):
        return QLaurent({e: -a for e, a in self._c.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        c = {}
        for e, a in self._c.items():
            for f, b in other._c.items():
                c[e + f] = c.get(e + f, 0) + a * b
        return QLaurent(c)

    __rmul__ = __mul__

    def scale(self, k):
        return QLaurent({e: k * a for e, a in self._c.items()})

    def shift(self, k):
        """Multiply by q^k."""
        return QLaurent({e + k: a for e, a in self._c.items()})

    def __pow__(self, n):
        if n < 0:
            if len(self._c) == 1:
                (e, a), = self._c.items()
                if a in (1, -1):
                    return QLaurent({-e * (-n): a ** (-n)})
            raise ValueError("only monomials with unit coefficient are invertible")
        out, base = QLaurent.const(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self._c == other._c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._c.items()))
        return self._hash

    # -- rendering -------------------------------------------------------------

    def __str__(self):
        if not self._c:
            return "0"
        return _render([(a, f"q^{e}") for e, a in sorted(self._c.items(), reverse=True)])

    def __repr__(self):
        return f"QLaurent({self})"

    def to_qm1_basis(self):
        """Rewrite a polynomial in powers of (q-1)."""
        if self._c and min(self._c) < 0:
            raise ContractError("negative exponent: not a polynomial in q")
        out = {}
        for e, a in self._c.items():
            for k in range(e + 1):
                out[k] = out.get(k, 0) + a * comb(e, k)
        return QMinusOnePoly(out)


class QMinusOnePoly:
    """Polynomial in (q-1): exponent -> nonzero integer coefficient."""

    __slots__ = ("_c",)

    def __init__(self, coeffs=None):
        c = {}
        for e, a in dict(coeffs or {}).items():
            if int(e) < 0:
                raise ContractError("negative power of (q-1)")
            if a:
                c[int(e)] = c.get(int(e), 0) + int(a)
        self._c = {e: a for e, a in c.items() if a}

    def coeffs(self):
        return dict(self._c)

    def coeff(self, e):
        return self._c.get(e, 0)

    @property
    def is_nonneg(self):
        return all(a > 0 for a in self._c.values())

    def degree(self):
        return max(self._c) if self._c else None

    def leading_coefficient(self):
        return self._c[max(self._c)] if self._c else 0

    def to_qlaurent(self):
        out = QLaurent()
        qm1 = QLaurent({1: 1, 0: -1})
        for e, a in self._c.items():
            out = out + (qm1 ** e).scale(a)
        return out

    def __eq__(self, other):
        return isinstance(other, QMinusOnePoly) and self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __str__(self):
        if not self._c:
            return "0"
        return _render([(a, f"(q-1)^{e}") for e, a in sorted(self._c.items(), reverse=True)])

    def __repr__(self):
        return f"QMinusOnePoly({self})"


def _render(terms):
    parts = []
    for k, (a, mono) in enumerate(terms):
        sign = "-" if a < 0 else "+"
        body = f"{abs(a)}*{mono}"
        if k == 0:
            parts.append(body if a > 0 else "-" + body)
        else:
            parts.append(f" {sign} {body}")
    return "".join(parts)


Q = QLaurent({1: 1})
ONE = QLaurent.const(1)


def monomial(e_one, e_two):
    """(q-1)^e_one * q^e_two."""
    if e_one < 0:
        raise ContractError("negative power of (q-1)")
    return (QLaurent({1: 1, 0: -1}) ** e_one).shift(e_two)


def parse(text):
    """Inverse of ``str(QLaurent)``."""
    text = text.replace(" ", "")
    if text == "0":
        return QLaurent()
    out, k = {}, 0
    for m in re.finditer(r"([+-]?)(\d+)\*q\^(-?\d+)", text):
        if m.start() != k:
            raise ValueError(f"cannot parse polynomial at position {k}: {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        e = int(m.group(3))
        out[e] = out.get(e, 0) + sign * int(m.group(2))
        k = m.end()
    if k != len(text):
        raise ValueError(f"cannot parse polynomial at position {k}: {text!r}")
    return QLaurent(out)
