"""Exact sparse Laurent-polynomial arithmetic for the engine's coefficient rings.

Two rings are implemented:

  QuarterLaurent   Z[t1^(1/4), t1^(-1/4), t2^(1/4), t2^(-1/4)]
                   sparse dict mapping an exponent pair (p4, q4) to a nonzero
                   integer coefficient; (p4, q4) denotes t1^(p4/4) t2^(q4/4).
                   The distinguished element u = t1*t2 is (4, 4).

  SignedULaurent   Z[u^(1/2), u^(-1/2), zeta] / (zeta^2 - 1)
                   sparse dict mapping (uhalf, zbit) to a nonzero integer,
                   where (uhalf, zbit) denotes u^(uhalf/2) zeta^zbit.

Both representations store exponents as integers in quarter- resp. half-units
so that equality tests are exact and serialization is canonical.  The zero
polynomial is the empty dict; no stored coefficient is ever zero.  Values are
immutable after construction and all operations are pure, so instances can be
shared freely between threads.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Tuple

__all__ = ["QuarterLaurent", "SignedULaurent"]

QL_ZERO_KEY: Tuple[int, int] = (0, 0)


def _clean(terms: Mapping[Tuple[int, int], int]) -> dict:
    return {k: int(c) for k, c in terms.items() if c != 0}


class QuarterLaurent:
    """Sparse two-variable Laurent polynomial with quarter-integer exponents."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Tuple[int, int], int] | None = None):
        object.__setattr__(self, "_terms", _clean(terms or {}))

    def __setattr__(self, name, value):
        raise AttributeError("QuarterLaurent is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "QuarterLaurent":
        return cls({})

    @classmethod
    def one(cls) -> "QuarterLaurent":
        return cls({QL_ZERO_KEY: 1})

    @classmethod
    def monomial(cls, p4: int, q4: int, coeff: int = 1) -> "QuarterLaurent":
        return cls({(int(p4), int(q4)): coeff})

    @classmethod
    def t1(cls, quarters: int = 4) -> "QuarterLaurent":
        """t1 raised to quarters/4."""
        return cls.monomial(quarters, 0)

    @classmethod
    def t2(cls, quarters: int = 4) -> "QuarterLaurent":
        return cls.monomial(0, quarters)

    @classmethod
    def u(cls, halves: int = 2) -> "QuarterLaurent":
        """u = t1*t2 raised to halves/2; u^(1/2) is monomial (2, 2)."""
        return cls.monomial(2 * halves, 2 * halves)

    @classmethod
    def from_int(cls, n: int) -> "QuarterLaurent":
        return cls({QL_ZERO_KEY: n})

    @classmethod
    def u_power(cls, exponent: Fraction | int) -> "QuarterLaurent":
        """u^exponent for a quarter-integer exponent."""
        e4 = Fraction(exponent) * 4
        if e4.denominator != 1:
            raise ValueError(f"u-exponent {exponent} is not a quarter-integer")
        return cls.monomial(int(e4), int(e4))

    @classmethod
    def t1_over_t2_power(cls, exponent: Fraction | int) -> "QuarterLaurent":
        """(t1*t2^(-1))^exponent for a quarter-integer exponent."""
        e4 = Fraction(exponent) * 4
        if e4.denominator != 1:
            raise ValueError(f"exponent {exponent} is not a quarter-integer")
        return cls.monomial(int(e4), -int(e4))

    # -- basic protocol ----------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Tuple[int, int], int]]:
        return iter(sorted(self._terms.items()))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = QuarterLaurent.from_int(other)
        if not isinstance(other, QuarterLaurent):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(sorted(self._terms.items())))

    def __repr__(self) -> str:
        return f"QuarterLaurent({self!s})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (p4, q4), c in sorted(self._terms.items()):
            mono = []
            if p4:
                mono.append(f"t1^{Fraction(p4, 4)}")
            if q4:
                mono.append(f"t2^{Fraction(q4, 4)}")
            body = "*".join(mono)
            if not body:
                parts.append(f"{c:+d}")
            elif c == 1:
                parts.append(f"+{body}")
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{c:+d}*{body}")
        out = "".join(parts)
        return out[1:] if out.startswith("+") else out

    # -- ring operations ---------------------------------------------------

    def __add__(self, other) -> "QuarterLaurent":
        if isinstance(other, int):
            other = QuarterLaurent.from_int(other)
        if not isinstance(other, QuarterLaurent):
            return NotImplemented
        out = dict(self._terms)
        for k, c in other._terms.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return QuarterLaurent(out)

    __radd__ = __add__

    def __neg__(self) -> "QuarterLaurent":
        return QuarterLaurent({k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "QuarterLaurent":
        if isinstance(other, int):
            other = QuarterLaurent.from_int(other)
        if not isinstance(other, QuarterLaurent):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "QuarterLaurent":
        return (-self) + other

    def __mul__(self, other) -> "QuarterLaurent":
        if isinstance(other, int):
            other = QuarterLaurent.from_int(other)
        if not isinstance(other, QuarterLaurent):
            return NotImplemented
        out: dict = {}
        for (p, q), c in self._terms.items():
            for (r, s), d in other._terms.items():
                k = (p + r, q + s)
                v = out.get(k, 0) + c * d
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return QuarterLaurent(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "QuarterLaurent":
        if n < 0:
            if len(self._terms) != 1:
                raise ValueError("can only invert monomials")
            ((p, q), c) = next(iter(self._terms.items()))
            if c * c != 1:
                raise ValueError("can only invert unit monomials")
            return QuarterLaurent.monomial(-p, -q, c) ** (-n)
        out = QuarterLaurent.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- structure maps ----------------------------------------------------

    def dual(self) -> "QuarterLaurent":
        """Image under the involution t1 -> t2^(-1), t2 -> t1^(-1)."""
        return QuarterLaurent({(-q, -p): c for (p, q), c in self._terms.items()})

    def to_mixed(self) -> "SignedULaurent":
        """Substitute t1 = t2 = u^(1/2), landing in Z[u^(1/2), u^(-1/2)].

        Each term t1^(p4/4) t2^(q4/4) maps to u^((p4+q4)/8); the result must
        have half-integer u-exponents, so p4 + q4 must be divisible by 4.
        """
        out: dict = {}
        for (p4, q4), c in self._terms.items():
            s = p4 + q4
            if s % 4 != 0:
                raise ValueError(
                    f"term t1^{Fraction(p4,4)} t2^{Fraction(q4,4)} does not land "
                    "in half-integer u-exponents under t1 = t2 = u^(1/2)"
                )
            k = (s // 4, 0)
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return SignedULaurent(out)

    def norm_degree(self) -> Fraction:
        """log2 of the maximal term norm under |t1| = |t2| = 2.

        For a term t1^(p4/4) t2^(q4/4) this is (p4 + q4)/4; taking the max
        over terms gives the degree used by the norm bounds of the
        Kazhdan-Lusztig layer.  Raises on the zero polynomial.
        """
        if not self._terms:
            raise ValueError("norm_degree of the zero polynomial is undefined")
        return max(Fraction(p4 + q4, 4) for (p4, q4) in self._terms)

    def is_symmetric_u_laurent(self) -> bool:
        """True when every term has p4 == q4, i.e. the value lies in Z[u^(1/4)]."""
        return all(p4 == q4 for (p4, q4) in self._terms)

    # -- serialization -----------------------------------------------------

    def to_records(self) -> list:
        """Sorted list of {p4, q4, coeff} records (the canonical JSON form)."""
        return [
            {"p4": p4, "q4": q4, "coeff": c}
            for (p4, q4), c in sorted(self._terms.items())
        ]

    @classmethod
    def from_records(cls, records: Iterable[Mapping]) -> "QuarterLaurent":
        return cls({(int(r["p4"]), int(r["q4"])): int(r["coeff"]) for r in records})


class SignedULaurent:
    """Element of Z[u^(1/2), u^(-1/2), zeta]/(zeta^2 - 1).

    Keys are (uhalf, zbit) with uhalf the u-exponent in half-units and
    zbit in {0, 1}; zeta^2 reduces to 1 on every multiplication.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Tuple[int, int], int] | None = None):
        cleaned = {}
        for (uhalf, zbit), c in (terms or {}).items():
            if zbit not in (0, 1):
                raise ValueError(f"zeta exponent bit {zbit} must be 0 or 1")
            if c:
                cleaned[(int(uhalf), int(zbit))] = int(c)
        object.__setattr__(self, "_terms", cleaned)

    def __setattr__(self, name, value):
        raise AttributeError("SignedULaurent is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "SignedULaurent":
        return cls({})

    @classmethod
    def one(cls) -> "SignedULaurent":
        return cls({(0, 0): 1})

    @classmethod
    def from_int(cls, n: int) -> "SignedULaurent":
        return cls({(0, 0): n})

    @classmethod
    def u(cls, halves: int = 2) -> "SignedULaurent":
        return cls({(halves, 0): 1})

    @classmethod
    def zeta(cls) -> "SignedULaurent":
        return cls({(0, 1): 1})

    @classmethod
    def monomial(cls, uhalf: int, zbit: int, coeff: int = 1) -> "SignedULaurent":
        return cls({(uhalf, zbit): coeff})

    @classmethod
    def u_power(cls, exponent: Fraction | int) -> "SignedULaurent":
        e2 = Fraction(exponent) * 2
        if e2.denominator != 1:
            raise ValueError(f"u-exponent {exponent} is not a half-integer")
        return cls({(int(e2), 0): 1})

    # -- protocol ----------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Tuple[int, int], int]]:
        return iter(sorted(self._terms.items()))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = SignedULaurent.from_int(other)
        if not isinstance(other, SignedULaurent):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(sorted(self._terms.items())))

    def __repr__(self) -> str:
        return f"SignedULaurent({self!s})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (uhalf, zbit), c in sorted(self._terms.items()):
            mono = []
            if uhalf:
                mono.append(f"u^{Fraction(uhalf, 2)}")
            if zbit:
                mono.append("z")
            body = "*".join(mono)
            if not body:
                parts.append(f"{c:+d}")
            elif c == 1:
                parts.append(f"+{body}")
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{c:+d}*{body}")
        out = "".join(parts)
        return out[1:] if out.startswith("+") else out

    # -- ring operations ---------------------------------------------------

    def __add__(self, other) -> "SignedULaurent":
        if isinstance(other, int):
            other = SignedULaurent.from_int(other)
        if not isinstance(other, SignedULaurent):
            return NotImplemented
        out = dict(self._terms)
        for k, c in other._terms.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return SignedULaurent(out)

    __radd__ = __add__

    def __neg__(self) -> "SignedULaurent":
        return SignedULaurent({k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "SignedULaurent":
        if isinstance(other, int):
            other = SignedULaurent.from_int(other)
        if not isinstance(other, SignedULaurent):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "SignedULaurent":
        return (-self) + other

    def __mul__(self, other) -> "SignedULaurent":
        if isinstance(other, int):
            other = SignedULaurent.from_int(other)
        if not isinstance(other, SignedULaurent):
            return NotImplemented
        out: dict = {}
        for (a, zb1), c in self._terms.items():
            for (b, zb2), d in other._terms.items():
                k = (a + b, zb1 ^ zb2)
                v = out.get(k, 0) + c * d
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return SignedULaurent(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "SignedULaurent":
        if n < 0:
            if len(self._terms) != 1:
                raise ValueError("can only invert monomials")
            ((uhalf, zbit), c) = next(iter(self._terms.items()))
            if c * c != 1:
                raise ValueError("can only invert unit monomials")
            return SignedULaurent.monomial(-uhalf, zbit, c) ** (-n)
        out = SignedULaurent.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- structure maps ----------------------------------------------------

    def u_inverse(self) -> "SignedULaurent":
        """Image under u^(1/2) -> u^(-1/2) (zeta fixed)."""
        return SignedULaurent({(-a, zb): c for (a, zb), c in self._terms.items()})

    def zeta_to_one(self) -> "SignedULaurent":
        """Specialize zeta = 1."""
        out: dict = {}
        for (a, _zb), c in self._terms.items():
            k = (a, 0)
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return SignedULaurent(out)

    def is_zeta_free(self) -> bool:
        return all(zb == 0 for (_a, zb) in self._terms)

    def is_u_polynomial(self) -> bool:
        """True when zeta-free with integer, nonnegative u-exponents."""
        return all(zb == 0 and a >= 0 and a % 2 == 0 for (a, zb) in self._terms)

    def u_degree(self) -> Fraction:
        """Maximal u-exponent; raises on zero."""
        if not self._terms:
            raise ValueError("u_degree of the zero polynomial is undefined")
        return max(Fraction(a, 2) for (a, _zb) in self._terms)

    def min_u_degree(self) -> Fraction:
        if not self._terms:
            raise ValueError("min_u_degree of the zero polynomial is undefined")
        return min(Fraction(a, 2) for (a, _zb) in self._terms)

    def to_quarter(self) -> "QuarterLaurent":
        """Embed a zeta-free value via u^(1/2) = t1^(1/2) t2^(1/2)."""
        if not self.is_zeta_free():
            raise ValueError("value involves zeta; not a u-Laurent polynomial")
        return QuarterLaurent({(a * 2, a * 2): c for (a, _zb), c in self._terms.items()})

    # -- serialization -----------------------------------------------------

    def to_records(self) -> list:
        return [
            {"uhalf": a, "zeta": zb, "coeff": c}
            for (a, zb), c in sorted(self._terms.items())
        ]

    @classmethod
    def from_records(cls, records: Iterable[Mapping]) -> "SignedULaurent":
        return cls(
            {(int(r["uhalf"]), int(r["zeta"])): int(r["coeff"]) for r in records}
        )
