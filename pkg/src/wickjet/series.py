"""Sparse truncated series over a Wick algebra with exact coefficients.

A term is keyed by ``(k2, I, J)`` where ``I`` and ``J`` are multi-indices
(tuples of non-negative ints, one slot per complex variable) recording the
powers of the holomorphic generators ``y_i`` and their conjugates ``yb_i``,
and ``k2`` is the *doubled* exponent of the deformation parameter ``h`` —
doubling keeps half-integer powers (sqrt(h) bookkeeping from normalized
bases) in integer arithmetic.  The total degree of a term is::

    degree(k2, I, J) = k2 + |I| + |J|        # h itself has degree 2

Every series carries a truncation degree ``trunc`` (terms above it are
discarded — the grading makes this lossless for products) and a
``lower_bound`` on allowed term degrees (negative bounds admit the extended
algebra with inverse powers of h).  Zero is the empty term map and equality
is structural on ``(dim, trunc, terms)``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .coefficients import ComplexRational, format_rational, parse_rational
from .errors import DegreeWindowError, DimensionMismatch, TruncationMismatch

__all__ = [
    "MultiIndex",
    "mi_zero",
    "mi_abs",
    "mi_add",
    "mi_sub",
    "mi_leq",
    "mi_factorial",
    "total_degree",
    "WickSeries",
    "HbarSeries",
]

MultiIndex = tuple  # tuple[int, ...], length == dim


def mi_zero(dim: int) -> MultiIndex:
    return (0,) * dim


def mi_abs(index: MultiIndex) -> int:
    return sum(index)


def mi_add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def mi_sub(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x - y for x, y in zip(a, b))


def mi_leq(a: MultiIndex, b: MultiIndex) -> bool:
    """Componentwise a <= b."""
    return all(x <= y for x, y in zip(a, b))


def mi_factorial(index: MultiIndex) -> int:
    out = 1
    for entry in index:
        for i in range(2, entry + 1):
            out *= i
    return out


def total_degree(k2: int, I: MultiIndex, J: MultiIndex) -> int:
    """Degree of the term h^(k2/2) y^I yb^J."""
    return k2 + sum(I) + sum(J)


def _coerce_coefficient(value) -> ComplexRational:
    return ComplexRational.coerce(value)


class WickSeries:
    """A sparse, truncated element of the (extended) Wick algebra."""

    __slots__ = ("dim", "trunc", "lower_bound", "terms")

    def __init__(self, dim: int, trunc: int, terms: Mapping | Iterable | None = None,
                 lower_bound: int = 0):
        if dim < 1:
            raise DimensionMismatch(f"dim must be >= 1, got {dim}")
        if trunc < 0:
            raise ValueError(f"trunc must be >= 0, got {trunc}")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "trunc", trunc)
        object.__setattr__(self, "lower_bound", lower_bound)
        clean: dict = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for key, raw in items:
                k2, I, J = key
                I = tuple(I)
                J = tuple(J)
                if len(I) != dim or len(J) != dim:
                    raise DimensionMismatch(
                        f"multi-index length != dim={dim} in term {key}")
                if any(e < 0 for e in I) or any(e < 0 for e in J):
                    raise ValueError(f"negative multi-index entry in term {key}")
                coeff = _coerce_coefficient(raw)
                if not coeff:
                    continue
                deg = k2 + sum(I) + sum(J)
                if deg > trunc:
                    continue
                if deg < lower_bound:
                    raise DegreeWindowError(
                        f"term {(k2, I, J)} has degree {deg} < lower bound {lower_bound}")
                key = (k2, I, J)
                if key in clean:
                    merged = clean[key] + coeff
                    if merged:
                        clean[key] = merged
                    else:
                        del clean[key]
                else:
                    clean[key] = coeff
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("WickSeries is immutable")

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, dim: int, trunc: int, lower_bound: int = 0) -> "WickSeries":
        return cls(dim, trunc, None, lower_bound)

    @classmethod
    def unit(cls, dim: int, trunc: int) -> "WickSeries":
        return cls.monomial(dim, trunc, 1, 0, mi_zero(dim), mi_zero(dim))

    @classmethod
    def monomial(cls, dim: int, trunc: int, coeff, k2: int = 0,
                 I: MultiIndex | None = None, J: MultiIndex | None = None,
                 lower_bound: int | None = None) -> "WickSeries":
        I = mi_zero(dim) if I is None else tuple(I)
        J = mi_zero(dim) if J is None else tuple(J)
        deg = total_degree(k2, I, J)
        if lower_bound is None:
            lower_bound = min(0, deg)
        return cls(dim, trunc, {(k2, I, J): coeff}, lower_bound)

    def replace_terms(self, terms, lower_bound: int | None = None) -> "WickSeries":
        return WickSeries(self.dim, self.trunc, terms,
                          self.lower_bound if lower_bound is None else lower_bound)

    # -- inspection -----------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def coefficient(self, k2: int, I: MultiIndex, J: MultiIndex) -> ComplexRational:
        return self.terms.get((k2, tuple(I), tuple(J)), ComplexRational(0))

    def sorted_terms(self) -> list:
        """Terms in canonical (k2, I, J) lexicographic order."""
        return sorted(self.terms.items())

    def min_degree(self) -> int | None:
        """Least term degree, or None for the zero series."""
        if not self.terms:
            return None
        return min(total_degree(*key) for key in self.terms)

    def degree_slice(self, degree: int) -> "WickSeries":
        """The homogeneous part of the given total degree."""
        picked = {k: c for k, c in self.terms.items() if total_degree(*k) == degree}
        return WickSeries(self.dim, self.trunc, picked, min(self.lower_bound, degree))

    def is_plain(self) -> bool:
        """No inverse powers of h and a non-negative degree window."""
        return self.lower_bound >= 0 and all(k2 >= 0 for (k2, _, _) in self.terms)

    def is_holomorphic(self) -> bool:
        """Only y generators (J = 0 throughout)."""
        return all(not any(J) for (_, _, J) in self.terms)

    def is_antiholomorphic(self) -> bool:
        return all(not any(I) for (_, I, _) in self.terms)

    def has_integer_h_powers(self) -> bool:
        return all(k2 % 2 == 0 for (k2, _, _) in self.terms)

    # -- window management -----------------------------------------------

    def with_lower_bound(self, lower_bound: int) -> "WickSeries":
        return WickSeries(self.dim, self.trunc, self.terms, lower_bound)

    def retruncate(self, trunc: int) -> "WickSeries":
        """Explicitly move to a different truncation degree (never implicit)."""
        return WickSeries(self.dim, trunc, self.terms, self.lower_bound)

    # -- ring operations ---------------------------------------------------

    def _check_compatible(self, other: "WickSeries") -> None:
        if self.dim != other.dim:
            raise DimensionMismatch(f"dim {self.dim} != {other.dim}")
        if self.trunc != other.trunc:
            raise TruncationMismatch(f"trunc {self.trunc} != {other.trunc}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction, ComplexRational)):
            other = WickSeries.monomial(self.dim, self.trunc, other)
        if not isinstance(other, WickSeries):
            return NotImplemented
        self._check_compatible(other)
        merged = dict(self.terms)
        for key, coeff in other.terms.items():
            acc = merged.get(key)
            acc = coeff if acc is None else acc + coeff
            if acc:
                merged[key] = acc
            else:
                merged.pop(key, None)
        return WickSeries(self.dim, self.trunc, merged,
                          min(self.lower_bound, other.lower_bound))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, ComplexRational)):
            other = WickSeries.monomial(self.dim, self.trunc, other)
        if not isinstance(other, WickSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        flipped = {key: -coeff for key, coeff in self.terms.items()}
        return WickSeries(self.dim, self.trunc, flipped, self.lower_bound)

    def scale(self, factor) -> "WickSeries":
        factor = _coerce_coefficient(factor)
        if not factor:
            return WickSeries(self.dim, self.trunc, None, self.lower_bound)
        scaled = {key: coeff * factor for key, coeff in self.terms.items()}
        return WickSeries(self.dim, self.trunc, scaled, self.lower_bound)

    def __mul__(self, other):
        """Pointwise (commutative) product, truncated by total degree."""
        if isinstance(other, (int, Fraction, ComplexRational)):
            return self.scale(other)
        if not isinstance(other, WickSeries):
            return NotImplemented
        self._check_compatible(other)
        trunc = self.trunc
        out: dict = {}
        for (k2f, If, Jf), cf in self.terms.items():
            deg_f = k2f + sum(If) + sum(Jf)
            for (k2g, Ig, Jg), cg in other.terms.items():
                if deg_f + k2g + sum(Ig) + sum(Jg) > trunc:
                    continue
                key = (k2f + k2g, mi_add(If, Ig), mi_add(Jf, Jg))
                prod = cf * cg
                acc = out.get(key)
                acc = prod if acc is None else acc + prod
                if acc:
                    out[key] = acc
                else:
                    out.pop(key, None)
        return WickSeries(self.dim, self.trunc, out,
                          self.lower_bound + other.lower_bound)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, ComplexRational)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, ComplexRational)):
            return self.scale(ComplexRational(1) / _coerce_coefficient(other))
        return NotImplemented

    def pow(self, exponent: int) -> "WickSeries":
        if exponent < 0:
            raise ValueError("negative powers are not defined on WickSeries")
        out = WickSeries.unit(self.dim, self.trunc)
        base = self
        for _ in range(exponent):
            out = out * base
        return out

    def conjugate(self) -> "WickSeries":
        """Swap y^I yb^J -> y^J yb^I and conjugate coefficients (h is real)."""
        flipped = {(k2, J, I): coeff.conjugate() for (k2, I, J), coeff in self.terms.items()}
        return WickSeries(self.dim, self.trunc, flipped, self.lower_bound)

    def hbar_shift(self, dk2: int) -> "WickSeries":
        """Multiply by h^(dk2/2); dk2 may be negative or odd."""
        shifted = {(k2 + dk2, I, J): coeff for (k2, I, J), coeff in self.terms.items()}
        return WickSeries(self.dim, self.trunc, shifted, self.lower_bound + dk2)

    # -- slices -------------------------------------------------------------

    def constant_part(self) -> "HbarSeries":
        """The (I, J) = (0, 0) terms, as a series in h alone."""
        dim0 = mi_zero(self.dim)
        picked = {k2: coeff for (k2, I, J), coeff in self.terms.items()
                  if I == dim0 and J == dim0}
        return HbarSeries(self.trunc, picked)

    def holomorphic_part(self) -> "WickSeries":
        picked = {key: c for key, c in self.terms.items() if not any(key[2])}
        return WickSeries(self.dim, self.trunc, picked, self.lower_bound)

    # -- equality / display ---------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, WickSeries):
            return NotImplemented
        return (self.dim == other.dim and self.trunc == other.trunc
                and self.terms == other.terms)

    def __hash__(self) -> int:
        return hash((self.dim, self.trunc, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return (f"WickSeries(dim={self.dim}, trunc={self.trunc}, "
                f"lower_bound={self.lower_bound}, terms={len(self.terms)})")

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(_format_term(self.dim, key, coeff)
                          for key, coeff in self.sorted_terms()).replace("+ -", "- ")

    # -- serialization ---------------------------------------------------------

    def to_records(self) -> list[dict]:
        out = []
        for (k2, I, J), coeff in self.sorted_terms():
            out.append({
                "k2": k2,
                "I": list(I),
                "J": list(J),
                "re": format_rational(coeff.re),
                "im": format_rational(coeff.im),
            })
        return out

    @classmethod
    def from_records(cls, dim: int, trunc: int, records: Iterable[dict],
                     lower_bound: int = 0) -> "WickSeries":
        terms = {}
        for rec in records:
            key = (int(rec["k2"]), tuple(int(e) for e in rec["I"]),
                   tuple(int(e) for e in rec["J"]))
            coeff = ComplexRational(parse_rational(str(rec.get("re", "0"))),
                                    parse_rational(str(rec.get("im", "0"))))
            if key in terms:
                coeff = terms[key] + coeff
            terms[key] = coeff
        return cls(dim, trunc, terms, lower_bound)


def _format_hbar(k2: int) -> str:
    if k2 == 2:
        return "h"
    if k2 % 2 == 0:
        return f"h^{k2 // 2}"
    return f"h^({k2}/2)"


def _format_vars(symbol: str, index: MultiIndex, dim: int) -> list[str]:
    parts = []
    for i, power in enumerate(index):
        if not power:
            continue
        name = symbol if dim == 1 else f"{symbol}{i + 1}"
        parts.append(name if power == 1 else f"{name}^{power}")
    return parts


def _format_term(dim: int, key, coeff: ComplexRational) -> str:
    k2, I, J = key
    factors: list[str] = []
    if k2:
        factors.append(_format_hbar(k2))
    factors.extend(_format_vars("y", I, dim))
    factors.extend(_format_vars("yb", J, dim))
    if not factors:
        return f"({coeff})" if coeff.im else str(coeff)
    body = " ".join(factors)
    if coeff == 1:
        return body
    if coeff == -1:
        return f"-{body}"
    if coeff.im:
        return f"({coeff}) {body}"
    return f"{coeff} {body}"


class HbarSeries:
    """A truncated series in the deformation parameter alone (k2-keyed)."""

    __slots__ = ("trunc", "terms")

    def __init__(self, trunc: int, terms: Mapping | None = None):
        object.__setattr__(self, "trunc", trunc)
        clean: dict = {}
        if terms:
            for k2, raw in terms.items():
                coeff = _coerce_coefficient(raw)
                if not coeff or k2 > trunc:
                    continue
                clean[k2] = coeff
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("HbarSeries is immutable")

    @classmethod
    def zero(cls, trunc: int) -> "HbarSeries":
        return cls(trunc)

    @classmethod
    def one(cls, trunc: int) -> "HbarSeries":
        return cls(trunc, {0: 1})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coefficient(self, k2: int) -> ComplexRational:
        return self.terms.get(k2, ComplexRational(0))

    def coefficient_at_power(self, k: Fraction | int) -> ComplexRational:
        """Coefficient of h^k for integer or half-integer k."""
        k2 = Fraction(k) * 2
        if k2.denominator != 1:
            raise ValueError(f"h-power {k} is not a half-integer")
        return self.coefficient(int(k2))

    def min_k2(self) -> int | None:
        return min(self.terms) if self.terms else None

    def sorted_terms(self) -> list:
        return sorted(self.terms.items())

    def _check(self, other: "HbarSeries") -> None:
        if self.trunc != other.trunc:
            raise TruncationMismatch(f"trunc {self.trunc} != {other.trunc}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction, ComplexRational)):
            other = HbarSeries(self.trunc, {0: other})
        if not isinstance(other, HbarSeries):
            return NotImplemented
        self._check(other)
        merged = dict(self.terms)
        for k2, coeff in other.terms.items():
            acc = merged.get(k2)
            acc = coeff if acc is None else acc + coeff
            if acc:
                merged[k2] = acc
            else:
                merged.pop(k2, None)
        return HbarSeries(self.trunc, merged)

    __radd__ = __add__

    def __neg__(self):
        return HbarSeries(self.trunc, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, ComplexRational)):
            other = HbarSeries(self.trunc, {0: other})
        if not isinstance(other, HbarSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, ComplexRational)):
            factor = _coerce_coefficient(other)
            return HbarSeries(self.trunc,
                              {k: c * factor for k, c in self.terms.items()})
        if not isinstance(other, HbarSeries):
            return NotImplemented
        self._check(other)
        out: dict = {}
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                k = ka + kb
                if k > self.trunc:
                    continue
                prod = ca * cb
                acc = out.get(k)
                acc = prod if acc is None else acc + prod
                if acc:
                    out[k] = acc
                else:
                    out.pop(k, None)
        return HbarSeries(self.trunc, out)

    __rmul__ = __mul__

    def shift(self, dk2: int) -> "HbarSeries":
        return HbarSeries(self.trunc, {k + dk2: c for k, c in self.terms.items()})

    def reciprocal(self) -> "HbarSeries":
        """Multiplicative inverse; the lowest term must be nonzero.

        The lowest power is peeled off and the rest inverted geometrically,
        so the result may carry negative powers; coefficients are exact
        through ``trunc - 2 * min_k2`` and the caller slices as needed.
        """
        low = self.min_k2()
        if low is None:
            raise ZeroDivisionError("reciprocal of the zero series")
        lead = self.terms[low]
        tail = self.shift(-low) - lead  # strictly positive powers
        ratio = tail * lead.inverse()
        acc = HbarSeries.one(self.trunc)
        power = HbarSeries.one(self.trunc)
        while True:
            power = -1 * (power * ratio)
            if not power:
                break
            acc = acc + power
        return (acc * lead.inverse()).shift(-low)

    def truncate_k2(self, k2_max: int) -> "HbarSeries":
        return HbarSeries(self.trunc, {k: c for k, c in self.terms.items() if k <= k2_max})

    def conjugate(self) -> "HbarSeries":
        return HbarSeries(self.trunc, {k: c.conjugate() for k, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, ComplexRational)):
            other = HbarSeries(self.trunc, {0: other})
        if not isinstance(other, HbarSeries):
            return NotImplemented
        return self.trunc == other.trunc and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.trunc, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"HbarSeries(trunc={self.trunc}, terms={dict(self.sorted_terms())!r})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k2, coeff in self.sorted_terms():
            if k2 == 0:
                parts.append(str(coeff) if coeff.is_real and coeff.re >= 0 else f"({coeff})")
                continue
            body = _format_hbar(k2)
            if coeff == 1:
                parts.append(body)
            elif coeff == -1:
                parts.append(f"-{body}")
            elif coeff.im:
                parts.append(f"({coeff}) {body}")
            else:
                parts.append(f"{coeff} {body}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_records(self) -> list[dict]:
        return [{"k2": k2, "re": format_rational(c.re), "im": format_rational(c.im)}
                for k2, c in self.sorted_terms()]

    @classmethod
    def from_records(cls, trunc: int, records: Iterable[dict]) -> "HbarSeries":
        terms = {}
        for rec in records:
            k2 = int(rec["k2"])
            coeff = ComplexRational(parse_rational(str(rec.get("re", "0"))),
                                    parse_rational(str(rec.get("im", "0"))))
            terms[k2] = terms.get(k2, ComplexRational(0)) + coeff
        return cls(trunc, terms)


def iter_multi_indices(dim: int, max_abs: int) -> Iterator[MultiIndex]:
    """All multi-indices of length dim with |I| <= max_abs, lexicographic."""
    if dim == 0:
        yield ()
        return
    for head in range(max_abs + 1):
        for tail in iter_multi_indices(dim - 1, max_abs - head):
            yield (head,) + tail
