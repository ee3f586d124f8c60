"""Jet-level Kahler geometry at a marked point.

Potentials are finite jets: maps ``(I, J) -> coefficient`` giving the Taylor
coefficient of ``z^I zbar^J`` of a real potential.  ``k_normalize`` brings a
potential into the normal form ``|z|^2 + sum a_{JK} z^J zbar^K`` (both
``|J| >= 2`` and ``|K| >= 2``) through a holomorphic frame rescale plus a
holomorphic coordinate change, computed degree by degree.  The volume-log
jets are the jets of ``log det(d^2 varphi / dz dzbar)``, normalized so the
flat potential yields exactly zero; together they assemble the weight series
consumed by the integration pipeline.

All arithmetic is exact.  The quadratic diagonalization therefore requires
the pivots of the Hermitian (1,1) block to be perfect rational squares; the
bundled random generator only produces such inputs.
"""

from __future__ import annotations

import random as _random
from fractions import Fraction
from itertools import permutations
from math import isqrt

from .coefficients import ComplexRational
from .errors import PreconditionError, SolveError
from .integrals import WeightSeries
from .series import WickSeries, mi_sub, mi_zero

__all__ = [
    "PotentialJets",
    "FunctionJets",
    "CurvatureTensor",
    "k_normalize",
    "apply_normalization",
    "volume_log_jets",
    "weight_series",
    "function_to_wick",
    "curvature",
    "flat_potential",
    "fubini_study_potential",
    "random_real_analytic_potential",
    "jets_to_records",
    "jets_from_records",
]


# ---------------------------------------------------------------------------
# jet-map plumbing (classical jets ride on WickSeries with zero h-exponent)


def _unit(dim: int, i: int) -> tuple:
    return tuple(1 if k == i else 0 for k in range(dim))


def _coerce_jets(mapping, dim: int, max_degree: int, what: str) -> dict:
    out = {}
    for key, value in dict(mapping).items():
        I, J = key
        I = tuple(int(v) for v in I)
        J = tuple(int(v) for v in J)
        if len(I) != dim or len(J) != dim or min(I + J, default=0) < 0:
            raise PreconditionError(f"bad {what} multi-index {key!r} for dim {dim}")
        if sum(I) + sum(J) > max_degree:
            raise PreconditionError(
                f"{what} jet {key!r} exceeds the order-{max_degree} window")
        coeff = ComplexRational.coerce(value)
        if coeff:
            out[(I, J)] = coeff
    return out


def _check_real_jets(jets: dict, what: str) -> None:
    for (I, J), c in jets.items():
        if jets.get((J, I), ComplexRational()) != c.conjugate():
            raise PreconditionError(
                f"{what} jets must be real: ({I}, {J}) breaks conjugate symmetry")


def _jets_series(jets: dict, dim: int, trunc: int) -> WickSeries:
    return WickSeries(dim, trunc, {(0, I, J): c for (I, J), c in jets.items()})


def _series_to_jets(series: WickSeries) -> dict:
    out = {}
    for (k2, I, J), c in series.terms.items():
        if k2:
            raise SolveError("classical jets acquired an h-power")
        out[(I, J)] = c
    return out


def _series_to_holo_map(series: WickSeries) -> dict:
    out = {}
    for (k2, I, J), c in series.terms.items():
        if k2 or any(J):
            raise SolveError("expected a holomorphic classical jet")
        out[I] = c
    return out


def _holo_map_to_series(mapping, dim: int, trunc: int, what: str) -> WickSeries:
    terms = {}
    for I, value in dict(mapping).items():
        I = tuple(int(v) for v in I)
        if len(I) != dim or min(I, default=0) < 0 or sum(I) > trunc:
            raise PreconditionError(f"bad {what} multi-index {I!r}")
        terms[(0, I, mi_zero(dim))] = value
    return WickSeries(dim, trunc, terms)


def _power_table(s: WickSeries, top: int) -> list:
    table = [WickSeries.unit(s.dim, s.trunc)]
    for _ in range(top):
        table.append(table[-1] * s)
    return table


def _substitute(series: WickSeries, subs: list) -> WickSeries:
    """Formal composition: replace z_i by subs[i] (and zbar_i by its conjugate)."""
    dim, trunc = series.dim, series.trunc
    for s in subs:
        if s.coefficient(0, mi_zero(dim), mi_zero(dim)):
            raise PreconditionError("coordinate changes must fix the marked point")
    conj = [s.conjugate() for s in subs]
    max_i = [0] * dim
    max_j = [0] * dim
    for (k2, I, J) in series.terms:
        if k2:
            raise PreconditionError("substitution is defined for classical jets only")
        for i in range(dim):
            max_i[i] = max(max_i[i], I[i])
            max_j[i] = max(max_j[i], J[i])
    pows = [_power_table(subs[i], max_i[i]) for i in range(dim)]
    cpows = [_power_table(conj[i], max_j[i]) for i in range(dim)]
    out = WickSeries.zero(dim, trunc)
    for (k2, I, J), c in series.terms.items():
        acc = None
        for i in range(dim):
            for table, p in ((pows[i], I[i]), (cpows[i], J[i])):
                if p:
                    acc = table[p] if acc is None else acc * table[p]
        term = WickSeries(dim, trunc, {(0, mi_zero(dim), mi_zero(dim)): c}) \
            if acc is None else acc.scale(c)
        out = out + term
    return out


def _is_normal_form(jets: dict, dim: int) -> bool:
    for (I, J), c in jets.items():
        si, sj = sum(I), sum(J)
        if si >= 2 and sj >= 2:
            continue
        if si == 1 and sj == 1 and I == J and c == 1:
            continue
        return False
    return all(jets.get((_unit(dim, i), _unit(dim, i))) == 1 for i in range(dim))


def _psi_keys_admissible(psi: dict) -> bool:
    return all(any(I) and any(J) for (I, J) in psi)


# ---------------------------------------------------------------------------
# domain types


class PotentialJets:
    """Real potential jets at a marked point, with optional volume-log jets.

    ``varphi`` maps ``(I, J)`` to the Taylor coefficient of ``z^I zbar^J`` up
    to total degree ``order``; ``psi`` (when present) holds the volume-log
    jets up to degree ``order - 2``.  ``psi`` is derived data and is excluded
    from equality.  With ``normalized=True`` the normal form is verified at
    construction, so the flag can be trusted downstream.
    """

    __slots__ = ("dim", "order", "varphi", "psi", "normalized")

    def __init__(self, dim: int, order: int, varphi, psi=None, normalized: bool = False):
        if dim < 1 or order < 0:
            raise PreconditionError("need dim >= 1 and order >= 0")
        varphi = _coerce_jets(varphi, dim, order, "potential")
        _check_real_jets(varphi, "potential")
        if psi is not None:
            psi = _coerce_jets(psi, dim, max(order - 2, 0), "volume-log")
            _check_real_jets(psi, "volume-log")
        if normalized:
            if not _is_normal_form(varphi, dim):
                raise PreconditionError(
                    "normalized flag set, but the jets are not in normal form")
            if psi is not None and not _psi_keys_admissible(psi):
                raise PreconditionError(
                    "volume-log jets of a normalized potential cannot have "
                    "purely (anti-)holomorphic entries")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "varphi", varphi)
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "normalized", bool(normalized))

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("PotentialJets is immutable")

    def coefficient(self, I, J) -> ComplexRational:
        return self.varphi.get((tuple(I), tuple(J)), ComplexRational())

    def varphi_series(self) -> WickSeries:
        return _jets_series(self.varphi, self.dim, self.order)

    def with_psi(self, psi) -> "PotentialJets":
        return PotentialJets(self.dim, self.order, self.varphi, psi, self.normalized)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PotentialJets):
            return NotImplemented
        return (self.dim, self.order, self.varphi, self.normalized) == \
            (other.dim, other.order, other.varphi, other.normalized)

    def __hash__(self) -> int:
        return hash((self.dim, self.order, frozenset(self.varphi.items()),
                     self.normalized))

    def __repr__(self) -> str:
        return (f"PotentialJets(dim={self.dim}, order={self.order}, "
                f"terms={len(self.varphi)}, normalized={self.normalized})")


class FunctionJets:
    """Jets of a function at the marked point, with optional h-weights.

    Terms are keyed ``(k2, I, J)`` exactly like the Wick algebra; negative
    ``k2`` is allowed through ``lower_bound`` for the extended setting where
    each h-order carries its own jet.
    """

    __slots__ = ("dim", "order", "terms", "lower_bound")

    def __init__(self, dim: int, order: int, terms, lower_bound: int = 0):
        series = WickSeries(dim, order, terms, lower_bound)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "terms", series.terms)
        object.__setattr__(self, "lower_bound", series.lower_bound)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("FunctionJets is immutable")

    @classmethod
    def from_wick(cls, series: WickSeries) -> "FunctionJets":
        return cls(series.dim, series.trunc, series.terms, series.lower_bound)

    @classmethod
    def constant(cls, dim: int, order: int, value) -> "FunctionJets":
        zero = mi_zero(dim)
        return cls(dim, order, {(0, zero, zero): value})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FunctionJets):
            return NotImplemented
        return (self.dim, self.order, self.terms) == \
            (other.dim, other.order, other.terms)

    def __hash__(self) -> int:
        return hash((self.dim, self.order, frozenset(self.terms.items())))

    def to_records(self) -> list:
        return function_to_wick(self).to_records()

    @classmethod
    def from_records(cls, dim: int, order: int, records, lower_bound: int = 0):
        series = WickSeries.from_records(dim, order, records, lower_bound)
        return cls.from_wick(series)

    def __repr__(self) -> str:
        return (f"FunctionJets(dim={self.dim}, order={self.order}, "
                f"terms={len(self.terms)})")

    def __str__(self) -> str:
        return str(function_to_wick(self))


class CurvatureTensor:
    """Quartic curvature data R[(i, j, k, l)] paired with z_i zbar_j z_k zbar_l.

    Entries are symmetric under swapping (i, k) and (j, l) and satisfy the
    Hermitian reality R[(i, j, k, l)] == conj(R[(j, i, l, k)]); both are
    verified at construction.  Missing entries read as zero.
    """

    __slots__ = ("dim", "entries")

    def __init__(self, dim: int, entries):
        store = {}
        for key, value in dict(entries).items():
            i, j, k, l = (int(v) for v in key)
            if not all(0 <= v < dim for v in (i, j, k, l)):
                raise PreconditionError(f"curvature index {key!r} out of range")
            coeff = ComplexRational.coerce(value)
            if coeff:
                store[(i, j, k, l)] = coeff
        zero = ComplexRational()
        for (i, j, k, l), c in store.items():
            if store.get((k, j, i, l), zero) != c or store.get((i, l, k, j), zero) != c:
                raise PreconditionError("curvature entries must be symmetric "
                                        "in the holomorphic and in the "
                                        "anti-holomorphic index pairs")
            if store.get((j, i, l, k), zero) != c.conjugate():
                raise PreconditionError("curvature entries must satisfy "
                                        "Hermitian reality")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "entries", store)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("CurvatureTensor is immutable")

    def entry(self, i: int, j: int, k: int, l: int) -> ComplexRational:
        return self.entries.get((i, j, k, l), ComplexRational())

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CurvatureTensor):
            return NotImplemented
        return (self.dim, self.entries) == (other.dim, other.entries)

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self.entries.items())))

    def __repr__(self) -> str:
        return f"CurvatureTensor(dim={self.dim}, entries={len(self.entries)})"


# ---------------------------------------------------------------------------
# normalization


def _one_one_matrix(series: WickSeries, dim: int) -> list:
    """Hermitian matrix M with M[i][j] = coefficient of z_j zbar_i."""
    return [[series.coefficient(0, _unit(dim, j), _unit(dim, i))
             for j in range(dim)] for i in range(dim)]


def _sqrt_fraction(value: Fraction):
    if value <= 0:
        return None
    num, den = value.numerator, value.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn != num or rd * rd != den:
        return None
    return Fraction(rn, rd)


def _ldl(matrix: list, dim: int):
    """Unit-lower-triangular L and positive pivots D with M = L D L^dagger."""
    L = [[ComplexRational(1 if i == j else 0) for j in range(dim)] for i in range(dim)]
    D = [Fraction(0)] * dim
    for j in range(dim):
        pivot = matrix[j][j]
        for k in range(j):
            pivot = pivot - L[j][k] * L[j][k].conjugate() * D[k]
        if pivot.im or pivot.re <= 0:
            raise PreconditionError("the (1,1) part is not positive definite")
        D[j] = pivot.re
        for i in range(j + 1, dim):
            acc = matrix[i][j]
            for k in range(j):
                acc = acc - L[i][k] * L[j][k].conjugate() * D[k]
            L[i][j] = acc / pivot
    return L, D


def _diagonalizing_change(matrix: list, dim: int):
    """B with B^dagger M B = Id, or None when M is already the identity."""
    if all(matrix[i][j] == (1 if i == j else 0) for i in range(dim) for j in range(dim)):
        return None
    L, D = _ldl(matrix, dim)
    roots = []
    for pivot in D:
        root = _sqrt_fraction(pivot)
        if root is None:
            raise PreconditionError(
                f"quadratic pivot {pivot} is not a perfect rational square; "
                "the (1,1) part cannot be diagonalized exactly")
        roots.append(root)
    # invert the unit upper-triangular L^dagger by back substitution
    U = [[L[j][i].conjugate() for j in range(dim)] for i in range(dim)]
    X = [[ComplexRational(1 if i == j else 0) for j in range(dim)] for i in range(dim)]
    for j in range(dim):
        for i in range(j - 1, -1, -1):
            acc = ComplexRational()
            for k in range(i + 1, j + 1):
                acc = acc + U[i][k] * X[k][j]
            X[i][j] = -acc
    return [[X[i][j] * (Fraction(1) / roots[j]) for j in range(dim)]
            for i in range(dim)]


def _holo_slice(series: WickSeries, degree: int) -> WickSeries:
    terms = {}
    for (k2, I, J), c in series.terms.items():
        if k2 == 0 and not any(J) and sum(I) == degree:
            terms[(k2, I, J)] = c
    return WickSeries(series.dim, series.trunc, terms)


def k_normalize(raw: PotentialJets):
    """Normal-form coordinates and frame at the marked point.

    Returns ``(normalized, coord_change, frame_change)``: the normalized
    potential (volume-log jets attached), the holomorphic jet maps expressing
    the original coordinates in the new ones, and the holomorphic frame jet
    G with ``raw o coord_change - G - conj(G) == normalized``.
    """
    if raw.order < 2:
        raise PreconditionError("normalization needs jets at least to order 2")
    dim, order = raw.dim, raw.order
    zero = mi_zero(dim)
    current = raw.varphi_series()
    coords = [WickSeries.monomial(dim, order, 1, 0, _unit(dim, i), zero)
              for i in range(dim)]
    frame = WickSeries.zero(dim, order)

    def substitute_all(subs):
        nonlocal current, frame, coords
        current = _substitute(current, subs)
        frame = _substitute(frame, subs)
        coords = [_substitute(c, subs) for c in coords]

    for d in range(order + 1):
        g = _holo_slice(current, d)
        if d == 0:
            g = g.scale(Fraction(1, 2))
        if g:
            current = current - g - g.conjugate()
            frame = frame + g
        if d == 2:
            change = _diagonalizing_change(_one_one_matrix(current, dim), dim)
            if change is not None:
                subs = [WickSeries(dim, order,
                                   {(0, _unit(dim, j), zero): change[i][j]
                                    for j in range(dim)})
                        for i in range(dim)]
                substitute_all(subs)
            after = _one_one_matrix(current, dim)
            if any(after[i][j] != (1 if i == j else 0)
                   for i in range(dim) for j in range(dim)):
                raise SolveError("quadratic diagonalization failed")
        elif d >= 3:
            hs = []
            for j in range(dim):
                ej = _unit(dim, j)
                terms = {}
                for (k2, I, J), c in current.terms.items():
                    if k2 == 0 and J == ej and sum(I) == d - 1:
                        terms[(0, I, zero)] = -c
                hs.append(WickSeries(dim, order, terms))
            if any(hs):
                subs = [coords_unit + h for coords_unit, h in
                        zip((WickSeries.monomial(dim, order, 1, 0, _unit(dim, i), zero)
                             for i in range(dim)), hs)]
                substitute_all(subs)

    jets = _series_to_jets(current)
    psi = _series_to_jets(_volume_log_series(current))
    normalized = PotentialJets(dim, order, jets, psi=psi, normalized=True)
    coord_change = tuple(_series_to_holo_map(c) for c in coords)
    frame_change = _series_to_holo_map(frame)
    return normalized, coord_change, frame_change


def apply_normalization(raw: PotentialJets, coord_change, frame_change) -> PotentialJets:
    """Replay a coordinate/frame change on raw jets (round-trip check)."""
    dim, order = raw.dim, raw.order
    subs = [_holo_map_to_series(m, dim, order, "coordinate change")
            for m in coord_change]
    if len(subs) != dim:
        raise PreconditionError("need one coordinate jet map per variable")
    g = _holo_map_to_series(frame_change, dim, order, "frame change")
    result = _substitute(raw.varphi_series(), subs) - g - g.conjugate()
    jets = _series_to_jets(result)
    if _is_normal_form(jets, dim):
        psi = _series_to_jets(_volume_log_series(result))
        return PotentialJets(dim, order, jets, psi=psi, normalized=True)
    return PotentialJets(dim, order, jets)


# ---------------------------------------------------------------------------
# volume-log jets and derived data


def _volume_log_series(varphi: WickSeries) -> WickSeries:
    dim = varphi.dim
    r2 = max(varphi.trunc - 2, 0)
    zero = mi_zero(dim)
    metric = []
    for i in range(dim):
        row = []
        for j in range(dim):
            terms = {}
            for (k2, I, J), c in varphi.terms.items():
                if I[i] and J[j]:
                    key = (0, mi_sub(I, _unit(dim, i)), mi_sub(J, _unit(dim, j)))
                    if sum(key[1]) + sum(key[2]) <= r2:
                        terms[key] = c * (I[i] * J[j])
            row.append(WickSeries(dim, r2, terms))
        metric.append(row)
    det = WickSeries.zero(dim, r2)
    for perm in permutations(range(dim)):
        prod = WickSeries.unit(dim, r2)
        for i in range(dim):
            prod = prod * metric[i][perm[i]]
        inversions = sum(1 for a in range(dim) for b in range(a + 1, dim)
                         if perm[a] > perm[b])
        det = det + (-prod if inversions % 2 else prod)
    constant = det.coefficient(0, zero, zero)
    if not constant:
        raise PreconditionError("the metric is degenerate at the marked point")
    if constant != 1:
        raise PreconditionError(
            "volume-log jets need unit metric determinant at the point; "
            "normalize the potential first")
    x = det - WickSeries.unit(dim, r2)
    out = WickSeries.zero(dim, r2)
    power = WickSeries.unit(dim, r2)
    for k in range(1, r2 + 1):
        power = power * x
        if not power:
            break
        out = out + power.scale(Fraction((-1) ** (k + 1), k))
    return out


def volume_log_jets(p: PotentialJets) -> dict:
    """Jets of the log-determinant of the metric, zero for the flat potential."""
    return _series_to_jets(_volume_log_series(p.varphi_series()))


def weight_series(p: PotentialJets, trunc: int) -> WeightSeries:
    """Assemble the integration weight of a normalized potential.

    The body is ``|y|^2 - varphi + h * psi`` transcribed to the Wick algebra:
    the quadratic part cancels against the Gaussian reference, the remaining
    potential jets enter with a minus sign, and the volume-log jets enter at
    one h-power up.
    """
    if not p.normalized:
        raise PreconditionError("weight_series needs a normalized potential")
    if p.order < trunc:
        raise PreconditionError(
            f"potential order {p.order} is below the requested trunc {trunc}")
    psi = p.psi if p.psi is not None else volume_log_jets(p)
    terms = {}
    for (I, J), c in p.varphi.items():
        if sum(I) == 1 and sum(J) == 1:
            continue
        if sum(I) + sum(J) <= trunc:
            terms[(0, I, J)] = -c
    for (I, J), c in psi.items():
        if 2 + sum(I) + sum(J) <= trunc:
            terms[(2, I, J)] = c
    weight = WeightSeries(WickSeries(p.dim, trunc, terms))
    if not (weight.is_real and weight.toeplitz_admissible and weight.refined):
        raise SolveError("normalized potential produced an inadmissible weight")
    return weight


def function_to_wick(f: FunctionJets) -> WickSeries:
    """Transcribe function jets into the Wick algebra, coefficient by coefficient."""
    return WickSeries(f.dim, f.order, f.terms, f.lower_bound)


def _index_pair(I):
    spots = [i for i, v in enumerate(I) if v]
    if len(spots) == 1:
        return (spots[0], spots[0]), 1
    return (spots[0], spots[1]), 2


def curvature(p: PotentialJets) -> CurvatureTensor:
    """Read the quartic (2,2) jets of a normalized potential as a tensor."""
    if not p.normalized:
        raise PreconditionError("curvature needs a normalized potential")
    if p.order < 4:
        raise PreconditionError("curvature needs jets at least to order 4")
    entries = {}
    for (I, J), c in p.varphi.items():
        if sum(I) != 2 or sum(J) != 2:
            continue
        (i, k), mult_i = _index_pair(I)
        (j, l), mult_j = _index_pair(J)
        value = c / (mult_i * mult_j)
        for a, b in ((i, k), (k, i)):
            for u, v in ((j, l), (l, j)):
                entries[(a, u, b, v)] = value
    return CurvatureTensor(p.dim, entries)


# ---------------------------------------------------------------------------
# built-in potentials


def flat_potential(dim: int, order: int) -> PotentialJets:
    """The flat potential |z|^2; its volume-log jets vanish identically."""
    if order < 2:
        raise PreconditionError("the flat potential needs order >= 2")
    varphi = {(_unit(dim, i), _unit(dim, i)): 1 for i in range(dim)}
    return PotentialJets(dim, order, varphi, psi={}, normalized=True)


def fubini_study_potential(dim: int, order: int) -> PotentialJets:
    """Jets of log(1 + |z|^2); already in normal form."""
    if order < 2:
        raise PreconditionError("the Fubini-Study potential needs order >= 2")
    t = WickSeries(dim, order, {(0, _unit(dim, i), _unit(dim, i)): 1
                                for i in range(dim)})
    acc = WickSeries.zero(dim, order)
    power = WickSeries.unit(dim, order)
    for k in range(1, order // 2 + 1):
        power = power * t
        if not power:
            break
        acc = acc + power.scale(Fraction((-1) ** (k + 1), k))
    jets = _series_to_jets(acc)
    base = PotentialJets(dim, order, jets, normalized=True)
    return base.with_psi(volume_log_jets(base))


def _random_fraction(rng: _random.Random, lo: int = -4, hi: int = 4,
                     max_den: int = 3) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, max_den))


def _random_coefficient(rng: _random.Random) -> ComplexRational:
    while True:
        c = ComplexRational(_random_fraction(rng),
                            _random_fraction(rng) if rng.random() < 0.6 else 0)
        if c:
            return c


def random_real_analytic_potential(seed: int, dim: int, order: int,
                                   n_terms: int = 6) -> PotentialJets:
    """A random raw potential whose normalization succeeds in exact arithmetic.

    The (1,1) block is built as L diag(r^2) L^dagger with unit-triangular L
    and nonzero rational r, so the diagonalization pivots are perfect
    squares.  Constant, linear, purely holomorphic and mixed higher jets are
    thrown in and symmetrized to keep the potential real.
    """
    if order < 2:
        raise PreconditionError("random potentials need order >= 2")
    rng = _random.Random(seed)
    varphi: dict = {}

    def add(I, J, c):
        key = (tuple(I), tuple(J))
        varphi[key] = varphi.get(key, ComplexRational()) + ComplexRational.coerce(c)

    lower = [[ComplexRational(1 if i == j else 0) for j in range(dim)]
             for i in range(dim)]
    for i in range(dim):
        for j in range(i):
            if rng.random() < 0.7:
                lower[i][j] = ComplexRational(_random_fraction(rng, -2, 2, 2),
                                              _random_fraction(rng, -2, 2, 2))
    roots = [Fraction(rng.randint(1, 3), rng.randint(1, 2)) for _ in range(dim)]
    for i in range(dim):
        for j in range(dim):
            acc = ComplexRational()
            for k in range(dim):
                acc = acc + lower[i][k] * lower[j][k].conjugate() * (roots[k] ** 2)
            if acc:
                add(_unit(dim, j), _unit(dim, i), acc)

    add(mi_zero(dim), mi_zero(dim), _random_fraction(rng))
    for i in range(dim):
        if rng.random() < 0.8:
            c = _random_coefficient(rng)
            add(_unit(dim, i), mi_zero(dim), c)
            add(mi_zero(dim), _unit(dim, i), c.conjugate())

    half = ComplexRational(Fraction(1, 2))
    for _ in range(n_terms):
        for _attempt in range(40):
            I = tuple(rng.randint(0, 3) for _ in range(dim))
            J = tuple(rng.randint(0, 3) for _ in range(dim))
            total = sum(I) + sum(J)
            if total < 2 or total > order or (sum(I) == 1 and sum(J) == 1):
                continue
            c = _random_coefficient(rng) * half
            add(I, J, c)
            add(J, I, c.conjugate())
            break

    return PotentialJets(dim, order, varphi)


# ---------------------------------------------------------------------------
# record serialization for jet maps


def jets_to_records(jets: dict) -> list:
    from .coefficients import format_rational

    out = []
    for (I, J) in sorted(jets):
        c = jets[(I, J)]
        out.append({"I": list(I), "J": list(J),
                    "re": format_rational(c.re), "im": format_rational(c.im)})
    return out


def jets_from_records(records, dim: int, max_degree: int, what: str = "jet") -> dict:
    from .coefficients import parse_rational

    jets = {}
    for rec in records:
        I = tuple(int(v) for v in rec["I"])
        J = tuple(int(v) for v in rec["J"])
        coeff = ComplexRational(parse_rational(rec.get("re", "0")),
                                parse_rational(rec.get("im", "0")))
        jets[(I, J)] = jets.get((I, J), ComplexRational()) + coeff
    return _coerce_jets(jets, dim, max_degree, what)
