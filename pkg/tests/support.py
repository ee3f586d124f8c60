"""Shared helpers for the test suite: random inputs and independent oracles.

The oracles here deliberately avoid the package's own algorithms: star
products and module actions are recomputed through sympy's symbolic
differentiation, so a kernel bug cannot cancel against itself.
"""

from __future__ import annotations

import random
from fractions import Fraction

import sympy as sp

from wickjet.coefficients import ComplexRational
from wickjet.series import WickSeries, iter_multi_indices, mi_zero

# ---------------------------------------------------------------------------
# random generators


def random_fraction(rng: random.Random, small: bool = True) -> Fraction:
    num = rng.randint(-6, 6)
    den = rng.randint(1, 4 if small else 9)
    return Fraction(num, den)


def random_coefficient(rng: random.Random, allow_complex: bool = True) -> ComplexRational:
    while True:
        re = random_fraction(rng)
        im = random_fraction(rng) if (allow_complex and rng.random() < 0.5) else Fraction(0)
        if re or im:
            return ComplexRational(re, im)


def random_multi_index(rng: random.Random, dim: int, max_abs: int) -> tuple:
    total = rng.randint(0, max_abs)
    index = [0] * dim
    for _ in range(total):
        index[rng.randrange(dim)] += 1
    return tuple(index)


def random_series(rng: random.Random, dim: int, trunc: int, n_terms: int = 4,
                  min_degree: int = 0, allow_complex: bool = True,
                  even_k2_only: bool = True, k2_min: int = 0) -> WickSeries:
    """A sparse random series whose terms all have degree within the window."""
    terms = {}
    for _ in range(n_terms):
        for _attempt in range(60):
            I = random_multi_index(rng, dim, trunc)
            J = random_multi_index(rng, dim, trunc)
            room_low = min_degree - sum(I) - sum(J)
            room_high = trunc - sum(I) - sum(J)
            k2_low = max(k2_min, room_low)
            if k2_low > room_high:
                continue
            k2 = rng.randint(k2_low, room_high)
            if even_k2_only and k2 % 2:
                k2 += 1 if k2 + 1 <= room_high else -1
                if k2 < k2_low or k2 % 2:
                    continue
            terms[(k2, I, J)] = random_coefficient(rng, allow_complex)
            break
    return WickSeries(dim, trunc, terms, lower_bound=min(min_degree, 0))


def random_monomial(rng: random.Random, dim: int, trunc: int,
                    allow_complex: bool = True) -> WickSeries:
    return random_series(rng, dim, trunc, n_terms=1, allow_complex=allow_complex)


def random_holomorphic(rng: random.Random, dim: int, trunc: int,
                       n_terms: int = 3) -> WickSeries:
    """Random series in the y generators and h only (J = 0)."""
    terms = {}
    for _ in range(n_terms):
        I = random_multi_index(rng, dim, trunc)
        k2 = 2 * rng.randint(0, max(0, (trunc - sum(I)) // 2))
        terms[(k2, I, mi_zero(dim))] = random_coefficient(rng)
    return WickSeries(dim, trunc, terms)


def random_weight_body(rng: random.Random, dim: int, trunc: int, n_terms: int = 3,
                       max_degree: int = 5, two_sided: bool = True,
                       real: bool = True, refined: bool = False,
                       allow_hbar: bool = True) -> WickSeries:
    """Random weight-series body: real, degrees in [3, max_degree].

    Every generated monomial contains at least one yb (and, with
    ``two_sided``, at least one y), matching what geometric weights look
    like; reality is enforced by symmetrizing with the conjugate.
    """
    terms = {}
    for _ in range(n_terms):
        for _attempt in range(80):
            I = random_multi_index(rng, dim, max_degree)
            J = random_multi_index(rng, dim, max_degree)
            if not any(J):
                continue
            if two_sided and not any(I):
                continue
            if refined and (sum(I) == 1 or sum(J) == 1):
                continue
            base = sum(I) + sum(J)
            k2_choices = [0]
            if allow_hbar:
                k2_choices.append(2)
            k2 = rng.choice(k2_choices)
            deg = k2 + base
            if not (3 <= deg <= max_degree):
                continue
            terms[(k2, I, J)] = random_coefficient(rng)
            break
    body = WickSeries(dim, trunc, terms)
    if real:
        body = (body + body.conjugate()).scale(Fraction(1, 2))
    return body


# ---------------------------------------------------------------------------
# sympy-based oracles (independent route)


def _sympy_symbols(dim: int):
    ys = sp.symbols(f"y0:{dim}")
    bs = sp.symbols(f"b0:{dim}")
    h = sp.Symbol("hsym")
    return ys, bs, h


def series_to_sympy(f: WickSeries):
    """Plain, even-k2 series -> sympy expression. Raises on sqrt(h) terms."""
    ys, bs, h = _sympy_symbols(f.dim)
    expr = sp.Integer(0)
    for (k2, I, J), coeff in f.terms.items():
        if k2 % 2 or k2 < 0:
            raise ValueError("sympy oracle handles plain integer h-powers only")
        term = sp.Rational(coeff.re.numerator, coeff.re.denominator) \
            + sp.I * sp.Rational(coeff.im.numerator, coeff.im.denominator)
        term *= h ** (k2 // 2)
        for i in range(f.dim):
            term *= ys[i] ** I[i] * bs[i] ** J[i]
        expr += term
    return expr


def sympy_to_series(expr, dim: int, trunc: int) -> WickSeries:
    ys, bs, h = _sympy_symbols(dim)
    expr = sp.expand(expr)
    terms = {}
    addends = expr.as_ordered_terms() if expr != 0 else []
    for addend in addends:
        powers = addend.as_powers_dict()
        k = int(powers.get(h, 0))
        I = tuple(int(powers.get(ys[i], 0)) for i in range(dim))
        J = tuple(int(powers.get(bs[i], 0)) for i in range(dim))
        coeff_expr = sp.simplify(addend / (h ** k
                                           * sp.prod([ys[i] ** I[i] for i in range(dim)])
                                           * sp.prod([bs[i] ** J[i] for i in range(dim)])))
        re_part, im_part = coeff_expr.as_real_imag()
        coeff = ComplexRational(
            Fraction(int(sp.nsimplify(re_part).p), int(sp.nsimplify(re_part).q)),
            Fraction(int(sp.nsimplify(im_part).p), int(sp.nsimplify(im_part).q)),
        )
        key = (2 * k, I, J)
        if 2 * k + sum(I) + sum(J) > trunc:
            continue
        prev = terms.get(key)
        terms[key] = coeff if prev is None else prev + coeff
    return WickSeries(dim, trunc, terms)


def oracle_star(f: WickSeries, g: WickSeries) -> WickSeries:
    """Star product recomputed via symbolic differentiation (sympy route)."""
    dim, trunc = f.dim, f.trunc
    ys, bs, h = _sympy_symbols(dim)
    F = series_to_sympy(f)
    G = series_to_sympy(g)
    expr = sp.Integer(0)
    for alpha in iter_multi_indices(dim, trunc):
        dF = F
        dG = G
        for i in range(dim):
            if alpha[i]:
                dF = sp.diff(dF, ys[i], alpha[i])
                dG = sp.diff(dG, bs[i], alpha[i])
        if dF == 0 or dG == 0:
            continue
        fact = 1
        for a in alpha:
            fact *= sp.factorial(a)
        expr += (-h) ** sum(alpha) / fact * dF * dG
    return sympy_to_series(expr, dim, trunc)


def oracle_fock_act(f: WickSeries, s: WickSeries) -> WickSeries:
    """Module action recomputed symbolically: multiply by y^I, then (h d_y)^J."""
    dim, trunc = f.dim, f.trunc
    ys, bs, h = _sympy_symbols(dim)
    S = series_to_sympy(s)
    expr = sp.Integer(0)
    for (k2, I, J), coeff in f.terms.items():
        if k2 % 2 or k2 < 0:
            raise ValueError("oracle handles plain integer h-powers only")
        c = sp.Rational(coeff.re.numerator, coeff.re.denominator) \
            + sp.I * sp.Rational(coeff.im.numerator, coeff.im.denominator)
        acted = S
        for i in range(dim):
            acted *= ys[i] ** I[i]
        for i in range(dim):
            for _ in range(J[i]):
                acted = h * sp.diff(acted, ys[i])
        expr += c * h ** (k2 // 2) * acted
    return sympy_to_series(expr, dim, trunc)
