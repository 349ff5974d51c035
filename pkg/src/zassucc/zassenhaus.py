"""Zassenhaus coefficients C_n: the general Casas-Murua-Nadinic recursion,
the no-mixed-adjoint closed form, series summation, and the Duhamel-integral
cross-check.

All operations are generic over AlgebraElement, FockOperator and plain
ndarrays; the recursion never assumes the no-mixed-adjoint property.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import sparse

from . import oracle
from .algebra import AlgebraElement
from .fock import FockOperator


def _comm(x, y):
    if isinstance(x, (AlgebraElement, FockOperator)):
        return x.commutator(y)
    return x @ y - y @ x


def _norm(x):
    if isinstance(x, (AlgebraElement, FockOperator)):
        return x.norm()
    if sparse.issparse(x):
        return sparse.linalg.norm(x, "fro")
    return float(np.linalg.norm(x, "fro"))


def _scale(x, c):
    if isinstance(x, AlgebraElement):
        return x * c
    return float(c) * x


def _is_exact(x) -> bool:
    return isinstance(x, AlgebraElement) and all(
        isinstance(c, (int, Fraction))
        for c in list(x.a.values()) + list(x.b.values())
    )


@dataclass
class ZassenhausSeries:
    """terms[n-1] holds C_n, n = 1 .. max_order."""

    terms: list
    method: str

    def order(self) -> int:
        return len(self.terms)


def closed_form(x, y, max_order: int) -> ZassenhausSeries:
    """C_1 = y, C_n = (-1)^(n-1)/n! ad^(n-1)_x y for n >= 2.

    Valid only when (x, y) satisfy the no-mixed-adjoint property; garbage in
    otherwise.
    """
    exact = _is_exact(x) and _is_exact(y)
    terms = [y]
    ad = y
    for n in range(2, max_order + 1):
        ad = _comm(x, ad)
        coeff = Fraction((-1) ** (n - 1), math.factorial(n)) if exact \
            else (-1.0) ** (n - 1) / math.factorial(n)
        terms.append(_scale(ad, coeff))
    return ZassenhausSeries(terms=terms, method="closed_form")


def casas_recursion(x, y, max_order: int) -> ZassenhausSeries:
    """General recursion for the C_n, no no-mixed-adjoint shortcut:

        f_{1,n} = sum_{j=1..n} (-1)^n / (j! (n-j)!) ad^{n-j}_y ad^j_x y
        f_{m,n} = sum_{j=0..[n/m]-1} (-1)^j / j! ad^j_{C_m} f_{m-1, n-mj}
        C_{n+1} = f_{1,n} / (n+1)            for n <= 3
        C_{n+1} = f_{[n/2],n} / (n+1)        for n >= 4
    """
    if max_order < 2:
        raise ValueError("max_order must be >= 2")
    exact = _is_exact(x) and _is_exact(y)

    def frac(num, den):
        return Fraction(num, den) if exact else num / den

    # ad^j_x y for all needed j, then mixed ad^i_y on top
    adx = [y]
    for _ in range(max_order):
        adx.append(_comm(x, adx[-1]))

    def f1(n):
        out = None
        for j in range(1, n + 1):
            term = adx[j]
            for _ in range(n - j):
                term = _comm(y, term)
            term = _scale(term, frac((-1) ** n, math.factorial(j) * math.factorial(n - j)))
            out = term if out is None else out + term
        return out

    terms = [y]
    f_cache: dict = {}

    def f(m, n):
        if m == 1:
            key = (1, n)
            if key not in f_cache:
                f_cache[key] = f1(n)
            return f_cache[key]
        key = (m, n)
        if key not in f_cache:
            out = None
            for j in range(n // m):
                term = f(m - 1, n - m * j)
                cm = terms[m - 1]  # C_m, available because m <= [n/2] < n
                for _ in range(j):
                    term = _comm(cm, term)
                term = _scale(term, frac((-1) ** j, math.factorial(j)))
                out = term if out is None else out + term
            f_cache[key] = out
        return f_cache[key]

    for n in range(1, max_order):
        m = 1 if n <= 3 else n // 2
        terms.append(_scale(f(m, n), frac(1, n + 1)))
    return ZassenhausSeries(terms=terms, method="recursion")


class SeriesDivergence(RuntimeError):
    pass


def sum_series(series: ZassenhausSeries, rtol: float = 1e-16):
    """Sum the C_n with divergence detection: five consecutive orders of
    growing term norm abort the summation."""
    total = series.terms[0]
    acc = _norm(total)
    prev = acc
    growth = 0
    for term in series.terms[1:]:
        tn = _norm(term)
        if tn > prev:
            growth += 1
            if growth >= 5:
                raise SeriesDivergence("term norms grew for 5 consecutive orders")
        else:
            growth = 0
        total = total + term
        acc += tn
        prev = tn
        if tn < rtol * acc:
            break
    return total


def gauss_legendre_01(order: int):
    """Gauss-Legendre nodes and weights on [0, 1]."""
    if order < 2:
        raise ValueError("quadrature order must be >= 2")
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return 0.5 * (nodes + 1.0), 0.5 * weights


def duhamel_check(x, y, quad_order: int = 32, max_order: int = 40):
    """Evaluate int_0^1 exp(-t x) y exp(t x) dt by Gauss-Legendre quadrature
    and return (integral, residual against the summed closed-form series)."""
    xm = x.matrix if isinstance(x, FockOperator) else x
    ym = y.matrix if isinstance(y, FockOperator) else y
    if xm.shape != ym.shape:
        raise ValueError("dimension mismatch")
    nodes, weights = gauss_legendre_01(quad_order)
    integral = None
    for t, w in zip(nodes, weights):
        left = oracle.expm(-t * xm)
        right = oracle.expm(t * xm)
        term = w * (left @ ym @ right)
        integral = term if integral is None else integral + term
    series_sum = sum_series(closed_form(xm, ym, max_order))
    residual = _norm(integral - series_sum)
    return integral, float(residual)


def bch_side_check(x, y, max_order: int = 40) -> float:
    """Frobenius residual of exp(x) exp(y') = exp(x + y) with
    y' = sum of the closed-form Zassenhaus series."""
    xm = x.matrix if isinstance(x, FockOperator) else x
    ym = y.to_fock_operator(x.modes).matrix if isinstance(y, AlgebraElement) \
        else (y.matrix if isinstance(y, FockOperator) else y)
    yprime = sum_series(closed_form(xm, ym, max_order))
    lhs = oracle.expm(xm) @ oracle.expm(yprime)
    rhs = oracle.expm(xm + ym)
    return float(_norm(lhs - rhs))


def term_norm_bound_ok(series: ZassenhausSeries, mu_norm: float, m_norm: float) -> bool:
    """Factorial decay bound for block generators:
    ||C_n|| <= ||mu|| * ||M||^(n-1) / n!."""
    for n, term in enumerate(series.terms, start=1):
        bound = mu_norm * m_norm ** (n - 1) / math.factorial(n)
        if _norm(term) > bound * (1.0 + 1e-12) + 1e-300:
            return False
    return True
