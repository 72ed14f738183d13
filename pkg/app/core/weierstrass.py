"""
Weierstrass data of the rank-two, N_f = 1 curve and the sigma function.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Any, Dict, Tuple

from app.core.exactalg import GradedSeries, _times_rational, polynomial_ring, to_qq
from app.core.conventions import BLOWUP_T, LAMBDA

CURVE_NAMES = ("u", "m", "L")


@dataclass(frozen=True)
class WeierstrassData:
    """g2, g3 and the discriminant; polynomials in (u, m, L) with L = Lambda."""

    g2: Any
    g3: Any
    discriminant: Any

    @property
    def ring(self):
        return self.g2.ring


def curve_ring():
    return polynomial_ring(CURVE_NAMES)


def curve_data() -> WeierstrassData:
    """Symbolic curve data; substitute u, m, Lambda with ``evaluate``."""
    ring = curve_ring()
    u, m, L = ring.gens
    g2 = u ** 2 * to_qq(Fraction(4, 3)) - 4 * m * L ** 3
    g3 = -u ** 3 * to_qq(Fraction(8, 27)) + u * m * L ** 3 * to_qq(Fraction(4, 3)) - L ** 6
    disc = -L ** 6 * (16 * u ** 3 - 16 * u ** 2 * m ** 2 - 72 * u * m * L ** 3 + 64 * m ** 3 * L ** 3 + 27 * L ** 6)
    return WeierstrassData(g2=g2, g3=g3, discriminant=disc)


def discriminant_from_invariants(data: WeierstrassData):
    return data.g2 ** 3 - 27 * data.g3 ** 2


def shifted_cubic_matches(data: WeierstrassData) -> bool:
    """
    4x^3 - g2 x - g3 at x -> x + u/3 equals 4x^2(x + u) + 4m L^3 x + L^6.
    """
    ring = polynomial_ring(("x",) + CURVE_NAMES)
    x, u, m, L = ring.gens
    g2 = data.g2.set_ring(ring)
    g3 = data.g3.set_ring(ring)
    shifted = x + u * to_qq(Fraction(1, 3))
    weierstrass = 4 * shifted ** 3 - g2 * shifted - g3
    curve = 4 * x ** 2 * (x + u) + 4 * m * L ** 3 * x + L ** 6
    return weierstrass == curve


def wp_coefficients(g2: Any, g3: Any, count: int) -> Dict[int, Any]:
    """
    Laurent coefficients c_k of wp(t) = t^-2 + sum_{k>=2} c_k t^(2k-2):
    c_2 = g2/20, c_3 = g3/28, c_k = 3/((2k+1)(k-3)) sum_{j=2}^{k-2} c_j c_{k-j}.
    """
    c: Dict[int, Any] = {}
    for k in range(2, count + 1):
        if k == 2:
            c[k] = g2 / 20
        elif k == 3:
            c[k] = g3 / 28
        else:
            acc = 0
            for j in range(2, k - 1):
                acc = acc + c[j] * c[k - j]
            c[k] = _times_rational(acc, Fraction(3, (2 * k + 1) * (k - 3))) if not isinstance(acc, int) else 0
    return c


def sigma_expansion(g2: Any, g3: Any, t_order: int) -> GradedSeries:
    """
    sigma(t) = t exp(-sum_k c_k t^(2k) / ((2k-1) 2k)), from log sigma'' = -wp.
    Coefficients through t^t_order.
    """
    count = max(2, (t_order + 1) // 2)
    c = wp_coefficients(g2, g3, count)
    exponent_terms = {}
    for k, ck in c.items():
        if 2 * k <= t_order:
            exponent_terms[2 * k] = _times_rational(-ck, Fraction(1, (2 * k - 1) * 2 * k)) if not isinstance(ck, int) else 0
    exponent = GradedSeries(BLOWUP_T, exponent_terms, t_order)
    return exponent.exp().shift(1)


@lru_cache(maxsize=None)
def _sigma_table(limit: int) -> Dict[Tuple[int, int], Fraction]:
    """
    a_{m,n} with a_{0,0} = 1 and
    a_{m,n} = 3(m+1) a_{m+1,n-1} + (16/3)(n+1) a_{m-2,n+1}
              - (1/3)(2m+3n-1)(4m+6n-1) a_{m-1,n}.
    """
    table: Dict[Tuple[int, int], Fraction] = {(0, 0): Fraction(1)}

    def get(m: int, n: int) -> Fraction:
        if m < 0 or n < 0:
            return Fraction(0)
        return table.get((m, n), Fraction(0))

    for weight in range(1, limit + 1):
        for n in range(weight + 1):
            m = weight - n
            table[(m, n)] = (
                3 * (m + 1) * get(m + 1, n - 1)
                + Fraction(16, 3) * (n + 1) * get(m - 2, n + 1)
                - Fraction(1, 3) * (2 * m + 3 * n - 1) * (4 * m + 6 * n - 1) * get(m - 1, n)
            )
    return table


def sigma_two_index(g2: Any, g3: Any, t_order: int) -> GradedSeries:
    """sigma(t) = sum a_{m,n} (g2/2)^m (2 g3)^n t^(4m+6n+1) / (4m+6n+1)!."""
    table = _sigma_table(t_order)
    terms: Dict[int, Any] = {}
    for (m, n), value in table.items():
        power = 4 * m + 6 * n + 1
        if power > t_order or not value:
            continue
        term = _times_rational((g2 / 2) ** m * (g3 * 2) ** n, value / factorial(power))
        terms[power] = terms[power] + term if power in terms else term
    return GradedSeries(BLOWUP_T, terms, t_order + 1)


def evaluate_on_series(poly: Any, u: GradedSeries, m: Any) -> GradedSeries:
    """
    Substitute u by a Lambda-series, m by a field element and L by Lambda in
    a polynomial of curve_ring().
    """
    result = GradedSeries(LAMBDA, {}, u.precision)
    for (i, j, k), c in poly.terms():
        result = result + (u ** i * (m ** j * c)).shift(k)
    return result
