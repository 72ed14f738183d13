"""
Instanton partition function of rank-two gauge theory with N_f in {0, 1}
fundamental matters, as a sum over torus fixed points.

Two evaluation paths share the same fixed-point weights:

* the generic path returns coefficients in QQ(e1, e2, a, m);
* the chart path restricts to a ray eps1 = e1*h, eps2 = e2*h with
  a = a0 + a1*h and m = m0 + m1*h and returns truncated h-series whose
  coefficients live in a caller supplied polynomial ring.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Tuple

from sympy.polys.fields import FracElement
from sympy.polys.rings import PolyElement

from app.core import conventions
from app.core.conventions import EPSILON_RAY, GENERIC_NAMES, LAMBDA
from app.core.exactalg import GradedSeries, generator, rational_field, to_qq
from app.core.exceptions import ConventionError, InvalidInputError
from app.core.partitions import YoungPair, arm_leg, enumerate_pairs

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GaugeParams:
    """Rank two with N_f fundamental matters; gamma = 2r - N_f."""

    flavours: int = 1
    rank: int = 2

    def __post_init__(self):
        if self.rank != 2:
            raise InvalidInputError("only rank two is supported")
        if self.flavours not in (0, 1):
            raise InvalidInputError("N_f must be 0 or 1")

    @property
    def gamma(self) -> int:
        return 2 * self.rank - self.flavours


@dataclass(frozen=True)
class LinearWeight:
    """a*c_a + eps1*c_e1 + eps2*c_e2 + m*c_m + const."""

    a: Fraction = Fraction(0)
    e1: Fraction = Fraction(0)
    e2: Fraction = Fraction(0)
    m: Fraction = Fraction(0)
    const: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("a", "e1", "e2", "m", "const"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    @property
    def is_pure_epsilon(self) -> bool:
        return not (self.a or self.m or self.const)

    def to_polynomial(self, ring) -> PolyElement:
        e1, e2, a, m = (generator(ring, n) for n in GENERIC_NAMES)
        return (
            a * to_qq(self.a) + e1 * to_qq(self.e1) + e2 * to_qq(self.e2)
            + m * to_qq(self.m) + ring(to_qq(self.const))
        )


def generic_field():
    return rational_field(GENERIC_NAMES)


@lru_cache(maxsize=None)
def tangent_weights(pair: YoungPair) -> Tuple[LinearWeight, ...]:
    """The 4n torus weights of the tangent space at a fixed point."""
    signs = conventions.COULOMB_SIGNS
    weights = []
    for alpha in (1, 2):
        for beta in (1, 2):
            y_alpha, y_beta = pair[alpha], pair[beta]
            da = signs[beta - 1] - signs[alpha - 1]
            for box in y_alpha.boxes():
                arm, leg = arm_leg(y_alpha, y_beta, box)
                weights.append(LinearWeight(a=da, e1=arm + 1, e2=-leg))
            for box in y_beta.boxes():
                arm, leg = arm_leg(y_beta, y_alpha, box)
                weights.append(LinearWeight(a=da, e1=-arm, e2=leg + 1))
    return tuple(weights)


@lru_cache(maxsize=None)
def matter_weights(pair: YoungPair, flavours: int) -> Tuple[LinearWeight, ...]:
    """One weight per box for the fundamental matter; none for N_f = 0."""
    if flavours == 0:
        return ()
    signs = conventions.COULOMB_SIGNS
    half = conventions.MATTER_HALF_SHIFT
    weights = []
    for alpha in (1, 2):
        for i, j in pair[alpha].boxes():
            weights.append(LinearWeight(
                a=signs[alpha - 1],
                m=1,
                e1=half + conventions.MATTER_COLUMN_STEP * (j - 1),
                e2=half + conventions.MATTER_ROW_STEP * (i - 1),
            ))
    return tuple(weights)


def tangent_euler(pair: YoungPair, g: GaugeParams) -> FracElement:
    fld = generic_field()
    product = fld.ring.one
    for w in tangent_weights(pair):
        product *= w.to_polynomial(fld.ring)
    return fld(product)


def matter_euler(pair: YoungPair, g: GaugeParams) -> PolyElement:
    ring = generic_field().ring
    product = ring.one
    for w in matter_weights(pair, g.flavours):
        product *= w.to_polynomial(ring)
    return product


def _insertion(n: int, power: int, ring) -> PolyElement:
    e1, e2, a, _ = (generator(ring, name) for name in GENERIC_NAMES)
    return (a ** 2 - n * e1 * e2) ** power


def fixed_point_term(pair: YoungPair, g: GaugeParams, insertion_power: int = 0) -> FracElement:
    fld = generic_field()
    numer = matter_euler(pair, g)
    if insertion_power:
        numer *= _insertion(pair.size, insertion_power, fld.ring)
    return fld(numer) / tangent_euler(pair, g)


def _instanton_coefficient(args: Tuple[int, GaugeParams, int]) -> FracElement:
    n, g, power = args
    total = generic_field().zero
    for pair in enumerate_pairs(n):
        total += fixed_point_term(pair, g, power)
    return total


def zinst_ch2_insertion(g: GaugeParams, power: int, max_n: int, workers: int = 1) -> GradedSeries:
    """
    sum_n Lambda^(gamma n) sum_{|Y|=n} (a^2 - n eps1 eps2)^power Eu(matter)/Eu(tangent).
    """
    if max_n < 0 or power < 0:
        raise InvalidInputError("instanton number and insertion power must be non-negative")
    jobs = [(n, g, power) for n in range(max_n + 1)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_instanton_coefficient, jobs))
    else:
        values = [_instanton_coefficient(job) for job in jobs]
    terms = {g.gamma * n: value for n, value in enumerate(values)}
    logger.debug(f"Z^inst computed through instanton number {max_n} (N_f={g.flavours}, power={power})")
    return GradedSeries(LAMBDA, terms, g.gamma * (max_n + 1))


def zinst(g: GaugeParams, max_n: int, workers: int = 1) -> GradedSeries:
    return zinst_ch2_insertion(g, 0, max_n, workers)


# ---------------------------------------------------------------------------
# Restriction to a ray in the epsilon plane
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChartPoint:
    """
    eps1 = e1*h, eps2 = e2*h, a = a0 + a1*h, m = m0 + m1*h.

    ``m0`` is an element of ``ring``; a0 must be nonzero so that every
    non-diagonal tangent weight is invertible at h = 0.
    """

    e1: Fraction
    e2: Fraction
    ring: Any = field(compare=False)
    m0: Any = field(compare=False)
    a0: Fraction = Fraction(1)
    a1: Fraction = Fraction(0)
    m1: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("e1", "e2", "a0", "a1", "m1"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if not self.a0:
            raise ConventionError("chart needs a nonzero Coulomb parameter at h = 0")

    def slope(self, w: LinearWeight) -> Fraction:
        return w.a * self.a1 + w.m * self.m1 + w.e1 * self.e1 + w.e2 * self.e2

    def linear_series(self, w: LinearWeight) -> GradedSeries:
        """The weight as an exact polynomial in h over ``ring``."""
        constant = self.ring(to_qq(w.a * self.a0 + w.const))
        if w.m:
            constant = constant + self.m0 * to_qq(w.m)
        return GradedSeries(EPSILON_RAY, {0: constant, 1: self.ring(to_qq(self.slope(w)))})


def _chart_term(pair: YoungPair, g: GaugeParams, chart: ChartPoint, depth: int,
                insertion_power: int) -> GradedSeries:
    ring = chart.ring
    pure_count, pure = 0, Fraction(1)
    rest = GradedSeries(EPSILON_RAY, {0: to_qq(1)})
    for w in tangent_weights(pair):
        if w.is_pure_epsilon:
            slope = chart.slope(w)
            if not slope:
                raise ConventionError(f"tangent weight {w} vanishes on the ray ({chart.e1}, {chart.e2})")
            pure_count += 1
            pure *= slope
        else:
            rest = rest * GradedSeries(
                EPSILON_RAY, {0: to_qq(w.a * chart.a0), 1: to_qq(chart.slope(w))}
            )
    if pure_count != 2 * pair.size:
        raise ConventionError(f"fixed point {pair} has {pure_count} pure weights, expected {2 * pair.size}")
    numer = GradedSeries(EPSILON_RAY, {0: ring.one})
    for w in matter_weights(pair, g.flavours):
        numer = numer * chart.linear_series(w)
    if insertion_power:
        n = pair.size
        insertion = GradedSeries(EPSILON_RAY, {
            0: ring(to_qq(chart.a0 ** 2)),
            1: ring(to_qq(2 * chart.a0 * chart.a1)),
            2: ring(to_qq(chart.a1 ** 2 - n * chart.e1 * chart.e2)),
        })
        numer = numer * insertion ** insertion_power
    term = (numer * rest.inverse(precision=depth)).shift(-pure_count) / to_qq(pure)
    return term.truncate(depth - pure_count)


def chart_coefficients(g: GaugeParams, chart: ChartPoint, max_n: int, depth: int,
                       insertion_power: int = 0) -> Dict[int, GradedSeries]:
    """
    Z_n restricted to the ray, for n = 0..max_n, as h-series known to
    absolute order depth - 2n.
    """
    ring = chart.ring
    coefficients: Dict[int, GradedSeries] = {}
    for n in range(max_n + 1):
        total = GradedSeries(EPSILON_RAY, {}, depth - 2 * n)
        for pair in enumerate_pairs(n):
            total = total + _chart_term(pair, g, chart, depth, insertion_power)
        if n == 0 and not insertion_power:
            total = GradedSeries(EPSILON_RAY, {0: ring.one})
        coefficients[n] = total
    return coefficients


def zinst_on_chart(g: GaugeParams, chart: ChartPoint, max_n: int, depth: int,
                   insertion_power: int = 0) -> GradedSeries:
    """Z^inst on the ray as a Lambda-series of h-series."""
    coefficients = chart_coefficients(g, chart, max_n, depth, insertion_power)
    return GradedSeries(
        LAMBDA, {g.gamma * n: c for n, c in coefficients.items()}, g.gamma * (max_n + 1)
    )

