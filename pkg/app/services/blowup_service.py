"""
Blow-up service: the correlation functions of the blown-up plane divided by
the partition function of the plane, as series in t and Lambda.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Any, Dict, List, Optional, Tuple

from sympy.polys.fields import FracElement

from app.config import get_settings
from app.core import conventions
from app.core.conventions import BLOWUP_T, EPSILON_RAY, LAMBDA
from app.core.exactalg import (
    GradedSeries,
    generator,
    homogenize,
    polynomial_ring,
    rational_field,
    specialize,
    to_qq,
)
from app.core.exceptions import ConventionError, ExpansionError, InvalidInputError, PrecisionError
from app.core.metrics import get_metrics_collector
from app.core.nekrasov import ChartPoint, GaugeParams, LinearWeight, generic_field, zinst_on_chart
from app.models.report_models import ComputationReport, IdentityCheck
from app.services.prepotential_service import am_field, get_prepotential_service
from app.utils.helpers import compare_series, compare_values, flag

logger = logging.getLogger(__name__)
settings = get_settings()

RANK = 2
SLICE_SLOPE = -1
GENERAL_SLOPE = -2


@lru_cache(maxsize=None)
def difference_symbol(n: int) -> Dict[Tuple[int, int], int]:
    """
    Laurent polynomial P_n(X, Y) with

        X^n/((1-X)(1-Y/X)) + Y^n/((1-X/Y)(1-Y)) - 1/((1-X)(1-Y)) = P_n,

    the symbol of the two blow-up charts minus the plane.
    """
    fld = rational_field(("X", "Y"))
    X, Y = fld.gens
    value = X ** n / ((1 - X) * (1 - Y / X)) + Y ** n / ((1 - X / Y) * (1 - Y)) - 1 / ((1 - X) * (1 - Y))
    denom_terms = value.denom.terms()
    if len(denom_terms) != 1:
        raise ConventionError(f"difference symbol for shift {n} is not a Laurent polynomial: {value}")
    (dx, dy), dc = denom_terms[0]
    result = {}
    for (i, j), c in value.numer.terms():
        q = Fraction(int(c.numerator), int(c.denominator)) / Fraction(int(dc.numerator), int(dc.denominator))
        if q.denominator != 1:
            raise ConventionError(f"difference symbol for shift {n} has a non-integral coefficient {q}")
        result[(i - dx, j - dy)] = int(q)
    return result


def todd_series(t_order: int) -> GradedSeries:
    """sum_n c_n t^(n-2) = 1/((1 - e^(-eps1 t))(1 - e^(-eps2 t))) over QQ(e1, e2)."""
    fld = rational_field(("e1", "e2"))
    e1, e2 = fld.gens
    factors = []
    for eps in (e1, e2):
        # (1 - e^(-eps t)) / (eps t) = sum_k (-1)^k (eps t)^k / (k+1)!
        factors.append(GradedSeries(BLOWUP_T, {
            k: eps ** k * to_qq(Fraction((-1) ** k, factorial(k + 1))) for k in range(t_order + 3)
        }, t_order + 3))
    product = factors[0] * factors[1]
    return (product.inverse() * (1 / (e1 * e2))).shift(-2)


@dataclass(frozen=True)
class SymbolTerm:
    """One bare exponential of the difference symbol: the factor (weight/Lambda)^exponent."""

    weight: LinearWeight
    exponent: int
    kind: str


@dataclass(frozen=True)
class PertSymbol:
    """
    The perturbative difference factor of one lattice vector k = (k1, -k1):
    prod (weight/Lambda)^exponent * exp(t * shift).
    """

    k1: Fraction
    k: int
    terms: Tuple[SymbolTerm, ...]
    shift: Any

    @property
    def valuation(self) -> int:
        return -sum(term.exponent for term in self.terms)

    def rational_factor(self) -> FracElement:
        """The product of the weights as a rational function of (eps1, eps2, a, m)."""
        fld = generic_field()
        value = fld.one
        for term in self.terms:
            value *= fld(term.weight.to_polynomial(fld.ring)) ** term.exponent
        return value

    def factor_on_ray(self, chart: ChartPoint, depth: int) -> GradedSeries:
        numer = GradedSeries(EPSILON_RAY, {0: chart.ring.one})
        denom = GradedSeries(EPSILON_RAY, {0: chart.ring.one})
        for term in self.terms:
            linear = chart.linear_series(term.weight)
            if term.exponent > 0:
                numer = numer * linear ** term.exponent
            else:
                denom = denom * linear ** (-term.exponent)
        return (numer * denom.inverse(precision=depth)).truncate(depth)


def _chart_g(x: Any, e: Any, f: Any) -> Any:
    """d gamma_{e,f}(x; Lambda) / d log Lambda."""
    return x * x / (e * f * 2) + (e + f) * x / (e * f * 2) + (e * e + f * f + e * f * 3) / (e * f * 12)


def pert_symbol(k1: Fraction, k: int) -> PertSymbol:
    """
    Symbol calculus for the lattice vector (k1, -k1) and c1 = kC.

    Raises:
        ConventionError: the symbol or the Lambda-shift fails to reduce
    """
    k1 = Fraction(k1)
    if (k1 + Fraction(k, RANK)).denominator != 1:
        raise ConventionError(f"k1 = {k1} violates k_alpha = -k/r mod Z for k = {k}")
    signs = conventions.COULOMB_SIGNS
    lattice = (k1, -k1)
    half = conventions.MATTER_HALF_SHIFT
    terms: List[SymbolTerm] = []

    # vector multiplet: ordered roots (alpha, beta), x = a_alpha - a_beta
    roots = []
    for alpha, beta in ((0, 1), (1, 0)):
        a_coeff = signs[alpha] - signs[beta]
        n = lattice[alpha] - lattice[beta]
        if n.denominator != 1:
            raise ConventionError(f"non-integral root shift {n}")
        roots.append((a_coeff, int(n)))
        for (i, j), c in difference_symbol(-int(n)).items():
            terms.append(SymbolTerm(LinearWeight(a=a_coeff, e1=-i, e2=-j), c, "vector"))

    # matter: y_alpha = a_alpha + m - (eps1 + eps2)/2, shifted by k_alpha + k/r
    matters = []
    for alpha in (0, 1):
        n = lattice[alpha] + Fraction(k, RANK)
        if n.denominator != 1:
            raise ConventionError(f"non-integral matter shift {n}")
        matters.append((signs[alpha], int(n)))
        for (i, j), c in difference_symbol(-int(n)).items():
            terms.append(SymbolTerm(LinearWeight(a=signs[alpha], m=1, e1=half - i, e2=half - j), -c, "matter"))

    # Lambda -> Lambda e^(t eps_i / gamma) on both charts
    fld = generic_field()
    e1, e2, a, m = (generator(fld, name) for name in conventions.GENERIC_NAMES)
    charts = ((e1, e2 - e1, e1), (e1 - e2, e2, e2))
    total = fld.zero
    for e, f, eps in charts:
        s_chart = fld.zero
        for a_coeff, n in roots:
            s_chart -= _chart_g(a * a_coeff + eps * n, e, f)
        for sign, n in matters:
            s_chart += _chart_g(a * sign + m + (e1 + e2) * to_qq(half) + eps * n, e, f)
        total += eps * s_chart
    total = total / 3
    if not total.denom.is_ground:
        raise ConventionError(f"Lambda-shift of k1 = {k1} is not polynomial: {total}")
    shift = total.numer.quo_ground(total.denom.LC)
    return PertSymbol(k1=k1, k=k, terms=tuple(terms), shift=shift)


def lattice_points(k: int, bound: int) -> List[Fraction]:
    """k1 in Z - k/2 with |k1| <= bound, in increasing order."""
    offset = Fraction(-k, RANK) % 1
    start = -bound - 1
    points = []
    value = Fraction(start) + offset
    while value <= bound:
        if abs(value) <= bound:
            points.append(value)
        value += 1
    return points


def _poly_on_ray(poly, slope: int, ring) -> GradedSeries:
    """A polynomial in (e1, e2, a, m) at e1 = h, e2 = slope * h, a = 1."""
    m = ring.gens[0]
    terms: Dict[int, Any] = {}
    for (p, q, _, r), c in poly.terms():
        value = m ** r * (c * to_qq(slope) ** q)
        terms[p + q] = terms[p + q] + value if p + q in terms else value
    return GradedSeries(EPSILON_RAY, terms)


def _t_exp(exponent: GradedSeries, ring, t_precision: int, depth: int) -> GradedSeries:
    """exp(t * exponent(h)) as a t-series of Lambda^0 series of h-series."""
    coefficients = {}
    power = GradedSeries(EPSILON_RAY, {0: ring.one})
    for j in range(t_precision):
        if j:
            power = (power * exponent).truncate(depth)
        coefficients[j] = GradedSeries(LAMBDA, {0: (power / factorial(j)).truncate(depth)})
    return GradedSeries(BLOWUP_T, coefficients, t_precision)


def _chart_t_series(g: GaugeParams, chart: ChartPoint, max_n: int, depth: int,
                    t_precision: int, step: Fraction) -> GradedSeries:
    """sum_n Lambda^(gamma n) Z_n(chart) e^(t h n step) as a t-series of Lambda-series."""
    z = zinst_on_chart(g, chart, max_n, depth)
    ring = chart.ring
    coefficients = {}
    for j in range(t_precision):
        layer = {}
        for index, zn in z.terms.items():
            n = index // g.gamma
            weight = (Fraction(n) * step) ** j / factorial(j)
            if weight:
                layer[index] = (zn * GradedSeries(EPSILON_RAY, {j: ring(to_qq(weight))})).truncate(depth)
        coefficients[j] = GradedSeries(LAMBDA, layer, z.precision)
    return GradedSeries(BLOWUP_T, coefficients, t_precision)


@dataclass(frozen=True)
class BlowupRatio:
    """The ratio as a t-series of Lambda-series over QQ(a, m), after eps -> 0."""

    k: int
    series: GradedSeries
    lattice: Tuple[Fraction, ...]
    valuations: Dict[str, int]
    next_shell_valuation: int
    lambda_precision: int
    slope: int


class BlowupService:
    """Service for the blow-up formula."""

    def __init__(self):
        self.prepotential = get_prepotential_service()
        self._ratios: Dict[Tuple[int, int, int, int], BlowupRatio] = {}

    def pert_difference_factor(self, k1: Fraction, k: int, t_order: int,
                               slope: int = SLICE_SLOPE, depth: int = 1) -> GradedSeries:
        """
        The perturbative difference factor of one lattice vector on a ray, as a
        t-series of Lambda-series of h-series (a = 1, coefficients in QQ[m]).
        """
        symbol = pert_symbol(k1, k)
        ring = polynomial_ring(("m",))
        chart = ChartPoint(e1=1, e2=slope, ring=ring, m0=ring.gens[0])
        factor = symbol.factor_on_ray(chart, depth)
        exponent = _poly_on_ray(symbol.shift, slope, ring)
        series = _t_exp(exponent.truncate(depth), ring, t_order + 1, depth)
        return series * GradedSeries(LAMBDA, {symbol.valuation: factor})

    def epsilon_limit(self, s: GradedSeries) -> GradedSeries:
        """
        eps -> 0 of every coefficient: h-series lose their h^0 term after a
        check that no pole survives; rational functions of (e1, e2, a, m) are
        restricted to e2 = -e1 and then to e1 = 0.
        """
        def limit(c):
            if isinstance(c, GradedSeries):
                if c.variable != EPSILON_RAY:
                    return self.epsilon_limit(c)
                poles = [k for k in c.terms if k < 0]
                if poles:
                    raise ExpansionError(f"residual pole h^{min(poles)} at eps = 0")
                return c.coefficient(0)
            if isinstance(c, FracElement):
                e1 = generator(c.field, "e1")
                on_slice = specialize(c, "e2", -e1)
                if not on_slice.denom.compose(e1.numer, 0):
                    raise ExpansionError(f"residual pole at eps = 0 in {c}")
                return specialize(on_slice, "e1", 0)
            return c

        return s.map_coefficients(limit)

    def blowup_ratio(self, k: int, t_order: Optional[int] = None, lambda_order: Optional[int] = None,
                     slice: bool = True) -> BlowupRatio:
        """
        Z-hat_{c1 = kC} / Z after eps -> 0, as a t-series of Lambda-series.

        Args:
            k: First Chern class coefficient, 0 or 1
            t_order: Highest power of t
            lambda_order: Highest instanton number; Lambda powers up to gamma * lambda_order
            slice: Approach eps = 0 along eps2 = -eps1; otherwise along eps2 = -2 eps1

        Returns:
            BlowupRatio with the series over QQ(a, m)
        """
        if k not in (0, 1):
            raise InvalidInputError("c1 must be 0 or C")
        t_order = t_order or settings.default_t_order
        lambda_order = lambda_order or settings.default_lambda_order
        if t_order > settings.max_t_order or lambda_order > settings.max_instanton_number:
            raise InvalidInputError("requested orders exceed the configured bounds")
        slope = SLICE_SLOPE if slice else GENERAL_SLOPE
        key = (k, t_order, lambda_order, slope)
        if key in self._ratios:
            return self._ratios[key]
        g = GaugeParams(flavours=1)
        precision = g.gamma * lambda_order + 1
        max_n = lambda_order
        depth = 2 * max_n + 1
        t_precision = t_order + 1
        try:
            with get_metrics_collector().timed(f"blowup_ratio_c1_{k}"):
                points = [p for p in lattice_points(k, settings.blowup_lattice_bound)]
                symbols = {p: pert_symbol(p, k) for p in points}
                used = [p for p in points if symbols[p].valuation < precision]
                outer = [p for p in lattice_points(k, settings.blowup_lattice_bound + 1) if p not in symbols]
                next_valuation = min(pert_symbol(p, k).valuation for p in outer)
                if next_valuation < precision:
                    raise PrecisionError(
                        f"lattice bound {settings.blowup_lattice_bound} too small for Lambda^{precision - 1}"
                    )
                ring = polynomial_ring(("m",))
                m = ring.gens[0]
                plane = ChartPoint(e1=1, e2=slope, ring=ring, m0=m)
                z_inverse = zinst_on_chart(g, plane, max_n, depth).inverse()

                def term(k1: Fraction) -> GradedSeries:
                    symbol = symbols[k1]
                    mshift = Fraction(k, RANK) - Fraction(1, 2)
                    chart1 = ChartPoint(e1=1, e2=slope - 1, ring=ring, m0=m, a1=-k1, m1=mshift)
                    chart2 = ChartPoint(e1=1 - slope, e2=slope, ring=ring, m0=m, a1=-slope * k1,
                                        m1=mshift * slope)
                    prefactor = _poly_on_ray(symbol.shift, slope, ring) + GradedSeries(EPSILON_RAY, {
                        0: m * to_qq(conventions.BLOWUP_MASS_SIGN * (Fraction(RANK, 2) - k)) / g.gamma,
                        1: ring(to_qq((Fraction(RANK, 12) * (2 * RANK + g.flavours - 2)
                                       + Fraction(g.flavours, 2) * Fraction(k * k, RANK)) * (1 + slope)
                                      / g.gamma)),
                    })
                    base = _t_exp(prefactor.truncate(depth), ring, t_precision, depth)
                    first = _chart_t_series(g, chart1, max_n, depth, t_precision, Fraction(1))
                    second = _chart_t_series(g, chart2, max_n, depth, t_precision, Fraction(slope))
                    weight = GradedSeries(LAMBDA, {symbol.valuation: symbol.factor_on_ray(plane, depth)})
                    scale = (weight * z_inverse).truncate(precision)
                    return (base * first * second * scale).map_coefficients(lambda c: c.truncate(precision))

                if settings.worker_count > 1:
                    with ThreadPoolExecutor(max_workers=settings.worker_count) as pool:
                        pieces = list(pool.map(term, used))
                else:
                    pieces = [term(p) for p in used]
                total = pieces[0]
                for piece in pieces[1:]:
                    total = total + piece
                limit = self.epsilon_limit(total)
                fld = am_field()
                series = GradedSeries(BLOWUP_T, {
                    j: GradedSeries(LAMBDA, {
                        index: homogenize(ring(value), fld, j - index, "a")
                        for index, value in layer.terms.items()
                    }, precision)
                    for j, layer in limit.terms.items()
                }, t_precision)
                result = BlowupRatio(
                    k=k,
                    series=series,
                    lattice=tuple(used),
                    valuations={str(p): symbols[p].valuation for p in points},
                    next_shell_valuation=next_valuation,
                    lambda_precision=precision,
                    slope=slope,
                )
                self._ratios[key] = result
                logger.info(f"Blow-up ratio c1={k}C through t^{t_order}, Lambda^{precision - 1} "
                            f"({len(used)} lattice points)")
                return result
        except Exception as e:
            logger.error(f"Error computing blow-up ratio for c1={k}C: {str(e)}")
            raise

    def coefficient_targets(self, lambda_order: int) -> Dict[int, GradedSeries]:
        """The t^1, t^3, t^5, t^7 coefficients of the c1 = C ratio in terms of u."""
        e = self.prepotential.expansion(lambda_order)
        u = self.prepotential.u_series(e)
        fld = am_field()
        m = generator(fld, "m")
        lam3 = GradedSeries(LAMBDA, {3: fld.one})
        return {
            1: GradedSeries(LAMBDA, {1: -fld.one}),
            3: (-u / 6).shift(1),
            5: (-(u * u + lam3 * m * 2) / 120).shift(1),
            7: (-(u ** 3 + u * lam3 * m * 6 + lam3 * lam3 * 6) / 5040).shift(1),
        }

    def checks(self, t_order: Optional[int] = None, lambda_order: Optional[int] = None,
               slice: bool = True) -> List[IdentityCheck]:
        t_order = t_order or settings.default_t_order
        lambda_order = lambda_order or settings.default_lambda_order
        fld = am_field()
        zero = GradedSeries(LAMBDA, {})
        vanishing = self.blowup_ratio(0, t_order, lambda_order, slice)
        correlation = self.blowup_ratio(1, t_order, lambda_order, slice)
        checks = []
        for j in range(min(3, t_order + 1)):
            expected = GradedSeries(LAMBDA, {0: fld.one}) if j == 0 else zero
            checks.append(compare_series(
                "eq:vanish", f"t^{j} coefficient of Z-hat_(c1=0)/Z is {'1' if j == 0 else '0'}",
                vanishing.series.coefficient(j) or zero, expected, {"t_power": j}))
        checks.append(compare_series(
            "eq:vanish2", "t^0 coefficient of Z-hat_(c1=C)/Z vanishes",
            correlation.series.coefficient(0) or zero, zero))
        for power, target in self.coefficient_targets(lambda_order).items():
            if power > t_order:
                continue
            checks.append(compare_series(
                "eq:coeff", f"t^{power} coefficient of the c1 = C ratio",
                correlation.series.coefficient(power) or zero, target,
                {"t_power": power, "lambda_precision": correlation.lambda_precision}))
        for ratio in (vanishing, correlation):
            checks.append(flag(
                "lattice", f"next k1 shell for c1 = {ratio.k}C starts beyond the Lambda window",
                ratio.next_shell_valuation >= ratio.lambda_precision,
                {"next_shell_valuation": ratio.next_shell_valuation, "lattice": [str(p) for p in ratio.lattice]}))
        return checks

    def symbol_checks(self, t_order: int = 10) -> List[IdentityCheck]:
        """The Todd generating identity and the k = (1, -1) difference factor by hand."""
        fld = rational_field(("e1", "e2"))
        e1, e2 = fld.gens
        todd = todd_series(t_order)
        left = GradedSeries(BLOWUP_T, {
            k: ((-1) ** (k + 1)) * (e1 ** k + e2 ** k - (e1 + e2) ** k) * to_qq(Fraction(1, factorial(k)))
            if k else fld.zero for k in range(t_order + 3)
        }, t_order + 3)
        checks = [compare_series(
            "eq:pert_expand", "(1 - e^(-eps1 t))(1 - e^(-eps2 t)) sum c_n t^(n-2) = 1",
            (left * todd).truncate(t_order + 1), GradedSeries(BLOWUP_T, {0: fld.one}, t_order + 1))]
        gfld = generic_field()
        g1, g2, a, m = (generator(gfld, name) for name in conventions.GENERIC_NAMES)
        symbol = pert_symbol(Fraction(1), 0)
        hand = (a + m - (g1 + g2) / 2) / ((-a * 2 + g1 + g2) * (a * 2) * (a * 2 - g1) * (a * 2 - g2))
        checks.append(compare_values(
            "eq:blow-up1", "difference factor of k = (1, -1), c1 = 0 equals the telescoped product",
            symbol.rational_factor(), hand, {"valuation": symbol.valuation}))
        checks.append(flag(
            "eq:blow-up1", "difference factor of k = (1, -1), c1 = 0 carries Lambda^3",
            symbol.valuation == 3))
        return checks

    def report(self, k: int, t_order: Optional[int] = None, lambda_order: Optional[int] = None,
               slice: bool = True) -> ComputationReport:
        t_order = t_order or settings.default_t_order
        lambda_order = lambda_order or settings.default_lambda_order
        ratio = self.blowup_ratio(k, t_order, lambda_order, slice)
        checks = self.checks(t_order, lambda_order, slice) + self.symbol_checks()
        return ComputationReport(
            command="blowup-ratio",
            parameters={"c1": k, "t_order": t_order, "lambda_order": lambda_order, "slice": slice},
            checks=checks,
            results={
                "ratio": ratio.series.to_json(),
                "lattice": [str(p) for p in ratio.lattice],
                "valuations": ratio.valuations,
            },
        )


# Global service instance
_blowup_service = None


def get_blowup_service() -> BlowupService:
    """Get or create blow-up service instance."""
    global _blowup_service
    if _blowup_service is None:
        _blowup_service = BlowupService()
    return _blowup_service
