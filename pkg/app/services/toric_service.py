"""
Toric bridge on P^2: the product of three local partition functions over
the torus fixed points against the exponential of F0-derivatives.

Every class involved (xi_2 - xi_1, xi - K, alpha) is a multiple of the
hyperplane class H, so each fixed point only needs the restriction of H and
of the point class. Equivariant parameters are put on the ray
eps1 = h, eps2 = RAY_SLOPE * h and the limit eps -> 0 is the h^0 coefficient.

The local Lambda of the partition function is Lambda^(4/3) s^(-1/3)
exp(iota^*(alpha z + p x)/3); the product is computed at s = 1 and the
s-dependence is restored by homogeneity, which is cross-checked at s = 2.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from sympy.polys.rings import PolyElement

from app.config import get_settings
from app.core.conventions import EPSILON_RAY, LAMBDA
from app.core.exactalg import (
    GradedSeries,
    _times_rational,
    generator,
    polynomial_ring,
    rational_field,
    specialize,
    to_fraction,
    to_qq,
)
from app.core.exceptions import ExpansionError
from app.core.metrics import get_metrics_collector
from app.core.nekrasov import ChartPoint, GaugeParams, chart_coefficients
from app.models.report_models import ComputationReport, IdentityCheck
from app.services.prepotential_service import LOG_LAMBDA, EpsilonExpansion, get_prepotential_service
from app.utils.helpers import compare_series, compare_values

logger = logging.getLogger(__name__)
settings = get_settings()

RAY_SLOPE = Fraction(-5, 7)
FORM_VARIABLES = ("x", "z")

Weight = Tuple[int, int]

# chi(P^2), K^2 and K = CANONICAL_DEGREE * H
EULER_NUMBER = 3
K_SQUARED = 9
CANONICAL_DEGREE = -3


def form_ring():
    return polynomial_ring(FORM_VARIABLES)


@dataclass(frozen=True)
class ToricP2Data:
    """
    Fixed points of the two-torus on P^2. Weights and restrictions are
    integer vectors (c1, c2) standing for c1*eps1 + c2*eps2.
    """

    weights: Tuple[Tuple[Weight, Weight], ...] = (
        ((1, 0), (0, 1)),
        ((-1, 0), (-1, 1)),
        ((1, -1), (0, -1)),
    )
    hyperplane: Tuple[Weight, ...] = ((0, 0), (-1, 0), (0, -1))
    point_at: int = 0
    shift: Weight = (0, 0)

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(f"p{i + 1}" for i in range(len(self.weights)))

    def shifted(self, character: Weight) -> "ToricP2Data":
        """The same data with the lift of H moved by a global character."""
        return replace(self, shift=(self.shift[0] + character[0], self.shift[1] + character[1]))

    def moved_point(self, index: int) -> "ToricP2Data":
        return replace(self, point_at=index)

    def hyperplane_at(self, index: int) -> Weight:
        c1, c2 = self.hyperplane[index]
        return c1 + self.shift[0], c2 + self.shift[1]

    @staticmethod
    def on_ray(w: Weight) -> Fraction:
        return w[0] + w[1] * RAY_SLOPE

    def ray_weights(self, index: int) -> Tuple[Fraction, Fraction]:
        wx, wy = self.weights[index]
        return self.on_ray(wx), self.on_ray(wy)

    def ray_point(self, index: int) -> Fraction:
        """iota^*(pt) / h^2: the tangent Euler class at point_at, zero elsewhere."""
        if index != self.point_at:
            return Fraction(0)
        wx, wy = self.ray_weights(index)
        return wx * wy

    def symbolic(self, index: int, fld) -> Dict[str, Any]:
        """Weights and restrictions at a fixed point as elements of QQ(e1, e2)."""
        e1, e2 = generator(fld, "e1"), generator(fld, "e2")

        def linear(w: Weight):
            return e1 * w[0] + e2 * w[1]

        wx, wy = (linear(w) for w in self.weights[index])
        return {
            "wx": wx,
            "wy": wy,
            "H": linear(self.hyperplane_at(index)),
            "pt": wx * wy if index == self.point_at else fld.zero,
        }

    def describe(self) -> Dict[str, Any]:
        return {
            "fixed_points": {
                label: {"weights": [list(w) for w in self.weights[i]], "H": list(self.hyperplane_at(i))}
                for i, label in enumerate(self.labels)
            },
            "point_class_at": self.labels[self.point_at],
            "ray": f"eps1 = h, eps2 = {RAY_SLOPE} h",
        }


def _at_unit(value: Any) -> Fraction:
    """A coefficient over QQ(a, m) evaluated at a = m = 1."""
    if not value:
        return Fraction(0)
    return to_fraction(specialize(specialize(value, "m", 1), "a", 1))


def restore_s(poly: PolyElement, n: int, s: Fraction) -> PolyElement:
    """L_n(x, z) -> s^(-4n) L_n(s^2 x, s z)."""
    result = {}
    for (i, j), c in poly.terms():
        result[(i, j)] = c * to_qq(Fraction(s) ** (2 * i + j - 4 * n))
    return poly.ring.from_dict(result)


class ToricBridgeService:
    """Service for the fixed-point product on P^2."""

    def localization_checks(self, data: ToricP2Data) -> List[IdentityCheck]:
        """
        Sums over the fixed points of restrictions divided by the tangent
        Euler class reproduce integrals over P^2.
        """
        fld = rational_field(("e1", "e2"))
        sums = {"1": fld.zero, "H": fld.zero, "H^2": fld.zero, "pt": fld.zero, "c2": fld.zero, "c1^2-2c2": fld.zero}
        for i in range(len(data.weights)):
            local = data.symbolic(i, fld)
            euler = local["wx"] * local["wy"]
            sums["1"] += 1 / euler
            sums["H"] += local["H"] / euler
            sums["H^2"] += local["H"] ** 2 / euler
            sums["pt"] += local["pt"] / euler
            sums["c2"] += euler / euler
            sums["c1^2-2c2"] += (local["wx"] ** 2 + local["wy"] ** 2) / euler
        expected = {
            "1": 0, "H": 0, "H^2": 1, "pt": 1,
            "c2": EULER_NUMBER, "c1^2-2c2": K_SQUARED - 2 * EULER_NUMBER,
        }
        details = {"shift": list(data.shift), "point_class_at": data.labels[data.point_at]}
        return [
            compare_values("localization", f"sum_i iota^*({name}) / e(T_i) = int_P2 {name}",
                           sums[name], fld(value), details)
            for name, value in expected.items()
        ]

    def _local_log(self, data: ToricP2Data, index: int, max_n: int, d1: int, d2: int,
                   s: Fraction) -> GradedSeries:
        """
        log Z^inst at one fixed point with a = s + d1 iota^*(H)/2,
        m = s + d2 iota^*(H)/2, as a Lambda-series of h-series over QQ[x, z].
        """
        g = GaugeParams(flavours=1)
        ring = form_ring()
        x, z = ring.gens
        wx, wy = data.ray_weights(index)
        eta = data.on_ray(data.hyperplane_at(index))
        point = data.ray_point(index)
        chart = ChartPoint(
            e1=wx, e2=wy, ring=ring, m0=ring(to_qq(s)),
            a0=s, a1=Fraction(d1, 2) * eta, m1=Fraction(d2, 2) * eta,
        )
        depth = 2 * max_n + 1
        coefficients = chart_coefficients(g, chart, max_n, depth)
        terms: Dict[int, Any] = {0: GradedSeries(EPSILON_RAY, {0: ring.one})}
        for n in range(1, max_n + 1):
            insertion = GradedSeries(
                EPSILON_RAY, {1: z * to_qq(n * eta), 2: x * to_qq(n * point)}
            ).exp(precision=depth)
            local = coefficients[n] * insertion
            if s != 1:
                local = local.map_coefficients(lambda c, n=n: _times_rational(c, Fraction(1) / Fraction(s) ** n))
            terms[g.gamma * n] = local
        return GradedSeries(LAMBDA, terms, g.gamma * (max_n + 1)).log()

    def fixed_point_product(self, data: ToricP2Data, max_n: int, d1: int, d2: int,
                            s: Fraction = Fraction(1)) -> GradedSeries:
        """
        lim_{eps -> 0} log of the three-factor product, as a Lambda-series
        over QQ[x, z].

        Raises:
            ExpansionError: a negative power of h survives the sum over fixed points
        """
        jobs = range(len(data.weights))
        if settings.worker_count > 1:
            with ThreadPoolExecutor(max_workers=settings.worker_count) as pool:
                logs = list(pool.map(lambda i: self._local_log(data, i, max_n, d1, d2, s), jobs))
        else:
            logs = [self._local_log(data, i, max_n, d1, d2, s) for i in jobs]
        total = logs[0]
        for other in logs[1:]:
            total = total + other
        ring = form_ring()
        limits: Dict[int, Any] = {}
        for k, layer in total.terms.items():
            polar = {i: c for i, c in layer.terms.items() if i < 0}
            if polar:
                raise ExpansionError(
                    f"fixed-point product keeps h^{min(polar)} at Lambda^{k}: {polar[min(polar)]}"
                )
            limits[k] = ring(layer.coefficient(0))
        return GradedSeries(LAMBDA, limits, total.precision)

    def closed_form(self, e: EpsilonExpansion, d1: int, d2: int) -> GradedSeries:
        """
        (1/3) F_L x + F_aa d1^2/8 + F_am d1 d2/4 + F_mm d2^2/8
        + (F_aL d1 + F_mL d2) z/6 + F_LL z^2/18 + chi A + (K^2 - 2 chi)/3 B
        at (a, m) = (1, 1), with (xi_2 - xi_1, xi - K, alpha) = (d1, d2, 1) H.
        """
        svc = get_prepotential_service()
        ring = form_ring()
        x, z = ring.gens
        f_l = svc.deriv(e.f0, LOG_LAMBDA)
        second = {
            pair: svc.deriv(svc.deriv(e.f0, pair[0]), pair[1])
            for pair in (("a", "a"), ("a", "m"), ("m", "m"), ("a", LOG_LAMBDA), ("m", LOG_LAMBDA),
                         (LOG_LAMBDA, LOG_LAMBDA))
        }
        terms: Dict[int, Any] = {}
        for n in range(1, e.max_n + 1):
            k = e.gamma * n

            def value(series: GradedSeries) -> Fraction:
                return _at_unit(series.coefficient(k))

            constant = (
                value(second[("a", "a")]) * Fraction(d1 * d1, 8)
                + value(second[("a", "m")]) * Fraction(d1 * d2, 4)
                + value(second[("m", "m")]) * Fraction(d2 * d2, 8)
                + value(e.a) * EULER_NUMBER
                + value(e.b) * Fraction(K_SQUARED - 2 * EULER_NUMBER, 3)
            )
            linear_z = (value(second[("a", LOG_LAMBDA)]) * d1 + value(second[("m", LOG_LAMBDA)]) * d2) / 6
            terms[k] = (
                x * to_qq(value(f_l) / 3)
                + z * to_qq(linear_z)
                + z ** 2 * to_qq(value(second[(LOG_LAMBDA, LOG_LAMBDA)]) / 18)
                + ring(to_qq(constant))
            )
        return GradedSeries(LAMBDA, terms, e.precision)

    def product_formula_checks(self, max_n: int, xi1_degree: int = 0, xi_degree: int = 1,
                               data: Optional[ToricP2Data] = None) -> Tuple[List[IdentityCheck], Dict[str, Any]]:
        """
        The fixed-point product against the closed form, under two lifts of H,
        a second choice of point-class lift and at s = 2.

        Args:
            max_n: Highest instanton number
            xi1_degree: xi_1 = xi1_degree * H
            xi_degree: xi = xi_degree * H

        Returns:
            Checks and serialized series
        """
        data = data or ToricP2Data()
        d1 = xi_degree - 2 * xi1_degree
        d2 = xi_degree - CANONICAL_DEGREE
        details = {"xi1_degree": xi1_degree, "xi_degree": xi_degree, "lambda_order": max_n}
        e = get_prepotential_service().expansion(max_n)
        lhs = self.fixed_point_product(data, max_n, d1, d2)
        rhs = self.closed_form(e, d1, d2)
        checks = self.localization_checks(data)
        checks.append(compare_series(
            "thm:partition",
            "lim_{eps->0} log prod_i Z^inst at the fixed points equals the F0-derivative closed form",
            lhs, rhs, details))

        variants = {
            "lift of H shifted by eps1": data.shifted((1, 0)),
            "lift of H shifted by eps1 - 2 eps2": data.shifted((1, -2)),
            "point class lifted at p2": data.moved_point(1),
        }
        for description, variant in variants.items():
            checks.extend(self.localization_checks(variant))
            checks.append(compare_series(
                "lift", f"fixed-point product is unchanged: {description}",
                self.fixed_point_product(variant, max_n, d1, d2), lhs, details))

        s = Fraction(2)
        at_s = self.fixed_point_product(data, max_n, d1, d2, s)
        restored = GradedSeries(
            LAMBDA,
            {k: restore_s(c, k // e.gamma, s) for k, c in lhs.terms.items()},
            lhs.precision,
        )
        checks.append(compare_series(
            "Lambda^(4/3)/s^(1/3)",
            "the product at s = 2 equals s^(-4n) L_n(s^2 x, s z) of the product at s = 1",
            at_s, restored, details))

        results = {
            "toric_data": data.describe(),
            "classes": {"xi2_minus_xi1": f"{d1} H", "xi_minus_K": f"{d2} H", "alpha": "H"},
            "fixed_point_product": lhs.to_json(),
            "closed_form": rhs.to_json(),
            "s_dependence": self._s_table(lhs, e.gamma),
        }
        return checks, results

    @staticmethod
    def _s_table(lhs: GradedSeries, gamma: int) -> List[Dict[str, Any]]:
        """Monomials Lambda^(4n) s^k x^i z^j of the s-restored exponent."""
        rows = []
        for k, poly in lhs.terms.items():
            n = k // gamma
            for (i, j), c in sorted(poly.terms()):
                q = to_fraction(c)
                rows.append({
                    "Lambda": 4 * n, "s": 2 * i + j - 4 * n, "x": i, "z": j,
                    "coefficient": {"num": str(q.numerator), "den": str(q.denominator)},
                })
        return rows

    def report(self, max_n: Optional[int] = None, xi1_degree: int = 0, xi_degree: int = 1) -> ComputationReport:
        max_n = max_n or settings.toric_lambda_order
        try:
            with get_metrics_collector().timed("toric_bridge"):
                checks, results = self.product_formula_checks(max_n, xi1_degree, xi_degree)
                logger.info(f"Toric bridge through instanton number {max_n}: "
                            f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
                return ComputationReport(
                    command="toric-bridge",
                    parameters={"lambda_order": max_n, "xi1_degree": xi1_degree, "xi_degree": xi_degree},
                    checks=checks,
                    results=results,
                )
        except Exception as e:
            logger.error(f"Toric bridge failed (n={max_n}): {str(e)}")
            raise


# Global service instance
_toric_service = None


def get_toric_service() -> ToricBridgeService:
    """Get or create toric bridge service instance."""
    global _toric_service
    if _toric_service is None:
        _toric_service = ToricBridgeService()
    return _toric_service
