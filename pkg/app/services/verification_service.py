"""
Verification service: the Z^inst report behind expand-z and the verify-all
suite that runs every computation against the shipped surface data.
"""
import logging
import random
from fractions import Fraction
from typing import Any, Dict, List, Optional

from sympy.polys.fields import FracElement

from app.config import get_settings
from app.core.conventions import LAMBDA
from app.core.exactalg import GradedSeries, generator, specialize, substitute, to_fraction
from app.core.metrics import get_metrics_collector
from app.core.nekrasov import GaugeParams, generic_field, zinst, zinst_ch2_insertion
from app.models.report_models import ComputationReport, IdentityCheck
from app.models.surface_models import load_surface, shipped_surfaces
from app.services.blowup_service import get_blowup_service
from app.services.mochizuki_service import get_mochizuki_service
from app.services.prepotential_service import get_prepotential_service
from app.services.swcurve_service import get_swcurve_service
from app.services.toric_service import get_toric_service
from app.utils.helpers import compare_series, compare_values, flag

logger = logging.getLogger(__name__)
settings = get_settings()

# surfaces that verify-all expects to violate superconformal simple type
NON_SCST_SURFACES = ("artificial",)


def _map(series: GradedSeries, replacements: Dict[str, Any]) -> GradedSeries:
    return series.map_coefficients(
        lambda c: substitute(c, replacements) if isinstance(c, FracElement) else c
    )


def _total_degrees(value: FracElement) -> Optional[int]:
    """numer degree - denom degree when both are homogeneous, else None."""
    degrees = []
    for poly in (value.numer, value.denom):
        sums = {sum(m) for m in poly.monoms()}
        if len(sums) != 1:
            return None
        degrees.append(sums.pop())
    return degrees[0] - degrees[1]


def _evaluate(value: Any, point: Dict[str, Fraction]) -> Fraction:
    if not isinstance(value, FracElement):
        return Fraction(value)
    for name, q in point.items():
        value = specialize(value, name, value.field(q.numerator) / q.denominator)
    return to_fraction(value)


class VerificationService:
    """Service for the Z^inst symmetries and the full verification suite."""

    def zinst_checks(self, z: GradedSeries, g: GaugeParams, max_n: int, seed: int) -> List[IdentityCheck]:
        """Symmetries, degree bookkeeping and insertion consistency of Z^inst."""
        fld = generic_field()
        e1, e2, a = (generator(fld, name) for name in ("e1", "e2", "a"))
        details = {"flavours": g.flavours, "lambda_order": max_n}
        checks = [compare_values("eq:sum", "Lambda^0 coefficient of Z^inst is 1", z.coefficient(0), fld.one, details)]
        checks.append(compare_series(
            "eps-exchange", "Z^inst is invariant under eps1 <-> eps2",
            _map(z, {"e1": e2, "e2": e1}), z, details))
        checks.append(compare_series(
            "a-reflection", "Z^inst is invariant under a -> -a",
            _map(z, {"a": -a}), z, details))
        checks.append(compare_series(
            "slice", "Z^inst(eps1, -2 eps1) = Z^inst(2 eps1, -eps1)",
            _map(z, {"e2": -2 * e1}), _map(z, {"e1": 2 * e1, "e2": -e1}), details))

        degrees = {n: _total_degrees(z.coefficient(g.gamma * n)) for n in range(1, max_n + 1)}
        checks.append(flag(
            "degree", f"the Lambda^(gamma n) coefficient is homogeneous of degree -{g.gamma} n",
            all(d == -g.gamma * n for n, d in degrees.items()),
            {"degrees": {str(n): d for n, d in degrees.items()}, **details}))

        rng = random.Random(seed)
        # eps1 > 0 > eps2 and |a| well above every eps-combination keep all weights nonzero
        point = {
            "e1": Fraction(rng.randint(1, 9), rng.randint(1, 5)),
            "e2": -Fraction(rng.randint(1, 9), rng.randint(1, 5)),
            "a": Fraction(rng.randint(100, 200), rng.randint(1, 2)),
            "m": Fraction(rng.randint(-97, 97), rng.randint(1, 13)),
        }
        scale = Fraction(rng.randint(2, 11), rng.randint(1, 7))
        scaled = {name: q * scale for name, q in point.items()}
        homogeneous = all(
            _evaluate(z.coefficient(g.gamma * n), scaled)
            == scale ** (-g.gamma * n) * _evaluate(z.coefficient(g.gamma * n), point)
            for n in range(1, max_n + 1)
        )
        checks.append(flag(
            "degree", "Z_n(t p) = t^(-gamma n) Z_n(p) at a seeded random rational point",
            homogeneous, {"seed": seed, "point": {k: str(v) for k, v in point.items()}, "scale": str(scale)}))

        checks.append(compare_series(
            "eq:corr", "the power-0 ch2 insertion reproduces Z^inst",
            zinst_ch2_insertion(g, 0, max_n), z, details))
        inserted = zinst_ch2_insertion(g, 1, min(max_n, 1))
        checks.append(compare_values(
            "eq:corr", "the Lambda^0 term of the power-1 insertion is a^2",
            inserted.coefficient(0), a ** 2, details))
        if g.flavours == 0 and max_n >= 1:
            checks.append(compare_values(
                "eq:sum", "N_f = 0, n = 1 on eps2 = -eps1 equals 1/(2 a^2 eps1^2)",
                specialize(z.coefficient(g.gamma), "e2", -e1), 1 / (a ** 2 * e1 ** 2 * 2), details))
        return checks

    def expand_z_report(self, max_n: Optional[int] = None, flavours: int = 1,
                        seed: Optional[int] = None) -> ComputationReport:
        """
        Z^inst through instanton number max_n with its structural checks.

        Args:
            max_n: Highest instanton number
            flavours: N_f in {0, 1}
            seed: Seed of the random evaluation point

        Returns:
            ComputationReport with the Lambda-series over QQ(eps1, eps2, a, m)
        """
        max_n = max_n or settings.default_lambda_order
        seed = settings.random_seed if seed is None else seed
        try:
            with get_metrics_collector().timed("expand_z"):
                g = GaugeParams(flavours=flavours)
                z = zinst(g, max_n, settings.worker_count)
                return ComputationReport(
                    command="expand-z",
                    parameters={"lambda_order": max_n, "flavours": flavours, "seed": seed},
                    checks=self.zinst_checks(z, g, max_n, seed),
                    results={"variable": LAMBDA, "gamma": g.gamma, "zinst": z.to_json()},
                )
        except Exception as e:
            logger.error(f"Z^inst expansion failed (n={max_n}, N_f={flavours}): {str(e)}")
            raise

    def verify_all(self, lambda_order: Optional[int] = None, t_order: Optional[int] = None,
                   xz_degree: Optional[int] = None, seed: Optional[int] = None) -> ComputationReport:
        """
        Every suite on the default orders and every shipped surface.

        Returns:
            One report whose checks carry the suite they came from
        """
        lambda_order = lambda_order or settings.default_lambda_order
        t_order = t_order or settings.default_t_order
        xz_degree = xz_degree or settings.default_xz_degree
        mochizuki = get_mochizuki_service()
        suites = [
            ("expand-z N_f=1", lambda: self.expand_z_report(min(lambda_order, 3), 1, seed)),
            ("expand-z N_f=0", lambda: self.expand_z_report(min(lambda_order, 3), 0, seed)),
            ("prepotential", lambda: get_prepotential_service().report(lambda_order)),
            ("blowup-ratio c1=0", lambda: get_blowup_service().report(0, t_order, lambda_order)),
            ("blowup-ratio c1=1", lambda: get_blowup_service().report(1, t_order, lambda_order)),
            ("sw-identities", lambda: get_swcurve_service().report(t_order, lambda_order)),
        ]
        surfaces = shipped_surfaces()
        for name in surfaces:
            suites.append((f"mochizuki-residues {name}", lambda name=name: mochizuki.residues_report(name, xz_degree)))
            suites.append((f"witten {name}", lambda name=name: mochizuki.witten_report(name, xz_degree)))
            suites.append((f"scst {name}", lambda name=name: mochizuki.scst_report(name, xz_degree)))
        suites.append(("toric-bridge", lambda: get_toric_service().report(min(lambda_order, settings.toric_lambda_order))))

        checks: List[IdentityCheck] = []
        summary: Dict[str, Any] = {}
        with get_metrics_collector().timed("verify_all"):
            for name, run in suites:
                logger.info(f"verify-all: running {name}")
                report = run()
                for check in report.checks:
                    check.details = {**check.details, "suite": name}
                checks.extend(report.checks)
                summary[name] = {"checks": len(report.checks), "passed": report.passed}
                if name.startswith("scst "):
                    surface = name.split(" ", 1)[1]
                    expected = surface not in NON_SCST_SURFACES
                    checks.append(flag(
                        "eq:scs",
                        f"{surface} is {'' if expected else 'not '}of superconformal simple type",
                        report.results["superconformal"] == expected,
                        {"suite": name, "vacuous": report.results["vacuous"]}))
        failed = [name for name, entry in summary.items() if not entry["passed"]]
        logger.info(f"verify-all finished: {len(summary) - len(failed)}/{len(summary)} suites passed")
        return ComputationReport(
            command="verify-all",
            parameters={"lambda_order": lambda_order, "t_order": t_order, "xz_degree": xz_degree,
                        "surfaces": surfaces},
            checks=checks,
            results={"suites": summary, "failed_suites": failed},
        )


# Global service instance
_verification_service = None


def get_verification_service() -> VerificationService:
    """Get or create verification service instance."""
    global _verification_service
    if _verification_service is None:
        _verification_service = VerificationService()
    return _verification_service
