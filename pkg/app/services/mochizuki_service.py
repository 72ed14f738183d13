"""
Residue calculus of the differential whose residue at phi^4 = 0 computes
Donaldson invariants: construction from surface data, parity symmetrization,
residues at v = phi^4 in {0, 1, 1/3, infinity}, Witten's formula and the
superconformal simple type conditions.

Lambda is set to 1 throughout; every series is homogeneous so it can be
restored from the (x, z) weight.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from sympy.polys.fields import FracElement
from sympy.polys.rings import PolyElement

from app.config import get_settings
from app.core.exactalg import (
    INFINITY,
    GradedSeries,
    Scalar,
    _times_rational,
    generator,
    rational_residues,
    specialize,
    to_fraction,
    to_qq,
)
from app.core.exceptions import ConventionError, InvalidInputError, ParityViolation
from app.core.metrics import get_metrics_collector
from app.core.phiforms import (
    PhiElement,
    RationalForm,
    alpha_ring,
    alpha_weight,
    layer,
    multiply,
    parity_defects,
    phi_ring,
    project_parity,
    rationalize,
    reduce_roots,
    reduce_unit,
    transfer,
    truncate,
    truncated_exp,
    unit_ring,
    v_ring,
    xz_weight,
)
from app.models.report_models import ComputationReport, IdentityCheck
from app.models.surface_models import SurfaceData, load_surface
from app.services.prepotential_service import get_prepotential_service
from app.utils.helpers import compare_series, compare_values, flag

logger = logging.getLogger(__name__)
settings = get_settings()

RESIDUE_POINTS = (Fraction(0), Fraction(1), Fraction(1, 3))
ELL = "ell"
# leading coefficient of phi in Lambda/a: 1/sqrt(2)
PHI_LEADING = Scalar(0, 0, Fraction(1, 2))


def _sign(exponent: int) -> int:
    """(-1)^exponent for any integer exponent."""
    return -1 if exponent % 2 else 1


def _point_label(point: Any) -> str:
    return INFINITY if point == INFINITY else str(point)


def pairing_poly(ring, basis: Sequence[str], coordinates: Sequence[int]) -> PolyElement:
    """(c, alpha) = sum_i c_i (e_i, alpha) in a ring carrying the b_* generators."""
    result = ring.zero
    for name, c in zip(basis, coordinates):
        if c:
            result += generator(ring, f"b_{name}") * c
    return result


def build_differential(surface: SurfaceData, c: Sequence[int], xi: Sequence[int], degree: int) -> PhiElement:
    """
    The differential for one basic class c and one xi, expanded in x and z
    through weight degree:

        -eps (1 - 3 phi^4)/(1 - phi^4) dphi/phi
          exp[-(3 phi^2 + phi^-2) x / 2 - phi^2 (alpha^2) z^2 / 2]
          phi^(-(xi - K)^2 - K^2 - 3 chi_h)
          (phi^-2 (s1 - s2) / sqrt 2)^((xi - K, c))
          exp[phi^-1 (s2 (c, alpha) - s1 (xi - K, alpha)) z / sqrt 2]
          (sqrt 2 s2)^(K^2 - chi_h)

    with eps = (-1)^([(xi, xi + K) - K^2 - (K, c)]/2 + chi_h). Negative powers
    of s1 - s2 use (s1 - s2)(s1 + s2) = 2 phi^4, negative powers of s2 leave
    (1 - 3 phi^4) in the denominator.

    Args:
        surface: Surface data
        c: Basic class coordinates
        xi: Coordinates of xi
        degree: Weighted (x, z)-degree bound, deg x = 2, deg z = 1

    Returns:
        PhiElement holding the numerator and the (1 - v), (1 - 3v) exponents
    """
    basis = tuple(surface.basis)
    ring = phi_ring(basis)
    s1, s2, r2, phi, psi, x, z, a2 = ring.gens[:8]
    half = ring(to_qq(Fraction(1, 2)))
    weight = xz_weight(ring)
    row = surface.pairing_row(c, xi)
    n1 = row["n1"]
    phi_power = -row["xi_minus_k_sq"] - surface.ksq - 3 * surface.chi_h
    tower = surface.ksq - surface.chi_h
    xi_minus_k = [a - k for a, k in zip(xi, surface.canonical)]
    b1 = pairing_poly(ring, basis, c)
    b2 = pairing_poly(ring, basis, xi_minus_k)

    numer = (1 - 3 * phi ** 4) * -_sign(row["sign"])
    numer = numer * (phi ** phi_power if phi_power >= 0 else psi ** -phi_power)
    e_x = truncated_exp(-half * (3 * phi ** 2 + psi ** 2) * x - half * phi ** 2 * a2 * z ** 2,
                        degree, weight, reduce_roots)
    numer = multiply(numer, e_x, degree)
    if n1:
        root_difference = s1 - s2 if n1 > 0 else s1 + s2
        numer = multiply(numer, reduce_roots((half * r2 * psi ** 2 * root_difference) ** abs(n1)), degree)
    e_z = truncated_exp(half * r2 * psi * (s2 * b1 - s1 * b2) * z, degree, weight, reduce_roots)
    numer = multiply(numer, e_z, degree)
    if tower >= 0:
        at_third = 0
        numer = multiply(numer, reduce_roots((r2 * s2) ** tower), degree)
    else:
        at_third = -tower
        numer = multiply(numer, reduce_roots((half * r2 * s2) ** at_third), degree)
    return PhiElement(numer, at_one=1, at_third=at_third)


def parity_project(element: PhiElement, p: int) -> PhiElement:
    """Keep the x^k z^l with 2k + l = p mod 4."""
    return element.project(p)


def symmetrize(surface: SurfaceData, c: Sequence[int], xi: Sequence[int], degree: int,
               flip_s2: bool = False, build: Callable[..., PhiElement] = build_differential) -> PhiElement:
    """B^(p)(c) + (-1)^chi_h B^(p)(-c) with p = dim M_H(y) mod 4."""
    p = surface.dimension_mod4(xi)
    plus = build(surface, c, xi, degree).project(p)
    minus = build(surface, [-v for v in c], xi, degree).project(p)
    if flip_s2:
        plus, minus = plus.flip(), minus.flip()
    return plus + minus.scale(_sign(surface.chi_h))


def symmetrize_rationalize(surface: SurfaceData, c: Sequence[int], xi: Sequence[int],
                           degree: int) -> RationalForm:
    """
    The symmetrized differential as a rational 1-form in v = phi^4.

    Raises:
        ParityViolation: root components or a phi-exponent off 4Z survived
    """
    return rationalize(symmetrize(surface, c, xi, degree), v_ring(tuple(surface.basis)))


def residues(form: RationalForm) -> Dict[Any, PolyElement]:
    """Residues at v = 0, 1, 1/3 and infinity."""
    return rational_residues(form.pair(), "v", RESIDUE_POINTS)


def closed_form_residue_at_one(surface: SurfaceData, c: Sequence[int], xi: Sequence[int],
                               degree: int) -> PolyElement:
    """
    Res_{phi=1} of B^(p)(c) from the values s1 = 0, s2 = sqrt(-2) at phi = 1:

        -(eps/2) (2i)^(K^2 - chi_h) (-i)^((xi - K, c)) exp(-2x - (alpha^2) z^2/2 + i (c, alpha) z)

    projected to p, in QQ[I, x, z, A2, b_*].
    """
    basis = tuple(surface.basis)
    ring = unit_ring(basis)
    unit, x, z, a2 = ring.gens[:4]
    row = surface.pairing_row(c, xi)
    scalar = Scalar(-_sign(row["sign"])) / 2 * Scalar(0, 2) ** (surface.ksq - surface.chi_h) \
        * Scalar(0, -1) ** row["n1"]
    if scalar.r2 or scalar.r3:
        raise ConventionError(f"closed-form residue picked up sqrt(2): {scalar}")
    prefactor = ring(to_qq(scalar.r0)) + ring(to_qq(scalar.r1)) * unit
    exponent = -2 * x - ring(to_qq(Fraction(1, 2))) * a2 * z ** 2 + unit * pairing_poly(ring, basis, c) * z
    series = truncated_exp(exponent, degree, xz_weight(ring), reduce_unit)
    return project_parity(reduce_unit(prefactor * series), surface.dimension_mod4(xi))


def witten_series(surface: SurfaceData, xi: Sequence[int], degree: int) -> PolyElement:
    """
    2^(K^2 - chi_h + 2) (-1)^chi_h exp((alpha^2)/2)
        sum_c SW(c) (-1)^((xi, xi + c)/2) exp((c, alpha))

    through alpha-degree degree.
    """
    basis = tuple(surface.basis)
    ring = alpha_ring(basis)
    weight = alpha_weight(ring)
    a2 = generator(ring, "A2")
    total = ring.zero
    for bc in surface.basic_classes:
        twice = surface.pair(xi, [a + b for a, b in zip(xi, bc.coordinates)])
        total += truncated_exp(pairing_poly(ring, basis, bc.coordinates), degree, weight) \
            * (bc.sw * _sign(twice // 2))
    gaussian = truncated_exp(ring(to_qq(Fraction(1, 2))) * a2, degree, weight)
    scale = Fraction(2) ** (surface.ksq - surface.chi_h + 2) * _sign(surface.chi_h)
    return _times_rational(truncate(gaussian * total, degree, weight), scale)


def sw_series(surface: SurfaceData, degree: int) -> PolyElement:
    """sum_c (-1)^((K, K + c)/2) SW(c) exp((c, alpha)) through alpha-degree degree."""
    basis = tuple(surface.basis)
    ring = alpha_ring(basis)
    weight = alpha_weight(ring)
    total = ring.zero
    for bc in surface.basic_classes:
        twice = surface.pair(surface.canonical, [a + b for a, b in zip(surface.canonical, bc.coordinates)])
        total += truncated_exp(pairing_poly(ring, basis, bc.coordinates), degree, weight) \
            * (bc.sw * _sign(twice // 2))
    return total


@dataclass(frozen=True)
class ClassResidues:
    """Symmetrized differential of one basic class and its four residues."""

    label: str
    symmetrized: PhiElement
    form: RationalForm
    residues: Dict[Any, PolyElement]

    def to_json(self) -> Dict[str, Any]:
        return {
            "class": self.label,
            "residues": {_point_label(p): str(r) for p, r in self.residues.items()},
        }


@dataclass(frozen=True)
class PhiSeries:
    """phi and the contact-term series tau in ell = Lambda/a, at a = m."""

    phi: GradedSeries
    tau: GradedSeries
    lambda_order: int


@dataclass(frozen=True)
class ScstVerdict:
    superconformal: bool
    vacuous: bool
    vanishing_order: Optional[int]
    moments: Dict[int, str]
    checks: List[IdentityCheck]


class MochizukiService:
    """Service for the residue calculus on surface data."""

    def __init__(self):
        self.prepotential = get_prepotential_service()
        self._tables: Dict[Tuple[str, Tuple[int, ...], int], Dict[str, ClassResidues]] = {}
        self._differentials: Dict[Tuple[str, Tuple[int, ...], Tuple[int, ...], int], PhiElement] = {}

    def differential(self, surface: SurfaceData, c: Sequence[int], xi: Sequence[int], degree: int) -> PhiElement:
        key = (surface.name, tuple(c), tuple(xi), degree)
        if key not in self._differentials:
            self._differentials[key] = build_differential(surface, c, xi, degree)
        return self._differentials[key]

    # the phi-variable -----------------------------------------------------

    def _ell_series(self, s: GradedSeries, offset: int) -> GradedSeries:
        """Lambda^(3k) a^(d - 3k) at a = m becomes a^d ell^(4k + offset) with ell = Lambda/a."""
        terms = {}
        for index, coeff in s.terms.items():
            if index % 3:
                raise ConventionError(f"Lambda^{index} is not a multiple of Lambda^3 at a = m")
            if isinstance(coeff, FracElement):
                coeff = specialize(coeff, "a", 1)
            terms[4 * (index // 3) + offset] = Scalar(to_fraction(coeff))
        precision = None if s.precision is None else 4 * ((s.precision + 2) // 3) + offset
        return GradedSeries(ELL, terms, precision)

    def phi_of_a(self, lambda_order: Optional[int] = None) -> PhiSeries:
        """
        phi = sqrt(T)/Lambda after Lambda -> Lambda^(4/3) a^(-1/3), as a series in
        ell = Lambda/a with leading term ell/sqrt(2).

        Raises:
            BranchError: the root hint does not square to the leading coefficient
        """
        lambda_order = lambda_order or settings.default_lambda_order
        e = self.prepotential.expansion(lambda_order)
        tau = self._ell_series(self.prepotential.seed(e).contact, 0)
        phi = tau.sqrt(PHI_LEADING).shift(-1)
        return PhiSeries(phi=phi, tau=tau, lambda_order=lambda_order)

    def phi_checks(self, lambda_order: Optional[int] = None) -> List[IdentityCheck]:
        """Leading term, the algebraic relation to a, its differential and u, P in phi."""
        series = self.phi_of_a(lambda_order)
        phi = series.phi
        phi2 = phi * phi
        phi4 = phi2 * phi2
        sd = self.prepotential.seed(self.prepotential.expansion(series.lambda_order))
        checks = [compare_values(
            "eq:phi", "phi = ell/sqrt(2) + O(ell^2)", phi.coefficient(1), PHI_LEADING)]
        checks.append(compare_series(
            "eq:aT", "Lambda^2/(4a^2) = phi^2 (1 - phi^4)/2",
            GradedSeries(ELL, {2: Scalar(Fraction(1, 4))}), phi2 * (1 - phi4) / 2,
            {"lambda_order": series.lambda_order}))
        checks.append(compare_series(
            "eq:da", "ell dphi/dell (1 - 3 phi^4) = phi (1 - phi^4)",
            phi.log_derivative() * (1 - phi4 * 3), phi * (1 - phi4)))
        checks.append(compare_series(
            "eq:uom", "u/Lambda^2 = (3 phi^2 + phi^-2)/2",
            self._ell_series(sd.u, -2), (phi2 * 3 + phi2.inverse()) / 2))
        checks.append(compare_series(
            "eq:uom", "(pi/omega)^2/Lambda^2 = (3 phi^2 - phi^-2)/2",
            self._ell_series(sd.p, -2), (phi2 * 3 - phi2.inverse()) / 2))
        return checks

    # residues -------------------------------------------------------------

    def residue_table(self, surface: SurfaceData, xi_label: str, degree: int) -> Dict[str, ClassResidues]:
        """
        Symmetrized forms and residues of every basic class for one xi.

        Raises:
            ParityViolation: symmetrization left root components
        """
        xi = surface.xi_class(xi_label)
        key = (surface.name, tuple(xi), degree)
        if key in self._tables:
            return self._tables[key]

        def compute(bc) -> ClassResidues:
            sym = symmetrize(surface, bc.coordinates, xi, degree, build=self.differential)
            form = rationalize(sym, v_ring(tuple(surface.basis)))
            return ClassResidues(label=bc.label, symmetrized=sym, form=form, residues=residues(form))

        try:
            with get_metrics_collector().timed("residue_table"):
                if settings.worker_count > 1:
                    with ThreadPoolExecutor(max_workers=settings.worker_count) as pool:
                        entries = list(pool.map(compute, surface.basic_classes))
                else:
                    entries = [compute(bc) for bc in surface.basic_classes]
                table = {entry.label: entry for entry in entries}
                self._tables[key] = table
                logger.info(f"Residues of {surface.name}, xi = {xi_label} through (x, z)-degree {degree}")
                return table
        except Exception as e:
            logger.error(f"Error computing residues for {surface.name}, xi = {xi_label}: {str(e)}")
            raise

    def sw_weighted(self, surface: SurfaceData, xi_label: str, degree: int, point: Any) -> PolyElement:
        """sum_c SW(c) Res_point(symmetrized form of c)."""
        table = self.residue_table(surface, xi_label, degree)
        total = v_ring(tuple(surface.basis)).zero
        for bc in surface.basic_classes:
            total += table[bc.label].residues[point] * bc.sw
        return total

    def residue_checks(self, surface: SurfaceData, xi_label: str, degree: int) -> List[IdentityCheck]:
        """Parity, branch independence, the residue theorem, the pole at infinity and v = 1 in closed form."""
        xi = surface.xi_class(xi_label)
        p = surface.dimension_mod4(xi)
        rv = v_ring(tuple(surface.basis))
        checks: List[IdentityCheck] = []
        try:
            table = self.residue_table(surface, xi_label, degree)
        except ParityViolation as e:
            return [flag("prop:parity", f"symmetrized differential is rational in phi^4 (xi = {xi_label})",
                         False, {"error": str(e)})]
        weight = xz_weight(rv)
        for bc in surface.basic_classes:
            entry = table[bc.label]
            details = {"xi": xi_label, "class": bc.label, "p": p}
            defects = parity_defects(entry.symmetrized)
            checks.append(flag(
                "prop:parity", "root components vanish and phi-exponents lie in 4Z",
                not defects, dict(details, defects=defects[:3])))
            flipped = symmetrize(surface, bc.coordinates, xi, degree, flip_s2=True, build=self.differential)
            checks.append(compare_values(
                "prop:parity", "s2 -> -s2 leaves the symmetrized differential unchanged",
                entry.symmetrized.numer, flipped.numer, details))
            single = self.differential(surface, bc.coordinates, xi, degree).project(p)
            checks.append(compare_values(
                "prop:parity", "(s1, s2) -> (-s1, -s2) leaves B^(p) unchanged",
                single.numer, single.flip(s1=True, s2=True).numer, details))
            total = rv.zero
            for value in entry.residues.values():
                total += value
            checks.append(compare_values(
                "residue-theorem", "residues at 0, 1, 1/3 and infinity sum to zero", total, rv.zero, details))
            positive = [m for m, _ in entry.residues[INFINITY].terms()
                        if surface.virtual_euler(xi, weight(m)) > 0]
            checks.append(flag(
                "prop:infinity", "no residue at infinity where chi(y) > 0", not positive,
                dict(details, offending=len(positive))))
            checks.append(compare_values(
                "res:1", "residue at v = 1 matches the closed form at s1 = 0, s2 = sqrt(-2)",
                entry.residues[Fraction(1)], self._closed_form_sym(surface, bc.coordinates, xi, degree),
                details))
        return checks

    def _closed_form_sym(self, surface: SurfaceData, c: Sequence[int], xi: Sequence[int],
                         degree: int) -> PolyElement:
        plus = closed_form_residue_at_one(surface, c, xi, degree)
        minus = closed_form_residue_at_one(surface, [-v for v in c], xi, degree)
        total = plus + minus * _sign(surface.chi_h)
        if any(m[0] for m in total.monoms()):
            raise ParityViolation("imaginary part survived in the closed-form residue at v = 1")
        return transfer(total, v_ring(tuple(surface.basis)))

    # Witten's formula -----------------------------------------------------

    def donaldson_from_residue1(self, surface: SurfaceData, xi_label: str,
                                degree: int) -> Tuple[PolyElement, List[IdentityCheck]]:
        """
        D^xi(alpha) = D(exp(alpha)(1 + p/2)) from the residues at phi^4 = 1:
        four points over v = 1, the factor 2 of the integral convention, the
        1/2 of the symmetrization, the orientation sign (-1)^((xi, xi + K)/2)
        removed and the overall sign reversed. Known through alpha-degree
        degree - 2.

        Returns:
            (D^xi in QQ[A2, b_*], KM-simple-type check)
        """
        xi = surface.xi_class(xi_label)
        basis = tuple(surface.basis)
        rv = v_ring(basis)
        ar = alpha_ring(basis)
        total = self.sw_weighted(surface, xi_label, degree, Fraction(1))
        x = generator(rv, "x")
        killed = truncate(total.diff(x).diff(x) - total * 4, degree - 4, xz_weight(rv))
        checks = [compare_values(
            "km-simple-type", "(d/dx)^2 - 4 annihilates the v = 1 contribution",
            killed, rv.zero, {"xi": xi_label, "degree": degree - 4})]
        layers = transfer(layer(total, "x", 0), ar, drop=("z",)) \
            + _times_rational(transfer(layer(total, "x", 1), ar, drop=("z",)), Fraction(1, 2))
        orientation = _sign(surface.pair(xi, [a + k for a, k in zip(xi, surface.canonical)]) // 2)
        donaldson = truncate(layers * (-4 * orientation), degree - 2, alpha_weight(ar))
        return donaldson, checks

    def witten_checks(self, surface: SurfaceData, degree: int) -> Tuple[List[IdentityCheck], Dict[str, Any]]:
        checks: List[IdentityCheck] = []
        results: Dict[str, Any] = {}
        for label, xi in surface.xi.items():
            donaldson, km = self.donaldson_from_residue1(surface, label, degree)
            expected = witten_series(surface, xi, degree - 2)
            checks.extend(km)
            checks.append(compare_values(
                "eq:Witten", f"residue at phi^4 = 1 reproduces Witten's formula (xi = {label})",
                donaldson, expected, {"xi": label, "alpha_degree": degree - 2}))
            results[label] = {"donaldson": str(donaldson), "witten": str(expected)}
        return checks, results

    # superconformal simple type -------------------------------------------

    def scst_check(self, surface: SurfaceData, degree: int) -> ScstVerdict:
        """
        Moment sums sum_c (-1)^((K, K + c)/2) SW(c) (c, alpha)^n for
        0 <= n <= chi_h - K^2 - 4, the order of vanishing of SW(alpha) and its
        parity; for a blow-up, SW of the blow-up against -2 SW sinh.
        """
        basis = tuple(surface.basis)
        ring = alpha_ring(basis)
        weight = alpha_weight(ring)
        top = surface.chi_h - surface.ksq - 4
        vacuous = surface.ksq >= surface.chi_h - 3
        details = {"surface": surface.name, "chi_h": surface.chi_h, "Ksq": surface.ksq}
        moments: Dict[int, str] = {}
        passed = True
        # (c, alpha)^n built by repeated products; sympy refuses 0**0 for c = 0
        powers = [ring.one for _ in surface.basic_classes]
        for n in range(top + 1):
            total = ring.zero
            for index, bc in enumerate(surface.basic_classes):
                twice = surface.pair(surface.canonical, [a + b for a, b in zip(surface.canonical, bc.coordinates)])
                total += powers[index] * (bc.sw * _sign(twice // 2))
                powers[index] = powers[index] * pairing_poly(ring, basis, bc.coordinates)
            moments[n] = str(total)
            passed = passed and not total
        series = sw_series(surface, degree)
        order = min((weight(m) for m in series.monoms()), default=None)
        checks = [flag(
            "eq:scs", "SW moment sums vanish up to chi_h - K^2 - 4" + (" (vacuous)" if vacuous else ""),
            passed, dict(details, top=top, vanishing_order=order))]
        if not vacuous:
            checks.append(flag(
                "eq:scs", "moment vanishing agrees with the order of zero of SW(alpha)",
                passed == (order is None or order >= top + 1), dict(details, vanishing_order=order)))
        mirrored = ring.from_dict({m: c * _sign(sum(m[1:])) for m, c in series.terms()})
        checks.append(compare_values(
            "eq:scs", "SW(-alpha) = (-1)^(chi_h - K^2) SW(alpha)",
            mirrored, series * _sign(surface.chi_h - surface.ksq), details))
        if surface.blown_up:
            base = load_surface(surface.blown_up)
            name = surface.basis[surface.exceptional]
            b_e = generator(ring, f"b_{name}")
            sinh = _times_rational(truncated_exp(b_e, degree, weight) - truncated_exp(-b_e, degree, weight),
                                   Fraction(1, 2))
            expected = truncate(transfer(sw_series(base, degree), ring) * sinh * -2, degree, weight)
            checks.append(compare_values(
                "eq:blowup-sw", f"SW of the blow-up equals -2 SW({base.name}) sinh((E, alpha))",
                series, expected, dict(details, base=base.name, degree=degree)))
        return ScstVerdict(
            superconformal=vacuous or passed,
            vacuous=vacuous,
            vanishing_order=order,
            moments=moments,
            checks=checks,
        )

    def scst_regularity(self, surface: SurfaceData, xi_label: str, degree: int,
                        superconformal: bool) -> IdentityCheck:
        """
        sum_c SW(c) B^(p)(c) has no residue at v = 1/3 for superconformal data;
        data failing the moment conditions is expected to keep one.
        """
        residue = self.sw_weighted(surface, xi_label, degree, Fraction(1, 3))
        vanishes = not residue
        return flag(
            "prop:regular",
            "residue at phi^4 = 1/3 vanishes" if superconformal
            else "residue at phi^4 = 1/3 survives for data that is not superconformal",
            vanishes == superconformal,
            {"xi": xi_label, "residue_zero": vanishes, "superconformal": superconformal,
             "residue": str(residue)},
        )

    # reports --------------------------------------------------------------

    def _degree(self, degree: Optional[int]) -> int:
        degree = degree or settings.default_xz_degree
        if degree > settings.max_xz_degree:
            raise InvalidInputError(f"(x, z)-degree {degree} exceeds the configured bound {settings.max_xz_degree}")
        return degree

    def residues_report(self, surface_ref: str, degree: Optional[int] = None) -> ComputationReport:
        degree = self._degree(degree)
        surface = load_surface(surface_ref)
        try:
            with get_metrics_collector().timed("mochizuki_residues"):
                checks: List[IdentityCheck] = []
                results: Dict[str, Any] = {}
                verdict = self.scst_check(surface, degree)
                for label, xi in surface.xi.items():
                    checks.extend(self.residue_checks(surface, label, degree))
                    checks.append(self.scst_regularity(surface, label, degree, verdict.superconformal))
                    table = self.residue_table(surface, label, degree)
                    results[label] = {
                        "dimension_mod4": surface.dimension_mod4(xi),
                        "classes": [entry.to_json() for entry in table.values()],
                    }
                return ComputationReport(
                    command="mochizuki-residues",
                    parameters={"surface": surface.name, "xz_degree": degree},
                    checks=checks,
                    results=results,
                )
        except Exception as e:
            logger.error(f"Residue report for {surface_ref} failed: {str(e)}")
            raise

    def witten_report(self, surface_ref: str, degree: Optional[int] = None) -> ComputationReport:
        degree = self._degree(degree)
        surface = load_surface(surface_ref)
        checks, results = self.witten_checks(surface, degree)
        return ComputationReport(
            command="witten",
            parameters={"surface": surface.name, "xz_degree": degree},
            checks=checks,
            results=results,
        )

    def scst_report(self, surface_ref: str, degree: Optional[int] = None) -> ComputationReport:
        degree = self._degree(degree)
        surface = load_surface(surface_ref)
        verdict = self.scst_check(surface, degree)
        checks = list(verdict.checks)
        for label in surface.xi:
            checks.append(self.scst_regularity(surface, label, degree, verdict.superconformal))
        return ComputationReport(
            command="scst",
            parameters={"surface": surface.name, "xz_degree": degree},
            checks=checks,
            results={
                "superconformal": verdict.superconformal,
                "vacuous": verdict.vacuous,
                "vanishing_order": verdict.vanishing_order,
                "moments": {str(n): m for n, m in verdict.moments.items()},
                "sw_series": str(sw_series(surface, degree)),
            },
        )


# Global service instance
_mochizuki_service = None


def get_mochizuki_service() -> MochizukiService:
    """Get or create Mochizuki residue service instance."""
    global _mochizuki_service
    if _mochizuki_service is None:
        _mochizuki_service = MochizukiService()
    return _mochizuki_service
