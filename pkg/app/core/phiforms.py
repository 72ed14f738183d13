"""
Algebra of the phi-variable.

Elements live in QQ[s1, s2, r2, phi, psi, x, z, A2, b_*] subject to

    s1^2 = 1 - phi^4,  s2^2 = 1 - 3 phi^4,  r2^2 = 2,  phi psi = 1,

so s1, s2 and r2 stand for sqrt(1 - phi^4), sqrt(1 - 3 phi^4) and sqrt(2).
A2 is (alpha^2) and b_<name> is (e_name, alpha) for a lattice basis vector.
x carries weight 2 and z weight 1; everything is truncated in that weight.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Any, Callable, Dict, Iterable, List, Sequence, Tuple

from sympy.polys.rings import PolyElement

from app.core.exactalg import _times_rational, polynomial_ring
from app.core.exceptions import ComputationError, ParityViolation

logger = logging.getLogger(__name__)

ROOT_NAMES = ("s1", "s2", "r2", "phi", "psi")
FORM_NAMES = ("x", "z", "A2")
S1, S2, R2, PHI, PSI = range(5)

Weight = Callable[[Tuple[int, ...]], int]


def alpha_names(basis: Sequence[str]) -> Tuple[str, ...]:
    return tuple(f"b_{name}" for name in basis)


def phi_ring(basis: Sequence[str]):
    return polynomial_ring(ROOT_NAMES + FORM_NAMES + alpha_names(basis))


def v_ring(basis: Sequence[str]):
    """QQ[v, x, z, A2, b_*] with v = phi^4."""
    return polynomial_ring(("v",) + FORM_NAMES + alpha_names(basis))


def unit_ring(basis: Sequence[str]):
    """QQ[I, x, z, A2, b_*] with I^2 = -1."""
    return polynomial_ring(("I",) + FORM_NAMES + alpha_names(basis))


def alpha_ring(basis: Sequence[str]):
    return polynomial_ring(("A2",) + alpha_names(basis))


def _index(ring, name: str) -> int:
    return [str(s) for s in ring.symbols].index(name)


@lru_cache(maxsize=None)
def xz_weight(ring) -> Weight:
    ix, iz = _index(ring, "x"), _index(ring, "z")
    return lambda monom: 2 * monom[ix] + monom[iz]


@lru_cache(maxsize=None)
def alpha_weight(ring) -> Weight:
    """Degree in alpha: A2 counts twice, each b once."""
    ia = _index(ring, "A2")
    ib = [i for i, s in enumerate(ring.symbols) if str(s).startswith("b_")]
    return lambda monom: 2 * monom[ia] + sum(monom[i] for i in ib)


def truncate(poly: PolyElement, bound: int, weight: Weight) -> PolyElement:
    """Drop monomials of weight above bound."""
    return poly.ring.from_dict({m: c for m, c in poly.terms() if weight(m) <= bound})


def select(poly: PolyElement, keep: Callable[[Tuple[int, ...]], bool]) -> PolyElement:
    return poly.ring.from_dict({m: c for m, c in poly.terms() if keep(m)})


@lru_cache(maxsize=None)
def _root_squares(ring) -> Tuple[PolyElement, PolyElement]:
    phi = ring.gens[PHI]
    return ring.one - phi ** 4, ring.one - 3 * phi ** 4


@lru_cache(maxsize=None)
def _root_factor(q1: int, q2: int) -> Tuple[Tuple[int, int], ...]:
    """(1 - phi^4)^q1 (1 - 3 phi^4)^q2 as (phi-exponent, integer coefficient) pairs."""
    coeffs: Dict[int, int] = {}
    for i in range(q1 + 1):
        for j in range(q2 + 1):
            c = comb(q1, i) * (-1) ** i * comb(q2, j) * (-3) ** j
            coeffs[4 * (i + j)] = coeffs.get(4 * (i + j), 0) + c
    return tuple((k, c) for k, c in sorted(coeffs.items()) if c)


def reduce_roots(poly: PolyElement) -> PolyElement:
    """Normal form: s1, s2, r2 of degree at most one and no phi*psi."""
    result: Dict[Tuple[int, ...], Any] = {}
    for monom, coeff in poly.terms():
        q1, e1 = divmod(monom[S1], 2)
        q2, e2 = divmod(monom[S2], 2)
        qr, er = divmod(monom[R2], 2)
        scale = coeff * 2 ** qr
        for shift, c in _root_factor(q1, q2):
            net = monom[PHI] + shift - monom[PSI]
            key = (e1, e2, er, max(net, 0), max(-net, 0)) + monom[PSI + 1:]
            result[key] = result.get(key, 0) + scale * c
    return poly.ring.from_dict(result)


def reduce_unit(poly: PolyElement) -> PolyElement:
    """I^2 = -1 for the leading generator I."""
    result: Dict[Tuple[int, ...], Any] = {}
    for monom, coeff in poly.terms():
        q, e = divmod(monom[0], 2)
        key = (e,) + monom[1:]
        result[key] = result.get(key, 0) + (-coeff if q % 2 else coeff)
    return poly.ring.from_dict(result)


def multiply(first: PolyElement, second: PolyElement, bound: int,
             reduce: Callable[[PolyElement], PolyElement] = reduce_roots) -> PolyElement:
    ring = first.ring
    return reduce(truncate(first * second, bound, xz_weight(ring)))


def truncated_exp(exponent: PolyElement, bound: int, weight: Weight,
                  reduce: Callable[[PolyElement], PolyElement] = lambda p: p) -> PolyElement:
    """
    exp(exponent) through weight bound; every monomial of exponent must have
    positive weight.
    """
    if exponent and any(weight(m) <= 0 for m in exponent.monoms()):
        raise ComputationError("exponent of a truncated exponential needs positive weight")
    ring = exponent.ring
    result = ring.one
    term = ring.one
    for k in range(1, bound + 1):
        term = reduce(truncate(term * exponent, bound, weight))
        term = _times_rational(term, Fraction(1, k))
        if not term:
            break
        result += term
    return result


def project_parity(poly: PolyElement, p: int) -> PolyElement:
    """
    (1/4) sum_q i^(-q p) B((-1)^q x, i^q z): the x^k z^l with 2k + l = p mod 4.
    """
    weight = xz_weight(poly.ring)
    return select(poly, lambda m: weight(m) % 4 == p % 4)


def transfer(poly: PolyElement, target, drop: Iterable[str] = ()) -> PolyElement:
    """
    Move a polynomial into another ring by generator name. Generators in drop
    are set to 1; any other generator missing from target must not occur.
    """
    source = [str(s) for s in poly.ring.symbols]
    names = [str(s) for s in target.symbols]
    dropped = set(drop)
    positions = []
    for name in source:
        if name in dropped:
            positions.append(None)
        elif name in names:
            positions.append(names.index(name))
        else:
            positions.append(-1)
    result: Dict[Tuple[int, ...], Any] = {}
    for monom, coeff in poly.terms():
        key = [0] * len(names)
        for e, pos in zip(monom, positions):
            if not e or pos is None:
                continue
            if pos < 0:
                raise ComputationError(f"{poly} involves generators missing from {target}")
            key[pos] += e
        key_t = tuple(key)
        result[key_t] = result.get(key_t, 0) + coeff
    return target.from_dict(result)


def layer(poly: PolyElement, name: str, degree: int) -> PolyElement:
    """Coefficient of name^degree, still in the same ring."""
    idx = _index(poly.ring, name)
    result = {}
    for monom, coeff in poly.terms():
        if monom[idx] == degree:
            result[monom[:idx] + (0,) + monom[idx + 1:]] = coeff
    return poly.ring.from_dict(result)


@dataclass(frozen=True)
class PhiElement:
    """
    numer / ((1 - v)^at_one (1 - 3v)^at_third) * dphi/phi with numer in the
    reduced phi ring. The components along 1, s1, s2 and s1 s2 are read off
    the s-exponents of numer.
    """

    numer: PolyElement
    at_one: int = 1
    at_third: int = 0

    @property
    def ring(self):
        return self.numer.ring

    def __bool__(self) -> bool:
        return bool(self.numer)

    def _lift(self, at_one: int, at_third: int) -> PolyElement:
        one_minus_v, one_minus_3v = _root_squares(self.ring)
        extra = one_minus_v ** (at_one - self.at_one) * one_minus_3v ** (at_third - self.at_third)
        return reduce_roots(self.numer * extra)

    def __add__(self, other: "PhiElement") -> "PhiElement":
        at_one = max(self.at_one, other.at_one)
        at_third = max(self.at_third, other.at_third)
        numer = self._lift(at_one, at_third) + other._lift(at_one, at_third)
        return PhiElement(numer, at_one, at_third)

    def __neg__(self) -> "PhiElement":
        return PhiElement(-self.numer, self.at_one, self.at_third)

    def scale(self, factor: int) -> "PhiElement":
        return PhiElement(self.numer * factor, self.at_one, self.at_third)

    def project(self, p: int) -> "PhiElement":
        return PhiElement(project_parity(self.numer, p), self.at_one, self.at_third)

    def flip(self, s1: bool = False, s2: bool = True) -> "PhiElement":
        """Change the branch of sqrt(1 - phi^4) and/or sqrt(1 - 3 phi^4)."""
        def sign(monom):
            odd = (monom[S1] if s1 else 0) + (monom[S2] if s2 else 0)
            return -1 if odd % 2 else 1
        return PhiElement(
            self.ring.from_dict({m: c * sign(m) for m, c in self.numer.terms()}),
            self.at_one, self.at_third,
        )

    def components(self) -> Dict[str, PolyElement]:
        labels = {(0, 0): "1", (1, 0): "s1", (0, 1): "s2", (1, 1): "s1s2"}
        buckets: Dict[str, Dict[Tuple[int, ...], Any]] = {label: {} for label in labels.values()}
        for monom, coeff in self.numer.terms():
            label = labels[(monom[S1], monom[S2])]
            buckets[label][(0, 0) + monom[R2:]] = coeff
        return {label: self.ring.from_dict(terms) for label, terms in buckets.items()}


@dataclass(frozen=True)
class RationalForm:
    """numer / denom * dv as polynomials in QQ[v, x, z, A2, b_*]."""

    numer: PolyElement
    denom: PolyElement

    def pair(self) -> Tuple[PolyElement, PolyElement]:
        return self.numer, self.denom


def parity_defects(element: PhiElement) -> List[str]:
    """Monomials that keep an odd power of s1, s2 or sqrt(2), or a phi-exponent off 4Z."""
    defects = []
    for monom in element.numer.monoms():
        if monom[S1] or monom[S2] or monom[R2]:
            defects.append(f"odd root component s1^{monom[S1]} s2^{monom[S2]} r2^{monom[R2]} survived symmetrization")
        elif (monom[PHI] - monom[PSI]) % 4:
            defects.append(f"phi-exponent {monom[PHI] - monom[PSI]} is not a multiple of 4")
    return defects


def rationalize(element: PhiElement, target) -> RationalForm:
    """
    Rewrite a parity-symmetrized element as a rational 1-form in v = phi^4.

    Raises:
        ParityViolation: an odd power of s1, s2 or sqrt(2) survived, or a
            phi-exponent is not divisible by 4
    """
    defects = parity_defects(element)
    if defects:
        raise ParityViolation(defects[0])
    exponents = {monom: (monom[PHI] - monom[PSI]) // 4 for monom in element.numer.monoms()}
    ring = element.ring
    low = min(exponents.values(), default=0)
    shift = max(0, -low)
    rest_names = [str(s) for s in ring.symbols][PSI + 1:]
    positions = [_index(target, name) for name in rest_names]
    iv = _index(target, "v")
    numer: Dict[Tuple[int, ...], Any] = {}
    for monom, coeff in element.numer.terms():
        key = [0] * len(target.symbols)
        key[iv] = exponents[monom] + shift
        for e, pos in zip(monom[PSI + 1:], positions):
            key[pos] = e
        key_t = tuple(key)
        numer[key_t] = numer.get(key_t, 0) + coeff
    v = target.gens[iv]
    # dphi/phi = dv/(4v)
    denom = 4 * v ** (1 + shift) * (1 - v) ** element.at_one * (1 - 3 * v) ** element.at_third
    return RationalForm(target.from_dict(numer), denom)
