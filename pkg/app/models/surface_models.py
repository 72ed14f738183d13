"""
Pydantic models for surface data consumed by the residue calculus.

A surface is given by an integral lattice (Gram matrix in a chosen basis),
the canonical class, chi_h and its Seiberg-Witten basic classes. Every class
is a coordinate vector in that basis.
"""
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel, Field, ValidationError, model_validator, validator

from app.config import get_settings
from app.core.exceptions import SurfaceDataError

logger = logging.getLogger(__name__)


class BasicClass(BaseModel):
    """A Seiberg-Witten basic class c_1(s) with its invariant."""
    label: str = Field(..., description="Class label, e.g. K or -K")
    coordinates: List[int] = Field(..., description="Coordinates in the lattice basis")
    sw: int = Field(..., description="Seiberg-Witten invariant SW(s)")

    @validator("sw")
    def check_nonzero(cls, v):
        """Basic classes carry a nonzero invariant"""
        if v == 0:
            raise ValueError("basic classes must have SW != 0")
        return v


class SurfaceData(BaseModel):
    """Lattice, canonical class and SW data of a surface with b_1 = 0, p_g > 0."""
    name: str = Field(..., description="Catalogue name")
    description: str = Field(default="", description="What the data describes")
    chi_h: int = Field(..., description="Holomorphic Euler characteristic")
    gram: List[List[int]] = Field(..., description="Intersection form in the chosen basis")
    basis: List[str] = Field(..., description="Names of the basis classes")
    canonical: List[int] = Field(..., description="Canonical class K_X")
    basic_classes: List[BasicClass] = Field(..., description="Classes with SW != 0")
    xi: Dict[str, List[int]] = Field(..., description="Choices of the class xi = c_1 of the SO(3) bundle")
    blown_up: Optional[str] = Field(None, description="Name of the surface this one blows up")
    exceptional: Optional[int] = Field(None, description="Basis index of the exceptional curve")

    class Config:
        json_schema_extra = {
            "example": {
                "name": "quintic",
                "chi_h": 5,
                "gram": [[5]],
                "basis": ["H"],
                "canonical": [1],
                "basic_classes": [
                    {"label": "K", "coordinates": [1], "sw": -1},
                    {"label": "-K", "coordinates": [-1], "sw": 1}
                ],
                "xi": {"0": [0], "H": [1]}
            }
        }

    @model_validator(mode="after")
    def check_lattice(self):
        """Shapes, symmetry, SW-simple type, parity and the SW(-c) relation"""
        rank = len(self.gram)
        if rank == 0 or any(len(row) != rank for row in self.gram):
            raise ValueError("gram must be a non-empty square matrix")
        if any(self.gram[i][j] != self.gram[j][i] for i in range(rank) for j in range(rank)):
            raise ValueError("gram must be symmetric")
        if len(self.basis) != rank:
            raise ValueError("one basis name per lattice direction")
        if len(set(self.basis)) != rank or not all(name.isidentifier() for name in self.basis):
            raise ValueError("basis names must be distinct identifiers")
        vectors = [self.canonical] + [c.coordinates for c in self.basic_classes] + list(self.xi.values())
        if any(len(v) != rank for v in vectors):
            raise ValueError(f"every class needs {rank} coordinates")
        if not self.basic_classes:
            raise ValueError("at least one basic class is required")
        ksq = self.pair(self.canonical, self.canonical)
        by_coordinates = {tuple(c.coordinates): c for c in self.basic_classes}
        for c in self.basic_classes:
            if self.pair(c.coordinates, c.coordinates) != ksq:
                raise ValueError(f"class {c.label} violates SW-simple type: c^2 != K^2")
            if any((x - k) % 2 for x, k in zip(c.coordinates, self.canonical)):
                raise ValueError(f"class {c.label} is not congruent to K mod 2")
            partner = by_coordinates.get(tuple(-x for x in c.coordinates))
            if partner is not None and partner.sw != (-1) ** self.chi_h * c.sw:
                raise ValueError(f"SW(-{c.label}) != (-1)^chi_h SW({c.label})")
        for label, xi in self.xi.items():
            if self.pair(xi, [x + k for x, k in zip(xi, self.canonical)]) % 2:
                raise ValueError(f"(xi, xi + K) is odd for xi = {label}")
        if self.exceptional is not None:
            if not 0 <= self.exceptional < rank or self.gram[self.exceptional][self.exceptional] != -1:
                raise ValueError("exceptional index must point at a (-1)-class")
        return self

    @property
    def rank(self) -> int:
        return len(self.gram)

    def pair(self, first: Sequence[int], second: Sequence[int]) -> int:
        """The intersection pairing (first, second)."""
        return sum(first[i] * self.gram[i][j] * second[j] for i in range(self.rank) for j in range(self.rank))

    @property
    def ksq(self) -> int:
        return self.pair(self.canonical, self.canonical)

    def xi_class(self, label: str) -> List[int]:
        try:
            return self.xi[label]
        except KeyError:
            raise SurfaceDataError(f"surface {self.name} has no xi labelled {label!r}") from None

    def pairing_row(self, c: Sequence[int], xi: Sequence[int]) -> Dict[str, int]:
        """The integers the differential needs for one class and one xi."""
        xi_minus_k = [x - k for x, k in zip(xi, self.canonical)]
        twice_sign = self.pair(xi, [x + k for x, k in zip(xi, self.canonical)]) - self.ksq - self.pair(self.canonical, c)
        if twice_sign % 2:
            raise SurfaceDataError(f"sign exponent of class {list(c)} is not integral")
        return {
            "n1": self.pair(xi_minus_k, c),
            "xi_minus_k_sq": self.pair(xi_minus_k, xi_minus_k),
            "sign": twice_sign // 2 + self.chi_h,
        }

    def dimension_mod4(self, xi: Sequence[int]) -> int:
        """dim M_H(y) = 4n - (xi^2) - 3 chi_h modulo 4."""
        return (-self.pair(xi, xi) - 3 * self.chi_h) % 4

    def virtual_euler(self, xi: Sequence[int], weight: int) -> int:
        """chi(y) = (xi, xi - K)/2 + 2 chi_h - n for the (x, z)-weight of a monomial."""
        n4 = weight + self.pair(xi, xi) + 3 * self.chi_h
        if n4 % 4:
            raise SurfaceDataError(f"weight {weight} is not a dimension of M_H(y) for xi = {list(xi)}")
        xi_minus_k = [x - k for x, k in zip(xi, self.canonical)]
        return self.pair(xi, xi_minus_k) // 2 + 2 * self.chi_h - n4 // 4


def load_surface(ref: str, surfaces_dir: Optional[str] = None) -> SurfaceData:
    """
    Load surface data by catalogue name or JSON path.

    Args:
        ref: Name of a shipped surface (e.g. "k3") or a path to a JSON file
        surfaces_dir: Catalogue directory; defaults to the configured one

    Returns:
        Validated SurfaceData

    Raises:
        SurfaceDataError: missing file, malformed JSON or failed validation
    """
    directory = Path(surfaces_dir or get_settings().surfaces_dir)
    path = Path(ref)
    if not path.suffix:
        path = directory / f"{ref}.json"
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
        return SurfaceData(**payload)
    except FileNotFoundError:
        raise SurfaceDataError(f"surface data {ref!r} not found at {path}") from None
    except json.JSONDecodeError as e:
        raise SurfaceDataError(f"surface data {path} is not valid JSON: {e}") from None
    except (ValidationError, TypeError) as e:
        logger.error(f"Invalid surface data in {path}: {str(e)}")
        raise SurfaceDataError(f"invalid surface data in {path}: {e}") from None


def shipped_surfaces(surfaces_dir: Optional[str] = None) -> List[str]:
    directory = Path(surfaces_dir or get_settings().surfaces_dir)
    return sorted(p.stem for p in directory.glob("*.json"))
