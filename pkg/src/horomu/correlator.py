"""Correlator-group classification for lattices commensurable with SL2(Z).

The stabilizer of a boundary point z carries a character chi sending an
upper-triangular element diag-conjugate (alpha, beta; 0, delta), with
alpha*delta = 1, to alpha^2; conjugating the unipotent step u by such an
element raises it to the power chi. The rational values of chi on the
commensurated stabilizer decide which speed ratios p/q admit nontrivial
joinings, and they depend only on the arithmetic of z:

* z rational or infinite: every positive rational occurs;
* z a quadratic surd with a z^2 + b z + c = 0, d = b^2 - 4ac > 0 nonsquare:
  the values are the totally positive unit-like ratios (t + u sqrt d)/(t -
  u sqrt d), none of which is rational except 1;
* z any other irrational: only the identity.

All rationality decisions run in exact arithmetic over Q(sqrt d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import DescriptorError, ShapeError, ValidationError
from .exactreal import symbol_spec

_ENTRY_TOL = 1e-12


# ---------------------------------------------------------------------------
# exact arithmetic in Q(sqrt d)
# ---------------------------------------------------------------------------

class QSurd:
    """x + y*sqrt(d) with exact rational x, y; d a positive nonsquare."""

    __slots__ = ("x", "y", "d")

    def __init__(self, x, y, d: int):
        d = int(d)
        if d <= 1 or math.isqrt(d) ** 2 == d:
            raise DescriptorError(f"discriminant must be a positive nonsquare, got {d}")
        self.x = Fraction(x)
        self.y = Fraction(y)
        self.d = d

    def _lift(self, other) -> "QSurd":
        if isinstance(other, QSurd):
            if other.d != self.d:
                raise DescriptorError(f"mixed discriminants {self.d} and {other.d}")
            return other
        return QSurd(Fraction(other), 0, self.d)

    def __add__(self, other):
        o = self._lift(other)
        return QSurd(self.x + o.x, self.y + o.y, self.d)

    def __sub__(self, other):
        o = self._lift(other)
        return QSurd(self.x - o.x, self.y - o.y, self.d)

    def __mul__(self, other):
        o = self._lift(other)
        return QSurd(self.x * o.x + self.d * self.y * o.y,
                     self.x * o.y + self.y * o.x, self.d)

    def __truediv__(self, other):
        o = self._lift(other)
        nrm = o.norm()
        if nrm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt d)")
        conj = o.conjugate()
        num = self * conj
        return QSurd(num.x / nrm, num.y / nrm, self.d)

    __radd__ = __add__
    __rmul__ = __mul__

    def conjugate(self) -> "QSurd":
        return QSurd(self.x, -self.y, self.d)

    def norm(self) -> Fraction:
        return self.x * self.x - self.d * self.y * self.y

    @property
    def is_rational(self) -> bool:
        return self.y == 0

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except (DescriptorError, TypeError, ValueError):
            return NotImplemented
        return self.x == o.x and self.y == o.y

    def __hash__(self):
        return hash((self.x, self.y, self.d))

    def __float__(self):
        return float(self.x) + float(self.y) * math.sqrt(self.d)

    def __repr__(self):
        return f"QSurd({self.x} + {self.y}*sqrt({self.d}))"


# ---------------------------------------------------------------------------
# parabolic elements and the character
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParabolicElement:
    """Upper-triangular (alpha, beta; 0, delta) with alpha*delta = 1."""

    alpha: float
    beta: float
    delta: float

    def __post_init__(self):
        if self.alpha == 0 or self.delta == 0:
            raise ShapeError("parabolic element needs nonzero diagonal")
        if abs(self.alpha * self.delta - 1) > _ENTRY_TOL:
            raise ShapeError(
                f"alpha*delta = {self.alpha * self.delta} is not 1 within {_ENTRY_TOL}")

    @classmethod
    def from_matrix(cls, matrix) -> "ParabolicElement":
        m = np.asarray(matrix, dtype=float)
        if m.shape != (2, 2):
            raise ShapeError(f"expected a 2x2 matrix, got shape {m.shape}")
        if m[1, 0] != 0:
            raise ShapeError(f"lower-left entry must be exactly 0, got {m[1, 0]}")
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 1]))

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.alpha, self.beta], [0.0, self.delta]])

    def inverse_matrix(self) -> np.ndarray:
        det = self.alpha * self.delta
        return np.array([[self.delta, -self.beta], [0.0, self.alpha]]) / det

    def compose(self, other: "ParabolicElement") -> "ParabolicElement":
        return ParabolicElement(self.alpha * other.alpha,
                                self.alpha * other.beta + self.beta * other.delta,
                                self.delta * other.delta)


def chi(beta: ParabolicElement) -> float:
    """The multiplier alpha^2 > 0 of a parabolic element."""
    return beta.alpha * beta.alpha


_U = np.array([[1.0, 1.0], [0.0, 1.0]])


def conjugation_exponent_check(beta: ParabolicElement, tol: float = _ENTRY_TOL) -> bool:
    """Verify beta u beta^-1 = (1, chi(beta); 0, 1) entrywise within tol."""
    lhs = beta.as_matrix() @ _U @ beta.inverse_matrix()
    rhs = np.array([[1.0, chi(beta)], [0.0, 1.0]])
    return bool(np.max(np.abs(lhs - rhs)) <= tol)


# ---------------------------------------------------------------------------
# point descriptors and classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointDescriptor:
    """Exact arithmetic type of a boundary point.

    kind is one of 'infinity', 'rational', 'quadratic', 'irrational'.
    """

    kind: str
    rational: Optional[Fraction] = None
    surd: Optional[tuple[int, int, int]] = None
    symbol: Optional[str] = None

    @staticmethod
    def infinity() -> "PointDescriptor":
        return PointDescriptor("infinity")

    @staticmethod
    def from_rational(value) -> "PointDescriptor":
        return PointDescriptor("rational", rational=Fraction(value))

    @staticmethod
    def quadratic_surd(a: int, b: int, c: int) -> "PointDescriptor":
        """Root (-b + sqrt(d))/(2a) of a z^2 + b z + c with d = b^2-4ac > 0 nonsquare."""
        a, b, c = int(a), int(b), int(c)
        if a == 0:
            raise DescriptorError("leading coefficient must be nonzero")
        if math.gcd(math.gcd(abs(a), abs(b)), abs(c)) != 1:
            raise DescriptorError(f"coefficients ({a},{b},{c}) must be coprime")
        d = b * b - 4 * a * c
        if d <= 0 or math.isqrt(d) ** 2 == d:
            raise DescriptorError(
                f"discriminant {d} must be positive and not a square")
        return PointDescriptor("quadratic", surd=(a, b, c))

    @staticmethod
    def irrational(symbol: str) -> "PointDescriptor":
        spec = symbol_spec(symbol)
        if spec.square is not None:
            raise DescriptorError(
                f"{symbol} is a quadratic surd; use quadratic_surd instead")
        return PointDescriptor("irrational", symbol=symbol)

    @property
    def discriminant(self) -> Optional[int]:
        if self.surd is None:
            return None
        a, b, c = self.surd
        return b * b - 4 * a * c

    def __str__(self):
        if self.kind == "infinity":
            return "infinity"
        if self.kind == "rational":
            return str(self.rational)
        if self.kind == "quadratic":
            return f"surd{self.surd}"
        return self.symbol


@dataclass(frozen=True)
class CorrelatorClass:
    """Verdict: the set of rational correlator values at this point."""

    kind: str  # 'full_rational' | 'trivial'
    witness: Optional["SurdGroupElement"] = None

    @property
    def is_full(self) -> bool:
        return self.kind == "full_rational"

    def as_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.witness is not None:
            out["witness"] = self.witness.as_dict()
        return out


def classify_correlator(z: PointDescriptor) -> CorrelatorClass:
    """Rational correlator values: all of Q* iff z is rational or infinite.

    For quadratic surds the group itself is infinite, generated by ratios
    (t + u sqrt d)/(t - u sqrt d); a sample element is attached as witness.
    """
    if z.kind in ("infinity", "rational"):
        return CorrelatorClass("full_rational")
    if z.kind == "quadratic":
        a, b, c = z.surd
        t = math.isqrt(z.discriminant) + 1  # t^2 - d > 0
        witness = surd_group_element(a, b, c, t, 1)
        return CorrelatorClass("trivial", witness)
    if z.kind == "irrational":
        return CorrelatorClass("trivial")
    raise DescriptorError(f"unknown descriptor kind {z.kind!r}")


# ---------------------------------------------------------------------------
# the surd stabilizer parametrization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SurdGroupElement:
    """One stabilizer element of a quadratic surd and its multiplier.

    The matrix ((t-bu)/2, -cu; au, (t+bu)/2) has determinant
    (t^2 - d u^2)/4 > 0, fixes the root z, and its multiplier is
    (t + u sqrt d)/(t - u sqrt d).
    """

    a: int
    b: int
    c: int
    t: Fraction
    u: Fraction
    value: QSurd
    matrix: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]

    @property
    def value_float(self) -> float:
        return float(self.value)

    @property
    def is_rational_value(self) -> bool:
        return self.value.is_rational

    def as_dict(self) -> dict:
        return {"t": str(self.t), "u": str(self.u),
                "value": f"{self.value.x} + {self.value.y}*sqrt({self.value.d})",
                "value_float": repr(self.value_float),
                "matrix": [[str(v) for v in row] for row in self.matrix],
                "rational": self.is_rational_value}


def surd_group_element(a: int, b: int, c: int, t, u) -> SurdGroupElement:
    """Build the stabilizer element with parameters (t, u), t^2 - d u^2 > 0.

    Verifies exactly that the matrix fixes z = (-b + sqrt d)/(2a), and
    numerically (1e-10) that its eigenvalue ratio equals the returned
    multiplier (t + u sqrt d)/(t - u sqrt d).
    """
    t, u = Fraction(t), Fraction(u)
    desc = PointDescriptor.quadratic_surd(a, b, c)
    d = desc.discriminant
    norm = t * t - d * u * u
    if norm <= 0:
        raise ValidationError(f"need t^2 - d u^2 > 0, got {norm}")
    num = QSurd(t, u, d)
    den = QSurd(t, -u, d)
    value = num / den

    m = ((t - b * u) / 2, Fraction(-c * u)), (Fraction(a * u), (t + b * u) / 2)
    z = QSurd(Fraction(-b, 2 * a), Fraction(1, 2 * a), d)
    pz = QSurd(m[0][0], 0, d) * z + m[0][1]
    qz = QSurd(m[1][0], 0, d) * z + m[1][1]
    if qz.norm() == 0 or pz / qz != z:
        raise ValidationError(
            f"stabilizer construction failed to fix the surd for (t,u)=({t},{u})")
    # eigenvalue at the fixed point is exactly rz + s = (t + u sqrt d)/2
    if qz != QSurd(t / 2, u / 2, d) or (QSurd(t / 2, u / 2, d)
                                        / QSurd(t / 2, -u / 2, d)) != value:
        raise ValidationError("eigenvalue identity failed (internal inconsistency)")

    if u != 0:
        # independent numeric check: conjugate to triangular form by the
        # eigenvector basis (z, 1), (z', 1) and read the diagonal ratio
        zf = (-b + math.sqrt(d)) / (2 * a)
        zc = (-b - math.sqrt(d)) / (2 * a)
        basis = np.array([[zf, zc], [1.0, 1.0]])
        gmat = np.array([[float(m[0][0]), float(m[0][1])],
                         [float(m[1][0]), float(m[1][1])]])
        tri = np.linalg.solve(basis, gmat @ basis)
        ratio = tri[0, 0] / tri[1, 1]
        if abs(ratio - float(value)) > 1e-10 * max(1.0, abs(ratio)):
            raise ValidationError(
                f"multiplier mismatch: conjugated ratio {ratio} vs {float(value)}")
    return SurdGroupElement(a, b, c, t, u, value, m)
