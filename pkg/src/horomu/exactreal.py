"""Exact real scalars for symbolic matrix entries and phase reduction.

Two needs drive this module:

* genericity decisions must never be made from floats, so matrix entries
  are stored as ``q0 + q1*sigma`` with exact rational ``q0, q1`` and a
  named irrational constant ``sigma``;
* long exponential sums need ``frac(n*theta)`` to full double precision
  for n up to ~1e9, which a plain float64 product cannot deliver.

The fractional parts are computed through a 96-bit fixed-point integer
image of the constant, so both the sequence builder and any closed-form
oracle reduce angles through the identical channel.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from mpmath import mp, mpf

from .errors import DescriptorError

FRAC_SHIFT = 96
_LIMB = 24
_LIMB_MASK = (1 << _LIMB) - 1
_NLIMB = FRAC_SHIFT // _LIMB
MAX_FRAC_INDEX = 1 << 38  # keeps limb products inside int64


@dataclass(frozen=True)
class SymbolSpec:
    """A named irrational constant.

    ``square`` gives the minimal quadratic relation sigma^2 = a + b*sigma
    over Q when one exists (quadratic surds), else None.
    """

    name: str
    evaluate: Callable[[], mpf]  # at current mpmath precision
    square: Optional[tuple[Fraction, Fraction]]


def _sqrt_spec(d: int) -> SymbolSpec:
    return SymbolSpec(f"sqrt{d}", lambda d=d: mp.sqrt(d), (Fraction(d), Fraction(0)))


_REGISTRY: dict[str, SymbolSpec] = {
    "e": SymbolSpec("e", lambda: mp.e, None),
    "pi": SymbolSpec("pi", lambda: mp.pi, None),
    "inv_e": SymbolSpec("inv_e", lambda: 1 / mp.e, None),
    "inv_pi": SymbolSpec("inv_pi", lambda: 1 / mp.pi, None),
    "golden": SymbolSpec("golden", lambda: (1 + mp.sqrt(5)) / 2,
                         (Fraction(1), Fraction(1))),
}


def symbol_spec(name: str) -> SymbolSpec:
    """Look up a registered constant; sqrt:d / sqrtD names are synthesized."""
    if name in _REGISTRY:
        return _REGISTRY[name]
    m = re.fullmatch(r"sqrt:?(\d+)", name)
    if m:
        d = int(m.group(1))
        if d < 2 or math.isqrt(d) ** 2 == d:
            raise DescriptorError(f"sqrt argument must be a nonsquare >= 2, got {d}")
        return _sqrt_spec(d)
    raise DescriptorError(f"unknown symbolic constant {name!r}")


def symbol_value(name: str, prec: int = 128) -> mpf:
    spec = symbol_spec(name)
    old = mp.prec
    try:
        mp.prec = prec
        return spec.evaluate()
    finally:
        mp.prec = old


def fixed_point_image(value, bits: int) -> int:
    """floor(value * 2^bits) computed at sufficient mpmath precision."""
    old = mp.prec
    try:
        mp.prec = bits + 64
        if isinstance(value, str):
            v = symbol_spec(value).evaluate()
        elif isinstance(value, Fraction):
            v = mpf(value.numerator) / value.denominator
        else:
            v = mpf(value)
        return int(mp.floor(v * (mpf(2) ** bits)))
    finally:
        mp.prec = old


def frac_parts(value, ns) -> np.ndarray:
    """frac(n * value) for an array of nonnegative integers n.

    Exact to ~2^-53 absolute: the constant is replaced by its 96-bit
    fixed-point floor P, and (n*P) mod 2^96 is evaluated limb-wise in
    int64, so the only float rounding is the final division by 2^96.
    """
    ns = np.asarray(ns, dtype=np.int64)
    if ns.size and int(ns.max()) >= MAX_FRAC_INDEX:
        raise DescriptorError(f"frac_parts index exceeds {MAX_FRAC_INDEX}")
    if ns.size and int(ns.min()) < 0:
        raise DescriptorError("frac_parts indices must be nonnegative")
    P = fixed_point_image(value, FRAC_SHIFT) % (1 << FRAC_SHIFT)
    limbs = [(P >> (_LIMB * k)) & _LIMB_MASK for k in range(_NLIMB)]
    out = np.zeros(ns.shape, dtype=np.float64)
    carry = np.zeros(ns.shape, dtype=np.int64)
    for k in range(_NLIMB):
        c = ns * limbs[k] + carry
        out += (c & _LIMB_MASK).astype(np.float64) * 2.0 ** (_LIMB * k - FRAC_SHIFT)
        carry = c >> _LIMB
    return out


_TOKEN = re.compile(r"^\s*(?P<rat>-?\d+(?:/\d+)?|-?\d*\.\d+)?\s*"
                    r"(?P<op>[+-])?\s*"
                    r"(?:(?P<coef>\d+(?:/\d+)?|\d*\.\d+)\s*\*\s*)?"
                    r"(?P<sym>[A-Za-z_][A-Za-z_0-9:]*)?\s*$")


class SymbolicReal:
    """Exact scalar q0 + q1*sigma with rational q0, q1 and named sigma.

    All arithmetic that leaves this module's closed form (e.g. products of
    two transcendental parts) raises rather than approximating, so any
    rationality decision downstream is sound.
    """

    __slots__ = ("rational", "coeff", "symbol")

    def __init__(self, rational=0, coeff=0, symbol=None):
        self.rational = Fraction(rational)
        self.coeff = Fraction(coeff)
        self.symbol = symbol if self.coeff != 0 else None
        if self.symbol is not None:
            symbol_spec(self.symbol)  # validate vocabulary

    # -- construction ---------------------------------------------------
    @classmethod
    def rat(cls, value) -> "SymbolicReal":
        return cls(Fraction(value))

    @classmethod
    def const(cls, name: str, coeff=1, rational=0) -> "SymbolicReal":
        return cls(Fraction(rational), Fraction(coeff), name)

    @classmethod
    def parse(cls, text: str) -> "SymbolicReal":
        """Parse '3/4', 'sqrt2', 'e', '1+2*sqrt2', '-1/2*pi', 'exp1'."""
        text = text.strip()
        if text == "exp1":  # CLI alias: the entry value 1/e
            return cls.const("inv_e")
        m = _TOKEN.match(text)
        if not m or (m.group("rat") is None and m.group("sym") is None):
            raise DescriptorError(f"cannot parse symbolic real {text!r}")
        rat = Fraction(m.group("rat")) if m.group("rat") else Fraction(0)
        sym = m.group("sym")
        if sym is None:
            if m.group("op") or m.group("coef"):
                raise DescriptorError(f"cannot parse symbolic real {text!r}")
            return cls(rat)
        coeff = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        if m.group("op") == "-":
            coeff = -coeff
        elif m.group("op") is None and m.group("rat") is not None:
            raise DescriptorError(f"cannot parse symbolic real {text!r}")
        return cls(rat, coeff, sym)

    # -- structure ------------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return self.symbol is None

    def _compatible(self, other: "SymbolicReal") -> Optional[str]:
        if self.symbol is None:
            return other.symbol
        if other.symbol is None or other.symbol == self.symbol:
            return self.symbol
        raise DescriptorError(
            f"mixed symbolic constants {self.symbol!r} and {other.symbol!r}")

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        sym = self._compatible(other)
        return SymbolicReal(self.rational + other.rational,
                            self.coeff + other.coeff, sym)

    def __sub__(self, other):
        other = _coerce(other)
        sym = self._compatible(other)
        return SymbolicReal(self.rational - other.rational,
                            self.coeff - other.coeff, sym)

    def __neg__(self):
        return SymbolicReal(-self.rational, -self.coeff, self.symbol)

    def __mul__(self, other):
        other = _coerce(other)
        if self.symbol is None or other.symbol is None:
            sym = self._compatible(other)
            if self.symbol is None:
                r, c = other.rational, other.coeff
                k = self.rational
            else:
                r, c = self.rational, self.coeff
                k = other.rational
            return SymbolicReal(k * r, k * c, sym)
        sym = self._compatible(other)
        square = symbol_spec(sym).square
        if square is None:
            raise DescriptorError(
                f"product of two {sym!r} terms leaves the affine module")
        a, b = square  # sigma^2 = a + b*sigma
        cross = self.coeff * other.coeff
        return SymbolicReal(
            self.rational * other.rational + cross * a,
            self.rational * other.coeff + self.coeff * other.rational + cross * b,
            sym)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return _coerce(other) - self

    def __eq__(self, other):
        other = _coerce(other)
        try:
            sym = self._compatible(other)
        except DescriptorError:
            return False
        del sym
        return self.rational == other.rational and self.coeff == other.coeff

    def __hash__(self):
        return hash((self.rational, self.coeff, self.symbol))

    # -- evaluation -----------------------------------------------------
    def mpf_value(self, prec: int = 128) -> mpf:
        old = mp.prec
        try:
            mp.prec = prec
            v = mpf(self.rational.numerator) / self.rational.denominator
            if self.symbol is not None:
                s = symbol_spec(self.symbol).evaluate()
                v += (mpf(self.coeff.numerator) / self.coeff.denominator) * s
            return v
        finally:
            mp.prec = old

    def fixed(self, bits: int) -> int:
        """Round-to-nearest fixed-point image at 2^bits scale."""
        old = mp.prec
        try:
            mp.prec = bits + 64
            v = self.mpf_value(bits + 64)
            return int(mp.floor(v * (mpf(2) ** bits) + mpf(1) / 2))
        finally:
            mp.prec = old

    def __float__(self):
        return float(self.mpf_value(80))

    def __repr__(self):
        if self.symbol is None:
            return f"SymbolicReal({self.rational})"
        return f"SymbolicReal({self.rational} + {self.coeff}*{self.symbol})"

    def __str__(self):
        if self.symbol is None:
            return str(self.rational)
        parts = []
        if self.rational:
            parts.append(str(self.rational))
        coef = "" if self.coeff == 1 else f"{self.coeff}*"
        term = f"{coef}{self.symbol}"
        if not parts:
            return term
        sign = "+" if self.coeff > 0 else "-"
        mag = term if self.coeff > 0 else f"{-self.coeff if self.coeff != -1 else ''}{'*' if self.coeff not in (1, -1) else ''}{self.symbol}"
        return f"{parts[0]}{sign}{mag}"


def _coerce(value) -> SymbolicReal:
    if isinstance(value, SymbolicReal):
        return value
    return SymbolicReal(Fraction(value))


def ratio_as_rational(num: SymbolicReal, den: SymbolicReal) -> Optional[Fraction]:
    """Return num/den as an exact rational, or None if it is irrational.

    Correct whenever {1, sigma} is linearly independent over Q, which holds
    for every constant in the vocabulary. ``den`` must be nonzero.
    """
    num._compatible(den)
    if den.rational == 0 and den.coeff == 0:
        raise ZeroDivisionError("ratio_as_rational with zero denominator")
    if den.coeff != 0:
        t = num.coeff / den.coeff
        if num.rational == t * den.rational:
            return t
        return None
    t = num.rational / den.rational
    if num.coeff == 0:
        return t
    return None
