"""Outward-rounded interval arithmetic over exact rationals.

Support layer for the certified skew-product module: every quantity is a
:class:`CertifiedReal` -- an exact-rational midpoint with an exact-rational
radius -- and every operation widens the radius so that the true value can
never escape the interval.  No floating point and no black-box
transcendental calls participate in any bound: pi enters only through fixed
rational bracketing constants, and sin/cos are Taylor polynomials evaluated
in rational arithmetic with an explicit Lagrange remainder added to the
radius.

Midpoints are snapped to a dyadic grid (``2^-BITS``) after public
operations, with the snapping error absorbed into the radius; this keeps
numerators from growing without bound through long certificate chains while
preserving rigor.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import UsageError

#: Working precision: midpoints live on the grid ``2^-BITS * Z``.
BITS = 256
QUANTUM = Fraction(1, 2 ** BITS)

#: 50-digit rational bracketing of pi (the true decimal expansion continues
#: 58209..., so the open interval is strict on both sides).
PI_LO = Fraction(31415926535897932384626433832795028841971693993751,
                 10 ** 49)
PI_HI = PI_LO + Fraction(1, 10 ** 49)

#: Coarse rational bound 2*pi <= 44/7 used in the verbatim inequality
#: chains (kept separately from the tight brackets on purpose: those chains
#: quote it as-is).
TWO_PI_COARSE = Fraction(44, 7)


def _snap(mid: Fraction, rad: Fraction) -> tuple:
    """Round ``mid`` to the dyadic grid, absorbing the motion into ``rad``."""
    steps = round(mid / QUANTUM)
    qm = steps * QUANTUM
    moved = abs(mid - qm)
    total = rad + moved
    rsteps = -((-total.numerator * QUANTUM.denominator)
               // (total.denominator))  # ceil division
    return qm, rsteps * QUANTUM


@dataclass(frozen=True)
class CertifiedReal:
    """``[mid - rad, mid + rad]`` with exact rational endpoints."""

    mid: Fraction
    rad: Fraction

    def __post_init__(self) -> None:
        if self.rad < 0:
            raise UsageError("radius must be nonnegative")

    # -- constructors -------------------------------------------------------

    @classmethod
    def exact(cls, value) -> "CertifiedReal":
        return cls(Fraction(value), Fraction(0))

    @classmethod
    def from_interval(cls, lo, hi) -> "CertifiedReal":
        lo, hi = Fraction(lo), Fraction(hi)
        if hi < lo:
            raise UsageError("empty interval")
        return cls((lo + hi) / 2, (hi - lo) / 2)

    # -- endpoints ----------------------------------------------------------

    def lo(self) -> Fraction:
        return self.mid - self.rad

    def hi(self) -> Fraction:
        return self.mid + self.rad

    def mag(self) -> Fraction:
        """Upper bound on ``|value|``."""
        return abs(self.mid) + self.rad

    def __float__(self) -> float:
        return float(self.mid)

    def _q(self) -> "CertifiedReal":
        return CertifiedReal(*_snap(self.mid, self.rad))

    # -- arithmetic (outward rounding is exact, snapping widens) ------------

    def __add__(self, other) -> "CertifiedReal":
        o = _coerce(other)
        return CertifiedReal(self.mid + o.mid, self.rad + o.rad)._q()

    __radd__ = __add__

    def __neg__(self) -> "CertifiedReal":
        return CertifiedReal(-self.mid, self.rad)

    def __sub__(self, other) -> "CertifiedReal":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "CertifiedReal":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "CertifiedReal":
        o = _coerce(other)
        rad = (abs(self.mid) * o.rad + abs(o.mid) * self.rad
               + self.rad * o.rad)
        return CertifiedReal(self.mid * o.mid, rad)._q()

    __rmul__ = __mul__

    def abs_(self) -> "CertifiedReal":
        return CertifiedReal(abs(self.mid), self.rad)

    def widened(self, extra) -> "CertifiedReal":
        extra = Fraction(extra)
        if extra < 0:
            raise UsageError("widening must be nonnegative")
        return CertifiedReal(self.mid, self.rad + extra)._q()

    # -- comparisons against exact rationals --------------------------------

    def certainly_below(self, bound) -> bool:
        return self.hi() < Fraction(bound)

    def certainly_above(self, bound) -> bool:
        return self.lo() > Fraction(bound)

    def to_dict(self) -> dict:
        return {"mid": self.mid, "rad": self.rad, "float": float(self.mid)}


def _coerce(v) -> CertifiedReal:
    if isinstance(v, CertifiedReal):
        return v
    return CertifiedReal.exact(v)


# ---------------------------------------------------------------------------
# rational intervals on the line / circle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FracInterval:
    """Exact rational interval ``[lo, hi]`` (for mod-1 enclosures)."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.hi < self.lo:
            raise UsageError("empty interval")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def as_certified(self) -> CertifiedReal:
        return CertifiedReal.from_interval(self.lo, self.hi)

    def contains(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def circle_dist_hi(self) -> Fraction:
        """Upper bound on ``dist(x, Z)`` over the interval (exact)."""
        if self.width >= Fraction(1, 2):
            return Fraction(1, 2)
        base = self.lo - (self.lo.numerator // self.lo.denominator)
        shift = base - self.lo
        a, b = self.lo + shift, self.hi + shift       # a in [0,1)
        half = Fraction(1, 2)
        if b <= half:
            return b
        if a >= half and b <= 1:
            return 1 - a
        if a < half:                                   # straddles 1/2
            return half
        # a >= 1/2, b > 1: [a,1] plus the wrap [0, b-1]
        rest = b - 1
        return max(1 - a, rest) if rest < half else half

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "width": self.width}


# ---------------------------------------------------------------------------
# certified sin / cos at pi-multiples of rational arguments
# ---------------------------------------------------------------------------

def _pi_times(u: CertifiedReal) -> CertifiedReal:
    """Enclosure of ``pi * u`` from the rational pi brackets."""
    cands = [PI_LO * u.lo(), PI_LO * u.hi(), PI_HI * u.lo(), PI_HI * u.hi()]
    return CertifiedReal.from_interval(min(cands), max(cands))._q()


def _taylor_sin(a: Fraction) -> tuple:
    """``(sum, remainder_bound)`` of the sine series at rational ``a``."""
    term = a
    total = a
    a2 = a * a
    m = 1
    cutoff = QUANTUM * QUANTUM
    while abs(term) > cutoff:
        term = -term * a2 / ((2 * m) * (2 * m + 1))
        total += term
        m += 1
        if m > 200:
            raise UsageError("sine series failed to converge (argument too large?)")
    return total, abs(term)


def _taylor_cos(a: Fraction) -> tuple:
    term = Fraction(1)
    total = Fraction(1)
    a2 = a * a
    m = 0
    cutoff = QUANTUM * QUANTUM
    while abs(term) > cutoff:
        term = -term * a2 / ((2 * m + 1) * (2 * m + 2))
        total += term
        m += 1
        if m > 200:
            raise UsageError("cosine series failed to converge (argument too large?)")
    return total, abs(term)


def _reduce_mod2(u) -> CertifiedReal:
    """Shift the midpoint by an even integer into ``(-1, 1]`` (period 2)."""
    c = _coerce(u)
    m = c.mid % 2
    if m > 1:
        m -= 2
    return CertifiedReal(m, c.rad)


def sin_pi(u) -> CertifiedReal:
    """Certified ``sin(pi * u)`` for rational or certified ``u``.

    The argument's rational part is range-reduced exactly (period 2) before
    any rounding; the series is summed in exact rational arithmetic with the
    first omitted term as a Lagrange remainder, and ``|sin'| <= 1`` converts
    the argument radius into value radius.
    """
    c = _reduce_mod2(u)
    arg = _pi_times(CertifiedReal(c.mid, Fraction(0)))
    val, rem = _taylor_sin(arg.mid)
    # argument uncertainty: the exact-pi slack plus pi*rad of the input
    slack = arg.rad + PI_HI * c.rad
    return CertifiedReal(val, rem + slack)._q()


def cos_pi(u) -> CertifiedReal:
    """Certified ``cos(pi * u)``; see :func:`sin_pi`."""
    c = _reduce_mod2(u)
    arg = _pi_times(CertifiedReal(c.mid, Fraction(0)))
    val, rem = _taylor_cos(arg.mid)
    slack = arg.rad + PI_HI * c.rad
    return CertifiedReal(val, rem + slack)._q()
