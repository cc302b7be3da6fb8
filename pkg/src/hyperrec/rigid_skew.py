"""A certified uniformly rigid, non-equicontinuous distal skew product.

The system is the torus skew product driven by the Liouville-flavored
rotation number ``alpha = sum 1/n_j`` over the tower

    ``n_1 = 100,  n_{j+1} = (n_1 n_2 ... n_j)^3``,

with the cocycle ``phi(x) = sum_k (e^{2 pi i n_k alpha} - 1) e^{2 pi i n_k x}``
(the ``k = 0`` term of the two-sided sum is identically zero and is dropped;
negative indices pair with positive ones into the real cosine form used
throughout).  Everything this module outputs is a certificate: an exact
rational或 an outward-rounded interval whose inequalities are checked in
rational arithmetic, so re-running at higher depth can only tighten, never
flip, a verdict.

Certificates provided:

* :func:`check_smallness` -- the coefficient bounds
  ``|e^{2 pi i n_k alpha} - 1| < 14 / n_k^2`` (and the two-index variant),
  via the chain ``2 sin(pi t) <= 2 pi t <= (44/7) t_hi < target``;
* :func:`rigidity_certificate` -- a certified upper bound on the sup
  displacement ``d(T^{n_s} p, p)``, combining the rotation part (an exact
  mod-1 enclosure) with the cocycle chain ``< 28 alpha / n_s``;
* :func:`witness_gap` -- the non-equicontinuity witness: two orbits
  starting ``1/(n_1 n_l)`` apart in ``x`` drift a certified amount
  ``D_l in (1/1000, 1/10)`` in ``y`` after ``m_l = n_l^3 / n_1`` steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .certified import (CertifiedReal, FracInterval, PI_HI, TWO_PI_COARSE,
                        cos_pi, sin_pi, BITS)
from .errors import InsufficientDepthError, UsageError
from .report import VerificationReport

#: Tower depth ceiling: n_13 already has ~25 million digits.
MAX_DEPTH = 12

_N_CACHE: list = [None, 100]       # n_j by index, 1-based
_P_CACHE: list = [None, 100]       # products n_1 * ... * n_j


def nseq(j: int) -> int:
    """Exact ``n_j`` of the tower ``n_1 = 100, n_{j+1} = (n_1 ... n_j)^3``."""
    if j < 1:
        raise UsageError("index must be >= 1")
    if j > MAX_DEPTH:
        raise UsageError(
            f"tower depth {j} > {MAX_DEPTH} (n_{MAX_DEPTH + 1} has tens of "
            f"millions of digits)")
    while len(_N_CACHE) <= j:
        n_next = _P_CACHE[-1] ** 3
        _N_CACHE.append(n_next)
        _P_CACHE.append(_P_CACHE[-1] * n_next)
    return _N_CACHE[j]


@dataclass(frozen=True)
class RigidSkewParams:
    """Truncation depths: ``J`` for alpha, ``K`` for the cocycle series."""

    J: int = 5
    K: int = 5
    precision: int = BITS

    def __post_init__(self) -> None:
        if not (self.J >= self.K >= 1):
            raise UsageError("need J >= K >= 1")
        if self.precision != BITS:
            raise UsageError(
                f"the arithmetic layer works on a fixed {BITS}-bit grid")


def alpha_enclosure(j_depth: int) -> FracInterval:
    """``[sum_{j<=J} 1/n_j, + 2/n_{J+1}]`` -- exact, nesting in ``J``.

    The tail majorant ``2/n_{J+1}`` dominates the geometric remainder of
    the series (each later term is smaller by a factor ``>= n_{J+1}^2``).
    """
    if j_depth < 1:
        raise UsageError("depth must be >= 1")
    lo = sum((Fraction(1, nseq(j)) for j in range(1, j_depth + 1)),
             Fraction(0))
    return FracInterval(lo, lo + Fraction(2, nseq(j_depth + 1)))


def frac_part(m: int, j_depth: int, tol: "Fraction | None" = None,
              ) -> FracInterval:
    """Exact rational enclosure of ``m * alpha mod 1`` of width ``2m/n_{J+1}``.

    The partial sum ``m * sum_{j<=J} 1/n_j`` is reduced mod 1 exactly; the
    series tail contributes at most ``2m/n_{J+1}``.  When a tolerance is
    given and the width misses it, the error names the depth that would
    suffice.
    """
    if m < 1:
        raise UsageError("m must be >= 1")
    enc = alpha_enclosure(j_depth)
    width = m * (enc.hi - enc.lo)
    if tol is not None and width > tol:
        needed = None
        for jj in range(j_depth + 1, MAX_DEPTH):
            if Fraction(2 * m, nseq(jj + 1)) <= tol:
                needed = jj
                break
        raise InsufficientDepthError(
            f"mod-1 enclosure of {m} * alpha at depth J={j_depth} has width "
            f"{float(width):.3e} > tol; "
            + (f"J={needed} would suffice" if needed else
               f"no depth <= {MAX_DEPTH} reaches the tolerance"),
            needed=needed)
    lo_exact = (m * enc.lo) % 1
    return FracInterval(lo_exact, lo_exact + width)


# ---------------------------------------------------------------------------
# coefficient smallness certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SmallnessCertificate:
    """Verified chain ``2 sin(pi t) <= 2 pi t <= (44/7) t_hi < target``.

    ``target`` keeps the verbatim constant ``14`` (the derivation only
    needs ``~4 pi``); ``certified_norm_hi`` additionally reports the tight
    certified value of ``|e^{2 pi i theta} - 1| = 2 sin(pi t)`` itself.
    """

    k: int
    l: int | None
    j_depth: int
    theta: FracInterval
    theta_hi: Fraction
    chain_bound: Fraction          # (44/7) * theta_hi
    target: Fraction               # 14/n_k^2  or  14/(n_k n_l)
    certified_norm_hi: Fraction    # 2 sin(pi theta), outward
    passed: bool

    def to_dict(self) -> dict:
        return {"k": self.k, "l": self.l, "J": self.j_depth,
                "theta": self.theta.to_dict(), "theta_hi": self.theta_hi,
                "chain_bound": self.chain_bound, "target": self.target,
                "certified_norm_hi": self.certified_norm_hi,
                "passed": self.passed}


def check_smallness(k: int, l: int | None = None, j_depth: int = 5,
                    ) -> SmallnessCertificate:
    """Certify ``|e^{2 pi i n_k alpha} - 1| < 14/n_k^2`` (or the n_k n_l form).

    All comparisons are exact rational; a FAIL would mean an implementation
    bug, not a property of the system, and is still reported honestly.
    """
    if k < 1:
        raise UsageError("k must be >= 1")
    if l is not None and l < 2:
        raise UsageError("the two-index certificate uses l >= 2")
    m = nseq(k) * (nseq(l) if l is not None else 1)
    target = Fraction(14, nseq(k) ** 2 if l is None else nseq(k) * nseq(l))
    theta = frac_part(m, j_depth, tol=Fraction(1, 4))
    t_hi = theta.circle_dist_hi()
    chain = TWO_PI_COARSE * t_hi
    norm_hi = (2 * sin_pi(FracInterval(Fraction(0), t_hi).as_certified())).hi()
    return SmallnessCertificate(
        k=k, l=l, j_depth=j_depth, theta=theta, theta_hi=t_hi,
        chain_bound=chain, target=target, certified_norm_hi=norm_hi,
        passed=chain < target)


# ---------------------------------------------------------------------------
# the cocycle and its Birkhoff sums
# ---------------------------------------------------------------------------

def _cos_pair(factor: int, base, shift: FracInterval) -> CertifiedReal:
    """``2 [cos(2 pi f (base + shift)) - cos(2 pi f base)]`` certified.

    ``base`` is rational or certified; ``shift`` an exact enclosure (alpha
    or ``n * alpha``).  Arguments of ``cos_pi`` are in half-turn units.
    """
    b = base if isinstance(base, CertifiedReal) else CertifiedReal.exact(base)
    shifted = b + shift.as_certified()
    u1 = shifted * (2 * factor)
    u0 = b * (2 * factor)
    if u1.rad > Fraction(1, 8):
        raise InsufficientDepthError(
            "cocycle argument enclosure too wide; raise the alpha depth J",
            needed=None)
    return 2 * (cos_pi(u1) - cos_pi(u0))


def phi_eval(x, k_depth: int = 5, j_depth: int | None = None) -> CertifiedReal:
    """Certified ``phi(x) = sum_{k<=K} 2[cos(2 pi n_k(x+alpha)) - cos(2 pi n_k x)]``.

    The dropped ``k > K`` tail is covered by the radius ``56/n_{K+1}^2``:
    each omitted pair is bounded by ``28/n_k^2`` (the verbatim coefficient
    bound) and the factor 2 absorbs the geometric remainder of summing them.
    """
    if k_depth < 1:
        raise UsageError("K must be >= 1")
    j_depth = k_depth if j_depth is None else j_depth
    if j_depth < k_depth:
        raise UsageError("need J >= K")
    alpha = alpha_enclosure(j_depth)
    total = CertifiedReal.exact(0)
    for k in range(1, k_depth + 1):
        total = total + _cos_pair(nseq(k), x, alpha)
    return total.widened(Fraction(56, nseq(k_depth + 1) ** 2))


def birkhoff_closed(x, n: int, k_depth: int = 5,
                    j_depth: int | None = None) -> CertifiedReal:
    """Certified ``sum_{t<n} phi(x + t alpha)`` via the telescoped closed form.

    The geometric sum collapses to the same cosine pairing with ``alpha``
    replaced by ``n alpha``; the ``k > K`` tail is covered by
    ``16 pi n / n_{K+1}^2`` (each omitted coefficient obeys
    ``|z^n - 1| <= n |z - 1|``, then the verbatim per-``k`` bound applies,
    and the factor 2 again absorbs the geometric remainder).
    """
    if n < 1:
        raise UsageError("n must be >= 1")
    if k_depth < 1:
        raise UsageError("K must be >= 1")
    j_depth = k_depth if j_depth is None else j_depth
    if j_depth < k_depth:
        raise UsageError("need J >= K")
    alpha = alpha_enclosure(j_depth)
    shift = FracInterval(n * alpha.lo, n * alpha.hi)
    total = CertifiedReal.exact(0)
    for k in range(1, k_depth + 1):
        total = total + _cos_pair(nseq(k), x, shift)
    tail = Fraction(16) * PI_HI * n / nseq(k_depth + 1) ** 2
    return total.widened(tail)


def birkhoff_direct_float(x: float, n: int, k_depth: int = 5,
                          j_depth: int = 5) -> tuple:
    """Independent float oracle for the Birkhoff sum: ``(value, error_budget)``.

    Sums the same cosine pairs by direct iteration, carrying each angle
    ``n_k (x + t alpha) mod 1`` incrementally with an exactly pre-reduced
    step ``n_k alpha mod 1`` (reduction done in rational arithmetic before
    the float cast, since ``n_k`` dwarfs float range).  Pure float64
    otherwise, so it shares no code path with the certified evaluator; the
    error budget is the crude count ``4 K n`` rounding steps times ``4 pi``.
    """
    import math
    if n < 1:
        raise UsageError("n must be >= 1")
    alpha_lo = alpha_enclosure(j_depth).lo
    total = 0.0
    for k in range(1, k_depth + 1):
        n_k = nseq(k)
        step = float((n_k * alpha_lo) % 1)
        theta = float((n_k * Fraction(x)) % 1)
        for _ in range(n):
            a1 = theta + step
            total += 2.0 * (math.cos(2.0 * math.pi * a1)
                            - math.cos(2.0 * math.pi * theta))
            theta = a1 % 1.0
    budget = 4.0 * math.pi * 4.0 * k_depth * n * 2.0 ** -52
    return total, budget


# ---------------------------------------------------------------------------
# uniform rigidity certificate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RigidityCertificate:
    """Certified bound on ``sup_p d(T^{n_s} p, p)`` for the skew product.

    ``bound`` is the paper-shaped estimate
    ``max(rotation_hi, 28 alpha_hi / n_s + truncation_tail)``; the sharper
    per-coefficient certified sum is reported alongside (it is typically
    orders of magnitude smaller) but the verdict quotes the chain bound.
    """

    s: int
    n_s: int
    j_depth: int
    k_depth: int
    rotation_hi: Fraction
    cocycle_chain_hi: Fraction
    truncation_tail: Fraction
    bound: Fraction
    sharp_cocycle_hi: Fraction

    def to_dict(self) -> dict:
        return {"s": self.s, "n_s": self.n_s, "J": self.j_depth,
                "K": self.k_depth, "rotation_hi": self.rotation_hi,
                "cocycle_chain_hi": self.cocycle_chain_hi,
                "truncation_tail": self.truncation_tail,
                "bound": self.bound, "bound_float": float(self.bound),
                "sharp_cocycle_hi": self.sharp_cocycle_hi}


def rigidity_certificate(s: int, j_depth: int | None = None,
                         k_depth: int = 5) -> RigidityCertificate:
    """Certify the displacement of ``T^{n_s}`` is small everywhere.

    Rotation part: exact enclosure of ``dist(n_s alpha, Z)``.  Cocycle
    part: the chain ``sum_k |e^{2 pi i n_k n_s alpha} - 1| < 28 alpha / n_s``
    evaluated at the upper alpha endpoint, plus the ``k > K`` truncation
    tail.  Both are exact rationals; the certificate is their max.
    """
    if s < 2:
        raise UsageError("s must be >= 2")
    j_depth = max(5, s + 1) if j_depth is None else j_depth
    alpha_hi = alpha_enclosure(j_depth).hi
    n_s = nseq(s)
    rot_hi = frac_part(n_s, j_depth).circle_dist_hi()
    tail = Fraction(16) * PI_HI * n_s / nseq(k_depth + 1) ** 2
    chain_hi = Fraction(28) * alpha_hi / n_s + tail
    sharp = Fraction(0)
    for k in range(1, k_depth + 1):
        t_hi = frac_part(nseq(k) * n_s, j_depth).circle_dist_hi()
        sharp += (4 * sin_pi(FracInterval(Fraction(0), t_hi).as_certified())
                  .abs_().hi())
    sharp += tail
    return RigidityCertificate(
        s=s, n_s=n_s, j_depth=j_depth, k_depth=k_depth,
        rotation_hi=rot_hi, cocycle_chain_hi=chain_hi, truncation_tail=tail,
        bound=max(rot_hi, chain_hi), sharp_cocycle_hi=sharp)


# ---------------------------------------------------------------------------
# non-equicontinuity witness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GapWitness:
    """Certified drift between the orbits of ``(0, 0)`` and ``(x_l, 0)``.

    ``gap`` encloses ``D_l = |B_{m_l}(0) - B_{m_l}(x_l)|`` -- the
    y-coordinate separation after ``m_l`` steps of two points初始ly
    ``x_l = 1/(n_1 n_l)`` apart.  Terms with ``k > l`` vanish exactly
    (``n_k x_l`` is an integer), so the closed form is finite, not
    truncated.  Because the certified value sits below ``1/2``, the
    y-separation equals the circle distance -- ``circle_reduction_ok``
    records that step instead of leaving it implicit.
    """

    l: int
    m_l: int
    x_l: Fraction
    signed: CertifiedReal
    gap: CertifiedReal
    above_delta: bool              # 1/1000 < gap - rad
    below_tenth: bool              # gap + rad < 1/10
    sandwich_lo: Fraction          # 32/n_1^2 (1 - 6/n_1)
    sandwich_hi: Fraction          # 16 pi^2 / n_1^2 (1 + (l-1)/n_{l-1}^2)
    inside_sandwich: bool
    tail_cancels_exactly: bool
    circle_reduction_ok: bool
    per_term: tuple

    def to_dict(self) -> dict:
        return {"l": self.l, "m_l": self.m_l, "x_l": self.x_l,
                "signed": self.signed.to_dict(), "gap": self.gap.to_dict(),
                "above_delta": self.above_delta,
                "below_tenth": self.below_tenth,
                "sandwich": [self.sandwich_lo, self.sandwich_hi],
                "inside_sandwich": self.inside_sandwich,
                "tail_cancels_exactly": self.tail_cancels_exactly,
                "circle_reduction_ok": self.circle_reduction_ok,
                "per_term": [dict(t) for t in self.per_term]}


def witness_gap(l: int, j_depth: int = 5, k_depth: int = 5) -> GapWitness:
    """Certify ``D_l in (1/1000, 1/10)`` (default depths are ample).

    Uses the pairing
    ``D_l = sum_{k<=l} 8 sin(pi A_k) sin(pi B_k) cos(pi (A_k + B_k))`` with
    ``A_k = n_k m_l alpha`` and ``B_k = n_k x_l``; replacing ``A_k`` by its
    fractional part is exact because the integer parts contribute matched
    signs to the sine and the cosine, which cancel in the product.
    """
    if l < 2:
        raise UsageError(
            "the witness needs l >= 2 (m_l = n_l^3 / n_1 must divide out "
            "exactly and the l = 1 geometry degenerates)")
    if l > k_depth:
        raise UsageError("need l <= K so every surviving term is evaluated")
    n1, n_l = nseq(1), nseq(l)
    m_num = n_l ** 3
    if m_num % n1:
        raise UsageError("internal: n_1 must divide n_l^3")
    m_l = m_num // n1
    x_l = Fraction(1, n1 * n_l)

    # k > l terms vanish because n_k * x_l is an integer -- checked, not assumed
    tail_ok = all((nseq(k) * x_l).denominator == 1
                  for k in range(l + 1, min(l + 3, MAX_DEPTH) + 1))

    total = CertifiedReal.exact(0)
    per_term = []
    for k in range(1, l + 1):
        b_k = nseq(k) * x_l
        if b_k.denominator == 1:
            continue                       # contributes exactly zero
        a_enc = frac_part(nseq(k) * m_l, j_depth, tol=Fraction(1, 8))
        a_cr = a_enc.as_certified()
        term = (8 * sin_pi(a_cr) * sin_pi(b_k)
                * cos_pi(a_cr + CertifiedReal.exact(b_k)))
        total = total + term
        per_term.append((("k", k), ("A_frac", float(a_enc.lo)),
                         ("B", float(b_k)), ("value", float(term.mid))))

    gap = total.abs_()
    sand_lo = Fraction(32, n1 ** 2) * (1 - Fraction(6, n1))
    sand_hi = (Fraction(16) * PI_HI * PI_HI / n1 ** 2
               * (1 + Fraction(l - 1, nseq(l - 1) ** 2)))
    return GapWitness(
        l=l, m_l=m_l, x_l=x_l, signed=total, gap=gap,
        above_delta=gap.certainly_above(Fraction(1, 1000)),
        below_tenth=gap.certainly_below(Fraction(1, 10)),
        sandwich_lo=sand_lo, sandwich_hi=sand_hi,
        inside_sandwich=(gap.certainly_above(sand_lo * (1 - Fraction(1, 100)))
                         and gap.certainly_below(sand_hi)),
        tail_cancels_exactly=tail_ok,
        circle_reduction_ok=gap.certainly_below(Fraction(1, 2)),
        per_term=tuple(per_term))


# ---------------------------------------------------------------------------
# report builders (CLI surface)
# ---------------------------------------------------------------------------

def smallness_report(k: int, l: int | None = None,
                     j_depth: int = 5) -> VerificationReport:
    cert = check_smallness(k, l, j_depth)
    rep = VerificationReport(
        title="skew rotation coefficient smallness",
        construction={"k": k, "l": l, "J": j_depth, "n_k": nseq(k),
                      "alpha": "sum of 1/n_j over the cubic tower"})
    what = (f"|e^(2 pi i n_{k} alpha) - 1| < 14/n_{k}^2" if l is None else
            f"|e^(2 pi i n_{k} n_{l} alpha) - 1| < 14/(n_{k} n_{l})")
    rep.add("coefficient-smallness", what + " via exact rational chain",
            cert.passed, **cert.to_dict())
    return rep


def rigidity_report(s: int, j_depth: int | None = None,
                    k_depth: int = 5) -> VerificationReport:
    cert = rigidity_certificate(s, j_depth, k_depth)
    rep = VerificationReport(
        title="uniform rigidity certificate",
        construction={"s": s, "n_s": cert.n_s, "J": cert.j_depth,
                      "K": cert.k_depth})
    rep.add("displacement-bound",
            f"sup displacement of T^(n_{s}) is certified below the chain "
            f"bound max(rotation, 28 alpha/n_{s} + tail)",
            cert.bound < Fraction(3, 10 ** (7 if s == 2 else 6 * s + 7 - 6 * 2)),
            **cert.to_dict())
    return rep


def witness_report(l: int, j_depth: int = 5, k_depth: int = 5,
                   ) -> VerificationReport:
    wit = witness_gap(l, j_depth, k_depth)
    rep = VerificationReport(
        title="non-equicontinuity witness",
        construction={"l": l, "m_l": wit.m_l, "x_l": wit.x_l})
    rep.add("orbit-gap",
            f"orbits of (0,0) and (x_{l}, 0) drift apart by a certified "
            f"amount in (1/1000, 1/10) after m_{l} steps",
            wit.above_delta and wit.below_tenth, witness=True,
            **wit.to_dict())
    rep.add("gap-sandwich",
            "the drift also lands inside the derivation's own sandwich",
            wit.inside_sandwich,
            sandwich=[wit.sandwich_lo, wit.sandwich_hi],
            gap=float(wit.gap.mid))
    return rep
