"""Weakly-mixing minimal subshifts with controlled symbol frequencies.

Given a seed word ``w`` (containing at least one 1) and a rational
``eps in (0, 1)``, the construction picks the smallest gap parameter ``t``
with

* ``t > 3|w|``,
* ``2|w| / (|w| + t) < eps``        (target frequency bound), and
* ``2|w| / t < |w|_1 / |w|``        (seed ratio domination),

and builds the word ladder

* ``u_0 = w 0^t w 0^(t+1) w 0^t``,  ``v_0 = w 0^(3t + 2|w| + 1)``,
* ``u_1 = u_0 v_0 u_0``,            ``v_1 = u_0 v_0``,
* ``u_{k+1} = u_k v_k u_k u_k``,    ``v_{k+1} = u_k v_k v_k u_k``  (k >= 1).

Both base words have length ``n = 3|w| + 3t + 1``; from level 1 on, ``n``
divides every ``|u_k|`` and ``|v_k|`` and ``|u_k| - |v_k| = n``.  The limit
of the ``u_k`` generates a minimal, weakly mixing subshift in which

* every position ``n*i`` starts a copy of ``w``,
* ``t+|w|`` and ``t+|w|+1`` are both return times of the cylinder ``[w]``,
* every factor of length ``m >= N = |w| + t`` has ones-frequency ``< eps``,
* every factor at least as long as ``w`` has ones-ratio ``<= |w|_1/|w|``.

:func:`verify_wm_subshift` checks all of this exhaustively on a finite
prefix and reports syndetic-return / adjacent-power-return proxies for
minimality and weak mixing at the same scale.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapacityError, InvalidSeedError, UsageError
from .report import VerificationReport
from .words import PrefixApprox, Word, max_gap, ones_ratio

#: Construction sizes are bounded by this many bytes unless overridden.
MEMORY_BUDGET_ENV = "HYPERREC_MEMORY_BUDGET"
DEFAULT_MEMORY_BUDGET = 512_000_000


def memory_budget() -> int:
    try:
        return int(os.environ.get(MEMORY_BUDGET_ENV, DEFAULT_MEMORY_BUDGET))
    except ValueError:
        return DEFAULT_MEMORY_BUDGET


@dataclass(frozen=True)
class WmSubshiftSpec:
    """Validated parameters of one construction instance."""

    w: Word
    eps: Fraction
    t: int

    @property
    def s(self) -> int:
        return len(self.w)

    @property
    def n(self) -> int:
        """Common base-block length ``3s + 3t + 1``."""
        return 3 * self.s + 3 * self.t + 1

    @property
    def N(self) -> int:
        """Window length ``s + t`` above which the eps bound kicks in."""
        return self.s + self.t

    def describe(self) -> dict:
        return {
            "w": str(self.w),
            "eps": self.eps,
            "s": self.s,
            "t": self.t,
            "n": self.n,
            "N": self.N,
            "ones_ratio_w": ones_ratio(self.w),
        }


def derive_params(w: "Word | str", eps, t: int | None = None) -> WmSubshiftSpec:
    """Validate the seed and derive the smallest admissible gap parameter.

    Parameters
    ----------
    w:
        Seed word; must contain at least one 1 (an all-zero seed generates
        only the fixed point).
    eps:
        Target frequency bound, a rational in (0, 1).
    t:
        Optional explicit gap parameter.  When given it is validated against
        the same three constraints instead of being derived.
    """
    w = Word(w)
    if len(w) == 0 or w.count_ones() == 0:
        raise InvalidSeedError("seed word must be nonempty and contain a 1")
    eps = Fraction(eps)
    if not (0 < eps < 1):
        raise UsageError(f"eps must lie in (0, 1), got {eps}")
    s = len(w)
    ratio = ones_ratio(w)
    # all three constraints are strict, so the smallest integer t exceeding
    # every rational bound is int(bound) + 1
    bound = max(Fraction(3 * s), 2 * s / eps - s, 2 * s / ratio)
    t_min = int(bound) + 1
    if t is None:
        t = t_min
    elif t <= 3 * s or Fraction(2 * s, s + t) >= eps or Fraction(2 * s, t) >= ratio:
        raise UsageError(
            f"t={t} violates the gap constraints (minimal admissible t is {t_min})")
    return WmSubshiftSpec(w=w, eps=eps, t=t)


@dataclass(frozen=True)
class WordLadder:
    """The words ``u_0..u_depth`` / ``v_0..v_depth`` of one construction."""

    spec: WmSubshiftSpec
    u: tuple[Word, ...]
    v: tuple[Word, ...]

    @property
    def depth(self) -> int:
        return len(self.u) - 1

    def prefix(self) -> PrefixApprox:
        """``u_depth`` viewed as a prefix of the limit sequence."""
        return PrefixApprox(word=self.u[-1], depth=self.depth,
                            label=f"limit of u_k for seed {self.spec.w!s:.24s}")


def ladder_lengths(spec: WmSubshiftSpec, depth: int) -> list[tuple[int, int]]:
    """``(|u_k|, |v_k|)`` for ``k = 0..depth`` without building the words."""
    n = spec.n
    out = [(n, n)]
    if depth >= 1:
        out.append((3 * n, 2 * n))
    for _ in range(1, depth):
        lu, lv = out[-1]
        out.append((3 * lu + lv, 2 * (lu + lv)))
    return out[: depth + 1]


def build_ladder(spec: WmSubshiftSpec, depth: int) -> WordLadder:
    """Materialise the ladder to ``depth`` (with a capacity guard)."""
    if depth < 0:
        raise UsageError("ladder depth must be >= 0")
    sizes = ladder_lengths(spec, depth)
    required = 2 * sum(lu + lv for lu, lv in sizes)  # words plus concat scratch
    budget = memory_budget()
    if required > budget:
        raise CapacityError(
            f"ladder to depth {depth} needs ~{required} bytes (budget {budget}); "
            f"raise {MEMORY_BUDGET_ENV} to proceed", required=required, budget=budget)

    w, t, s = spec.w.data, spec.t, spec.s
    u0 = w + b"0" * t + w + b"0" * (t + 1) + w + b"0" * t
    v0 = w + b"0" * (3 * t + 2 * s + 1)
    us, vs = [u0], [v0]
    if depth >= 1:
        us.append(u0 + v0 + u0)
        vs.append(u0 + v0)
    for k in range(1, depth):
        us.append(us[k] + vs[k] + us[k] + us[k])
        vs.append(us[k] + vs[k] + vs[k] + us[k])
    return WordLadder(spec=spec,
                      u=tuple(Word(x) for x in us),
                      v=tuple(Word(x) for x in vs))


# ---------------------------------------------------------------------------
# frequency scans
# ---------------------------------------------------------------------------

def _sliding_min(a: np.ndarray, w: int) -> np.ndarray:
    """``out[k] = a[k:k+w].min()`` for ``k = 0 .. len(a)-w`` in O(len(a)).

    Two-pass block trick: with block width ``w`` every window either
    coincides with a block or spans exactly two, so the window minimum is
    ``min(suffix-min within the first block, prefix-min within the second)``.
    """
    n = a.shape[0]
    if not 1 <= w <= n:
        raise UsageError("window width out of range")
    if w == 1:
        return a
    pad = (-n) % w
    big = np.int64(2**62)
    ap = np.concatenate([a, np.full(pad, big, dtype=np.int64)]) if pad else a
    blocks = ap.reshape(-1, w)
    left = np.minimum.accumulate(blocks, axis=1).ravel()
    right = np.minimum.accumulate(blocks[:, ::-1], axis=1)[:, ::-1].ravel()
    return np.minimum(right[: n - w + 1], left[w - 1: n])


def window_ratio_violations(bits: np.ndarray, lo: int, hi: int,
                            num: int, den: int, strict: bool,
                            max_report: int = 5) -> list[tuple[int, int, int]]:
    """Factors breaking a ones-frequency bound, as ``(start, length, ones)``.

    Scans every window ``W`` of the 0/1 array with ``lo <= |W| <= hi`` and
    reports those with ``ones(W)/|W| >= num/den`` (``strict=True``; the bound
    being verified is strict ``<``) or ``> num/den`` (``strict=False``).

    Runs in O(len) integer arithmetic: with ``c`` the ones prefix-count, the
    bound ``(c[j]-c[i])*den < (j-i)*num`` reads ``g[j] < g[i]`` for
    ``g = den*c - num*idx``, so the window ending at ``j`` violates iff
    ``g[j] >= min`` of ``g`` over starts ``i in [j-hi, j-lo]``.
    """
    L = int(len(bits))
    hi = min(hi, L)
    if hi < lo:
        return []
    c = np.concatenate([np.zeros(1, np.int64), np.cumsum(bits, dtype=np.int64)])
    g = np.int64(den) * c - np.int64(num) * np.arange(L + 1, dtype=np.int64)
    w = hi - lo + 1
    big = np.int64(2**62)
    apad = np.concatenate([np.full(w - 1, big, dtype=np.int64), g[: L + 1 - lo]])
    wmin = _sliding_min(apad, w)                      # indexed by j - lo
    gj = g[lo:]
    bad = (gj >= wmin) if strict else (gj > wmin)
    out: list[tuple[int, int, int]] = []
    for off in np.nonzero(bad)[0]:
        j = int(off) + lo
        i0 = max(0, j - hi)
        seg = g[i0: j - lo + 1]
        i = i0 + int(np.argmin(seg))
        out.append((i, j - i, int(c[j] - c[i])))
        if len(out) >= max_report:
            break
    return out


def max_ones_in_window(bits: np.ndarray, m: int) -> int:
    """Largest ones-count over all length-``m`` windows."""
    if m > len(bits):
        raise UsageError("window longer than the prefix")
    c = np.concatenate([np.zeros(1, np.int64), np.cumsum(bits, dtype=np.int64)])
    return int((c[m:] - c[:-m]).max())


# ---------------------------------------------------------------------------
# finite-scale verification
# ---------------------------------------------------------------------------

def verify_wm_subshift(spec: WmSubshiftSpec, depth: int = 3,
                       horizon: int | None = None) -> VerificationReport:
    """Check the construction's guarantees exhaustively on a finite prefix.

    ``horizon`` bounds the factor lengths / return times inspected and
    defaults to ``|u_{depth-1}|``.  All frequency checks are exact integer
    comparisons; minimality and weak mixing are reported as finite-scale
    proxies (syndetic returns of ``u_{depth-1}``, adjacent return pair of
    ``[u_1]`` under the n-th power shift).
    """
    if depth < 2:
        raise UsageError("verification needs depth >= 2 so block-return "
                         "witnesses exist inside the prefix")
    ladder = build_ladder(spec, depth)
    if horizon is None:
        horizon = len(ladder.u[depth - 1])
    return verify_on_prefix(spec, ladder, ladder.prefix(), horizon)


def verify_on_prefix(spec: WmSubshiftSpec, ladder: WordLadder,
                     prefix: PrefixApprox, horizon: int) -> VerificationReport:
    """Verification core, split out so tests can inject tampered prefixes."""
    if horizon < spec.N:
        raise UsageError(f"horizon {horizon} is below the window bound N={spec.N}")
    rep = VerificationReport(
        title="weakly-mixing subshift construction",
        construction={**spec.describe(), "depth": ladder.depth,
                      "prefix_length": len(prefix), "horizon": horizon,
                      "ladder_lengths": [[len(u), len(v)]
                                         for u, v in zip(ladder.u, ladder.v)],
                      "prefix_note": "all factor/return statistics are "
                                     "prefix under-approximations"},
    )
    z = prefix.word
    bits = z.as_array()
    n, s, N = spec.n, spec.s, spec.N
    w = spec.w
    if horizon > len(z):
        rep.warnings.append(
            f"horizon {horizon} exceeds the usable prefix ({len(z)} symbols); "
            f"scans are truncated to the prefix")

    # ladder arithmetic (exact)
    sizes = [(len(u), len(v)) for u, v in zip(ladder.u, ladder.v)]
    ok_len = sizes[0] == (n, n) and all(lu - lv == n and lu % n == 0 and lv % n == 0
                                        for lu, lv in sizes[1:])
    rep.add("block-length-arithmetic",
            "|u_0|=|v_0|=3s+3t+1; for k>=1, n divides |u_k|,|v_k| and |u_k|-|v_k|=n",
            ok_len, lengths=sizes)

    # aligned seed returns: w starts at every multiple of n
    aligned = [i * n for i in range((len(z) - s) // n + 1)]
    bad = [p for p in aligned if z.data[p:p + s] != w.data]
    rep.add("aligned-seed-returns",
            f"the seed starts at every position n*i of the prefix (n={n})",
            not bad, positions_checked=len(aligned), first_offenders=bad[:5])

    # adjacent return pair of [w]
    occ_w = z.find_all(w)
    occ_arr = np.asarray(occ_w, dtype=np.int64)
    diffs = (occ_arr[None, :] - occ_arr[:, None]).ravel()
    dset = set(int(d) for d in diffs[(diffs > 0) & (diffs <= horizon)])
    k_pair = spec.t + s
    ok_pair = k_pair in dset and k_pair + 1 in dset
    rep.add("adjacent-return-pair",
            "t+s and t+s+1 are both return times of the cylinder [w]",
            ok_pair, k=k_pair, k_next=k_pair + 1, occurrences_of_w=len(occ_w))

    top = min(horizon, len(z))

    # frequency sandwich at the window bound N
    sandwich = max_ones_in_window(bits, N)
    rep.add("frequency-sandwich",
            f"every window of N={N} consecutive symbols holds at most |w|_1 ones",
            sandwich <= w.count_ones(), max_ones_at_N=sandwich,
            w_ones=w.count_ones())

    # sparse ones: frequency below eps for every factor length in [N, top]
    viol_v = window_ratio_violations(bits, N, top, spec.eps.numerator,
                                     spec.eps.denominator, strict=True)
    rep.add("sparse-ones-above-window-bound",
            f"every factor v with N <= |v| <= horizon has |v|_1/|v| < {spec.eps}",
            not viol_v, lengths_checked=[N, top],
            violations=[{"start": a, "length": b, "ones": c} for a, b, c in viol_v])

    # seed ratio dominates every factor at least as long as w
    viol_vi = window_ratio_violations(bits, s, top, w.count_ones(), s,
                                      strict=False)
    rep.add("seed-ratio-dominates",
            "every factor v with |w| <= |v| <= horizon has |v|_1/|v| <= |w|_1/|w|",
            not viol_vi, lengths_checked=[s, top],
            violations=[{"start": a, "length": b, "ones": c} for a, b, c in viol_vi])

    # finite-scale minimality proxy: syndetic returns of u_{depth-1}
    anchor = ladder.u[ladder.depth - 1]
    occ_a = z.find_all(anchor)
    gap = max_gap(occ_a)
    gap_bound = len(anchor) + 2 * len(ladder.v[ladder.depth - 1])
    ok_syn = len(occ_a) >= 2 and gap is not None and gap <= gap_bound
    rep.add("syndetic-block-returns",
            f"occurrences of u_{ladder.depth - 1} in the prefix have gaps "
            "<= |u|+2|v| (finite-scale minimality proxy)",
            ok_syn, witness=ok_syn, occurrences=occ_a, max_occurrence_gap=gap,
            gap_bound=gap_bound)

    # finite-scale weak-mixing proxy: adjacent n-th-power returns of [u_1]
    occ_u1 = [p for p in z.find_all(ladder.u[1]) if p % n == 0]
    units = np.asarray(occ_u1, dtype=np.int64) // n
    udiffs = (units[None, :] - units[:, None]).ravel()
    uset = set(int(d) for d in udiffs[udiffs > 0])
    adj = sorted(m for m in uset if m + 1 in uset)
    rep.add("adjacent-power-return-pair",
            "some m has m and m+1 both in the return-time set of [u_1] under "
            "the n-th power shift (finite-scale weak-mixing proxy)",
            bool(adj), witness=bool(adj), pair_m=adj[0] if adj else None,
            aligned_occurrences_of_u1=len(occ_u1))

    return rep
