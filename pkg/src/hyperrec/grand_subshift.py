"""The layered shift: a union of frequency-controlled subshifts.

Level 1 is the subshift built from the seed ``w_1 = 01 0^10`` with
``eps_1 = 1/9``.  Level ``m+1`` re-seeds the same construction with

* ``eps_{m+1} = 9^{-(m+1)}`` and
* ``w_{m+1} = f_1 0^{m 9^m} f_2 0^{m 9^m} ... f_s 0^{m 9^m}``,

where ``f_1 < f_2 < ... < f_s`` enumerates, in lexicographic order, the
length-``m`` factors seen across all level prefixes built so far.  Every
level's language therefore embeds into the next seed, which is what makes
cylinder witnesses transfer across levels.

Two standing size conditions are hard requirements of the layering --
``|w_m| < |w_{m+1}|`` and ``|w_m| >= (m-1) 9^(m-1)`` -- and are checked,
never assumed: :func:`build_grand` fails loudly if enumeration ever broke
them.

The witness searches implement the two finite-scale certificates the
layered system is built to exhibit:

* :func:`wm_witness` -- a pair of adjacent times ``k, k+1`` in the transfer
  set ``N([u],[v])``, computed exactly over the level prefixes;
* :func:`periodic_set_witness` -- an arithmetic progression ``j + p*i`` of
  occurrences of ``[u]`` (a shifted periodic set inside one level).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapacityError, InvalidCylinderError, InvalidSeedError, UsageError
from .report import VerificationReport
from .words import PrefixApprox, Word, language
from .wm_subshift import (WmSubshiftSpec, WordLadder, build_ladder,
                          derive_params, verify_on_prefix)

#: Seed of level 1.
W1 = Word("01" + "0" * 10)

#: Levels at or above this are built only behind ``allow_heavy`` (their
#: base blocks run to megabytes and verification to minutes).
HEAVY_LEVEL = 3


def level_eps(m: int) -> Fraction:
    return Fraction(1, 9 ** m)


@dataclass(frozen=True)
class GrandLevel:
    m: int
    seed: Word
    spec: WmSubshiftSpec
    ladder: WordLadder
    prefix: PrefixApprox


@dataclass(frozen=True)
class GrandShift:
    levels: tuple[GrandLevel, ...]
    depth_per_level: int

    @property
    def max_level(self) -> int:
        return len(self.levels)

    def level(self, m: int) -> GrandLevel:
        return self.levels[m - 1]


def union_language(levels: "tuple[GrandLevel, ...] | list[GrandLevel]",
                   k: int) -> list[Word]:
    """Length-``k`` factors occurring in any level prefix, lexicographic.

    A prefix under-approximation of the union language, like everything
    computed from prefixes.
    """
    seen: set[bytes] = set()
    for lv in levels:
        seen.update(f.data for f in language(lv.prefix.word, k))
    return [Word(f) for f in sorted(seen)]


def next_seed(levels: "tuple[GrandLevel, ...] | list[GrandLevel]", m: int) -> Word:
    """Seed of level ``m+1`` from the levels built so far."""
    factors = union_language(levels, m)
    spacer = b"0" * (m * 9 ** m)
    return Word(b"".join(f.data + spacer for f in factors))


def build_grand(max_level: int = 2, depth_per_level: int = 3,
                allow_heavy: bool = False) -> GrandShift:
    """Construct levels ``1..max_level`` at the given ladder depth."""
    if max_level < 1:
        raise UsageError("max_level must be >= 1")
    if depth_per_level < 2:
        raise UsageError("depth_per_level must be >= 2")
    if max_level >= HEAVY_LEVEL and not allow_heavy:
        raise CapacityError(
            f"levels >= {HEAVY_LEVEL} multiply base blocks into the megabyte "
            f"range; pass allow_heavy=True (CLI: --allow-heavy) to build "
            f"level {max_level}")
    levels: list[GrandLevel] = []
    seed = W1
    for m in range(1, max_level + 1):
        spec = derive_params(seed, level_eps(m))
        ladder = build_ladder(spec, depth_per_level)
        levels.append(GrandLevel(m=m, seed=seed, spec=spec, ladder=ladder,
                                 prefix=ladder.prefix()))
        if m < max_level:
            new_seed = next_seed(levels, m)
            # standing size conditions of the layering; enumeration should
            # never break them, so a violation is a hard failure
            if not len(seed) < len(new_seed):
                raise InvalidSeedError(
                    f"level {m + 1} seed is not longer than level {m}'s "
                    f"({len(new_seed)} <= {len(seed)})")
            if not len(new_seed) >= m * 9 ** m:
                raise InvalidSeedError(
                    f"level {m + 1} seed has {len(new_seed)} symbols, below "
                    f"the required m*9^m = {m * 9 ** m}")
            seed = new_seed
    return GrandShift(levels=tuple(levels), depth_per_level=depth_per_level)


def verify_grand(grand: GrandShift, per_level_suite: bool = True,
                 horizon: int | None = None) -> VerificationReport:
    """Standing conditions of the layering plus per-level suites."""
    rep = VerificationReport(
        title="layered shift construction",
        construction={
            "max_level": grand.max_level,
            "depth_per_level": grand.depth_per_level,
            "levels": [{
                "m": lv.m, "seed_length": len(lv.seed),
                "seed": str(lv.seed) if len(lv.seed) <= 64 else None,
                **{k: v for k, v in lv.spec.describe().items() if k != "w"},
                "prefix_length": len(lv.prefix),
            } for lv in grand.levels],
        },
    )

    growth = [(lv.m, len(lv.seed)) for lv in grand.levels]
    rep.add("seed-length-growth",
            "seed lengths strictly increase across levels",
            all(a[1] < b[1] for a, b in zip(growth, growth[1:])),
            lengths=growth)
    size_floor = [(lv.m, len(lv.seed), (lv.m - 1) * 9 ** (lv.m - 1))
                  for lv in grand.levels]
    rep.add("seed-size-floor",
            "every level seed satisfies |w_m| >= (m-1)*9^(m-1)",
            all(ln >= fl for _, ln, fl in size_floor), floors=size_floor)
    eps_ok = all(lv.spec.eps == level_eps(lv.m) for lv in grand.levels)
    rep.add("eps-schedule", "level m uses the frequency bound eps_m = 9^-m",
            eps_ok, eps=[lv.spec.eps for lv in grand.levels])

    # each level seed's ones stay sparse: every enumeration unit contributes
    # at most max-ones-of-a-factor ones per (m + m*9^m)-symbol unit
    for lv in grand.levels[1:]:
        m_prev = lv.m - 1
        factors = union_language(grand.levels[:m_prev], m_prev)
        max_ones = max(f.count_ones() for f in factors)
        bound = Fraction(max_ones, m_prev * 9 ** m_prev)
        ratio = Fraction(lv.seed.count_ones(), len(lv.seed))
        rep.add(f"level{lv.m}.seed-ones-bound",
                f"ones-ratio of the level-{lv.m} seed is at most "
                f"maxOnes(L_{m_prev})/({m_prev}*9^{m_prev})",
                ratio <= bound, ratio=ratio, bound=bound,
                enumerated_factors=len(factors))

    # the all-zero word of every level's window length N occurs: the fixed
    # point 0^inf is approximated inside every level
    for lv in grand.levels:
        arr = lv.prefix.word.as_array()
        # longest zero run via the gaps between ones
        ones_pos = np.flatnonzero(arr)
        edges = np.concatenate([[-1], ones_pos, [len(arr)]])
        longest = int(np.max(np.diff(edges)) - 1)
        rep.add(f"level{lv.m}.zero-block",
                f"a zero run of length >= N={lv.spec.N} occurs in the "
                f"level-{lv.m} prefix (finite approximation of the fixed point)",
                longest >= lv.spec.N, longest_zero_run=longest)

    if per_level_suite:
        for lv in grand.levels:
            h = horizon if horizon is not None else len(lv.ladder.u[lv.ladder.depth - 1])
            sub = verify_on_prefix(lv.spec, lv.ladder, lv.prefix, h)
            for c in sub.checks:
                c.name = f"level{lv.m}.{c.name}"
            rep.extend(sub)
    return rep


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WmWitness:
    """Adjacent transfer times ``k, k+1`` of ``([u],[v])`` over the prefixes."""

    u: Word
    v: Word
    k: int
    horizon: int
    levels_with_pair: tuple[int, ...]   # levels where both k and k+1 appear

    def to_dict(self) -> dict:
        return {"u": str(self.u), "v": str(self.v), "k": self.k,
                "horizon": self.horizon,
                "levels_with_pair": list(self.levels_with_pair)}


def _presence_bitmap(pu: np.ndarray, pv: np.ndarray, horizon: int) -> np.ndarray:
    """``out[n]`` (n = 0..horizon) = does some occurrence pair sit ``n`` apart.

    Exact over the prefix.  Sparse pairs go through explicit difference
    sets; dense ones through an FFT correlation of indicator vectors whose
    integer counts are recovered safely (error << 1/2).
    """
    out = np.zeros(horizon + 1, dtype=bool)
    if len(pu) == 0 or len(pv) == 0:
        return out
    if len(pu) * len(pv) <= 4_000_000:
        d = pv[None, :] - pu[:, None]
        d = d[(d >= 0) & (d <= horizon)]
        out[d] = True
        return out
    length = int(max(pu.max(), pv.max())) + 1
    a = np.zeros(length, dtype=np.float64)
    b = np.zeros(length, dtype=np.float64)
    a[pu] = 1.0
    b[pv] = 1.0
    size = 1 << int(np.ceil(np.log2(2 * length)))
    fa = np.fft.rfft(a, size)
    fb = np.fft.rfft(b, size)
    corr = np.fft.irfft(np.conj(fa) * fb, size)   # corr[n] = sum_p a[p] b[p+n]
    counts = corr[: horizon + 1]
    out[: len(counts)] = counts > 0.5
    return out


def wm_witness(grand: GrandShift, u: "Word | str", v: "Word | str",
               horizon: int = 10_000) -> WmWitness | None:
    """Smallest ``k <= horizon`` with ``k`` and ``k+1`` in ``N([u],[v])``.

    The transfer set is computed exactly over each level prefix (a position
    of ``u`` and one of ``v`` exactly ``n`` apart) and the levels are
    combined by union.  Returns None when no adjacent pair exists within
    the horizon; raises :class:`InvalidCylinderError` when either word
    occurs in no level prefix.
    """
    u, v = Word(u), Word(v)
    if horizon < 1:
        raise UsageError("horizon must be >= 1")
    per_level: list[tuple[int, np.ndarray]] = []
    seen_u = seen_v = False
    for lv in grand.levels:
        z = lv.prefix.word
        pu = np.asarray(z.find_all(u), dtype=np.int64)
        pv = np.asarray(z.find_all(v), dtype=np.int64)
        seen_u |= len(pu) > 0
        seen_v |= len(pv) > 0
        if len(pu) and len(pv):
            per_level.append((lv.m, _presence_bitmap(pu, pv, horizon)))
    if not seen_u:
        raise InvalidCylinderError(f"{u!r} occurs in no level prefix")
    if not seen_v:
        raise InvalidCylinderError(f"{v!r} occurs in no level prefix")
    if not per_level:
        return None
    union = np.zeros(horizon + 1, dtype=bool)
    for _, bm in per_level:
        union |= bm
    pairs = np.flatnonzero(union[1:horizon] & union[2: horizon + 1])
    if len(pairs) == 0:
        return None
    k = int(pairs[0]) + 1
    with_pair = tuple(m for m, bm in per_level
                      if k < len(bm) and k + 1 < len(bm) and bm[k] and bm[k + 1])
    return WmWitness(u=u, v=v, k=k, horizon=horizon, levels_with_pair=with_pair)


@dataclass(frozen=True)
class PeriodicWitness:
    """An aligned arithmetic progression of ``[u]``-occurrences.

    Certifies that ``offset + period*i`` starts ``u`` in the level prefix for
    ``i = 0..repetitions-1`` -- the finite trace of a shifted periodic set
    contained in the cylinder.  ``complete`` records whether the requested
    repetition count fit inside the prefix.
    """

    u: Word
    level: int
    offset: int
    period: int
    repetitions: int
    requested: int
    inside_seed: bool

    @property
    def complete(self) -> bool:
        return self.repetitions >= self.requested

    def to_dict(self) -> dict:
        return {"u": str(self.u), "level": self.level, "offset": self.offset,
                "period": self.period, "repetitions": self.repetitions,
                "requested": self.requested, "inside_seed": self.inside_seed,
                "complete": self.complete}


def periodic_set_witness(grand: GrandShift, u: "Word | str",
                         min_repetitions: int = 50) -> PeriodicWitness | None:
    """Find a full aligned residue class of ``[u]``-occurrences.

    Searches levels in order; within a level, an offset ``j`` qualifies when
    ``u`` occurs at *every* position ``j + p*i`` that fits in the prefix
    (``p`` the level's block length), so the witness is verified occurrence
    by occurrence, not inferred.  Smallest qualifying ``j`` wins.

    Returns a witness with fewer than ``min_repetitions`` repetitions (and
    ``complete=False``) only when no level can verify the requested count;
    None when ``u`` occurs but never along a full residue class; raises
    :class:`InvalidCylinderError` when ``u`` occurs in no prefix.
    """
    u = Word(u)
    if min_repetitions < 1:
        raise UsageError("min_repetitions must be >= 1")
    best_partial: PeriodicWitness | None = None
    seen = False
    for lv in grand.levels:
        z = lv.prefix.word
        p = lv.spec.n
        occ = z.find_all(u)
        if not occ:
            continue
        seen = True
        occ_arr = np.asarray(occ, dtype=np.int64)
        usable = len(z) - len(u)
        by_residue: dict[int, int] = {}
        res = occ_arr % p
        for r in sorted(set(int(x) for x in res)):
            expected = (usable - r) // p + 1 if r <= usable else 0
            if expected >= 1 and int(np.sum(res == r)) == expected:
                by_residue[r] = expected
        for r, reps in by_residue.items():
            wit = PeriodicWitness(
                u=u, level=lv.m, offset=r, period=p, repetitions=reps,
                requested=min_repetitions,
                inside_seed=r + len(u) <= len(lv.seed))
            if reps >= min_repetitions:
                return wit
            if best_partial is None or reps > best_partial.repetitions:
                best_partial = wit
    if not seen:
        raise InvalidCylinderError(f"{u!r} occurs in no level prefix")
    return best_partial
