"""Finite-scale recurrence combinatorics.

FS sets, transfer sets ``N(U,V)``, window/Banach densities, the shift-density
search (find ``l`` in an FS set with ``J meet (J - l)`` dense), independence
sets for a pair of disjoint cylinders, and local-recurrence witnesses.

Scope discipline: membership of *infinite* combinatorial families (IP*,
syndetic-in-the-limit, ...) is not decidable from finite data, so every
verdict produced here is a finite-scale witness or a finite-scale refutation
within an explicit horizon, and the data structures carry those horizons.
Not-found is always a value, never an exception.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InvalidCylinderError, UsageError
from .hyperspace import Ball, MetricSystem
from .words import PrefixApprox, Word

# ---------------------------------------------------------------------------
# index sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IndexSet:
    """A finite, strictly increasing set of nonnegative times.

    ``window_end`` records the horizon the set was computed within; the set
    answers nothing about times at or beyond it.
    """

    values: tuple
    window_end: int

    def __post_init__(self) -> None:
        vs = self.values
        if any(b <= a for a, b in zip(vs, vs[1:])):
            raise UsageError("index set values must be strictly increasing")
        if vs and vs[0] < 0:
            raise UsageError("index set values must be nonnegative")
        if vs and vs[-1] >= self.window_end:
            raise UsageError("index set values must lie below window_end")

    @classmethod
    def from_values(cls, values: Iterable[int], window_end: int) -> "IndexSet":
        return cls(tuple(sorted(set(int(v) for v in values))), int(window_end))

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __contains__(self, n: int) -> bool:
        i = np.searchsorted(np.asarray(self.values), n)
        return i < len(self.values) and self.values[i] == n

    def to_dict(self) -> dict:
        return {"values": list(self.values), "window_end": self.window_end}


def fs_set(gens: Sequence[int], bound: int) -> IndexSet:
    """All nonempty-subset sums of the generators, up to ``bound``.

    ``{2,4,8} -> {2,4,6,8,10,12,14}``.  Cardinality is at most ``2^d - 1``,
    with equality exactly when all subset sums are distinct.
    """
    gens = list(gens)
    if not gens:
        raise UsageError("need at least one generator")
    if any(g <= 0 for g in gens):
        raise UsageError("FS generators must be positive")
    if len(set(gens)) != len(gens):
        raise UsageError("FS generators must be distinct")
    sums: set[int] = set()
    for g in sorted(gens):
        sums |= {s + g for s in sums if s + g <= bound}
        if g <= bound:
            sums.add(g)
    return IndexSet.from_values(sums, bound + 1)


def fs_sums(gens: Sequence[int]) -> tuple:
    """All nonempty-subset sums, unbounded (for small generator lists)."""
    return tuple(fs_set(gens, sum(gens)).values)


# ---------------------------------------------------------------------------
# transfer sets N(U, V)
# ---------------------------------------------------------------------------

def transfer_set(prefix: "Word | PrefixApprox", source: "Word | str",
                 target: "Word | str", horizon: int) -> IndexSet:
    """``{1 <= n <= horizon : [source] meets sigma^-n [target]}`` over a prefix.

    Exact for the prefix: ``n`` is included iff some occurrence of ``source``
    and some occurrence of ``target`` sit exactly ``n`` apart inside it.  A
    longer prefix can only add times (monotone under-approximation of the
    transfer set of the ambient system).
    """
    if horizon < 1:
        raise UsageError("horizon must be >= 1")
    z = prefix.word if isinstance(prefix, PrefixApprox) else prefix
    u, v = Word(source), Word(target)
    pu = np.asarray(z.find_all(u), dtype=np.int64)
    pv = np.asarray(z.find_all(v), dtype=np.int64)
    if len(pu) == 0:
        raise InvalidCylinderError(f"{u!r} does not occur in the prefix")
    if len(pv) == 0:
        raise InvalidCylinderError(f"{v!r} does not occur in the prefix")
    present = np.zeros(horizon + 1, dtype=bool)
    if len(pu) * len(pv) <= 8_000_000:
        d = pv[None, :] - pu[:, None]
        d = d[(d >= 1) & (d <= horizon)]
        present[d] = True
    else:
        length = int(max(pu.max(), pv.max())) + 1
        a = np.zeros(length, dtype=np.float64)
        b = np.zeros(length, dtype=np.float64)
        a[pu] = 1.0
        b[pv] = 1.0
        size = 1 << int(np.ceil(np.log2(2 * length)))
        corr = np.fft.irfft(np.conj(np.fft.rfft(a, size)) * np.fft.rfft(b, size),
                            size)[: horizon + 1]
        present[: len(corr)] = corr > 0.5
        present[0] = False
    return IndexSet.from_values(np.flatnonzero(present), horizon + 1)


def transfer_set_sampled(system: MetricSystem, source_points: Sequence,
                         target: Ball, horizon: int) -> IndexSet:
    """Sampled-metric ``N(U, V)``: times when some sample lands in the target.

    This is an under-approximation computed from finitely many source points
    (exact for those points); reports built on it must flag it as sampled.
    """
    if horizon < 1:
        raise UsageError("horizon must be >= 1")
    if not source_points:
        raise InvalidCylinderError("no source sample points given")
    hits: set[int] = set()
    for p in source_points:
        cur = p
        for n in range(1, horizon + 1):
            cur = (system.power(p, n) if system.power is not None
                   else system.step(cur))
            if target.contains(system, cur):
                hits.add(n)
    return IndexSet.from_values(hits, horizon + 1)


# ---------------------------------------------------------------------------
# densities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DensitySummary:
    """Window densities, a lower estimate of upper Banach density, max gap.

    ``banach_lower`` is the best density over *all* sub-windows of the given
    lengths -- a finite surrogate that can only undershoot the true upper
    Banach density.  ``max_gap`` is the largest difference of consecutive
    elements (None for sets with fewer than two elements).
    """

    window_densities: dict
    banach_lower: Fraction
    max_gap: int | None

    def to_dict(self) -> dict:
        return {
            "window_densities": {str(k): v for k, v in self.window_densities.items()},
            "banach_lower_estimate": self.banach_lower,
            "max_gap": self.max_gap,
        }


def densities(j: IndexSet, window_lengths: Sequence[int]) -> DensitySummary:
    """Exact counts of ``j`` in ``[0, L)`` plus a sliding Banach estimate."""
    if not window_lengths:
        raise UsageError("need at least one window length")
    if any(w < 1 or w > j.window_end for w in window_lengths):
        raise UsageError("window lengths must lie in [1, window_end]")
    ind = np.zeros(j.window_end, dtype=np.int64)
    vals = np.asarray(j.values, dtype=np.int64)
    if len(vals):
        ind[vals] = 1
    csum = np.concatenate([[0], np.cumsum(ind)])
    dens: dict[int, Fraction] = {}
    banach = Fraction(0)
    for w in sorted(set(int(w) for w in window_lengths)):
        dens[w] = Fraction(int(csum[w]), w)
        counts = csum[w:] - csum[:-w]
        banach = max(banach, Fraction(int(counts.max()), w))
    gaps = np.diff(vals) if len(vals) >= 2 else None
    return DensitySummary(window_densities=dens, banach_lower=banach,
                          max_gap=int(gaps.max()) if gaps is not None else None)


@dataclass(frozen=True)
class IpShiftResult:
    """Witness of the shift-density search: ``J meet (J - l)`` is dense."""

    l: int
    density: Fraction
    window: int
    theta: Fraction

    def to_dict(self) -> dict:
        return {"l": self.l, "density": self.density, "window": self.window,
                "theta": self.theta}


def ip_shift_density(j: IndexSet, gens: Sequence[int], window: int,
                     theta: "Fraction | float") -> IpShiftResult | None:
    """Smallest FS-element ``l`` with ``density(J meet (J-l)) >= theta``.

    Density is taken over ``[0, window)`` and needs membership of ``n + l``
    to be decidable, so the index set must extend ``max FS sum`` beyond the
    window.  Returns None when no FS element reaches the threshold (a
    finite-scale not-found, not an error).
    """
    theta = Fraction(theta).limit_denominator(10**12) if isinstance(theta, float) \
        else Fraction(theta)
    if not (0 < theta <= 1):
        raise UsageError("theta must lie in (0, 1]")
    sums = fs_sums(gens)
    if window < 1 or window + max(sums) > j.window_end:
        raise UsageError(
            f"window + max FS sum = {window + max(sums)} exceeds the index "
            f"set's window_end = {j.window_end}")
    ind = np.zeros(j.window_end, dtype=bool)
    vals = np.asarray(j.values, dtype=np.int64)
    if len(vals):
        ind[vals] = True
    for l in sums:
        count = int(np.sum(ind[:window] & ind[l:window + l]))
        dens = Fraction(count, window)
        if dens >= theta:
            return IpShiftResult(l=l, density=dens, window=window, theta=theta)
    return None


# ---------------------------------------------------------------------------
# languages and independence sets
# ---------------------------------------------------------------------------

class FullShiftLanguage:
    """The language of the full shift on {0,1}: every word occurs."""

    name = "full-shift"

    def contains(self, u: Word) -> bool:
        return True

    def realize(self, placements: "dict[int, Word]", length: int) -> Word | None:
        """A length-``length`` word carrying each placed word, or None.

        None means the placements overlap inconsistently -- the only way a
        pattern can fail in the full shift.
        """
        cells: list = [None] * length
        for pos, u in placements.items():
            if pos < 0 or pos + len(u) > length:
                return None
            for off, ch in enumerate(u.data):
                if cells[pos + off] is not None and cells[pos + off] != ch:
                    return None
                cells[pos + off] = ch
        return Word(bytes(c if c is not None else ord("0") for c in cells))


class FactorLanguage:
    """The finite language scraped from a sample text (factor enumeration)."""

    def __init__(self, text: "Word | str", name: str = "factor-language"):
        self.text = Word(text)
        self.name = name

    def contains(self, u: Word) -> bool:
        return bool(self.text.find_all(u))

    def factors(self, length: int) -> list:
        z = self.text
        if length > len(z):
            return []
        seen = sorted({z.data[i: i + length] for i in range(len(z) - length + 1)})
        return [Word(f) for f in seen]


def sturmian_prefix(length: int) -> Word:
    """Exact golden-rotation coding: symbol 1 iff ``{m a}`` is in ``[1-a, 1)``.

    ``a = (sqrt(5)-1)/2``.  Uses ``floor(m a) = (isqrt(5 m^2) - m) // 2``
    (integer arithmetic throughout), so the prefix is exact, not a float
    orbit.
    """
    if length < 1:
        raise UsageError("length must be >= 1")

    def fl(m: int) -> int:
        return (math.isqrt(5 * m * m) - m) // 2

    return Word(bytes(ord("0") + (fl(m + 1) - fl(m)) for m in range(length)))


@dataclass(frozen=True)
class IndependenceResult:
    """Best independence set found for the cylinder pair ``(U1, U2)``.

    ``positions`` is independent in the defining sense: every assignment
    ``s`` of ``{U1, U2}`` to the positions is realized by a word of the
    language; ``witnesses`` maps each pattern (string of 1s and 2s) to one
    realizing word.  ``exhaustive`` records that no larger set up to size
    ``k`` exists within the window.
    """

    positions: tuple
    window: int
    k: int
    density_proxy: Fraction
    witnesses: dict
    exhaustive: bool
    nodes_explored: int

    @property
    def size(self) -> int:
        return len(self.positions)

    def to_dict(self) -> dict:
        return {"positions": list(self.positions), "size": self.size,
                "window": self.window, "k": self.k,
                "density_proxy": self.density_proxy,
                "witnesses": {p: str(w) for p, w in self.witnesses.items()},
                "exhaustive": self.exhaustive,
                "nodes_explored": self.nodes_explored}


def _check_disjoint(u1: Word, u2: Word) -> None:
    a, b = u1.data, u2.data
    if a.startswith(b) or b.startswith(a):
        raise UsageError(
            f"cylinders [{u1}] and [{u2}] are not disjoint "
            f"(one extends the other)")


def independence_search(lang, u1: "Word | str", u2: "Word | str",
                        window: int, k: int) -> IndependenceResult:
    """Maximum independence set ``I`` within ``[0, window)``, ``|I| <= k``.

    A position set is independent when every ``s in {1,2}^I`` has a word of
    the language carrying ``u_{s(i)}`` at each ``i``.  The search is
    exhaustive over subsets up to size ``k`` with monotone pruning (a
    non-independent set has no independent superset), so the result is a
    true maximum for the window; every reported pattern carries an explicit
    witness word, re-checkable by scanning.
    """
    u1, u2 = Word(u1), Word(u2)
    if k < 1 or k > 20:
        raise UsageError("k must lie in [1, 20] (2^k pattern enumeration)")
    if window < 1:
        raise UsageError("window must be >= 1")
    _check_disjoint(u1, u2)
    if not lang.contains(u1):
        raise InvalidCylinderError(f"[{u1}] does not occur in the language")
    if not lang.contains(u2):
        raise InvalidCylinderError(f"[{u2}] does not occur in the language")
    max_len = max(len(u1), len(u2))
    valid_positions = list(range(0, window - max_len + 1))
    if not valid_positions:
        raise UsageError("window too short for the cylinder words")

    nodes = 0
    if isinstance(lang, FullShiftLanguage):
        best, witnesses = _independence_full_shift(lang, u1, u2, valid_positions,
                                                   window, k)
        nodes = 1
        exhaustive = True
    else:
        best, witnesses, nodes = _independence_factor(lang, u1, u2,
                                                      valid_positions, window, k)
        exhaustive = True
    return IndependenceResult(
        positions=tuple(best), window=window, k=k,
        density_proxy=Fraction(len(best), window),
        witnesses=witnesses, exhaustive=exhaustive, nodes_explored=nodes)


def _independence_full_shift(lang: FullShiftLanguage, u1: Word, u2: Word,
                             positions: list, window: int, k: int):
    """Greedy prefix of positions, validated pattern by pattern.

    In the full shift a pattern fails only via overlap conflicts, so spaced
    placements succeed; the explicit witnesses prove it.
    """
    stride = max(len(u1), len(u2))
    chosen: list[int] = []
    for p in positions:
        if chosen and p < chosen[-1] + stride:
            continue
        trial = chosen + [p]
        wits = _realize_all(lang, u1, u2, trial, window)
        if wits is None:
            continue
        chosen = trial
        if len(chosen) == k:
            break
    wits = _realize_all(lang, u1, u2, chosen, window) or {}
    return chosen, wits


def _realize_all(lang: FullShiftLanguage, u1: Word, u2: Word,
                 positions: list, window: int) -> dict | None:
    out: dict[str, Word] = {}
    for mask in range(1 << len(positions)):
        pattern = "".join("2" if mask >> i & 1 else "1"
                          for i in range(len(positions)))
        placements = {p: (u2 if mask >> i & 1 else u1)
                      for i, p in enumerate(positions)}
        w = lang.realize(placements, window)
        if w is None:
            return None
        out[pattern] = w
    return out


def _independence_factor(lang: FactorLanguage, u1: Word, u2: Word,
                         positions: list, window: int, k: int):
    factors = lang.factors(window)
    if not factors:
        raise UsageError("language has no factors of the window length")
    # type of factor f at position p: 1 / 2 / 0 (neither cylinder)
    tcol: dict[int, np.ndarray] = {}
    for p in positions:
        col = np.zeros(len(factors), dtype=np.int8)
        for fi, f in enumerate(factors):
            if f.data.startswith(u1.data, p):
                col[fi] = 1
            elif f.data.startswith(u2.data, p):
                col[fi] = 2
        tcol[p] = col

    best: list[int] = []
    best_wit: dict[str, Word] = {}
    nodes = 0

    # DFS over ascending positions.  A node carries, for each pattern
    # realized so far, the list of factor indices still compatible with it;
    # monotone pruning applies -- a pattern lost at one position can never
    # be recovered by adding more positions.
    def dfs(start: int, chosen: list, groups: dict) -> bool:
        nonlocal best, best_wit, nodes
        if len(chosen) > len(best):
            best = list(chosen)
            best_wit = {pat: factors[fis[0]] for pat, fis in groups.items()}
        if len(chosen) == k:
            return True
        for idx in range(start, len(positions)):
            nodes += 1
            col = tcol[positions[idx]]
            refined: dict[str, list] = {}
            for pat, fis in groups.items():
                l1 = [fi for fi in fis if col[fi] == 1]
                l2 = [fi for fi in fis if col[fi] == 2]
                if not l1 or not l2:
                    refined = {}
                    break
                refined[pat + "1"] = l1
                refined[pat + "2"] = l2
            if not refined:
                continue
            if dfs(idx + 1, chosen + [positions[idx]], refined):
                return True
        return False

    dfs(0, [], {"": list(range(len(factors)))})
    return best, best_wit, nodes


def verify_independence(lang, u1: "Word | str", u2: "Word | str",
                        positions: Sequence[int], window: int) -> dict | None:
    """Re-check a claimed independence set; witnesses per pattern or None.

    Independent certificate checker for :func:`independence_search` results:
    enumerates all ``2^|I|`` patterns from scratch.
    """
    u1, u2 = Word(u1), Word(u2)
    positions = list(positions)
    if isinstance(lang, FullShiftLanguage):
        return _realize_all(lang, u1, u2, positions, window)
    factors = lang.factors(window)
    out: dict[str, Word] = {}
    for mask in range(1 << len(positions)):
        pattern = "".join("2" if mask >> i & 1 else "1"
                          for i in range(len(positions)))
        need = [(p, u2 if mask >> i & 1 else u1)
                for i, p in enumerate(positions)]
        hit = next((f for f in factors
                    if all(f.data.startswith(u.data, p) for p, u in need)), None)
        if hit is None:
            return None
        out[pattern] = hit
    return out


# ---------------------------------------------------------------------------
# local recurrence witnesses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LocalRecurrenceResult:
    """Finite-scale witness (or not-found) for local positive recurrence.

    ``found`` means: on the stated net (or exactly, for the cylinder
    method), ``T^l B(x, delta)`` stayed inside ``B(x, eps)`` for every ``l``
    in the FS set of the generators, plus ``l = 0``.  It is a witness at
    this scale only -- no claim about the infinite property is made.
    """

    found: bool
    eps: float
    delta: float | None
    gens: tuple
    fs_checked: tuple
    method: str
    deltas_tried: tuple

    def to_dict(self) -> dict:
        return {"found": self.found, "eps": self.eps, "delta": self.delta,
                "gens": list(self.gens), "fs_checked": list(self.fs_checked),
                "method": self.method, "deltas_tried": list(self.deltas_tried)}


def _net_ok(system: MetricSystem, x, net_points: Sequence, l: int,
            eps: float) -> bool:
    for y in net_points:
        z = system.power(y, l) if system.power is not None else y
        if system.power is None:
            for _ in range(l):
                z = system.step(z)
        if system.distance(z, x) >= eps:
            return False
    return True


def local_recurrence_witness(system: MetricSystem, x, eps: float,
                             net: Callable[[object, float], Sequence],
                             horizon: int = 10_000, depth: int = 3,
                             delta_halvings: int = 4) -> LocalRecurrenceResult:
    """Search for ``delta`` and FS generators keeping a ball near ``x``.

    For each ``delta`` in ``eps/2, eps/4, ..., eps/2^delta_halvings`` the
    ball ``B(x, delta)`` is represented by the caller-supplied ``net`` and
    generators ``p_1 < ... < p_depth <= horizon`` are searched depth-first in
    ascending order; a candidate is kept only if *every* FS sum it creates
    keeps the whole net inside ``B(x, eps)``.  The first full generator set
    wins.  The ``delta`` ladder bottoms out at ``eps / 2^delta_halvings`` on
    purpose: shrinking ``delta`` indefinitely would eventually produce
    vacuous witnesses, so exhausting the ladder is reported as not-found.
    """
    if eps <= 0:
        raise UsageError("eps must be positive")
    if not 1 <= depth <= 4:
        raise UsageError("depth must lie in [1, 4]")
    if horizon < 1:
        raise UsageError("horizon must be >= 1")

    deltas = tuple(eps / 2 ** i for i in range(1, delta_halvings + 1))

    # identity-like fast path: if the map moves no net point of the first
    # ball, any generators work and delta may be taken as eps itself
    probe = list(net(x, deltas[0])) + [x]
    if all(system.distance(system.step(y), y) == 0.0 for y in probe):
        gens = tuple(range(1, depth + 1))
        return LocalRecurrenceResult(
            found=True, eps=eps, delta=eps, gens=gens,
            fs_checked=fs_sums(gens), method="net-sampled (pointwise fixed)",
            deltas_tried=(eps,))

    for delta in deltas:
        net_points = list(net(x, delta))
        if not net_points:
            raise UsageError("net callback produced no points")

        def extend(gens: list, start: int) -> tuple | None:
            if len(gens) == depth:
                return tuple(gens)
            for p in range(start, horizon + 1):
                new_sums = [s + p for s in fs_sums(gens)] + [p] if gens else [p]
                if all(_net_ok(system, x, net_points, l, eps) for l in new_sums):
                    got = extend(gens + [p], p + 1)
                    if got is not None:
                        return got
            return None

        found = extend([], 1)
        if found is not None:
            return LocalRecurrenceResult(
                found=True, eps=eps, delta=delta, gens=found,
                fs_checked=fs_sums(found), method="net-sampled",
                deltas_tried=deltas[: deltas.index(delta) + 1])
    return LocalRecurrenceResult(found=False, eps=eps, delta=None, gens=(),
                                 fs_checked=(), method="net-sampled",
                                 deltas_tried=deltas)


def full_shift_local_recurrence(eps: float, depth: int = 3,
                                delta_halvings: int = 4) -> LocalRecurrenceResult:
    """Exact-cylinder version at the fixed point ``0^inf`` of the full shift.

    With the metric ``d(x,y) = 2^-min{i : x_i != y_i}``, the open ball
    ``B(0^inf, r)`` *is* the cylinder of ``c(r)`` zeros with
    ``c(r) = floor(log2(1/r)) + 1``, and ``sigma^l`` of a zero-cylinder is
    again a zero-cylinder (shorter by ``l``) -- so ball containment is
    decided exactly, with no net and no sampling:
    ``sigma^l [0^m] subset [0^c]  iff  l <= m - c``.
    Net sampling is deliberately not used here: finite nets of eventually-
    periodic points sit inside deep cylinders and would certify containments
    that fail on the full ball.
    """
    if eps <= 0 or eps >= 1:
        raise UsageError("eps must lie in (0, 1)")
    if not 1 <= depth <= 4:
        raise UsageError("depth must lie in [1, 4]")

    def forced_zeros(r: float) -> int:
        c = 1
        while 2.0 ** (-c) >= r:
            c += 1
        return c

    c_eps = forced_zeros(eps)
    deltas = tuple(eps / 2 ** i for i in range(1, delta_halvings + 1))
    for delta in deltas:
        m = forced_zeros(delta)          # B(0^inf, delta) = [0^m]
        l_max = m - c_eps                # sigma^l [0^m] subset [0^c] iff l <= m-c
        # need all FS sums of `depth` distinct positive gens <= l_max;
        # the minimum possible total is 1 + 2 + ... + depth
        min_total = depth * (depth + 1) // 2
        if min_total <= l_max:
            gens = tuple(range(1, depth + 1))
            return LocalRecurrenceResult(
                found=True, eps=eps, delta=delta, gens=gens,
                fs_checked=fs_sums(gens), method="exact-cylinder",
                deltas_tried=deltas[: deltas.index(delta) + 1])
    return LocalRecurrenceResult(found=False, eps=eps, delta=None, gens=(),
                                 fs_checked=(), method="exact-cylinder",
                                 deltas_tried=deltas)
