"""Hausdorff metric, Vietoris-basis membership and recurrence scans.

A dynamical system is wrapped as a :class:`MetricSystem` (a distance plus a
step map, optionally an inverse and a closed-form power).  Finite point sets
stand in for compact subsets -- they are dense in the hyperspace, and every
quantity here is computed on them exactly as defined:

* :func:`hausdorff` -- the max-min formula;
* :func:`hausdorff_eps` -- the equivalent epsilon-neighborhood infimum,
  evaluated by bisection of the coverage predicate (kept as an independent
  formulation so the two can be cross-checked);
* :func:`recurrence_scan` -- ``min over 1 <= j <= horizon`` of
  ``d_H(T_K^j A, A)`` for the induced map ``T_K`` (pointwise application);
* :func:`vietoris_contains` -- membership of a set in a basic Vietoris
  neighborhood ``<U_1, ..., U_n>``;
* :func:`orbit_sample_set` -- first-hit sampling ``{T^{k_i} x}`` of a list
  of target opens, the standard way of producing a set inside a prescribed
  Vietoris neighborhood.

Everything is pure; sets are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

from .errors import UnsupportedDirectionError, UsageError

Point = Any


@dataclass(frozen=True)
class MetricSystem:
    """A metric space together with a self-map.

    ``distance`` must be a metric on the points actually used (this is
    property-tested, not assumed).  ``power``, when given, must satisfy
    ``power(x, 1) == step(x)`` and the composition law
    ``power(x, a+b) == power(power(x, a), b)``; backward dynamics come from
    either ``inverse_step`` or a ``power`` accepting negative exponents.
    ``diameter``, when known, seeds the bisection in :func:`hausdorff_eps`.
    """

    name: str
    distance: Callable[[Point, Point], float]
    step: Callable[[Point], Point]
    inverse_step: Callable[[Point], Point] | None = None
    power: Callable[[Point, int], Point] | None = None
    diameter: float | None = None

    def __repr__(self) -> str:  # avoid dumping callables
        return f"MetricSystem({self.name!r})"


def _dedup(points: Sequence[Point], dist: Callable, tol: float) -> tuple:
    kept: list[Point] = []
    for p in points:
        if all(dist(p, q) >= tol for q in kept):
            kept.append(p)
    return tuple(kept)


@dataclass(frozen=True)
class FinitePointSet:
    """A non-empty finite set of points of one system.

    Points closer than ``merge_tol`` are merged at construction (first one
    wins), so the representation really is a set at the working resolution.
    Build through :meth:`from_points`.
    """

    system: MetricSystem
    points: tuple = field(default=())
    merge_tol: float = 1e-12

    def __post_init__(self) -> None:
        if not self.points:
            raise UsageError("a point set must be non-empty")

    @classmethod
    def from_points(cls, system: MetricSystem, points: Iterable[Point],
                    merge_tol: float = 1e-12, dedup: bool = True
                    ) -> "FinitePointSet":
        pts = tuple(points)
        if dedup:
            pts = _dedup(pts, system.distance, merge_tol)
        return cls(system=system, points=pts, merge_tol=merge_tol)

    def __len__(self) -> int:
        return len(self.points)

    def apply(self, n: int = 1, dedup: bool = True) -> "FinitePointSet":
        """Image under ``T_K^n`` -- the underlying map applied pointwise."""
        pts = _iterate(self.system, self.points, n)
        return FinitePointSet.from_points(self.system, pts,
                                          merge_tol=self.merge_tol, dedup=dedup)

    def union(self, other: "FinitePointSet") -> "FinitePointSet":
        _same_system(self, other)
        return FinitePointSet.from_points(
            self.system, self.points + other.points, merge_tol=self.merge_tol)


def _same_system(a: FinitePointSet, b: FinitePointSet) -> None:
    if a.system is not b.system:
        raise UsageError(
            f"point sets live over different systems "
            f"({a.system.name!r} vs {b.system.name!r})")


def _iterate(system: MetricSystem, points: Sequence[Point], n: int) -> tuple:
    """Pointwise ``T^n``; closed-form power when available."""
    if n == 0:
        return tuple(points)
    if system.power is not None:
        return tuple(system.power(p, n) for p in points)
    if n > 0:
        step = system.step
    else:
        if system.inverse_step is None:
            raise UnsupportedDirectionError(
                f"{system.name!r} has no inverse_step and no closed-form "
                f"power; backward iteration is unsupported")
        step = system.inverse_step
    out = tuple(points)
    for _ in range(abs(n)):
        out = tuple(step(p) for p in out)
    return out


# ---------------------------------------------------------------------------
# Hausdorff distance, two ways
# ---------------------------------------------------------------------------

def _directed(src: Sequence[Point], dst: Sequence[Point],
              dist: Callable) -> float:
    worst = 0.0
    for p in src:
        best = min(dist(p, q) for q in dst)
        if best > worst:
            worst = best
    return worst


def hausdorff(a: FinitePointSet, b: FinitePointSet) -> float:
    """max-min formulation of ``d_H``."""
    _same_system(a, b)
    d = a.system.distance
    return max(_directed(a.points, b.points, d),
               _directed(b.points, a.points, d))


def _covered(src: Sequence[Point], dst: Sequence[Point], dist: Callable,
             eps: float) -> bool:
    return all(any(dist(p, q) <= eps for q in dst) for p in src)


def hausdorff_eps(a: FinitePointSet, b: FinitePointSet,
                  tol: float = 1e-13) -> float:
    """epsilon-neighborhood formulation of ``d_H``.

    Returns (within ``tol``) the infimum of ``eps`` such that each set is
    contained in the ``eps``-neighborhood of the other, found by bisecting
    the coverage predicate.  Deliberately does not reuse the max-min
    computation: the two formulations are cross-checked against each other.
    """
    _same_system(a, b)
    d = a.system.distance

    def covered(eps: float) -> bool:
        return (_covered(a.points, b.points, d, eps)
                and _covered(b.points, a.points, d, eps))

    hi = a.system.diameter if a.system.diameter is not None else 1.0
    while not covered(hi):
        hi *= 2.0
        if hi > 1e30:
            raise UsageError("coverage never reached; distance is broken")
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if covered(mid):
            hi = mid
        else:
            lo = mid
    return hi


def metric_axiom_violations(dist: Callable, points: Sequence[Point],
                            tol: float = 1e-12) -> list:
    """Symmetry / identity / nonnegativity / triangle over a sample.

    Returns human-readable violation records (empty = axioms hold on the
    sample at tolerance ``tol``; symmetry and identity are required exactly,
    the triangle inequality within ``tol``).
    """
    bad = []
    n = len(points)
    d = [[dist(points[i], points[j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        if d[i][i] != 0.0:
            bad.append(("identity", i, d[i][i]))
        for j in range(n):
            if d[i][j] < 0.0:
                bad.append(("nonnegative", (i, j), d[i][j]))
            if d[i][j] != d[j][i]:
                bad.append(("symmetry", (i, j), d[i][j] - d[j][i]))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if d[i][k] > d[i][j] + d[j][k] + tol:
                    bad.append(("triangle", (i, j, k),
                                d[i][k] - d[i][j] - d[j][k]))
    return bad


# ---------------------------------------------------------------------------
# recurrence scans of the induced map
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScanResult:
    """Outcome of a recurrence scan of ``T_K`` on one finite set."""

    min_distance: float
    argmin: int
    horizon: int
    direction: str
    used_power: bool
    profile: tuple | None
    displacement_violations: tuple

    def to_dict(self) -> dict:
        return {
            "min_distance": self.min_distance, "argmin": self.argmin,
            "horizon": self.horizon, "direction": self.direction,
            "used_power": self.used_power,
            "displacement_violations": list(self.displacement_violations),
            "profile_retained": self.profile is not None,
        }


def recurrence_scan(system: MetricSystem, a: FinitePointSet, horizon: int,
                    direction: str = "forward",
                    keep_profile: bool = False) -> ScanResult:
    """``min over 1 <= j <= horizon`` of ``d_H(T_K^j A, A)``.

    Uses the closed-form ``power`` when the system has one, otherwise
    iterates ``step`` (or ``inverse_step`` going backward) cumulatively.
    Alongside each ``d_H`` the pointwise displacement bound
    ``d_H(T_K^j A, A) <= max_x d(T^j x, x)`` is checked; it holds exactly on
    finite sets, so any violation (recorded, never silently dropped) means a
    broken distance or step.
    """
    if horizon < 1:
        raise UsageError("horizon must be >= 1")
    if direction not in ("forward", "backward"):
        raise UsageError(f"unknown direction {direction!r}")
    sign = 1 if direction == "forward" else -1
    if sign < 0 and system.power is None and system.inverse_step is None:
        raise UnsupportedDirectionError(
            f"{system.name!r} supports no backward dynamics "
            f"(no inverse_step, no power)")
    dist = system.distance
    use_power = system.power is not None

    base = a.points
    current = base
    best = float("inf")
    best_j = 0
    profile: list | None = [] if keep_profile else None
    violations: list = []
    for j in range(1, horizon + 1):
        if use_power:
            current = tuple(system.power(p, sign * j) for p in base)
        else:
            stepper = system.step if sign > 0 else system.inverse_step
            current = tuple(stepper(p) for p in current)
        image = FinitePointSet.from_points(system, current,
                                           merge_tol=a.merge_tol, dedup=False)
        dh = hausdorff(a, image)
        bound = max(dist(current[i], base[i]) for i in range(len(base)))
        if dh > bound:
            violations.append((j, dh, bound))
        if profile is not None:
            profile.append(dh)
        if dh < best:
            best = dh
            best_j = sign * j
    return ScanResult(
        min_distance=best, argmin=best_j, horizon=horizon,
        direction=direction, used_power=use_power,
        profile=tuple(profile) if profile is not None else None,
        displacement_violations=tuple(violations))


# ---------------------------------------------------------------------------
# Vietoris basis membership and orbit sampling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Ball:
    """Open metric ball -- the opens used in basic Vietoris neighborhoods."""

    center: Point
    radius: float

    def contains(self, system: MetricSystem, p: Point) -> bool:
        return system.distance(self.center, p) < self.radius


@dataclass(frozen=True)
class VietorisResult:
    contained: bool
    uncovered_points: tuple      # indices into the set
    unmet_opens: tuple           # indices into the list of opens

    def to_dict(self) -> dict:
        return {"contained": self.contained,
                "uncovered_points": list(self.uncovered_points),
                "unmet_opens": list(self.unmet_opens)}


def vietoris_contains(a: FinitePointSet, opens: Sequence[Ball]) -> VietorisResult:
    """Is ``A`` in the basic neighborhood ``<U_1, ..., U_n>``?

    True iff ``A`` is covered by the union of the opens and meets every
    single one -- the definition, verified literally.
    """
    if not opens:
        raise UsageError("a basic Vietoris neighborhood needs >= 1 open")
    sys_ = a.system
    uncovered = tuple(i for i, p in enumerate(a.points)
                      if not any(u.contains(sys_, p) for u in opens))
    unmet = tuple(i for i, u in enumerate(opens)
                  if not any(u.contains(sys_, p) for p in a.points))
    return VietorisResult(contained=not uncovered and not unmet,
                          uncovered_points=uncovered, unmet_opens=unmet)


@dataclass(frozen=True)
class OrbitSampleResult:
    """First-hit sampling of targets along one forward orbit.

    ``found`` is False when some target was never visited within the
    horizon; ``first_hits`` then records the partial visit times (None for
    the missed targets) and ``point_set`` is None.  Not-found is an answer,
    not an error.
    """

    found: bool
    first_hits: tuple
    point_set: FinitePointSet | None
    horizon: int

    def to_dict(self) -> dict:
        return {"found": self.found, "first_hits": list(self.first_hits),
                "horizon": self.horizon,
                "points": list(self.point_set.points) if self.point_set else None}


def orbit_sample_set(system: MetricSystem, x: Point, targets: Sequence[Ball],
                     horizon: int) -> OrbitSampleResult:
    """Collect ``{T^{k_i} x}`` with ``k_i`` the first hit time of target i.

    By construction the returned set lies in the Vietoris neighborhood of
    the targets (when every target is hit): it meets each target at its hit
    point and contains nothing else.
    """
    if not targets:
        raise UsageError("need at least one target open")
    if horizon < 0:
        raise UsageError("horizon must be >= 0")
    hits: list = [None] * len(targets)
    hit_points: list = [None] * len(targets)
    p = x
    for n in range(horizon + 1):
        for i, t in enumerate(targets):
            if hits[i] is None and t.contains(system, p):
                hits[i] = n
                hit_points[i] = p
        if all(h is not None for h in hits):
            break
        p = system.step(p)
    found = all(h is not None for h in hits)
    pset = None
    if found:
        pset = FinitePointSet.from_points(
            system, [q for q in hit_points if q is not None])
    return OrbitSampleResult(found=found, first_hits=tuple(hits),
                             point_set=pset, horizon=horizon)
