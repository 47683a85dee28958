"""Storage rate, transmission rates and distortions of the incremental scheme.

For one requested source with conditional spectra ``lambda^{(j)}`` (one per
possible predecessor ``j``) and an operating point ``(delta, theta)``:

    R_j = (1/n) sum_i max(0, log2(lambda_i^{(j)} / theta) / 2)
    S   = (1/n) sum_i max(0, max_j log2(lambda_i^{(j)} / theta) / 2)
    D_j = (1/n) sum_i min(theta, lambda_i^{(j)} delta / (lambda_i^{(j)} + delta))

Rates are in bits per source symbol.  ``delta = inf`` is the classical limit,
where the distortion reduces to reverse water-filling, ``min(theta, lambda)``.
Spectra of different predecessors are aligned by descending eigenvalue rank
for the component-wise maximum in ``S``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Optional, Sequence

import numpy as np

from .covariance import SourceNetwork
from .errors import DimensionMismatch, InvalidParameter, TargetUnreachable
from .spectrum import as_spectrum, eigenvalues

__all__ = [
    "CLASSICAL",
    "OperatingPoint",
    "RDTuple",
    "RDCurve",
    "transmission_rate",
    "storage_rate",
    "distortion",
    "distortion_caps",
    "channel_rate",
    "network_spectra",
    "evaluate_tuple",
    "solve_theta",
    "solve_theta_worst",
    "sweep_curve",
    "default_theta_grid",
    "POLICIES",
]

#: marker for the delta -> infinity limit
CLASSICAL = math.inf

POLICIES = ("classical", "theta_equals_delta", "fixed_delta")


@dataclass(frozen=True)
class OperatingPoint:
    """Test-channel noise ``delta`` and water level ``theta`` (variance units)."""

    delta: float
    theta: float

    def __post_init__(self):
        if not (self.delta > 0):
            raise InvalidParameter(f"delta must be > 0 or CLASSICAL, got {self.delta!r}")
        if not (self.theta > 0 and math.isfinite(self.theta)):
            raise InvalidParameter(f"theta must be a positive finite number, got {self.theta!r}")

    @property
    def classical(self) -> bool:
        return math.isinf(self.delta)


def _lam(spec) -> np.ndarray:
    return as_spectrum(spec).eigenvalues


def _component_rates(lam: np.ndarray, theta: float) -> np.ndarray:
    return np.maximum(0.0, 0.5 * np.log2(lam / theta))


def transmission_rate(spec, theta: float) -> float:
    """Rate needed when ``spec`` is the conditional spectrum of the held predecessor."""
    if not theta > 0:
        raise InvalidParameter("theta must be > 0")
    return float(_component_rates(_lam(spec), theta).mean())


def _stack(specs) -> np.ndarray:
    arrays = [_lam(s) for s in specs]
    if not arrays:
        raise InvalidParameter("need at least one spectrum")
    sizes = {a.size for a in arrays}
    if len(sizes) != 1:
        raise DimensionMismatch(f"spectra have different dimensions: {sorted(sizes)}")
    return np.vstack(arrays)


def storage_rate(specs, theta: float) -> float:
    """Stored rate covering every predecessor, with the max taken per component.

    ``specs`` is a sequence or mapping of spectra sharing one dimension.
    """
    if not theta > 0:
        raise InvalidParameter("theta must be > 0")
    if isinstance(specs, Mapping):
        specs = list(specs.values())
    lam = _stack(specs)
    return float(_component_rates(lam, theta).max(axis=0).mean())


def distortion_caps(spec, delta: float) -> np.ndarray:
    """Per-component distortion ``lambda delta / (lambda + delta)`` (``lambda`` when classical)."""
    lam = _lam(spec)
    if math.isinf(delta):
        return lam.copy()
    return lam * delta / (lam + delta)


def distortion(spec, point: OperatingPoint) -> float:
    return float(np.minimum(point.theta, distortion_caps(spec, point.delta)).mean())


def channel_rate(spec, delta: float) -> float:
    """Rate ``(1/n) sum_i log2(lambda_i / d_i) / 2`` of the test channel at noise ``delta``.

    This equals ``(1/n) sum_i log2(1 + lambda_i / delta) / 2`` and is zero in
    the classical limit.
    """
    if math.isinf(delta):
        return 0.0
    return float((0.5 * np.log2(1.0 + _lam(spec) / delta)).mean())


@lru_cache(maxsize=64)
def network_spectra(net: SourceNetwork) -> dict:
    """Conditional spectrum of each predecessor, keyed by predecessor id."""
    return {p.id: eigenvalues(net.covariance(p.id)) for p in net.predecessors}


@dataclass(frozen=True)
class RDTuple:
    """One evaluated (storage, transmission rates, distortions) point."""

    storage_rate: float
    transmission_rates: dict
    distortions: dict
    point: OperatingPoint
    n: int
    #: per predecessor, test-channel rate minus transmission rate; positive
    #: values flag points where the proof's rate exceeds the printed rate
    rate_gaps: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for j, r in self.transmission_rates.items():
            if not (0.0 <= r <= self.storage_rate + 1e-15):
                raise AssertionError(f"rate {r} for {j!r} is outside [0, S={self.storage_rate}]")

    @property
    def flagged(self) -> list:
        return [j for j, gap in self.rate_gaps.items() if gap > 1e-12]

    @property
    def worst_distortion(self) -> float:
        return max(self.distortions.values())


def evaluate_tuple(net: SourceNetwork, point: OperatingPoint, spectra: Optional[dict] = None) -> RDTuple:
    specs = spectra if spectra is not None else network_spectra(net)
    rates = {j: transmission_rate(specs[j], point.theta) for j in net.ids}
    dists = {j: distortion(specs[j], point) for j in net.ids}
    gaps = {j: channel_rate(specs[j], point.delta) - rates[j] for j in net.ids}
    return RDTuple(
        storage_rate=storage_rate([specs[j] for j in net.ids], point.theta),
        transmission_rates=rates,
        distortions=dists,
        point=point,
        n=net.n,
        rate_gaps=gaps,
    )


def _waterlevel(caps: np.ndarray, target: float) -> float:
    """Smallest ``theta`` with ``mean(min(theta, caps)) == target``.

    The mean is piecewise linear in ``theta``; with the caps sorted
    ascending, ``k`` saturated components give
    ``theta = (n * target - sum(caps[:k])) / (n - k)``.
    """
    c = np.sort(caps)
    n = c.size
    prefix = np.concatenate(([0.0], np.cumsum(c)))
    total = n * target
    for k in range(n):
        theta = (total - prefix[k]) / (n - k)
        if theta <= c[k]:
            return float(max(theta, c[k - 1] if k else 0.0))
    return float(c[-1])


def _check_target(cap_mean: float, target: float) -> None:
    if not (target > 0 and math.isfinite(target)):
        raise InvalidParameter(f"target distortion must be positive, got {target!r}")
    if target > cap_mean * (1 + 1e-12):
        raise TargetUnreachable(
            f"target distortion {target:.6g} exceeds the largest achievable {cap_mean:.6g}"
        )


def solve_theta(spec, delta: float, target_distortion: float) -> float:
    """Water level giving ``distortion(spec, (delta, theta)) == target_distortion``.

    When the target equals the saturated maximum, the infimum of the
    admissible levels (the largest per-component cap) is returned.

    Raises
    ------
    TargetUnreachable
        If the target exceeds ``mean(lambda delta / (lambda + delta))``.
    """
    caps = distortion_caps(spec, delta)
    _check_target(float(caps.mean()), target_distortion)
    return _waterlevel(caps, min(target_distortion, float(caps.mean())))


def solve_theta_worst(spectra: Sequence, delta: float, target_distortion: float,
                      rtol: float = 1e-13) -> float:
    """Water level at which the largest distortion over all spectra meets the target.

    ``max_j D_j(theta)`` is continuous and non-decreasing, so bisection on
    ``theta`` in ``(0, max cap]`` is used.
    """
    caps = [distortion_caps(s, delta) for s in spectra]
    worst_cap = max(float(c.mean()) for c in caps)
    _check_target(worst_cap, target_distortion)
    target = min(target_distortion, worst_cap)

    def worst(theta):
        return max(float(np.minimum(theta, c).mean()) for c in caps)

    lo, hi = 0.0, max(float(c.max()) for c in caps)
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if worst(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class RDCurve:
    points: tuple
    policy: str
    grid_kind: str
    tag: str = ""

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def storage(self) -> np.ndarray:
        return np.array([p.storage_rate for p in self.points])

    def rates(self, j) -> np.ndarray:
        return np.array([p.transmission_rates[j] for p in self.points])

    def distortions(self, j) -> np.ndarray:
        return np.array([p.distortions[j] for p in self.points])

    def thetas(self) -> np.ndarray:
        return np.array([p.point.theta for p in self.points])


def normalize_policy(policy: str) -> str:
    p = policy.replace("-", "_")
    p = {"theta_eq_delta": "theta_equals_delta"}.get(p, p)
    if p not in POLICIES:
        raise InvalidParameter(f"unknown sweep policy {policy!r}; expected one of {POLICIES}")
    return p


def _delta_for(policy: str, theta: float, delta: Optional[float]) -> float:
    if policy == "classical":
        return CLASSICAL
    if policy == "theta_equals_delta":
        return theta
    if delta is None or not delta > 0:
        raise InvalidParameter("fixed_delta policy needs a positive delta")
    return float(delta)


def default_theta_grid(spectra, count: int = 60) -> np.ndarray:
    """``count`` log-spaced levels from ``lambda_max`` down to ``1e-3 lambda_max``."""
    lam_max = max(as_spectrum(s).max for s in spectra)
    return np.geomspace(lam_max, 1e-3 * lam_max, count)


def _check_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float).ravel()
    if g.size == 0:
        raise InvalidParameter("sweep grid is empty")
    if not np.all(np.isfinite(g)) or np.any(g <= 0):
        raise InvalidParameter("sweep grid values must be positive and finite")
    d = np.diff(g)
    if g.size > 1 and not (np.all(d > 0) or np.all(d < 0)):
        raise InvalidParameter("sweep grid must be strictly monotone")
    return g


def sweep_curve(net: SourceNetwork, policy: str = "classical", grid=None, grid_kind: str = "theta",
                delta: Optional[float] = None, spectra: Optional[dict] = None) -> RDCurve:
    """Evaluate the rate/distortion tuple along a grid.

    Parameters
    ----------
    policy : {'classical', 'theta_equals_delta', 'fixed_delta'}
        How ``delta`` is tied to each grid point.  ``fixed_delta`` uses the
        ``delta`` argument.
    grid : array_like, optional
        Water levels (``grid_kind='theta'``) or target distortions
        (``grid_kind='distortion'``).  A distortion target is met by the worst
        predecessor, i.e. ``max_j D_j == target``.  Defaults to
        :func:`default_theta_grid`.
    """
    policy = normalize_policy(policy)
    specs = spectra if spectra is not None else network_spectra(net)
    ordered = [specs[j] for j in net.ids]
    if grid is None:
        grid, grid_kind = default_theta_grid(ordered), "theta"
    grid = _check_grid(grid)
    points = []
    for value in grid:
        if grid_kind == "theta":
            theta = float(value)
        elif grid_kind == "distortion":
            if policy == "theta_equals_delta":
                raise InvalidParameter("distortion grids are not supported with theta_equals_delta")
            theta = solve_theta_worst(ordered, _delta_for(policy, 1.0, delta), float(value))
        else:
            raise InvalidParameter(f"unknown grid kind {grid_kind!r}")
        point = OperatingPoint(_delta_for(policy, theta, delta), theta)
        points.append(evaluate_tuple(net, point, specs))
    return RDCurve(tuple(points), policy, grid_kind, net.source_id)
