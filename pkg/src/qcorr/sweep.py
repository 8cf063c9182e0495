"""Point reports, grid sweeps and sudden-death boundary tracing over the family."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from ._parallel import worker_count
from .bell import bell_S_closed
from .entanglement import concurrence_closed, concurrence_signed
from .errors import DomainError, NoBoundary
from .states import StatePoint
from .steering import C16_REPORTED, combined_axes_16, steering_parameter_family
from .unsteering import unsteering_T, unsteering_closed

MEASURES = ("entanglement", "bell", "steering", "unsteering")
ZERO_TOL = 1e-9
# slack on threshold comparisons; S(theta, 1) evaluates to 2 + 4e-16
FLAG_TOL = 1e-12


@lru_cache(maxsize=1)
def _axes16():
    return combined_axes_16()


@dataclass(frozen=True)
class CorrelationReport:
    point: StatePoint
    concurrence: float
    bell_s: float
    bell_branch: str
    t16: float
    t_u: float
    T_u: float
    entangled: bool = field(init=False)
    bell_nonlocal: bool = field(init=False)
    steerable: bool = field(init=False)
    unsteerable: bool = field(init=False)
    undetermined: bool = field(init=False)

    def __post_init__(self):
        flags = {
            "entangled": self.concurrence > FLAG_TOL,
            "bell_nonlocal": self.bell_s > 2 + FLAG_TOL,
            "steerable": self.t16 > C16_REPORTED + FLAG_TOL,
            # NaN (singular Bob marginal) never certifies unsteerability
            "unsteerable": self.t_u <= 1 + FLAG_TOL,
        }
        flags["undetermined"] = not flags["steerable"] and not flags["unsteerable"]
        for k, v in flags.items():
            object.__setattr__(self, k, bool(v))

    @property
    def flags(self) -> dict[str, bool]:
        return {k: getattr(self, k) for k in
                ("entangled", "bell_nonlocal", "steerable", "unsteerable", "undetermined")}


def evaluate_point(p: StatePoint) -> CorrelationReport:
    """All quantifiers of the family state at ``p`` from their closed forms.

    At the corner theta = pi/2, D = 0 Bob's marginal is pure and the
    unsteerability parameter is reported as NaN.
    """
    bell = bell_S_closed(p)
    try:
        t_u = unsteering_closed(p)
        big_t = unsteering_T(t_u)
    except DomainError:
        t_u = big_t = math.nan
    return CorrelationReport(
        point=p,
        concurrence=concurrence_closed(p),
        bell_s=bell.value,
        bell_branch=bell.branch,
        t16=steering_parameter_family(p, _axes16()),
        t_u=t_u,
        T_u=big_t,
    )


def sweep_grid(theta_range: tuple[float, float], d_range: tuple[float, float],
               steps: int | tuple[int, int]) -> list[CorrelationReport]:
    """Reports on a regular grid, theta-major then damping."""
    n_theta, n_d = (steps, steps) if isinstance(steps, int) else steps
    if n_theta < 2 or n_d < 2:
        raise DomainError("a grid needs at least two steps per axis")
    thetas = np.linspace(theta_range[0], theta_range[1], n_theta)
    ds = np.linspace(d_range[0], d_range[1], n_d)
    # validate the ranges before spawning work
    StatePoint(float(thetas[0]), float(ds[0]))
    StatePoint(float(thetas[-1]), float(ds[-1]))

    def row(th: float) -> list[CorrelationReport]:
        return [evaluate_point(StatePoint(float(th), float(d))) for d in ds]

    workers = min(worker_count(), n_theta)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, thetas))
    else:
        rows = [row(th) for th in thetas]
    return [r for rs in rows for r in rs]


def margin_function(measure: str, theta: float) -> Callable[[float], float]:
    """Signed distance from the local/nonlocal threshold along fixed ``theta``.

    Positive values lie on the correlated side (entangled, Bell nonlocal,
    steerable, or not certified unsteerable).
    """
    if measure == "entanglement":
        return lambda d: concurrence_signed(StatePoint(theta, d))
    if measure == "bell":
        return lambda d: bell_S_closed(StatePoint(theta, d)).value - 2.0
    if measure == "steering":
        axes = _axes16()
        return lambda d: steering_parameter_family(StatePoint(theta, d), axes) - C16_REPORTED
    if measure == "unsteering":
        return lambda d: unsteering_closed(StatePoint(theta, d)) - 1.0
    raise DomainError(f"unknown measure {measure!r}; expected one of {MEASURES}")


def _bisect(g: Callable[[float], float], lo: float, hi: float, g_lo: float, tol: float) -> float:
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if g_mid == 0.0:
            return mid
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class RootScan:
    crossings: list[float]
    tangencies: list[float]


def scan_roots(g: Callable[[float], float], scan_step: float = 1e-3, tol: float = 1e-9,
               lo: float = 0.0, hi: float = 1.0) -> RootScan:
    """Bracket every sign change of ``g`` on ``[lo, hi]`` and bisect it to ``tol``.

    Grid points where ``|g| < 1e-9`` without a sign change across them (including
    touches at either end of the interval) are reported as tangencies.
    """
    n = max(2, int(round((hi - lo) / scan_step)) + 1)
    xs = np.linspace(lo, hi, n)
    gs = np.array([g(float(x)) for x in xs])
    zero = np.abs(gs) < ZERO_TOL
    crossings, tangencies = [], []
    i = 0
    while i < n:
        if zero[i]:
            j = i
            while j + 1 < n and zero[j + 1]:
                j += 1
            left = gs[i - 1] if i > 0 else None
            right = gs[j + 1] if j + 1 < n else None
            where = float(0.5 * (xs[i] + xs[j]))
            if left is not None and right is not None and (left > 0) != (right > 0):
                crossings.append(where)
            else:
                tangencies.append(where)
            i = j + 1
            continue
        if i + 1 < n and not zero[i + 1] and (gs[i] > 0) != (gs[i + 1] > 0):
            crossings.append(_bisect(g, float(xs[i]), float(xs[i + 1]), float(gs[i]), tol))
        i += 1
    return RootScan(crossings, tangencies)


def _check_theta(theta: float):
    if not (0.0 < theta < math.pi / 2):
        raise DomainError(f"theta={theta!r} must lie strictly inside (0, pi/2)")


def find_boundary(measure: str, theta: float, scan_step: float = 1e-3,
                  tol: float = 1e-9) -> list[float]:
    """Damping values where ``measure`` crosses its threshold at fixed ``theta``, ascending."""
    _check_theta(theta)
    return scan_roots(margin_function(measure, theta), scan_step, tol).crossings


def find_tangencies(measure: str, theta: float, scan_step: float = 1e-3) -> list[float]:
    """Damping values where ``measure`` touches its threshold without crossing."""
    _check_theta(theta)
    return scan_roots(margin_function(measure, theta), scan_step).tangencies


@dataclass(frozen=True)
class BoundaryCurve:
    measure: str
    samples: list[tuple[float, float, str | None]]
    switch_points: list[tuple[float, float]]
    tangencies: list[tuple[float, float]] = field(default_factory=list)


def _scan(measure: str, theta: float, scan_step: float):
    _check_theta(theta)
    scan = scan_roots(margin_function(measure, theta), scan_step)
    if not scan.crossings:
        return None, scan.tangencies
    d = scan.crossings[0]
    branch = bell_S_closed(StatePoint(theta, d)).branch if measure == "bell" else None
    return (d, branch), scan.tangencies


def _first_crossing(measure: str, theta: float, scan_step: float):
    return _scan(measure, theta, scan_step)[0]


def trace_boundary_curve(measure: str, theta_min: float, theta_max: float,
                         theta_steps: int, scan_step: float = 1e-3,
                         switch_tol: float = 1e-4) -> BoundaryCurve:
    """First crossing at each sampled theta, plus the points where the Bell branch switches.

    Samples without a crossing are skipped; NoBoundary is raised when none cross.
    """
    if measure not in MEASURES:
        raise DomainError(f"unknown measure {measure!r}")
    if theta_steps < 2:
        raise DomainError("theta_steps must be at least 2")
    if not (0.0 < theta_min < theta_max < math.pi / 2):
        raise DomainError("theta range must satisfy 0 < theta_min < theta_max < pi/2")
    thetas = [float(t) for t in np.linspace(theta_min, theta_max, theta_steps)]

    workers = min(worker_count(), theta_steps)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scans = list(pool.map(lambda t: _scan(measure, t, scan_step), thetas))
    else:
        scans = [_scan(measure, t, scan_step) for t in thetas]
    found = [f for f, _ in scans]
    touches = [(t, d) for t, (_, ds) in zip(thetas, scans) for d in ds]

    samples = [(t, f[0], f[1]) for t, f in zip(thetas, found) if f is not None]
    if not samples:
        raise NoBoundary(f"{measure} never crosses its threshold for theta in "
                         f"[{theta_min:.6g}, {theta_max:.6g}]")

    switches = []
    for (t0, _, b0), (t1, _, b1) in zip(samples, samples[1:]):
        if b0 == b1:
            continue
        lo, hi = t0, t1
        while hi - lo > switch_tol:
            mid = 0.5 * (lo + hi)
            f = _first_crossing(measure, mid, scan_step)
            if f is None:
                break
            if f[1] == b0:
                lo = mid
            else:
                hi = mid
        mid = 0.5 * (lo + hi)
        f = _first_crossing(measure, mid, scan_step)
        switches.append((mid, f[0] if f else math.nan))
    return BoundaryCurve(measure, samples, switches, touches)
