"""Parameter-sweep engine: efficiency grids, threshold lengths, robustness."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .coupler import simulate
from .schedules import ModelParams
from .splitter import SplitterParams, simulate_splitter

__all__ = [
    "AxisSpec",
    "SweepSpec",
    "SweepResult",
    "ThresholdResult",
    "TargetNotReached",
    "metric_value",
    "run_sweep",
    "threshold_length",
    "robust_region_fraction",
]

PARAMETERS = ("omega0", "delta0", "total_length")
METRICS = ("final_i2", "splitting_infidelity")


class TargetNotReached(RuntimeError):
    """The target efficiency was not reached anywhere in the search range."""

    def __init__(self, target: float, best_metric: float):
        super().__init__(
            f"target {target} not reached; best metric found was {best_metric}"
        )
        self.target = target
        self.best_metric = best_metric


@dataclass(frozen=True)
class AxisSpec:
    name: str
    lo: float
    hi: float
    count: int

    def __post_init__(self) -> None:
        if self.name not in PARAMETERS:
            raise ValueError(f"axis name must be one of {PARAMETERS}, got {self.name!r}")
        if self.count < 2:
            raise ValueError(f"axis count must be >= 2, got {self.count}")
        if not self.lo < self.hi:
            raise ValueError(f"axis needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.lo < 0:
            raise ValueError(f"axis lo must be >= 0, got {self.lo}")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class SweepSpec:
    axis_x: AxisSpec
    axis_y: AxisSpec
    fixed: dict
    metric: str = "final_i2"
    sta: bool = True
    tol: float = 1e-8
    splitter_mode: str = "reduced_cd"

    def __post_init__(self) -> None:
        if self.axis_x.name == self.axis_y.name:
            raise ValueError("the two sweep axes must differ")
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}, got {self.metric!r}")
        remaining = set(PARAMETERS) - {self.axis_x.name, self.axis_y.name}
        if set(self.fixed) != remaining:
            raise ValueError(f"fixed must provide exactly {sorted(remaining)}")

    def provenance(self) -> dict:
        return {
            "axis_x": vars(self.axis_x) | {},
            "axis_y": vars(self.axis_y) | {},
            "fixed": dict(self.fixed),
            "metric": self.metric,
            "sta": self.sta,
            "tol": self.tol,
            "splitter_mode": self.splitter_mode,
        }


@dataclass(frozen=True)
class SweepResult:
    grid: np.ndarray  # shape (ny, nx), row-major over the y axis
    x_values: np.ndarray
    y_values: np.ndarray
    provenance: dict = field(default_factory=dict)


def metric_value(metric: str, sta: bool, omega0: float, delta0: float,
                 total_length: float, tol: float = 1e-8,
                 splitter_mode: str = "reduced_cd") -> float:
    """Metric for one parameter point; degenerate points (zero coupling or
    zero length) reduce to identity propagation of the input state."""
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    if omega0 == 0.0 or total_length == 0.0:
        # input stays put: I2 = 0 for guide-1 input, I1 = I3 = 0 for the splitter
        return 0.0 if metric == "final_i2" else 0.5
    p = ModelParams(omega0=omega0, delta0=delta0,
                    half_length=total_length / 2.0, sta=sta)
    if metric == "final_i2":
        return simulate(p, input_guide=1, tol=tol).final_i2
    return simulate_splitter(SplitterParams(p, splitter_mode),
                             tol=tol).splitting_infidelity


def evaluate_cell(spec: SweepSpec, **params: float) -> float:
    return metric_value(spec.metric, spec.sta, tol=spec.tol,
                        splitter_mode=spec.splitter_mode, **params)


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Evaluate the metric over the rectangular grid.

    Cells are independent; with workers > 1 they are farmed out to a
    thread pool but each result lands in its own grid slot, so the output
    is bit-identical regardless of parallelism or execution order.
    """
    xs = spec.axis_x.values
    ys = spec.axis_y.values
    grid = np.empty((len(ys), len(xs)))

    def cell(idx: tuple[int, int]) -> None:
        i, j = idx
        params = dict(spec.fixed)
        params[spec.axis_x.name] = float(xs[j])
        params[spec.axis_y.name] = float(ys[i])
        grid[i, j] = evaluate_cell(spec, **params)

    indices = [(i, j) for i in range(len(ys)) for j in range(len(xs))]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(cell, indices))
    else:
        for idx in indices:
            cell(idx)

    return SweepResult(grid=grid, x_values=xs, y_values=ys,
                       provenance=spec.provenance() | {"backend": "adaptive-dop853"})


@dataclass(frozen=True)
class ThresholdResult:
    total_length: float
    achieved_metric: float


def threshold_length(omega0: float, delta0: float, sta: bool, target: float,
                     length_range: tuple[float, float] = (0.0, 2.0),
                     tol: float = 1e-8, coarse_points: int = 100) -> ThresholdResult:
    """Smallest total device length reaching the target transfer efficiency.

    A coarse scan locates the first crossing (final_i2 need not be
    monotone in length); bisection then refines it to 0.01 mm.
    """
    if not 0.0 < target < 1.0:
        raise ValueError(f"target must lie in (0, 1), got {target}")
    lo_range, hi_range = length_range
    if not 0.0 <= lo_range < hi_range:
        raise ValueError(f"invalid search range {length_range}")

    def metric(length: float) -> float:
        return metric_value("final_i2", sta, omega0, delta0, length, tol=tol)

    lengths = np.linspace(lo_range, hi_range, coarse_points)
    values = [metric(float(x)) for x in lengths]
    hit = next((k for k, v in enumerate(values) if v >= target), None)
    if hit is None:
        raise TargetNotReached(target, max(values))

    lo = lo_range if hit == 0 else float(lengths[hit - 1])
    hi = float(lengths[hit])
    achieved = values[hit]
    while hi - lo > 0.01:
        mid = 0.5 * (lo + hi)
        v = metric(mid)
        if v >= target:
            hi, achieved = mid, v
        else:
            lo = mid
    return ThresholdResult(total_length=hi, achieved_metric=achieved)


def robust_region_fraction(result: SweepResult, target: float) -> float:
    """Fraction of grid cells whose metric meets the target."""
    return float(np.mean(result.grid >= target))
