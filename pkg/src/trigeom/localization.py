"""Position estimation from noisy ranges to known towers.

Ranges are simulated as true distance plus Gaussian noise, clamped at zero,
drawn from numpy's PCG64 generator (``np.random.default_rng``) so every run
is replayable from its seed. Estimation is damped Gauss-Newton on the sum of
squared range residuals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Sequence

import numpy as np

from .geometry import GeometryError, Orientation, Point2, Point3, Tolerance, orientation

MAX_ITER = 100
STEP_TOL_REL = 1e-10
LAMBDA0 = 1e-3


class LocalizationError(RuntimeError):
    pass


class DegenerateGeometry(LocalizationError):
    pass


class NonConvergence(LocalizationError):
    def __init__(self, msg: str, estimate: "PositionEstimate"):
        super().__init__(msg)
        self.estimate = estimate


@dataclass(frozen=True)
class Tower:
    id: str
    pos: Point2 | Point3


@dataclass(frozen=True)
class TowerScene:
    towers: tuple[Tower, ...]

    def __post_init__(self):
        towers = tuple(self.towers)
        object.__setattr__(self, "towers", towers)
        if len(towers) < 3:
            raise GeometryError("a scene needs at least 3 towers")
        ids = [t.id for t in towers]
        if len(set(ids)) != len(ids):
            raise GeometryError("tower ids must be unique")
        dims = {len(tuple(t.pos)) for t in towers}
        if len(dims) != 1:
            raise GeometryError("towers mix 2D and 3D positions")
        pts = self.positions
        diag = float(np.linalg.norm(np.ptp(pts, axis=0)))
        for i, j in combinations(range(len(pts)), 2):
            if np.linalg.norm(pts[i] - pts[j]) <= 1e-9 * diag:
                raise GeometryError(f"towers {ids[i]} and {ids[j]} coincide")
        if self.dim == 2 and _all_collinear(pts):
            raise DegenerateGeometry("towers are collinear")

    @classmethod
    def from_points(cls, pts: Sequence, ids: Sequence[str] | None = None) -> "TowerScene":
        ids = ids or [f"T{k + 1}" for k in range(len(pts))]
        towers = []
        for i, p in zip(ids, pts):
            p = tuple(float(c) for c in p)
            towers.append(Tower(str(i), Point2(*p) if len(p) == 2 else Point3(*p)))
        return cls(tuple(towers))

    @property
    def ids(self) -> list[str]:
        return [t.id for t in self.towers]

    @property
    def dim(self) -> int:
        return len(tuple(self.towers[0].pos))

    @property
    def positions(self) -> np.ndarray:
        return np.array([tuple(t.pos) for t in self.towers], dtype=float)

    @property
    def centroid(self) -> np.ndarray:
        return self.positions.mean(axis=0)

    @property
    def diagonal(self) -> float:
        return float(np.linalg.norm(np.ptp(self.positions, axis=0)))

    def subset(self, ids: Sequence[str]) -> "TowerScene":
        by_id = {t.id: t for t in self.towers}
        return TowerScene(tuple(by_id[i] for i in ids))

    def to_json(self) -> dict:
        return {"towers": [{"id": t.id, "pos": list(t.pos)} for t in self.towers]}

    @classmethod
    def from_json(cls, data: dict) -> "TowerScene":
        try:
            towers = data["towers"]
            return cls.from_points([t["pos"] for t in towers], [t["id"] for t in towers])
        except (KeyError, TypeError) as exc:
            raise GeometryError(f"scene JSON: missing or malformed field {exc}") from None


def _all_collinear(pts: np.ndarray) -> bool:
    tol = Tolerance(scale=float(np.linalg.norm(np.ptp(pts, axis=0))))
    a = pts[0]
    far = pts[np.argmax(np.linalg.norm(pts - a, axis=1))]
    return all(orientation(a, far, p, tol) is Orientation.COLLINEAR for p in pts)


@dataclass(frozen=True)
class RangeSet:
    ranges: dict[str, float]
    sigma: float | None = None
    seed: int | None = None

    def __post_init__(self):
        for k, r in self.ranges.items():
            if not (r >= 0 and math.isfinite(r)):
                raise GeometryError(f"range for {k} must be finite and non-negative")

    def as_array(self, scene: TowerScene) -> np.ndarray:
        missing = [i for i in scene.ids if i not in self.ranges]
        if missing:
            raise GeometryError(f"no range for towers {missing}")
        return np.array([self.ranges[i] for i in scene.ids], dtype=float)

    def subset(self, ids: Sequence[str]) -> "RangeSet":
        return RangeSet({i: self.ranges[i] for i in ids}, self.sigma, self.seed)

    def to_json(self) -> dict:
        return {"sigma": self.sigma, "seed": self.seed, "ranges": dict(self.ranges)}

    @classmethod
    def from_json(cls, data: dict) -> "RangeSet":
        if "ranges" not in data:
            raise GeometryError("ranges JSON needs a 'ranges' field")
        return cls({str(k): float(v) for k, v in data["ranges"].items()}, data.get("sigma"), data.get("seed"))


@dataclass(frozen=True)
class PositionEstimate:
    position: Point2
    residuals: dict[str, float]
    rms_residual: float
    iterations: int
    converged: bool
    towers_used: tuple[str, ...]
    cost_history: tuple[float, ...] = ()
    first_round: "PositionEstimate | None" = None

    def error(self, truth) -> float:
        return math.hypot(self.position.x - truth[0], self.position.y - truth[1])

    def to_json(self) -> dict:
        out = {
            "position": [self.position.x, self.position.y],
            "residuals": dict(self.residuals),
            "rms_residual": self.rms_residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "towers_used": list(self.towers_used),
        }
        if self.first_round is not None:
            out["first_round"] = self.first_round.to_json()
        return out


def simulate_ranges(scene: TowerScene, true_pos, sigma: float, seed: int) -> RangeSet:
    """Distances from ``true_pos`` plus N(0, sigma) noise, clamped at zero."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    truth = np.asarray(tuple(true_pos), dtype=float)
    d = np.linalg.norm(scene.positions - truth, axis=1)
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, sigma, len(d)) if sigma > 0 else np.zeros(len(d))
    r = np.maximum(0.0, d + noise)
    return RangeSet(dict(zip(scene.ids, r.tolist())), float(sigma), int(seed))


def trial_seed(seed: int, trial: int, grid_index: int = 0) -> int:
    """Per-trial seed derived from (master seed, grid index, trial index)."""
    ss = np.random.SeedSequence(seed, spawn_key=(grid_index, trial))
    return int(ss.generate_state(1, np.uint64)[0])


def _residuals(p: np.ndarray, towers: np.ndarray, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    diff = p - towers
    d = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    return d, d - r


def solve_position(scene: TowerScene, ranges: RangeSet, init=None, max_iter: int = MAX_ITER) -> PositionEstimate:
    """Damped Gauss-Newton on sum_i (|p - tower_i| - range_i)^2.

    The damping factor grows tenfold after a step that raises the cost and
    shrinks tenfold after one that lowers it. Iteration stops when the step
    is shorter than 1e-10 of the scene diagonal.
    """
    if scene.dim != 2:
        raise GeometryError("solve_position needs a 2D scene; use project_to_2d first")
    towers = scene.positions
    r = ranges.as_array(scene)
    p = scene.centroid if init is None else np.asarray(tuple(init), dtype=float)
    tol = STEP_TOL_REL * scene.diagonal
    lam = LAMBDA0
    d, res = _residuals(p, towers, r)
    cost = float(res @ res)
    history = [cost]
    converged = False
    it = 0
    while it < max_iter:
        it += 1
        safe = np.where(d > 0, d, 1.0)
        jac = np.where(d[:, None] > 0, (p - towers) / safe[:, None], 0.0)
        a = jac.T @ jac
        g = jac.T @ res
        step = -np.linalg.solve(a + lam * np.eye(2), g)
        step_norm = math.hypot(step[0], step[1])
        trial = p + step
        d_t, res_t = _residuals(trial, towers, r)
        cost_t = float(res_t @ res_t)
        if cost_t <= cost:
            p, d, res, cost = trial, d_t, res_t, cost_t
            history.append(cost)
            lam = max(lam / 10.0, 1e-12)
        else:
            lam *= 10.0
        if step_norm < tol:
            converged = True
            break
    est = PositionEstimate(
        Point2(float(p[0]), float(p[1])),
        dict(zip(scene.ids, (-res).tolist())),
        math.sqrt(cost / len(r)),
        it,
        converged,
        tuple(scene.ids),
        tuple(history),
    )
    if not converged:
        raise NonConvergence(f"no convergence after {max_iter} iterations", est)
    return est


def _pick_round_two(scene: TowerScene, first: PositionEstimate) -> list[str]:
    ranked = sorted(scene.ids, key=lambda i: (abs(first.residuals[i]), i))
    # lexicographic over the ranking, skipping collinear triples
    pos = dict(zip(scene.ids, scene.positions))
    for trio in combinations(range(len(ranked)), 3):
        ids = [ranked[k] for k in trio]
        if not _all_collinear(np.array([pos[i] for i in ids])):
            return ids
    raise DegenerateGeometry("every tower triple is collinear")


def two_round_locate(scene: TowerScene, ranges: RangeSet) -> PositionEstimate:
    """All-tower estimate, then a refit on the three best-agreeing towers.

    Round two keeps the three towers with the smallest absolute round-one
    residuals (ties by id) and starts from the round-one position.
    """
    if len(scene.towers) < 4:
        raise GeometryError("two-round location needs at least 4 towers")
    first = solve_position(scene, ranges)
    ids = _pick_round_two(scene, first)
    second = solve_position(scene.subset(ids), ranges.subset(ids), init=(first.position.x, first.position.y))
    return replace(second, first_round=first)


def hdop(scene: TowerScene, p) -> float:
    """sqrt(trace((J^T J)^-1)) for the unit bearing matrix J at ``p``."""
    towers = scene.positions
    diff = np.asarray(tuple(p), dtype=float) - towers
    d = np.linalg.norm(diff, axis=1)
    if (d <= 1e-12 * scene.diagonal).any():
        raise DegenerateGeometry("point coincides with a tower")
    jac = diff / d[:, None]
    a = jac.T @ jac
    if np.linalg.cond(a) > 1e12:
        raise DegenerateGeometry("bearing matrix is singular")
    return float(math.sqrt(np.trace(np.linalg.inv(a))))


@dataclass(frozen=True)
class TrialStats:
    rmse: float
    mean_error: float
    mean_iterations: float
    failures: int


def monte_carlo(scene: TowerScene, p, sigma: float, trials: int, seed: int, grid_index: int = 0) -> TrialStats:
    """Seeded Monte Carlo of solve_position errors at a fixed true position.

    Non-converged trials contribute their last iterate and are counted.
    """
    truth = np.asarray(tuple(p), dtype=float)
    sq, errs, iters, fails = [], [], [], 0
    for t in range(trials):
        rs = simulate_ranges(scene, truth, sigma, trial_seed(seed, t, grid_index))
        try:
            est = solve_position(scene, rs)
        except NonConvergence as exc:
            est = exc.estimate
            fails += 1
        e = est.error(truth)
        sq.append(e * e)
        errs.append(e)
        iters.append(est.iterations)
    return TrialStats(math.sqrt(math.fsum(sq) / trials), math.fsum(errs) / trials, sum(iters) / trials, fails)


@dataclass
class AccuracyMap:
    xs: np.ndarray
    ys: np.ndarray
    analytic: np.ndarray  # (len(ys), len(xs)); nan where degenerate
    rmse: np.ndarray | None
    degenerate: np.ndarray
    sigma: float
    trials: int
    seed: int
    centroid: tuple[float, float] = field(default=(0.0, 0.0))

    def points(self):
        for iy, y in enumerate(self.ys):
            for ix, x in enumerate(self.xs):
                yield ix, iy, float(x), float(y)

    def to_csv(self) -> str:
        lines = ["x,y,analytic,rmse"]
        for ix, iy, x, y in self.points():
            a = self.analytic[iy, ix]
            m = "" if self.rmse is None else repr(float(self.rmse[iy, ix]))
            lines.append(f"{x!r},{y!r},{'' if math.isnan(a) else repr(float(a))},{m}")
        return "\n".join(lines) + "\n"


def _axis(lo: float, hi: float, step: float) -> np.ndarray:
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def accuracy_map(scene: TowerScene, region: tuple[float, float, float, float], resolution: float,
                 sigma: float, trials: int = 0, seed: int = 0) -> AccuracyMap:
    """Predicted (sigma * HDOP) and, if ``trials > 0``, Monte Carlo position RMSE on a grid."""
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    if trials < 0:
        raise ValueError("trials must be >= 0")
    xmin, ymin, xmax, ymax = region
    xs, ys = _axis(xmin, xmax, resolution), _axis(ymin, ymax, resolution)
    analytic = np.full((len(ys), len(xs)), np.nan)
    degenerate = np.zeros((len(ys), len(xs)), dtype=bool)
    rmse = np.full((len(ys), len(xs)), np.nan) if trials > 0 else None
    for gi, (ix, iy, x, y) in enumerate(_grid(xs, ys)):
        try:
            analytic[iy, ix] = sigma * hdop(scene, (x, y))
        except DegenerateGeometry:
            degenerate[iy, ix] = True
            continue
        if rmse is not None:
            rmse[iy, ix] = monte_carlo(scene, (x, y), sigma, trials, seed, gi).rmse
    c = scene.centroid
    return AccuracyMap(xs, ys, analytic, rmse, degenerate, sigma, trials, seed, (float(c[0]), float(c[1])))


def _grid(xs, ys):
    for iy, y in enumerate(ys):
        for ix, x in enumerate(xs):
            yield ix, iy, float(x), float(y)


@dataclass(frozen=True)
class DropZ:
    def __str__(self) -> str:
        return "dropz"


@dataclass(frozen=True)
class HeightCorrected:
    assumed_user_z: float = 0.0

    def __str__(self) -> str:
        return f"heightcorrected:{self.assumed_user_z!r}"


def parse_mode(text: str) -> DropZ | HeightCorrected:
    if text == "dropz":
        return DropZ()
    if text.startswith("heightcorrected"):
        _, _, z = text.partition(":")
        try:
            return HeightCorrected(float(z) if z else 0.0)
        except ValueError:
            raise ValueError(f"bad height in mode {text!r}") from None
    raise ValueError(f"bad mode {text!r}; expected 'dropz' or 'heightcorrected:Z'")


def project_to_2d(scene3d: TowerScene, ranges: RangeSet, mode: DropZ | HeightCorrected = DropZ()) -> tuple[TowerScene, RangeSet]:
    """Reduce a 3D tower problem to the ground plane.

    ``HeightCorrected`` removes the vertical offset between each tower and the
    assumed user height from its range, clamping at zero.
    """
    pts = scene3d.positions
    if pts.shape[1] == 2:
        return scene3d, ranges
    scene2d = TowerScene.from_points(pts[:, :2], scene3d.ids)
    if isinstance(mode, DropZ):
        return scene2d, ranges
    r = ranges.as_array(scene3d)
    dz = pts[:, 2] - mode.assumed_user_z
    r2 = np.sqrt(np.maximum(r * r - dz * dz, 0.0))
    return scene2d, RangeSet(dict(zip(scene3d.ids, r2.tolist())), ranges.sigma, ranges.seed)
