"""Gaussian-process Bayesian optimization of a scenario fraction on [0, 1].

The surrogate is a zero-mean GP on standardized objective values with a
Matern-5/2 kernel; hyperparameters come from a coarse log-marginal-likelihood
grid. Expected Improvement picks the next fraction from a fixed 101-point
candidate grid, which makes the whole loop deterministic given the seed used
by the objective evaluations. Maximization is handled by negating the
objective so the EI math is always the minimization form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import ndtr

from . import tabular
from .errors import NumericalError, ScenarioInfeasibleError
from .resample import Scenario, repeated_resample
from .tabular import Dataset, ObjectiveSpec, ScenarioValue

LENGTH_SCALE_GRID = (0.05, 0.1, 0.2, 0.5, 1.0)
NOISE_VAR_GRID = (1e-4, 1e-2, 1e-1)
JITTER_LADDER = (0.0, 1e-6, 1e-5, 1e-4, 1e-3)

#: EI candidates: fractions 0.00, 0.01, ..., 1.00.
CANDIDATE_GRID = np.arange(101) / 100.0

SIGMA_FLOOR = 1e-12


def matern52(xa: np.ndarray, xb: np.ndarray, length_scale: float,
             signal_var: float = 1.0) -> np.ndarray:
    """Matern-5/2 covariance matrix between two point sets."""
    d = np.abs(np.asarray(xa, dtype=np.float64)[:, None]
               - np.asarray(xb, dtype=np.float64)[None, :])
    r = math.sqrt(5.0) * d / length_scale
    return signal_var * (1.0 + r + r * r / 3.0) * np.exp(-r)


@dataclass
class GPModel:
    """GP regression model conditioned on (fraction, objective) observations.

    y is stored raw; the model standardizes internally (y_mean, y_scale) and
    reports posteriors back in raw units. jitter is whatever diagonal boost
    the Cholesky factorization needed (0 for well-conditioned matrices).
    """

    x: np.ndarray
    y: np.ndarray
    length_scale: float
    signal_var: float
    noise_var: float
    y_mean: float = field(init=False)
    y_scale: float = field(init=False)
    jitter: float = field(init=False)
    _chol: np.ndarray = field(init=False, repr=False)
    _alpha: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64)
        if self.x.size == 0:
            raise NumericalError("GP model needs at least one observation")
        self.y_mean = float(np.mean(self.y))
        scale = float(np.std(self.y))
        self.y_scale = scale if scale > SIGMA_FLOOR else 1.0
        y_std = (self.y - self.y_mean) / self.y_scale
        k = matern52(self.x, self.x, self.length_scale, self.signal_var)
        k[np.diag_indices_from(k)] += self.noise_var
        self._chol, self.jitter = _cholesky_with_jitter(k)
        self._alpha = _cho_solve(self._chol, y_std)

    @property
    def y_standardized(self) -> np.ndarray:
        return (self.y - self.y_mean) / self.y_scale

    def log_marginal_likelihood(self) -> float:
        y_std = self.y_standardized
        n = y_std.size
        return float(-0.5 * y_std @ self._alpha
                     - np.sum(np.log(np.diag(self._chol)))
                     - 0.5 * n * math.log(2 * math.pi))

    def posterior(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and std (raw units) at each query point."""
        xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
        k_star = matern52(self.x, xs, self.length_scale, self.signal_var)
        mu = k_star.T @ self._alpha
        v = np.linalg.solve(self._chol, k_star)
        var = self.signal_var - np.sum(v * v, axis=0)
        var = np.maximum(var, 0.0)
        return mu * self.y_scale + self.y_mean, np.sqrt(var) * self.y_scale


def _cholesky_with_jitter(k: np.ndarray) -> tuple[np.ndarray, float]:
    for jitter in JITTER_LADDER:
        try:
            boosted = k if jitter == 0.0 else k + jitter * np.eye(k.shape[0])
            return np.linalg.cholesky(boosted), jitter
        except np.linalg.LinAlgError:
            continue
    raise NumericalError(
        f"kernel matrix not positive definite after jitter up to "
        f"{JITTER_LADDER[-1]:g}")


def _cho_solve(chol: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.linalg.solve(chol.T, np.linalg.solve(chol, b))


def fit_gp(x: Sequence[float], y: Sequence[float]) -> GPModel:
    """Fit hyperparameters by coarse grid over the log marginal likelihood.

    signal variance is pinned to 1 on standardized targets; the grid adapts
    length scale and noise level to whatever the resampling noise looks like.
    """
    best = None
    best_lml = -np.inf
    for ell in LENGTH_SCALE_GRID:
        for noise in NOISE_VAR_GRID:
            model = GPModel(np.asarray(x), np.asarray(y), ell, 1.0, noise)
            lml = model.log_marginal_likelihood()
            if lml > best_lml:
                best, best_lml = model, lml
    return best


def gp_posterior(model: GPModel, x: float) -> tuple[float, float]:
    """Posterior (mu, sigma) at a single fraction."""
    mu, sigma = model.posterior(np.array([x]))
    return float(mu[0]), float(sigma[0])


def expected_improvement(model: GPModel, x: float, f_best: float,
                         xi: float = 0.0) -> float:
    """Minimization-form EI at x against incumbent f_best."""
    return float(_ei(model, np.array([x]), f_best, xi)[0])


def _ei(model: GPModel, xs: np.ndarray, f_best: float, xi: float) -> np.ndarray:
    mu, sigma = model.posterior(xs)
    gap = f_best - mu - xi
    out = np.maximum(gap, 0.0)  # sigma ~ 0: improvement is deterministic
    live = sigma >= SIGMA_FLOOR
    if np.any(live):
        z = gap[live] / sigma[live]
        pdf = np.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
        out[live] = np.maximum(gap[live] * ndtr(z) + sigma[live] * pdf, 0.0)
    return out


@dataclass
class OptimizeConfig:
    """Evaluation budget and acquisition knobs for one optimization run.

    iterations is the total objective-evaluation budget, initial design
    included; the usual working range is 10-20.
    """

    iterations: int = 15
    init_points: int = 5
    xi: float = 0.01
    n_sample: int = 30
    seed: int = 0


@dataclass
class OptimizationResult:
    x_star: float
    f_star: float
    trace: list[tuple[float, float]]
    iterations_used: int
    skipped_fractions: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "x_star": self.x_star,
            "f_star": self.f_star,
            "trace": [{"x": x, "f": f} for x, f in self.trace],
            "iterations_used": self.iterations_used,
            "skipped_fractions": self.skipped_fractions,
        }


def minimize_on_unit_interval(func: Callable[[float], float],
                              config: OptimizeConfig,
                              extra_init: Sequence[float] = ()
                              ) -> OptimizationResult:
    """Core BO loop: minimize a noisy scalar function of a fraction.

    func may raise ScenarioInfeasibleError for fractions it cannot realize;
    those are recorded and excluded rather than failing the run. The result
    is the best observed point (argmin over evaluations, not the GP mean).
    """
    if config.iterations < 1:
        raise NumericalError("iterations must be >= 1")
    design = _initial_design(config.init_points, extra_init)
    xs: list[float] = []
    ys: list[float] = []
    skipped: list[float] = []
    evaluated_keys = set()

    def try_eval(x: float) -> None:
        evaluated_keys.add(round(x, 10))
        try:
            y = func(x)
        except ScenarioInfeasibleError:
            skipped.append(x)
            return
        xs.append(x)
        ys.append(float(y))

    for x in design:
        if len(xs) >= config.iterations:
            break
        try_eval(x)
    while len(xs) < config.iterations:
        if not xs:
            break
        candidates = np.array([c for c in CANDIDATE_GRID
                               if round(float(c), 10) not in evaluated_keys])
        if candidates.size == 0:
            break
        model = fit_gp(np.array(xs), np.array(ys))
        ei = _ei(model, candidates, f_best=min(ys), xi=config.xi)
        try_eval(float(candidates[int(np.argmax(ei))]))
    if not xs:
        raise ScenarioInfeasibleError("no feasible fraction could be evaluated")
    best = int(np.argmin(ys))
    return OptimizationResult(
        x_star=xs[best], f_star=ys[best],
        trace=list(zip(xs, ys)), iterations_used=len(xs),
        skipped_fractions=skipped)


def _initial_design(init_points: int, extra_init: Sequence[float]) -> list[float]:
    # endpoints and the current fraction are always probed, then an even fill
    design: list[float] = []
    keys = set()

    def add(x: float) -> None:
        key = round(float(x), 10)
        if key not in keys:
            keys.add(key)
            design.append(float(x))

    add(0.0)
    add(1.0)
    for x in extra_init:
        add(x)
    for x in np.linspace(0.0, 1.0, max(init_points, 2)):
        if len(design) >= init_points:
            break
        add(x)
    return sorted(design)


def optimize_fraction(dataset: Dataset, column: str, value: ScenarioValue,
                      objective: ObjectiveSpec,
                      config: Optional[OptimizeConfig] = None
                      ) -> OptimizationResult:
    """Find the fraction of (column, value) that optimizes the objective.

    Evaluations are repeated_resample means at each fraction; direction
    "maximize" negates internally and reports back in original units.
    """
    config = config or OptimizeConfig()
    objective.validate_for(dataset)
    sign = -1.0 if objective.direction == "maximize" else 1.0

    def f(x: float) -> float:
        scenario = Scenario(column, value, x)
        summary = repeated_resample(dataset, scenario, objective,
                                    config.n_sample, config.seed)
        return sign * summary.metric_mean

    cf = tabular.current_fraction(dataset, column, value)
    result = minimize_on_unit_interval(f, config, extra_init=(cf,))
    if sign < 0:
        result.f_star = -result.f_star
        result.trace = [(x, -y) for x, y in result.trace]
    return result


@dataclass
class MarginalPoint:
    """One fraction of the marginal-gain curve; infeasible fractions carry
    None and render as gaps."""

    x: float
    metric_mean: Optional[float]
    metric_std: Optional[float]

    @property
    def feasible(self) -> bool:
        return self.metric_mean is not None

    def to_dict(self) -> dict:
        return {"x": self.x, "metric_mean": self.metric_mean,
                "metric_std": self.metric_std}


DEFAULT_MARGINAL_FRACTIONS = tuple(np.round(np.arange(0, 11) / 10.0, 10))


def marginal_curve(dataset: Dataset, column: str, value: ScenarioValue,
                   objective: ObjectiveSpec,
                   fractions: Sequence[float] = DEFAULT_MARGINAL_FRACTIONS,
                   n_sample: int = 30, seed: int = 0) -> list[MarginalPoint]:
    """Objective mean and std across a grid of fractions.

    The curve shape tells the linear / saturating / accelerating story of a
    scenario's returns; pair with optimize_fraction for the optimum marker.
    """
    if len(fractions) < 2:
        raise NumericalError("marginal curve needs at least 2 fractions")
    objective.validate_for(dataset)
    points = []
    for x in fractions:
        scenario = Scenario(column, value, float(x))
        try:
            summary = repeated_resample(dataset, scenario, objective,
                                        n_sample, seed)
        except ScenarioInfeasibleError:
            points.append(MarginalPoint(float(x), None, None))
            continue
        points.append(MarginalPoint(float(x), summary.metric_mean,
                                    summary.metric_std))
    return points
