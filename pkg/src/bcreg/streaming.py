"""Block-wise incremental learning with running-average models.

Data arrives in fixed-size blocks.  A base algorithm is fitted to each
block and the predictor in use at time t is the plain average of the t
base fits, maintained through the recurrence

    avg_t = ((t - 1) / t) avg_{t-1} + (1 / t) fit_t.

Averaging shrinks the variance of the base algorithm like 1/t while its
bias persists, which is what makes low-bias base fits attractive here.
The regularization strength is re-selected by k-fold cross validation
on every incoming block and shared by all competing algorithms on that
block.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InsufficientDataError,
    InvalidParameterError,
    InvalidStateError,
    SequencingError,
    ShapeError,
)
from .experiments import Metrics, compute_metrics
from .kernels import (
    KernelModel,
    KernelSpec,
    fit_kernel_regularized,
    kernel_matrix,
    predict_kernel,
    _rkn_coeffs,
)
from .linear import (
    Dataset,
    LinearModel,
    _as_rows,
    _centered_arrays,
    _corrected_weights,
    _readonly,
    fit_regularized,
)

__all__ = [
    "DEFAULT_LAMBDA_GRID",
    "AveragedLinearModel",
    "AveragedKernelModel",
    "AlgorithmSpec",
    "CvConfig",
    "StepMetrics",
    "StreamReport",
    "algorithm_label",
    "average_update",
    "predict_averaged",
    "cv_folds",
    "select_lambda_cv",
    "run_block_stream",
]

# 25 log-spaced candidates spanning the useful shrinkage range.
DEFAULT_LAMBDA_GRID = tuple(np.logspace(-6, 2, 25))

FAMILIES = ("linear", "kernel")


@dataclass(frozen=True)
class AveragedLinearModel:
    """Running average of linear base fits; itself an affine predictor."""

    weights: np.ndarray
    intercept: float
    count: int

    def __post_init__(self):
        object.__setattr__(self, "weights", _readonly(np.array(self.weights, dtype=float)))


@dataclass(frozen=True)
class AveragedKernelModel:
    """Running average of kernel base fits, kept as the full model list."""

    models: tuple[KernelModel, ...]

    @property
    def count(self) -> int:
        return len(self.models)

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.count, 1.0 / self.count)


AveragedModel = AveragedLinearModel | AveragedKernelModel


def average_update(current, fresh, t: int):
    """Fold one more base fit into the running average.

    ``t`` is the 1-based count after the update; it must equal
    ``current.count + 1`` (with ``current`` absent exactly when t == 1).
    Returns a new averaged model; inputs are never mutated.
    """
    if t < 1:
        raise InvalidParameterError(f"t must be >= 1, got {t}")
    if t == 1:
        if current is not None:
            raise SequencingError("t == 1 requires an empty current average")
        if isinstance(fresh, LinearModel):
            return AveragedLinearModel(weights=fresh.weights, intercept=fresh.intercept, count=1)
        if isinstance(fresh, KernelModel):
            return AveragedKernelModel(models=(fresh,))
        raise InvalidStateError(f"cannot average model of type {type(fresh).__name__}")
    if current is None:
        raise SequencingError(f"t == {t} but no current average was supplied")
    if current.count + 1 != t:
        raise SequencingError(f"expected t == {current.count + 1}, got {t}")
    if isinstance(current, AveragedLinearModel):
        if not isinstance(fresh, LinearModel):
            raise InvalidStateError("linear average cannot absorb a non-linear model")
        frac = (t - 1) / t
        return AveragedLinearModel(
            weights=frac * current.weights + fresh.weights / t,
            intercept=frac * current.intercept + fresh.intercept / t,
            count=t,
        )
    if not isinstance(fresh, KernelModel):
        raise InvalidStateError("kernel average cannot absorb a non-kernel model")
    return AveragedKernelModel(models=current.models + (fresh,))


def predict_averaged(model: AveragedModel, rows) -> np.ndarray:
    """Evaluate a running-average model on m rows."""
    if isinstance(model, AveragedLinearModel):
        x = _as_rows(rows, model.weights.shape[0])
        return x @ model.weights + model.intercept
    total = predict_kernel(model.models[0], rows)
    for m in model.models[1:]:
        total = total + predict_kernel(m, rows)
    return total / model.count


@dataclass(frozen=True)
class AlgorithmSpec:
    """One competing base algorithm: a family plus its correction order."""

    family: str
    order: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParameterError(f"unknown family {self.family!r}")
        if self.order < 0:
            raise InvalidParameterError(f"order must be >= 0, got {self.order}")
        if self.family == "kernel" and self.order not in (0, 1):
            raise InvalidParameterError("kernel correction order must be 0 or 1")


def algorithm_label(family: str, order: int) -> str:
    """Series name for reports: rr / bcrr / bcrr-k, rkn / bcrkn."""
    base = {"linear": ("rr", "bcrr"), "kernel": ("rkn", "bcrkn")}[family]
    if order == 0:
        return base[0]
    if order == 1:
        return base[1]
    return f"{base[1]}-{order}"


@dataclass(frozen=True)
class CvConfig:
    """Grid and fold count for per-block cross validation."""

    grid: tuple[float, ...] = DEFAULT_LAMBDA_GRID
    folds: int = 10


def cv_folds(n: int, folds: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Seeded random partition of range(n) into near-equal index sets."""
    perm = rng.permutation(n)
    return [np.sort(part) for part in np.array_split(perm, folds)]


def _cv_errors_linear(x, y, grid, parts) -> np.ndarray:
    """Mean validation squared error of plain ridge, per grid value."""
    n = x.shape[0]
    errors = np.zeros(len(grid))
    for val_idx in parts:
        mask = np.ones(n, dtype=bool)
        mask[val_idx] = False
        x_tr, y_tr = x[mask], y[mask]
        x_val, y_val = x[val_idx], y[val_idx]
        x_mean, y_mean, cov, cross = _centered_arrays(x_tr, y_tr)
        for g, lam in enumerate(grid):
            w = _corrected_weights(cov, cross, lam, 0)
            pred = (x_val - x_mean) @ w + y_mean
            errors[g] += float(np.mean((pred - y_val) ** 2))
    return errors / len(parts)


def _cv_errors_kernel(x, y, grid, parts, kernel_spec) -> np.ndarray:
    """Mean validation squared error of the order-0 kernel fit, per grid value."""
    kmat = kernel_matrix(kernel_spec, x, x)
    n = x.shape[0]
    errors = np.zeros(len(grid))
    for val_idx in parts:
        mask = np.ones(n, dtype=bool)
        mask[val_idx] = False
        k_tr = kmat[np.ix_(mask, mask)]
        k_val = kmat[np.ix_(val_idx, mask)]
        y_tr, y_val = y[mask], y[val_idx]
        for g, lam in enumerate(grid):
            coeffs = _rkn_coeffs(k_tr, y_tr, lam)
            pred = k_val @ coeffs
            errors[g] += float(np.mean((pred - y_val) ** 2))
    return errors / len(parts)


def select_lambda_cv(
    dataset: Dataset,
    grid,
    folds: int = 10,
    rng=0,
    family: str = "linear",
    kernel_spec: KernelSpec | None = None,
) -> float:
    """Pick the grid value minimizing k-fold validation squared error.

    The fold assignment is a seeded random partition into ``folds``
    near-equal parts; ties are broken toward the largest lambda, which
    keeps the linear systems better conditioned at no cost in CV error.
    ``rng`` may be an integer seed or a Generator.
    """
    grid = [float(g) for g in grid]
    if len(grid) == 0:
        raise InvalidParameterError("lambda grid must be nonempty")
    if any(g <= 0 for g in grid):
        raise InvalidParameterError("lambda grid values must be positive")
    if folds < 2:
        raise InvalidParameterError(f"folds must be >= 2, got {folds}")
    if dataset.n_rows < folds:
        raise InsufficientDataError(
            f"need at least {folds} rows for {folds}-fold CV, got {dataset.n_rows}"
        )
    if family not in FAMILIES:
        raise InvalidParameterError(f"unknown family {family!r}")
    if family == "kernel" and kernel_spec is None:
        raise InvalidParameterError("kernel family requires a kernel_spec")

    grid_sorted = sorted(set(grid))
    if len(grid_sorted) == 1:
        return grid_sorted[0]

    gen = np.random.default_rng(rng)
    parts = cv_folds(dataset.n_rows, folds, gen)
    x, y = dataset.features, dataset.targets
    if family == "linear":
        errors = _cv_errors_linear(x, y, grid_sorted, parts)
    else:
        errors = _cv_errors_kernel(x, y, grid_sorted, parts, kernel_spec)

    best_lam, best_err = grid_sorted[0], errors[0]
    for lam, err in zip(grid_sorted[1:], errors[1:]):
        if err <= best_err:  # tie goes to the larger lambda
            best_lam, best_err = lam, err
    return best_lam


@dataclass(frozen=True)
class StepMetrics:
    """Test-set metrics of every averaged model after one block."""

    t: int
    lam: float
    mse: dict[str, float]
    classification_error: dict[str, float] | None = None


@dataclass(frozen=True)
class StreamReport:
    """Per-step metric trajectories for one streaming run."""

    per_step: tuple[StepMetrics, ...]
    seed: tuple[int, ...]
    config: dict = field(default_factory=dict)

    def series(self, metric: str = "mse") -> dict[str, list[float]]:
        """Pivot per-step entries into one list per algorithm label."""
        out: dict[str, list[float]] = {}
        for step in self.per_step:
            values = getattr(step, metric)
            for label, v in values.items():
                out.setdefault(label, []).append(v)
        return out

    @property
    def lambdas(self) -> list[float]:
        return [step.lam for step in self.per_step]


def _seed_tuple(seed) -> tuple[int, ...]:
    if isinstance(seed, (int, np.integer)):
        seed = (int(seed),)
    seed = tuple(int(s) for s in seed)
    if any(s < 0 for s in seed):
        raise InvalidParameterError("seeds must be nonnegative integers")
    return seed


def run_block_stream(
    blocks,
    algorithms,
    test: Dataset,
    cv: CvConfig | None = None,
    seed=0,
    classification: bool = False,
    kernel_spec: KernelSpec | None = None,
) -> StreamReport:
    """Feed blocks through every algorithm's running average.

    For each block t: cross validation on that block (order 0 of the
    shared family) picks one lambda, every listed algorithm is fitted on
    the block with it, the running averages are updated, and test-set
    metrics of the averaged models are recorded.  Deterministic given
    ``seed``.
    """
    blocks = list(blocks)
    if not blocks:
        raise InsufficientDataError("need at least one block")
    algorithms = [
        a if isinstance(a, AlgorithmSpec) else AlgorithmSpec(**a) for a in algorithms
    ]
    if not algorithms:
        raise InvalidParameterError("need at least one algorithm")
    families = {a.family for a in algorithms}
    if len(families) > 1:
        raise InvalidParameterError("all algorithms in one stream must share a family")
    family = algorithms[0].family
    if family == "kernel" and kernel_spec is None:
        raise InvalidParameterError("kernel family requires a kernel_spec")
    p = blocks[0].n_features
    for i, b in enumerate(blocks):
        if b.n_features != p:
            raise ShapeError(f"block {i + 1} has {b.n_features} columns, expected {p}")
    if test.n_features != p:
        raise ShapeError(f"test set has {test.n_features} columns, expected {p}")
    if cv is None:
        cv = CvConfig()
    seed = _seed_tuple(seed)

    labels = [algorithm_label(a.family, a.order) for a in algorithms]
    averaged: dict[str, AveragedModel | None] = {label: None for label in labels}
    per_step: list[StepMetrics] = []
    for t, block in enumerate(blocks, start=1):
        try:
            # entropy tag 1 keeps fold shuffling apart from data streams
            lam = select_lambda_cv(
                block,
                cv.grid,
                cv.folds,
                rng=np.random.default_rng((*seed, t, 1)),
                family=family,
                kernel_spec=kernel_spec,
            )
            mse: dict[str, float] = {}
            cls_err: dict[str, float] = {}
            for algo, label in zip(algorithms, labels):
                if family == "linear":
                    fit = fit_regularized(block, lam, algo.order)
                else:
                    fit = fit_kernel_regularized(block, kernel_spec, lam, algo.order)
                averaged[label] = average_update(averaged[label], fit, t)
                pred = predict_averaged(averaged[label], test.features)
                metrics: Metrics = compute_metrics(pred, test.targets, classification)
                mse[label] = metrics.mse
                if classification:
                    cls_err[label] = metrics.classification_error
        except Exception as exc:
            exc.args = (f"block {t}: {exc}",) + exc.args[1:]
            raise
        per_step.append(
            StepMetrics(
                t=t,
                lam=lam,
                mse=mse,
                classification_error=cls_err if classification else None,
            )
        )

    config = {
        "blocks": len(blocks),
        "block_rows": [b.n_rows for b in blocks],
        "algorithms": [{"family": a.family, "order": a.order} for a in algorithms],
        "cv": {"grid": [float(g) for g in cv.grid], "folds": cv.folds},
        "classification": classification,
        "kernel": None
        if kernel_spec is None
        else {
            "kind": kernel_spec.kind,
            "bandwidth": kernel_spec.bandwidth,
            "degree": kernel_spec.degree,
            "offset": kernel_spec.offset,
        },
    }
    return StreamReport(per_step=tuple(per_step), seed=seed, config=config)
