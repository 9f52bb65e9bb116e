"""Ridge regression with iterative bias correction.

Plain ridge shrinks every eigen-direction of the sample covariance by
sigma / (lambda + sigma), which leaves an asymptotic bias of
-lambda (lambda I + Sigma)^-1 w on the true weights w.  Subtracting a
plug-in estimate of that bias gives the order-1 corrected estimator

    w#_1 = w_hat + lambda (lambda I + Cov)^-1 w_hat,

and repeating the argument gives the order-k recursion

    w#_k = w#_{k-1} + lambda^k (lambda I + Cov)^-k w_hat.

In each eigen-direction the order-k estimator applies the filter factor
1 - (lambda / (lambda + sigma))^(k+1) to the unregularized solution, so
its asymptotic bias shrinks geometrically with k.  This module provides
the centering statistics, the fit itself, and the closed-form
asymptotic-bias oracle used to sanity-check Monte-Carlo estimates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import (
    InsufficientDataError,
    InvalidDataError,
    InvalidParameterError,
    ShapeError,
)

__all__ = [
    "Dataset",
    "CenteredStats",
    "LinearModel",
    "SpectrumProfile",
    "center",
    "fit_regularized",
    "predict_linear",
    "filter_factor",
    "asymptotic_bias",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Dataset:
    """An n x p feature matrix paired with a length-n target vector."""

    features: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        x = np.array(self.features, dtype=float)
        y = np.array(self.targets, dtype=float)
        if x.ndim != 2:
            raise ShapeError(f"features must be 2-d, got ndim={x.ndim}")
        if y.ndim != 1:
            raise ShapeError(f"targets must be 1-d, got ndim={y.ndim}")
        if x.shape[0] != y.shape[0]:
            raise ShapeError(
                f"targets length {y.shape[0]} does not match {x.shape[0]} feature rows"
            )
        if x.shape[0] < 1 or x.shape[1] < 1:
            raise InsufficientDataError("dataset needs at least one row and one column")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise InvalidDataError("dataset contains non-finite values")
        object.__setattr__(self, "features", _readonly(x))
        object.__setattr__(self, "targets", _readonly(y))

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class CenteredStats:
    """Sample means, covariance, and feature/target cross moments."""

    x_mean: np.ndarray  # (p,)
    y_mean: float
    cov: np.ndarray  # (p, p), symmetric PSD
    cross: np.ndarray  # (p,), (1/n) Xc' yc


@dataclass(frozen=True)
class LinearModel:
    """Affine predictor x -> weights . x + intercept.

    ``order`` records how many bias-correction steps were applied on top
    of the plain ridge solution (0 means none).
    """

    weights: np.ndarray
    intercept: float
    lam: float
    order: int

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1:
            raise ShapeError("weights must be a vector")
        if not (np.all(np.isfinite(w)) and np.isfinite(self.intercept)):
            raise InvalidDataError("model coefficients must be finite")
        if self.lam <= 0:
            raise InvalidParameterError(f"lambda must be positive, got {self.lam}")
        if self.order < 0:
            raise InvalidParameterError(f"order must be >= 0, got {self.order}")
        object.__setattr__(self, "weights", _readonly(w))


@dataclass(frozen=True)
class SpectrumProfile:
    """Covariance eigenvalues and the true weights' eigenbasis coordinates."""

    eigenvalues: np.ndarray
    coords: np.ndarray

    def __post_init__(self):
        sig = np.array(self.eigenvalues, dtype=float)
        c = np.array(self.coords, dtype=float)
        if sig.ndim != 1 or c.ndim != 1 or sig.shape != c.shape:
            raise ShapeError("eigenvalues and coords must be vectors of equal length")
        if not np.all(np.isfinite(sig)) or not np.all(np.isfinite(c)):
            raise InvalidDataError("profile entries must be finite")
        if np.any(sig <= 0):
            raise InvalidParameterError("eigenvalues must be strictly positive")
        object.__setattr__(self, "eigenvalues", _readonly(sig))
        object.__setattr__(self, "coords", _readonly(c))


def _centered_arrays(x: np.ndarray, y: np.ndarray):
    """Means, covariance, and cross moment of already-validated arrays."""
    n = x.shape[0]
    x_mean = x.mean(axis=0)
    y_mean = float(y.mean())
    xc = x - x_mean
    yc = y - y_mean
    cov = xc.T @ xc / n
    cov = (cov + cov.T) / 2.0  # exact symmetry despite BLAS rounding
    cross = xc.T @ yc / n
    return x_mean, y_mean, cov, cross


def center(dataset: Dataset) -> CenteredStats:
    """Centering statistics of a dataset.

    Returns the feature/target means together with the (biased, 1/n)
    sample covariance and the cross moment (1/n) Xc' yc of the centered
    data.
    """
    x_mean, y_mean, cov, cross = _centered_arrays(dataset.features, dataset.targets)
    return CenteredStats(
        x_mean=_readonly(x_mean), y_mean=y_mean, cov=_readonly(cov), cross=_readonly(cross)
    )


def _corrected_weights(
    cov: np.ndarray, cross: np.ndarray, lam: float, order: int
) -> np.ndarray:
    """Order-k corrected ridge weights from covariance statistics.

    Factors (lambda I + cov) once; every correction step is one extra
    back-substitution, never an explicit matrix power.
    """
    p = cov.shape[0]
    factor = cho_factor(lam * np.eye(p) + cov, lower=True, check_finite=False)
    w = cho_solve(factor, cross, check_finite=False)
    w_corrected = w
    term = w
    for _ in range(order):
        term = lam * cho_solve(factor, term, check_finite=False)
        w_corrected = w_corrected + term
    return w_corrected


def fit_regularized(dataset: Dataset, lam: float, order: int = 0) -> LinearModel:
    """Fit ridge (order 0) or order-k bias-corrected ridge regression.

    The intercept is recomputed with the corrected weights,
    y_mean - w#_k . x_mean, so predictions stay unbiased at the data
    centroid.

    Parameters
    ----------
    dataset : Dataset
        Training data, at least two rows.
    lam : float
        Regularization strength, strictly positive.
    order : int
        Number of bias-correction steps; 0 is plain ridge.
    """
    if lam <= 0:
        raise InvalidParameterError(f"lambda must be positive, got {lam}")
    if order < 0:
        raise InvalidParameterError(f"order must be >= 0, got {order}")
    if dataset.n_rows < 2:
        raise InsufficientDataError("fitting needs at least two rows")
    x_mean, y_mean, cov, cross = _centered_arrays(dataset.features, dataset.targets)
    w = _corrected_weights(cov, cross, lam, order)
    intercept = y_mean - float(w @ x_mean)
    return LinearModel(weights=w, intercept=intercept, lam=float(lam), order=int(order))


def _as_rows(features, p: int) -> np.ndarray:
    """Coerce prediction input to (m, p); a length-p vector means one row."""
    x = np.asarray(features, dtype=float)
    if x.ndim == 1:
        if x.shape[0] != p:
            raise ShapeError(f"expected {p} feature columns, got vector of length {x.shape[0]}")
        x = x[np.newaxis, :]
    if x.ndim != 2 or x.shape[1] != p:
        raise ShapeError(f"expected (m, {p}) features, got shape {x.shape}")
    return x


def predict_linear(model: LinearModel, features) -> np.ndarray:
    """Evaluate the affine predictor on m rows, returning length-m output."""
    x = _as_rows(features, model.weights.shape[0])
    return x @ model.weights + model.intercept


def filter_factor(sigma: float, lam: float, order: int = 0) -> float:
    """Per-eigen-direction multiplier 1 - (lam / (lam + sigma))^(order+1).

    The order-k estimator recovers this fraction of the unregularized
    solution along an eigen-direction with eigenvalue sigma; it lies in
    [0, 1) and increases strictly with the correction order when
    sigma > 0.
    """
    if sigma < 0:
        raise InvalidParameterError(f"sigma must be >= 0, got {sigma}")
    if lam <= 0:
        raise InvalidParameterError(f"lambda must be positive, got {lam}")
    if order < 0:
        raise InvalidParameterError(f"order must be >= 0, got {order}")
    shrink = lam / (lam + sigma)
    return 1.0 - shrink ** (order + 1)


def asymptotic_bias(profile: SpectrumProfile, lam: float, order: int = 0) -> float:
    """Large-n bias norm of the order-k estimator for a known spectrum.

    Equals sqrt(sum_i c_i^2 (lam / (lam + sigma_i))^(2(order+1))): the
    component-wise residual shrinkage left after k correction steps.
    """
    if lam <= 0:
        raise InvalidParameterError(f"lambda must be positive, got {lam}")
    if order < 0:
        raise InvalidParameterError(f"order must be >= 0, got {order}")
    shrink = lam / (lam + profile.eigenvalues)
    return float(np.sqrt(np.sum(profile.coords**2 * shrink ** (2 * (order + 1)))))
