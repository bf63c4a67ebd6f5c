"""scikit-learn compatible wrappers around the trajectory ensemble.

``TrajectoryPopulations`` maps a column of times to the excited population of
every trajectory in a family.  ``ELTRegressor`` learns convex trajectory
weights from a reference excited-population curve and predicts the ensemble
population at the fitted times.

    >>> from eltqc.estimator import ELTRegressor
    >>> import numpy as np
    >>> t = np.linspace(0, 2, 5)
    >>> est = ELTRegressor(kappas=[0.0, 0.5, 2.0]).fit(t, np.exp(-t))
    >>> bool(np.allclose(est.predict(t), np.exp(-t)))
    True
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, column_or_1d

from .elt import (
    Backend,
    Mode,
    TrajectoryFamily,
    WeightSchedule,
    combine,
    default_kappas,
    evaluate_family,
)
from .exceptions import WeightGridMismatch
from .stateprep import decompose_density
from .weights import DEFAULT_REG, fit_report, fit_weights

EXCITED = np.array([[0, 0], [0, 1]], dtype=np.complex128)


def _times(X):
    X = check_array(X, ensure_2d=False, dtype=float, ensure_all_finite=True)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"expected a single column of times, got shape {X.shape}")
        X = X[:, 0]
    if np.any(X < 0):
        raise ValueError("times must be nonnegative")
    return X


class _FamilyParams:
    def _family(self):
        if Mode(self.mode) is Mode.RATE_SCALED:
            kappas = default_kappas() if self.kappas is None else self.kappas
            return TrajectoryFamily.rate_scaled(kappas)
        if self.lags is None:
            raise ValueError("LagShifted mode needs explicit lags")
        return TrajectoryFamily.lag_shifted(self.lags)

    def _ensemble(self):
        D = EXCITED if self.initial_state is None else np.asarray(self.initial_state, dtype=np.complex128)
        return decompose_density(D)

    def _backend(self, kind=None):
        return Backend(kind or self.backend, self.shots, self.seed)


class TrajectoryPopulations(_FamilyParams, TransformerMixin, BaseEstimator):
    """Times -> per-trajectory excited populations, shape ``(n_times, n_trajectories)``."""

    def __init__(self, kappas=None, mode="RateScaled", lags=None, initial_state=None,
                 backend="statevector", shots=8192, seed=0, threads=1):
        self.kappas = kappas
        self.mode = mode
        self.lags = lags
        self.initial_state = initial_state
        self.backend = backend
        self.shots = shots
        self.seed = seed
        self.threads = threads

    def fit(self, X, y=None):
        _times(X)
        self.family_ = self._family()
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "family_")
        t = _times(X)
        P = evaluate_family(self.family_, t, self._ensemble(), self._backend(), self.threads)
        return P[:, :, 1]


class ELTRegressor(_FamilyParams, RegressorMixin, BaseEstimator):
    """Ensemble-of-trajectories model of an excited-population curve.

    Weights are fitted on the statevector backend; ``backend`` selects how
    :meth:`predict` evaluates the circuits.  With ``weight_mode="per_time"``
    predictions are only defined on the fitted time grid.
    """

    def __init__(self, kappas=None, mode="RateScaled", lags=None, reg=DEFAULT_REG,
                 weight_mode="per_time", initial_state=None, backend="statevector",
                 shots=8192, seed=0, threads=1):
        self.kappas = kappas
        self.mode = mode
        self.lags = lags
        self.reg = reg
        self.weight_mode = weight_mode
        self.initial_state = initial_state
        self.backend = backend
        self.shots = shots
        self.seed = seed
        self.threads = threads

    def fit(self, X, y):
        t = _times(X)
        y = column_or_1d(y, warn=True).astype(float)
        if y.size != t.size:
            raise ValueError(f"{t.size} times but {y.size} targets")
        self.family_ = self._family()
        self.family_.validate(t.max() if t.size else 0.0)
        self.populations_ = evaluate_family(self.family_, t, self._ensemble(), self._backend("statevector"),
                                            self.threads)
        P = self.populations_[:, :, 1]
        self.schedule_ = fit_weights(P, y, reg=self.reg, times=t, mode=self.weight_mode)
        self.report_ = fit_report(self.schedule_, P, y)
        self.times_ = t
        self.n_features_in_ = 1
        return self

    def _schedule_for(self, t):
        if self.weight_mode == "per_time":
            if t.shape != self.times_.shape or not np.allclose(t, self.times_):
                raise WeightGridMismatch("per-time weights are only defined on the fitted grid")
            return self.schedule_
        return WeightSchedule.constant(t, self.schedule_.weights[0])

    def predict_populations(self, X):
        check_is_fitted(self, "schedule_")
        t = _times(X)
        schedule = self._schedule_for(t)
        backend = self._backend()
        if backend.kind == "statevector" and schedule is self.schedule_:
            P = self.populations_
        else:
            P = evaluate_family(self.family_, t, self._ensemble(), backend, self.threads)
        return combine(P, schedule, times=t, source=backend.source)

    def predict(self, X):
        return self.predict_populations(X).excited
