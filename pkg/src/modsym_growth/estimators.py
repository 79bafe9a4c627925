"""Estimator-style wrappers for the fitting steps, following the scikit-learn conventions."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .arith import GroupElement
from .symbols import DEFAULT_TOL, builtin_level11, build_symbol_map, modsym_word
from .words import coset_table, fit_linear_envelope
from .growth import fit_log_arrays


class LogGrowthRegressor(RegressorMixin, BaseEstimator):
    """Fits |psi| <= A log(norm) + B with B taken from the small-norm rows.

    X has one column holding the norms; y holds |psi|.
    """

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        self.n_features_in_ = X.shape[1]
        if np.any(X[:, 0] < 1):
            raise ValueError("norms must be at least 1")
        self.A_, self.B_ = fit_log_arrays(X[:, 0], y)
        return self

    def predict(self, X):
        check_is_fitted(self, ("A_", "B_"))
        X = check_array(X, dtype=np.float64)
        return self.A_ * np.log(X[:, 0]) + self.B_


class SvarcMilnorRegressor(RegressorMixin, BaseEstimator):
    """Linear envelope word_len <= lam * dist + C on a grid of slopes."""

    def __init__(self, step=0.1, cap=50.0):
        self.step = step
        self.cap = cap

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        self.n_features_in_ = X.shape[1]
        self.lam_, self.cee_ = fit_linear_envelope(X[:, 0], y, step=self.step, cap=self.cap)
        return self

    def predict(self, X):
        check_is_fitted(self, ("lam_", "cee_"))
        X = check_array(X, dtype=np.float64)
        return self.lam_ * X[:, 0] + self.cee_


class ModularSymbolTransformer(TransformerMixin, BaseEstimator):
    """Maps rows (a, b, c, d) of Gamma0(N) elements to (re psi, im psi, |psi|).

    ``fit`` builds the generator table and symbol map; with ``series=None``
    the built-in level-11 newform is used.
    """

    def __init__(self, level=11, series=None, tol=DEFAULT_TOL):
        self.level = level
        self.series = series
        self.tol = tol

    def fit(self, X=None, y=None):
        series = self.series if self.series is not None else builtin_level11()
        self.table_ = coset_table(self.level)
        self.map_ = build_symbol_map(self.table_, series, self.tol)
        self.n_features_in_ = 4
        return self

    def transform(self, X):
        check_is_fitted(self, "map_")
        X = check_array(X, dtype=np.int64)
        if X.shape[1] != 4:
            raise ValueError(f"expected 4 columns (a, b, c, d), got {X.shape[1]}")
        out = np.empty((X.shape[0], 3))
        for i, row in enumerate(X):
            psi = modsym_word(GroupElement(*(int(v) for v in row)), self.map_)
            out[i] = psi.real, psi.imag, abs(psi)
        return out
