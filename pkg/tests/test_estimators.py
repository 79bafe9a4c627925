import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from modsym_growth.arith import GroupElement
from modsym_growth.estimators import LogGrowthRegressor, ModularSymbolTransformer, SvarcMilnorRegressor
from modsym_growth.growth import fit_log_arrays
from modsym_growth.symbols import modsym_direct


def test_log_growth_regressor():
    norms = np.array([[1], [5], [100], [10**6]], dtype=float)
    y = 2 * np.log(norms[:, 0])
    est = LogGrowthRegressor().fit(norms, y)
    assert est.A_ == pytest.approx(2.0) and est.B_ == 0.0
    assert est.predict([[math.e]])[0] == pytest.approx(2.0)
    assert np.all(est.predict(norms) >= y - 1e-9)
    assert (est.A_, est.B_) == fit_log_arrays(norms[:, 0], y)


def test_log_growth_rejects_bad_norms():
    with pytest.raises(ValueError):
        LogGrowthRegressor().fit([[0.5]], [1.0])
    with pytest.raises(NotFittedError):
        LogGrowthRegressor().predict([[2.0]])


def test_svarc_milnor_regressor():
    d = np.arange(0, 1001, 10, dtype=float)
    est = SvarcMilnorRegressor().fit(d[:, None], 2 * d)
    assert est.lam_ == pytest.approx(2.0) and est.cee_ == 0.0
    assert est.get_params() == {"step": 0.1, "cap": 50.0}
    other = clone(est).set_params(cap=5.0)
    assert other.cap == 5.0 and not hasattr(other, "lam_")


def test_symbol_transformer(series11):
    est = ModularSymbolTransformer(level=11, series=series11)
    rows = np.array([[1, 0, 0, 1], [1, 0, 11, 1], [4, -1, 33, -8], [7, 2, 66, 19]])
    out = est.fit_transform(rows)
    assert out.shape == (3 + 1, 3)
    assert np.allclose(out[:2], 0, atol=1e-9)
    for row, vals in zip(rows, out):
        psi = modsym_direct(GroupElement(*row), series11)
        assert vals == pytest.approx([psi.real, psi.imag, abs(psi)], abs=1e-8)
    with pytest.raises(ValueError):
        est.transform(rows[:, :3])
