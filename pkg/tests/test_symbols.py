import math

import mpmath
import numpy as np
import pytest

from modsym_growth.arith import IDENTITY, GroupElement, T
from modsym_growth.cusps import cusp_classes
from modsym_growth.errors import MembershipError, ParseError, PrecisionError
from modsym_growth.growth import random_element
from modsym_growth.symbols import (
    CuspFormSeries,
    build_symbol_map,
    builtin_level11,
    eichler_F,
    eta_product_coefficients,
    load_series,
    max_direct_denominator,
    modsym_at,
    modsym_direct,
    modsym_scaled_base,
    modsym_word,
    period_lattice,
    word_bound_constant,
    write_series,
    zero_series,
)
from modsym_growth.words import coset_table, rewrite


def _naive_eta(order):
    """q * prod (1 - q^n)^2 (1 - q^11n)^2 by repeated polynomial multiplication."""
    poly = [0] * order
    poly[0] = 1
    for n in range(1, order):
        for step, power in ((n, 2), (11 * n, 2)):
            if step >= order:
                continue
            for _ in range(power):
                for k in range(order - 1, step - 1, -1):
                    poly[k] -= poly[k - step]
    return [0] + poly[: order - 1]  # shift by q: index n holds a_n


def _primes(n):
    return [p for p in range(2, n) if all(p % d for d in range(2, int(p**0.5) + 1))]


def test_eta_product_against_naive_expansion():
    order = 400
    fast = eta_product_coefficients(order)
    naive = _naive_eta(order + 1)
    assert list(fast) == naive[1 : order + 1]


def test_known_leading_coefficients():
    a = eta_product_coefficients(13)
    assert list(a) == [1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1, -2, 4]


def test_hecke_relations():
    a = eta_product_coefficients(5000)
    an = lambda n: int(a[n - 1])  # noqa: E731
    for m in range(2, 70):
        for n in range(2, 70):
            if math.gcd(m, n) == 1 and m * n <= 5000:
                assert an(m * n) == an(m) * an(n)
    for p in _primes(70):
        if p != 11:
            assert an(p * p) == an(p) ** 2 - p
            assert abs(an(p)) <= 2 * math.sqrt(p)


def test_eichler_examples():
    z = zero_series(11, 10)
    assert eichler_F(1j, z)[0] == 0
    one = CuspFormSeries.from_coefficients(1, [1.0])
    # a single stored term carries a tail bound of about 2e-3 at height 1
    value, _ = eichler_F(1j, one, tol=1e-2)
    assert value == pytest.approx(math.exp(-2 * math.pi), rel=1e-14)
    assert abs(value - 1.8674e-3) < 1e-7


def test_eichler_against_high_precision(series11):
    a = series11.coeffs.real.astype(int)
    for z in (1j, 0.3 + 0.5j, -0.7 + 0.05j):
        value, tail = eichler_F(z, series11)
        with mpmath.workdps(40):
            q = mpmath.exp(2j * mpmath.pi * mpmath.mpc(z))
            ref, qn = mpmath.mpf(0), mpmath.mpc(1)
            n_terms = min(len(a), int(60 / (2 * math.pi * z.imag)) + 10)
            for n in range(1, n_terms + 1):
                qn *= q
                ref += mpmath.mpf(int(a[n - 1])) / n * qn
        assert abs(value - complex(ref)) < 1e-10
        assert tail < 1e-10


def test_precision_error(series11):
    with pytest.raises(PrecisionError):
        eichler_F(1e-6j, series11)


def test_direct_examples(series11, rng):
    assert modsym_direct(IDENTITY, series11) == 0
    for k in (1, -3, 17):
        assert abs(modsym_direct(T**k, series11)) < 1e-10
    with pytest.raises(MembershipError):
        modsym_direct(GroupElement(0, -1, 1, 0), series11)
    for _ in range(30):
        g = random_element(11, 300, rng)
        assert abs(modsym_direct(g, series11) + modsym_direct(g.inverse(), series11)) < 2e-10


def test_base_point_independence(series11, rng):
    for _ in range(30):
        g = random_element(11, 150, rng)
        if g.c == 0:
            continue
        direct = modsym_direct(g, series11)
        assert abs(modsym_scaled_base(g, series11, 2) - direct) < 1e-8
        assert abs(modsym_at(g, series11, (-g.d + 1.5j) / g.c) - direct) < 1e-8


def test_symbol_map_examples(table11, smap11, series11):
    assert not build_symbol_map(coset_table(1), zero_series(1)).values.any()
    for j, g in enumerate(table11.generators):
        assert smap11.values[j] == pytest.approx(modsym_direct(g, series11), abs=1e-12)
    assert word_bound_constant(smap11) > 0
    mods = np.abs(smap11.values)
    assert np.sum(np.isclose(mods, mods.max())) >= 2


def test_level_mismatch(series11):
    with pytest.raises(MembershipError):
        build_symbol_map(coset_table(5), series11)


def test_word_bound_constant_examples(table1):
    from modsym_growth.symbols import SymbolMap

    vals = np.zeros(len(table1.generators), dtype=complex)
    assert word_bound_constant(SymbolMap(table1, vals, 1e-10)) == 0
    vals[1] = 3 + 4j
    assert word_bound_constant(SymbolMap(table1, vals, 1e-10)) == 5


def test_word_examples(table11, smap11):
    assert modsym_word(IDENTITY, smap11) == 0
    for j, g in enumerate(table11.generators):
        assert modsym_word(g, smap11) == smap11.values[j]
    with pytest.raises(MembershipError):
        modsym_word(GroupElement(0, -1, 1, 0), smap11)


def test_word_matches_direct(smap11, series11, rng):
    for _ in range(100):
        g = random_element(11, 1000, rng)
        assert abs(modsym_word(g, smap11) - modsym_direct(g, series11)) < 1e-6


def test_homomorphism(table11, smap11, rng):
    bound = word_bound_constant(smap11)
    for _ in range(100):
        g, h = random_element(11, 10**4, rng), random_element(11, 10**4, rng)
        assert abs(modsym_word(g * h, smap11) - modsym_word(g, smap11) - modsym_word(h, smap11)) < 1e-9
        assert abs(modsym_word(g, smap11)) <= bound * len(rewrite(g, table11)) + 1e-12


def test_parabolic_vanishing(series11, rng):
    cls = cusp_classes(11)
    cmax = max_direct_denominator(series11, 1e-10)
    done = 0
    while done < 30:
        c = cls[int(rng.integers(len(cls)))]
        g = random_element(11, 40, rng)
        p = g * c.p_stab ** int(rng.integers(1, 5)) * g.inverse()
        if p.c > cmax:
            continue
        assert abs(modsym_direct(p, series11)) < 1e-6
        done += 1


def test_period_lattice(smap11):
    lat = period_lattice(list(smap11.values))
    assert lat.residual < 1e-5
    # real period of the conductor-11 curve
    assert abs(lat.omega1) == pytest.approx(1.2692093042795534, abs=1e-6)
    assert np.all(np.abs(lat.coefficients) <= 20)


def test_max_direct_denominator(series11):
    cmax = max_direct_denominator(series11, 1e-8)
    assert series11.tail_bound(1.0 / cmax) <= 1e-8 < series11.tail_bound(1.0 / (cmax + 1))


def test_load_series_example(tmp_path):
    path = tmp_path / "f.txt"
    path.write_text("# level 11\n11 2 3\n1 1\n\n2 -2\n3 -1 0\n")
    s = load_series(path)
    assert s.level == 11 and list(s.coeffs.real) == [1, -2, -1]
    assert list(s.coeffs.real) == list(eta_product_coefficients(3))
    write_series(s, tmp_path / "g.txt")
    assert list(load_series(tmp_path / "g.txt").coeffs) == list(s.coeffs)


@pytest.mark.parametrize(
    "text,line",
    [
        ("11 2 0\n", 1),
        ("", 1),
        ("11 4 1\n1 1\n", 1),
        ("11 2 2\n1 1\n3 1\n", 3),
        ("11 2 2\n1 1\n2 x\n", 3),
        ("11 2 3\n1 1\n2 1\n", 3),
    ],
)
def test_load_series_errors(tmp_path, text, line):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    with pytest.raises(ParseError, match=f"line {line}"):
        load_series(path)


def test_builtin_first_coefficient():
    assert builtin_level11(10).coeffs[0] == 1
