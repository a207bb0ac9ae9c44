import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from optpot import (
    GridMismatchError,
    InputFormatError,
    InvalidArgumentError,
    PotentialSpec,
    SampledFunction,
    inner_product,
    make_grid,
    sample_potential,
)

from .conftest import sine


def test_make_grid_small():
    g = make_grid(math.pi, 3)
    assert g.h == pytest.approx(math.pi / 4, abs=1e-15)
    np.testing.assert_allclose(g.x, [math.pi / 4, math.pi / 2, 3 * math.pi / 4], rtol=0, atol=1e-15)


def test_make_grid_spacing():
    g = make_grid(1.0, 999)
    assert g.h == pytest.approx(1e-3, rel=1e-14)
    assert g.h * (g.n + 1) == pytest.approx(g.L, rel=1e-15)
    assert np.all(np.diff(g.x) > 0) and g.x[0] > 0 and g.x[-1] < g.L


@pytest.mark.parametrize("L, n", [(-1.0, 10), (0.0, 10), (1.0, 2), (math.inf, 10), (1.0, 3.5)])
def test_make_grid_rejects(L, n):
    with pytest.raises(InvalidArgumentError):
        make_grid(L, n)


def test_inner_product_normalized_sine():
    g = make_grid(math.pi, 2000)
    f = math.sqrt(2 / math.pi) * sine(g, 1)
    assert inner_product(f, f) == pytest.approx(1.0, abs=1e-6)


def test_inner_product_orthogonal_sines():
    g = make_grid(math.pi, 2000)
    assert abs(inner_product(sine(g, 1), sine(g, 2))) <= 1e-9


def test_inner_product_constant_boundary_convention():
    g = make_grid(1.0, 999)
    one = SampledFunction.constant(g, 1.0)
    # direct summation oracle: h * n
    expected = sum(1e-3 for _ in range(999))
    assert inner_product(one, one) == pytest.approx(expected, rel=1e-12)
    assert inner_product(one, one) == pytest.approx(0.999, rel=1e-12)


def test_inner_product_grid_mismatch():
    a = SampledFunction.constant(make_grid(1.0, 10), 1.0)
    b = SampledFunction.constant(make_grid(1.0, 11), 1.0)
    with pytest.raises(GridMismatchError):
        inner_product(a, b)
    with pytest.raises(GridMismatchError):
        a + b


def test_sampled_function_rejects_nonfinite_and_wrong_length():
    g = make_grid(1.0, 5)
    with pytest.raises(InvalidArgumentError):
        SampledFunction(g, [0, 1, np.nan, 0, 0])
    with pytest.raises(InvalidArgumentError):
        SampledFunction(g, [0, 1, 2])


def test_sampled_function_is_immutable():
    f = SampledFunction.constant(make_grid(1.0, 5), 2.0)
    with pytest.raises(ValueError):
        f.values[0] = 3.0


_vec = arrays(np.float64, 17, elements=st.floats(-1e3, 1e3, allow_nan=False))
# squares of subnormals underflow to zero, so keep magnitudes normal
_normal = st.one_of(st.just(0.0), st.floats(1e-100, 1e3), st.floats(-1e3, -1e-100))


@settings(max_examples=60, deadline=None)
@given(_vec, _vec, _vec, st.floats(-10, 10), st.floats(-10, 10))
def test_inner_product_symmetric_bilinear(a, b, c, alpha, beta):
    g = make_grid(2.0, 17)
    f1, f2, f3 = (SampledFunction(g, v) for v in (a, b, c))
    assert inner_product(f1, f2) == inner_product(f2, f1)
    lhs = inner_product(alpha * f1 + beta * f2, f3)
    rhs = alpha * inner_product(f1, f3) + beta * inner_product(f2, f3)
    scale = 1 + g.h * (abs(alpha) * np.abs(a) @ np.abs(c) + abs(beta) * np.abs(b) @ np.abs(c))
    assert abs(lhs - rhs) <= 1e-12 * scale


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, 17, elements=_normal))
def test_inner_product_positive(a):
    f = SampledFunction(make_grid(2.0, 17), a)
    val = inner_product(f, f)
    assert val >= 0
    assert (val == 0) == (not np.any(a))


def test_inner_product_second_order_on_nonperiodic_integrand():
    # f*g = x * sin(x) on (0, pi) vanishes at both ends; exact integral = pi
    errs = []
    for n in (49, 99, 199, 399):
        g = make_grid(math.pi, n)
        val = inner_product(SampledFunction(g, g.x), SampledFunction(g, np.sin(g.x)))
        errs.append(abs(val - math.pi))
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    for r in ratios:
        assert 3.5 <= r <= 4.5


def test_sample_potential_presets():
    g = make_grid(4.0, 7)
    assert np.all(sample_potential(PotentialSpec.zero(), g).values == 0)
    assert np.all(sample_potential(PotentialSpec.constant(5), g).values == 5)
    w = sample_potential(PotentialSpec.square_well(-10, 1.0, 3.0), g).values
    np.testing.assert_array_equal(w, [0, -10, -10, -10, -10, -10, 0])
    hv = sample_potential(PotentialSpec.harmonic(4, 2.0), g).values
    np.testing.assert_allclose(hv, 4 * (g.x - 2) ** 2)


def test_square_well_bounds_checked():
    g = make_grid(1.0, 10)
    with pytest.raises(InvalidArgumentError):
        sample_potential(PotentialSpec.square_well(-1, 0.8, 0.2), g)
    with pytest.raises(InvalidArgumentError):
        sample_potential(PotentialSpec.square_well(-1, 0.2, 1.5), g)


def test_unknown_kind_rejected():
    with pytest.raises(InvalidArgumentError):
        PotentialSpec("gaussian")


def test_samples_interpolated_and_clamped(tmp_path):
    p = tmp_path / "v.csv"
    p.write_text("x,v\n0.25,1.0\n0.75,3.0\n")
    g = make_grid(1.0, 3)  # nodes 0.25, 0.5, 0.75
    np.testing.assert_allclose(sample_potential(PotentialSpec.samples(p), g).values, [1.0, 2.0, 3.0])
    g = make_grid(1.0, 9)  # nodes 0.1 .. 0.9, outside sampled range gets clamped
    v = sample_potential(PotentialSpec.samples(p), g).values
    assert v[0] == 1.0 and v[-1] == 3.0


@pytest.mark.parametrize(
    "text",
    ["", "x,w\n0.1,1\n", "x,v\n0.5,1\n0.2,2\n", "x,v\n0.1,abc\n", "x,v\n", "x,v\n0.1,1\n2.0,1\n"],
)
def test_samples_malformed(tmp_path, text):
    p = tmp_path / "v.csv"
    p.write_text(text)
    with pytest.raises(InputFormatError):
        sample_potential(PotentialSpec.samples(p), make_grid(1.0, 5))


def test_samples_missing_file(tmp_path):
    with pytest.raises(InputFormatError):
        sample_potential(PotentialSpec.samples(tmp_path / "nope.csv"), make_grid(1.0, 5))
