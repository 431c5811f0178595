import math

import numpy as np
import pytest

import semiweight as sw


@pytest.fixture
def two_point():
    return sw.build_generator([1.0, 1.0], [[1.0, -1.0], [-1.0, 1.0]], "markovian")


def test_semigroup_closed_form(two_point):
    t = 0.5 * math.log(2.0)
    T = sw.semigroup_at(two_point, t)
    assert np.allclose(T, [[0.75, 0.25], [0.25, 0.75]], atol=1e-12)


def test_q2_two_point(two_point):
    value, argmax_t, curve = sw.q2_characteristic(two_point, [1.0, 4.0])
    assert value == pytest.approx(25.0 / 16.0, abs=1e-10)
    assert math.isinf(argmax_t)
    assert len(curve) > 100


def test_invalid_generator_raises():
    with pytest.raises(sw.ValidationError):
        sw.build_generator([1.0, 2.0], [[1.0, -1.0], [-1.0, 1.0]], "markovian")


def test_bellman_eval_and_defect():
    e = sw.bellman_eval(1.0, 1.0, 1.0, 1.0, Q=16.0, eps=0.05)
    assert e.value > 0
    g = e.gradient
    assert g[4] < 0 and g[5] < 0
    d = sw.one_leg_defect(1.0, 2.0, 1.5, 1.0, 0.5, 1.0, 2.0, 1.5)
    assert d >= 0


def test_two_point_norm_matches_numpy_svd():
    rng = np.random.default_rng(0)
    for _ in range(25):
        v = rng.uniform(0.1, 10.0)
        z = complex(rng.uniform(0.01, 4.0), rng.uniform(-4.0, 4.0))
        g = np.exp(-2 * z)
        T = 0.5 * np.array([[1 + g, 1 - g], [1 - g, 1 + g]])
        D = np.diag([1.0, v])
        want = np.linalg.svd(D @ T @ np.linalg.inv(D), compute_uv=False)[0]
        assert sw.two_point_weighted_norm_exact(v, z) == pytest.approx(want, abs=1e-11)


def test_tensor_q2():
    assert sw.tensor_q2([1.0]) == pytest.approx(25.0 / 16.0, abs=1e-12)
    assert sw.tensor_q2([0.0, 0.0]) == pytest.approx(1.0, abs=1e-12)


def test_bilinear_integral_single_mode(two_point):
    f = np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0)
    assert sw.bilinear_integral(two_point, f, f) == pytest.approx(0.5, abs=1e-9)


def test_failure_experiment_smoke():
    rep = sw.hormander_failure_experiment(
        [math.atan(2.0), math.atan(4.0), math.atan(8.0)], r=1e-3, s_max=4
    )
    assert rep["hormander_fails"]
    assert rep["uniform_Q"] == pytest.approx(math.e, abs=1e-9)
    assert len(rep["points"]) == 3


def test_gamma_kernel():
    l1, env = sw.gamma_kernel_l1(0.5)
    assert l1 == pytest.approx(1.0, abs=1e-5)
    assert env < 1.2
