import numpy as np
import pytest

from app.core.errors import DimensionMismatchError, InvalidSizeError
from app.core.spectral import path_spectrum
from app.core.trig_kernels import TrigPlan, chebyshev_u, dct2, dst1, idct2, u_roots


def test_dct2_is_path_graph_analysis():
    n = 12
    rng = np.random.default_rng(3)
    s = rng.standard_normal(n)
    basis = path_spectrum(n).U
    assert np.allclose(dct2(s), basis.T @ s, atol=1e-13)
    assert np.allclose(idct2(dct2(s)), s, atol=1e-13)


def test_dct2_acts_along_first_axis():
    x = np.arange(12.0).reshape(4, 3)
    out = dct2(x)
    for col in range(3):
        assert np.allclose(out[:, col], dct2(x[:, col]))


def test_dst1_factor_two_convention():
    h = np.array([0.3, -1.0, 2.0, 0.5])
    m = h.shape[0]
    j = np.arange(1, m + 1)
    expected = 2.0 * np.sin(np.outer(j, j) * np.pi / (m + 1)) @ h
    assert np.allclose(dst1(h), expected)
    assert np.allclose(dst1(np.array([1.5])), [3.0])


def test_trig_plan_checks_length():
    plan = TrigPlan(8, "dst1")
    assert plan.length == 7
    assert plan(np.ones(7)).shape == (7,)
    with pytest.raises(DimensionMismatchError):
        plan(np.ones(8))
    with pytest.raises(InvalidSizeError):
        TrigPlan(1, "dct2")
    with pytest.raises(InvalidSizeError):
        dct2(np.ones(1))


def test_u_roots_are_chebyshev_zeros():
    n = 9
    roots = u_roots(n)
    assert roots.shape == (n - 1,)
    assert np.all(np.diff(roots) < 0)
    assert np.allclose(chebyshev_u(n - 1, roots), 0.0, atol=1e-12)
    # U_m(cos t) = sin((m + 1) t) / sin t
    t = 0.37
    assert chebyshev_u(4, np.cos(t)) == pytest.approx(np.sin(5 * t) / np.sin(t))


@pytest.mark.parametrize("n", [5, 8, 13])
def test_chebyshev_u_discrete_orthogonality(n: int):
    y = u_roots(n)
    weights = 1.0 - y**2
    u = np.array([chebyshev_u(order, y) for order in range(n - 1)])
    gram = (u * weights) @ u.T
    assert np.allclose(gram, 0.5 * n * np.eye(n - 1), atol=1e-10)


def test_u_roots_relate_to_path_eigenvalues():
    n = 8
    y = u_roots(n)
    j = np.arange(1, n)
    assert np.allclose(1.0 - y**2, np.sin(j * np.pi / n) ** 2, atol=1e-14)
    lam = path_spectrum(n).lam
    assert np.allclose(y, 1.0 - lam[1:] / 2.0, atol=1e-14)


@pytest.mark.parametrize("length", [1, 6, 31])
def test_dst1_is_involution_up_to_scale(length: int):
    h = np.random.default_rng(length).standard_normal(length)
    assert np.allclose(dst1(dst1(h)), 2.0 * (length + 1) * h, atol=1e-12)


def test_dst1_small_example():
    assert np.allclose(dst1(np.array([1.0, 0.0, 0.0])), [np.sqrt(2.0), 2.0, np.sqrt(2.0)])


def test_dct2_preserves_norm():
    s = np.random.default_rng(14).standard_normal(37)
    assert np.linalg.norm(dct2(s)) == pytest.approx(np.linalg.norm(s), rel=1e-13)
    assert np.linalg.norm(idct2(s)) == pytest.approx(np.linalg.norm(s), rel=1e-13)
