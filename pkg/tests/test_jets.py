import numpy as np
import pytest

from curvid import jets, models
from curvid.harmonic import einstein_nabla_norm
from curvid.invariants import scalar_invariants
from curvid.tensor_core import TensorError, curvature_symmetry_residuals, second_bianchi_residual


@pytest.fixture(scope="module")
def sphere6():
    return jets.curvature_jet(jets.sphere_chart(6), 4)


@pytest.fixture(scope="module")
def perturbed5():
    return jets.curvature_jet(jets.perturbed_flat_chart(5, seed=0, eps=1e-2), 4)


# -- jet arithmetic ---------------------------------------------------------------------------


def test_monomial_count():
    space = jets.JetSpace(3, 4)
    assert space.size == 35  # C(3 + 4, 4)


def test_product_matches_polynomial_multiplication():
    space = jets.jet_space(2, 4)
    x, y = space.coordinates()
    p = (x + 1.0) * (y * 2.0 + x)  # 2y + x + 2xy + x^2
    nonzero = {k: v for k, v in p.coefficients().items() if v}
    assert nonzero == {(1, 0): 1.0, (0, 1): 2.0, (1, 1): 2.0, (2, 0): 1.0}


def test_truncation_drops_high_degrees():
    space = jets.jet_space(1, 3)
    (x,) = space.coordinates()
    assert not any((x * x * x * x).coefficients().values())


def test_reciprocal_and_geometric_series():
    space = jets.jet_space(2, 5)
    x, y = space.coordinates()
    one = space.constant(1.0).coefficients()
    f = (x * 0.5 + y * y) + 2.0
    assert (jets.reciprocal(f) * f).coefficients() == pytest.approx(one, abs=1e-15)
    u = x * 0.3 - y
    assert (jets.geometric(u) * (u + 1.0)).coefficients() == pytest.approx(one, abs=1e-15)
    with pytest.raises(ValueError):
        jets.geometric(u + 1.0)


def test_matrix_entries_index_tensor_axes():
    space = jets.jet_space(2, 2)
    x, _ = space.coordinates()
    M = jets.contract(",ij->ij", x, space.constant(np.array([[1.0, 2.0], [3.0, 4.0]])))
    assert M[1, 0].coefficients()[(1, 0)] == 3.0


def test_derivative_of_polynomial():
    space = jets.jet_space(2, 4)
    x, y = space.coordinates(center=[1.0, 2.0])
    f = x * x * y  # d/dx = 2xy -> 4 at the center
    assert f.derivative(0).value() == pytest.approx(4.0)
    assert f.derivative(1).value() == pytest.approx(1.0)
    assert f.derivative(0).order == 3


def test_matrix_inverse():
    space = jets.jet_space(2, 4)
    g = jets.perturbed_flat_chart(2, seed=3, eps=0.1).builder(space.coordinates())
    prod = jets.contract("ij,jk->ik", g, jets.matrix_inverse(g))
    assert np.allclose(prod.data, space.constant(np.eye(2)).data, atol=1e-14)


# -- charts and orthonormalization -----------------------------------------------------------


def test_orthonormal_components():
    T = np.random.default_rng(0).standard_normal((3, 3, 3))
    assert np.array_equal(jets.orthonormal_components(np.eye(3), T), T)
    S = np.random.default_rng(1).standard_normal((4, 4))
    assert np.allclose(jets.orthonormal_components(4 * np.eye(4), S), S / 4)
    A = np.random.default_rng(2).standard_normal((5, 5))
    g = A @ A.T + 5 * np.eye(5)
    assert np.allclose(jets.orthonormal_components(g, g), np.eye(5), atol=1e-13)
    with pytest.raises(np.linalg.LinAlgError):
        jets.orthonormal_components(-np.eye(3), np.eye(3))


def test_non_positive_chart_rejected():
    bad = jets.ChartMetric("bad", 2, lambda x: x[0].space.constant(-np.eye(2)))
    with pytest.raises(TensorError):
        bad.metric_jet(2)


def test_capability_errors():
    chart = jets.sphere_chart(3)
    with pytest.raises(jets.CapabilityError):
        jets.curvature_jet(chart, 1)
    low = jets.curvature_jet(chart, 3)
    assert low.nabla_R is not None and low.nabla2_R is None
    with pytest.raises(jets.CapabilityError, match="provides R, nabla R"):
        jets.verify_lichnerowicz_formula(low)


# -- curvature ------------------------------------------------------------------------------


def test_flat_chart():
    cj = jets.curvature_jet(jets.flat_chart(4), 4)
    assert not cj.R.any() and not cj.nabla_R.any() and not cj.nabla2_R.any()
    assert jets.verify_lichnerowicz_formula(cj).relative_error == 0.0


def test_sphere_chart(sphere6):
    assert np.max(np.abs(sphere6.R - models.constant_curvature(6, 1.0))) <= 1e-11
    assert np.max(np.abs(sphere6.nabla_R)) <= 1e-11
    assert np.max(np.abs(sphere6.nabla2_R)) <= 1e-11
    assert sphere6.ricci_identity_residual() <= 1e-9
    assert jets.verify_lichnerowicz_formula(sphere6).relative_error <= 1e-8


@pytest.mark.parametrize("kappa", [-0.5, 2.0])
def test_space_form_chart_off_center(kappa):
    cj = jets.curvature_jet(jets.sphere_chart(4, kappa, center=[0.1, -0.2, 0.05, 0.3]), 4)
    assert np.max(np.abs(cj.R - models.constant_curvature(4, kappa))) <= 1e-11 * max(1.0, abs(kappa))
    assert np.max(np.abs(cj.nabla_R)) <= 1e-10


def test_chart_independence():
    a = scalar_invariants(jets.curvature_jet(jets.sphere_chart(6), 2).R).as_dict()
    b = scalar_invariants(jets.curvature_jet(jets.sphere_chart(6, center=[0.2, 0, -0.1, 0.4, 0, 0.3]), 2).R).as_dict()
    assert b == pytest.approx(a, rel=1e-10)


def test_product_chart():
    cj = jets.curvature_jet(jets.product_chart(jets.sphere_chart(2), jets.sphere_chart(4)), 3)
    expected = models.product_space(models.constant_curvature(2, 1.0), models.constant_curvature(4, 1.0))
    assert np.max(np.abs(cj.R - expected)) <= 1e-11
    assert np.max(np.abs(cj.nabla_R)) <= 1e-11


def test_perturbed_chart_symmetries(perturbed5):
    assert max(curvature_symmetry_residuals(perturbed5.R).values()) <= 1e-12
    assert second_bianchi_residual(perturbed5.nabla_R) <= 1e-12
    assert max(curvature_symmetry_residuals(perturbed5.nabla_R).values()) <= 1e-12


def test_perturbed_chart_identities(perturbed5):
    assert perturbed5.ricci_identity_residual() <= 1e-9
    assert jets.verify_lichnerowicz_formula(perturbed5).relative_error <= 1e-7


def test_lichnerowicz_derivative_order_matters(perturbed5):
    # the other derivative order on rho_ic;ab breaks the identity by far more than round-off
    assert jets.verify_lichnerowicz_formula(perturbed5, ricci_order="ba").relative_error > 1e-6


@pytest.mark.parametrize("seed", [1, 2])
def test_perturbed_chart_other_seeds(seed):
    cj = jets.curvature_jet(jets.perturbed_flat_chart(4, seed=seed, eps=1e-2, center=[0.1, 0.0, -0.2, 0.05]), 4)
    assert cj.ricci_identity_residual() <= 1e-9
    assert jets.verify_lichnerowicz_formula(cj).relative_error <= 1e-7


def test_einstein_norm_on_symmetric_chart(sphere6):
    nabla2 = float(np.sum(sphere6.nabla_R**2))
    assert abs(nabla2 - einstein_nabla_norm(sphere6.R)) <= 1e-9
