import numpy as np
import pytest

from curvid import coefficients, models
from curvid.identities import (
    DegenerateFitError,
    PreconditionError,
    evaluate_table,
    kernel_coefficient_7d,
    residual_5d,
    residual_5d_scalar,
    residual_6d,
    residual_einstein,
)
from curvid.tensor_core import DimensionError

SEEDS = range(40)


@pytest.mark.parametrize("seed", SEEDS)
def test_six_dimensional_identity_is_universal(seed):
    R = models.random_act(6, seed, 1 + seed % 5)
    assert residual_6d(R).relative_error <= 1e-10


def test_six_dimensional_identity_on_sphere_and_flat():
    assert residual_6d(models.constant_curvature(6, 1.0)).max_abs <= 1e-10
    flat = residual_6d(models.flat(6))
    assert flat.term_mass == 0 and flat.relative_error == 0


def test_six_dimensional_identity_needs_dim_six():
    with pytest.raises(DimensionError):
        residual_6d(models.random_act(5, 0, 2))


def test_sphere_einstein_block_hand_value():
    # per diagonal entry: (-1800 - 480 + 240) + 600 - 240 + 480 + 1200 = 0
    assert (-1800 - 480 + 240) + 600 - 240 + 480 + 1200 == 0
    assert residual_einstein(models.constant_curvature(6, 1.0)).max_abs <= 1e-10


def test_scalar_identity_sphere_hand_value():
    assert 8000 - 19200 + 2400 + 5120 + 7680 - 3840 - 480 + 320 == 0
    assert abs(residual_5d_scalar(models.constant_curvature(5, 1.0)).residual) <= 1e-10


@pytest.mark.parametrize("m", [4, 5])
@pytest.mark.parametrize("seed", range(15))
def test_low_dimensional_identities_are_universal(m, seed):
    R = models.random_act(m, seed, 1 + seed % 5)
    assert residual_5d_scalar(R).relative_error <= 1e-10
    assert residual_5d(R).relative_error <= 1e-10


def test_low_dimensional_dimension_checks():
    with pytest.raises(DimensionError):
        residual_5d_scalar(models.random_act(6, 0, 2))
    with pytest.raises(DimensionError):
        residual_5d(models.random_act(3, 0, 2))


@pytest.mark.parametrize("m", [4, 5, 6, 7])
def test_trace_of_two_tensor_identity_is_scalar_identity(m):
    R = models.random_act(m, 100 + m, 3)
    tr = float(np.trace(evaluate_table("dim5", R).residual))
    sc = evaluate_table("dim5-scalar", R)
    assert abs(tr - sc.residual) <= 1e-12 * sc.term_mass


@pytest.mark.parametrize("m", [4, 5, 6])
@pytest.mark.parametrize("seed", range(5))
def test_einstein_identities(m, seed):
    R = models.make_einstein(models.random_act(m, seed, 3))
    assert residual_einstein(R).relative_error <= 1e-9


def test_einstein_identities_on_models():
    assert residual_einstein(models.nikolayevsky(0.3, 1.2), 5).relative_error <= 1e-10
    assert residual_einstein(models.singer_thorpe(0.4, -1.0, 0.25), 4).relative_error <= 1e-10


def test_nikolayevsky_weakly_einstein_relation():
    mu, nu = 0.35, -0.8
    R = models.nikolayevsky(mu, nu)
    from curvid.invariants import scalar_invariants, two_tensor_invariants

    s, t = scalar_invariants(R), two_tensor_invariants(R)
    lhs = 2 * t.Rring - t.Rhat
    rhs = s.tau / 100 * (9 * s.R2 - s.tau**2) * np.eye(5)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * np.max(np.abs(t.Rhat))


def test_both_six_dimensional_forms_vanish_on_einstein_input():
    R = models.make_einstein(models.random_act(6, 9, 4))
    assert residual_6d(R).relative_error <= 1e-10
    assert residual_einstein(R).relative_error <= 1e-9


def test_einstein_precondition():
    with pytest.raises(PreconditionError, match="Ricci deviation"):
        residual_einstein(models.random_act(6, 0, 3))
    with pytest.raises(DimensionError):
        residual_einstein(models.constant_curvature(6, 1.0), m=5)


@pytest.mark.parametrize("row", range(len(coefficients.DIM6)))
def test_one_percent_corruption_is_detected(row):
    R = models.random_act(6, 7, 3)
    assert residual_6d(R, scale={row: 1.01}).relative_error > 1e-4


def test_transcribed_tables_are_not_universal():
    R = models.random_act(6, 0, 3)
    assert evaluate_table("dim6-transcribed", R).relative_error > 1e-4
    R5 = models.random_act(5, 0, 3)
    assert evaluate_table("dim5-transcribed", R5).relative_error > 1e-4


def test_transcribed_tables_agree_on_einstein_input():
    R = models.make_einstein(models.random_act(6, 1, 3))
    assert evaluate_table("dim6-transcribed", R).relative_error <= 1e-10


def test_five_dimensional_table_is_minus_third_of_two_tensor_part():
    g_terms = {term for term, _ in coefficients.DIM6 if term.endswith(" g")}
    two_tensor = [(t, c) for t, c in coefficients.DIM6 if t not in g_terms]
    assert [(t, -c / 3) for t, c in two_tensor] == list(coefficients.DIM5)


def test_kernel_coefficient_in_dimension_seven():
    first = kernel_coefficient_7d([models.random_act(7, s, 2) for s in range(3)])
    second = kernel_coefficient_7d([models.random_act(7, s, 3) for s in range(10, 13)])
    assert first["scatter"] <= 1e-8 and second["scatter"] <= 1e-8
    assert abs(first["lambda"] - second["lambda"]) <= 1e-8 * abs(first["lambda"])
    spheres = kernel_coefficient_7d([models.constant_curvature(7, k) for k in (0.5, 2.0)])
    assert abs(spheres["lambda"] - first["lambda"]) <= 1e-8 * abs(first["lambda"])


def test_kernel_fit_errors():
    with pytest.raises(DegenerateFitError):
        kernel_coefficient_7d([models.flat(7), models.flat(7)])
    with pytest.raises(ValueError):
        kernel_coefficient_7d([models.random_act(7, 0, 2)])
    with pytest.raises(DimensionError):
        kernel_coefficient_7d([models.random_act(6, 0, 2)] * 2)
