import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvid import models
from curvid.tensor_core import (
    ConvergenceError,
    DimensionError,
    MalformedSpecError,
    TensorFormatError,
    contract,
    curvature_symmetry_residuals,
    generalized_kronecker,
    is_curvature_derivative,
    is_curvature_tensor,
    load_tensor,
    naive_contract,
    permutation_sign,
    project_curvature_symmetries,
    project_second_bianchi,
    rotate,
    save_tensor,
    second_bianchi_residual,
    symmetrize,
    symmetrize_naive,
)


def rel(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-300)
    return float(np.max(np.abs(a - b))) / scale


def test_trace_of_identity():
    assert contract("ii->", np.eye(6)) == 6


def test_unicode_arrow_accepted():
    assert contract("ii→", np.eye(3)) == 3


def test_sum_of_sectional_components_on_unit_sphere():
    R = models.constant_curvature(5, 1.0)
    assert contract("abab->", R) == pytest.approx(-20.0, abs=1e-13)
    assert naive_contract("abab->", R) == pytest.approx(-20.0, abs=1e-13)


def test_norm_squared_of_unit_sphere():
    R = models.constant_curvature(6, 1.0)
    assert contract("abcd,abcd->", R, R) == pytest.approx(60.0, abs=1e-12)


def test_mismatched_dims_rejected():
    with pytest.raises(DimensionError):
        contract("ij,jk->ik", np.ones((3, 3)), np.ones((4, 4)))


def test_letter_three_times_rejected():
    with pytest.raises(MalformedSpecError):
        contract("ij,jk,jl->ikl", *(np.ones((3, 3)),) * 3)


@pytest.mark.parametrize(
    "spec, ranks",
    [
        ("iabc,jabc->ij", (4, 4)),
        ("ab,iabj->ij", (2, 4)),
        ("abcd,abuv,cduv->", (4, 4, 4)),
        ("abcd,aucv,budv->", (4, 4, 4)),
        ("ia,jb,ab->ij", (2, 2, 2)),
    ],
)
@pytest.mark.parametrize("m", [4, 5])
def test_contract_matches_naive_loops(spec, ranks, m):
    rng = np.random.default_rng(m)
    ops = [rng.standard_normal((m,) * r) for r in ranks]
    assert rel(contract(spec, *ops), naive_contract(spec, *ops)) <= 1e-13


def test_contract_is_multilinear():
    rng = np.random.default_rng(3)
    T1, T2, S = (rng.standard_normal((5,) * 4) for _ in range(3))
    lhs = contract("iabc,jabc->ij", 2.0 * T1 - 0.5 * T2, S)
    rhs = 2.0 * contract("iabc,jabc->ij", T1, S) - 0.5 * contract("iabc,jabc->ij", T2, S)
    assert rel(lhs, rhs) <= 1e-12


def test_contract_is_bit_stable():
    rng = np.random.default_rng(9)
    A, B = rng.standard_normal((6,) * 4), rng.standard_normal((6,) * 4)
    first = contract("iabc,jabc->ij", A, B)
    assert all(np.array_equal(first, contract("iabc,jabc->ij", A, B)) for _ in range(5))


@pytest.mark.parametrize(
    "upper, lower, expected",
    [((1, 2, 3), (1, 2, 3), 1), ((1, 2, 3), (2, 1, 3), -1), ((1, 1, 2), (1, 2, 3), 0)],
)
def test_generalized_kronecker_examples(upper, lower, expected):
    assert generalized_kronecker(upper, lower) == expected


def test_generalized_kronecker_length_mismatch():
    with pytest.raises(ValueError):
        generalized_kronecker((1, 2), (1, 2, 3))


def test_generalized_kronecker_is_permutation_sign():
    base = (2, 5, 1, 4)
    for perm in itertools.permutations(range(4)):
        permuted = tuple(base[p] for p in perm)
        assert generalized_kronecker(permuted, base) == permutation_sign(perm)


def test_projection_fixes_curvature_tensors_and_zero():
    R = models.random_act(5, 2, 3)
    assert rel(project_curvature_symmetries(R), R) <= 1e-14
    assert not project_curvature_symmetries(np.zeros((4,) * 4)).any()


def test_projection_of_random_tensor():
    raw = np.random.default_rng(0).standard_normal((5,) * 4)
    P = project_curvature_symmetries(raw)
    assert is_curvature_tensor(P)
    assert rel(project_curvature_symmetries(P), P) <= 1e-14


def test_curvature_projection_self_adjoint():
    rng = np.random.default_rng(1)
    x, y = rng.standard_normal((2,) + (4,) * 4)
    lhs = np.sum(project_curvature_symmetries(x) * y)
    rhs = np.sum(x * project_curvature_symmetries(y))
    assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


def test_second_bianchi_projection():
    raw = np.random.default_rng(4).standard_normal((4,) * 5)
    D = project_second_bianchi(raw)
    assert second_bianchi_residual(D) <= 1e-12
    assert is_curvature_derivative(D)
    assert rel(project_second_bianchi(D), D) <= 1e-12
    assert not project_second_bianchi(np.zeros((4,) * 5)).any()


def test_second_bianchi_projection_self_adjoint():
    rng = np.random.default_rng(5)
    x, y = rng.standard_normal((2,) + (4,) * 5)
    lhs = np.sum(project_second_bianchi(x) * y)
    rhs = np.sum(x * project_second_bianchi(y))
    assert abs(lhs - rhs) <= 1e-11 * max(abs(lhs), 1.0)


def test_second_bianchi_sweep_cap():
    raw = np.random.default_rng(6).standard_normal((4,) * 5)
    with pytest.raises(ConvergenceError):
        project_second_bianchi(raw, max_sweeps=1)


def test_symmetrize_matches_naive():
    T = np.random.default_rng(7).standard_normal((3,) * 4)
    assert rel(symmetrize(T), symmetrize_naive(T)) <= 1e-13


def test_rotation_preserves_curvature_symmetries():
    R = models.random_act(5, 11, 2)
    Q, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((5, 5)))
    assert max(curvature_symmetry_residuals(rotate(R, Q)).values()) <= 1e-13


def test_tensor_file_round_trip(tmp_path):
    R = models.nikolayevsky(0.3, 1.1)
    path = tmp_path / "r.json"
    save_tensor(path, R)
    assert np.array_equal(load_tensor(path), R)


def test_tensor_file_projection_on_request(tmp_path):
    path = tmp_path / "one.json"
    path.write_text('{"dim": 4, "rank": 4, "entries": [[1, 2, 2, 1, 1.0]]}')
    raw = load_tensor(path)
    assert raw[0, 1, 1, 0] == 1.0 and raw[1, 0, 0, 1] == 0.0
    assert is_curvature_tensor(load_tensor(path, project=True))


@pytest.mark.parametrize(
    "text, fragment",
    [
        ('{"dim": 4, "rank": 4, "entries": [[1,2,2,1, 1.0],]}', "line 1 column"),
        ('{"dim": 4, "entries": []}', "header"),
        ('{"dim": 4, "rank": 4, "entries": [[1, 2, 9, 1, 1.0]]}', "entries[0]"),
    ],
)
def test_malformed_files_report_location(tmp_path, text, fragment):
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(TensorFormatError, match=fragment.replace("[", r"\[")):
        load_tensor(path)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=3, max_value=6), st.integers(min_value=0, max_value=10**6))
def test_random_projection_always_valid(m, seed):
    raw = np.random.default_rng(seed).uniform(-1, 1, (m,) * 4)
    assert is_curvature_tensor(project_curvature_symmetries(raw))
