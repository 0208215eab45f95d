"""Pfaffian forms E_{m,n} and T^2_{m,n}, the Gauss-Bonnet bracket, and Euler characteristics.

Both Pfaffians are evaluated by enumerating ordered tuples I of distinct
indices and permutations p of their slots, with J = I[p]; the wedge-product
Gram determinant g(e^I, e^J) then equals sign(p) and every other (I, J) pair
contributes nothing.  The inner loop lives in the compiled kernel when the
extension is built (see :mod:`curvid._backend`).
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

from . import _backend
from .invariants import scalar_invariants
from .tensor_core import DimensionError, TensorError, as_tensor, generalized_kronecker, signed_permutations


@lru_cache(maxsize=None)
def _distinct_tuples(m: int, length: int) -> np.ndarray:
    arr = np.array(list(itertools.permutations(range(m), length)), dtype=np.int32)
    arr = arr.reshape(-1, length)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def _perm_table(length: int) -> tuple[np.ndarray, np.ndarray]:
    perms, signs = signed_permutations(length)
    return np.ascontiguousarray(perms, dtype=np.int32), np.ascontiguousarray(signs, dtype=np.int32)


def _check_degree(n: int) -> None:
    if n % 2:
        raise TensorError(f"Pfaffian degree must be even, got {n}")
    if n not in (2, 4, 6):
        raise TensorError(f"Pfaffian degree {n} not supported (use 2, 4 or 6)")


def _pair_sum(R: np.ndarray, length: int, tail: bool, backend: str | None):
    m = R.shape[0]
    perms, signs = _perm_table(length)
    tuples = _distinct_tuples(m, length)
    if len(tuples) == 0:
        return np.zeros((m, m)) if tail else 0.0
    kern = _backend.kernels(backend)
    return kern.pfaffian_sum(np.ascontiguousarray(R), tuples, perms, signs, tail)


def euler_form(R, n: int, backend: str | None = None) -> float:
    """E_{m,n} = sum R_{i1 i2 j2 j1} ... R_{i(n-1) in jn j(n-1)} g(e^I, e^J)."""
    _check_degree(n)
    R = as_tensor(R, rank=4)
    return float(_pair_sum(R, n, False, backend))


def pfaffian_two_tensor(R, n: int, backend: str | None = None) -> np.ndarray:
    """T^2_{m,n}: the Euler-form sum with one extra free wedge slot paired as e^k o e^l.

    Identically zero when m <= n (no n+1 distinct indices exist).
    """
    _check_degree(n)
    R = as_tensor(R, rank=4)
    T = _pair_sum(R, n + 1, True, backend)
    return 0.5 * (T + T.T)


def euler_form_naive(R, n: int) -> float:
    """Reference: the raw 2n-index loop with an explicit Gram determinant (tiny dims only)."""
    _check_degree(n)
    R = np.asarray(R, dtype=np.float64)
    m = R.shape[0]
    total = 0.0
    for I in itertools.product(range(m), repeat=n):
        if len(set(I)) < n:
            continue
        for J in itertools.product(range(m), repeat=n):
            det = generalized_kronecker(I, J)
            if det == 0:
                continue
            prod = float(det)
            for k in range(0, n, 2):
                prod *= R[I[k], I[k + 1], J[k + 1], J[k]]
            total += prod
    return total


def pfaffian_two_tensor_naive(R, n: int) -> np.ndarray:
    _check_degree(n)
    R = np.asarray(R, dtype=np.float64)
    m = R.shape[0]
    out = np.zeros((m, m))
    for I in itertools.product(range(m), repeat=n + 1):
        if len(set(I)) < n + 1:
            continue
        for J in itertools.product(range(m), repeat=n + 1):
            det = generalized_kronecker(I, J)
            if det == 0:
                continue
            prod = float(det)
            for k in range(0, n, 2):
                prod *= R[I[k], I[k + 1], J[k + 1], J[k]]
            out[I[n], J[n]] += prod
    return 0.5 * (out + out.T)


def gauss_bonnet_bracket(R) -> float:
    """The degree-6 Gauss-Bonnet integrand in invariant form (dim 6)."""
    R = as_tensor(R, rank=4)
    if R.shape[0] != 6:
        raise DimensionError(f"the Gauss-Bonnet bracket is defined in dimension 6, got {R.shape[0]}")
    return float(sum(bracket_terms(R)))


def bracket_terms(R) -> list[float]:
    """The eight weighted terms of the bracket, in any dimension."""
    s = scalar_invariants(R)
    return [
        s.tau**3,
        -12 * s.tau * s.rho2,
        3 * s.tau * s.R2,
        16 * s.rho3,
        -24 * s.rhorhoR,
        -24 * s.rhoRR,
        8 * s.Rring,
        -4 * s.Rhat,
    ]


def bracket_term_mass(R) -> float:
    """Sum of the absolute values of the bracket's terms (scale for its round-off)."""
    return float(sum(abs(t) for t in bracket_terms(R)))


def normalization(m: int) -> float:
    """(8 pi)^{m/2} (m/2)!, so chi = E_{m,m} Vol / normalization(m)."""
    if m % 2:
        raise DimensionError(f"Euler characteristic needs even dimension, got {m}")
    return (8 * math.pi) ** (m // 2) * math.factorial(m // 2)


def euler_characteristic_homogeneous(R, volume: float, backend: str | None = None) -> float:
    """chi for a model whose Euler integrand is constant: E_{m,m} * volume / normalization(m)."""
    R = as_tensor(R, rank=4)
    m = R.shape[0]
    if m % 2:
        raise DimensionError(f"Euler characteristic needs even dimension, got {m}")
    if m not in (2, 4, 6):
        raise DimensionError(f"dimension {m} not supported")
    if not volume > 0:
        raise ValueError("volume must be positive")
    return euler_form(R, m, backend=backend) * volume / normalization(m)
