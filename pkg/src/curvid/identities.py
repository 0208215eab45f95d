"""Residual evaluators for the universal degree-6 curvature identities.

Every identity is a row-by-row evaluation of a table in
:mod:`curvid.coefficients`.  Relative errors use the "term mass": the sum over
weighted terms of |coefficient| times the max-abs component of the term.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import coefficients
from .invariants import (
    ScalarInvariants,
    TwoTensorInvariants,
    einstein_residual,
    scalar_invariants,
    two_tensor_invariants,
)
from .pfaffian import pfaffian_two_tensor
from .tensor_core import DimensionError, as_tensor


class PreconditionError(ValueError):
    pass


class DegenerateFitError(ValueError):
    pass


@dataclass
class IdentityResidual:
    name: str
    residual: np.ndarray | float
    term_mass: float

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.residual)))

    @property
    def relative_error(self) -> float:
        if self.term_mass == 0.0:
            return 0.0
        return self.max_abs / self.term_mass


def _term_value(term: str, s: ScalarInvariants, t: TwoTensorInvariants, m: int):
    *factors, tensor = term.split()
    scalar = 1.0
    for f in factors:
        name, _, power = f.partition("^")
        scalar *= getattr(s, name) ** (int(power) if power else 1)
    if tensor == "1":
        return scalar
    if tensor == "g":
        return scalar * np.eye(m)
    return scalar * getattr(t, tensor)


def evaluate_table(name: str, R, table=None, scale: dict[int, float] | None = None) -> IdentityResidual:
    """Sum ``coefficient * term`` over a coefficient table.

    ``scale`` maps a row number to a multiplicative perturbation of that row's
    coefficient; it exists for sensitivity tests only.
    """
    R = as_tensor(R, rank=4)
    m = R.shape[0]
    rows = coefficients.TABLES[name] if table is None else table
    s = scalar_invariants(R)
    scalar_only = all(term.endswith(" 1") for term, _ in rows)
    t = None if scalar_only else two_tensor_invariants(R)
    total = 0.0 if scalar_only else np.zeros((m, m))
    mass = 0.0
    for k, (term, coef) in enumerate(rows):
        c = float(coef) * (scale.get(k, 1.0) if scale else 1.0)
        value = _term_value(term, s, t, m)
        total = total + c * value
        mass += abs(c) * float(np.max(np.abs(value)))
    return IdentityResidual(name, total, mass)


def residual_6d(R, scale: dict[int, float] | None = None) -> IdentityResidual:
    """Left side of the 6-dimensional universal identity (vanishes in dim 6)."""
    R = as_tensor(R, rank=4)
    if R.shape[0] != 6:
        raise DimensionError(f"residual_6d needs dimension 6, got {R.shape[0]}")
    return evaluate_table("dim6", R, scale=scale)


def main_identity_expression(R) -> np.ndarray:
    """The 6-dimensional identity's left side evaluated in any dimension."""
    return evaluate_table("dim6", R).residual


def residual_5d_scalar(R) -> IdentityResidual:
    R = as_tensor(R, rank=4)
    if R.shape[0] > 5:
        raise DimensionError(f"the scalar identity holds in dimension <= 5, got {R.shape[0]}")
    return evaluate_table("dim5-scalar", R)


def residual_5d(R) -> IdentityResidual:
    R = as_tensor(R, rank=4)
    if R.shape[0] not in (4, 5):
        raise DimensionError(f"residual_5d needs dimension 4 or 5, got {R.shape[0]}")
    return evaluate_table("dim5", R)


EINSTEIN_TOLERANCE = 1e-9


def residual_einstein(R, m: int | None = None) -> IdentityResidual:
    """Einstein specialisation of the identity in dimension 4, 5 or 6."""
    R = as_tensor(R, rank=4)
    dim = R.shape[0]
    if m is not None and m != dim:
        raise DimensionError(f"tensor has dimension {dim}, expected {m}")
    if dim not in (4, 5, 6):
        raise DimensionError(f"Einstein identities exist for dimension 4, 5, 6; got {dim}")
    dev = einstein_residual(R)
    if dev > EINSTEIN_TOLERANCE:
        raise PreconditionError(f"input is not Einstein: Ricci deviation {dev:.3e} > {EINSTEIN_TOLERANCE:g}")
    return evaluate_table(f"einstein{dim}", R)


def kernel_coefficient_7d(samples) -> dict[str, float]:
    """Fit lambda in (6-dim identity read in dim 7) = lambda * T^2_{6,6} over samples.

    Returns ``lambda`` and ``scatter``, the largest per-sample max-abs fit
    residual relative to that sample's max |identity|.
    """
    pairs = []
    for R in samples:
        R = as_tensor(R, rank=4)
        if R.shape[0] != 7:
            raise DimensionError(f"kernel fit needs dimension-7 samples, got {R.shape[0]}")
        pairs.append((main_identity_expression(R), pfaffian_two_tensor(R, 6)))
    if len(pairs) < 2:
        raise ValueError("kernel fit needs at least two samples")
    num = sum(float(np.sum(L * T)) for L, T in pairs)
    den = sum(float(np.sum(T * T)) for _, T in pairs)
    tscale = max(float(np.max(np.abs(T))) for _, T in pairs)
    if den == 0.0 or tscale == 0.0:
        raise DegenerateFitError("T^2_{6,6} vanishes on every sample")
    lam = num / den
    scatter = 0.0
    for L, T in pairs:
        ref = max(float(np.max(np.abs(L))), abs(lam) * float(np.max(np.abs(T))))
        if ref > 0.0:
            scatter = max(scatter, float(np.max(np.abs(L - lam * T))) / ref)
    return {"lambda": lam, "scatter": scatter}
