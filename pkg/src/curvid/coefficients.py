"""Coefficient tables for every curvature identity, one row per printed term.

A term name is a space-separated product of scalar invariants (optionally
raised to a power with ``^``) followed by one 2-tensor: either ``g`` or a field
of :class:`curvid.invariants.TwoTensorInvariants`.  Scalar identities use the
pseudo-tensor ``1``.  Keep these rows in the order the terms are printed so the
table can be compared line by line with the source formulas.
"""

from __future__ import annotations

from fractions import Fraction as F

# 6-dim universal identity (symmetric 2-tensor of degree 6).  The rho-R-R
# block differs from the transcribed source: rhoRR_B carries 24 (not 48),
# rhoRR_C and its mate 12 (not 6), and rhoRR_D enters with 12.  These values
# are the unique ones making the expression proportional to T^2_{6,6} in
# dim 7; the transcribed rows are kept below for reference.
_TWO_TENSOR_PART = (
    ("tau^2 rho", -3),
    ("R2 rho", -3),
    ("rho2 rho", 12),
    ("tau rho2", 12),
    ("tau rhoR", 12),
    ("tau RR", -6),
    ("rho3", -24),
    ("rho2R", -24),
    ("rhorhoR_A", 24),
    ("rhorhoR_A_mate", 24),
    ("rhoRR_A", 24),
    ("rhoRR_B", 24),
    ("rhoRR_C", 12),
    ("rhoRR_C_mate", 12),
    ("rhoRR_D", 12),
    ("Rcheck", 12),
    ("Rhat", 12),
    ("Rring", -24),
)

_G_BLOCK = (
    ("tau^3 g", F(1, 2)),
    ("tau R2 g", F(3, 2)),
    ("tau rho2 g", F(-12, 2)),
    ("rho3 g", F(16, 2)),
    ("rhorhoR g", F(-24, 2)),
    ("rhoRR g", F(-24, 2)),
    ("Rring g", F(8, 2)),
    ("Rhat g", F(-4, 2)),
)

DIM6 = _G_BLOCK + _TWO_TENSOR_PART

# Gauss-Bonnet integrand in dim 6; a scalar identity in dims <= 5
DIM5_SCALAR = (
    ("tau^3 1", 1),
    ("tau rho2 1", -12),
    ("tau R2 1", 3),
    ("rho3 1", 16),
    ("rhorhoR 1", -24),
    ("rhoRR 1", -24),
    ("Rring 1", 8),
    ("Rhat 1", -4),
)

# 2-tensor identity in dims 4 and 5: the 2-tensor part of DIM6 scaled by -1/3
# (the g block is a multiple of the scalar identity there)
DIM5 = tuple((term, F(-1, 3) * c) for term, c in _TWO_TENSOR_PART)

# As transcribed; not identities (residual ~1e-2 on generic tensors)
DIM6_TRANSCRIBED = _G_BLOCK + tuple(
    (term, {"rhoRR_B": 48, "rhoRR_C": 6, "rhoRR_C_mate": 6}.get(term, c))
    for term, c in _TWO_TENSOR_PART
    if term != "rhoRR_D"
)
DIM5_TRANSCRIBED = tuple(
    (term, F(-1, 3) * c) for term, c in DIM6_TRANSCRIBED if not term.endswith(" g")
)

# Einstein specialisations
EINSTEIN6 = (
    ("tau R2 g", -1),
    ("Rring g", 4),
    ("Rhat g", -2),
    ("Rcheck", 12),
    ("Rhat", 12),
    ("Rring", -24),
    ("tau RR", 4),
)

EINSTEIN5 = (
    ("tau^3 g", F(1, 25)),
    ("tau R2 g", F(1, 5)),
    ("tau RR", -2),
    ("Rcheck", -4),
    ("Rhat", -4),
    ("Rring", 8),
)

EINSTEIN4 = (
    ("tau^3 g", F(1, 8)),
    ("tau R2 g", F(-3, 4)),
    ("Rhat", -4),
    ("Rring", 8),
)

TABLES = {
    "dim6": DIM6,
    "dim5-scalar": DIM5_SCALAR,
    "dim5": DIM5,
    "einstein6": EINSTEIN6,
    "einstein5": EINSTEIN5,
    "einstein4": EINSTEIN4,
    "dim6-transcribed": DIM6_TRANSCRIBED,
    "dim5-transcribed": DIM5_TRANSCRIBED,
}
