"""Scalar and symmetric 2-tensor curvature invariants of degree <= 6, plus nabla-R invariants.

Cubic contractions run as two pairwise contractions (O(m^6) work).  Passing
``reference=True`` re-evaluates every field with the naive all-index loop of
:func:`curvid.tensor_core.naive_contract`, which is only practical for m <= 5.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

import numpy as np

from .tensor_core import DimensionError, as_tensor, contract, naive_contract

# name -> (index expression, operand symbols).  "R" is the curvature tensor,
# "p" the Ricci tensor.  The same table drives the fast path and the oracle.
SCALAR_EXPRESSIONS = {
    "tau": ("ii->", "p"),
    "rho2": ("ab,ab->", "pp"),
    "R2": ("abcd,abcd->", "RR"),
    "rho3": ("ab,bc,ca->", "ppp"),
    "rhorhoR": ("ab,cd,acbd->", "ppR"),
    "rhoRR": ("uv,uabc,vabc->", "pRR"),
    "Rhat": ("abcd,abuv,cduv->", "RRR"),
    "Rring": ("abcd,aucv,budv->", "RRR"),
}

TWO_TENSOR_EXPRESSIONS = {
    "rho": ("ij->ij", "p"),
    "rho2": ("ia,ja->ij", "pp"),
    "rhoR": ("ab,iabj->ij", "pR"),
    "RR": ("iabc,jabc->ij", "RR"),
    "rho3": ("ia,jb,ab->ij", "ppp"),
    "rho2R": ("ac,bc,iabj->ij", "ppR"),
    "rhorhoR_A": ("aj,cd,acid->ij", "ppR"),
    "rhorhoR_A_mate": ("ai,cd,acjd->ij", "ppR"),
    "rhoRR_A": ("ab,icdj,acbd->ij", "pRR"),
    "rhoRR_B": ("cd,iabc,jabd->ij", "pRR"),
    "rhoRR_C": ("jd,abci,abcd->ij", "pRR"),
    "rhoRR_C_mate": ("id,abcj,abcd->ij", "pRR"),
    "rhoRR_D": ("ab,iacd,jbcd->ij", "pRR"),
    "Rcheck": ("iuvj,abcu,abcv->ij", "RRR"),
    "Rhat": ("ibac,jbuv,acuv->ij", "RRR"),
    "Rring": ("iabc,jubv,aucv->ij", "RRR"),
}


@dataclass(frozen=True)
class ScalarInvariants:
    tau: float
    rho2: float
    R2: float
    rho3: float
    rhorhoR: float
    rhoRR: float
    Rhat: float
    Rring: float

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class TwoTensorInvariants:
    rho: np.ndarray
    rho2: np.ndarray
    rhoR: np.ndarray
    RR: np.ndarray
    rho3: np.ndarray
    rho2R: np.ndarray
    rhorhoR_A: np.ndarray
    rhorhoR_A_mate: np.ndarray
    rhoRR_A: np.ndarray
    rhoRR_B: np.ndarray
    rhoRR_C: np.ndarray
    rhoRR_C_mate: np.ndarray
    rhoRR_D: np.ndarray
    Rcheck: np.ndarray
    Rhat: np.ndarray
    Rring: np.ndarray

    def as_dict(self) -> dict[str, np.ndarray]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class DerivativeInvariants:
    nablaR2: float
    A: np.ndarray
    B: np.ndarray


@dataclass(frozen=True)
class Deviators:
    alpha: np.ndarray
    beta: np.ndarray
    gamma_hat: np.ndarray
    gamma_ring: np.ndarray


def ricci(R) -> np.ndarray:
    """rho_ij = R_aija."""
    return np.einsum("aija->ij", np.asarray(R, dtype=np.float64))


def scalar_curvature(R) -> float:
    return float(np.einsum("aiia->", np.asarray(R, dtype=np.float64)))


def _evaluate(table, R, reference):
    R = as_tensor(R, rank=4)
    rho = ricci(R)
    ops = {"R": R, "p": rho}
    engine = naive_contract if reference else contract
    return {name: engine(spec, *(ops[s] for s in symbols)) for name, (spec, symbols) in table.items()}


def _cubic_fast(R: np.ndarray) -> dict[str, np.ndarray]:
    # pairwise routes for the three RRR two-tensors and the RRR scalars
    RR4 = np.einsum("abcu,abcv->uv", R, R)
    P = np.einsum("abuv,cduv->abcd", R, R)  # R composed with itself on 2-forms
    Q = np.einsum("aucv,budv->abcd", R, R)
    return {
        "Rcheck": np.einsum("iuvj,uv->ij", R, RR4),
        "Rhat": np.einsum("ibac,jbac->ij", R, P),
        "Rring": np.einsum("iabc,jabc->ij", R, np.einsum("jubv,aucv->jabc", R, R)),
        "Rhat_scalar": float(np.einsum("abcd,abcd->", R, P)),
        "Rring_scalar": float(np.einsum("abcd,abcd->", R, Q)),
    }


def scalar_invariants(R, reference: bool = False) -> ScalarInvariants:
    """The eight scalars tau, |rho|^2, |R|^2, rho^3, rho rho R, rho R R, R-hat, R-ring."""
    if reference:
        return ScalarInvariants(**_evaluate(SCALAR_EXPRESSIONS, R, True))
    R = as_tensor(R, rank=4)
    rho = ricci(R)
    cub = _cubic_fast(R)
    RR = np.einsum("iabc,jabc->ij", R, R)
    return ScalarInvariants(
        tau=float(np.trace(rho)),
        rho2=float(np.sum(rho * rho)),
        R2=float(np.sum(R * R)),
        rho3=float(np.einsum("ab,bc,ca->", rho, rho, rho)),
        rhorhoR=float(np.einsum("acbd,ab->cd", R, rho).ravel() @ rho.ravel()),
        rhoRR=float(np.sum(rho * RR)),
        Rhat=cub["Rhat_scalar"],
        Rring=cub["Rring_scalar"],
    )


def two_tensor_invariants(R, reference: bool = False) -> TwoTensorInvariants:
    """Every 2-tensor appearing in the degree-6 identities; asymmetric terms keep their transpose mate."""
    if reference:
        return TwoTensorInvariants(**_evaluate(TWO_TENSOR_EXPRESSIONS, R, True))
    R = as_tensor(R, rank=4)
    rho = ricci(R)
    cub = _cubic_fast(R)
    rhoR = np.einsum("ab,iabj->ij", rho, R)
    rho2 = rho @ rho
    rhoRho = np.einsum("cd,acid->ai", rho, R)  # rho_cd R_acid
    rhoRR_C = np.einsum("jd,id->ij", rho, np.einsum("abci,abcd->id", R, R))
    return TwoTensorInvariants(
        rho=rho,
        rho2=rho2,
        rhoR=rhoR,
        RR=np.einsum("iabc,jabc->ij", R, R),
        rho3=rho @ rho @ rho,
        rho2R=np.einsum("ab,iabj->ij", rho2, R),
        rhorhoR_A=np.einsum("aj,ai->ij", rho, rhoRho),
        rhorhoR_A_mate=np.einsum("ai,aj->ij", rho, rhoRho),
        rhoRR_A=np.einsum("icdj,cd->ij", R, np.einsum("ab,acbd->cd", rho, R)),
        rhoRR_B=np.einsum("iabc,jabc->ij", R, np.einsum("cd,jabd->jabc", rho, R)),
        rhoRR_C=rhoRR_C,
        rhoRR_C_mate=rhoRR_C.T.copy(),
        rhoRR_D=np.einsum("iacd,jacd->ij", R, np.einsum("ab,jbcd->jacd", rho, R)),
        Rcheck=cub["Rcheck"],
        Rhat=cub["Rhat"],
        Rring=cub["Rring"],
    )


def _check_pair(R, D):
    R = as_tensor(R, rank=4)
    D = as_tensor(D, rank=5)
    if R.shape[0] != D.shape[0]:
        raise DimensionError(f"R has dim {R.shape[0]} but nabla R has dim {D.shape[0]}")
    return R, D


def derivative_invariants(R, D) -> DerivativeInvariants:
    """|nabla R|^2, A_ij = R_abcd;i R_abcd;j and B_ij = R_ibcd;a R_jbcd;a."""
    R, D = _check_pair(R, D)
    A = np.einsum("abcdi,abcdj->ij", D, D)
    B = np.einsum("ibcda,jbcda->ij", D, D)
    return DerivativeInvariants(nablaR2=float(np.trace(A)), A=A, B=B)


def deviators(R, D) -> Deviators:
    """Traceless parts of A, B, R-hat_ij and R-ring_ij."""
    R, D = _check_pair(R, D)
    m = R.shape[0]
    g = np.eye(m)
    di = derivative_invariants(R, D)
    tt = two_tensor_invariants(R)
    return Deviators(
        alpha=di.A - di.nablaR2 / m * g,
        beta=di.B - di.nablaR2 / m * g,
        gamma_hat=tt.Rhat - np.trace(tt.Rhat) / m * g,
        gamma_ring=tt.Rring - np.trace(tt.Rring) / m * g,
    )


def isotropy_residual(S: np.ndarray) -> float:
    """Max deviation of S from (tr S / m) g, relative to max |S| (0 for S = 0)."""
    m = S.shape[0]
    scale = float(np.max(np.abs(S)))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(S - np.trace(S) / m * np.eye(m)))) / scale


def einstein_residual(R) -> float:
    """||rho - (tau/m) g|| / ||rho|| (Frobenius), 0 for Ricci-flat input."""
    rho = ricci(R)
    m = rho.shape[0]
    nrm = float(np.linalg.norm(rho))
    if nrm == 0.0:
        return 0.0
    return float(np.linalg.norm(rho - np.trace(rho) / m * np.eye(m))) / nrm
