"""Ledger conditions H1-H3, k-stein tests, harmonic-space constants and related closed forms.

H2 and H3 are evaluated twice: once by full symmetrization over all
permutations of the free indices (24 and 720 terms), and once through the
probe-vector forms, i.e. the same polynomial identities evaluated at unit
vectors x using the Jacobi operator J_x.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .identities import PreconditionError
from .invariants import (
    derivative_invariants,
    deviators,
    einstein_residual,
    isotropy_residual,
    scalar_invariants,
    two_tensor_invariants,
)
from .models import nikolayevsky
from .tensor_core import DimensionError, as_tensor, symmetrize

DEFAULT_TOLERANCE = 1e-9


class InconsistencyError(ValueError):
    pass


@dataclass(frozen=True)
class JacobiOperator:
    x: np.ndarray
    matrix: np.ndarray

    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def jacobi_operator(R, x) -> JacobiOperator:
    """J_ab = R_aijb x^i x^j for the unit vector along ``x``."""
    R = as_tensor(R, rank=4)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (R.shape[0],):
        raise DimensionError(f"vector must have {R.shape[0]} components")
    n = float(np.linalg.norm(x))
    if n == 0.0:
        raise ValueError("Jacobi operator needs a nonzero vector")
    x = x / n
    J = np.einsum("aijb,i,j->ab", R, x, x)
    return JacobiOperator(x, 0.5 * (J + J.T))


def _jacobi_derivative(D: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.einsum("aijbk,i,j,k->ab", D, x, x, x)


def probe_directions(m: int, count: int, seed: int = 0) -> np.ndarray:
    """Coordinate axes, normalized pair sums e_i +/- e_j, then seeded uniform directions."""
    dirs = list(np.eye(m))
    for i in range(m):
        for j in range(i + 1, m):
            for s in (1.0, -1.0):
                v = np.zeros(m)
                v[i], v[j] = 1.0, s
                dirs.append(v / math.sqrt(2.0))
    dirs = dirs[:count]
    rng = np.random.default_rng(seed)
    while len(dirs) < count:
        v = rng.standard_normal(m)
        dirs.append(v / np.linalg.norm(v))
    return np.array(dirs)


# -- Lambda constants ------------------------------------------------------------------------


def lambda1(R) -> float:
    R = as_tensor(R, rank=4)
    return scalar_invariants(R).tau / R.shape[0]


def lambda2(R) -> float:
    R = as_tensor(R, rank=4)
    m = R.shape[0]
    s = scalar_invariants(R)
    return (2 * s.tau**2 / m + 3 * s.R2) / (2 * m * (m + 2))


def lambda3(R, nabla_R) -> float:
    """m(m+2)(m+4) L3 = 32(-7/2 Rhat + Rring + tau^3/m^2 + 9 tau |R|^2 / (2m)) - 27 |nabla R|^2."""
    R = as_tensor(R, rank=4)
    D = as_tensor(nabla_R, rank=5)
    m = R.shape[0]
    s = scalar_invariants(R)
    nabla2 = float(np.sum(D * D))
    lhs = 32 * (-3.5 * s.Rhat + s.Rring + s.tau**3 / m**2 + 4.5 * s.tau * s.R2 / m) - 27 * nabla2
    return lhs / (m * (m + 2) * (m + 4))


# -- symmetrized conditions ------------------------------------------------------------------


def _relative(resid: np.ndarray, ref: np.ndarray) -> float:
    scale = float(np.max(np.abs(ref)))
    return 0.0 if scale == 0.0 else float(np.max(np.abs(resid))) / scale


def h2_symmetrized(R) -> np.ndarray:
    """S(R_aijb R_bkla) over the 24 permutations of (i, j, k, l)."""
    return symmetrize(np.einsum("aijb,bkla->ijkl", R, R))


def h2_six_terms(R) -> np.ndarray:
    """Six-term regrouping of the H2 left side (one quarter of the 24-term sum)."""
    P = np.einsum("aijb,aklb->ijkl", R, R)
    return (
        P
        + P.transpose(0, 1, 3, 2)
        + P.transpose(0, 2, 1, 3)
        + P.transpose(0, 2, 3, 1)
        + P.transpose(0, 3, 2, 1)
        + P.transpose(0, 3, 1, 2)
    )


def metric_symmetrized(m: int, copies: int) -> np.ndarray:
    g = np.eye(m)
    T = g
    for _ in range(copies - 1):
        T = np.multiply.outer(T, g)
    return symmetrize(T)


def h3_symmetrized(R, nabla_R) -> np.ndarray:
    """S(32 R_aijb R_bklc R_cuva - 9 R_aijb;k R_buva;l) over the 720 permutations of (i,j,k,l,u,v)."""
    X = 32 * np.einsum("aijb,bklc,cuva->ijkluv", R, R, R, optimize=True)
    X -= 9 * np.einsum("aijbk,buval->ijkluv", nabla_R, nabla_R, optimize=True)
    return symmetrize(X)


@dataclass
class LedgerReport:
    dim: int
    tolerance: float
    Lambda1: float
    Lambda2: float
    Lambda3: float | None
    H1_residual: float
    H2_residual: float
    H3_residual: float | None
    order: int
    Lambda2_fit: float
    H2_probe_residual: float
    H3_probe_residual: float | None
    paths_agree: bool
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


def _probe_residuals(R, D, L2, L3, probes):
    scale2 = scale3 = 0.0
    worst2 = worst3 = 0.0
    for x in probes:
        J = np.einsum("aijb,i,j->ab", R, x, x)
        t2 = float(np.sum(J * J.T))
        worst2 = max(worst2, abs(t2 - L2))
        scale2 = max(scale2, abs(t2), abs(L2))
        if D is not None:
            Jd = _jacobi_derivative(D, x)
            t3 = 32 * float(np.trace(J @ J @ J)) - 9 * float(np.sum(Jd * Jd.T))
            worst3 = max(worst3, abs(t3 - L3))
            scale3 = max(scale3, abs(t3), abs(L3))
    r2 = 0.0 if scale2 == 0.0 else worst2 / scale2
    r3 = None if D is None else (0.0 if scale3 == 0.0 else worst3 / scale3)
    return r2, r3


def ledger_residuals(R, nabla_R=None, tolerance: float = DEFAULT_TOLERANCE, probes: int = 64, seed: int = 0) -> LedgerReport:
    R = as_tensor(R, rank=4)
    m = R.shape[0]
    D = None
    if nabla_R is not None:
        D = as_tensor(nabla_R, rank=5)
        if D.shape[0] != m:
            raise DimensionError(f"R has dim {m} but nabla R has dim {D.shape[0]}")
    L1 = lambda1(R)
    L2 = lambda2(R)
    h1 = einstein_residual(R)

    S2 = h2_symmetrized(R)
    G2 = metric_symmetrized(m, 2)
    h2 = _relative(S2 - L2 * G2, S2)
    fit = float(np.sum(S2 * G2) / np.sum(G2 * G2))

    L3 = h3 = None
    if D is not None:
        L3 = lambda3(R, D)
        S3 = h3_symmetrized(R, D)
        h3 = _relative(S3 - L3 * metric_symmetrized(m, 3), S3)

    dirs = probe_directions(m, probes, seed)
    p2, p3 = _probe_residuals(R, D, L2, L3, dirs)

    passes = [h1 <= tolerance, h2 <= tolerance]
    if h3 is not None:
        passes.append(h3 <= tolerance)
    order = 0
    for ok in passes:
        if not ok:
            break
        order += 1

    agree = (h2 <= tolerance) == (p2 <= tolerance)
    if h3 is not None:
        agree = agree and ((h3 <= tolerance) == (p3 <= tolerance))
    notes = []
    if D is None:
        notes.append("nabla R not supplied: H3 not evaluated, order capped at 2")
    return LedgerReport(m, tolerance, L1, L2, L3, h1, h2, h3, order, fit, p2, p3, agree, notes)


def asymptotic_order(R, nabla_R=None, tolerance: float = DEFAULT_TOLERANCE) -> int:
    return ledger_residuals(R, nabla_R, tolerance).order


# -- k-stein, super-Einstein ---------------------------------------------------------------------


def k_stein(R, k: int, probes: int = 64, seed: int = 0, tolerance: float = DEFAULT_TOLERANCE) -> dict:
    """tr(J_x^j) independent of the unit vector x for j <= k, tested on probe directions."""
    R = as_tensor(R, rank=4)
    if k not in (1, 2, 3):
        raise ValueError("k must be 1, 2 or 3")
    if probes < 10:
        raise ValueError("k_stein needs at least 10 probes")
    dirs = probe_directions(R.shape[0], probes, seed)
    traces = np.zeros((len(dirs), k))
    for n, x in enumerate(dirs):
        J = np.einsum("aijb,i,j->ab", R, x, x)
        P = np.eye(len(x))
        for j in range(k):
            P = P @ J
            traces[n, j] = np.trace(P)
    deviations = []
    for j in range(k):
        col = traces[:, j]
        scale = max(float(np.mean(np.abs(col))), float(np.max(np.abs(R))) ** (j + 1))
        deviations.append(0.0 if scale == 0.0 else float(col.max() - col.min()) / scale)
    return {"is_k_stein": all(d <= tolerance for d in deviations), "deviations": deviations}


def super_einstein_residual(R) -> float:
    """Relative deviation of R_iabc R_jabc from (|R|^2/m) g."""
    return isotropy_residual(two_tensor_invariants(R).RR)


def _require_einstein(R, what: str) -> None:
    dev = einstein_residual(R)
    if dev > DEFAULT_TOLERANCE:
        raise PreconditionError(f"{what} needs Einstein input: Ricci deviation {dev:.3e}")


def einstein_nabla_norm(R) -> float:
    """|nabla R|^2 = -4 Rring - Rhat - (2 tau / m) |R|^2 (Einstein with constant |R|^2)."""
    R = as_tensor(R, rank=4)
    _require_einstein(R, "einstein_nabla_norm")
    s = scalar_invariants(R)
    return -4 * s.Rring - s.Rhat - 2 * s.tau / R.shape[0] * s.R2


def deviator_relations_residual(R, nabla_R) -> dict[str, float]:
    """r1: 9(a + 2b) = 32 g_ring - 112 g_hat; r2: b = -4 g_ring - g_hat; r3: 9a = 104 g_ring - 94 g_hat.

    a, b, g_hat, g_ring are the traceless parts of A, B, Rhat_ij, Rring_ij.  Each
    residual is relative to the coefficient-weighted max-abs of the full
    (not trace-free) tensors, so isotropic inputs report 0 rather than 0/0.
    """
    R = as_tensor(R, rank=4)
    d = deviators(R, nabla_R)
    di = derivative_invariants(R, nabla_R)
    tt = two_tensor_invariants(R)
    size = {"A": _max(di.A), "B": _max(di.B), "hat": _max(tt.Rhat), "ring": _max(tt.Rring)}

    def rel(resid, weights):
        mass = sum(abs(w) * size[k] for k, w in weights.items())
        return 0.0 if mass == 0.0 else _max(resid) / mass

    return {
        "r1": rel(9 * (d.alpha + 2 * d.beta) - 32 * d.gamma_ring + 112 * d.gamma_hat, {"A": 9, "B": 18, "ring": 32, "hat": 112}),
        "r2": rel(d.beta + 4 * d.gamma_ring + d.gamma_hat, {"B": 1, "ring": 4, "hat": 1}),
        "r3": rel(9 * d.alpha - 104 * d.gamma_ring + 94 * d.gamma_hat, {"A": 9, "ring": 104, "hat": 94}),
    }


def _max(T) -> float:
    return float(np.max(np.abs(T)))


# -- Singer-Thorpe cubic --------------------------------------------------------------------


def _real_cubic_roots(c2: float, c1: float, c0: float, imag_tol: float = 1e-8) -> np.ndarray:
    """Real roots of t^3 + c2 t^2 + c1 t + c0 (all three, with multiplicity)."""
    shift = c2 / 3.0
    p = c1 - c2 * c2 / 3.0
    q = 2 * c2**3 / 27.0 - c2 * c1 / 3.0 + c0
    scale = max(abs(c2), abs(c1) ** 0.5, abs(c0) ** (1 / 3), 1e-300)
    if abs(p) <= 1e-14 * scale**2 and abs(q) <= 1e-14 * scale**3:
        roots = np.full(3, -shift)
    elif p < 0 and 4 * p**3 + 27 * q**2 <= 1e-12 * scale**6:
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = max(-1.0, min(1.0, 3.0 * q / (p * r)))
        phi = math.acos(arg) / 3.0
        roots = np.array([r * math.cos(phi - 2 * math.pi * k / 3) for k in range(3)]) - shift
    else:
        # one real root; Cardano gives the complex pair's imaginary part
        disc = cmath.sqrt(q * q / 4 + p**3 / 27)
        u = _cbrt(-q / 2 + disc)
        v = -p / (3 * u) if u != 0 else _cbrt(-q / 2 - disc)
        imag = abs((math.sqrt(3) / 2) * (u - v))
        if imag > imag_tol * scale:
            raise InconsistencyError(f"cubic has a complex root pair (imaginary part {imag:.3e})")
        real = (u + v).real
        roots = np.array([real, -real / 2, -real / 2]) - shift
    # Newton polish; skipped at (near) multiple roots where f' vanishes
    for _ in range(3):
        f = ((roots + c2) * roots + c1) * roots + c0
        df = (3 * roots + 2 * c2) * roots + c1
        step = np.divide(f, df, out=np.zeros(3), where=np.abs(df) > 1e-12 * scale**2)
        roots = roots - step
    return np.sort(roots)


def _cbrt(z: complex) -> complex:
    if z == 0:
        return 0j
    if isinstance(z, complex) and z.imag == 0:
        z = z.real
    if isinstance(z, float):
        return complex(math.copysign(abs(z) ** (1 / 3), z))
    return z ** (1 / 3)


def singer_thorpe_cubic(R) -> dict:
    """Recover the Singer-Thorpe parameters of a 4-dim 2-stein tensor as roots of a monic cubic.

    e1 = -tau/4, e2 = ((5/6) tau^2 - |R|^2)/32, e3 = (Rhat - 32 tau e2 + (7/12) tau^3)/192;
    the cubic is t^3 - e1 t^2 + e2 t - e3.
    """
    R = as_tensor(R, rank=4)
    if R.shape[0] != 4:
        raise DimensionError(f"Singer-Thorpe analysis needs dimension 4, got {R.shape[0]}")
    stein = k_stein(R, 2)
    if not stein["is_k_stein"]:
        raise PreconditionError(f"input is not 2-stein (deviations {stein['deviations']})")
    s = scalar_invariants(R)
    e1 = -s.tau / 4
    e2 = (5 / 6 * s.tau**2 - s.R2) / 32
    e3 = (s.Rhat - 32 * s.tau * e2 + 7 / 12 * s.tau**3) / 192
    coeffs = (-e1, e2, -e3)
    return {"coefficients": coeffs, "roots": _real_cubic_roots(*coeffs)}


# -- Nikolayevsky Lambda3 --------------------------------------------------------------------------


def nikolayevsky_lambda3(nu: float) -> dict:
    """Lambda3 of nikolayevsky(0, nu) two ways: the closed formula (A) and H'3 at x = e1 (B)."""
    R = nikolayevsky(0.0, nu)
    zero = np.zeros((5,) * 5)
    route_a = lambda3(R, zero)
    J = jacobi_operator(R, np.eye(5)[0]).matrix
    route_b = 32 * float(np.trace(J @ J @ J))
    mismatch = abs(route_a - route_b) > 1e-9 * abs(route_a)
    return {"Lambda3_route_A": route_a, "Lambda3_route_B": route_b, "mismatch": bool(mismatch)}


# -- inequalities ----------------------------------------------------------------------------------


def harmonic_inequalities(R, kahler_n: int | None = None, nabla_R=None, tolerance: float = DEFAULT_TOLERANCE) -> dict:
    """Margins L1^2 - (m-1) L2 and, for Kaehler dim 2n, L1^2 - (2(n+1)^2/(n+7)) L2; f derivatives."""
    R = as_tensor(R, rank=4)
    m = R.shape[0]
    if kahler_n is not None and 2 * kahler_n != m:
        raise DimensionError(f"kahler_n={kahler_n} needs dimension {2 * kahler_n}, got {m}")
    L1, L2 = lambda1(R), lambda2(R)
    L3 = None if nabla_R is None else lambda3(R, nabla_R)
    report = ledger_residuals(R, nabla_R, tolerance)
    out = {
        "Lambda1": L1,
        "Lambda2": L2,
        "Lambda3": L3,
        "lichnerowicz_margin": L1 * L1 - (m - 1) * L2,
        "tachibana_margin": None,
        "f_derivatives": f_derivatives(L1, L2, L3),
        "hypothesis_met": report.order >= 2,
    }
    if kahler_n is not None:
        n = kahler_n
        out["tachibana_margin"] = L1 * L1 - 2 * (n + 1) ** 2 / (n + 7) * L2
    return out


def f_derivatives(L1: float, L2: float, L3: float | None = None) -> tuple:
    """f'(0) = -(2/3) L1, f''(0) = -(8/45) L2, f'''(0) = -L3/315."""
    return (-2 / 3 * L1, -8 / 45 * L2, None if L3 is None else -L3 / 315)


def lambdas_from_f(f1: float, f2: float, f3: float | None = None) -> tuple:
    return (-1.5 * f1, -45 / 8 * f2, None if f3 is None else -315 * f3)
