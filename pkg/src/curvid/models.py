"""Model curvature tensors and seeded random generators.

Random tensors use ``numpy.random.default_rng(seed)``, i.e. the PCG64
permuted-congruential generator, so every generator here is a pure function of
its seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .tensor_core import (
    DimensionError,
    TensorError,
    as_tensor,
    kulkarni_nomizu,
    project_second_bianchi,
)

SQRT3 = math.sqrt(3.0)


def _ricci(R: np.ndarray) -> np.ndarray:
    return np.einsum("aija->ij", R)


def from_components(m: int, components: dict[tuple[int, int, int, int], float]) -> np.ndarray:
    """Curvature tensor from a list of 1-based components, filled by symmetry.

    Each listed component is copied to its images under the two pair
    antisymmetries and the pair exchange.  The first Bianchi identity is not
    imposed; callers check it.
    """
    R = np.zeros((m, m, m, m))
    for (a, b, c, d), v in components.items():
        a, b, c, d = a - 1, b - 1, c - 1, d - 1
        for (p, q, s) in ((a, b, 1), (b, a, -1)):
            for (r, t, s2) in ((c, d, 1), (d, c, -1)):
                R[p, q, r, t] = s * s2 * v
                R[r, t, p, q] = s * s2 * v
    return R


def constant_curvature(m: int, kappa: float) -> np.ndarray:
    """R_abcd = kappa (delta_ad delta_bc - delta_ac delta_bd): every sectional curvature is kappa."""
    if not 2 <= m <= 8:
        raise DimensionError(f"dimension {m} outside 2..8")
    g = np.eye(m)
    return kappa * (np.einsum("ad,bc->abcd", g, g) - np.einsum("ac,bd->abcd", g, g))


def flat(m: int) -> np.ndarray:
    return np.zeros((m,) * 4)


def product_space(R1, R2) -> np.ndarray:
    """Block curvature of a Riemannian product; mixed components vanish."""
    R1 = as_tensor(R1, rank=4)
    R2 = np.asarray(R2, dtype=np.float64)
    m1, m2 = R1.shape[0], R2.shape[0]
    if R2.ndim != 4:
        raise DimensionError("second factor must be rank 4")
    if m1 + m2 > 8:
        raise DimensionError(f"product dimension {m1 + m2} exceeds 8")
    R = np.zeros((m1 + m2,) * 4)
    R[:m1, :m1, :m1, :m1] = R1
    R[m1:, m1:, m1:, m1:] = R2
    return R


def complex_structure(n: int) -> np.ndarray:
    """Matrix of J with J e_{2k-1} = e_{2k} (0-based: column 2k maps to row 2k+1)."""
    J = np.zeros((2 * n, 2 * n))
    for k in range(n):
        J[2 * k + 1, 2 * k] = 1.0
        J[2 * k, 2 * k + 1] = -1.0
    return J


def complex_space_form(n: int, c_hol: float) -> np.ndarray:
    """Curvature of constant holomorphic sectional curvature ``c_hol`` in dimension 2n.

    R(X,Y)Z = (c/4)[g(Y,Z)X - g(X,Z)Y + g(JY,Z)JX - g(JX,Z)JY + 2g(X,JY)JZ].
    """
    if not 1 <= n <= 4:
        raise DimensionError(f"complex dimension {n} outside 1..4")
    m = 2 * n
    g = np.eye(m)
    J = complex_structure(n)
    # J[k, b] is the e_k component of J e_b
    R = (
        np.einsum("bc,ad->abcd", g, g)
        - np.einsum("ac,bd->abcd", g, g)
        + np.einsum("cb,da->abcd", J, J)
        - np.einsum("ca,db->abcd", J, J)
        + 2.0 * np.einsum("ab,dc->abcd", J, J)
    )
    return (c_hol / 4.0) * R


def singer_thorpe(a: float, b: float, c: float) -> np.ndarray:
    """Four-dimensional 2-stein curvature in Singer-Thorpe normal form.

    alpha, beta, gamma = a + tau/12, b + tau/12, c + tau/12 with tau = -4(a+b+c).
    """
    tau = -4.0 * (a + b + c)
    alpha, beta, gamma = a + tau / 12.0, b + tau / 12.0, c + tau / 12.0
    return from_components(
        4,
        {
            (1, 2, 1, 2): a,
            (3, 4, 3, 4): a,
            (1, 3, 1, 3): b,
            (2, 4, 2, 4): b,
            (1, 4, 1, 4): c,
            (2, 3, 2, 3): c,
            (1, 2, 3, 4): alpha,
            (1, 3, 4, 2): beta,
            (1, 4, 2, 3): gamma,
        },
    )


def nikolayevsky(mu: float, nu: float) -> np.ndarray:
    """Five-dimensional 2-stein curvature normal form in parameters (mu, nu)."""
    mn = mu - nu
    return from_components(
        5,
        {
            (1, 2, 1, 2): mn,
            (1, 3, 1, 3): mn,
            (2, 3, 2, 3): mn,
            (2, 4, 2, 4): mn,
            (3, 4, 3, 4): mn,
            (1, 4, 1, 4): mu - 4 * nu,
            (1, 5, 1, 5): mu,
            (4, 5, 4, 5): mu,
            (2, 5, 2, 5): mu - 3 * nu,
            (3, 5, 3, 5): mu - 3 * nu,
            (1, 2, 3, 4): nu,
            (1, 2, 3, 5): SQRT3 * nu,
            (1, 3, 2, 4): -nu,
            (1, 3, 2, 5): SQRT3 * nu,
            (1, 4, 2, 3): -2 * nu,
            (2, 4, 2, 5): SQRT3 * nu,
            (3, 4, 3, 5): -SQRT3 * nu,
        },
    )


def random_symmetric(rng: np.random.Generator, m: int) -> np.ndarray:
    U = rng.uniform(-1.0, 1.0, size=(m, m))
    return np.triu(U) + np.triu(U, 1).T


def random_act(m: int, seed: int, terms: int = 3) -> np.ndarray:
    """Sum of +-(S o S) over ``terms`` random symmetric matrices S (seeded)."""
    if terms < 1:
        raise TensorError("terms must be at least 1")
    if not 2 <= m <= 8:
        raise DimensionError(f"dimension {m} outside 2..8")
    rng = np.random.default_rng(seed)
    R = np.zeros((m,) * 4)
    for _ in range(terms):
        S = random_symmetric(rng, m)
        eps = 1.0 if rng.integers(0, 2) else -1.0
        R += eps * kulkarni_nomizu(S, S)
    return R


def make_einstein(R) -> np.ndarray:
    """Remove the traceless-Ricci part: R - (rho_0 o g)/(m-2)."""
    R = as_tensor(R, rank=4)
    m = R.shape[0]
    if m <= 2:
        raise DimensionError("make_einstein needs dimension at least 3")
    rho = _ricci(R)
    rho0 = rho - (np.trace(rho) / m) * np.eye(m)
    return R - kulkarni_nomizu(rho0, np.eye(m)) / (m - 2)


def random_nabla_r(m: int, seed: int) -> np.ndarray:
    """Seeded random tensor with the symmetries of a covariant curvature derivative."""
    if m < 3:
        raise DimensionError("random_nabla_r needs dimension at least 3")
    rng = np.random.default_rng(seed)
    return project_second_bianchi(rng.uniform(-1.0, 1.0, size=(m,) * 5))


# ---------------------------------------------------------------------------
# registry of named model spaces
# ---------------------------------------------------------------------------

FAMILIES = (
    "constant_curvature",
    "product",
    "complex_space_form",
    "singer_thorpe",
    "nikolayevsky",
    "flat_torus",
)

# unit spheres and Fubini-Study with holomorphic curvature 4
SPHERE_VOLUME = {
    2: 4 * math.pi,
    3: 2 * math.pi**2,
    4: 8 * math.pi**2 / 3,
    5: math.pi**3,
    6: 16 * math.pi**3 / 15,
}
CP_VOLUME = {1: math.pi, 2: math.pi**2 / 2, 3: math.pi**3 / 6}


@dataclass
class ModelSpaceSpec:
    name: str
    dim: int
    parameters: dict[str, float] = field(default_factory=dict)
    volume: float | None = None
    euler_characteristic: int | None = None
    locally_symmetric: bool = False

    def __post_init__(self):
        if self.name not in FAMILIES:
            raise TensorError(f"unknown model family {self.name!r}")
        expected = {"singer_thorpe": 4, "nikolayevsky": 5}.get(self.name)
        if expected is not None and self.dim != expected:
            raise DimensionError(f"{self.name} lives in dimension {expected}, not {self.dim}")
        if self.name == "complex_space_form" and self.dim % 2:
            raise DimensionError("complex space forms have even dimension")

    def curvature(self) -> np.ndarray:
        p = self.parameters
        if self.name == "constant_curvature":
            return constant_curvature(self.dim, p.get("kappa", 1.0))
        if self.name == "flat_torus":
            return flat(self.dim)
        if self.name == "complex_space_form":
            return complex_space_form(self.dim // 2, p.get("c_hol", 4.0))
        if self.name == "singer_thorpe":
            return singer_thorpe(p["a"], p["b"], p["c"])
        if self.name == "nikolayevsky":
            return nikolayevsky(p.get("mu", 0.0), p.get("nu", 1.0))
        m1 = int(p["m1"])
        return product_space(
            constant_curvature(m1, p.get("kappa1", 1.0)),
            constant_curvature(self.dim - m1, p.get("kappa2", 1.0)),
        )

    def to_document(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "parameters": dict(sorted(self.parameters.items())),
            "volume": self.volume,
        }


def _sphere(m: int) -> ModelSpaceSpec:
    return ModelSpaceSpec(
        "constant_curvature", m, {"kappa": 1.0}, SPHERE_VOLUME[m], 2 if m % 2 == 0 else 0, True
    )


def _sphere_product(m1: int, m2: int) -> ModelSpaceSpec:
    chi1 = 2 if m1 % 2 == 0 else 0
    chi2 = 2 if m2 % 2 == 0 else 0
    return ModelSpaceSpec(
        "product",
        m1 + m2,
        {"m1": m1, "kappa1": 1.0, "kappa2": 1.0},
        SPHERE_VOLUME[m1] * SPHERE_VOLUME[m2],
        chi1 * chi2,
        True,
    )


NAMED_SPACES: dict[str, ModelSpaceSpec] = {
    **{f"s{m}": _sphere(m) for m in SPHERE_VOLUME},
    "s2xs4": _sphere_product(2, 4),
    "s3xs3": _sphere_product(3, 3),
    "s2xs2": _sphere_product(2, 2),
    "t4": ModelSpaceSpec("flat_torus", 4, {}, 1.0, 0, True),
    "t6": ModelSpaceSpec("flat_torus", 6, {}, 1.0, 0, True),
    "cp2": ModelSpaceSpec("complex_space_form", 4, {"c_hol": 4.0}, CP_VOLUME[2], 3, True),
    "cp3": ModelSpaceSpec("complex_space_form", 6, {"c_hol": 4.0}, CP_VOLUME[3], 4, True),
    "sl3so3": ModelSpaceSpec("nikolayevsky", 5, {"mu": 0.0, "nu": -1.0}, None, None, True),
}


def family_spec(family: str, params: dict[str, float]) -> ModelSpaceSpec:
    """Build a :class:`ModelSpaceSpec` from a CLI-style family name and parameters."""
    name = family.replace("-", "_")
    p = dict(params)
    if name == "constant_curvature":
        m = int(p.pop("m", 6))
        return ModelSpaceSpec(name, m, {"kappa": p.get("kappa", 1.0)}, p.get("volume"), None, True)
    if name == "flat_torus":
        m = int(p.pop("m", 6))
        return ModelSpaceSpec(name, m, {}, p.get("volume", 1.0), 0, True)
    if name == "complex_space_form":
        n = int(p.pop("n", 3))
        return ModelSpaceSpec(name, 2 * n, {"c_hol": p.get("c_hol", 4.0)}, p.get("volume"), None, True)
    if name == "singer_thorpe":
        q = {k: float(p[k]) for k in ("a", "b", "c")}
        return ModelSpaceSpec(name, 4, q, None, None, q["a"] == q["b"] == q["c"])
    if name == "nikolayevsky":
        q = {"mu": float(p.get("mu", 0.0)), "nu": float(p.get("nu", 1.0))}
        return ModelSpaceSpec(name, 5, q, None, None, q["mu"] == 0.0 or q["nu"] == 0.0)
    if name == "product":
        m1, m2 = int(p["m1"]), int(p["m2"])
        q = {"m1": m1, "kappa1": p.get("kappa1", 1.0), "kappa2": p.get("kappa2", 1.0)}
        return ModelSpaceSpec(name, m1 + m2, q, p.get("volume"), None, True)
    raise TensorError(f"unknown model family {family!r}")


def lookup_space(name: str, params: dict[str, float] | None = None) -> ModelSpaceSpec:
    if name in NAMED_SPACES and not params:
        return NAMED_SPACES[name]
    return family_spec(name, params or {})

