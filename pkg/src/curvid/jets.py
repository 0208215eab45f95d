"""Truncated multivariate Taylor arithmetic and exact pointwise curvature of chart metrics.

A :class:`Jet` stores a tensor whose every component is a polynomial in the
chart offsets y = x - center, truncated at total degree D.  The coefficient
axis is last and monomials are ordered by total degree, so "everything exact
up to degree k" is a leading slice.  Each jet tracks ``order``, the highest
degree whose coefficients are exact; differentiation lowers it by one and
products keep the minimum.  Curvature, nabla R and nabla^2 R come out as the
constant coefficients of the corresponding jets, with no finite differencing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .identities import IdentityResidual
from .tensor_core import DimensionError, TensorError


class CapabilityError(RuntimeError):
    """The requested output needs more jet degree (or data) than is available."""


class JetSpace:
    """Monomial bookkeeping for jets in ``dim`` variables truncated at ``degree``."""

    def __init__(self, dim: int, degree: int):
        if dim < 1 or degree < 0:
            raise ValueError("JetSpace needs dim >= 1 and degree >= 0")
        self.dim = dim
        self.degree = degree
        monos = []
        for d in range(degree + 1):
            for combo in itertools.combinations_with_replacement(range(dim), d):
                alpha = [0] * dim
                for v in combo:
                    alpha[v] += 1
                monos.append(tuple(alpha))
        self.monomials = monos
        self.index = {a: k for k, a in enumerate(monos)}
        self.total_degree = np.array([sum(a) for a in monos])
        # count of monomials of degree <= k
        self.upto = np.searchsorted(self.total_degree, np.arange(degree + 1), side="right")

        pairs = []
        for p, a in enumerate(monos):
            for q, b in enumerate(monos):
                r = tuple(x + y for x, y in zip(a, b))
                if sum(r) <= degree:
                    pairs.append((sum(r), p, q, self.index[r]))
        pairs.sort()
        arr = np.array(pairs, dtype=np.int64)
        self._pair_p = arr[:, 1]
        self._pair_q = arr[:, 2]
        self._pair_r = arr[:, 3]
        self._pairs_upto = np.searchsorted(arr[:, 0], np.arange(degree + 1), side="right")
        self._scatter = np.zeros((len(arr), len(monos)))
        self._scatter[np.arange(len(arr)), self._pair_r] = 1.0

        # d/dy_i: coefficient of alpha in the derivative is (alpha_i + 1) c[alpha + e_i]
        self._deriv = []
        for i in range(dim):
            src = np.zeros(len(monos), dtype=np.int64)
            fac = np.zeros(len(monos))
            for k, a in enumerate(monos):
                if sum(a) < degree:
                    b = list(a)
                    b[i] += 1
                    src[k] = self.index[tuple(b)]
                    fac[k] = a[i] + 1
            self._deriv.append((src, fac))

    @property
    def size(self) -> int:
        return len(self.monomials)

    def pair_tables(self, order: int):
        n = self._pairs_upto[order]
        nres = self.upto[order]
        return self._pair_p[:n], self._pair_q[:n], self._scatter[:n, :nres]

    def constant(self, value, order: int | None = None) -> "Jet":
        value = np.asarray(value, dtype=np.float64)
        data = np.zeros(value.shape + (self.size,))
        data[..., 0] = value
        return Jet(self, data, self.degree if order is None else order)

    def zeros(self, shape=()) -> "Jet":
        return Jet(self, np.zeros(tuple(shape) + (self.size,)), self.degree)

    def variable(self, i: int, center: float = 0.0) -> "Jet":
        data = np.zeros(self.size)
        data[0] = center
        if self.degree >= 1:
            data[self.index[tuple(int(k == i) for k in range(self.dim))]] = 1.0
        return Jet(self, data, self.degree)

    def coordinates(self, center=None) -> list["Jet"]:
        c = np.zeros(self.dim) if center is None else np.asarray(center, dtype=np.float64)
        return [self.variable(i, c[i]) for i in range(self.dim)]


@lru_cache(maxsize=16)
def jet_space(dim: int, degree: int) -> JetSpace:
    return JetSpace(dim, degree)


class Jet:
    """Tensor-valued truncated Taylor polynomial; coefficient axis last."""

    __slots__ = ("space", "data", "order")

    def __init__(self, space: JetSpace, data: np.ndarray, order: int):
        self.space = space
        self.data = data
        self.order = int(order)
        if self.order < space.degree:
            # drop coefficients that are no longer exact
            self.data[..., space.upto[self.order] if self.order >= 0 else 0 :] = 0.0

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape[:-1]

    def value(self) -> np.ndarray | float:
        """Evaluate at the center (the constant coefficient)."""
        if self.order < 0:
            raise CapabilityError("jet has no exact coefficients left")
        v = self.data[..., 0]
        return float(v) if v.ndim == 0 else v.copy()

    def coefficients(self) -> dict[tuple[int, ...], float]:
        """Scalar jets only: multi-index -> coefficient for the exact part."""
        if self.shape:
            raise TensorError("coefficients() is defined for scalar jets")
        n = self.space.upto[self.order] if self.order >= 0 else 0
        return {self.space.monomials[k]: float(self.data[k]) for k in range(n)}

    def _wrap(self, data, order):
        return Jet(self.space, data, order)

    def __getitem__(self, item):
        return self._wrap(np.array(self.data[item]), self.order)

    def __add__(self, other):
        if isinstance(other, Jet):
            return self._wrap(self.data + other.data, min(self.order, other.order))
        out = self.data.copy()
        out[..., 0] += other
        return self._wrap(out, self.order)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(-self.data, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            return multiply(self, other)
        return self._wrap(self.data * other, self.order)

    __rmul__ = __mul__

    def __truediv__(self, other: float):
        return self._wrap(self.data / other, self.order)

    def transpose(self, *axes) -> "Jet":
        return self._wrap(np.transpose(self.data, tuple(axes) + (self.data.ndim - 1,)).copy(), self.order)

    def derivative(self, i: int) -> "Jet":
        src, fac = self.space._deriv[i]
        return self._wrap(self.data[..., src] * fac, self.order - 1)

    def gradient(self) -> "Jet":
        """Stack d/dy_i on a new leading axis."""
        parts = [self.derivative(i).data for i in range(self.space.dim)]
        return self._wrap(np.stack(parts, axis=0), self.order - 1)


def contract(spec: str, a: Jet, b: Jet) -> Jet:
    """Two-operand einsum over tensor axes with truncated polynomial multiplication."""
    if a.space is not b.space:
        raise TensorError("jets live in different spaces")
    order = min(a.order, b.order)
    if order < 0:
        raise CapabilityError("product has no exact coefficients")
    space = a.space
    P, Q, S = space.pair_tables(order)
    lhs, out = spec.replace(" ", "").split("->")
    sa, sb = lhs.split(",")
    prod = np.einsum(f"{sa}z,{sb}z->{out}z", a.data[..., P], b.data[..., Q], optimize=True)
    data = np.zeros(prod.shape[:-1] + (space.size,))
    data[..., : S.shape[1]] = prod @ S
    return Jet(space, data, order)


def multiply(a: Jet, b: Jet) -> Jet:
    """Elementwise product with numpy broadcasting of the tensor axes."""
    order = min(a.order, b.order)
    P, Q, S = a.space.pair_tables(order)
    prod = a.data[..., P] * b.data[..., Q]
    data = np.zeros(prod.shape[:-1] + (a.space.size,))
    data[..., : S.shape[1]] = prod @ S
    return Jet(a.space, data, order)


def reciprocal(f: Jet) -> Jet:
    """1/f for a scalar-valued (elementwise) jet with nonzero constant term, by Newton iteration."""
    f0 = f.data[..., 0]
    if np.any(f0 == 0):
        raise ZeroDivisionError("reciprocal of a jet with zero constant term")
    x = f.space.constant(1.0 / f0, order=0)
    while x.order < f.order:
        # x is exact to degree k, so one step is exact to 2k + 1; run it at that order
        x = Jet(f.space, x.data, min(f.order, 2 * x.order + 1))
        x = x * 2.0 - multiply(multiply(x, x), f)
    return x


def geometric(u: Jet) -> Jet:
    """1/(1+u) for u without constant term, as the finite series sum (-u)^k."""
    if np.any(u.data[..., 0] != 0):
        raise ValueError("geometric() needs u(center) = 0")
    term = u.space.constant(np.ones(u.shape), order=u.order)
    total = term
    for _ in range(u.space.degree):
        term = multiply(term, -u)
        total = total + term
    return total


def matrix_inverse(G: Jet) -> Jet:
    """Inverse of an (m, m) matrix jet via Newton's iteration X <- 2X - X G X."""
    m = G.shape[0]
    if G.shape != (m, m):
        raise DimensionError("matrix_inverse needs a square matrix jet")
    X = G.space.constant(np.linalg.inv(G.value()), order=0)
    while X.order < G.order:
        X = Jet(G.space, X.data, min(G.order, 2 * X.order + 1))
        X = X * 2.0 - contract("ij,jk->ik", contract("ij,jk->ik", X, G), X)
    return X


# -- charts ------------------------------------------------------------------------------------


MetricBuilder = Callable[[list[Jet]], Jet]


@dataclass
class ChartMetric:
    """A metric g_ij(x) on a coordinate chart, expanded around ``center``."""

    name: str
    dim: int
    builder: MetricBuilder
    center: np.ndarray = field(default=None)

    def __post_init__(self):
        self.center = np.zeros(self.dim) if self.center is None else np.asarray(self.center, dtype=np.float64)
        if self.center.shape != (self.dim,):
            raise DimensionError(f"center must have {self.dim} coordinates")

    def metric_jet(self, degree: int) -> Jet:
        space = jet_space(self.dim, degree)
        g = self.builder(space.coordinates(self.center))
        g0 = g.value()
        if not np.allclose(g0, g0.T, atol=1e-14):
            raise TensorError("chart metric is not symmetric")
        if np.any(np.linalg.eigvalsh(g0) <= 0):
            raise TensorError("chart metric is not positive definite at the center")
        return g


def _conformal_sphere(kappa: float) -> MetricBuilder:
    def build(x: list[Jet]) -> Jet:
        m = len(x)
        space = x[0].space
        s = x[0] * x[0]
        for xi in x[1:]:
            s = s + xi * xi
        f = 1.0 + kappa * s
        f0 = f.value()
        if f0 <= 0:
            raise TensorError("center lies outside the chart domain")
        inv = geometric((f - f0) / f0) / f0
        factor = multiply(inv, inv) * 4.0
        return contract(",ij->ij", factor, space.constant(np.eye(m)))

    return build


def sphere_chart(m: int, kappa: float = 1.0, center=None) -> ChartMetric:
    """Stereographic chart 4 delta / (1 + kappa |x|^2)^2 of the space form of curvature kappa."""
    return ChartMetric(f"sphere(m={m},kappa={kappa:g})", m, _conformal_sphere(kappa), center)


def flat_chart(m: int, center=None) -> ChartMetric:
    return ChartMetric(f"flat(m={m})", m, lambda x: x[0].space.constant(np.eye(len(x))), center)


def product_chart(first: ChartMetric, second: ChartMetric) -> ChartMetric:
    m1, m2 = first.dim, second.dim

    def build(x: list[Jet]) -> Jet:
        g1 = first.builder(x[:m1])
        g2 = second.builder(x[m1:])
        data = np.zeros((m1 + m2, m1 + m2, x[0].space.size))
        data[:m1, :m1] = g1.data
        data[m1:, m1:] = g2.data
        return Jet(x[0].space, data, min(g1.order, g2.order))

    return ChartMetric(f"product({first.name},{second.name})", m1 + m2, build, np.concatenate([first.center, second.center]))


def perturbed_flat_chart(m: int, seed: int = 0, eps: float = 1e-2, poly_degree: int = 3, center=None) -> ChartMetric:
    """delta + eps * h(x) with h a random symmetric matrix of polynomials of degree <= poly_degree."""
    rng = np.random.default_rng(seed)
    monos = [c for d in range(poly_degree + 1) for c in itertools.combinations_with_replacement(range(m), d)]
    coef = rng.uniform(-1.0, 1.0, size=(len(monos), m, m))
    coef = 0.5 * (coef + coef.transpose(0, 2, 1))

    def build(x: list[Jet]) -> Jet:
        space = x[0].space
        g = space.constant(np.eye(m))
        for combo, c in zip(monos, coef):
            mono = space.constant(1.0)
            for v in combo:
                mono = mono * x[v]
            g = g + contract(",ij->ij", mono, space.constant(eps * c))
        return g

    return ChartMetric(f"perturbed_flat(m={m},seed={seed},eps={eps:g},deg={poly_degree})", m, build, center)


# -- curvature -------------------------------------------------------------------------------


def orthonormal_components(g_center, T, variance: int | None = None) -> np.ndarray:
    """Express a covariant tensor in the orthonormal frame E = g^{-1/2} (symmetric square root).

    ``variance`` is the number of leading covariant slots to transform (default: all).
    """
    g = np.asarray(g_center, dtype=np.float64)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or not np.allclose(g, g.T, atol=1e-12):
        raise TensorError("g_center must be a symmetric matrix")
    w, V = np.linalg.eigh(g)
    if np.any(w <= 0):
        raise np.linalg.LinAlgError("g_center is not positive definite")
    E = (V / np.sqrt(w)) @ V.T
    T = np.asarray(T, dtype=np.float64)
    k = T.ndim if variance is None else variance
    for axis in range(k):
        T = np.moveaxis(np.tensordot(T, E, axes=([axis], [0])), -1, axis)
    return T


@dataclass
class CurvatureJet:
    """R, nabla R and nabla^2 R at the chart center in the orthonormal frame ``frame``.

    Derivative slots come last: nabla_R[a,b,c,d,e] = R_abcd;e and
    nabla2_R[a,b,c,d,e,f] = R_abcd;ef (differentiate along e first, then f).
    """

    chart: str
    degree: int
    g_center: np.ndarray
    frame: np.ndarray
    R: np.ndarray
    nabla_R: np.ndarray | None
    nabla2_R: np.ndarray | None

    def require(self, level: int) -> None:
        names = {1: ("nabla R", 3), 2: ("nabla^2 R", 4)}
        have = [n for n, (name, _) in names.items() if (self.nabla_R, self.nabla2_R)[n - 1] is not None]
        if level not in have:
            name, need = names[level]
            avail = ", ".join(["R"] + [names[n][0] for n in have])
            raise CapabilityError(f"{name} needs jet degree >= {need}; degree {self.degree} provides {avail}")

    def ricci_identity_residual(self) -> float:
        """Relative residual of R_abcd;ef - R_abcd;fe = -sum_slots R_fe(slot)p R_..p.."""
        self.require(2)
        R, N2 = self.R, self.nabla2_R
        lhs = N2 - N2.swapaxes(4, 5)
        terms = [
            np.einsum("feap,pbcd->abcdef", R, R),
            np.einsum("febp,apcd->abcdef", R, R),
            np.einsum("fecp,abpd->abcdef", R, R),
            np.einsum("fedp,abcp->abcdef", R, R),
        ]
        resid = lhs + sum(terms)
        mass = float(np.max(np.abs(lhs))) + sum(float(np.max(np.abs(t))) for t in terms)
        return 0.0 if mass == 0.0 else float(np.max(np.abs(resid))) / mass


def _lower_christoffel_corrections(T: Jet, gamma: Jet) -> Jet:
    """-sum over slots of Gamma^p_{e s} T_{..p..} with the new derivative index e appended last."""
    rank = len(T.shape)
    letters = "abcdefgh"[:rank]
    total = None
    for s in range(rank):
        src = letters[:s] + "p" + letters[s + 1 :]
        term = contract(f"py{letters[s]},{src}->{letters}y", gamma, T)
        total = term if total is None else total + term
    return -total


def curvature_jet(chart: ChartMetric, D: int = 4) -> CurvatureJet:
    """Exact R (D >= 2), nabla R (D >= 3) and nabla^2 R (D >= 4) at the chart center."""
    if D < 2:
        raise CapabilityError(f"curvature needs jet degree >= 2, got {D}")
    g = chart.metric_jet(D)
    ginv = matrix_inverse(g)
    dg = g.gradient()  # dg[a,b,c] = d_a g_bc
    half_sum = dg + dg.transpose(1, 0, 2) - dg.transpose(1, 2, 0)  # [i,j,l]: d_i g_jl + d_j g_il - d_l g_ij
    gamma = contract("kl,ijl->kij", ginv, half_sum) * 0.5  # Gamma^k_ij
    dgamma = gamma.gradient()  # [a,k,i,j] = d_a Gamma^k_ij
    # R^l_ijk = d_i G^l_jk - d_j G^l_ik + G^l_ip G^p_jk - G^l_jp G^p_ik, stored [i,j,k,l]
    GG = contract("lip,pjk->ijkl", gamma, gamma)
    Rup = dgamma.transpose(0, 2, 3, 1) - dgamma.transpose(2, 0, 3, 1) + GG - GG.transpose(1, 0, 2, 3)
    Rdown = contract("ijkp,pl->ijkl", Rup, g)
    nabla = nabla2 = None
    if D >= 3:
        dR = Rdown.gradient().transpose(1, 2, 3, 4, 0)
        nabla = dR + _lower_christoffel_corrections(Rdown, gamma)
    if D >= 4:
        d2 = nabla.gradient().transpose(1, 2, 3, 4, 5, 0)
        nabla2 = d2 + _lower_christoffel_corrections(nabla, gamma)
    g0 = g.value()
    w, V = np.linalg.eigh(g0)
    frame = (V / np.sqrt(w)) @ V.T
    return CurvatureJet(
        chart=chart.name,
        degree=D,
        g_center=g0,
        frame=frame,
        R=orthonormal_components(g0, Rdown.value()),
        nabla_R=None if nabla is None else orthonormal_components(g0, nabla.value()),
        nabla2_R=None if nabla2 is None else orthonormal_components(g0, nabla2.value()),
    )


def lichnerowicz_terms(jet: CurvatureJet, ricci_order: str = "ab") -> tuple[np.ndarray, list[np.ndarray]]:
    """Left side (RR_ij)_;kk and the right-side terms of the second-order RR identity."""
    jet.require(2)
    R, D1, D2 = jet.R, jet.nabla_R, jet.nabla2_R
    lap = np.einsum("abcdkk->abcd", D2)
    lhs = 2 * np.einsum("iabck,jabck->ij", D1, D1) + np.einsum("iabc,jabc->ij", lap, R) + np.einsum("iabc,jabc->ij", R, lap)
    ddrho = np.einsum("uicuab->icab", D2)  # rho_ic;ab with ; a then ; b
    if ricci_order == "ba":
        ddrho = ddrho.swapaxes(2, 3)
    rho = np.einsum("aija->ij", R)
    terms = [
        2 * np.einsum("ibcda,jbcda->ij", D1, D1),
        8 * np.einsum("iabc,jubv,aucv->ij", R, R, R, optimize=True),
        2 * np.einsum("ibac,jbuv,acuv->ij", R, R, R, optimize=True),
        4 * np.einsum("cd,iabc,jabd->ij", rho, R, R, optimize=True),
        2 * np.einsum("icab,jabc->ij", ddrho, R),
        2 * np.einsum("jcab,iabc->ij", ddrho, R),
        2 * np.einsum("abic,jabc->ij", ddrho, R),
        2 * np.einsum("abjc,iabc->ij", ddrho, R),
    ]
    return lhs, terms


def verify_lichnerowicz_formula(jet: CurvatureJet, ricci_order: str = "ab") -> IdentityResidual:
    lhs, terms = lichnerowicz_terms(jet, ricci_order)
    resid = lhs - sum(terms)
    mass = float(np.max(np.abs(lhs))) + sum(float(np.max(np.abs(t))) for t in terms)
    return IdentityResidual("lichnerowicz", resid, mass)
