"""Dense tensors, the contraction engine, symmetry projectors and permutation helpers.

Tensors are plain ``numpy`` arrays of shape ``(m,) * rank`` (row-major, so the
flat component vector is ``T.ravel()``).  All frames are orthonormal, so upper
and lower indices are not distinguished.

Component convention used everywhere in the package::

    R[a, b, c, d] = g(R(e_a, e_b) e_c, e_d),   R(X, Y) = [D_X, D_Y] - D_[X, Y]
    rho[i, j]     = sum_a R[a, i, j, a]

so the unit sphere has ``R[a, b, c, d] = delta_ad delta_bc - delta_ac delta_bd``.
"""

from __future__ import annotations

import itertools
import json
import math
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

ARROWS = ("->", "→")


class TensorError(ValueError):
    """Base class for shape, dimension and specification errors."""


class DimensionError(TensorError):
    pass


class MalformedSpecError(TensorError):
    pass


class ConvergenceError(RuntimeError):
    pass


class TensorFormatError(TensorError):
    """Raised by :func:`load_tensor` for unreadable tensor files."""


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def as_tensor(T, rank: int | None = None) -> np.ndarray:
    """Return ``T`` as a float64 array after checking shape and finiteness."""
    T = np.asarray(T, dtype=np.float64)
    if T.ndim == 0 and rank in (None, 0):
        return T
    if rank is not None and T.ndim != rank:
        raise DimensionError(f"expected a rank-{rank} tensor, got rank {T.ndim}")
    if T.ndim and len(set(T.shape)) != 1:
        raise DimensionError(f"all axes must share one dimension, got shape {T.shape}")
    if T.ndim and T.shape[0] < 2:
        raise DimensionError("dimension must be at least 2")
    if not np.all(np.isfinite(T)):
        raise TensorError("tensor has non-finite entries")
    return T


def dim_of(T: np.ndarray) -> int:
    return T.shape[0]


def _scale(T: np.ndarray) -> float:
    return float(np.max(np.abs(T))) if T.size else 0.0


def curvature_symmetry_residuals(R: np.ndarray) -> dict[str, float]:
    """Max violation of each algebraic curvature symmetry, relative to max |R|.

    Works on a rank-4 tensor or on a stack with trailing extra axes.
    """
    R = np.asarray(R, dtype=np.float64)
    scale = _scale(R)
    if scale == 0.0:
        return {"antisym_first": 0.0, "antisym_second": 0.0, "pair": 0.0, "bianchi": 0.0}
    res = {
        "antisym_first": R + np.einsum("bacd...->abcd...", R),
        "antisym_second": R + np.einsum("abdc...->abcd...", R),
        "pair": R - np.einsum("cdab...->abcd...", R),
        "bianchi": R + np.einsum("acdb...->abcd...", R) + np.einsum("adbc...->abcd...", R),
    }
    return {k: _scale(v) / scale for k, v in res.items()}


def is_curvature_tensor(R, tol: float = 1e-12) -> bool:
    R = np.asarray(R)
    if R.ndim != 4:
        return False
    return max(curvature_symmetry_residuals(R).values()) <= tol


def second_bianchi_residual(D: np.ndarray) -> float:
    """Max |D_abcd;e + D_abde;c + D_abec;d| relative to max |D|."""
    scale = _scale(D)
    if scale == 0.0:
        return 0.0
    return _scale(_cyclic_cde(D)) / scale


def is_curvature_derivative(D, tol: float = 1e-12) -> bool:
    D = np.asarray(D)
    if D.ndim != 5:
        return False
    per_slice = max(curvature_symmetry_residuals(D).values())
    return per_slice <= tol and second_bianchi_residual(D) <= tol


def symmetric_residual(S: np.ndarray) -> float:
    scale = _scale(S)
    return 0.0 if scale == 0.0 else _scale(S - S.T) / scale


# ---------------------------------------------------------------------------
# contraction engine
# ---------------------------------------------------------------------------


def parse_spec(spec: str, n_operands: int) -> tuple[list[str], str]:
    """Split an index expression into operand index strings and output indices.

    Letters repeated across the expression (exactly twice) are summed; the
    output is the remaining letters in order of first appearance, unless an
    explicit right-hand side lists them in another order.
    """
    text = spec.replace(" ", "")
    rhs = None
    for arrow in ARROWS:
        if arrow in text:
            text, rhs = text.split(arrow, 1)
            break
    terms = text.split(",") if text else []
    if len(terms) != n_operands:
        raise MalformedSpecError(
            f"spec {spec!r} names {len(terms)} operands but {n_operands} were given"
        )
    counts: dict[str, int] = {}
    for term in terms:
        for ch in term:
            if not ch.isalpha():
                raise MalformedSpecError(f"invalid index character {ch!r} in {spec!r}")
            counts[ch] = counts.get(ch, 0) + 1
    bad = [ch for ch, n in counts.items() if n > 2]
    if bad:
        raise MalformedSpecError(f"indices {bad} appear more than twice in {spec!r}")
    free = "".join(ch for ch in dict.fromkeys("".join(terms)) if counts[ch] == 1)
    if rhs is None or rhs == "":
        if rhs == "" and free:
            raise MalformedSpecError(f"spec {spec!r} leaves free indices {free!r}")
        return terms, free
    if sorted(rhs) != sorted(free):
        raise MalformedSpecError(
            f"output {rhs!r} must list exactly the non-repeated indices {free!r}"
        )
    return terms, rhs


def contract(spec: str, *operands) -> np.ndarray | float:
    """Evaluate an Einstein-summation expression over dense tensors.

    Operands are folded pairwise from left to right; each pairwise step is a
    fixed-order ``numpy.einsum`` loop, so results are bit-stable for identical
    inputs.  Returns a Python float for full contractions.

    >>> contract("ii->", np.eye(6))
    6.0
    """
    ops = [np.asarray(op, dtype=np.float64) for op in operands]
    terms, out = parse_spec(spec, len(ops))
    dims = {op.shape[0] for op in ops if op.ndim}
    if len(dims) > 1:
        raise DimensionError(f"operands have mismatched dimensions {sorted(dims)}")
    for term, op in zip(terms, ops):
        if len(term) != op.ndim:
            raise MalformedSpecError(f"index string {term!r} does not match rank {op.ndim}")
    if not ops:
        raise MalformedSpecError("no operands")

    # letters still needed after step k: those in later operands or the output
    acc, acc_idx = ops[0], terms[0]
    for k in range(1, len(ops)):
        later = set(out).union(*terms[k + 1 :])
        nxt = terms[k]
        keep = "".join(
            ch for ch in dict.fromkeys(acc_idx + nxt) if ch in later
        )
        acc = np.einsum(f"{acc_idx},{nxt}->{keep}", acc, ops[k], optimize=False)
        acc_idx = keep
    if acc_idx != out:
        acc = np.einsum(f"{acc_idx}->{out}", acc, optimize=False)
    if acc.ndim == 0:
        return float(acc)
    return acc


def naive_contract(spec: str, *operands) -> np.ndarray | float:
    """Reference evaluator: an explicit loop over every index assignment.

    Independent of :func:`contract`; intended as an oracle for small dims only.
    """
    ops = [np.asarray(op, dtype=np.float64) for op in operands]
    terms, out = parse_spec(spec, len(ops))
    m = next(op.shape[0] for op in ops if op.ndim)
    letters = list(dict.fromkeys("".join(terms)))
    pos = {ch: i for i, ch in enumerate(letters)}
    result = np.zeros((m,) * len(out))
    term_pos = [[pos[ch] for ch in t] for t in terms]
    out_pos = [pos[ch] for ch in out]
    flat = [op.tolist() if op.ndim else float(op) for op in ops]
    for assign in itertools.product(range(m), repeat=len(letters)):
        prod = 1.0
        for t, op in zip(term_pos, flat):
            v = op
            for p in t:
                v = v[assign[p]]
            prod *= v
        result[tuple(assign[p] for p in out_pos)] += prod
    return float(result) if not out else result


# ---------------------------------------------------------------------------
# permutations and generalized Kronecker delta
# ---------------------------------------------------------------------------


def permutation_sign(perm: Sequence[int]) -> int:
    """Sign of a permutation of ``range(len(perm))`` by cycle counting."""
    perm = list(perm)
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@lru_cache(maxsize=None)
def signed_permutations(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All permutations of ``range(n)`` in lexicographic order with their signs."""
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)
    signs = np.array([permutation_sign(p) for p in perms], dtype=np.int64)
    perms.setflags(write=False)
    signs.setflags(write=False)
    return perms, signs


def generalized_kronecker(upper: Sequence[int], lower: Sequence[int]) -> int:
    """det(delta_{upper[a], lower[b]}), i.e. g(e^I wedge-product, e^J wedge-product).

    Indices may be 0- or 1-based; only equality matters.
    """
    upper, lower = tuple(upper), tuple(lower)
    if len(upper) != len(lower):
        raise TensorError(f"index tuples differ in length: {len(upper)} vs {len(lower)}")
    if not upper:
        raise TensorError("index tuples must be non-empty")
    if len(set(upper)) != len(upper) or len(set(lower)) != len(lower):
        return 0
    if set(upper) != set(lower):
        return 0
    where = {v: k for k, v in enumerate(upper)}
    return permutation_sign([where[v] for v in lower])


# ---------------------------------------------------------------------------
# products and projectors
# ---------------------------------------------------------------------------


def kulkarni_nomizu(h: np.ndarray, k: np.ndarray) -> np.ndarray:
    """(h o k)_abcd = h_ad k_bc + h_bc k_ad - h_ac k_bd - h_bd k_ac.

    Oriented so that ``kulkarni_nomizu(I, I)`` is the curvature of the sphere of
    curvature 2 in the package convention.
    """
    h = np.asarray(h, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    return (
        np.einsum("ad,bc->abcd", h, k)
        + np.einsum("bc,ad->abcd", h, k)
        - np.einsum("ac,bd->abcd", h, k)
        - np.einsum("bd,ac->abcd", h, k)
    )


def _curvature_projection(T: np.ndarray) -> np.ndarray:
    # works on the leading four axes of T
    A = T - np.einsum("bacd...->abcd...", T)
    A = (A - np.einsum("abdc...->abcd...", A)) / 4.0
    S = (A + np.einsum("cdab...->abcd...", A)) / 2.0
    b = (S + np.einsum("acdb...->abcd...", S) + np.einsum("adbc...->abcd...", S)) / 3.0
    return S - b


def project_curvature_symmetries(raw) -> np.ndarray:
    """Orthogonal projection of a rank-4 tensor onto algebraic curvature tensors."""
    T = as_tensor(raw, rank=4)
    return _curvature_projection(T)


def _cyclic_cde(D: np.ndarray) -> np.ndarray:
    return D + np.einsum("abdec->abcde", D) + np.einsum("abecd->abcde", D)


def project_second_bianchi(raw, tol: float = 1e-14, max_sweeps: int = 10000) -> np.ndarray:
    """Project a rank-5 tensor onto curvature-derivative tensors.

    Alternates the per-slice curvature projector with the projector onto the
    kernel of the cyclic sum over the last three slots until both constraint
    families hold to ``tol`` relative to max |D|.
    """
    D = as_tensor(raw, rank=5)
    if not np.any(D):
        return D.copy()
    for _ in range(max_sweeps):
        D = _curvature_projection(D)
        D = D - _cyclic_cde(D) / 3.0
        scale = _scale(D)
        if scale == 0.0:
            return D
        slice_err = _scale(_curvature_projection(D) - D) / scale
        if slice_err <= tol:
            # the final slice projection is cheap insurance against drift
            D2 = _curvature_projection(D)
            if second_bianchi_residual(D2) <= tol:
                return D2
    raise ConvergenceError(f"second-Bianchi projection did not converge in {max_sweeps} sweeps")


def symmetrize(T: np.ndarray) -> np.ndarray:
    """Sum of T over all permutations of its axes (no 1/n! factor).

    Built up one axis at a time from coset representatives, so rank n costs
    n(n+1)/2 transposes instead of n!.
    """
    T = np.asarray(T, dtype=np.float64)
    n = T.ndim
    S = T
    for k in range(1, n):
        acc = S.copy()
        for j in range(k):
            axes = list(range(n))
            axes[j], axes[k] = axes[k], axes[j]
            acc += np.transpose(S, axes)
        S = acc
    return S


def symmetrize_naive(T: np.ndarray) -> np.ndarray:
    """Reference for :func:`symmetrize`: literal sum over all n! axis permutations."""
    T = np.asarray(T, dtype=np.float64)
    out = np.zeros_like(T)
    for perm in itertools.permutations(range(T.ndim)):
        out += np.transpose(T, perm)
    return out


def rotate(T: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Components of T in the frame e'_i = Q_ai e_a (every slot transformed)."""
    out = np.asarray(T, dtype=np.float64)
    for axis in range(out.ndim):
        out = np.moveaxis(np.tensordot(out, Q, axes=([axis], [0])), -1, axis)
    return out


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------


def tensor_to_document(T: np.ndarray) -> dict:
    T = np.asarray(T, dtype=np.float64)
    entries = [
        [*(int(i) + 1 for i in idx), float(T[idx])]
        for idx in zip(*np.nonzero(T))
    ]
    return {"dim": int(T.shape[0]), "rank": int(T.ndim), "entries": entries}


def tensor_from_document(doc: dict, project: bool = False) -> np.ndarray:
    try:
        dim, rank, entries = int(doc["dim"]), int(doc["rank"]), doc["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise TensorFormatError(f"missing or invalid header field: {exc}") from exc
    if dim < 2 or rank < 0:
        raise TensorFormatError(f"bad header dim={dim} rank={rank}")
    T = np.zeros((dim,) * rank)
    for n, entry in enumerate(entries):
        if not isinstance(entry, list) or len(entry) != rank + 1:
            raise TensorFormatError(f"entries[{n}]: expected {rank} indices and a value")
        *idx, value = entry
        if any(not isinstance(i, int) or not 1 <= i <= dim for i in idx):
            raise TensorFormatError(f"entries[{n}]: indices must be integers in 1..{dim}")
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise TensorFormatError(f"entries[{n}]: value must be a finite number")
        T[tuple(i - 1 for i in idx)] = value
    if project:
        if rank == 4:
            T = project_curvature_symmetries(T)
        elif rank == 5:
            T = project_second_bianchi(T)
        else:
            raise TensorFormatError(f"no symmetry projector for rank {rank}")
    return T


def load_tensor(path: str | Path, project: bool = False) -> np.ndarray:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TensorFormatError(
            f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    try:
        return tensor_from_document(doc, project=project)
    except TensorFormatError as exc:
        raise TensorFormatError(f"{path}: {exc}") from exc


def save_tensor(path: str | Path, T: np.ndarray) -> None:
    Path(path).write_text(json.dumps(tensor_to_document(T), indent=1) + "\n", encoding="utf-8")


def identity(m: int) -> np.ndarray:
    return np.eye(m)


def max_abs(*arrays: Iterable) -> float:
    return max((_scale(np.asarray(a)) for a in arrays), default=0.0)
