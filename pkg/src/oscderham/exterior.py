"""Exterior algebra of the dual of a real 2n-dimensional vector space.

Basis k-forms ``dx^I`` are labelled by strictly increasing index tuples ``I``
drawn from ``range(dim)`` (zero-based, so ``(0, 1)`` is ``dx^1 ^ dx^2``).
Within a degree the basis is ordered lexicographically; the full algebra is
ordered by degree first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

RANK_RTOL = 1e-8


@lru_cache(maxsize=None)
def basis(dim: int, k: int) -> tuple[tuple[int, ...], ...]:
    """Ordered basis index tuples of degree ``k``; empty outside ``[0, dim]``."""
    if k < 0 or k > dim:
        return ()
    return tuple(combinations(range(dim), k))


@lru_cache(maxsize=None)
def _position(dim: int, k: int) -> dict[tuple[int, ...], int]:
    return {idx: pos for pos, idx in enumerate(basis(dim, k))}


@lru_cache(maxsize=None)
def full_basis(dim: int) -> tuple[tuple[int, ...], ...]:
    """All ``2**dim`` basis indices, degree-major."""
    return tuple(idx for k in range(dim + 1) for idx in basis(dim, k))


def degree_offsets(dim: int) -> list[int]:
    """Start offset of each degree block inside the full algebra."""
    offsets = [0]
    for k in range(dim + 1):
        offsets.append(offsets[-1] + comb(dim, k))
    return offsets


def _merge_sign(left: tuple[int, ...], right: tuple[int, ...]) -> int:
    """Sign of the shuffle sorting ``left + right``; 0 on a repeated index."""
    if set(left) & set(right):
        return 0
    inversions = sum(1 for a in left for b in right if a > b)
    return -1 if inversions % 2 else 1


def _check_dim(dim: int) -> None:
    if dim <= 0 or dim % 2:
        raise ValueError(f"dimension must be a positive even integer, got {dim}")


@dataclass(frozen=True)
class Form:
    """A homogeneous k-form with complex coefficients on ``R^dim``."""

    dim: int
    degree: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_dim(self.dim)
        if not 0 <= self.degree <= self.dim:
            raise ValueError(f"degree {self.degree} outside [0, {self.dim}]")
        coeffs = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if coeffs.shape[0] != comb(self.dim, self.degree):
            raise ValueError(
                f"expected {comb(self.dim, self.degree)} coefficients, got {coeffs.shape[0]}"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zero(cls, dim: int, degree: int) -> Form:
        return cls(dim, degree, np.zeros(comb(dim, degree), dtype=complex))

    @classmethod
    def basis_form(cls, dim: int, indices: tuple[int, ...] | list[int], coeff: complex = 1.0) -> Form:
        indices = tuple(indices)
        if list(indices) != sorted(set(indices)):
            raise ValueError(f"basis indices must be strictly increasing: {indices}")
        out = np.zeros(comb(dim, len(indices)), dtype=complex)
        out[_position(dim, len(indices))[indices]] = coeff
        return cls(dim, len(indices), out)

    @classmethod
    def covector(cls, components) -> Form:
        components = np.asarray(components)
        return cls(components.shape[0], 1, components)

    def __getitem__(self, indices: tuple[int, ...]) -> complex:
        return self.coeffs[_position(self.dim, self.degree)[tuple(indices)]]

    def __add__(self, other: Form) -> Form:
        if (self.dim, self.degree) != (other.dim, other.degree):
            raise ValueError("cannot add forms of different dimension or degree")
        return Form(self.dim, self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other: Form) -> Form:
        return self + (-1) * other

    def __rmul__(self, scalar: complex) -> Form:
        return Form(self.dim, self.degree, scalar * self.coeffs)

    def allclose(self, other: Form, atol: float = 1e-12) -> bool:
        return (self.dim, self.degree) == (other.dim, other.degree) and np.allclose(
            self.coeffs, other.coeffs, rtol=0.0, atol=atol
        )


@dataclass(frozen=True)
class Metric:
    """Constant positive-definite scalar product on ``R^dim``."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = np.array(self.matrix, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError("metric must be a square matrix")
        _check_dim(g.shape[0])
        scale = max(np.abs(g).max(), 1.0)
        if np.abs(g - g.T).max() > 1e-12 * scale:
            raise ValueError("metric is not symmetric")
        if np.linalg.eigvalsh(g).min() <= 0:
            raise ValueError("metric is not positive definite")
        g = 0.5 * (g + g.T)
        g.setflags(write=False)
        object.__setattr__(self, "matrix", g)

    @classmethod
    def identity(cls, dim: int) -> Metric:
        return cls(np.eye(dim))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.matrix)


def random_metric(rng: np.random.Generator, dim: int) -> Metric:
    """Well-conditioned random metric ``Q diag(s) Q^T`` with ``s`` in ``[0.5, 2]``."""
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    return Metric(q @ np.diag(rng.uniform(0.5, 2.0, dim)) @ q.T)


def wedge(alpha: Form, beta: Form) -> Form:
    if alpha.dim != beta.dim:
        raise ValueError(f"dimension mismatch: {alpha.dim} vs {beta.dim}")
    dim = alpha.dim
    k = alpha.degree + beta.degree
    if k > dim:
        # clipped: there are no forms above the top degree
        return Form.zero(dim, dim)
    out = np.zeros(comb(dim, k), dtype=complex)
    pos = _position(dim, k)
    for i, left in enumerate(basis(dim, alpha.degree)):
        if alpha.coeffs[i] == 0:
            continue
        for j, right in enumerate(basis(dim, beta.degree)):
            sign = _merge_sign(left, right)
            if sign:
                out[pos[tuple(sorted(left + right))]] += sign * alpha.coeffs[i] * beta.coeffs[j]
    return Form(dim, k, out)


def interior(v, alpha: Form) -> Form:
    """Contraction ``iota_v alpha`` of a vector into the leading slot."""
    v = np.asarray(v)
    if v.shape != (alpha.dim,):
        raise ValueError(f"vector of length {alpha.dim} expected, got shape {v.shape}")
    if alpha.degree == 0:
        return Form.zero(alpha.dim, 0)
    return Form(alpha.dim, alpha.degree - 1, interior_matrix(v, alpha.degree) @ alpha.coeffs)


def sharp(xi, g: Metric) -> np.ndarray:
    """The vector ``xi^g`` with ``xi(v) = g(xi^g, v)`` for all ``v``."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (g.dim,):
        raise ValueError(f"covector of length {g.dim} expected, got shape {xi.shape}")
    return np.linalg.solve(g.matrix, xi)


@lru_cache(maxsize=64)
def _gram_cached(key: bytes, dim: int, k: int) -> np.ndarray:
    ginv = np.linalg.inv(np.frombuffer(key).reshape(dim, dim))
    idx = basis(dim, k)
    gram = np.ones((len(idx), len(idx)))
    if k > 0:
        for a, rows in enumerate(idx):
            for b, cols in enumerate(idx):
                gram[a, b] = np.linalg.det(ginv[np.ix_(rows, cols)])
    gram = 0.5 * (gram + gram.T)
    gram.setflags(write=False)
    return gram


def form_gram(g: Metric, k: int) -> np.ndarray:
    """Gram matrix of degree-``k`` basis forms: minors ``det(g^{-1}[I, J])``."""
    return _gram_cached(np.ascontiguousarray(g.matrix).tobytes(), g.dim, k)


def full_gram(g: Metric) -> np.ndarray:
    """Block-diagonal Gram matrix on the whole exterior algebra."""
    from scipy.linalg import block_diag

    return block_diag(*(form_gram(g, k) for k in range(g.dim + 1)))


def form_metric(g: Metric, alpha: Form, beta: Form) -> complex:
    """Extension of ``g^{-1}`` to forms; conjugate-linear in ``beta``.

    Forms of different degrees are orthogonal.
    """
    if not alpha.dim == beta.dim == g.dim:
        raise ValueError("dimension mismatch between metric and forms")
    if alpha.degree != beta.degree:
        return 0j
    return complex(alpha.coeffs @ form_gram(g, alpha.degree) @ beta.coeffs.conj())


def ext_matrix(xi, k: int) -> np.ndarray:
    """Matrix of ``alpha -> xi ^ alpha`` from degree ``k`` to ``k + 1``.

    Shape ``C(dim, k+1) x C(dim, k)``; empty or zero-sized at the ends of the range.
    """
    xi = np.asarray(xi)
    dim = xi.shape[0]
    src, dst = basis(dim, k), _position(dim, k + 1)
    out = np.zeros((comb(dim, k + 1) if 0 <= k + 1 <= dim else 0, len(src)), dtype=np.result_type(xi, float))
    for col, idx in enumerate(src):
        for a in range(dim):
            if a in idx or xi[a] == 0:
                continue
            # moving dx^a past the indices smaller than a
            sign = -1 if sum(1 for i in idx if i < a) % 2 else 1
            out[dst[tuple(sorted(idx + (a,)))], col] += sign * xi[a]
    return out


def interior_matrix(v, k: int) -> np.ndarray:
    """Matrix of ``iota_v`` from degree ``k`` to ``k - 1``."""
    v = np.asarray(v)
    dim = v.shape[0]
    src, dst = basis(dim, k), _position(dim, k - 1)
    out = np.zeros((comb(dim, k - 1) if 1 <= k <= dim + 1 else 0, len(src)), dtype=np.result_type(v, float))
    for col, idx in enumerate(src):
        for slot, a in enumerate(idx):
            out[dst[idx[:slot] + idx[slot + 1:]], col] += (-1) ** slot * v[a]
    return out


def ext_full(xi) -> np.ndarray:
    """``ext_xi`` on the whole ``2**dim``-dimensional exterior algebra."""
    xi = np.asarray(xi)
    dim = xi.shape[0]
    off = degree_offsets(dim)
    out = np.zeros((off[-1], off[-1]), dtype=np.result_type(xi, float))
    for k in range(dim):
        out[off[k + 1]:off[k + 2], off[k]:off[k + 1]] = ext_matrix(xi, k)
    return out


def interior_full(v) -> np.ndarray:
    v = np.asarray(v)
    dim = v.shape[0]
    off = degree_offsets(dim)
    out = np.zeros((off[-1], off[-1]), dtype=np.result_type(v, float))
    for k in range(1, dim + 1):
        out[off[k - 1]:off[k], off[k]:off[k + 1]] = interior_matrix(v, k)
    return out


def numerical_rank(matrix: np.ndarray, rtol: float = RANK_RTOL, scale: float | None = None) -> int:
    """Count singular values above ``rtol`` times ``scale`` (default: the largest one)."""
    if matrix.size == 0:
        return 0
    s = np.linalg.svd(matrix, compute_uv=False)
    ref = s[0] if scale is None else scale
    if ref == 0:
        return 0
    return int(np.sum(s > rtol * ref))


@dataclass
class CartanReport:
    ranks: tuple[int, ...]
    exact: bool
    complex_defect: float


def cartan_report(xi, g: Metric | None = None, rtol: float = RANK_RTOL) -> CartanReport:
    """Ranks of ``ext_k^xi`` for ``k = 0 .. dim-1`` and the exactness verdict.

    Exactness at degree k holds iff ``rank ext_k + rank ext_{k-1} = C(dim, k)``.
    ``g`` only fixes the scale used to decide whether ``xi`` is zero.
    """
    xi = np.asarray(xi, dtype=float)
    dim = xi.shape[0]
    _check_dim(dim)
    if g is None:
        g = Metric.identity(dim)
    mats = [ext_matrix(xi, k) for k in range(dim + 1)]
    if g.inverse @ xi @ xi == 0:
        ranks = [0] * (dim + 1)
    else:
        ranks = [numerical_rank(m, rtol) for m in mats]
    exact = all(ranks[k] + (ranks[k - 1] if k else 0) == comb(dim, k) for k in range(dim + 1))
    defect = max(
        (np.abs(mats[k + 1] @ mats[k]).max(initial=0.0) for k in range(dim - 1)), default=0.0
    )
    return CartanReport(ranks=tuple(ranks[:dim]), exact=exact, complex_defect=float(defect))
