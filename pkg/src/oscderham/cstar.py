"""The truncated C*-algebra ``A_N = End(H_N)``.

Vectors of ``H_N`` and algebra elements are plain numpy arrays: a vector is a
1-d complex array of length ``N**n_dof`` and an algebra element is a square
complex matrix acting on it. The scalar product is conjugate-linear in the
first slot.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_RTOL = 1e-10


def inner(k: np.ndarray, l: np.ndarray) -> complex:
    """``(k, l)_H``, conjugate-linear in ``k``."""
    return complex(np.vdot(k, l))


def hnorm(k: np.ndarray) -> float:
    return float(np.linalg.norm(k))


def star(a: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(a))


def op_norm(a: np.ndarray) -> float:
    """Operator (spectral) norm, i.e. the largest singular value."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def rank_one(k: np.ndarray, l: np.ndarray) -> np.ndarray:
    """The operator ``m -> (l, m)_H k``."""
    k, l = np.asarray(k), np.asarray(l)
    if k.shape != l.shape:
        raise ValueError(f"dimension mismatch: {k.shape} vs {l.shape}")
    return np.outer(k, l.conj())


def basis_vector(dim: int, j: int) -> np.ndarray:
    e = np.zeros(dim, dtype=complex)
    e[j] = 1.0
    return e


def random_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    return rng.standard_normal(dim) + 1j * rng.standard_normal(dim)


def random_element(rng: np.random.Generator, dim: int) -> np.ndarray:
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(random_element(rng, dim))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def hermitian_defect(a: np.ndarray) -> float:
    return op_norm(a - star(a))


@dataclass(frozen=True)
class PositivityWitness:
    positive: bool
    hermitian_defect: float
    min_eigenvalue: float
    scale: float

    def __bool__(self) -> bool:
        return self.positive


def is_positive(a: np.ndarray, tol: float = 1e-10) -> PositivityWitness:
    """Decide ``a >= 0``: hermitian with spectrum in ``[0, inf)``, both up to ``tol * |a|``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = np.asarray(a)
    scale = op_norm(a)
    defect = hermitian_defect(a)
    lam = float(np.linalg.eigvalsh(0.5 * (a + star(a))).min()) if a.size else 0.0
    ok = defect <= tol * scale and lam >= -tol * scale
    return PositivityWitness(ok, defect, lam, scale)


def hermitian_spectrum(a: np.ndarray, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """Ascending real eigenvalues of a hermitian element."""
    a = np.asarray(a)
    if hermitian_defect(a) > rtol * max(op_norm(a), 1e-300):
        raise ValueError("element is not hermitian")
    return np.linalg.eigvalsh(0.5 * (a + star(a)))
