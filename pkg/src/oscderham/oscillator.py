"""Infinitesimal oscillator (Segal-Shale-Weil) representation on Hermite-truncated H_N.

Phase-space coordinates are ordered ``z = (q_1..q_n, p_1..p_n)`` and the
symplectic form is ``omega(u, v) = u^T J v`` with ``J = [[0, I], [-I, 0]]``.
An element ``S`` of sp(2n) acts by

    rho'(S) = -(i/2) Op_Weyl(omega(S z, z)),

with ``Op_Weyl`` the symmetric ordering in ``X_a`` and ``P_a = -i D_a``. With this
sign ``[rho'(S1), rho'(S2)] = rho'([S1, S2])`` and ``rho'(J)`` has eigenvalues
``-i (j + 1/2)`` for the one-mode oscillator.

Quadratic operators move Hermite indices by at most two, so identities hold
exactly only on the interior block: indices ``<= N - 3`` in every mode.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .cstar import op_norm, star

SP_ATOL = 1e-12


def symplectic_matrix(n_dof: int) -> np.ndarray:
    eye = np.eye(n_dof)
    zero = np.zeros((n_dof, n_dof))
    return np.block([[zero, eye], [-eye, zero]])


@dataclass(frozen=True)
class SpElement:
    """Real ``2n x 2n`` matrix with ``S^T J + J S = 0``."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        s = np.array(self.matrix, dtype=float)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
            raise ValueError(f"sp element must be an even square matrix, got {s.shape}")
        j = symplectic_matrix(s.shape[0] // 2)
        scale = max(1.0, np.abs(s).max())
        if np.abs(s.T @ j + j @ s).max() > SP_ATOL * scale:
            raise ValueError("matrix is not in sp(2n): S^T J + J S != 0")
        s.setflags(write=False)
        object.__setattr__(self, "matrix", s)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def bracket(self, other: SpElement) -> SpElement:
        return SpElement(self.matrix @ other.matrix - other.matrix @ self.matrix)

    @classmethod
    def from_hamiltonian(cls, q: np.ndarray) -> SpElement:
        """``S = J Q`` for symmetric ``Q``; every sp element arises this way."""
        q = np.asarray(q, dtype=float)
        return cls(symplectic_matrix(q.shape[0] // 2) @ (0.5 * (q + q.T)))

    @classmethod
    def random(cls, rng: np.random.Generator, dim: int) -> SpElement:
        return cls.from_hamiltonian(rng.standard_normal((dim, dim)))


def sl2_triple() -> tuple[SpElement, SpElement, SpElement]:
    """``(H, E, F)`` in sp(2) = sl(2): ``[H, E] = 2E, [H, F] = -2F, [E, F] = H``."""
    return (
        SpElement(np.diag([1.0, -1.0])),
        SpElement(np.array([[0.0, 1.0], [0.0, 0.0]])),
        SpElement(np.array([[0.0, 0.0], [1.0, 0.0]])),
    )


@dataclass(frozen=True)
class LadderSet:
    """Position and derivative matrices for each mode, placed in the tensor product."""

    n_dof: int
    cutoff: int
    position: tuple[np.ndarray, ...] = field(repr=False)
    derivative: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def h_dim(self) -> int:
        return self.cutoff ** self.n_dof

    @property
    def momentum(self) -> tuple[np.ndarray, ...]:
        return tuple(-1j * d for d in self.derivative)

    def hermite_indices(self) -> np.ndarray:
        """``(h_dim, n_dof)`` array of per-mode Hermite indices, row-major."""
        grids = np.indices((self.cutoff,) * self.n_dof).reshape(self.n_dof, -1)
        return grids.T

    def interior(self, margin: int = 2) -> np.ndarray:
        """Basis positions whose indices are all ``<= cutoff - 1 - margin``."""
        return np.flatnonzero((self.hermite_indices() <= self.cutoff - 1 - margin).all(axis=1))


def _place(op: np.ndarray, slot: int, n_dof: int) -> np.ndarray:
    eye = np.eye(op.shape[0])
    return reduce(np.kron, [op if i == slot else eye for i in range(n_dof)])


def ladder_matrices(n_dof: int, cutoff: int) -> LadderSet:
    """``X h_j = sqrt((j+1)/2) h_{j+1} + sqrt(j/2) h_{j-1}`` and ``D = (a - a^dag)/sqrt 2``."""
    if cutoff < 2:
        raise ValueError("Hermite cutoff must be >= 2")
    if n_dof < 1:
        raise ValueError("need at least one degree of freedom")
    lower = np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1)  # a h_j = sqrt(j) h_{j-1}
    x = (lower + lower.T) / np.sqrt(2.0)
    d = (lower - lower.T) / np.sqrt(2.0)
    return LadderSet(
        n_dof,
        cutoff,
        tuple(_place(x, a, n_dof).astype(complex) for a in range(n_dof)),
        tuple(_place(d, a, n_dof).astype(complex) for a in range(n_dof)),
    )


def quantize(s: SpElement, ladders: LadderSet) -> np.ndarray:
    if s.dim != 2 * ladders.n_dof:
        raise ValueError(f"sp({s.dim}) element does not match {ladders.n_dof} modes")
    q = s.matrix.T @ symplectic_matrix(ladders.n_dof)
    q = 0.5 * (q + q.T)
    z = ladders.position + ladders.momentum
    op = np.zeros((ladders.h_dim, ladders.h_dim), dtype=complex)
    for a in range(s.dim):
        for b in range(s.dim):
            if q[a, b] != 0:
                op += q[a, b] * 0.5 * (z[a] @ z[b] + z[b] @ z[a])
    return -0.5j * op


def compress(op: np.ndarray, ladders: LadderSet, margin: int = 2) -> np.ndarray:
    idx = ladders.interior(margin)
    return op[np.ix_(idx, idx)]


def skew_defect(s: SpElement, ladders: LadderSet) -> float:
    rho = quantize(s, ladders)
    return op_norm(compress(rho + star(rho), ladders))


def commutator_defect(s1: SpElement, s2: SpElement, ladders: LadderSet) -> float:
    """``|[rho'(S1), rho'(S2)] - rho'([S1, S2])|`` on the interior block."""
    if s1.dim != s2.dim:
        raise ValueError("sp elements of different dimension")
    r1, r2 = quantize(s1, ladders), quantize(s2, ladders)
    return op_norm(compress(r1 @ r2 - r2 @ r1 - quantize(s1.bracket(s2), ladders), ladders))


def parity_projectors(ladders: LadderSet) -> tuple[np.ndarray, np.ndarray]:
    """Projectors onto even and odd total Hermite degree."""
    even = (ladders.hermite_indices().sum(axis=1) % 2 == 0).astype(complex)
    return np.diag(even), np.diag(1.0 - even)


def parity_defect(s: SpElement, ladders: LadderSet) -> float:
    """Interior-block size of ``[rho'(S), P_even]`` and of the even/odd cross blocks."""
    rho = quantize(s, ladders)
    p_even, p_odd = parity_projectors(ladders)
    comm = compress(rho @ p_even - p_even @ rho, ladders)
    cross = compress(p_even @ rho @ p_odd + p_odd @ rho @ p_even, ladders)
    return max(op_norm(comm), op_norm(cross))


def number_spectrum_defect(ladders: LadderSet) -> float:
    """Distance of ``rho'(J)`` on the interior block from ``-i (sum_a j_a + n/2)``."""
    rho = quantize(SpElement(symplectic_matrix(ladders.n_dof)), ladders)
    idx = ladders.interior()
    expected = -1j * (ladders.hermite_indices()[idx].sum(axis=1) + 0.5 * ladders.n_dof)
    return op_norm(compress(rho, ladders) - np.diag(expected))


def coherent_state(ladders: LadderSet, amplitude: float = 1.0) -> np.ndarray:
    """Truncated product coherent state ``exp(-|a|^2/2) a^j / sqrt(j!)`` in every mode."""
    from scipy.special import gammaln

    j = np.arange(ladders.cutoff)
    one = np.exp(-0.5 * amplitude**2 + j * np.log(amplitude) - 0.5 * gammaln(j + 1))
    return reduce(np.kron, [one] * ladders.n_dof).astype(complex)


def defect_curve(s1: SpElement, s2: SpElement, cutoffs, amplitude: float = 1.0) -> list[tuple[int, float]]:
    """Homomorphism defect applied to a coherent state, for growing cutoffs.

    Only the truncation edge contributes, and the state's weight there shrinks
    as the cutoff grows.
    """
    out = []
    for n in cutoffs:
        lad = ladder_matrices(s1.dim // 2, n)
        r1, r2 = quantize(s1, lad), quantize(s2, lad)
        psi = coherent_state(lad, amplitude)
        err = (r1 @ r2 - r2 @ r1 - quantize(s1.bracket(s2), lad)) @ psi
        out.append((n, float(np.linalg.norm(err))))
    return out
