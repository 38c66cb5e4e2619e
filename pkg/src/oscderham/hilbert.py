"""The truncated higher oscillatory module ``C_N = Lambda V* (x) H_N`` over ``A_N``.

A module element stores one ``H_N`` vector per basis form of the full exterior
algebra, as a ``(2**dim, h_dim)`` array ``C`` (row ``I`` is the coefficient of
``dx^I``). In that layout the A-product of ``u`` and ``v`` is
``C_u.T @ G @ conj(C_v)`` with ``G`` the block-diagonal form Gram matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import cstar
from .exterior import Metric, full_basis, full_gram, interior_full, ext_full, sharp

SVD_RTOL = 1e-8


@dataclass(frozen=True)
class ModuleElement:
    dim: int
    components: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.components, dtype=complex)
        if c.ndim != 2 or c.shape[0] != 2 ** self.dim:
            raise ValueError(f"components must have shape (2**{self.dim}, h_dim), got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "components", c)

    @property
    def h_dim(self) -> int:
        return self.components.shape[1]

    @classmethod
    def zero(cls, dim: int, h_dim: int) -> ModuleElement:
        return cls(dim, np.zeros((2 ** dim, h_dim), dtype=complex))

    @classmethod
    def homogeneous(cls, dim: int, indices, k: np.ndarray) -> ModuleElement:
        """``dx^I (x) k``."""
        k = np.asarray(k, dtype=complex)
        c = np.zeros((2 ** dim, k.shape[0]), dtype=complex)
        c[full_basis(dim).index(tuple(indices))] = k
        return cls(dim, c)

    @classmethod
    def random(cls, rng: np.random.Generator, dim: int, h_dim: int) -> ModuleElement:
        shape = (2 ** dim, h_dim)
        return cls(dim, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))

    def _compatible(self, other: ModuleElement) -> None:
        if (self.dim, self.h_dim) != (other.dim, other.h_dim):
            raise ValueError("module elements have different dimensions")

    def __add__(self, other: ModuleElement) -> ModuleElement:
        self._compatible(other)
        return ModuleElement(self.dim, self.components + other.components)

    def __sub__(self, other: ModuleElement) -> ModuleElement:
        self._compatible(other)
        return ModuleElement(self.dim, self.components - other.components)

    def __rmul__(self, scalar: complex) -> ModuleElement:
        return ModuleElement(self.dim, scalar * self.components)


def a_action(a: np.ndarray, u: ModuleElement) -> ModuleElement:
    """``a.(alpha (x) k) = alpha (x) a(k)`` on every component."""
    a = np.asarray(a)
    if a.shape != (u.h_dim, u.h_dim):
        raise ValueError(f"algebra element of shape {a.shape} cannot act on h_dim {u.h_dim}")
    return ModuleElement(u.dim, u.components @ a.T)


def a_product(u: ModuleElement, v: ModuleElement, g: Metric) -> np.ndarray:
    """``sum_{I,J} g(U_I, U_J) c_I(u) (x) c_J(v)*``."""
    u._compatible(v)
    if g.dim != u.dim:
        raise ValueError("metric dimension does not match the module")
    return u.components.T @ full_gram(g) @ v.components.conj()


def module_norm(u: ModuleElement, g: Metric) -> float:
    return float(np.sqrt(cstar.op_norm(a_product(u, u, g))))


def _rel(diff: np.ndarray, *refs: np.ndarray) -> float:
    scale = max((np.linalg.norm(r) for r in refs), default=0.0)
    num = float(np.linalg.norm(diff))
    return num / scale if scale > 0 else num


AXIOMS = (
    "left_A_compatibility",
    "right_A_compatibility",
    "scalar_linearity",
    "hermitian_symmetry",
    "positivity",
    "nondegeneracy",
)


def axiom_suite(seed: int, samples: int, g: Metric, h_dim: int) -> dict[str, float]:
    """Max relative residual of each A-product identity over random samples.

    Identities checked (those the explicit product satisfies):
    ``(a.u, v) = a (u, v)``, ``(u, a.v) = (u, v) a*``, ``(r u, v) = r (u, v)``,
    ``(u, v)* = (v, u)``, ``(u, u) >= 0`` and the lower bound
    ``tr (u, u) >= lambda_min(G) |u|^2`` which forces ``(u, u) = 0 => u = 0``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    dim = g.dim
    lam_min = float(np.linalg.eigvalsh(full_gram(g)).min())
    worst = dict.fromkeys(AXIOMS, 0.0)
    for _ in range(samples):
        u = ModuleElement.random(rng, dim, h_dim)
        v = ModuleElement.random(rng, dim, h_dim)
        a = cstar.random_element(rng, h_dim)
        r = complex(rng.standard_normal(), rng.standard_normal())
        uv = a_product(u, v, g)
        uu = a_product(u, u, g)

        lhs = a_product(a_action(a, u), v, g)
        worst["left_A_compatibility"] = max(worst["left_A_compatibility"], _rel(lhs - a @ uv, lhs, a @ uv))
        lhs = a_product(u, a_action(a, v), g)
        rhs = uv @ cstar.star(a)
        worst["right_A_compatibility"] = max(worst["right_A_compatibility"], _rel(lhs - rhs, lhs, rhs))
        lhs = a_product(r * u, v, g)
        worst["scalar_linearity"] = max(worst["scalar_linearity"], _rel(lhs - r * uv, lhs, r * uv))
        rhs = a_product(v, u, g)
        worst["hermitian_symmetry"] = max(
            worst["hermitian_symmetry"], _rel(cstar.star(uv) - rhs, uv, rhs)
        )
        w = cstar.is_positive(uu)
        pos_res = max(w.hermitian_defect, -w.min_eigenvalue, 0.0) / w.scale if w.scale else 0.0
        worst["positivity"] = max(worst["positivity"], pos_res)
        bound = lam_min * float(np.sum(np.abs(u.components) ** 2))
        worst["nondegeneracy"] = max(worst["nondegeneracy"], max(0.0, 1.0 - np.trace(uu).real / bound))

    zero = ModuleElement.zero(dim, h_dim)
    worst["nondegeneracy"] = max(worst["nondegeneracy"], float(np.abs(a_product(zero, zero, g)).max()))
    return worst


def generators(dim: int, h_dim: int) -> list[ModuleElement]:
    """The ``2**dim`` elements ``dx^I (x) e_0``."""
    e0 = cstar.basis_vector(h_dim, 0)
    return [ModuleElement.homogeneous(dim, idx, e0) for idx in full_basis(dim)]


def generation_solve(u: ModuleElement, g: Metric | None = None) -> tuple[list[np.ndarray], float]:
    """Coefficients ``a_I = c_I(u) (x) e_0*`` with ``sum_I a_I.(dx^I (x) e_0) = u``.

    Returns the coefficients and the module-norm residual of the reconstruction.
    """
    g = g or Metric.identity(u.dim)
    e0 = cstar.basis_vector(u.h_dim, 0)
    coeffs = [cstar.rank_one(c, e0) for c in u.components]
    total = ModuleElement.zero(u.dim, u.h_dim)
    for a, gen in zip(coeffs, generators(u.dim, u.h_dim)):
        total = total + a_action(a, gen)
    return coeffs, module_norm(total - u, g)


@dataclass(frozen=True)
class ModuleMorphism:
    """A morphism ``B (x) Id_H`` acting only on the form coordinate."""

    form_part: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.array(self.form_part, dtype=complex)
        n = b.shape[0]
        if b.ndim != 2 or b.shape[1] != n or n & (n - 1) or n < 2:
            raise ValueError(f"form part must be 2**dim square, got shape {b.shape}")
        b.setflags(write=False)
        object.__setattr__(self, "form_part", b)

    @property
    def dim(self) -> int:
        return self.form_part.shape[0].bit_length() - 1

    def __call__(self, u: ModuleElement) -> ModuleElement:
        return ModuleElement(u.dim, self.form_part @ u.components)

    @classmethod
    def ext(cls, xi) -> ModuleMorphism:
        return cls(ext_full(np.asarray(xi, dtype=float)))

    @classmethod
    def interior(cls, v) -> ModuleMorphism:
        return cls(interior_full(np.asarray(v, dtype=float)))


def morphism_adjoint(b: ModuleMorphism, g: Metric) -> ModuleMorphism:
    """The A-product adjoint ``G^{-1} B^H G`` of the form part."""
    gram = full_gram(g)
    return ModuleMorphism(np.linalg.solve(gram, b.form_part.conj().T @ gram))


def adjoint_defect(b: ModuleMorphism, b_star: ModuleMorphism, g: Metric, rng, samples: int = 5) -> float:
    """Max relative violation of ``(Bu, v) = (u, B* v)`` on random elements."""
    h_dim = 3
    worst = 0.0
    for _ in range(samples):
        u = ModuleElement.random(rng, b.dim, h_dim)
        v = ModuleElement.random(rng, b.dim, h_dim)
        lhs, rhs = a_product(b(u), v, g), a_product(u, b_star(v), g)
        scale = module_norm(u, g) * module_norm(v, g) * max(cstar.op_norm(b.form_part), 1.0)
        worst = max(worst, float(np.linalg.norm(lhs - rhs)) / scale)
    return worst


@dataclass
class SplitReport:
    """Outcome of decomposing the module as ``Ker B (+) Im B*``.

    Bases are columns in form coordinates, orthonormal for the form Gram.
    """

    kernel_basis: np.ndarray
    image_basis: np.ndarray
    residual: float
    orthogonality_defect: float
    image_defect: float
    kernel_defect: float
    tol: float

    @property
    def dims(self) -> tuple[int, int]:
        return self.kernel_basis.shape[1], self.image_basis.shape[1]

    @property
    def orthogonal(self) -> bool:
        return self.orthogonality_defect <= self.tol

    @property
    def passed(self) -> bool:
        return (
            sum(self.dims) == self.kernel_basis.shape[0]
            and max(self.residual, self.orthogonality_defect, self.image_defect, self.kernel_defect)
            <= self.tol
        )


def mishchenko_split(
    b: ModuleMorphism,
    g: Metric,
    tol: float = 1e-10,
    seed: int = 0,
    samples: int = 10,
    h_dim: int = 3,
) -> SplitReport:
    """Split the module along ``Ker B`` and ``Im B*``.

    Works in coordinates ``y = W x`` with ``W = G^{1/2}`` where the form Gram is
    the standard inner product, takes an SVD there, and maps the singular
    subspaces back. Random elements are projected on both summands to measure
    reconstruction and A-orthogonality.
    """
    gram = full_gram(g)
    lam, q = np.linalg.eigh(gram)
    w = (q * np.sqrt(lam)) @ q.T
    w_inv = (q / np.sqrt(lam)) @ q.T
    bt = w @ b.form_part @ w_inv
    _, s, vh = np.linalg.svd(bt)
    cut = SVD_RTOL * s[0] if s.size and s[0] > 0 else np.inf
    rank = int(np.sum(s > cut))
    v = vh.conj().T
    # columns of W^{-1} V are Gram-orthonormal: (W^{-1}V)^H G (W^{-1}V) = I
    image_basis = w_inv @ v[:, :rank]
    kernel_basis = w_inv @ v[:, rank:]

    # projections in x-coordinates: P = B_sub B_sub^H G
    p_ker = kernel_basis @ kernel_basis.conj().T @ gram
    p_img = image_basis @ image_basis.conj().T @ gram

    rng = np.random.default_rng(seed)
    residual = orth = 0.0
    for _ in range(samples):
        u = ModuleElement.random(rng, b.dim, h_dim)
        u_ker = ModuleElement(u.dim, p_ker @ u.components)
        u_img = ModuleElement(u.dim, p_img @ u.components)
        w_img = ModuleElement(u.dim, p_img @ ModuleElement.random(rng, b.dim, h_dim).components)
        residual = max(residual, module_norm(u - (u_ker + u_img), g) / module_norm(u, g))
        denom = module_norm(u, g) * max(module_norm(w_img, g), 1e-300)
        orth = max(orth, cstar.op_norm(a_product(u_ker, w_img, g)) / denom)

    # the adjoint's columns must live in the image summand, and B must kill the kernel
    b_star = morphism_adjoint(b, g).form_part
    scale = max(np.linalg.norm(b_star), 1e-300)
    image_defect = float(np.linalg.norm(b_star - p_img @ b_star)) / scale
    kernel_defect = (
        float(np.linalg.norm(b.form_part @ kernel_basis)) / max(np.linalg.norm(b.form_part), 1e-300)
        if kernel_basis.size
        else 0.0
    )
    return SplitReport(kernel_basis, image_basis, residual, orth, image_defect, kernel_defect, tol)


def random_morphism(rng: np.random.Generator, dim: int, rank: int | None = None) -> ModuleMorphism:
    """Random form-part morphism, optionally of prescribed rank."""
    n = 2 ** dim
    if rank is None:
        rank = n
    left = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    right = rng.standard_normal((rank, n)) + 1j * rng.standard_normal((rank, n))
    return ModuleMorphism(left @ right)


def ext_adjoint_is_interior(xi, g: Metric) -> float:
    """Relative gap between the A-adjoint of ``ext_xi (x) Id`` and ``iota_{xi^g} (x) Id``."""
    b = ModuleMorphism.ext(xi)
    expected = ModuleMorphism.interior(sharp(xi, g)).form_part
    got = morphism_adjoint(b, g).form_part
    return float(np.linalg.norm(got - expected) / max(np.linalg.norm(expected), 1e-300))
