"""De Rham complex on the flat torus ``R^{2n} / Z^{2n}`` twisted by ``H_N``.

A degree-k section is a Fourier series ``sum_m e^{2 pi i m.x} sum_I dx^I (x) c_{m,I}``
truncated to ``|m|_inf <= M``; coordinates are ordered (mode, form index,
Hermite index). Connections have constant coefficients
``nabla = d + sum_a dx^a (x) A_a`` so every operator is block-diagonal over
modes, with mode block

    d_k^nabla(m) = sum_a ext_{dx^a} (x) (2 pi i m_a + A_a).

The torus volume is 1, so Fourier modes are orthonormal.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.linalg import block_diag

from . import cstar
from .exterior import Metric, ext_matrix, form_gram, interior_matrix, numerical_rank, sharp
from .hilbert import ModuleMorphism, a_product, ModuleElement, morphism_adjoint
from .oscillator import LadderSet, SpElement, compress, quantize, symplectic_matrix

TWO_PI = 2.0 * np.pi
FLAT_TOL = 1e-12
KERNEL_RTOL = 1e-8


@dataclass(frozen=True)
class TorusModel:
    dim: int
    fourier_cutoff: int
    metric: Metric = None
    symplectic: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.dim <= 0 or self.dim % 2:
            raise ValueError(f"torus dimension must be positive and even, got {self.dim}")
        if self.fourier_cutoff < 0:
            raise ValueError("Fourier cutoff must be >= 0")
        if self.metric is None:
            object.__setattr__(self, "metric", Metric.identity(self.dim))
        if self.metric.dim != self.dim:
            raise ValueError("metric dimension does not match the torus")
        j = symplectic_matrix(self.dim // 2) if self.symplectic is None else np.asarray(self.symplectic, float)
        if np.abs(j + j.T).max() > 0 or abs(np.linalg.det(j)) < 1e-12:
            raise ValueError("symplectic matrix must be antisymmetric and nondegenerate")
        object.__setattr__(self, "symplectic", j)

    @property
    def modes(self) -> np.ndarray:
        """All integer modes with ``|m|_inf <= M`` in lexicographic order."""
        r = range(-self.fourier_cutoff, self.fourier_cutoff + 1)
        return np.array(list(itertools.product(r, repeat=self.dim)), dtype=int).reshape(-1, self.dim)

    def mode_index(self, m) -> int:
        m = np.asarray(m)
        if np.abs(m).max(initial=0) > self.fourier_cutoff:
            raise KeyError(f"mode {tuple(m)} outside the truncation")
        width = 2 * self.fourier_cutoff + 1
        return int(np.ravel_multi_index(tuple(m + self.fourier_cutoff), (width,) * self.dim))

    def section_dim(self, k: int, h_dim: int) -> int:
        return len(self.modes) * comb(self.dim, k) * h_dim


@dataclass(frozen=True)
class ConnectionSpec:
    """Constant connection: ``trivial``, ``line_twist`` (``A_a = i c_a``) or ``rep_twist`` (``A_a = rho'(Gamma_a)``)."""

    variant: str = "trivial"
    c: tuple[float, ...] | None = None
    gammas: tuple[SpElement, ...] | None = None

    def __post_init__(self):
        if self.variant == "trivial":
            return
        if self.variant == "line_twist":
            if self.c is None:
                raise ValueError("line_twist needs the vector c")
            object.__setattr__(self, "c", tuple(float(x) for x in self.c))
        elif self.variant == "rep_twist":
            if not self.gammas:
                raise ValueError("rep_twist needs sp elements Gamma_a")
            gammas = tuple(g if isinstance(g, SpElement) else SpElement(g) for g in self.gammas)
            for g1, g2 in itertools.combinations(gammas, 2):
                comm = g1.matrix @ g2.matrix - g2.matrix @ g1.matrix
                if np.abs(comm).max() > FLAT_TOL * max(1.0, np.abs(g1.matrix).max() * np.abs(g2.matrix).max()):
                    raise ValueError("rep_twist generators must commute for a flat connection")
            object.__setattr__(self, "gammas", gammas)
        else:
            raise ValueError(f"unknown connection variant {self.variant!r}")

    @property
    def is_a_linear(self) -> bool:
        """Whether the connection term commutes with the fiberwise A-action."""
        return self.variant != "rep_twist"

    def check_dim(self, dim: int) -> None:
        if self.variant == "line_twist" and len(self.c) != dim:
            raise ValueError(f"line_twist c has {len(self.c)} components, torus has {dim}")
        if self.variant == "rep_twist" and (len(self.gammas) != dim or any(g.dim != dim for g in self.gammas)):
            raise ValueError(f"rep_twist needs {dim} elements of sp({dim})")

    def potentials(self, ladders: LadderSet, dim: int) -> list[np.ndarray]:
        """Connection coefficients ``A_a`` as ``h_dim x h_dim`` matrices."""
        self.check_dim(dim)
        h = ladders.h_dim
        if self.variant == "trivial":
            return [np.zeros((h, h), dtype=complex) for _ in range(dim)]
        if self.variant == "line_twist":
            return [1j * c * np.eye(h) for c in self.c]
        return [quantize(g, ladders) for g in self.gammas]


def rep_twist_unchecked(gammas) -> ConnectionSpec:
    """Build a rep_twist spec without the flatness check, for curvature probes."""
    spec = object.__new__(ConnectionSpec)
    object.__setattr__(spec, "variant", "rep_twist")
    object.__setattr__(spec, "c", None)
    object.__setattr__(spec, "gammas", tuple(gammas))
    return spec


def curvature_norm(spec: ConnectionSpec, ladders: LadderSet) -> float:
    """``max_{a<b} |[A_a, A_b]|`` on the interior block (constant connection forms)."""
    if spec.variant != "rep_twist":
        return 0.0
    pots = [quantize(g, ladders) for g in spec.gammas]
    return max(
        (cstar.op_norm(compress(a @ b - b @ a, ladders)) for a, b in itertools.combinations(pots, 2)),
        default=0.0,
    )


@dataclass
class FourierSection:
    degree: int
    coeffs: np.ndarray = field(repr=False)  # shape (n_modes, C(dim, degree), h_dim)

    @classmethod
    def random(cls, rng, model: TorusModel, k: int, h_dim: int, mode_mask=None) -> FourierSection:
        shape = (len(model.modes), comb(model.dim, k), h_dim)
        c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        if mode_mask is not None:
            c[~np.asarray(mode_mask)] = 0
        return cls(k, c)

    @property
    def vector(self) -> np.ndarray:
        return self.coeffs.reshape(-1)


def _binom(dim: int, k: int) -> int:
    return comb(dim, k) if 0 <= k <= dim else 0


def _mode_block(k: int, m: np.ndarray, pots: list[np.ndarray], dim: int) -> np.ndarray:
    h = pots[0].shape[0]
    out = np.zeros((_binom(dim, k + 1) * h, _binom(dim, k) * h), dtype=complex)
    if k < 0 or k >= dim:
        return out
    e = np.eye(dim)
    for a in range(dim):
        out += np.kron(ext_matrix(e[a], k), TWO_PI * 1j * m[a] * np.eye(h) + pots[a])
    return out


def exterior_derivative(k: int, model: TorusModel, h_dim: int = 1) -> np.ndarray:
    """Untwisted ``d_k`` as a full block-diagonal matrix."""
    return d_nabla(k, ConnectionSpec(), model, _trivial_ladders(h_dim))


def _trivial_ladders(h_dim: int) -> LadderSet:
    # a bare identity fiber of arbitrary size for the untwisted operator
    eye = np.eye(h_dim, dtype=complex)
    return LadderSet(1, h_dim, (eye,), (eye,))


def d_nabla_blocks(k: int, spec: ConnectionSpec, model: TorusModel, ladders: LadderSet) -> list[np.ndarray]:
    pots = spec.potentials(ladders, model.dim)
    return [_mode_block(k, m, pots, model.dim) for m in model.modes]


def d_nabla(k: int, spec: ConnectionSpec, model: TorusModel, ladders: LadderSet) -> np.ndarray:
    if not 0 <= k <= model.dim:
        raise ValueError(f"degree {k} outside [0, {model.dim}]")
    return block_diag(*d_nabla_blocks(k, spec, model, ladders))


def section_a_product(s: FourierSection, t: FourierSection, model: TorusModel) -> np.ndarray:
    """``sum_m sum_{I,J} g(dx^I, dx^J) c_{m,I}(s) (x) c_{m,J}(t)*``."""
    if s.degree != t.degree or s.coeffs.shape != t.coeffs.shape:
        raise ValueError("sections differ in degree or truncation")
    gram = form_gram(model.metric, s.degree)
    return np.einsum("mih,ij,mjl->hl", s.coeffs, gram, t.coeffs.conj())


def sobolev_weights(t: int, model: TorusModel) -> np.ndarray:
    """Per-mode weights ``(1 + 4 pi^2 |m|^2)^t``."""
    m2 = (model.modes.astype(float) ** 2).sum(axis=1)
    return (1.0 + TWO_PI**2 * m2) ** t


def sobolev_gram(t: int, k: int, model: TorusModel, h_dim: int) -> np.ndarray:
    """Gram matrix of the order-``t`` Sobolev product on degree-``k`` sections."""
    fiber = np.kron(form_gram(model.metric, k), np.eye(h_dim))
    return np.kron(np.diag(sobolev_weights(t, model)), fiber)


def sobolev_norm(s: FourierSection, t: int, model: TorusModel) -> float:
    h = s.coeffs.shape[2]
    v = s.vector
    return float(np.sqrt(np.real(v.conj() @ sobolev_gram(t, s.degree, model, h) @ v)))


def _fiber_gram(model: TorusModel, k: int, h_dim: int) -> np.ndarray:
    if not 0 <= k <= model.dim:
        return np.zeros((0, 0))
    return np.kron(form_gram(model.metric, k), np.eye(h_dim))


@dataclass
class ComplexAssembly:
    """Per-mode blocks of ``d_k``, their Gram adjoints and the Laplacians ``Delta_k``."""

    model: TorusModel
    spec: ConnectionSpec
    ladders: LadderSet
    sobolev_index: int
    d: dict[int, list[np.ndarray]] = field(repr=False)
    d_adj: dict[int, list[np.ndarray]] = field(repr=False)
    laplacians: dict[int, list[np.ndarray]] = field(repr=False)
    _spectra: dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    def matrix(self, kind: str, k: int) -> np.ndarray:
        table = {"d": self.d, "adjoint": self.d_adj, "laplacian": self.laplacians}
        if kind not in table:
            raise KeyError(f"unknown assembly matrix {kind!r}")
        if k not in table[kind]:
            raise KeyError(f"{kind} of degree {k} was not assembled")
        return block_diag(*table[kind][k])

    def spectrum(self, k: int) -> np.ndarray:
        """Real eigenvalues of ``Delta_k``, ascending."""
        if k in self._spectra:
            return self._spectra[k]
        fiber = _fiber_gram(self.model, k, self.ladders.h_dim)
        lam, q = np.linalg.eigh(fiber)
        half, half_inv = (q * np.sqrt(lam)) @ q.T, (q / np.sqrt(lam)) @ q.T
        vals = []
        for block in self.laplacians[k]:
            sym = half @ block @ half_inv
            vals.append(np.linalg.eigvalsh(0.5 * (sym + sym.conj().T)))
        self._spectra[k] = np.sort(np.concatenate(vals))
        return self._spectra[k]

    def hermitian_defect(self, k: int) -> float:
        """Relative non-hermiticity of ``W Delta_k`` under the Gram form."""
        w = sobolev_weights(self.sobolev_index, self.model)
        fiber = _fiber_gram(self.model, k, self.ladders.h_dim)
        worst = 0.0
        for wm, block in zip(w, self.laplacians[k]):
            wl = wm * fiber @ block
            scale = max(np.linalg.norm(wl), 1e-300)
            worst = max(worst, float(np.linalg.norm(wl - wl.conj().T)) / scale)
        return worst


def _threads() -> int:
    import os

    try:
        return max(1, int(os.environ.get("OSCDERHAM_THREADS", "1")))
    except ValueError:
        return 1


def assemble(spec: ConnectionSpec, model: TorusModel, ladders: LadderSet, t: int = 0) -> ComplexAssembly:
    """Assemble ``d_k``, ``d_k^*`` and ``Delta_k`` for ``k = 0 .. dim``.

    Adjoints are taken for the order-``t`` Sobolev Gram form, mode by mode:
    ``d^*(m) = W_k(m)^{-1} d(m)^H W_{k+1}(m)``.
    """
    dim, h = model.dim, ladders.h_dim
    weights = sobolev_weights(t, model)

    def degree(k):
        return k, d_nabla_blocks(k, spec, model, ladders)

    with ThreadPoolExecutor(_threads()) as pool:
        d = dict(pool.map(degree, range(-1, dim + 1)))
    d_adj = {}
    for k in range(-1, dim + 1):
        src, dst = _fiber_gram(model, k, h), _fiber_gram(model, k + 1, h)
        blocks = []
        for wm, blk in zip(weights, d[k]):
            if blk.size == 0:
                blocks.append(blk.conj().T.copy())
            else:
                blocks.append(np.linalg.solve(wm * src, blk.conj().T @ (wm * dst)))
        d_adj[k] = blocks
    lap = {
        k: [d[k - 1][i] @ d_adj[k - 1][i] + d_adj[k][i] @ d[k][i] for i in range(len(weights))]
        for k in range(dim + 1)
    }
    d = {k: v for k, v in d.items() if 0 <= k <= dim}
    d_adj = {k: v for k, v in d_adj.items() if 0 <= k <= dim}
    return ComplexAssembly(model, spec, ladders, t, d, d_adj, lap)


def laplacian(k: int, spec: ConnectionSpec, model: TorusModel, ladders: LadderSet, t: int = 0) -> np.ndarray:
    return assemble(spec, model, ladders, t).matrix("laplacian", k)


def complex_defect(spec: ConnectionSpec, model: TorusModel, ladders: LadderSet) -> float:
    """``max_k |d_{k+1} d_k|`` over mode blocks."""
    worst = 0.0
    for k in range(model.dim - 1):
        for b0, b1 in zip(d_nabla_blocks(k, spec, model, ladders), d_nabla_blocks(k + 1, spec, model, ladders)):
            worst = max(worst, cstar.op_norm(b1 @ b0))
    return worst


@dataclass
class HarmonicReport:
    degree: int
    dimension: int
    a_rank: int | None
    product_form: bool
    spectral_gap: float | None
    indeterminate: bool
    threshold: float


def _kernel_count(vals: np.ndarray, threshold: float) -> int:
    return int(np.sum(vals < threshold))


def harmonic_rank(
    k: int,
    assembly: ComplexAssembly,
    rtol: float = KERNEL_RTOL,
    seed: int = 0,
) -> HarmonicReport:
    """Dimension of ``ker Delta_k``, its A-rank and the spectral gap above it.

    The threshold is ``rtol`` times the largest eigenvalue over all degrees;
    counts must agree at ``10 x`` and ``0.1 x`` the threshold or the result is
    flagged indeterminate. The A-rank is reported only when the harmonic
    projector commutes with ``Id (x) a`` for a random ``a``.
    """
    model, h = assembly.model, assembly.ladders.h_dim
    top = max(float(np.abs(assembly.spectrum(j)).max(initial=0.0)) for j in range(model.dim + 1))
    threshold = rtol * top if top > 0 else 1e-12
    vals = assembly.spectrum(k)
    count = _kernel_count(vals, threshold)
    indeterminate = not (_kernel_count(vals, 10 * threshold) == count == _kernel_count(vals, threshold / 10))
    above = vals[vals >= threshold]
    gap = float(above.min()) if above.size else None

    product_form = assembly.spec.is_a_linear and count % h == 0
    if product_form and count:
        rng = np.random.default_rng(seed)
        a = cstar.random_element(rng, h)
        act = np.kron(np.eye(comb(model.dim, k)), a)
        fiber = _fiber_gram(model, k, h)
        lam, q = np.linalg.eigh(fiber)
        half, half_inv = (q * np.sqrt(lam)) @ q.T, (q / np.sqrt(lam)) @ q.T
        for block in assembly.laplacians[k]:
            sym = half @ block @ half_inv
            w, v = np.linalg.eigh(0.5 * (sym + sym.conj().T))
            basis_k = half_inv @ v[:, w < threshold]
            if basis_k.shape[1] == 0:
                continue
            # projector onto the harmonic block (Gram-orthogonal)
            proj = basis_k @ basis_k.conj().T @ fiber
            if cstar.op_norm(proj @ act - act @ proj) > 1e-8 * cstar.op_norm(act):
                product_form = False
                break
    a_rank = count // h if product_form else None
    return HarmonicReport(k, count, a_rank, product_form, gap, indeterminate, threshold)


def cohomology_rank(k: int, spec: ConnectionSpec, model: TorusModel, ladders: LadderSet, rtol: float = KERNEL_RTOL) -> int:
    """``dim ker d_k - rank d_{k-1}`` by numerical rank, mode block by mode block."""
    if not 0 <= k <= model.dim:
        return 0
    blocks = {j: d_nabla_blocks(j, spec, model, ladders) for j in (k - 1, k)}
    scale = max(
        (cstar.op_norm(b) for j in (k - 1, k) for b in blocks[j] if b.size),
        default=0.0,
    )
    if scale == 0.0:
        return model.section_dim(k, ladders.h_dim)
    rank_k = sum(numerical_rank(b, rtol, scale) for b in blocks[k])
    rank_prev = sum(numerical_rank(b, rtol, scale) for b in blocks[k - 1])
    return model.section_dim(k, ladders.h_dim) - rank_k - rank_prev


@dataclass
class SymbolSample:
    xi: tuple[float, ...]
    nonzero: bool
    exact: bool
    complex_defect: float
    adjoint_defect: float
    extraction_defect: float


@dataclass
class SymbolReport:
    samples: list[SymbolSample]

    @property
    def elliptic(self) -> bool:
        """All samples off the zero section are exact."""
        used = [s for s in self.samples if s.nonzero]
        return bool(used) and all(s.exact for s in used)

    def max_defect(self, name: str) -> float:
        return max((getattr(s, name) for s in self.samples if s.nonzero), default=0.0)


def extracted_symbol_coefficients(k: int, spec: ConnectionSpec, model: TorusModel, ladders: LadderSet) -> list[np.ndarray]:
    """Coefficient of ``m_a`` in the assembled mode blocks, divided by ``2 pi i``.

    Uses finite differences between the blocks at ``m = 0`` and ``m = e_a``;
    the connection part is mode independent and drops out.
    """
    if model.fourier_cutoff < 1:
        raise ValueError("symbol extraction needs Fourier cutoff >= 1")
    blocks = d_nabla_blocks(k, spec, model, ladders)
    zero = blocks[model.mode_index(np.zeros(model.dim, dtype=int))]
    return [
        (blocks[model.mode_index(np.eye(model.dim, dtype=int)[a])] - zero) / (TWO_PI * 1j)
        for a in range(model.dim)
    ]


def symbol_report(spec: ConnectionSpec, model: TorusModel, ladders: LadderSet, xi_samples) -> SymbolReport:
    """Check ``sigma_k(xi) = ext_xi (x) Id`` and its exactness for each sample covector.

    Per sample: complex property, the exactness rank law, the A-adjoint equal to
    ``iota_{xi^g} (x) Id``, and agreement with the symbol extracted from the
    assembled operator. Zero covectors are flagged and kept out of the verdict.
    """
    dim, h, g = model.dim, ladders.h_dim, model.metric
    eye_h = np.eye(h)
    extracted = {k: extracted_symbol_coefficients(k, spec, model, ladders) for k in range(dim)}
    out = []
    for xi in xi_samples:
        xi = np.asarray(xi, dtype=float)
        nonzero = bool(np.any(xi != 0))
        sig = [np.kron(ext_matrix(xi, k), eye_h) for k in range(-1, dim + 1)]  # sig[k+1] is sigma_k
        ranks = [numerical_rank(s) if nonzero else 0 for s in sig]
        exact = nonzero and all(
            ranks[k + 1] + ranks[k] == comb(dim, k) * h for k in range(dim + 1)
        )
        cdef = max((cstar.op_norm(sig[k + 2] @ sig[k + 1]) for k in range(dim - 1)), default=0.0)
        norm_xi = max(float(np.linalg.norm(xi)), 1e-300)

        # A-adjoint of sigma on the full fiber; degree blocks assemble the full algebra
        b = ModuleMorphism.ext(xi)
        adj = morphism_adjoint(b, g).form_part
        want = ModuleMorphism.interior(sharp(xi, g)).form_part
        adef = float(np.linalg.norm(adj - want)) / norm_xi
        rng = np.random.default_rng(0)
        u = ModuleElement.random(rng, dim, h)
        v = ModuleElement.random(rng, dim, h)
        lhs = a_product(ModuleMorphism(b.form_part)(u), v, g)
        rhs = a_product(u, ModuleMorphism(want)(v), g)
        adef = max(adef, float(np.linalg.norm(lhs - rhs)) / (norm_xi * float(np.linalg.norm(u.components) * np.linalg.norm(v.components))))

        edef = 0.0
        for k in range(dim):
            got = sum(xi[a] * extracted[k][a] for a in range(dim))
            edef = max(edef, float(np.abs(got - sig[k + 1]).max()) / norm_xi)
        out.append(SymbolSample(tuple(float(x) for x in xi), nonzero, exact, cdef, adef, edef))
    return SymbolReport(out)


def random_unit_covectors(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    xs = rng.standard_normal((count, dim))
    return xs / np.linalg.norm(xs, axis=1, keepdims=True)


def interior_symbol(xi, k: int, g: Metric, h_dim: int) -> np.ndarray:
    """``iota_{xi^g} (x) Id`` from degree ``k + 1`` to ``k``."""
    return np.kron(interior_matrix(sharp(xi, g), k + 1), np.eye(h_dim))
