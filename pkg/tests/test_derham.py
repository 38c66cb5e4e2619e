from itertools import product
from math import comb

import numpy as np
import pytest

from oscderham import cstar
from oscderham.derham import (
    ConnectionSpec,
    FourierSection,
    TorusModel,
    assemble,
    cohomology_rank,
    complex_defect,
    curvature_norm,
    d_nabla,
    d_nabla_blocks,
    exterior_derivative,
    harmonic_rank,
    laplacian,
    random_unit_covectors,
    rep_twist_unchecked,
    section_a_product,
    sobolev_gram,
    sobolev_norm,
    symbol_report,
)
from oscderham.exterior import ext_matrix, random_metric
from oscderham.hilbert import ModuleElement, a_product
from oscderham.oscillator import SpElement, ladder_matrices, sl2_triple

TWO_PI = 2 * np.pi
LAD2 = ladder_matrices(1, 2)
TRIVIAL = ConnectionSpec()


def model2(m=2):
    return TorusModel(2, m)


def unit_section(model, k, h, mode, idx, vec):
    c = np.zeros((len(model.modes), comb(model.dim, k), h), dtype=complex)
    c[model.mode_index(mode), idx] = vec
    return FourierSection(k, c)


def test_torus_model_validation():
    m = model2(1)
    assert len(m.modes) == 9
    assert m.section_dim(1, 2) == 9 * 2 * 2
    assert m.mode_index([0, 0]) == 4
    with pytest.raises(KeyError):
        m.mode_index([2, 0])
    with pytest.raises(ValueError):
        TorusModel(3, 1)
    with pytest.raises(ValueError):
        TorusModel(2, -1)


def test_exterior_derivative_examples():
    m = model2(1)
    d0 = exterior_derivative(0, m)
    const = np.zeros(9, dtype=complex)
    const[m.mode_index([0, 0])] = 1
    assert not (d0 @ const).any()
    wave = np.zeros(9, dtype=complex)
    wave[m.mode_index([1, 0])] = 1
    want = np.zeros(18, dtype=complex)
    want[2 * m.mode_index([1, 0]) + 0] = TWO_PI * 1j  # coefficient of dx^1
    assert np.allclose(d0 @ wave, want)
    assert np.allclose(exterior_derivative(1, m) @ d0, 0)
    assert np.array_equal(d_nabla(0, TRIVIAL, m, LAD2), exterior_derivative(0, m, h_dim=2))


def test_line_twist_single_mode_coefficients():
    c = (0.3, -1.1)
    m = model2(1)
    blocks = d_nabla_blocks(0, ConnectionSpec("line_twist", c=c), m, LAD2)
    mode = np.array([1, -1])
    blk = blocks[m.mode_index(mode)]
    want = sum(np.kron(ext_matrix(np.eye(2)[a], 0), (TWO_PI * 1j * mode[a] + 1j * c[a]) * np.eye(2)) for a in range(2))
    assert np.allclose(blk, want)


def test_curvature_norm():
    lad = ladder_matrices(1, 8)
    assert curvature_norm(TRIVIAL, lad) == 0.0
    g = SpElement.random(np.random.default_rng(0), 2)
    flat = ConnectionSpec("rep_twist", gammas=(g, SpElement(2 * g.matrix)))
    assert curvature_norm(flat, lad) < 1e-10
    h, e, _ = sl2_triple()
    assert curvature_norm(rep_twist_unchecked((h, e)), lad) > 0.1
    with pytest.raises(ValueError):
        ConnectionSpec("rep_twist", gammas=(h, e))
    with pytest.raises(ValueError):
        ConnectionSpec("bogus")


def flat_specs(rng, dim):
    g = SpElement.random(rng, dim)
    gammas = tuple(SpElement(w * g.matrix) for w in rng.standard_normal(dim))
    return [
        TRIVIAL,
        ConnectionSpec("line_twist", c=rng.standard_normal(dim)),
        ConnectionSpec("rep_twist", gammas=gammas),
    ]


@pytest.mark.parametrize("dim,m,n", [(2, 2, 4), (4, 1, 3)])
def test_complex_property_for_flat_specs(rng, dim, m, n):
    lad = ladder_matrices(dim // 2, n)
    for spec in flat_specs(rng, dim):
        assert complex_defect(spec, TorusModel(dim, m), lad) < 1e-10


def test_non_flat_spec_breaks_complex_property():
    h, e, _ = sl2_triple()
    assert complex_defect(rep_twist_unchecked((h, e)), model2(1), ladder_matrices(1, 6)) > 0.1


def test_section_a_product(rng):
    m = model2(1)
    k, l = cstar.random_vector(rng, 2), cstar.random_vector(rng, 2)
    s = unit_section(m, 1, 2, [1, 0], 0, k)
    t = unit_section(m, 1, 2, [1, 0], 0, l)
    u = ModuleElement.homogeneous(2, (0,), k)
    v = ModuleElement.homogeneous(2, (0,), l)
    assert np.allclose(section_a_product(s, t, m), a_product(u, v, m.metric))
    far = unit_section(m, 1, 2, [0, 1], 0, l)
    assert not section_a_product(s, far, m).any()
    r = FourierSection.random(rng, m, 1, 2)
    assert cstar.is_positive(section_a_product(r, r, m))
    with pytest.raises(ValueError):
        section_a_product(r, FourierSection.random(rng, m, 2, 2), m)


def test_section_a_product_disjoint_modes(rng):
    m = model2(2)
    mask = m.modes[:, 0] > 0
    s = FourierSection.random(rng, m, 1, 2, mode_mask=mask)
    t = FourierSection.random(rng, m, 1, 2, mode_mask=~mask)
    assert not section_a_product(s, t, m).any()


def test_sobolev_gram(rng):
    m = model2(1)
    assert np.array_equal(sobolev_gram(0, 1, m, 2), np.eye(m.section_dim(1, 2)))
    g1 = sobolev_gram(1, 0, m, 1)
    assert g1[m.mode_index([1, 0]), m.mode_index([1, 0])] == pytest.approx(1 + 4 * np.pi**2)
    s = FourierSection.random(rng, m, 1, 2)
    norms = [sobolev_norm(s, t, m) for t in range(4)]
    assert all(a <= b for a, b in zip(norms, norms[1:]))
    # t = 0 is the trace of the section A-product
    assert norms[0] ** 2 == pytest.approx(np.trace(section_a_product(s, s, m)).real)


def test_trivial_laplacian_spectrum_k0():
    m = model2(2)
    n = 2
    vals = np.sort(np.linalg.eigvalsh(laplacian(0, TRIVIAL, m, LAD2)))
    want = np.sort(np.repeat([4 * np.pi**2 * (a * a + b * b) for a, b in product(range(-2, 3), repeat=2)], n))
    assert np.allclose(vals, want)


def test_laplacian_properties(rng):
    m = model2(1)
    lad = ladder_matrices(1, 3)
    for spec in flat_specs(rng, 2):
        asm = assemble(spec, m, lad, t=1)
        for k in range(3):
            assert asm.hermitian_defect(k) < 1e-10
            assert asm.spectrum(k).min() > -1e-10
    asm = assemble(TRIVIAL, m, lad)
    a = cstar.random_element(rng, 3)
    for k in range(3):
        act = np.kron(np.eye(comb(2, k)), a)
        for block in asm.laplacians[k]:
            assert np.allclose(block @ act, act @ block)


def test_weighted_adjoint_defining_equation(rng):
    m = model2(1)
    asm = assemble(ConnectionSpec("line_twist", c=(0.4, 0.9)), m, LAD2, t=2)
    w0, w1 = sobolev_gram(2, 0, m, 2), sobolev_gram(2, 1, m, 2)
    d, d_adj = asm.matrix("d", 0), asm.matrix("adjoint", 0)
    x = cstar.random_vector(rng, d.shape[1])
    y = cstar.random_vector(rng, d.shape[0])
    assert np.vdot(d @ x, w1 @ y) == pytest.approx(np.vdot(x, w0 @ (d_adj @ y)), rel=1e-10)
    with pytest.raises(KeyError):
        asm.matrix("laplacian", 3)
    with pytest.raises(KeyError):
        asm.matrix("curvature", 0)


def full_rank_cohomology(spec, model, lad):
    """Rank-nullity on the assembled full matrices."""
    out = []
    for k in range(model.dim + 1):
        dk = d_nabla(k, spec, model, lad)
        rk = np.linalg.matrix_rank(dk) if dk.size else 0
        prev = np.linalg.matrix_rank(d_nabla(k - 1, spec, model, lad)) if k else 0
        out.append(int(model.section_dim(k, lad.h_dim) - rk - prev))
    return out


@pytest.mark.parametrize("m", [1, 2, 3])
def test_trivial_torus_betti_numbers(m):
    model = model2(m)
    asm = assemble(TRIVIAL, model, LAD2)
    harm = [harmonic_rank(k, asm) for k in range(3)]
    assert [h.a_rank for h in harm] == [1, 2, 1]
    assert [h.dimension for h in harm] == [cohomology_rank(k, TRIVIAL, model, LAD2) for k in range(3)]
    assert [h.dimension for h in harm] == full_rank_cohomology(TRIVIAL, model, LAD2)
    assert all(h.spectral_gap == pytest.approx(4 * np.pi**2, abs=1e-6) for h in harm)
    assert not any(h.indeterminate for h in harm)


def test_cohomology_rank_examples():
    model = model2(2)
    assert cohomology_rank(1, TRIVIAL, model, LAD2) == 2 * 2
    assert cohomology_rank(3, TRIVIAL, model, LAD2) == 0
    assert cohomology_rank(-1, TRIVIAL, model, LAD2) == 0


def test_four_torus_betti_numbers():
    model = TorusModel(4, 1)
    lad = ladder_matrices(2, 2)
    asm = assemble(TRIVIAL, model, lad)
    assert [harmonic_rank(k, asm).a_rank for k in range(5)] == [1, 4, 6, 4, 1]
    assert [cohomology_rank(k, TRIVIAL, model, lad) for k in range(5)] == [4 * comb(4, k) for k in range(5)]


@pytest.mark.parametrize(
    "c,ranks",
    [((np.pi, np.pi), [0, 0, 0]), ((TWO_PI, 0.0), [1, 2, 1]), ((0.0, -TWO_PI), [1, 2, 1])],
)
def test_line_twist_harmonics(c, ranks):
    spec = ConnectionSpec("line_twist", c=c)
    for m in (1, 2):
        model = model2(m)
        asm = assemble(spec, model, LAD2)
        harm = [harmonic_rank(k, asm) for k in range(3)]
        assert [h.a_rank for h in harm] == ranks
        assert [h.dimension for h in harm] == full_rank_cohomology(spec, model, LAD2)


def test_rep_twist_a_rank_not_reported(rng):
    g = SpElement.random(rng, 2)
    spec = ConnectionSpec("rep_twist", gammas=(g, SpElement(0.5 * g.matrix)))
    model, lad = model2(1), ladder_matrices(1, 4)
    asm = assemble(spec, model, lad)
    harm = [harmonic_rank(k, asm) for k in range(3)]
    assert all(h.a_rank is None for h in harm)
    assert [h.dimension for h in harm] == [cohomology_rank(k, spec, model, lad) for k in range(3)]


def test_symbol_report_all_variants(rng):
    model, lad = model2(1), ladder_matrices(1, 3)
    xis = list(random_unit_covectors(rng, 2, 100)) + [np.zeros(2)]
    for spec in flat_specs(rng, 2):
        rep = symbol_report(spec, model, lad, xis)
        assert rep.elliptic
        assert not rep.samples[-1].exact and not rep.samples[-1].nonzero
        for name in ("adjoint_defect", "extraction_defect", "complex_defect"):
            assert rep.max_defect(name) < 1e-10


def test_symbol_report_with_metric(rng):
    model = TorusModel(4, 1, random_metric(rng, 4))
    lad = ladder_matrices(2, 2)
    rep = symbol_report(TRIVIAL, model, lad, random_unit_covectors(rng, 4, 10))
    assert rep.elliptic and rep.max_defect("adjoint_defect") < 1e-10


def test_symbol_report_only_zero_is_not_elliptic():
    rep = symbol_report(TRIVIAL, model2(1), LAD2, [np.zeros(2)])
    assert not rep.elliptic
