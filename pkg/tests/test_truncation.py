import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arealaw.errors import ContractError
from arealaw.linalg import SparseHermitian
from arealaw.models import HUBBARD_HOLSTEIN, U1_LGT, ModelSpec, build_hamiltonian, truncated_norm
from arealaw.truncation import (
    Window,
    assemble_blocks,
    assemble_double_prime,
    double_prime_blocks,
    parameter_schedule,
    restrict,
    restrict_blocks,
    spectral_truncate,
    split_blocks,
    truncation_errors,
    window_projector,
)

from conftest import random_hermitian, sh


def rank(p):
    return int(np.real(p.diag()).sum())


def test_window_projector_identity_at_reference():
    layout, _, _ = build_hamiltonian(ModelSpec(U1_LGT, 3, 3))
    p = window_projector(layout, Window(0, 2, 3, 3))
    assert rank(p) == layout.dim


def test_window_projector_single_site_rank():
    layout, _, _ = build_hamiltonian(ModelSpec(HUBBARD_HOLSTEIN, 3, 4))
    p = window_projector(layout, Window(0, 1, 2, 4))
    assert rank(p) == layout.dim // 5 * 3


def test_window_projector_two_links():
    layout, _, _ = build_hamiltonian(ModelSpec(U1_LGT, 4, 2))
    p = window_projector(layout, Window(0, 2, 1, 2))
    assert rank(p) == 9 * 2**4 * 5
    d = p.to_dense()
    assert np.array_equal(d @ d, d)


def test_window_validation():
    with pytest.raises(ContractError):
        Window(0, 0, 1, 2)
    with pytest.raises(ContractError):
        Window(0, 1, 3, 2)
    layout, _, _ = build_hamiltonian(ModelSpec(U1_LGT, 3, 1))
    with pytest.raises(ContractError):
        window_projector(layout, Window(1, 2, 1, 1))


def test_restrict_examples():
    p = SparseHermitian.diagonal([1.0, 0.0, 1.0])
    h, kept = restrict(SparseHermitian.diagonal([1.0, 2.0, 3.0]), p)
    assert np.allclose(h.to_dense(), np.diag([1.0, 3.0]))
    assert kept.tolist() == [0, 2]
    h, _ = restrict(SparseHermitian.identity(3), p)
    assert np.allclose(h.to_dense(), np.eye(2))
    with pytest.raises(ContractError):
        restrict(SparseHermitian.identity(3), SparseHermitian.zeros(3))


def test_restrict_is_variational(rng):
    for _ in range(20):
        n = 40
        m = random_hermitian(rng, n, density=0.2)
        keep = rng.random(n) < 0.6
        keep[0] = True
        h, _ = restrict(sh(m), SparseHermitian.diagonal(keep.astype(float)))
        assert np.linalg.eigvalsh(m)[0] <= np.linalg.eigvalsh(h.to_dense())[0] + 1e-12


def test_spectral_truncate_diag():
    out = spectral_truncate(SparseHermitian.diagonal([1.0, 2.0, 10.0]), 5.0)
    assert np.array_equal(out.to_dense(), np.diag([1.0, 2.0, 2.0]))


def test_spectral_truncate_above_max_is_identity_map(rng):
    a = sh(random_hermitian(rng, 10))
    assert np.array_equal(spectral_truncate(a, 100.0).to_dense(), a.to_dense())


def test_spectral_truncate_empty_window_flag():
    out, empty = spectral_truncate(SparseHermitian.diagonal([3.0, 4.0]), 1.0, return_flag=True)
    assert empty and out.upper.nnz == 0


def test_spectral_truncate_random(rng):
    m = random_hermitian(rng, 30)
    w = np.linalg.eigvalsh(m)
    t = float(np.median(w))
    out = spectral_truncate(sh(m), t).to_dense()
    assert np.abs(out @ m - m @ out).max() < 1e-10
    wt = np.linalg.eigvalsh(out)
    kept = w[w <= t]
    cap = np.abs(kept).max()
    assert np.allclose(np.sort(wt), np.sort(np.concatenate([kept, np.full((w > t).sum(), cap)])), atol=1e-11)
    assert np.abs(wt).max() == pytest.approx(cap)


@pytest.fixture(scope="module")
def hh_chain():
    spec = ModelSpec(HUBBARD_HOLSTEIN, 3, 2)
    layout, H, terms = build_hamiltonian(spec)
    return layout, H, terms


def test_blocks_are_psd_and_sum_to_shifted_h(hh_chain):
    layout, H, terms = hh_chain
    blocks = split_blocks(layout, terms, Window(0, 2, 2, 2))
    assert blocks.names == ("H_L", "H_1", "H_2", "H_R")
    for t in blocks.terms:
        assert np.linalg.eigvalsh(t.op.to_dense())[0] >= -1e-10
    total = assemble_blocks(layout, blocks)
    diff = (total - H).to_dense() - sum(blocks.shifts) * np.eye(H.dim)
    assert np.abs(diff).max() < 1e-12


def test_restricted_blocks_equal_restricted_matrix(hh_chain):
    layout, _, terms = hh_chain
    w = Window(0, 2, 1, 2)
    blocks = split_blocks(layout, terms, w)
    H = assemble_blocks(layout, blocks)
    hp, _ = restrict(H, window_projector(layout, w))
    new_layout, rb = restrict_blocks(blocks, layout, w)
    assert np.abs((assemble_blocks(new_layout, rb) - hp).full()).max() == 0.0


def test_double_prime_large_t_is_identity(hh_chain):
    layout, _, terms = hh_chain
    w = Window(0, 2, 1, 2)
    new_layout, rb = restrict_blocks(split_blocks(layout, terms, w), layout, w)
    hp = assemble_blocks(new_layout, rb)
    hpp, flags = assemble_double_prime(new_layout, rb, 1e6)
    assert flags == (False, False)
    assert np.abs((hpp - hp).full()).max() < 1e-10
    pieces, _ = double_prime_blocks(new_layout, rb, 1e6)
    assert len(pieces) == 2  # s = 2 leaves no middle block


def test_double_prime_ground_energy_monotone_in_t(hh_chain):
    layout, _, terms = hh_chain
    w = Window(0, 2, 1, 2)
    new_layout, rb = restrict_blocks(split_blocks(layout, terms, w), layout, w)
    e_prime = np.linalg.eigvalsh(assemble_blocks(new_layout, rb).to_dense())[0]
    es = []
    for t in (0.5, 1, 2, 4, 8, 16, 64):
        hpp, _ = assemble_double_prime(new_layout, rb, t)
        es.append(np.linalg.eigvalsh(hpp.to_dense())[0])
    assert all(b >= a - 1e-10 for a, b in zip(es, es[1:]))
    assert es[-1] == pytest.approx(e_prime, abs=1e-9)
    assert all(e <= e_prime + 1e-10 for e in es)


def test_truncation_errors_trivial_cases():
    h = SparseHermitian.diagonal([0.0, 1.0, 2.0])
    psi = np.array([1.0, 0.0, 0.0])
    assert truncation_errors(h, psi, SparseHermitian.diagonal([1.0, 1.0, 0.0])) == (0.0, 0.0)
    d1, _ = truncation_errors(h, psi, SparseHermitian.diagonal([0.0, 1.0, 1.0]))
    assert d1 == 1.0


def test_delta1_monotone_in_window_cutoff(hh_chain):
    layout, H, _ = hh_chain
    psi = np.linalg.eigh(H.to_dense())[1][:, 0]
    d1s = [truncation_errors(H, psi, window_projector(layout, Window(0, 2, L, 2)))[0] for L in range(3)]
    assert all(b <= a for a, b in zip(d1s, d1s[1:]))
    assert d1s[-1] == 0.0


def test_schedule_example():
    L, t = parameter_schedule(1.0, 4, 0.1, 0.0, 1.0, lambda L: 2.0)
    assert 2 + math.log(40) ** 2 == pytest.approx(15.6078, abs=1e-4)
    assert L == 16
    assert t == pytest.approx(max(2 * math.log(10), 4.0))


def test_schedule_zero_mean_threshold():
    L, _ = parameter_schedule(2.0, 4, 0.1, 0.0, 0.0, lambda L: 1.0)
    assert L == math.ceil(math.log(40) ** 2 / 2)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 0.5), st.floats(0.5, 0.99), st.sampled_from([0.0, 0.5]))
def test_schedule_monotone_in_delta(d_small, ratio, r):
    norm = lambda L: 1.0 + L**2  # noqa: E731
    a = parameter_schedule(1.0, 3, d_small, r, 1.0, norm)
    b = parameter_schedule(1.0, 3, d_small * ratio, r, 1.0, norm)
    assert b[0] >= a[0] and b[1] >= a[1]


def test_schedule_grid_exhausted():
    with pytest.raises(ContractError):
        parameter_schedule(1.0, 4, 0.1, 0.0, 1.0, lambda L: 1.0, grid=range(5))


def test_schedule_with_measured_norm():
    spec = ModelSpec(U1_LGT, 3, 1)
    L, t = parameter_schedule(2.0, 2, 0.5, 0.0, 0.1, lambda L: truncated_norm(spec, L), grid=range(0, 6))
    assert L >= 1 and t > 0
