"""Numbered exit criteria; the terminal summary prints one PASS/FAIL line per criterion."""
import json
import math
import time

import numpy as np
import pytest

from arealaw import bounds
from arealaw.agsp import build_agsp
from arealaw.cli import main
from arealaw.entanglement import schmidt_cut, schmidt_tail, viability
from arealaw.experiments import area_law_scan, strictly_decreasing
from arealaw.linalg import SparseHermitian, dense_oracle
from arealaw.models import ModelSpec, build_hamiltonian
from arealaw.oracle import assemble_dense
from arealaw.spectra import RobustnessExperiment, ground_and_gap, markov_overlap_bound
from arealaw.truncation import assemble_double_prime, restrict_blocks, spectral_truncate

from conftest import random_hermitian

pytestmark = pytest.mark.acceptance


def crit(n, name):
    return pytest.mark.criterion(n, name)


def qn_sites(layout):
    return [x for x, i in enumerate(layout.qn_site) if i is not None]


ORACLE_SPECS = (
    [ModelSpec("U1LGT", N, L) for N in (1, 2, 3) for L in (0, 1, 2, 3)]
    + [ModelSpec("U1LGT", N, L, hopping="raising") for N in (2, 3) for L in (1, 3)]
    + [ModelSpec("SU2LGT", N, L) for N in (1, 2) for L in (0, 0.5, 1)]
    + [ModelSpec("HubbardHolstein", N, L) for N in (1, 2) for L in (0, 1, 2, 3)]
)


@crit(1, "oracle equivalence")
def test_c1_oracle_equivalence():
    t0 = time.perf_counter()
    worst_h = worst_e = 0.0
    for spec in ORACLE_SPECS:
        _, H, _ = build_hamiltonian(spec)
        if H.dim < 2:
            continue
        ref = assemble_dense(spec)
        worst_h = max(worst_h, float(np.abs(ref - H.to_dense()).max()))
        dense = np.linalg.eigvalsh(ref)[:2]
        lanczos = ground_and_gap(H, tol=1e-12, seed=0).energies
        worst_e = max(worst_e, float(np.abs(dense - lanczos).max()))
    elapsed = time.perf_counter() - t0
    print(f"c1: {len(ORACLE_SPECS)} models, max |H - oracle| {worst_h:.2e}, max |eps - dense| {worst_e:.2e}, {elapsed:.1f}s")
    assert worst_h <= 1e-12
    assert worst_e <= 1e-9
    assert elapsed < 60


@crit(2, "mean-abs bounds")
def test_c2_mean_abs_u1():
    t0 = time.perf_counter()
    spec = ModelSpec("U1LGT", 4, 8, {"g_M": 1.0, "g_GM": 1.0, "g_E": 1.0, "lambda_G": 1.0})
    layout, H, _ = build_hamiltonian(spec)
    g = ground_and_gap(H, tol=1e-10)
    bound = bounds.mean_abs_bound_lgt(1.0, 1.0)
    assert bound == 2.0
    measured = [bounds.mean_abs_qn(layout, g.psi0, x) for x in qn_sites(layout)]
    print(f"c2 U1: measured {measured}, bound {bound}")
    assert len(measured) == 3
    assert max(measured) <= bound + 1e-8
    assert time.perf_counter() - t0 < 180


@crit(2, "mean-abs bounds")
def test_c2_mean_abs_hh():
    t0 = time.perf_counter()
    spec = ModelSpec("HubbardHolstein", 3, 8, {"omega0": 1.0, "g": 0.5})
    layout, H, _ = build_hamiltonian(spec)
    g = ground_and_gap(H, tol=1e-10)
    bound = bounds.mean_abs_bound_hh(0.5, 1.0)
    assert bound == pytest.approx(2.6284, abs=1e-4)
    measured = [bounds.mean_abs_qn(layout, g.psi0, x) for x in qn_sites(layout)]
    print(f"c2 HH: measured {measured}, bound {bound}")
    assert len(measured) == 3
    assert max(measured) <= 2.6284 + 1e-8
    assert time.perf_counter() - t0 < 180


@crit(3, "tail decay")
def test_c3_tail_decay_u1():
    t0 = time.perf_counter()
    spec = ModelSpec("U1LGT", 3, 12)
    layout, H, _ = build_hamiltonian(spec)
    g = ground_and_gap(H, tol=1e-11)
    cutoffs = np.arange(1, 11)
    for x in qn_sites(layout):
        tails = bounds.tail_profile(layout, g.psi0, x, cutoffs)
        print(f"c3: link at site {x}, tails {tails}")
        # values at round-off level are not a decay
        assert strictly_decreasing(tails), f"tail at site {x} is not strictly decreasing above 1e-12"
        assert bounds.slope(np.sqrt(cutoffs), np.log(tails)) < 0
    assert time.perf_counter() - t0 < 180


@pytest.fixture(scope="module")
def hh_robustness():
    return RobustnessExperiment(ModelSpec("HubbardHolstein", 3, 5), l=0, s=2, cutoff_ref=5)


T_GRID = [0.5, 1.0, 2.0, 4.0, 8.0, math.inf]


@crit(4, "robustness inequalities")
def test_c4_robustness(hh_robustness):
    t0 = time.perf_counter()
    exp = hh_robustness
    in_regime = 0
    for L in (1, 2, 3, 4, 5):
        reps = [exp.report(L, t) for t in T_GRID]
        for rep in reps:
            assert rep.checks["minmax_eps0"]
            assert not rep.failures, (L, rep.t, rep.failures)
            if rep.hypothesis:
                in_regime += 1
                ratio = rep.delta2 / (1 - rep.delta1**2)
                assert rep.eps[0] <= rep.eps_prime[0] + 1e-10
                assert rep.eps_prime[0] <= rep.eps[0] + 2 * ratio + 1e-10
                assert rep.gap_prime >= rep.gap / 2 - 1e-10
                assert rep.D_prime**2 <= 2 * ratio / rep.gap + 1e-10
        dist = [r.D_between for r in reps]
        print(f"c4: cutoff {L}, delta1 {reps[0].delta1:.3e}, hypothesis {reps[0].hypothesis}, D(t) {dist}")
        assert all(b <= a + 1e-10 for a, b in zip(dist, dist[1:]))
    assert in_regime > 0
    assert time.perf_counter() - t0 < 300


@crit(5, "spectral truncation unit")
def test_c5_spectral_truncation():
    out = spectral_truncate(SparseHermitian.diagonal(np.array([1.0, 2.0, 10.0])), 5.0)
    assert np.array_equal(out.to_dense(), np.diag([1.0, 2.0, 2.0]))


@crit(6, "Markov lemma")
def test_c6_markov():
    rng = np.random.default_rng(6)
    violations = checked = 0
    while checked < 1000:
        n = int(rng.integers(2, 12))
        m = random_hermitian(rng, n, 1.0, bool(rng.integers(2)))
        h = SparseHermitian.from_matrix(m)
        rec = ground_and_gap(h, dense_below=64)
        if rec.degenerate:
            continue
        phi = rng.standard_normal(n) + (1j * rng.standard_normal(n) if np.iscomplexobj(m) else 0)
        phi = phi / np.linalg.norm(phi)
        bound, actual = markov_overlap_bound(h, rec, phi)
        violations += actual < bound - 1e-12
        checked += 1
    assert violations == 0


@crit(7, "AGSP shrinking")
def test_c7_agsp(hh_robustness):
    t0 = time.perf_counter()
    exp = hh_robustness
    n_instances = 0
    for L, t in [(1, 2.0), (1, math.inf), (2, 4.0)]:
        layout, blocks = restrict_blocks(exp.blocks, exp.layout, exp.window(L))
        Hpp, _ = assemble_double_prime(layout, blocks, t)
        rec = ground_and_gap(Hpp, tol=1e-12, dense_below=4000)
        assert rec.gap > 0
        sig = {}
        for deg in (2, 4, 8, 16):
            inst = build_agsp(Hpp, rec, deg)
            assert inst.fixed_point_error <= 1e-10
            assert inst.measured_sigma <= inst.theoretical_sigma_bound + 1e-10
            sig[deg] = inst.measured_sigma
        print(f"c7: dim {Hpp.dim}, gap {rec.gap:.4f}, sigma {sig}")
        for deg in (2, 4, 8):
            assert sig[2 * deg] <= sig[deg] ** 2 + 1e-10
        n_instances += 1
    assert n_instances == 3
    assert time.perf_counter() - t0 < 120


@crit(8, "Schmidt-tail lemma")
def test_c8_schmidt_tail():
    rng = np.random.default_rng(8)
    violations = 0
    for _ in range(200):
        dl, dr = (int(v) for v in rng.integers(2, 9, size=2))
        psi = rng.standard_normal(dl * dr) + 1j * rng.standard_normal(dl * dr)
        psi /= np.linalg.norm(psi)
        V = int(rng.integers(1, dl + 1))
        q, _ = np.linalg.qr(rng.standard_normal((dl, V)) + 1j * rng.standard_normal((dl, V)))
        delta = viability(q, psi, [dl, dr], 1)
        tail = schmidt_tail(schmidt_cut(psi, [dl, dr], 1), V)
        violations += tail > delta + 1e-12
    assert violations == 0


@crit(9, "area-law saturation")
def test_c9_area_law():
    t0 = time.perf_counter()
    cfg = {
        "experiment": "area_law_scan",
        "model": {"family": "U1LGT", "N": 4, "cutoff": 6, "couplings": {"g_M": 1, "g_GM": 1, "g_E": 1, "lambda_G": 1}},
        "grid": {"N": [4, 6, 8], "cutoff": [6]},
    }
    _, rows, inv = area_law_scan(cfg)
    print(f"c9: rows {rows}")
    assert inv["gapped"] and inv["entropy_saturates"]
    assert time.perf_counter() - t0 < 300


AUDITS = [
    ("U1LGT", 3, [1, 2, 3, 4], {}, 0),
    ("SU2LGT", 2, [0.5, 1, 1.5], {}, 0),
    ("HubbardHolstein", 2, [2, 4, 6], {}, 0),
    ("U1LGT", 3, [2, 3], {"rogue_field": 0.5}, 1),
]


@crit(10, "assumption audit")
@pytest.mark.parametrize("family,N,cutoffs,couplings,expected", AUDITS, ids=["u1", "su2", "hh", "rogue"])
def test_c10_audit(tmp_path, family, N, cutoffs, couplings, expected):
    t0 = time.perf_counter()
    cfg = {
        "experiment": "assumption_audit",
        "model": {"family": family, "N": N, "cutoff": cutoffs[-1], "couplings": couplings},
        "grid": {"cutoff": cutoffs},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert main(["audit", "--config", str(path), "--out", str(tmp_path)]) == expected
    summary = json.loads((tmp_path / "assumption_audit.summary.json").read_text())
    rows = (tmp_path / "assumption_audit.csv").read_text().splitlines()
    header, body = rows[0].split(","), [r.split(",") for r in rows[1:]]
    r_col, chi_col = header.index("declared_r"), header.index("chi")
    declared = {float(r[r_col]) for r in body}
    if expected:
        assert summary["invariants"]["split_conditions"] is False
    else:
        assert declared == {0.5 if family == "HubbardHolstein" else 0.0}
        if family == "U1LGT":
            assert summary["invariants"]["chi_within_declared"]
            assert max(float(r[chi_col]) for r in body) <= 2.0 + 1e-10
    assert time.perf_counter() - t0 < 60


DETERMINISM = [
    {
        "experiment": "robustness_scan",
        "model": {"family": "HubbardHolstein", "N": 3, "cutoff": 3},
        "grid": {"cutoff": [1, 2, 3], "t": [1.0, 4.0], "l": 0, "s": [2]},
        "seed": 11,
    },
    {"experiment": "tail_scan", "model": {"family": "HubbardHolstein", "N": 2, "cutoff": 8}, "seed": 5},
    {"experiment": "mean_abs_check", "model": {"family": "U1LGT", "N": 3, "cutoff": 3}, "seed": 2},
    {
        "experiment": "agsp_scan",
        "model": {"family": "HubbardHolstein", "N": 3, "cutoff": 2},
        "grid": {"cutoff": [1], "degree": [2, 4], "l": 0, "s": [2]},
    },
]


@crit(11, "determinism")
@pytest.mark.parametrize("cfg", DETERMINISM, ids=[c["experiment"] for c in DETERMINISM])
def test_c11_determinism(tmp_path, cfg):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    blobs = []
    for i, threads in enumerate((1, 1, 3)):
        out = tmp_path / f"run{i}"
        main(["run", "--config", str(path), "--out", str(out), "--threads", str(threads)])
        blobs.append((out / f"{cfg['experiment']}.csv").read_bytes())
    assert blobs[0] == blobs[1] == blobs[2]
