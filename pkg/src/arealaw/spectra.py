"""Ground states, gaps and the robustness of the ground space under truncation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError
from .linalg import SparseHermitian, dense_oracle, lanczos_extremal
from .models import ModelSpec, build_hamiltonian
from .truncation import (
    Blocks,
    Window,
    assemble_blocks,
    assemble_double_prime,
    embed,
    restrict_blocks,
    split_blocks,
    truncation_errors,
    window_projector,
)

DEGENERACY_TOL = 1e-8
SLACK = 1e-10
# below this size a full eigendecomposition beats Lanczos and gives exact residuals
DENSE_BELOW = 1500


class InvariantViolation(AssertionError):
    pass


@dataclass(frozen=True)
class GroundRecord:
    energies: np.ndarray  # eps_0, eps_1
    psi0: np.ndarray
    gap: float
    residuals: np.ndarray
    degenerate: bool
    method: str

    @property
    def eps0(self) -> float:
        return float(self.energies[0])

    @property
    def eps1(self) -> float:
        return float(self.energies[1])


def ground_and_gap(h: SparseHermitian, tol: float = 1e-9, seed: int = 0, dense_below: int = 0) -> GroundRecord:
    """Two lowest eigenpairs; the gap is ``eps_1 - eps_0``.

    A gap under 1e-8 is flagged as degenerate (the first excited level is
    still the next eigenvalue, degenerate or not).  Matrices with at most
    ``dense_below`` rows go through the dense oracle instead of Lanczos.
    """
    if h.dim < 2:
        raise ContractError("need dimension >= 2 for a gap")
    if h.dim <= dense_below:
        s = dense_oracle(h)
        vals, vecs, res, method = s.eigenvalues[:2], s.eigenvectors[:, :2], s.residuals[:2], "dense"
    else:
        s = lanczos_extremal(h, 2, tol=tol, seed=seed)
        vals, vecs, res, method = s.eigenvalues, s.eigenvectors, s.residuals, "lanczos"
    gap = float(vals[1] - vals[0])
    return GroundRecord(np.asarray(vals, float), vecs[:, 0], gap, np.asarray(res), gap < DEGENERACY_TOL, method)


def markov_overlap_bound(h: SparseHermitian, record: GroundRecord, phi: np.ndarray):
    """``(bound, actual)`` with bound ``(eps_1 - <phi|H|phi>) / gap`` and actual ``|<phi|psi_0>|^2``."""
    if record.gap <= 0 or record.degenerate:
        raise ContractError("the overlap bound needs a unique ground state")
    if abs(np.linalg.norm(phi) - 1) > 1e-10:
        raise ContractError("phi must be normalized")
    energy = h.expectation(phi)
    bound = (record.eps1 - energy) / record.gap
    actual = float(abs(np.vdot(phi, record.psi0)) ** 2)
    return float(bound), actual


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``sqrt(1 - |<a|b>|^2)`` for unit vectors, computed as the norm of b's part orthogonal to a."""
    ov = np.vdot(a, b)
    return float(np.linalg.norm(b - a * ov))


@dataclass
class TruncationReport:
    cutoff_in: float
    t: float
    delta1: float
    delta2: float
    eps: tuple  # (eps0, eps1) at the reference cutoff
    eps_prime: tuple
    eps_double_prime: tuple
    gap: float
    gap_prime: float
    gap_double_prime: float
    D_prime: float  # D(psi0, psi0')
    D_double_prime: float  # D(psi0, psi0'')
    D_between: float  # D(psi0', psi0'')
    hypothesis: bool  # delta2 / (1 - delta1^2) <= gap / 4
    strong_hypothesis: bool  # the stricter gap / 18 threshold, recorded only
    checks: dict = field(default_factory=dict)
    empty_boundary: tuple = (False, False)

    @property
    def flag(self) -> str:
        if any(self.empty_boundary):
            return "empty-spectral-window"
        return "" if self.hypothesis else "outside-lemma-regime"

    @property
    def failures(self) -> list:
        return [k for k, ok in self.checks.items() if not ok]

    def check(self) -> None:
        if self.failures:
            raise InvariantViolation(f"truncation invariants failed at cutoff {self.cutoff_in}: {self.failures}")

    def row(self) -> dict:
        return {
            "cutoff_in": self.cutoff_in,
            "t": self.t,
            "delta1": self.delta1,
            "delta2": self.delta2,
            "eps0": self.eps[0],
            "eps0_prime": self.eps_prime[0],
            "eps0_double_prime": self.eps_double_prime[0],
            "gap": self.gap,
            "gap_prime": self.gap_prime,
            "gap_double_prime": self.gap_double_prime,
            "D_prime": self.D_prime,
            "D_double_prime": self.D_double_prime,
            "D_between": self.D_between,
            "hypothesis": self.hypothesis,
            "strong_hypothesis": self.strong_hypothesis,
            "gap_ratio_double_prime": self.gap_double_prime / self.gap,
        }


class RobustnessExperiment:
    """Reference ground state at ``window.cutoff_ref`` reused across truncations.

    ``spec.cutoff`` is ignored; every site outside the window sits at the
    reference cutoff.
    """

    def __init__(self, spec: ModelSpec, l: int, s: int, cutoff_ref, tol: float = 1e-10, seed: int = 0):
        self.spec = spec.with_cutoff(cutoff_ref)
        self.l, self.s, self.cutoff_ref = l, s, cutoff_ref
        self.tol, self.seed = tol, seed
        self.layout, _, terms = build_hamiltonian(self.spec)
        probe = Window(l, s, cutoff_ref, cutoff_ref)
        self.blocks: Blocks = split_blocks(self.layout, terms, probe)
        self.H = assemble_blocks(self.layout, self.blocks)
        self.ground = ground_and_gap(self.H, tol=tol, seed=seed, dense_below=DENSE_BELOW)

    def window(self, cutoff_in) -> Window:
        return Window(self.l, self.s, cutoff_in, self.cutoff_ref)

    def report(self, cutoff_in, t: float = math.inf, strict: bool = False) -> TruncationReport:
        w = self.window(cutoff_in)
        g = self.ground
        P = window_projector(self.layout, w)
        d1, d2 = truncation_errors(self.H, g.psi0, P)
        new_layout, rblocks = restrict_blocks(self.blocks, self.layout, w)
        Hp = assemble_blocks(new_layout, rblocks)
        kept = np.flatnonzero(np.real(P.diag()) > 0.5)
        gp = ground_and_gap(Hp, tol=self.tol, seed=self.seed, dense_below=DENSE_BELOW)
        Hpp, flags = assemble_double_prime(new_layout, rblocks, t)
        gpp = ground_and_gap(Hpp, tol=self.tol, seed=self.seed, dense_below=DENSE_BELOW)
        psi_p = embed(gp.psi0, kept, self.H.dim)
        psi_pp = embed(gpp.psi0, kept, self.H.dim)
        Dp = trace_distance(g.psi0, psi_p)
        Dpp = trace_distance(g.psi0, psi_pp)
        ratio = d2 / (1 - d1**2) if d1 < 1 else math.inf
        # a degenerate reference has no unique ground state; nothing is asserted then
        hyp = not g.degenerate and ratio <= g.gap / 4
        checks = {
            # min-max holds for every cutoff
            "minmax_eps0": g.energies[0] <= gp.energies[0] + SLACK,
            "minmax_eps1": g.energies[1] <= gp.energies[1] + SLACK,
        }
        if d1 < 1 and not g.degenerate:
            checks["energy_window"] = gp.energies[0] <= g.energies[0] + 2 * ratio + SLACK
        if hyp:
            budget = 2 * ratio
            checks["gap_half"] = gp.gap >= g.gap / 2 - SLACK
            checks["distance"] = Dp**2 <= budget / g.gap + SLACK
        rep = TruncationReport(
            cutoff_in=cutoff_in,
            t=t,
            delta1=d1,
            delta2=d2,
            eps=tuple(map(float, g.energies)),
            eps_prime=tuple(map(float, gp.energies)),
            eps_double_prime=tuple(map(float, gpp.energies)),
            gap=g.gap,
            gap_prime=gp.gap,
            gap_double_prime=gpp.gap,
            D_prime=Dp,
            D_double_prime=Dpp,
            D_between=trace_distance(gp.psi0, gpp.psi0),
            hypothesis=hyp,
            strong_hypothesis=not g.degenerate and ratio <= g.gap / 18,
            checks=checks,
            empty_boundary=flags,
        )
        if strict:
            rep.check()
        return rep


def robustness_report(spec: ModelSpec, window: Window, t: float = math.inf, strict: bool = True) -> TruncationReport:
    """One-shot truncation report for a single window."""
    exp = RobustnessExperiment(spec, window.l, window.s, window.cutoff_ref)
    return exp.report(window.cutoff_in, t, strict=strict)


def reference_converged(spec: ModelSpec, cutoff_ref, step=2, tol: float = 1e-8):
    """Compare eps_0 at the reference cutoff with eps_0 at ``cutoff_ref + step``."""
    e_a = ground_and_gap(build_hamiltonian(spec.with_cutoff(cutoff_ref))[1], tol=1e-10).eps0
    e_b = ground_and_gap(build_hamiltonian(spec.with_cutoff(cutoff_ref + step))[1], tol=1e-10).eps0
    return abs(e_a - e_b) <= tol, abs(e_a - e_b)
