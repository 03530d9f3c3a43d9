"""Chebyshev approximate ground-state projectors built from H'' and the area-law bookkeeping."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import CONSTANTS, LIMITS
from .errors import ContractError
from .linalg import SparseHermitian, chebyshev_apply, chebyshev_scalar, chebyshev_T, dense_oracle
from .spectra import DEGENERACY_TOL, GroundRecord


def gershgorin_upper(h: SparseHermitian) -> float:
    """Upper bound on the spectrum: max_i (a_ii + sum_{j != i} |a_ij|)."""
    full = h.full().tocsr()
    absrow = np.asarray(abs(full).sum(axis=1)).ravel()
    d = np.real(h.diag())
    return float(np.max(d + absrow - np.abs(d)))


@dataclass(frozen=True)
class AgspInstance:
    H: SparseHermitian
    degree: int
    anchor: float  # eps_0''
    band: tuple  # (eps_1'', eps_max)
    psi0: np.ndarray
    measured_sigma: float
    theoretical_sigma_bound: float
    fixed_point_error: float  # ||K psi0 - psi0||
    log_R: float | None = None

    def apply(self, v: np.ndarray) -> np.ndarray:
        if self.degree == 0:
            return np.array(v, copy=True)
        return chebyshev_apply(self.H, self.band, self.anchor, self.degree, v)

    def scalar(self, x):
        if self.degree == 0:
            return np.ones_like(np.asarray(x, dtype=float))
        return chebyshev_scalar(x, self.band, self.anchor, self.degree)


def _band(record: GroundRecord, eps_max: float) -> tuple:
    lo = record.eps1
    hi = max(eps_max, lo)
    if hi <= lo:
        # the polynomial only needs some interval containing the excited spectrum
        hi = lo + max(1e-12, 1e-12 * abs(lo))
    return lo, hi


def build_agsp(h: SparseHermitian, record: GroundRecord, degree: int, eps_max: float | None = None, log_R=None) -> AgspInstance:
    """``K = T_l(y(H)) / T_l(y(eps_0))`` with y mapping [eps_1, eps_max] onto [-1, 1]."""
    if record.gap <= DEGENERACY_TOL:
        raise ContractError(f"AGSP needs a gap, got {record.gap:.3e}")
    if degree < 0:
        raise ContractError("degree must be non-negative")
    eps_max = gershgorin_upper(h) if eps_max is None else float(eps_max)
    if eps_max < record.eps1 - 1e-12:
        raise ContractError("eps_max lies below eps_1")
    band = _band(record, eps_max)
    if degree == 0:
        bound = 1.0
    else:
        lo, hi = band
        x0 = (2 * record.eps0 - lo - hi) / (hi - lo)
        bound = 1.0 / abs(chebyshev_T(degree, x0))
    partial = AgspInstance(h, degree, record.eps0, band, record.psi0, math.nan, bound, math.nan, log_R)
    k_psi = partial.apply(record.psi0)
    fixed = float(np.linalg.norm(k_psi - record.psi0))
    sigma = exact_shrinking(partial) if h.dim <= LIMITS.oracle_cap else measure_shrinking(partial, 8, 0)
    return AgspInstance(h, degree, record.eps0, band, record.psi0, sigma, bound, fixed, log_R)


def exact_shrinking(inst: AgspInstance) -> float:
    """max_{k >= 1} |f(eps_k)| from the dense spectrum (ground state excluded)."""
    spec = dense_oracle(inst.H)
    vals = spec.eigenvalues
    # drop the eigenvector with the largest overlap on psi0 rather than index 0
    ov = np.abs(spec.eigenvectors.conj().T @ inst.psi0)
    rest = np.delete(vals, int(np.argmax(ov)))
    if rest.size == 0:
        return 0.0
    return float(np.max(np.abs(inst.scalar(rest))))


def measure_shrinking(inst: AgspInstance, n_probe: int, seed: int) -> float:
    """max ||K phi|| over random unit phi orthogonal to psi0 (one RNG stream per probe)."""
    if n_probe < 1:
        raise ContractError("need at least one probe")
    psi = inst.psi0
    best = 0.0
    for p in range(n_probe):
        rng = np.random.default_rng([seed, p])
        phi = rng.standard_normal(psi.size)
        if np.iscomplexobj(psi):
            phi = phi + 1j * rng.standard_normal(psi.size)
        phi = phi - psi * np.vdot(psi, phi)
        phi = phi / np.linalg.norm(phi)
        best = max(best, float(np.linalg.norm(inst.apply(phi))))
    return best


def rank_formula(l: int, s: int, d: int, C_rank: float | None = None) -> float:
    """log R = C_rank (l/s + s) log(l d)."""
    if l < 1 or s < 1 or d < 1:
        raise ContractError("need l, s, d >= 1")
    C_rank = CONSTANTS.C_rank if C_rank is None else C_rank
    return C_rank * (l / s + s) * math.log(l * d)


@dataclass(frozen=True)
class BudgetResult:
    s: int
    log_R: float
    entropy_bound: float
    table: list  # rows (s, k, sigma, target, ok)


def default_deltas(k_max: int) -> list:
    return [k**-3.0 for k in range(1, k_max + 1)]


def area_law_budget(sigma, log_R, s_grid, k_max: int | None = None, deltas=None) -> BudgetResult:
    """Smallest s with ``sigma(k, s) <= (2R)^-k`` for k = 1..k_max.

    ``sigma(k, s)`` is the measured shrinking factor of the k-th power
    instance and ``log_R(s)`` the log of its rank estimate.  The entropy
    bound is ``log R + sum_k k delta_k`` with ``delta_k = k^-3`` by default.
    """
    k_max = CONSTANTS.k_max if k_max is None else k_max
    deltas = default_deltas(k_max) if deltas is None else list(deltas)
    overhead = sum(k * d for k, d in zip(range(1, k_max + 1), deltas))
    table = []
    for s in s_grid:
        lr = float(log_R(s))
        ok_all = True
        for k in range(1, k_max + 1):
            sig = float(sigma(k, s))
            target = math.exp(-k * (math.log(2) + lr))
            ok = sig <= target
            table.append((s, k, sig, target, ok))
            ok_all &= ok
        if ok_all:
            return BudgetResult(s, lr, lr + overhead, table)
    lines = "\n".join(f"s={s} k={k} sigma={sg:.3e} target={tg:.3e} {'ok' if ok else 'FAIL'}" for s, k, sg, tg, ok in table)
    raise ContractError(f"no s on the grid satisfies the shrinking budget:\n{lines}")
