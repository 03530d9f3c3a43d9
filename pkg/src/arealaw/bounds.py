"""Closed-form quantum-number bounds, tail envelopes and the variational witness check."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ContractError
from .hilbert import ChainLayout, lift_to_chain
from .linalg import SparseHermitian
from .models import HUBBARD_HOLSTEIN, ModelSpec, U1_LGT, SU2_LGT, boson_matrices, chain_layout


def mean_abs_bound_lgt(g_GM: float, g_E: float) -> float:
    if g_E <= 0:
        raise ContractError("the electric coupling must be positive")
    return 2.0 * math.sqrt(abs(g_GM) / g_E)


def hh_vacuum_abs_x(g: float) -> float:
    """``<0| 2|g| |X| |0>`` with X = (b + b^dagger)/sqrt(2)."""
    return 2.0 * abs(g) / math.sqrt(math.pi)


def mean_abs_bound_hh(g: float, omega0: float) -> float:
    if omega0 <= 0:
        raise ContractError("omega0 must be positive")
    return 0.5 + 2.0 * hh_vacuum_abs_x(g) / omega0 + 4.0 * g**2 / omega0**2


def tail_envelope(gap: float, chi: float, r: float, lam_bar: float, cutoff: float) -> float:
    """Exponent argument ``sqrt(gap (L^{1-r} - (2 lam_bar)^{1-r}) / chi)``."""
    if chi <= 0 or gap <= 0:
        raise ContractError("need chi > 0 and gap > 0")
    if not 0 <= r < 1:
        raise ContractError("need 0 <= r < 1")
    diff = cutoff ** (1 - r) - (2 * lam_bar) ** (1 - r)
    if diff < 0:
        raise ContractError(f"cutoff {cutoff} lies below the doubled mean {2 * lam_bar}")
    return math.sqrt(gap * diff / chi)


def multisite_envelope(gap, chi, r, lam_bar, cutoff, s: int) -> float:
    """Prefactor-times-envelope shape for an s-site window: sqrt(s) exp(-argument)."""
    return math.sqrt(s) * math.exp(-tail_envelope(gap, chi, r, lam_bar, cutoff))


def delta2_envelope(gap, chi, r, lam_bar, cutoff, s: int, norm: float) -> float:
    """s^{3/2} N(L) exp(-argument)."""
    return s**1.5 * norm * math.exp(-tail_envelope(gap, chi, r, lam_bar, cutoff))


# ---------------------------------------------------------------------------
# measured quantum-number statistics


def qn_distribution(layout: ChainLayout, psi: np.ndarray, x: int) -> dict:
    """``{lambda: <psi|P_lambda|psi>}`` for the quantum number on lattice site x."""
    i = layout.qn_site[x]
    if i is None:
        raise ContractError(f"lattice site {x} carries no quantum number")
    dims = layout.dims
    left = int(np.prod(dims[:i]))
    right = int(np.prod(dims[i + 1 :]))
    w = (np.abs(psi.reshape(left, dims[i], right)) ** 2).sum(axis=(0, 2))
    out = {}
    for lam2, p in zip(layout.sites[i].lambda2, w):
        out[lam2 / 2] = out.get(lam2 / 2, 0.0) + float(p)
    return out


def mean_abs_qn(layout: ChainLayout, psi: np.ndarray, x: int) -> float:
    """Measured ``sum_lambda |lambda| <psi|P_lambda|psi>``."""
    return float(sum(abs(l) * p for l, p in qn_distribution(layout, psi, x).items()))


def tail_weight(layout: ChainLayout, psi: np.ndarray, x: int, cutoff: float) -> float:
    """``||(I - P_[-L, L]) psi||`` at lattice site x."""
    dist = qn_distribution(layout, psi, x)
    w = sum(p for l, p in dist.items() if abs(l) > cutoff + 1e-9)
    return math.sqrt(max(0.0, w))


def tail_profile(layout: ChainLayout, psi: np.ndarray, x: int, cutoffs) -> np.ndarray:
    return np.array([tail_weight(layout, psi, x, L) for L in cutoffs])


def slope(xs, ys) -> float:
    """Least-squares slope of ys against xs."""
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    return float(np.polyfit(xs, ys, 1)[0])


def jensen_gap(L, values: np.ndarray, weights: np.ndarray) -> float:
    """``<L(|X|)> - L(<|X|>)`` for a distribution of |X| (non-negative for convex L)."""
    weights = np.asarray(weights, float) / np.sum(weights)
    a = np.abs(np.asarray(values, float))
    return float(np.dot(weights, L(a)) - L(np.dot(weights, a)))


# ---------------------------------------------------------------------------
# variational witnesses


@dataclass(frozen=True)
class ConvexLaw:
    """``L(x) = a x^p - c`` with p in {1, 2} and a >= 0."""

    name: str
    a: float
    power: int
    c: float

    def __call__(self, x):
        return self.a * np.asarray(x, float) ** self.power - self.c

    def inverse(self, y: float) -> float:
        if self.a == 0:
            return math.inf
        return max(0.0, (y + self.c) / self.a) ** (1.0 / self.power)

    def check_convex_nondecreasing(self, top: float = 50.0, n: int = 201) -> bool:
        x = np.linspace(0.0, top, n)
        y = self(x)
        return bool(np.all(np.diff(y) >= -1e-12) and np.all(np.diff(y, 2) >= -1e-9))


@dataclass(frozen=True)
class VariationalWitness:
    site: int  # local-site index in the layout
    H_A: SparseHermitian
    K_A: SparseHermitian
    trial: np.ndarray
    law: ConvexLaw

    def __post_init__(self):
        kmin = float(np.linalg.eigvalsh(self.K_A.to_dense())[0]) if self.K_A.dim else 0.0
        if kmin < -1e-10:
            raise ContractError(f"dominator must be positive semi-definite (min eigenvalue {kmin:.3e})")
        if not self.law.check_convex_nondecreasing():
            raise ContractError(f"{self.law.name} is not convex non-decreasing")

    def rhs(self) -> float:
        return (self.H_A + self.K_A).expectation(self.trial)

    def bound(self) -> float:
        """Mean |quantum number| bound ``L^{-1}(rhs)``."""
        return self.law.inverse(self.rhs())


def abs_x_matrix(cutoff: int) -> np.ndarray:
    """|X| for X = (b + b^dagger)/sqrt(2) on the truncated boson space."""
    b, _ = boson_matrices(cutoff)
    x = ((b + b.T) / math.sqrt(2)).toarray()
    w, v = np.linalg.eigh(x)
    return (v * np.abs(w)[None, :]) @ v.T


def lgt_witness(spec: ModelSpec, x: int, layout: ChainLayout | None = None) -> VariationalWitness:
    """Link witness: H_A = g_E E^2, K_A = 2|g_GM| I, trial = zero-flux state."""
    if spec.family not in (U1_LGT, SU2_LGT):
        raise ContractError("lattice gauge theory witness needs a gauge model")
    layout = chain_layout(spec) if layout is None else layout
    i = layout.qn_site[x]
    if i is None:
        raise ContractError(f"lattice site {x} has no link")
    site = layout.sites[i]
    c = spec.couplings
    lam = site.lambda_values
    if spec.family == U1_LGT:
        e2 = lam**2
    else:
        e2 = lam * (lam + 1)
    h_a = SparseHermitian.diagonal(c["g_E"] * e2)
    k_a = SparseHermitian.diagonal(np.full(site.dim, 2 * abs(c["g_GM"])))
    trial = np.zeros(site.dim)
    trial[int(np.argmin(np.abs(lam)))] = 1.0
    law = ConvexLaw("quadratic-minus-constant", c["g_E"], 2, 2 * abs(c["g_GM"]))
    return VariationalWitness(i, h_a, k_a, trial, law)


def hh_witness(spec: ModelSpec, x: int, layout: ChainLayout | None = None) -> VariationalWitness:
    """Boson witness: H_A = omega0 n, K_A = sqrt(2)|g| |X|, trial = vacuum."""
    if spec.family != HUBBARD_HOLSTEIN:
        raise ContractError("Hubbard-Holstein witness needs the Hubbard-Holstein model")
    layout = chain_layout(spec) if layout is None else layout
    i = layout.qn_site[x]
    L = int(spec.cutoff)
    c = spec.couplings
    g, w0 = c["g"], c["omega0"]
    h_a = SparseHermitian.diagonal(w0 * np.arange(L + 1, dtype=float))
    k_a = SparseHermitian.from_matrix(math.sqrt(2) * abs(g) * abs_x_matrix(L))
    trial = np.zeros(L + 1)
    trial[0] = 1.0
    law = ConvexLaw("linear-minus-constant", w0 / 2, 1, w0 / 4 + 2 * g**2 / w0)
    return VariationalWitness(i, h_a, k_a, trial, law)


def witness_for(spec: ModelSpec, x: int, layout: ChainLayout | None = None) -> VariationalWitness:
    if spec.family == HUBBARD_HOLSTEIN:
        return hh_witness(spec, x, layout)
    return lgt_witness(spec, x, layout)


def check_variational_lemma(psi: np.ndarray, layout: ChainLayout, witness: VariationalWitness, slack: float = 1e-10):
    """``(lhs, rhs, holds)`` for ``<Psi|(H_A - K_A)|Psi> <= <psi_A|(H_A + K_A)|psi_A>``."""
    op = lift_to_chain(layout, witness.site, witness.H_A - witness.K_A)
    lhs = op.expectation(psi)
    rhs = witness.rhs()
    return lhs, rhs, bool(lhs <= rhs + slack)
