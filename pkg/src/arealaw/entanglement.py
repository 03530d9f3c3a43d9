"""Schmidt decompositions across a cut, viable subspaces and operator Schmidt rank."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import LIMITS
from .errors import CapExceeded, ContractError
from .hilbert import ChainLayout
from .linalg import SparseHermitian


@dataclass(frozen=True)
class SchmidtProfile:
    cut: int
    coefficients: np.ndarray  # lambda_i, non-increasing, summing to 1
    entropy: float  # base 2

    def rank_eps(self, eps: float = 0.0) -> int:
        return int(np.count_nonzero(self.coefficients > eps))

    @property
    def rank(self) -> int:
        return self.rank_eps(1e-14)

    def row(self, top: int = 32) -> dict:
        lam = list(self.coefficients[:top]) + [0.0] * max(0, top - len(self.coefficients))
        out = {"cut": self.cut, "entropy": self.entropy}
        out.update({f"lambda_{i}": float(v) for i, v in enumerate(lam)})
        return out


def _entropy(lam: np.ndarray) -> float:
    nz = lam[lam > 0]
    return float(max(0.0, -np.sum(nz * np.log2(nz))))


def _split_dims(dims, cut: int):
    if not 0 < cut < len(dims):
        raise ContractError(f"cut {cut} is not interior to {len(dims)} factors")
    return int(np.prod(dims[:cut])), int(np.prod(dims[cut:]))


def reshape_cut(psi: np.ndarray, dims, cut: int) -> np.ndarray:
    left, right = _split_dims(dims, cut)
    if left * right != psi.size:
        raise ContractError(f"state of size {psi.size} does not match {left} x {right}")
    return psi.reshape(left, right)


def schmidt_cut(psi: np.ndarray, layout, cut: int) -> SchmidtProfile:
    """Schmidt coefficients across the boundary after local-site factor ``cut``.

    ``layout`` is a :class:`ChainLayout` or a plain list of factor dimensions;
    use ``layout.cut_after(x)`` to cut between lattice sites x and x+1.
    """
    dims = layout.dims if isinstance(layout, ChainLayout) else list(layout)
    if abs(np.linalg.norm(psi) - 1) > 1e-10:
        raise ContractError("state must be normalized")
    sv = np.linalg.svd(reshape_cut(psi, dims, cut), compute_uv=False)
    lam = sv**2
    lam = lam / lam.sum()
    return SchmidtProfile(cut, lam, _entropy(lam))


def schmidt_tail(profile: SchmidtProfile, V: int) -> float:
    """Weight beyond the ``V`` largest Schmidt coefficients."""
    if V < 0:
        raise ContractError("V must be non-negative")
    return float(max(0.0, profile.coefficients[V:].sum()))


def viability(basis: np.ndarray, psi: np.ndarray, dims, cut: int) -> float:
    """``<psi|(P_{V-perp} x I)|psi>`` for a left subspace V with orthonormal columns ``basis``."""
    m = reshape_cut(psi, dims, cut)
    basis = np.atleast_2d(basis)
    if basis.shape[0] != m.shape[0]:
        raise ContractError("subspace basis lives on the wrong side of the cut")
    gram = basis.conj().T @ basis
    if not np.allclose(gram, np.eye(gram.shape[0]), atol=1e-10):
        raise ContractError("subspace basis must be orthonormal")
    inside = np.linalg.norm(basis.conj().T @ m) ** 2
    total = np.linalg.norm(m) ** 2
    return float(min(1.0, max(0.0, total - inside)))


def operator_schmidt_values(k, dims, cut: int) -> np.ndarray:
    """Singular values of K realigned as a (left-left) x (right-right) matrix."""
    m = k.to_dense() if isinstance(k, SparseHermitian) else np.asarray(k)
    n = m.shape[0]
    if n > LIMITS.operator_svd_cap:
        raise CapExceeded("operator Schmidt decomposition", n, LIMITS.operator_svd_cap, list(dims))
    left, right = _split_dims(dims, cut)
    if left * right != n:
        raise ContractError(f"operator of size {n} does not match {left} x {right}")
    # K[(a b), (a' b')] -> R[(a a'), (b b')]
    r = m.reshape(left, right, left, right).transpose(0, 2, 1, 3).reshape(left * left, right * right)
    return np.linalg.svd(r, compute_uv=False)


def operator_schmidt_rank_eps(k, layout, cut: int, eps: float = 1e-12) -> int:
    """Number of operator Schmidt values above ``eps`` times the largest."""
    dims = layout.dims if isinstance(layout, ChainLayout) else list(layout)
    sv = operator_schmidt_values(k, dims, cut)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.count_nonzero(sv > eps * sv[0]))
