"""Sparse Hermitian operators, extremal eigensolvers and Chebyshev filters.

State vectors are plain 1D numpy arrays throughout the package.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh_tridiagonal

from .config import LIMITS
from .errors import CapExceeded, ContractError, ConvergenceError

__all__ = [
    "SparseHermitian",
    "SpectrumSlice",
    "kron_compose",
    "apply",
    "lanczos_extremal",
    "dense_oracle",
    "chebyshev_apply",
    "chebyshev_scalar",
    "chebyshev_T",
    "normalize",
]


class SparseHermitian:
    """Hermitian operator stored as its upper triangle (diagonal included).

    The lower triangle is never stored; :meth:`matvec` mirrors it on the fly,
    so Hermiticity holds by construction.
    """

    __slots__ = ("dim", "upper")

    def __init__(self, upper, dim: int | None = None):
        upper = sp.csr_matrix(upper)
        if dim is None:
            dim = upper.shape[0]
        if upper.shape != (dim, dim):
            raise ContractError(f"upper triangle has shape {upper.shape}, expected {(dim, dim)}")
        if dim < 1:
            raise ContractError("dim must be positive")
        upper = sp.triu(upper, format="csr")
        upper.sum_duplicates()
        upper.eliminate_zeros()
        upper.sort_indices()
        d = upper.diagonal()
        if np.iscomplexobj(d) and np.any(np.abs(d.imag) > 1e-12 * max(1.0, np.abs(d).max())):
            raise ContractError("diagonal of a Hermitian operator must be real")
        if np.iscomplexobj(upper.data) and not np.any(upper.data.imag):
            upper = upper.real.tocsr()
        self.dim = int(dim)
        self.upper = upper

    # construction -------------------------------------------------------

    @classmethod
    def from_entries(cls, dim: int, entries) -> SparseHermitian:
        """Build from ``(row, col, value)`` triples with ``row <= col``."""
        rows, cols, vals = [], [], []
        seen = set()
        for r, c, v in entries:
            if r > c:
                raise ContractError(f"entry ({r}, {c}) lies below the diagonal")
            if (r, c) in seen:
                raise ContractError(f"duplicate entry ({r}, {c})")
            if not (0 <= r < dim and 0 <= c < dim):
                raise ContractError(f"entry ({r}, {c}) outside dim {dim}")
            seen.add((r, c))
            rows.append(r)
            cols.append(c)
            vals.append(v)
        dtype = complex if any(isinstance(v, complex) for v in vals) else float
        m = sp.coo_matrix((np.asarray(vals, dtype=dtype), (rows, cols)), shape=(dim, dim))
        return cls(m, dim)

    @classmethod
    def from_matrix(cls, m, atol: float = 1e-12) -> SparseHermitian:
        """Wrap a full (dense or sparse) matrix after checking Hermiticity."""
        if sp.issparse(m):
            m = sp.csr_matrix(m)
            diff = m - m.conj().T
            err = abs(diff).max() if diff.nnz else 0.0
            scale = abs(m).max() if m.nnz else 0.0
        else:
            m = np.asarray(m)
            err = np.abs(m - m.conj().T).max() if m.size else 0.0
            scale = np.abs(m).max() if m.size else 0.0
        if err > atol * max(1.0, scale):
            raise ContractError(f"matrix is not Hermitian (max asymmetry {err:.3e})")
        return cls(sp.triu(sp.csr_matrix(m)), m.shape[0])

    @classmethod
    def identity(cls, dim: int) -> SparseHermitian:
        return cls(sp.identity(dim, format="csr"), dim)

    @classmethod
    def zeros(cls, dim: int) -> SparseHermitian:
        return cls(sp.csr_matrix((dim, dim)), dim)

    @classmethod
    def diagonal(cls, values) -> SparseHermitian:
        values = np.asarray(values)
        return cls(sp.diags(values, format="csr"), len(values))

    # views --------------------------------------------------------------

    @property
    def dtype(self):
        return self.upper.dtype

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.upper.data)

    @property
    def entries(self):
        coo = self.upper.tocoo()
        return list(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))

    def full(self) -> sp.csr_matrix:
        """Materialize the full sparse matrix (both triangles)."""
        u = self.upper
        strict = sp.triu(u, k=1)
        return (u + strict.conj().T).tocsr()

    def to_dense(self) -> np.ndarray:
        return self.full().toarray()

    def diag(self) -> np.ndarray:
        return self.upper.diagonal()

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        u = self.upper
        out = u @ v
        out = out + u.conj().T @ v
        out -= u.diagonal() * v if v.ndim == 1 else u.diagonal()[:, None] * v
        return out

    __matmul__ = matvec

    # algebra ------------------------------------------------------------

    def __add__(self, other: SparseHermitian) -> SparseHermitian:
        _check_same_dim(self, other)
        return SparseHermitian(self.upper + other.upper, self.dim)

    def __sub__(self, other: SparseHermitian) -> SparseHermitian:
        _check_same_dim(self, other)
        return SparseHermitian(self.upper - other.upper, self.dim)

    def __neg__(self) -> SparseHermitian:
        return SparseHermitian(-self.upper, self.dim)

    def scale(self, a: float) -> SparseHermitian:
        if np.iscomplexobj(a) and np.imag(a) != 0:
            raise ContractError("only real scalars preserve Hermiticity")
        return SparseHermitian(float(np.real(a)) * self.upper, self.dim)

    def __mul__(self, a: float) -> SparseHermitian:
        return self.scale(a)

    __rmul__ = __mul__

    def shift(self, c: float) -> SparseHermitian:
        """Return ``self + c * I``."""
        return SparseHermitian(self.upper + c * sp.identity(self.dim, format="csr"), self.dim)

    def sandwich(self, p: SparseHermitian) -> SparseHermitian:
        """``P A P`` for Hermitian ``P``."""
        f = p.full()
        return SparseHermitian.from_matrix(f @ self.full() @ f)

    def expectation(self, v: np.ndarray) -> float:
        return float(np.real(np.vdot(v, self.matvec(v))))

    def commutator_norm(self, other: SparseHermitian) -> float:
        """Max-abs entry of ``[A, B]``."""
        a, b = self.full(), other.full()
        c = a @ b - b @ a
        return float(abs(c).max()) if c.nnz else 0.0

    def __repr__(self) -> str:
        return f"SparseHermitian(dim={self.dim}, nnz_upper={self.upper.nnz}, dtype={self.dtype})"


def _check_same_dim(a: SparseHermitian, b: SparseHermitian) -> None:
    if a.dim != b.dim:
        raise ContractError(f"dimension mismatch {a.dim} vs {b.dim}")


def kron_compose(factors, max_dim: int | None = None) -> SparseHermitian:
    """Kronecker product of Hermitian factors, leftmost factor slowest."""
    factors = list(factors)
    if not factors:
        raise ContractError("need at least one factor")
    cap = LIMITS.max_state_dim if max_dim is None else max_dim
    dims = [f.dim for f in factors]
    total = int(np.prod(dims, dtype=object))
    if total > cap:
        raise CapExceeded("kron_compose", total, cap, dims)
    out = reduce(lambda a, b: sp.kron(a, b, format="csr"), (f.full() for f in factors))
    return SparseHermitian(sp.triu(out, format="csr"), total)


def apply(a: SparseHermitian, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v)
    if v.shape[0] != a.dim:
        raise ContractError(f"operator dim {a.dim} does not match vector length {v.shape[0]}")
    return a.matvec(v)


def normalize(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    if n == 0:
        raise ContractError("cannot normalize the zero vector")
    return v / n


@dataclass(frozen=True)
class SpectrumSlice:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns
    residuals: np.ndarray

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def vector(self, i: int) -> np.ndarray:
        return self.eigenvectors[:, i]


def _residuals(a: SparseHermitian, vals, vecs) -> np.ndarray:
    av = a.matvec(vecs)
    return np.linalg.norm(av - vecs * vals[None, :], axis=0)


def dense_oracle(a: SparseHermitian, cap: int | None = None) -> SpectrumSlice:
    """Full spectrum through a dense Hermitian eigendecomposition (LAPACK)."""
    cap = LIMITS.oracle_cap if cap is None else cap
    if a.dim > cap:
        raise CapExceeded("dense_oracle", a.dim, cap)
    m = a.to_dense()
    vals, vecs = np.linalg.eigh(m)
    return SpectrumSlice(vals, vecs, np.linalg.norm(m @ vecs - vecs * vals[None, :], axis=0))


def lanczos_extremal(
    a: SparseHermitian,
    k: int = 1,
    tol: float = 1e-9,
    max_iter: int = 5000,
    seed: int = 0,
    basis_size: int = 300,
) -> SpectrumSlice:
    """Lowest ``k`` eigenpairs by Lanczos with full reorthogonalization.

    Pairs are found one at a time; each converged vector is locked and later
    runs stay in its orthogonal complement, which resolves degenerate levels.
    Runs longer than ``basis_size`` are restarted from the current Ritz vector.
    ``max_iter`` bounds the total number of matrix-vector products.
    """
    if k < 1 or k > a.dim:
        raise ContractError(f"need 1 <= k <= dim, got k={k}, dim={a.dim}")
    if tol <= 0:
        raise ContractError("tol must be positive")
    dtype = np.float64 if a.is_real else np.complex128
    rng = np.random.default_rng(seed)
    n = a.dim
    locked: list[np.ndarray] = []
    vals: list[float] = []
    used = 0

    if n == 1:
        v = np.ones(1, dtype=dtype)
        lam = float(np.real(a.diag()[0]))
        return SpectrumSlice(np.array([lam]), v[:, None], np.zeros(1))

    def project_out(w, basis):
        if basis:
            b = np.array(basis).T
            w = w - b @ (b.conj().T @ w)
        return w

    for i in range(k):
        start = rng.standard_normal(n)
        if dtype is np.complex128:
            start = start + 1j * rng.standard_normal(n)
        start = start.astype(dtype)
        best_res = np.inf
        best = None
        while True:
            v = project_out(start, locked)
            v = project_out(v, locked)
            nv = np.linalg.norm(v)
            if nv < 1e-14:
                raise ConvergenceError("start vector lies in the locked subspace", [best_res], vals)
            v = v / nv
            lanczos = _lanczos_run(a, v, locked, min(basis_size, n - len(locked)), tol, max_iter - used)
            theta, x, steps = lanczos
            used += steps
            x = normalize(project_out(x, locked))
            theta = float(np.real(np.vdot(x, a.matvec(x))))
            res = float(np.linalg.norm(a.matvec(x) - theta * x))
            if res < best_res:
                best_res, best = res, (theta, x)
            if res <= tol:
                break
            if used >= max_iter:
                raise ConvergenceError(
                    f"Lanczos did not converge pair {i} within {max_iter} matvecs "
                    f"(best residual {best_res:.3e})",
                    residuals=[*([0.0] * i), best_res],
                    eigenvalues=[*vals, best[0]],
                )
            start = x
        theta, x = best
        locked.append(x)
        vals.append(theta)

    vecs = np.array(locked).T
    # Rayleigh-Ritz on the locked block fixes ordering and mixes near-degenerate pairs
    h = vecs.conj().T @ a.matvec(vecs)
    h = 0.5 * (h + h.conj().T)
    w, y = np.linalg.eigh(h)
    vecs = vecs @ y
    return SpectrumSlice(w, vecs, _residuals(a, w, vecs))


def _lanczos_run(a, v0, locked, m_max, tol, budget):
    """One Lanczos cycle; returns (lowest Ritz value, Ritz vector, matvecs used)."""
    n = a.dim
    m_max = max(1, min(m_max, budget))
    V = np.empty((m_max + 1, n), dtype=v0.dtype)
    V[0] = v0
    alpha = np.zeros(m_max)
    beta = np.zeros(m_max)
    lock = np.array(locked) if locked else None
    theta, y = None, None
    j = 0
    for j in range(m_max):
        w = a.matvec(V[j])
        alpha[j] = np.real(np.vdot(V[j], w))
        w = w - alpha[j] * V[j]
        if j > 0:
            w = w - beta[j - 1] * V[j - 1]
        for _ in range(2):
            w = w - V[: j + 1].T @ (V[: j + 1].conj() @ w)
            if lock is not None:
                w = w - lock.T @ (lock.conj() @ w)
        beta[j] = np.linalg.norm(w)
        last = j == m_max - 1
        invariant = beta[j] <= 1e-13 * max(1.0, np.abs(alpha[: j + 1]).max())
        if invariant or last or j % 4 == 3:
            if j == 0:
                theta, y = alpha[0], np.ones(1)
            else:
                ev, evec = eigh_tridiagonal(
                    alpha[: j + 1], beta[:j], select="i", select_range=(0, 0)
                )
                theta, y = ev[0], evec[:, 0]
            if invariant or last or beta[j] * abs(y[-1]) <= 0.1 * tol:
                break
        V[j + 1] = w / beta[j]
    x = V[: j + 1].T @ y
    return theta, x, j + 1


def chebyshev_T(l: int, x: float) -> float:
    """Chebyshev polynomial of the first kind, valid for any real x."""
    if abs(x) <= 1:
        return float(np.cos(l * np.arccos(x)))
    s = 1.0 if x > 0 else (-1.0) ** l
    return s * float(np.cosh(l * np.arccosh(abs(x))))


def _affine(interval):
    lo, hi = map(float, interval)
    if not hi > lo:
        raise ContractError(f"need hi > lo, got interval ({lo}, {hi})")
    return 2.0 / (hi - lo), -(hi + lo) / (hi - lo)


def chebyshev_scalar(x, interval, anchor: float, degree: int):
    """Evaluate the anchored filter polynomial at scalar(s) x."""
    a, b = _affine(interval)
    y = a * np.asarray(x, dtype=float) + b
    x0 = a * anchor + b
    t_prev, t_cur = np.ones_like(y), y
    if degree == 0:
        return np.ones_like(y)
    for _ in range(degree - 1):
        t_prev, t_cur = t_cur, 2 * y * t_cur - t_prev
    return t_cur / chebyshev_T(degree, x0)


def chebyshev_apply(a: SparseHermitian, interval, anchor: float, degree: int, v: np.ndarray) -> np.ndarray:
    """Apply ``T_l(y(A)) / T_l(y(anchor))`` to v, with y mapping interval onto [-1, 1].

    The result fixes eigenvectors at ``anchor`` and damps the band by
    ``1 / |T_l(y(anchor))|``.
    """
    lo, hi = map(float, interval)
    scale, offset = _affine(interval)
    if not anchor < lo:
        raise ContractError(f"anchor {anchor} must lie below the band ({lo}, {hi})")
    if degree < 0:
        raise ContractError("degree must be non-negative")
    v = np.asarray(v)
    if degree == 0:
        return v.copy()
    x0 = scale * anchor + offset
    # carry the scalar recurrence along so intermediate vectors stay O(1)
    def y_of(u):
        return scale * a.matvec(u) + offset * u

    s_prev, s_cur = 1.0, x0
    w_prev, w_cur = v / 1.0, y_of(v) / x0
    for _ in range(degree - 1):
        s_next = 2 * x0 * s_cur - s_prev
        w_next = (2 * s_cur * y_of(w_cur) - s_prev * w_prev) / s_next
        s_prev, s_cur = s_cur, s_next
        w_prev, w_cur = w_cur, w_next
    return w_cur
