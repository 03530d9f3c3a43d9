"""Quantum-number window restriction (H -> H') and boundary spectral cutoff (H' -> H'').

A window covers lattice sites ``l+1 .. l+s``.  With local terms ``H_x`` acting
on sites ``x-1, x``, the Hamiltonian splits as

    H = H_L + H_1 + ... + H_s + H_R,   H_L = sum_{x<=l} H_x,  H_j = H_{l+j},
                                       H_R = sum_{x>=l+s+1} H_x.

Each named block is shifted by minus its own lowest eigenvalue at the
reference cutoff, which makes every block positive semi-definite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.sparse as sp

from .config import CONSTANTS, LIMITS
from .errors import CapExceeded, ContractError
from .hilbert import ChainLayout, lift_block, window_mask
from .linalg import SparseHermitian, dense_oracle
from .models import LocalTerm


@dataclass(frozen=True)
class Window:
    l: int
    s: int
    cutoff_in: float
    cutoff_ref: float

    def __post_init__(self):
        if self.l < 0 or self.s < 1:
            raise ContractError("window needs l >= 0 and s >= 1")
        if self.cutoff_in > self.cutoff_ref:
            raise ContractError("window cutoff must not exceed the reference cutoff")

    @property
    def sites(self) -> range:
        return range(self.l + 1, self.l + self.s + 1)

    def validate(self, layout: ChainLayout) -> None:
        if self.l + self.s > layout.n_lattice - 1:
            raise ContractError(
                f"window {self.l + 1}..{self.l + self.s} does not fit a chain of {layout.n_lattice} sites"
            )


def site_masks(layout: ChainLayout, window: Window) -> dict:
    """Kept-basis masks of the quantum-number factors inside the window."""
    window.validate(layout)
    masks = {}
    for x in window.sites:
        i = layout.qn_site[x]
        if i is not None:
            masks[i] = window_mask(layout.sites[i], window.cutoff_in)
    return masks


def _kept_indices(dims, masks: dict, offset: int = 0) -> np.ndarray:
    vecs = [masks.get(offset + k, np.ones(d, dtype=bool)).astype(np.int8) for k, d in enumerate(dims)]
    return np.flatnonzero(reduce(np.kron, vecs))


def window_projector(layout: ChainLayout, window: Window) -> SparseHermitian:
    """Product of the per-site window projectors, as a diagonal 0/1 operator."""
    keep = np.zeros(layout.dim)
    keep[_kept_indices(layout.dims, site_masks(layout, window))] = 1.0
    return SparseHermitian.diagonal(keep)


def restrict(h: SparseHermitian, projector: SparseHermitian):
    """Restriction of ``P H P`` to the range of a diagonal 0/1 projector.

    Returns ``(H', kept)`` where ``kept`` lists the surviving basis indices.
    """
    d = projector.diag()
    if projector.upper.nnz != np.count_nonzero(d):
        raise ContractError("projector must be diagonal")
    if not np.all(np.isin(np.round(np.real(d), 12), (0.0, 1.0))):
        raise ContractError("projector must have 0/1 diagonal")
    kept = np.flatnonzero(np.real(d) > 0.5)
    if kept.size == 0:
        raise ContractError("projector has rank 0")
    sub = h.upper[kept][:, kept]
    return SparseHermitian(sub, kept.size), kept


def embed(v: np.ndarray, kept: np.ndarray, dim: int) -> np.ndarray:
    out = np.zeros(dim, dtype=v.dtype)
    out[kept] = v
    return out


def spectral_truncate(a: SparseHermitian, t: float, return_flag: bool = False):
    """``A P_t + ||A P_t|| (I - P_t)`` with P_t the spectral projector onto eigenvalues <= t.

    When no eigenvalue is <= t the zero operator is returned; with
    ``return_flag`` the second return value reports that case.
    """
    spec = dense_oracle(a)
    vals, vecs = spec.eigenvalues, spec.eigenvectors
    below = vals <= t
    empty = not below.any()
    if empty:
        out = SparseHermitian.zeros(a.dim)
    elif below.all():
        out = a
    else:
        cap = float(np.max(np.abs(vals[below])))
        new_vals = np.where(below, vals, cap)
        m = (vecs * new_vals[None, :]) @ vecs.conj().T
        m = 0.5 * (m + m.conj().T)
        m[np.abs(m) < 1e-14 * max(1.0, abs(m).max())] = 0.0
        out = SparseHermitian.from_matrix(m)
    return (out, empty) if return_flag else out


# ---------------------------------------------------------------------------
# block decomposition


def _merge(layout: ChainLayout, terms, support) -> SparseHermitian:
    """Sum of local terms re-expressed on a common contiguous support."""
    support = tuple(support)
    dims = [layout.sites[i].dim for i in support]
    total = SparseHermitian.zeros(int(np.prod(dims)))
    for t in terms:
        left = int(np.prod([layout.sites[i].dim for i in support if i < t.support[0]]))
        right = int(np.prod([layout.sites[i].dim for i in support if i > t.support[-1]]))
        m = t.op.full()
        if left > 1:
            m = sp.kron(sp.identity(left), m)
        if right > 1:
            m = sp.kron(m, sp.identity(right))
        total = total + SparseHermitian(sp.triu(sp.csr_matrix(m)), total.dim)
    return total


@dataclass(frozen=True)
class Blocks:
    """Named blocks ``[H_L, H_1, ..., H_s, H_R]`` as local terms plus their shifts."""

    names: tuple
    terms: tuple  # LocalTerm per name (support may be a single site for empty blocks)
    shifts: tuple  # constant added to each block (minus its reference minimum)

    def as_dict(self) -> dict:
        return dict(zip(self.names, self.terms))


def split_blocks(layout: ChainLayout, terms, window: Window, shifts=None) -> Blocks:
    """Group local terms into ``H_L, H_1..H_s, H_R`` and shift each to be PSD.

    ``shifts`` reuses constants computed at the reference cutoff; when omitted
    they are computed here from the blocks' own spectra.
    """
    window.validate(layout)
    by_x = {t.x: t for t in terms}
    l, s = window.l, window.s
    n_lat = layout.n_lattice
    groups = [("H_L", [by_x[x] for x in sorted(by_x) if x <= l], (0, l))]
    for j in range(1, s + 1):
        x = l + j
        groups.append((f"H_{j}", [by_x[x]] if x in by_x else [], (x - 1, x)))
    groups.append(("H_R", [by_x[x] for x in sorted(by_x) if x >= l + s + 1], (l + s, n_lat - 1)))
    names, out_terms, out_shifts = [], [], []
    for k, (name, members, (a, b)) in enumerate(groups):
        support = layout.span(max(a, 0), min(b, n_lat - 1))
        op = _merge(layout, members, support)
        if shifts is None:
            if op.upper.nnz == 0:
                shift = 0.0
            else:
                shift = -float(_min_eig(op))
        else:
            shift = shifts[k]
        names.append(name)
        out_terms.append(LocalTerm(k, support, op.shift(shift) if shift else op))
        out_shifts.append(shift)
    return Blocks(tuple(names), tuple(out_terms), tuple(out_shifts))


def _min_eig(op: SparseHermitian) -> float:
    if op.dim <= LIMITS.oracle_cap:
        return float(np.linalg.eigvalsh(op.to_dense())[0])
    from .linalg import lanczos_extremal

    return float(lanczos_extremal(op, 1, tol=1e-10).eigenvalues[0])


def truncated_layout(layout: ChainLayout, window: Window):
    """Layout whose window sites keep only |lambda| <= cutoff_in, plus the masks used."""
    from .hilbert import LocalSite

    masks = site_masks(layout, window)
    new_sites = {}
    for i, mask in masks.items():
        s = layout.sites[i]
        idx = np.flatnonzero(mask)
        new_sites[i] = LocalSite(
            s.kind,
            int(round(2 * window.cutoff_in)),
            tuple(s.basis_labels[k] for k in idx),
            tuple(s.lambda2[k] for k in idx),
            s.modes,
        )
    return layout.replace_sites(new_sites), masks


def restrict_term(term: LocalTerm, layout: ChainLayout, masks: dict) -> LocalTerm:
    dims = [layout.sites[i].dim for i in term.support]
    kept = _kept_indices(dims, masks, offset=term.support[0])
    sub = term.op.upper[kept][:, kept]
    return LocalTerm(term.x, term.support, SparseHermitian(sub, kept.size))


def restrict_blocks(blocks: Blocks, layout: ChainLayout, window: Window):
    """Apply the window restriction to every block: returns (new layout, restricted blocks)."""
    new_layout, masks = truncated_layout(layout, window)
    terms = tuple(restrict_term(t, layout, masks) for t in blocks.terms)
    return new_layout, Blocks(blocks.names, terms, blocks.shifts)


def assemble_blocks(layout: ChainLayout, blocks: Blocks) -> SparseHermitian:
    if layout.dim > LIMITS.max_state_dim:
        raise CapExceeded("Hamiltonian", layout.dim, LIMITS.max_state_dim, layout.dims)
    total = None
    for t in blocks.terms:
        lifted = lift_block(layout, t.support, t.op)
        total = lifted if total is None else total + lifted
    return total


def double_prime_blocks(layout: ChainLayout, blocks: Blocks, t: float):
    """Boundary blocks ``(H_L + H_1)^{<=t}`` and ``(H_s + H_R)^{<=t}`` plus the untouched middle.

    Returns ``(terms, empty_flags)``; the flags mark boundary blocks with no
    eigenvalue below t.
    """
    d = blocks.as_dict()
    names = blocks.names
    s = len(names) - 2
    left = _merge(layout, [d["H_L"], d["H_1"]], _union(d["H_L"].support, d["H_1"].support))
    left_support = _union(d["H_L"].support, d["H_1"].support)
    right_support = _union(d[f"H_{s}"].support, d["H_R"].support)
    if s == 1:
        # a single window site: both boundary blocks contain H_1; split it evenly
        # is not meaningful, so the left block takes H_1 and the right block H_R alone
        right = d["H_R"].op
        right_support = d["H_R"].support
    else:
        right = _merge(layout, [d[f"H_{s}"], d["H_R"]], right_support)
    left_t, e1 = spectral_truncate(left, t, return_flag=True) if math.isfinite(t) else (left, False)
    right_t, e2 = spectral_truncate(right, t, return_flag=True) if math.isfinite(t) else (right, False)
    terms = [LocalTerm(0, left_support, left_t)]
    terms += [d[f"H_{j}"] for j in range(2, s)]
    terms.append(LocalTerm(s + 1, right_support, right_t))
    return terms, (e1, e2)


def _union(a, b) -> tuple:
    lo, hi = min(a[0], b[0]), max(a[-1], b[-1])
    return tuple(range(lo, hi + 1))


def assemble_double_prime(layout: ChainLayout, blocks: Blocks, t: float):
    """H'' on the (already restricted) layout; returns ``(H'', empty_flags)``."""
    terms, flags = double_prime_blocks(layout, blocks, t)
    total = None
    for term in terms:
        lifted = lift_block(layout, term.support, term.op)
        total = lifted if total is None else total + lifted
    return total, flags


def truncation_errors(h: SparseHermitian, psi0: np.ndarray, projector: SparseHermitian):
    """``(delta1, delta2) = (||(1-P) psi||, ||P H (1-P) psi||)``."""
    p = np.real(projector.diag())
    outside = (1.0 - p) * psi0
    delta1 = float(np.linalg.norm(outside))
    delta2 = float(np.linalg.norm(p * h.matvec(outside)))
    return delta1, delta2


def default_polylog(s: float, delta: float, gap: float) -> float:
    return math.log(s / delta) ** 2


def parameter_schedule(
    gap: float,
    s: int,
    delta: float,
    r: float,
    lam_bar: float,
    norm_of_cutoff,
    grid=None,
    polylog=default_polylog,
    C1: float | None = None,
    C: float | None = None,
):
    """Smallest cutoff on ``grid`` with ``L^{1-r} >= (2 lam_bar)^{1-r} + C1 polylog / gap``,
    and ``t = max(C N(L) log(1/delta), C N(L)^2 / gap^2)``.
    """
    if gap <= 0 or not 0 < delta < 1 or not 0 <= r < 1:
        raise ContractError("need gap > 0, 0 < delta < 1, 0 <= r < 1")
    C1 = CONSTANTS.C1 if C1 is None else C1
    C = CONSTANTS.C if C is None else C
    grid = range(0, 10_001) if grid is None else grid
    threshold = (2 * lam_bar) ** (1 - r) + C1 * polylog(s, delta, gap) / gap
    for L in grid:
        if L ** (1 - r) >= threshold:
            n = norm_of_cutoff(L)
            t = max(C * n * math.log(1 / delta), C * n**2 / gap**2)
            return L, t
    raise ContractError(f"no cutoff on the grid reaches the threshold {threshold:.6g}")
