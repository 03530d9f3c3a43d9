"""Hamiltonians of the Hubbard-Holstein model and the U(1) / SU(2) lattice gauge theories.

Every model lives on a chain of lattice sites 0..N-1 (one per node).  The
Hamiltonian is a sum of local terms ``H_x`` (x = 1..N-1), each acting on
lattice sites x-1 and x.  Lattice site i holds node i+1 of the model; for the
gauge theories it also holds the link to the right of that node, so the last
site is a bare node.

Fermions are mapped to the chain by Jordan-Wigner, ordered left to right
with the modes of one node adjacent.
"""
from __future__ import annotations

from dataclasses import dataclass, field, asdict
from functools import reduce, lru_cache

import numpy as np
import scipy.sparse as sp

from .config import LIMITS
from .errors import CapExceeded, ContractError, ModelCheckError
from .hilbert import (
    FERMION,
    ChainLayout,
    boson_site,
    fermion_site,
    lift_block,
    su2_link_site,
    u1_link_site,
    window_mask,
)
from .linalg import SparseHermitian

HUBBARD_HOLSTEIN = "HubbardHolstein"
U1_LGT = "U1LGT"
SU2_LGT = "SU2LGT"
FAMILIES = (HUBBARD_HOLSTEIN, U1_LGT, SU2_LGT)

LGT_DEFAULTS = {"g_M": 1.0, "g_GM": 1.0, "g_E": 1.0, "lambda_G": 1.0, "rogue_field": 0.0}
HH_DEFAULTS = {"t_hop": 1.0, "U_hub": 1.0, "g": 0.5, "omega0": 1.0}

# declared growth exponent r of the quantum-number-changing part
DECLARED_R = {U1_LGT: 0.0, SU2_LGT: 0.0, HUBBARD_HOLSTEIN: 0.5}


@dataclass(frozen=True)
class ModelSpec:
    """A model family, its size, cutoff and couplings.

    ``hopping`` selects the U(1) link convention.  ``"lowering"`` takes
    ``U|k> = |k-1>`` together with the hopping ``phi_x^dag U_x phi_{x+1}``,
    which does not commute with the Gauss operators, so the penalty acts as an
    ordinary energy cost.  ``"raising"`` uses ``U|k> = |k+1>``, under which
    every ``G_x`` is conserved.

    ``rogue_field`` (U(1) only) adds ``h (U_x^2 + h.c.)`` on every link and books
    it into the preserving part of the walk/preserve split; it exists to
    exercise the assumption audit with a model that must fail it.
    """

    family: str
    N: int
    cutoff: float
    couplings: dict = field(default_factory=dict)
    hopping: str = "lowering"
    boundary: str = "open"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ContractError(f"unknown family {self.family!r}")
        if self.N < 1:
            raise ContractError("N must be at least 1")
        if self.boundary != "open":
            raise ContractError("only open boundaries are supported")
        if self.hopping not in ("lowering", "raising"):
            raise ContractError("hopping must be 'lowering' or 'raising'")
        defaults = HH_DEFAULTS if self.family == HUBBARD_HOLSTEIN else LGT_DEFAULTS
        unknown = set(self.couplings) - set(defaults)
        if unknown:
            raise ContractError(f"unknown couplings {sorted(unknown)} for {self.family}")
        merged = {**defaults, **{k: float(v) for k, v in self.couplings.items()}}
        if not all(np.isfinite(v) for v in merged.values()):
            raise ContractError("couplings must be finite")
        if self.family == HUBBARD_HOLSTEIN:
            if merged["omega0"] <= 0:
                raise ContractError("omega0 must be positive")
        elif merged["g_E"] < 0:
            raise ContractError("g_E must be non-negative")
        if self.family == SU2_LGT:
            if merged["rogue_field"] != 0:
                raise ContractError("rogue_field is only defined for U1LGT")
            if round(2 * self.cutoff) != 2 * self.cutoff or self.cutoff < 0:
                raise ContractError("SU(2) cutoff must be a non-negative half-integer")
        elif self.cutoff < 0 or int(self.cutoff) != self.cutoff:
            raise ContractError("cutoff must be a non-negative integer")
        object.__setattr__(self, "couplings", merged)

    def with_cutoff(self, cutoff) -> ModelSpec:
        return ModelSpec(self.family, self.N, cutoff, dict(self.couplings), self.hopping)

    def with_N(self, N: int) -> ModelSpec:
        return ModelSpec(self.family, N, self.cutoff, dict(self.couplings), self.hopping)

    def with_couplings(self, **kw) -> ModelSpec:
        return ModelSpec(self.family, self.N, self.cutoff, {**self.couplings, **kw}, self.hopping)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["couplings"] = dict(sorted(self.couplings.items()))
        return d

    @classmethod
    def from_dict(cls, d: dict) -> ModelSpec:
        return cls(
            d["family"],
            int(d["N"]),
            d["cutoff"],
            dict(d.get("couplings", {})),
            d.get("hopping", "lowering"),
            d.get("boundary", "open"),
        )


@dataclass(frozen=True)
class LocalTerm:
    """``H_x`` on its support (contiguous local sites)."""

    x: int
    support: tuple
    op: SparseHermitian


# ---------------------------------------------------------------------------
# layouts and single-site matrices


def chain_layout(spec: ModelSpec) -> ChainLayout:
    sites, groups, qn = [], [], []
    for i in range(spec.N):
        start = len(sites)
        if spec.family == HUBBARD_HOLSTEIN:
            sites += [fermion_site(2), boson_site(int(spec.cutoff))]
            qn.append(start + 1)
        else:
            modes = 1 if spec.family == U1_LGT else 2
            sites.append(fermion_site(modes))
            if i < spec.N - 1:
                link = u1_link_site(int(spec.cutoff)) if spec.family == U1_LGT else su2_link_site(spec.cutoff)
                sites.append(link)
                qn.append(start + 1)
            else:
                qn.append(None)
        groups.append(tuple(range(start, len(sites))))
    return ChainLayout(tuple(sites), tuple(groups), tuple(qn))


_A = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
_Z = sp.csr_matrix(np.diag([1.0, -1.0]))
_I2 = sp.identity(2, format="csr")


def _kron_all(mats):
    return reduce(lambda a, b: sp.kron(a, b, format="csr"), mats)


def fermion_mode_matrix(modes: int, k: int) -> sp.csr_matrix:
    """Annihilator of mode k inside a FermionModes(modes) site, with the in-site string."""
    return _kron_all([_Z] * k + [_A] + [_I2] * (modes - k - 1))


def fermion_parity(modes: int) -> sp.csr_matrix:
    return _kron_all([_Z] * modes)


def u1_link_matrices(cutoff: int, hopping: str = "lowering"):
    """(E, U) on the truncated electric basis |-L>, ..., |L>."""
    d = 2 * cutoff + 1
    e = sp.diags(np.arange(-cutoff, cutoff + 1, dtype=float), format="csr")
    # lowering: U|k> = |k-1>, i.e. entry (k-1, k)
    k = 1 if hopping == "lowering" else -1
    u = sp.eye(d, d, k=k, format="csr")
    return e, u


def boson_matrices(cutoff: int):
    """(b, n) on occupations 0..cutoff."""
    b = sp.diags(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), offsets=1, format="csr")
    n = sp.diags(np.arange(cutoff + 1, dtype=float), format="csr")
    return b, n


def cg_half(j2: int, m2: int, s2: int, J2: int, M2: int) -> float:
    """Clebsch-Gordan <j m; 1/2 s | J M> (Condon-Shortley), arguments doubled."""
    if m2 + s2 != M2 or abs(s2) != 1 or abs(m2) > j2 or abs(M2) > J2:
        return 0.0
    j = j2 / 2
    M = M2 / 2
    if J2 == j2 + 1:
        if s2 == 1:
            return float(np.sqrt((j + M + 0.5) / (2 * j + 1)))
        return float(np.sqrt((j - M + 0.5) / (2 * j + 1)))
    if J2 == j2 - 1 and j2 >= 1:
        if s2 == 1:
            return -float(np.sqrt((j - M + 0.5) / (2 * j + 1)))
        return float(np.sqrt((j + M + 0.5) / (2 * j + 1)))
    return 0.0


@lru_cache(maxsize=None)
def _su2_u_cached(c2: int):
    site = su2_link_site(c2 / 2)
    index = {lab: i for i, lab in enumerate(site.basis_labels)}
    spins = {1: 1, 2: -1}  # l=1 <-> +1/2, l=2 <-> -1/2
    out = {}
    for l, a2 in spins.items():
        for lp, b2 in spins.items():
            rows, cols, vals = [], [], []
            for (j2, m2, n2), col in index.items():
                for J2 in (j2 - 1, j2 + 1):
                    if J2 < 0 or J2 > c2:
                        continue
                    M2, N2 = m2 + a2, n2 + b2
                    row = index.get((J2, M2, N2))
                    if row is None:
                        continue
                    amp = np.sqrt((j2 + 1) / (J2 + 1)) * cg_half(j2, m2, a2, J2, M2) * cg_half(j2, n2, b2, J2, N2)
                    if amp != 0.0:
                        rows.append(row)
                        cols.append(col)
                        vals.append(amp)
            out[(l, lp)] = sp.csr_matrix((vals, (rows, cols)), shape=(site.dim, site.dim))
    e2 = sp.diags([(j2 / 2) * (j2 / 2 + 1) for (j2, _, _) in site.basis_labels], format="csr")
    return site, e2, out


def su2_link_operators(cutoff, check: bool = True) -> dict:
    """E^2 and the four rotator matrices U^{ll'} on a link truncated at j <= cutoff.

    The U^{ll'} are not Hermitian, so they are returned as scipy sparse
    matrices.  Their block selection rule and ``||U^{ll'}|| <= 1`` are checked
    before returning.
    """
    if cutoff < 0.5:
        raise ContractError("SU(2) link operators need cutoff >= 1/2")
    c2 = int(round(2 * cutoff))
    site, e2, us = _su2_u_cached(c2)
    if check:
        j2 = np.array([lab[0] for lab in site.basis_labels])
        for key, u in us.items():
            coo = u.tocoo()
            if np.any(np.abs(j2[coo.row] - j2[coo.col]) > 1):
                raise ModelCheckError(f"U^{key} couples blocks with |j1 - j2| > 1/2")
            norm = np.linalg.norm(u.toarray(), 2) if site.dim <= 4000 else _sparse_norm(u)
            if norm > 1 + 1e-12:
                raise ModelCheckError(f"||U^{key}|| = {norm} exceeds 1")
    return {"E2": SparseHermitian(e2), "U": dict(us), "site": site}


def _sparse_norm(m) -> float:
    if max(m.shape) <= 3000:
        return float(np.linalg.norm(m.toarray(), 2))
    from scipy.sparse.linalg import svds

    return float(svds(m, k=1, return_singular_vectors=False, random_state=0)[0])


# ---------------------------------------------------------------------------
# operator blocks


class Block:
    """Builds operators on a contiguous run of local sites of a layout."""

    def __init__(self, layout: ChainLayout, support):
        self.layout = layout
        self.support = tuple(support)
        self.dims = [layout.sites[i].dim for i in self.support]
        self.dim = int(np.prod(self.dims))

    def identity(self):
        return sp.identity(self.dim, format="csr")

    def embed(self, i: int, m) -> sp.csr_matrix:
        mats = [m if j == i else sp.identity(self.layout.sites[j].dim, format="csr") for j in self.support]
        return _kron_all(mats)

    def annihilator(self, i: int, k: int) -> sp.csr_matrix:
        """Jordan-Wigner annihilator of mode k on local site i.

        Strings to the left of the block cancel in every bilinear, so only
        fermion sites inside the block contribute.
        """
        mats = []
        for j in self.support:
            s = self.layout.sites[j]
            if j == i:
                mats.append(fermion_mode_matrix(s.modes, k))
            elif j < i and s.kind == FERMION:
                mats.append(fermion_parity(s.modes))
            else:
                mats.append(sp.identity(s.dim, format="csr"))
        return _kron_all(mats)

    def number(self, i: int, k: int) -> sp.csr_matrix:
        s = self.layout.sites[i]
        a = fermion_mode_matrix(s.modes, k)
        return self.embed(i, (a.T @ a).tocsr())


def fermion_annihilator(layout: ChainLayout, i: int, k: int) -> sp.csr_matrix:
    """Full-chain Jordan-Wigner annihilator (string over every earlier mode)."""
    cap = LIMITS.max_state_dim
    if layout.dim > cap:
        raise CapExceeded("fermion_annihilator", layout.dim, cap, layout.dims)
    return Block(layout, range(len(layout.sites))).annihilator(i, k)


# ---------------------------------------------------------------------------
# local terms


def _stagger(x_node: int) -> float:
    """(-1)^x for 1-based node index x."""
    return -1.0 if x_node % 2 else 1.0


def _u1_pieces(layout: ChainLayout, node: int):
    """Fermion and link sites of the node at lattice site ``node``."""
    g = layout.groups[node]
    f = g[0]
    link = g[1] if len(g) > 1 else None
    return f, link


def _u1_gauss(spec, layout, block, node):
    """G for the node at lattice site ``node`` (1-based node index node+1)."""
    L = int(spec.cutoff)
    e, _ = u1_link_matrices(L, spec.hopping)
    f, link = _u1_pieces(layout, node)
    g = -block.number(f, 0) - 0.5 * (_stagger(node + 1) - 1.0) * block.identity()
    if link is not None:
        g = g + block.embed(link, e)
    if node > 0:
        left_link = layout.groups[node - 1][1]
        g = g - block.embed(left_link, e)
    return g.tocsr()


def _lgt_hop(spec, layout, block, node):
    """Gauge-matter hopping through the link of lattice site ``node`` (no coupling)."""
    f_left, link = layout.groups[node][0], layout.groups[node][1]
    f_right = layout.groups[node + 1][0]
    if spec.family == U1_LGT:
        _, u = u1_link_matrices(int(spec.cutoff), spec.hopping)
        h = block.annihilator(f_left, 0).T @ block.embed(link, u) @ block.annihilator(f_right, 0)
    else:
        # at cutoff 0 every U^{ll'} truncates to zero
        us = su2_link_operators(spec.cutoff)["U"] if spec.cutoff >= 0.5 else _su2_u_cached(0)[2]
        h = sp.csr_matrix((block.dim, block.dim))
        for (l, lp), u in us.items():
            h = h + block.annihilator(f_left, l - 1).T @ block.embed(link, u) @ block.annihilator(f_right, lp - 1)
    return (h + h.conj().T).tocsr()


def _lgt_mass(spec, layout, block, node):
    f = layout.groups[node][0]
    modes = layout.sites[f].modes
    n = sum(block.number(f, k) for k in range(modes))
    return spec.couplings["g_M"] * _stagger(node + 1) * n


def _lgt_electric(spec, layout, block, node):
    link = layout.groups[node][1]
    if spec.family == U1_LGT:
        e, _ = u1_link_matrices(int(spec.cutoff), spec.hopping)
        e2 = e @ e
    else:
        e2 = _su2_u_cached(int(round(2 * spec.cutoff)))[1]
    return spec.couplings["g_E"] * block.embed(link, e2)


def _rogue(spec, layout, block, node):
    link = layout.groups[node][1]
    _, u = u1_link_matrices(int(spec.cutoff), spec.hopping)
    u2 = u @ u
    return spec.couplings["rogue_field"] * block.embed(link, (u2 + u2.T).tocsr())


def _hh_onsite(spec, layout, block, node):
    c = spec.couplings
    f, bos = layout.groups[node]
    b, n = boson_matrices(int(spec.cutoff))
    nup, ndn = block.number(f, 0), block.number(f, 1)
    out = c["U_hub"] * (nup @ ndn)
    out = out + c["omega0"] * block.embed(bos, n)
    out = out + c["g"] * block.embed(bos, (b + b.T).tocsr()) @ (nup + ndn - block.identity())
    return out


def _hh_walk(spec, layout, block, node):
    c = spec.couplings
    f, bos = layout.groups[node]
    b, _ = boson_matrices(int(spec.cutoff))
    nup, ndn = block.number(f, 0), block.number(f, 1)
    return c["g"] * block.embed(bos, (b + b.T).tocsr()) @ (nup + ndn - block.identity())


def _hh_hop(spec, layout, block, left):
    f_l, f_r = layout.groups[left][0], layout.groups[left + 1][0]
    h = sp.csr_matrix((block.dim, block.dim))
    for s in (0, 1):
        h = h + block.annihilator(f_l, s).T @ block.annihilator(f_r, s)
    return -spec.couplings["t_hop"] * (h + h.T)


def _term_matrix(spec: ModelSpec, layout: ChainLayout, x: int):
    """(support, sparse matrix) of H_x; for N = 1 the single on-site term uses x = 0."""
    N = spec.N
    c = spec.couplings
    if N == 1:
        support = layout.span(0, 0)
        block = Block(layout, support)
        if spec.family == HUBBARD_HOLSTEIN:
            return support, _hh_onsite(spec, layout, block, 0)
        m = _lgt_mass(spec, layout, block, 0)
        if spec.family == U1_LGT:
            g = _u1_gauss(spec, layout, block, 0)
            m = m + c["lambda_G"] * (g @ g)
        return support, m

    left, right = x - 1, x
    support = layout.span(left, right)
    block = Block(layout, support)
    if spec.family == HUBBARD_HOLSTEIN:
        m = _hh_hop(spec, layout, block, left) + _hh_onsite(spec, layout, block, left)
        if right == N - 1:
            m = m + _hh_onsite(spec, layout, block, right)
        return support, m

    m = _lgt_mass(spec, layout, block, left)
    m = m + c["g_GM"] * _lgt_hop(spec, layout, block, left)
    m = m + _lgt_electric(spec, layout, block, left)
    if right == N - 1:
        m = m + _lgt_mass(spec, layout, block, right)
    if spec.family == U1_LGT:
        g = _u1_gauss(spec, layout, block, right)
        m = m + c["lambda_G"] * (g @ g)
        if left == 0:
            g0 = _u1_gauss(spec, layout, block, 0)
            m = m + c["lambda_G"] * (g0 @ g0)
        if c["rogue_field"]:
            m = m + _rogue(spec, layout, block, left)
    return support, m


def term_indices(spec: ModelSpec) -> list:
    return [0] if spec.N == 1 else list(range(1, spec.N))


def local_terms(spec: ModelSpec, layout: ChainLayout | None = None) -> list:
    layout = chain_layout(spec) if layout is None else layout
    out = []
    for x in term_indices(spec):
        support, m = _term_matrix(spec, layout, x)
        out.append(LocalTerm(x, support, SparseHermitian.from_matrix(m)))
    return out


def check_size(layout: ChainLayout, cap: int | None = None) -> None:
    cap = LIMITS.max_state_dim if cap is None else cap
    if layout.dim > cap:
        raise CapExceeded("Hamiltonian", layout.dim, cap, layout.dims)


def assemble(layout: ChainLayout, terms) -> SparseHermitian:
    check_size(layout)
    total = None
    for t in terms:
        lifted = lift_block(layout, t.support, t.op)
        total = lifted if total is None else total + lifted
    return total


def build_hamiltonian(spec: ModelSpec):
    """Return ``(layout, H, terms)`` with ``H = sum of lifted terms``."""
    layout = chain_layout(spec)
    check_size(layout)
    terms = local_terms(spec, layout)
    return layout, assemble(layout, terms), terms


def gauss_operator(spec: ModelSpec, node: int) -> SparseHermitian:
    """Lifted Gauss operator G for the node on lattice site ``node`` (U(1) only)."""
    if spec.family != U1_LGT:
        raise ContractError("Gauss operators are only built for U1LGT")
    layout = chain_layout(spec)
    lo, hi = max(node - 1, 0), node
    support = layout.span(lo, hi)
    g = _u1_gauss(spec, layout, Block(layout, support), node)
    return lift_block(layout, support, SparseHermitian.from_matrix(g))


# ---------------------------------------------------------------------------
# assumption checks


@dataclass(frozen=True)
class WalkPreserveSplit:
    x: int
    H_W: SparseHermitian
    H_R: SparseHermitian
    measured_chi: float
    declared_r: float
    violation_a: float  # largest |<l|H_W|l'>| with |l - l'| > 1
    violation_c: float  # largest |<l|H_R|l'>| with l != l'

    @property
    def holds(self) -> bool:
        return self.violation_a <= 1e-12 and self.violation_c <= 1e-12


def walk_term(spec: ModelSpec, layout: ChainLayout, x: int):
    """(support, matrix) of the quantum-number-changing part at lattice site x."""
    if layout.qn_site[x] is None:
        return None
    if spec.family == HUBBARD_HOLSTEIN:
        support = layout.span(x, x)
        block = Block(layout, support)
        return support, _hh_walk(spec, layout, block, x)
    support = layout.span(x, x + 1)
    block = Block(layout, support)
    return support, spec.couplings["g_GM"] * _lgt_hop(spec, layout, block, x)


def _qn_of_states(layout: ChainLayout, x: int) -> np.ndarray:
    """Twice the quantum number of lattice site x for each basis state of the chain."""
    i = layout.qn_site[x]
    dims = layout.dims
    left = int(np.prod(dims[:i], dtype=object))
    right = int(np.prod(dims[i + 1 :], dtype=object))
    lam = np.asarray(layout.sites[i].lambda2)
    return np.tile(np.repeat(lam, right), left)


def _max_offending(m: SparseHermitian, lam2: np.ndarray, predicate) -> float:
    coo = m.upper.tocoo()
    bad = predicate(np.abs(lam2[coo.row] - lam2[coo.col]))
    return float(np.abs(coo.data[bad]).max()) if np.any(bad) else 0.0


def walk_preserve_split(spec: ModelSpec, x: int, H: SparseHermitian | None = None, strict: bool = True) -> WalkPreserveSplit:
    """Split ``H = H_W + H_R`` at lattice site x and check the growth conditions.

    With ``strict`` a violated condition raises :class:`ModelCheckError`;
    the audit passes ``strict=False`` to tabulate failures instead.
    """
    layout = chain_layout(spec)
    if not 0 <= x < spec.N or layout.qn_site[x] is None:
        raise ContractError(f"lattice site {x} carries no quantum number")
    if H is None:
        _, H, _ = build_hamiltonian(spec)
    support, w = walk_term(spec, layout, x)
    w_local = SparseHermitian.from_matrix(w)
    H_W = lift_block(layout, support, w_local)
    H_R = H - H_W
    lam2 = _qn_of_states(layout, x)
    viol_a = _max_offending(H_W, lam2, lambda d: d > 2)
    viol_c = _max_offending(H_R, lam2, lambda d: d > 0)
    r = DECLARED_R[spec.family]
    chi = measured_chi(spec, layout, x, support, w, r)
    split = WalkPreserveSplit(x, H_W, H_R, chi, r, viol_a, viol_c)
    if strict and not split.holds:
        raise ModelCheckError(
            f"walk/preserve split at site {x} violates the growth conditions "
            f"(|lambda-lambda'|>1 leak {viol_a:.3e}, H_R commutator leak {viol_c:.3e})"
        )
    return split


def measured_chi(spec, layout, x, support, w, r) -> float:
    """max over L' of ||H_W P_[-L',L']|| / (L'+1)^r, on the local support of H_W."""
    site = layout.sites[layout.qn_site[x]]
    top = int(np.floor(site.cutoff))
    # H_W P_L' is exact only while L'+1 is still inside the cutoff
    grid = range(0, top) if top >= 1 else range(0, 1)
    best = 0.0
    dense = sp.csr_matrix(w).toarray()
    for Lp in grid:
        masks = [
            window_mask(layout.sites[i], Lp) if i == layout.qn_site[x] else np.ones(layout.sites[i].dim, dtype=bool)
            for i in support
        ]
        keep = reduce(np.kron, [m.astype(float) for m in masks]).astype(bool)
        if not keep.any():
            continue
        n = np.linalg.norm(dense[:, keep], 2)
        best = max(best, n / (Lp + 1) ** r)
    return float(best)


def lattice_dim(spec: ModelSpec, cutoff) -> int:
    """Truncated dimension d(L) of one full lattice site (node + link or node + boson)."""
    lay = chain_layout(spec.with_cutoff(cutoff).with_N(max(spec.N, 2)))
    return lay.lattice_dim(0)


def truncated_norm(spec: ModelSpec, cutoff) -> float:
    """N(L) = max_x ||H_x|| with every site truncated at L (dense, on each term's support)."""
    s = spec.with_cutoff(cutoff)
    layout = chain_layout(s)
    best = 0.0
    for x in term_indices(s):
        _, m = _term_matrix(s, layout, x)
        best = max(best, _sparse_norm(sp.csr_matrix(m)))
    return best


def verify_assumption1(spec: ModelSpec, cutoffs) -> list:
    """Rows ``(L, d(L), N(L))``; raises if either column decreases."""
    cutoffs = list(cutoffs)
    if not cutoffs or cutoffs != sorted(cutoffs):
        raise ContractError("cutoff list must be non-empty and ascending")
    rows = [(L, lattice_dim(spec, L), truncated_norm(spec, L)) for L in cutoffs]
    for (_, d0, n0), (_, d1, n1) in zip(rows, rows[1:]):
        if d1 < d0 or n1 < n0 - 1e-9:
            raise ModelCheckError(f"d or N decreased along the cutoff table: {rows}")
    return rows
