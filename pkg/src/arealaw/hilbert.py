"""Truncated local Hilbert spaces, quantum-number projectors and chain layouts.

Quantum numbers are stored as twice their value (``lambda2``) so half-integer
SU(2) labels compare exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import ContractError
from .linalg import SparseHermitian, kron_compose

U1_LINK = "U1Link"
SU2_LINK = "SU2Link"
BOSON = "BosonMode"
FERMION = "FermionModes"


def _twice(value) -> int:
    f = Fraction(value).limit_denominator(2) * 2
    if f.denominator != 1 or abs(float(f) - 2 * float(value)) > 1e-9:
        raise ContractError(f"{value} is not an integer or half-integer")
    return int(f)


@dataclass(frozen=True)
class LocalSite:
    kind: str
    cutoff2: int  # twice the cutoff
    basis_labels: tuple
    lambda2: tuple  # twice the quantum number of each basis label
    modes: int = 0  # fermionic mode count (FermionModes only)

    @property
    def dim(self) -> int:
        return len(self.basis_labels)

    @property
    def cutoff(self) -> float:
        return self.cutoff2 / 2

    @property
    def lambda_values(self) -> np.ndarray:
        return np.asarray(self.lambda2, dtype=float) / 2

    @property
    def carries_qn(self) -> bool:
        return self.kind != FERMION

    def index(self, label) -> int:
        return self.basis_labels.index(label)


def u1_link_site(cutoff: int) -> LocalSite:
    if cutoff < 0 or int(cutoff) != cutoff:
        raise ContractError("U(1) cutoff must be a non-negative integer")
    ks = tuple(range(-int(cutoff), int(cutoff) + 1))
    return LocalSite(U1_LINK, 2 * int(cutoff), ks, tuple(2 * k for k in ks))


def boson_site(cutoff: int) -> LocalSite:
    if cutoff < 0 or int(cutoff) != cutoff:
        raise ContractError("boson cutoff must be a non-negative integer")
    ns = tuple(range(int(cutoff) + 1))
    return LocalSite(BOSON, 2 * int(cutoff), ns, tuple(2 * n for n in ns))


def su2_link_site(cutoff) -> LocalSite:
    """Rigid-rotator link truncated to total angular momentum j <= cutoff.

    Labels are ``(2j, 2m, 2m')`` ordered by ascending j, then (m, m').
    """
    c2 = _twice(cutoff)
    if c2 < 0:
        raise ContractError("SU(2) cutoff must be non-negative")
    labels, lam = [], []
    for j2 in range(0, c2 + 1):
        ms = range(-j2, j2 + 1, 2)
        for m2, mp2 in product(ms, ms):
            labels.append((j2, m2, mp2))
            lam.append(j2)
    return LocalSite(SU2_LINK, c2, tuple(labels), tuple(lam))


def fermion_site(modes: int) -> LocalSite:
    """``modes`` fermionic modes; basis labels are occupation tuples, mode 0 slowest."""
    if modes < 1:
        raise ContractError("need at least one mode")
    labels = tuple(product((0, 1), repeat=modes))
    return LocalSite(FERMION, 0, labels, (0,) * len(labels), modes=modes)


def su2_dim(cutoff) -> int:
    c2 = _twice(cutoff)
    return sum((j2 + 1) ** 2 for j2 in range(c2 + 1))


def _selector(site: LocalSite, values=None, interval=None) -> np.ndarray:
    lam2 = np.asarray(site.lambda2)
    if values is None and interval is None:
        raise ContractError("give a value set or an interval")
    keep = np.ones(site.dim, dtype=bool)
    if values is not None:
        want = {_twice(v) for v in values}
        keep &= np.array([l in want for l in lam2], dtype=bool)
    if interval is not None:
        lo, hi = interval
        keep &= (lam2 >= 2 * lo - 1e-9) & (lam2 <= 2 * hi + 1e-9)
    return keep


def site_projector(site: LocalSite, values=None, interval=None) -> SparseHermitian:
    """Spectral projector of the local quantum number onto a value set and/or closed interval."""
    return SparseHermitian.diagonal(_selector(site, values, interval).astype(float))


def window_mask(site: LocalSite, cutoff) -> np.ndarray:
    """Basis states with |lambda| <= cutoff."""
    return _selector(site, interval=(-float(cutoff), float(cutoff)))


def quantum_number_operator(site: LocalSite) -> SparseHermitian:
    return SparseHermitian.diagonal(site.lambda_values)


@dataclass(frozen=True)
class ChainLayout:
    """Ordered local sites grouped into the lattice sites of the model.

    ``groups[x]`` lists the local-site indices that make up lattice site x,
    and ``qn_site[x]`` is the index of the factor carrying the quantum number
    (None when the lattice site has none, e.g. the last U(1) node).
    ``fermion_order`` enumerates (local site, mode) pairs in Jordan-Wigner order.
    """

    sites: tuple
    groups: tuple
    qn_site: tuple
    fermion_order: tuple = field(default=())

    def __post_init__(self):
        flat = [i for g in self.groups for i in g]
        if flat != list(range(len(self.sites))):
            raise ContractError("groups must partition the local sites in order")
        expected = [(i, m) for i, s in enumerate(self.sites) if s.kind == FERMION for m in range(s.modes)]
        order = list(self.fermion_order) or expected
        if sorted(order) != sorted(expected) or len(set(order)) != len(order):
            raise ContractError("fermion_order must list every fermionic mode exactly once")
        object.__setattr__(self, "fermion_order", tuple(order))

    @classmethod
    def simple(cls, sites) -> ChainLayout:
        """One lattice site per local site."""
        sites = tuple(sites)
        return cls(
            sites,
            tuple((i,) for i in range(len(sites))),
            tuple(i if s.carries_qn else None for i, s in enumerate(sites)),
        )

    @property
    def dims(self) -> list:
        return [s.dim for s in self.sites]

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=object))

    @property
    def n_lattice(self) -> int:
        return len(self.groups)

    def lattice_dim(self, x: int) -> int:
        return int(np.prod([self.sites[i].dim for i in self.groups[x]]))

    def cut_after(self, x: int) -> int:
        """Local-site boundary index for a cut between lattice sites x and x+1."""
        return self.groups[x][-1] + 1

    def span(self, first: int, last: int) -> tuple:
        """Local-site indices covering lattice sites first..last inclusive."""
        return tuple(i for x in range(first, last + 1) for i in self.groups[x])

    def replace_sites(self, new_sites: dict) -> ChainLayout:
        sites = tuple(new_sites.get(i, s) for i, s in enumerate(self.sites))
        return ChainLayout(sites, self.groups, self.qn_site, self.fermion_order)

    def to_dict(self) -> dict:
        return {
            "sites": [
                {"kind": s.kind, "cutoff": s.cutoff, "modes": s.modes} for s in self.sites
            ],
            "groups": [list(g) for g in self.groups],
            "qn_site": list(self.qn_site),
        }


def site_from_dict(d: dict) -> LocalSite:
    kind = d["kind"]
    if kind == U1_LINK:
        return u1_link_site(int(d["cutoff"]))
    if kind == BOSON:
        return boson_site(int(d["cutoff"]))
    if kind == SU2_LINK:
        return su2_link_site(d["cutoff"])
    if kind == FERMION:
        return fermion_site(int(d["modes"]))
    raise ContractError(f"unknown site kind {kind!r}")


def layout_from_dict(d: dict) -> ChainLayout:
    return ChainLayout(
        tuple(site_from_dict(s) for s in d["sites"]),
        tuple(tuple(g) for g in d["groups"]),
        tuple(d["qn_site"]),
    )


def lift_to_chain(layout: ChainLayout, x: int, a: SparseHermitian, max_dim: int | None = None) -> SparseHermitian:
    """Embed an operator on local site x into the whole chain."""
    if a.dim != layout.sites[x].dim:
        raise ContractError(f"operator dim {a.dim} does not match site {x} dim {layout.sites[x].dim}")
    return lift_block(layout, (x,), a, max_dim)


def lift_block(layout: ChainLayout, support, a: SparseHermitian, max_dim: int | None = None) -> SparseHermitian:
    """Embed an operator on a contiguous block of local sites into the chain."""
    support = tuple(support)
    if support != tuple(range(support[0], support[-1] + 1)):
        raise ContractError("support must be contiguous")
    dims = layout.dims
    block = int(np.prod([dims[i] for i in support]))
    if a.dim != block:
        raise ContractError(f"operator dim {a.dim} does not match block dim {block}")
    left = int(np.prod(dims[: support[0]], dtype=object))
    right = int(np.prod(dims[support[-1] + 1 :], dtype=object))
    factors = []
    if left > 1:
        factors.append(SparseHermitian.identity(left))
    factors.append(a)
    if right > 1:
        factors.append(SparseHermitian.identity(right))
    return kron_compose(factors, max_dim)
