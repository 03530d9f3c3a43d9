"""Brute-force reference Hamiltonians built by enumerating basis labels.

Nothing here is shared with :mod:`arealaw.models`: states are tuples of
fermion occupations and link/boson labels, enumerated in a different order
(bosonic labels slowest), and matrix elements come straight from the
second-quantized rules with explicit Jordan-Wigner signs.  SU(2) link matrix
elements use sympy's Clebsch-Gordan coefficients.  ``model_index`` maps an
oracle state to the row of the same state in the chain ordering used by the
models, so the two matrices can be compared entrywise.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import sqrt

import numpy as np

from .errors import CapExceeded, ContractError

ORACLE_CAP = 4000


@dataclass(frozen=True)
class OracleBasis:
    family: str
    N: int
    modes_per_node: int
    bos_labels: tuple  # allowed labels of each bosonic factor
    n_bos: int
    states: tuple  # (occupations, bosonic labels)

    @property
    def dim(self) -> int:
        return len(self.states)


def _labels(family: str, cutoff):
    if family == "U1LGT":
        L = int(cutoff)
        return tuple(range(-L, L + 1))
    if family == "HubbardHolstein":
        return tuple(range(int(cutoff) + 1))
    c = Fraction(cutoff).limit_denominator(2)
    out = []
    j = Fraction(0)
    while j <= c:
        ms = [-j + k for k in range(int(2 * j) + 1)]
        out += [(j, m, mp) for m in ms for mp in ms]
        j += Fraction(1, 2)
    return tuple(out)


def enumerate_basis(spec) -> OracleBasis:
    fam, N = spec.family, spec.N
    modes = {"U1LGT": 1, "SU2LGT": 2, "HubbardHolstein": 2}[fam]
    n_bos = N if fam == "HubbardHolstein" else N - 1
    labels = _labels(fam, spec.cutoff)
    dim = (len(labels) ** n_bos) * 2 ** (modes * N)
    if dim > ORACLE_CAP:
        raise CapExceeded("oracle basis", dim, ORACLE_CAP)
    states = tuple(
        (occ, bos)
        for bos in product(labels, repeat=n_bos)
        for occ in product((0, 1), repeat=modes * N)
    )
    return OracleBasis(fam, N, modes, labels, n_bos, states)


def model_index(basis: OracleBasis, state) -> int:
    """Row of ``state`` in the chain ordering F_1, B_1, F_2, B_2, ..., mode 0 and lowest label slowest."""
    occ, bos = state
    m = basis.modes_per_node
    nb = len(basis.bos_labels)
    idx = 0
    for node in range(basis.N):
        f = 0
        for k in range(m):
            f = 2 * f + occ[node * m + k]
        idx = idx * 2**m + f
        if node < basis.n_bos:
            idx = idx * nb + basis.bos_labels.index(bos[node])
    return idx


def permutation(basis: OracleBasis) -> np.ndarray:
    return np.array([model_index(basis, s) for s in basis.states])


# ---------------------------------------------------------------------------
# second-quantized moves


def _annihilate(occ, mode):
    if not occ[mode]:
        return None
    sign = -1 if sum(occ[:mode]) % 2 else 1
    new = list(occ)
    new[mode] = 0
    return sign, tuple(new)


def _create(occ, mode):
    if occ[mode]:
        return None
    sign = -1 if sum(occ[:mode]) % 2 else 1
    new = list(occ)
    new[mode] = 1
    return sign, tuple(new)


def _hop(occ, to_mode, from_mode):
    """c^dagger_to c_from |occ>; returns (sign, occ') or None."""
    a = _annihilate(occ, from_mode)
    if a is None:
        return None
    b = _create(a[1], to_mode)
    if b is None:
        return None
    return a[0] * b[0], b[1]


@lru_cache(maxsize=None)
def _cg(j1, m1, j2, m2, J, M) -> float:
    from sympy import Rational
    from sympy.physics.quantum.cg import CG

    R = lambda q: Rational(q.numerator, q.denominator)  # noqa: E731
    return float(CG(R(j1), R(m1), R(j2), R(m2), R(J), R(M)).doit())


def _su2_u(label, a, b, labels):
    """Nonzero ``(new_label, amplitude)`` of the rotator component U^{ab} on |j m m'>."""
    j, m, mp = label
    half = Fraction(1, 2)
    out = []
    for J in (j - half, j + half):
        new = (J, m + a, mp + b)
        if J < 0 or new not in labels:
            continue
        amp = sqrt((2 * j + 1) / (2 * J + 1)) * _cg(j, m, half, a, J, m + a) * _cg(j, mp, half, b, J, mp + b)
        if amp:
            out.append((new, amp))
    return out


def _stag(node: int) -> int:
    return -1 if node % 2 else 1


def _elements(spec, basis: OracleBasis, state):
    """Yield (target_state, amplitude) for H|state>, including the diagonal."""
    occ, bos = state
    c = spec.couplings
    N, m = basis.N, basis.modes_per_node
    fam = basis.family
    diag = 0.0
    if fam == "HubbardHolstein":
        for x in range(N):
            up, dn = occ[2 * x], occ[2 * x + 1]
            diag += c["U_hub"] * up * dn + c["omega0"] * bos[x]
            # phonon displacement coupled to the local charge
            for nb, amp in ((bos[x] + 1, sqrt(bos[x] + 1)), (bos[x] - 1, sqrt(bos[x]))):
                if nb in basis.bos_labels and amp:
                    new_bos = bos[:x] + (nb,) + bos[x + 1 :]
                    yield (occ, new_bos), c["g"] * amp * (up + dn - 1)
        for x in range(N - 1):
            for s in (0, 1):
                for to, fr in ((2 * x + s, 2 * (x + 1) + s), (2 * (x + 1) + s, 2 * x + s)):
                    h = _hop(occ, to, fr)
                    if h:
                        yield (h[1], bos), -c["t_hop"] * h[0]
        yield state, diag
        return

    # gauge theories: node x (1-based) has modes m*(x-1)..; link x joins nodes x and x+1
    for x in range(1, N + 1):
        n = sum(occ[m * (x - 1) + k] for k in range(m))
        diag += c["g_M"] * _stag(x) * n
    if fam == "U1LGT":
        for x in range(1, N):
            diag += c["g_E"] * bos[x - 1] ** 2
        for x in range(1, N + 1):
            e_right = bos[x - 1] if x <= N - 1 else 0
            e_left = bos[x - 2] if x >= 2 else 0
            rho = occ[x - 1] + (_stag(x) - 1) / 2
            diag += c["lambda_G"] * (e_right - e_left - rho) ** 2
        step = -1 if spec.hopping == "lowering" else 1
        for x in range(1, N):
            k = bos[x - 1]
            # psi_x^dagger U psi_{x+1}, then its adjoint
            if k + step in basis.bos_labels:
                h = _hop(occ, x - 1, x)
                if h:
                    yield (h[1], bos[: x - 1] + (k + step,) + bos[x:]), c["g_GM"] * h[0]
            if k - step in basis.bos_labels:
                h = _hop(occ, x, x - 1)
                if h:
                    yield (h[1], bos[: x - 1] + (k - step,) + bos[x:]), c["g_GM"] * h[0]
            rogue = c.get("rogue_field", 0.0)
            if rogue:
                for d in (2, -2):
                    if k + d in basis.bos_labels:
                        yield (occ, bos[: x - 1] + (k + d,) + bos[x:]), rogue
    else:
        labels = set(basis.bos_labels)
        spins = {0: Fraction(1, 2), 1: Fraction(-1, 2)}
        for x in range(1, N):
            j = bos[x - 1][0]
            diag += c["g_E"] * float(j * (j + 1))
            for l, a in spins.items():
                for lp, b in spins.items():
                    to, fr = 2 * (x - 1) + l, 2 * x + lp
                    h = _hop(occ, to, fr)
                    if h:
                        for new, amp in _su2_u(bos[x - 1], a, b, labels):
                            yield (h[1], bos[: x - 1] + (new,) + bos[x:]), c["g_GM"] * h[0] * amp
                    # adjoint: psi_{x+1}^dagger U^dagger psi_x, via the transposed elements
                    h = _hop(occ, fr, to)
                    if h:
                        for old in labels:
                            for new, amp in _su2_u(old, a, b, labels):
                                if new == bos[x - 1]:
                                    yield (h[1], bos[: x - 1] + (old,) + bos[x:]), c["g_GM"] * h[0] * amp
    yield state, diag


def assemble_dense(spec, model_order: bool = True) -> np.ndarray:
    """Dense Hamiltonian; with ``model_order`` rows follow the models' chain basis."""
    basis = enumerate_basis(spec)
    index = {s: i for i, s in enumerate(basis.states)}
    h = np.zeros((basis.dim, basis.dim))
    for col, s in enumerate(basis.states):
        for target, amp in _elements(spec, basis, s):
            h[index[target], col] += amp
    if np.abs(h - h.T).max() > 1e-13:
        raise ContractError("oracle Hamiltonian is not symmetric")
    if not model_order:
        return h
    perm = permutation(basis)
    out = np.zeros_like(h)
    out[np.ix_(perm, perm)] = h
    return out


@dataclass(frozen=True)
class DenseOracleResult:
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruction_error(self) -> float:
        v, w = self.eigenvectors, self.eigenvalues
        return float(np.abs(self.matrix - (v * w) @ v.conj().T).max())


def dense_solve(matrix: np.ndarray) -> DenseOracleResult:
    w, v = np.linalg.eigh(matrix)
    return DenseOracleResult(matrix, w, v)


def dense_schmidt(psi: np.ndarray, left: int, right: int) -> np.ndarray:
    """Squared singular values of the (left x right) reshaped state, full SVD."""
    u, s, vh = np.linalg.svd(psi.reshape(left, right), full_matrices=True)
    return s**2
