import numpy as np
import pytest

from arealaw.errors import CapExceeded
from arealaw.models import ModelSpec, build_hamiltonian
from arealaw.oracle import assemble_dense, dense_schmidt, dense_solve, enumerate_basis, permutation


CASES = [
    ModelSpec("U1LGT", 2, 2),
    ModelSpec("U1LGT", 3, 2, hopping="raising"),
    ModelSpec("U1LGT", 3, 1, {"rogue_field": 0.3}),
    ModelSpec("SU2LGT", 2, 1),
    ModelSpec("SU2LGT", 3, 0.5),
    ModelSpec("HubbardHolstein", 2, 3),
]


@pytest.mark.parametrize("spec", CASES, ids=lambda s: f"{s.family}-N{s.N}-L{s.cutoff}")
def test_oracle_matches_models(spec):
    _, H, _ = build_hamiltonian(spec)
    assert np.abs(assemble_dense(spec) - H.to_dense()).max() <= 1e-12


def test_permutation_is_bijection():
    b = enumerate_basis(ModelSpec("HubbardHolstein", 2, 2))
    assert sorted(permutation(b)) == list(range(b.dim))


def test_single_node_u1():
    # one node, no links: only the staggered mass on the odd site
    spec = ModelSpec("U1LGT", 1, 0, {"g_M": 0.8, "lambda_G": 0.0})
    assert np.allclose(assemble_dense(spec), np.diag([0.0, -0.8]))


def test_oracle_cap():
    with pytest.raises(CapExceeded):
        enumerate_basis(ModelSpec("HubbardHolstein", 3, 8))


def test_dense_solve_reconstruction():
    res = dense_solve(assemble_dense(ModelSpec("U1LGT", 3, 1)))
    assert res.reconstruction_error() <= 1e-12
    assert np.all(np.diff(res.eigenvalues) >= 0)


def test_dense_schmidt_normalized(rng):
    v = rng.standard_normal(12)
    v /= np.linalg.norm(v)
    assert dense_schmidt(v, 3, 4).sum() == pytest.approx(1.0)
