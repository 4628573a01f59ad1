import numpy as np
import pytest

from ejcm.hamiltonian import build_interaction, build_schrodinger, interaction_tags, term_counts
from ejcm.model import uniform, validate
from ejcm.pauli import PauliSum, project_to_pauli, to_dense
from oracles import direct_hamiltonian, direct_interaction


def _params(nf, k, freqs=None, atom=1.0, g=None):
    return validate({"n_modes": nf, "trunc_bits": k, "mode_freqs": freqs or [1.0] * nf,
                     "atom_freq": atom, "couplings": g or [1.0] * nf})


def test_single_qubit_mode_coupling():
    parts = build_schrodinger(uniform(1, 1))
    # sign of YY follows from a sigma_plus + h.c. with a = (X + iY) / 2
    assert parts.h_int.allclose(PauliSum([(0.5, "XX"), (-0.5, "YY")], 2))


def test_reference_instance_string_count():
    parts = build_schrodinger(uniform(3, 2))
    tc = term_counts(uniform(3, 2))
    assert tc.M == 32
    assert len(parts.h_photon) + len(parts.h_atom) + 1 + len(parts.h_int) == 32


def test_zero_coupling_gives_empty_interaction():
    assert len(build_schrodinger(_params(2, 2, g=[0.0, 0.0])).h_int) == 0


@pytest.mark.parametrize("nf, k", [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3)])
def test_dense_total_matches_direct_matrix(nf, k):
    freqs = [0.9 + 0.3 * m for m in range(nf)]
    g = [0.7 - 0.2 * m for m in range(nf)]
    p = _params(nf, k, freqs, 1.1, g)
    H = to_dense(build_schrodinger(p).total(include_shift=True))
    assert np.abs(H - direct_hamiltonian(nf, k, freqs, 1.1, g)).max() < 1e-12


def test_interaction_resonant_is_static():
    p = uniform(2, 2)
    h0 = build_schrodinger(p).h_int
    for t in (0.0, 0.3, 2.0):
        assert build_interaction(p, t).allclose(h0)


@pytest.mark.parametrize(
    "freqs, expected", [([1.5, 0.5], 32), ([1.0, 1.0], 16), ([1.0, 2.0], 24)]
)
def test_interaction_counts(freqs, expected):
    p = _params(2, 2, freqs)
    assert len(build_interaction(p, 0.7)) == expected
    assert term_counts(p).N_I == expected


def test_interaction_at_zero_equals_coupling_term():
    p = _params(2, 2, [1.5, 0.5])
    assert len(build_interaction(p, 0.0)) == term_counts(p).N_I_t0 == 16


@pytest.mark.parametrize("t", [0.0, 0.37, 1.0])
def test_conjugation_identity(t):
    freqs = [1.4, 0.6]
    p = _params(2, 1, freqs, 1.0, [0.8, 1.2])
    Hi = to_dense(build_interaction(p, t))
    assert np.abs(Hi - direct_interaction(2, 1, freqs, 1.0, [0.8, 1.2], t)).max() < 1e-10


def test_interaction_is_hermitian_and_tagged():
    p = _params(2, 2, [1.3, 0.2])
    h = build_interaction(p, 0.9)
    assert h.is_hermitian()
    tags = interaction_tags(p, 0.9)
    assert set(tags) == set(h.labels)


def test_term_counts_examples():
    assert term_counts(uniform(3, 2)).N_P == 24
    tc = term_counts(uniform(1, 3))
    assert (tc.N_P, tc.N_Z) == (24, 4)
    assert term_counts(uniform(1, 1)).M == 5


def test_projection_of_direct_matrix_matches_builder():
    p = _params(1, 2, [1.2], 1.0, [0.6])
    direct = direct_hamiltonian(1, 2, [1.2], 1.0, [0.6])
    proj = project_to_pauli(direct)
    assert proj.allclose(build_schrodinger(p).total(include_shift=True), tol=1e-12)
