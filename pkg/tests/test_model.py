import json
import math

import pytest

from ejcm.model import ParamError, derive, lambda_k, load_params, uniform, validate


def test_minimal_instance():
    p = validate({"n_modes": 1, "trunc_bits": 1, "mode_freqs": [1], "atom_freq": 1, "couplings": [1]})
    assert p.n_qubits == 2
    assert p.atom_qubit == 1


def test_reference_instance_has_seven_qubits():
    assert uniform(3, 2).n_qubits == 7


def test_length_mismatch_rejected():
    with pytest.raises(ParamError, match="length mismatch"):
        validate({"n_modes": 2, "trunc_bits": 2, "mode_freqs": [1, 1], "atom_freq": 1,
                  "couplings": [1]})


@pytest.mark.parametrize(
    "raw",
    [
        {"n_modes": 0, "trunc_bits": 1, "mode_freqs": [], "atom_freq": 1, "couplings": []},
        {"n_modes": 1, "trunc_bits": 0, "mode_freqs": [1], "atom_freq": 1, "couplings": [1]},
        {"n_modes": 1.5, "trunc_bits": 1, "mode_freqs": [1], "atom_freq": 1, "couplings": [1]},
        {"n_modes": 1, "trunc_bits": 1, "mode_freqs": [float("nan")], "atom_freq": 1,
         "couplings": [1]},
        {"n_modes": 1, "trunc_bits": 1, "mode_freqs": [1], "couplings": [1]},
        {"n_modes": 1, "trunc_bits": 1, "mode_freqs": "1", "atom_freq": 1, "couplings": [1]},
        {"n_modes": True, "trunc_bits": 1, "mode_freqs": [1], "atom_freq": 1, "couplings": [1]},
    ],
)
def test_invalid_records_raise(raw):
    with pytest.raises(ParamError):
        validate(raw)


def test_lambda_k_value_and_monotonicity():
    assert lambda_k(2) == pytest.approx(5**1.5 - 1)
    assert lambda_k(2) == pytest.approx(10.1803, abs=1e-4)
    vals = [lambda_k(k) for k in range(1, 12)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    # ratio to the asymptotic form tends to one
    k = 30
    assert (lambda_k(k) / (3 * 2**k)) / (math.sqrt(2**k) / 3) == pytest.approx(1, rel=1e-3)


def test_derive_resonant_and_cutoff():
    d = derive(validate({"n_modes": 2, "trunc_bits": 3, "mode_freqs": [1, 1], "atom_freq": 1,
                         "couplings": [0.5, -2]}))
    assert d.M0 == 2
    assert d.delta_max == 0
    assert d.n == 7
    assert d.gamma_max == 2


def test_resonance_uses_exact_equality_by_default():
    raw = {"n_modes": 1, "trunc_bits": 1, "mode_freqs": [1 + 1e-15], "atom_freq": 1,
           "couplings": [1]}
    assert derive(validate(raw)).M0 == 0
    assert derive(validate(raw | {"resonance_tol": 1e-12})).M0 == 1


def test_load_params_round_trip(tmp_path):
    p = uniform(2, 2, omega=1.5)
    path = tmp_path / "p.json"
    path.write_text(json.dumps(p.to_dict()))
    assert load_params(path) == p


def test_load_params_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ParamError):
        load_params(path)
