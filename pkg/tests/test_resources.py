import math

import pytest

from ejcm.bounds import optimize_cost_second_order
from ejcm.model import validate
from ejcm.resources import (
    BudgetConfig,
    ResourceError,
    allocate_budget,
    code_distance,
    factory_output,
    logical_error_rate,
    resource_report,
    rz_precision_bits,
    select_distillery,
    t_count_per_rotation,
)


def test_allocate_budget_thirds():
    b = allocate_budget(BudgetConfig(eps_total=0.03), 10, 100)
    assert b["eps_Rz"] == pytest.approx(1e-3)
    assert b["p_out_req"] == pytest.approx(1e-4)
    assert b["clifford_budget"] == pytest.approx(1e-2)
    with pytest.raises(ResourceError):
        allocate_budget(BudgetConfig(), 0, 1)


def test_precision_bits_examples():
    assert rz_precision_bits(2**-25) == {"bits": 28, "q": 2**28}
    assert rz_precision_bits(0.5)["bits"] == 4
    with pytest.raises(ResourceError):
        rz_precision_bits(1.0)


def test_precision_bits_one_per_halving():
    eps = 3e-4
    prev = rz_precision_bits(eps)["bits"]
    for _ in range(20):
        eps /= 2
        cur = rz_precision_bits(eps)["bits"]
        assert cur == prev + 1
        prev = cur


def test_t_count_per_rotation():
    assert t_count_per_rotation(2**-10, BudgetConfig()) == 30
    assert t_count_per_rotation(0.9, BudgetConfig()) == 1


def test_factory_selection():
    assert select_distillery(1e-13).name == "nested15_20"
    assert select_distillery(1e-16).name == "nested15_15"
    assert select_distillery(6e-15).name == "nested15_20"
    assert select_distillery(math.nextafter(6e-15, 0)).name == "nested15_15"
    assert select_distillery(1.5e-21).name == "nested15_15"
    with pytest.raises(ResourceError):
        select_distillery(1e-22)
    with pytest.raises(ResourceError):
        select_distillery(0.0)
    with pytest.raises(ResourceError):
        factory_output("nested20_20", 1e-3)


def test_factory_model_values():
    f = factory_output("nested15_20", 1e-3)
    assert f.p_out_model == pytest.approx(5.5 * (35e-9) ** 2)
    assert f.p_out_cap == pytest.approx(6e-15)
    g = factory_output("nested15_15", 2e-3)
    assert g.p_out_cap == pytest.approx(1.5e-21 * 2**9)


def test_code_distance():
    cfg = BudgetConfig()
    assert code_distance(1.0, 1.0, cfg) == 3
    assert code_distance(2.24e11, 3.3e-3, cfg) == 25
    ds = [code_distance(v, 3.3e-3, cfg) for v in (1e3, 1e6, 1e9, 1e12, 1e15)]
    assert ds == sorted(ds) and all(d % 2 == 1 for d in ds)
    d = code_distance(1e9, 1e-3, cfg)
    assert 1e9 * logical_error_rate(d, cfg) <= 1e-3 < 1e9 * logical_error_rate(d - 2, cfg)
    with pytest.raises(ResourceError):
        code_distance(1e300, 1e-300, cfg)


def test_budget_config_validation():
    with pytest.raises(ResourceError):
        BudgetConfig(eps_total=0)
    with pytest.raises(ResourceError):
        BudgetConfig(eps_total=1.5)
    with pytest.raises(ResourceError):
        BudgetConfig(storage_capacity=0)


@pytest.mark.parametrize("n_rz", [1, 17, 10**4, 10**7])
def test_report_invariants(n_rz):
    cfg = BudgetConfig()
    rep = resource_report(n_rz, 41, cfg, raw_rotations=True)
    third = cfg.eps_total / 3
    assert rep.n_Rz * rep.eps_Rz <= third * (1 + 1e-12)
    assert rep.n_T * rep.p_out_achieved <= third * (1 + 1e-12)
    assert rep.volume * logical_error_rate(rep.distance, cfg) <= third
    assert rep.physical_qubits == (2 + rep.storage_devices) * 400 * 2 * rep.distance**2


def test_zero_rotations():
    rep = resource_report(0, 9)
    assert rep.n_T == 0 and rep.factory is None and rep.distance == 3


def test_overestimation_division():
    rep = resource_report(101, 9)
    assert rep.n_Rz == 3


def test_large_instance_precision_soft_check():
    # N_F=10, k=4, resonant, second order, eps=0.25, t=1: reference precision is 28 bits.
    p = validate({"n_modes": 10, "trunc_bits": 4, "mode_freqs": [1000.0] * 10,
                  "atom_freq": 1000.0, "couplings": [1.0] * 10})
    plan = optimize_cost_second_order(p, 8, 1.0, 0.25)
    rep = resource_report(plan.total_cost, p.n_qubits)
    assert abs(rep.precision_bits - 28) <= 2
    assert rep.factory == "nested15_20"
