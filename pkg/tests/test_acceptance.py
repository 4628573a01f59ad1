"""Acceptance criteria 1 to 12.

Each test logs one ``PASS``/``FAIL`` line (collected in the terminal summary
and printed immediately) and then asserts. Run directly with
``python3 tests/test_acceptance.py``.
"""

import math
import sys

import numpy as np
import pytest
import sympy as sp

from ejcm.bounds import (
    derivative_norm_bounds,
    first_order_bound_schrodinger,
    interaction_B,
    interaction_C,
    k_m,
    optimize_cost_first_order,
    optimize_cost_second_order,
    second_order_bound_schrodinger,
)
from ejcm.cli import interaction_error, main, numerical_slices
from ejcm.hamiltonian import build_interaction, build_schrodinger, term_counts
from ejcm.mixed import evolve_vectorized, trace_via_bell, unvectorize, vectorize
from ejcm.model import uniform, validate
from ejcm.partition import partition_structured, verify_partition
from ejcm.pauli import ladder_operator, number_operator, to_dense
from ejcm.resources import (
    BudgetConfig,
    ResourceError,
    resource_report,
    rz_precision_bits,
    select_distillery,
)
from ejcm.sim import (
    apply_schedule,
    coherent_state,
    error_metrics,
    exact_interaction_propagator,
    exact_unitary,
    jc_simulate,
    jc_survival,
    number_squared_operator,
)
from ejcm.trotter import schedule_first_order, schedule_second_order
from oracles import (
    NF1_K2_SUPPORT,
    REF_BOUND_ORDER1,
    REF_BOUND_ORDER2,
    brute_force_projection,
    direct_hamiltonian,
    direct_interaction,
    loglog_slope,
    number_squared_diag,
    random_density,
)

GRID = [(nf, k) for nf in range(1, 5) for k in range(1, 5)]
REF = uniform(3, 2)
NTS = [2**i for i in range(8)]


def record(log, n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    log.append(line)
    print(line)
    assert ok, line


def _freqs(nf, base=1.5, step=0.25):
    return [base + step * m for m in range(nf)]


def _params(nf, k, freqs=None, atom=1.0, g=None):
    return validate({"n_modes": nf, "trunc_bits": k, "mode_freqs": freqs or [1.0] * nf,
                     "atom_freq": atom, "couplings": g or [1.0] * nf})


def test_criterion_01_decomposition_counts(acceptance_log):
    bad = []
    brute = 0
    for nf, k in GRID:
        r = 2**k * k
        detuned = _params(nf, k, _freqs(nf))
        resonant = _params(nf, k)
        parts = build_schrodinger(detuned)
        tc = term_counts(detuned)
        checks = [
            len(ladder_operator(k)) == r,
            len(parts.h_int) == tc.N_P == nf * r,
            len(parts.total(include_shift=True)) == tc.M == nf * k + 2 + nf * r,
            len(build_interaction(detuned, 0.7)) == tc.N_I == 2 * nf * r,
            len(build_interaction(resonant, 0.7)) == term_counts(resonant).N_I == nf * r,
        ]
        if nf * k + 1 <= 5:
            brute += 1
            direct = direct_hamiltonian(nf, k, detuned.mode_freqs, 1.0, detuned.couplings)
            checks.append(len(brute_force_projection(direct)) == tc.M)
            di = direct_interaction(nf, k, detuned.mode_freqs, 1.0, detuned.couplings, 0.7)
            checks.append(len(brute_force_projection(di, tol=1e-10)) == tc.N_I)
        if not all(checks):
            bad.append((nf, k))
    record(acceptance_log, 1, not bad,
           f"counts exact on 16 grid points, {brute} brute-force projections; failures {bad}")


def test_criterion_02_dense_equivalence(acceptance_log):
    worst = 0.0
    for nf in (1, 2):
        for k in (1, 2):
            freqs, g = _freqs(nf, 1.2, 0.4), [0.8 + 0.3 * m for m in range(nf)]
            p = _params(nf, k, freqs, 1.0, g)
            H = to_dense(build_schrodinger(p).total(include_shift=True))
            worst = max(worst, np.abs(H - direct_hamiltonian(nf, k, freqs, 1.0, g)).max())
            for t in (0.0, 0.37, 1.0):
                Hi = to_dense(build_interaction(p, t))
                worst = max(worst, np.abs(Hi - direct_interaction(nf, k, freqs, 1.0, g, t)).max())
    record(acceptance_log, 2, worst <= 1e-10, f"max entry error {worst:.2e} (tol 1e-10)")


def test_criterion_03_partition_counts(acceptance_log):
    bad = []
    for nf, k in GRID:
        p = _params(nf, k, _freqs(nf))
        hs = build_schrodinger(p).h_int
        ps = partition_structured(hs, p)
        hi = build_interaction(p, 0.3)
        pi = partition_structured(hi, p, "interaction", 0.3)
        want_i = 2 * k if nf == 1 else 4 * k
        if not (ps.n_groups == 2 * k and pi.n_groups == want_i
                and verify_partition(hs, ps) and verify_partition(hi, pi)):
            bad.append((nf, k, ps.n_groups, pi.n_groups))
    support_ok = sorted(build_interaction(_params(1, 2, [1.5]), 0.3).labels) == NF1_K2_SUPPORT
    record(acceptance_log, 3, not bad and support_ok,
           f"2k / 4k groups on 16 grid points, all commuting; 16-string support "
           f"{'matches' if support_ok else 'differs'}; failures {bad}")


def test_criterion_04_reference_bound_columns(acceptance_log):
    worst = 0.0
    for n, r1, r2 in zip(NTS, REF_BOUND_ORDER1, REF_BOUND_ORDER2):
        b1 = first_order_bound_schrodinger(REF, 8, 1.0, n).epsilon_bound
        b2 = second_order_bound_schrodinger(REF, 8, 1.0, n).epsilon_bound
        worst = max(worst, abs(b1 / r1 - 1), abs(b2 / r2 - 1))
    record(acceptance_log, 4, worst <= 5e-3, f"max relative deviation {worst:.2e} (tol 5e-3)")


def test_criterion_05_bound_validity_and_orders(acceptance_log):
    parts = build_schrodinger(REF)
    part = partition_structured(parts.h_int, REF)
    U = exact_unitary(to_dense(parts.total()), 1.0)
    rng = np.random.default_rng(0)
    psi = rng.normal(size=U.shape[0]) + 1j * rng.normal(size=U.shape[0])
    psi /= np.linalg.norm(psi)
    valid, dominated, slopes = True, True, {}
    for order, make, bound in ((1, schedule_first_order, first_order_bound_schrodinger),
                               (2, schedule_second_order, second_order_bound_schrodinger)):
        errs = []
        for n in NTS:
            m = error_metrics(make(parts, part, 1.0, n), U, psi)
            valid &= m.operator_error <= bound(REF, 8, 1.0, n).epsilon_bound
            dominated &= m.state_error <= m.operator_error + 1e-12
            errs.append(m.operator_error)
        slopes[order] = loglog_slope(NTS[3:], errs[3:])
    ok = (valid and dominated and -1.2 <= slopes[1] <= -0.8 and -2.2 <= slopes[2] <= -1.8)
    record(acceptance_log, 5, ok,
           f"error <= bound on all cells: {valid}; state <= operator: {dominated}; "
           f"slopes {slopes[1]:.3f} (order 1), {slopes[2]:.3f} (order 2)")


def test_criterion_06_jc_analytic(acceptance_log):
    times = np.linspace(0.0, 2 * math.pi, 64)
    dev = {}
    for delta in (0.0, 1.0):
        ana = jc_survival(1.0, delta, times)
        for n in (512, 4096):
            dev[(delta, n)] = float(np.abs(jc_simulate(1.0, delta, times, n) - ana).max())
    ok = all(v <= (1e-2 if n == 512 else 1e-3) for (_, n), v in dev.items())
    detail = ", ".join(f"delta={d:g} N_T={n}: {v:.2e}" for (d, n), v in dev.items())
    record(acceptance_log, 6, ok, detail)


def test_criterion_07_interaction_order_two(acceptance_log):
    p = _params(3, 2, [1.5] * 3)
    ref = exact_interaction_propagator(p, 1.0)
    Ls = [8, 16, 32, 64, 128]
    slope = loglog_slope(Ls, [interaction_error(p, 1.0, L, ref=ref) for L in Ls])
    pairs = []
    for eps in (0.1, 0.05, 0.01):
        theo = optimize_cost_second_order(p, 8, 1.0, eps).L
        pairs.append((eps, numerical_slices(p, 1.0, eps, ref=ref), theo))
    ok = -2.2 <= slope <= -1.8 and all(num <= theo for _, num, theo in pairs)
    record(acceptance_log, 7, ok,
           f"slope {slope:.3f}; (eps, L_num, L_theo) {pairs}")


def test_criterion_08_optimizer_algebra(acceptance_log):
    rng = np.random.default_rng(2024)
    t_s, e_s, A_s, B_s, K_s, C_s, N_s = sp.symbols("t eps A B K C N", positive=True)
    c1 = t_s**2 * (A_s + 2 * B_s) * N_s / (2 * e_s)
    c2 = t_s ** sp.Rational(3, 2) * sp.sqrt(K_s + C_s) * (2 * N_s - 1) / sp.sqrt(e_s)
    worst, nt_ok = 0.0, True
    for _ in range(100):
        nf, k = int(rng.integers(1, 5)), int(rng.integers(1, 4))
        p = validate({"n_modes": nf, "trunc_bits": k,
                      "mode_freqs": list(rng.uniform(0.5, 2.0, nf)),
                      "atom_freq": 1.0, "couplings": list(rng.uniform(0.1, 2.0, nf))})
        t, eps, G = float(rng.uniform(0.1, 5)), float(10 ** rng.uniform(-4, -0.5)), int(rng.integers(2, 13))
        p1 = optimize_cost_first_order(p, G, t, eps)
        p2 = optimize_cost_second_order(p, G, t, eps)
        subs = {t_s: t, e_s: eps, A_s: derivative_norm_bounds(p)["A"], B_s: interaction_B(p, G),
                N_s: term_counts(p).N_I, K_s: k_m(p), C_s: interaction_C(p, G)}
        nt_ok &= p1.N_T == 1 and p2.N_T == 1
        worst = max(worst, abs(p1.continuous_cost / float(c1.subs(subs)) - 1),
                    abs(p2.continuous_cost / float(c2.subs(subs)) - 1))
    record(acceptance_log, 8, nt_ok and worst <= 1e-12,
           f"N_T = 1 on all draws: {nt_ok}; max relative cost deviation {worst:.2e}")


def test_criterion_09_mixed_consistency(acceptance_log):
    pure_err, norm_err = 0.0, 0.0
    for nf, k in ((1, 1), (1, 2), (1, 3), (3, 1)):
        p = uniform(nf, k)
        parts = build_schrodinger(p)
        s = schedule_second_order(parts, partition_structured(parts.h_int, p), 0.8, 4)
        rng = np.random.default_rng(nf * 7 + k)
        d = 1 << p.n_qubits
        psi = rng.normal(size=d) + 1j * rng.normal(size=d)
        psi /= np.linalg.norm(psi)
        phi = apply_schedule(s, psi)
        out = evolve_vectorized(s, vectorize(np.outer(psi, psi.conj())))
        pure_err = max(pure_err, np.abs(unvectorize(out) - np.outer(phi, phi.conj())).max())
        w = evolve_vectorized(s, vectorize(random_density(d, rng, rank=2)))
        norm_err = max(norm_err, abs(np.linalg.norm(w) - 1))
    rng = np.random.default_rng(99)
    tr_err = 0.0
    for _ in range(100):
        d = 2 ** int(rng.integers(1, 5))
        rho = random_density(d, rng, rank=int(rng.integers(1, d + 1)))
        tr_err = max(tr_err, abs(trace_via_bell(vectorize(rho)) * np.linalg.norm(rho)
                                 - np.trace(rho).real))
    ok = pure_err <= 1e-8 and tr_err <= 1e-12 and norm_err <= 1e-10
    record(acceptance_log, 9, ok,
           f"pure-state error {pure_err:.2e}, trace error {tr_err:.2e}, norm drift {norm_err:.2e}")


def test_criterion_10_observables(acceptance_log):
    worst = 0.0
    for k in (1, 2, 3):
        worst = max(worst,
                    np.abs(np.diag(to_dense(number_operator(k))).real - np.arange(2**k)).max(),
                    np.abs(np.diag(to_dense(number_squared_operator(k))).real
                           - number_squared_diag(k)).max())
    v = coherent_state(1.0, 4)
    mean_dev = abs(float(np.abs(v) ** 2 @ np.arange(16)) - 1.0)
    record(acceptance_log, 10, worst <= 1e-10 and mean_dev <= 1e-3,
           f"Pauli forms vs diagonal oracle {worst:.2e}; coherent mean deviation {mean_dev:.2e}")


def test_criterion_11_resource_thresholds(acceptance_log):
    flips = (select_distillery(6e-15).name == "nested15_20"
             and select_distillery(math.nextafter(6e-15, 0)).name == "nested15_15"
             and select_distillery(1.5e-21).name == "nested15_15")
    try:
        select_distillery(math.nextafter(1.5e-21, 0))
        errors_below = False
    except ResourceError:
        errors_below = True
    cfg = BudgetConfig()
    third = cfg.eps_total / 3
    invariants = True
    for n in [1, 3, 50, 999, 10**4, 10**6, 10**8]:
        rep = resource_report(n, 41, cfg, raw_rotations=True)
        invariants &= (rep.n_Rz * rep.eps_Rz <= third * (1 + 1e-12)
                       and rep.n_T * rep.p_out_achieved <= third * (1 + 1e-12))
    eps = 1e-3
    bits = [rz_precision_bits(eps / 2**i)["bits"] for i in range(30)]
    halving = all(b1 - b0 == 1 for b0, b1 in zip(bits, bits[1:]))
    record(acceptance_log, 11, flips and errors_below and invariants and halving,
           f"flip at 6e-15: {flips}; error below 1.5e-21: {errors_below}; "
           f"budget thirds: {invariants}; one bit per halving: {halving}")


def test_criterion_12_determinism(acceptance_log, capsys):
    runs = [("simulate", "--nt", "4,16", "--seeds", "1,2"),
            ("simulate", "--nt", "4,16", "--ordering", "randomized", "--seeds", "3,4"),
            ("simulate", "--nt", "4", "--ordering", "randomized", "--seeds", "5", "--jobs", "2"),
            ("bound",), ("jc", "--points", "16", "--nt", "64"), ("mixed", "--nt", "4")]
    same = []
    for argv in runs:
        bodies = []
        for _ in range(2):
            code = main(list(argv))
            out = capsys.readouterr().out
            bodies.append((code, out.split("\n", 1)[1]))
        same.append(bodies[0] == bodies[1] and bodies[0][0] == 0)
    record(acceptance_log, 12, all(same), f"{sum(same)}/{len(same)} sweeps byte-identical")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
