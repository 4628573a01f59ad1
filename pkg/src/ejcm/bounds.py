"""Closed-form Trotter and time-discretisation bounds and cost optimisers.

All algebra is done in floating point; integers appear only at the final
ceiling. ``G`` is the number of commuting families of the coupling term.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any

from .hamiltonian import term_counts
from .model import ModelParams, derive

__all__ = [
    "BoundReport",
    "CostPlan",
    "schrodinger_B",
    "schrodinger_C",
    "interaction_B",
    "interaction_C",
    "first_order_bound_schrodinger",
    "second_order_bound_schrodinger",
    "first_order_bound_interaction",
    "derivative_norm_bounds",
    "time_slice_count",
    "optimize_cost_first_order",
    "optimize_cost_second_order",
    "gate_cost_schrodinger",
    "crossover_map",
    "k_m",
    "BoundError",
    "default_family_count",
]


class BoundError(ValueError):
    pass


@dataclass(frozen=True)
class BoundReport:
    picture: str
    order: int
    epsilon_bound: float
    inputs: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class CostPlan:
    order: int
    x_opt: float | None
    L: int
    N_T: int
    total_cost: int
    continuous_cost: float
    per_step: int
    scalars: dict[str, float] = field(default_factory=dict)
    degenerate: bool = False

    def to_json(self) -> dict[str, Any]:
        return asdict(self)


def _ceil(x: float) -> int:
    """Ceiling that ignores float noise and never drops below one."""
    if not math.isfinite(x):
        raise BoundError(f"non-finite count {x}")
    return max(1, math.ceil(x - 1e-12 * abs(x)))


def _check_g(G: int) -> None:
    if G < 1:
        raise BoundError(f"G must be >= 1, got {G}")


def _check_nt(N_T: int) -> None:
    if N_T < 1:
        raise BoundError(f"N_T must be >= 1, got {N_T}")


def _check_eps(eps: float) -> None:
    if not eps > 0:
        raise BoundError(f"eps must be > 0, got {eps}")


def default_family_count(params: ModelParams) -> int:
    """Family count of the generic time-dependent coupling: ``2k`` for one mode, else ``4k``."""
    k = params.trunc_bits
    return 2 * k if params.n_modes == 1 else 4 * k


def _intra(params: ModelParams, G: int, denom: float) -> float:
    d = derive(params)
    nf, k = params.n_modes, params.trunc_bits
    return d.gamma_max**2 * d.Lambda_k**2 * nf**2 * k**2 * (G - 1) / (denom * G)


def schrodinger_B(params: ModelParams, G: int) -> float:
    """First-order prefactor: intra-coupling part plus the two cross terms."""
    _check_g(G)
    d = derive(params)
    nf = params.n_modes
    cross = 0.5 * nf * d.omega_max * d.gamma_max * math.sqrt(d.n)
    cross += nf * d.omega_max * d.gamma_max * d.n**1.5
    return _intra(params, G, 72.0) + cross


def schrodinger_C(params: ModelParams, G: int) -> float:
    """Second-order prefactor for the Schrodinger picture."""
    _check_g(G)
    d = derive(params)
    nf, k, n = params.n_modes, params.trunc_bits, d.n
    g, w = d.gamma_max, d.omega_max
    intra = g**3 * 2 * d.Lambda_k**3 * nf**3 * k**3 * (G - 1) * (G - 2) / (12 * 324 * G**2)
    cross = (1 + 2 * n) * math.sqrt(n) * nf * w * g
    cross *= 2 * math.sqrt(n) * nf * g + 0.5 * (1 + 2 * n * nf) * w
    return intra + cross / 12


def interaction_B(params: ModelParams, G: int) -> float:
    _check_g(G)
    return _intra(params, G, 18.0)


def interaction_C(params: ModelParams, G: int) -> float:
    """Second-order prefactor for the interaction picture.

    Only the intra-family term applies (there is no free-evolution split),
    scaled by the same factor 4 that relates the first-order interaction
    prefactor to the Schrodinger one.
    """
    _check_g(G)
    d = derive(params)
    nf, k = params.n_modes, params.trunc_bits
    return (4 * d.gamma_max**3 * 2 * d.Lambda_k**3 * nf**3 * k**3 * (G - 1) * (G - 2)
            / (12 * 324 * G**2))


def first_order_bound_schrodinger(params: ModelParams, G: int, T: float, N_T: int) -> BoundReport:
    _check_nt(N_T)
    B = schrodinger_B(params, G)
    return BoundReport("schrodinger", 1, T**2 / N_T * B,
                       {"T": T, "N_T": N_T, "G": G, "B": B, "Lambda_k": derive(params).Lambda_k})


def second_order_bound_schrodinger(params: ModelParams, G: int, T: float, N_T: int) -> BoundReport:
    _check_nt(N_T)
    C = schrodinger_C(params, G)
    return BoundReport("schrodinger", 2, T**3 / N_T**2 * C,
                       {"T": T, "N_T": N_T, "G": G, "C": C, "Lambda_k": derive(params).Lambda_k})


def first_order_bound_interaction(params: ModelParams, G: int, dt: float, N_T: int) -> BoundReport:
    _check_nt(N_T)
    B = interaction_B(params, G)
    return BoundReport("interaction", 1, dt**2 / N_T * B,
                       {"dt": dt, "N_T": N_T, "G": G, "B": B, "Lambda_k": derive(params).Lambda_k})


def derivative_norm_bounds(params: ModelParams) -> dict[str, float]:
    """Bounds on ``||H_I'||``, ``||H_I''||`` and ``||[H_I', H_I]||``."""
    d = derive(params)
    gd = sum(abs(g * dl) for g, dl in zip(params.couplings, d.delta_m))
    gdd = sum(abs(g) * dl**2 for g, dl in zip(params.couplings, d.delta_m))
    gs = sum(abs(g) for g in params.couplings)
    rn = math.sqrt(d.n)
    return {"A": 2 * rn * gd, "Hpp": 2 * rn * gdd, "Comm": 8 * d.n * gd * gs}


def time_slice_count(params: ModelParams, t: float, eps: float, order: int,
                     halved: bool = False) -> int:
    """Slices needed for the time-discretisation error alone.

    Order 1 uses ``A t^2 / eps`` (``A t^2 / (2 eps)`` with ``halved``);
    order 2 uses ``sqrt(K t^3 / eps)`` with ``K = Hpp/24 + Comm/12``.
    """
    _check_eps(eps)
    if t <= 0:
        raise BoundError(f"t must be > 0, got {t}")
    nb = derivative_norm_bounds(params)
    if order == 1:
        val = nb["A"] * t**2 / eps
        return _ceil(val / 2 if halved else val)
    if order == 2:
        K = nb["Hpp"] / 24 + nb["Comm"] / 12
        return _ceil(math.sqrt(K * t**3 / eps))
    raise BoundError(f"order must be 1 or 2, got {order}")


def _n_interaction_strings(params: ModelParams) -> int:
    return term_counts(params).N_I


def optimize_cost_first_order(params: ModelParams, G: int, t: float, eps: float) -> CostPlan:
    """Error split ``x`` between slicing and Trotter that minimises cost with ``N_T = 1``."""
    _check_eps(eps)
    A = derivative_norm_bounds(params)["A"]
    B = interaction_B(params, G)
    n_i = _n_interaction_strings(params)
    scalars = {"A": A, "B": B, "G": float(G), "N_I": float(n_i),
               "Lambda_k": derive(params).Lambda_k}
    if A == 0.0:
        n_t = _ceil(t**2 * B / eps)
        return CostPlan(1, None, 1, n_t, n_t * n_i, t**2 * B * n_i / eps, n_i, scalars, True)
    x_opt = A / (A + 2 * B)
    L = _ceil((A + 2 * B) * t**2 / (2 * eps))
    cont = t**2 * (A + 2 * B) * n_i / (2 * eps)
    return CostPlan(1, x_opt, L, 1, L * n_i, cont, n_i, scalars)


def k_m(params: ModelParams) -> float:
    d = derive(params)
    nf, g, dm = params.n_modes, d.gamma_max, d.delta_max
    return math.sqrt(d.n) * nf * g * dm**2 / 12 + 2 * d.n * nf**2 * g**2 * dm / 3


def optimize_cost_second_order(params: ModelParams, G: int, t: float, eps: float) -> CostPlan:
    _check_eps(eps)
    K = k_m(params)
    C = interaction_C(params, G)
    n_i = _n_interaction_strings(params)
    m_s2 = 2 * n_i - 1
    scalars = {"K_M": K, "C": C, "G": float(G), "N_I": float(n_i), "M_S2": float(m_s2),
               "Lambda_k": derive(params).Lambda_k}
    if K == 0.0:
        n_t = _ceil(t**1.5 * math.sqrt(C / eps))
        return CostPlan(2, None, 1, n_t, n_t * m_s2, t**1.5 * math.sqrt(C / eps) * m_s2,
                        m_s2, scalars, True)
    x_opt = K / (K + C)
    root = math.sqrt(K + C)
    L = _ceil(root * t**1.5 / math.sqrt(eps))
    cont = t**1.5 * root * m_s2 / math.sqrt(eps)
    return CostPlan(2, x_opt, L, 1, L * m_s2, cont, m_s2, scalars)


def gate_cost_schrodinger(params: ModelParams, G: int, T: float, eps: float,
                          order: int) -> dict[str, float]:
    """Trotter number and RZ count needed to reach ``eps`` in the Schrodinger picture."""
    _check_eps(eps)
    tc = term_counts(params)
    per_step = tc.N_Z + tc.N_P
    if order == 1:
        B = schrodinger_B(params, G)
        n_t = _ceil(T**2 * B / eps)
        return {"order": 1, "N_T": n_t, "rotations": per_step * n_t, "per_step": per_step, "B": B}
    if order == 2:
        C = schrodinger_C(params, G)
        n_t = _ceil(T**1.5 * math.sqrt(C / eps))
        return {"order": 2, "N_T": n_t, "rotations": 2 * per_step * n_t,
                "per_step": 2 * per_step, "C": C}
    raise BoundError(f"order must be 1 or 2, got {order}")


def crossover_map(params: ModelParams, G: int, times: list[float],
                  epsilons: list[float]) -> list[list[int]]:
    """Cheaper order (1 or 2) by continuous cost on a ``times x epsilons`` grid."""
    out = []
    for t in times:
        row = []
        for eps in epsilons:
            c1 = optimize_cost_first_order(params, G, t, eps).continuous_cost
            c2 = optimize_cost_second_order(params, G, t, eps).continuous_cost
            row.append(2 if c2 < c1 else 1)
        out.append(row)
    return out
