"""Fault-tolerant budget arithmetic.

The total logical error is split in three equal parts: rotation synthesis,
magic-state infidelity, and Clifford/idle errors over the space-time volume.
Only the budget-driven quantities are derived; layout constants (factory
footprints, storage capacity, tock costs) are explicit configuration.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any

__all__ = [
    "ResourceError",
    "BudgetConfig",
    "Factory",
    "ResourceReport",
    "allocate_budget",
    "rz_precision_bits",
    "t_count_per_rotation",
    "factory_output",
    "select_distillery",
    "logical_error_rate",
    "code_distance",
    "resource_report",
    "FACTORIES",
]

MAX_DISTANCE = 101
PATCHES_PER_DEVICE = 20 * 20
COMPUTE_DEVICES = 2
P_PHYS_REF = 1e-3


class ResourceError(ValueError):
    pass


@dataclass(frozen=True)
class BudgetConfig:
    """Error budget and modelling constants.

    ``A`` and ``p_th`` parametrise ``p_L(d) = A (p_phys / p_th)^((d + 1) / 2)``.
    ``t_per_rz_slope`` and ``t_per_rz_offset`` give the T count of one
    synthesised rotation as ``slope * log2(1 / eps_Rz) + offset``.
    """

    eps_total: float = 1e-2
    p_phys: float = 1e-3
    overestimation_factor: float = 50.0
    A: float = 0.1
    p_th: float = 1e-2
    t_per_rz_slope: float = 3.0
    t_per_rz_offset: float = 0.0
    tocks_per_t: float = 1.0
    tocks_per_rotation: float = 0.0
    storage_capacity: int = 256
    factory_footprint: dict[str, int] = field(
        default_factory=lambda: {"nested15_20": 204, "nested15_15": 258})

    def __post_init__(self) -> None:
        for name in ("eps_total", "p_phys", "overestimation_factor", "A", "p_th"):
            if not getattr(self, name) > 0:
                raise ResourceError(f"{name} must be positive")
        if not self.eps_total < 1:
            raise ResourceError("eps_total must be < 1")
        if self.storage_capacity < 1:
            raise ResourceError("storage_capacity must be >= 1")


@dataclass(frozen=True)
class Factory:
    name: str
    p_out_model: float
    p_out_cap: float


@dataclass(frozen=True)
class ResourceReport:
    n_Rz: int
    n_T: int
    eps_Rz: float
    precision_bits: int
    q: int
    p_out_req: float
    factory: str | None
    p_out_achieved: float
    volume: float
    tocks: float
    distance: int
    logical_qubits: int
    storage_devices: int
    physical_qubits: int
    budget: dict[str, float]
    assumptions: dict[str, Any]

    def to_json(self) -> dict[str, Any]:
        return asdict(self)

    def check(self, cfg: BudgetConfig) -> None:
        third = cfg.eps_total / 3
        if self.n_Rz * self.eps_Rz > third * (1 + 1e-12):
            raise ResourceError("rotation budget exceeded")
        if self.n_T * self.p_out_achieved > third * (1 + 1e-12):
            raise ResourceError("distillation budget exceeded")


def _count(n: int, name: str, allow_zero: bool = False) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise ResourceError(f"{name} must be an integer")
    if n < (0 if allow_zero else 1):
        raise ResourceError(f"{name} must be >= {0 if allow_zero else 1}, got {n}")
    return int(n)


def allocate_budget(cfg: BudgetConfig, n_Rz: int, n_T: int) -> dict[str, float]:
    n_Rz = _count(n_Rz, "n_Rz")
    n_T = _count(n_T, "n_T")
    third = cfg.eps_total / 3
    return {"eps_Rz": third / n_Rz, "p_out_req": third / n_T, "clifford_budget": third}


def rz_precision_bits(eps_Rz: float) -> dict[str, int]:
    """Bits of the rational angle approximation ``p / q`` with three guard bits."""
    if not 0 < eps_Rz < 1:
        raise ResourceError(f"eps_Rz must be in (0, 1), got {eps_Rz}")
    lg = -math.log2(eps_Rz)
    bits = math.ceil(lg - 1e-12) + 3
    return {"bits": bits, "q": 2**bits}


def t_count_per_rotation(eps_Rz: float, cfg: BudgetConfig) -> int:
    if not 0 < eps_Rz < 1:
        raise ResourceError(f"eps_Rz must be in (0, 1), got {eps_Rz}")
    return max(1, math.ceil(cfg.t_per_rz_slope * math.log2(1 / eps_Rz) + cfg.t_per_rz_offset))


def _d15(p: float) -> float:
    return 35 * p**3


def _d20(p: float) -> float:
    return 5.5 * p**2


_MODEL = {
    "nested15_20": lambda p: _d20(_d15(p)),
    "nested15_15": lambda p: _d15(_d15(p)),
}
_QUOTED_CAP = {"nested15_20": 6e-15, "nested15_15": 1.5e-21}
FACTORIES = ("nested15_20", "nested15_15")


def factory_output(name: str, p_phys: float) -> Factory:
    """Modelled output infidelity and the capability used for selection.

    The capability equals the quoted value at ``p_phys = 1e-3`` and follows
    the modelled scaling elsewhere.
    """
    if name not in _MODEL:
        raise ResourceError(f"unknown factory {name!r}")
    model = _MODEL[name](p_phys)
    cap = _QUOTED_CAP[name] * (model / _MODEL[name](P_PHYS_REF))
    return Factory(name, model, cap)


def select_distillery(p_out_req: float, p_phys: float = P_PHYS_REF) -> Factory:
    """Cheapest nested factory whose capability meets ``p_out_req``."""
    if not p_out_req > 0:
        raise ResourceError(f"p_out_req must be > 0, got {p_out_req}")
    for name in FACTORIES:
        f = factory_output(name, p_phys)
        if p_out_req >= f.p_out_cap:
            return f
    best = factory_output(FACTORIES[-1], p_phys).p_out_cap
    raise ResourceError(f"p_out_req={p_out_req:.3e} unachievable (best modelled {best:.3e})")


def logical_error_rate(d: int, cfg: BudgetConfig) -> float:
    return cfg.A * (cfg.p_phys / cfg.p_th) ** ((d + 1) / 2)


def code_distance(volume: float, clifford_budget: float, cfg: BudgetConfig | None = None) -> int:
    """Smallest odd ``d >= 3`` with ``volume * p_L(d) <= clifford_budget``."""
    cfg = cfg or BudgetConfig()
    if not volume > 0:
        raise ResourceError(f"volume must be > 0, got {volume}")
    for d in range(3, MAX_DISTANCE + 1, 2):
        if volume * logical_error_rate(d, cfg) <= clifford_budget:
            return d
    raise ResourceError(f"no odd distance <= {MAX_DISTANCE} meets the Clifford budget")


def resource_report(n_Rz: int, n_qubits: int, cfg: BudgetConfig | None = None,
                    raw_rotations: bool = False) -> ResourceReport:
    """Assemble a report for a circuit with ``n_Rz`` rotations on ``n_qubits`` data qubits.

    Unless ``raw_rotations`` is set, ``n_Rz`` is a bound-derived count and is
    divided by the overestimation factor first.
    """
    cfg = cfg or BudgetConfig()
    n_Rz = _count(n_Rz, "n_Rz", allow_zero=True)
    n_qubits = _count(n_qubits, "n_qubits")
    if not raw_rotations:
        n_Rz = math.ceil(n_Rz / cfg.overestimation_factor) if n_Rz else 0
    third = cfg.eps_total / 3
    storage = math.ceil(n_qubits / cfg.storage_capacity)
    assumptions = {k: v for k, v in asdict(cfg).items()}
    assumptions |= {"compute_devices": COMPUTE_DEVICES, "patches_per_device": PATCHES_PER_DEVICE,
                    "raw_rotations": raw_rotations}
    if n_Rz == 0:
        d = 3
        phys = (COMPUTE_DEVICES + storage) * PATCHES_PER_DEVICE * 2 * d * d
        return ResourceReport(0, 0, third, 0, 1, third, None, 0.0, 0.0, 0.0, d, n_qubits,
                              storage, phys, {"third": third}, assumptions)
    budget = allocate_budget(cfg, n_Rz, 1)
    eps_Rz = budget["eps_Rz"]
    prec = rz_precision_bits(eps_Rz)
    n_T = n_Rz * t_count_per_rotation(eps_Rz, cfg)
    p_req = third / n_T
    fac = select_distillery(p_req, cfg.p_phys)
    p_ach = min(fac.p_out_model, fac.p_out_cap)
    tocks = n_T * cfg.tocks_per_t + n_Rz * cfg.tocks_per_rotation
    logical = n_qubits + cfg.factory_footprint[fac.name]
    volume = logical * tocks
    d = code_distance(volume, third, cfg)
    phys = (COMPUTE_DEVICES + storage) * PATCHES_PER_DEVICE * 2 * d * d
    rep = ResourceReport(n_Rz, n_T, eps_Rz, prec["bits"], prec["q"], p_req, fac.name, p_ach,
                         volume, tocks, d, logical, storage, phys,
                         {"eps_Rz": eps_Rz, "p_out_req": p_req, "clifford_budget": third},
                         assumptions)
    rep.check(cfg)
    return rep
