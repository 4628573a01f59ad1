"""Physical parameters of an extended Jaynes-Cummings instance.

Units are natural (hbar = 1). The register layout used across the package:
mode ``m`` (1-based) owns qubits ``[(m - 1) * k, m * k)`` and the atom is the
last qubit ``N_F * k``. Inside a mode, qubit ``j`` carries binary weight
``2 ** (k - 1 - j)``, so the first qubit of a mode is its most significant bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

__all__ = [
    "ModelParams",
    "DerivedScalars",
    "ParamError",
    "validate",
    "derive",
    "load_params",
    "lambda_k",
    "uniform",
]


class ParamError(ValueError):
    """Raised when a parameter record cannot be turned into ``ModelParams``."""


@dataclass(frozen=True)
class ModelParams:
    n_modes: int
    trunc_bits: int
    mode_freqs: tuple[float, ...]
    atom_freq: float
    couplings: tuple[float, ...]
    resonance_tol: float = field(default=0.0, compare=True)

    @property
    def n_cutoff(self) -> int:
        return 2**self.trunc_bits - 1

    @property
    def n_qubits(self) -> int:
        return self.n_modes * self.trunc_bits + 1

    @property
    def atom_qubit(self) -> int:
        return self.n_modes * self.trunc_bits

    def mode_qubits(self, mode: int) -> range:
        """Qubit indices of ``mode`` (1-based)."""
        if not 1 <= mode <= self.n_modes:
            raise ParamError(f"mode {mode} out of range 1..{self.n_modes}")
        k = self.trunc_bits
        return range((mode - 1) * k, mode * k)

    def detunings(self) -> tuple[float, ...]:
        return tuple(w - self.atom_freq for w in self.mode_freqs)

    def is_resonant(self, mode: int) -> bool:
        delta = self.mode_freqs[mode - 1] - self.atom_freq
        if self.resonance_tol == 0.0:
            return delta == 0.0
        return abs(delta) <= self.resonance_tol

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "n_modes": self.n_modes,
            "trunc_bits": self.trunc_bits,
            "mode_freqs": list(self.mode_freqs),
            "atom_freq": self.atom_freq,
            "couplings": list(self.couplings),
        }
        if self.resonance_tol:
            out["resonance_tol"] = self.resonance_tol
        return out


@dataclass(frozen=True)
class DerivedScalars:
    n: int
    omega_max: float
    gamma_max: float
    delta_m: tuple[float, ...]
    delta_max: float
    M0: int
    Lambda_k: float


def lambda_k(k: int) -> float:
    """``(2^k + 1)^{3/2} - 1``, the ladder-coefficient scale."""
    return (2**k + 1) ** 1.5 - 1.0


def _as_int(raw: Mapping[str, Any], key: str) -> int:
    if key not in raw:
        raise ParamError(f"missing field {key!r}")
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParamError(f"{key} must be an integer, got {value!r}")
    if isinstance(value, float):
        if not value.is_integer():
            raise ParamError(f"{key} must be an integer, got {value!r}")
        value = int(value)
    return int(value)


def _as_real(value: Any, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParamError(f"{key} must be real, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ParamError(f"{key} must be finite, got {value!r}")
    return value


def _as_reals(raw: Mapping[str, Any], key: str) -> tuple[float, ...]:
    if key not in raw:
        raise ParamError(f"missing field {key!r}")
    values = raw[key]
    if isinstance(values, (str, bytes)) or not isinstance(values, Sequence):
        raise ParamError(f"{key} must be a list of reals")
    return tuple(_as_real(v, f"{key}[{i}]") for i, v in enumerate(values))


def validate(raw: Mapping[str, Any] | ModelParams) -> ModelParams:
    """Check a parameter record and return an immutable ``ModelParams``.

    Nothing is clamped: any inconsistency raises ``ParamError``.
    """
    if isinstance(raw, ModelParams):
        raw = raw.to_dict() | {"resonance_tol": raw.resonance_tol}
    n_modes = _as_int(raw, "n_modes")
    k = _as_int(raw, "trunc_bits")
    if n_modes < 1:
        raise ParamError(f"n_modes must be >= 1, got {n_modes}")
    if k < 1:
        raise ParamError(f"trunc_bits must be >= 1, got {k}")
    freqs = _as_reals(raw, "mode_freqs")
    couplings = _as_reals(raw, "couplings")
    if len(freqs) != n_modes or len(couplings) != n_modes:
        raise ParamError(
            "length mismatch: n_modes="
            f"{n_modes}, mode_freqs={len(freqs)}, couplings={len(couplings)}"
        )
    if "atom_freq" not in raw:
        raise ParamError("missing field 'atom_freq'")
    atom = _as_real(raw["atom_freq"], "atom_freq")
    tol = _as_real(raw.get("resonance_tol", 0.0), "resonance_tol")
    if tol < 0:
        raise ParamError("resonance_tol must be >= 0")
    return ModelParams(n_modes, k, freqs, atom, couplings, tol)


def derive(params: ModelParams) -> DerivedScalars:
    deltas = params.detunings()
    m0 = sum(1 for m in range(1, params.n_modes + 1) if params.is_resonant(m))
    return DerivedScalars(
        n=params.n_cutoff,
        omega_max=max([abs(w) for w in params.mode_freqs] + [abs(params.atom_freq)]),
        gamma_max=max(abs(g) for g in params.couplings),
        delta_m=deltas,
        delta_max=max(abs(d) for d in deltas),
        M0=m0,
        Lambda_k=lambda_k(params.trunc_bits),
    )


def uniform(n_modes: int, k: int, omega: float = 1.0, atom: float = 1.0,
            gamma: float = 1.0) -> ModelParams:
    """Instance with identical modes; handy for sweeps and tests."""
    return validate({
        "n_modes": n_modes,
        "trunc_bits": k,
        "mode_freqs": [omega] * n_modes,
        "atom_freq": atom,
        "couplings": [gamma] * n_modes,
    })


def load_params(path: str | Path) -> ModelParams:
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParamError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ParamError(f"{path}: expected a JSON object")
    return validate(raw)
