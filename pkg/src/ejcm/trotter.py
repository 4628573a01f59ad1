"""Trotter schedules and their lowering to a CNOT-ladder gate list.

A schedule is a time-ordered list of steps. Each step holds Pauli
exponentials ``exp(-i * theta * P)``; a step is either the diagonal free
evolution layer or one commuting group of the coupling term.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .hamiltonian import (
    HamiltonianParts,
    build_interaction,
    build_schrodinger,
    interaction_tags,
)
from .model import ModelParams
from .partition import CommutingPartition, partition_structured, verify_partition
from .pauli import PauliSum

__all__ = [
    "ScheduleStep",
    "TrotterSchedule",
    "Gate",
    "GateList",
    "ScheduleError",
    "suzuki_u",
    "schedule_first_order",
    "schedule_second_order",
    "schedule_higher_order",
    "schedule_interaction",
    "schedule_blocks",
    "lower_to_gates",
    "controlled",
]

DIAG = -1


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class ScheduleStep:
    """Pauli exponentials ``exp(-i theta P)`` applied left to right.

    ``group`` is the commuting-group id, or ``DIAG`` (-1) for the diagonal
    free-evolution layer.
    """

    group: int
    terms: tuple[tuple[float, str], ...]
    time: float | None = None

    @property
    def is_diagonal(self) -> bool:
        return self.group == DIAG


@dataclass
class TrotterSchedule:
    steps: list[ScheduleStep]
    n_qubits: int
    metadata: dict[str, Any] = field(default_factory=dict)

    def n_rotations(self) -> int:
        return sum(1 for st in self.steps for _, lbl in st.terms if set(lbl) != {"I"})

    def total_angle(self, label: str) -> float:
        return sum(th for st in self.steps for th, lbl in st.terms if lbl == label)

    def to_json(self) -> dict[str, Any]:
        return {
            "n_qubits": self.n_qubits,
            "metadata": self.metadata,
            "steps": [
                {"group": st.group, "time": st.time, "terms": [[th, lbl] for th, lbl in st.terms]}
                for st in self.steps
            ],
        }


def _hermitian_terms(block: PauliSum) -> list[tuple[float, str]]:
    out = []
    for c, s in block:
        if s.is_identity:
            continue
        if abs(c.imag) > 1e-12:
            raise ScheduleError(f"non-Hermitian coefficient {c} on {s.label}")
        out.append((c.real, s.label))
    return out


def _blocks_from(parts: HamiltonianParts, partition: CommutingPartition) -> list[list[tuple[float, str]]]:
    if not verify_partition(parts.h_int, partition):
        raise ScheduleError("partition does not cover the coupling term with commuting groups")
    terms = parts.h_int.terms
    blocks = [_hermitian_terms(parts.h0)]
    for g in partition.groups:
        blocks.append(_hermitian_terms(PauliSum([terms[i] for i in g], parts.n_qubits)))
    return blocks


def _ordered(blocks: list[list[tuple[float, str]]], ids: list[int],
             rng: np.random.Generator | None) -> list[tuple[int, list[tuple[float, str]]]]:
    """Blocks in emission order; ``rng`` shuffles group order and term order."""
    pairs = list(zip(ids, blocks))
    if rng is None:
        return pairs
    diag = [p for p in pairs if p[0] == DIAG]
    groups = [p for p in pairs if p[0] != DIAG]
    perm = rng.permutation(len(groups))
    out = []
    for gid, blk in diag + [groups[i] for i in perm]:
        order = rng.permutation(len(blk))
        out.append((gid, [blk[i] for i in order]))
    return out


def _scaled(blk: Sequence[tuple[float, str]], tau: float) -> tuple[tuple[float, str], ...]:
    return tuple((c * tau, lbl) for c, lbl in blk)


def _s1(blocks, ids, tau, rng, time=None) -> list[ScheduleStep]:
    return [ScheduleStep(gid, _scaled(blk, tau), time) for gid, blk in _ordered(blocks, ids, rng)]


def _s2(blocks, ids, tau, rng, time=None) -> list[ScheduleStep]:
    seq = _ordered(blocks, ids, rng)
    diag = [(g, b) for g, b in seq if g == DIAG]
    groups = [(g, b) for g, b in seq if g != DIAG]
    fwd = [ScheduleStep(g, _scaled(b, tau / 2), time) for g, b in diag + groups]
    return fwd + [ScheduleStep(st.group, st.terms[::-1], time) for st in reversed(fwd)]


def suzuki_u(r: int) -> float:
    """Recursion weight ``1 / (4 - 4^{1/(2r-1)})``."""
    if r < 2:
        raise ScheduleError(f"r must be >= 2, got {r}")
    return 1.0 / (4.0 - 4.0 ** (1.0 / (2 * r - 1)))


def _s2r(blocks, ids, tau, r, rng, time=None) -> list[ScheduleStep]:
    if r == 1:
        return _s2(blocks, ids, tau, rng, time)
    u = suzuki_u(r)
    out: list[ScheduleStep] = []
    for w in (u, u, 1 - 4 * u, u, u):
        out += _s2r(blocks, ids, w * tau, r - 1, rng, time)
    return out


def _check_ordering(ordering: str, seed: int | None) -> np.random.Generator | None:
    if ordering == "fixed":
        return None
    if ordering == "randomized":
        return np.random.default_rng(seed)
    raise ScheduleError(f"ordering must be 'fixed' or 'randomized', got {ordering!r}")


def schedule_blocks(
    blocks: Sequence[Sequence[tuple[float, str]]],
    n_qubits: int,
    T: float,
    N_T: int,
    order: int = 1,
    ordering: str = "fixed",
    seed: int | None = None,
    diagonal_first: bool = True,
) -> TrotterSchedule:
    """Trotterise a list of commuting blocks (first block diagonal if flagged)."""
    if N_T < 1:
        raise ScheduleError(f"N_T must be >= 1, got {N_T}")
    rng = _check_ordering(ordering, seed)
    blocks = [list(b) for b in blocks]
    ids = [DIAG if (i == 0 and diagonal_first) else i - int(diagonal_first)
           for i in range(len(blocks))]
    tau = T / N_T
    steps: list[ScheduleStep] = []
    for _ in range(N_T):
        if order == 1:
            steps += _s1(blocks, ids, tau, rng)
        elif order % 2 == 0 and order >= 2:
            steps += _s2r(blocks, ids, tau, order // 2, rng)
        else:
            raise ScheduleError(f"unsupported order {order}")
    meta = {"order": order, "N_T": N_T, "T": T, "ordering": ordering, "seed": seed}
    return TrotterSchedule(steps, n_qubits, meta)


def schedule_first_order(parts: HamiltonianParts, partition: CommutingPartition, T: float,
                         N_T: int, ordering: str = "fixed", seed: int | None = None) -> TrotterSchedule:
    s = schedule_blocks(_blocks_from(parts, partition), parts.n_qubits, T, N_T, 1, ordering, seed)
    s.metadata["picture"] = "schrodinger"
    return s


def schedule_second_order(parts: HamiltonianParts, partition: CommutingPartition, T: float,
                          N_T: int, ordering: str = "fixed", seed: int | None = None) -> TrotterSchedule:
    s = schedule_blocks(_blocks_from(parts, partition), parts.n_qubits, T, N_T, 2, ordering, seed)
    s.metadata["picture"] = "schrodinger"
    return s


def schedule_higher_order(r: int, parts: HamiltonianParts, partition: CommutingPartition,
                          T: float, N_T: int, ordering: str = "fixed",
                          seed: int | None = None) -> TrotterSchedule:
    """Order ``2r`` product formula by the five-fold symmetric recursion."""
    suzuki_u(r)
    s = schedule_blocks(_blocks_from(parts, partition), parts.n_qubits, T, N_T, 2 * r,
                        ordering, seed)
    s.metadata["picture"] = "schrodinger"
    return s


PartitionSupplier = Callable[[PauliSum, float], CommutingPartition]


def schedule_interaction(
    params: ModelParams,
    t: float,
    L: int,
    N_T: int = 1,
    order: int = 2,
    integrator: str = "midpoint",
    ordering: str = "fixed",
    seed: int | None = None,
    partition_supplier: PartitionSupplier | None = None,
    final_diagonal: bool = True,
) -> TrotterSchedule:
    """Time-sliced interaction-picture schedule followed by ``exp(-i H_0 t)``."""
    if L < 1:
        raise ScheduleError(f"L must be >= 1, got {L}")
    if integrator not in ("left", "midpoint"):
        raise ScheduleError(f"integrator must be 'left' or 'midpoint', got {integrator!r}")
    rng = _check_ordering(ordering, seed)
    dt = t / L
    tau = dt / N_T
    steps: list[ScheduleStep] = []
    for j in range(L):
        tj = j * dt + (0.5 * dt if integrator == "midpoint" else 0.0)
        h = build_interaction(params, tj)
        if partition_supplier is None:
            part = partition_structured(h, params, "interaction", tj,
                                        tags=interaction_tags(params, tj))
        else:
            part = partition_supplier(h, tj)
        blocks = [_hermitian_terms(PauliSum([h.terms[i] for i in g], h.n_qubits))
                  for g in part.groups]
        ids = list(range(len(blocks)))
        for _ in range(N_T):
            if order == 1:
                steps += _s1(blocks, ids, tau, rng, tj)
            elif order == 2:
                steps += _s2(blocks, ids, tau, rng, tj)
            else:
                raise ScheduleError(f"order must be 1 or 2, got {order}")
    if final_diagonal:
        h0 = build_schrodinger(params).h0
        steps.append(ScheduleStep(DIAG, _scaled(_hermitian_terms(h0), t), t))
    meta = {"picture": "interaction", "order": order, "L": L, "N_T": N_T, "t": t,
            "integrator": integrator, "ordering": ordering, "seed": seed}
    return TrotterSchedule(steps, params.n_qubits, meta)


# gates

@dataclass(frozen=True)
class Gate:
    g: str
    q: tuple[int, ...]
    theta: float | None = None

    def to_json(self) -> dict[str, Any]:
        d: dict[str, Any] = {"g": self.g, "q": list(self.q)}
        if self.theta is not None:
            d["theta"] = self.theta
        return d


@dataclass
class GateList:
    gates: list[Gate]
    n_qubits: int

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def count(self, name: str) -> int:
        return sum(1 for g in self.gates if g.g == name)

    def to_json(self) -> str:
        return json.dumps([g.to_json() for g in self.gates])

    @classmethod
    def from_json(cls, text: str, n_qubits: int) -> "GateList":
        gates = [Gate(d["g"], tuple(d["q"]), d.get("theta")) for d in json.loads(text)]
        out = cls(gates, n_qubits)
        out.check()
        return out

    def check(self) -> None:
        for g in self.gates:
            if any(not 0 <= q < self.n_qubits for q in g.q):
                raise ScheduleError(f"gate {g} acts outside 0..{self.n_qubits - 1}")


def pauli_exponential_gates(theta: float, label: str) -> list[Gate]:
    """``exp(-i theta P)`` as basis change, CNOT ladder and a terminal ``RZ(2 theta)``."""
    support = [j for j, c in enumerate(label) if c != "I"]
    if not support:
        return []
    pre: list[Gate] = []
    post: list[Gate] = []
    for j in support:
        if label[j] == "X":
            pre.append(Gate("H", (j,)))
            post.append(Gate("H", (j,)))
        elif label[j] == "Y":
            pre.append(Gate("RX", (j,), math.pi / 2))
            post.append(Gate("RX", (j,), -math.pi / 2))
    ladder = [Gate("CX", (a, b)) for a, b in zip(support, support[1:])]
    return pre + ladder + [Gate("RZ", (support[-1],), 2 * theta)] + ladder[::-1] + post


def lower_to_gates(s: TrotterSchedule) -> GateList:
    gates: list[Gate] = []
    for st in s.steps:
        for theta, lbl in st.terms:
            gates += pauli_exponential_gates(theta, lbl)
    return GateList(gates, s.n_qubits)


def controlled(s: GateList | TrotterSchedule, ancilla: int) -> GateList:
    """Control on ``ancilla``: only terminal RZ rotations become controlled."""
    gl = lower_to_gates(s) if isinstance(s, TrotterSchedule) else s
    if 0 <= ancilla < gl.n_qubits:
        raise ScheduleError(f"ancilla {ancilla} collides with the data register")
    if ancilla < 0:
        raise ScheduleError("ancilla index must be non-negative")
    out = [Gate("CRZ", (ancilla, g.q[0]), g.theta) if g.g == "RZ" else g for g in gl.gates]
    return GateList(out, max(gl.n_qubits, ancilla + 1))
