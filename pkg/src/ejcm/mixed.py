"""Vectorised density-matrix evolution on a doubled register.

Convention: ``vec(rho)[j * d + i] = rho[i, j]`` (column stacking), so the
first (top) register carries the column index. With this ordering
``vec(V rho V^dag) = (conj(V) kron V) vec(rho)`` and the generator is
``I kron H - H^T kron I``. The top register therefore runs the complex
conjugate of the bottom schedule, which for a Pauli exponential
``exp(-i theta P)`` is ``exp(+i theta P)`` when ``P`` has an even number of
``Y`` factors and ``exp(-i theta P)`` when odd.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hamiltonian import HamiltonianParts
from .model import ModelParams
from .pauli import DENSE_LIMIT, DenseLimitError, PauliSum
from .sim import apply_schedule
from .trotter import Gate, GateList, ScheduleStep, TrotterSchedule, controlled, lower_to_gates

__all__ = [
    "MixedError",
    "PairedSchedules",
    "vectorize",
    "unvectorize",
    "unvectorize_normalized",
    "conjugate_schedule",
    "liouvillian",
    "liouvillian_dense",
    "evolve_vectorized",
    "bell_overlap",
    "trace_via_bell",
    "BellTrace",
    "observable_overlap",
    "observable_vector",
    "build_O_N_vector",
    "photon_count",
    "diagonal_mixture",
    "purification_gates",
    "hadamard_test_circuit",
    "mixed_statistics",
]


class MixedError(ValueError):
    pass


def _dim_of(v: np.ndarray) -> int:
    d = math.isqrt(v.shape[0])
    if d * d != v.shape[0]:
        raise MixedError(f"length {v.shape[0]} is not a square")
    return d


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Frobenius-normalised column-stacked vector of ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise MixedError(f"expected a square matrix, got shape {rho.shape}")
    norm = np.linalg.norm(rho)
    if norm == 0:
        raise MixedError("zero matrix cannot be normalised")
    return rho.T.reshape(-1) / norm


def unvectorize(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v)
    d = _dim_of(v)
    return v.reshape(d, d).T.copy()


def unvectorize_normalized(v: np.ndarray) -> np.ndarray:
    """Matrix from ``v`` rescaled to unit trace."""
    rho = unvectorize(v)
    tr = np.trace(rho)
    if abs(tr) < 1e-300:
        raise MixedError("zero trace")
    return rho / tr


def _odd_y(label: str) -> bool:
    return label.count("Y") % 2 == 1


def conjugate_schedule(s: TrotterSchedule) -> TrotterSchedule:
    """Schedule implementing the entrywise complex conjugate of ``s``."""
    steps = [
        ScheduleStep(st.group, tuple((th if _odd_y(lbl) else -th, lbl) for th, lbl in st.terms),
                     st.time)
        for st in s.steps
    ]
    return TrotterSchedule(steps, s.n_qubits, dict(s.metadata, register="top"))


@dataclass
class PairedSchedules:
    """Top register runs ``exp(+i H^T t)``, bottom runs ``exp(-i H t)``."""

    top: TrotterSchedule
    bottom: TrotterSchedule

    @property
    def n_qubits(self) -> int:
        return self.bottom.n_qubits


def liouvillian(bottom: TrotterSchedule) -> PairedSchedules:
    return PairedSchedules(conjugate_schedule(bottom), bottom)


def liouvillian_dense(parts: HamiltonianParts | PauliSum) -> np.ndarray:
    """Dense ``I kron H - H^T kron I`` (shift dropped)."""
    from .pauli import to_dense

    h = parts.total() if isinstance(parts, HamiltonianParts) else parts
    if 2 * h.n_qubits > DENSE_LIMIT:
        raise DenseLimitError(f"doubled register of {2 * h.n_qubits} qubits exceeds dense limit")
    H = to_dense(h)
    eye = np.eye(H.shape[0])
    return np.kron(eye, H) - np.kron(H.T, eye)


def evolve_vectorized(sched: PairedSchedules | TrotterSchedule, v0: np.ndarray,
                      limit: int = DENSE_LIMIT) -> np.ndarray:
    """Apply the paired schedules to a vectorised density."""
    pair = sched if isinstance(sched, PairedSchedules) else liouvillian(sched)
    n = pair.n_qubits
    if 2 * n > limit:
        raise DenseLimitError(f"doubled register of {2 * n} qubits exceeds dense limit {limit}")
    d = 1 << n
    v0 = np.asarray(v0, dtype=complex)
    if v0.shape != (d * d,):
        raise MixedError(f"vector has shape {v0.shape}, expected ({d * d},)")
    M = v0.reshape(d, d)
    M = apply_schedule(pair.top, M)
    M = apply_schedule(pair.bottom, M.T).T
    return M.reshape(-1)


def bell_overlap(v: np.ndarray) -> complex:
    """Signed ``<Phi|v>`` with the normalised Bell sum ``|Phi>``."""
    v = np.asarray(v)
    d = _dim_of(v)
    return complex(v[np.arange(d) * (d + 1)].sum() / math.sqrt(d))


@dataclass(frozen=True)
class BellTrace:
    trace: float
    proxy: float
    imag: float
    negative: bool


def trace_via_bell(v: np.ndarray, n_qubits: int | None = None, imag_tol: float = 1e-9,
                   report: bool = False) -> float | BellTrace:
    """``sqrt(2^N) <Phi|v>``; real part, with an imaginary-part check.

    With ``report`` the signed value, the ``|<Phi|v>|^2`` proxy and a
    negativity flag are returned together.
    """
    v = np.asarray(v)
    d = _dim_of(v)
    if n_qubits is not None and d != 1 << n_qubits:
        raise MixedError(f"vector length {v.shape[0]} does not match {n_qubits} qubits")
    ov = bell_overlap(v)
    if not report and abs(ov.imag) > imag_tol:
        raise MixedError(f"trace has imaginary part {ov.imag:.3e}")
    tr = math.sqrt(d) * ov.real
    if report:
        return BellTrace(tr, abs(ov) ** 2, math.sqrt(d) * ov.imag, ov.real < 0)
    return tr


def observable_overlap(o_vec: np.ndarray, rho_vec: np.ndarray) -> complex:
    """``<<O|rho>>``."""
    o_vec = np.asarray(o_vec)
    rho_vec = np.asarray(rho_vec)
    if o_vec.shape != rho_vec.shape:
        raise MixedError(f"length mismatch {o_vec.shape} vs {rho_vec.shape}")
    return complex(np.vdot(o_vec, rho_vec))


def observable_vector(O: np.ndarray) -> tuple[np.ndarray, float]:
    """Normalised ``vec(O)`` and the norm that was divided out."""
    O = np.asarray(O, dtype=complex)
    norm = float(np.linalg.norm(O))
    return vectorize(O), norm


def photon_count(params: ModelParams, x: np.ndarray | int, include_atom: bool = False) -> np.ndarray:
    """Total photon number of basis index ``x``.

    Without ``include_atom`` the index runs over the photon register only;
    otherwise the atom is the least significant bit and is ignored.
    """
    x = np.asarray(x, dtype=np.int64)
    if include_atom:
        x = x >> 1
    k = params.trunc_bits
    mask = (1 << k) - 1
    return sum((x >> (k * m)) & mask for m in range(params.n_modes))


def build_O_N_vector(params: ModelParams, include_atom: bool = False) -> tuple[np.ndarray, float]:
    """``sum_x p(x)|x>|x> / norm`` and ``norm``."""
    nq = params.n_modes * params.trunc_bits + int(include_atom)
    if 2 * nq > DENSE_LIMIT:
        raise DenseLimitError(f"{nq} qubits exceeds dense limit")
    d = 1 << nq
    p = photon_count(params, np.arange(d), include_atom).astype(float)
    norm = float(np.sqrt((p**2).sum()))
    v = np.zeros(d * d, dtype=complex)
    v[np.arange(d) * (d + 1)] = p / norm
    return v, norm


def diagonal_mixture(weights: np.ndarray | list[float], n_qubits: int) -> np.ndarray:
    """Vectorised ``sum_x w_x |x><x|``; weights are renormalised to sum to one."""
    w = np.asarray(weights, dtype=float)
    d = 1 << n_qubits
    if w.shape != (d,):
        raise MixedError(f"expected {d} weights, got {w.shape}")
    if (w < 0).any() or w.sum() <= 0:
        raise MixedError("weights must be non-negative with positive sum")
    return vectorize(np.diag(w / w.sum()))


def purification_gates(n_qubits: int, qubits: list[int] | None = None) -> GateList:
    """Hadamard + CNOT pairs giving a uniform mixture over ``qubits`` on the doubled register.

    Top register is qubits ``0..N-1``, bottom is ``N..2N-1``.
    """
    qubits = list(range(n_qubits)) if qubits is None else qubits
    gates: list[Gate] = []
    for q in qubits:
        gates.append(Gate("H", (q,)))
        gates.append(Gate("CX", (q, n_qubits + q)))
    return GateList(gates, 2 * n_qubits)


def _shift(gl: GateList, offset: int, n_total: int) -> GateList:
    return GateList([Gate(g.g, tuple(q + offset for q in g.q), g.theta) for g in gl.gates], n_total)


def hadamard_test_circuit(pair: PairedSchedules, imaginary: bool = False) -> GateList:
    """Controlled doubled-register evolution framed by Hadamards on an ancilla.

    The ancilla is the last qubit ``2N``. With ``imaginary`` an ``RZ(-pi/2)``
    (an ``S^dag`` up to phase) precedes the final Hadamard.
    """
    n = pair.n_qubits
    total = 2 * n + 1
    top = lower_to_gates(pair.top)
    bottom = _shift(lower_to_gates(pair.bottom), n, 2 * n)
    both = GateList(top.gates + bottom.gates, 2 * n)
    body = controlled(both, 2 * n)
    gates = [Gate("H", (2 * n,))] + body.gates
    if imaginary:
        gates.append(Gate("RZ", (2 * n,), -math.pi / 2))
    gates.append(Gate("H", (2 * n,)))
    return GateList(gates, total)


def mixed_statistics(v: np.ndarray, o_n: tuple[np.ndarray, float]) -> dict[str, float | bool]:
    """Trace, mean photon number and purity from a vectorised state."""
    o_vec, o_norm = o_n
    bt = trace_via_bell(v, report=True)
    tr = bt.trace
    norm_sq = float(np.vdot(v, v).real)
    ov = observable_overlap(o_vec, v)
    return {
        "trace": tr,
        "mean_photon": (ov * o_norm).real / tr,
        "purity": norm_sq / tr**2,
        "negative": bt.negative,
    }

