"""Dense reference simulator for desk-scale instances.

Everything here materialises ``2^N``-dimensional vectors or matrices and is
meant for verification, not for scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .hamiltonian import HamiltonianParts, build_schrodinger
from .model import ModelParams, validate
from .pauli import DENSE_LIMIT, DenseLimitError, PauliString, PauliSum, embed, number_operator, pauli_action, to_dense
from .trotter import GateList, TrotterSchedule

__all__ = [
    "SimError",
    "ErrorMetrics",
    "exact_unitary",
    "exact_interaction_propagator",
    "reference_propagator_interaction",
    "apply_schedule",
    "apply_gates",
    "spectral_norm",
    "error_metrics",
    "jc_survival",
    "jc_simulate",
    "coherent_state",
    "number_squared_operator",
    "total_number_operator",
    "variance_operator",
    "photon_statistics",
    "shot_estimate",
    "z_diagonal",
]


class SimError(RuntimeError):
    pass


@dataclass(frozen=True)
class ErrorMetrics:
    operator_error: float
    state_error: float


def _check_dim(n: int) -> None:
    if n > DENSE_LIMIT:
        raise DenseLimitError(f"{n} qubits exceeds dense limit {DENSE_LIMIT}")


def exact_unitary(H: np.ndarray, t: float, herm_tol: float = 1e-10) -> np.ndarray:
    """``exp(-i H t)`` by Hermitian eigendecomposition."""
    H = np.asarray(H, dtype=complex)
    if np.abs(H - H.conj().T).max(initial=0.0) > herm_tol:
        raise SimError("Hamiltonian is not Hermitian")
    w, v = np.linalg.eigh(H)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def _h0_diagonal(parts: HamiltonianParts) -> np.ndarray:
    return z_diagonal(parts.h0)


def exact_interaction_propagator(params: ModelParams, t: float) -> np.ndarray:
    """Closed form ``exp(i H_0 t) exp(-i H t)`` of the time-ordered exponential."""
    parts = build_schrodinger(params)
    _check_dim(parts.n_qubits)
    e0 = _h0_diagonal(parts)
    U = exact_unitary(to_dense(parts.total()), t)
    return np.exp(1j * e0 * t)[:, None] * U


def _midpoint_product(e0: np.ndarray, h: np.ndarray, t: float, L: int) -> np.ndarray:
    dt = t / L
    E = exact_unitary(h, dt)
    U = np.eye(len(e0), dtype=complex)
    for j in range(L):
        a = np.exp(1j * e0 * (j + 0.5) * dt)
        U = (a[:, None] * E * a.conj()[None, :]) @ U
    return U


def reference_propagator_interaction(params: ModelParams, t: float, tol: float = 1e-10,
                                     L0: int = 1, L_max: int = 2**20) -> tuple[np.ndarray, int]:
    """Midpoint products with doubling ``L`` and Richardson extrapolation.

    Returns the extrapolated propagator and the final ``L``. Convergence is
    declared when successive extrapolants differ by less than ``tol`` in
    spectral norm.
    """
    parts = build_schrodinger(params)
    _check_dim(parts.n_qubits)
    e0 = _h0_diagonal(parts)
    h = to_dense(parts.h_int)
    L = L0
    prev = _midpoint_product(e0, h, t, L)
    prev_r: np.ndarray | None = None
    while 2 * L <= L_max:
        L *= 2
        cur = _midpoint_product(e0, h, t, L)
        rich = (4 * cur - prev) / 3
        if prev_r is not None and spectral_norm(rich - prev_r) < tol:
            return rich, L
        if spectral_norm(cur - prev) < tol:
            return cur, L
        prev, prev_r = cur, rich
    raise SimError(f"reference propagator did not converge to {tol} within L_max={L_max}")


@lru_cache(maxsize=4096)
def _action(label: str) -> tuple[np.ndarray, np.ndarray]:
    return pauli_action(PauliString(label))


def _apply_exp(theta: float, label: str, v: np.ndarray) -> np.ndarray:
    """``exp(-i theta P) v`` for a vector or the rows of a matrix."""
    perm, phase = _action(label)
    pv = phase * v[perm] if v.ndim == 1 else phase[:, None] * v[perm]
    return math.cos(theta) * v - 1j * math.sin(theta) * pv


def apply_schedule(s: TrotterSchedule, psi0: np.ndarray | None = None) -> np.ndarray:
    """Apply every exponential of ``s``; returns the state, or the unitary if ``psi0`` is None.

    Terms inside a step commute, so the product of single-string
    exponentials equals the exponential of the group sum.
    """
    _check_dim(s.n_qubits)
    dim = 1 << s.n_qubits
    if psi0 is None:
        v = np.eye(dim, dtype=complex)
    else:
        v = np.array(psi0, dtype=complex)
        if v.shape[0] != dim:
            raise SimError(f"state has dimension {v.shape[0]}, schedule needs {dim}")
    for st in s.steps:
        for theta, lbl in st.terms:
            if "X" in lbl or "Y" in lbl or "Z" in lbl:
                v = _apply_exp(theta, lbl, v)
            else:
                v = np.exp(-1j * theta) * v
    return v


_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def _rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def _rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def _apply_1q(m: np.ndarray, q: int, n: int, v: np.ndarray) -> np.ndarray:
    shape = v.shape
    t = v.reshape((2,) * n + shape[1:])
    t = np.moveaxis(np.tensordot(m, t, axes=([1], [q])), 0, q)
    return t.reshape(shape)


def _apply_controlled(m: np.ndarray, c: int, q: int, n: int, v: np.ndarray) -> np.ndarray:
    shape = v.shape
    t = v.reshape((2,) * n + shape[1:]).copy()
    idx = [slice(None)] * t.ndim
    idx[c] = 1
    sub = t[tuple(idx)]
    qq = q if q < c else q - 1
    sub = np.moveaxis(np.tensordot(m, sub, axes=([1], [qq])), 0, qq)
    t[tuple(idx)] = sub
    return t.reshape(shape)


_X = np.array([[0, 1], [1, 0]], dtype=complex)


def apply_gates(gl: GateList, psi0: np.ndarray | None = None) -> np.ndarray:
    """Gate-by-gate dense simulation (qubit 0 is the most significant bit)."""
    n = gl.n_qubits
    _check_dim(n)
    dim = 1 << n
    v = np.eye(dim, dtype=complex) if psi0 is None else np.array(psi0, dtype=complex)
    for g in gl.gates:
        if g.g == "H":
            v = _apply_1q(_H, g.q[0], n, v)
        elif g.g == "RX":
            v = _apply_1q(_rx(g.theta), g.q[0], n, v)
        elif g.g == "RZ":
            v = _apply_1q(_rz(g.theta), g.q[0], n, v)
        elif g.g == "CX":
            v = _apply_controlled(_X, g.q[0], g.q[1], n, v)
        elif g.g == "CRZ":
            v = _apply_controlled(_rz(g.theta), g.q[0], g.q[1], n, v)
        else:
            raise SimError(f"unknown gate {g.g}")
    return v


def spectral_norm(M: np.ndarray, tol: float = 1e-10, max_iter: int = 10_000,
                  svd_limit: int = 1 << 10) -> float:
    """Largest singular value: dense SVD for small matrices, power iteration otherwise."""
    M = np.asarray(M)
    if M.shape[0] < svd_limit:
        return float(np.linalg.svd(M, compute_uv=False)[0]) if M.size else 0.0
    rng = np.random.default_rng(0)
    x = rng.normal(size=M.shape[1]) + 1j * rng.normal(size=M.shape[1])
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iter):
        y = M.conj().T @ (M @ x)
        new = float(np.linalg.norm(y))
        if new == 0.0:
            return 0.0
        x = y / new
        if abs(new - lam) <= tol * max(new, 1.0):
            return math.sqrt(new)
        lam = new
    raise SimError("power iteration did not converge")


def error_metrics(s: TrotterSchedule | np.ndarray, exact: np.ndarray,
                  psi0: np.ndarray) -> ErrorMetrics:
    V = apply_schedule(s) if isinstance(s, TrotterSchedule) else s
    diff = exact - V
    return ErrorMetrics(spectral_norm(diff), float(np.linalg.norm(diff @ psi0)))


def jc_survival(g: float, Delta: float, t: float | np.ndarray) -> float | np.ndarray:
    """Probability that the excited atom with an empty cavity is found unchanged."""
    omega = np.sqrt(Delta**2 + 4 * g**2)
    if omega == 0:
        return np.ones_like(np.asarray(t, dtype=float)) if np.ndim(t) else 1.0
    return 1 - 4 * g**2 / omega**2 * np.sin(omega * np.asarray(t) / 2) ** 2


def jc_params(g: float, Delta: float, k: int = 1, atom_freq: float = 1.0) -> ModelParams:
    return validate({"n_modes": 1, "trunc_bits": k, "mode_freqs": [atom_freq + Delta],
                     "atom_freq": atom_freq, "couplings": [g]})


def jc_simulate(g: float, Delta: float, times: np.ndarray, N_T: int, order: int = 1,
                k: int = 1, atom_freq: float = 1.0) -> np.ndarray:
    """Trotterised survival probability of ``|0 photons>|excited>`` at each time."""
    from .partition import partition_structured
    from .trotter import schedule_blocks

    params = jc_params(g, Delta, k, atom_freq)
    parts = build_schrodinger(params)
    part = partition_structured(parts.h_int, params)
    blocks = [[(c.real, s.label) for c, s in parts.h0]]
    for grp in part.groups:
        blocks.append([(parts.h_int.terms[i][0].real, parts.h_int.terms[i][1].label) for i in grp])
    psi0 = np.zeros(1 << params.n_qubits, dtype=complex)
    psi0[0] = 1.0
    out = np.empty(len(times))
    for i, t in enumerate(times):
        s = schedule_blocks(blocks, params.n_qubits, float(t), N_T, order)
        out[i] = abs(apply_schedule(s, psi0)[0]) ** 2
    return out


def coherent_state(alpha: complex, k: int, normalize: bool = True) -> np.ndarray:
    """Fock amplitudes ``e^{-|a|^2/2} a^b / sqrt(b!)`` for ``b < 2^k``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    b = np.arange(2**k)
    logfact = np.array([math.lgamma(x + 1) for x in b])
    if alpha == 0:
        amp = (b == 0).astype(complex)
    else:
        amp = np.exp(-abs(alpha) ** 2 / 2 + b * np.log(complex(alpha)) - 0.5 * logfact)
    if normalize:
        amp = amp / np.linalg.norm(amp)
    return amp.astype(complex)


def z_diagonal(op: PauliSum) -> np.ndarray:
    """Diagonal of a Z-type Pauli sum without forming the matrix."""
    n = op.n_qubits
    _check_dim(n)
    idx = np.arange(1 << n, dtype=np.int64)
    out = np.zeros(1 << n, dtype=complex)
    for c, s in op:
        if not s.is_diagonal:
            raise ValueError(f"{s.label} is not diagonal")
        zb = idx & s.z
        par = np.zeros_like(idx)
        while np.any(zb):
            par ^= zb & 1
            zb >>= 1
        out += c * (1 - 2 * par)
    return out.real if np.allclose(out.imag, 0) else out


def number_squared_operator(k: int) -> PauliSum:
    """Z-type expansion of ``N^2`` on one mode."""
    n = 2**k - 1
    terms: list[tuple[complex, str]] = []
    ident = n**2 / 4 + sum(2.0 ** (2 * (k - j - 2)) for j in range(k))
    terms.append((ident, "I" * k))
    for j in range(k):
        terms.append((-n * 2.0 ** (k - j - 2), "I" * j + "Z" + "I" * (k - j - 1)))
    for j in range(1, k):
        for l in range(j):
            lbl = ["I"] * k
            lbl[j] = lbl[l] = "Z"
            terms.append((2.0 ** (2 * k - j - l - 3), "".join(lbl)))
    return PauliSum(terms, k)


def _per_mode(params: ModelParams, local: PauliSum) -> list[PauliSum]:
    return [embed(local, m, params.n_modes, params.trunc_bits) for m in range(1, params.n_modes + 1)]


def total_number_operator(params: ModelParams) -> PauliSum:
    out = PauliSum.zero(params.n_qubits)
    for op in _per_mode(params, number_operator(params.trunc_bits)):
        out = out + op
    return out


def variance_operator(params: ModelParams) -> PauliSum:
    """The operator ``sum_l O_{N^2}^(l) - 2 sum_{m>n} O_N^(m) O_N^(n)`` verbatim; in general not a variance."""
    sq = _per_mode(params, number_squared_operator(params.trunc_bits))
    lin = _per_mode(params, number_operator(params.trunc_bits))
    out = PauliSum.zero(params.n_qubits)
    for op in sq:
        out = out + op
    for m in range(1, len(lin)):
        for n in range(m):
            out = out - 2.0 * lin[m].compose(lin[n])
    return out


def photon_statistics(psi: np.ndarray, params: ModelParams) -> dict[str, object]:
    """Mean, variance and per-mode means of the photon number."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (1 << params.n_qubits,):
        raise SimError(f"state has shape {psi.shape}, expected ({1 << params.n_qubits},)")
    prob = np.abs(psi) ** 2
    lin = [z_diagonal(op) for op in _per_mode(params, number_operator(params.trunc_bits))]
    sq = [z_diagonal(op) for op in _per_mode(params, number_squared_operator(params.trunc_bits))]
    means = [float(prob @ d) for d in lin]
    second = sum(float(prob @ d) for d in sq)
    for m in range(len(lin)):
        for n in range(m):
            second += 2 * float(prob @ (lin[m] * lin[n]))
    mean = sum(means)
    return {"mean": mean, "variance": second - mean**2, "second_moment": second,
            "mode_means": means}


def shot_estimate(variance: float, eps: float, n_modes: int | None = None,
                  k: int | None = None) -> dict[str, int | None]:
    """Shots for additive error ``eps``; also the worst case when the instance size is known."""
    if not eps > 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    shots = max(1, math.ceil(variance / eps**2 - 1e-9))
    worst = None
    if n_modes is not None and k is not None:
        worst = math.ceil((n_modes * 2**k) ** 2 / eps**2 - 1e-9)
    return {"shots": shots, "worst_case": worst}
