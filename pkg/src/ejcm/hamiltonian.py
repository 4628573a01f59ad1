"""Pauli-sum assembly of the extended Jaynes-Cummings Hamiltonian.

Nothing here builds a dense matrix: every term is produced symbolically from
the ladder and number decompositions in :mod:`ejcm.pauli`.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

from .model import ModelParams, derive
from .pauli import PauliSum, ladder_operator, number_operator

__all__ = [
    "HamiltonianParts",
    "TermTag",
    "TermCounts",
    "build_schrodinger",
    "build_interaction",
    "interaction_tags",
    "term_counts",
]

# (mode, Hamming class h, photon Y parity p, atomic Pauli q)
TermTag = tuple[int, int, int, str]


@dataclass(frozen=True)
class HamiltonianParts:
    h_photon: PauliSum
    h_atom: PauliSum
    h_int: PauliSum
    photon_shift: float
    tags: dict[str, TermTag] = field(default_factory=dict, compare=False)

    @property
    def n_qubits(self) -> int:
        return self.h_int.n_qubits

    @property
    def h0(self) -> PauliSum:
        """Diagonal part ``H_Photon + H_Atom`` without the identity shift."""
        return self.h_photon + self.h_atom

    def total(self, include_shift: bool = False) -> PauliSum:
        h = self.h_photon + self.h_atom + self.h_int
        if include_shift and self.photon_shift:
            h = h + PauliSum.identity(self.n_qubits, self.photon_shift)
        return h


@dataclass(frozen=True)
class TermCounts:
    N_Z: int
    N_P: int
    M: int
    N_I_t0: int
    N_I: int

    def as_dict(self) -> dict[str, int]:
        return {"N_Z": self.N_Z, "N_P": self.N_P, "M": self.M,
                "N_I_t0": self.N_I_t0, "N_I": self.N_I}


def _z_on(n: int, q: int) -> str:
    return "I" * q + "Z" + "I" * (n - q - 1)


def _photon_part(params: ModelParams) -> tuple[PauliSum, float]:
    n_q, k = params.n_qubits, params.trunc_bits
    num = number_operator(k)
    shift = 0.0
    terms = []
    for m, w in enumerate(params.mode_freqs, start=1):
        shift += w * num.identity_coeff().real
        base = (m - 1) * k
        for c, s in num:
            if s.is_identity:
                continue
            j = s.label.index("Z")
            terms.append((w * c.real, _z_on(n_q, base + j)))
    return PauliSum(terms, n_q), shift


def _coupling_terms(params: ModelParams, phases: list[complex]) -> tuple[PauliSum, dict[str, TermTag]]:
    """Sum over modes of ``gamma_m * P_s (x) (Re b X + Im b Y)``, ``b = alpha_s * phase_m``."""
    n_q, k, nf = params.n_qubits, params.trunc_bits, params.n_modes
    create = ladder_operator(k, "create")
    terms: list[tuple[complex, str]] = []
    tags: dict[str, TermTag] = {}
    for m in range(1, nf + 1):
        g = params.couplings[m - 1]
        if g == 0.0:
            continue
        left = "I" * ((m - 1) * k)
        right = "I" * ((nf - m) * k)
        for alpha, s in create:
            beta = alpha * phases[m - 1]
            h = bin(s.x).count("1")
            p = s.n_y % 2
            for q, val in (("X", beta.real), ("Y", beta.imag)):
                lbl = left + s.label + right + q
                terms.append((g * val, lbl))
                tags[lbl] = (m, h, p, q)
    out = PauliSum(terms, n_q)
    return out, {lbl: tags[lbl] for lbl in out.labels}


def build_schrodinger(params: ModelParams) -> HamiltonianParts:
    """Photon, atom and coupling parts of the Schrodinger-picture Hamiltonian."""
    h_photon, shift = _photon_part(params)
    h_atom = PauliSum([(params.atom_freq / 2, _z_on(params.n_qubits, params.atom_qubit))],
                      params.n_qubits)
    h_int, tags = _coupling_terms(params, [1.0] * params.n_modes)
    return HamiltonianParts(h_photon, h_atom, h_int, shift, tags)


def _interaction(params: ModelParams, t: float) -> tuple[PauliSum, dict[str, TermTag]]:
    phases = []
    for m in range(1, params.n_modes + 1):
        if params.is_resonant(m):
            phases.append(1.0 + 0j)
        else:
            delta = params.mode_freqs[m - 1] - params.atom_freq
            phases.append(cmath.exp(1j * delta * t))
    return _coupling_terms(params, phases)


def build_interaction(params: ModelParams, t: float) -> PauliSum:
    """Interaction-picture coupling ``H_I(t) = e^{iH_0 t} H_int e^{-iH_0 t}``."""
    return _interaction(params, t)[0]


def interaction_tags(params: ModelParams, t: float) -> dict[str, TermTag]:
    return _interaction(params, t)[1]


def term_counts(params: ModelParams) -> TermCounts:
    """Analytic string counts.

    ``N_I_t0`` is what the builder produces at ``t = 0`` (the coupling term
    itself); ``N_I`` is the generic ``t != 0`` count.
    """
    nf, k = params.n_modes, params.trunc_bits
    r = 2**k * k
    n_z = nf * k + 1
    n_p = nf * r
    m0 = derive(params).M0
    return TermCounts(N_Z=n_z, N_P=n_p, M=n_z + 1 + n_p, N_I_t0=n_p, N_I=(2 * nf - m0) * r)
