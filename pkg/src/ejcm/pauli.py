"""Pauli-string algebra, bosonic operator decompositions and a dense oracle.

A string is stored as a label (``"XIZY"``) together with symplectic bit masks.
Label character ``j`` is qubit ``j``; in dense form qubit 0 is the most
significant bit of the basis index, i.e. ``dense = P_0 (x) P_1 (x) ...``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

__all__ = [
    "COEFF_TOL",
    "DENSE_LIMIT",
    "DenseLimitError",
    "PauliString",
    "PauliSum",
    "commutes",
    "number_operator",
    "ladder_operator",
    "ladder_tags",
    "embed",
    "embed_params",
    "to_dense",
    "project_to_pauli",
    "pauli_action",
    "apply_pauli",
]

COEFF_TOL = 1e-12
DENSE_LIMIT = 14

_SYMBOLS = "IXYZ"
# single-qubit products: (a, b) -> (phase, c) with a.b = phase * c
_MUL: dict[tuple[str, str], tuple[complex, str]] = {}
for _a in _SYMBOLS:
    _MUL[("I", _a)] = (1, _a)
    _MUL[(_a, "I")] = (1, _a)
    _MUL[(_a, _a)] = (1, "I")
_MUL[("X", "Y")] = (1j, "Z")
_MUL[("Y", "Z")] = (1j, "X")
_MUL[("Z", "X")] = (1j, "Y")
_MUL[("Y", "X")] = (-1j, "Z")
_MUL[("Z", "Y")] = (-1j, "X")
_MUL[("X", "Z")] = (-1j, "Y")


class DenseLimitError(ValueError):
    """Raised when a dense conversion would exceed the configured qubit limit."""


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True, order=True)
class PauliString:
    """Tensor product of single-qubit Paulis, identified by its label."""

    label: str
    x: int = field(default=0, compare=False, repr=False)
    z: int = field(default=0, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.label or any(c not in _SYMBOLS for c in self.label):
            raise ValueError(f"invalid Pauli label {self.label!r}")
        n = len(self.label)
        x = z = 0
        for j, c in enumerate(self.label):
            bit = 1 << (n - 1 - j)
            if c in "XY":
                x |= bit
            if c in "ZY":
                z |= bit
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls("I" * n)

    @property
    def n_qubits(self) -> int:
        return len(self.label)

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def n_y(self) -> int:
        return _popcount(self.x & self.z)

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def is_diagonal(self) -> bool:
        return self.x == 0

    def support(self) -> list[int]:
        return [j for j, c in enumerate(self.label) if c != "I"]

    def commutes(self, other: "PauliString") -> bool:
        return commutes(self, other)

    def __mul__(self, other: "PauliString") -> tuple[complex, "PauliString"]:
        if self.n_qubits != other.n_qubits:
            raise ValueError("length mismatch")
        phase: complex = 1
        out = []
        for a, b in zip(self.label, other.label):
            p, c = _MUL[(a, b)]
            phase *= p
            out.append(c)
        return phase, PauliString("".join(out))

    def __str__(self) -> str:
        return self.label


def commutes(p: PauliString, q: PauliString) -> bool:
    """True iff the symplectic product of ``p`` and ``q`` is even."""
    if p.n_qubits != q.n_qubits:
        raise ValueError(f"length mismatch: {p.n_qubits} vs {q.n_qubits}")
    return _popcount((p.x & q.z) ^ (p.z & q.x)) % 2 == 0


def _as_string(s: PauliString | str) -> PauliString:
    return s if isinstance(s, PauliString) else PauliString(s)


class PauliSum:
    """Canonical sum of Pauli strings with complex coefficients.

    Duplicate labels are merged, terms with ``|c| < COEFF_TOL`` are dropped
    and the remaining terms are ordered lexicographically by label.
    """

    __slots__ = ("_terms", "_n", "_index")

    def __init__(self, terms: Iterable[tuple[complex, PauliString | str]] = (),
                 n_qubits: int | None = None, *, tol: float = COEFF_TOL) -> None:
        acc: dict[str, complex] = {}
        strings: dict[str, PauliString] = {}
        n = n_qubits
        for coeff, s in terms:
            s = _as_string(s)
            if n is None:
                n = s.n_qubits
            elif s.n_qubits != n:
                raise ValueError(f"term {s.label} has {s.n_qubits} qubits, expected {n}")
            acc[s.label] = acc.get(s.label, 0j) + complex(coeff)
            strings.setdefault(s.label, s)
        if n is None:
            raise ValueError("empty PauliSum needs an explicit n_qubits")
        kept = sorted(lbl for lbl, c in acc.items() if abs(c) >= tol)
        self._terms: tuple[tuple[complex, PauliString], ...] = tuple(
            (acc[lbl], strings[lbl]) for lbl in kept
        )
        self._n = n
        self._index = {lbl: i for i, lbl in enumerate(kept)}

    @classmethod
    def from_dict(cls, coeffs: Mapping[str, complex], n_qubits: int | None = None) -> "PauliSum":
        return cls(((c, lbl) for lbl, c in coeffs.items()), n_qubits)

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls((), n_qubits)

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> "PauliSum":
        return cls([(coeff, "I" * n_qubits)])

    @property
    def n_qubits(self) -> int:
        return self._n

    @property
    def terms(self) -> tuple[tuple[complex, PauliString], ...]:
        return self._terms

    @property
    def labels(self) -> list[str]:
        return [s.label for _, s in self._terms]

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([c for c, _ in self._terms], dtype=complex)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[complex, PauliString]]:
        return iter(self._terms)

    def __contains__(self, label: object) -> bool:
        return str(label) in self._index

    def coeff(self, label: str) -> complex:
        i = self._index.get(label)
        return 0j if i is None else self._terms[i][0]

    def as_dict(self) -> dict[str, complex]:
        return {s.label: c for c, s in self._terms}

    def identity_coeff(self) -> complex:
        return self.coeff("I" * self._n)

    def without_identity(self) -> "PauliSum":
        return PauliSum(((c, s) for c, s in self._terms if not s.is_identity), self._n)

    def is_hermitian(self, tol: float = COEFF_TOL) -> bool:
        return all(abs(c.imag) <= tol for c, _ in self._terms)

    def real(self) -> "PauliSum":
        return PauliSum(((c.real, s) for c, s in self._terms), self._n)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if other.n_qubits != self._n:
            raise ValueError("qubit count mismatch")
        return PauliSum(list(self._terms) + list(other.terms), self._n)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __mul__(self, other: complex | "PauliSum") -> "PauliSum":
        if isinstance(other, PauliSum):
            return self.compose(other)
        return PauliSum(((other * c, s) for c, s in self._terms), self._n)

    __rmul__ = __mul__

    def __neg__(self) -> "PauliSum":
        return (-1.0) * self

    def compose(self, other: "PauliSum") -> "PauliSum":
        """Operator product ``self @ other``."""
        out = []
        for c1, s1 in self._terms:
            for c2, s2 in other.terms:
                phase, s = s1 * s2
                out.append((c1 * c2 * phase, s))
        return PauliSum(out, self._n)

    def tensor(self, other: "PauliSum") -> "PauliSum":
        """Kronecker product, ``self`` on the leading qubits."""
        return PauliSum(
            ((c1 * c2, s1.label + s2.label) for c1, s1 in self._terms for c2, s2 in other.terms),
            self._n + other.n_qubits,
        )

    def adjoint(self) -> "PauliSum":
        return PauliSum(((c.conjugate(), s) for c, s in self._terms), self._n)

    def transpose(self) -> "PauliSum":
        """Matrix transpose: strings with an odd number of Y change sign."""
        return PauliSum(((-c if s.n_y % 2 else c, s) for c, s in self._terms), self._n)

    def allclose(self, other: "PauliSum", tol: float = COEFF_TOL) -> bool:
        if other.n_qubits != self._n:
            return False
        keys = set(self._index) | set(other._index)
        return all(abs(self.coeff(k) - other.coeff(k)) <= tol for k in keys)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self._n == other._n and self.as_dict() == other.as_dict()

    def __hash__(self) -> int:
        return hash((self._n, self._terms))

    def __repr__(self) -> str:
        body = " + ".join(f"({c:.6g})*{s.label}" for c, s in self._terms[:6])
        more = "" if len(self) <= 6 else f" + ... ({len(self)} terms)"
        return f"PauliSum[{self._n}]({body}{more})"

    def to_text(self) -> str:
        """One ``(re,im) LABEL`` line per term."""
        return "".join(f"({c.real!r},{c.imag!r}) {s.label}\n" for c, s in self._terms)

    @classmethod
    def from_text(cls, text: str, n_qubits: int | None = None) -> "PauliSum":
        terms = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                coeff_part, label = line.split()
                re_s, im_s = coeff_part.strip("()").split(",")
                terms.append((complex(float(re_s), float(im_s)), label))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: cannot parse {line!r}") from exc
        return cls(terms, n_qubits)

    def to_json(self) -> list[dict[str, object]]:
        return [{"re": c.real, "im": c.imag, "label": s.label} for c, s in self._terms]

    @classmethod
    def from_json(cls, data: str | Sequence[Mapping[str, object]],
                  n_qubits: int | None = None) -> "PauliSum":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(((complex(float(t["re"]), float(t["im"])), str(t["label"])) for t in data),
                   n_qubits)


def number_operator(k: int) -> PauliSum:
    """Binary-encoded photon number ``sum_i i |i><i|`` on ``k`` qubits."""
    if k < 1:
        raise ValueError("k must be >= 1")
    n = 2**k - 1
    terms: list[tuple[complex, str]] = [(n / 2, "I" * k)]
    for j in range(k):
        terms.append((-(2 ** (k - j - 1)) / 2, "I" * j + "Z" + "I" * (k - j - 1)))
    return PauliSum(terms, k)


# |b_out><b_in| as Pauli sums
_PROJ = {
    (0, 0): ((0.5, "I"), (0.5, "Z")),
    (1, 1): ((0.5, "I"), (-0.5, "Z")),
    (0, 1): ((0.5, "X"), (0.5j, "Y")),
    (1, 0): ((0.5, "X"), (-0.5j, "Y")),
}


def _outer_terms(out_bits: Sequence[int], in_bits: Sequence[int]) -> dict[str, complex]:
    acc: dict[str, complex] = {"": 1.0}
    for bo, bi in zip(out_bits, in_bits):
        nxt: dict[str, complex] = {}
        for lbl, c in acc.items():
            for c2, sym in _PROJ[(bo, bi)]:
                key = lbl + sym
                nxt[key] = nxt.get(key, 0) + c * c2
        acc = nxt
    return acc


def _bits(i: int, k: int) -> list[int]:
    return [(i >> (k - 1 - j)) & 1 for j in range(k)]


def ladder_operator(k: int, kind: str = "annihilate") -> PauliSum:
    """Truncated annihilation or creation operator on ``k`` qubits.

    ``kind`` is ``"annihilate"`` or ``"create"``. The result has ``k * 2^k``
    strings.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if kind not in ("annihilate", "create"):
        raise ValueError(f"kind must be 'annihilate' or 'create', got {kind!r}")
    acc: dict[str, complex] = {}
    for i in range(2**k - 1):
        amp = math.sqrt(i + 1)
        lo, hi = _bits(i, k), _bits(i + 1, k)
        out_bits, in_bits = (hi, lo) if kind == "create" else (lo, hi)
        for lbl, c in _outer_terms(out_bits, in_bits).items():
            acc[lbl] = acc.get(lbl, 0) + amp * c
    return PauliSum.from_dict(acc, k)


def ladder_tags(k: int) -> dict[str, tuple[int, int]]:
    """Map each ladder string to ``(h, p)``.

    ``h`` is the Hamming class (number of X/Y positions) and ``p`` the parity
    of Y symbols.
    """
    tags = {}
    for _, s in ladder_operator(k, "create"):
        tags[s.label] = (_popcount(s.x), s.n_y % 2)
    return tags


def embed(local: PauliSum, mode: int, n_modes: int, k: int) -> PauliSum:
    """Pad a single-mode operator to the full ``n_modes * k + 1`` register."""
    if not 1 <= mode <= n_modes:
        raise ValueError(f"mode {mode} out of range 1..{n_modes}")
    if local.n_qubits != k:
        raise ValueError(f"local operator acts on {local.n_qubits} qubits, expected {k}")
    left = "I" * ((mode - 1) * k)
    right = "I" * ((n_modes - mode) * k + 1)
    return PauliSum(((c, left + s.label + right) for c, s in local), n_modes * k + 1)


def embed_params(local: PauliSum, mode: int, params: "object") -> PauliSum:
    return embed(local, mode, params.n_modes, params.trunc_bits)  # type: ignore[attr-defined]


def pauli_action(s: PauliString) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(perm, phase)`` with ``(P v)[c] = phase[c] * v[perm[c]]``."""
    dim = 1 << s.n_qubits
    idx = np.arange(dim, dtype=np.int64)
    perm = idx ^ s.x
    parity = np.zeros(dim, dtype=np.int64)
    zb = perm & s.z
    # popcount parity of (b & z) for b = perm
    while np.any(zb):
        parity ^= zb & 1
        zb >>= 1
    phase = (1j ** s.n_y) * (1 - 2 * parity)
    return perm, phase.astype(complex)


def apply_pauli(s: PauliString, v: np.ndarray) -> np.ndarray:
    """Apply ``P`` to a vector or to the rows of a matrix."""
    perm, phase = pauli_action(s)
    if v.ndim == 1:
        return phase * v[perm]
    return phase[:, None] * v[perm]


def _check_limit(n: int, limit: int | None) -> None:
    lim = DENSE_LIMIT if limit is None else limit
    if n > lim:
        raise DenseLimitError(f"{n} qubits exceeds dense limit {lim}")


def to_dense(op: PauliSum | PauliString, limit: int | None = None) -> np.ndarray:
    if isinstance(op, PauliString):
        op = PauliSum([(1.0, op)])
    n = op.n_qubits
    _check_limit(n, limit)
    dim = 1 << n
    mat = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    for c, s in op:
        perm, phase = pauli_action(s)
        # P[c, perm[c]] = phase[c]
        mat[cols, perm] += c * phase
    return mat


def _walsh_hadamard(v: np.ndarray, n: int) -> np.ndarray:
    """Unnormalised transform ``out[z] = sum_b (-1)^{|b & z|} v[b]``."""
    a = v.reshape((2,) * n) if n else v.copy()
    for ax in range(n):
        a0 = np.take(a, 0, axis=ax)
        a1 = np.take(a, 1, axis=ax)
        a = np.stack([a0 + a1, a0 - a1], axis=ax)
    return a.reshape(-1)


def project_to_pauli(mat: np.ndarray, tol: float = COEFF_TOL, limit: int | None = None) -> PauliSum:
    """Pauli coefficients ``Tr(P A) / 2^N`` over all ``4^N`` strings."""
    mat = np.asarray(mat, dtype=complex)
    dim = mat.shape[0]
    if mat.shape != (dim, dim) or dim & (dim - 1) or dim < 2:
        raise ValueError(f"expected a square power-of-two matrix, got {mat.shape}")
    n = dim.bit_length() - 1
    _check_limit(n, limit)
    idx = np.arange(dim)
    ny_par = np.array([_popcount(v) for v in range(dim)], dtype=np.int64)
    terms = []
    for x in range(dim):
        wh = _walsh_hadamard(mat[idx, idx ^ x], n)
        for z in np.nonzero(np.abs(wh) >= tol * dim)[0]:
            z = int(z)
            coeff = wh[z] * (1j ** int(ny_par[x & z] % 4)) / dim
            terms.append((coeff, _label_from_masks(x, z, n)))
    return PauliSum(terms, n, tol=tol)


def _label_from_masks(x: int, z: int, n: int) -> str:
    out = []
    for j in range(n):
        bx = (x >> (n - 1 - j)) & 1
        bz = (z >> (n - 1 - j)) & 1
        out.append("IXZY"[bx + 2 * bz])
    return "".join(out)
