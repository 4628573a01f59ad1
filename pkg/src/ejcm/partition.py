"""Commuting-family partitions of Pauli sums.

Two partitioners are provided: a structured one that reads the
(mode, Hamming class, Y parity, atomic Pauli) tags recorded when the coupling
term is built, and a greedy graph-colouring baseline on the frustration graph
(vertices are terms, edges join anticommuting pairs).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .hamiltonian import TermTag, build_schrodinger, interaction_tags
from .model import ModelParams
from .pauli import PauliSum, commutes

__all__ = [
    "CommutingPartition",
    "partition_structured",
    "partition_greedy",
    "verify_partition",
    "frustration_graph",
    "anticommutation_matrix",
    "export_graph",
    "group_sums",
    "min_greedy_groups",
]


@dataclass(frozen=True)
class CommutingPartition:
    groups: tuple[tuple[int, ...], ...]
    method: str
    seed: int | None = None
    keys: tuple[object, ...] = field(default=(), compare=False)
    fallback: bool = False

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    def to_json(self) -> dict[str, object]:
        return {
            "method": self.method,
            "seed": self.seed,
            "fallback": self.fallback,
            "n_groups": self.n_groups,
            "groups": [list(g) for g in self.groups],
        }


def _masks(psum: PauliSum) -> tuple[np.ndarray, np.ndarray] | None:
    if psum.n_qubits > 63:
        return None
    xs = np.array([s.x for _, s in psum], dtype=np.uint64)
    zs = np.array([s.z for _, s in psum], dtype=np.uint64)
    return xs, zs


def _parity(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> np.uint64(shift)
    return (v & np.uint64(1)).astype(bool)


def anticommutation_matrix(psum: PauliSum) -> np.ndarray:
    """Boolean matrix ``A[i, j]`` true iff terms ``i`` and ``j`` anticommute."""
    m = _masks(psum)
    n = len(psum)
    if m is None:
        strings = [s for _, s in psum]
        out = np.zeros((n, n), dtype=bool)
        for i in range(n):
            for j in range(i + 1, n):
                out[i, j] = out[j, i] = not commutes(strings[i], strings[j])
        return out
    xs, zs = m
    sym = (xs[:, None] & zs[None, :]) ^ (zs[:, None] & xs[None, :])
    return _parity(sym)


def frustration_graph(psum: PauliSum) -> list[tuple[int, int]]:
    """Edges ``(i, j)``, ``i < j``, between anticommuting terms."""
    adj = anticommutation_matrix(psum)
    ii, jj = np.nonzero(np.triu(adj, 1))
    return [(int(i), int(j)) for i, j in zip(ii, jj)]


def _non_identity(psum: PauliSum) -> list[int]:
    return [i for i, (_, s) in enumerate(psum) if not s.is_identity]


def partition_greedy(psum: PauliSum, seed: int = 0) -> CommutingPartition:
    """Largest-degree-first colouring of the frustration graph.

    Ties in degree are broken by a seeded random key.
    """
    verts = _non_identity(psum)
    if not verts:
        return CommutingPartition((), "greedy", seed)
    adj = anticommutation_matrix(psum)
    deg = adj.sum(axis=1)
    rng = np.random.default_rng(seed)
    tiebreak = rng.permutation(len(verts))
    order = sorted(range(len(verts)), key=lambda a: (-int(deg[verts[a]]), int(tiebreak[a])))
    colour: dict[int, int] = {}
    members: list[list[int]] = []
    for a in order:
        v = verts[a]
        for c, group in enumerate(members):
            if not adj[v, group].any():
                group.append(v)
                colour[v] = c
                break
        else:
            colour[v] = len(members)
            members.append([v])
    groups = tuple(tuple(sorted(g)) for g in members)
    groups = tuple(sorted(groups, key=lambda g: g[0]))
    return CommutingPartition(groups, "greedy", seed)


def _structured_key(tag: TermTag, merge_atom: bool) -> tuple[object, ...]:
    _, h, p, q = tag
    if merge_atom:
        return (h, p ^ (q == "Y"))
    return (h, p, q)


def partition_structured(
    psum: PauliSum,
    params: ModelParams,
    picture: str = "schrodinger",
    t: float = 0.0,
    tags: Mapping[str, TermTag] | None = None,
) -> CommutingPartition:
    """Group coupling strings by their construction tags.

    Keys are ``(h, p, q)``. With a single non-resonant mode in the
    interaction picture at ``t != 0`` the atomic Pauli is folded into the
    parity, giving ``(h, p xor [q == Y])``. Untagged input falls back to
    :func:`partition_greedy` with ``fallback=True``.
    """
    if picture not in ("schrodinger", "interaction"):
        raise ValueError(f"unknown picture {picture!r}")
    if tags is None:
        if picture == "schrodinger":
            tags = build_schrodinger(params).tags
        else:
            tags = interaction_tags(params, t)
    merge = (
        picture == "interaction"
        and params.n_modes == 1
        and t != 0.0
        and not params.is_resonant(1)
    )
    buckets: dict[tuple[object, ...], list[int]] = {}
    for i, (_, s) in enumerate(psum):
        if s.is_identity:
            continue
        tag = tags.get(s.label)
        if tag is None:
            warnings.warn(f"term {s.label} carries no structure tag; using greedy colouring",
                          stacklevel=2)
            greedy = partition_greedy(psum, seed=0)
            return CommutingPartition(greedy.groups, "greedy", 0, fallback=True)
        buckets.setdefault(_structured_key(tag, merge), []).append(i)
    keys = sorted(buckets)
    return CommutingPartition(tuple(tuple(buckets[key]) for key in keys), "structured",
                              None, tuple(keys))


def verify_partition(psum: PauliSum, p: CommutingPartition) -> bool:
    """Disjoint cover of the non-identity terms with pairwise commuting groups."""
    seen: set[int] = set()
    n = len(psum)
    for g in p.groups:
        for i in g:
            if not 0 <= i < n or i in seen:
                return False
            seen.add(i)
    if seen != set(_non_identity(psum)):
        return False
    adj = anticommutation_matrix(psum)
    for g in p.groups:
        idx = np.array(g, dtype=int)
        if idx.size and adj[np.ix_(idx, idx)].any():
            return False
    return True


def export_graph(psum: PauliSum, p: CommutingPartition | None = None) -> tuple[str, str]:
    """Edge-list text (``i j`` per line) and a JSON group assignment."""
    edges = "".join(f"{i} {j}\n" for i, j in frustration_graph(psum))
    payload: dict[str, object] = {"labels": psum.labels}
    if p is not None:
        payload |= p.to_json()
    return edges, json.dumps(payload, indent=2, sort_keys=True)


def group_sums(psum: PauliSum, p: CommutingPartition) -> list[PauliSum]:
    terms = psum.terms
    return [PauliSum([terms[i] for i in g], psum.n_qubits) for g in p.groups]


def min_greedy_groups(psum: PauliSum, seeds: Sequence[int]) -> int:
    return min(partition_greedy(psum, s).n_groups for s in seeds)
