"""Hybrid automaton over the product of per-edge local models.

A mode picks one local model index per graph edge. The continuous state
holds one configuration per edge, stored locally (0 at the mode's lower
boundary); the global configuration adds the mode offset x^q. Transitions
either move one edge to an adjacent local model (identity reset) or clamp
a coordinate back into the mode invariant.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from kinematics.articulation import ArticulationModel


class TransitionKind(str, Enum):
    CROSS = "cross"
    CLAMP_LOWER = "clamp_lower"
    CLAMP_UPPER = "clamp_upper"


@dataclass(frozen=True)
class Interval:
    """Local invariant [0, upper) or [0, upper] of one coordinate."""
    lower: float
    upper: float
    upper_closed: bool

    def contains(self, x: float) -> bool:
        if x < self.lower:
            return False
        return x <= self.upper if self.upper_closed else x < self.upper

    def clamp(self, x: float) -> float:
        if x < self.lower:
            return self.lower
        if self.upper_closed:
            return min(x, self.upper)
        return x if x < self.upper else float(np.nextafter(self.upper, -np.inf))


@dataclass(frozen=True)
class Guard:
    """Threshold predicate ``c[coordinate] op threshold`` on the global configuration.

    ``local_threshold`` is the same boundary expressed in the source mode's
    local coordinates; simulation evaluates guards on local state.
    """
    coordinate: int
    op: str
    threshold: float
    local_threshold: float

    def holds(self, x_local: float) -> bool:
        if self.op == '>=':
            return x_local >= self.local_threshold
        if self.op == '>':
            return x_local > self.local_threshold
        return x_local < self.local_threshold


@dataclass(frozen=True)
class Transition:
    id: str
    source: int
    target: int
    kind: TransitionKind
    guard: Guard


@dataclass(frozen=True)
class Mode:
    """Discrete mode: one local model index per edge, with offsets and invariants."""
    id: int
    models: Tuple[int, ...]
    offset: Tuple[float, ...]
    invariant: Tuple[Interval, ...]


@dataclass(frozen=True)
class AutomatonEdge:
    """Graph edge as the automaton sees it: local models and their boundaries c̃."""
    i: str
    j: str
    models: Tuple[ArticulationModel, ...]
    boundaries: Tuple[float, ...]

    @property
    def extents(self) -> Tuple[float, ...]:
        return tuple(b - a for a, b in zip(self.boundaries, self.boundaries[1:]))


@dataclass(frozen=True)
class InitialState:
    mode: int
    x: Tuple[float, ...]


class HybridAutomaton:
    """Modes Q, per-edge state X, inputs U, Init, invariants I, transitions E with guards G.

    The reset map is the identity on cross transitions and a clamp on the
    boundary self-edges; the admissible inputs φ(q, x) are all of U.
    """

    def __init__(self, parts: Sequence[str], edges: Sequence[AutomatonEdge]):
        self.parts = tuple(parts)
        self.edges = tuple(edges)
        self._modes: List[Mode] = []
        self._by_models: Dict[Tuple[int, ...], int] = {}
        self._transitions: List[Transition] = []
        self.init: Optional[InitialState] = None

    @property
    def n_coordinates(self) -> int:
        return len(self.edges)

    def add_mode(self, mode: Mode) -> Mode:
        self._by_models[mode.models] = mode.id
        self._modes.append(mode)
        return mode

    def add_transition(self, transition: Transition) -> Transition:
        self._transitions.append(transition)
        return transition

    def set_initial(self, mode: int, x: Sequence[float]) -> None:
        self.init = InitialState(int(mode), tuple(float(v) for v in x))

    @property
    def modes(self) -> List[Mode]:
        return list(self._modes)

    @property
    def transitions(self) -> List[Transition]:
        return list(self._transitions)

    def mode(self, mode_id: int) -> Mode:
        return self._modes[mode_id]

    def mode_for(self, models: Sequence[int]) -> Optional[Mode]:
        mode_id = self._by_models.get(tuple(models))
        return None if mode_id is None else self._modes[mode_id]

    def get_transitions_from(self, mode_id: int) -> List[Transition]:
        return [t for t in self._transitions if t.source == mode_id]

    def to_global(self, mode_id: int, x: Sequence[float]) -> np.ndarray:
        """Global configuration c = x^q + x."""
        return np.asarray(self.mode(mode_id).offset) + np.asarray(x, dtype=float)

    def contains(self, mode_id: int, x: Sequence[float]) -> bool:
        """x ∈ I(q)."""
        intervals = self.mode(mode_id).invariant
        return len(x) == len(intervals) and all(iv.contains(float(v)) for iv, v in zip(intervals, x))

    def mode_count(self) -> int:
        return len(self._modes)

    def expected_mode_count(self) -> int:
        return int(np.prod([len(e.models) for e in self.edges])) if self.edges else 1

    def __str__(self) -> str:
        return f"HybridAutomaton(parts={len(self.parts)}, modes={len(self._modes)}, transitions={len(self._transitions)})"


def product_modes(edges: Sequence[AutomatonEdge]) -> List[Tuple[int, ...]]:
    """Local-model index tuples in lexicographic order."""
    return list(itertools.product(*[range(len(e.models)) for e in edges]))


def local_interval(edge: AutomatonEdge, k: int) -> Interval:
    extent = edge.extents[k]
    return Interval(0.0, float(extent), upper_closed=(k == len(edge.models) - 1))
