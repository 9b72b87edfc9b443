"""Discrete-time guarded simulation of a hybrid automaton."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from logger import log_error
from kinematics.error_types import InvariantViolationError, ValidationError
from .hybrid_automaton import HybridAutomaton, Transition, TransitionKind


@dataclass(frozen=True)
class StepResult:
    mode: int
    #: Local configuration per edge
    x: Tuple[float, ...]
    #: Global configuration per edge
    c: Tuple[float, ...]
    fired: Tuple[str, ...]


def _find(transitions: List[Transition], coordinate: int, kind: TransitionKind,
          op: Optional[str] = None) -> Optional[Transition]:
    for transition in transitions:
        guard = transition.guard
        if transition.kind is kind and guard.coordinate == coordinate and (op is None or guard.op == op):
            return transition
    return None


def step(h: HybridAutomaton, q: int, x: Sequence[float], u: Sequence[float]) -> StepResult:
    """One guarded update ``x⁺ = x + u``.

    Coordinates are processed in edge order. A coordinate whose tentative
    value satisfies a cross guard moves to the adjacent local model with
    identity reset (continuous in global coordinates); afterwards the
    clamp self-edges of the resulting mode bring it back into I(q').

    Raises:
        InvariantViolationError: when ``x`` is outside I(q) on entry
        ValidationError: when ``x`` or ``u`` has the wrong length or is not finite
    """
    x = [float(v) for v in x]
    u = [float(v) for v in u]
    if len(x) != h.n_coordinates or len(u) != h.n_coordinates:
        raise ValidationError("state and input need one value per edge",
                              {'edges': h.n_coordinates, 'x': len(x), 'u': len(u)})
    if not np.all(np.isfinite(u)):
        raise ValidationError("inputs must be finite", {'u': u})
    if not h.contains(q, x):
        log_error("State outside mode invariant", extra={'mode': q, 'x': x})
        raise InvariantViolationError("state outside mode invariant", {'mode': q, 'x': x})

    fired: List[str] = []
    for l in range(h.n_coordinates):
        if u[l] == 0.0:
            continue
        x_next = x[l] + u[l]
        outgoing = h.get_transitions_from(q)
        up = _find(outgoing, l, TransitionKind.CROSS, '>=')
        down = _find(outgoing, l, TransitionKind.CROSS, '<')
        for transition in (up, down):
            if transition is not None and transition.guard.holds(x_next):
                source, target = h.mode(q), h.mode(transition.target)
                x_next = x_next + (source.offset[l] - target.offset[l])
                q = transition.target
                fired.append(transition.id)
                break

        interval = h.mode(q).invariant[l]
        if not interval.contains(x_next):
            outgoing = h.get_transitions_from(q)
            kind = TransitionKind.CLAMP_LOWER if x_next < interval.lower else TransitionKind.CLAMP_UPPER
            clamp = _find(outgoing, l, kind)
            if clamp is not None:
                fired.append(clamp.id)
            x_next = interval.clamp(x_next)
        x[l] = x_next

    return StepResult(q, tuple(x), tuple(float(v) for v in h.to_global(q, x)), tuple(fired))


def simulate(h: HybridAutomaton, inputs: np.ndarray, q: Optional[int] = None,
             x: Optional[Sequence[float]] = None) -> List[StepResult]:
    """Trace of ``step`` over an ``(n, edges)`` input array, starting from Init unless given."""
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    if h.init is None and (q is None or x is None):
        raise ValidationError("automaton has no initial state")
    q = h.init.mode if q is None else q
    x = list(h.init.x if x is None else x)
    trace = []
    for u in inputs:
        result = step(h, q, x, u)
        trace.append(result)
        q, x = result.mode, list(result.x)
    return trace
