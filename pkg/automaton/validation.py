"""Well-formedness checks for hybrid automata."""
from __future__ import annotations

from typing import List

import numpy as np

from logger import log_warning
from .graph import is_spanning_tree
from .hybrid_automaton import HybridAutomaton, TransitionKind, local_interval


def validate(h: HybridAutomaton) -> List[str]:
    """Every violated automaton invariant as a message; empty iff well-formed."""
    violations: List[str] = []
    if not is_spanning_tree(h.parts, [(e.i, e.j) for e in h.edges]):
        violations.append("graph not a tree")

    for edge in h.edges:
        boundaries = np.asarray(edge.boundaries)
        if len(boundaries) != len(edge.models) + 1 or np.any(np.diff(boundaries) <= 0) or boundaries[0] != 0.0:
            violations.append(f"edge ({edge.i}, {edge.j}): configurational changepoints not strictly increasing from 0")

    if h.mode_count() != h.expected_mode_count():
        violations.append(f"mode count {h.mode_count()} differs from product {h.expected_mode_count()}")

    for mode in h.modes:
        outgoing = h.get_transitions_from(mode.id)
        for l, edge in enumerate(h.edges):
            if l >= len(mode.models) or not 0 <= mode.models[l] < len(edge.models):
                violations.append(f"mode {mode.id}: model index out of range on coordinate {l}")
                continue
            k = mode.models[l]
            if len(edge.boundaries) == len(edge.models) + 1 and mode.invariant[l] != local_interval(edge, k):
                violations.append(f"mode {mode.id}: invariant of coordinate {l} is not Dom(M^{k})")
            for kind in (TransitionKind.CLAMP_LOWER, TransitionKind.CLAMP_UPPER):
                if not any(t.kind is kind and t.guard.coordinate == l and t.target == mode.id for t in outgoing):
                    violations.append(f"mode {mode.id}: missing {kind.value} self-edge on coordinate {l}")

    transitions = h.transitions
    checked = set()
    for t in transitions:
        if t.kind is not TransitionKind.CROSS or frozenset((t.source, t.target)) in checked:
            continue
        checked.add(frozenset((t.source, t.target)))
        source, target = h.mode(t.source), h.mode(t.target)
        moved = [l for l, (a, b) in enumerate(zip(source.models, target.models)) if a != b]
        if len(moved) != 1 or abs(source.models[moved[0]] - target.models[moved[0]]) != 1:
            violations.append(f"transition {t.id}: not a single adjacent local-model move")
            continue
        reverse = [r for r in transitions
                   if r.kind is TransitionKind.CROSS and r.source == t.target and r.target == t.source]
        if not reverse:
            violations.append(f"transition {t.id}: no reverse transition")
            continue
        r = reverse[0]
        ops = {t.guard.op, r.guard.op}
        if ops != {'>=', '<'} or t.guard.threshold != r.guard.threshold or t.guard.coordinate != r.guard.coordinate:
            violations.append(f"transition {t.id}: guards with {r.id} do not partition the boundary")

    if h.init is None:
        violations.append("no initial state")
    elif not (0 <= h.init.mode < h.mode_count()) or not h.contains(h.init.mode, h.init.x):
        violations.append("initial state outside its mode invariant")

    if violations:
        log_warning("Automaton failed validation", extra={'violations': violations})
    return violations
