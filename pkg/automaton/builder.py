"""Compile an extended kinematic graph into a hybrid automaton."""
from __future__ import annotations

import time

import numpy as np

from logger import log_error, log_info, log_performance
from kinematics.error_types import ConfigurationOrderError, NotATreeError
from .graph import ExtendedKinematicGraph
from .hybrid_automaton import (
    AutomatonEdge, Guard, HybridAutomaton, Mode, Transition, TransitionKind, local_interval, product_modes,
)


def _edge_from_graph(edge) -> AutomatonEdge:
    boundaries = edge.config.boundaries
    if not np.all(np.isfinite(boundaries)) or np.any(np.diff(boundaries) <= 0):
        log_error("Configurational changepoints not increasing", extra={
            'edge': [str(edge.i), str(edge.j)], 'boundaries': boundaries.tolist()
        })
        raise ConfigurationOrderError(
            f"configurational changepoints of edge ({edge.i}, {edge.j}) are not strictly increasing",
            {'edge': [str(edge.i), str(edge.j)], 'boundaries': boundaries.tolist()}
        )
    return AutomatonEdge(str(edge.i), str(edge.j), tuple(edge.config.models),
                         tuple(float(b) for b in boundaries))


def mode_label(models) -> str:
    return ".".join(str(k) for k in models)


def add_transitions(h: HybridAutomaton) -> None:
    """Cross edges between adjacent local models plus e⁰/e⁻¹ clamps on every mode and coordinate."""
    for mode in h.modes:
        for l, edge in enumerate(h.edges):
            k = mode.models[l]
            b = edge.boundaries
            last = k == len(edge.models) - 1
            extent = edge.extents[k]
            if not last:
                target = h.mode_for(mode.models[:l] + (k + 1,) + mode.models[l + 1:])
                h.add_transition(Transition(
                    f"{mode_label(mode.models)}->{mode_label(target.models)}", mode.id, target.id,
                    TransitionKind.CROSS, Guard(l, '>=', b[k + 1], extent)
                ))
            if k > 0:
                target = h.mode_for(mode.models[:l] + (k - 1,) + mode.models[l + 1:])
                h.add_transition(Transition(
                    f"{mode_label(mode.models)}->{mode_label(target.models)}", mode.id, target.id,
                    TransitionKind.CROSS, Guard(l, '<', b[k], 0.0)
                ))
            h.add_transition(Transition(
                f"{mode_label(mode.models)}:e0[{l}]", mode.id, mode.id,
                TransitionKind.CLAMP_LOWER, Guard(l, '<', b[k], 0.0)
            ))
            h.add_transition(Transition(
                f"{mode_label(mode.models)}:e-1[{l}]", mode.id, mode.id,
                TransitionKind.CLAMP_UPPER, Guard(l, '>' if last else '>=', b[k + 1], extent)
            ))


def build_automaton(g: ExtendedKinematicGraph) -> HybridAutomaton:
    """Hybrid automaton whose modes are the product of per-edge local models.

    Invariants are Dom(Mᵏ) = [0, c̃^{k+1} - c̃^k) in local coordinates (closed
    at the top for an edge's last model), offsets x^q are the lower
    boundaries, and Init defaults to the first mode at x = 0.

    Raises:
        NotATreeError: when the graph is not a tree
        ConfigurationOrderError: when an edge's c̃ sequence does not strictly increase
    """
    start = time.time()
    if not g.is_tree():
        log_error("Kinematic graph is not a tree", extra={'parts': len(g.parts), 'edges': len(g.edges)})
        raise NotATreeError("graph not a tree", {'parts': len(g.parts), 'edges': len(g.edges)})
    edges = [_edge_from_graph(edge) for edge in g.edges]

    h = HybridAutomaton([str(p) for p in g.parts], edges)
    for mode_id, models in enumerate(product_modes(edges)):
        h.add_mode(Mode(
            mode_id,
            tuple(models),
            tuple(edge.boundaries[k] for edge, k in zip(edges, models)),
            tuple(local_interval(edge, k) for edge, k in zip(edges, models)),
        ))
    add_transitions(h)
    h.set_initial(0, [0.0] * len(edges))

    log_performance("build_automaton", (time.time() - start) * 1000, {'modes': h.mode_count()})
    log_info("Built hybrid automaton", extra={
        'modes': h.mode_count(), 'transitions': len(h.transitions),
        'boundaries': [list(e.boundaries) for e in edges]
    })
    return h
