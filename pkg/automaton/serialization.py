"""Deterministic JSON for hybrid automata."""
from __future__ import annotations

from pydantic import ValidationError as PydanticValidationError

from kinematics.error_types import DatasetError
from models.conversions import dumps, model_from_schema, model_to_schema
from models.pydantic_schemas import (
    AutomatonEdgeSchema, AutomatonSchema, GuardSchema, InitSchema,
    IntervalSchema, ModeSchema,
)
from .hybrid_automaton import (
    AutomatonEdge, Guard, HybridAutomaton, Interval, Mode, Transition, TransitionKind,
)


def automaton_to_schema(h: HybridAutomaton) -> AutomatonSchema:
    return AutomatonSchema(
        parts=list(h.parts),
        edges=[
            AutomatonEdgeSchema(
                i=edge.i, j=edge.j,
                models=[model_to_schema(m) for m in edge.models],
                config_changepoints=list(edge.boundaries),
            )
            for edge in h.edges
        ],
        modes=[
            ModeSchema(
                id=mode.id, models=list(mode.models), offset=list(mode.offset),
                invariant=[IntervalSchema(lower=iv.lower, upper=iv.upper, upper_closed=iv.upper_closed)
                           for iv in mode.invariant],
            )
            for mode in h.modes
        ],
        guards=[
            GuardSchema(
                id=t.id, source=t.source, target=t.target, kind=t.kind.value,
                coordinate=t.guard.coordinate, op=t.guard.op,
                threshold=t.guard.threshold, local_threshold=t.guard.local_threshold,
            )
            for t in h.transitions
        ],
        init=InitSchema(mode=h.init.mode, x=list(h.init.x)),
    )


def automaton_from_schema(schema: AutomatonSchema) -> HybridAutomaton:
    """Rebuild exactly what the schema says; run ``validate`` to check it."""
    h = HybridAutomaton(
        schema.parts,
        [AutomatonEdge(e.i, e.j, tuple(model_from_schema(m) for m in e.models), tuple(e.config_changepoints))
         for e in schema.edges],
    )
    for m in schema.modes:
        h.add_mode(Mode(
            m.id, tuple(m.models), tuple(m.offset),
            tuple(Interval(iv.lower, iv.upper, iv.upper_closed) for iv in m.invariant),
        ))
    for g in schema.guards:
        h.add_transition(Transition(
            g.id, g.source, g.target, TransitionKind(g.kind),
            Guard(g.coordinate, g.op, g.threshold, g.local_threshold),
        ))
    h.set_initial(schema.init.mode, schema.init.x)
    return h


def automaton_to_json(h: HybridAutomaton) -> str:
    return dumps(automaton_to_schema(h))


def automaton_from_json(text: str) -> HybridAutomaton:
    """Parse automaton JSON.

    Raises:
        DatasetError: on malformed JSON or schema mismatch
    """
    try:
        schema = AutomatonSchema.model_validate_json(text)
    except PydanticValidationError as e:
        raise DatasetError(f"invalid automaton JSON: {e.errors()[0]['msg']}",
                           details={'errors': e.errors(include_url=False)})
    if any(m.id != k for k, m in enumerate(schema.modes)):
        raise DatasetError("mode ids must be 0..n-1 in order")
    n_modes = len(schema.modes)
    if any(not (0 <= g.source < n_modes and 0 <= g.target < n_modes) for g in schema.guards):
        raise DatasetError("guard refers to an unknown mode")
    return automaton_from_schema(schema)
