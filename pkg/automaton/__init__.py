from .graph import CandidateEdge, ExtendedKinematicGraph, GraphEdge, build_graph
from .hybrid_automaton import (
    AutomatonEdge, Guard, HybridAutomaton, InitialState, Interval, Mode, Transition, TransitionKind,
)
from .builder import build_automaton
from .simulator import StepResult, simulate, step
from .validation import validate
from .serialization import automaton_from_json, automaton_to_json

__all__ = [
    'CandidateEdge', 'ExtendedKinematicGraph', 'GraphEdge', 'build_graph',
    'AutomatonEdge', 'Guard', 'HybridAutomaton', 'InitialState', 'Interval', 'Mode', 'Transition',
    'TransitionKind', 'build_automaton', 'StepResult', 'simulate', 'step', 'validate',
    'automaton_from_json', 'automaton_to_json',
]
