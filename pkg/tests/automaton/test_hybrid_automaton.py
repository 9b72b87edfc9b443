import json

import numpy as np
import pytest

from automaton.builder import build_automaton
from automaton.graph import CandidateEdge, build_graph
from automaton.hybrid_automaton import Interval, TransitionKind
from automaton.serialization import automaton_from_json, automaton_to_json
from automaton.simulator import simulate, step
from automaton.validation import validate
from kinematics.error_types import ConfigurationOrderError, DatasetError, InvariantViolationError, ValidationError
from .conftest import LATCH, OPEN, drawer_config, microwave_config


def test_microwave_has_two_modes_and_a_latch_guard(microwave_automaton):
    h = microwave_automaton
    assert h.mode_count() == 2
    assert [m.models for m in h.modes] == [(0,), (1,)]
    assert h.mode(1).offset == (LATCH,)
    cross = [t for t in h.transitions if t.kind is TransitionKind.CROSS]
    assert {(t.source, t.target, t.guard.op, t.guard.threshold) for t in cross} == {
        (0, 1, '>=', LATCH), (1, 0, '<', LATCH)
    }
    assert h.init.mode == 0 and h.init.x == (0.0,)
    assert validate(h) == []


def test_drawer_has_one_mode():
    h = build_automaton(build_graph(['0', '1'], [CandidateEdge('0', '1', drawer_config(), 0.0)]))
    assert h.mode_count() == 1
    assert not [t for t in h.transitions if t.kind is TransitionKind.CROSS]
    assert validate(h) == []


def test_every_mode_has_both_clamps(cabinet_automaton):
    h = cabinet_automaton
    assert h.mode_count() == h.expected_mode_count() == 2
    for mode in h.modes:
        kinds = [(t.kind, t.guard.coordinate) for t in h.get_transitions_from(mode.id) if t.target == mode.id]
        for l in range(h.n_coordinates):
            assert (TransitionKind.CLAMP_LOWER, l) in kinds
            assert (TransitionKind.CLAMP_UPPER, l) in kinds
    assert validate(h) == []


def test_invariants_are_half_open_except_last():
    iv = Interval(0.0, 0.05, upper_closed=False)
    assert iv.contains(0.0) and not iv.contains(0.05)
    assert iv.clamp(0.07) < 0.05
    assert Interval(0.0, 1.5, upper_closed=True).clamp(2.0) == 1.5


def test_ramp_through_latch_changes_mode_once(microwave_automaton):
    trace = simulate(microwave_automaton, np.full((40, 1), 0.01))
    modes = [microwave_automaton.init.mode] + [r.mode for r in trace]
    assert sum(1 for a, b in zip(modes, modes[1:]) if a != b) == 1
    crossing = next(r for r in trace if '0->1' in r.fired)
    assert crossing.c[0] == pytest.approx(crossing.x[0] + LATCH)
    assert trace[-1].c[0] == pytest.approx(0.40)


def test_zero_inputs_keep_state(microwave_automaton):
    trace = simulate(microwave_automaton, np.zeros((10, 1)))
    assert all(r.mode == 0 and r.x == (0.0,) and r.fired == () for r in trace)


def test_negative_inputs_clamp_at_zero(microwave_automaton):
    trace = simulate(microwave_automaton, np.full((5, 1), -0.01))
    assert all(r.mode == 0 and r.x == (0.0,) for r in trace)
    assert all(r.fired == ('0:e0[0]',) for r in trace)


def test_opening_saturates_at_the_top(microwave_automaton):
    trace = simulate(microwave_automaton, np.full((30, 1), 0.1))
    assert trace[-1].mode == 1
    assert trace[-1].x[0] == pytest.approx(OPEN)
    assert trace[-1].c[0] == pytest.approx(LATCH + OPEN)


def test_closing_crosses_back(microwave_automaton):
    h = microwave_automaton
    result = step(h, 1, [0.02], [-0.03])
    assert result.mode == 0
    assert result.c[0] == pytest.approx(LATCH - 0.01)
    assert result.fired == ('1->0',)


def test_random_inputs_stay_inside_invariants(cabinet_automaton):
    h = cabinet_automaton
    rng = np.random.default_rng(0)
    q, x = h.init.mode, list(h.init.x)
    c = h.to_global(q, x)
    for u in rng.normal(0.0, 0.08, size=(2000, h.n_coordinates)):
        result = step(h, q, x, u)
        assert h.contains(result.mode, result.x)
        clamped = any(':e' in fired for fired in result.fired)
        if not clamped:
            np.testing.assert_allclose(result.c, c + u, atol=1e-12)
        q, x, c = result.mode, list(result.x), np.asarray(result.c)


def test_step_rejects_state_outside_invariant(microwave_automaton):
    with pytest.raises(InvariantViolationError):
        step(microwave_automaton, 0, [0.2], [0.0])
    with pytest.raises(ValidationError):
        step(microwave_automaton, 0, [0.0], [0.1, 0.1])


def test_decreasing_boundaries_rejected():
    graph = build_graph(['0', '1'], [CandidateEdge('0', '1', microwave_config(latch=-0.05), 0.0)])
    with pytest.raises(ConfigurationOrderError):
        build_automaton(graph)


def test_json_round_trip_is_byte_identical(cabinet_automaton):
    text = automaton_to_json(cabinet_automaton)
    assert automaton_to_json(automaton_from_json(text)) == text
    assert json.loads(text)['schema_version'] == 1


def test_validate_reports_missing_clamp(microwave_automaton):
    data = json.loads(automaton_to_json(microwave_automaton))
    data['guards'] = [g for g in data['guards'] if g['id'] != '0:e0[0]']
    violations = validate(automaton_from_json(json.dumps(data)))
    assert any('clamp_lower' in v for v in violations)


def test_validate_reports_broken_partition(microwave_automaton):
    data = json.loads(automaton_to_json(microwave_automaton))
    for guard in data['guards']:
        if guard['id'] == '1->0':
            guard['threshold'] = 0.07
    violations = validate(automaton_from_json(json.dumps(data)))
    assert any('partition' in v for v in violations)


def test_malformed_json_rejected():
    with pytest.raises(DatasetError):
        automaton_from_json('{"parts": []}')


def test_undoing_an_input_restores_the_state(cabinet_automaton):
    h = cabinet_automaton
    rng = np.random.default_rng(5)
    q, x = h.init.mode, list(h.init.x)
    checked = 0
    for u in rng.normal(0.0, 0.05, size=(500, h.n_coordinates)):
        forward = step(h, q, x, u)
        if not any(':e' in fired for fired in forward.fired):
            back = step(h, forward.mode, forward.x, -u)
            assert back.mode == q
            np.testing.assert_allclose(back.x, x, atol=1e-12)
            checked += 1
        q, x = forward.mode, list(forward.x)
    assert checked > 100


def test_validate_reports_non_tree(microwave_automaton):
    data = json.loads(automaton_to_json(microwave_automaton))
    data['edges'][0]['j'] = data['edges'][0]['i']
    assert 'graph not a tree' in validate(automaton_from_json(json.dumps(data)))
