"""``hkin`` command line: detect, build, simulate and synth.

Exit codes: 0 ok, 1 unexpected failure, 2 input error, 3 inference
failure, 4 automaton validation failure.
"""
from __future__ import annotations

import argparse
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from dotenv import load_dotenv
from rich import print as rprint
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table

from logger import log_error, log_info, log_performance
from automaton.builder import build_automaton
from automaton.graph import CandidateEdge, build_graph
from automaton.serialization import automaton_from_json, automaton_to_json
from automaton.simulator import simulate
from automaton.validation import validate
from changepoint.detector import detect, polish_segmentation
from changepoint.evidence import DetectionMode
from changepoint.segmentation import to_configurational
from kinematics.error_types import (
    AutomatonError, ConfigurationError, DatasetError, FitError, HybridKinematicsError, InferenceError,
    ValidationError,
)
from synth.scenarios import ScenarioSpec, generate
from models.conversions import dumps
from .file_io import (
    format_segmentation, format_trace, format_trajectory, parse_inputs, parse_segmentation,
    parse_trajectory, read_text, write_atomic,
)
from .run_config import RunConfig, config_summary, load_config

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_INPUT = 2
EXIT_INFERENCE = 3
EXIT_VALIDATION = 4

#: RunConfig keys settable from the command line
RUN_FLAGS = ('prior_p', 'min_len', 'max_len', 'sigma_trans', 'sigma_rot', 'gamma', 'particles',
             'mlesac_iters', 'refine_steps', 'stride', 'polish_iters', 'mode', 'seed', 'rigid_extent')
#: ScenarioSpec keys settable from the command line
SCENARIO_FLAGS = ('object', 'T', 'regime', 'sigma_trans', 'sigma_rot', 'gamma', 'action_step',
                  'gap_count', 'gap_length', 'off_axis_fraction', 'seed')


class AutomatonValidationError(AutomatonError):
    """Raised when a built or loaded automaton fails ``validate``"""
    pass


def exit_code_for(error: BaseException) -> int:
    if isinstance(error, AutomatonError):
        return EXIT_VALIDATION
    if isinstance(error, (FitError, InferenceError)):
        return EXIT_INFERENCE
    if isinstance(error, (ValidationError, ConfigurationError)):
        return EXIT_INPUT
    return EXIT_UNEXPECTED


def _overrides(args: argparse.Namespace, keys: Sequence[str]) -> Dict[str, Any]:
    return {key: getattr(args, key, None) for key in keys}


def _resolve(path: Optional[str], fallback: Optional[str], what: str) -> Path:
    chosen = path or fallback
    if not chosen:
        raise ConfigurationError(f"no {what} path given", {'what': what})
    return Path(chosen)


def _check_automaton(h) -> None:
    violations = validate(h)
    if violations:
        raise AutomatonValidationError(f"automaton invalid: {violations[0]}", {'violations': violations})


def cmd_detect(args: argparse.Namespace) -> int:
    config = load_config(RunConfig, args.config, _overrides(args, RUN_FLAGS))
    source = _resolve(args.input, config.input, 'trajectory')
    target = Path(args.output or config.output or source.with_suffix('.segmentation.json'))
    log_info("detect", extra={'input': str(source), 'output': str(target), 'config': config_summary(config)})

    y, a = parse_trajectory(read_text(source))
    prior, noise, settings = config.prior(), config.noise_model(), config.detector_settings()
    seg = detect(y, a, prior, noise, settings=settings)
    if config.polish_iters > 0:
        seg = polish_segmentation(seg, y, a, prior, noise, config.fit_settings(config.polish_iters),
                                  seed=config.seed, mode=DetectionMode(config.mode))
    configurational = to_configurational(seg, y, a, config.rigid_extent)
    write_atomic(target, format_segmentation(seg, configurational))

    table = Table(title=f"{source.name}: {len(seg.segments)} segment(s)")
    for column in ('t0', 't1', 'model', 'log evidence', 'extent'):
        table.add_column(column)
    for segment, c in zip(seg.segments, configurational.segments):
        table.add_row(str(segment.t0), str(segment.t1), segment.kind.value,
                      f"{segment.log_evidence:.3f}", f"{c.extent:.4f}")
    rprint(table)
    rprint(f"[green]wrote[/] {target}")
    return EXIT_OK


def _edge_specs(args: argparse.Namespace) -> List[List[str]]:
    edges = [list(edge) for edge in (args.edge or [])]
    if args.segmentation:
        if len(args.parts) < 2:
            raise ConfigurationError("a positional segmentation needs at least 2 --parts")
        edges.insert(0, [args.parts[0], args.parts[1], args.segmentation])
    if not edges:
        raise ConfigurationError("give a segmentation file or at least one --edge I J FILE")
    return edges


def cmd_build(args: argparse.Namespace) -> int:
    edges = _edge_specs(args)
    target = _resolve(args.output, None, 'automaton output')
    candidates = []
    for i, j, path in edges:
        seg, configurational = parse_segmentation(read_text(Path(path)))
        if configurational is None:
            raise DatasetError(f"{path} carries no configurational segments; re-run detect",
                               details={'path': path})
        candidates.append(CandidateEdge(i, j, configurational, seg.log_map_score))
    log_info("build", extra={'parts': list(args.parts), 'edges': [e[:2] for e in edges], 'output': str(target)})

    h = build_automaton(build_graph(args.parts, candidates))
    _check_automaton(h)
    write_atomic(target, automaton_to_json(h))
    rprint(Panel.fit(
        f"modes: {h.mode_count()}   transitions: {len(h.transitions)}\n"
        + "\n".join(f"({e.i}, {e.j}) c̃ = {[round(b, 4) for b in e.boundaries]}" for e in h.edges),
        title="hybrid automaton", border_style="cyan"
    ))
    rprint(f"[green]wrote[/] {target}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    h = automaton_from_json(read_text(Path(args.automaton)))
    _check_automaton(h)
    inputs = parse_inputs(read_text(Path(args.inputs)), h.n_coordinates)
    target = _resolve(args.output, None, 'trace output')
    log_info("simulate", extra={'automaton': args.automaton, 'steps': len(inputs), 'output': str(target)})

    trace = simulate(h, inputs)
    write_atomic(target, format_trace(trace, h.n_coordinates))
    changes = sum(1 for prev, cur in zip([h.init.mode] + [r.mode for r in trace], [r.mode for r in trace])
                  if prev != cur)
    rprint(f"[green]wrote[/] {target} ({len(trace)} steps, {changes} mode change(s))")
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    spec = load_config(ScenarioSpec, args.config, _overrides(args, SCENARIO_FLAGS))
    target = _resolve(args.output, None, 'trajectory output')
    labels_path = Path(args.labels) if args.labels else target.with_suffix('.labels.json')
    trajectory = generate(spec)
    trajectory_csv = format_trajectory(trajectory.y, trajectory.a)
    labels_json = dumps(trajectory.to_labels())
    write_atomic(target, trajectory_csv)
    try:
        write_atomic(labels_path, labels_json)
    except BaseException:
        # a trajectory without its labels is not a corpus entry
        target.unlink(missing_ok=True)
        raise
    rprint(f"[green]wrote[/] {target} and {labels_path} (tau = {list(trajectory.tau)})")
    return EXIT_OK


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--config', type=Path, help="key=value run configuration file")
    parser.add_argument('--prior-p', dest='prior_p', type=float)
    parser.add_argument('--min-len', dest='min_len', type=int)
    parser.add_argument('--max-len', dest='max_len', type=int)
    parser.add_argument('--sigma-trans', dest='sigma_trans', type=float)
    parser.add_argument('--sigma-rot', dest='sigma_rot', type=float)
    parser.add_argument('--gamma', type=float)
    parser.add_argument('--particles', type=int, help="particle cap M")
    parser.add_argument('--mlesac-iters', dest='mlesac_iters', type=int)
    parser.add_argument('--refine-steps', dest='refine_steps', type=int)
    parser.add_argument('--stride', type=int)
    parser.add_argument('--polish-iters', dest='polish_iters', type=int)
    parser.add_argument('--mode', choices=[m.value for m in DetectionMode])
    parser.add_argument('--seed', type=int)
    parser.add_argument('--rigid-extent', dest='rigid_extent', type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='hkin', description="Hybrid articulation inference from demonstrations.")
    commands = parser.add_subparsers(dest='command', required=True)

    p = commands.add_parser('detect', help="segment a trajectory CSV into articulation models")
    p.add_argument('input', nargs='?', help="trajectory CSV")
    p.add_argument('-o', '--output', help="segmentation JSON")
    _add_run_flags(p)
    p.set_defaults(handler=cmd_detect)

    p = commands.add_parser('build', help="compile segmentations into a hybrid automaton")
    p.add_argument('segmentation', nargs='?', help="segmentation JSON for the edge between the first two parts")
    p.add_argument('--edge', nargs=3, action='append', metavar=('I', 'J', 'FILE'),
                   help="segmentation JSON of the edge between parts I and J (repeatable)")
    p.add_argument('--parts', nargs='+', default=['0', '1'])
    p.add_argument('-o', '--output', required=True, help="automaton JSON")
    p.set_defaults(handler=cmd_build)

    p = commands.add_parser('simulate', help="run an input sequence through an automaton")
    p.add_argument('automaton', help="automaton JSON")
    p.add_argument('inputs', help="t,u0[,u1...] CSV")
    p.add_argument('-o', '--output', required=True, help="trace CSV")
    p.set_defaults(handler=cmd_simulate)

    p = commands.add_parser('synth', help="generate a labeled synthetic demonstration")
    p.add_argument('--config', type=Path, help="key=value scenario file")
    p.add_argument('--object', choices=['microwave', 'drawer'])
    p.add_argument('--T', dest='T', type=int)
    p.add_argument('--regime', choices=['with-grasp', 'no-action-gaps', 'without-grasp'])
    p.add_argument('--sigma-trans', dest='sigma_trans', type=float)
    p.add_argument('--sigma-rot', dest='sigma_rot', type=float)
    p.add_argument('--gamma', type=float)
    p.add_argument('--action-step', dest='action_step', type=float)
    p.add_argument('--gap-count', dest='gap_count', type=int)
    p.add_argument('--gap-length', dest='gap_length', type=int)
    p.add_argument('--off-axis-fraction', dest='off_axis_fraction', type=float)
    p.add_argument('--seed', type=int)
    p.add_argument('-o', '--output', required=True, help="trajectory CSV")
    p.add_argument('--labels', help="labels JSON (default: next to the trajectory)")
    p.set_defaults(handler=cmd_synth)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    start = time.time()
    try:
        code = args.handler(args)
    except HybridKinematicsError as e:
        code = exit_code_for(e)
        log_error(f"{args.command} failed", extra={'error': type(e).__name__, 'message': e.message,
                                                   'details': e.details, 'exit_code': code})
        rprint(f"[red]Error ({type(e).__name__}):[/] {escape(e.message)}")
    except Exception as e:
        code = EXIT_UNEXPECTED
        log_error(f"{args.command} failed unexpectedly", extra={'error': str(e)}, exc_info=True)
        rprint(f"[red]Unexpected error:[/] {escape(str(e))}")
    log_performance(args.command, (time.time() - start) * 1000, {'exit_code': code})
    return code
