"""CSV and JSON artifacts read and written by the command line."""
from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError as PydanticValidationError

from logger import log_debug, log_error
from changepoint.segmentation import ConfigSegment, ConfigurationalSegmentation, Segment, Segmentation
from kinematics.articulation import ModelKind
from kinematics.error_types import DatasetError, ValidationError
from kinematics.geometry import PoseSeries
from models.conversions import dumps, model_from_schema, model_to_schema
from models.pydantic_schemas import ConfigSegmentSchema, SegmentationSchema, SegmentSchema

TRAJECTORY_COLUMNS = ('t', 'tx', 'ty', 'tz', 'qw', 'qx', 'qy', 'qz',
                      'atx', 'aty', 'atz', 'aqw', 'aqx', 'aqy', 'aqz')
_IDENTITY_ACTION = (0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0)


def _fmt(value: float) -> str:
    return repr(float(value))


def write_atomic(path: Path, text: str) -> None:
    """Write through a sibling temp file so readers never see a partial artifact."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    log_debug("Wrote artifact", extra={'path': str(path), 'bytes': len(text)})


def read_text(path: Path) -> str:
    try:
        return Path(path).read_text(encoding='utf-8')
    except OSError as e:
        log_error("Cannot read input file", extra={'path': str(path), 'error': str(e)})
        raise DatasetError(f"cannot read {path}: {e.strerror or e}", details={'path': str(path)})


def _numeric_rows(text: str, columns: Sequence[str], what: str) -> List[Tuple[int, List[float]]]:
    """Header-checked numeric rows, each with its 1-based file line number."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DatasetError(f"empty {what} file", line_number=1)
    if tuple(h.strip() for h in header) != tuple(columns):
        raise DatasetError(f"{what} header must be {','.join(columns)}", line_number=1,
                           details={'header': header})
    rows = []
    for line_number, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(columns):
            raise DatasetError(f"expected {len(columns)} fields, found {len(row)}", line_number=line_number)
        try:
            values = [float(cell) for cell in row]
        except ValueError:
            raise DatasetError("non-numeric field", line_number=line_number, details={'row': row})
        if not np.all(np.isfinite(values)):
            raise DatasetError("non-finite field", line_number=line_number, details={'row': row})
        if values[0] != len(rows):
            raise DatasetError(f"t must count up from 0, expected {len(rows)}", line_number=line_number)
        rows.append((line_number, values))
    return rows


def parse_trajectory(text: str) -> Tuple[PoseSeries, PoseSeries]:
    """Observations y[0..T-1] and actions a[0..T-2]; the last row's action is ignored.

    Raises:
        DatasetError: on a bad header, short or non-numeric rows, or a zero quaternion, naming the line
    """
    rows = _numeric_rows(text, TRAJECTORY_COLUMNS, 'trajectory')
    if len(rows) < 2:
        raise DatasetError("a trajectory needs at least 2 observations", details={'rows': len(rows)})
    for line_number, values in rows:
        for start in (4, 11):
            if np.linalg.norm(values[start:start + 4]) < 1e-12:
                raise DatasetError("zero quaternion", line_number=line_number)
    data = np.array([values for _, values in rows])
    try:
        y = PoseSeries(data[:, 1:4], data[:, 4:8])
        a = PoseSeries(data[:-1, 8:11], data[:-1, 11:15])
    except ValidationError as e:
        raise DatasetError(e.message, details=e.details)
    return y, a


def format_trajectory(y: PoseSeries, a: PoseSeries) -> str:
    if len(a) != len(y) - 1:
        raise ValidationError("actions must number one fewer than observations",
                              {'observations': len(y), 'actions': len(a)})
    lines = [",".join(TRAJECTORY_COLUMNS)]
    actions = a.as_array()
    for t, pose in enumerate(y.as_array()):
        action = actions[t] if t < len(actions) else _IDENTITY_ACTION
        lines.append(",".join([str(t)] + [_fmt(v) for v in pose] + [_fmt(v) for v in action]))
    return "\n".join(lines) + "\n"


def segmentation_to_schema(seg: Segmentation,
                           config: Optional[ConfigurationalSegmentation] = None) -> SegmentationSchema:
    return SegmentationSchema(
        tau=list(seg.tau),
        segments=[
            SegmentSchema(t0=s.t0, t1=s.t1, model=model_to_schema(s.model),
                          log_evidence=s.log_evidence, gamma=s.gamma)
            for s in seg.segments
        ],
        log_map_score=seg.log_map_score,
        configurational=[
            ConfigSegmentSchema(c_start=c.c_start, c_end=c.c_end, extent=c.extent, c_max=c.c_max,
                                kind=c.kind.value)
            for c in (config.segments if config is not None else ())
        ],
    )


def format_segmentation(seg: Segmentation, config: Optional[ConfigurationalSegmentation] = None) -> str:
    return dumps(segmentation_to_schema(seg, config))


def parse_segmentation(text: str) -> Tuple[Segmentation, Optional[ConfigurationalSegmentation]]:
    """Segmentation plus its configurational view when the file carries one.

    Raises:
        DatasetError: on malformed JSON, a schema mismatch or inconsistent segments
    """
    try:
        schema = SegmentationSchema.model_validate_json(text)
    except PydanticValidationError as e:
        raise DatasetError(f"invalid segmentation JSON: {e.errors()[0]['msg']}",
                           details={'errors': e.errors(include_url=False)})
    try:
        segments = tuple(
            Segment(s.t0, s.t1, ModelKind(s.model.kind), model_from_schema(s.model), s.log_evidence, s.gamma)
            for s in schema.segments
        )
        seg = Segmentation(tuple(schema.tau), segments, schema.log_map_score)
        seg.validate()
    except ValidationError as e:
        raise DatasetError(e.message, details=e.details)

    if not schema.configurational:
        return seg, None
    if len(schema.configurational) != len(segments):
        raise DatasetError("configurational entries must match segments one to one",
                           details={'segments': len(segments), 'configurational': len(schema.configurational)})
    config = []
    for c, segment in zip(schema.configurational, segments):
        if ModelKind(c.kind) is not segment.kind:
            raise DatasetError("configurational kind differs from its segment",
                               details={'t0': segment.t0, 'kind': c.kind})
        config.append(ConfigSegment(c.c_start, c.c_end, segment.kind, segment.model, c.extent, c.c_max))
    return seg, ConfigurationalSegmentation(tuple(config))


def parse_inputs(text: str, n_edges: int) -> np.ndarray:
    """``(n, n_edges)`` configuration increments from a ``t,u0[,u1…]`` CSV."""
    columns = ['t'] + [f"u{l}" for l in range(n_edges)]
    rows = _numeric_rows(text, columns, 'input')
    return np.array([values[1:] for _, values in rows], dtype=float).reshape(-1, n_edges)


def format_trace(results, n_edges: int) -> str:
    """One row per step: t, mode, local x, global c, fired transition ids or ``-``."""
    header = ['t', 'mode'] + [f"x{l}" for l in range(n_edges)] + [f"c{l}" for l in range(n_edges)] + ['fired']
    lines = [",".join(header)]
    for t, result in enumerate(results):
        fired = ";".join(result.fired) if result.fired else "-"
        lines.append(",".join(
            [str(t), str(result.mode)] + [_fmt(v) for v in result.x] + [_fmt(v) for v in result.c] + [fired]
        ))
    return "\n".join(lines) + "\n"
