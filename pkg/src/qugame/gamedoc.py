"""Game documents: JSON codecs, CSV emission, atomic file output.

One document describes one game (or one play, profile, or schedule). Complex
numbers are [re, im] pairs; reals are written with 17 significant digits so a
parse-serialize round trip is exact; field order is fixed, making serialized
bytes stable across runs.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from typing import Sequence

import numpy as np

from .builders import AdiabaticSchedule
from .classical import FiniteGame, MixedProfile
from .config import DEFAULT_TOLS
from .linalg import HermitianOperator, ProductPlay, PureState, UnitaryOperator
from .quantum import ObservablePayoff, OverlapPayoff, QuantumGame, TraceRecord

__all__ = [
    "SCHEMA_VERSION",
    "DocumentError",
    "parse_game",
    "serialize_game",
    "parse_play",
    "serialize_play",
    "parse_profile",
    "serialize_profile",
    "parse_schedule",
    "serialize_schedule",
    "canonical_json",
    "format_real",
    "write_text_atomic",
    "write_trace_csv",
    "write_sweep_csv",
    "read_point_cloud",
    "write_point_cloud",
]

SCHEMA_VERSION = 1

# targets this close to unit norm are silently renormalized; anything farther
# is rejected as a data error rather than guessed at
NORMALIZATION_WINDOW = 1e-6


class DocumentError(ValueError):
    """Validation failure, tagged with the path of the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def format_real(x: float) -> str:
    """17-significant-digit decimal form; exact under float round trip."""
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite real {x!r}")
    if x == 0.0:
        # json reads "-0" back as integer zero, so a signed zero cannot
        # survive a round trip; fold it into plain 0 at the source
        return "0"
    return f"{x:.17g}"


def canonical_json(value) -> str:
    """Deterministic JSON: fixed key order, 17-significant-digit reals."""
    pieces: list[str] = []
    _emit(value, pieces)
    return "".join(pieces)


def _emit(value, out: list[str]) -> None:
    if isinstance(value, bool):
        out.append("true" if value else "false")
    elif isinstance(value, (int, np.integer)):
        out.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        out.append(format_real(float(value)))
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif value is None:
        out.append("null")
    elif isinstance(value, dict):
        out.append("{")
        for k, (key, item) in enumerate(value.items()):
            if k:
                out.append(",")
            out.append(json.dumps(str(key)))
            out.append(":")
            _emit(item, out)
        out.append("}")
    elif isinstance(value, (list, tuple, np.ndarray)):
        out.append("[")
        for k, item in enumerate(value):
            if k:
                out.append(",")
            _emit(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _matrix_pairs(m: np.ndarray) -> list[list[list[float]]]:
    return [[_pair(z) for z in row] for row in m]


def _vector_pairs(v: np.ndarray) -> list[list[float]]:
    return [_pair(z) for z in v]


# ---------------------------------------------------------------- parsing ---

def _load(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError("$", f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DocumentError("$", "document root must be an object")
    return doc


def _expect_kind(doc: dict, kind: str) -> None:
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise DocumentError("schema_version", f"expected {SCHEMA_VERSION}, got {version!r}")
    if doc.get("kind") != kind:
        raise DocumentError("kind", f"expected {kind!r}, got {doc.get('kind')!r}")


def _real(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DocumentError(path, f"expected a real number, got {value!r}")
    x = float(value)
    if not math.isfinite(x):
        raise DocumentError(path, f"expected a finite real, got {value!r}")
    return x


def _complex(value, path: str) -> complex:
    if not isinstance(value, list) or len(value) != 2:
        raise DocumentError(path, f"expected a [re, im] pair, got {value!r}")
    return complex(_real(value[0], path + "[0]"), _real(value[1], path + "[1]"))


def _int(value, path: str, *, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DocumentError(path, f"expected an integer, got {value!r}")
    if value < minimum:
        raise DocumentError(path, f"expected an integer >= {minimum}, got {value}")
    return value


def _list(value, path: str) -> list:
    if not isinstance(value, list):
        raise DocumentError(path, f"expected a list, got {type(value).__name__}")
    return value


def _complex_vector(value, path: str, length: int | None = None) -> np.ndarray:
    items = _list(value, path)
    if length is not None and len(items) != length:
        raise DocumentError(path, f"expected {length} entries, got {len(items)}")
    return np.array(
        [_complex(z, f"{path}[{k}]") for k, z in enumerate(items)], dtype=np.complex128
    )


def _complex_matrix(value, path: str, size: int | None = None) -> np.ndarray:
    rows = _list(value, path)
    if size is not None and len(rows) != size:
        raise DocumentError(path, f"expected {size} rows, got {len(rows)}")
    width = size if size is not None else None
    parsed = []
    for r, row in enumerate(rows):
        vec = _complex_vector(row, f"{path}[{r}]", width)
        if width is None:
            width = vec.size
        parsed.append(vec)
    if not parsed:
        raise DocumentError(path, "matrix must be nonempty")
    return np.vstack(parsed)


def _unit_state(vec: np.ndarray, path: str) -> PureState:
    norm = np.linalg.norm(vec)
    if norm < 1e-12:
        raise DocumentError(path, "state vector is numerically zero")
    if abs(norm - 1.0) > NORMALIZATION_WINDOW:
        raise DocumentError(
            path, f"state norm {norm!r} is outside the renormalization window"
        )
    if abs(norm - 1.0) <= DEFAULT_TOLS.unit_norm:
        # already unit to working precision; dividing would shift amplitudes
        # by an ulp and break parse-serialize byte identity
        return PureState(vec)
    return PureState(vec / norm)


def _unit_target(value, path: str, length: int) -> PureState:
    return _unit_state(_complex_vector(value, path, length), path)


def _nested_shape(value, shape: tuple[int, ...], path: str) -> np.ndarray:
    if not shape:
        return np.array(_real(value, path))
    items = _list(value, path)
    if len(items) != shape[0]:
        raise DocumentError(path, f"expected {shape[0]} entries, got {len(items)}")
    return np.stack(
        [_nested_shape(item, shape[1:], f"{path}[{k}]") for k, item in enumerate(items)]
    )


def parse_game(text: str) -> FiniteGame | QuantumGame:
    """Parse a game document, validating structure, norms, and unitarity."""
    doc = _load(text)
    kind = doc.get("kind")
    if kind == "finite":
        return _parse_finite(doc)
    if kind == "quantum":
        return _parse_quantum(doc)
    raise DocumentError("kind", f"expected 'finite' or 'quantum', got {kind!r}")


def _parse_finite(doc: dict) -> FiniteGame:
    _expect_kind(doc, "finite")
    counts = tuple(
        _int(v, f"strategy_counts[{k}]", minimum=1)
        for k, v in enumerate(_list(doc.get("strategy_counts"), "strategy_counts"))
    )
    if len(counts) < 2:
        raise DocumentError("strategy_counts", "a game needs at least two players")
    tensors_raw = _list(doc.get("payoff_tensors"), "payoff_tensors")
    if len(tensors_raw) != len(counts):
        raise DocumentError(
            "payoff_tensors", f"expected {len(counts)} tensors, got {len(tensors_raw)}"
        )
    tensors = [
        _nested_shape(t, counts, f"payoff_tensors[{i}]") for i, t in enumerate(tensors_raw)
    ]
    return FiniteGame(tensors)


def _parse_quantum(doc: dict) -> QuantumGame:
    _expect_kind(doc, "quantum")
    dims = tuple(
        _int(v, f"dims[{k}]", minimum=2)
        for k, v in enumerate(_list(doc.get("dims"), "dims"))
    )
    if len(dims) < 2:
        raise DocumentError("dims", "a game needs at least two players")
    joint = math.prod(dims)
    matrix = _complex_matrix(doc.get("unitary"), "unitary", joint)
    try:
        unitary = UnitaryOperator(matrix)
    except ValueError as exc:
        raise DocumentError("unitary", str(exc)) from exc
    payoffs_raw = _list(doc.get("payoffs"), "payoffs")
    if len(payoffs_raw) != len(dims):
        raise DocumentError("payoffs", f"expected {len(dims)} specs, got {len(payoffs_raw)}")
    specs = []
    for i, spec in enumerate(payoffs_raw):
        path = f"payoffs[{i}]"
        if not isinstance(spec, dict) or len(spec) != 1:
            raise DocumentError(path, "expected exactly one of 'overlap' or 'observable'")
        key, value = next(iter(spec.items()))
        if key == "overlap":
            specs.append(OverlapPayoff(_unit_target(value, f"{path}.overlap", joint)))
        elif key == "observable":
            entries = _list(value, f"{path}.observable")
            if len(entries) != joint:
                raise DocumentError(
                    f"{path}.observable", f"expected {joint} eigenvalues, got {len(entries)}"
                )
            eigenvalues = np.array(
                [_real(e, f"{path}.observable[{k}]") for k, e in enumerate(entries)]
            )
            specs.append(ObservablePayoff(eigenvalues))
        else:
            raise DocumentError(path, f"unknown payoff kind {key!r}")
    return QuantumGame(dims, unitary, specs)


def serialize_game(game: FiniteGame | QuantumGame) -> str:
    """Canonical document text for a game."""
    if isinstance(game, FiniteGame):
        doc = {
            "schema_version": SCHEMA_VERSION,
            "kind": "finite",
            "strategy_counts": list(game.strategy_counts),
            "payoff_tensors": [t.tolist() for t in game.payoff_tensors],
        }
        return canonical_json(doc)
    if isinstance(game, QuantumGame):
        payoffs = []
        for spec in game.payoffs:
            if isinstance(spec, OverlapPayoff):
                payoffs.append({"overlap": _vector_pairs(spec.target.amplitudes)})
            else:
                payoffs.append({"observable": [float(e) for e in spec.eigenvalues]})
        doc = {
            "schema_version": SCHEMA_VERSION,
            "kind": "quantum",
            "dims": list(game.dims),
            "unitary": _matrix_pairs(game.unitary.matrix),
            "payoffs": payoffs,
        }
        return canonical_json(doc)
    raise TypeError(f"cannot serialize {type(game).__name__}")


def parse_play(text: str, dims: Sequence[int] | None = None) -> ProductPlay:
    """Parse a product play; factors within the window are renormalized."""
    doc = _load(text)
    _expect_kind(doc, "play")
    factors_raw = _list(doc.get("factors"), "factors")
    if len(factors_raw) < 2:
        raise DocumentError("factors", "a play needs at least two factors")
    if dims is not None and len(factors_raw) != len(dims):
        raise DocumentError("factors", f"expected {len(dims)} factors, got {len(factors_raw)}")
    states = []
    for i, factor in enumerate(factors_raw):
        want = dims[i] if dims is not None else None
        vec = _complex_vector(factor, f"factors[{i}]", want)
        states.append(_unit_state(vec, f"factors[{i}]"))
    return ProductPlay(states)


def serialize_play(play: ProductPlay) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "play",
        "factors": [_vector_pairs(f.amplitudes) for f in play.factors],
    }
    return canonical_json(doc)


def parse_profile(text: str, counts: Sequence[int] | None = None) -> MixedProfile:
    doc = _load(text)
    _expect_kind(doc, "profile")
    dists_raw = _list(doc.get("distributions"), "distributions")
    if counts is not None and len(dists_raw) != len(counts):
        raise DocumentError(
            "distributions", f"expected {len(counts)} distributions, got {len(dists_raw)}"
        )
    dists = []
    for i, dist in enumerate(dists_raw):
        path = f"distributions[{i}]"
        entries = _list(dist, path)
        if counts is not None and len(entries) != counts[i]:
            raise DocumentError(path, f"expected {counts[i]} entries, got {len(entries)}")
        values = [_real(p, f"{path}[{k}]") for k, p in enumerate(entries)]
        dists.append(values)
    try:
        return MixedProfile(dists)
    except ValueError as exc:
        raise DocumentError("distributions", str(exc)) from exc


def serialize_profile(profile: MixedProfile) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "profile",
        "distributions": [list(map(float, d)) for d in profile.distributions],
    }
    return canonical_json(doc)


def parse_schedule(text: str) -> AdiabaticSchedule:
    doc = _load(text)
    _expect_kind(doc, "schedule")
    h_initial = _complex_matrix(doc.get("h_initial"), "h_initial")
    h_final = _complex_matrix(doc.get("h_final"), "h_final", h_initial.shape[0])
    try:
        ops = HermitianOperator(h_initial), HermitianOperator(h_final)
    except ValueError as exc:
        raise DocumentError("h_initial/h_final", str(exc)) from exc
    s_values = tuple(
        _real(v, f"s_values[{k}]")
        for k, v in enumerate(_list(doc.get("s_values"), "s_values"))
    )
    time = _real(doc.get("time"), "time")
    try:
        return AdiabaticSchedule(ops[0], ops[1], s_values, time)
    except ValueError as exc:
        raise DocumentError("$", str(exc)) from exc


def serialize_schedule(schedule: AdiabaticSchedule) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "schedule",
        "h_initial": _matrix_pairs(schedule.h_initial.matrix),
        "h_final": _matrix_pairs(schedule.h_final.matrix),
        "s_values": [float(s) for s in schedule.s_values],
        "time": float(schedule.time),
    }
    return canonical_json(doc)


# ----------------------------------------------------------------- output ---

def write_text_atomic(path: str, text: str) -> None:
    """Write via a temporary file and rename, so readers never see half a file."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_trace_csv(path: str, trace: Sequence[TraceRecord], num_players: int) -> None:
    """Per-sweep dynamics trace; complex payoffs split into re/im columns."""
    header = ["sweep"]
    for i in range(num_players):
        header += [f"payoff_p{i + 1}_re", f"payoff_p{i + 1}_im"]
    header.append("step_distance")
    lines = [",".join(header)]
    for record in trace:
        cells = [str(record.sweep)]
        for z in record.payoffs:
            cells += [format_real(z.real), format_real(z.imag)]
        cells.append(format_real(record.step_distance))
        lines.append(",".join(cells))
    write_text_atomic(path, "\n".join(lines) + "\n")


def write_sweep_csv(path: str, rows) -> None:
    """Schedule-sweep rows with the fixed column set."""
    header = (
        "s,start_id,outcome,iterations,"
        "payoff_player1_re,payoff_player1_im,ground_overlap_magnitude"
    )
    lines = [header]
    for row in rows:
        lines.append(
            ",".join(
                [
                    format_real(row.s),
                    str(row.start_id),
                    row.outcome,
                    str(row.iterations),
                    format_real(row.payoff_player1.real),
                    format_real(row.payoff_player1.imag),
                    format_real(row.ground_overlap_magnitude),
                ]
            )
        )
    write_text_atomic(path, "\n".join(lines) + "\n")


def read_point_cloud(path: str) -> np.ndarray:
    """CSV with an x,y,z header and one point per row."""
    with open(path, "r", encoding="utf-8") as handle:
        lines = [line.strip() for line in handle if line.strip()]
    if not lines:
        raise DocumentError("$", "point cloud file is empty")
    start = 1 if lines[0].lower().replace(" ", "") == "x,y,z" else 0
    points = []
    for n, line in enumerate(lines[start:], start=start + 1):
        cells = line.split(",")
        if len(cells) != 3:
            raise DocumentError(f"line {n}", f"expected 3 columns, got {len(cells)}")
        try:
            points.append([float(c) for c in cells])
        except ValueError as exc:
            raise DocumentError(f"line {n}", f"not a number: {exc}") from exc
    arr = np.array(points, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DocumentError("$", "point cloud has non-finite entries")
    return arr


def write_point_cloud(path: str, points: np.ndarray) -> None:
    lines = ["x,y,z"]
    for p in np.asarray(points, dtype=np.float64):
        lines.append(",".join(format_real(float(c)) for c in p))
    write_text_atomic(path, "\n".join(lines) + "\n")
