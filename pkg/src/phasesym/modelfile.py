"""Load model definitions from a sectioned key=value text format.

A model file declares one system plus any number of generators, lifts, and
an optional sampling region:

    [model]
    name = my-linear
    chart = cartesian-uv
    variables = a, b
    omega_u = -a+b
    omega_v = a-b

    [generator scaling]
    type = phase
    zeta_u = a
    zeta_v = b

    [lift scaling]
    generator = scaling
    xi = 0
    c = a+b
    guard = a-b : 1e-3

    [region]
    u_range = -3 : 3
    v_range = -3 : 3
    grid = 41
    exclude = -a+b : 0.05

`variables` renames the state variables used in the file's expressions; they
are mapped onto the canonical pair (u, v) at load time.  `guard` and
`exclude` may repeat.  `#` starts a comment.  All diagnostics carry the line
number they refer to.
"""

from __future__ import annotations

import re
from pathlib import Path

from .expr import Expr, ParseError, parse, rename
from .jets import PhaseGenerator, System2D, TimeGenerator
from .models import MODEL_NAMES, ModelLift, NamedModel, get_model
from .verify import SampleRegion

_SECTION_RE = re.compile(r"\[\s*(model|region)\s*\]$|\[\s*(generator|lift)\s+([A-Za-z0-9_-]+)\s*\]$")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
_RESERVED = {"t", "du", "dv", "dt", "c"}

_MODEL_KEYS = {"name", "chart", "variables", "omega_u", "omega_v"}
_GENERATOR_KEYS = {"type", "zeta_u", "zeta_v", "xi", "eta_u", "eta_v"}
_LIFT_KEYS = {"generator", "xi", "c", "guard"}
_REGION_KEYS = {"u_range", "v_range", "grid", "exclude"}


class ModelFileError(ValueError):
    """A defect in a model file, pointing at the offending line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class _Section:
    def __init__(self, kind: str, name: str | None, line: int):
        self.kind = kind
        self.name = name
        self.line = line
        self.values: dict[str, tuple[str, int]] = {}
        self.repeated: dict[str, list[tuple[str, int]]] = {}

    def set(self, key: str, value: str, line: int, repeatable: frozenset):
        if key in repeatable:
            self.repeated.setdefault(key, []).append((value, line))
            return
        if key in self.values:
            raise ModelFileError(f"duplicate key {key!r} in [{self.kind}]", line)
        self.values[key] = (value, line)

    def require(self, key: str) -> tuple[str, int]:
        if key not in self.values:
            raise ModelFileError(
                f"[{self.kind}{' ' + self.name if self.name else ''}] is missing {key!r}",
                self.line,
            )
        return self.values[key]

    def get(self, key: str, default: str | None = None):
        if key in self.values:
            return self.values[key]
        return (default, self.line)


_REPEATABLE = frozenset({"guard", "exclude"})
_KNOWN_KEYS = {
    "model": _MODEL_KEYS,
    "generator": _GENERATOR_KEYS,
    "lift": _LIFT_KEYS,
    "region": _REGION_KEYS,
}


def _scan(text: str) -> list[_Section]:
    sections: list[_Section] = []
    current: _Section | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            m = _SECTION_RE.match(line)
            if not m:
                raise ModelFileError(f"malformed section header {line!r}", lineno)
            kind = m.group(1) or m.group(2)
            current = _Section(kind, m.group(3), lineno)
            sections.append(current)
            continue
        if current is None:
            raise ModelFileError("content before the first section header", lineno)
        key, sep, value = line.partition("=")
        if not sep:
            raise ModelFileError(f"expected key = value, got {line!r}", lineno)
        key = key.strip()
        if key not in _KNOWN_KEYS[current.kind]:
            raise ModelFileError(f"unknown key {key!r} in [{current.kind}]", lineno)
        current.set(key, value.strip(), lineno, _REPEATABLE)
    return sections


def _parse_expr(text: str, allowed: frozenset, mapping: dict, line: int) -> Expr:
    try:
        e = parse(text, allowed)
    except ParseError as exc:
        raise ModelFileError(str(exc), line) from exc
    return rename(e, mapping)


def _parse_pair(text: str, line: int, what: str) -> tuple[float, float]:
    left, sep, right = text.partition(":")
    if not sep:
        raise ModelFileError(f"{what} must look like 'low : high'", line)
    try:
        return float(left), float(right)
    except ValueError:
        raise ModelFileError(f"{what} bounds must be numbers", line) from None


def _parse_thresholded(text: str, allowed: frozenset, mapping: dict, line: int):
    expr_text, sep, thr_text = text.rpartition(":")
    if not sep:
        raise ModelFileError("expected 'expression : threshold'", line)
    try:
        threshold = float(thr_text)
    except ValueError:
        raise ModelFileError(f"threshold {thr_text.strip()!r} is not a number", line) from None
    return _parse_expr(expr_text.strip(), allowed, mapping, line), threshold


def _state_variables(model: _Section) -> tuple[frozenset, dict]:
    """Declared state variable names and their mapping onto (u, v)."""
    text, line = model.get("variables", "u, v")
    names = [n.strip() for n in text.split(",")]
    if len(names) != 2 or names[0] == names[1]:
        raise ModelFileError("variables must list two distinct names", line)
    for n in names:
        if not _NAME_RE.match(n):
            raise ModelFileError(f"{n!r} is not a valid variable name", line)
        if n in _RESERVED:
            raise ModelFileError(f"{n!r} is reserved and cannot be a state variable", line)
    mapping = {names[0]: "u", names[1]: "v"}
    return frozenset(names), mapping


def _required_expr(sec: _Section, key: str, allowed: frozenset, mapping: dict) -> Expr:
    text, line = sec.require(key)
    return _parse_expr(text, allowed, mapping, line)


def _build_generator(sec: _Section, state: frozenset, mapping: dict, chart: str):
    kind, line = sec.require("type")
    if kind == "phase":
        return PhaseGenerator(
            _required_expr(sec, "zeta_u", state, mapping),
            _required_expr(sec, "zeta_v", state, mapping),
            chart=chart,
        )
    if kind == "time":
        return TimeGenerator(
            _required_expr(sec, "xi", state | {"t"}, mapping),
            _required_expr(sec, "eta_u", state, mapping),
            _required_expr(sec, "eta_v", state, mapping),
            chart=chart,
        )
    raise ModelFileError(f"generator type must be 'phase' or 'time', got {kind!r}", line)


def _build_region(sec: _Section | None, state: frozenset, mapping: dict) -> SampleRegion:
    if sec is None:
        return SampleRegion((-3.0, 3.0), (-3.0, 3.0), 41)
    u_range = _parse_pair(*sec.require("u_range"), what="u_range")
    v_range = _parse_pair(*sec.require("v_range"), what="v_range")
    grid_text, grid_line = sec.get("grid", "41")
    try:
        grid = int(grid_text)
    except ValueError:
        raise ModelFileError(f"grid must be an integer, got {grid_text!r}", grid_line) from None
    exclusions = tuple(
        _parse_thresholded(text, state, mapping, line)
        for text, line in sec.repeated.get("exclude", [])
    )
    try:
        return SampleRegion(u_range, v_range, grid, exclusions)
    except ValueError as exc:
        raise ModelFileError(str(exc), sec.line) from exc


def loads_model(text: str) -> NamedModel:
    """Build a NamedModel from model-file text; diagnostics carry line numbers."""
    sections = _scan(text)
    model_secs = [s for s in sections if s.kind == "model"]
    if len(model_secs) != 1:
        line = model_secs[1].line if len(model_secs) > 1 else None
        raise ModelFileError("exactly one [model] section is required", line)
    model_sec = model_secs[0]
    region_secs = [s for s in sections if s.kind == "region"]
    if len(region_secs) > 1:
        raise ModelFileError("at most one [region] section is allowed", region_secs[1].line)

    state, mapping = _state_variables(model_sec)
    name, _ = model_sec.require("name")
    chart, _ = model_sec.get("chart", "cartesian-uv")
    system = System2D(
        _required_expr(model_sec, "omega_u", state, mapping),
        _required_expr(model_sec, "omega_v", state, mapping),
        chart=chart,
    )

    generators: dict[str, PhaseGenerator] = {}
    time_generators: dict[str, TimeGenerator] = {}
    for sec in sections:
        if sec.kind != "generator":
            continue
        if sec.name in generators or sec.name in time_generators:
            raise ModelFileError(f"duplicate generator {sec.name!r}", sec.line)
        built = _build_generator(sec, state, mapping, chart)
        if isinstance(built, PhaseGenerator):
            generators[sec.name] = built
        else:
            time_generators[sec.name] = built

    lifts: dict[str, ModelLift] = {}
    for sec in sections:
        if sec.kind != "lift":
            continue
        if sec.name in lifts:
            raise ModelFileError(f"duplicate lift {sec.name!r}", sec.line)
        gen_name, gen_line = sec.require("generator")
        if gen_name not in generators:
            raise ModelFileError(
                f"lift {sec.name!r} references unknown phase generator {gen_name!r}",
                gen_line,
            )
        xi = _required_expr(sec, "xi", state | {"t"}, mapping)
        c_text, c_line = sec.get("c")
        c_expr = (
            _parse_expr(c_text, state, mapping, c_line) if c_text is not None else None
        )
        guards = tuple(
            _parse_thresholded(text, state, mapping, line)
            for text, line in sec.repeated.get("guard", [])
        )
        lifts[sec.name] = ModelLift(gen_name, xi, c_expr, guards)

    region = _build_region(region_secs[0] if region_secs else None, state, mapping)
    return NamedModel(
        name=name,
        system=system,
        generators=generators,
        lifts=lifts,
        default_region=region,
        time_generators=time_generators,
    )


def load_model(path) -> NamedModel:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ModelFileError(f"cannot read {path}: {exc}") from exc
    return loads_model(text)


def resolve_model(name_or_path: str) -> NamedModel:
    """A built-in model by name, or a model loaded from a file path."""
    if name_or_path in MODEL_NAMES:
        return get_model(name_or_path)
    if Path(name_or_path).exists():
        return load_model(name_or_path)
    known = ", ".join(MODEL_NAMES)
    raise ModelFileError(
        f"{name_or_path!r} is neither a built-in model ({known}) nor a readable file"
    )
