"""Run configuration: INI-style text with fail-fast validation.

Sections [model], [grid], [initial], [run].  Parsing collects every
violation (not just the first) and reports line numbers for malformed
values, so a bad config fails with one complete diagnosis.
"""

from dataclasses import dataclass, replace

from .errors import ConfigError
from .models import ModelKind, model_from_string

_KNOWN_KEYS = {
    "model": {"name", "omega0", "lambda"},
    "grid": {"x_min", "x_max", "n"},
    "initial": {"spec"},
    "run": {"times", "outputs", "seed"},
}

DEFAULT_GRID = (-20.0, 20.0, 2048)


@dataclass(frozen=True)
class RunConfig:
    model: str = "model1"
    omega0: float = 1.0
    lam: float = 0.6
    grid: tuple = DEFAULT_GRID
    initial: str = "gaussian:x0=0,p0=0,s=1"
    times: tuple = (1.0,)
    outputs: str = "out"
    seed: int = 12345

    def coefficient_set(self):
        return model_from_string(self.model, self.omega0, self.lam)

    def initial_params(self):
        return parse_initial(self.initial)

    def initial_wave(self):
        from .dynamics import initial_gaussian

        p = self.initial_params()
        return initial_gaussian(p["x0"], p["p0"], p["s"], self.grid)


def parse_initial(spec):
    """Parse an initial-condition string `gaussian:x0=..,p0=..,s=..`."""
    kind, _, rest = spec.partition(":")
    if kind != "gaussian":
        raise ConfigError([f"unknown initial condition kind {kind!r} "
                           "(expected 'gaussian')"])
    params = {"x0": 0.0, "p0": 0.0, "s": 1.0}
    errors = []
    if rest:
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            key = key.strip()
            if not eq or key not in params:
                errors.append(f"bad initial parameter {item!r} "
                              "(expected x0=, p0= or s=)")
                continue
            try:
                params[key] = float(value)
            except ValueError:
                errors.append(f"invalid number for initial parameter {key}: {value!r}")
    if not errors and params["s"] <= 0.0:
        errors.append(f"initial width s must be positive, got {params['s']}")
    if errors:
        raise ConfigError(errors)
    return params


def _scan(text, errors):
    """Raw (section, key) -> (value, line number) map."""
    entries = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _KNOWN_KEYS:
                errors.append(f"line {lineno}: unknown section [{section}]")
                section = "?"
            continue
        key, eq, value = line.partition("=")
        key = key.strip()
        if not eq:
            errors.append(f"line {lineno}: expected 'key = value', got {line!r}")
            continue
        if section is None:
            errors.append(f"line {lineno}: key {key!r} outside any section")
            continue
        if section == "?":
            continue  # already reported the section
        if key not in _KNOWN_KEYS[section]:
            errors.append(f"line {lineno}: unknown key {key!r} in section [{section}]")
            continue
        entries[(section, key)] = (value.strip(), lineno)
    return entries


def _number(entries, section, key, default, errors, kind=float):
    if (section, key) not in entries:
        return default
    value, lineno = entries[(section, key)]
    try:
        return kind(value)
    except ValueError:
        errors.append(f"line {lineno}: invalid number for {section}.{key}: {value!r}")
        return default


def parse_config(text):
    """Parse and validate configuration text into a RunConfig.

    Every module precondition the config can violate is checked here
    before any computation starts; all errors are reported together.
    """
    errors = []
    entries = _scan(text, errors)

    model = entries.get(("model", "name"), ("model1", 0))[0]
    omega0 = _number(entries, "model", "omega0", 1.0, errors)
    lam = _number(entries, "model", "lambda", 0.6, errors)
    x_min = _number(entries, "grid", "x_min", DEFAULT_GRID[0], errors)
    x_max = _number(entries, "grid", "x_max", DEFAULT_GRID[1], errors)
    n = _number(entries, "grid", "n", DEFAULT_GRID[2], errors, kind=int)
    initial = entries.get(("initial", "spec"), ("gaussian:x0=0,p0=0,s=1", 0))[0]
    outputs = entries.get(("run", "outputs"), ("out", 0))[0]
    seed = _number(entries, "run", "seed", 12345, errors, kind=int)

    times = (1.0,)
    if ("run", "times") in entries:
        value, lineno = entries[("run", "times")]
        try:
            times = tuple(float(v) for v in value.split(","))
        except ValueError:
            errors.append(f"line {lineno}: invalid times list: {value!r}")

    if omega0 <= 0.0:
        errors.append(f"model.omega0 must be positive (got {omega0})")
    if lam < 0.0:
        errors.append(f"model.lambda must be >= 0 (got {lam})")
    if x_min >= x_max:
        errors.append(f"grid.x_min must be below grid.x_max (got {x_min}, {x_max})")
    if n < 256 or (n & (n - 1)) != 0:
        errors.append(f"grid.n must be a power of two >= 256 (got {n})")
    if any(t < 0.0 for t in times):
        errors.append(f"run.times must be >= 0 (got {times})")
    if seed < 0:
        errors.append(f"run.seed must be >= 0 (got {seed})")
    known = {k.value for k in ModelKind} - {"custom"}
    if not model.startswith("custom:") and model not in known:
        errors.append(f"model.name {model!r} not recognized")
    try:
        parse_initial(initial)
    except ConfigError as exc:
        errors.extend(exc.errors)

    if errors:
        raise ConfigError(errors)
    return RunConfig(model, omega0, lam, (x_min, x_max, n), initial,
                     times, outputs, seed)


def load_config(path):
    with open(path) as fh:
        return parse_config(fh.read())


def require_underdamped(config):
    """Guard for closed-form-only commands."""
    if config.lam >= config.omega0:
        raise ConfigError([
            f"lambda={config.lam} >= omega0={config.omega0} violates the "
            "underdamped precondition (lambda < omega0) required by the "
            "closed-form kernels"
        ])


def with_overrides(config, **kwargs):
    kwargs = {k: v for k, v in kwargs.items() if v is not None}
    return replace(config, **kwargs) if kwargs else config
