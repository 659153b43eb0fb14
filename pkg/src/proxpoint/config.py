"""Flat ``key = value`` experiment configs.

Example::

    # anchor the iteration at u and run the generalized scheme
    operator = quadratic:1 0 0 1:1 1
    variant  = general
    beta     = poly:1:1
    alpha    = inv:1
    u        = const:5 -5
    error    = bounded:1:42
    max_iter = 10000

Operators are written ``kind:param:param`` with whitespace-separated vectors
and row-major matrices: ``identity``, ``quadratic:Q:b``, ``box:lo:hi``,
``ball:center:radius``, ``skew:S``, ``constant:c``, ``smooth:name:center``.
"""

from dataclasses import dataclass, field, replace
import math
import os
from pathlib import Path

import numpy as np

from . import operators as ops
from . import schedules as sch
from .algorithms import GENERAL, VARIANTS, RunConfig
from .exceptions import ConfigError, ProxPointError
from .space import parse_vector

SEED_ENV = "PROXPOINT_SEED"

KEYS = (
    "dim",
    "operator",
    "variant",
    "mode",
    "beta",
    "alpha",
    "lambda",
    "u",
    "error",
    "x0",
    "max_iter",
    "stop_tol",
    "divergence_threshold",
    "inner_tol",
    "seed",
    "output",
)


@dataclass
class ExperimentConfig:
    op: object
    variant: str = GENERAL
    mode: str = "run"
    schedules: sch.ScheduleSet = None
    x0: np.ndarray = None
    run: RunConfig = field(default_factory=RunConfig)
    seed: int = None
    output: Path = None
    source: Path = None

    @property
    def dim(self):
        return self.op.dim

    def seeded(self, offset=0):
        """Copy whose random error stream uses seed ``base + offset``.

        ``base`` is the config/env seed when given, else the seed written in
        the error literal.
        """
        err = self.schedules.error
        if not isinstance(err, sch.BoundedRandom):
            return self
        base = err.seed if self.seed is None else self.seed
        err = replace(err, seed=base + offset)
        return replace(self, schedules=self.schedules.with_(error=err))


def parse_operator(text, dim=None):
    kind, _, rest = text.strip().partition(":")
    kind = kind.strip().lower()
    parts = rest.split(":") if rest else []

    def need(n):
        if len(parts) != n:
            raise ValueError(f"operator {kind} takes {n} parameter(s), got {len(parts)}")

    def matrix(s):
        v = parse_vector(s)
        d = int(round(math.sqrt(v.size)))
        if d * d != v.size:
            raise ValueError(f"matrix literal has {v.size} entries, not a square")
        return v.reshape(d, d)

    if kind == "identity":
        need(0)
        if dim is None:
            raise ValueError("identity needs `dim`")
        return ops.identity(dim)
    if kind == "quadratic":
        need(2)
        return ops.quadratic(matrix(parts[0]), parse_vector(parts[1]))
    if kind == "box":
        need(2)
        return ops.box(parse_vector(parts[0]), parse_vector(parts[1]))
    if kind == "ball":
        need(2)
        return ops.ball(parse_vector(parts[0]), float(parts[1]))
    if kind == "skew":
        need(1)
        return ops.skew(matrix(parts[0]))
    if kind == "constant":
        need(1)
        return ops.constant(parse_vector(parts[0]))
    if kind == "smooth":
        need(2)
        return ops.smooth(parts[0].strip(), parse_vector(parts[1]))
    raise ValueError(f"unknown operator kind {kind!r}; choose from {', '.join(ops.KINDS)}")


def read_pairs(text, path=None):
    """Parse ``key = value`` lines into ``{key: (value, lineno)}``."""
    pairs = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        key = key.strip().lower()
        if not eq or not key:
            raise ConfigError(f"expected `key = value`, got {line!r}", lineno, path)
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno, path)
        if key in pairs:
            raise ConfigError(f"duplicate key {key!r}", lineno, path)
        pairs[key] = (value.strip(), lineno)
    return pairs


def load(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", None, path) from None
    return parse(text, path)


def parse(text, path=None):
    pairs = read_pairs(text, path)

    def get(key, conv, default=None):
        if key not in pairs:
            return default
        value, lineno = pairs[key]
        try:
            return conv(value)
        except (ValueError, ProxPointError) as exc:
            raise ConfigError(f"{key}: {exc}", lineno, path) from None

    dim = get("dim", int)
    if dim is not None and dim < 1:
        raise ConfigError("dim must be positive", pairs["dim"][1], path)
    if "operator" not in pairs:
        raise ConfigError("missing required key `operator`", None, path)
    op = get("operator", lambda v: parse_operator(v, dim))
    if dim is not None and op.dim != dim:
        raise ConfigError(f"operator has dim {op.dim} but dim = {dim}", pairs["operator"][1], path)
    dim = op.dim

    variant = get("variant", lambda v: _choice(v.upper(), VARIANTS, "variant"), GENERAL)
    mode = get("mode", lambda v: _choice(v.lower(), ("run", "observed"), "mode"), "run")
    if mode == "observed" and variant != GENERAL:
        raise ConfigError("mode = observed requires variant = general", pairs["mode"][1], path)
    if "alpha" in pairs and "lambda" in pairs:
        raise ConfigError("give either alpha or lambda, not both", pairs["lambda"][1], path)

    beta = get("beta", sch.parse_scalar, sch.Poly(1.0, 1.0))
    alpha = get("alpha", sch.parse_scalar) or get("lambda", sch.parse_scalar)
    if alpha is None:
        alpha = sch.OneMinus(sch.Inv(1.0)) if variant in ("XU", "XU2") else sch.Inv(1.0)
    u = get("u", sch.parse_vector_schedule, sch.ConstVec(np.zeros(dim)))
    err = get("error", sch.parse_error, sch.ZeroError())
    x0 = get("x0", parse_vector, np.zeros(dim))

    for key, vec in (("u", _schedule_vector(u)), ("x0", x0), ("error", _error_vector(err))):
        if vec is not None and vec.size != dim:
            raise ConfigError(f"{key} has dim {vec.size}, operator has dim {dim}", pairs[key][1], path)

    seed = get("seed", _unsigned)
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            seed = _unsigned(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV}={env!r} is not an unsigned integer", None, path) from None

    try:
        run_cfg = RunConfig(
            max_iter=get("max_iter", int, 10_000),
            stop_tol=get("stop_tol", float, 1e-6),
            divergence_threshold=get("divergence_threshold", float, 1e12),
            inner_tol=get("inner_tol", float, ops.DEFAULT_INNER_TOL),
        )
    except ProxPointError as exc:
        raise ConfigError(str(exc), None, path) from None

    output = get("output", Path)
    if output is None:
        output = Path(path).with_suffix(".csv") if path is not None else Path("trace.csv")
    cfg = ExperimentConfig(
        op=op,
        variant=variant,
        mode=mode,
        schedules=sch.ScheduleSet(beta, alpha, u, err),
        x0=x0,
        run=run_cfg,
        seed=seed,
        output=output,
        source=Path(path) if path is not None else None,
    )
    return cfg.seeded(0)


def _choice(value, options, what):
    if value not in options:
        raise ValueError(f"unknown {what} {value!r}; choose from {', '.join(o.lower() for o in options)}")
    return value


def _unsigned(text):
    v = int(text)
    if v < 0:
        raise ValueError("seed must be an unsigned integer")
    return v


def _schedule_vector(u):
    return np.asarray(u.u) if hasattr(u, "u") else None


def _error_vector(err):
    return np.asarray(err.v) if hasattr(err, "v") else None


# --------------------------------------------------------------------------
# Sweep edits


SWEEPABLE = ("beta.<param>", "alpha.<param>", "lambda.<param>", "u", "x0", "error.bound")


def apply_sweep(cfg, name, value):
    """Return a copy of ``cfg`` with parameter ``name`` set to ``value``.

    ``name`` is ``u``, ``x0``, ``error.<field>`` or a dotted path into a scalar
    schedule such as ``beta.p`` or ``alpha.inner.a``.
    """
    s = cfg.schedules
    head, _, tail = name.partition(".")
    if name == "x0":
        return replace(cfg, x0=_vector_value(value, cfg.dim))
    if name == "u":
        vec = _vector_value(value, cfg.dim)
        if isinstance(s.u, sch.ConstVec):
            u = sch.ConstVec(vec)
        else:
            u = replace(s.u, u=vec)
        return replace(cfg, schedules=s.with_(u=u))
    if head in ("beta", "alpha", "lambda") and tail:
        attr = "beta" if head == "beta" else "alpha"
        sched = _replace_path(getattr(s, attr), tail.split("."), float(value))
        return replace(cfg, schedules=s.with_(**{attr: sched}))
    if head == "error" and tail:
        err = _replace_path(s.error, [tail], float(value))
        return replace(cfg, schedules=s.with_(error=err))
    raise ValueError(f"cannot sweep {name!r}; sweepable: {', '.join(SWEEPABLE)}")


def _replace_path(obj, path, value):
    field_name = path[0]
    if not hasattr(obj, field_name):
        raise ValueError(f"{type(obj).__name__} has no parameter {field_name!r}")
    if len(path) == 1:
        if field_name in ("seed",):
            value = int(value)
        return replace(obj, **{field_name: value})
    return replace(obj, **{field_name: _replace_path(getattr(obj, field_name), path[1:], value)})


def _vector_value(value, dim):
    v = value if isinstance(value, np.ndarray) else parse_vector(str(value))
    if v.size != dim:
        raise ValueError(f"vector {value!r} has dim {v.size}, expected {dim}")
    return v
