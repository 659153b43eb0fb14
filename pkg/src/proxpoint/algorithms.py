"""Iteration engines for the proximal point family.

Five variants share one driver:

* ``GENERAL``: ``x_{n+1} = J_{beta_n}(u_n + alpha_n (x_n + e_n))``
* ``PPA``:     ``x_{n+1} = J_{beta_n}(x_n + e_n)``
* ``XU``:      ``x_{n+1} = J_{beta_n}(lam_n u + (1 - lam_n) x_n + e_n)``
* ``XU2``:     ``x_{n+1} = J_{beta_n}(lam_n u + (1 - lam_n)(x_n + e_n))``
* ``SIMPLE``:  ``x_{n+1} = J_{beta_n}(u_n)``

where ``J_beta = (I + beta A)^{-1}``. Each trace record carries the residual
``(input_{n-1} - x_n) / beta_{n-1}``, an element of ``A x_n``. This residual is
unrelated to the observed iterates produced by :func:`simulate_observed`.
"""

from dataclasses import dataclass, field
import csv
import io
import math

import numpy as np

from . import schedules as sch
from .exceptions import DivergenceError, ParameterError, ValidationError
from .operators import DEFAULT_INNER_TOL, resolvent

GENERAL = "GENERAL"
PPA = "PPA"
XU = "XU"
XU2 = "XU2"
SIMPLE = "SIMPLE"
VARIANTS = (GENERAL, PPA, XU, XU2, SIMPLE)

CONVERGED = "CONVERGED"
MAX_ITER = "MAX_ITER"
DIVERGED = "DIVERGED"

CSV_COLUMNS = ("n", "beta", "alpha", "unorm", "enorm", "xnorm", "residual", "dist_to_target")


@dataclass(frozen=True)
class RunConfig:
    max_iter: int = 10_000
    stop_tol: float = 1e-6
    divergence_threshold: float = 1e12
    inner_tol: float = DEFAULT_INNER_TOL
    validate: bool = True

    def __post_init__(self):
        if self.max_iter < 1:
            raise ParameterError("max_iter must be positive")
        # stop_tol = 0 disables early stopping
        if not self.stop_tol >= 0 or not self.inner_tol > 0:
            raise ParameterError("stop_tol must be >= 0 and inner_tol > 0")
        if not self.stop_tol < self.divergence_threshold:
            raise ParameterError("stop_tol must be below divergence_threshold")


@dataclass(frozen=True, eq=False)
class IterationState:
    n: int
    x: np.ndarray


@dataclass(eq=False)
class Record:
    n: int
    x: np.ndarray
    beta: float
    alpha: float
    unorm: float
    enorm: float
    xnorm: float
    residual: float = None
    dist_to_target: float = None
    # observed mode only: the companion exact iterate and its gap to x
    exact: np.ndarray = None
    gap: float = None


@dataclass(eq=False)
class Trace:
    variant: str
    records: list = field(default_factory=list)
    status: str = MAX_ITER
    target: np.ndarray = None
    residual_vectors: list = field(default_factory=list)

    @property
    def iterations(self):
        return len(self.records) - 1

    @property
    def final(self):
        return self.records[-1]

    @property
    def xs(self):
        return np.array([r.x for r in self.records])

    def distances(self):
        return np.array([np.nan if r.dist_to_target is None else r.dist_to_target for r in self.records])

    def min_distance(self):
        d = [r.dist_to_target for r in self.records if r.dist_to_target is not None]
        return min(d) if d else None

    def first_within(self, tol):
        """First index whose distance to the target is at most ``tol``."""
        for r in self.records:
            if r.dist_to_target is not None and r.dist_to_target <= tol:
                return r.n
        return None

    def max_gap(self):
        g = [r.gap for r in self.records if r.gap is not None]
        return max(g) if g else None

    def write_csv(self, fh):
        dim = self.records[0].x.size
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS + tuple(f"x{i}" for i in range(dim)))
        for r in self.records:
            row = [r.n, r.beta, r.alpha, r.unorm, r.enorm, r.xnorm, r.residual, r.dist_to_target]
            w.writerow([_fmt(v) for v in row] + [repr(float(v)) for v in r.x])

    def to_csv(self):
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def _norm(x):
    return math.sqrt(float(np.dot(x, x)))


def resolvent_input(variant, x, aux, u_term, e):
    """Argument handed to the resolvent at one step of ``variant``."""
    if variant == GENERAL:
        return u_term + aux * (x + e)
    if variant == PPA:
        return x + e
    if variant == XU:
        return aux * u_term + (1.0 - aux) * x + e
    if variant == XU2:
        return aux * u_term + (1.0 - aux) * (x + e)
    if variant == SIMPLE:
        return u_term
    raise ValueError(f"unknown variant {variant!r}")


def step(variant, op, state, beta_n, aux, u_term, e_n, inner_tol=DEFAULT_INNER_TOL):
    """Advance one iteration.

    ``aux`` is ``alpha_n`` for GENERAL and ``lam_n`` for XU/XU2; PPA and
    SIMPLE ignore it. ``u_term`` is ``u_n`` for GENERAL/SIMPLE and the anchor
    ``u`` for XU/XU2.
    """
    if not beta_n > 0:
        raise ParameterError(f"beta_n must be positive, got {beta_n}")
    if variant in (XU, XU2) and not 0 < aux < 1:
        raise ParameterError(f"lambda_n must lie in (0, 1), got {aux}")
    x_new = resolvent(op, beta_n, resolvent_input(variant, state.x, aux, u_term, e_n), inner_tol)
    if not np.all(np.isfinite(x_new)):
        raise DivergenceError(state.n + 1)
    return IterationState(state.n + 1, x_new)


def hypothesis_check(variant, schedules):
    """Validate ``schedules`` against the hypothesis set that covers ``variant``."""
    s = schedules
    if variant == GENERAL:
        return sch.validate_set(sch.H_GENERAL, s)
    if variant == SIMPLE:
        return sch.validate(sch.H_GENERAL, s.beta, sch.Const(0.0), s.u, s.error)
    if variant == PPA:
        return sch.validate_set(sch.PPA_CLASSICAL, s)
    if variant == XU:
        return sch.validate_set(sch.WANG_CUI, s)
    if variant == XU2:
        if s.alpha.limit() == 1.0 and s.u is not None:
            # lambda_n -> 1: the scheme is GENERAL with u_n = lam_n u, alpha_n = 1 - lam_n
            u_n = sch.HalpernForm(s.u.limit(), np.zeros_like(s.u.limit()), s.alpha)
            return sch.validate(sch.H_GENERAL, s.beta, sch.OneMinus(s.alpha), u_n, s.error)
        return sch.validate_set(sch.WANG_CUI, s)
    raise ValueError(f"unknown variant {variant!r}")


def _target(variant, op, schedules):
    zs = op.zero_set()
    if zs is None or zs.empty:
        return zs, None
    if variant == PPA or schedules.u is None:
        return zs, None
    return zs, zs.project(np.asarray(schedules.u.limit(), dtype=np.float64))


def _params(variant, schedules, n, dim):
    s = schedules
    beta = s.beta.value_at(n)
    e = s.error.error_at(n, dim)
    if variant == PPA:
        return beta, 0.0, None, 0.0, e
    if variant == SIMPLE:
        u = s.u.value_at(n)
        return beta, 0.0, u, _norm(u), e
    aux = s.alpha.value_at(n)
    u = s.u.value_at(n)
    unorm = _norm(u) if variant == GENERAL else abs(aux) * _norm(u)
    return beta, aux, u, unorm, e


def run(variant, op, schedules, x0, cfg=RunConfig()):
    """Iterate ``variant`` from ``x0`` until convergence, divergence or ``max_iter``.

    CONVERGED needs both ``||x_{n+1} - x_n|| <= stop_tol`` and, when the
    operator has a zero-set oracle, ``||x_n - P_F u|| <= stop_tol``. PPA has
    no anchor, so its distance is to the nearest point of ``F``.

    Raises
    ------
    ValidationError
        If the schedules fail the variant's hypothesis set and
        ``cfg.validate`` is set.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if variant != PPA and schedules.u is None:
        raise ParameterError(f"{variant} needs an anchor schedule u")
    if cfg.validate:
        report = hypothesis_check(variant, schedules)
        if not report.passed:
            raise ValidationError(report)

    x = np.array(x0, dtype=np.float64)
    dim = x.size
    if x.shape != (op.dim,):
        raise ParameterError(f"x0 has shape {x.shape}, operator has dim {op.dim}")
    zs, target = _target(variant, op, schedules)
    trace = Trace(variant, target=target)

    inp = beta_prev = x_prev = None
    n = 0
    while True:
        beta, aux, u, unorm, e = _params(variant, schedules, n, dim)
        xnorm = _norm(x)
        residual = None
        if n > 0:
            z = (inp - x) / beta_prev
            residual = _norm(z)
            trace.residual_vectors.append(z)
        if target is not None:
            dist = _norm(x - target)
        elif variant == PPA and zs is not None and not zs.empty:
            dist = _norm(x - zs.project(x))
        else:
            dist = None
        trace.records.append(Record(n, x, beta, aux, unorm, _norm(e), xnorm, residual, dist))

        if n > 0 and _norm(x - x_prev) <= cfg.stop_tol and (dist is None or dist <= cfg.stop_tol):
            trace.status = CONVERGED
            break
        if xnorm > cfg.divergence_threshold:
            trace.status = DIVERGED
            break
        if n >= cfg.max_iter:
            trace.status = MAX_ITER
            break

        inp = resolvent_input(variant, x, aux, u, e)
        try:
            state = step(variant, op, IterationState(n, x), beta, aux, u, e, cfg.inner_tol)
        except DivergenceError:
            trace.status = DIVERGED
            break
        x_prev, x, beta_prev = x, state.x, beta
        n += 1
    return trace


def simulate_observed(op, schedules, cfg=RunConfig()):
    """Simulate GENERAL as a computer would run it, with per-step solver errors.

    The observed sequence is ``z_{n+1} = J_{beta_n}(u_n + alpha_n z_n) + e_{n+1}``
    with ``z_0 = 0``; the companion exact sequence is
    ``x_{n+1} = J_{beta_n}(u_n + alpha_n (x_n + e_n))`` with ``x_0 = 0`` and
    ``e_0 = 0``. Records hold ``z_n`` in ``x``, ``x_n`` in ``exact`` and
    ``||x_n - z_n||`` in ``gap``.
    """
    if cfg.validate:
        report = hypothesis_check(GENERAL, schedules)
        if not report.passed:
            raise ValidationError(report)
    dim = op.dim
    zs, target = _target(GENERAL, op, schedules)
    trace = Trace("OBSERVED", target=target)
    s = schedules

    z = np.zeros(dim)
    x = np.zeros(dim)
    e = np.zeros(dim)
    inp = beta_prev = z_prev = Jz = None
    n = 0
    while True:
        beta = s.beta.value_at(n)
        alpha = s.alpha.value_at(n)
        u = s.u.value_at(n)
        znorm = _norm(z)
        residual = None
        if n > 0:
            zres = (inp - Jz) / beta_prev
            residual = _norm(zres)
            trace.residual_vectors.append(zres)
        dist = _norm(z - target) if target is not None else None
        trace.records.append(
            Record(n, z, beta, alpha, _norm(u), _norm(e), znorm, residual, dist, exact=x, gap=_norm(x - z))
        )

        if n > 0 and _norm(z - z_prev) <= cfg.stop_tol and (dist is None or dist <= cfg.stop_tol):
            trace.status = CONVERGED
            break
        if znorm > cfg.divergence_threshold:
            trace.status = DIVERGED
            break
        if n >= cfg.max_iter:
            trace.status = MAX_ITER
            break

        inp = u + alpha * z
        Jz = resolvent(op, beta, inp, cfg.inner_tol)
        e_next = s.error.error_at(n + 1, dim)
        z_new = Jz + e_next
        x_new = resolvent(op, beta, u + alpha * (x + e), cfg.inner_tol)
        if not (np.all(np.isfinite(z_new)) and np.all(np.isfinite(x_new))):
            trace.status = DIVERGED
            break
        z_prev, z, x, e, beta_prev = z, z_new, x_new, e_next, beta
        n += 1
    return trace
