"""Numerical instruments for iterate boundedness and the large-step resolvent limit.

These are reusable checks rather than proofs: each one turns a structural
fact about resolvents or iterates into a finite, tolerance-based test.
"""

from dataclasses import dataclass
import math

import numpy as np

from .exceptions import NoSolutionError, ParameterError
from .operators import DEFAULT_INNER_TOL, resolvent, zero_projection

DEFAULT_LAMBDAS = tuple(10.0**k for k in range(7))


@dataclass
class LimitCurve:
    """Distances ``||J_lam u - P_F u||`` along increasing ``lam``."""

    lambdas: list
    distances: list

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.lambdas, self.lambdas[1:])):
            raise ParameterError("lambdas must be strictly increasing")

    @property
    def points(self):
        return list(zip(self.lambdas, self.distances))

    @property
    def final(self):
        return self.distances[-1]

    def passes(self, final_tol=1e-3, slack=1e-12):
        """Small final distance that does not exceed the first one.

        Monotonicity in ``lam`` is not assumed, only dominance of the two
        endpoints.
        """
        return self.final <= final_tol and self.final <= self.distances[0] + slack


def resolvent_limit_curve(op, u, lambdas=DEFAULT_LAMBDAS, inner_tol=DEFAULT_INNER_TOL):
    """Trace ``lam -> ||(I + lam A)^{-1} u - P_F u||``.

    Raises
    ------
    NoSolutionError
        If the zero set of ``op`` is empty.
    """
    lambdas = [float(v) for v in lambdas]
    if not lambdas or min(lambdas) <= 0:
        raise ParameterError("lambdas must be positive")
    u = np.asarray(u, dtype=np.float64)
    target = zero_projection(op, u)
    dists = [float(np.linalg.norm(resolvent(op, lam, u, inner_tol) - target)) for lam in lambdas]
    return LimitCurve(lambdas, dists)


@dataclass
class BoundednessCertificate:
    c: float
    c1: float
    holds: bool
    first_violation: int = None
    start: int = 0

    def __str__(self):
        if self.holds:
            return f"bounded: ||x_n|| <= ||x_{self.start}|| c^(n-{self.start}) + c1/(1-c) with c={self.c:g}, c1={self.c1:g}"
        return f"bound violated at n={self.first_violation} (c={self.c:g}, c1={self.c1:g})"


def check_boundedness(trace, c, c1, start=0):
    """Verify ``||x_n|| <= ||x_s|| c^(n-s) + c1/(1-c)`` for recorded ``n >= s``.

    ``s = start`` is the index from which ``|alpha_n| <= c`` holds; the
    induction behind the bound restarts there.
    """
    if not 0 <= c < 1:
        raise ParameterError(f"c must lie in [0, 1), got {c}")
    if not c1 > 0:
        raise ParameterError("c1 must be positive")
    records = [r for r in trace.records if r.n >= start]
    if not records:
        return BoundednessCertificate(c, c1, True, None, start)
    x_start = records[0].xnorm
    limit = c1 / (1.0 - c)
    for r in records:
        bound = x_start * c ** (r.n - start) + limit + 1e-9
        if not r.xnorm <= bound:
            return BoundednessCertificate(c, c1, False, r.n, start)
    return BoundednessCertificate(c, c1, True, None, start)


def boundedness_constants(trace, p):
    """Assemble ``(c, c1, start)`` for :func:`check_boundedness` from run data.

    ``start`` is the first index after which every recorded ``|alpha_n|`` is
    below one, ``c`` the largest such ``|alpha_n|``, and
    ``c1 = sup ||u_n|| + sup |alpha_n| ||e_n|| + 2 ||p||`` for a zero ``p``:
    one ``||p||`` from ``||u_n - p||``, one from passing from
    ``||x_{n+1} - p||`` to ``||x_{n+1}||``.
    """
    recs = trace.records
    start = len(recs)
    for r in reversed(recs):
        if abs(r.alpha) < 1.0:
            start = r.n
        else:
            break
    tail = [r for r in recs if r.n >= start]
    if not tail:
        raise ValueError("no index with |alpha_n| < 1 in the trace")
    c = max(abs(r.alpha) for r in tail)
    sup_u = max(r.unorm for r in tail)
    sup_ae = max(abs(r.alpha) * r.enorm for r in tail)
    c1 = sup_u + sup_ae + 2.0 * float(np.linalg.norm(p))
    # c1 must be positive for the certificate
    return c, max(c1, np.finfo(float).tiny), start


@dataclass
class NonexpansiveReport:
    trials: int
    max_ratio: float
    worst_beta: float
    passed: bool

    def __str__(self):
        return f"max ||J x - J y|| / ||x - y|| = {self.max_ratio:.15g} over {self.trials} trials"


def probe_nonexpansive(op, trials=1000, seed=0, beta_range=(1e-3, 1e3), scale=3.0, inner_tol=DEFAULT_INNER_TOL):
    """Sample ``(x, y, beta)`` and report the largest resolvent Lipschitz ratio.

    ``beta`` is log-uniform on ``beta_range``; ``x`` and ``y`` are Gaussian
    with standard deviation ``scale`` around the zero set (or the origin).
    Passes iff the ratio never exceeds ``1 + 1e-12``.
    """
    if trials < 1:
        raise ParameterError("trials must be positive")
    rng = np.random.default_rng(seed)
    zs = op.zero_set()
    anchor = np.zeros(op.dim)
    if zs is not None and not zs.empty:
        anchor = zs.project(anchor)
    lo, hi = math.log(beta_range[0]), math.log(beta_range[1])
    worst, worst_beta = 0.0, None
    for _ in range(trials):
        beta = math.exp(rng.uniform(lo, hi))
        x = anchor + scale * rng.standard_normal(op.dim)
        y = anchor + scale * rng.standard_normal(op.dim)
        dxy = float(np.linalg.norm(x - y))
        if dxy == 0.0:
            continue
        ratio = float(np.linalg.norm(resolvent(op, beta, x, inner_tol) - resolvent(op, beta, y, inner_tol))) / dxy
        if ratio > worst:
            worst, worst_beta = ratio, beta
    return NonexpansiveReport(trials, worst, worst_beta, worst <= 1.0 + 1e-12)


def projection_vi_gap(u, p, samples):
    """Largest ``(u - p, q - p)`` over the samples ``q``."""
    u = np.asarray(u, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    Q = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    return float(np.max((Q - p) @ (u - p)))


def check_projection_vi(u, p, samples, tol=1e-8):
    """True iff ``(u - p, q - p) <= tol`` for every sample ``q`` of ``F``.

    This is the variational characterization of ``p = P_F u``.
    """
    return projection_vi_gap(u, p, samples) <= tol


def sample_zero_set(op, count, seed=0):
    zs = op.zero_set()
    if zs is None:
        raise ValueError(f"{op.describe()} has no zero-set oracle")
    if zs.empty:
        raise NoSolutionError()
    return zs.sample(np.random.default_rng(seed), count)
