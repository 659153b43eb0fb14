"""Parameter sequences, error models and hypothesis validators.

Scalar schedules drive ``beta_n`` and ``alpha_n`` (or ``lambda_n``), vector
schedules drive the anchors ``u_n`` and error models produce ``e_n``. Every
family carries enough structure to decide its asymptotics exactly, which is
what :func:`validate` works from; numeric limits are never taken.

Asymptotic magnitudes are tracked as triples ``(K, p, r)`` meaning
``|s_n| ~ K * n**p * r**n``.
"""

from dataclasses import dataclass, field, replace
import math

import numpy as np

from .exceptions import ParameterError


# --------------------------------------------------------------------------
# Asymptotic bookkeeping


@dataclass(frozen=True)
class Order:
    K: float
    p: float = 0.0
    r: float = 1.0

    def __mul__(self, other):
        return Order(self.K * other.K, self.p + other.p, self.r * other.r)

    def __truediv__(self, other):
        if other.K == 0:
            return Order(math.inf)
        return Order(self.K / other.K, self.p - other.p, self.r / other.r)

    @property
    def vanishes(self):
        return self.K == 0 or self.r < 1 or (self.r == 1 and self.p < 0)

    @property
    def diverges(self):
        return self.K != 0 and (self.r > 1 or (self.r == 1 and self.p > 0))

    @property
    def summable(self):
        return self.K == 0 or self.r < 1 or (self.r == 1 and self.p < -1)


def _pow(base, expo):
    try:
        return base**expo
    except OverflowError:
        return math.inf


# --------------------------------------------------------------------------
# Scalar schedules


class ScalarSchedule:
    """Base class; subclasses are frozen dataclasses."""

    def value_at(self, n):
        raise NotImplementedError

    def order(self):
        raise NotImplementedError

    def limit(self):
        """Limit value (``+-inf`` for divergent families)."""
        o = self.order()
        if o.vanishes:
            return 0.0
        if o.diverges:
            return math.copysign(math.inf, self._sign())
        return self._finite_limit()

    @property
    def tag(self):
        o = self.order()
        if o.vanishes:
            return "converges to 0"
        if o.diverges:
            return "diverges to ∞"
        return "converges"

    def _sign(self):
        return 1.0

    def _finite_limit(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Const(ScalarSchedule):
    v: float

    family = "const"

    def value_at(self, n):
        return float(self.v)

    def order(self):
        return Order(abs(self.v))

    def _finite_limit(self):
        return float(self.v)

    def literal(self):
        return f"const:{self.v!r}"


@dataclass(frozen=True)
class Poly(ScalarSchedule):
    """``a * (n+1)**p``."""

    a: float
    p: float

    family = "poly"

    def value_at(self, n):
        return self.a * _pow(float(n + 1), self.p)

    def order(self):
        return Order(abs(self.a), self.p)

    def _sign(self):
        return math.copysign(1.0, self.a)

    def _finite_limit(self):
        return float(self.a)

    def literal(self):
        return f"poly:{self.a!r}:{self.p!r}"


@dataclass(frozen=True)
class Geom(ScalarSchedule):
    """``a * r**n`` with ``r > 0``."""

    a: float
    r: float

    family = "geom"

    def __post_init__(self):
        if not self.r > 0:
            raise ParameterError("geom ratio must be positive")

    def value_at(self, n):
        return self.a * _pow(float(self.r), n)

    def order(self):
        return Order(abs(self.a), 0.0, self.r)

    def _sign(self):
        return math.copysign(1.0, self.a)

    def _finite_limit(self):
        return float(self.a)

    def literal(self):
        return f"geom:{self.a!r}:{self.r!r}"


@dataclass(frozen=True)
class Inv(ScalarSchedule):
    """``a / (n+1)``."""

    a: float

    family = "inv"

    def value_at(self, n):
        return self.a / (n + 1)

    def order(self):
        return Order(abs(self.a), -1.0)

    def literal(self):
        return f"inv:{self.a!r}"


@dataclass(frozen=True)
class OneMinus(ScalarSchedule):
    """``1 - inner_n``."""

    inner: ScalarSchedule

    family = "oneminus"

    def value_at(self, n):
        return 1.0 - self.inner.value_at(n)

    def order(self):
        if isinstance(self.inner, OneMinus):
            return self.inner.inner.order()
        lim = self.inner.limit()
        if math.isinf(lim):
            return self.inner.order()
        if self.inner.order().vanishes:
            return Order(1.0)
        # remaining inner families with a finite nonzero limit are constant
        return Order(abs(1.0 - lim))

    def _sign(self):
        return -math.copysign(1.0, self.inner.limit())

    def _finite_limit(self):
        if isinstance(self.inner, OneMinus):
            return self.inner.inner.limit()
        return 1.0 - self.inner.limit()

    def literal(self):
        return f"oneminus:{self.inner.literal()}"


def sums_to_infinity(s):
    """Family-level test for ``sum s_n = inf`` used by the Wang-Cui set."""
    if isinstance(s, Inv):
        return s.a > 0
    if isinstance(s, Poly):
        return s.a > 0 and -1.0 <= s.p < 0
    return False


# --------------------------------------------------------------------------
# Vector schedules


class VectorSchedule:
    def value_at(self, n):
        raise NotImplementedError

    def limit(self):
        raise NotImplementedError

    def converges(self):
        return True


@dataclass(frozen=True, eq=False)
class ConstVec(VectorSchedule):
    u: np.ndarray

    family = "const"

    def value_at(self, n):
        return self.u

    def limit(self):
        return self.u

    def literal(self):
        return "const:" + _vec(self.u)


@dataclass(frozen=True, eq=False)
class Converging(VectorSchedule):
    """``u + d / (n+1)**p`` with ``p > 0``."""

    u: np.ndarray
    d: np.ndarray
    p: float

    family = "converging"

    def __post_init__(self):
        if not self.p > 0:
            raise ParameterError("converging schedule needs p > 0")
        if np.shape(self.u) != np.shape(self.d):
            raise ParameterError("converging schedule: u and d differ in dimension")

    def value_at(self, n):
        return self.u + self.d / float(n + 1) ** self.p

    def limit(self):
        return self.u

    def literal(self):
        return f"converging:{_vec(self.u)}:{_vec(self.d)}:{self.p!r}"


@dataclass(frozen=True, eq=False)
class HalpernForm(VectorSchedule):
    """``lam_n * u + (1 - lam_n) * y0``."""

    u: np.ndarray
    y0: np.ndarray
    lam: ScalarSchedule

    family = "halpern"

    def __post_init__(self):
        if np.shape(self.u) != np.shape(self.y0):
            raise ParameterError("halpern schedule: u and y0 differ in dimension")

    def value_at(self, n):
        lam = self.lam.value_at(n)
        return lam * self.u + (1.0 - lam) * self.y0

    def converges(self):
        return math.isfinite(self.lam.limit())

    def limit(self):
        L = self.lam.limit()
        if not math.isfinite(L):
            raise ValueError("halpern schedule does not converge")
        return L * self.u + (1.0 - L) * self.y0

    def literal(self):
        return f"halpern:{_vec(self.u)}:{_vec(self.y0)}:{self.lam.literal()}"


def _vec(x):
    return " ".join(repr(float(v)) for v in x)


# --------------------------------------------------------------------------
# Error models


class ErrorModel:
    def error_at(self, n, dim):
        raise NotImplementedError

    def order(self):
        raise NotImplementedError

    @property
    def tag(self):
        o = self.order()
        if o.summable:
            return "summable"
        if o.diverges:
            return "unbounded"
        return "bounded"


@dataclass(frozen=True)
class ZeroError(ErrorModel):
    family = "zero"

    def error_at(self, n, dim):
        return np.zeros(dim)

    def order(self):
        return Order(0.0)

    def literal(self):
        return "zero"


@dataclass(frozen=True)
class BoundedRandom(ErrorModel):
    """Each ``e_n`` uniform in the ball of radius ``bound``.

    Draws come from a Philox stream keyed by ``(seed, n)`` so every index is
    reproducible on its own, independent of evaluation order.
    """

    bound: float
    seed: int = 0

    family = "bounded"

    def __post_init__(self):
        if not self.bound >= 0:
            raise ParameterError("error bound must be nonnegative")
        if self.seed < 0:
            raise ParameterError("seed must be unsigned")

    def error_at(self, n, dim):
        key = (int(n) << 64) | (int(self.seed) & 0xFFFFFFFFFFFFFFFF)
        rng = np.random.Generator(np.random.Philox(key=key))
        g = rng.standard_normal(dim)
        gn = np.linalg.norm(g)
        radius = self.bound * rng.random() ** (1.0 / dim)
        return (radius / gn) * g

    def order(self):
        return Order(float(self.bound))

    @property
    def tag(self):
        return "summable" if self.bound == 0 else "bounded"

    def literal(self):
        return f"bounded:{self.bound!r}:{self.seed}"


@dataclass(frozen=True, eq=False)
class Growing(ErrorModel):
    """``(n+1)**q * v`` with ``q >= 0`` (``q = 0`` is a constant error)."""

    v: np.ndarray
    q: float

    family = "growing"

    def __post_init__(self):
        if not self.q >= 0:
            raise ParameterError("growing error needs q >= 0")

    def error_at(self, n, dim):
        return float(n + 1) ** self.q * self.v

    def order(self):
        return Order(float(np.linalg.norm(self.v)), self.q)

    def literal(self):
        return f"growing:{_vec(self.v)}:{self.q!r}"


@dataclass(frozen=True, eq=False)
class Summable(ErrorModel):
    """``r**n * v`` with ``0 < r < 1``."""

    v: np.ndarray
    r: float

    family = "summable"

    def __post_init__(self):
        if not 0 < self.r < 1:
            raise ParameterError("summable error needs 0 < r < 1")

    def error_at(self, n, dim):
        return self.r**n * self.v

    def order(self):
        return Order(float(np.linalg.norm(self.v)), 0.0, self.r)

    def literal(self):
        return f"summable:{_vec(self.v)}:{self.r!r}"


def value_at(s, n):
    """Evaluate a scalar or vector schedule at index ``n >= 0``."""
    if n < 0:
        raise ValueError("schedule index must be nonnegative")
    return s.value_at(n)


def error_at(m, n, dim):
    if n < 0:
        raise ValueError("error index must be nonnegative")
    return m.error_at(n, dim)


# --------------------------------------------------------------------------
# Schedule sets and validation


@dataclass(frozen=True)
class ScheduleSet:
    """Parameter sequences for one run.

    ``alpha`` holds ``alpha_n`` for GENERAL/SIMPLE and ``lambda_n`` for
    XU/XU2; PPA ignores it.
    """

    beta: ScalarSchedule = field(default_factory=lambda: Poly(1.0, 1.0))
    alpha: ScalarSchedule = field(default_factory=lambda: Inv(1.0))
    u: VectorSchedule = None
    error: ErrorModel = field(default_factory=ZeroError)

    def with_(self, **changes):
        return replace(self, **changes)


def default_schedules(u):
    """``beta_n = n+1``, ``alpha_n = 1/(n+1)``, ``u_n = u``, no errors."""
    return ScheduleSet(Poly(1.0, 1.0), Inv(1.0), ConstVec(np.asarray(u, dtype=np.float64)), ZeroError())


@dataclass(frozen=True)
class Condition:
    name: str
    passed: bool
    reason: str


@dataclass
class ValidationReport:
    hset: str
    conditions: list

    @property
    def passed(self):
        return all(c.passed for c in self.conditions)

    def failures(self):
        return [c for c in self.conditions if not c.passed]

    def __str__(self):
        lines = [f"{self.hset}: {'pass' if self.passed else 'FAIL'}"]
        for c in self.conditions:
            lines.append(f"  [{'ok' if c.passed else 'FAIL'}] {c.name}: {c.reason}")
        return "\n".join(lines)


H_GENERAL = "H_GENERAL"
WANG_CUI = "WANG_CUI"
PPA_CLASSICAL = "PPA_CLASSICAL"
HYPOTHESIS_SETS = (H_GENERAL, WANG_CUI, PPA_CLASSICAL)

_SAMPLE_N = tuple(range(64)) + (100, 1000, 10**4, 10**6)


def _positive_everywhere(s):
    return all(s.value_at(n) > 0 for n in _SAMPLE_N)


def _check_beta_positive(beta):
    ok = _positive_everywhere(beta)
    return Condition("β_n > 0", ok, "positive at sampled n" if ok else "nonpositive value at a sampled n")


def _check_beta_liminf(beta):
    lim = beta.limit()
    ok = lim > 0
    return Condition("lim inf β_n > 0", ok, f"{beta.literal()} has limit {lim}")


def _check_errors_summable(err):
    ok = err.tag == "summable"
    return Condition("Σ‖e_n‖ < ∞", ok, f"{err.literal()} is {err.tag}")


def validate(hset, beta, alpha_or_lambda, u, err):
    """Check a schedule set against a hypothesis set by family algebra.

    ``hset`` is ``H_GENERAL`` (the strong-convergence hypotheses of the
    generalized scheme), ``WANG_CUI`` (Halpern regularization with
    ``lambda_n -> 0``) or ``PPA_CLASSICAL`` (``lim inf beta_n > 0`` and
    summable errors).
    """
    conds = []
    if hset == H_GENERAL:
        conds.append(_check_beta_positive(beta))
        conds.append(Condition("β_n → ∞", beta.limit() == math.inf, f"{beta.literal()} {beta.tag}"))
        alpha = alpha_or_lambda
        conds.append(Condition("α_n → 0", alpha.order().vanishes, f"{alpha.literal()} {alpha.tag}"))
        prod = alpha.order() * err.order()
        conds.append(
            Condition(
                "α_n e_n → 0",
                prod.vanishes,
                f"|α_n|·‖e_n‖ ~ {prod.K:g}·n^{prod.p:g}·{prod.r:g}^n",
            )
        )
        ok = u is not None and u.converges()
        conds.append(Condition("u_n → u", ok, f"{u.literal()}" if u is not None else "no anchor given"))
    elif hset == WANG_CUI:
        lam = alpha_or_lambda
        conds.append(_check_beta_positive(beta))
        conds.append(_check_beta_liminf(beta))
        in_unit = all(0 < lam.value_at(n) < 1 for n in _SAMPLE_N)
        conds.append(Condition("λ_n ∈ (0,1)", in_unit, lam.literal()))
        conds.append(Condition("λ_n → 0", lam.order().vanishes, f"{lam.literal()} {lam.tag}"))
        conds.append(
            Condition(
                "Σλ_n = ∞",
                sums_to_infinity(lam),
                "inv or poly with -1 <= p < 0" if sums_to_infinity(lam) else f"{lam.literal()} not a divergent-sum family",
            )
        )
        ratio = err.order() / lam.order()
        ok = err.tag == "summable" or ratio.vanishes
        conds.append(Condition("Σ‖e_n‖ < ∞ or ‖e_n‖/λ_n → 0", ok, f"{err.literal()} is {err.tag}"))
        ok = u is not None and u.converges()
        conds.append(Condition("u_n → u", ok, f"{u.literal()}" if u is not None else "no anchor given"))
    elif hset == PPA_CLASSICAL:
        conds.append(_check_beta_positive(beta))
        conds.append(_check_beta_liminf(beta))
        conds.append(_check_errors_summable(err))
    else:
        raise ValueError(f"unknown hypothesis set {hset!r}; expected one of {HYPOTHESIS_SETS}")
    return ValidationReport(hset, conds)


def validate_set(hset, schedules):
    s = schedules
    return validate(hset, s.beta, s.alpha, s.u, s.error)


# --------------------------------------------------------------------------
# Literal syntax: ``poly:1:1``, ``inv:1``, ``const:2 0``, ``bounded:1:42``


def _floats(parts, n, what):
    if len(parts) != n:
        raise ValueError(f"{what} takes {n} parameter(s), got {len(parts)}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise ValueError(f"{what}: parameters must be numbers, got {parts}") from None


def parse_scalar(text):
    text = text.strip()
    family, _, rest = text.partition(":")
    family = family.strip().lower()
    if family == "oneminus":
        return OneMinus(parse_scalar(rest))
    parts = [p.strip() for p in rest.split(":")] if rest else []
    if family == "const":
        return Const(*_floats(parts, 1, "const"))
    if family == "poly":
        return Poly(*_floats(parts, 2, "poly"))
    if family == "geom":
        return Geom(*_floats(parts, 2, "geom"))
    if family == "inv":
        return Inv(*_floats(parts, 1, "inv"))
    raise ValueError(f"unknown scalar schedule family {family!r}")


def parse_vector_schedule(text):
    from .space import parse_vector

    family, _, rest = text.strip().partition(":")
    family = family.strip().lower()
    if family == "const":
        return ConstVec(parse_vector(rest))
    if family == "converging":
        parts = rest.split(":")
        if len(parts) != 3:
            raise ValueError("converging takes u:d:p")
        return Converging(parse_vector(parts[0]), parse_vector(parts[1]), float(parts[2]))
    if family == "halpern":
        parts = rest.split(":", 2)
        if len(parts) != 3:
            raise ValueError("halpern takes u:y0:<lambda schedule>")
        return HalpernForm(parse_vector(parts[0]), parse_vector(parts[1]), parse_scalar(parts[2]))
    raise ValueError(f"unknown vector schedule family {family!r}")


def parse_error(text):
    from .space import parse_vector

    family, _, rest = text.strip().partition(":")
    family = family.strip().lower()
    parts = rest.split(":") if rest else []
    if family == "zero":
        if parts:
            raise ValueError("zero takes no parameters")
        return ZeroError()
    if family == "bounded":
        if len(parts) not in (1, 2):
            raise ValueError("bounded takes bound[:seed]")
        seed = int(parts[1]) if len(parts) == 2 else 0
        return BoundedRandom(float(parts[0]), seed)
    if family == "growing":
        if len(parts) != 2:
            raise ValueError("growing takes v:q")
        return Growing(parse_vector(parts[0]), float(parts[1]))
    if family == "summable":
        if len(parts) != 2:
            raise ValueError("summable takes v:r")
        return Summable(parse_vector(parts[0]), float(parts[1]))
    raise ValueError(f"unknown error model {family!r}")


SCALAR_FAMILIES = {
    "const:v": "v for all n",
    "poly:a:p": "a*(n+1)^p",
    "geom:a:r": "a*r^n",
    "inv:a": "a/(n+1)",
    "oneminus:<scalar>": "1 - s_n",
}
VECTOR_FAMILIES = {
    "const:u": "u for all n",
    "converging:u:d:p": "u + d/(n+1)^p",
    "halpern:u:y0:<scalar>": "lam_n*u + (1-lam_n)*y0",
}
ERROR_FAMILIES = {
    "zero": "e_n = 0",
    "bounded:bound:seed": "uniform in the ball of radius bound",
    "growing:v:q": "(n+1)^q * v",
    "summable:v:r": "r^n * v",
}
