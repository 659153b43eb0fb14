"""Catalog of maximal monotone operators.

Each operator knows how to evaluate its resolvent ``(I + beta*A)^{-1}``, test
membership in its graph, and describe its zero set ``F = A^{-1}(0)`` so that
``P_F u`` is available as ground truth.

The module-level functions :func:`evaluate`, :func:`graph_contains`,
:func:`resolvent` and :func:`zero_projection` are the public entry points; they
validate arguments and dispatch to the operator classes.
"""

from dataclasses import dataclass
from functools import partial
import math

import numpy as np

from .exceptions import (
    DimensionError,
    InnerSolveError,
    NoSolutionError,
    ParameterError,
    SetValuedError,
)
from .space import vector

DEFAULT_INNER_TOL = 1e-12
DEFAULT_MAX_INNER = 100

_EPS = np.finfo(np.float64).eps


# --------------------------------------------------------------------------
# Zero sets


@dataclass(frozen=True, eq=False)
class ZeroSet:
    """Description of ``F = A^{-1}(0)``.

    ``kind`` is one of ``"point"``, ``"box"``, ``"ball"``, ``"subspace"`` or
    ``"empty"``. A ``"subspace"`` is affine: ``offset + span(basis)`` with an
    orthonormal ``basis`` stored column-wise.
    """

    kind: str
    point: np.ndarray = None
    lo: np.ndarray = None
    hi: np.ndarray = None
    center: np.ndarray = None
    radius: float = None
    offset: np.ndarray = None
    basis: np.ndarray = None

    @property
    def empty(self):
        return self.kind == "empty"

    def project(self, u):
        if self.kind == "point":
            return self.point.copy()
        if self.kind == "box":
            return np.clip(u, self.lo, self.hi)
        if self.kind == "ball":
            return _project_ball(u, self.center, self.radius)
        if self.kind == "subspace":
            B = self.basis
            return self.offset + B @ (B.T @ (u - self.offset))
        raise NoSolutionError()

    def sample(self, rng, count, scale=1.0):
        """Draw ``count`` points of the zero set (as rows of an array)."""
        if self.kind == "point":
            return np.tile(self.point, (count, 1))
        if self.kind == "box":
            return rng.uniform(self.lo, self.hi, size=(count, self.lo.size))
        if self.kind == "ball":
            d = self.center.size
            g = rng.standard_normal((count, d))
            g /= np.linalg.norm(g, axis=1, keepdims=True)
            r = self.radius * rng.uniform(size=(count, 1)) ** (1.0 / d)
            return self.center + r * g
        if self.kind == "subspace":
            k = self.basis.shape[1]
            coeffs = scale * rng.standard_normal((count, k))
            return self.offset + coeffs @ self.basis.T
        raise NoSolutionError()


def _project_ball(u, center, radius):
    d = u - center
    dn = math.sqrt(float(np.dot(d, d)))
    if dn <= radius:
        return u.copy()
    return center + (radius / dn) * d


def _null_space(M, rtol=1e-10):
    _, s, vt = np.linalg.svd(M)
    cutoff = rtol * max(1.0, s[0] if s.size else 0.0)
    rank = int(np.sum(s > cutoff))
    return vt[rank:].T


# --------------------------------------------------------------------------
# Operators


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """Base class for catalog operators on ``R^dim``."""

    dim: int

    kind = "abstract"

    def _evaluate(self, x):
        raise NotImplementedError

    def _graph_contains(self, x, y, tol):
        try:
            ax = self._evaluate(x)
        except SetValuedError:
            return False
        return bool(np.max(np.abs(y - ax)) <= tol)

    def _resolvent(self, beta, y, inner_tol):
        raise NotImplementedError

    def zero_set(self):
        """Return the :class:`ZeroSet` oracle, or None when unknown."""
        return None

    def describe(self):
        return f"{self.kind}(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class Identity(OperatorSpec):
    kind = "identity"

    def _evaluate(self, x):
        return x.copy()

    def _resolvent(self, beta, y, inner_tol):
        return y / (1.0 + beta)

    def zero_set(self):
        return ZeroSet("point", point=np.zeros(self.dim))


@dataclass(frozen=True, eq=False)
class Quadratic(OperatorSpec):
    """``A x = Q x - b``, the gradient of ``x'Qx/2 - b'x`` for PSD ``Q``."""

    Q: np.ndarray = None
    b: np.ndarray = None

    kind = "quadratic"

    def __post_init__(self):
        Q = np.array(self.Q, dtype=np.float64)
        b = np.array(self.b, dtype=np.float64)
        if Q.shape != (self.dim, self.dim) or b.shape != (self.dim,):
            raise DimensionError(f"quadratic needs Q {self.dim}x{self.dim} and b of length {self.dim}")
        if np.max(np.abs(Q - Q.T)) > 1e-12:
            raise ParameterError("Q must be symmetric")
        if np.linalg.eigvalsh(Q).min() < -1e-10:
            raise ParameterError("Q must be positive semidefinite")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "b", b)

    def phi(self, x):
        return 0.5 * float(x @ self.Q @ x) - float(self.b @ x)

    def _evaluate(self, x):
        return self.Q @ x - self.b

    def _resolvent(self, beta, y, inner_tol):
        M = np.eye(self.dim) + beta * self.Q
        return np.linalg.solve(M, y + beta * self.b)

    def zero_set(self):
        w, V = np.linalg.eigh(self.Q)
        cutoff = 1e-10 * max(1.0, float(np.abs(w).max()))
        keep = w > cutoff
        if keep.all():
            return ZeroSet("point", point=np.linalg.solve(self.Q, self.b))
        Vr = V[:, keep]
        p = Vr @ ((Vr.T @ self.b) / w[keep])
        if np.linalg.norm(self.Q @ p - self.b) > 1e-9 * (1.0 + np.linalg.norm(self.b)):
            return ZeroSet("empty")
        return ZeroSet("subspace", offset=p, basis=V[:, ~keep])


@dataclass(frozen=True, eq=False)
class NormalConeBox(OperatorSpec):
    """Normal cone of the box ``[lo, hi]`` (subdifferential of its indicator)."""

    lo: np.ndarray = None
    hi: np.ndarray = None

    kind = "box"

    def __post_init__(self):
        lo = np.array(self.lo, dtype=np.float64)
        hi = np.array(self.hi, dtype=np.float64)
        if lo.shape != (self.dim,) or hi.shape != (self.dim,):
            raise DimensionError(f"box bounds must have length {self.dim}")
        if np.any(lo > hi):
            raise ParameterError("box needs lo <= hi componentwise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def _evaluate(self, x):
        if np.all(x > self.lo) and np.all(x < self.hi):
            return np.zeros(self.dim)
        raise SetValuedError("normal cone is set-valued on the boundary and undefined outside the box")

    def _graph_contains(self, x, y, tol):
        if np.any(x < self.lo - tol) or np.any(x > self.hi + tol):
            return False
        at_hi = np.abs(x - self.hi) <= tol
        at_lo = np.abs(x - self.lo) <= tol
        free = at_hi & at_lo
        ok_hi = ~at_hi | at_lo | (y >= -tol)
        ok_lo = ~at_lo | at_hi | (y <= tol)
        ok_int = at_hi | at_lo | (np.abs(y) <= tol)
        return bool(np.all(free | (ok_hi & ok_lo & ok_int)))

    def _resolvent(self, beta, y, inner_tol):
        return np.clip(y, self.lo, self.hi)

    def zero_set(self):
        return ZeroSet("box", lo=self.lo, hi=self.hi)


@dataclass(frozen=True, eq=False)
class NormalConeBall(OperatorSpec):
    """Normal cone of the closed Euclidean ball."""

    center: np.ndarray = None
    radius: float = 1.0

    kind = "ball"

    def __post_init__(self):
        center = np.array(self.center, dtype=np.float64)
        if center.shape != (self.dim,):
            raise DimensionError(f"ball center must have length {self.dim}")
        if not self.radius > 0:
            raise ParameterError("ball radius must be positive")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))

    def _evaluate(self, x):
        if np.linalg.norm(x - self.center) < self.radius:
            return np.zeros(self.dim)
        raise SetValuedError("normal cone is set-valued on the sphere and undefined outside the ball")

    def _graph_contains(self, x, y, tol):
        d = x - self.center
        dn = float(np.linalg.norm(d))
        if dn > self.radius + tol:
            return False
        if dn < self.radius - tol or dn == 0.0:
            return bool(np.max(np.abs(y)) <= tol)
        n = d / dn
        t = float(y @ n)
        return t >= -tol and bool(np.max(np.abs(y - t * n)) <= tol)

    def _resolvent(self, beta, y, inner_tol):
        return _project_ball(y, self.center, self.radius)

    def zero_set(self):
        return ZeroSet("ball", center=self.center, radius=self.radius)


@dataclass(frozen=True, eq=False)
class Skew(OperatorSpec):
    """Linear map ``x -> S x`` with ``S' = -S``: monotone, not a subdifferential."""

    S: np.ndarray = None

    kind = "skew"

    def __post_init__(self):
        S = np.array(self.S, dtype=np.float64)
        if S.shape != (self.dim, self.dim):
            raise DimensionError(f"skew needs S {self.dim}x{self.dim}")
        if np.max(np.abs(S + S.T)) > 1e-12:
            raise ParameterError("S must be skew-symmetric")
        object.__setattr__(self, "S", S)

    def _evaluate(self, x):
        return self.S @ x

    def _resolvent(self, beta, y, inner_tol):
        return np.linalg.solve(np.eye(self.dim) + beta * self.S, y)

    def zero_set(self):
        N = _null_space(self.S)
        if N.shape[1] == 0:
            return ZeroSet("point", point=np.zeros(self.dim))
        return ZeroSet("subspace", offset=np.zeros(self.dim), basis=N)


@dataclass(frozen=True, eq=False)
class Constant(OperatorSpec):
    """``A x = {c}`` everywhere; the zero set is empty unless ``c = 0``."""

    c: np.ndarray = None

    kind = "constant"

    def __post_init__(self):
        c = np.array(self.c, dtype=np.float64)
        if c.shape != (self.dim,):
            raise DimensionError(f"constant needs c of length {self.dim}")
        object.__setattr__(self, "c", c)

    def _evaluate(self, x):
        return self.c.copy()

    def _resolvent(self, beta, y, inner_tol):
        return y - beta * self.c

    def zero_set(self):
        if np.any(self.c != 0):
            return ZeroSet("empty")
        return ZeroSet("subspace", offset=np.zeros(self.dim), basis=np.eye(self.dim))


@dataclass(frozen=True, eq=False)
class SmoothConvex(OperatorSpec):
    """Gradient of a smooth convex function.

    The resolvent is the proximal map of ``beta*phi``, computed by a damped
    Newton iteration on ``g(x) = x + beta*grad(x) - y``.
    """

    phi: object = None
    grad: object = None
    hess: object = None
    name: str = "custom"
    zeros: ZeroSet = None
    max_inner: int = DEFAULT_MAX_INNER
    # scalar (h', h'') when phi(x) = sum h(x_i - center_i); enables per-coordinate solves
    profile: tuple = None
    center: np.ndarray = None

    kind = "smooth"

    def _evaluate(self, x):
        return np.asarray(self.grad(x), dtype=np.float64)

    def _resolvent(self, beta, y, inner_tol):
        if self.profile is not None:
            dh, d2h = self.profile
            return _separable_prox(dh, d2h, self.center, beta, y, inner_tol, self.max_inner)
        return _newton_prox(self.phi, self.grad, self.hess, beta, y, inner_tol, self.max_inner)

    def zero_set(self):
        return self.zeros

    def describe(self):
        return f"smooth:{self.name}(dim={self.dim})"


def _newton_prox(phi, grad, hess, beta, y, inner_tol, max_inner):
    """Damped Newton on the strongly convex ``|x - y|^2/2 + beta*phi(x)``.

    Steps are accepted on Armijo decrease of that objective, or on decrease
    of the residual norm once the objective is flat to rounding.
    """
    eye = np.eye(y.size)

    def psi(x):
        d = x - y
        return 0.5 * float(d @ d) + beta * phi(x)

    x = y.copy()
    g = x - y + beta * grad(x)
    gn = float(np.linalg.norm(g))
    fx = psi(x)
    for k in range(max_inner + 1):
        H = eye + beta * np.atleast_2d(hess(x))
        # the residual cannot be evaluated below this level in floating point
        floor = 16 * _EPS * (float(np.linalg.norm(y)) + np.abs(H).sum(axis=1).max() * float(np.linalg.norm(x)))
        if gn <= max(inner_tol, floor):
            return x
        if k == max_inner:
            break
        step = np.linalg.solve(H, g)
        slope = float(g @ step)
        t = 1.0
        while True:
            xt = x - t * step
            ft = psi(xt)
            gt = xt - y + beta * grad(xt)
            gtn = float(np.linalg.norm(gt))
            flat = abs(ft - fx) <= 64 * _EPS * max(abs(fx), 1.0)
            if ft <= fx - 1e-4 * t * slope or (flat and gtn < gn):
                break
            t *= 0.5
            if t < 1e-12:
                raise InnerSolveError(gn, k + 1)
        x, g, gn, fx = xt, gt, gtn, ft
    raise InnerSolveError(gn, max_inner)


def _scalar_prox(dh, d2h, beta, r, tol, max_inner):
    """Solve ``s + beta*dh(s) = r`` for convex ``h`` by bracketed Newton.

    The map is increasing with slope >= 1, so ``[r - g, r]`` (or its mirror)
    brackets the root where ``g = beta*dh(r)``. Newton points leaving the
    bracket, or failing to halve the residual, are replaced by bisection.
    """
    s = r
    g = beta * dh(s)
    lo, hi = (r - g, r) if g > 0 else (r, r - g)
    dx_old = dx = math.inf
    for k in range(max_inner + 1):
        df = 1.0 + beta * d2h(s)
        ag = abs(g)
        # residuals cannot be evaluated below this level in floating point
        if ag <= tol or ag <= 16 * _EPS * (abs(r) + df * abs(s)):
            return s, ag, True
        if k == max_inner:
            break
        if g > 0:
            hi = s
        else:
            lo = s
        newton = s - g / df
        if newton < lo or newton > hi or 2.0 * ag > abs(dx_old * df):
            s_new = 0.5 * (lo + hi)
        else:
            s_new = newton
        dx_old, dx = dx, abs(s_new - s)
        s = s_new
        g = s - r + beta * dh(s)
    return s, abs(g), False


def _separable_prox(dh, d2h, center, beta, y, inner_tol, max_inner):
    """Prox of ``beta * sum h(x_i - c_i)``, one scalar solve per coordinate."""
    # bound both s + beta h'(s) - r and the graph residual (r - s)/beta - h'(s)
    coord_tol = inner_tol * min(1.0, beta) / math.sqrt(y.size)
    out = np.empty_like(y)
    worst = 0.0
    for i, (yi, ci) in enumerate(zip(y.tolist(), center.tolist())):
        si, gi, ok = _scalar_prox(dh, d2h, beta, yi - ci, coord_tol, max_inner)
        if not ok:
            worst = max(worst, gi)
        out[i] = si + ci
    if worst:
        raise InnerSolveError(worst, max_inner)
    return out


# Builtin smooth convex functions. Module-level so operators stay picklable.


def _quartic_phi(center, x):
    return 0.25 * float(np.sum((x - center) ** 4))


def _quartic_grad(center, x):
    return (x - center) ** 3


def _quartic_hess(center, x):
    return np.diag(3.0 * (x - center) ** 2)


def _quartic_d1(t):
    return t * t * t


def _quartic_d2(t):
    return 3.0 * t * t


def _logcosh_phi(center, x):
    t = np.abs(x - center)
    return float(np.sum(t + np.log1p(np.exp(-2.0 * t)) - math.log(2.0)))


def _logcosh_grad(center, x):
    return np.tanh(x - center)


def _logcosh_hess(center, x):
    return np.diag(1.0 - np.tanh(x - center) ** 2)


def _logcosh_d2(t):
    th = math.tanh(t)
    return 1.0 - th * th


SMOOTH_FUNCTIONS = {
    "quartic": (_quartic_phi, _quartic_grad, _quartic_hess, (_quartic_d1, _quartic_d2)),
    "logcosh": (_logcosh_phi, _logcosh_grad, _logcosh_hess, (math.tanh, _logcosh_d2)),
}


# --------------------------------------------------------------------------
# Constructors


def identity(dim):
    return Identity(dim)


def quadratic(Q, b):
    b = vector(b)
    return Quadratic(b.size, Q=Q, b=b)


def box(lo, hi):
    lo = vector(lo)
    return NormalConeBox(lo.size, lo=lo, hi=hi)


def ball(center, radius):
    center = vector(center)
    return NormalConeBall(center.size, center=center, radius=radius)


def skew(S):
    S = np.atleast_2d(np.array(S, dtype=np.float64))
    return Skew(S.shape[0], S=S)


def constant(c):
    c = vector(c)
    return Constant(c.size, c=c)


def smooth(name, center, max_inner=DEFAULT_MAX_INNER):
    """Builtin separable smooth convex function centred at ``center``.

    ``name`` is ``"quartic"`` (``sum (x-c)^4/4``) or ``"logcosh"``
    (``sum log cosh(x-c)``). Both are minimized exactly at ``center``.
    """
    if name not in SMOOTH_FUNCTIONS:
        raise ParameterError(f"unknown smooth function {name!r}; choose from {sorted(SMOOTH_FUNCTIONS)}")
    center = vector(center)
    phi, grad, hess, profile = SMOOTH_FUNCTIONS[name]
    phi, grad, hess = (partial(f, center) for f in (phi, grad, hess))
    return SmoothConvex(
        center.size,
        phi=phi,
        grad=grad,
        hess=hess,
        name=name,
        zeros=ZeroSet("point", point=center),
        max_inner=max_inner,
        profile=profile,
        center=center,
    )


def smooth_custom(dim, phi, grad, hess, zeros=None, name="custom", max_inner=DEFAULT_MAX_INNER):
    return SmoothConvex(dim, phi=phi, grad=grad, hess=hess, name=name, zeros=zeros, max_inner=max_inner)


def default_catalog(dim, seed=0):
    """One representative operator per kind with a nonempty zero set."""
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((dim, dim))
    Q = M @ M.T / dim + 0.1 * np.eye(dim)
    lo = rng.uniform(-1.0, 0.0, dim)
    hi = lo + rng.uniform(0.5, 1.5, dim)
    W = rng.standard_normal((dim, dim))
    return {
        "identity": identity(dim),
        "quadratic": quadratic(0.5 * (Q + Q.T), rng.standard_normal(dim)),
        "box": box(lo, hi),
        "ball": ball(rng.standard_normal(dim), 1.0),
        "skew": skew(W - W.T),
        "smooth": smooth("logcosh", rng.standard_normal(dim)),
    }


# --------------------------------------------------------------------------
# Public operations


def _as_point(op, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (op.dim,):
        raise DimensionError(f"operator has dim {op.dim}, got vector of shape {x.shape}")
    return x


def evaluate(op, x):
    """Unique element of ``A x``; refuses points where ``A`` is set-valued."""
    return op._evaluate(_as_point(op, x))


def graph_contains(op, x, y, tol):
    """True iff ``[x, y]`` lies in the graph of ``op`` within ``tol``."""
    if not tol > 0:
        raise ParameterError("tol must be positive")
    return op._graph_contains(_as_point(op, x), _as_point(op, y), tol)


def resolvent(op, beta, y, inner_tol=DEFAULT_INNER_TOL):
    """Evaluate ``(I + beta*A)^{-1} y``."""
    if not beta > 0:
        raise ParameterError(f"beta must be positive, got {beta}")
    if not inner_tol > 0:
        raise ParameterError("inner_tol must be positive")
    return op._resolvent(beta, _as_point(op, y), inner_tol)


def zero_projection(op, u):
    """Metric projection of ``u`` onto the zero set of ``op``.

    Raises
    ------
    NoSolutionError
        If the zero set is empty.
    ValueError
        If the operator carries no zero-set oracle.
    """
    zs = op.zero_set()
    if zs is None:
        raise ValueError(f"{op.describe()} has no zero-set oracle")
    return zs.project(_as_point(op, u))


KINDS = ("identity", "quadratic", "box", "ball", "skew", "constant", "smooth")
