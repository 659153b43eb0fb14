import numpy as np
import pytest

from proxpoint import diagnostics as diag
from proxpoint import operators as ops
from proxpoint import schedules as sch
from proxpoint.algorithms import GENERAL, RunConfig, run
from proxpoint.exceptions import NoSolutionError, ParameterError

V = np.array
BOX = ops.box(V([0.0, 0.0]), V([1.0, 1.0]))


def nonempty_catalog():
    return [pytest.param(op, id=f"{k}-{d}") for d in (1, 2, 10) for k, op in ops.default_catalog(d, seed=d).items()]


def test_limit_curve_examples():
    c = diag.resolvent_limit_curve(ops.identity(1), V([2.0]), [1, 99])
    np.testing.assert_allclose(c.distances, [1.0, 0.02])
    c = diag.resolvent_limit_curve(BOX, V([3.0, -2.0]), [0.1, 1.0, 1e5])
    assert max(c.distances) <= 1e-12
    c = diag.resolvent_limit_curve(ops.quadratic(np.eye(1), V([0.0])), V([4.0]), [3.0])
    assert c.distances == [1.0]


def test_limit_curve_errors():
    with pytest.raises(NoSolutionError):
        diag.resolvent_limit_curve(ops.constant(V([1.0])), V([0.0]))
    with pytest.raises(ParameterError):
        diag.resolvent_limit_curve(ops.identity(1), V([1.0]), [10, 1])


@pytest.mark.parametrize("op", nonempty_catalog())
def test_limit_curve_for_catalog(op):
    u = np.random.default_rng(op.dim).standard_normal(op.dim) * 3
    c = diag.resolvent_limit_curve(op, u)
    assert c.final <= 1e-3
    assert c.final <= c.distances[0] + 1e-12
    assert c.passes()


def _identity_trace():
    return run(GENERAL, ops.identity(2), sch.default_schedules(V([2.0, 1.0])), V([4.0, -4.0]), RunConfig(max_iter=500))


def test_boundedness_examples():
    tr = _identity_trace()
    c, c1, start = diag.boundedness_constants(tr, np.zeros(2))
    assert (c, start) == (0.5, 1)
    assert diag.check_boundedness(tr, c, c1, start).holds
    # with p = 0 a single ||p|| term gives the same constant
    c1_single = max(r.unorm for r in tr.records[1:]) + max(abs(r.alpha) * r.enorm for r in tr.records[1:])
    assert diag.check_boundedness(tr, 0.5, c1_single, 1).holds
    assert diag.check_boundedness(tr, 0.5, 1e9).holds

    div = run(GENERAL, ops.constant(V([1.0, 0.0])), sch.default_schedules(np.zeros(2)), np.zeros(2), RunConfig(max_iter=200, validate=False))
    cert = diag.check_boundedness(div, 0.9, 1.0)
    assert not cert.holds
    assert cert.first_violation is not None and cert.first_violation <= 200


def test_boundedness_parameter_errors():
    tr = _identity_trace()
    with pytest.raises(ParameterError):
        diag.check_boundedness(tr, 1.0, 1.0)
    with pytest.raises(ParameterError):
        diag.check_boundedness(tr, 0.5, 0.0)


def test_boundedness_with_offset_zero_set():
    # p far from the origin: the certificate must still hold with the assembled c1
    op = ops.quadratic(np.eye(2), V([30.0, -40.0]))
    tr = run(GENERAL, op, sch.default_schedules(V([1.0, 1.0])).with_(error=sch.BoundedRandom(1.0, 4)), np.zeros(2), RunConfig(max_iter=2000))
    p = ops.zero_projection(op, V([1.0, 1.0]))
    assert diag.check_boundedness(tr, *diag.boundedness_constants(tr, p)).holds


def test_nonexpansive_examples():
    r = diag.probe_nonexpansive(ops.identity(2), trials=500)
    assert r.passed
    assert r.max_ratio <= 1 / (1 + 1e-3) + 1e-12
    assert diag.probe_nonexpansive(BOX, trials=500).max_ratio <= 1.0
    S = V([[0.0, -1.0], [1.0, 0.0]])
    assert diag.probe_nonexpansive(ops.skew(S), trials=500).max_ratio <= 1 + 1e-12


@pytest.mark.parametrize("op", nonempty_catalog())
def test_nonexpansive_catalog(op):
    assert diag.probe_nonexpansive(op, trials=1000).passed


def test_projection_vi_examples():
    u, p = V([2.0, -1.0]), V([1.0, 0.0])
    assert diag.projection_vi_gap(u, p, [V([0.0, 0.0])]) == -1.0
    assert diag.projection_vi_gap(u, p, [V([1.0, 1.0])]) == -1.0
    assert diag.check_projection_vi(u, p, [[0.0, 0.0], [1.0, 1.0]])
    assert diag.check_projection_vi(u, u, np.random.default_rng(0).standard_normal((10, 2)))
    # a point that is not the projection violates the inequality
    assert not diag.check_projection_vi(u, V([0.0, 0.0]), [[1.0, 0.0]])


@pytest.mark.parametrize("op", nonempty_catalog())
def test_projection_vi_catalog(op):
    u = 4 * np.random.default_rng(7).standard_normal(op.dim)
    assert diag.check_projection_vi(u, ops.zero_projection(op, u), diag.sample_zero_set(op, 100, seed=1))
