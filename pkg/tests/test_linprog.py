import numpy as np
import pytest

from bfclab import linprog as L


def simple_lp(maximize=True):
    return L.LinearProgram.build(
        objective=[1.0], maximize=maximize, rows=[[1.0]],
        relations=[L.LE], rhs=[3.0], lower=[0.0],
    )


def test_bounded_maximum():
    out = L.solve(simple_lp())
    assert out.status == "optimal"
    assert out.value == pytest.approx(3.0, abs=1e-9)
    assert out.max_violation <= 1e-9


def test_infeasible_pair():
    lp = L.LinearProgram.build(
        objective=[1.0], maximize=True, rows=[[1.0], [1.0]],
        relations=[L.GE, L.LE], rhs=[1.0, 0.0], lower=[0.0],
    )
    assert L.solve(lp).status == "infeasible"


def test_unbounded():
    lp = L.LinearProgram.build(
        objective=[1.0], maximize=True, rows=[[0.0]],
        relations=[L.LE], rhs=[1.0], lower=[0.0],
    )
    assert L.solve(lp).status == "unbounded"


def test_equality_and_free_variables():
    # min x + y  s.t.  x + y == 2, x - y == 0, x,y free
    lp = L.LinearProgram.build(
        objective=[1.0, 1.0], maximize=False,
        rows=[[1.0, 1.0], [1.0, -1.0]], relations=[L.EQ, L.EQ],
        rhs=[2.0, 0.0],
    )
    out = L.solve(lp)
    assert out.status == "optimal"
    assert out.solution == pytest.approx([1.0, 1.0], abs=1e-8)


def test_upper_bounded_variable():
    lp = L.LinearProgram.build(
        objective=[1.0], maximize=True, rows=[[0.0]], relations=[L.LE],
        rhs=[1.0], lower=[0.0], upper=[2.5],
    )
    assert L.solve(lp).value == pytest.approx(2.5, abs=1e-9)


def test_reflected_variable_without_lower_bound():
    # max x with x <= 4 as a pure upper bound, objective drives x upward
    lp = L.LinearProgram.build(
        objective=[1.0], maximize=True, rows=[[1.0]], relations=[L.LE],
        rhs=[10.0], upper=[4.0],
    )
    assert L.solve(lp).value == pytest.approx(4.0, abs=1e-9)


def test_fbs_lp_for_or3_at_zero():
    # three singleton blocks, unit load per variable: optimum 3, all p_j = 1
    from bfclab.measures import fbs_program

    lp = fbs_program([0b001, 0b010, 0b100], 3)
    out = L.solve(lp)
    assert out.value == pytest.approx(3.0, abs=1e-9)
    assert out.solution == pytest.approx([1.0, 1.0, 1.0], abs=1e-9)
    ok, worst = L.check_certificate(lp, out.solution)
    assert ok and worst <= 1e-7


def test_certificate_catches_perturbation():
    lp = simple_lp()
    out = L.solve(lp)
    ok, _ = L.check_certificate(lp, out.solution, tol=1e-7)
    assert ok
    bad = out.solution.copy()
    bad[0] += 1e-3  # pushes the tight row past its rhs
    ok, worst = L.check_certificate(lp, bad, tol=1e-7)
    assert not ok and worst >= 1e-3 - 1e-9


def test_determinism_bitwise():
    lp1 = L.LinearProgram.build(
        objective=[1.0, 2.0], maximize=True,
        rows=[[1.0, 1.0], [2.0, 1.0]], relations=[L.LE, L.LE],
        rhs=[4.0, 6.0], lower=[0.0, 0.0],
    )
    a = L.solve(lp1)
    b = L.solve(lp1)
    assert a.value == b.value
    assert np.array_equal(a.solution, b.solution)


def test_objective_scaling_keeps_argmax():
    rows = [[1.0, 1.0], [2.0, 1.0]]
    base = L.LinearProgram.build([1.0, 2.0], True, rows, [L.LE, L.LE],
                                 [4.0, 6.0], lower=[0.0, 0.0])
    scaled = L.LinearProgram.build([3.5, 7.0], True, rows, [L.LE, L.LE],
                                   [4.0, 6.0], lower=[0.0, 0.0])
    a, b = L.solve(base), L.solve(scaled)
    assert b.value == pytest.approx(3.5 * a.value, rel=1e-12)
    assert np.array_equal(a.solution, b.solution)


def test_iteration_limit_distinct_from_infeasible():
    lp = L.LinearProgram.build(
        objective=[1.0, 2.0], maximize=True,
        rows=[[1.0, 1.0], [2.0, 1.0]], relations=[L.LE, L.LE],
        rhs=[4.0, 6.0], lower=[0.0, 0.0],
    )
    with pytest.raises(L.IterationLimitExceeded):
        L.solve(lp, max_pivots=1)


def test_rejects_nonfinite_and_malformed():
    with pytest.raises(ValueError):
        L.LinearProgram.build([np.inf], True, [[1.0]], [L.LE], [1.0])
    with pytest.raises(ValueError):
        L.LinearProgram.build([1.0], True, [[1.0]], ["<"], [1.0])


def test_dump_one_constraint_per_line():
    lp = L.LinearProgram.build(
        objective=[1.0, 2.0], maximize=True,
        rows=[[1.0, 1.0], [2.0, 1.0]], relations=[L.LE, L.LE],
        rhs=[4.0, 6.0], lower=[0.0, 0.0], upper=[np.inf, 5.0],
    )
    text = lp.dump()
    lines = text.strip().splitlines()
    assert lines[0].startswith("max")
    assert lines[1] == "+1 x0 +1 x1 <= 4"
    assert lines[2] == "+2 x0 +1 x1 <= 6"
    assert any("x1 <= 5" in line for line in lines)


def test_agreement_with_external_solver_on_random_instances():
    scipy_lp = pytest.importorskip("scipy.optimize").linprog
    rng = np.random.default_rng(5150)
    for _ in range(25):
        m, n = int(rng.integers(1, 6)), int(rng.integers(1, 5))
        a = rng.integers(-3, 4, size=(m, n)).astype(float)
        b = rng.integers(0, 6, size=m).astype(float)
        c = rng.integers(-3, 4, size=n).astype(float)
        lp = L.LinearProgram.build(c, False, a, [L.LE] * m, b,
                                   lower=np.zeros(n), upper=np.full(n, 10.0))
        mine = L.solve(lp)
        ref = scipy_lp(c, A_ub=a, b_ub=b, bounds=[(0, 10)] * n, method="highs")
        assert mine.status == "optimal" and ref.status == 0
        assert mine.value == pytest.approx(ref.fun, abs=1e-6)
        ok, _ = L.check_certificate(lp, mine.solution, tol=1e-7)
        assert ok
