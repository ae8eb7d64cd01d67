import math

import numpy as np
import pytest

from bfclab import approxdeg as A
from bfclab import functions as F
from bfclab import linprog as L
from bfclab import measures as M
from bfclab.approxdeg import MultilinearPoly
from bfclab.functions import PartialFn

from conftest import random_partial_fn, random_total_fn

ANALYTIC_AND2 = MultilinearPoly(2, {0b01: 1 / 3, 0b10: 1 / 3})


def test_and2_degree1_feasible_with_quarter_error():
    res = A.adeg_feasible(F.and_n(2), 1, 1 / 3)
    assert res.feasible and res.certificate_ok
    assert res.error <= 1 / 3 + 1e-7
    assert res.witness.max_error_on(F.and_n(2)) <= 1 / 3 + 1e-7


def test_and2_analytic_witness_sits_on_the_boundary():
    err = ANALYTIC_AND2.max_error_on(F.and_n(2))
    assert err == pytest.approx(1 / 3, abs=1e-12)
    lp, subsets = A._minimax_program(F.and_n(2), 1, bounded=False)
    # solution layout: slack, then coeff+ / coeff- per monomial
    x = np.zeros(lp.num_vars)
    x[0] = 1 - 1 / 3
    for i, s in enumerate(subsets):
        x[1 + i] = ANALYTIC_AND2.terms.get(s, 0.0)
    ok, worst = L.check_certificate(lp, x, tol=1e-7)
    assert ok, worst


def test_and2_degree0_infeasible():
    res = A.adeg_feasible(F.and_n(2), 0, 1 / 3)
    assert not res.feasible
    assert res.error == pytest.approx(0.5, abs=1e-9)


def test_adeg_examples():
    assert A.adeg(F.and_n(2)) == 1
    for n in range(1, 6):
        assert A.adeg(F.xor_n(n)) == n


def test_xor_infeasible_below_full_degree():
    for n in (2, 3, 4):
        res = A.adeg_feasible(F.xor_n(n), n - 1)
        assert not res.feasible
        assert res.error >= 0.5 - 1e-9  # parity resists any lower degree


def test_feasibility_monotone_in_degree():
    rng = np.random.default_rng(66)
    for _ in range(10):
        f = random_total_fn(rng, 3)
        feasible_from = None
        for d in range(4):
            ok = A.adeg_feasible(f, d).feasible
            if feasible_from is None and ok:
                feasible_from = d
            if feasible_from is not None:
                assert ok


def test_adeg_invariant_under_negation_and_shift():
    rng = np.random.default_rng(14)
    for _ in range(8):
        f = random_total_fn(rng, 3)
        a = int(rng.integers(0, 8))
        assert A.adeg(f) == A.adeg(f.negate()) == A.adeg(f.xor_shift(a))


def test_bdeg_pror1_is_identity_degree():
    assert A.bdeg(F.pror(1)) == 1


def test_bdeg_never_exceeds_full_domain_bdeg():
    # adding domain points only adds error rows, so the optimum cannot drop
    rng = np.random.default_rng(77)
    for _ in range(50):
        n = int(rng.integers(2, 4))
        size = 1 << n
        defined = int(rng.integers(1, 1 << size))
        ext_values = int(rng.integers(0, 1 << size))
        pf = PartialFn(n, defined, ext_values & defined)
        full = PartialFn.total(n, ext_values)
        assert A.bdeg(pf) <= A.bdeg(full)


def test_bounded_degree_can_exceed_unbounded_degree_of_extension():
    # pinned instance: the best degree-1 approximation of the extension
    # leaves [0, 1], and no bounded degree-1 polynomial serves the
    # subdomain, so the bounded partial degree is strictly larger
    pf = PartialFn(3, 0b1111110, 0b0011111 & 0b1111110)
    ext = PartialFn.total(3, 0b0011111)
    assert A.adeg(ext) == 1
    assert A.bdeg(pf) == 2


def test_bdeg_restriction_monotone():
    rng = np.random.default_rng(21)
    for _ in range(20):
        pf = random_partial_fn(rng, 3)
        i = int(rng.integers(0, 3))
        b = int(rng.integers(0, 2))
        sub = pf.restrict({i: b})
        if sub.dom_size == 0:
            continue
        assert A.bdeg(sub) <= A.bdeg(pf)


def test_bdeg_witness_respects_bounds_everywhere():
    rng = np.random.default_rng(3)
    for _ in range(10):
        pf = random_partial_fn(rng, 3)
        d = A.bdeg(pf)
        res = A.bdeg_feasible(pf, d)
        assert res.feasible and res.certificate_ok
        table = res.witness.table()
        assert table.min() >= -1e-7 and table.max() <= 1 + 1e-7


def test_bdeg_pror_sweep_recorded():
    values = {n: A.bdeg(F.pror(n)) for n in range(2, 8)}
    assert values[2] == 1
    assert all(values[n] <= values[n + 1] for n in range(2, 7))
    ratios = [values[n] / math.sqrt(n) for n in sorted(values)]
    assert all(0.2 <= r <= 3.0 for r in ratios)


def test_eval_poly_examples():
    p = MultilinearPoly(2, {0b11: 1.0})
    assert A.eval_poly(p, (1, 1)) == 1
    assert A.eval_poly(p, (0.5, 0.5)) == 0.25
    assert A.eval_poly(ANALYTIC_AND2, (1, 0)) == pytest.approx(1 / 3)


def test_poly_table_matches_pointwise_eval():
    rng = np.random.default_rng(2)
    terms = {int(s): float(rng.normal()) for s in rng.integers(0, 16, size=6)}
    p = MultilinearPoly(4, terms)
    table = p.table()
    for x in range(16):
        z = [(x >> i) & 1 for i in range(4)]
        assert table[x] == pytest.approx(p.eval(z), abs=1e-12)


def test_witness_serialization_roundtrip():
    res = A.adeg_feasible(F.and_n(2), 1)
    text = res.witness.serialize()
    back = MultilinearPoly.deserialize(text, 2)
    assert back.degree == res.witness.degree
    for s, c in res.witness.terms.items():
        assert back.terms[s] == pytest.approx(c, abs=1e-9)


def test_eps_validation():
    with pytest.raises(ValueError):
        A.adeg_feasible(F.and_n(2), 1, 0.5)
    with pytest.raises(ValueError):
        A.adeg_feasible(F.and_n(2), 1, 1e-5)
    with pytest.raises(ValueError):
        A.adeg_feasible(F.pror(2), 1)  # partial needs the bounded route


def test_amplifier_fixed_points_and_shape():
    assert A.amplify_poly(1).coeffs == (0, 1)
    for m in (1, 3, 9, 15):
        amp = A.amplify_poly(m)
        assert amp.degree == m
        assert amp.eval(0.5) == pytest.approx(0.5, abs=1e-12)
        assert amp.eval(0.0) == pytest.approx(0.0, abs=1e-12)
        assert amp.eval(1.0) == pytest.approx(1.0, abs=1e-12)
        grid = np.linspace(0, 1, 101)
        vals = np.array([amp.eval(x) for x in grid])
        # the expanded monomial form carries alternating huge integer
        # coefficients, so Horner evaluation cancels down to ~1e-12 noise
        assert vals.min() >= -1e-9 and vals.max() <= 1 + 1e-9
        tails = np.array([A.amplified_value(m, x) for x in grid])
        assert tails.min() >= 0 and tails.max() <= 1


def test_amplifier_error_decay():
    a9 = A.amplify_poly(9)
    assert a9.eval(1 / 3) < 0.15
    assert a9.eval(2 / 3) > 0.85
    for m in range(1, 43, 2):
        assert A.amplified_value(m, 1 / 3) <= math.exp(-m / 36.0) + 1e-12


def test_amplifier_rejects_even_degree():
    with pytest.raises(ValueError):
        A.amplify_poly(4)


def test_amplified_value_matches_polynomial():
    for m in (1, 3, 7, 11):
        amp = A.amplify_poly(m)
        for x in (0.1, 1 / 3, 0.5, 0.9):
            assert A.amplified_value(m, x) == pytest.approx(amp.eval(x), abs=1e-10)


@pytest.mark.parametrize("k", [3, 4])
def test_sink_polynomial_pointwise(k):
    poly = A.build_sink_polynomial(k, 1 / 3)
    err = poly.max_error_on(F.sink(k))
    assert err <= 1 / 3 + 1e-9
    assert poly.degree <= k - 1


def test_sink_polynomial_degree_dominates_lp_minimum():
    poly = A.build_sink_polynomial(4, 1 / 3)
    assert poly.degree >= A.adeg(F.sink(4))


def test_sink_polynomial_rejects_large_k():
    with pytest.raises(ValueError):
        A.build_sink_polynomial(6)


def test_adeg_symmetric_matches_generic_exhaustively():
    for n in range(1, 5):
        for code in range(1, (1 << (n + 1)) - 1):
            profile = tuple((code >> w) & 1 for w in range(n + 1))
            spec = F.SymmetricSpectrum(n, profile)
            assert A.adeg_symmetric(spec) == A.adeg(F.from_spectrum(spec))


def test_adeg_symmetric_matches_generic_spot_checks_n5():
    rng = np.random.default_rng(40)
    for _ in range(12):
        code = int(rng.integers(1, (1 << 6) - 1))
        profile = tuple((code >> w) & 1 for w in range(6))
        spec = F.SymmetricSpectrum(5, profile)
        assert A.adeg_symmetric(spec) == A.adeg(F.from_spectrum(spec))


def test_minimax_optima_match_external_solver():
    scipy_opt = pytest.importorskip("scipy.optimize")
    rng = np.random.default_rng(88)

    def reference_error(f, degree, bounded):
        subsets = A.monomial_subsets(f.arity, degree)
        mono = A._monomial_matrix(f.arity, subsets)
        dom = f.defined_array().astype(bool)
        vals = f.value_array().astype(float)
        nm = len(subsets)
        rows = [
            np.hstack([-np.ones((dom.sum(), 1)), mono[dom]]),
            np.hstack([-np.ones((dom.sum(), 1)), -mono[dom]]),
        ]
        rhs = [vals[dom], -vals[dom]]
        if bounded:
            zero = np.zeros((mono.shape[0], 1))
            rows += [np.hstack([zero, mono]), np.hstack([zero, -mono])]
            rhs += [np.ones(mono.shape[0]), np.zeros(mono.shape[0])]
        c = np.zeros(1 + nm)
        c[0] = 1.0
        res = scipy_opt.linprog(
            c, A_ub=np.vstack(rows), b_ub=np.concatenate(rhs),
            bounds=[(0, None)] + [(None, None)] * nm, method="highs",
        )
        return res.fun

    for _ in range(8):
        f = random_total_fn(rng, 3)
        d = int(rng.integers(0, 3))
        mine = A.adeg_feasible(f, d).error
        assert mine == pytest.approx(reference_error(f, d, False), abs=1e-7)
        pf = random_partial_fn(rng, 3)
        mine = A.bdeg_feasible(pf, d).error
        assert mine == pytest.approx(reference_error(pf, d, True), abs=1e-7)


def test_degree_sweep_csv():
    rows = A.degree_sweep([F.or_n(n) for n in (1, 2, 3)])
    text = A.sweep_to_csv(rows)
    lines = text.strip().splitlines()
    assert lines[0] == "n,d,lp_error,wall_time"
    assert len(lines) == 4
    assert [int(line.split(",")[1]) for line in lines[1:]] == [1, 1, 1]
