"""Approximate degree via minimax-error linear programs.

For a target degree d the coefficients of all monomials of size <= d are LP
variables and the maximum pointwise error is minimized; the degree-d
feasibility question is whether that optimum stays within the error budget.
For partial functions the error rows cover only the domain while bounding
rows keep the polynomial inside [0, 1] on the whole cube.  Every witness is
re-verified against the original program before it is returned.

Feasibility at exactly the error budget counts as feasible (the budget is a
non-strict bound, and e.g. the degree-1 approximation of AND_2 sits exactly
on it); a 1e-7 tolerance absorbs float noise.  Degree answers are integers
decided by gaps far larger than that.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import linprog
from .functions import PartialFn, SymmetricSpectrum

DEFAULT_EPS = 1.0 / 3.0
FEAS_SLACK = 1e-7


class PolynomialVerificationError(Exception):
    """A constructed approximating polynomial failed its pointwise check."""


# ---------------------------------------------------------------------------
# Polynomial containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MultilinearPoly:
    """Real multilinear polynomial; ``terms`` maps variable-subset bitmasks
    to coefficients."""

    arity: int
    terms: dict

    @property
    def degree(self) -> int:
        sizes = [int(s).bit_count() for s, c in self.terms.items() if c != 0]
        return max(sizes, default=0)

    def eval(self, z) -> float:
        """Evaluate at a real point (exact on Boolean points)."""
        if len(z) != self.arity:
            raise ValueError("point dimension mismatch")
        total = 0.0
        for s, c in self.terms.items():
            prod = c
            mask = s
            while mask:
                low = mask & -mask
                prod *= z[low.bit_length() - 1]
                mask ^= low
            total += prod
        return total

    def table(self) -> np.ndarray:
        """Values on all Boolean points, via the subset-sum transform."""
        arr = np.zeros(1 << self.arity)
        for s, c in self.terms.items():
            arr[s] += c
        for i in range(self.arity):
            step = 1 << i
            view = arr.reshape(-1, 2 * step)
            view[:, step:] += view[:, :step]
        return arr

    def max_error_on(self, f: PartialFn) -> float:
        """Largest deviation from ``f`` over the domain."""
        if f.arity != self.arity:
            raise ValueError("arity mismatch")
        dom = f.defined_array().astype(bool)
        diff = np.abs(self.table() - f.value_array())[dom]
        return float(diff.max()) if diff.size else 0.0

    def serialize(self) -> str:
        """One term per line: subset bitmask and fixed-point coefficient."""
        lines = [
            f"{s} {c:.12f}"
            for s, c in sorted(self.terms.items())
            if c != 0 or s == 0
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def deserialize(cls, text: str, arity: int) -> "MultilinearPoly":
        terms = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            s, c = line.split()
            terms[int(s)] = float(c)
        return cls(arity, terms)


def eval_poly(p: MultilinearPoly, z) -> float:
    return p.eval(z)


@dataclass(frozen=True)
class UnivariatePoly:
    """Dense univariate polynomial, coefficient of x^i at index i."""

    coeffs: tuple

    @property
    def degree(self) -> int:
        deg = 0
        for i, c in enumerate(self.coeffs):
            if c != 0:
                deg = i
        return deg

    def eval(self, x):
        total = 0
        for c in reversed(self.coeffs):
            total = total * x + c
        return total


# ---------------------------------------------------------------------------
# Minimax LPs
# ---------------------------------------------------------------------------

def monomial_subsets(arity: int, degree: int) -> list[int]:
    """All variable subsets of size <= degree, ascending by (size, mask)."""
    subsets = []
    for size in range(degree + 1):
        masks = []
        for combo in combinations(range(arity), size):
            m = 0
            for i in combo:
                m |= 1 << i
            masks.append(m)
        subsets.extend(sorted(masks))
    return subsets


def _monomial_matrix(arity: int, subsets) -> np.ndarray:
    idx = np.arange(1 << arity)
    cols = [((idx & s) == s).astype(float) for s in subsets]
    return np.stack(cols, axis=1)


def _minimax_rows(mono, vals, err_points, bound_points, nm):
    """Constraint block for the given point subsets, in the slack form
    ``e = 1 - slack`` whose origin is feasible (no artificial phase)."""
    rows = []
    rhs = []
    m_err = mono[err_points]
    v_err = vals[err_points]
    one = np.ones((len(err_points), 1))
    # p(x) - f(x) <= e  and  f(x) - p(x) <= e
    rows.append(np.hstack([one, m_err, -m_err]))
    rhs.append(v_err + 1.0)
    rows.append(np.hstack([one, -m_err, m_err]))
    rhs.append(1.0 - v_err)
    if len(bound_points):
        m_b = mono[bound_points]
        zero = np.zeros((len(bound_points), 1))
        rows.append(np.hstack([zero, m_b, -m_b]))
        rhs.append(np.ones(len(bound_points)))
        rows.append(np.hstack([zero, -m_b, m_b]))
        rhs.append(np.zeros(len(bound_points)))
    cap = np.zeros((1, 1 + 2 * nm))
    cap[0, 0] = 1.0
    rows.append(cap)
    rhs.append(np.array([1.0]))
    return np.vstack(rows), np.concatenate(rhs)


def _minimax_lp(mono, vals, err_points, bound_points, nm):
    rows, rhs = _minimax_rows(mono, vals, err_points, bound_points, nm)
    objective = np.zeros(1 + 2 * nm)
    objective[0] = 1.0
    return linprog.LinearProgram.build(
        objective=objective,
        maximize=True,
        rows=rows,
        relations=[linprog.LE] * len(rhs),
        rhs=rhs,
        lower=np.zeros(1 + 2 * nm),
    )


def _minimax_program(f: PartialFn, degree: int, bounded: bool):
    """Full minimax LP over every point (used directly when small, and as
    the certificate target always)."""
    subsets = monomial_subsets(f.arity, degree)
    mono = _monomial_matrix(f.arity, subsets)
    dom = np.nonzero(f.defined_array())[0]
    vals = f.value_array().astype(float)
    bound_points = np.arange(1 << f.arity) if bounded else np.arange(0)
    lp = _minimax_lp(mono, vals, dom, bound_points, len(subsets))
    return lp, subsets


def _witness_from_solution(subsets, solution, arity: int) -> MultilinearPoly:
    nm = len(subsets)
    coeffs = solution[1 : 1 + nm] - solution[1 + nm :]
    terms = {s: float(c) for s, c in zip(subsets, coeffs) if abs(c) > 1e-12}
    if not terms:
        terms = {0: 0.0}
    return MultilinearPoly(arity, terms)


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    error: float
    witness: MultilinearPoly
    certificate_ok: bool


_DIRECT_POINT_LIMIT = 256      # solve the full LP when the cube is this small
_CUT_BATCH = 64                # violated points added per exchange round
_CUT_ROUNDS = 80


def _minimax_solve(f: PartialFn, degree: int, eps: float, bounded: bool):
    """Minimize the worst approximation error at a fixed degree.

    Small instances solve the full program directly.  Large ones run an
    exchange loop: solve on an active subset of points, re-measure the
    returned polynomial on every point, and pull the worst offenders into
    the subset until nothing is violated; the subset optimum is then a
    certified global optimum (the subset value never exceeds the full one).
    Either way the witness is re-checked against the full program.
    """
    subsets = monomial_subsets(f.arity, degree)
    nm = len(subsets)
    mono = _monomial_matrix(f.arity, subsets)
    dom = np.nonzero(f.defined_array())[0]
    vals = f.value_array().astype(float)
    all_bounds = np.arange(1 << f.arity) if bounded else np.arange(0)

    if (1 << f.arity) <= _DIRECT_POINT_LIMIT:
        lp = _minimax_lp(mono, vals, dom, all_bounds, nm)
        outcome = linprog.solve(lp)
        if not outcome.optimal:
            raise linprog.SimplexError(f"minimax LP ended {outcome.status}")
        error = 1.0 - outcome.value
        cert_ok, _ = linprog.check_certificate(lp, outcome.solution)
        witness = _witness_from_solution(subsets, outcome.solution, f.arity)
        return FeasibilityResult(
            error <= eps + FEAS_SLACK, error, witness, cert_ok
        )

    seed = np.unique(
        np.linspace(0, len(dom) - 1, min(len(dom), 4 * nm + 8)).astype(int)
    )
    err_pts = dom[seed]
    bound_pts = err_pts if bounded else np.arange(0)
    solution = None
    for _ in range(_CUT_ROUNDS):
        lp = _minimax_lp(mono, vals, err_pts, bound_pts, nm)
        outcome = linprog.solve(lp)
        if not outcome.optimal:
            raise linprog.SimplexError(f"minimax LP ended {outcome.status}")
        solution = outcome.solution
        witness = _witness_from_solution(subsets, solution, f.arity)
        table = witness.table()
        sub_error = 1.0 - outcome.value
        deviation = np.abs(table[dom] - vals[dom])
        err_viol = deviation - (sub_error + 1e-12)
        order = np.argsort(err_viol)[::-1][:_CUT_BATCH]
        new_err = dom[order[err_viol[order] > 0]]
        new_bound = np.arange(0)
        if bounded:
            excess = np.maximum(table - 1.0, -table) - 1e-12
            order = np.argsort(excess)[::-1][:_CUT_BATCH]
            new_bound = order[excess[order] > 0]
        if len(new_err) == 0 and len(new_bound) == 0:
            full_lp = _minimax_lp(mono, vals, dom, all_bounds, nm)
            cert_ok, _ = linprog.check_certificate(full_lp, solution)
            error = float(deviation.max()) if len(deviation) else 0.0
            return FeasibilityResult(
                error <= eps + FEAS_SLACK, error, witness, cert_ok
            )
        err_pts = np.unique(np.concatenate([err_pts, new_err]))
        if bounded:
            bound_pts = np.unique(np.concatenate([bound_pts, new_bound]))
    raise linprog.SimplexError("exchange loop did not converge")


def adeg_feasible(f: PartialFn, degree: int, eps: float = DEFAULT_EPS):
    """Is there a degree-``degree`` polynomial within ``eps`` of ``f`` on the
    whole cube?  Requires a total function."""
    _check_eps(eps)
    if not f.is_total:
        raise ValueError("use bdeg_feasible for partial functions")
    if not 0 <= degree <= f.arity:
        raise ValueError("degree out of range")
    return _minimax_solve(f, degree, eps, bounded=False)


def bdeg_feasible(f: PartialFn, degree: int, eps: float = DEFAULT_EPS):
    """Like adeg_feasible but errors count on the domain only, while the
    polynomial must stay within [0, 1] on every Boolean point."""
    _check_eps(eps)
    if not 0 <= degree <= f.arity:
        raise ValueError("degree out of range")
    if f.dom_size == 0:
        raise ValueError("function has empty domain")
    return _minimax_solve(f, degree, eps, bounded=True)


def _check_eps(eps: float) -> None:
    if not 1e-4 <= eps < 0.5:
        raise ValueError(f"error budget must lie in [1e-4, 1/2), got {eps}")


def adeg(f: PartialFn, eps: float = DEFAULT_EPS) -> int:
    """Minimum degree approximating a total function within ``eps``: linear
    scan from 0 (feasibility is monotone in the degree; asserted in tests,
    not presumed here)."""
    for d in range(f.arity + 1):
        if adeg_feasible(f, d, eps).feasible:
            return d
    raise AssertionError("full degree must be feasible")


def bdeg(f: PartialFn, eps: float = DEFAULT_EPS) -> int:
    """Minimum degree of a [0, 1]-bounded polynomial within ``eps`` on the
    domain of a partial function."""
    for d in range(f.arity + 1):
        if bdeg_feasible(f, d, eps).feasible:
            return d
    raise AssertionError("full degree must be feasible")


# ---------------------------------------------------------------------------
# Symmetric fast path
# ---------------------------------------------------------------------------

def adeg_symmetric(spec: SymmetricSpectrum, eps: float = DEFAULT_EPS) -> int:
    """Approximate degree of a total symmetric function via its weight
    profile.

    Averaging an approximating polynomial over all variable permutations
    keeps the error and the degree and leaves a polynomial whose value
    depends only on |x| through binomial counts, so the full monomial LP
    collapses to one coefficient per degree; tests check agreement with the
    generic LP at small arity.
    """
    _check_eps(eps)
    if not spec.is_total:
        raise ValueError("symmetric fast path requires a total profile")
    n = spec.arity
    vals = np.array([float(v) for v in spec.profile])
    weights = np.arange(n + 1)
    for d in range(n + 1):
        basis = np.stack(
            [np.array([math.comb(w, j) for w in weights], float) for j in range(d + 1)],
            axis=1,
        )
        one = np.ones((n + 1, 1))
        rows = np.vstack(
            [
                np.hstack([one, basis, -basis]),
                np.hstack([one, -basis, basis]),
                np.eye(1, 2 * (d + 1) + 1),
            ]
        )
        rhs = np.concatenate([vals + 1.0, 1.0 - vals, [1.0]])
        lp = linprog.LinearProgram.build(
            objective=np.eye(1, 2 * (d + 1) + 1)[0],
            maximize=True,
            rows=rows,
            relations=[linprog.LE] * len(rhs),
            rhs=rhs,
            lower=np.zeros(2 * (d + 1) + 1),
        )
        outcome = linprog.solve(lp)
        if not outcome.optimal:
            raise linprog.SimplexError(f"symmetric LP ended {outcome.status}")
        if 1.0 - outcome.value <= eps + FEAS_SLACK:
            return d
    raise AssertionError("full degree must be feasible")


# ---------------------------------------------------------------------------
# Amplification
# ---------------------------------------------------------------------------

def amplify_poly(m: int) -> UnivariatePoly:
    """Majority-counting amplifier of odd degree m: the probability that a
    coin of heads-probability x wins a best-of-m vote.  Maps [0,1] to [0,1],
    fixes 1/2, and pushes values near {0,1} exponentially closer."""
    if m < 1 or m % 2 == 0:
        raise ValueError(f"amplifier degree must be odd and positive, got {m}")
    coeffs = [0] * (m + 1)
    for j in range((m + 1) // 2, m + 1):
        base = math.comb(m, j)
        # expand x^j (1-x)^(m-j)
        for i in range(m - j + 1):
            coeffs[j + i] += base * math.comb(m - j, i) * (-1) ** i
    return UnivariatePoly(tuple(coeffs))


def amplified_value(m: int, x: Fraction | float):
    """A_m(x) evaluated through the binomial tail (numerically stable and
    exact on Fractions)."""
    one = Fraction(1) if isinstance(x, Fraction) else 1.0
    return sum(
        math.comb(m, j) * x**j * (one - x) ** (m - j)
        for j in range((m + 1) // 2, m + 1)
    )


# ---------------------------------------------------------------------------
# Constructive approximation of the tournament sink detector
# ---------------------------------------------------------------------------

def _multilinear_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for sa, ca in a.items():
        for sb, cb in b.items():
            key = sa | sb
            out[key] = out.get(key, 0.0) + ca * cb
    return out


def _compose_univariate(amp: UnivariatePoly, inner: dict) -> dict:
    """amp(inner) reduced modulo x_i^2 = x_i."""
    result = {0: float(amp.coeffs[-1])}
    for c in reversed(amp.coeffs[:-1]):
        result = _multilinear_mul(result, inner)
        result[0] = result.get(0, 0.0) + float(c)
    return result


def _substitute_literals(terms: dict, var_map: list) -> dict:
    """Replace base variable i by ``x_e`` or ``1 - x_e`` per ``var_map``
    entries (edge, negated)."""
    out = {0: 0.0}
    for s, c in terms.items():
        partial = {0: c}
        mask = s
        while mask:
            low = mask & -mask
            i = low.bit_length() - 1
            mask ^= low
            e, negated = var_map[i]
            lit = {1 << e: -1.0, 0: 1.0} if negated else {1 << e: 1.0}
            partial = _multilinear_mul(partial, lit)
        for k, v in partial.items():
            out[k] = out.get(k, 0.0) + v
    return {k: v for k, v in out.items() if v != 0.0} or {0: 0.0}


def build_sink_polynomial(k: int, eps: float = DEFAULT_EPS) -> MultilinearPoly:
    """Explicit low-degree approximation of the k-vertex sink detector.

    Since a tournament has at most one sink, the detector equals the plain
    sum over vertices of the (k-1)-literal indicator "all incident edges
    point in".  Each indicator is approximated by a bounded low-degree
    polynomial for the (k-1)-variable AND, sharpened by a majority-vote
    amplifier until its error is below eps/k, and the per-vertex copies are
    summed.  The result is verified pointwise over the full cube; failure
    raises instead of returning silently.
    """
    from .functions import and_n, sink, sink_edge_vars

    if not 2 <= k <= 5:
        raise ValueError(f"sink construction supports 2 <= k <= 5, got {k}")
    _check_eps(eps)

    base_fn = and_n(k - 1)
    base = None
    for d in range(1, k):
        res = bdeg_feasible(base_fn, d, DEFAULT_EPS)
        if res.feasible:
            base = res
            break
    if base is None:
        base = bdeg_feasible(base_fn, k - 1, DEFAULT_EPS)
    base_err = max(base.error, 1e-12)

    target = eps / k * (1.0 - 1e-6)
    m = 1
    while amplified_value(m, base_err) > target:
        m += 2
        if m > 401:
            raise PolynomialVerificationError(
                "amplifier degree search did not converge"
            )
    amp = amplify_poly(m)

    pairs = sink_edge_vars(k)
    total: dict = {}
    for v in range(k):
        var_map = []
        for e, (i, j) in enumerate(pairs):
            if i == v:
                var_map.append((e, True))   # edge must point into v: x_e = 0
            elif j == v:
                var_map.append((e, False))  # x_e = 1 orients i -> v
        assert len(var_map) == k - 1
        inner = _substitute_literals(base.witness.terms, var_map)
        vertex_poly = _compose_univariate(amp, inner)
        for s, c in vertex_poly.items():
            total[s] = total.get(s, 0.0) + c

    poly = MultilinearPoly(len(pairs), {s: c for s, c in total.items() if c != 0.0})
    worst = poly.max_error_on(sink(k))
    if worst > eps + 1e-9:
        raise PolynomialVerificationError(
            f"sink approximation error {worst} exceeds budget {eps}"
        )
    return poly


# ---------------------------------------------------------------------------
# Degree sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    n: int
    degree: int
    lp_error: float
    wall_time: float


def degree_sweep(functions, eps: float = DEFAULT_EPS, bounded: bool = False):
    """Minimum feasible degree per function, with the achieved LP error and
    wall time; rows are CSV-ready via :func:`sweep_to_csv`."""
    rows = []
    for f in functions:
        start = time.perf_counter()
        solver = bdeg_feasible if bounded or not f.is_total else adeg_feasible
        for d in range(f.arity + 1):
            res = solver(f, d, eps)
            if res.feasible:
                rows.append(
                    SweepRow(f.arity, d, res.error, time.perf_counter() - start)
                )
                break
    return rows


def sweep_to_csv(rows) -> str:
    lines = ["n,d,lp_error,wall_time"]
    for r in rows:
        lines.append(f"{r.n},{r.degree},{r.lp_error:.9f},{r.wall_time:.4f}")
    return "\n".join(lines) + "\n"
