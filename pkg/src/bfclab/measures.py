"""Exact combinatorial complexity measures.

Sensitivity, block sensitivity and its LP relaxation, exact multilinear
degree, decision-tree depth, and the flip-position parameter of symmetric
functions.  Block sensitivity enumerates minimal sensitive blocks per input
(a maximum disjoint packing over all sensitive blocks can always be retracted
to minimal ones, and a minimal sub-block never carries a larger per-index
load, so minimal blocks also suffice as LP columns; ``tests/test_measures.py``
checks this against the all-blocks LP at small arity).

Flips that leave the domain of a partial function do not count as sensitive.
Witnesses are tie-broken toward the smallest input index and then the
lexicographically smallest block encoding, so reports are reproducible.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from . import linprog
from .functions import ArityLimitError, PartialFn, SymmetricSpectrum

#: Default cap for the exponential searches (block packing, tree depth).
DEFAULT_SEARCH_ARITY = 14


def _check_search_arity(f: PartialFn, max_arity: int) -> None:
    if f.arity > max_arity:
        raise ArityLimitError(
            f"arity {f.arity} exceeds the search bound {max_arity}"
        )


# ---------------------------------------------------------------------------
# Sensitivity
# ---------------------------------------------------------------------------

def sensitivity_at(f: PartialFn, x: int) -> int:
    """Number of single-bit flips of ``x`` that stay in the domain and change
    the value."""
    if f.eval(x) is None:
        raise ValueError(f"input {x} outside the domain")
    count = 0
    for i in range(f.arity):
        y = f.eval(x ^ (1 << i))
        if y is not None and y != f.eval(x):
            count += 1
    return count


def sensitivity(f: PartialFn) -> int:
    value, _ = sensitivity_witness(f)
    return value


def sensitivity_witness(f: PartialFn) -> tuple[int, int | None]:
    """Maximum sensitivity and the smallest input achieving it."""
    vals = f.value_array().astype(np.int8)
    dom = f.defined_array().astype(bool)
    idx = np.arange(1 << f.arity)
    counts = np.zeros(1 << f.arity, dtype=np.int64)
    for i in range(f.arity):
        flip = idx ^ (1 << i)
        counts += dom & dom[flip] & (vals != vals[flip])
    counts[~dom] = -1
    best = int(counts.max())
    if best < 0:
        return 0, None  # empty domain
    return best, int(np.argmax(counts == best))


# ---------------------------------------------------------------------------
# Block sensitivity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BlockFamily:
    """A witness family of sensitive blocks at a base input.

    Blocks are variable-index bitmasks; integral families have all weights 1
    and pairwise disjoint blocks, fractional families satisfy a per-index
    load of at most 1.
    """

    input: int
    blocks: tuple
    weights: tuple

    @property
    def total_weight(self) -> float:
        return float(sum(self.weights))

    def validate(self, f: PartialFn) -> None:
        base = f.eval(self.input)
        if base is None:
            raise ValueError("base input outside the domain")
        for b, p in zip(self.blocks, self.weights):
            if not 0 < p <= 1:
                raise ValueError(f"block weight {p} outside (0, 1]")
            flipped = f.eval(self.input ^ b)
            if flipped is None or flipped == base:
                raise ValueError(f"block {b:#x} is not sensitive")
        for i in range(f.arity):
            load = sum(p for b, p in zip(self.blocks, self.weights) if (b >> i) & 1)
            if load > 1 + 1e-9:
                raise ValueError(f"variable {i} overloaded: {load}")


def minimal_sensitive_blocks(f: PartialFn, x: int) -> list[int]:
    """Inclusion-minimal variable sets whose flip changes ``f`` at ``x``,
    ascending by (size, mask)."""
    if f.eval(x) is None:
        raise ValueError(f"input {x} outside the domain")
    vals = f.value_array()
    dom = f.defined_array().astype(bool)
    flips = x ^ np.arange(1 << f.arity)
    sensitive = dom[flips] & (vals[flips] != vals[x]) & dom[x]
    candidates = np.nonzero(sensitive)[0]
    candidates = sorted(int(b) for b in candidates if b)
    candidates.sort(key=lambda b: (b.bit_count(), b))
    minimal: list[int] = []
    for b in candidates:
        if not any(m & b == m for m in minimal):
            minimal.append(b)
    return minimal


def max_disjoint_packing(blocks: list[int]) -> list[int]:
    """Largest pairwise-disjoint subfamily, by exhaustive branch and bound.
    Blocks are scanned in ascending order, include-first, so the first
    maximum found is the lexicographically smallest one."""
    blocks = sorted(blocks)
    best: list[int] = []

    def walk(i: int, used: int, chosen: list[int]) -> None:
        nonlocal best
        if len(chosen) + len(blocks) - i <= len(best):
            return
        if i == len(blocks):
            if len(chosen) > len(best):
                best = list(chosen)
            return
        b = blocks[i]
        if not used & b:
            chosen.append(b)
            walk(i + 1, used | b, chosen)
            chosen.pop()
        walk(i + 1, used, chosen)

    walk(0, 0, [])
    return best


def block_sensitivity_at(f: PartialFn, x: int,
                         max_arity: int = DEFAULT_SEARCH_ARITY) -> BlockFamily:
    _check_search_arity(f, max_arity)
    packing = max_disjoint_packing(minimal_sensitive_blocks(f, x))
    return BlockFamily(x, tuple(packing), (1.0,) * len(packing))


def block_sensitivity_witness(f: PartialFn,
                              max_arity: int = DEFAULT_SEARCH_ARITY) -> BlockFamily:
    """Global maximum over the domain; smallest achieving input wins ties."""
    _check_search_arity(f, max_arity)
    best: BlockFamily | None = None
    for x in f.domain():
        fam = block_sensitivity_at(f, x, max_arity)
        if best is None or len(fam.blocks) > len(best.blocks):
            best = fam
    if best is None:
        return BlockFamily(0, (), ())
    return best


def block_sensitivity(f: PartialFn, x: int | None = None,
                      max_arity: int = DEFAULT_SEARCH_ARITY) -> int:
    if x is not None:
        return len(block_sensitivity_at(f, x, max_arity).blocks)
    return len(block_sensitivity_witness(f, max_arity).blocks)


# ---------------------------------------------------------------------------
# Fractional block sensitivity
# ---------------------------------------------------------------------------

def fbs_program(blocks: list[int], arity: int) -> linprog.LinearProgram:
    """Weight-packing LP: maximize the total block weight subject to a unit
    load on every variable."""
    nb = len(blocks)
    touched = [i for i in range(arity) if any((b >> i) & 1 for b in blocks)]
    rows = np.zeros((len(touched), nb))
    for r, i in enumerate(touched):
        for j, b in enumerate(blocks):
            if (b >> i) & 1:
                rows[r, j] = 1.0
    return linprog.LinearProgram.build(
        objective=np.ones(nb),
        maximize=True,
        rows=rows,
        relations=[linprog.LE] * len(touched),
        rhs=np.ones(len(touched)),
        lower=np.zeros(nb),
        upper=np.ones(nb),
    )


def fractional_block_sensitivity_at(
    f: PartialFn, x: int, max_arity: int = DEFAULT_SEARCH_ARITY
) -> BlockFamily:
    _check_search_arity(f, max_arity)
    blocks = minimal_sensitive_blocks(f, x)
    if not blocks:
        return BlockFamily(x, (), ())
    outcome = linprog.solve(fbs_program(blocks, f.arity))
    if not outcome.optimal:
        raise linprog.SimplexError(f"fbs LP ended {outcome.status}")
    keep = [
        (b, min(float(p), 1.0))
        for b, p in zip(blocks, outcome.solution)
        if p > 1e-12
    ]
    return BlockFamily(x, tuple(b for b, _ in keep), tuple(p for _, p in keep))


def fractional_block_sensitivity(
    f: PartialFn, x: int | None = None, max_arity: int = DEFAULT_SEARCH_ARITY
) -> float:
    if x is not None:
        return fractional_block_sensitivity_at(f, x, max_arity).total_weight
    return fractional_block_sensitivity_witness(f, max_arity).total_weight


def fractional_block_sensitivity_witness(
    f: PartialFn, max_arity: int = DEFAULT_SEARCH_ARITY
) -> BlockFamily:
    _check_search_arity(f, max_arity)
    best: BlockFamily | None = None
    for x in f.domain():
        fam = fractional_block_sensitivity_at(f, x, max_arity)
        if best is None or fam.total_weight > best.total_weight + 1e-9:
            best = fam
    if best is None:
        return BlockFamily(0, (), ())
    return best


# ---------------------------------------------------------------------------
# Exact degree and decision-tree depth
# ---------------------------------------------------------------------------

def multilinear_coefficients(f: PartialFn) -> np.ndarray:
    """Integer coefficients of the unique multilinear representation, indexed
    by variable-subset bitmask (inclusion-exclusion over sub-inputs)."""
    if not f.is_total:
        raise ValueError("exact degree requires a total function")
    coeffs = f.value_array().astype(np.int64)
    n = f.arity
    for i in range(n):
        step = 1 << i
        view = coeffs.reshape(-1, 2 * step)
        view[:, step:] -= view[:, :step]
    return coeffs


def exact_degree(f: PartialFn) -> int:
    """Degree of the unique multilinear representation of a total function."""
    coeffs = multilinear_coefficients(f)
    nz = np.nonzero(coeffs)[0]
    if len(nz) == 0:
        return 0
    return max(int(s).bit_count() for s in nz)


def decision_tree_depth(f: PartialFn, max_arity: int = DEFAULT_SEARCH_ARITY) -> int:
    """Exact deterministic query complexity, by memoized recursion over
    one-variable restrictions.  Undefined inputs constrain nothing."""
    _check_search_arity(f, max_arity)
    memo: dict = {}

    def depth(arity: int, defined: int, values: int) -> int:
        if values == 0 or values == defined:
            return 0
        key = (arity, defined, values)
        hit = memo.get(key)
        if hit is not None:
            return hit
        best = arity
        half = 1 << (arity - 1)
        low_mask = (1 << half) - 1
        for i in range(arity):
            d0 = v0 = d1 = v1 = 0
            # split the table on variable i by regrouping index bits
            if i == arity - 1:
                d0, d1 = defined & low_mask, defined >> half
                v0, v1 = values & low_mask, values >> half
            else:
                step = 1 << i
                pos = 0
                dd, vv = defined, values
                chunk = (1 << step) - 1
                while dd or vv:
                    d0 |= (dd & chunk) << pos
                    v0 |= (vv & chunk) << pos
                    dd >>= step
                    vv >>= step
                    d1 |= (dd & chunk) << pos
                    v1 |= (vv & chunk) << pos
                    dd >>= step
                    vv >>= step
                    pos += step
            cand = 1 + max(depth(arity - 1, d0, v0), depth(arity - 1, d1, v1))
            if cand < best:
                best = cand
                if best == 1:
                    break
        memo[key] = best
        return best

    if f.arity == 0:
        return 0
    return depth(f.arity, f.defined, f.values)


# ---------------------------------------------------------------------------
# Symmetric flip-position parameter
# ---------------------------------------------------------------------------

def paturi_gamma(spec: SymmetricSpectrum) -> int:
    """Distance parameter of a non-constant total symmetric function: over
    weights ``k`` where the profile changes between ``k`` and ``k+1``, the
    largest value of ``min(k, n-k)``.

    This equals the usual "flip position nearest n/2" form: candidates
    equidistant from n/2 on either side give the same value.
    """
    if not spec.is_total:
        raise ValueError("flip parameter requires a total symmetric function")
    if spec.is_constant():
        raise ValueError("flip parameter undefined for constant functions")
    n = spec.arity
    flips = [k for k in range(n) if spec.profile[k] != spec.profile[k + 1]]
    return max(min(k, n - k) for k in flips)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

CSV_FIELDS = ("name", "n", "s", "bs", "fbs", "deg", "D")


@dataclass
class MeasureReport:
    """Per-function record of the exact measures.  ``bs``/``fbs``/``depth``
    are None when the arity exceeds the search bound, ``deg`` is None for
    partial functions."""

    name: str
    arity: int
    s: int
    bs: int | None
    fbs: float | None
    deg: int | None
    depth: int | None
    bs_witness: BlockFamily | None = None
    fbs_witness: BlockFamily | None = None

    def __post_init__(self) -> None:
        if self.bs is not None and self.s > self.bs:
            raise ValueError("sensitivity exceeds block sensitivity")
        if (
            self.bs is not None
            and self.fbs is not None
            and self.bs > self.fbs + 1e-9
        ):
            raise ValueError("block sensitivity exceeds its LP relaxation")

    def csv_row(self) -> dict:
        return {
            "name": self.name,
            "n": self.arity,
            "s": self.s,
            "bs": "" if self.bs is None else self.bs,
            "fbs": "" if self.fbs is None else f"{self.fbs:.6f}",
            "deg": "" if self.deg is None else self.deg,
            "D": "" if self.depth is None else self.depth,
        }

    def json_doc(self) -> dict:
        doc = {
            "name": self.name,
            "n": self.arity,
            "s": self.s,
            "bs": self.bs,
            "fbs": self.fbs,
            "deg": self.deg,
            "D": self.depth,
        }
        if self.bs_witness is not None:
            doc["bs_witness"] = {
                "input": self.bs_witness.input,
                "blocks": list(self.bs_witness.blocks),
            }
        if self.fbs_witness is not None:
            doc["fbs_witness"] = {
                "input": self.fbs_witness.input,
                "blocks": list(self.fbs_witness.blocks),
                "weights": list(self.fbs_witness.weights),
            }
        return doc


def measure_function(
    f: PartialFn, name: str = "", max_arity: int = DEFAULT_SEARCH_ARITY
) -> MeasureReport:
    """Compute every measure that fits within the search bound."""
    s, _ = sensitivity_witness(f)
    bs_fam = fbs_fam = None
    depth = None
    if f.arity <= max_arity:
        bs_fam = block_sensitivity_witness(f, max_arity)
        fbs_fam = fractional_block_sensitivity_witness(f, max_arity)
        depth = decision_tree_depth(f, max_arity)
    return MeasureReport(
        name=name,
        arity=f.arity,
        s=s,
        bs=None if bs_fam is None else len(bs_fam.blocks),
        fbs=None if fbs_fam is None else fbs_fam.total_weight,
        deg=exact_degree(f) if f.is_total else None,
        depth=depth,
        bs_witness=bs_fam,
        fbs_witness=fbs_fam,
    )


def reports_to_csv(reports) -> str:
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=CSV_FIELDS)
    writer.writeheader()
    for rep in reports:
        writer.writerow(rep.csv_row())
    return out.getvalue()


def reports_to_json(reports) -> str:
    return json.dumps([rep.json_doc() for rep in reports], indent=2) + "\n"
