"""Total and partial Boolean functions as packed bit tables.

A function on n variables is stored as two ``2**n``-bit masks held in Python
integers: ``defined`` marks the domain and ``values`` holds the outputs on it.
Variable 0 is the least significant bit of the input index, so input ``x`` with
bits ``(x_0, ..., x_{n-1})`` lives at index ``sum(x_i << i)``.  Undefined
entries of ``values`` are always zero, which makes structural equality equal
to semantic equality.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

#: Largest arity for which full truth tables may be materialized.
DEFAULT_MAX_ARITY = 24

STAR = None  # value returned for inputs outside the domain


class ArityLimitError(ValueError):
    """A table of more than ``2**max_arity`` entries was requested."""


def _check_arity(arity: int, max_arity: int = DEFAULT_MAX_ARITY) -> None:
    if not 0 <= arity:
        raise ValueError(f"arity must be non-negative, got {arity}")
    if arity > max_arity:
        raise ArityLimitError(f"arity {arity} exceeds bound {max_arity}")


def bits_to_array(bits: int, arity: int) -> np.ndarray:
    """Unpack a table integer into a uint8 array of length ``2**arity``."""
    size = 1 << arity
    nbytes = (size + 7) >> 3
    raw = bits.to_bytes(nbytes, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:size]

def array_to_bits(arr: np.ndarray) -> int:
    """Pack a 0/1 array back into a table integer."""
    packed = np.packbits(np.asarray(arr, dtype=np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")

def hamming_weights(arity: int) -> np.ndarray:
    """Popcount of every input index, as an int array of length ``2**arity``."""
    w = np.zeros(1 << arity, dtype=np.int64)
    for i in range(arity):
        w += (np.arange(1 << arity) >> i) & 1
    return w


@dataclass(frozen=True)
class PartialFn:
    """A (possibly partial) Boolean function on ``arity`` variables.

    ``defined`` and ``values`` are ``2**arity``-bit integers; bit ``x`` of
    ``values`` is meaningful only where bit ``x`` of ``defined`` is set.
    Instances are immutable; every operation returns a new function.
    """

    arity: int
    defined: int
    values: int

    def __post_init__(self) -> None:
        _check_arity(self.arity)
        full = (1 << (1 << self.arity)) - 1
        if not 0 <= self.defined <= full:
            raise ValueError("domain mask out of range for arity")
        if self.values & ~self.defined:
            raise ValueError("values set outside the domain mask")

    # -- constructors ----------------------------------------------------

    @classmethod
    def total(cls, arity: int, values: int) -> "PartialFn":
        """Total function from a table integer (all inputs defined)."""
        full = (1 << (1 << arity)) - 1
        return cls(arity, full, values & full)

    @classmethod
    def from_entries(cls, arity: int, entries: Mapping[int, int]) -> "PartialFn":
        """Partial function defined exactly on the keys of ``entries``."""
        defined = 0
        values = 0
        for x, v in entries.items():
            if not 0 <= x < (1 << arity):
                raise ValueError(f"input index {x} out of range")
            defined |= 1 << x
            if v:
                values |= 1 << x
        return cls(arity, defined, values)

    # -- basic queries ----------------------------------------------------

    @property
    def is_total(self) -> bool:
        return self.defined == (1 << (1 << self.arity)) - 1

    @property
    def dom_size(self) -> int:
        return self.defined.bit_count()

    def eval(self, x: int):
        """Value at input index ``x``: 0, 1, or ``STAR`` outside the domain."""
        if not 0 <= x < (1 << self.arity):
            raise ValueError(f"input index {x} out of range for arity {self.arity}")
        if not (self.defined >> x) & 1:
            return STAR
        return (self.values >> x) & 1

    def domain(self) -> Iterable[int]:
        """Indices in the domain, ascending."""
        d = self.defined
        while d:
            low = d & -d
            yield low.bit_length() - 1
            d ^= low

    def is_constant(self) -> bool:
        """True when the function takes at most one value on its domain."""
        return self.values == 0 or self.values == self.defined

    def value_array(self) -> np.ndarray:
        return bits_to_array(self.values, self.arity)

    def defined_array(self) -> np.ndarray:
        return bits_to_array(self.defined, self.arity)

    # -- pointwise transforms ----------------------------------------------

    def negate(self) -> "PartialFn":
        """Complement the output on the domain."""
        return PartialFn(self.arity, self.defined, self.values ^ self.defined)

    def xor_shift(self, a: int) -> "PartialFn":
        """Pre-compose with the input translation ``x -> x ^ a``."""
        if not 0 <= a < (1 << self.arity):
            raise ValueError(f"shift {a} out of range for arity {self.arity}")
        idx = np.arange(1 << self.arity) ^ a
        return PartialFn(
            self.arity,
            array_to_bits(self.defined_array()[idx]),
            array_to_bits(self.value_array()[idx]),
        )

    def permute(self, perm: Sequence[int]) -> "PartialFn":
        """Relabel variables: variable ``i`` of the result is variable
        ``perm[i]`` of ``self``."""
        if sorted(perm) != list(range(self.arity)):
            raise ValueError("perm must be a permutation of range(arity)")
        idx = np.arange(1 << self.arity)
        src = np.zeros_like(idx)
        for i, p in enumerate(perm):
            src |= ((idx >> i) & 1) << p
        return PartialFn(
            self.arity,
            array_to_bits(self.defined_array()[src]),
            array_to_bits(self.value_array()[src]),
        )

    def restrict(self, fixing: Mapping[int, int]) -> "PartialFn":
        """Fix the given variables to constants; remaining variables keep
        their relative order."""
        for i in fixing:
            if not 0 <= i < self.arity:
                raise ValueError(f"variable {i} out of range")
        free = [i for i in range(self.arity) if i not in fixing]
        base = 0
        for i, b in fixing.items():
            if b not in (0, 1):
                raise ValueError("fixed values must be bits")
            base |= b << i
        sub = np.arange(1 << len(free))
        src = np.full(1 << len(free), base)
        for j, i in enumerate(free):
            src |= ((sub >> j) & 1) << i
        return PartialFn(
            len(free),
            array_to_bits(self.defined_array()[src]),
            array_to_bits(self.value_array()[src]),
        )


def compose(
    outer: PartialFn,
    inner: Sequence[PartialFn],
    max_arity: int = DEFAULT_MAX_ARITY,
) -> PartialFn:
    """Substitute ``inner[i]`` for variable ``i`` of ``outer``.

    The composed function is undefined wherever some inner input falls outside
    its domain, or the tuple of inner outputs falls outside the outer domain.
    Inner functions may have distinct arities; inner block ``i`` occupies the
    lower-to-higher index bits in order.
    """
    if len(inner) != outer.arity:
        raise ValueError(
            f"need {outer.arity} inner functions, got {len(inner)}"
        )
    total = sum(g.arity for g in inner)
    _check_arity(total, max_arity)
    idx = np.arange(1 << total)
    outer_idx = np.zeros(1 << total, dtype=np.int64)
    all_def = np.ones(1 << total, dtype=bool)
    shift = 0
    for i, g in enumerate(inner):
        sub = (idx >> shift) & ((1 << g.arity) - 1)
        all_def &= g.defined_array()[sub].astype(bool)
        outer_idx |= g.value_array()[sub].astype(np.int64) << i
        shift += g.arity
    defined = all_def & outer.defined_array()[outer_idx].astype(bool)
    values = defined & outer.value_array()[outer_idx].astype(bool)
    return PartialFn(total, array_to_bits(defined), array_to_bits(values))


# ---------------------------------------------------------------------------
# Symmetric and junta-symmetric descriptions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymmetricSpectrum:
    """A weight profile: entry ``w`` is the value on inputs of Hamming weight
    ``w`` (0, 1, or None for undefined)."""

    arity: int
    profile: tuple

    def __post_init__(self) -> None:
        _check_arity(self.arity)
        if len(self.profile) != self.arity + 1:
            raise ValueError("profile must have arity + 1 entries")
        if any(e not in (0, 1, None) for e in self.profile):
            raise ValueError("profile entries must be 0, 1, or None")

    @property
    def is_total(self) -> bool:
        return all(e is not None for e in self.profile)

    def is_constant(self) -> bool:
        seen = {e for e in self.profile if e is not None}
        return len(seen) <= 1


@dataclass(frozen=True)
class JuntaSymmetricSpec:
    """A function of ``k`` designated variables plus the Hamming weight of the
    whole input: one weight profile per junta assignment."""

    arity: int
    junta: tuple
    table: tuple  # one SymmetricSpectrum (arity = whole-input arity) per assignment

    def __post_init__(self) -> None:
        _check_arity(self.arity)
        k = len(self.junta)
        if sorted(set(self.junta)) != sorted(self.junta):
            raise ValueError("junta variables must be distinct")
        if any(not 0 <= j < self.arity for j in self.junta):
            raise ValueError("junta variable out of range")
        if len(self.table) != 1 << k:
            raise ValueError(f"need {1 << k} spectra, got {len(self.table)}")
        for spec in self.table:
            if spec.arity != self.arity:
                raise ValueError("each spectrum must cover the whole input weight")

    def is_strongly_symmetric(self) -> bool:
        """True when some junta assignment leaves a non-constant dependence on
        the weight, restricted to the weights that assignment can reach."""
        k = len(self.junta)
        for a in range(1 << k):
            base = a.bit_count()
            reachable = self.table[a].profile[base : base + self.arity - k + 1]
            seen = {e for e in reachable if e is not None}
            if len(seen) > 1:
                return True
        return False


def from_spectrum(spec: SymmetricSpectrum) -> PartialFn:
    """Materialize a symmetric function from its weight profile."""
    w = hamming_weights(spec.arity)
    prof_def = np.array([e is not None for e in spec.profile])
    prof_val = np.array([1 if e == 1 else 0 for e in spec.profile])
    return PartialFn(
        spec.arity,
        array_to_bits(prof_def[w]),
        array_to_bits(prof_def[w] & prof_val[w].astype(bool)),
    )


def from_junta_spec(spec: JuntaSymmetricSpec) -> PartialFn:
    """Materialize a junta-symmetric function."""
    n = spec.arity
    idx = np.arange(1 << n)
    w = hamming_weights(n)
    assign = np.zeros(1 << n, dtype=np.int64)
    for pos, j in enumerate(spec.junta):
        assign |= ((idx >> j) & 1) << pos
    defined = np.zeros(1 << n, dtype=bool)
    values = np.zeros(1 << n, dtype=bool)
    for a in range(1 << len(spec.junta)):
        mask = assign == a
        prof = spec.table[a].profile
        prof_def = np.array([e is not None for e in prof])
        prof_val = np.array([e == 1 for e in prof])
        defined[mask] = prof_def[w[mask]]
        values[mask] = prof_def[w[mask]] & prof_val[w[mask]]
    return PartialFn(n, array_to_bits(defined), array_to_bits(values))


# ---------------------------------------------------------------------------
# Function zoo
# ---------------------------------------------------------------------------

def or_n(n: int) -> PartialFn:
    """OR of n variables."""
    _check_arity(n)
    return PartialFn.total(n, ((1 << (1 << n)) - 1) & ~1)

def and_n(n: int) -> PartialFn:
    """AND of n variables."""
    _check_arity(n)
    return PartialFn.total(n, 1 << ((1 << n) - 1))

def xor_n(n: int) -> PartialFn:
    """Parity of n variables."""
    _check_arity(n)
    return PartialFn.total(n, array_to_bits(hamming_weights(n) & 1))

def maj_n(n: int) -> PartialFn:
    """Strict majority of n variables (intended for odd n)."""
    _check_arity(n)
    return PartialFn.total(n, array_to_bits(2 * hamming_weights(n) > n))

def pror(n: int) -> PartialFn:
    """Promise OR: 0 on the all-zeros input, 1 on weight-one inputs,
    undefined elsewhere."""
    _check_arity(n)
    w = hamming_weights(n)
    return PartialFn(n, array_to_bits(w <= 1), array_to_bits(w == 1))

def pror_shifted(n: int, a: int) -> PartialFn:
    """Promise OR pre-composed with the translation ``x -> x ^ a``."""
    return pror(n).xor_shift(a)


def gapmaj_weights(t: int) -> tuple[int, int]:
    """Admissible promised weights for a gap-majority of arity ``t``.

    Requires ``t = 4*s*s`` with ``s >= 2`` so that ``t/2 - 2*sqrt(t)`` and
    ``t/2 + 2*sqrt(t)`` are integers inside ``[0, t]``; any other ``t`` is
    rejected rather than rounded.
    """
    if t < 16:
        raise ValueError(f"gap-majority arity must be at least 16, got {t}")
    s = math.isqrt(t // 4)
    if 4 * s * s != t or s < 2:
        raise ValueError(
            f"gap-majority arity must be 4*s^2 with s >= 2, got {t}"
        )
    half, gap = t // 2, 4 * s
    return half - gap, half + gap

def gapmaj(t: int) -> PartialFn:
    """Gap-majority: 1 at promised high weight, 0 at promised low weight,
    undefined elsewhere."""
    lo, hi = gapmaj_weights(t)
    _check_arity(t)
    w = hamming_weights(t)
    return PartialFn(t, array_to_bits((w == lo) | (w == hi)), array_to_bits(w == hi))


def mux(k: int) -> PartialFn:
    """Multiplexer on ``k + 2**k`` variables: the first k variables address
    which of the remaining ``2**k`` data variables is output."""
    n = k + (1 << k)
    _check_arity(n)
    idx = np.arange(1 << n)
    addr = idx & ((1 << k) - 1)
    out = (idx >> (k + addr)) & 1
    return PartialFn.total(n, array_to_bits(out))


def sink_edge_vars(k: int) -> list[tuple[int, int]]:
    """Edge variable order for a k-vertex tournament: pairs (i, j) with
    i < j, lexicographic; variable value 1 orients the edge i -> j."""
    return [(i, j) for i in range(k) for j in range(i + 1, k)]

def sink(k: int) -> PartialFn:
    """Tournament sink detector on ``k*(k-1)/2`` edge variables: 1 iff some
    vertex has all incident edges incoming."""
    pairs = sink_edge_vars(k)
    n = len(pairs)
    _check_arity(n)
    idx = np.arange(1 << n)
    is_sink_somewhere = np.zeros(1 << n, dtype=bool)
    for v in range(k):
        must_zero = 0  # edges v -> j (j > v) must be absent
        must_one = 0   # edges i -> v (i < v) must be present
        for e, (i, j) in enumerate(pairs):
            if i == v:
                must_zero |= 1 << e
            elif j == v:
                must_one |= 1 << e
        is_sink_somewhere |= ((idx & must_zero) == 0) & ((idx & must_one) == must_one)
    return PartialFn.total(n, array_to_bits(is_sink_somewhere))


def rub(k: int) -> PartialFn:
    """Rubinstein function on ``k*k`` variables: OR of k copies of the
    k-bit indicator of "exactly two consecutive ones"."""
    _check_arity(k * k)
    inner = 0
    for i in range(k - 1):
        inner |= 1 << (0b11 << i)
    g = PartialFn.total(k, inner)
    return compose(or_n(k), [g] * k)


ZOO = {
    "or": or_n,
    "and": and_n,
    "xor": xor_n,
    "maj": maj_n,
    "pror": pror,
    "pror_shifted": pror_shifted,
    "gapmaj": gapmaj,
    "mux": mux,
    "sink": sink,
    "rub": rub,
}

def zoo_function(name: str, *params: int) -> PartialFn:
    """Build a zoo function from its name and integer parameters."""
    if name not in ZOO:
        raise ValueError(f"unknown zoo function {name!r} (choices: {sorted(ZOO)})")
    return ZOO[name](*params)


# ---------------------------------------------------------------------------
# Function spec files
# ---------------------------------------------------------------------------

def mask_to_hex(bits: int, arity: int) -> str:
    """Bit-exact hex encoding of a table: byte 0 holds input indices 0-7,
    least significant bit first."""
    nbytes = ((1 << arity) + 7) >> 3
    return bits.to_bytes(nbytes, "little").hex()

def mask_from_hex(s: str) -> int:
    return int.from_bytes(bytes.fromhex(s), "little")


def _profile_to_str(profile) -> str:
    return "".join("*" if e is None else str(e) for e in profile)

def _profile_from_str(s: str) -> tuple:
    return tuple(None if c == "*" else int(c) for c in s)


def function_to_doc(f: PartialFn, name: str = "") -> dict:
    """JSON-serializable document for a materialized function."""
    doc = {
        "kind": "table",
        "arity": f.arity,
        "table": mask_to_hex(f.values, f.arity),
        "defined": mask_to_hex(f.defined, f.arity),
    }
    if name:
        doc["name"] = name
    return doc


def function_from_doc(doc: Mapping) -> PartialFn:
    """Parse a function spec document (kinds: table, symmetric, junta, zoo)."""
    kind = doc.get("kind", "table")
    if kind == "table":
        arity = int(doc["arity"])
        values = mask_from_hex(doc["table"])
        defined_hex = doc.get("defined")
        if defined_hex is None:
            return PartialFn.total(arity, values)
        return PartialFn(arity, mask_from_hex(defined_hex), values)
    if kind == "symmetric":
        return from_spectrum(
            SymmetricSpectrum(int(doc["arity"]), _profile_from_str(doc["profile"]))
        )
    if kind == "junta":
        arity = int(doc["arity"])
        spectra = tuple(
            SymmetricSpectrum(arity, _profile_from_str(s)) for s in doc["table"]
        )
        return from_junta_spec(
            JuntaSymmetricSpec(arity, tuple(doc["junta"]), spectra)
        )
    if kind == "zoo":
        params = doc.get("params", [])
        if isinstance(params, Mapping):
            params = list(params.values())
        return zoo_function(doc["name"], *(int(p) for p in params))
    raise ValueError(f"unknown function kind {kind!r}")


def save_function(f: PartialFn, path, name: str = "") -> None:
    with open(path, "w") as fh:
        json.dump(function_to_doc(f, name), fh, indent=2, sort_keys=True)
        fh.write("\n")

def load_function(path) -> PartialFn:
    with open(path) as fh:
        return function_from_doc(json.load(fh))
