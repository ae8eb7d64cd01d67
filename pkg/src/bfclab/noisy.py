"""Noisy-oracle computation with squared-bias cost accounting.

A noisy query to a hidden bit takes a bias ``gamma`` and returns the true bit
with probability ``(1 + gamma) / 2``, at cost ``gamma**2``.  This module
provides the oracle itself, exact majority-vote bias amplification, the
biased-random-walk generator that turns one coin of a carefully chosen bias
into a whole run of low-bias coins, and the reduction that compiles a
two-bias noisy algorithm into a standard query algorithm for the same
function composed with gap-majority inner functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .functions import PartialFn, gapmaj_weights

MAX_WALK_STEPS = 10_000_000
GAMMA_HAT_CAP = 0.1  # admissibility cap for the walk-based generator


class WalkStepCapExceeded(RuntimeError):
    """A single conditioned-walk sample exceeded the step cap."""


# ---------------------------------------------------------------------------
# The oracle
# ---------------------------------------------------------------------------

@dataclass
class TranscriptEntry:
    index: int
    gamma: float
    bit: int
    cumulative_cost: float


class NoisyOracle:
    """Noisy access to a hidden bit string.

    Each query is answered independently: the true bit with probability
    ``(1 + gamma) / 2``.  The ledger accumulates ``gamma**2`` per query, in
    query order, so replaying a seed reproduces it bit for bit.
    """

    def __init__(self, bits, rng, record: bool = False):
        self.bits = np.asarray(bits, dtype=np.uint8)
        self.rng = rng
        self.cost = 0.0
        self.queries = 0
        self.transcript: list[TranscriptEntry] | None = [] if record else None

    def query(self, i: int, gamma: float) -> int:
        return int(self.query_many(i, gamma, 1)[0])

    def query_many(self, i: int, gamma: float, count: int) -> np.ndarray:
        if not 0 <= i < len(self.bits):
            raise ValueError(f"index {i} out of range")
        if not -1.0 <= gamma <= 1.0:
            raise ValueError(f"bias {gamma} outside [-1, 1]")
        truthful = self.rng.random(count) < (1.0 + gamma) / 2.0
        out = np.where(truthful, self.bits[i], 1 - self.bits[i]).astype(np.uint8)
        for b in out:
            self.cost += gamma * gamma
            self.queries += 1
            if self.transcript is not None:
                self.transcript.append(
                    TranscriptEntry(i, gamma, int(b), self.cost)
                )
        return out


def format_transcript(entries) -> str:
    """Structured text log, one line per query."""
    lines = [
        f"query index={e.index} gamma={e.gamma:.9g} bit={e.bit} "
        f"cost={e.cumulative_cost:.9g}"
        for e in entries
    ]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Bias amplification by majority vote
# ---------------------------------------------------------------------------

def amplify_bias_exact(gamma, k: int):
    """Bias of the majority of k independent coins of bias ``gamma``,
    computed through the exact binomial tail: ``2 P[Bin(k, (1+gamma)/2) >
    k/2] - 1``.  Exact on Fraction inputs.  Requires odd ``k <= 1/gamma**2``.
    """
    if k < 1 or k % 2 == 0:
        raise ValueError(f"majority size must be odd and positive, got {k}")
    if k * gamma * gamma > 1 + 1e-12:  # exact for Fractions, tolerant for floats
        raise ValueError(f"majority size {k} exceeds 1/gamma^2")
    j0 = (k + 1) // 2
    if isinstance(gamma, Fraction):
        p = (1 + gamma) / 2
        q = 1 - p
        if q == 0:
            return Fraction(1)
        term = math.comb(k, j0) * p**j0 * q ** (k - j0)
        tail = term
        ratio = p / q
        for j in range(j0, k):
            term = term * (k - j) * ratio / (j + 1)
            tail += term
        return 2 * tail - 1
    p = (1.0 + gamma) / 2.0
    tail = math.fsum(
        math.comb(k, j) * p**j * (1.0 - p) ** (k - j) for j in range(j0, k + 1)
    )
    return 2.0 * tail - 1.0


def amplify_bias_sample(oracle: NoisyOracle, i: int, gamma: float, k: int) -> int:
    """Majority of k fresh queries at bias ``gamma`` (ledger pays all k)."""
    if k < 1 or k % 2 == 0:
        raise ValueError(f"majority size must be odd and positive, got {k}")
    if gamma != 0 and k > 1.0 / gamma**2:
        raise ValueError(f"majority size {k} exceeds 1/gamma^2")
    votes = oracle.query_many(i, gamma, k)
    return int(votes.sum() * 2 > k)


# ---------------------------------------------------------------------------
# Conditioned walk expectations
# ---------------------------------------------------------------------------

def mu_t(gamma_hat: float, T: int) -> float:
    """Expected length of a walk with up-step probability
    ``(1 + gamma_hat)/2`` started at 0 and absorbed at ``+T`` or ``-T``,
    conditioned on absorbing at ``+T``:

        T/g - (2T/g) (1-g)^T ((1+g)^T - (1-g)^T) / ((1+g)^{2T} - (1-g)^{2T})

    evaluated through the algebraically equal form (T/g)(a-b)/(a+b) with
    ``a = (1+g)^T``, ``b = (1-g)^T``, which avoids the huge-power quotient.
    """
    if not 0.0 < gamma_hat < 1.0:
        raise ValueError("bias must lie in (0, 1)")
    if T < 1:
        raise ValueError("barrier must be positive")
    a = (1.0 + gamma_hat) ** T
    b = (1.0 - gamma_hat) ** T
    return (T / gamma_hat) * (a - b) / (a + b)


def walk_barrier(gamma_hat: float, t: float) -> int:
    """Barrier distance ``floor(1 / (5 sqrt(t) gamma_hat))``."""
    return int(1.0 / (5.0 * math.sqrt(t) * gamma_hat))


def mu_ratio_check(gamma_hat: float, t: float):
    """(mu_T, mu_2T, mu_2T <= 12 mu_T) for the barrier induced by ``t``."""
    T = walk_barrier(gamma_hat, t)
    if T < 1:
        raise ValueError(
            f"bias {gamma_hat} too large for t={t}: barrier would be 0"
        )
    m1 = mu_t(gamma_hat, T)
    m2 = mu_t(gamma_hat, 2 * T)
    return m1, m2, m2 <= 12.0 * m1


@dataclass(frozen=True)
class WalkParams:
    """Parameters of the biased-bit generator.

    ``T`` is the barrier distance, ``R`` the likelihood ratio between the two
    absorption events, and ``delta_prime = (R-1)/(R+1)`` the bias of the coin
    that selects the absorption side.  ``delta_prime`` stays within a small
    constant factor of ``1/sqrt(t)`` (checked per instance, not assumed).
    """

    gamma_hat: float
    t: int

    def __post_init__(self) -> None:
        if not 0.0 < self.gamma_hat <= GAMMA_HAT_CAP:
            raise ValueError(
                f"bias must lie in (0, {GAMMA_HAT_CAP}], got {self.gamma_hat}"
            )
        if self.t < 1:
            raise ValueError("t must be positive")
        if self.T < 1:
            raise ValueError(
                f"bias {self.gamma_hat} too large for t={self.t}: "
                "the barrier collapses to 0 (handled by majority "
                "amplification instead of the walk)"
            )
        if not 0.0 < self.delta_prime < 1.0:
            raise ValueError("absorption-side bias out of range")
        if self.delta_prime * math.sqrt(self.t) > 0.25:
            raise ValueError("absorption-side bias unexpectedly large")

    @property
    def T(self) -> int:
        return walk_barrier(self.gamma_hat, self.t)

    @property
    def R(self) -> float:
        return ((1.0 + self.gamma_hat) / (1.0 - self.gamma_hat)) ** self.T

    @property
    def delta_prime(self) -> float:
        return (self.R - 1.0) / (self.R + 1.0)

    @property
    def mu(self) -> float:
        return mu_t(self.gamma_hat, self.T)


# ---------------------------------------------------------------------------
# Conditioned walk sampling
# ---------------------------------------------------------------------------

def sample_conditioned_walk(
    gamma_hat: float,
    T: int,
    target: int,
    rng,
    step_cap: int = MAX_WALK_STEPS,
) -> np.ndarray:
    """One walk drawn from the law of a ``gamma_hat``-biased walk conditioned
    on absorbing at ``target`` (+T or -T) first; returned as its up-step
    bits.

    Sampling drifts toward the target and restarts on wrong-side absorption.
    The conditional path law is the same whether the walk is biased toward or
    away from the target (every path to the target changes probability by the
    same ratio), so drifting toward it is exact while keeping the acceptance
    probability above 1/2.  A rejection sampler against the drift cross-checks
    this at small T in the tests.
    """
    if T < 1:
        raise ValueError("barrier must be positive")
    if target not in (T, -T):
        raise ValueError(f"target must be +-{T}, got {target}")
    if not 0.0 < gamma_hat < 1.0:
        raise ValueError("bias must lie in (0, 1)")
    p_up = (1.0 + gamma_hat) / 2.0 if target > 0 else (1.0 - gamma_hat) / 2.0
    goal = target
    spent = 0
    chunk = max(64, 4 * T)
    while True:  # attempts; wrong-side absorptions are discarded
        pos = 0
        trace: list[int] = []
        while pos != goal and pos != -goal:
            for up in rng.random(chunk) < p_up:
                pos += 1 if up else -1
                trace.append(int(up))
                spent += 1
                if pos == goal or pos == -goal:
                    break
            if spent > step_cap:
                raise WalkStepCapExceeded(f"walk exceeded {step_cap} steps")
        if pos == goal:
            return np.array(trace, dtype=np.uint8)


def sample_walk_lengths(
    gamma_hat: float, T: int, n_walks: int, rng, step_cap: int = MAX_WALK_STEPS
) -> np.ndarray:
    """Lengths of ``n_walks`` conditioned walks toward ``+T``, vectorized.
    Distribution matches :func:`sample_conditioned_walk`."""
    p_up = (1.0 + gamma_hat) / 2.0
    pos = np.zeros(n_walks, dtype=np.int64)
    steps = np.zeros(n_walks, dtype=np.int64)
    spent = np.zeros(n_walks, dtype=np.int64)
    done = np.zeros(n_walks, dtype=bool)
    while not done.all():
        active = ~done
        n = int(active.sum())
        moves = np.where(rng.random(n) < p_up, 1, -1)
        pos_a = pos[active] + moves
        steps_a = steps[active] + 1
        spent_a = spent[active] + 1
        wrong = pos_a == -T
        pos_a[wrong] = 0
        steps_a[wrong] = 0
        pos[active] = pos_a
        steps[active] = steps_a
        spent[active] = spent_a
        if (spent_a > step_cap).any():
            raise WalkStepCapExceeded(f"walk exceeded {step_cap} steps")
        hit = np.zeros(n_walks, dtype=bool)
        hit[active] = pos_a == T
        done |= hit
    return steps


class BiasedBitStream:
    """Independent bits of bias ``gamma_hat`` generated from absorption-side
    coins of bias ``delta_prime``.

    Each refill tosses one ``delta_prime`` coin, samples a walk conditioned
    to absorb on the chosen side, and emits the walk's up-step bits.  The
    two-sided mixture reproduces the unconditioned biased-walk law, so the
    concatenated stream is i.i.d. with marginal ``(1 + gamma_hat)/2``.  The
    ledger pays ``delta_prime**2`` per walk (one low-bias coin per refill).
    """

    def __init__(self, params: WalkParams, rng, coin=None):
        self.params = params
        self.rng = rng
        self.coin = coin  # optional external δ'-coin source (the reduction)
        self.ledger = 0.0
        self.walks = 0
        self.bits_emitted = 0
        self._buffer: list[int] = []

    def _toss(self) -> int:
        if self.coin is not None:
            return self.coin()
        return int(self.rng.random() < (1.0 + self.params.delta_prime) / 2.0)

    def _refill(self) -> None:
        p = self.params
        side = self._toss()
        self.ledger += p.delta_prime**2
        self.walks += 1
        if p.T == 1:
            # a one-step walk to the chosen side is that side's bit itself
            self._buffer.extend([side])
            return
        target = p.T if side else -p.T
        trace = sample_conditioned_walk(p.gamma_hat, p.T, target, self.rng)
        self._buffer.extend(int(b) for b in trace)

    def next_bit(self) -> int:
        if not self._buffer:
            self._refill()
        self.bits_emitted += 1
        return self._buffer.pop(0)

    def take(self, count: int) -> np.ndarray:
        out = np.empty(count, dtype=np.uint8)
        if self.params.T == 1 and self.coin is None and not self._buffer:
            p = self.params
            draws = self.rng.random(count) < (1.0 + p.delta_prime) / 2.0
            self.ledger += count * p.delta_prime**2
            self.walks += count
            self.bits_emitted += count
            out[:] = draws
            return out
        for i in range(count):
            out[i] = self.next_bit()
        return out


def generate_biased_bits(params: WalkParams, rng, count: int) -> np.ndarray:
    """Convenience wrapper: ``count`` bits from a fresh stream."""
    return BiasedBitStream(params, rng).take(count)


# ---------------------------------------------------------------------------
# Compiling a noisy algorithm for f into a standard one for f ∘ GapMaj_t
# ---------------------------------------------------------------------------

class NoisyAlgorithm:
    """Base class: a decision procedure in two-bias normal form.

    Subclasses implement :meth:`run` and may only issue queries with bias 1
    or ``self.gamma_hat``.
    """

    def __init__(self, gamma_hat: float):
        if not 0.0 < gamma_hat <= 1.0 / 3.0:
            raise ValueError("low bias must lie in (0, 1/3]")
        self.gamma_hat = gamma_hat

    def run(self, oracle) -> int:
        raise NotImplementedError


class ExactReadAlgorithm(NoisyAlgorithm):
    """Queries every variable at bias 1 and evaluates the function."""

    def __init__(self, f: PartialFn):
        super().__init__(1.0 / 3.0)
        self.f = f

    def run(self, oracle) -> int:
        x = 0
        for i in range(self.f.arity):
            x |= oracle.query(i, 1.0) << i
        v = self.f.eval(x)
        return 0 if v is None else v


class MajorityVoteAlgorithm(NoisyAlgorithm):
    """Estimates each variable by a majority of low-bias queries, then
    evaluates the function on the estimates."""

    def __init__(self, f: PartialFn, gamma_hat: float, repeats: int):
        super().__init__(gamma_hat)
        if repeats < 1 or repeats % 2 == 0:
            raise ValueError("repeats must be odd")
        self.f = f
        self.repeats = repeats

    def run(self, oracle) -> int:
        x = 0
        for i in range(self.f.arity):
            votes = oracle.query_many(i, self.gamma_hat, self.repeats)
            x |= int(votes.sum() * 2 > self.repeats) << i
        v = self.f.eval(x)
        return 0 if v is None else v


def _as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def _mix_down(bits: np.ndarray, keep_prob: float, rng) -> np.ndarray:
    """Reduce the bias of ``bits`` by the factor ``keep_prob``: keep each bit
    with that probability, replace it by a fresh uniform bit otherwise."""
    if not 0.0 <= keep_prob <= 1.0:
        raise ValueError(f"keep probability {keep_prob} out of range")
    keep = rng.random(len(bits)) < keep_prob
    uniform = (rng.random(len(bits)) < 0.5).astype(np.uint8)
    return np.where(keep, bits, uniform).astype(np.uint8)


def smallest_amplifier(base_bias: float, target: float, cap: int) -> int:
    """Smallest odd k <= cap whose exact majority bias reaches ``target``."""
    k = 1
    while k <= cap:
        if amplify_bias_exact(base_bias, k) >= target:
            return k
        k += 2
    raise ValueError(
        f"cannot amplify bias {base_bias} to {target} within {cap} votes"
    )


@dataclass
class ComposedTrial:
    """One run of the compiled standard algorithm on a concrete input."""

    output: int
    expected: int
    block_reads: int          # bias-1 requests forwarded as full block reads
    single_reads: int         # low-bias requests answered by one random bit
    composed_queries: int     # total standard queries actually issued
    noisy_cost: float         # squared-bias cost at the noisy level

    @property
    def correct(self) -> bool:
        return self.output == self.expected

    def query_identity_holds(self, t: int) -> bool:
        return self.composed_queries == t * self.block_reads + self.single_reads


class GapMajBridge:
    """The oracle handed to a noisy algorithm when it actually runs on an
    input of ``f ∘ GapMaj_t``.

    A bias-1 request reads the whole inner block (t standard queries, cached
    afterwards).  A low-bias request reads one uniformly random position of
    the block; on a promise input that bit matches the block value with
    probability 1/2 + 2/sqrt(t), i.e. bias 4/sqrt(t), which is mixed down to
    exactly 1/sqrt(t).  If the algorithm's bias is at least 1/sqrt(t), a
    majority of such reads overshoots it and is mixed down to hit it exactly;
    otherwise each walk of the biased-bit generator spends one such read as
    its absorption-side coin.
    """

    def __init__(self, blocks: np.ndarray, gamma_hat: float, seed_seq):
        self.blocks = np.asarray(blocks, dtype=np.uint8)
        n, t = self.blocks.shape
        self._lo, self._hi = gapmaj_weights(t)
        weights = self.blocks.sum(axis=1)
        if not np.all((weights == self._lo) | (weights == self._hi)):
            raise ValueError("inner blocks violate the weight promise")
        self.t = t
        self.gamma_hat = gamma_hat
        self._seed_seq = _as_seed_sequence(seed_seq)
        self._rngs: dict[int, np.random.Generator] = {}
        self.block_reads = 0
        self.single_reads = 0
        self.noisy_cost = 0.0
        self._known: dict[int, int] = {}
        self._streams: dict[int, BiasedBitStream] = {}
        self.sqrt_bias = 1.0 / math.sqrt(t)
        self.mode: str | None = None  # decided on first low-bias query

    def _rng_for(self, i: int) -> np.random.Generator:
        """Per-index generator, derived by key so the stream for one block
        does not depend on how queries to other blocks interleave."""
        rng = self._rngs.get(i)
        if rng is None:
            child = np.random.SeedSequence(
                entropy=self._seed_seq.entropy,
                spawn_key=self._seed_seq.spawn_key + (i,),
            )
            rng = np.random.default_rng(child)
            self._rngs[i] = rng
        return rng

    def _ensure_low_bias_mode(self) -> None:
        if self.mode is not None:
            return
        if self.gamma_hat < self.sqrt_bias:
            try:
                self.params = WalkParams(self.gamma_hat, self.t)
                self.mode = "walk"
                return
            except ValueError:
                pass  # barrier collapsed; a single-vote majority still works
        # one read already has bias 1/sqrt(t) >= gamma_hat, or a majority
        # of several overshoots it; either way mix down to gamma_hat exactly
        self.mode = "majority"
        self.votes = smallest_amplifier(self.sqrt_bias, self.gamma_hat, cap=self.t)
        self.amplified = float(amplify_bias_exact(self.sqrt_bias, self.votes))

    @property
    def composed_queries(self) -> int:
        return self.t * self.block_reads + self.single_reads

    # -- primitive reads -------------------------------------------------

    def _block_value(self, i: int) -> int:
        if i not in self._known:
            self.block_reads += 1  # reads all t bits of block i
            self._known[i] = int(self.blocks[i].sum() == self._hi)
        return self._known[i]

    def _raw_bits(self, i: int, count: int) -> np.ndarray:
        """Uniform random positions of block i: bias 4/sqrt(t) toward the
        block value."""
        self.single_reads += count
        pos = self._rng_for(i).integers(0, self.t, size=count)
        return self.blocks[i, pos]

    def _sqrt_bias_bits(self, i: int, count: int) -> np.ndarray:
        """Bits of bias exactly 1/sqrt(t) toward the block value."""
        raw = self._raw_bits(i, count)
        return _mix_down(raw, keep_prob=0.25, rng=self._rng_for(i))

    # -- the noisy-oracle surface ----------------------------------------

    def query(self, i: int, gamma: float) -> int:
        return int(self.query_many(i, gamma, 1)[0])

    def query_many(self, i: int, gamma: float, count: int) -> np.ndarray:
        if gamma == 1.0:
            value = self._block_value(i)
            self.noisy_cost += float(count)
            return np.full(count, value, dtype=np.uint8)
        if gamma != self.gamma_hat:
            raise ValueError(
                "normal form violated: bias must be 1 or the declared low bias"
            )
        self._ensure_low_bias_mode()
        self.noisy_cost += count * gamma * gamma
        if self.mode == "majority":
            votes = self._sqrt_bias_bits(i, count * self.votes)
            votes = votes.reshape(count, self.votes)
            maj = (votes.sum(axis=1) * 2 > self.votes).astype(np.uint8)
            return _mix_down(maj, keep_prob=self.gamma_hat / self.amplified,
                             rng=self._rng_for(i))
        stream = self._streams.get(i)
        if stream is None:
            stream = BiasedBitStream(
                self.params, self._rng_for(i),
                coin=lambda i=i: self._walk_coin(i),
            )
            self._streams[i] = stream
        return stream.take(count)

    def _walk_coin(self, i: int) -> int:
        """One absorption-side coin of bias exactly delta_prime toward the
        block value, paid for by a single random-position read."""
        bit = self._sqrt_bias_bits(i, 1)
        keep = self.params.delta_prime / self.sqrt_bias
        return int(_mix_down(bit, keep_prob=keep, rng=self._rng_for(i))[0])


def make_promise_blocks(outer_bits, t: int, rng) -> np.ndarray:
    """Concrete inner blocks realizing the given outer assignment: block i
    gets the promised high weight iff ``outer_bits[i]`` is 1, at uniformly
    random positions."""
    lo, hi = gapmaj_weights(t)
    blocks = np.zeros((len(outer_bits), t), dtype=np.uint8)
    for i, b in enumerate(outer_bits):
        w = hi if b else lo
        blocks[i, rng.choice(t, size=w, replace=False)] = 1
    return blocks


def run_composed_trial(
    alg: NoisyAlgorithm, f: PartialFn, outer_bits, t: int, seed
) -> ComposedTrial:
    """Compile ``alg`` against gap-majority inner functions and run it once
    on a random promise input realizing ``outer_bits``.  ``seed`` may be an
    integer or a SeedSequence; the bridge derives one generator per inner
    block from it."""
    if len(outer_bits) != f.arity:
        raise ValueError("outer assignment length must match the arity")
    expected = f.eval(sum(b << i for i, b in enumerate(outer_bits)))
    if expected is None:
        raise ValueError("outer assignment outside the domain")
    ss = _as_seed_sequence(seed)
    blocks_rng = np.random.default_rng(
        np.random.SeedSequence(entropy=ss.entropy,
                               spawn_key=ss.spawn_key + (1 << 31,))
    )
    blocks = make_promise_blocks(outer_bits, t, blocks_rng)
    bridge = GapMajBridge(blocks, alg.gamma_hat, ss)
    output = alg.run(bridge)
    return ComposedTrial(
        output=output,
        expected=expected,
        block_reads=bridge.block_reads,
        single_reads=bridge.single_reads,
        composed_queries=bridge.composed_queries,
        noisy_cost=bridge.noisy_cost,
    )


@dataclass
class TrialSummary:
    trials: int
    successes: int
    mean_cost: float
    identity_ok: bool

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    def confidence_95(self) -> float:
        if not self.trials:
            return 0.0
        p = self.success_rate
        return 1.96 * math.sqrt(max(p * (1.0 - p), 0.0) / self.trials)


def run_composed_trials(
    alg: NoisyAlgorithm, f: PartialFn, outer_bits, t: int, trials: int, seed
) -> TrialSummary:
    """Seeded batch of composed runs on one outer assignment."""
    seq = np.random.SeedSequence(seed)
    successes = 0
    cost = 0.0
    identity = True
    for child in seq.spawn(trials):
        trial = run_composed_trial(alg, f, outer_bits, t, child)
        successes += trial.correct
        cost += trial.composed_queries
        identity = identity and trial.query_identity_holds(t)
    return TrialSummary(
        trials=trials,
        successes=successes,
        mean_cost=cost / trials if trials else 0.0,
        identity_ok=identity,
    )
