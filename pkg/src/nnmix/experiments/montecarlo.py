"""Seeded, chunked Monte Carlo estimators.

Work is split into fixed chunks of ``CHUNK_SIZE`` draws.  Chunk ``i`` gets
its own generator derived from ``(seed, stream, i)``, and per-chunk integer
counts are reduced in chunk order, so results do not depend on how many
threads evaluated the chunks.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence, TypeVar

import numpy as np

from ..distributions import Scenario, Source, TripleBatch, sample_triples
from ..rules import RuleSpec, resolve_rule, verdicts

__all__ = [
    "CHUNK_SIZE",
    "Method",
    "TiePolicy",
    "Estimate",
    "AgreementMatrix",
    "chunk_rng",
    "mc_success_probability",
    "mc_conditional_success",
    "w_expectations",
    "rule_agreement_matrix",
]

CHUNK_SIZE = 1 << 16
_SEED_MASK = (1 << 64) - 1

# substream ids, kept distinct so different estimators never share draws
_STREAM_TRIPLES = 0
_STREAM_CONDITIONAL = 1
_STREAM_W = 2
_STREAM_AGREEMENT = 3


class Method(str, enum.Enum):
    MONTE_CARLO = "MonteCarlo"
    QUADRATURE = "Quadrature"
    CLOSED_FORM = "ClosedForm"


class TiePolicy(str, enum.Enum):
    HALF_CREDIT = "HalfCredit"
    EXCLUDE = "Exclude"


@dataclass(frozen=True)
class Estimate:
    """A probability (or expectation) with its uncertainty.

    ``std_error`` is the Monte Carlo standard error and is 0 for
    deterministic methods; ``abs_error`` carries a quadrature error bound.
    """

    value: float
    std_error: float = 0.0
    n_samples: int = 0
    method: Method = Method.CLOSED_FORM
    tie_count: int = 0
    abs_error: float = 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["method"] = self.method.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Estimate":
        return cls(
            value=float(d["value"]),
            std_error=float(d["std_error"]),
            n_samples=int(d["n_samples"]),
            method=Method(d["method"]),
            tie_count=int(d["tie_count"]),
            abs_error=float(d.get("abs_error", 0.0)),
        )


def chunk_rng(seed: int, stream: int, chunk: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed) & _SEED_MASK, spawn_key=(stream, chunk))
    return np.random.Generator(np.random.PCG64(ss))


T = TypeVar("T")


def _chunks(n: int) -> list[tuple[int, int]]:
    return [(i, min(CHUNK_SIZE, n - i * CHUNK_SIZE)) for i in range((n + CHUNK_SIZE - 1) // CHUNK_SIZE)]


def _map_chunks(fn: Callable[[int, int], T], n: int, threads: int | None) -> list[T]:
    """Apply ``fn(chunk_index, chunk_len)`` to every chunk; results in chunk order."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    chunks = _chunks(n)
    workers = threads or os.cpu_count() or 1
    if workers <= 1 or len(chunks) == 1:
        return [fn(i, m) for i, m in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: fn(*c), chunks))


def _proportion(correct: int, ties: int, n: int, policy: TiePolicy) -> Estimate:
    policy = TiePolicy(policy)
    if policy is TiePolicy.HALF_CREDIT:
        p = (correct + 0.5 * ties) / n
        n_eff = n
    else:
        n_eff = n - ties
        if n_eff == 0:
            raise ValueError("every draw was a tie; nothing left to score under the Exclude policy")
        p = correct / n_eff
    se = math.sqrt(max(p * (1.0 - p), 0.0) / n_eff)
    return Estimate(p, se, n, Method.MONTE_CARLO, ties)


def _score(rule: RuleSpec, s: Scenario, batch: TripleBatch) -> tuple[int, int]:
    v = verdicts(rule, batch, s)
    truth = np.where(batch.from_x, 1, -1)
    return int(np.count_nonzero(v == truth)), int(np.count_nonzero(v == 0))


def mc_success_probability(
    s: Scenario,
    rule: str,
    n: int,
    seed: int,
    tie_policy: TiePolicy = TiePolicy.HALF_CREDIT,
    threads: int | None = None,
) -> Estimate:
    """Fraction of ``n`` mixture triples on which ``rule`` names the true source."""
    spec = resolve_rule(rule)

    def work(i: int, m: int) -> tuple[int, int]:
        return _score(spec, s, sample_triples(s, m, chunk_rng(seed, _STREAM_TRIPLES, i)))

    parts = _map_chunks(work, n, threads)
    return _proportion(sum(c for c, _ in parts), sum(t for _, t in parts), n, tie_policy)


def mc_conditional_success(
    s: Scenario,
    rule: str,
    condition: Source,
    n: int,
    seed: int,
    tie_policy: TiePolicy = TiePolicy.HALF_CREDIT,
    threads: int | None = None,
) -> Estimate:
    """Success rate when the middle point is always drawn from ``condition``."""
    spec = resolve_rule(rule)
    condition = Source(condition)

    def work(i: int, m: int) -> tuple[int, int]:
        rng = chunk_rng(seed, _STREAM_CONDITIONAL, i)
        return _score(spec, s, sample_triples(s, m, rng, condition=condition))

    parts = _map_chunks(work, n, threads)
    return _proportion(sum(c for c, _ in parts), sum(t for _, t in parts), n, tie_policy)


def w_expectations(s: Scenario, n: int, seed: int, threads: int | None = None) -> tuple[Estimate, Estimate]:
    """Monte Carlo estimates of E[W1] and E[W2] from independent 6-tuples.

    W1 counts the two "own side is closer" events
    ``|X - X'| < |Z - X'|`` and ``|X* - Z'| > |Z* - Z'|``; W2 counts the
    two opposite strict inequalities.
    """

    def work(i: int, m: int) -> tuple[int, int, int, int]:
        rx, rx1, rx2, rz, rz1, rz2 = chunk_rng(seed, _STREAM_W, i).spawn(6)
        x, xp, xs = s.fx.sample(rx, m), s.fx.sample(rx1, m), s.fx.sample(rx2, m)
        z, zp, zs = s.fz.sample(rz, m), s.fz.sample(rz1, m), s.fz.sample(rz2, m)
        a, b = np.abs(x - xp), np.abs(z - xp)
        c, d = np.abs(xs - zp), np.abs(zs - zp)
        w1 = (a < b).astype(np.int64) + (c > d)
        w2 = (a > b).astype(np.int64) + (c < d)
        return int(w1.sum()), int((w1 * w1).sum()), int(w2.sum()), int((w2 * w2).sum())

    parts = np.array(_map_chunks(work, n, threads), dtype=object).sum(axis=0)
    out = []
    for total, sq in ((parts[0], parts[1]), (parts[2], parts[3])):
        mean = total / n
        var = max(sq / n - mean * mean, 0.0)
        out.append(Estimate(mean, math.sqrt(var / n), n, Method.MONTE_CARLO, 0))
    return out[0], out[1]


@dataclass
class AgreementMatrix:
    """Pairwise verdict agreement over a common sample of triples.

    ``rates[i, j]`` is the fraction of identical verdicts among triples where
    neither rule ``i`` nor rule ``j`` tied; ``compared[i, j]`` is that count.
    """

    rules: list[str]
    rates: np.ndarray
    compared: np.ndarray
    tie_counts: list[int]
    n: int
    exemplars: list[dict] = field(default_factory=list)

    def rate(self, a: str, b: str) -> float:
        return float(self.rates[self.rules.index(a), self.rules.index(b)])


def rule_agreement_matrix(
    s: Scenario,
    rules: Sequence[str],
    n: int,
    seed: int,
    threads: int | None = None,
    max_exemplars: int = 10,
) -> AgreementMatrix:
    if len(rules) < 2:
        raise ValueError("need at least two rules to compare")
    specs = [resolve_rule(r) for r in rules]
    k = len(specs)

    def work(i: int, m: int):
        batch = sample_triples(s, m, chunk_rng(seed, _STREAM_AGREEMENT, i))
        v = np.stack([verdicts(sp, batch, s) for sp in specs])
        live = v != 0
        agree = np.zeros((k, k), dtype=np.int64)
        both = np.zeros((k, k), dtype=np.int64)
        for a in range(k):
            for b in range(k):
                mask = live[a] & live[b]
                both[a, b] = np.count_nonzero(mask)
                agree[a, b] = np.count_nonzero(mask & (v[a] == v[b]))
        split = np.flatnonzero(np.all(live, axis=0) & np.any(v != v[0], axis=0))[:max_exemplars]
        ex = [
            {
                "x": float(batch.x[j]),
                "y": float(batch.y[j]),
                "z": float(batch.z[j]),
                "true_source": "FromX" if batch.from_x[j] else "FromZ",
                "verdicts": {r: _VERDICT_NAMES[int(v[a, j])] for a, r in enumerate(rules)},
            }
            for j in split
        ]
        return agree, both, (~live).sum(axis=1), ex

    parts = _map_chunks(work, n, threads)
    agree = sum(p[0] for p in parts)
    both = sum(p[1] for p in parts)
    ties = sum(p[2] for p in parts)
    exemplars = [e for p in parts for e in p[3]][:max_exemplars]
    with np.errstate(invalid="ignore", divide="ignore"):
        rates = np.where(both > 0, agree / np.maximum(both, 1), np.nan)
    return AgreementMatrix(list(rules), rates, both, [int(t) for t in ties], n, exemplars)


_VERDICT_NAMES = {1: "FromX", -1: "FromZ", 0: "Tie"}
