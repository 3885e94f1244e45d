"""Seeded Monte Carlo simulation of row sums and limit laws, with
empirical characteristic functions to cross-validate the exact engine.

Every replicate draws from its own stream derived from (master seed,
derivation path), so results are bit-identical for a fixed configuration
regardless of how replicates are scheduled across workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .arrays import TriangularArraySpec
from .groups import (
    PADIC,
    SOLENOID,
    TORUS,
    Character,
    GroupElement,
    add,
    char_eval,
    identity,
    neg,
    reduce_turns,
    scale,
)
from .measures import LimitLaw, local_mean

DEFAULT_DIRECT_BUDGET = 10_000_000
_BLOCK = 1024  # replicate-block size; fixed so worker count never changes results


class SamplingBudgetError(ValueError):
    """A direct (per-entry) row-sum draw would exceed the sampling budget."""


@dataclass(frozen=True)
class SeededStream:
    """A reproducible random stream identified by a master seed and a
    derivation path; distinct paths give independent-quality streams."""

    master: int
    path: tuple[int, ...] = ()

    def child(self, *indices: int) -> "SeededStream":
        return SeededStream(self.master, self.path + indices)

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master, spawn_key=self.path)
        return np.random.Generator(np.random.PCG64(ss))


def derive_seed(master: int, path=()) -> int:
    """Deterministic, collision-resistant 64-bit seed for (master, path);
    the empty path gives the hash of the master seed itself."""
    ss = np.random.SeedSequence(master, spawn_key=tuple(path))
    return int(ss.generate_state(1, np.uint64)[0])


def _draw_atom(atoms, total: float, u: float) -> GroupElement:
    acc = 0.0
    for x, w in atoms:
        acc += w / total
        if u < acc:
            return x
    return atoms[-1][0]


def sample_row_sum(
    array: TriangularArraySpec,
    n: int,
    stream: SeededStream,
    budget: int = DEFAULT_DIRECT_BUDGET,
    force_direct: bool = False,
) -> GroupElement:
    """One draw of the row sum of row n.

    For i.i.d. rows the atom occupation counts are drawn in one shot
    (binomial for two-point rows, multinomial otherwise) and combined as
    count * atom, so the cost is independent of K_n.  Non-i.i.d. rows are
    sampled entry by entry, subject to the budget.
    """
    gen = stream.generator()
    K = array.row_count(n)
    if array.is_iid() and not force_direct:
        dist = array.iid_dist(n)
        atoms = dist.atoms
        if len(atoms) == 1:
            return scale(K, atoms[0][0])
        if len(atoms) == 2:
            (x0, w0), (x1, _) = atoms
            c = int(gen.binomial(K, w0 / dist.measure.total_mass()))
            return add(scale(c, x0), scale(K - c, x1))
        total = dist.measure.total_mass()
        counts = gen.multinomial(K, [w / total for _, w in atoms])
        out = identity(array.group)
        for (x, _), c in zip(atoms, counts):
            out = add(out, scale(int(c), x))
        return out
    if K > budget:
        raise SamplingBudgetError(f"direct sampling of K_n={K} entries exceeds budget {budget}")
    out = identity(array.group)
    if array.is_iid():
        dist = array.iid_dist(n)
        atoms, total = dist.atoms, dist.measure.total_mass()
        for _ in range(K):
            out = add(out, _draw_atom(atoms, total, gen.random()))
        return out
    for dist in array.rows(n):
        out = add(out, _draw_atom(dist.atoms, dist.measure.total_mass(), gen.random()))
    return out


@dataclass(frozen=True)
class EmpiricalFT:
    """Monte Carlo estimate of the row-sum FT on a character set."""

    chars: tuple[Character, ...]
    estimates: tuple[complex, ...]
    replicates: int

    @property
    def stderr(self) -> float:
        """Per-character error scale for modulus-one summands."""
        return 1.0 / math.sqrt(self.replicates)

    def estimate(self, chi: Character) -> complex:
        return self.estimates[self.chars.index(chi)]


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("LCALIM_THREADS", "1")))
    except ValueError:
        return 1


def _accumulate_blocks(draw_one, chars, M: int, threads: int | None):
    """Sum char values over replicates in fixed-size blocks, merging block
    partial sums in index order so the schedule cannot change the result."""
    blocks = [(lo, min(lo + _BLOCK, M)) for lo in range(0, M, _BLOCK)]

    def block_sum(bounds):
        lo, hi = bounds
        acc = np.zeros(len(chars), dtype=complex)
        for m in range(lo, hi):
            s = draw_one(m)
            for j, chi in enumerate(chars):
                acc[j] += char_eval(chi, s)
        return acc

    workers = threads if threads is not None else _worker_count()
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(block_sum, blocks))
    else:
        partials = [block_sum(b) for b in blocks]
    total = np.zeros(len(chars), dtype=complex)
    for part in partials:
        total += part
    return total


def empirical_ft(
    array: TriangularArraySpec,
    n: int,
    chars,
    M: int,
    stream: SeededStream,
    threads: int | None = None,
    force_direct: bool = False,
) -> EmpiricalFT:
    """Estimate the row-sum FT by averaging chi over M independent row-sum
    draws, replicate m using the derived stream (path + (m,))."""
    if M < 1:
        raise ValueError("need at least one replicate")
    chars = tuple(chars)

    def draw_one(m: int) -> GroupElement:
        return sample_row_sum(array, n, stream.child(m), force_direct=force_direct)

    total = _accumulate_blocks(draw_one, chars, M, threads)
    return EmpiricalFT(chars, tuple(complex(z) for z in total / M), M)


def sample_haar(H, stream_gen: np.random.Generator) -> GroupElement:
    """One draw from the normalized Haar measure of a compact subgroup
    (torus and padic subgroups only)."""
    from .groups import SUBGROUP_CYCLIC, SUBGROUP_LAMBDA, from_turns

    g = H.group
    if H.is_trivial():
        return identity(g)
    if g.kind == TORUS:
        if H.kind == SUBGROUP_CYCLIC:
            j = int(stream_gen.integers(H.r))
            return from_turns(g, j / H.r)
        return from_turns(g, stream_gen.random() - 0.5)
    if g.kind == PADIC and H.kind == SUBGROUP_LAMBDA:
        free = g.p ** (g.depth + 1 - H.r)
        u = int(stream_gen.integers(free))
        return GroupElement(g, residue=u * g.p**H.r)
    raise ValueError(f"Haar sampling not supported for {H.describe()} on {g.describe()}")


def sample_limit_law(law: LimitLaw, stream: SeededStream) -> GroupElement:
    """One draw from the quadruplet law by independent factor draws.

    Gauss factor on the torus is the wrapped normal with variance b (its FT
    at integer frequencies equals the Gauss factor exactly); the
    generalized Poisson factor is a compound Poisson draw shifted by the
    negated local mean.  Solenoid laws are not samplable here: the Gauss
    factor would need coordinates beyond any finite depth.
    """
    g = law.group
    if g.kind == SOLENOID:
        raise ValueError("solenoid limit laws are verified exactly, not sampled")
    gen = stream.generator()
    out = sample_haar(law.H, gen)
    out = add(out, law.a)
    if law.b.b > 0.0:
        theta = gen.normal(0.0, math.sqrt(law.b.b))
        out = add(out, GroupElement(g, turns=reduce_turns(theta / (2.0 * math.pi))))
    if law.eta.atoms:
        acc = identity(g)
        for x, w in law.eta.atoms:
            c = int(gen.poisson(w))
            acc = add(acc, scale(c, x))
        out = add(out, add(acc, neg(local_mean(law.eta.measure))))
    return out


def empirical_law_ft(
    law: LimitLaw, chars, M: int, stream: SeededStream, threads: int | None = None
) -> EmpiricalFT:
    """Estimate the law's FT by averaging chi over M independent draws."""
    if M < 1:
        raise ValueError("need at least one replicate")
    chars = tuple(chars)

    def draw_one(m: int) -> GroupElement:
        return sample_limit_law(law, stream.child(m))

    total = _accumulate_blocks(draw_one, chars, M, threads)
    return EmpiricalFT(chars, tuple(complex(z) for z in total / M), M)
