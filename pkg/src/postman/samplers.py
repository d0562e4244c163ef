"""Classical solvers over binary-quadratic models.

All samplers report exact energies: search loops run in float (integer-valued
after scaling, so argmins are sound), and every emitted configuration is
re-evaluated with exact rational arithmetic before it is stored. Randomized
samplers derive one RNG stream per read (or restart) from the master seed, so
results are deterministic regardless of execution order or chunking.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import EmptySampleSetError, NoGapError, TooLargeError
from .numbers import Number, as_exact, format_number, normalize, to_jsonable
from .qubo import IsingModel, QuboModel

BRUTE_FORCE_GUARD = 26
GROUND_STATE_GUARD = 32


@dataclass(frozen=True)
class SampleRecord:
    """One configuration with its exact energy; config None marks a rejected read."""

    config: tuple[int, ...] | None
    energy: Number | None
    multiplicity: int = 1


def _record_key(r: SampleRecord):
    return (r.config is None, r.energy if r.energy is not None else 0, r.config or ())


@dataclass(frozen=True)
class SampleSet:
    """Multiset of configurations, sorted by (energy, configuration)."""

    records: tuple[SampleRecord, ...]
    metadata: dict

    @staticmethod
    def from_configs(model, configs, metadata: dict, rejected: int = 0) -> "SampleSet":
        counts = Counter(tuple(int(v) for v in c) for c in configs)
        records = [
            SampleRecord(config=c, energy=model.energy(c), multiplicity=m)
            for c, m in counts.items()
        ]
        if rejected:
            records.append(SampleRecord(config=None, energy=None, multiplicity=rejected))
        records.sort(key=_record_key)
        return SampleSet(records=tuple(records), metadata=dict(metadata))

    def best(self) -> SampleRecord:
        for r in self.records:
            if r.config is not None:
                return r
        raise EmptySampleSetError("no accepted reads")

    @property
    def total_reads(self) -> int:
        return sum(r.multiplicity for r in self.records)

    def merge(self, other: "SampleSet", metadata: dict | None = None) -> "SampleSet":
        combined: dict[tuple | None, list] = {}
        for r in list(self.records) + list(other.records):
            key = r.config
            if key in combined:
                combined[key][1] += r.multiplicity
            else:
                combined[key] = [r.energy, r.multiplicity]
        records = [
            SampleRecord(config=c, energy=e, multiplicity=m)
            for c, (e, m) in combined.items()
        ]
        records.sort(key=_record_key)
        return SampleSet(records=tuple(records), metadata=dict(metadata or self.metadata))

    def to_json(self) -> dict:
        return {
            "metadata": _jsonable_metadata(self.metadata),
            "records": [
                {
                    "config": None if r.config is None else list(r.config),
                    "energy": None if r.energy is None else to_jsonable(r.energy),
                    "multiplicity": r.multiplicity,
                }
                for r in self.records
            ],
        }

    @staticmethod
    def from_json(obj) -> "SampleSet":
        records = tuple(
            SampleRecord(
                config=None if r["config"] is None else tuple(int(v) for v in r["config"]),
                energy=None if r["energy"] is None else as_exact(r["energy"]),
                multiplicity=int(r["multiplicity"]),
            )
            for r in obj["records"]
        )
        return SampleSet(records=records, metadata=dict(obj.get("metadata", {})))

    def to_csv(self) -> str:
        """Energy histogram: one 'energy,multiplicity' row per level."""
        hist: dict[Number | None, int] = {}
        for r in self.records:
            hist[r.energy] = hist.get(r.energy, 0) + r.multiplicity
        lines = ["energy,multiplicity"]
        for e in sorted((k for k in hist if k is not None)):
            lines.append(f"{format_number(e)},{hist[e]}")
        if None in hist:
            lines.append(f"rejected,{hist[None]}")
        return "\n".join(lines) + "\n"


def _jsonable_metadata(meta: dict) -> dict:
    out = {}
    for k, v in meta.items():
        out[k] = to_jsonable(v) if isinstance(v, Fraction) else v
    return out


@dataclass(frozen=True)
class Schedule:
    """Inverse-temperature ramp, linear in beta over the sweeps."""

    beta_start: float = 0.1
    beta_end: float = 5.0
    n_sweeps: int = 1000

    def __post_init__(self):
        if self.n_sweeps < 1:
            raise ValueError("need at least one sweep")
        if not (0 < self.beta_start <= self.beta_end):
            raise ValueError("need 0 < beta_start <= beta_end")

    def betas(self) -> np.ndarray:
        if self.beta_start == self.beta_end:
            return np.full(self.n_sweeps, float(self.beta_start))
        return np.linspace(float(self.beta_start), float(self.beta_end), self.n_sweeps)


# --- shared x-basis arrays ---------------------------------------------------

def _xbasis(model) -> tuple[Fraction, list[Fraction], dict[tuple[int, int], Fraction], str, int]:
    """(offset, linear, upper quadratic, kind, n) with x in {0,1}.

    Ising models are rewritten through s = 2x - 1 so one enumeration core
    serves both forms; `kind` remembers the native basis for configs.
    """
    if isinstance(model, QuboModel):
        lin = [Fraction(a) for a in model.linear]
        quad = {k: Fraction(b) for k, b in model.quadratic.items()}
        return Fraction(model.offset), lin, quad, "qubo", model.dim
    if isinstance(model, IsingModel):
        n = model.n
        off = Fraction(model.offset)
        lin = [Fraction(0)] * n
        quad: dict[tuple[int, int], Fraction] = {}
        for i, h in enumerate(model.h):
            lin[i] += 2 * Fraction(h)
            off -= Fraction(h)
        for (i, j), c in model.couplings.items():
            c = Fraction(c)
            quad[(i, j)] = 4 * c
            lin[i] -= 2 * c
            lin[j] -= 2 * c
            off += c
        return off, lin, quad, "ising", n
    raise TypeError(f"unsupported model type {type(model).__name__}")


def _scaled_int_arrays(model):
    """Integer-scaled float arrays (exact below 2**53) plus the denominator."""
    off, lin, quad, kind, n = _xbasis(model)
    denoms = [off.denominator] + [v.denominator for v in lin] + [v.denominator for v in quad.values()]
    scale = 1
    for d in denoms:
        scale = scale * d // math.gcd(scale, d)
    off_i = int(off * scale)
    lin_i = np.array([int(v * scale) for v in lin], dtype=np.float64)
    B = np.zeros((n, n))
    for (k, l), v in quad.items():
        B[k, l] = float(int(v * scale))
    bound = abs(off_i) + np.abs(lin_i).sum() + np.abs(B).sum()
    if bound >= 2**53:
        raise TooLargeError("coefficients too large for exact float enumeration")
    return off_i, lin_i, B, scale, kind, n


def _native_config(bits: Sequence[int], kind: str) -> tuple[int, ...]:
    if kind == "ising":
        return tuple(2 * int(b) - 1 for b in bits)
    return tuple(int(b) for b in bits)


def _bit_matrix(count: int, width: int) -> np.ndarray:
    return ((np.arange(count)[:, None] >> np.arange(width)) & 1).astype(np.float64)


def _all_energies(model) -> tuple[np.ndarray, int, str, int]:
    """Integer-scaled energies of every configuration, indexed by bit pattern."""
    off_i, lin_i, B, scale, kind, n = _scaled_int_arrays(model)
    out = np.empty(1 << n)
    block = 1 << min(n, 16)
    for start in range(0, 1 << n, block):
        idx = np.arange(start, start + block)
        bits = ((idx[:, None] >> np.arange(n)) & 1).astype(np.float64)
        out[start:start + block] = off_i + bits @ lin_i + ((bits @ B) * bits).sum(axis=1)
    return out, scale, kind, n


def brute_force(model, keep: int = 1) -> SampleSet:
    """Exhaustive spectrum head: all configurations in the lowest `keep` levels.

    Exact: coefficients are scaled to integers and enumerated in float64,
    which represents them exactly; stored energies are re-evaluated in
    rational arithmetic. Memory and time grow as 2**dim (guarded at 26).
    """
    _, _, _, _, n = _xbasis(model)
    if n > BRUTE_FORCE_GUARD:
        raise TooLargeError(f"dim {n} exceeds brute-force guard {BRUTE_FORCE_GUARD}")
    if keep < 1:
        raise ValueError("keep must be positive")
    energies, scale, kind, n = _all_energies(model)
    levels = np.unique(energies)
    cutoff = levels[min(keep, len(levels)) - 1]
    idx = np.nonzero(energies <= cutoff)[0]
    configs = [
        _native_config(((int(i) >> np.arange(n)) & 1), kind) for i in idx
    ]
    meta = {"sampler": "brute_force", "keep": keep, "levels": len(levels)}
    return SampleSet.from_configs(model, configs, meta)


def spectral_gap(model) -> tuple[Number, Number, Number]:
    """(E0, E1, E1 - E0) with E1 the lowest level strictly above E0."""
    _, _, _, _, n = _xbasis(model)
    if n > BRUTE_FORCE_GUARD:
        raise TooLargeError(f"dim {n} exceeds brute-force guard {BRUTE_FORCE_GUARD}")
    energies, scale, _, _ = _all_energies(model)
    levels = np.unique(energies)
    if len(levels) < 2:
        raise NoGapError("spectrum has a single level")
    e0 = normalize(Fraction(int(levels[0]), scale))
    e1 = normalize(Fraction(int(levels[1]), scale))
    return e0, e1, normalize(e1 - e0)


def _push_two_lowest(tracker: list, value: float) -> None:
    """Keep the two smallest distinct values seen so far (in place)."""
    if value in tracker:
        return
    tracker.append(value)
    tracker.sort()
    del tracker[2:]


def spectral_gap_large(model) -> tuple[Number, Number, Number]:
    """(E0, E1, gap) for models past the exhaustive guard, up to 32 variables.

    Split enumeration with sound pruning: the energies of both half-spaces are
    attained outright (zero complement), which seeds an upper bound for the
    second level; half-assignments whose cross-term lower bound exceeds that
    seed cannot host either of the two lowest levels and are skipped.
    """
    _, _, _, _, n = _xbasis(model)
    if n > GROUND_STATE_GUARD:
        raise TooLargeError(f"dim {n} exceeds ground-state guard {GROUND_STATE_GUARD}")
    off_i, lin_i, B, scale, kind, _ = _scaled_int_arrays(model)
    nA = n // 2
    nB = n - nA
    bitsA = _bit_matrix(1 << nA, nA)
    bitsB = _bit_matrix(1 << nB, nB)
    EA = bitsA @ lin_i[:nA] + ((bitsA @ B[:nA, :nA]) * bitsA).sum(axis=1)
    EB = bitsB @ lin_i[nA:] + ((bitsB @ B[nA:, nA:]) * bitsB).sum(axis=1)
    V = bitsA @ B[:nA, nA:]
    tracker: list[float] = []
    for value in np.unique(np.concatenate([EA, EB]))[:2]:
        _push_two_lowest(tracker, float(value))
    cutoff = tracker[1] if len(tracker) > 1 else math.inf
    lower = EA + np.minimum(V, 0.0).sum(axis=1) + EB.min()
    cand = np.nonzero(lower <= cutoff)[0]
    GB = bitsB.T
    chunk = 4096
    for s in range(0, len(cand), chunk):
        rows = cand[s:s + chunk]
        tot = V[rows] @ GB + EA[rows, None] + EB[None, :]
        m0 = float(tot.min())
        _push_two_lowest(tracker, m0)
        above = tot[tot > m0]
        if above.size:
            _push_two_lowest(tracker, float(above.min()))
    if len(tracker) < 2:
        raise NoGapError("spectrum has a single level")
    e0 = normalize(Fraction(int(tracker[0] + off_i), scale))
    e1 = normalize(Fraction(int(tracker[1] + off_i), scale))
    return e0, e1, normalize(e1 - e0)


def ground_state(model) -> SampleSet:
    """Exact minimum via pruned meet-in-the-middle; one argmin configuration.

    Splits variables into halves, bounds the cross term per half-assignment
    by its attainable minimum, and scans only half-assignments whose bound
    beats the best attained energy. Exact for any model whose scaled
    coefficients fit integer float64; handles dims up to 32.
    """
    _, _, _, _, n = _xbasis(model)
    if n > GROUND_STATE_GUARD:
        raise TooLargeError(f"dim {n} exceeds ground-state guard {GROUND_STATE_GUARD}")
    off_i, lin_i, B, scale, kind, _ = _scaled_int_arrays(model)
    nA = n // 2
    nB = n - nA
    bitsA = _bit_matrix(1 << nA, nA)
    bitsB = _bit_matrix(1 << nB, nB)
    EA = bitsA @ lin_i[:nA] + ((bitsA @ B[:nA, :nA]) * bitsA).sum(axis=1)
    EB = bitsB @ lin_i[nA:] + ((bitsB @ B[nA:, nA:]) * bitsB).sum(axis=1)
    cross = B[:nA, nA:]
    V = bitsA @ cross
    # attained energies at xB = 0 / xA = 0 give the initial incumbent
    if EA.min() <= EB.min():
        best = EA.min()
        arg = (int(np.argmin(EA)), 0)
    else:
        best = EB.min()
        arg = (0, int(np.argmin(EB)))
    lower = EA + np.minimum(V, 0.0).sum(axis=1) + EB.min()
    cand = np.nonzero(lower <= best)[0]
    GB = bitsB.T
    chunk = 4096
    for s in range(0, len(cand), chunk):
        rows = cand[s:s + chunk]
        tot = V[rows] @ GB + EA[rows, None] + EB[None, :]
        i, j = np.unravel_index(np.argmin(tot), tot.shape)
        if tot[i, j] < best:
            best = tot[i, j]
            arg = (int(rows[i]), int(j))
    bits = [(arg[0] >> k) & 1 for k in range(nA)] + [(arg[1] >> k) & 1 for k in range(nB)]
    config = _native_config(bits, kind)
    meta = {"sampler": "ground_state", "candidates": int(len(cand))}
    return SampleSet.from_configs(model, [config], meta)


# --- simulated annealing -----------------------------------------------------

def simulated_annealing(
    model: IsingModel,
    schedule: Schedule | None = None,
    reads: int = 1000,
    seed: int = 0,
    chunk: int | None = None,
) -> SampleSet:
    """Single-spin-flip Metropolis annealing over a linear beta ramp.

    Per read: an independent RNG stream seeded by (seed, read index) draws the
    uniform initial spins, then one acceptance uniform per (sweep, spin);
    every sweep proposes all spins in ascending index order at that sweep's
    beta. Reads are vectorized in chunks, which leaves the per-read stream
    semantics (and hence the output) unchanged.
    """
    if reads < 1:
        raise ValueError("need at least one read")
    schedule = schedule or Schedule()
    n = model.n
    hf = np.array([float(v) for v in model.h])
    Jm = np.zeros((n, n))
    for (i, j), c in model.couplings.items():
        Jm[i, j] = float(c)
        Jm[j, i] = float(c)
    betas = schedule.betas()
    n_sweeps = schedule.n_sweeps
    finals = np.empty((reads, n), dtype=np.int8)
    if chunk is None:  # cap the pregenerated uniform block at ~128 MB
        chunk = max(1, min(reads, (1 << 24) // max(1, n_sweeps * n)))
    for start in range(0, reads, chunk):
        stop = min(start + chunk, reads)
        m = stop - start
        S = np.empty((m, n))
        U = np.empty((m, n_sweeps, n))
        for row, r in enumerate(range(start, stop)):
            rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, r)))
            S[row] = rng.integers(0, 2, n) * 2 - 1
            U[row] = rng.random((n_sweeps, n))
        F = S @ Jm
        for t in range(n_sweeps):
            beta = betas[t]
            for i in range(n):
                dE = -2.0 * S[:, i] * (hf[i] + F[:, i])
                accept = dE <= 0.0
                hard = ~accept
                if hard.any():
                    accept[hard] = U[hard, t, i] < np.exp(-beta * dE[hard])
                if accept.any():
                    old = S[accept, i].copy()
                    S[accept, i] = -old
                    F[accept] += (-2.0 * old)[:, None] * Jm[i][None, :]
        finals[start:stop] = S.astype(np.int8)
    meta = {
        "sampler": "simulated_annealing",
        "seed": seed,
        "reads": reads,
        "n_sweeps": n_sweeps,
        "beta_start": schedule.beta_start,
        "beta_end": schedule.beta_end,
    }
    return SampleSet.from_configs(model, finals, meta)


# --- tabu search --------------------------------------------------------------

def tabu_search(
    model: QuboModel,
    tenure: int = 10,
    max_restarts: int = 20,
    stagnation_limit: int | None = None,
    seed: int = 0,
) -> SampleSet:
    """Steepest-descent single-flip search with a recency tabu list.

    Recently flipped variables stay tabu for `tenure` iterations unless a
    move beats the best energy seen anywhere (aspiration). After
    `stagnation_limit` iterations without improving the restart's best, the
    search restarts from a fresh random configuration. One record per
    restart-best is reported, deduplicated with multiplicities.
    """
    if tenure < 1:
        raise ValueError("tenure must be positive")
    if max_restarts < 1:
        raise ValueError("need at least one restart")
    off_i, lin_i, B, scale, kind, n = _scaled_int_arrays(model)
    if stagnation_limit is None:
        stagnation_limit = 50 * n
    Bsym = B + B.T
    rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed,)))
    global_best = np.inf
    bests: list[tuple[int, ...]] = []
    for _ in range(max_restarts):
        x = rng.integers(0, 2, n).astype(np.float64)
        f = Bsym @ x
        energy = off_i + lin_i @ x + 0.5 * x @ f
        delta = (1.0 - 2.0 * x) * (lin_i + f)
        tabu_until = np.zeros(n, dtype=np.int64)
        it = 0
        best_x = x.copy()
        best_e = energy
        since_improve = 0
        while since_improve < stagnation_limit:
            it += 1
            cand = energy + delta
            allowed = (tabu_until < it) | (cand < global_best)
            if allowed.any():
                masked = np.where(allowed, cand, np.inf)
            else:
                masked = cand
            k = int(np.argmin(masked))
            sign = 1.0 - 2.0 * x[k]  # +1 when flipping 0 -> 1
            energy += delta[k]
            x[k] += sign
            f += Bsym[:, k] * sign
            delta = (1.0 - 2.0 * x) * (lin_i + f)
            tabu_until[k] = it + tenure
            global_best = min(global_best, energy)
            if energy < best_e:
                best_e = energy
                best_x = x.copy()
                since_improve = 0
            else:
                since_improve += 1
        bests.append(_native_config(best_x.astype(int), kind))
    meta = {
        "sampler": "tabu_search",
        "seed": seed,
        "tenure": tenure,
        "max_restarts": max_restarts,
        "stagnation_limit": stagnation_limit,
        "reads": max_restarts,
    }
    return SampleSet.from_configs(model, bests, meta)
