"""Binary-quadratic encoding of the odd-node pairing problem.

Variables are ordered pairs (i, j), i != j, over the d odd nodes, listed in
lexicographic order (x01, x02, ..., x10, x12, ...). The objective carries the
pairwise shortest distances on the diagonal; two penalty families (scaled by
p >= d) enforce that every node is paired exactly once and that no node is
shared between pairs. The closed-form coefficients are:

    constant            p * d
    linear  a(x_ij)     W_ij - 2p
    pair    {x_ij,x_ji} 4p      (reversed orientation)
            same index in the same position (x_ij,x_ik / x_ji,x_ki)  4p
            one shared node across positions (x_ij,x_ki / x_ij,x_jk) 2p
            node-disjoint pairs                                      0

so the minimum over legal assignments equals the minimum matching weight.
All coefficients and energies are exact ints/Fractions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    DegenerateD0Error,
    DimensionMismatchError,
    IllegalAssignmentError,
    OddCountNotEvenError,
    ParseError,
    PenaltyTooSmallError,
)
from .exact import OddPairDistances
from .numbers import Number, as_exact, format_number, normalize, parse_number, to_jsonable


def variable_pairs(d: int) -> tuple[tuple[int, int], ...]:
    """Ordered index pairs in lexicographic order; dim = d(d-1)."""
    return tuple((i, j) for i in range(d) for j in range(d) if i != j)


@dataclass(frozen=True)
class QuboModel:
    """Quadratic binary objective: offset + sum a_k x_k + sum_{k<l} b_kl x_k x_l."""

    dim: int
    linear: tuple[Number, ...]
    quadratic: dict[tuple[int, int], Number]
    offset: Number = 0
    penalty: Number | None = None
    pairs: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self):
        if len(self.linear) != self.dim:
            raise ValueError("linear term count must equal dim")
        for (k, l) in self.quadratic:
            if not (0 <= k < l < self.dim):
                raise ValueError(f"bad quadratic key ({k},{l})")

    def energy(self, x: Sequence[int]) -> Number:
        if len(x) != self.dim:
            raise DimensionMismatchError(f"expected {self.dim} bits, got {len(x)}")
        e = self.offset
        for k, a in enumerate(self.linear):
            if x[k]:
                e += a
        for (k, l), b in self.quadratic.items():
            if x[k] and x[l]:
                e += b
        return normalize(e)

    @property
    def num_quadratic(self) -> int:
        return sum(1 for v in self.quadratic.values() if v != 0)

    def max_abs_coefficient(self) -> Number:
        vals = [abs(a) for a in self.linear] + [abs(b) for b in self.quadratic.values()]
        return max(vals) if vals else 0


@dataclass(frozen=True)
class IsingModel:
    """Spin-form twin: offset + sum h_i s_i + sum_{i<j} J_ij s_i s_j, s in {-1,+1}."""

    n: int
    h: tuple[Number, ...]
    couplings: dict[tuple[int, int], Number]
    offset: Number = 0

    def __post_init__(self):
        if len(self.h) != self.n:
            raise ValueError("field count must equal n")
        for (i, j) in self.couplings:
            if not (0 <= i < j < self.n):
                raise ValueError(f"bad coupling key ({i},{j})")

    def energy(self, s: Sequence[int]) -> Number:
        if len(s) != self.n:
            raise DimensionMismatchError(f"expected {self.n} spins, got {len(s)}")
        e = self.offset
        for i, hi in enumerate(self.h):
            e += hi * s[i]
        for (i, j), jij in self.couplings.items():
            e += jij * s[i] * s[j]
        return normalize(e)

    def max_abs_coefficient(self) -> Number:
        vals = [abs(a) for a in self.h] + [abs(b) for b in self.couplings.values()]
        return max(vals) if vals else 0


def _distance_matrix(table) -> tuple[tuple[Number, ...], ...]:
    if isinstance(table, OddPairDistances):
        return table.dist
    return tuple(tuple(as_exact(w) for w in row) for row in table)


def build_qubo(table, p: Number | None = None) -> QuboModel:
    """Compile a pairwise-distance table into the penalized binary objective.

    `table` is an OddPairDistances or a symmetric d x d matrix; `p` defaults
    to d, the smallest admissible penalty.
    """
    dist = _distance_matrix(table)
    d = len(dist)
    if d == 0:
        raise DegenerateD0Error("graph has no odd nodes; solve it exactly instead")
    if d % 2 == 1:
        raise OddCountNotEvenError(f"odd-node count must be even, got {d}")
    p = d if p is None else as_exact(p)
    if p < d:
        raise PenaltyTooSmallError(f"penalty {p} is below the bound d={d}")

    pairs = variable_pairs(d)
    index = {pair: k for k, pair in enumerate(pairs)}
    linear = tuple(normalize(dist[i][j] - 2 * p) for (i, j) in pairs)
    quadratic: dict[tuple[int, int], Number] = {}
    for k in range(len(pairs)):
        i, j = pairs[k]
        for l in range(k + 1, len(pairs)):
            a, b = pairs[l]
            if {i, j} == {a, b} or i == a or j == b:
                quadratic[(k, l)] = normalize(4 * p)
            elif i == b or j == a:
                quadratic[(k, l)] = normalize(2 * p)
    return QuboModel(
        dim=d * (d - 1),
        linear=linear,
        quadratic=quadratic,
        offset=normalize(p * d),
        penalty=normalize(p),
        pairs=pairs,
    )


def d_from_dim(dim: int) -> int | None:
    """Odd-node count whose pair encoding has this dimension, if any."""
    d = 1
    while d * (d - 1) < dim:
        d += 1
    return d if d * (d - 1) == dim else None


def penalties(x: Sequence[int], d: int) -> tuple[int, int]:
    """Constraint values (P1, P2) computed directly from their definitions.

    P1 sums, per node, the squared deviation of its appearance count from 1;
    P2 counts ordered products of distinct pairs sharing a positional node.
    Both vanish exactly on legal pairings.
    """
    pairs = variable_pairs(d)
    if len(x) != len(pairs):
        raise DimensionMismatchError(f"expected {len(pairs)} bits, got {len(x)}")
    val = {pair: int(bool(x[k])) for k, pair in enumerate(pairs)}
    p1 = 0
    for i in range(d):
        s = sum(val[(i, j)] + val[(j, i)] for j in range(d) if j != i)
        p1 += (1 - s) ** 2
    p2 = 0
    for k in range(d):
        for i in range(d):
            for j in range(d):
                if i == j or i == k or j == k:
                    continue
                p2 += val[(i, k)] * val[(j, k)] + val[(k, i)] * val[(k, j)]
    return p1, p2


def is_legal(x: Sequence[int], d: int) -> bool:
    p1, p2 = penalties(x, d)
    return p1 == 0 and p2 == 0


def decode(x: Sequence[int], d: int) -> tuple[tuple[int, int], ...]:
    """Unordered index pairing selected by x; orientation is discarded.

    Raises IllegalAssignmentError naming the offending node(s) when some node
    is unpaired or paired more than once.
    """
    pairs = variable_pairs(d)
    if len(x) != len(pairs):
        raise DimensionMismatchError(f"expected {len(pairs)} bits, got {len(x)}")
    count = [0] * d
    chosen: set[tuple[int, int]] = set()
    for k, (i, j) in enumerate(pairs):
        if x[k]:
            count[i] += 1
            count[j] += 1
            chosen.add((min(i, j), max(i, j)))
    over = tuple(i for i, c in enumerate(count) if c > 1)
    if over:
        raise IllegalAssignmentError(
            f"node(s) {', '.join(map(str, over))} paired more than once", nodes=over
        )
    under = tuple(i for i, c in enumerate(count) if c == 0)
    if under:
        raise IllegalAssignmentError(
            f"node(s) {', '.join(map(str, under))} left unpaired", nodes=under
        )
    return tuple(sorted(chosen))


def to_ising(q: QuboModel) -> IsingModel:
    """Exact change of variables s = 2x - 1; energies agree for every x."""
    h = [Fraction(0)] * q.dim
    couplings: dict[tuple[int, int], Number] = {}
    offset = Fraction(q.offset)
    for k, a in enumerate(q.linear):
        h[k] += Fraction(a, 2)
        offset += Fraction(a, 2)
    for (k, l), b in q.quadratic.items():
        quarter = Fraction(b, 4)
        couplings[(k, l)] = normalize(quarter)
        h[k] += quarter
        h[l] += quarter
        offset += quarter
    return IsingModel(
        n=q.dim,
        h=tuple(normalize(v) for v in h),
        couplings=couplings,
        offset=normalize(offset),
    )


# --- text and JSON formats --------------------------------------------------
#
# Text format: 'c' comment lines, a header "p qubo 0 <dim> <nDiag> <nElem>",
# <nDiag> diagonal lines "k k a_k", then <nElem> lines "k l b_kl" with k < l.
# The constant offset and penalty ride along in 'c' comments so a write/read
# round trip reproduces the model exactly.

def write_qubo(q: QuboModel) -> str:
    diag = [(k, a) for k, a in enumerate(q.linear) if a != 0]
    offd = [(k, l, b) for (k, l), b in sorted(q.quadratic.items()) if b != 0]
    lines = [f"c offset {format_number(q.offset)}"]
    if q.penalty is not None:
        lines.append(f"c penalty {format_number(q.penalty)}")
    lines.append(f"p qubo 0 {q.dim} {len(diag)} {len(offd)}")
    lines.extend(f"{k} {k} {format_number(a)}" for k, a in diag)
    lines.extend(f"{k} {l} {format_number(b)}" for k, l, b in offd)
    return "\n".join(lines) + "\n"


def read_qubo(text: str) -> QuboModel:
    offset: Number = 0
    penalty: Number | None = None
    dim = None
    n_diag = n_elem = 0
    linear: list[Number] = []
    quadratic: dict[tuple[int, int], Number] = {}
    seen_diag = seen_elem = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "c":
            if len(parts) == 3 and parts[1] == "offset":
                offset = parse_number(parts[2], lineno)
            elif len(parts) == 3 and parts[1] == "penalty":
                penalty = parse_number(parts[2], lineno)
            continue
        if parts[0] == "p":
            if len(parts) != 6 or parts[1] != "qubo":
                raise ParseError("malformed problem header", lineno)
            dim, n_diag, n_elem = int(parts[3]), int(parts[4]), int(parts[5])
            linear = [0] * dim
            continue
        if dim is None:
            raise ParseError("entry before problem header", lineno)
        if len(parts) != 3:
            raise ParseError("expected 'k l value'", lineno)
        k, l = int(parts[0]), int(parts[1])
        value = parse_number(parts[2], lineno)
        if not (0 <= k < dim and 0 <= l < dim):
            raise ParseError(f"index out of range for dim {dim}", lineno)
        if k == l:
            linear[k] = value
            seen_diag += 1
        elif k < l:
            quadratic[(k, l)] = value
            seen_elem += 1
        else:
            raise ParseError("off-diagonal entries need k < l", lineno)
    if dim is None:
        raise ParseError("missing problem header")
    if seen_diag != n_diag or seen_elem != n_elem:
        raise ParseError(
            f"header promised {n_diag} diagonals and {n_elem} elements, "
            f"found {seen_diag} and {seen_elem}"
        )
    d = d_from_dim(dim)
    return QuboModel(
        dim=dim,
        linear=tuple(linear),
        quadratic=quadratic,
        offset=offset,
        penalty=penalty,
        pairs=variable_pairs(d) if d is not None else None,
    )


def qubo_to_json(q: QuboModel) -> dict:
    return {
        "dim": q.dim,
        "offset": to_jsonable(q.offset),
        "penalty": None if q.penalty is None else to_jsonable(q.penalty),
        "linear": [to_jsonable(a) for a in q.linear],
        "quadratic": [[k, l, to_jsonable(b)] for (k, l), b in sorted(q.quadratic.items())],
        "pairs": None if q.pairs is None else [list(p) for p in q.pairs],
    }


def qubo_from_json(obj) -> QuboModel:
    if isinstance(obj, str):
        obj = json.loads(obj)
    return QuboModel(
        dim=int(obj["dim"]),
        linear=tuple(as_exact(a) for a in obj["linear"]),
        quadratic={(int(k), int(l)): as_exact(b) for k, l, b in obj["quadratic"]},
        offset=as_exact(obj["offset"]),
        penalty=None if obj.get("penalty") is None else as_exact(obj["penalty"]),
        pairs=None if obj.get("pairs") is None else tuple((p[0], p[1]) for p in obj["pairs"]),
    )


def ising_to_json(m: IsingModel) -> dict:
    return {
        "n": m.n,
        "offset": to_jsonable(m.offset),
        "h": [to_jsonable(v) for v in m.h],
        "couplings": [[i, j, to_jsonable(v)] for (i, j), v in sorted(m.couplings.items())],
    }


def ising_from_json(obj) -> IsingModel:
    if isinstance(obj, str):
        obj = json.loads(obj)
    return IsingModel(
        n=int(obj["n"]),
        h=tuple(as_exact(v) for v in obj["h"]),
        couplings={(int(i), int(j)): as_exact(v) for i, j, v in obj["couplings"]},
        offset=as_exact(obj["offset"]),
    )
