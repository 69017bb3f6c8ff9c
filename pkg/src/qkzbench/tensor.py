"""Basis bookkeeping and sparse operator algebra on V^(tensor n), V = C^N.

Basis states are tuples J = (j_1, ..., j_n) with letters in 1..N; site 1 is
the leftmost tensor factor and the linear index is big-endian,
index(J) = sum_k (j_k - 1) * N^(n-k).  Operators are stored as row-major
sparse maps and never keep explicit zeros; everything is immutable after
construction.
"""
from __future__ import annotations

import itertools
import math

from .errors import (
    BadSite,
    BadWeight,
    DimensionMismatch,
    DomainMismatch,
    NonInvertibleQ,
    NotBlockDiagonal,
)
from .scalars import EXACT


def weight_of(state, N):
    """Occupation counts (M_1, ..., M_N) of the letters of a basis state."""
    counts = [0] * N
    for a in state:
        counts[a - 1] += 1
    return tuple(counts)


def enumerate_sector(N, n, weights):
    """All length-n states with letter a appearing weights[a-1] times, lex order."""
    weights = tuple(int(m) for m in weights)
    if len(weights) != N or any(m < 0 for m in weights) or sum(weights) != n:
        raise BadWeight(f"{weights} is not a weight of {n} sites with {N} colors")
    out = []
    state = []
    remaining = list(weights)

    def rec():
        if len(state) == n:
            out.append(tuple(state))
            return
        for a in range(1, N + 1):
            if remaining[a - 1]:
                remaining[a - 1] -= 1
                state.append(a)
                rec()
                state.pop()
                remaining[a - 1] += 1

    rec()
    return out


def sector_dimension(weights):
    """n! / (M_1! ... M_N!) for the weight vector (M_1, ..., M_N)."""
    n = sum(weights)
    d = math.factorial(n)
    for m in weights:
        d //= math.factorial(m)
    return d


def all_sectors(N, n):
    """Every weight vector (M_1, ..., M_N) with sum n, lexicographic order."""
    out = []

    def rec(prefix, left):
        if len(prefix) == N - 1:
            out.append(tuple(prefix) + (left,))
            return
        for m in range(left + 1):
            rec(prefix + [m], left - m)

    rec([], n)
    return out


def inversion_length(state):
    """Number of pairs k < l with j_k > j_l.

    For a multi-index this equals the minimal number of adjacent
    transpositions needed to reach it from its sorted form.
    """
    n = len(state)
    return sum(
        1 for k in range(n) for l in range(k + 1, n) if state[k] > state[l]
    )


class Space:
    """The full space V^(tensor n) (sector=None) or one weight sector of it."""

    __slots__ = ("N", "n", "sector", "states", "dim", "_pos")

    def __init__(self, N, n, sector=None):
        if N < 1 or n < 1:
            raise ValueError(f"need N, n >= 1, got N={N}, n={n}")
        self.N = int(N)
        self.n = int(n)
        if sector is None:
            self.sector = None
            self.states = tuple(itertools.product(range(1, N + 1), repeat=n))
        else:
            self.sector = tuple(int(m) for m in sector)
            self.states = tuple(enumerate_sector(N, n, self.sector))
        self.dim = len(self.states)
        self._pos = {J: k for k, J in enumerate(self.states)}

    def index_of(self, state):
        return self._pos[state]

    def key(self):
        return (self.N, self.n, self.sector)

    def __eq__(self, other):
        return isinstance(other, Space) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        if self.sector is None:
            return f"Space(N={self.N}, n={self.n})"
        return f"Space(N={self.N}, n={self.n}, sector={self.sector})"


class ChainOperator:
    """Sparse linear operator on a Space over a fixed scalar domain.

    ``rows[r][c]`` is the matrix element sending basis column c to row r.
    """

    __slots__ = ("space", "domain", "rows")

    def __init__(self, space, domain, rows):
        self.space = space
        self.domain = domain
        self.rows = rows

    # ---------------------------------------------------------------- build
    @classmethod
    def zero(cls, space, domain=EXACT):
        return cls(space, domain, {})

    @classmethod
    def identity(cls, space, domain=EXACT):
        one = domain.one
        return cls(space, domain, {k: {k: one} for k in range(space.dim)})

    @classmethod
    def diagonal(cls, space, values, domain=EXACT):
        """Diagonal operator from a per-basis-state list of scalars."""
        rows = {}
        for k, v in enumerate(values):
            if v != 0:
                rows[k] = {k: v}
        return cls(space, domain, rows)

    @classmethod
    def from_entries(cls, space, entries, domain=EXACT):
        """Accumulate (row, col, value) triples, dropping zeros."""
        rows = {}
        for r, c, v in entries:
            if v == 0:
                continue
            acc = rows.setdefault(r, {})
            s = acc.get(c, 0) + v
            if s == 0:
                del acc[c]
            else:
                acc[c] = s
        return cls(space, domain, {r: row for r, row in rows.items() if row})

    # ---------------------------------------------------------------- query
    def entry(self, r, c):
        return self.rows.get(r, {}).get(c, self.domain.zero)

    def entries(self):
        for r, row in self.rows.items():
            for c, v in row.items():
                yield r, c, v

    @property
    def nnz(self):
        return sum(len(row) for row in self.rows.values())

    def trace(self):
        t = self.domain.zero
        for r, row in self.rows.items():
            v = row.get(r)
            if v is not None:
                t = t + v
        return t

    def is_zero(self):
        return not self.rows

    # -------------------------------------------------------------- algebra
    def _check_compat(self, other):
        if self.space.key() != other.space.key():
            raise DimensionMismatch(f"{self.space} vs {other.space}")
        if self.domain is not other.domain:
            raise DomainMismatch(f"{self.domain} vs {other.domain}")

    def __add__(self, other):
        self._check_compat(other)
        rows = {r: dict(row) for r, row in self.rows.items()}
        for r, orow in other.rows.items():
            row = rows.setdefault(r, {})
            for c, v in orow.items():
                s = row.get(c, 0) + v
                if s == 0:
                    row.pop(c, None)
                else:
                    row[c] = s
        return ChainOperator(
            self.space, self.domain, {r: row for r, row in rows.items() if row}
        )

    def __sub__(self, other):
        return self + other.scaled(-self.domain.one)

    def __neg__(self):
        return self.scaled(-self.domain.one)

    def scaled(self, s):
        if s == 0:
            return ChainOperator.zero(self.space, self.domain)
        rows = {
            r: {c: s * v for c, v in row.items()} for r, row in self.rows.items()
        }
        return ChainOperator(self.space, self.domain, rows)

    def __rmul__(self, s):
        return self.scaled(s)

    def __matmul__(self, other):
        """Matrix product self . other (other is applied first)."""
        self._check_compat(other)
        orows = other.rows
        out = {}
        for r, arow in self.rows.items():
            acc = {}
            for k, v in arow.items():
                brow = orows.get(k)
                if brow is None:
                    continue
                for c, w in brow.items():
                    acc[c] = acc.get(c, 0) + v * w
            acc = {c: s for c, s in acc.items() if s != 0}
            if acc:
                out[r] = acc
        return ChainOperator(self.space, self.domain, out)

    def apply(self, vec):
        """Matrix-vector product; vec is a list over the space's basis."""
        if len(vec) != self.space.dim:
            raise DimensionMismatch(f"vector of length {len(vec)} on {self.space}")
        out = [0] * self.space.dim
        for r, row in self.rows.items():
            s = 0
            for c, v in row.items():
                s += v * vec[c]
            out[r] = s
        return out

    def apply_left(self, cov):
        """Covector-matrix product cov . self."""
        if len(cov) != self.space.dim:
            raise DimensionMismatch(f"covector of length {len(cov)} on {self.space}")
        out = [0] * self.space.dim
        for r, row in self.rows.items():
            w = cov[r]
            if w == 0:
                continue
            for c, v in row.items():
                out[c] += w * v
        return out

    def restrict(self, sector):
        """The block of a full-space operator on one weight sector.

        Raises NotBlockDiagonal if any stored entry couples the sector to
        its complement; entries entirely outside the sector are ignored.
        """
        space = self.space
        if space.sector is not None:
            raise DimensionMismatch("restrict expects a full-space operator")
        sub = Space(space.N, space.n, sector)
        member = [weight_of(J, space.N) == sub.sector for J in space.states]
        pos = {space.index_of(J): k for k, J in enumerate(sub.states)}
        rows = {}
        for r, row in self.rows.items():
            rin = member[r]
            for c, v in row.items():
                cin = member[c]
                if rin and cin:
                    rows.setdefault(pos[r], {})[pos[c]] = v
                elif rin != cin:
                    raise NotBlockDiagonal(
                        f"entry {space.states[r]} <- {space.states[c]} leaves "
                        f"sector {sub.sector}"
                    )
        return ChainOperator(sub, self.domain, rows)

    # ------------------------------------------------------------ compare
    def residual(self, other):
        """Largest entrywise deviation and the basis pair where it occurs."""
        self._check_compat(other)
        dom = self.domain
        worst = dom.residual(dom.zero, dom.zero)
        witness = None
        for r in set(self.rows) | set(other.rows):
            arow = self.rows.get(r, {})
            brow = other.rows.get(r, {})
            for c in set(arow) | set(brow):
                d = dom.residual(arow.get(c, dom.zero), brow.get(c, dom.zero))
                if d > worst:
                    worst = d
                    witness = (self.space.states[r], self.space.states[c])
        return worst, witness

    def equals(self, other):
        res, _ = self.residual(other)
        return res <= self.domain.threshold

    def __eq__(self, other):
        if not isinstance(other, ChainOperator):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def __repr__(self):
        return f"ChainOperator({self.space!r}, nnz={self.nnz})"


# ------------------------------------------------------------------ covectors

def omega(space, domain=EXACT):
    """Covector with every component equal to 1 over the space's basis."""
    return [domain.one] * space.dim


def omega_q(space, q, domain=EXACT):
    """Covector whose component on J is q**inversion_length(J)."""
    if q == 0:
        raise NonInvertibleQ("q must be invertible")
    q = domain.coerce(q)
    return [q ** inversion_length(J) for J in space.states]


def covector_residual(u, v, space, domain=EXACT):
    """Largest componentwise deviation between two covectors and its state."""
    if len(u) != space.dim or len(v) != space.dim:
        raise DimensionMismatch("covector length does not match the space")
    worst = domain.residual(domain.zero, domain.zero)
    witness = None
    for k in range(space.dim):
        d = domain.residual(u[k], v[k])
        if d > worst:
            worst = d
            witness = space.states[k]
    return worst, witness


# ----------------------------------------------------------------- embeddings

def _check_pair(space, i, j):
    if not (1 <= i <= space.n and 1 <= j <= space.n):
        raise BadSite(f"sites ({i}, {j}) outside 1..{space.n}")
    if i == j:
        raise BadSite(f"need two distinct sites, got ({i}, {j})")


def _one_site_columns(op, N):
    """Column map {b: [(a, value)]} of an N x N one-site matrix.

    Accepts either a dict keyed by 1-based (row, col) pairs or a nested
    sequence op[a-1][b-1].
    """
    if isinstance(op, dict):
        items = op.items()
    else:
        items = (
            ((a, b), op[a - 1][b - 1])
            for a in range(1, N + 1)
            for b in range(1, N + 1)
        )
    cols = {}
    for (a, b), v in items:
        if not (1 <= a <= N and 1 <= b <= N):
            raise ValueError(f"matrix indices ({a}, {b}) outside 1..{N}")
        if v == 0:
            continue
        cols.setdefault(b, []).append((a, v))
    return cols


def site_embed(space, op, i, domain=EXACT):
    """Act with an N x N matrix on tensor factor i (1-based), identity elsewhere."""
    if space.sector is not None:
        raise DimensionMismatch("site_embed builds on the full space")
    if not (1 <= i <= space.n):
        raise BadSite(f"site {i} outside 1..{space.n}")
    cols = _one_site_columns(op, space.N)

    def entries():
        for ci, J in enumerate(space.states):
            for a, v in cols.get(J[i - 1], ()):
                yield space.index_of(J[: i - 1] + (a,) + J[i:]), ci, v

    return ChainOperator.from_entries(space, entries(), domain)


def permutation(space, i, j, domain=EXACT):
    """Swap of the tensor factors at sites i and j."""
    _check_pair(space, i, j)
    one = domain.one
    rows = {}
    for ci, J in enumerate(space.states):
        JJ = list(J)
        JJ[i - 1], JJ[j - 1] = JJ[j - 1], JJ[i - 1]
        rows.setdefault(space.index_of(tuple(JJ)), {})[ci] = one
    return ChainOperator(space, domain, rows)


def q_permutation(space, i, j, q, domain=EXACT):
    """Deformed swap: letters (a at site i, b at site j) are exchanged with a
    factor q when a < b, 1/q when a > b, and 1 when a = b.

    Satisfies q_permutation(i, j, q) == q_permutation(j, i, 1/q).
    """
    _check_pair(space, i, j)
    if q == 0:
        raise NonInvertibleQ("q must be invertible")
    q = domain.coerce(q)
    qinv = domain.inverse(q)
    one = domain.one
    rows = {}
    for ci, J in enumerate(space.states):
        a, b = J[i - 1], J[j - 1]
        JJ = list(J)
        JJ[i - 1], JJ[j - 1] = b, a
        v = one if a == b else (q if a < b else qinv)
        rows.setdefault(space.index_of(tuple(JJ)), {})[ci] = v
    return ChainOperator(space, domain, rows)


def two_site_embed(space, i, j, table, domain=EXACT):
    """Operator acting on factors (i, j) from a table {((c, d), (a, b)): v}.

    The column pair (a, b) holds the letters at (site i, site j) and (c, d)
    their image; all other factors are untouched.
    """
    _check_pair(space, i, j)
    bycol = {}
    for ((c, d), (a, b)), v in table.items():
        if v != 0:
            bycol.setdefault((a, b), []).append(((c, d), v))

    def entries():
        for ci, J in enumerate(space.states):
            for (c, d), v in bycol.get((J[i - 1], J[j - 1]), ()):
                JJ = list(J)
                JJ[i - 1], JJ[j - 1] = c, d
                try:
                    ri = space.index_of(tuple(JJ))
                except KeyError:
                    raise NotBlockDiagonal(
                        f"image {tuple(JJ)} of {J} leaves sector {space.sector}"
                    ) from None
                yield ri, ci, v

    return ChainOperator.from_entries(space, entries(), domain)
