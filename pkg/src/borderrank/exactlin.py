"""Exact linear algebra over Q and Q(zeta_3).

Matrices are sparse dictionaries of exact scalars.  Rank over Q goes through
fraction-free (Bareiss) elimination on integers after splitting the matrix
into connected blocks of its nonzero pattern; rank mod p is the cheap
certificate path (always a lower bound for the rational rank).
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np


class ExtensionUnsupported(TypeError):
    """Operation not available for matrices over the cyclotomic extension."""


class BadPrime(ValueError):
    """A stored denominator vanishes modulo the chosen prime."""


class SingularSpan(ValueError):
    """The given vectors do not span; no dual basis exists."""


class Cyc3:
    """Element a + b*z of Q(z) with z a primitive third root of unity (z^2 = -1 - z)."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @staticmethod
    def _coerce(x):
        if isinstance(x, Cyc3):
            return x
        if isinstance(x, (int, Fraction)):
            return Cyc3(x, 0)
        return NotImplemented

    def __add__(self, other):
        o = Cyc3._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Cyc3(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Cyc3(-self.a, -self.b)

    def __sub__(self, other):
        o = Cyc3._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Cyc3(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = Cyc3._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = Cyc3._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        # (a1 + b1 z)(a2 + b2 z) with z^2 = -1 - z
        return Cyc3(self.a * o.a - self.b * o.b, self.a * o.b + self.b * o.a - self.b * o.b)

    __rmul__ = __mul__

    def inverse(self):
        # norm (a + b z)(a + b z^2) = a^2 - a b + b^2
        n = self.a * self.a - self.a * self.b + self.b * self.b
        if n == 0:
            raise ZeroDivisionError("zero element of Q(zeta3)")
        # conjugate a + b z^2 = (a - b) - b z
        return Cyc3((self.a - self.b) / n, -self.b / n)

    def __truediv__(self, other):
        o = Cyc3._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = Cyc3._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inverse()

    def __eq__(self, other):
        o = Cyc3._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def is_rational(self):
        return self.b == 0

    def __repr__(self):
        return f"Cyc3({self.a}, {self.b})"

    def __str__(self):
        return format_scalar(self)


ZETA = Cyc3(0, 1)


def as_scalar(x):
    if isinstance(x, (Fraction, Cyc3)):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not an exact scalar: {x!r}")


def format_scalar(x) -> str:
    x = as_scalar(x)
    if isinstance(x, Cyc3):
        if x.b == 0:
            return format_scalar(x.a)
        sign = "+" if x.b >= 0 else "-"
        return f"{format_scalar(x.a)}{sign}{format_scalar(abs(x.b))}*z"
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_scalar(text: str):
    text = text.strip().replace(" ", "")
    if text.endswith("*z"):
        head = text[:-2]
        cut = next((i for i in range(len(head) - 1, 0, -1) if head[i] in "+-"), -1)
        if cut == -1:
            b = Fraction(head) if head not in ("", "+", "-") else Fraction(head + "1")
            return Cyc3(0, b)
        a = Fraction(head[:cut])
        btxt = head[cut:]
        b = Fraction(btxt if btxt not in ("+", "-") else btxt + "1")
        return Cyc3(a, b)
    return Fraction(text)


class ExactMatrix:
    """Sparse exact matrix; immutable by convention once built."""

    def __init__(self, rows: int, cols: int, entries=None):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        self.rows = rows
        self.cols = cols
        self.entries: dict[tuple[int, int], object] = {}
        if entries:
            for (r, c), v in (entries.items() if isinstance(entries, dict) else entries):
                self.add_to(r, c, v)

    @classmethod
    def from_rows(cls, data) -> "ExactMatrix":
        data = [list(row) for row in data]
        m = cls(len(data), len(data[0]) if data else 0)
        for r, row in enumerate(data):
            for c, v in enumerate(row):
                m.add_to(r, c, v)
        return m

    def add_to(self, r, c, v):
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError((r, c))
        v = as_scalar(v)
        cur = self.entries.get((r, c))
        v = v if cur is None else cur + v
        if v:
            self.entries[(r, c)] = v
        else:
            self.entries.pop((r, c), None)

    def entry(self, r, c):
        return self.entries.get((r, c), Fraction(0))

    def is_cyclotomic(self) -> bool:
        return any(isinstance(v, Cyc3) and not v.is_rational() for v in self.entries.values())

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    def matmul(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        bycol: dict[int, list] = {}
        for (r, c), v in other.entries.items():
            bycol.setdefault(r, []).append((c, v))
        out = ExactMatrix(self.rows, other.cols)
        for (r, c), v in self.entries.items():
            for c2, w in bycol.get(c, ()):
                out.add_to(r, c2, v * w)
        return out

    def to_dense(self):
        data = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            data[r][c] = v
        return data

    def to_json(self) -> dict:
        items = sorted(self.entries.items())
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[r, c, format_scalar(v)] for (r, c), v in items],
        }

    @classmethod
    def from_json(cls, obj) -> "ExactMatrix":
        m = cls(obj["rows"], obj["cols"])
        for r, c, s in obj["entries"]:
            m.add_to(r, c, parse_scalar(s))
        return m

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _blocks(M: ExactMatrix):
    """Split the nonzero pattern into connected row/column blocks."""
    parent: dict = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        px, py = find(x), find(y)
        if px != py:
            parent[px] = py

    for (r, c) in M.entries:
        rk, ck = ("r", r), ("c", c)
        parent.setdefault(rk, rk)
        parent.setdefault(ck, ck)
        union(rk, ck)
    groups: dict = {}
    for (r, c), v in M.entries.items():
        groups.setdefault(find(("r", r)), []).append((r, c, v))
    return list(groups.values())


def _bareiss_rank_int(rows: list[list[int]]) -> int:
    """Fraction-free elimination; pivots chosen by smallest nonzero magnitude."""
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    prev = 1
    r = 0
    for c in range(ncols):
        piv, best = -1, None
        for i in range(r, len(rows)):
            v = rows[i][c]
            if v != 0 and (best is None or abs(v) < best):
                piv, best = i, abs(v)
        if piv < 0:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        rr = rows[r]
        for i in range(r + 1, len(rows)):
            vi = rows[i][c]
            ri = rows[i]
            for j in range(c, ncols):
                ri[j] = (pv * ri[j] - vi * rr[j]) // prev
        prev = pv
        rank += 1
        r += 1
        if r == len(rows):
            break
    return rank


def _field_rank(rows: list[list]) -> int:
    """Plain elimination over a field (used for the cyclotomic extension)."""
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        for i in range(r + 1, len(rows)):
            if rows[i][c]:
                f = rows[i][c] / pv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        rank += 1
        r += 1
        if r == len(rows):
            break
    return rank


def _block_to_int_rows(block):
    rows_idx = sorted({r for r, _, _ in block})
    cols_idx = sorted({c for _, c, _ in block})
    rmap = {r: i for i, r in enumerate(rows_idx)}
    cmap = {c: i for i, c in enumerate(cols_idx)}
    dense = [[Fraction(0)] * len(cols_idx) for _ in rows_idx]
    for r, c, v in block:
        dense[rmap[r]][cmap[c]] = v
    out = []
    for row in dense:
        lcm = 1
        for v in row:
            d = v.denominator
            lcm = lcm * d // _gcd(lcm, d)
        out.append([int(v * lcm) for v in row])
    return out


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def rank_exact(M: ExactMatrix) -> int:
    """Rank over the rationals (or over Q(zeta3) for cyclotomic entries)."""
    if M.is_cyclotomic():
        rows_idx = sorted({r for (r, _) in M.entries})
        dense = [[Cyc3._coerce(M.entry(r, c)) for c in range(M.cols)] for r in rows_idx]
        return _field_rank(dense)
    total = 0
    for block in _blocks(M):
        total += _bareiss_rank_int(_block_to_int_rows(block))
    return total


def _modp_rank_py(rows, p):
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [(v * inv) % p for v in rows[r]]
        for i in range(r + 1, len(rows)):
            f = rows[i][c] % p
            if f:
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        rank += 1
        r += 1
        if r == len(rows):
            break
    return rank


def _modp_rank_np(A: np.ndarray, p: int) -> int:
    m, n = A.shape
    rank = 0
    r = 0
    for c in range(n):
        col = A[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv], :] = A[[piv, r], :]
        inv = pow(int(A[r, c]), -1, p)
        A[r, :] = (A[r, :] * inv) % p
        rest = A[r + 1:, c]
        nzr = np.nonzero(rest)[0]
        if nzr.size:
            idx = r + 1 + nzr
            A[idx, :] = (A[idx, :] - A[idx, c][:, None] * A[r, :][None, :]) % p
        rank += 1
        r += 1
        if r == m:
            break
    return rank


# Primes below 2^19 keep the deferred-reduction float64 elimination exact;
# used by the GEMM-blocked ranks on large dense blocks.
PRIME_POOL_19BIT = [524287, 524269, 524261, 524257, 524243, 524231,
                    524221, 524219, 524203, 524201]


def _floor_mod(x: np.ndarray, p: int, pinv: float) -> np.ndarray:
    """In-place x mod p for float64 arrays; floor-based (np.mod is very slow)."""
    q = np.floor(x * pinv)
    q *= p
    x -= q
    np.add(x, p, out=x, where=x < 0)
    np.subtract(x, p, out=x, where=x >= p)
    return x


def _gemm_modp(L: np.ndarray, U: np.ndarray, p: int, pinv: float) -> np.ndarray:
    """Exact (L @ U) mod p in float64: chunked so partial sums stay below 2^53."""
    step = max(1, int(2**52 // ((p - 1) * (p - 1))))
    if step >= L.shape[1]:
        return _floor_mod(L @ U, p, pinv)
    out = np.zeros((L.shape[0], U.shape[1]), dtype=np.float64)
    for s in range(0, L.shape[1], step):
        out += L[:, s:s + step] @ U[s:s + step, :]
        _floor_mod(out, p, pinv)
    return out


def rank_modp_dense(A: np.ndarray, p: int, panel: int = 128) -> int:
    """Rank of a dense matrix mod p by right-looking blocked elimination.

    The matrix lives in float64 (exact below 2^53) and reductions are
    deferred: the trailing matrix grows by less than p per panel update and
    panel columns accumulate at most panel products of size p^2 before the
    single reduction at their pivot turn, so nearly all arithmetic happens
    inside BLAS products.  Requires p < 2^19 (which keeps every deferred
    bound under 2^53 for the sizes used here)."""
    if p >= 2**19:
        raise ValueError("rank_modp_dense needs p < 2^19")
    pinv = 1.0 / p
    A = np.ascontiguousarray(np.asarray(A, dtype=np.float64))
    _floor_mod(A, p, pinv)
    m, n = A.shape
    r = 0
    c0 = 0
    while c0 < n and r < m:
        b = min(panel, n - c0)
        piv_cols = []
        cur = 0
        for j in range(b):
            # reduce this column in place before the pivot search
            _floor_mod(A[r + cur:, c0 + j], p, pinv)
            col = A[r + cur:, c0 + j]
            nz = np.nonzero(col)[0]
            if nz.size == 0:
                continue
            piv = r + cur + int(nz[0])
            if piv != r + cur:
                A[[r + cur, piv], c0:] = A[[piv, r + cur], c0:]
            # the pivot row's panel segment enters products; reduce it now
            _floor_mod(A[r + cur, c0 + j:c0 + b], p, pinv)
            inv = float(pow(int(A[r + cur, c0 + j]), -1, p))
            below = A[r + cur + 1:, c0 + j]
            if below.size:
                f = below * inv
                _floor_mod(f, p, pinv)
                # raw panel update; entries grow by < p^2 per step
                A[r + cur + 1:, c0 + j:c0 + b] -= f[:, None] * A[r + cur, c0 + j:c0 + b]
                A[r + cur + 1:, c0 + j] = f
            piv_cols.append(j)
            cur += 1
        if cur and c0 + b < n:
            # finish the pivot rows on the trailing columns (small triangular
            # solve); these rows become U12 and must come out reduced
            _floor_mod(A[r, c0 + b:], p, pinv)
            for t in range(1, cur):
                row = r + t
                upd = None
                for s in range(t):
                    f = A[row, c0 + piv_cols[s]]
                    if f:
                        term = f * A[r + s, c0 + b:]
                        upd = term if upd is None else upd + term
                if upd is not None:
                    A[row, c0 + b:] -= upd
                _floor_mod(A[row, c0 + b:], p, pinv)
            if r + cur < m:
                L21 = np.ascontiguousarray(A[r + cur:, [c0 + j for j in piv_cols]])
                U12 = np.ascontiguousarray(A[r:r + cur, c0 + b:])
                upd = _gemm_modp(L21, U12, p, pinv)
                # leave the trailing matrix unreduced; it grows by < p here
                A[r + cur:, c0 + b:] -= upd
        r += cur
        c0 += b
    return r


def rank_mod_p(M: ExactMatrix, p: int) -> int:
    """Rank of M reduced mod p; always <= the rational rank."""
    if M.is_cyclotomic():
        raise ExtensionUnsupported("modular rank is only implemented for rational matrices")
    total = 0
    for block in _blocks(M):
        rows_idx = sorted({r for r, _, _ in block})
        cols_idx = sorted({c for _, c, _ in block})
        rmap = {r: i for i, r in enumerate(rows_idx)}
        cmap = {c: i for i, c in enumerate(cols_idx)}
        reduced = [[0] * len(cols_idx) for _ in rows_idx]
        for r, c, v in block:
            v = v if isinstance(v, Fraction) else Fraction(v)
            if v.denominator % p == 0:
                raise BadPrime(f"denominator {v.denominator} vanishes mod {p}")
            reduced[rmap[r]][cmap[c]] = (v.numerator * pow(v.denominator, -1, p)) % p
        if min(len(rows_idx), len(cols_idx)) >= 64 and p < 2**31:
            total += _modp_rank_np(np.array(reduced, dtype=np.int64), p)
        else:
            total += _modp_rank_py(reduced, p)
    return total


def _rref(rows: list[list]):
    """Reduced row echelon form over the field; returns (rows, pivot columns)."""
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        rows[r] = [v / pv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def kernel_basis(M: ExactMatrix) -> list[list]:
    """Exact basis of the right kernel of M (vectors of length M.cols)."""
    zero = Cyc3(0) if M.is_cyclotomic() else Fraction(0)
    one = Cyc3(1) if M.is_cyclotomic() else Fraction(1)
    dense = [[M.entry(r, c) + zero for c in range(M.cols)] for r in range(M.rows)]
    rows, pivots = _rref(dense)
    pivset = set(pivots)
    basis = []
    for c in range(M.cols):
        if c in pivset:
            continue
        vec = [zero] * M.cols
        vec[c] = one
        for r, pc in enumerate(pivots):
            vec[pc] = -rows[r][c]
        basis.append(vec)
    return basis


def solve_dual_basis(vectors: list[list]) -> list[list]:
    """Given n independent vectors c_i of length n, return x_j with <c_i, x_j> = delta_ij.

    The x_j are the columns of the inverse of the matrix whose rows are the c_i.
    """
    n = len(vectors)
    if n == 0 or any(len(v) != n for v in vectors):
        raise SingularSpan("need n vectors of length n")
    cyc = any(isinstance(as_scalar(x), Cyc3) for v in vectors for x in v)
    zero = Cyc3(0) if cyc else Fraction(0)
    one = Cyc3(1) if cyc else Fraction(1)
    aug = [[as_scalar(x) + zero for x in v] + [one if i == j else zero for j in range(n)]
           for i, v in enumerate(vectors)]
    rows, pivots = _rref(aug)
    if pivots != list(range(n)):
        raise SingularSpan("vectors do not span")
    inverse = [row[n:] for row in rows]
    return [[inverse[i][j] for i in range(n)] for j in range(n)]


# Deterministic pool of 30-bit primes; "random" choices are seeded draws from it.
PRIME_POOL_30BIT = [
    1073741827, 1073741831, 1073741833, 1073741839, 1073741843, 1073741857,
    1073741891, 1073741909, 1073741939, 1073741953, 1073741969, 1073741971,
    1073741987, 1073741993, 1073742037, 1073742053, 1073742073, 1073742077,
    1073742091, 1073742113, 1073742169, 1073742203, 1073742209, 1073742223,
    1073742233, 1073742259, 1073742277, 1073742289, 1073742343, 1073742353,
]

MODULAR_DEFAULT_THRESHOLD = 400  # larger matrices default to the modular path


def pick_primes(count: int, seed: int = 0) -> list[int]:
    rng = random.Random(seed)
    return rng.sample(PRIME_POOL_30BIT, count)


@dataclass
class RankEvidence:
    digest: str
    exact_rank: int | None = None
    modular_ranks: list[tuple[int, int]] = field(default_factory=list)
    method: str = "fraction-free"

    @property
    def rank(self) -> int:
        if self.exact_rank is not None:
            return self.exact_rank
        return max(r for _, r in self.modular_ranks)

    def to_json(self) -> dict:
        out = {"digest": self.digest, "method": self.method,
               "modular": [[p, r] for p, r in self.modular_ranks]}
        if self.exact_rank is not None:
            out["exact"] = self.exact_rank
        return out


def rank_evidence(M: ExactMatrix, exact: bool | None = None, primes: int = 3,
                  seed: int = 0) -> RankEvidence:
    """Gather rank evidence; modular is the fast default for large matrices.

    Modular ranks are lower bounds for the rational rank, which is the sound
    direction for every consumer downstream.
    """
    if exact is None:
        exact = max(M.rows, M.cols) <= MODULAR_DEFAULT_THRESHOLD
    ev = RankEvidence(digest=M.digest())
    if not M.is_cyclotomic():
        ev.modular_ranks = [(p, rank_mod_p(M, p)) for p in pick_primes(primes, seed)]
        ev.method = "modular"
    if exact or M.is_cyclotomic():
        ev.exact_rank = rank_exact(M)
        ev.method = "both" if ev.modular_ranks else "fraction-free"
        assert all(r <= ev.exact_rank for _, r in ev.modular_ranks)
    return ev
