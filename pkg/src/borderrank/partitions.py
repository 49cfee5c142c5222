"""Partition and tableau combinatorics.

Partitions are plain tuples of weakly decreasing positive integers; the
empty partition is ``()``.  Semistandard Young tableaux (SSYT) are tuples
of row tuples.  Everything here is exact integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

Partition = tuple[int, ...]
Filling = tuple[tuple[int, ...], ...]

COLUMN_STRICT = "column-strict"  # add at most one cell per column (horizontal strips)
ROW_STRICT = "row-strict"        # add at most one cell per row (vertical strips)


class NotADiagram(ValueError):
    """Adding the cell does not leave a Young diagram."""


class InvalidPair(ValueError):
    """The two partitions do not differ by exactly one cell."""


@dataclass(frozen=True)
class Cell:
    row: int  # 1-based
    col: int  # 1-based


@dataclass
class PieriExpansion:
    source: Partition
    cells_added: int
    mode: str
    results: list[Partition]  # every multiplicity is 1


def check_partition(parts) -> Partition:
    lam = tuple(int(p) for p in parts)
    for i, p in enumerate(lam):
        if p < 1:
            raise ValueError(f"partition parts must be positive: {lam}")
        if i + 1 < len(lam) and lam[i + 1] > p:
            raise ValueError(f"parts must be weakly decreasing: {lam}")
    return lam


def parse_partition(text: str) -> Partition:
    text = text.strip()
    if text in ("", "-"):
        return ()
    return check_partition(int(t) for t in text.split(","))


def format_partition(lam: Partition) -> str:
    return ",".join(str(p) for p in lam) if lam else "-"


def transpose(lam: Partition) -> Partition:
    if not lam:
        return ()
    return tuple(sum(1 for p in lam if p >= j) for j in range(1, lam[0] + 1))


def contains(lam: Partition, cell: Cell) -> bool:
    return cell.row <= len(lam) and lam[cell.row - 1] >= cell.col


def dim_schur(lam: Partition, k: int) -> int:
    """Dimension of the Schur module S_lam(C^k) by the hook content formula.

    Returns 0 when lam has more than k rows (the module is zero there).
    """
    lam = tuple(lam)
    if len(lam) > k:
        return 0
    lamt = transpose(lam)
    d = Fraction(1)
    for i, row in enumerate(lam, start=1):
        for j in range(1, row + 1):
            hook = (row - j) + (lamt[j - 1] - i) + 1
            d *= Fraction(k + j - i, hook)
    assert d.denominator == 1
    return int(d)


def add_cell(lam: Partition, row: int) -> Partition:
    """Add one cell to row ``row`` (1-based); a new row is appended when row = len+1."""
    if row < 1:
        raise NotADiagram(f"row must be >= 1, got {row}")
    if row > len(lam) + 1:
        raise NotADiagram(f"cannot add to row {row} of {lam}")
    if row == len(lam) + 1:
        return lam + (1,)
    nu = list(lam)
    nu[row - 1] += 1
    if row > 1 and nu[row - 1] > nu[row - 2]:
        raise NotADiagram(f"adding to row {row} of {lam} breaks monotonicity")
    return tuple(nu)


def added_row(mu: Partition, nu: Partition) -> int:
    """Row index j such that nu = mu + one cell in row j; InvalidPair otherwise."""
    try:
        check_partition(mu)
        check_partition(nu)
    except ValueError as exc:
        raise InvalidPair(str(exc)) from exc
    if sum(nu) != sum(mu) + 1:
        raise InvalidPair(f"{nu} is not {mu} plus one cell")
    rows = max(len(mu), len(nu))
    diff = [(nu[i] if i < len(nu) else 0) - (mu[i] if i < len(mu) else 0) for i in range(rows)]
    js = [i + 1 for i, d in enumerate(diff) if d != 0]
    if len(js) != 1 or diff[js[0] - 1] != 1:
        raise InvalidPair(f"{nu} is not {mu} plus one cell")
    return js[0]


def added_cells(mu: Partition, nu: Partition) -> tuple[Cell, Cell | None]:
    """The added cell y, and the cell x directly above it (None when y is in row 1)."""
    j = added_row(mu, nu)
    y = Cell(j, nu[j - 1])
    x = Cell(j - 1, nu[j - 1]) if j > 1 else None
    return y, x


def _horizontal_additions(lam: Partition, p: int) -> list[Partition]:
    # nu with nu/lam a horizontal strip of size p: lam_{i-1} >= nu_i >= lam_i
    rows = len(lam) + 1
    out = []

    def rec(i, remaining, prefix):
        if i > rows:
            if remaining == 0:
                out.append(tuple(x for x in prefix if x > 0))
            return
        lo = lam[i - 1] if i - 1 < len(lam) else 0
        hi = lo + remaining if i == 1 else min(lam[i - 2], lo + remaining)
        for v in range(lo, hi + 1):
            rec(i + 1, remaining - (v - lo), prefix + [v])

    rec(1, p, [])
    return out


def _vertical_additions(lam: Partition, p: int) -> list[Partition]:
    # nu with nu/lam a vertical strip of size p: nu_i - lam_i in {0, 1}
    rows = len(lam) + p
    out = []

    def rec(i, remaining, prefix):
        if remaining == 0:
            cand = prefix + [lam[j] for j in range(i - 1, len(lam))]
            nu = tuple(x for x in cand if x > 0)
            if all(nu[a] >= nu[a + 1] for a in range(len(nu) - 1)):
                out.append(nu)
            return
        if i > rows:
            return
        base = lam[i - 1] if i - 1 < len(lam) else 0
        for inc in (0, 1):
            v = base + inc
            if prefix and v > prefix[-1]:
                continue
            if v == 0 and remaining > 0 and inc == 0 and i > len(lam):
                continue  # trailing zeros cannot precede later added cells
            rec(i + 1, remaining - inc, prefix + [v])

    rec(1, p, [])
    return sorted(set(out), reverse=True)


def pieri_expand(lam: Partition, p: int, mode: str, k: int) -> PieriExpansion:
    """All partitions obtained by adding p cells to lam under the mode's strip rule.

    Column-strict adds at most one cell per column (the expansion of a tensor
    with the p-th symmetric power); row-strict at most one per row (p-th
    exterior power).  Results are filtered to length <= k.
    """
    if p < 0:
        raise ValueError("p must be >= 0")
    if p == 0:
        results = [tuple(lam)]
    elif mode == COLUMN_STRICT:
        results = _horizontal_additions(tuple(lam), p)
    elif mode == ROW_STRICT:
        results = _vertical_additions(tuple(lam), p)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    results = sorted({nu for nu in results if len(nu) <= k}, reverse=True)
    return PieriExpansion(tuple(lam), p, mode, results)


def horizontal_strip_removals(lam: Partition) -> list[Partition]:
    """All pi contained in lam with lam/pi a horizontal strip (any size)."""
    lam = tuple(lam)
    out = []

    def rec(i, prefix):
        if i > len(lam):
            out.append(tuple(x for x in prefix if x > 0))
            return
        lo = lam[i] if i < len(lam) else 0
        hi = lam[i - 1]
        if prefix:
            hi = min(hi, prefix[-1])
        for v in range(lo, hi + 1):
            rec(i + 1, prefix + [v])

    rec(1, [])
    return out


def _candidate_outer_shapes(lam: Partition, total: int, max_len: int, max_width: int):
    out = []

    def rec(i, remaining, prefix):
        if remaining == 0:
            cand = prefix + [lam[j] for j in range(i - 1, len(lam))]
            nu = tuple(x for x in cand if x > 0)
            if len(nu) <= max_len and all(nu[a] >= nu[a + 1] for a in range(len(nu) - 1)):
                out.append(nu)
            return
        if i > max_len:
            return
        base = lam[i - 1] if i - 1 < len(lam) else 0
        hi = prefix[-1] if prefix else max_width
        for v in range(base, hi + 1):
            rec(i + 1, remaining - (v - base), prefix + [v])

    rec(1, total, [])
    return sorted(set(out), reverse=True)


def lr_multiplicities(lam: Partition, mu: Partition, k: int) -> dict[Partition, int]:
    """Littlewood-Richardson multiplicities of S_nu in S_lam (x) S_mu over C^k.

    Computed by direct enumeration of LR skew tableaux of shape nu/lam and
    content mu (semistandard, reverse reading word a lattice word).  Instances
    here are tiny, so brute enumeration is the right tool.
    """
    lam, mu = tuple(lam), tuple(mu)
    if dim_schur(lam, k) == 0 or dim_schur(mu, k) == 0:
        return {}
    width = (lam[0] if lam else 0) + (mu[0] if mu else 0)
    result: dict[Partition, int] = {}
    for nu in _candidate_outer_shapes(lam, sum(mu), k, width):
        m = _count_lr_tableaux(lam, mu, nu)
        if m:
            result[nu] = m
    return result


def _count_lr_tableaux(lam: Partition, mu: Partition, nu: Partition) -> int:
    # Fill nu/lam in reverse reading order (rows top to bottom, right to left):
    # the right and upper neighbours of each cell are already placed, and the
    # lattice condition can be enforced prefix by prefix.
    cells = []
    for i in range(len(nu)):
        inner = lam[i] if i < len(lam) else 0
        for j in range(nu[i] - 1, inner - 1, -1):
            cells.append((i, j))
    counts = [0] * (len(mu) + 2)
    grid: dict[tuple[int, int], int] = {}

    def rec(idx):
        if idx == len(cells):
            return 1
        i, j = cells[idx]
        right = grid.get((i, j + 1))
        up = grid.get((i - 1, j))
        total = 0
        for v in range(1, len(mu) + 1):
            if counts[v] >= mu[v - 1]:
                continue
            if v > 1 and counts[v] + 1 > counts[v - 1]:
                continue  # reverse reading word must stay a lattice word
            if right is not None and v > right:
                continue  # rows weakly increase
            if up is not None and v <= up:
                continue  # columns strictly increase
            grid[(i, j)] = v
            counts[v] += 1
            total += rec(idx + 1)
            counts[v] -= 1
            del grid[(i, j)]
        return total

    return rec(0)


def lr_iterated(shapes: list[Partition], k: int) -> dict[Partition, int]:
    """Multiplicities in the iterated tensor product of the given Schur modules."""
    acc: dict[Partition, int] = {tuple(shapes[0]): 1}
    for sh in shapes[1:]:
        nxt: dict[Partition, int] = {}
        for lam, m in acc.items():
            for nu, c in lr_multiplicities(lam, tuple(sh), k).items():
                nxt[nu] = nxt.get(nu, 0) + m * c
        acc = nxt
    return acc


def enumerate_ssyt(lam: Partition, k: int) -> list[Filling]:
    """All SSYT of shape lam with entries in 1..k, in reading-word lex order.

    The order (sort by the row reading word) is the canonical basis order used
    for every matrix built downstream.
    """
    lam = tuple(lam)
    if len(lam) > k:
        return []
    if not lam:
        return [()]
    rows: list[tuple[int, ...]] = []
    out: list[Filling] = []

    def rec_row(i):
        if i == len(lam):
            out.append(tuple(rows))
            return
        above = rows[i - 1] if i > 0 else None

        def rec_cell(j, row):
            if j == lam[i]:
                rows.append(tuple(row))
                rec_row(i + 1)
                rows.pop()
                return
            lo = row[j - 1] if j > 0 else 1
            if above is not None and j < len(above):
                lo = max(lo, above[j] + 1)
            for v in range(lo, k + 1):
                rec_cell(j + 1, row + [v])

        rec_cell(0, [])

    rec_row(0)
    out.sort(key=lambda f: tuple(x for row in f for x in row))
    return out


def predicted_generic_rank(mu: Partition, nu: Partition, k: int) -> tuple[int, int, int]:
    """(rank, kernel dim, cokernel dim) of any nonzero matrix in the invariant space.

    Splitting off the line spanned by v leaves a hyperplane H of dimension
    k-1, and both modules decompose over H into horizontal-strip removals.
    A removal pi of nu contributes to the image iff it contains the cell x
    directly above the added cell y and not y itself; removals of mu missing
    x make up the kernel, removals of nu containing y the cokernel.  When y
    is in row 1 every map in the space is injective and the branch returns
    full column rank directly.
    """
    mu, nu = tuple(mu), tuple(nu)
    if len(nu) > k:
        raise InvalidPair(f"{nu} has more than {k} rows")
    y, x = added_cells(mu, nu)
    m = dim_schur(mu, k)
    n = dim_schur(nu, k)
    if x is None:
        return m, 0, n - m
    rank = 0
    for pi in horizontal_strip_removals(nu):
        if contains(pi, x) and not contains(pi, y):
            rank += dim_schur(pi, k - 1)
    ker = 0
    for pi in horizontal_strip_removals(mu):
        if not contains(pi, x):
            ker += dim_schur(pi, k - 1)
    coker = 0
    for pi in horizontal_strip_removals(nu):
        if contains(pi, y):
            coker += dim_schur(pi, k - 1)
    assert rank + ker == m and rank + coker == n
    return rank, ker, coker


def two_row_family(a: int, b: int) -> tuple[Partition, Partition]:
    """The two-row pair mu = (a+b+1, a), nu = (a+b+1, a+1) studied at k = 3."""
    mu = (a + b + 1, a) if a > 0 else (a + b + 1,)
    nu = (a + b + 1, a + 1)
    return mu, nu


def two_row_generic_rank(a: int, b: int) -> tuple[int, int, int]:
    """Closed forms for image/kernel/cokernel dimensions of the two-row family."""
    rank = comb(a + b + 4, 3) - comb(a + 3, 3) - comb(b + 3, 3)
    return rank, comb(a + 2, 2), comb(b + 2, 2)
