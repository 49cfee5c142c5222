"""Schur modules realized on the semistandard tableau basis.

A filling of shape lam stands for the image of the tensor product of its
column wedges in the quotient realization of the Schur module, so column
antisymmetry and the exchange (Garnir) relations hold by fiat.  The
straightening routine rewrites any filling as an integer combination of
SSYT and is the single computational kernel every other module leans on.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .exactlin import Cyc3, as_scalar, format_scalar
from .partitions import (
    Filling,
    InvalidPair,
    Partition,
    add_cell,
    added_row,
    check_partition,
    dim_schur,
    enumerate_ssyt,
)


class MixedWeight(ValueError):
    """The vector is not homogeneous in content (or is zero)."""


def shape_of(filling: Filling) -> Partition:
    return tuple(len(row) for row in filling)


def _columns(filling: Filling) -> list[tuple[int, ...]]:
    if not filling:
        return []
    width = len(filling[0])
    return [tuple(row[c] for row in filling if len(row) > c) for c in range(width)]


def _from_columns(cols: list[list[int]]) -> Filling:
    nrows = len(cols[0]) if cols else 0
    return tuple(tuple(col[r] for col in cols if len(col) > r) for r in range(nrows))


def _sort_columns(filling: Filling):
    """Ascending-sort each column; returns (sorted filling, sign) or (None, 0)."""
    cols = []
    sign = 1
    for col in _columns(filling):
        if len(set(col)) != len(col):
            return None, 0
        inv = sum(1 for a in range(len(col)) for b in range(a + 1, len(col)) if col[a] > col[b])
        if inv % 2:
            sign = -sign
        cols.append(sorted(col))
    return _from_columns(cols), sign


def _first_violation(filling: Filling):
    for r, row in enumerate(filling):
        for c in range(len(row) - 1):
            if row[c] > row[c + 1]:
                return r, c
    return None


def _perm_sign(seq_from, seq_to):
    # both sequences hold the same distinct values
    pos = {v: i for i, v in enumerate(seq_from)}
    perm = [pos[v] for v in seq_to]
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


_STRAIGHTEN_CACHE: dict[Filling, dict[Filling, int]] = {}
# Append-only cache; concurrent readers are safe under the GIL.


def straighten_filling(filling: Filling) -> dict[Filling, int]:
    """Express a filling in the SSYT basis with integer coefficients."""
    sorted_f, sign = _sort_columns(filling)
    if sorted_f is None:
        return {}
    result = _straighten_sorted(sorted_f)
    return {t: sign * c for t, c in result.items()}


def _straighten_sorted(filling: Filling) -> dict[Filling, int]:
    cached = _STRAIGHTEN_CACHE.get(filling)
    if cached is not None:
        return cached
    viol = _first_violation(filling)
    if viol is None:
        out = {filling: 1}
        _STRAIGHTEN_CACHE[filling] = out
        return out
    r, c = viol
    cols = _columns(filling)
    left, right = list(cols[c]), list(cols[c + 1])
    # exchange the bottom of the left column (rows r..end) against the top of
    # the right column (rows 0..r); all p+1 values are distinct since
    # min(bottom-left) > max(top-right) at a violation
    A = left[r:]
    B = right[: r + 1]
    pool = A + B
    n, asz = len(pool), len(A)
    acc: dict[Filling, int] = {}
    from itertools import combinations

    for pick in combinations(range(n), asz):
        if pick == tuple(range(asz)):
            continue  # the identity split is the term being rewritten
        newA = sorted(pool[i] for i in pick)
        rest = [pool[i] for i in range(n) if i not in pick]
        newB = sorted(rest)
        split_sign = _perm_sign(pool, newA + newB)
        ncols = [list(col) for col in cols]
        ncols[c] = left[:r] + newA
        ncols[c + 1] = newB + right[r + 1:]
        term = _from_columns(ncols)
        tsorted, tsign = _sort_columns(term)
        if tsorted is None:
            continue
        for t, coeff in _straighten_sorted(tsorted).items():
            val = acc.get(t, 0) - split_sign * tsign * coeff
            if val:
                acc[t] = val
            else:
                acc.pop(t, None)
    _STRAIGHTEN_CACHE[filling] = acc
    return acc


class TableauVector:
    """Formal exact linear combination of SSYT of a fixed shape."""

    def __init__(self, shape: Partition, k: int, coeffs=None):
        self.shape = tuple(shape)
        self.k = k
        self.coeffs: dict[Filling, object] = {}
        if coeffs:
            for t, v in coeffs.items():
                self.add_term(t, v)

    def add_term(self, tableau: Filling, coeff):
        coeff = as_scalar(coeff)
        cur = self.coeffs.get(tableau)
        coeff = coeff if cur is None else cur + coeff
        if coeff:
            self.coeffs[tableau] = coeff
        else:
            self.coeffs.pop(tableau, None)

    def is_zero(self) -> bool:
        return not self.coeffs

    def scaled(self, factor) -> "TableauVector":
        factor = as_scalar(factor)
        out = TableauVector(self.shape, self.k)
        if factor:
            for t, v in self.coeffs.items():
                out.add_term(t, v * factor)
        return out

    def plus(self, other: "TableauVector") -> "TableauVector":
        out = TableauVector(self.shape, self.k, dict(self.coeffs))
        for t, v in other.coeffs.items():
            out.add_term(t, v)
        return out

    def __eq__(self, other):
        return (isinstance(other, TableauVector) and self.shape == other.shape
                and self.k == other.k and self.coeffs == other.coeffs)

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for t in sorted(self.coeffs):
            c = self.coeffs[t]
            rows = "[" + ",".join("[" + ",".join(map(str, row)) + "]" for row in t) + "]"
            parts.append(f"{format_scalar(c)}*{rows}")
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {
            "shape": list(self.shape),
            "k": self.k,
            "terms": [{"coeff": format_scalar(self.coeffs[t]), "tableau": [list(r) for r in t]}
                      for t in sorted(self.coeffs)],
        }


def straighten(filling: Filling, k: int) -> TableauVector:
    """Straighten an arbitrary filling; idempotent on SSYT, zero on repeated columns."""
    filling = tuple(tuple(int(x) for x in row) for row in filling)
    shape = shape_of(filling)
    check_partition(shape)
    for row in filling:
        for x in row:
            if not 1 <= x <= k:
                raise ValueError(f"entry {x} out of range 1..{k}")
    return TableauVector(shape, k, straighten_filling(filling))


def weight(v: TableauVector) -> tuple[int, ...]:
    """Content vector shared by all basis tableaux; MixedWeight otherwise."""
    if v.is_zero():
        raise MixedWeight("weight of the zero vector is undefined")
    w = None
    for t in v.coeffs:
        cw = [0] * v.k
        for row in t:
            for x in row:
                cw[x - 1] += 1
        cw = tuple(cw)
        if w is None:
            w = cw
        elif w != cw:
            raise MixedWeight(f"mixed contents {w} and {cw}")
    return w


def content_of(filling: Filling, k: int) -> tuple[int, ...]:
    w = [0] * k
    for row in filling:
        for x in row:
            w[x - 1] += 1
    return tuple(w)


def _replace_occurrences(tableau: Filling, old: int, new: int):
    """Yield fillings with one occurrence of ``old`` replaced by ``new``."""
    for r, row in enumerate(tableau):
        for c, x in enumerate(row):
            if x == old:
                new_row = row[:c] + (new,) + row[c + 1:]
                yield tableau[:r] + (new_row,) + tableau[r + 1:]


def raising_action(i: int, v: TableauVector) -> TableauVector:
    """The raising operator E_{i,i+1}: replace one entry i+1 by i and straighten."""
    out = TableauVector(v.shape, v.k)
    for t, coeff in v.coeffs.items():
        for f in _replace_occurrences(t, i + 1, i):
            for t2, c2 in straighten_filling(f).items():
                out.add_term(t2, coeff * c2)
    return out


def lowering_action(i: int, v: TableauVector) -> TableauVector:
    """The lowering operator F_{i,i+1}: replace one entry i by i+1 and straighten."""
    out = TableauVector(v.shape, v.k)
    for t, coeff in v.coeffs.items():
        for f in _replace_occurrences(t, i, i + 1):
            for t2, c2 in straighten_filling(f).items():
                out.add_term(t2, coeff * c2)
    return out


def gl_action(g, v: TableauVector) -> TableauVector:
    """Multilinear substitution e_j -> sum_i g[i][j] e_i in every filling."""
    k = v.k
    g = [[as_scalar(x) for x in row] for row in g]
    out = TableauVector(v.shape, k)
    for t, coeff in v.coeffs.items():
        cells = [(r, c) for r, row in enumerate(t) for c in range(len(row))]
        # expand cell by cell, keeping only nonzero branches
        partial: list[tuple[Filling, object]] = [(t, coeff)]
        for (r, c) in cells:
            nxt: dict[Filling, object] = {}
            for filling, cf in partial:
                j = t[r][c]
                for i in range(k):
                    gij = g[i][j - 1]
                    if not gij:
                        continue
                    row = filling[r]
                    nf = filling[:r] + (row[:c] + (i + 1,) + row[c + 1:],) + filling[r + 1:]
                    val = nxt.get(nf)
                    val = cf * gij if val is None else val + cf * gij
                    if val:
                        nxt[nf] = val
                    else:
                        nxt.pop(nf, None)
            partial = list(nxt.items())
        for filling, cf in partial:
            for t2, c2 in straighten_filling(filling).items():
                out.add_term(t2, cf * c2)
    return out


def _append_cell(tau: Filling, j: int, i: int) -> Filling:
    if j == len(tau) + 1:
        return tau + ((i,),)
    return tau[:j - 1] + (tau[j - 1] + (i,),) + tau[j:]


# ---------------------------------------------------------------------------
# The equivariant single-cell maps.
#
# Appending the new entry to the end of row j and straightening defines an
# equivariant map S_mu (x) V -> S_nu only when the new cell sits in the last
# column (the exchange relations between the lengthened column and a column
# to its right are not preserved otherwise).  In the general position the
# unique equivariant map is computed instead: solve for the highest weight
# vector of the nu-isotypic inside the product, then propagate with lowering
# operators.  Both routes are normalized to primitive integer coefficients.
# ---------------------------------------------------------------------------


def _replace_map(vec: dict, old: int, new: int, sign: int) -> dict:
    out: dict = {}
    for t, c in vec.items():
        for f in _replace_occurrences(t, old, new):
            for t2, c2 in straighten_filling(f).items():
                val = out.get(t2, 0) + c * c2 * sign
                if val:
                    out[t2] = val
                else:
                    out.pop(t2, None)
    return out


def _tab_raise(vec, a, dual):
    return _replace_map(vec, a, a + 1, -1) if dual else _replace_map(vec, a + 1, a, 1)


def _tab_lower(vec, a, dual):
    return _replace_map(vec, a + 1, a, -1) if dual else _replace_map(vec, a, a + 1, 1)


_SHAPE_OPS_CACHE: dict = {}


def _shape_ops(shape: Partition, k: int, dual: bool):
    """Sparse raising/lowering matrices on SSYT indices of the shape.

    Returns (basis, index, raise_ops, lower_ops) where each op is a list over
    a = 1..k-1 of dicts column-index -> list of (row-index, coeff)."""
    key = (tuple(shape), k, dual)
    cached = _SHAPE_OPS_CACHE.get(key)
    if cached is not None:
        return cached
    basis = enumerate_ssyt(tuple(shape), k)
    index = {t: i for i, t in enumerate(basis)}
    raise_ops = [dict() for _ in range(k)]
    lower_ops = [dict() for _ in range(k)]
    for ti, t in enumerate(basis):
        for a in range(1, k):
            up = _tab_raise({t: 1}, a, dual)
            if up:
                raise_ops[a][ti] = [(index[t2], c) for t2, c in up.items()]
            dn = _tab_lower({t: 1}, a, dual)
            if dn:
                lower_ops[a][ti] = [(index[t2], c) for t2, c in dn.items()]
    out = (basis, index, raise_ops, lower_ops)
    _SHAPE_OPS_CACHE[key] = out
    return out


def _prod_ops(mu: Partition, k: int, dual: bool):
    """Sparse E_a / F_a matrices on the product basis, indexed ti * k + (i - 1)."""
    key = (tuple(mu), k, dual, "prod")
    cached = _SHAPE_OPS_CACHE.get(key)
    if cached is not None:
        return cached
    basis, _, raise_mu, lower_mu = _shape_ops(mu, k, dual)
    m = len(basis)
    raise_ops = [dict() for _ in range(k)]
    lower_ops = [dict() for _ in range(k)]
    for a in range(1, k):
        # vector factor: raising sends index a+1 -> a (primal) or a -> a+1 with
        # sign -1 (dual); lowering is the reverse
        if dual:
            vec_raise = (a, a + 1, -1)
            vec_lower = (a + 1, a, -1)
        else:
            vec_raise = (a + 1, a, 1)
            vec_lower = (a, a + 1, 1)
        for ti in range(m):
            for ops, mu_mat, (old, new, sign) in (
                (raise_ops, raise_mu[a], vec_raise),
                (lower_ops, lower_mu[a], vec_lower),
            ):
                for i in range(1, k + 1):
                    col = ti * k + (i - 1)
                    entries = []
                    for (tj, c) in mu_mat.get(ti, ()):
                        entries.append((tj * k + (i - 1), c))
                    if i == old:
                        entries.append((ti * k + (new - 1), sign))
                    if entries:
                        ops[a][col] = entries
    out = (raise_ops, lower_ops)
    _SHAPE_OPS_CACHE[key] = out
    return out


def _apply_op(op: dict, vec: dict) -> dict:
    out: dict = {}
    for col, c in vec.items():
        for row, m in op.get(col, ()):
            val = out.get(row, 0) + c * m
            if val:
                out[row] = val
            else:
                out.pop(row, None)
    return out


def _weight_key(tau: Filling, i: int, k: int) -> tuple[int, ...]:
    w = [0] * k
    for row in tau:
        for x in row:
            w[x - 1] += 1
    w[i - 1] += 1
    return tuple(w)


def _hw_content(nu: Partition, k: int, dual: bool) -> tuple[int, ...]:
    padded = list(nu) + [0] * (k - len(nu))
    return tuple(reversed(padded)) if dual else tuple(padded)


def _solve_hw(nu: Partition, k: int, dual: bool) -> dict:
    """The raising-killed vector of the shape-nu realization, as SSYT coefficients."""
    if not dual:
        t = tuple(tuple(i + 1 for _ in range(row)) for i, row in enumerate(nu))
        return {t: Fraction(1)}
    target = _hw_content(nu, k, dual)
    basis = [t for t in enumerate_ssyt(nu, k) if content_of(t, k) == target]
    from .exactlin import ExactMatrix, kernel_basis

    rows = []
    row_index: dict = {}
    entries = []
    for ci, t in enumerate(basis):
        for a in range(1, k):
            img = _tab_raise({t: Fraction(1)}, a, dual)
            for t2, c in img.items():
                key = (a, t2)
                r = row_index.setdefault(key, len(row_index))
                entries.append((r, ci, c))
    M = ExactMatrix(max(len(row_index), 1), len(basis))
    for r, c, v in entries:
        M.add_to(r, c, v)
    ker = kernel_basis(M)
    assert len(ker) == 1, f"expected a one-dimensional highest weight space for {nu}"
    vec = {basis[i]: ker[0][i] for i in range(len(basis)) if ker[0][i]}
    return _primitive_dict(vec)


def _primitive_dict(vec: dict) -> dict:
    if not vec:
        return vec
    den = 1
    for c in vec.values():
        den = den * c.denominator // gcd(den, c.denominator)
    nums = [int(c * den) for c in vec.values()]
    g = 0
    for x in nums:
        g = gcd(g, x)
    scale = Fraction(den, g)
    first_key = min(vec)
    if vec[first_key] * scale < 0:
        scale = -scale
    return {t: c * scale for t, c in vec.items()}


_INCLUSION_CACHE: dict = {}


def _ssyt_contents(shape: Partition, k: int) -> list[tuple[int, ...]]:
    return [content_of(t, k) for t in enumerate_ssyt(shape, k)]


def _transpose_neg(ops: list[dict]) -> list[dict]:
    out: list[dict] = [dict() for _ in ops]
    for a, mat in enumerate(ops):
        t = out[a]
        for col, entries in mat.items():
            for row, c in entries:
                t.setdefault(row, []).append((col, -c))
    return out


def _functional_shape_ops(shape: Partition, k: int):
    """Raising/lowering on the coordinates of functionals dual to the SSYT
    basis: the negated transposes of the primal operator matrices."""
    key = (tuple(shape), k, "functional")
    cached = _SHAPE_OPS_CACHE.get(key)
    if cached is not None:
        return cached
    _, _, raise_ops, lower_ops = _shape_ops(shape, k, False)
    out = (_transpose_neg(raise_ops), _transpose_neg(lower_ops))
    _SHAPE_OPS_CACHE[key] = out
    return out


def _functional_prod_ops(mu: Partition, k: int):
    key = (tuple(mu), k, "functional-prod")
    cached = _SHAPE_OPS_CACHE.get(key)
    if cached is not None:
        return cached
    raise_ops, lower_ops = _prod_ops(mu, k, False)
    out = (_transpose_neg(raise_ops), _transpose_neg(lower_ops))
    _SHAPE_OPS_CACHE[key] = out
    return out


def _solve_intertwiner(n: int, side_raise, side_lower, side_content,
                       prod_raise, prod_lower, prod_content,
                       hw_side: dict, label: str) -> list[dict]:
    """Shared highest-weight-solve / lowering-propagation core.

    Given a one-dimensional raising-kernel seed on the side module, finds its
    counterpart in the product space and propagates both with lowering
    operators until every weight space of the side module is covered; then
    expresses the image of each basis coordinate by per-weight solves."""
    from .exactlin import ExactMatrix, _rref, kernel_basis

    target = side_content[next(iter(hw_side))]
    cand = [idx for idx, w in prod_content.items() if w == target]
    cand_pos = {idx: p for p, idx in enumerate(cand)}
    row_index: dict = {}
    entries = []
    for idx in cand:
        for a in range(1, len(prod_raise)):
            for row, c in prod_raise[a].get(idx, ()):
                r = row_index.setdefault((a, row), len(row_index))
                entries.append((r, cand_pos[idx], c))
    M = ExactMatrix(max(len(row_index), 1), len(cand))
    for r, c, v in entries:
        M.add_to(r, c, v)
    ker = kernel_basis(M)
    assert len(ker) == 1, f"expected a one-dimensional seed space for {label}"
    hw_prod = {cand[i]: ker[0][i] for i in range(len(cand)) if ker[0][i]}

    by_weight: dict[tuple, list[int]] = {}
    for si in range(n):
        by_weight.setdefault(side_content[si], []).append(si)
    collected: dict[tuple, list] = {}
    echelon: dict[tuple, list] = {}

    def try_insert(v: dict, w: dict) -> bool:
        wt = side_content[next(iter(v))]
        sis = by_weight[wt]
        vec = [v.get(si, Fraction(0)) for si in sis]
        rows = echelon.setdefault(wt, [])
        for row in rows:
            piv = next(i for i, x in enumerate(row) if x)
            if vec[piv]:
                f = vec[piv] / row[piv]
                vec = [x - f * y for x, y in zip(vec, row)]
        if not any(vec):
            return False
        rows.append(vec)
        collected.setdefault(wt, []).append((v, w))
        return True

    queue = [(hw_side, hw_prod)]
    try_insert(hw_side, hw_prod)
    total, qi = 1, 0
    nops = len(side_lower)
    while qi < len(queue) and total < n:
        v, w = queue[qi]
        qi += 1
        for a in range(1, nops):
            v2 = _apply_op(side_lower[a], v)
            if not v2:
                continue
            w2 = _apply_op(prod_lower[a], w)
            if try_insert(v2, w2):
                queue.append((v2, w2))
                total += 1
                if total == n:
                    break
    assert total == n, f"lowering closure incomplete for {label}"

    result: list[dict] = [None] * n
    for wt, sis in by_weight.items():
        pairs = collected[wt]
        d = len(sis)
        mat = [[pairs[i][0].get(sis[r], Fraction(0)) for i in range(d)] for r in range(d)]
        for r in range(d):
            mat[r].extend(Fraction(1) if r == j else Fraction(0) for j in range(d))
        rows, pivots = _rref(mat)
        assert pivots == list(range(d)), f"weight block is singular for {label} at {wt}"
        for pos, si in enumerate(sis):
            img: dict = {}
            for i in range(d):
                coeff = rows[i][d + pos]
                if coeff:
                    for idx, c in pairs[i][1].items():
                        val = img.get(idx, Fraction(0)) + coeff * c
                        if val:
                            img[idx] = val
                        else:
                            img.pop(idx, None)
            result[si] = img
    _normalize_rows(result)
    return result


def _prod_contents(mu: Partition, k: int) -> dict[int, tuple]:
    out = {}
    for ti, tau in enumerate(enumerate_ssyt(mu, k)):
        base = list(content_of(tau, k))
        for i in range(1, k + 1):
            base[i - 1] += 1
            out[ti * k + (i - 1)] = tuple(base)
            base[i - 1] -= 1
    return out


def equivariant_inclusion_indexed(mu: Partition, nu: Partition, k: int,
                                  dual: bool = False) -> list[dict]:
    """The unique equivariant inclusion of the shape-nu module into
    (shape-mu module) (x) (vector factor), as a list over SSYT(nu) indices of
    sparse rows {tau_index * k + (i - 1): coeff}.

    With dual=True both sides are the dual-tableau realization."""
    key = (tuple(mu), tuple(nu), k, dual)
    cached = _INCLUSION_CACHE.get(key)
    if cached is not None:
        return cached
    mu, nu = tuple(mu), tuple(nu)
    added_row(mu, nu)  # validates the single-cell relation
    if len(nu) > k:
        raise InvalidPair(f"{nu} has more than {k} rows")
    _, nu_index, nu_raise, nu_lower = _shape_ops(nu, k, dual)
    prod_raise, prod_lower = _prod_ops(mu, k, dual)
    hw_side_f = _solve_hw(nu, k, dual)
    hw_side = {nu_index[t]: c for t, c in hw_side_f.items()}
    result = _solve_intertwiner(
        dim_schur(nu, k), nu_raise, nu_lower, _ssyt_contents(nu, k),
        prod_raise, prod_lower, _prod_contents(mu, k), hw_side,
        f"inclusion {nu} -> {mu} x V (dual={dual})")
    _INCLUSION_CACHE[key] = result
    return result


def _normalize_rows(rows: list[dict]) -> None:
    den = 1
    for img in rows:
        for c in img.values():
            den = den * c.denominator // gcd(den, c.denominator)
    g = 0
    for img in rows:
        for c in img.values():
            g = gcd(g, int(c * den))
    scale = Fraction(den, g) if g else Fraction(1)
    for img in rows:
        if img:
            if img[min(img)] * scale < 0:
                scale = -scale
            break
    for img in rows:
        for idx in img:
            img[idx] = img[idx] * scale


def equivariant_inclusion(mu: Partition, nu: Partition, k: int, dual: bool = False) -> dict:
    """Filling-keyed view of equivariant_inclusion_indexed:
    {sigma: {(tau, i): coeff}}."""
    rows = equivariant_inclusion_indexed(mu, nu, k, dual)
    mu_basis = enumerate_ssyt(tuple(mu), k)
    nu_basis = enumerate_ssyt(tuple(nu), k)
    return {nu_basis[si]: {(mu_basis[idx // k], idx % k + 1): c for idx, c in row.items()}
            for si, row in enumerate(rows)}


def pieri_summands(mu: Partition, k: int) -> list[Partition]:
    """Single-cell additions to mu with at most k rows, in a fixed order."""
    out = []
    for j in range(1, len(mu) + 2):
        try:
            nu = add_cell(mu, j)
        except Exception:
            continue
        if len(nu) <= k:
            out.append(nu)
    return out


def equivariant_projection_indexed(mu: Partition, nu: Partition, k: int) -> list[dict]:
    """Matrix of the equivariant projection (shape-mu module) (x) V -> shape-nu
    module, as a list over SSYT(nu) indices of sparse rows over the product
    indices tau_index * k + (i - 1).

    Computed as the inclusion of the contragredient module into the
    contragredient product: the transpose of that inclusion is exactly the
    projection in the original SSYT coordinates, and the contragredient
    operators are the negated transposes of the primal ones."""
    key = (tuple(mu), tuple(nu), k, "proj")
    cached = _INCLUSION_CACHE.get(key)
    if cached is not None:
        return cached
    mu, nu = tuple(mu), tuple(nu)
    added_row(mu, nu)
    if len(nu) > k:
        raise InvalidPair(f"{nu} has more than {k} rows")
    if nu not in pieri_summands(mu, k):
        raise InvalidPair(f"{nu} is not a single-cell extension of {mu} within {k} rows")
    nu_raise, nu_lower = _functional_shape_ops(nu, k)
    prod_raise, prod_lower = _functional_prod_ops(mu, k)
    # the raising-killed functional sits over the primal lowest weight class
    contents = _ssyt_contents(nu, k)
    target = _hw_content(nu, k, dual=True)
    cand = [si for si, w in enumerate(contents) if w == target]
    from .exactlin import ExactMatrix, kernel_basis

    row_index: dict = {}
    entries = []
    for pos, si in enumerate(cand):
        for a in range(1, k):
            for row, c in nu_raise[a].get(si, ()):
                r = row_index.setdefault((a, row), len(row_index))
                entries.append((r, pos, c))
    M = ExactMatrix(max(len(row_index), 1), len(cand))
    for r, c, v in entries:
        M.add_to(r, c, v)
    ker = kernel_basis(M)
    assert len(ker) == 1, f"expected a unique functional seed for {nu}"
    hw_side = {cand[i]: ker[0][i] for i in range(len(cand)) if ker[0][i]}
    result = _solve_intertwiner(
        dim_schur(nu, k), nu_raise, nu_lower, contents,
        prod_raise, prod_lower, _prod_contents(mu, k), hw_side,
        f"projection {mu} x V -> {nu}")
    _INCLUSION_CACHE[key] = result
    return result


def equivariant_projection(mu: Partition, nu: Partition, k: int) -> dict:
    """Filling-keyed view of equivariant_projection_indexed."""
    rows = equivariant_projection_indexed(mu, nu, k)
    mu_basis = enumerate_ssyt(tuple(mu), k)
    nu_basis = enumerate_ssyt(tuple(nu), k)
    return {nu_basis[si]: {(mu_basis[idx // k], idx % k + 1): c for idx, c in row.items()}
            for si, row in enumerate(rows)}


def pieri_project(tau: Filling, i: int, nu: Partition, k: int) -> TableauVector:
    """Equivariant projection of tau (x) e_i into the module of shape nu.

    nu must be the shape of tau plus one cell.  When the cell lands in the
    last column the image is simply the straightening of tau with the new
    cell filled by i (the appended-wedge map is well defined there);
    otherwise the solved isotypic projection supplies the matrix of the
    equivariant map.
    """
    mu = shape_of(tau)
    nu = tuple(nu)
    j = added_row(mu, nu)  # raises InvalidPair when nu is not mu + one cell
    if len(nu) > k:
        raise InvalidPair(f"{nu} has more than {k} rows")
    if nu[j - 1] == nu[0]:
        return TableauVector(nu, k, straighten_filling(_append_cell(tau, j, i)))
    rows = equivariant_projection_indexed(mu, nu, k)
    ti = enumerate_ssyt(mu, k).index(tau)
    idx = ti * k + (i - 1)
    nu_basis = enumerate_ssyt(nu, k)
    out = TableauVector(nu, k)
    for si, row in enumerate(rows):
        c = row.get(idx)
        if c:
            out.add_term(nu_basis[si], c)
    return out


def highest_weight_vector(lam: Partition, k: int) -> TableauVector:
    """The SSYT with row i filled by i; killed by every raising operator."""
    lam = check_partition(lam)
    if len(lam) > k:
        raise ValueError(f"{lam} has more than {k} rows")
    t = tuple(tuple(i + 1 for _ in range(row)) for i, row in enumerate(lam))
    return TableauVector(lam, k, {t: 1})


def primitive_part(v: TableauVector) -> TableauVector:
    """Divide by the gcd of the (integer) coefficients; sign left untouched."""
    if v.is_zero():
        return v
    ints = []
    for c in v.coeffs.values():
        c = as_scalar(c)
        if isinstance(c, Cyc3) or c.denominator != 1:
            return v
        ints.append(c.numerator)
    g = 0
    for n in ints:
        g = gcd(g, n)
    if g in (0, 1):
        return v
    return v.scaled(Fraction(1, g))
