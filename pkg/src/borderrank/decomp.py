"""Border-rank decomposition verification over a polynomial parameter.

A decomposition is a list of rank-one terms whose factors are vectors of
univariate polynomials in t.  Verification expands the sum exactly and
demands that orders 0..d-1 vanish and order d equals the target tensor;
with d = 0 this is an honest rank decomposition.  The built-in families
(the skew tensors, their differences, the recursive upper bounds, and the
Cartan-product decompositions) are constructed here as well.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from . import exactlin, schur
from .exactlin import Cyc3, ZETA, as_scalar, format_scalar, parse_scalar
from .partitions import Partition, check_partition, dim_schur, enumerate_ssyt
from .schur import gl_action, straighten_filling, TableauVector
from .tensorspace import InvariantTensor, build_skew_tensor, build_tensor


class DimensionMismatch(ValueError):
    """Decomposition factors do not match the target tensor's dimensions."""


class SpanDeficient(RuntimeError):
    """Sampled orbit points failed to span within the retry budget."""


# ---------------------------------------------------------------------------
# polynomials: ascending coefficient lists of exact scalars
# ---------------------------------------------------------------------------

def poly_trim(p):
    while p and not p[-1]:
        p.pop()
    return p


def poly_add(p, q):
    n = max(len(p), len(q))
    return poly_trim([
        (p[i] if i < len(p) else Fraction(0)) + (q[i] if i < len(q) else Fraction(0))
        for i in range(n)
    ])


def poly_mul(p, q):
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if not a:
            continue
        for j, b in enumerate(q):
            if b:
                out[i + j] = out[i + j] + a * b
    return poly_trim(out)


def poly_scale(p, c):
    c = as_scalar(c)
    return poly_trim([a * c for a in p]) if c else []


def poly_power_substitute(p, m):
    """t -> t^m"""
    out = [Fraction(0)] * ((len(p) - 1) * m + 1) if p else []
    for i, a in enumerate(p):
        if a:
            out[i * m] = a
    return poly_trim(out)


def const(c):
    c = as_scalar(c)
    return [c] if c else []


# ---------------------------------------------------------------------------
# targets
# ---------------------------------------------------------------------------

class Tensor3:
    """Plain exact 3-tensor on fixed bases, for decomposition verification."""

    def __init__(self, dims, coeffs=None):
        self.dims = tuple(dims)
        self.coeffs: dict[tuple[int, int, int], object] = dict(coeffs or {})

    def get(self, key):
        return self.coeffs.get(key, Fraction(0))


def wedge_index_map(k: int) -> dict[tuple[int, int], int]:
    out = {}
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            out[(i, j)] = len(out)
    return out


def skew_tensor3(k: int) -> Tensor3:
    w = wedge_index_map(k)
    T = Tensor3((k, k, len(w)))
    for (i, j), c in w.items():
        T.coeffs[(i - 1, j - 1, c)] = Fraction(1)
        T.coeffs[(j - 1, i - 1, c)] = Fraction(-1)
    return T


def skew_difference_tensor3(k: int) -> Tensor3:
    big = skew_tensor3(k)
    small = skew_tensor3(k - 1) if k > 2 else Tensor3((1, 1, 0))
    w = wedge_index_map(k)
    wsmall = wedge_index_map(k - 1) if k > 2 else {}
    out = Tensor3(big.dims, dict(big.coeffs))
    for (i, j), c in wsmall.items():
        cc = w[(i, j)]
        for (a, b) in ((i - 1, j - 1), (j - 1, i - 1)):
            val = out.get((a, b, cc)) - small.get((a, b, c))
            if val:
                out.coeffs[(a, b, cc)] = val
            else:
                out.coeffs.pop((a, b, cc), None)
    return out


def invariant_tensor3(T: InvariantTensor) -> Tensor3:
    k, m, n = T.dims
    out = Tensor3((k, m, n))
    for (i, ti, si), c in T.coeffs.items():
        out.coeffs[(i - 1, ti, si)] = c
    return out


def _merge_tableaux(tau, taup):
    """Cartan multiplication: interleave the columns of the two tableaux by
    weakly decreasing height and straighten in the combined shape."""
    cols = schur._columns(tau) + schur._columns(taup)
    cols.sort(key=lambda col: -len(col))
    return schur._from_columns([list(c) for c in cols])


def cartan_tensor3(lam: Partition, lamp: Partition, k: int) -> Tensor3:
    """The invariant tensor in S_lam V* (x) S_lamp V* (x) S_{lam+lamp} V."""
    lam, lamp = check_partition(lam), check_partition(lamp)
    basis_a = enumerate_ssyt(lam, k)
    basis_b = enumerate_ssyt(lamp, k)
    total = tuple(
        (lam[i] if i < len(lam) else 0) + (lamp[i] if i < len(lamp) else 0)
        for i in range(max(len(lam), len(lamp)))
    )
    basis_c = enumerate_ssyt(total, k)
    cindex = {t: i for i, t in enumerate(basis_c)}
    out = Tensor3((len(basis_a), len(basis_b), len(basis_c)))
    for ai, ta in enumerate(basis_a):
        for bi, tb in enumerate(basis_b):
            prod = straighten_filling(_merge_tableaux(ta, tb))
            for sigma, c in prod.items():
                out.coeffs[(ai, bi, cindex[sigma])] = Fraction(c)
    return out


def target_tensor(descriptor: dict) -> Tensor3:
    kind = descriptor["type"]
    if kind == "skew":
        return skew_tensor3(descriptor["k"])
    if kind == "skew-diff":
        return skew_difference_tensor3(descriptor["k"])
    if kind == "invariant":
        T = build_tensor(descriptor["k"], tuple(descriptor["mu"]), tuple(descriptor["nu"]))
        return invariant_tensor3(T)
    if kind == "cartan":
        return cartan_tensor3(tuple(descriptor["lam"]), tuple(descriptor["lamp"]),
                              descriptor["k"])
    raise ValueError(f"unknown target type {kind!r}")


# ---------------------------------------------------------------------------
# decompositions
# ---------------------------------------------------------------------------

@dataclass
class Term:
    a: list  # list of polynomials, one per basis vector of the first factor
    b: list
    c: list


@dataclass
class CurveDecomposition:
    k: int
    target: dict
    scale: object  # exact scalar
    d: int
    terms: list[Term] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.terms)

    def to_json(self) -> dict:
        def vec(v):
            return [[format_scalar(c) for c in poly] for poly in v]

        return {
            "schema": "borderrank/1",
            "k": self.k,
            "target": self.target,
            "scale": format_scalar(self.scale),
            "d": self.d,
            "terms": [{"a": vec(t.a), "b": vec(t.b), "c": vec(t.c)} for t in self.terms],
        }

    @classmethod
    def from_json(cls, obj) -> "CurveDecomposition":
        def vec(v):
            return [[parse_scalar(c) for c in poly] for poly in v]

        return cls(obj["k"], obj["target"], parse_scalar(obj["scale"]), obj["d"],
                   [Term(vec(t["a"]), vec(t["b"]), vec(t["c"])) for t in obj["terms"]])


@dataclass
class VerificationReport:
    target: dict
    claimed_rank: int
    d: int
    passed: bool
    failure_order: int | None = None
    failure_coordinate: tuple | None = None

    def to_json(self) -> dict:
        out = {
            "schema": "borderrank/1",
            "target": self.target,
            "rank": self.claimed_rank,
            "d": self.d,
            "pass": self.passed,
        }
        if not self.passed:
            out["failure_order"] = self.failure_order
            out["failure_coordinate"] = list(self.failure_coordinate)
        return out


def verify_border_decomposition(D: CurveDecomposition, T: Tensor3 | None = None) -> VerificationReport:
    """Expand sum scale * a_i(t) (x) b_i(t) (x) c_i(t) exactly and require the
    t^0..t^{d-1} coefficients to vanish and the t^d coefficient to equal T."""
    if T is None:
        T = target_tensor(D.target)
    la, lb, lc = T.dims
    for t in D.terms:
        if len(t.a) != la or len(t.b) != lb or len(t.c) != lc:
            raise DimensionMismatch(
                f"term shape ({len(t.a)},{len(t.b)},{len(t.c)}) vs target {T.dims}")
    acc: dict[tuple[int, int, int], list] = {}
    for t in D.terms:
        an = [(i, p) for i, p in enumerate(t.a) if p]
        bn = [(j, p) for j, p in enumerate(t.b) if p]
        cn = [(l, p) for l, p in enumerate(t.c) if p]
        for i, pa in an:
            for j, pb in bn:
                pab = poly_mul(pa, pb)
                for l, pc in cn:
                    key = (i, j, l)
                    acc[key] = poly_add(acc.get(key, []), poly_mul(pab, pc))
    scale = as_scalar(D.scale)
    keys = set(acc) | set(T.coeffs)
    # orders below d must vanish, order d must match the target
    for order in range(D.d + 1):
        for key in sorted(keys):
            poly = acc.get(key, [])
            val = (poly[order] if order < len(poly) else Fraction(0)) * scale
            want = T.get(key) if order == D.d else Fraction(0)
            if val != want:
                return VerificationReport(D.target, D.size, D.d, False, order, key)
    return VerificationReport(D.target, D.size, D.d, True)


def verify_rank_decomposition(D: CurveDecomposition, T: Tensor3 | None = None) -> VerificationReport:
    if D.d != 0:
        raise ValueError("rank decomposition must have vanishing order d = 0")
    return verify_border_decomposition(D, T)


# ---------------------------------------------------------------------------
# built-in decompositions
# ---------------------------------------------------------------------------

def _unit(dim, idx, poly):
    v = [[] for _ in range(dim)]
    v[idx] = list(poly)
    return v


def _combo(dim, pairs):
    """pairs: (index, poly)"""
    v = [[] for _ in range(dim)]
    for idx, poly in pairs:
        v[idx] = poly_add(v[idx], list(poly))
    return v


def t3_decomposition() -> CurveDecomposition:
    """Five-term border rank decomposition of the k = 3 skew tensor (d = 1)."""
    k = 3
    w = wedge_index_map(k)
    nw = len(w)
    one, t = const(1), [Fraction(0), Fraction(1)]
    mt = poly_scale(t, -1)
    a = lambda i, poly=one: (i - 1, list(poly))
    terms = [
        Term(_combo(k, [a(1, t)]), _combo(k, [a(2)]), _unit(nw, w[(1, 2)], one)),
        Term(_combo(k, [a(2, mt)]), _combo(k, [a(1)]), _unit(nw, w[(1, 2)], one)),
        Term(_combo(k, [a(3), a(1, t)]), _combo(k, [a(3), a(1, mt)]), _unit(nw, w[(1, 3)], one)),
        Term(_combo(k, [a(3), a(2, t)]), _combo(k, [a(3), a(2, mt)]), _unit(nw, w[(2, 3)], one)),
        Term(_combo(k, [a(3, const(-1))]), _combo(k, [a(3)]),
             _combo(nw, [(w[(1, 3)], one), (w[(2, 3)], one)])),
    ]
    return CurveDecomposition(k, {"type": "skew", "k": 3}, Fraction(1), 1, terms)


def t4_conner_decomposition() -> CurveDecomposition:
    """Eight-term border rank decomposition of the k = 4 skew tensor
    (d = 3, prefactor 1/4)."""
    k = 4
    w = wedge_index_map(k)
    nw = len(w)
    one = const(1)
    t = [Fraction(0), Fraction(1)]
    t2 = [Fraction(0), Fraction(0), Fraction(1)]
    t3 = [Fraction(0), Fraction(0), Fraction(0), Fraction(1)]

    def al(*pairs):
        return _combo(k, [(i - 1, list(p)) for i, p in pairs])

    def ce(*pairs):
        return _combo(nw, [(w[key], list(p)) for key, p in pairs])

    terms = [
        Term(al((1, one), (3, const(2))), al((1, one)),
             ce(((2, 4), one), ((1, 3), poly_scale(t3, -2)))),
        Term(al((1, one)), al((1, one), (3, const(2))),
             ce(((2, 4), one), ((1, 3), poly_scale(t3, 2)))),
        Term(al((1, const(-4)), (3, const(-4)), (2, poly_scale(t, -4)), (4, poly_scale(t2, -4))),
             al((1, one), (3, one), (2, poly_scale(t, -1)), (4, t2)),
             ce(((2, 4), one), ((1, 2), poly_scale(t2, -1)), ((1, 4), poly_scale(t2, -1)))),
        Term(al((1, const(2)), (3, const(2)), (2, poly_scale(t, 4)), (4, poly_scale(t2, 4))),
             al((1, one), (3, one), (2, poly_scale(t, -2)), (4, poly_scale(t2, 2))),
             ce(((2, 4), one), ((1, 2), poly_scale(t2, -2)), ((1, 4), poly_scale(t2, -1)))),
        Term(al((3, const(-2)), (2, poly_scale(t, 4))),
             al((3, one), (2, poly_scale(t, 2))),
             ce(((2, 4), one), ((1, 2), poly_scale(t2, 2)), ((2, 3), poly_scale(t2, 2)))),
        Term(al((3, const(4)), (2, poly_scale(t, -4))),
             al((3, one), (2, t)),
             ce(((2, 4), one), ((1, 2), t2), ((1, 4), t2), ((2, 3), t2),
                ((3, 4), poly_scale(t2, -1)))),
        Term(al((1, const(-2)), (3, const(-2)), (4, poly_scale(t, -4))),
             al((1, one), (3, one), (4, poly_scale(t, -2))),
             ce(((1, 4), t2))),
        Term(al((3, const(4)), (2, poly_scale(t, -4)), (4, poly_scale(t, -4))),
             al((3, one), (2, t), (4, t)),
             ce(((3, 4), t2), ((1, 4), poly_scale(t2, -1)))),
    ]
    return CurveDecomposition(k, {"type": "skew", "k": 4}, Fraction(1, 4), 3, terms)


def skew_difference_decomposition(k: int) -> CurveDecomposition:
    """The k-term, d = 1 family for the difference of consecutive skew tensors."""
    if k < 2:
        raise ValueError("k must be >= 2")
    w = wedge_index_map(k)
    nw = len(w)
    one = const(1)
    t = [Fraction(0), Fraction(1)]
    terms = []
    for j in range(1, k):
        terms.append(Term(
            _combo(k, [(k - 1, one), (j - 1, list(t))]),
            _combo(k, [(k - 1, one), (j - 1, poly_scale(t, -1))]),
            _unit(nw, w[(j, k)], one),
        ))
    terms.append(Term(
        _unit(k, k - 1, one),
        _unit(k, k - 1, one),
        _combo(nw, [(w[(i, k)], const(-1)) for i in range(1, k)]),
    ))
    return CurveDecomposition(k, {"type": "skew-diff", "k": k}, Fraction(1), 1, terms)


def _pad_term(term: Term, k_from: int, k_to: int) -> Term:
    wf = wedge_index_map(k_from)
    wt = wedge_index_map(k_to)
    c = [[] for _ in range(len(wt))]
    for key, idx in wf.items():
        c[wt[key]] = term.c[idx]
    return Term(term.a + [[] for _ in range(k_to - k_from)],
                term.b + [[] for _ in range(k_to - k_from)], c)


def _substitute_term(term: Term, m: int) -> Term:
    return Term([poly_power_substitute(p, m) for p in term.a],
                [poly_power_substitute(p, m) for p in term.b],
                [poly_power_substitute(p, m) for p in term.c])


def skew_upper_decomposition(k: int) -> CurveDecomposition:
    """The recursive upper-bound decomposition of the skew tensor, of size
    C(k+1, 2) - 2: the k = 4 base plus the one-cell difference families,
    with vanishing orders harmonized by t -> t^3 in the d = 1 components."""
    if k < 4:
        raise ValueError("k must be >= 4")
    base = t4_conner_decomposition()
    terms = []
    for term in base.terms:
        padded = _pad_term(term, 4, k)
        # fold the 1/4 prefactor into the first factor so the total scale is 1
        padded = Term([poly_scale(p, base.scale) for p in padded.a], padded.b, padded.c)
        terms.append(padded)
    for j in range(5, k + 1):
        diff = skew_difference_decomposition(j)
        for term in diff.terms:
            padded = _pad_term(term, j, k)
            terms.append(_substitute_term(padded, 3))
    return CurveDecomposition(k, {"type": "skew", "k": k}, Fraction(1), 3, terms)


def concatenate(D1: CurveDecomposition, D2: CurveDecomposition, target: dict) -> CurveDecomposition:
    """Concatenate two decompositions of summands of a common target after
    harmonizing their vanishing orders (t -> t^m on each component)."""
    if D1.k != D2.k:
        raise DimensionMismatch("components live in different spaces")
    lcm = D1.d * D2.d // __import__("math").gcd(D1.d, D2.d) if D1.d and D2.d else max(D1.d, D2.d, 1)
    terms = []
    for D in (D1, D2):
        m = lcm // D.d if D.d else 1
        for term in D.terms:
            t2 = _substitute_term(term, m) if m != 1 else term
            t2 = Term([poly_scale(p, D.scale) for p in t2.a], t2.b, t2.c)
            terms.append(t2)
    return CurveDecomposition(D1.k, target, Fraction(1), lcm, terms)


# ---------------------------------------------------------------------------
# Cartan-product rank decompositions
# ---------------------------------------------------------------------------

def _hw_coefficient_functional(g, sigma: tuple, k: int, hw: tuple) -> object:
    """Coefficient of the highest weight tableau in g . sigma."""
    v = gl_action(g, TableauVector(schur.shape_of(sigma), k, {sigma: 1}))
    return v.coeffs.get(hw, Fraction(0))


def _hw_tableau(lam: Partition, k: int) -> tuple:
    return tuple(tuple(i + 1 for _ in range(row)) for i, row in enumerate(lam))


def _point_to_matrix(point, k: int):
    """A projective point [s:t] on P^1 (k = 2) as a group element whose first
    row is (s, t)."""
    s, t = (as_scalar(x) for x in point)
    if t == 0:
        if s == 0:
            raise ValueError("(0, 0) is not a projective point")
        return [[s, Fraction(0)], [Fraction(0), Fraction(1)]]
    return [[s, t], [Fraction(1), Fraction(0)]]


def example3_points():
    """The five evaluation points [1:0], [1:1], [1:z], [1:z^2], [0:1]."""
    z2 = ZETA * ZETA
    return [(1, 0), (1, 1), (1, ZETA), (1, z2), (0, 1)]


def _random_group_element(k: int, rng: random.Random):
    lower = [[Fraction(1 if i == j else 0) for j in range(k)] for i in range(k)]
    upper = [[Fraction(1 if i == j else 0) for j in range(k)] for i in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            lower[j][i] = Fraction(rng.randint(-3, 3))
            upper[i][j] = Fraction(rng.randint(-3, 3))
    diag = [Fraction(rng.choice([1, 2, 3, -1, -2])) for _ in range(k)]
    out = [[sum(lower[i][l] * (diag[l] if l == m else 0) * upper[m][j]
                for l in range(k) for m in range(k)) for j in range(k)] for i in range(k)]
    return out


def cartan_decomposition(lam: Partition, lamp: Partition, k: int,
                         point_source=None, seed: int = 0,
                         retries: int = 10) -> CurveDecomposition:
    """Rank-dim(S_{lam+lamp}) decomposition of the Cartan-product tensor.

    Points on the orbit of the highest weight line are sampled (or supplied:
    a list of k x k matrices, or of P^1 points when k = 2), each image is
    checked to be an exact outer product, the span is completed, and the dual
    basis solve produces the third factors.
    """
    lam, lamp = check_partition(lam), check_partition(lamp)
    T = cartan_tensor3(lam, lamp, k)
    da, db, dc = T.dims
    basis_a = enumerate_ssyt(lam, k)
    basis_b = enumerate_ssyt(lamp, k)
    total = tuple((lam[i] if i < len(lam) else 0) + (lamp[i] if i < len(lamp) else 0)
                  for i in range(max(len(lam), len(lamp))))
    basis_c = enumerate_ssyt(total, k)
    hw_a, hw_b, hw_c = _hw_tableau(lam, k), _hw_tableau(lamp, k), _hw_tableau(total, k)

    supplied = None
    if point_source is not None:
        supplied = []
        for pt in point_source:
            if isinstance(pt, (list, tuple)) and len(pt) == 2 and not isinstance(pt[0], (list, tuple)):
                supplied.append(_point_to_matrix(pt, k))
            else:
                supplied.append([[as_scalar(x) for x in row] for row in pt])

    rng = random.Random(seed)
    chosen: list[tuple[list, list, list]] = []  # (c functional coords, a coords, b coords)
    echelon: list[list] = []

    def try_point(g):
        cvec = [_hw_coefficient_functional(g, sigma, k, hw_c) for sigma in basis_c]
        if not any(cvec):
            return False
        vec = list(cvec)
        for row in echelon:
            piv = next(i for i, x in enumerate(row) if x)
            if vec[piv]:
                f = vec[piv] / row[piv]
                vec = [x - f * y for x, y in zip(vec, row)]
        if not any(vec):
            return False
        avec = [_hw_coefficient_functional(g, tau, k, hw_a) for tau in basis_a]
        bvec = [_hw_coefficient_functional(g, tau, k, hw_b) for tau in basis_b]
        # the flattened image of the point must be exactly the outer product
        for ai in range(da):
            for bi in range(db):
                got = sum((cvec[ci] * T.get((ai, bi, ci)) for ci in range(dc)), Fraction(0))
                if got != avec[ai] * bvec[bi]:
                    raise AssertionError("orbit point image is not the expected outer product")
        echelon.append(vec)
        chosen.append((cvec, avec, bvec))
        return True

    if supplied is not None:
        for g in supplied:
            try_point(g)
        if len(chosen) != dc:
            raise SpanDeficient(f"supplied points span {len(chosen)} < {dc}")
    else:
        identity = [[Fraction(1 if i == j else 0) for j in range(k)] for i in range(k)]
        try_point(identity)
        for batch in range(retries):
            for _ in range(2 * dc):
                if len(chosen) == dc:
                    break
                try_point(_random_group_element(k, rng))
            if len(chosen) == dc:
                break
        if len(chosen) != dc:
            raise SpanDeficient(f"orbit sampling spanned {len(chosen)} < {dc} after {retries} batches")

    duals = exactlin.solve_dual_basis([c for c, _, _ in chosen])
    terms = []
    for idx, (cvec, avec, bvec) in enumerate(chosen):
        terms.append(Term([const(x) for x in avec], [const(x) for x in bvec],
                          [const(x) for x in duals[idx]]))
    target = {"type": "cartan", "k": k, "lam": list(lam), "lamp": list(lamp)}
    return CurveDecomposition(k, target, Fraction(1), 0, terms)


# ---------------------------------------------------------------------------
# built-in registry
# ---------------------------------------------------------------------------

def builtin_decomposition(name: str) -> CurveDecomposition:
    """Built-ins: T3, T4-conner, Tk-diff:K, Tk-upper:K, example3."""
    if name == "T3":
        return t3_decomposition()
    if name == "T4-conner":
        return t4_conner_decomposition()
    if name.startswith("Tk-diff:"):
        return skew_difference_decomposition(int(name.split(":")[1]))
    if name.startswith("Tk-upper:"):
        return skew_upper_decomposition(int(name.split(":")[1]))
    if name == "example3":
        return cartan_decomposition((2,), (2,), 2, point_source=example3_points())
    raise KeyError(f"unknown builtin decomposition {name!r}")
