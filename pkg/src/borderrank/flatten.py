"""Koszul and Young flattenings, predicted ranks, and bound certificates.

Every flattening here is a torus-equivariant map, so its matrix is block
diagonal over weights; ranks are computed block by block, exactly
(fraction-free) or modulo several primes.  A certificate packages the
flattening, the rank evidence, the divisor, and the resulting border rank
lower bound = ceil(rank / divisor).
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, ceil

from . import exactlin, partitions, schur
from .exactlin import ExactMatrix, RankEvidence
from .partitions import (
    InvalidPair,
    Partition,
    ROW_STRICT,
    added_row,
    dim_schur,
    enumerate_ssyt,
    pieri_expand,
    predicted_generic_rank,
)
from .tensorspace import InvariantTensor, build_skew_tensor


@dataclass
class FlatteningSpec:
    kind: str  # "koszul" or "young"
    p: int | None = None
    alpha: Partition | None = None
    alpha_tilde: Partition | None = None

    def label(self) -> str:
        if self.kind == "koszul":
            return f"koszul(p={self.p})"
        return (f"young(alpha={partitions.format_partition(self.alpha)},"
                f"alpha~={partitions.format_partition(self.alpha_tilde)})")

    def to_json(self) -> dict:
        if self.kind == "koszul":
            return {"kind": "koszul", "p": self.p}
        return {"kind": "young", "alpha": list(self.alpha), "alpha_tilde": list(self.alpha_tilde)}


def _content(tab, k):
    w = [0] * k
    for row in tab:
        for x in row:
            w[x - 1] += 1
    return tuple(w)


def _coeffs_by_sigma(T: InvariantTensor):
    out: dict[int, list] = {}
    for (i, ti, si), c in T.coeffs.items():
        out.setdefault(si, []).append((i, ti, c))
    return out


class BlockMatrix:
    """A matrix split into its weight blocks; dims refer to the full matrix."""

    def __init__(self, rows: int, cols: int):
        self.rows = rows
        self.cols = cols
        self.blocks: dict[tuple, tuple[dict, dict, list]] = {}
        # weight -> (row index map, col index map, entries [(r, c, val)])

    def add(self, weight, row_key, col_key, val):
        rmap, cmap, ent = self.blocks.setdefault(weight, ({}, {}, []))
        r = rmap.setdefault(row_key, len(rmap))
        c = cmap.setdefault(col_key, len(cmap))
        ent.append((r, c, val))

    def to_exact_matrices(self) -> list[ExactMatrix]:
        out = []
        for rmap, cmap, ent in self.blocks.values():
            M = ExactMatrix(len(rmap), len(cmap))
            for r, c, v in ent:
                M.add_to(r, c, v)
            out.append(M)
        return out

    def rank_exact(self) -> int:
        return sum(exactlin.rank_exact(M) for M in self.to_exact_matrices())

    def rank_mod_p(self, p: int) -> int:
        return sum(exactlin.rank_mod_p(M, p) for M in self.to_exact_matrices())

    def digest(self) -> str:
        h = hashlib.sha256()
        for wt in sorted(self.blocks):
            rmap, cmap, ent = self.blocks[wt]
            h.update(repr((wt, sorted((r, c, str(v)) for r, c, v in ent))).encode())
        h.update(repr((self.rows, self.cols)).encode())
        return h.hexdigest()[:16]

    def evidence(self, exact: bool | None = None, primes: int = 3, seed: int = 0) -> RankEvidence:
        if exact is None:
            exact = max(self.rows, self.cols) <= exactlin.MODULAR_DEFAULT_THRESHOLD
        ev = RankEvidence(digest=self.digest())
        ev.modular_ranks = [(p, self.rank_mod_p(p)) for p in exactlin.pick_primes(primes, seed)]
        ev.method = "modular"
        if exact:
            ev.exact_rank = self.rank_exact()
            ev.method = "both"
            assert all(r <= ev.exact_rank for _, r in ev.modular_ranks)
        return ev


def koszul_blocks(T: InvariantTensor, p: int) -> BlockMatrix:
    """Blocks of the p-th Koszul flattening  Lambda^p V* (x) S_nu V* -> Lambda^{p+1} V* (x) S_mu V*."""
    k, m, n = T.dims
    if not 0 <= p <= k - 1:
        raise ValueError(f"need 0 <= p <= {k-1}")
    by_sigma = _coeffs_by_sigma(T)
    mu_content = [_content(t, k) for t in T.mu_basis]
    nu_content = [_content(t, k) for t in T.nu_basis]
    B = BlockMatrix(comb(k, p + 1) * m, comb(k, p) * n)
    for S in combinations(range(1, k + 1), p):
        sset = set(S)
        s_weight = [0] * k
        for s in S:
            s_weight[s - 1] += 1
        for si in range(n):
            wt = tuple(a + b for a, b in zip(s_weight, nu_content[si]))
            col_key = (S, si)
            for (i, ti, c) in by_sigma.get(si, ()):
                if i in sset:
                    continue
                bigger = tuple(sorted(sset | {i}))
                sign = (-1) ** sum(1 for s in S if s < i)
                B.add(wt, (bigger, ti), col_key, sign * c)
    return B


def koszul_matrix(T: InvariantTensor, p: int) -> ExactMatrix:
    """The assembled Koszul flattening matrix, in the canonical wedge x SSYT order."""
    k, m, n = T.dims
    dom = list(combinations(range(1, k + 1), p))
    cod = list(combinations(range(1, k + 1), p + 1))
    dom_index = {S: a for a, S in enumerate(dom)}
    cod_index = {S: a for a, S in enumerate(cod)}
    by_sigma = _coeffs_by_sigma(T)
    M = ExactMatrix(len(cod) * m, len(dom) * n)
    for S in dom:
        sset = set(S)
        for si in range(n):
            col = dom_index[S] * n + si
            for (i, ti, c) in by_sigma.get(si, ()):
                if i in sset:
                    continue
                bigger = tuple(sorted(sset | {i}))
                sign = (-1) ** sum(1 for s in S if s < i)
                M.add_to(cod_index[bigger] * m + ti, col, sign * c)
    return M


def _dual_projection(alpha: Partition, alpha_tilde: Partition, k: int):
    """Matrix of the projection S_alpha V* (x) V* -> S_alpha~ V*, as
    {(rho_index, i): [(rho~_index, coeff), ...]}.

    With the dual slots read as functionals on the primal SSYT bases, this
    projection is exactly the transpose of the primal single-cell inclusion,
    so one highest-weight solve supplies it.  For last-column additions the
    appended-wedge straightening is an equivalent (cheaper) realization."""
    j = added_row(alpha, alpha_tilde)
    out: dict[tuple, list] = {}
    if alpha_tilde[j - 1] == alpha_tilde[0]:
        at_index = {t: i for i, t in enumerate(enumerate_ssyt(alpha_tilde, k))}
        for ri, rho in enumerate(enumerate_ssyt(alpha, k)):
            for i in range(1, k + 1):
                img = schur.straighten_filling(schur._append_cell(rho, j, i))
                if img:
                    out[(ri, i)] = [(at_index[t], Fraction(c)) for t, c in img.items()]
        return out
    rows = schur.equivariant_inclusion_indexed(alpha, alpha_tilde, k, dual=False)
    for si, row in enumerate(rows):
        for idx, c in row.items():
            out.setdefault((idx // k, idx % k + 1), []).append((si, c))
    return out


def young_blocks(T: InvariantTensor, alpha: Partition, alpha_tilde: Partition) -> BlockMatrix:
    """Blocks of the Young flattening  S_alpha V* (x) S_nu V* -> S_alpha~ V* (x) S_mu V*."""
    k, m, n = T.dims
    alpha, alpha_tilde = tuple(alpha), tuple(alpha_tilde)
    added_row(alpha, alpha_tilde)
    if len(alpha_tilde) > k:
        raise InvalidPair(f"{alpha_tilde} has more than {k} rows")
    proj = _dual_projection(alpha, alpha_tilde, k)
    alpha_basis = enumerate_ssyt(alpha, k)
    nu_content = [_content(t, k) for t in T.nu_basis]
    alpha_content = [_content(rho, k) for rho in alpha_basis]
    by_sigma = _coeffs_by_sigma(T)
    da, dat = len(alpha_basis), dim_schur(alpha_tilde, k)
    B = BlockMatrix(dat * m, da * n)
    for ri in range(da):
        images = {i: proj.get((ri, i)) for i in range(1, k + 1)}
        for si in range(n):
            wt = tuple(a + b for a, b in zip(alpha_content[ri], nu_content[si]))
            col_key = (ri, si)
            for (i, ti, c) in by_sigma.get(si, ()):
                img = images.get(i)
                if not img:
                    continue
                for ri2, c2 in img:
                    B.add(wt, (ri2, ti), col_key, c * c2)
    return B


def young_matrix(T: InvariantTensor, alpha: Partition, alpha_tilde: Partition) -> ExactMatrix:
    """The assembled Young flattening matrix in canonical product order."""
    k, m, n = T.dims
    alpha, alpha_tilde = tuple(alpha), tuple(alpha_tilde)
    proj = _dual_projection(alpha, alpha_tilde, k)
    alpha_basis = enumerate_ssyt(alpha, k)
    at_basis = enumerate_ssyt(alpha_tilde, k)
    by_sigma = _coeffs_by_sigma(T)
    M = ExactMatrix(len(at_basis) * m, len(alpha_basis) * n)
    for ri in range(len(alpha_basis)):
        for si in range(n):
            col = ri * n + si
            for (i, ti, c) in by_sigma.get(si, ()):
                img = proj.get((ri, i))
                if not img:
                    continue
                for ri2, c2 in img:
                    M.add_to(ri2 * m + ti, col, c * c2)
    return M


def predicted_koszul_rank(mu: Partition, nu: Partition, p: int, k: int) -> int:
    """Rank of the p-th Koszul flattening predicted by the shared-submodule rule.

    Sum of dim S_pi over the vertical-strip expansions pi of nu by p cells
    whose j-th part still equals nu_j, where j is the row of the added cell.
    """
    j = added_row(mu, nu)
    total = 0
    for pi in pieri_expand(nu, p, ROW_STRICT, k).results:
        if (pi[j - 1] if j - 1 < len(pi) else 0) == nu[j - 1]:
            total += dim_schur(pi, k)
    return total


@dataclass
class BoundCertificate:
    tensor: dict
    spec: FlatteningSpec
    dims: tuple[int, int]
    evidence: RankEvidence
    divisor: int
    bound: int
    assumptions: list[str] = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return self.evidence.rank

    def to_json(self) -> dict:
        out = {
            "schema": "borderrank/1",
            "tensor": self.tensor,
            "spec": self.spec.to_json(),
            "dims": list(self.dims),
            "rank": self.evidence.to_json(),
            "divisor": self.divisor,
            "bound": self.bound,
            "assumptions": self.assumptions,
        }
        out.update(self.extras)
        blob = json.dumps(out, sort_keys=True, separators=(",", ":"))
        out["digest"] = hashlib.sha256(blob.encode()).hexdigest()[:16]
        return out


def _tensor_descriptor(T: InvariantTensor) -> dict:
    return {"k": T.k, "mu": list(T.mu), "nu": list(T.nu), "construction": T.construction}


def koszul_bound(T: InvariantTensor, p: int, exact: bool | None = None,
                 primes: int = 3, seed: int = 0) -> BoundCertificate:
    """Certificate for the bound ceil(rank(T^p) / C(k-1, p)).

    The computed rank is checked against the predicted-rank oracle; a
    mismatch means a construction bug, so it raises."""
    k = T.k
    B = koszul_blocks(T, p)
    ev = B.evidence(exact=exact, primes=primes, seed=seed)
    divisor = comb(k - 1, p)
    predicted = predicted_koszul_rank(T.mu, T.nu, p, k)
    if ev.rank != predicted:
        raise AssertionError(
            f"koszul rank {ev.rank} disagrees with predicted rank {predicted} "
            f"for {T.mu}->{T.nu}, p={p}, k={k}")
    bound = ceil(Fraction(ev.rank, divisor))
    cert = BoundCertificate(_tensor_descriptor(T), FlatteningSpec("koszul", p=p),
                            (B.rows, B.cols), ev, divisor, bound)
    cert.extras["predicted_rank"] = predicted
    cert.extras["matches_prediction"] = ev.rank == predicted
    return cert


def young_bound(T: InvariantTensor, alpha: Partition, alpha_tilde: Partition,
                exact: bool | None = None, primes: int = 3, seed: int = 0) -> BoundCertificate:
    """Certificate for the bound ceil(rank(T_{alpha, alpha~}) / generic rank of the
    alpha-side space); the divisor comes from the rank predictor on the dual side."""
    alpha, alpha_tilde = tuple(alpha), tuple(alpha_tilde)
    B = young_blocks(T, alpha, alpha_tilde)
    ev = B.evidence(exact=exact, primes=primes, seed=seed)
    divisor = predicted_generic_rank(alpha, alpha_tilde, T.k)[0] if alpha else 1
    bound = ceil(Fraction(ev.rank, divisor))
    return BoundCertificate(_tensor_descriptor(T), FlatteningSpec("young", alpha=alpha,
                            alpha_tilde=alpha_tilde), (B.rows, B.cols), ev, divisor, bound)


def restricted_koszul_blocks(k: int, h: int, p: int) -> BlockMatrix:
    """Blocks of the restricted skew flattening Lambda^p H (x) Lambda^2 V* -> Lambda^{p+1} H (x) V*
    with H spanned by the first h dual basis vectors."""
    if not (1 <= h <= k and 0 <= p <= h - 1):
        raise ValueError("need 1 <= h <= k and p <= h-1")
    T = build_skew_tensor(k)
    by_sigma = _coeffs_by_sigma(T)
    nu_content = [_content(t, k) for t in T.nu_basis]
    B = BlockMatrix(comb(h, p + 1) * k, comb(h, p) * comb(k, 2))
    for S in combinations(range(1, h + 1), p):
        sset = set(S)
        s_weight = [0] * k
        for s in S:
            s_weight[s - 1] += 1
        for si in range(len(T.nu_basis)):
            wt = tuple(a + b for a, b in zip(s_weight, nu_content[si]))
            for (i, ti, c) in by_sigma.get(si, ()):
                if i in sset or i > h:
                    continue  # codomain wedge restricted to H as well
                bigger = tuple(sorted(sset | {i}))
                sign = (-1) ** sum(1 for s in S if s < i)
                B.add(wt, (bigger, ti), (S, si), sign * c)
    return B


def restricted_koszul_bound(k: int, h: int, p: int, exact: bool | None = None,
                            primes: int = 3, seed: int = 0) -> BoundCertificate:
    """Certificate for ceil(rank / C(h-1, p)) of the restricted skew flattening."""
    B = restricted_koszul_blocks(k, h, p)
    ev = B.evidence(exact=exact, primes=primes, seed=seed)
    divisor = comb(h - 1, p)
    bound = ceil(Fraction(ev.rank, divisor))
    cert = BoundCertificate({"k": k, "construction": "skew", "h": h},
                            FlatteningSpec("koszul", p=p), (B.rows, B.cols),
                            ev, divisor, bound)
    cert.extras["formula_bound"] = ceil(Fraction(k * h, p + 1))
    cert.extras["formula_rank"] = k * comb(h, p + 1)
    return cert


@dataclass
class MultiplicityRow:
    pi: Partition
    mult_domain: int
    mult_intermediate: int

    @property
    def applies(self) -> bool:
        return self.mult_domain == self.mult_intermediate


def multiplicity_comparison(mu: Partition, nu: Partition, k: int) -> list[MultiplicityRow]:
    """Per-isotypic multiplicities in S_mu* (x) S_nu* versus S_mu* (x) V* (x) S_mu*.

    Rows with equal multiplicity are exactly the ones where the image of the
    square Young flattening is forced to contain the full isotypic piece."""
    added_row(mu, nu)
    dom = partitions.lr_multiplicities(tuple(mu), tuple(nu), k)
    mid = partitions.lr_iterated([tuple(mu), (1,), tuple(mu)], k)
    return [MultiplicityRow(pi, m, mid.get(pi, 0)) for pi, m in sorted(dom.items(), reverse=True)]


def _young_rank_modp_streamed(T: InvariantTensor, alpha: Partition,
                              alpha_tilde: Partition, p: int) -> int:
    """Rank mod p of the Young flattening, one weight block at a time.

    Each weight block is a sum over the k vector indices of Kronecker
    products of small dense slices (a projection slice against a tensor
    slice), so assembly is vectorized np.kron accumulation and memory stays
    bounded by the largest block."""
    import numpy as np

    k, m, n = T.dims
    proj = _dual_projection(alpha, alpha_tilde, k)
    alpha_basis = enumerate_ssyt(alpha, k)
    at_basis = enumerate_ssyt(alpha_tilde, k)

    def grouped(basis):
        groups: dict[tuple, list[int]] = {}
        for idx, t in enumerate(basis):
            groups.setdefault(_content(t, k), []).append(idx)
        local = {}
        for w, idxs in groups.items():
            for pos, idx in enumerate(idxs):
                local[idx] = pos
        return groups, local

    groups_alpha, local_alpha = grouped(alpha_basis)
    groups_at, local_at = grouped(at_basis)
    groups_mu, local_mu = grouped(T.mu_basis)
    groups_nu, local_nu = grouped(T.nu_basis)

    # dense projection slices P[(i, wa)]: at-group(wa + e_i) x alpha-group(wa)
    pslice: dict[tuple, object] = {}
    for (ri, i), entries in proj.items():
        wa = _content(alpha_basis[ri], k)
        key = (i, wa)
        mat = pslice.get(key)
        if mat is None:
            wa2 = list(wa)
            wa2[i - 1] += 1
            rows = groups_at.get(tuple(wa2))
            if rows is None:
                continue
            mat = np.zeros((len(rows), len(groups_alpha[wa])), dtype=np.float64)
            pslice[key] = mat
        for ri2, c in entries:
            assert c.denominator == 1
            mat[local_at[ri2], local_alpha[ri]] = c.numerator % p
    # dense tensor slices C[(i, wn)]: mu-group(wn - e_i) x nu-group(wn)
    cslice: dict[tuple, object] = {}
    for (i, ti, si), c in T.coeffs.items():
        wn = _content(T.nu_basis[si], k)
        key = (i, wn)
        mat = cslice.get(key)
        if mat is None:
            wm = list(wn)
            wm[i - 1] -= 1
            rows = groups_mu.get(tuple(wm))
            if rows is None:
                continue
            mat = np.zeros((len(rows), len(groups_nu[wn])), dtype=np.float64)
            cslice[key] = mat
        assert c.denominator == 1
        mat[local_mu[ti], local_nu[si]] = c.numerator % p

    col_blocks: dict[tuple, list] = {}
    for wa in groups_alpha:
        for wn in groups_nu:
            w = tuple(a + b for a, b in zip(wa, wn))
            col_blocks.setdefault(w, []).append((wa, wn))
    rank = 0
    pinv = 1.0 / p
    for w, pairs in sorted(col_blocks.items()):
        row_offsets: dict[tuple, int] = {}
        dr = 0
        for wt in groups_at:
            rem = tuple(a - b for a, b in zip(w, wt))
            tis = groups_mu.get(rem)
            if tis:
                row_offsets[wt] = dr
                dr += len(groups_at[wt]) * len(tis)
        dc = sum(len(groups_alpha[wa]) * len(groups_nu[wn]) for wa, wn in pairs)
        if not dr or not dc:
            continue
        A = np.zeros((dr, dc), dtype=np.float64)
        coff = 0
        for wa, wn in pairs:
            width = len(groups_alpha[wa]) * len(groups_nu[wn])
            for i in range(1, k + 1):
                P = pslice.get((i, wa))
                C = cslice.get((i, wn))
                if P is None or C is None:
                    continue
                wa2 = list(wa)
                wa2[i - 1] += 1
                roff = row_offsets.get(tuple(wa2))
                if roff is None:
                    continue
                block = np.kron(P, C)
                A[roff:roff + block.shape[0], coff:coff + width] += block
            coff += width
        exactlin._floor_mod(A, p, pinv)
        if min(dr, dc) > 192:
            rank += exactlin.rank_modp_dense(A, p)
        else:
            rank += exactlin._modp_rank_np(A.astype(np.int64), p)
    return rank


STREAMED_THRESHOLD = 40000  # domain dimension above which the streamed path runs


def square_flattening_check(mu: Partition, nu: Partition, k: int,
                            exact: bool = False, primes: int = 3, seed: int = 0) -> dict:
    """Is the square Young flattening (alpha = mu, alpha~ = nu) of full rank m*n?

    Modular rank is sound here: a full modular rank certifies full rational
    rank.  Very large instances stream one weight block at a time through the
    GEMM-blocked elimination; a full-rank failure is retried with another
    prime before being reported."""
    mu, nu = tuple(mu), tuple(nu)
    j = added_row(mu, nu)
    if j == 1 or j == k:
        raise InvalidPair("the added cell must avoid the first and k-th rows")
    from .tensorspace import build_tensor

    t0 = time.monotonic()
    T = build_tensor(k, mu, nu)
    expected = dim_schur(mu, k) * dim_schur(nu, k)
    if not exact and expected > STREAMED_THRESHOLD:
        rank = 0
        pool = exactlin.PRIME_POOL_19BIT
        tried = []
        for t in range(max(1, primes)):
            p = pool[(seed + t) % len(pool)]
            tried.append(p)
            rank = max(rank, _young_rank_modp_streamed(T, mu, nu, p))
            if rank == expected:
                break
        return {
            "mu": list(mu), "nu": list(nu), "k": k,
            "rank": rank, "expected": expected, "full_rank": rank == expected,
            "method": f"modular-gemm (primes {tried})",
            "seconds": round(time.monotonic() - t0, 3),
        }
    B = young_blocks(T, mu, nu)
    assert B.rows == B.cols == expected
    if exact:
        rank = B.rank_exact()
        method = "fraction-free"
    else:
        rank = 0
        method = "modular"
        for p in exactlin.pick_primes(primes, seed):
            rank = max(rank, B.rank_mod_p(p))
            if rank == expected:
                break
    return {
        "mu": list(mu), "nu": list(nu), "k": k,
        "rank": rank, "expected": expected, "full_rank": rank == expected,
        "method": method, "seconds": round(time.monotonic() - t0, 3),
    }
