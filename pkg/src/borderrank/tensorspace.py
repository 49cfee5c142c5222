"""Invariant tensors T in V* (x) S_mu V* (x) S_nu V and their matrix spaces.

The tensor is stored as an exact coefficient array over (basis vector of V,
SSYT of mu, SSYT of nu); its matrix-of-linear-forms view realizes the
constant-rank space, and evaluation plus the combinatorial rank predictor
give the constant-rank verification."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import exactlin, partitions, schur
from .exactlin import ExactMatrix, format_scalar, parse_scalar
from .partitions import InvalidPair, Partition, added_row, dim_schur, enumerate_ssyt
from .schur import pieri_project


class InvariantTensor:
    """T = sum c[i, tau, sigma] alpha_i (x) tau* (x) sigma, with exact coefficients."""

    def __init__(self, k: int, mu: Partition, nu: Partition, coeffs=None, construction="pieri"):
        self.k = k
        self.mu = tuple(mu)
        self.nu = tuple(nu)
        self.mu_basis = enumerate_ssyt(self.mu, k)
        self.nu_basis = enumerate_ssyt(self.nu, k)
        self.construction = construction
        # keys (i, tau_index, sigma_index), 0-based tableau indices, i in 1..k
        self.coeffs: dict[tuple[int, int, int], Fraction] = dict(coeffs or {})

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.k, len(self.mu_basis), len(self.nu_basis))

    def to_json(self) -> dict:
        return {
            "schema": "borderrank/1",
            "k": self.k,
            "mu": list(self.mu),
            "nu": list(self.nu),
            "construction": self.construction,
            "terms": [
                {"i": i, "tau_index": ti, "sigma_index": si, "coeff": format_scalar(c)}
                for (i, ti, si), c in sorted(self.coeffs.items())
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "InvariantTensor":
        t = cls(obj["k"], tuple(obj["mu"]), tuple(obj["nu"]),
                construction=obj.get("construction", "pieri"))
        for term in obj["terms"]:
            t.coeffs[(term["i"], term["tau_index"], term["sigma_index"])] = parse_scalar(term["coeff"])
        return t


def build_tensor(k: int, mu: Partition, nu: Partition) -> InvariantTensor:
    """Assemble the invariant tensor from the equivariant single-cell projection."""
    mu, nu = tuple(mu), tuple(nu)
    j = added_row(mu, nu)
    if len(nu) > k:
        raise InvalidPair(f"{nu} has more than {k} rows")
    T = InvariantTensor(k, mu, nu)
    if nu[j - 1] == nu[0]:
        # appended-wedge fast path (well defined for last-column additions)
        sigma_index = {s: i for i, s in enumerate(T.nu_basis)}
        for ti, tau in enumerate(T.mu_basis):
            for i in range(1, k + 1):
                img = schur.straighten_filling(schur._append_cell(tau, j, i))
                for sigma, c in img.items():
                    T.coeffs[(i, ti, sigma_index[sigma])] = Fraction(c)
        return T
    rows = schur.equivariant_projection_indexed(mu, nu, k)
    for si, row in enumerate(rows):
        for idx, c in row.items():
            T.coeffs[(idx % k + 1, idx // k, si)] = c
    return T


def build_skew_tensor(k: int) -> InvariantTensor:
    """The skew tensor sum_{i<j} a_i (x) a_j (x) e_i^e_j - a_j (x) a_i (x) e_i^e_j.

    Stored on the mu=(1), nu=(1,1) tableau bases, identifying the column
    tableau [[i],[j]] with e_i ^ e_j.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    T = InvariantTensor(k, (1,), (1, 1), construction="skew")
    tau_index = {t[0][0]: ti for ti, t in enumerate(T.mu_basis)}
    sigma_index = {(s[0][0], s[1][0]): si for si, s in enumerate(T.nu_basis)}
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            si = sigma_index[(i, j)]
            T.coeffs[(i, tau_index[j], si)] = Fraction(1)
            T.coeffs[(j, tau_index[i], si)] = Fraction(-1)
    return T


class LinearMatrixSpace:
    """The k-dimensional space of matrices S_mu V -> S_nu V cut out by T."""

    def __init__(self, T: InvariantTensor):
        self.T = T
        self.rows = len(T.nu_basis)
        self.cols = len(T.mu_basis)
        # entries[(si, ti)] = {i: coeff} meaning sum_i coeff * x_i
        self.entries: dict[tuple[int, int], dict[int, Fraction]] = {}
        for (i, ti, si), c in T.coeffs.items():
            self.entries.setdefault((si, ti), {})[i] = c

    def matrix_at(self, v) -> ExactMatrix:
        v = [exactlin.as_scalar(x) for x in v]
        if len(v) != self.T.k:
            raise ValueError(f"need a vector of length {self.T.k}")
        M = ExactMatrix(self.rows, self.cols)
        for (si, ti), form in self.entries.items():
            val = sum((form[i] * v[i - 1] for i in form), Fraction(0))
            if val:
                M.add_to(si, ti, val)
        return M

    def entry_form(self, si: int, ti: int) -> dict[int, Fraction]:
        return dict(self.entries.get((si, ti), {}))

    def pretty(self, fmt: str = "text") -> str:
        names = [f"x{i}" for i in range(1, self.T.k + 1)]

        def form_str(form):
            if not form:
                return "0"
            parts = []
            for i in sorted(form):
                c = form[i]
                if c == 1:
                    parts.append(f"+{names[i-1]}")
                elif c == -1:
                    parts.append(f"-{names[i-1]}")
                else:
                    parts.append(f"{'+' if c > 0 else ''}{format_scalar(c)}*{names[i-1]}")
            s = "".join(parts)
            return s[1:] if s.startswith("+") else s

        grid = [[form_str(self.entries.get((r, c), {})) for c in range(self.cols)]
                for r in range(self.rows)]
        if fmt == "latex":
            body = " \\\\\n".join(" & ".join(row) for row in grid)
            return "\\begin{pmatrix}\n" + body + "\n\\end{pmatrix}"
        widths = [max(len(grid[r][c]) for r in range(self.rows)) for c in range(self.cols)]
        return "\n".join("  ".join(grid[r][c].rjust(widths[c]) for c in range(self.cols))
                         for r in range(self.rows))


def matrix_at(space: LinearMatrixSpace, v) -> ExactMatrix:
    return space.matrix_at(v)


@dataclass
class ConstantRankReport:
    mu: Partition
    nu: Partition
    k: int
    expected: tuple[int, int, int]  # (rank, kernel, cokernel)
    samples: int
    evaluations: list = field(default_factory=list)  # (label, rank, ker, coker)
    violations: list = field(default_factory=list)   # (vector, (rank, ker, coker))

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "schema": "borderrank/1",
            "mu": list(self.mu), "nu": list(self.nu), "k": self.k,
            "expected": list(self.expected),
            "samples": self.samples,
            "evaluations": [[lbl, r, ke, co] for (lbl, r, ke, co) in self.evaluations],
            "violations": [[list(map(str, v)), list(t)] for v, t in self.violations],
            "ok": self.ok,
        }


def constant_rank_check(T: InvariantTensor, samples: int = 20, seed: int = 0) -> ConstantRankReport:
    """Evaluate at all basis vectors plus random nonzero integer vectors and
    compare (rank, ker, coker) with the combinatorial predictor everywhere.

    Violations are recorded with their witness vector, not raised."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    expected = partitions.predicted_generic_rank(T.mu, T.nu, T.k)
    space = LinearMatrixSpace(T)
    report = ConstantRankReport(T.mu, T.nu, T.k, expected, samples)
    rng = random.Random(seed)
    vectors = [(f"e{i+1}", [Fraction(1 if j == i else 0) for j in range(T.k)]) for i in range(T.k)]
    for s in range(samples):
        while True:
            v = [Fraction(rng.randint(-9, 9)) for _ in range(T.k)]
            if any(v):
                break
        vectors.append((f"sample{s}", v))
    for label, v in vectors:
        M = space.matrix_at(v)
        r = exactlin.rank_exact(M)
        triple = (r, space.cols - r, space.rows - r)
        report.evaluations.append((label, *triple))
        if triple != expected:
            report.violations.append((v, triple))
    return report


def conciseness_check(T: InvariantTensor) -> tuple[int, int, int]:
    """Ranks of the three one-factor flattenings; concise iff each equals its dimension."""
    k, m, n = T.dims
    A = ExactMatrix(k, m * n)
    B = ExactMatrix(m, k * n)
    C = ExactMatrix(n, k * m)
    for (i, ti, si), c in T.coeffs.items():
        A.add_to(i - 1, ti * n + si, c)
        B.add_to(ti, (i - 1) * n + si, c)
        C.add_to(si, (i - 1) * m + ti, c)
    return (exactlin.rank_exact(A), exactlin.rank_exact(B), exactlin.rank_exact(C))


def is_concise(T: InvariantTensor) -> bool:
    return conciseness_check(T) == T.dims


def one_a_generic_diagnostic(T: InvariantTensor, samples: int = 10, seed: int = 0) -> dict:
    """Max rank of T_A(alpha) over sampled alpha versus min(m, n) (boolean diagnostic)."""
    k, m, n = T.dims
    rng = random.Random(seed)
    best = 0
    for _ in range(samples):
        alpha = [Fraction(rng.randint(-9, 9)) for _ in range(k)]
        M = ExactMatrix(m, n)
        for (i, ti, si), c in T.coeffs.items():
            val = c * alpha[i - 1]
            if val:
                M.add_to(ti, si, val)
        best = max(best, exactlin.rank_exact(M))
    return {"max_sampled_rank": best, "full": min(m, n), "one_generic": best == min(m, n)}
