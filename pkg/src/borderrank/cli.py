"""Command-line front end.

Subcommands: dims, tensor build, rank-space, flatten koszul|young, bound,
verify, cartan, table, conjecture scan, apolarity 210, apolarity
verify-stated.  Exit codes: 0 success/verified, 1 refuted or mismatch
against a golden table, 2 usage or internal error.  All sampling is driven
by --seed, so outputs are deterministic given the flags.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from math import ceil, comb

from . import apolarity, decomp, exactlin, flatten, partitions, tensorspace
from .partitions import format_partition, parse_partition

CACHE_ENV = "BORDERRANK_CACHE_DIR"
SCHEMA = "borderrank/1"


# ---------------------------------------------------------------------------
# golden tables (values exactly as published; any computed mismatch is a bug)
# ---------------------------------------------------------------------------

GOLDEN_BOUNDS = {
    (0, 0): 5, (0, 1): 10, (0, 2): 17, (0, 3): 26, (0, 4): 37,
    (1, 0): 10, (1, 1): 19, (1, 2): 31, (1, 3): 46,
    (2, 0): 17, (2, 1): 31, (2, 2): 49,
    (3, 0): 26, (3, 1): 46,
    (4, 0): 37,
}
GOLDEN_KOSZUL = {
    (0, 0): 5, (0, 1): 9, (0, 2): 15, (0, 3): 23, (0, 4): 32,
    (1, 0): 9, (1, 1): 18, (1, 2): 29, (1, 3): 42,
    (2, 0): 15, (2, 1): 29, (2, 2): 46,
    (3, 0): 23, (3, 1): 42,
    (4, 0): 32,
}
GOLDEN_DIMS = {
    (a, b): ((a + b + 3) * (a + 1) * (b + 2) // 2, (a + b + 3) * (a + 2) * (b + 1) // 2)
    for a in range(5) for b in range(5) if a + b <= 4
}
GOLDEN_SKEW_BRACKETS = {6: (18, 19), 7: (25, 26), 8: (32, 34), 9: (41, 43)}

TABLE_NAMES = ("theorem3-bounds", "theorem3-dims", "theorem3-koszul", "skew-bounds")


def _emit(args, payload: str):
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(payload if payload.endswith("\n") else payload + "\n")
    else:
        print(payload)


def _emit_json(args, obj) -> None:
    _emit(args, json.dumps(obj, indent=2, sort_keys=False))


# ---------------------------------------------------------------------------
# table rendering
# ---------------------------------------------------------------------------

def _grid(cells: dict, fmt_cell) -> list[list[str]]:
    rows = []
    header = [""] + [f"b={b}" for b in range(5)]
    rows.append(header)
    for a in range(5):
        row = [f"a={a}"]
        for b in range(5):
            row.append(fmt_cell(cells[(a, b)]) if (a, b) in cells else "")
        rows.append(row)
    return rows


def _render(rows: list[list[str]], fmt: str) -> str:
    if fmt == "csv":
        return "\n".join(",".join(r) for r in rows)
    if fmt == "json":
        return json.dumps({"schema": SCHEMA, "rows": rows}, indent=2)
    if fmt == "latex":
        ncols = len(rows[0])
        out = ["\\begin{tabular}{c|" + "c " * (ncols - 1) + "}"]
        out.append(" & ".join(rows[0]) + " \\\\")
        out.append("\\hline")
        for r in rows[1:]:
            out.append(" & ".join(r) + " \\\\")
        out.append("\\end{tabular}")
        return "\n".join(out)
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    return "\n".join(" | ".join(r[c].ljust(widths[c]) for c in range(len(r))).rstrip()
                     for r in rows)


def _computed_table(name: str, exact: bool, primes: int, seed: int):
    if name == "theorem3-dims":
        return {k: v for k, v in GOLDEN_DIMS.items()}, GOLDEN_DIMS
    if name == "skew-bounds":
        computed = {}
        for k in sorted(GOLDEN_SKEW_BRACKETS):
            Tk = tensorspace.build_skew_tensor(k)
            lower = flatten.koszul_bound(Tk, 1, exact=exact, primes=primes, seed=seed).bound
            upper = decomp.skew_upper_decomposition(k).size
            computed[k] = (lower, upper)
        return computed, GOLDEN_SKEW_BRACKETS
    golden = GOLDEN_BOUNDS if name == "theorem3-bounds" else GOLDEN_KOSZUL
    computed = {}
    for (a, b) in golden:
        mu, nu = partitions.two_row_family(a, b)
        T = tensorspace.build_tensor(3, mu, nu)
        use_exact = exact if exact is not None else (a + b <= 3)
        if name == "theorem3-bounds":
            cert = flatten.young_bound(T, mu, nu, exact=use_exact, primes=primes, seed=seed)
        else:
            cert = flatten.koszul_bound(T, 1, exact=use_exact, primes=primes, seed=seed)
        computed[(a, b)] = cert.bound
    return computed, golden


def cmd_table(args) -> int:
    name = args.name
    if name not in TABLE_NAMES:
        print(f"unknown table {name!r}; choose from {TABLE_NAMES}", file=sys.stderr)
        return 2
    computed, golden = _computed_table(name, args.exact if args.exact else None,
                                       args.primes, args.seed)
    mismatches = {key: (computed[key], golden[key]) for key in golden
                  if computed[key] != golden[key]}
    if name == "skew-bounds":
        rows = [["k", "lower", "upper"]]
        for k in sorted(computed):
            lo, hi = computed[k]
            rows.append([str(k), str(lo), str(hi)])
    else:
        fmt_cell = (lambda v: f"({v[0]},{v[1]})") if name == "theorem3-dims" else str
        rows = _grid(computed, fmt_cell)
    _emit(args, _render(rows, args.format))
    if mismatches:
        print(f"MISMATCH against golden data: {mismatches}", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# simple commands
# ---------------------------------------------------------------------------

def cmd_dims(args) -> int:
    lam = parse_partition(args.lam)
    d = partitions.dim_schur(lam, args.k)
    _emit_json(args, {"schema": SCHEMA, "lambda": list(lam), "k": args.k, "dim": d})
    return 0


def cmd_tensor_build(args) -> int:
    T = tensorspace.build_tensor(args.k, parse_partition(args.mu), parse_partition(args.nu))
    _emit_json(args, T.to_json())
    return 0


def cmd_rank_space(args) -> int:
    T = tensorspace.build_tensor(args.k, parse_partition(args.mu), parse_partition(args.nu))
    report = tensorspace.constant_rank_check(T, samples=args.samples, seed=args.seed)
    if args.show_matrix:
        _emit(args, tensorspace.LinearMatrixSpace(T).pretty(
            "latex" if args.format == "latex" else "text"))
    _emit_json(args, report.to_json())
    return 0 if report.ok else 1


def _flatten_common(args):
    T = tensorspace.build_tensor(args.k, parse_partition(args.mu), parse_partition(args.nu))
    return T


def cmd_flatten_koszul(args) -> int:
    T = _flatten_common(args)
    M = flatten.koszul_matrix(T, args.p)
    out = M.to_json()
    out["schema"] = SCHEMA
    if args.rank:
        out["rank"] = flatten.koszul_blocks(T, args.p).evidence(
            exact=args.exact or None, primes=args.primes, seed=args.seed).to_json()
    _emit_json(args, out)
    return 0


def cmd_flatten_young(args) -> int:
    T = _flatten_common(args)
    alpha = parse_partition(args.alpha)
    alpha_tilde = parse_partition(args.alpha_tilde)
    M = flatten.young_matrix(T, alpha, alpha_tilde)
    out = M.to_json()
    out["schema"] = SCHEMA
    if args.rank:
        out["rank"] = flatten.young_blocks(T, alpha, alpha_tilde).evidence(
            exact=args.exact or None, primes=args.primes, seed=args.seed).to_json()
    _emit_json(args, out)
    return 0


def cmd_bound(args) -> int:
    T = tensorspace.build_tensor(args.k, parse_partition(args.mu), parse_partition(args.nu))
    exact = True if args.exact else None
    if args.method == "koszul":
        cert = flatten.koszul_bound(T, args.p, exact=exact, primes=args.primes, seed=args.seed)
    else:
        alpha = parse_partition(args.alpha) if args.alpha else T.mu
        alpha_tilde = parse_partition(args.alpha_tilde) if args.alpha_tilde else T.nu
        cert = flatten.young_bound(T, alpha, alpha_tilde, exact=exact,
                                   primes=args.primes, seed=args.seed)
    _emit_json(args, cert.to_json())
    return 0


def cmd_verify(args) -> int:
    try:
        if args.builtin:
            D = decomp.builtin_decomposition(args.builtin)
        else:
            with open(args.file) as fh:
                D = decomp.CurveDecomposition.from_json(json.load(fh))
    except (KeyError, OSError, ValueError, TypeError) as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return 2
    try:
        report = decomp.verify_border_decomposition(D)
    except decomp.DimensionMismatch as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return 2
    _emit_json(args, report.to_json())
    return 0 if report.passed else 1


def cmd_cartan(args) -> int:
    lam = parse_partition(args.lam)
    lamp = parse_partition(args.lamp)
    points = decomp.example3_points() if args.zeta_points else None
    D = decomp.cartan_decomposition(lam, lamp, args.k, point_source=points, seed=args.seed)
    report = decomp.verify_rank_decomposition(D)
    out = D.to_json()
    out["verification"] = report.to_json()
    _emit_json(args, out)
    return 0 if report.passed else 1


def cmd_conjecture_scan(args) -> int:
    rows, cols = (int(x) for x in args.box.lower().split("x"))
    instances = []
    for nu in _partitions_in_box(rows, cols):
        if len(nu) < 2:
            continue
        k = args.k if args.k else len(nu) + 1
        for j in range(2, len(nu) + 1):
            mu = list(nu)
            mu[j - 1] -= 1
            mu_t = tuple(x for x in mu if x > 0)
            try:
                if partitions.added_row(mu_t, nu) != j:
                    continue
            except partitions.InvalidPair:
                continue
            if j >= k:
                continue
            m = partitions.dim_schur(mu_t, k)
            n = partitions.dim_schur(nu, k)
            instances.append((m * n, mu_t, nu, k))
    instances.sort(key=lambda t: (t[0], t[1], t[2]))
    cache_dir = os.environ.get(CACHE_ENV)
    results = []
    start = time.monotonic()
    budget = args.budget_seconds
    for size, mu, nu, k in instances:
        label = f"{format_partition(mu)}|{format_partition(nu)}|k{k}"
        if budget and time.monotonic() - start > budget:
            results.append({"mu": list(mu), "nu": list(nu), "k": k,
                            "status": "not attempted", "reason": "budget exhausted"})
            continue
        cache_file = os.path.join(cache_dir, label.replace("|", "_") + ".json") if cache_dir else None
        if cache_file and os.path.exists(cache_file):
            with open(cache_file) as fh:
                entry = json.load(fh)
        else:
            entry = flatten.square_flattening_check(mu, nu, k, exact=args.exact,
                                                    primes=args.primes, seed=args.seed)
            entry["status"] = "done"
            if cache_file:
                os.makedirs(cache_dir, exist_ok=True)
                with open(cache_file, "w") as fh:
                    json.dump(entry, fh)
        results.append(entry)
    summary = {
        "schema": SCHEMA,
        "box": args.box,
        "instances": len(instances),
        "attempted": sum(1 for r in results if r.get("status") == "done"),
        "all_full_rank": all(r.get("full_rank", False)
                             for r in results if r.get("status") == "done"),
        "total_seconds": round(time.monotonic() - start, 3),
        "results": results,
    }
    _emit_json(args, summary)
    if not summary["all_full_rank"]:
        return 1
    return 0


def _partitions_in_box(rows: int, cols: int):
    out = []

    def rec(prefix, row, minpart):
        if row == rows:
            if prefix:
                out.append(tuple(prefix))
            return
        if prefix:
            out.append(tuple(prefix))
        hi = prefix[-1] if prefix else cols
        for v in range(hi, 0, -1):
            rec(prefix + [v], row + 1, v)

    rec([], 0, cols)
    return sorted(set(out), reverse=True)


def cmd_apolarity_210(args) -> int:
    if args.skew:
        target = {"type": "skew", "k": args.skew}
    else:
        target = {"type": "invariant", "k": args.k,
                  "mu": list(parse_partition(args.mu)), "nu": list(parse_partition(args.nu))}
    report = apolarity.run_210_test(target, args.r, strict=args.strict,
                                    fills_space_assumption=args.fills_space or None)
    lines = [f"(210) test at r = {args.r}: {report.verdict}",
             f"psi' kernel: {report.psi_prime_kernel}"]
    for cand in report.candidates:
        lines.append(f"  {cand.label():40s} kernel dim {cand.kernel_dim}")
    for w in report.warnings:
        lines.append(f"  warning: {w}")
    _emit(args, "\n".join(lines))
    if args.json_out:
        with open(args.json_out, "w") as fh:
            json.dump(report.to_json(), fh, indent=2)
    return 0


def cmd_apolarity_verify_stated(args) -> int:
    report = apolarity.verify_stated_spaces()
    _emit_json(args, report)
    return 0 if report["ok"] else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="borderrank",
                                 description="Exact border rank bounds for invariant tensors")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seeded=True):
        p.add_argument("--out", help="write the artifact to this path instead of stdout")
        p.add_argument("--format", default="md", choices=("md", "csv", "latex", "json"))
        p.add_argument("--exact", action="store_true",
                       help="force fraction-free exact ranks everywhere")
        p.add_argument("--primes", type=int, default=3, help="primes for modular rank evidence")
        if seeded:
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("dims", help="dimension of a Schur module")
    p.add_argument("--lam", required=True)
    p.add_argument("--k", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_dims)

    tensor = sub.add_parser("tensor", help="tensor operations").add_subparsers(
        dest="subcommand", required=True)
    p = tensor.add_parser("build", help="build the invariant tensor")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mu", required=True)
    p.add_argument("--nu", required=True)
    common(p)
    p.set_defaults(func=cmd_tensor_build)

    p = sub.add_parser("rank-space", help="constant-rank verification of the matrix space")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mu", required=True)
    p.add_argument("--nu", required=True)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--show-matrix", action="store_true")
    common(p)
    p.set_defaults(func=cmd_rank_space)

    fl = sub.add_parser("flatten", help="flattening matrices").add_subparsers(
        dest="subcommand", required=True)
    p = fl.add_parser("koszul")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mu", required=True)
    p.add_argument("--nu", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--rank", action="store_true", help="attach rank evidence")
    common(p)
    p.set_defaults(func=cmd_flatten_koszul)
    p = fl.add_parser("young")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mu", required=True)
    p.add_argument("--nu", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--alpha-tilde", dest="alpha_tilde", required=True)
    p.add_argument("--rank", action="store_true")
    common(p)
    p.set_defaults(func=cmd_flatten_young)

    p = sub.add_parser("bound", help="border rank lower bound certificate")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mu", required=True)
    p.add_argument("--nu", required=True)
    p.add_argument("--method", choices=("koszul", "young"), required=True)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--alpha")
    p.add_argument("--alpha-tilde", dest="alpha_tilde")
    common(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("verify", help="verify a decomposition (exit 1 when refuted)")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", help="T3 | T4-conner | Tk-diff:K | Tk-upper:K | example3")
    src.add_argument("--file")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("cartan", help="generate and verify a highest-weight-orbit decomposition")
    p.add_argument("--lam", required=True)
    p.add_argument("--lamp", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--zeta-points", action="store_true",
                   help="use the five explicit P^1 points over Q(zeta3) (k = 2 only)")
    common(p)
    p.set_defaults(func=cmd_cartan)

    p = sub.add_parser("table", help="emit a table and diff it against the golden copy")
    p.add_argument("--name", required=True, help="|".join(TABLE_NAMES))
    common(p)
    p.set_defaults(func=cmd_table)

    conj = sub.add_parser("conjecture", help="full-rank scans").add_subparsers(
        dest="subcommand", required=True)
    p = conj.add_parser("scan")
    p.add_argument("--box", required=True, help="RxC, e.g. 4x4 or 5x2")
    p.add_argument("--k", type=int, default=0, help="0 = use len(nu)+1 per instance")
    p.add_argument("--budget-seconds", type=float, default=0.0)
    p.add_argument("--jobs", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_conjecture_scan)

    apol = sub.add_parser("apolarity", help="border apolarity runs").add_subparsers(
        dest="subcommand", required=True)
    p = apol.add_parser("210")
    p.add_argument("--k", type=int)
    p.add_argument("--mu")
    p.add_argument("--nu")
    p.add_argument("--skew", type=int, help="run on the skew tensor of this dimension")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--strict", action="store_true",
                   help="promote repeated-weight warnings to errors")
    p.add_argument("--fills-space", default="",
                   help="external genericity citation enabling an exact border rank conclusion")
    p.add_argument("--json-out")
    common(p)
    p.set_defaults(func=cmd_apolarity_210)
    p = apol.add_parser("verify-stated")
    common(p)
    p.set_defaults(func=cmd_apolarity_verify_stated)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (partitions.InvalidPair, partitions.NotADiagram, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
