"""Command-line entry point: ``python -m tropint <command> ...``.

Exit codes: 0 success (a budgeted search that stops early still counts),
2 invalid input, 3 a verification check failed.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path


from . import analytics, intersection, klt, search
from .amplitudes import amplitude_unsigned, kinematics_to_json, load_kinematics, sample_mandelstam
from .orderings import enumerate_orderings, format_ordering, parse_ordering

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 2, 3
CACHE_ENV = "TROPINT_CACHE"
THREADS_ENV = "TROPINT_THREADS"


class VerificationFailed(RuntimeError):
    pass


def cache_dir() -> Path:
    root = os.environ.get(CACHE_ENV)
    path = Path(root) if root else Path.home() / ".cache" / "tropint"
    path.mkdir(parents=True, exist_ok=True)
    return path


def thread_count(flag: int | None) -> int:
    if flag is not None:
        if flag < 1:
            raise ValueError("--threads must be >= 1")
        return flag
    env = os.environ.get(THREADS_ENV)
    if env:
        value = int(env)
        if value < 1:
            raise ValueError(f"{THREADS_ENV} must be >= 1")
        return value
    return os.cpu_count() or 1


def cached_matrix(n: int, kind: str, threads: int):
    """Load the (n, kind) matrix from the cache, building and storing it if absent."""
    path = cache_dir() / f"{kind}_n{n}.tmx"
    if path.exists():
        return intersection.load_matrix(path), path
    mode = "counts" if kind == "counts" else "binary"
    mat = intersection.build_matrix(n, mode, workers=threads)
    tmp = path.with_suffix(".tmp")
    intersection.save_matrix(tmp, mat)
    tmp.replace(path)
    return mat, path


def _emit(args, payload: dict | str) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=1) + "\n"
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _budget(text: str | None) -> int | None:
    if text is None:
        return None
    value = float(text)
    if value < 1 or not math.isfinite(value):
        raise ValueError(f"budget must be a positive number, got {text}")
    return int(value)


# ----------------------------------------------------------------- commands


def cmd_orderings(args) -> int:
    cat = enumerate_orderings(args.n)
    if args.format == "json" and args.output:
        _emit(args, {"schema": 1, "n": args.n, "orderings": cat.as_strings()})
    else:
        _emit(args, "".join(s + "\n" for s in cat.as_strings()))
    return EXIT_OK


def cmd_intersect(args) -> int:
    threads = thread_count(args.threads)
    if args.matrix:
        if args.n is None:
            raise ValueError("--matrix needs --n")
        kind = "binary" if args.binary else "counts"
        mat, path = cached_matrix(args.n, kind, threads)
        if args.output:
            intersection.save_matrix(args.output, mat)
            path = Path(args.output)
        print(f"{kind} matrix n={args.n} {len(mat.catalog)}x{len(mat.catalog)} -> {path}")
        return EXIT_OK
    if args.alpha is None or args.beta is None:
        raise ValueError("pair mode needs --alpha and --beta")
    a, b = intersection.parse_pair(args.alpha, args.beta)
    if args.n is not None and a.n != args.n:
        raise ValueError(f"orderings have n={a.n} but --n {args.n}")
    if args.binary:
        value = int(intersection.fast_nonzero(a, b))
    else:
        value = intersection.count_dp(a, b)
    out = {"schema": 1, "alpha": format_ordering(a), "beta": format_ordering(b),
           "kind": "binary" if args.binary else "counts", "value": value}
    if not args.binary:
        poly = intersection.polygon_decomposition(a, b)
        out["polygons"] = None if poly.sides is None else list(poly.sides)
        out["forced_splits"] = sorted(sorted(s) for s in poly.forced_splits)
        out["polygon_value"] = poly.value
        if poly.value != value:
            _emit(args, out)
            raise VerificationFailed(f"polygon rule gives {poly.value}, dynamic programming gives {value}")
    _emit(args, out)
    return EXIT_OK


def cmd_klt(args) -> int:
    part = klt.block_partition(args.n)
    out = {"schema": 1, **part.to_json()}
    sets = klt.klt_sets(args.n)
    out["A"] = [format_ordering(o) for o in sets.set_a]
    out["B"] = [format_ordering(o) for o in sets.set_b]
    if args.n <= klt.DENSITY_EXACT_MAX_N:
        d = klt.block_density_exact(args.n)
        out["block_density_exact"] = f"{d.numerator}/{d.denominator}"
    if args.n >= 7:
        d = klt.block_density_formula(args.n)
        out["block_density_formula"] = f"{d.numerator}/{d.denominator}"
    _emit(args, out)
    return EXIT_OK


def cmd_search(args) -> int:
    threads = thread_count(args.threads)
    binary, _ = cached_matrix(args.n, "binary", threads)
    cat = binary.catalog
    if args.symmetric:
        size, members = search.symmetric_degree(args.n, binary)
        rep = search.verify_witness(members, members)
        if not rep.is_permutation or rep.rank != size:
            raise VerificationFailed("symmetric witness is not diagonal")
        _emit(args, {"schema": 1, "n": args.n, "symmetric": True, "size": size,
                     "orderings": [format_ordering(o) for o in members],
                     "diagonal": rep.diagonal_values})
        print(f"symmetric degree n={args.n}: {size}", file=sys.stderr)
        return EXIT_OK
    resume = json.loads(Path(args.resume).read_text()).get("checkpoint") if args.resume else None
    w = search.max_permutation_submatrix(
        binary,
        budget=_budget(args.budget),
        deterministic=not args.nondeterministic,
        symmetry=args.symmetry_reduce,
        resume=resume,
        time_limit=args.time_limit,
        seed=args.seed,
    )
    pairs = w.pairs()
    rep = search.verify_witness([cat.orderings[r] for r, _ in pairs], [cat.orderings[c] for _, c in pairs])
    if not rep.is_permutation or rep.rank != w.size:
        raise VerificationFailed(f"witness of size {w.size} fails the diagonal check")
    out = search.witness_to_json(w, cat)
    out["diagonal"] = rep.diagonal_values
    _emit(args, out)
    marker = " (lower-bound)" if w.lower_bound else ""
    print(f"diagonal degree n={args.n}: {w.size}{marker}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    from . import scattering

    n = args.n
    if n not in (4, 5, 6):
        raise ValueError("verify supports n in (4, 5, 6)")
    kin = sample_mandelstam(n, args.seed)
    cat = enumerate_orderings(n)
    k = math.factorial(n - 3)
    report = {"schema": 1, "n": n, "seed": args.seed, "size": len(cat)}
    try:
        sol = scattering.solve_scattering(kin, seed=args.seed)
    except scattering.ScatteringError as exc:
        report["error"] = str(exc)
        _emit(args, report)
        raise VerificationFailed(str(exc)) from exc
    gram = scattering.gram_matrix(sol, cat)
    labels = [o.labels for o in cat.orderings]
    exact = scattering.exact_unsigned_matrix(kin, labels)
    threads = thread_count(args.threads)
    binary, _ = cached_matrix(n, "binary", threads)
    ratio = scattering.singular_value_ratio(gram.entries, k)
    zero_ok = bool((scattering.zero_pattern(gram.entries) == binary.bits).all())
    report.update({
        "solutions": len(sol.solutions),
        "max_residual": sol.max_residual,
        "rank": scattering.numerical_rank(gram.entries),
        "rank_bound": k,
        "sigma_ratio": ratio,
        "zero_pattern_ok": zero_ok,
    })
    try:
        signs = scattering.sign_inference(gram, exact, exact_rank=n <= 5)
        report["max_rel_mismatch"] = signs.max_rel_mismatch
        report["exact_rank"] = signs.exact_rank if n <= 5 else None
        magnitude_ok = True
    except scattering.ScatteringError as exc:
        report["magnitude_error"] = str(exc)
        magnitude_ok = False
    _emit(args, report)
    if not (zero_ok and magnitude_ok and ratio < 1e-8 and report["rank"] == k):
        raise VerificationFailed("scattering pipeline check failed")
    print(f"n={n} seed={args.seed}: rank {report['rank']}, zero-pattern OK, magnitudes OK", file=sys.stderr)
    return EXIT_OK


def cmd_density(args) -> int:
    if args.klt:
        rows = analytics.klt_density_table(args.min or 7, args.max or 30)
    else:
        rows = analytics.density_table(args.min or 5, args.max or 19)
    text = analytics.rows_to_csv(rows)
    if args.format == "json":
        text = json.dumps({"schema": 1, "klt": args.klt, "rows": [
            {"n": r.n, "nonzeros": r.nonzeros, "total": r.total,
             "density": f"{r.density.numerator}/{r.density.denominator}", "asymptote": r.asymptote}
            for r in rows]}, indent=1) + "\n"
    _emit(args, text)
    return EXIT_OK


def cmd_amplitude(args) -> int:
    kin = load_kinematics(args.kinematics) if args.kinematics else sample_mandelstam(args.n, args.seed)
    a, b = intersection.parse_pair(args.alpha, args.beta)
    if a.n != kin.n:
        raise ValueError(f"orderings have n={a.n}, kinematics n={kin.n}")
    val = amplitude_unsigned(kin, a, b)
    out = {"schema": 1, "n": kin.n, "seed": kin.seed, "alpha": format_ordering(a), "beta": format_ordering(b),
           "value": [str(val.value.numerator), str(val.value.denominator)], "terms": val.term_count}
    if args.show_kinematics:
        out["kinematics"] = kinematics_to_json(kin)
    _emit(args, out)
    return EXIT_OK


def cmd_scatteq(args) -> int:
    from . import scattering

    kin = load_kinematics(args.kinematics) if args.kinematics else sample_mandelstam(args.n, args.seed)
    try:
        sol = scattering.solve_scattering(kin, seed=args.seed)
    except scattering.ScatteringError as exc:
        raise VerificationFailed(str(exc)) from exc
    _emit(args, scattering.solutions_to_json(sol))
    return EXIT_OK


# ------------------------------------------------------------------ parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tropint", description="Intersection numbers of planar trees and related checks.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, n_required=True):
        sp.add_argument("--n", type=int, required=n_required)
        sp.add_argument("--output", help="write to this file instead of stdout")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--threads", type=int, help=f"worker processes (overrides {THREADS_ENV})")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("orderings", help="list dihedral orderings of 1..n")
    common(sp)
    sp.set_defaults(func=cmd_orderings)

    sp = sub.add_parser("intersect", help="intersection number of a pair, or the full matrix")
    common(sp, n_required=False)
    sp.add_argument("--alpha")
    sp.add_argument("--beta")
    sp.add_argument("--matrix", action="store_true")
    sp.add_argument("--binary", action="store_true")
    sp.set_defaults(func=cmd_intersect)

    sp = sub.add_parser("klt", help="KLT ordering sets and blocks")
    common(sp)
    sp.set_defaults(func=cmd_klt)

    sp = sub.add_parser("search", help="largest diagonal submatrix")
    common(sp)
    sp.add_argument("--budget", help="node budget, e.g. 1e9")
    sp.add_argument("--time-limit", type=float, help="seconds")
    sp.add_argument("--symmetric", action="store_true", help="require the row and column sets to coincide")
    sp.add_argument("--symmetry-reduce", action="store_true", help="one subproblem per dihedral orbit")
    sp.add_argument("--nondeterministic", action="store_true", help="skip the canonical witness pass")
    sp.add_argument("--resume", help="witness file with a checkpoint")
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("verify", help="scattering-equation cross-check of the amplitude matrix")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("density", help="density tables (CSV)")
    common(sp, n_required=False)
    sp.set_defaults(format="csv")
    sp.add_argument("--min", type=int)
    sp.add_argument("--max", type=int)
    sp.add_argument("--klt", action="store_true")
    sp.set_defaults(func=cmd_density)

    sp = sub.add_parser("amplitude", help="exact tree-sum amplitude for one pair")
    common(sp, n_required=False)
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--beta", required=True)
    sp.add_argument("--kinematics", help="kinematics JSON file instead of a seed")
    sp.add_argument("--show-kinematics", action="store_true")
    sp.set_defaults(func=cmd_amplitude)

    sp = sub.add_parser("scatteq", help="solve the scattering equations")
    common(sp, n_required=False)
    sp.add_argument("--kinematics")
    sp.set_defaults(func=cmd_scatteq)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("amplitude", "scatteq") and args.n is None and not args.kinematics:
        if args.command == "amplitude":
            args.n = parse_ordering(args.alpha).n
        else:
            parser.error("scatteq needs --n or --kinematics")
    try:
        return args.func(args)
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
