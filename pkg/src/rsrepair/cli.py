"""Command-line interface.

Machine-readable output (JSON, CSV, key=value summaries) goes to stdout or
the requested output file; diagnostics go to stderr.  Exit code 0 means the
command succeeded (for ``verify``: every requested check passed).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys

from . import bounds as bounds_mod
from . import repair, rs, schemes, sim
from .fields import FieldError, make_tower, prime_power_split
from .linalg import (
    BudgetError,
    complete_basis,
    enumerate_subspaces,
    intersect_dim,
    rank_of,
    scale,
    span,
)
from .repair import RepairScheme, SideInfo
from .sim import storage_dual_basis


def _tower_for(q: int, ell: int):
    p, e = prime_power_split(q)
    return make_tower(p, e, ell)


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _side_for(spec, s: int) -> SideInfo:
    """Canonical side set: the first s storage-coordinate functionals.

    The optimal bandwidth depends only on s, so the concrete choice does
    not matter; this one matches what a partial erasure produces.
    """
    if s == 0:
        return SideInfo.empty()
    dual = storage_dual_basis(spec)
    return SideInfo(tuple(dual[:s]))


# -- bound -------------------------------------------------------------------

def cmd_bound(args) -> int:
    if args.format is None:
        args.format = "csv" if args.sweep else "json"
    if args.sweep:
        rows = bounds_mod.sweep(args.q, args.ell, args.n, args.k)
        if args.format == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf)
            writer.writerow(bounds_mod.CSV_COLUMNS)
            for r in rows:
                writer.writerow(r.csv_row())
            _emit(buf.getvalue(), args.out)
        else:
            payload = [_bound_json(r) for r in rows]
            _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    else:
        r = bounds_mod.lower_bound(args.q, args.ell, args.s, args.n, args.k)
        if args.format == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf)
            writer.writerow(bounds_mod.CSV_COLUMNS)
            writer.writerow(r.csv_row())
            _emit(buf.getvalue(), args.out)
        else:
            _emit(json.dumps(_bound_json(r), sort_keys=True, indent=2) + "\n", args.out)
    return 0


def _bound_json(r) -> dict:
    return {
        "q": r.q,
        "ell": r.ell,
        "s": r.s,
        "n": r.n,
        "k": r.k,
        "r": r.r,
        "T_thresh": str(r.threshold),
        "b_ave": r.b_ave,
        "b_ave_integral": r.b_ave_integral,
        "t": r.t,
        "bound": r.bound,
    }


# -- construct ---------------------------------------------------------------

def cmd_construct(args) -> int:
    tower = _tower_for(args.q, args.ell)
    n = args.n if args.n else tower.order
    k = args.k if args.k else n - tower.q**args.m
    spec = rs.make_code(tower, n, k)
    side = _side_for(spec, args.s)
    if args.method == "subfield":
        built = schemes.build_subfield_scheme(spec, args.star, side, args.m)
        extra = ""
    elif args.method == "greedy":
        built = schemes.build_greedy_scheme(spec, args.star, side, args.m)
        extra = ""
    else:
        best = schemes.optimize_exhaustive(spec, args.star, side, args.m)
        built = schemes.build_scheme(
            spec, args.star, side, best.w_space, best.t_space, "exhaustive"
        )
        extra = (
            f" w_count={best.w_count} t_count={best.t_count}"
            f" intersection_sum={best.intersection_sum}"
        )
        print(
            f"search space: {best.w_count} W x {best.t_count} T", file=sys.stderr
        )
    bound = bounds_mod.lower_bound(args.q, args.ell, args.s, n, k).bound
    summary = (
        f"method={args.method} q={args.q} ell={args.ell} s={args.s} m={args.m}"
        f" n={n} k={k} star={args.star}"
        f" measured={built.measured_bw} predicted={built.predicted_bw}"
        f" bound={bound}{extra}\n"
    )
    sys.stdout.write(summary)
    if args.emit:
        with open(args.emit, "w") as fh:
            json.dump(built.to_json(), fh, sort_keys=True, indent=2)
            fh.write("\n")
    return 0


# -- simulate ----------------------------------------------------------------

def _parse_fail(spec_text: str) -> tuple[int, tuple[int, ...] | None]:
    pos_text, _, rest = spec_text.partition(":")
    position = int(pos_text)
    if not rest:
        return position, None
    if not rest.startswith("partial="):
        raise argparse.ArgumentTypeError(
            f"bad --fail value {spec_text!r}; use POS or POS:partial=i,j"
        )
    coords = tuple(int(c) for c in rest[len("partial="):].split(",") if c != "")
    if not coords:
        raise argparse.ArgumentTypeError("partial erasure needs coordinates")
    return position, coords


def cmd_simulate(args) -> int:
    tower = _tower_for(args.q, args.ell)
    n = args.n if args.n else tower.order
    k = args.k
    spec = rs.make_code(tower, n, k)
    fails = [_parse_fail(f) for f in args.fail]
    positions = [p for p, _ in fails]
    if len(set(positions)) != len(positions):
        print("duplicate --fail position", file=sys.stderr)
        return 2
    state = sim.provision(spec, seed=args.seed, count=args.stripes)
    for position, surviving in fails:
        sim.fail_node(state, position, surviving=surviving)
        outcome = sim.run_repair(state, position, method=args.method, m=args.m)
        if not outcome.success:  # pragma: no cover
            print(f"repair at {position} failed verification", file=sys.stderr)
            return 1
    payload = sim.report(state)
    _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    return 0


# -- verify ------------------------------------------------------------------

def random_side_info(tower, s: int, rng: random.Random) -> SideInfo:
    elems: list = []
    while len(elems) < s:
        cand = tower.element(rng.randrange(1, tower.order))
        if rank_of(tower, elems + [cand]) == len(elems) + 1:
            elems.append(cand)
    return SideInfo(tuple(elems))


def random_subspace(tower, dim: int, rng: random.Random):
    while True:
        elems = [tower.element(rng.randrange(1, tower.order)) for _ in range(dim)]
        cand = span(tower, elems)
        if cand.dim == dim:
            return cand


def _verify_lemma2(args) -> tuple[bool, str]:
    tower = _tower_for(args.q, args.ell or 4)
    spec = rs.make_code(tower, tower.order, tower.order - tower.q**args.m)
    rng = random.Random(args.seed)
    trials = 20
    max_w = max(d for d in range(tower.ell + 1) if tower.q**d <= spec.r)
    for _ in range(trials):
        s = rng.randrange(tower.ell)
        side = random_side_info(tower, s, rng)
        w_space = random_subspace(tower, rng.randrange(max_w + 1), rng)
        t_shape = random_subspace(tower, tower.ell - s, rng)
        _, t_prime = complete_basis(side.subspace(tower), t_shape)
        star = rng.randrange(spec.n)
        built = schemes.build_scheme(spec, star, side, w_space, t_prime)
        formula = schemes.intersection_bandwidth(
            spec, star, s, span(tower, list(built.t_basis)), w_space
        )
        if formula != built.measured_bw:
            return False, (
                f"formula {formula} != measured {built.measured_bw} at "
                f"s={s} star={star} W={w_space.codes} T'={t_prime.codes}"
            )
    return True, f"intersection formula = measured rank bandwidth on {trials} random schemes"


def _verify_lemma3(args) -> tuple[bool, str]:
    tower = _tower_for(args.q, args.ell or 6)
    ell = tower.ell
    divisors = [d for d in range(2, ell) if ell % d == 0]
    pairs = [(a, b) for a in divisors for b in divisors if a < b and math.gcd(a, b) == 1]
    if not pairs:
        return False, f"ell={ell} has no coprime divisor pair to test"
    checked = 0
    for a, b in pairs:
        sub_a = schemes.subfield_subspace(tower, a)
        sub_b = schemes.subfield_subspace(tower, b)
        for gc in range(1, tower.order):
            ga = scale(tower.element(gc), sub_a)
            for dc in range(1, tower.order):
                d = intersect_dim(ga, scale(tower.element(dc), sub_b))
                checked += 1
                if d > 1:
                    return False, (
                        f"dim(gamma F_q^{a} ^ delta F_q^{b}) = {d} at "
                        f"gamma={gc} delta={dc}"
                    )
    return True, f"all {checked} scaled subfield pair intersections have dim <= 1"


def _verify_prop2(args) -> tuple[bool, str]:
    tower = _tower_for(2, 2)
    spec = rs.make_code(tower, 4, 2)
    minima = []
    for code in range(1, tower.order):
        side = SideInfo((tower.element(code),))
        minima.append(repair.exhaustive_optimal_bandwidth(spec, 0, side))
    if len(set(minima)) != 1:
        return False, f"singleton side sets give different minima: {minima}"
    return True, f"all {len(minima)} singleton side sets share the minimum {minima[0]}"


def _verify_majorization(args) -> tuple[bool, str]:
    tower = _tower_for(args.q, args.ell or 4)
    a, m = 2, 2
    best = (tower.q**a - 1) * (tower.q**m - 1) // (tower.q - 1)
    flat_sums, coincident_sums = [], []
    for w_space in enumerate_subspaces(tower, m):
        profile = schemes.DimensionProfile.of_subspace(tower, a, w_space)
        total = sum(profile.dims) * (tower.q**a - 1)
        if max(profile.dims) <= 1:
            flat_sums.append(total)
        else:
            coincident_sums.append(total)
    if not flat_sums or not coincident_sums:
        return False, "expected both flat and coincident profiles"
    if set(flat_sums) != {best}:
        return False, f"flat profiles expected sum {best}, got {sorted(set(flat_sums))}"
    if max(coincident_sums) >= best:
        return False, (
            f"coincident profile reaches {max(coincident_sums)}, not below {best}"
        )
    return True, (
        f"{len(flat_sums)} flat profiles all reach {best}; "
        f"{len(coincident_sums)} coincident profiles stay below"
    )


def _verify_scheme_file(path: str) -> tuple[bool, str]:
    with open(path) as fh:
        payload = json.load(fh)
    scheme = RepairScheme.from_json(payload)
    violations = repair.validate(scheme)
    if violations:
        return False, "; ".join(violations)
    return True, f"scheme for position {scheme.star_index} satisfies all invariants"


def cmd_verify(args) -> int:
    checks = []
    if args.scheme:
        checks.append(("scheme", lambda: _verify_scheme_file(args.scheme)))
    suites = {
        "lemma2": _verify_lemma2,
        "lemma3": _verify_lemma3,
        "prop2": _verify_prop2,
        "majorization": _verify_majorization,
    }
    if args.suite == "all":
        for name, fn in suites.items():
            checks.append((name, lambda fn=fn: fn(args)))
    elif args.suite:
        fn = suites[args.suite]
        checks.append((args.suite, lambda: fn(args)))
    if not checks:
        print("nothing to verify: pass --suite and/or --scheme", file=sys.stderr)
        return 2
    ok = True
    for name, run in checks:
        passed, detail = run()
        ok = ok and passed
        sys.stdout.write(f"{'PASS' if passed else 'FAIL'} {name}: {detail}\n")
    return 0 if ok else 1


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rsrepair",
        description="Repair-bandwidth tooling for Reed-Solomon codes with side information",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="bandwidth lower bounds (exact rationals)")
    b.add_argument("--q", type=int, required=True)
    b.add_argument("--ell", type=int, required=True)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--s", type=int, default=0)
    b.add_argument("--sweep", action="store_true", help="emit rows for s = 0..ell")
    b.add_argument("--format", choices=["json", "csv"], default=None)
    b.add_argument("--out", default=None)
    b.set_defaults(fn=cmd_bound)

    c = sub.add_parser("construct", help="build a repair scheme and report bandwidth")
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--ell", type=int, required=True)
    c.add_argument("--s", type=int, required=True)
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--method", choices=["subfield", "greedy", "exhaustive"], required=True)
    c.add_argument("--n", type=int, default=None, help="defaults to full length q^ell")
    c.add_argument("--k", type=int, default=None, help="defaults to n - q^m")
    c.add_argument("--star", type=int, default=0)
    c.add_argument("--emit", default=None, help="write the scheme JSON here")
    c.set_defaults(fn=cmd_construct)

    s = sub.add_parser("simulate", help="provision a cluster, fail nodes, repair, report")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--stripes", type=int, default=1)
    s.add_argument(
        "--fail",
        action="append",
        required=True,
        help="POS for full erasure or POS:partial=i,j for partial",
    )
    s.add_argument("--method", choices=["subfield", "greedy", "exhaustive"], default="subfield")
    s.add_argument("--m", type=int, default=None)
    s.add_argument("--out", default=None)
    s.set_defaults(fn=cmd_simulate)

    v = sub.add_parser("verify", help="run cross-module property suites")
    v.add_argument(
        "--suite",
        choices=["lemma2", "lemma3", "prop2", "majorization", "all"],
        default=None,
    )
    v.add_argument("--scheme", default=None, help="validate a scheme JSON file")
    v.add_argument("--q", type=int, default=2)
    v.add_argument(
        "--ell", type=int, default=None, help="per-suite default: 6 for lemma3, else 4"
    )
    v.add_argument("--m", type=int, default=2)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(fn=cmd_verify)

    return parser


def _validate_common(args) -> None:
    if getattr(args, "s", None) is not None and getattr(args, "ell", None) is not None:
        if args.s < 0 or args.s > args.ell:
            raise FieldError(f"s = {args.s} out of range 0..{args.ell}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate_common(args)
        return args.fn(args)
    except (FieldError, BudgetError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
