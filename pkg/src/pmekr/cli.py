"""Command-line front end.

Data goes to standard output, progress and diagnostics to standard error.
Exit codes: 0 all requested checks passed, 1 a check failed, 2 usage or
capacity error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

from . import _accel, report
from .constructions import format_family, named_family, read_family_file
from .cycles import DEFAULT_ORDER_CAP, order_count, verify_double_count
from .general import (
    GENERAL_COLUMNS,
    as_vector,
    brute_force_signature_family,
    ekr_check_general,
    enumerate_signature_family,
    general_row,
    signature_family_size,
    threshold_scan,
)
from .lemmas import check_reflection, sweep_lemmas
from .matching import (
    CapacityError,
    Signature,
    SignatureError,
    enumerate_family,
    family_size,
    identity_check,
    is_intersecting_family,
    star_size,
    star_size_by_parts,
)
from .search import SOLVER_CAP, ekr_verdict, is_star, max_intersecting

log = logging.getLogger("pmekr")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

SWEEP_COLUMNS = [
    "n", "p", "s", "family_size", "star_size", "max_intersecting", "ekr", "strongly_ekr",
    "exact", "degenerate", "maximum_families_found", "enumeration_complete", "nodes", "status",
]


class UsageError(Exception):
    pass


# -- parsing helpers -----------------------------------------------------------


def parse_range(text: str | int | None) -> list[int]:
    """``"3..6"``, ``"3-6"``, ``"3,5,7"`` or a single integer; ``"6..3"`` is empty."""
    if text is None:
        return []
    if isinstance(text, int):
        return [text]
    out: list[int] = []
    for part in str(text).replace(" ", "").split(","):
        if not part:
            continue
        for sep in ("..", "-"):
            if sep in part[1:]:
                lo, hi = part.split(sep, 1)
                out.extend(range(int(lo), int(hi) + 1))
                break
        else:
            out.append(int(part))
    return sorted(set(out))


def _lemma_list(text: str) -> list[int]:
    try:
        vals = parse_range(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad lemma list {text!r}") from None
    if not vals or any(v not in (1, 2, 3, 4) for v in vals):
        raise argparse.ArgumentTypeError("lemmas must be drawn from 1,2,3,4")
    return vals


def _bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def read_config(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment; keys use dashes or underscores."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def apply_config(sub: argparse.ArgumentParser, config: dict[str, str]) -> None:
    """Install config values as parser defaults, so explicit flags still win."""
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in config.items():
        act = actions.get(key)
        if act is None:
            log.debug("config key %s ignored by this subcommand", key)
            continue
        if isinstance(act, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            defaults[key] = _bool(value)
        elif act.type is not None:
            try:
                defaults[key] = act.type(value)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"config {key}: {exc}") from None
        else:
            defaults[key] = value
    sub.set_defaults(**defaults)


def _signature(args) -> Signature:
    try:
        sig = Signature(args.p, args.s)
        sig.check(args.n)
    except SignatureError as exc:
        raise UsageError(str(exc)) from None
    return sig


def _load_family(spec: str, n: int, sig: Signature):
    if spec.startswith("file:"):
        return read_family_file(spec[5:], n)
    kind = spec.split(":", 1)[0].lower()
    if kind in ("star", "avoid", "random"):
        return named_family(spec, n, sig)
    if Path(spec).exists():
        return read_family_file(spec, n)
    raise UsageError(f"family {spec!r} is neither star:<v>, avoid:<v>, random:<seed> nor a file")


def _emit(args, rep: dict, text: str, columns: Sequence[str] | None = None) -> None:
    if args.json_out:
        Path(args.json_out).write_text(report.dumps(rep))
    if args.csv_out:
        Path(args.csv_out).write_text(report.report_csv(rep, columns))
    if args.format == "json":
        sys.stdout.write(report.dumps(rep))
    elif args.format == "csv":
        sys.stdout.write(report.report_csv(rep, columns))
    else:
        sys.stdout.write(text)


# -- subcommands -----------------------------------------------------------------


def cmd_count(args) -> int:
    sig = _signature(args)
    n = args.n
    fs = family_size(n, sig)
    ss = star_size(n, sig)
    ok = identity_check(n, sig) and ss == star_size_by_parts(n, sig)
    row = {"family_size": fs, "star_size": ss, "identity": "ok" if ok else "fail"}
    rep = report.make_report("count", {"n": n, "p": sig.p, "s": sig.s}, [row])
    _emit(args, rep, f"family_size {fs}\nstar_size {ss}\nidentity {row['identity']}\n")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_enumerate(args) -> int:
    sig = _signature(args)
    try:
        members = enumerate_family(args.n, sig)
        if args.limit:
            members = (F for _, F in zip(range(args.limit), members))
        members = list(members)
    except CapacityError as exc:
        raise UsageError(str(exc)) from None
    rep = report.make_report(
        "enumerate",
        {"n": args.n, "p": sig.p, "s": sig.s},
        [{"vertices": " ".join(F.tokens()), "mask": hex(F.mask)} for F in members],
    )
    _emit(args, rep, "".join(" ".join(F.tokens()) + "\n" for F in members))
    return EXIT_OK


def cmd_verify(args) -> int:
    sig = _signature(args)
    n = args.n
    family = _load_family(args.family, n, sig)
    restricted = not args.all_orders
    space = order_count(n, restricted)
    if args.sample is None and space > args.cap:
        raise UsageError(
            f"{space} orders exceed the cap of {args.cap}; pass --sample N --seed S or raise --cap"
        )
    log.info("verifying lemmas %s on %d members over %s orders", args.lemmas, len(family),
             args.sample if args.sample is not None else space)
    results = sweep_lemmas(
        n, sig, family, args.lemmas,
        restricted=restricted, sample=args.sample, seed=args.seed, cap=args.cap,
    )
    rows = [results[k].to_dict() for k in sorted(results)]
    failed = any(r["status"] == "fail" for r in rows)
    if args.reflection:
        rr = check_reflection(n, sig, family, restricted=restricted, cap=args.cap)
        rows.append({
            "lemma": "reflection",
            "status": "pass" if rr.passed else "fail",
            "checked": rr.orders,
            "passed": rr.orders - rr.interval_exchange_failures,
            "failed": rr.interval_exchange_failures + rr.family_exchange_failures + rr.k_failures,
            "skipped": 0,
            "note": "" if rr.k_applicable else "n < 2(p+s): k pairs reported only",
            "details": {
                "interval_exchange_failures": rr.interval_exchange_failures,
                "family_exchange_failures": rr.family_exchange_failures,
                "k_pairs": rr.k_pairs,
                "k_failures": rr.k_failures,
                "k_identity_applicable": rr.k_applicable,
            },
            "examples": [],
        })
        failed = failed or not rr.passed
    sampling = {"sample": args.sample, "seed": args.seed} if args.sample is not None else None
    rep = report.make_report(
        "verify",
        {"n": n, "p": sig.p, "s": sig.s, "family": args.family, "members": len(family),
         "order_space": "C_n" if args.all_orders else "C'_n"},
        rows,
        sampling=sampling,
    )
    lines = []
    for r in rows:
        if r["status"] == "not_applicable":
            lines.append(f"lemma {r['lemma']}: not applicable: {r['note']}")
        else:
            extra = f" ({r['note']})" if r["note"] else ""
            lines.append(
                f"lemma {r['lemma']}: {r['status']} checked={r['checked']} passed={r['passed']} "
                f"failed={r['failed']} skipped={r['skipped']}{extra}"
            )
    orders = rows[0]["details"].get("orders", 0) if rows else 0
    lines.append(f"{'FAIL' if failed else 'all pass'} over {orders} orders")
    _emit(args, rep, "\n".join(lines) + "\n", ["lemma", "status", "checked", "passed", "failed", "skipped", "note"])
    return EXIT_FAILED if failed else EXIT_OK


def _sweep_one(job: tuple) -> dict:
    n, p, s, cap, star_cap, node_limit, time_limit, use_numba, search_jobs = job
    _accel.set_backend("numba" if use_numba else "numpy")
    row = {"n": n, "p": p, "s": s}
    try:
        v = ekr_verdict(n, (p, s), star_cap, node_limit=node_limit, time_limit=time_limit,
                        graph=None if cap is None else _graph(n, p, s, cap), jobs=search_jobs)
    except CapacityError as exc:
        row.update(status="capacity", note=str(exc))
        return row
    d = v.to_dict(timings=True)
    d.update(row)
    return d


def _graph(n, p, s, cap):
    from .search import build_disjointness_graph

    return build_disjointness_graph(n, (p, s), cap)


def sweep_instances(ns, ps, ss) -> list[tuple[int, int, int]]:
    out = []
    for n in ns:
        for p in ps:
            for s in ss:
                if p < 0 or s < 0 or 2 * p + s < 1 or p + s > n:
                    log.debug("skip (n,p,s)=(%d,%d,%d): infeasible", n, p, s)
                    continue
                out.append((n, p, s))
    return out


def cmd_ekr_sweep(args) -> int:
    try:
        ns, ps, ss = parse_range(args.n), parse_range(args.p), parse_range(args.s)
    except ValueError as exc:
        raise UsageError(f"bad range: {exc}") from None
    if args.jobs > 1 and args.search_jobs > 1:
        raise UsageError("use --jobs or --search-jobs, not both")
    instances = sweep_instances(ns, ps, ss)
    jobs = [(n, p, s, args.solver_cap, args.star_cap, args.node_limit, args.time_limit, _accel.use_numba(),
             args.search_jobs)
            for n, p, s in instances]
    log.info("sweeping %d instances with %d worker(s)", len(jobs), args.jobs)
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_one, jobs))
    else:
        rows = [_sweep_one(j) for j in jobs]
    rows.sort(key=lambda r: (r["n"], r["p"], r["s"]))
    if not args.timings:
        for r in rows:
            r.pop("seconds", None)
    rep = report.make_report(
        "ekr-sweep", {"n": args.n, "p": args.p, "s": args.s, "star_cap": args.star_cap}, rows
    )
    lines = ["n p s family star max ekr strongly status"]
    for r in rows:
        lines.append(
            f"{r['n']} {r['p']} {r['s']} {r.get('family_size', '-')} {r.get('star_size', '-')} "
            f"{r.get('max_intersecting', '-')} {r.get('ekr', '-')} {r.get('strongly_ekr', '-')} {r['status']}"
        )
    _emit(args, rep, "\n".join(lines) + "\n", SWEEP_COLUMNS)
    return EXIT_FAILED if any(r.get("ekr") == "false" for r in rows) else EXIT_OK


def cmd_doublecount(args) -> int:
    sig = _signature(args)
    try:
        rep_dc = verify_double_count(args.n, sig, cap=args.cap)
    except CapacityError as exc:
        raise UsageError(str(exc)) from None
    summ = rep_dc.summary()
    b_lo, b_hi = summ["b_orders_range"]
    r_lo, r_hi = summ["r_orders_range"]
    measured_b = b_lo if b_lo == b_hi else f"{b_lo}..{b_hi}"
    measured_r = r_lo if r_lo == r_hi else f"{r_lo}..{r_hi}"
    ok = summ["passed"] and summ["bookkeeping"]
    rep = report.make_report("doublecount", {"n": args.n, "p": sig.p, "s": sig.s}, [summ])
    text = (
        f"formula {summ['formula']}\nmeasured_b {measured_b}\nmeasured_r {measured_r}\n"
        f"orders {summ['orders']}\nbookkeeping {'ok' if summ['bookkeeping'] else 'fail'}\n"
        f"{'pass' if ok else 'fail'}\n"
    )
    _emit(args, rep, text)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_construct(args) -> int:
    sig = _signature(args)
    family = _load_family(args.family, args.n, sig)
    row = {
        "members": len(family),
        "intersecting": is_intersecting_family(family),
        "star_size": star_size(args.n, sig),
        "star": is_star(family, args.n).describe(),
    }
    if args.solve:
        try:
            mr = max_intersecting(args.n, sig, time_limit=args.time_limit)
        except CapacityError as exc:
            raise UsageError(str(exc)) from None
        row["max_intersecting"] = mr.size
        row["max_exact"] = mr.exact
        row["extremal"] = row["intersecting"] and mr.exact and len(family) == mr.size
    rep = report.make_report(
        "construct",
        {"n": args.n, "p": sig.p, "s": sig.s, "family": args.family},
        [row],
        members=[" ".join(F.tokens()) for F in sorted(family)],
    )
    if args.format == "text":
        for k, v in row.items():
            log.info("%s: %s", k, v)
    _emit(args, rep, format_family(family))
    return EXIT_OK


def cmd_general(args) -> int:
    try:
        sv = as_vector(args.signature)
    except SignatureError as exc:
        raise UsageError(str(exc)) from None
    try:
        if args.scan:
            scan = threshold_scan(args.m, sv, args.n_max, n_min=args.n, cap=args.solver_cap,
                                  time_limit=args.time_limit)
            rep = report.make_report(
                "general", {"m": args.m, "signature": str(sv), "mode": "threshold-scan",
                            "star_convention": "vertex stars"},
                scan.rows,
                threshold={k: v for k, v in scan.to_dict().items() if k != "rows"},
            )
            est = "none" if scan.estimate is None else str(scan.estimate)
            text = report.to_csv(scan.rows, GENERAL_COLUMNS) + f"# heuristic threshold estimate n={est} ({scan.stopped})\n"
            _emit(args, rep, text, GENERAL_COLUMNS)
            return EXIT_OK
        if args.n is None:
            raise UsageError("general needs --n (or --scan with --n-max)")
        sv.check(args.m, args.n)
        checks = {}
        if args.check_formula:
            formula = signature_family_size(args.m, args.n, sv)
            raw = len(brute_force_signature_family(args.m, args.n, sv))
            fast = len(enumerate_signature_family(args.m, args.n, sv))
            checks = {"formula": formula, "raw_count": raw, "enumerated": fast}
        v = ekr_check_general(args.m, args.n, sv, args.solver_cap, time_limit=args.time_limit)
    except SignatureError as exc:
        raise UsageError(str(exc)) from None
    except CapacityError as exc:
        raise UsageError(str(exc)) from None
    row = general_row(v) | checks
    row["notes"] = " | ".join(v.notes)
    rep = report.make_report("general", {"m": args.m, "n": args.n, "signature": str(sv),
                                         "star_convention": "vertex stars"}, [row])
    _emit(args, rep, report.to_csv([row], GENERAL_COLUMNS + list(checks)), GENERAL_COLUMNS + list(checks))
    bad = checks and not (checks["formula"] == checks["raw_count"] == checks["enumerated"])
    return EXIT_FAILED if bad else EXIT_OK


# -- parser ------------------------------------------------------------------------


def _globals(parser: argparse.ArgumentParser, top: bool = False) -> None:
    # accepted before or after the subcommand; subparser copies never override
    kw = {} if top else {"default": argparse.SUPPRESS}
    parser.add_argument("--config", metavar="FILE", help="flat key = value defaults file", **kw)
    parser.add_argument("-v", "--verbose", action="count", help="more progress on stderr",
                        **(kw or {"default": 0}))
    parser.add_argument("-q", "--quiet", action="store_true", help="errors only on stderr",
                        **(kw or {"default": False}))
    parser.add_argument("--backend", choices=("auto", "numba", "numpy"),
                        help="kernel implementation (default: numba when available)",
                        **(kw or {"default": "auto"}))


def _common(sub: argparse.ArgumentParser) -> None:
    _globals(sub)
    sub.add_argument("--format", choices=("text", "json", "csv"), default="text", help="stdout format")
    sub.add_argument("--json-out", metavar="PATH", help="also write the JSON report here")
    sub.add_argument("--csv-out", metavar="PATH", help="also write the CSV report here")


def _nps(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--n", type=int, required=False, help="number of matching edges")
    sub.add_argument("--p", type=int, required=False, help="full edges per member")
    sub.add_argument("--s", type=int, required=False, help="singleton vertices per member")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmekr",
        description="Exhaustive EKR checks for induced subgraphs of a perfect matching.",
    )
    _globals(parser, top=True)
    subs = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = subs.add_parser("count", help="family size, star size and the identity between them")
    _nps(p)
    _common(p)
    p.set_defaults(func=cmd_count)

    p = subs.add_parser("enumerate", help="list every member, one per line")
    _nps(p)
    p.add_argument("--limit", type=int, default=0, help="stop after this many members")
    _common(p)
    p.set_defaults(func=cmd_enumerate)

    p = subs.add_parser("verify", help="check the cycle lemmas over cyclic orders")
    _nps(p)
    p.add_argument("--family", default="star:l1", help="star:<v>, avoid:<v>, random:<seed> or a family file")
    p.add_argument("--lemmas", type=_lemma_list, default=[1, 2, 3, 4], help="comma list from 1,2,3,4")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true", help="every order (the default within --cap)")
    mode.add_argument("--sample", type=int, help="check N seeded random orders instead")
    p.add_argument("--seed", type=int, default=0, help="seed for --sample")
    p.add_argument("--cap", type=int, default=DEFAULT_ORDER_CAP, help="largest exhaustive order space")
    p.add_argument("--all-orders", action="store_true", help="use every order, not only tau_n = 0")
    p.add_argument("--reflection", action="store_true", help="also check reflection duality")
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = subs.add_parser("ekr-sweep", help="exact EKR verdicts over ranges of (n, p, s)")
    p.add_argument("--n", default="", help="range such as 3..6 or 3,5")
    p.add_argument("--p", default="", help="range")
    p.add_argument("--s", default="", help="range")
    p.add_argument("--star-cap", type=int, default=None, help="maximum families to enumerate (default 20n)")
    p.add_argument("--solver-cap", type=int, default=SOLVER_CAP, help="largest family the solver accepts")
    p.add_argument("--node-limit", type=int, default=0, help="branch-and-bound node budget per search")
    p.add_argument("--time-limit", type=float, default=0.0, help="seconds per instance (0: none)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes, one instance each")
    p.add_argument("--search-jobs", type=int, default=1, help="worker processes splitting one search at the root")
    p.add_argument("--timings", action="store_true", help="keep wall-clock seconds in the report")
    _common(p)
    p.set_defaults(func=cmd_ekr_sweep)

    p = subs.add_parser("doublecount", help="orders realising each member as an interval")
    _nps(p)
    p.add_argument("--cap", type=int, default=DEFAULT_ORDER_CAP, help="largest order space to enumerate")
    _common(p)
    p.set_defaults(func=cmd_doublecount)

    p = subs.add_parser("construct", help="write a named family as a family file")
    _nps(p)
    p.add_argument("--family", required=False, default="star:l1", help="star:<v>, avoid:<v> or random:<seed>")
    p.add_argument("--solve", action="store_true", help="compare with the exact maximum")
    p.add_argument("--time-limit", type=float, default=0.0, help="solver seconds (0: none)")
    _common(p)
    p.set_defaults(func=cmd_construct)

    p = subs.add_parser("general", help="signature families in disjoint unions of cliques")
    p.add_argument("--m", type=int, required=False, help="number of components")
    p.add_argument("--n", type=int, default=None, help="vertices per component (start n for --scan)")
    p.add_argument("--signature", default="", help="comma list s_1,s_2,...")
    p.add_argument("--check-formula", action="store_true", help="compare the count with raw enumeration")
    p.add_argument("--scan", action="store_true", help="heuristic threshold scan over n")
    p.add_argument("--n-max", type=int, default=6, help="last n for --scan")
    p.add_argument("--solver-cap", type=int, default=SOLVER_CAP, help="largest family the solver accepts")
    p.add_argument("--time-limit", type=float, default=0.0, help="solver seconds (0: none)")
    _common(p)
    p.set_defaults(func=cmd_general)
    return parser


_REQUIRED = {
    "count": ("n", "p", "s"),
    "enumerate": ("n", "p", "s"),
    "verify": ("n", "p", "s"),
    "doublecount": ("n", "p", "s"),
    "construct": ("n", "p", "s"),
    "general": ("m",),
}


def _setup_logging(verbose: int, quiet: bool) -> None:
    level = logging.ERROR if quiet else (logging.DEBUG if verbose > 1 else logging.INFO if verbose else logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        pre, _ = parser.parse_known_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    _setup_logging(pre.verbose, pre.quiet)
    try:
        if pre.config and pre.command:
            sub = parser._subparsers._group_actions[0].choices[pre.command]
            apply_config(sub, read_config(pre.config))
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return EXIT_USAGE if exc.code else EXIT_OK
        if not args.command:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        missing = [k for k in _REQUIRED.get(args.command, ()) if getattr(args, k) is None]
        if missing:
            raise UsageError("missing " + ", ".join("--" + k for k in missing))
        if args.backend != "auto":
            _accel.set_backend(args.backend)
        return args.func(args)
    except (UsageError, SignatureError, CapacityError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
