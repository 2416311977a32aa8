"""Command-line entry point: ``freerank <subcommand> [files] [flags]``.

Exit status: 0 on success, 1 on parse or validation failure, 2 when a
window, the group size cap or a resolution range is too small.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import io
from . import linalg as la
from .filtration import (
    depth_dim_bounds,
    duflot_cohomology,
    duflot_complex,
    regularity_report,
    toral_primes,
    validate_filtration,
    is_prime_associated,
)
from .graded import WindowTooSmall, validate_module, validate_algebra
from .kbundle import (
    ResolutionTooShort,
    check_kbundle,
    hypercohomology_ss,
    tate_cohomology_cyclic,
    tate_shift_check,
    two_row_analysis,
)
from .koszul import local_cohomology
from .pgroups import (
    CapExceeded,
    centralizer,
    conjugacy_classes,
    en_tower,
    format_cycles,
    is_i_trivial,
    p_tori,
)
from .poset import (
    associated_prime_transfer,
    check_topological,
    detection_kernel,
    oracle_depth,
    to_free_rank,
)


class ValidationFailed(Exception):
    pass


def _range(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(":")
        lo, hi = int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


class Out:
    """Rows printed either as aligned columns or as tab-separated values."""

    def __init__(self, fmt: str):
        self.fmt = fmt

    def table(self, header: list[str], rows: list[tuple]):
        rows = [[_cell(x) for x in r] for r in rows]
        if self.fmt == "tsv":
            print("\t".join(header))
            for r in rows:
                print("\t".join(r))
            return
        widths = [max([len(h)] + [len(r[c]) for r in rows]) for c, h in enumerate(header)]
        print("  ".join(h.rjust(wd) for h, wd in zip(header, widths)).rstrip())
        for r in rows:
            print("  ".join(x.rjust(wd) for x, wd in zip(r, widths)).rstrip())

    def kv(self, pairs: list[tuple[str, object]]):
        if self.fmt == "tsv":
            for k, v in pairs:
                print(f"{k}\t{_cell(v)}")
        else:
            wd = max(len(k) for k, _ in pairs)
            for k, v in pairs:
                print(f"{k.ljust(wd)}  {_cell(v)}")


def _cell(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return "-"
    if isinstance(x, float):
        if x == -np.inf:
            return "-inf"
        if x == np.inf:
            return "inf"
        if x == int(x):
            return str(int(x))
    if isinstance(x, np.ndarray):
        return "[" + ",".join(str(int(v)) for v in x.reshape(-1)) + "]"
    return str(x)


def _problems(lines: list[str]):
    if lines:
        for ln in lines:
            print(f"violation: {ln}")
        raise ValidationFailed(f"{len(lines)} violation(s)")


def _degrees(args, M) -> list[int]:
    if args.window is None:
        return list(M.degrees())
    lo, hi = args.window
    return list(range(lo, hi + 1))


def _check_prime(args, p: int):
    if args.prime is not None and args.prime != p:
        raise io.ParseError(args.file, "<root>", "prime", f"file has p = {p}, --prime gave {args.prime}")


def _uncertified(unc: list[int]):
    if unc:
        raise WindowTooSmall(f"window too small: degrees {unc} not certified")


# -- subcommands --------------------------------------------------------------

def cmd_local_cohomology(args, out: Out):
    data, ctx = io.load(args.file)
    M = io.module_from_json(data, ctx, window=args.window)
    _check_prime(args, M.p)
    _problems(validate_module(M))
    H = local_cohomology(M, _degrees(args, M))
    out.table(["i", "degree", "dim"], H.table())
    _uncertified(H.uncertified)


def _load_frf(args):
    data, ctx = io.load(args.file)
    F = io.frf_from_json(data, ctx)
    _check_prime(args, F.L.p)
    return F


def cmd_check_filtration(args, out: Out):
    F = _load_frf(args)
    _problems(validate_module(F.L) + validate_filtration(F))
    out.kv([("valid", True), ("levels", F.top), ("summands", sum(len(s) for s in F.summands)),
            ("minimal", F.minimal)])


def cmd_duflot_complex(args, out: Out):
    F = _load_frf(args)
    _problems(validate_filtration(F))
    DC = duflot_complex(F, _degrees(args, F.L))
    H = duflot_cohomology(DC)
    p = F.L.p
    rows = []
    for d in DC.certified:
        for j in range(DC.top + 1):
            n = DC.term(j, d)
            rk = la.rank(DC.diff(j, d), p) if n else 0
            rows.append((j, d, n, rk, H.dims.get((j, d), 0)))
    out.table(["j", "degree", "term", "rank_d", "H"], rows)
    sq = DC.check_square_zero()
    if sq:
        _problems([f"d∘d != 0 at (j, degree) = {x}" for x in sq])
    _uncertified(DC.uncertified)


def cmd_bounds(args, out: Out):
    F = _load_frf(args)
    _problems(validate_filtration(F))
    try:
        depth, dim = depth_dim_bounds(F)
    except ValueError:
        depth, dim = None, depth_dim_bounds(F, require_connected=False)[1]
    DC = duflot_complex(F, _degrees(args, F.L))
    H = duflot_cohomology(DC)
    reg = regularity_report(F, H)
    vanish = [(i, d) for (i, d), v in H.dims.items() if v and (i > dim or (depth is not None and i < depth))]
    out.kv([("depth_lb", depth), ("dim", dim), ("regularity_bound", reg.bound), ("regularity_computed", reg.computed),
            ("regularity_ok", reg.ok), ("vanishing_ok", not vanish), ("certified_degrees", len(H.certified))])
    _problems([f"H^{i} nonzero in degree {d} outside [depth_lb, dim]" for i, d in vanish]
              + ([] if reg.ok else ["computed regularity exceeds the bound"]))
    _uncertified(DC.uncertified)


def cmd_associated(args, out: Out):
    F = _load_frf(args)
    _problems(validate_filtration(F))
    rows = []
    for tp in toral_primes(F):
        res = is_prime_associated(F, tp)
        rows.append((tp.rank, _cell(tp.V.matrix.T), "yes" if res.found else "no witness in window",
                     res.degree, res.witness))
    out.table(["rank_V", "V", "associated", "degree", "witness"], rows)


def _load_strat(args):
    data, ctx = io.load(args.file)
    TS = io.strat_from_json(data, ctx)
    _check_prime(args, TS.p)
    return TS


def cmd_check_stratification(args, out: Out):
    TS = _load_strat(args)
    _problems(validate_algebra(TS.R))
    rep = check_topological(TS)
    out.kv([("good", rep.good.good if rep.good else None), ("minimal", rep.minimal),
            ("fixed", all(rep.fixed.values())), ("colimit", not rep.colimit), ("duflot", TS.is_duflot)])
    lines = list(rep.problems) + list(rep.colimit)
    lines += [f"Euler class of {x} is not certified a nonzerodivisor" for x, v in rep.fixed.items() if not v]
    if rep.good is not None and not rep.good.good:
        lines.append(f"filtration is not good: {rep.good}")
    _problems(lines)


def cmd_detect(args, out: Out):
    TS = _load_strat(args)
    R = TS.R.module
    depth = oracle_depth(R, _degrees(args, R))
    res = detection_kernel(TS, args.d, depth)
    rows = [(e, res.kernel.dim(e)) for e in R.degrees()]
    out.table(["degree", "kernel_dim"], rows)
    print(f"depth {_cell(depth)} consistent {_cell(res.consistent)}")
    if res.consistent is False:
        _problems([f"depth equals {args.d} but the restriction to rank-{args.d} strata is not injective"])


def cmd_transfer(args, out: Out):
    TS = _load_strat(args)
    x = args.element
    if x not in TS.poset.elements:
        raise io.ParseError(args.file, "poset", "elements", f"no element {x!r}")
    try:
        r = associated_prime_transfer(TS, x)
    except ValueError as exc:
        _problems([str(exc)])
    out.kv([("in_L", r.in_L), ("in_T", r.in_T), ("depth_T", r.depth_T), ("rank_V", r.rank_V),
            ("consistent", r.consistent)])
    for n in r.notes:
        print(f"note: {n}")
    if not r.consistent:
        _problems(["transfer equivalences fail"])


def _load_bundle(args):
    data, ctx = io.load(args.file)
    B = io.bundle_from_json(data, ctx)
    _check_prime(args, B.L_pf.L.p)
    return B


def cmd_check_bundle(args, out: Out):
    B = _load_bundle(args)
    rep = check_kbundle(B, _degrees(args, B.L_pf.L) if args.window else None)
    out.kv([("covering", rep.covering.ok if rep.covering else None), ("free_fibers", rep.free_fibers),
            ("eta_iso", rep.eta_iso), ("injective", rep.injective), ("invariant", rep.invariant),
            ("dl_free", rep.dl_free), ("dn_is_invariants", rep.dn_is_invariants), ("ok", rep.ok)])
    lines = list(rep.problems)
    if rep.covering is not None and not rep.covering.ok:
        lines.append(f"not a covering: failing chain {rep.covering.failing_chain}")
    flags = {"free_fibers": "K does not act freely on the fibers", "eta_iso": "some η_X is not an isomorphism",
             "injective": "π* is not injective", "invariant": "π* does not land in the K-invariants",
             "dl_free": "some DL^j is not a free K-module", "dn_is_invariants": "DN is not (DL)^K via π*"}
    lines += [msg for f, msg in flags.items() if not getattr(rep, f)]
    _problems(lines)


def cmd_ss(args, out: Out):
    B = _load_bundle(args)
    lo, hi = args.prange if args.prange else (0, 3)
    reps = hypercohomology_ss(B, _degrees(args, B.L_pf.L), columns=hi, length=args.resolution,
                              m_hi=args.total)
    rows = []
    for r in reps:
        for (a, q), v in sorted(r.e2.items()):
            if lo <= a <= hi:
                rows.append(("E2", r.degree, a, q, v))
        for m in sorted(r.total):
            rows.append(("total", r.degree, "-", m, r.total[m]))
            rows.append(("DN", r.degree, "-", m, r.dn[m]))
    out.table(["kind", "degree", "p", "q", "dim"], rows)
    _problems([f"total cohomology differs from H(DN) in degree {r.degree}" for r in reps if not r.ok])


def cmd_tate(args, out: Out):
    data, ctx = io.load(args.file)
    kind = data.get("kind")
    lo, hi = args.prange if args.prange else (-4, 4)
    if kind == "kmodule":
        p, order, g = io.kmodule_from_json(data, ctx)
        _check_prime(args, p)
        try:
            rows = [(i, tate_cohomology_cyclic(p, g, i, order).dim) for i in range(lo, hi + 1)]
        except ValueError as exc:
            raise io.ParseError(args.file, "<root>", "generator", str(exc))
        out.table(["i", "dim"], rows)
        return
    if kind != "kcomplex":
        raise io.ParseError(args.file, "<root>", "kind", "expected 'kmodule' or 'kcomplex'")
    kc = io.kcomplex_from_json(data, ctx)
    _check_prime(args, kc.p)
    _problems(kc.defects())
    try:
        rep = tate_shift_check(kc, range(lo, hi + 1))
    except ValueError as exc:
        _problems([str(exc)])
    tr = two_row_analysis(kc, columns=max(hi, 2))
    out.kv([("hyper_tate", rep.hyper_tate), ("applicable", rep.applicable), ("shift", rep.shift),
            ("collapse_ok", tr.ok), ("shift_ok", rep.ok)])
    out.table(["i", "top", "bottom", "rank"], [(i, *v) for i, v in sorted(rep.pairs.items())])
    if not rep.applicable:
        _problems(["complete hypercohomology is nonzero: the shift isomorphism does not apply"])
    _problems(list(tr.problems) + ([] if rep.ok else ["Tate shift check failed"]))


def _load_group(args):
    data, ctx = io.load(args.file)
    G, subs = io.group_from_json(data, ctx, cap=args.cap)
    _check_prime(args, G.p)
    _problems(G.validate())
    return G, subs


def _subgroup(args, subs, name: str, flag: str):
    if name is None:
        raise io.ParseError(args.file, "<cli>", flag, "required")
    if name not in subs:
        raise io.ParseError(args.file, "subgroups", name, "no such subgroup")
    return subs[name]


def cmd_ptori(args, out: Out):
    G, _ = _load_group(args)
    tori = p_tori(G)
    if args.up_to_conjugacy:
        classes = conjugacy_classes(G, tori)
        rows = [(c[0].rank, len(c), " ".join(format_cycles(g) for g in c[0].gens) or "()") for c in classes]
        rows.sort(key=lambda r: (r[0], r[2]))
        out.table(["rank", "class_size", "generators"], rows)
    else:
        rows = [(E.rank, E.is_normal(), " ".join(format_cycles(g) for g in E.gens) or "()") for E in tori]
        rows.sort(key=lambda r: (r[0], r[2]))
        out.table(["rank", "normal", "generators"], rows)


def cmd_centralizer(args, out: Out):
    G, subs = _load_group(args)
    S = _subgroup(args, subs, args.S, "--S")
    C = centralizer(G, S)
    out.kv([("order", C.order), ("generators", " ".join(format_cycles(g) for g in C.gens) or "()")])


def cmd_i_trivial(args, out: Out):
    G, subs = _load_group(args)
    H = _subgroup(args, subs, args.H, "--H")
    if args.i is None:
        raise io.ParseError(args.file, "<cli>", "--i", "required")
    try:
        r = is_i_trivial(G, H, args.i)
    except ValueError as exc:
        _problems([str(exc)])
    print("true" if r.value else "false")
    if r.witness is not None:
        print(f"witness rank {r.witness.rank}: " + (" ".join(format_cycles(g) for g in r.witness.gens) or "()"))


def cmd_wreath_tower(args, out: Out):
    p = args.prime if args.prime is not None else 2
    rep = en_tower(args.n, p, args.cap, check_triviality=not args.no_triviality)
    out.kv([("n", rep.n), ("p", rep.p), ("order", rep.order), ("rank_E", rep.rank), ("expected_rank", rep.expected_rank),
            ("normal", rep.normal), ("max_rank", rep.max_rank), ("maximal", rep.maximal),
            ("max_rank_count", rep.max_rank_count), ("unique", rep.unique), ("quotient_ok", rep.quotient_ok),
            ("i_bound", rep.i_bound), ("i_trivial", rep.i_trivial), ("certified", rep.certified)])
    for n in rep.notes:
        print(f"note: {n}")


def cmd_generate(args, out: Out):
    from . import generate as gen
    from .kbundle import random_two_row

    seed = 0 if args.seed is None else args.seed
    if args.kind == "filtration":
        obj = io.frf_to_json(gen.random_filtration(seed, p=args.prime, w=args.w).frf)
    elif args.kind == "stratification":
        obj = io.strat_to_json(gen.random_stratification(seed, p=args.prime, w=args.w).strat)
    elif args.kind == "kbundle":
        obj = io.bundle_to_json(gen.random_bundle(seed, m=args.k, p=args.prime, w=args.w).bundle)
    elif args.kind == "tworow":
        obj = io.kcomplex_to_json(random_two_row(seed, p=args.prime).kc)
    else:
        raise io.ParseError("<cli>", "<cli>", "kind", f"unknown kind {args.kind!r}")
    sys.stdout.write(io.dumps(obj))


COMMANDS = {
    "local-cohomology": (cmd_local_cohomology, "local cohomology of a module via the Čech complex"),
    "duflot-complex": (cmd_duflot_complex, "terms, differentials and cohomology of DL"),
    "check-filtration": (cmd_check_filtration, "validate a free rank filtration"),
    "bounds": (cmd_bounds, "depth, dimension and regularity bounds"),
    "associated": (cmd_associated, "search for associated-prime witnesses of the toral primes"),
    "check-stratification": (cmd_check_stratification, "validate a topological stratification"),
    "detect": (cmd_detect, "kernel of R -> product of the rank-d strata"),
    "transfer": (cmd_transfer, "associated primes of L versus a stratum"),
    "check-bundle": (cmd_check_bundle, "validate a K-bundle and DN = (DL)^K"),
    "ss": (cmd_ss, "hypercohomology spectral sequence of a K-bundle"),
    "tate": (cmd_tate, "Tate cohomology of a cyclic-group module or two-row complex"),
    "ptori": (cmd_ptori, "enumerate p-tori"),
    "centralizer": (cmd_centralizer, "centralizer of a named subgroup"),
    "i-trivial": (cmd_i_trivial, "decide i-triviality of a normal subgroup"),
    "wreath-tower": (cmd_wreath_tower, "certify W(n) and E(n)"),
    "generate": (cmd_generate, "print a seeded random instance as JSON"),
}

NO_FILE = {"wreath-tower", "generate"}
RANGE_FLAGS = ("--window", "--prange")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="freerank", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)
    for name, (_, help_) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_)
        if name == "generate":
            sp.add_argument("kind", choices=["filtration", "stratification", "kbundle", "tworow"])
            sp.add_argument("--k", type=int, default=None, help="order of the cyclic group (kbundle)")
            sp.add_argument("--w", type=int, default=None, help="rank of W")
        elif name not in NO_FILE:
            sp.add_argument("file")
        sp.add_argument("--window", type=_range, default=None, help="degrees LO:HI")
        sp.add_argument("--prime", type=int, default=None)
        sp.add_argument("--format", choices=["table", "tsv"], default="table")
        sp.add_argument("--prange", type=_range, default=None, help="columns or Tate indices LO:HI")
        sp.add_argument("--cap", type=int, default=None, help="group size cap (default from FREERANK_CAP)")
        sp.add_argument("--seed", type=int, default=None)
        if name == "ss":
            sp.add_argument("--resolution", type=int, default=None, help="length of the stored resolution")
            sp.add_argument("--total", type=int, default=None, help="highest total degree to compute")
        if name == "ptori":
            sp.add_argument("--up-to-conjugacy", action="store_true")
        if name == "centralizer":
            sp.add_argument("--S", default=None, help="subgroup name")
        if name == "i-trivial":
            sp.add_argument("--H", default=None, help="subgroup name")
            sp.add_argument("--i", type=int, default=None)
        if name == "detect":
            sp.add_argument("--d", type=int, required=True, help="corank of the detecting strata")
        if name == "transfer":
            sp.add_argument("--element", required=True)
        if name == "wreath-tower":
            sp.add_argument("--n", type=int, required=True)
            sp.add_argument("--no-triviality", action="store_true")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # a range such as -8:8 would otherwise be taken for a flag
    for i in range(len(argv) - 2, -1, -1):
        if argv[i] in RANGE_FLAGS and argv[i + 1].startswith("-") and ":" in argv[i + 1]:
            argv[i:i + 2] = [f"{argv[i]}={argv[i + 1]}"]
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse reports unknown flags and bad values with status 2; those
        # are parse errors here
        return 0 if exc.code == 0 else 1
    saved = os.environ.get("FREERANK_CAP")
    if args.cap is not None:
        os.environ["FREERANK_CAP"] = str(args.cap)
    fn = COMMANDS[args.cmd][0]
    try:
        fn(args, Out(args.format))
    except io.ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValidationFailed as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 1
    except (WindowTooSmall, CapExceeded, ResolutionTooShort) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        if args.cap is not None:
            if saved is None:
                os.environ.pop("FREERANK_CAP", None)
            else:
                os.environ["FREERANK_CAP"] = saved
    sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
