"""JSON file formats for modules, filtrations, stratifications, bundles,
K-complexes and permutation groups.

Every file is a JSON object with a ``kind`` field.  Matrices are written
either as dense row lists or as sparse records ``{"shape": [...], "nz":
[[i, j, ..., value], ...]}`` (any number of indices); both are accepted on
input.  Degree-indexed maps use string keys.  Wherever an object is
expected, a string is read as a path to a JSON file relative to the file
that refers to it.  Output is written with sorted keys so that equal data
give equal bytes.

Parse errors raise :class:`ParseError` naming the file, the record and the
field.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import linalg as la
from .filtration import FreeRankFiltration, JFreeSummand
from .graded import (
    BoundedFactor,
    GradedAlgebra,
    GradedModule,
    PWAlgebra,
    SubspaceV,
    make_module,
    pv_module,
)
from .kbundle import FiniteGroup, KAction, KBundle, KComplex, PosetCovering, module_action_from_generator
from .pgroups import PGroup, Subgroup, format_cycles, parse_cycles
from .poset import DuflotSplitting, EmbeddedAlgebra, PosetFiltration, RankedPoset, TopStratification


class ParseError(Exception):
    def __init__(self, file, record: str, fld: str, msg: str):
        self.file, self.record, self.field = str(file), record, fld
        super().__init__(f"{self.file}: record {record!r}, field {fld!r}: {msg}")


class _Ctx:
    """Where we are while reading: file name and record path."""

    def __init__(self, file, record: str = "<root>", base: Path | None = None):
        self.file, self.record = str(file), record
        self.base = base if base is not None else Path(str(file)).parent

    def sub(self, name) -> "_Ctx":
        rec = str(name) if self.record == "<root>" else f"{self.record}.{name}"
        return _Ctx(self.file, rec, self.base)

    def error(self, fld: str, msg: str) -> ParseError:
        return ParseError(self.file, self.record, fld, msg)

    def get(self, obj: dict, fld: str, typ=None, default=...):
        if not isinstance(obj, dict):
            raise self.error(fld, "expected an object")
        if fld not in obj:
            if default is not ...:
                return default
            raise self.error(fld, "missing")
        v = obj[fld]
        if typ is not None and not isinstance(v, typ):
            raise self.error(fld, f"expected {getattr(typ, '__name__', typ)}")
        return v

    def resolve(self, obj, fld: str):
        """Follow a file reference."""
        if isinstance(obj, str):
            path = self.base / obj
            try:
                text = path.read_text()
            except OSError as exc:
                raise self.error(fld, f"cannot read {path}: {exc.strerror}")
            try:
                data = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ParseError(path, "<root>", "<json>", str(exc))
            return data, _Ctx(path, "<root>", path.parent)
        return obj, self.sub(fld)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def load(path) -> tuple[dict, _Ctx]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(path, "<root>", "<file>", exc.strerror or str(exc))
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(path, "<root>", "<json>", str(exc))
    if not isinstance(data, dict):
        raise ParseError(path, "<root>", "<json>", "top level must be an object")
    return data, _Ctx(path, "<root>", path.parent)


# -- matrices -----------------------------------------------------------------

def encode(A: np.ndarray) -> dict:
    A = np.asarray(A)
    idx = np.argwhere(A != 0)
    return {"shape": list(A.shape), "nz": [[int(i) for i in ix] + [int(A[tuple(ix)])] for ix in idx]}


def rows(A: np.ndarray) -> list:
    return [[int(x) for x in r] for r in np.asarray(A)]


def decode(obj, p: int, ctx: _Ctx, fld: str, shape=None) -> np.ndarray:
    try:
        if isinstance(obj, dict):
            shp = tuple(int(x) for x in ctx.get(obj, "shape", list))
            A = np.zeros(shp, dtype=np.int64)
            for ent in ctx.get(obj, "nz", list):
                if len(ent) != len(shp) + 1:
                    raise ValueError(f"entry {ent} does not match shape {shp}")
                A[tuple(int(i) for i in ent[:-1])] = int(ent[-1])
        else:
            A = np.array(obj, dtype=np.int64)
            if shape is not None and A.size == 0:
                A = A.reshape(shape)
    except ParseError:
        raise
    except (ValueError, TypeError, IndexError) as exc:
        raise ctx.error(fld, f"bad matrix: {exc}")
    if shape is not None and A.shape != tuple(shape):
        raise ctx.error(fld, f"shape {A.shape}, expected {tuple(shape)}")
    return A % p


def _degmap(obj, ctx: _Ctx, fld: str) -> dict[int, object]:
    if not isinstance(obj, dict):
        raise ctx.error(fld, "expected an object keyed by degree")
    out = {}
    for k, v in obj.items():
        try:
            out[int(k)] = v
        except ValueError:
            raise ctx.error(fld, f"degree key {k!r} is not an integer")
    return out


def _prime(obj, ctx: _Ctx) -> int:
    p = ctx.get(obj, "prime", int)
    if not la.is_prime(p):
        raise ctx.error("prime", f"{p} is not prime")
    return p


# -- modules ------------------------------------------------------------------

def module_to_json(M: GradedModule) -> dict:
    s = M.sigma
    acts = {}
    for k in range(M.w):
        acts[str(k + 1)] = {str(d): rows(M.act(k, d)) for d in range(M.lo, M.hi - s + 1)}
    return {
        "kind": "module", "prime": M.p, "rank_w": M.w, "window": [M.lo, M.hi],
        "dims": {str(d): M.dim(d) for d in M.degrees()}, "actions": acts,
        "bounded_below": M.bounded_below, "bounded_above": M.bounded_above,
    }


def module_from_json(obj, ctx: _Ctx, window=None) -> GradedModule:
    kind = ctx.get(obj, "kind", str, "module")
    p = _prime(obj, ctx)
    w = ctx.get(obj, "rank_w", int)
    alg = PWAlgebra(p, w)
    if kind == "pv":
        Vm = decode(ctx.get(obj, "V"), p, ctx, "V")
        if Vm.ndim != 2 or Vm.shape[0] != w:
            Vm = Vm.reshape(w, -1) if Vm.size else la.zeros(w, 0)
        try:
            V = SubspaceV(Vm, p)
        except ValueError as exc:
            raise ctx.error("V", str(exc))
        shift = ctx.get(obj, "shift", int, 0)
        win = ctx.get(obj, "window", list, None)
        if win is None:
            if window is None:
                raise ctx.error("window", "missing (and no --window given)")
            win = auto_window(alg, shift, V.rank, window)
        lo, hi = _window(win, ctx)
        return pv_module(alg, V, lo, hi, shift)
    if kind != "module":
        raise ctx.error("kind", f"expected 'module' or 'pv', got {kind!r}")
    lo, hi = _window(ctx.get(obj, "window", list), ctx)
    dims_raw = _degmap(ctx.get(obj, "dims"), ctx, "dims")
    dims = {d: int(dims_raw.get(d, 0)) for d in range(lo, hi + 1)}
    acts_raw = ctx.get(obj, "actions", dict)
    s = alg.sigma
    acts = {}
    for k in range(w):
        blk = _degmap(acts_raw.get(str(k + 1), {}), ctx, f"actions.{k + 1}")
        for d in range(lo, hi - s + 1):
            shape = (dims[d + s], dims[d])
            acts[(k, d)] = (decode(blk[d], p, ctx, f"actions.{k + 1}.{d}", shape)
                            if d in blk else la.zeros(*shape))
    try:
        M = make_module(alg, lo, hi, dims, lambda k, d: acts[(k, d)],
                        bounded_below=ctx.get(obj, "bounded_below", bool, True),
                        bounded_above=ctx.get(obj, "bounded_above", bool, False))
    except ValueError as exc:
        raise ctx.error("actions", str(exc))
    return M


def auto_window(alg: PWAlgebra, shift: int, rank: int, degrees) -> list[int]:
    """A window for Σ^shift P_V on which the requested degrees can be certified."""
    from .koszul import bound_level

    s, w = alg.sigma, max(alg.w, 1)
    lo_d, hi_d = degrees
    top = max(d + (bound_level(s, d, shift) + 3) * s * w for d in range(lo_d, hi_d + 1))
    return [min(shift, lo_d), max(top, hi_d, shift)]


def _window(win, ctx: _Ctx) -> tuple[int, int]:
    if not (isinstance(win, list) and len(win) == 2 and all(isinstance(x, int) for x in win)):
        raise ctx.error("window", "expected [lo, hi]")
    lo, hi = win
    if hi < lo - 1:
        raise ctx.error("window", "hi < lo - 1")
    return lo, hi


def _module_ref(obj, ctx: _Ctx, fld: str = "module") -> GradedModule:
    data, c = ctx.resolve(ctx.get(obj, fld), fld)
    return module_from_json(data, c)


# -- free rank filtrations ------------------------------------------------------

def _cols_or_matrix(B: np.ndarray):
    """Index list when B consists of distinct unit columns, else a sparse matrix."""
    if B.shape[1] == 0:
        return []
    if np.all((B == 0) | (B == 1)) and np.all(B.sum(axis=0) == 1):
        idx = [int(np.flatnonzero(B[:, c])[0]) for c in range(B.shape[1])]
        if len(set(idx)) == len(idx):
            return idx
    return encode(B)


def _basis_from(obj, n: int, p: int, ctx: _Ctx, fld: str) -> np.ndarray:
    if isinstance(obj, list) and all(isinstance(i, int) for i in obj):
        if any(not 0 <= i < n for i in obj):
            raise ctx.error(fld, f"index outside 0..{n - 1}")
        return la.eye(n)[:, obj]
    B = decode(obj, p, ctx, fld)
    if B.ndim != 2 or B.shape[0] != n:
        raise ctx.error(fld, f"expected {n} rows")
    return B


def factor_to_json(N: BoundedFactor) -> list[int]:
    return [int(x) for x in N.dims]


def factor_from_json(obj, ctx: _Ctx, fld: str) -> BoundedFactor:
    try:
        return BoundedFactor(tuple(int(x) for x in obj))
    except (ValueError, TypeError) as exc:
        raise ctx.error(fld, str(exc))


def subspace_from_json(obj, w: int, p: int, ctx: _Ctx, fld: str) -> SubspaceV:
    A = decode(obj, p, ctx, fld)
    if A.size == 0:
        A = la.zeros(w, 0)
    if A.ndim != 2 or A.shape[0] != w:
        raise ctx.error(fld, f"V must have {w} rows")
    try:
        return SubspaceV(A, p)
    except ValueError as exc:
        raise ctx.error(fld, str(exc))


def frf_to_json(F: FreeRankFiltration, module=None) -> dict:
    L = F.L
    levels = [{str(e): _cols_or_matrix(F.basis(j, e)) for e in L.degrees()} for j in range(F.top + 1)]
    summands = []
    for j, lst in enumerate(F.summands):
        for s in lst:
            summands.append({
                "level": j, "V": rows(s.V.matrix), "shift": s.shift, "N": factor_to_json(s.factor),
                "iso": {str(e): encode(M) for e, M in sorted(s.iso.items())},
            })
    return {"kind": "filtration", "module": module if module is not None else module_to_json(L),
            "levels": levels, "summands": summands, "minimal": F.minimal}


def frf_from_json(obj, ctx: _Ctx) -> FreeRankFiltration:
    if ctx.get(obj, "kind", str) != "filtration":
        raise ctx.error("kind", "expected 'filtration'")
    L = _module_ref(obj, ctx)
    p, w = L.p, L.w
    levels = []
    for j, lev in enumerate(ctx.get(obj, "levels", list)):
        c = ctx.sub(f"levels[{j}]")
        lv = _degmap(lev, c, "levels")
        levels.append({e: _basis_from(lv.get(e, []), L.dim(e), p, c, str(e)) for e in L.degrees()})
    if not levels:
        raise ctx.error("levels", "need at least one level")
    summands = [[] for _ in range(len(levels) - 1)]
    for t, rec in enumerate(ctx.get(obj, "summands", list)):
        c = ctx.sub(f"summands[{t}]")
        j = c.get(rec, "level", int)
        if not 0 <= j < len(summands):
            raise c.error("level", f"level {j} outside 0..{len(summands) - 1}")
        V = subspace_from_json(c.get(rec, "V"), w, p, c, "V")
        N = factor_from_json(c.get(rec, "N"), c, "N")
        iso_raw = _degmap(c.get(rec, "iso"), c, "iso")
        iso = {e: decode(iso_raw[e], p, c, f"iso.{e}") for e in iso_raw}
        summands[j].append(JFreeSummand(V, c.get(rec, "shift", int), N, iso))
    return FreeRankFiltration(L, levels, summands, minimal=ctx.get(obj, "minimal", bool, False))


# -- algebras and stratifications -------------------------------------------------

def algebra_to_json(R: GradedAlgebra) -> dict:
    return {"kind": "algebra", "module": module_to_json(R.module), "unit": [int(x) for x in R.unit],
            "mult": {f"{a},{b}": encode(T) for (a, b), T in sorted(R.mult.items())}}


def algebra_from_json(obj, ctx: _Ctx) -> GradedAlgebra:
    M = _module_ref(obj, ctx)
    p = M.p
    unit = decode(ctx.get(obj, "unit"), p, ctx, "unit").reshape(-1)
    if unit.shape[0] != M.dim(0):
        raise ctx.error("unit", f"expected {M.dim(0)} entries")
    mult = {}
    for key, T in ctx.get(obj, "mult", dict).items():
        try:
            a, b = (int(x) for x in key.split(","))
        except ValueError:
            raise ctx.error("mult", f"bad key {key!r}")
        mult[(a, b)] = decode(T, p, ctx, f"mult.{key}", (M.dim(a + b), M.dim(a), M.dim(b)))
    return GradedAlgebra(M, unit, mult)


def _degmats(d: dict) -> dict:
    return {str(e): encode(M) for e, M in sorted(d.items())}


def _degmats_from(obj, p: int, ctx: _Ctx, fld: str) -> dict[int, np.ndarray]:
    raw = _degmap(obj, ctx, fld)
    return {e: decode(v, p, ctx, f"{fld}.{e}") for e, v in raw.items()}


def poset_to_json(P: RankedPoset) -> dict:
    return {"elements": list(P.elements), "covers": [list(c) for c in P.covers],
            "coranks": {x: int(P.corank[x]) for x in P.elements}}


def poset_from_json(obj, ctx: _Ctx) -> RankedPoset:
    els = ctx.get(obj, "elements", list)
    covers = ctx.get(obj, "covers", list)
    for i, c in enumerate(covers):
        if not (isinstance(c, list) and len(c) == 2):
            raise ctx.error("covers", f"entry {i} is not a pair")
    cor = ctx.get(obj, "coranks", dict)
    return RankedPoset([str(x) for x in els], [(str(a), str(b)) for a, b in covers],
                       {str(k): int(v) for k, v in cor.items()})


def strat_to_json(TS: TopStratification) -> dict:
    strata = {}
    for x, emb in TS.strata.items():
        strata[x] = {"algebra": algebra_to_json(emb.T), "codim": emb.codim,
                     "push": _degmats(emb.push), "restrict": _degmats(emb.restrict)}
    nesting = []
    for (u, t), emb in sorted(TS.nesting.items()):
        rec = {"lower": u, "upper": t, "codim": emb.codim,
               "push": _degmats(emb.push), "restrict": _degmats(emb.restrict)}
        if emb.T is not TS.strata[u].T:
            rec["algebra"] = algebra_to_json(emb.T)
        nesting.append(rec)
    splits = {}
    for x, sp in TS.splittings.items():
        splits[x] = {"V": rows(sp.V.matrix), "N": factor_to_json(sp.factor), "gens": encode(sp.gens),
                     "lifts": _degmats(sp.lifts)}
    out = {"kind": "stratification", "algebra": algebra_to_json(TS.R), "poset": poset_to_json(TS.poset),
           "strata": strata, "nesting": nesting, "splittings": splits}
    if TS.L is not None:
        out["L"] = module_to_json(TS.L)
        if TS.embed is not None:
            out["embed"] = _degmats(TS.embed)
    return out


def strat_from_json(obj, ctx: _Ctx) -> TopStratification:
    if ctx.get(obj, "kind", str) != "stratification":
        raise ctx.error("kind", "expected 'stratification'")
    data, c = ctx.resolve(ctx.get(obj, "algebra"), "algebra")
    R = algebra_from_json(data, c)
    p, w = R.p, R.module.w
    P = poset_from_json(ctx.get(obj, "poset", dict), ctx.sub("poset"))
    strata = {}
    for x, rec in ctx.get(obj, "strata", dict).items():
        c = ctx.sub(f"strata.{x}")
        d2, c2 = c.resolve(c.get(rec, "algebra"), "algebra")
        T = algebra_from_json(d2, c2)
        strata[x] = EmbeddedAlgebra(T, c.get(rec, "codim", int), _degmats_from(c.get(rec, "push"), p, c, "push"),
                                    _degmats_from(c.get(rec, "restrict"), p, c, "restrict"))
    nesting = {}
    for i, rec in enumerate(ctx.get(obj, "nesting", list, [])):
        c = ctx.sub(f"nesting[{i}]")
        u, t = c.get(rec, "lower", str), c.get(rec, "upper", str)
        if u not in strata:
            raise c.error("lower", f"unknown stratum {u!r}")
        if "algebra" in rec:
            d2, c2 = c.resolve(rec["algebra"], "algebra")
            T = algebra_from_json(d2, c2)
        else:
            T = strata[u].T
        nesting[(u, t)] = EmbeddedAlgebra(T, c.get(rec, "codim", int), _degmats_from(c.get(rec, "push"), p, c, "push"),
                                          _degmats_from(c.get(rec, "restrict"), p, c, "restrict"))
    splits = {}
    for x, rec in ctx.get(obj, "splittings", dict, {}).items():
        c = ctx.sub(f"splittings.{x}")
        V = subspace_from_json(c.get(rec, "V"), w, p, c, "V")
        splits[x] = DuflotSplitting(V, factor_from_json(c.get(rec, "N"), c, "N"),
                                    decode(c.get(rec, "gens"), p, c, "gens"),
                                    _degmats_from(c.get(rec, "lifts"), p, c, "lifts"))
    L = embed = None
    if "L" in obj:
        d2, c2 = ctx.resolve(obj["L"], "L")
        L = module_from_json(d2, c2)
        if "embed" in obj:
            embed = _degmats_from(obj["embed"], p, ctx, "embed")
    return TopStratification(R, P, strata, nesting, splits, L, embed)


# -- K-bundles ------------------------------------------------------------------------

def _pf_to_json(PF: PosetFiltration) -> dict:
    return {"poset": poset_to_json(PF.poset),
            "F": {x: {str(e): _cols_or_matrix(PF.basis(x, e)) for e in PF.L.degrees()} for x in PF.poset.elements}}


def _pf_from_json(obj, L: GradedModule, ctx: _Ctx) -> PosetFiltration:
    P = poset_from_json(ctx.get(obj, "poset", dict), ctx.sub("poset"))
    F = {}
    raw = ctx.get(obj, "F", dict)
    for x in P.elements:
        if x not in raw:
            raise ctx.error("F", f"no subspace for element {x!r}")
        c = ctx.sub(f"F.{x}")
        dm = _degmap(raw[x], c, "F")
        F[x] = {e: _basis_from(dm.get(e, []), L.dim(e), L.p, c, str(e)) for e in L.degrees()}
    return PosetFiltration(P, L, F)


def bundle_to_json(B: KBundle) -> dict:
    act = B.action
    return {
        "kind": "kbundle",
        "N": {"filtration": frf_to_json(B.N_frf), **_pf_to_json(B.N_pf)},
        "L": {"filtration": frf_to_json(B.L_frf), **_pf_to_json(B.L_pf)},
        "map": dict(B.covering.pi),
        "eta": {x: _degmats(m) for x, m in B.eta.items()},
        "group": {"table": rows(act.group.table)},
        "perms": [dict(pm) for pm in act.perms],
        "maps": {f"{k}|{x}": _degmats(m) for (k, x), m in sorted(act.maps.items())},
    }


def bundle_from_json(obj, ctx: _Ctx) -> KBundle:
    if ctx.get(obj, "kind", str) != "kbundle":
        raise ctx.error("kind", "expected 'kbundle'")
    sides = {}
    for name in ("N", "L"):
        d, c = ctx.resolve(ctx.get(obj, name), name)
        fd, fc = c.resolve(c.get(d, "filtration"), "filtration")
        F = frf_from_json(fd, fc)
        sides[name] = (F, _pf_from_json(d, F.L, c))
    (NF, NP), (LF, LP) = sides["N"], sides["L"]
    p = LF.L.p
    pi = {str(k): str(v) for k, v in ctx.get(obj, "map", dict).items()}
    eta = {x: _degmats_from(m, p, ctx.sub(f"eta.{x}"), "eta") for x, m in ctx.get(obj, "eta", dict).items()}
    for x in LP.poset.elements:
        if x not in eta:
            raise ctx.error("eta", f"no matrices for element {x!r}")
    g = ctx.get(obj, "group", dict)
    if "table" in g:
        table = decode(g["table"], 10 ** 9, ctx.sub("group"), "table")
        G = FiniteGroup(table)
    else:
        G = FiniteGroup.cyclic(ctx.sub("group").get(g, "order", int))
    perms = ctx.get(obj, "perms", list)
    if len(perms) != G.order:
        raise ctx.error("perms", f"expected {G.order} permutations")
    perms = [{str(a): str(b) for a, b in pm.items()} for pm in perms]
    maps = {}
    for key, m in ctx.get(obj, "maps", dict).items():
        try:
            k, x = key.split("|", 1)
            k = int(k)
        except ValueError:
            raise ctx.error("maps", f"bad key {key!r}")
        maps[(k, x)] = _degmats_from(m, p, ctx.sub(f"maps.{key}"), "maps")
    return KBundle(PosetCovering(LP.poset, NP.poset, pi), NP, LP, eta, KAction(G, perms, maps), NF, LF)


# -- K-modules and K-complexes (cyclic K, given by a generator) ------------------------

def kmodule_from_json(obj, ctx: _Ctx) -> tuple[int, int, np.ndarray]:
    p = _prime(obj, ctx)
    order = ctx.get(obj, "order", int, p)
    g = decode(ctx.get(obj, "generator"), p, ctx, "generator")
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ctx.error("generator", "expected a square matrix")
    return p, order, g


def kcomplex_to_json(kc: KComplex) -> dict:
    g = kc.group.generator()
    return {"kind": "kcomplex", "prime": kc.p, "order": kc.group.order, "start": kc.start,
            "dims": list(kc.dims), "diffs": [encode(D) for D in kc.diffs],
            "generator": [encode(kc.actions[i][g]) for i in range(len(kc.dims))]}


def kcomplex_from_json(obj, ctx: _Ctx) -> KComplex:
    p = _prime(obj, ctx)
    order = ctx.get(obj, "order", int, p)
    dims = [int(x) for x in ctx.get(obj, "dims", list)]
    diffs = [decode(D, p, ctx, f"diffs[{i}]", (dims[i + 1], dims[i]))
             for i, D in enumerate(ctx.get(obj, "diffs", list))]
    if len(diffs) != max(len(dims) - 1, 0):
        raise ctx.error("diffs", "need one differential between consecutive terms")
    gens = ctx.get(obj, "generator", list)
    if len(gens) != len(dims):
        raise ctx.error("generator", "need one generator matrix per term")
    G = FiniteGroup.cyclic(order)
    acts = []
    for i, gm in enumerate(gens):
        A = decode(gm, p, ctx, f"generator[{i}]", (dims[i], dims[i]))
        acts.append(module_action_from_generator(A, order, p))
    return KComplex(G, p, dims, diffs, acts, ctx.get(obj, "start", int, 0))


# -- permutation groups ------------------------------------------------------------------

def group_to_json(G: PGroup, subgroups: dict[str, Subgroup] | None = None) -> dict:
    out = {"kind": "group", "prime": G.p, "degree": G.degree, "generators": [format_cycles(g) for g in G.gens]}
    if subgroups:
        out["subgroups"] = {k: [format_cycles(g) for g in S.gens] for k, S in subgroups.items()}
    return out


def group_from_json(obj, ctx: _Ctx, cap: int | None = None) -> tuple[PGroup, dict[str, Subgroup]]:
    p = _prime(obj, ctx)
    m = ctx.get(obj, "degree", int)

    def perms(lst, fld):
        out = []
        for i, t in enumerate(lst):
            try:
                out.append(parse_cycles(str(t), m))
            except ValueError as exc:
                raise ctx.error(f"{fld}[{i}]", str(exc))
        return out

    kw = {} if cap is None else {"cap": cap}
    G = PGroup(perms(ctx.get(obj, "generators", list), "generators"), p, m, **kw)
    subs = {}
    for name, lst in ctx.get(obj, "subgroups", dict, {}).items():
        subs[name] = Subgroup(G, perms(lst, f"subgroups.{name}"))
    return G, subs
