"""Command-line front end.

Exit codes: 0 every check passed, 1 a checked invariant failed, 2 bad input,
3 the numerical solver failed.
"""

from __future__ import annotations

import argparse
import itertools
import sys
from pathlib import Path

import numpy as np

from . import plotting
from .catalog import catalog_by_name, load_catalog
from .cb import CB_GAP_TOL, function_map_cb
from .errors import (
    BudgetExceeded,
    CbFourierError,
    DimensionMismatch,
    NonConvergence,
    NotAGraph,
    NotAGroup,
    NotAHomomorphism,
    OrderTooLarge,
    ParseError,
    SolverFailure,
)
from .groups import FiniteGroup
from .lab import (
    SAEKI_BOUND,
    approximate_diagonal,
    build_phi_alpha,
    classify,
    extract_alpha,
    idempotent_scan,
)
from .lattice import COVERED, coset_contains, covering_witness, is_covered
from .latexpr import format_coset, load_lattice_expression
from .mapfile import load_map
from .piecewise import graph_decompose
from .report import Report, RunConfig
from .reprs import (
    ORACLE_ORDER_BOUND,
    FunctionOnGroup,
    a_norm,
    a_norm_oracle,
    compute_irreps,
    fourier_transform,
)
from .scan import exhaustive_theorem_scan

EXIT_OK, EXIT_INCONSISTENT, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3

_INPUT_ERRORS = (ParseError, NotAGroup, NotAHomomorphism, BudgetExceeded, DimensionMismatch,
                 NotAGraph, OrderTooLarge, OSError, ValueError)
_SOLVER_ERRORS = (SolverFailure, NonConvergence)


class _Ctx:
    def __init__(self, args):
        self.args = args
        self.config = RunConfig(solver_tol=args.tol_solver, seed=args.seed,
                                scan_budget=args.budget, out=args.out)
        self._groups = load_catalog(args.catalog) if args.catalog else load_catalog()
        self.groups = catalog_by_name(self._groups)
        self.summary: list[str] = []

    def group(self, name: str) -> FiniteGroup:
        if name not in self.groups:
            raise ParseError(f"unknown group {name!r}; known: {', '.join(self.groups)}")
        return self.groups[name]

    def say(self, line: str):
        self.summary.append(line)

    def figure(self, report: Report, tag: str, fn, *a, **kw):
        if self.args.out:
            report.figures.append(fn(*a, path=plotting.figure_path(self.args.out, tag), **kw))


def parse_function(G: FiniteGroup, text: str) -> FunctionOnGroup:
    """``{0,2}`` is an indicator, ``delta:3`` a point mass, otherwise ``|G|`` comma-separated values."""
    text = text.strip()
    vals = np.zeros(G.order, dtype=complex)
    if text.startswith("{") and text.endswith("}"):
        body = text[1:-1].strip()
        idx = [int(t) for t in body.split(",")] if body else []
        if any(not 0 <= i < G.order for i in idx):
            raise ParseError(f"indicator support outside {G.name}")
        vals[idx] = 1
    elif text.startswith("delta:"):
        i = int(text[len("delta:"):])
        if not 0 <= i < G.order:
            raise ParseError(f"element {i} outside {G.name}")
        vals[i] = 1
    else:
        toks = [t for t in text.replace(";", ",").split(",") if t.strip()]
        if len(toks) != G.order:
            raise ParseError(f"expected {G.order} values, got {len(toks)}")
        try:
            vals[:] = [complex(t.strip().replace("i", "j")) for t in toks]
        except ValueError as exc:
            raise ParseError(f"bad function value: {exc}") from None
    if not np.abs(vals.imag).any():
        vals = vals.real
    return FunctionOnGroup(G, vals)


def _cb_dict(cb) -> dict:
    return {"lower": cb.lower, "upper": cb.upper, "level": cb.level, "method": cb.method,
            "components": [{k: c[k] for k in ("block", "lower", "upper", "method")}
                           for c in cb.details.get("components", [])]}


# -- commands ------------------------------------------------------------------

def cmd_norm(ctx: _Ctx, rep: Report):
    G = ctx.group(ctx.args.group)
    u = parse_function(G, ctx.args.function)
    ir = compute_irreps(G, seed=ctx.config.seed)
    nr = a_norm(u, ir)
    coeffs = fourier_transform(u, ir)
    tn = [float(np.linalg.svd(c, compute_uv=False).sum()) for c in coeffs.blocks]
    rep.results.update({"group": G.name, "values": u.values, "a_norm": nr.a_norm,
                        "positive_definite": nr.is_positive_definite, "irrep_dims": list(ir.dims),
                        "coefficient_trace_norms": tn})
    ctx.say(f"{G.name}: ||u||_A = {nr.a_norm:.12g}  positive definite: {nr.is_positive_definite}")
    if nr.is_positive_definite:
        e = complex(u(G.identity))
        rep.check("positive definite norm equals u(e)", abs(nr.a_norm - e) <= 1e-6, abs(e))
    if G.order <= ORACLE_ORDER_BOUND:
        orc = a_norm_oracle(u, solver_tol=min(ctx.config.solver_tol, 1e-9))
        rep.results["oracle"] = {"value": orc.value, "lower": orc.lower, "upper": orc.upper}
        ok = abs(orc.value - nr.a_norm) <= 1e-6
        rep.check("irrep formula agrees with trace-norm oracle", ok, abs(orc.value - nr.a_norm))
        ctx.say(f"  oracle sandwich [{orc.lower:.12g}, {orc.upper:.12g}]")
    ctx.figure(rep, "fourier", plotting.fourier_bars, list(ir.dims), tn)


def cmd_idempotent_scan(ctx: _Ctx, rep: Report):
    names = list(ctx.groups) if ctx.args.group == "all" else [ctx.args.group]
    rows, per = [], []
    for nm in names:
        G = ctx.group(nm)
        sc = idempotent_scan(G)
        s = sc.summary()
        per.append(s)
        rep.check(f"{G.name}: norm one iff coset, positive definite iff subgroup", sc.ok,
                  len(s["violations"]))
        rows += [{"size": len(r.support), "norm": r.norm, "is_coset": r.is_coset} for r in sc.reports]
        ctx.say(f"{G.name}: {s['subsets']} nonempty subsets, {s['norm_one']} with norm 1, "
                f"{s['cosets']} cosets, {s['subgroups']} subgroups, min non-coset norm "
                f"{s['min_noncoset_norm']}")
    rep.results["groups"] = per
    ctx.figure(rep, "norms", plotting.idempotent_norms, rows, bound=SAEKI_BOUND)


def cmd_cbnorm(ctx: _Ctx, rep: Report):
    mf = load_map(ctx.args.map_file, ctx._groups)
    cb = function_map_cb(mf.phi, seed=ctx.config.seed, solver_tol=ctx.config.solver_tol)
    rep.results.update({"source": mf.source.name, "target": mf.target.name, "cb": _cb_dict(cb)})
    rep.check("sandwich relative gap within tolerance", cb.relative_gap <= CB_GAP_TOL, cb.relative_gap)
    ctx.say(f"cb norm in [{cb.lower:.9g}, {cb.upper:.9g}]")
    ctx.figure(rep, "sandwich", plotting.sandwich, _cb_dict(cb)["components"] or
               [{"lower": cb.lower, "upper": cb.upper}])


def cmd_phi(ctx: _Ctx, rep: Report):
    mf = load_map(ctx.args.map_file, ctx._groups)
    phi = mf.phi
    pm = mf.partial if mf.partial is not None else extract_alpha(phi)
    M = phi.matrix
    G, H = mf.target, mf.source
    # pointwise product: delta_s delta_t = [s == t] delta_s
    mult = all(np.allclose(M[:, s] * M[:, t], M[:, s] if s == t else 0) for s in range(G.order)
               for t in range(G.order))
    back = extract_alpha(phi)
    rep.results.update({"source": H.name, "target": G.name, "alpha": pm.as_dict(),
                        "matrix": M.real if not np.iscomplexobj(M) or not M.imag.any() else M})
    rep.check("multiplicative on point masses", mult)
    rep.check("alpha recovered from Phi", back.as_dict() == pm.as_dict()
              and np.array_equal(build_phi_alpha(back).matrix, M))
    ctx.say(f"Phi_alpha: A({G.name}) -> A({H.name}) on domain {list(pm.domain.members)}")


def cmd_classify(ctx: _Ctx, rep: Report):
    mf = load_map(ctx.args.map_file, ctx._groups)
    cr = classify(mf.phi, seed=ctx.config.seed, solver_tol=ctx.config.solver_tol)
    rep.results.update(cr.to_dict())
    rep.check("completely contractive iff affine, completely positive iff subgroup homomorphism",
              cr.consistent and cr.completely_contractive is not None or
              (not len(cr.domain) and cr.consistent))
    rep.check("cb norm below the decomposition bounds", cr.bounds_hold,
              {"upper": cr.cb.upper, "singleton": cr.singleton_bound,
               "pieces": cr.decomposition_bound})
    ctx.say(f"affine {cr.is_affine}, subgroup homomorphism {cr.is_subgroup_homomorphism}, "
            f"cb in [{cr.cb.lower:.6g}, {cr.cb.upper:.6g}], cc {cr.completely_contractive}, "
            f"cp {cr.completely_positive}")


def cmd_theorem_scan(ctx: _Ctx, rep: Report):
    G, H = ctx.group(ctx.args.G), ctx.group(ctx.args.H)
    s = exhaustive_theorem_scan(G, H, budget=ctx.config.scan_budget, seed=ctx.config.seed,
                                solver_tol=min(ctx.config.solver_tol, 1e-9))
    d = s.to_dict()
    rep.results.update(d)
    rep.check("every map consistent", s.consistent, s.inconsistent)
    rep.check("cb upper within composition bound", s.bound_violations == 0, s.bound_violations)
    ctx.say(f"{H.name} -> {G.name}: {s.total} maps, {s.affine} affine, {s.subgroup_hom} subgroup "
            f"homomorphisms, {s.cc} completely contractive, {s.cp} completely positive, "
            f"consistent: {s.consistent}")
    ctx.figure(rep, "counts", plotting.scan_counts, d)


def _box(dim: int, r: int):
    return np.array(list(itertools.product(range(-r, r + 1), repeat=dim)), dtype=np.int64)


def cmd_lattice_decompose(ctx: _Ctx, rep: Report):
    expr = load_lattice_expression(ctx.args.expr_file)
    if expr.split is None:
        raise ParseError("decompose needs a 'split N' line", None, None, ctx.args.expr_file)
    S = expr.ring_set()
    f = graph_decompose(S, expr.split)
    f.check_disjoint()
    d, e = expr.split, expr.dim - expr.split
    pieces = []
    for piece, amap in f.pieces:
        pieces.append({"base": format_coset(piece.base), "holes": [format_coset(h) for h in piece.holes],
                       "value_at_base": list(amap.image0), "basis_images": [list(v) for v in amap.images]})
    rep.results.update({"dim": expr.dim, "split": d, "pieces": pieces})
    # graph round trip on a box
    r = 6 if expr.dim <= 4 else 2
    X = _box(d, r)
    defined, vals = f.evaluate_many(X)
    fwd = bool(S.contains_many(np.hstack([X[defined], vals[defined]])).all()) if defined.any() else True
    Z = _box(expr.dim, r)
    Z = Z[S.contains_many(Z)]
    dz, vz = f.evaluate_many(Z[:, :d])
    bwd = bool(dz.all() and np.array_equal(vz, Z[:, d:]))
    rep.check("decomposition reproduces the graph on a box", fwd and bwd, r)
    ctx.say(f"{len(pieces)} affine pieces on Z^{d} -> Z^{e}")
    if d == 1 and e == 1:
        groups = {}
        for i, (piece, _) in enumerate(f.pieces):
            m = defined & piece.contains_many(X)
            groups[f"piece {i}"] = np.column_stack([X[m], vals[m]])
        ctx.figure(rep, "pieces", plotting.lattice_points, groups, title="graph pieces")


def cmd_lattice_cover(ctx: _Ctx, rep: Report):
    expr = load_lattice_expression(ctx.args.expr_file)
    out = []
    for name, (base, holes) in zip(expr.names, expr.pieces):
        covered, pt = is_covered(base, holes)
        ok = covered or (coset_contains(base, pt) and not any(coset_contains(h, pt) for h in holes))
        out.append({"name": name, "empty": covered, "witness": None if covered else list(pt)})
        rep.check(f"{name}: witness verified", ok)
        ctx.say(f"{name}: " + ("holes cover the base" if covered else f"point {tuple(pt)} survives"))
    w = covering_witness([b for b, _ in expr.pieces], expr.dim)
    union_covers = w is COVERED
    if not union_covers:
        rep.check("union witness verified", not any(coset_contains(b, w) for b, _ in expr.pieces))
    rep.results.update({"pieces": out, "bases_cover_space": union_covers,
                        "uncovered_point": None if union_covers else list(w)})
    ctx.say("bases cover Z^%d" % expr.dim if union_covers else f"bases miss {tuple(w)}")
    if expr.dim <= 2:
        box = _box(expr.dim, 8)
        groups = {}
        for n, (b, holes) in zip(expr.names, expr.pieces):
            m = b.contains_many(box)
            for h in holes:
                m &= ~h.contains_many(box)
            groups[n] = box[m]
        star = w if not union_covers else next((o["witness"] for o in out if o["witness"]), None)
        ctx.figure(rep, "cover", plotting.lattice_points, groups, witness=star, title="pieces")


def cmd_diagonal(ctx: _Ctx, rep: Report):
    names = list(ctx.groups) if ctx.args.group == "all" else [ctx.args.group]
    res = []
    last = None
    for nm in names:
        dr = approximate_diagonal(ctx.group(nm))
        res.append({"group": nm, "is_diagonal_indicator": dr.is_diagonal_indicator,
                    "positive_definite": dr.is_positive_definite, "norm": dr.norm})
        rep.check(f"{nm}: diagonal indicator, positive definite, norm one", dr.ok)
        ctx.say(f"{nm}: w = 1_diag {dr.is_diagonal_indicator}, positive definite "
                f"{dr.is_positive_definite}, norm {dr.norm:.12g}")
        last = dr
    rep.results["groups"] = res
    if len(names) == 1:
        n = last.group.order
        ctx.figure(rep, "diagonal", plotting.heatmap, last.w.values.reshape(n, n), title=names[0])


# -- driver --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--tol-solver", type=float, default=1e-6, dest="tol_solver",
                        help="interior point tolerance (default 1e-6)")
    common.add_argument("--budget", type=int, default=10**6,
                        help="largest number of partial maps a scan may enumerate")
    common.add_argument("--out", help="write the JSON report here; PNG figures go beside it")
    common.add_argument("--catalog", help="group catalog file (default: built-in)")

    p = argparse.ArgumentParser(prog="cbfourier", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, *pos, **kw):
        sp = sub.add_parser(name, parents=[common], **kw)
        for a, h in pos:
            sp.add_argument(a, help=h)
        sp.set_defaults(fn=fn, cmd=name)
        return sp

    add("norm", cmd_norm, ("group", "catalog name"),
        ("function", "'{0,2}', 'delta:3' or comma-separated values"), help="Fourier algebra norm")
    add("idempotent-scan", cmd_idempotent_scan, ("group", "catalog name or 'all'"),
        help="norms of all indicator functions")
    add("cbnorm", cmd_cbnorm, ("map_file", "map file"), help="cb norm sandwich of Phi")
    add("phi", cmd_phi, ("map_file", "map file"), help="build Phi_alpha and check it")
    add("classify", cmd_classify, ("map_file", "map file"), help="classify a homomorphism")
    add("theorem-scan", cmd_theorem_scan, ("G", "target group"), ("H", "source group"),
        help="classify every partial map H -> G")
    add("diagonal", cmd_diagonal, ("group", "catalog name or 'all'"), help="diagonal indicator checks")
    lat = sub.add_parser("lattice", help="coset-ring sets in Z^d")
    lsub = lat.add_subparsers(dest="lattice_command", required=True)
    for name, fn, h in (("decompose", cmd_lattice_decompose, "split a graph into affine pieces"),
                        ("cover", cmd_lattice_cover, "covering witnesses")):
        sp = lsub.add_parser(name, parents=[common], help=h)
        sp.add_argument("expr_file")
        sp.set_defaults(fn=fn, cmd=f"lattice {name}")
    return p


def run_command(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    arguments = {k: v for k, v in vars(args).items()
                 if k not in ("fn", "cmd", "command", "lattice_command", "seed", "tol_solver",
                              "budget", "out", "catalog")}
    code = EXIT_OK
    try:
        ctx = _Ctx(args)
        rep = Report(args.cmd, arguments, ctx.config)
        args.fn(ctx, rep)
        if not rep.passed:
            code = EXIT_INCONSISTENT
    except _SOLVER_ERRORS as exc:
        print(f"solver failure: {exc}", file=stderr)
        return EXIT_SOLVER
    except NotAHomomorphism as exc:
        print(f"input error: NotAHomomorphism: {exc}", file=stderr)
        return EXIT_INPUT
    except (*_INPUT_ERRORS, CbFourierError) as exc:
        print(f"input error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_INPUT
    text = rep.to_json()
    human = stdout if args.out else stderr
    for line in ctx.summary:
        print(line, file=human)
    for a in rep.assertions:
        print(f"[{'PASS' if a['passed'] else 'FAIL'}] {a['name']}", file=human)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        for f in rep.figures:
            print(f"figure: {Path(args.out).with_name(f)}", file=human)
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
