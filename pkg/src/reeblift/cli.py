"""Command-line entry point: ``reeblift <subcommand> ...``.

Exit codes: 0 success / verified, 1 check failed or mathematical error,
2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time


from . import examples
from .domain import DELTA_G, TAU_B, AlgebraicDomain, validate
from .errors import ReebLiftError
from .graph import ReebGraph, betti1, isomorphic, smooth_degree2
from .lift import DELTA, LiftSpec, read_lift, sample_surface, verify_regularity, write_lift
from .mapper import MapperConfig, mapper_reeb
from .preeb import SIGMA, build_poincare_reeb


class InputError(Exception):
    pass


def _load_domain(path) -> AlgebraicDomain:
    try:
        return AlgebraicDomain.load(path)
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"cannot read domain {path}: {exc}") from exc


def _load_graph(path) -> ReebGraph:
    try:
        return ReebGraph.load(path)
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"cannot read graph {path}: {exc}") from exc


def _describe(g: ReebGraph) -> str:
    counts = ", ".join(f"{n} of degree {d}" for d, n in sorted(g.degree_counts().items()))
    return f"{g.n_vertices} vertices ({counts}), {g.n_edges} edges, b1 = {betti1(g)}"


def _emit_graph(g: ReebGraph, args, dom: AlgebraicDomain | None = None) -> None:
    if args.output:
        g.dump(args.output)
    if getattr(args, "dot", None):
        with open(args.dot, "w") as fh:
            fh.write(g.to_dot())
    if getattr(args, "svg", None) and dom is not None:
        from .svg import render_svg
        with open(args.svg, "w") as fh:
            fh.write(render_svg(dom, g))
    if not args.output:
        print(json.dumps(g.to_json(), indent=1))


def cmd_validate(args) -> int:
    dom = _load_domain(args.domain)
    rep = validate(dom, args.samples, args.seed, args.tau_b, args.delta_g)
    print(json.dumps(rep.to_json(), indent=1) if args.json else rep.summary())
    return 0 if rep.ok else 1


def cmd_preeb(args) -> int:
    dom = _load_domain(args.domain)
    g = build_poincare_reeb(dom, args.merge_window, args.smooth_all, args.sigma, tau=args.tau_b)
    print(_describe(g), file=sys.stderr)
    _emit_graph(g, args, dom)
    return 0


def cmd_example(args) -> int:
    make = examples.chain if args.family == "chain" else examples.stack
    kwargs = {k: v for k, v in (("R_outer", args.R_outer), ("r_hole", args.r_hole), ("gap", args.gap)) if v is not None}
    dom = make(args.l, **kwargs)
    if args.output:
        dom.dump(args.output)
    else:
        print(json.dumps(dom.to_json(), indent=1))
    return 0


def _spec(args, dom) -> LiftSpec:
    return LiftSpec(dom, args.k0, tuple(args.exps) if args.exps else None,
                    tuple(args.coeffs) if args.coeffs else None, args.allow_k0_eq_k_plus_1)


def cmd_lift(args) -> int:
    dom = _load_domain(args.domain)
    spec = _spec(args, dom)
    res = sample_surface(spec, args.n_base, args.n_fiber, args.seed, collar=not args.no_collar)
    print(f"F = {res.F}", file=sys.stderr)
    print(f"{len(res)} samples over {len(res.base)} base points", file=sys.stderr)
    if args.output:
        write_lift(args.output, res)
    return 0


def cmd_verify_regularity(args) -> int:
    res = read_lift(args.lift)
    rep = verify_regularity(res.spec, res, args.delta)
    print(rep.summary())
    return 0 if rep.passed else 1


def cmd_mapper(args) -> int:
    res = read_lift(args.lift)
    cfg = MapperConfig(args.intervals, args.overlap, args.epsilon)
    g = mapper_reeb(res, cfg)
    print(_describe(g), file=sys.stderr)
    _emit_graph(g, args)
    return 0


def cmd_compare(args) -> int:
    a, b = _load_graph(args.a), _load_graph(args.b)
    keep = args.keep_critical
    a, b = smooth_degree2(a, keep), smooth_degree2(b, keep)
    res = isomorphic(a, b)
    print(f"A: {_describe(a)}")
    print(f"B: {_describe(b)}")
    if res:
        print("isomorphic: yes")
        print("witness: " + ", ".join(f"{i}->{j}" for i, j in sorted(res.mapping.items())))
        return 0
    print("isomorphic: no")
    return 1


def cmd_check_theorem(args) -> int:
    t0 = time.perf_counter()
    dom = _load_domain(args.domain)
    rep = validate(dom, args.samples, args.seed)
    print("[validate]\n" + rep.summary())
    if not rep.ok:
        print("domain violates the standing assumptions; theorem not applicable")
        return 1
    K = build_poincare_reeb(dom, args.merge_window, smooth_all=True)
    print(f"[preeb] {_describe(K)}")
    spec = _spec(args, dom)
    res = sample_surface(spec, args.n_base, args.n_fiber, args.seed)
    print(f"[lift] F = {res.F}")
    print(f"[lift] {len(res)} samples, {res.meta['n_interior_base']} interior / "
          f"{res.meta['n_boundary_base']} boundary base points, pitch {res.pitch:.5g}")
    reg = verify_regularity(spec, res, args.delta)
    print("[regularity] " + reg.summary())
    cfg = MapperConfig(args.intervals, args.overlap, args.epsilon)
    M = mapper_reeb(res, cfg)
    print(f"[mapper] {_describe(M)}")
    iso = isomorphic(M, K)
    print(f"[compare] isomorphic: {'yes' if iso else 'no'}")
    ok = bool(iso) and reg.passed
    print(f"theorem check {'VERIFIED' if ok else 'NOT verified'} ({time.perf_counter() - t0:.1f} s)")
    if args.output:
        M.dump(args.output)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reeblift", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="screen a domain's standing assumptions")
    s.add_argument("domain")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tau-b", type=float, default=TAU_B)
    s.add_argument("--delta-g", type=float, default=DELTA_G)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("preeb", help="Poincare-Reeb graph of a planar domain")
    s.add_argument("domain")
    s.add_argument("--smooth-all", action="store_true")
    s.add_argument("--merge-window", type=float, default=0.0)
    s.add_argument("--sigma", type=float, default=SIGMA)
    s.add_argument("--tau-b", type=float, default=TAU_B)
    s.add_argument("-o", "--output")
    s.add_argument("--dot")
    s.add_argument("--svg")
    s.set_defaults(func=cmd_preeb)

    s = sub.add_parser("example", help="emit a chain/stack domain")
    s.add_argument("family", choices=["chain", "stack"])
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--R-outer", type=float)
    s.add_argument("--r-hole", type=float)
    s.add_argument("--gap", type=float)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_example)

    def lift_opts(s):
        s.add_argument("--k0", type=int, required=True)
        s.add_argument("--exps", type=int, nargs="+")
        s.add_argument("--coeffs", type=float, nargs="+")
        s.add_argument("--n-base", type=int, default=200 ** 2)
        s.add_argument("--n-fiber", type=int, default=8)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--allow-k0-eq-k-plus-1", action="store_true",
                       help="exploratory: permit k0 = k + 1 (fibres S^0)")

    s = sub.add_parser("lift", help="sample the lift hypersurface M_D")
    s.add_argument("domain")
    lift_opts(s)
    s.add_argument("--no-collar", action="store_true")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("verify-regularity", help="gradient check on a sampled lift")
    s.add_argument("lift")
    s.add_argument("--delta", type=float, default=DELTA)
    s.set_defaults(func=cmd_verify_regularity)

    s = sub.add_parser("mapper", help="Mapper Reeb graph of a sampled lift")
    s.add_argument("lift")
    s.add_argument("--intervals", type=int, default=20)
    s.add_argument("--overlap", type=float, default=0.35)
    s.add_argument("--epsilon", type=float)
    s.add_argument("-o", "--output")
    s.add_argument("--dot")
    s.set_defaults(func=cmd_mapper)

    s = sub.add_parser("compare", help="graph isomorphism after degree-2 smoothing")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--keep-critical", action="store_true")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("check-theorem", help="preeb -> lift -> mapper -> compare")
    s.add_argument("domain")
    lift_opts(s)
    s.add_argument("--samples", type=int, default=1000, help="validation samples")
    s.add_argument("--intervals", type=int, default=20)
    s.add_argument("--overlap", type=float, default=0.35)
    s.add_argument("--epsilon", type=float)
    s.add_argument("--merge-window", type=float, default=1e-2)
    s.add_argument("--delta", type=float, default=DELTA)
    s.add_argument("-o", "--output", help="write the Mapper graph here")
    s.set_defaults(func=cmd_check_theorem)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ReebLiftError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
