"""Command-line front end.

Exit codes: 0 success, 1 validation or invariant failure (JSON details on
stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from . import generators as gen
from .addresses import Address, IncompatibleAddressError, address_of, resolve_with_radius
from .convergence import (
    LimitSynthesisError,
    arzela_ascoli,
    embed_family,
    gap_sequences,
    synthesize_limit,
    timed_hausdorff_ub,
)
from .embedding import canonical_frame, write_cloud_csv
from .nets import PlanTooSmallError, build_family, verify_hierarchy
from .oracles import OracleSizeError, exact_kappa_gh, exact_kappa_tH, gh_exact
from .space import InvalidSpaceError, load_space, save_space

log = logging.getLogger("timedgh")


class Failure(Exception):
    """Reported on stderr as JSON, exit status 1."""

    def __init__(self, error: str, **details: Any):
        super().__init__(error)
        self.doc = {"error": error, **details}


def _emit(doc: Any, out: str | None = None) -> None:
    text = json.dumps(doc, indent=1)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _load(path: str, args) -> Any:
    try:
        X = load_space(path, tol=getattr(args, "tol", 0.0), repair=getattr(args, "repair", False))
    except InvalidSpaceError as exc:
        raise Failure(str(exc), file=path, diagnostics=[d.to_dict() for d in exc.diagnostics])
    D = float(X.dist.max())
    if getattr(args, "normalize", False) and D > 0:
        X = gen.scaled(X, 1.0 / D, name=X.name)
    return X


def _manifest(path: str) -> dict[str, Any]:
    p = Path(path)
    doc = json.loads(p.read_text())
    if not isinstance(doc, dict) or not doc.get("spaces"):
        raise Failure("manifest needs a non-empty 'spaces' list", file=path)
    doc["spaces"] = [str((p.parent / s) if not Path(s).is_absolute() else s) for s in doc["spaces"]]
    return doc


def cmd_validate(args) -> int:
    X = _load(args.space, args)
    _emit({"name": X.name, "n": X.n, "diameter": float(X.dist.max()) if X.n else 0.0,
           "tau_max": X.tau_max, "valid": True})
    return 0


def cmd_net(args) -> int:
    X = _load(args.space, args)
    _, (H,) = build_family([X], args.depth)
    bad = verify_hierarchy(H)
    doc = H.to_dict()
    doc["stable"] = H.is_stable
    _emit(doc, args.out)
    if bad:
        raise Failure("net invariants violated", violations=[v.to_dict() for v in bad])
    return 0


def cmd_address(args) -> int:
    X = _load(args.space, args)
    _, (H,) = build_family([X], args.depth)
    if args.resolve is not None:
        alpha = Address.parse(args.resolve)
        p, radius = resolve_with_radius(H, alpha)
        _emit({"address": str(alpha), "point": p, "label": X.points[p], "radius": radius})
    else:
        alpha = address_of(H, args.point)
        _emit({"point": args.point, "label": X.points[args.point], "address": str(alpha)})
    return 0


def cmd_embed(args) -> int:
    X = _load(args.space, args)
    _, (H,) = build_family([X], args.depth)
    write_cloud_csv(args.out, X, canonical_frame(H), timed=not args.untimed)
    _emit({"out": args.out, "points": X.n, "coordinates": H.plan.frame_length(),
           "plan": H.plan.to_dict()})
    return 0


def cmd_tdist(args) -> int:
    A, B = _load(args.a, args), _load(args.b, args)
    _emit({"timed_hausdorff_ub": timed_hausdorff_ub(A, B, args.depth, timed=not args.untimed)})
    return 0


def cmd_limit(args) -> int:
    man = _manifest(args.manifest)
    spaces = [_load(p, args) for p in man["spaces"]]
    fam = embed_family(spaces, args.depth)
    lim = synthesize_limit(fam, args.window, args.tol_cauchy, args.glue, args.class_distance)
    doc = lim.to_dict()
    if args.gaps:
        doc["gaps"] = gap_sequences(fam, lim)
    _emit(doc, args.out)
    if args.out:
        _emit({"out": args.out, "classes": lim.n_classes,
               "converged": lim.diagnostics.converged})
    return 0


def cmd_oracle(args) -> int:
    A, B = _load(args.a, args), _load(args.b, args)
    fn = {"gh": gh_exact, "kgh": exact_kappa_gh, "kth": exact_kappa_tH}[args.kind]
    _emit({args.kind: fn(A, B)})
    return 0


def cmd_aa(args) -> int:
    man = _manifest(args.manifest)
    if "functions" not in man:
        raise Failure("manifest has no 'functions'", file=args.manifest)
    spaces = [_load(p, args) for p in man["spaces"]]
    K = args.lipschitz if args.lipschitz is not None else man.get("K")
    if K is None:
        raise Failure("no Lipschitz constant: pass --lipschitz or set 'K' in the manifest")
    try:
        res = arzela_ascoli(spaces, man["functions"], float(K), args.fmax, args.depth,
                            args.window, args.tol_cauchy, args.glue)
    except ValueError as exc:
        raise Failure(str(exc))
    doc = {
        "K": res.K,
        "classes": [str(Address(r)) for r in res.synthesis.representatives],
        "limit_function": res.limit_function.tolist(),
        "gaps": res.gaps,
        "diagnostics": res.synthesis.diagnostics.to_dict(),
    }
    _emit(doc, args.out)
    return 0


def cmd_gen(args) -> int:
    if args.kind == "cycle":
        if args.family:
            outdir = Path(args.outdir or ".")
            outdir.mkdir(parents=True, exist_ok=True)
            names = []
            for j, X in enumerate(gen.cycle_family(args.n, args.family), start=1):
                name = f"cycle{args.n}_j{j:03d}.json"
                save_space(X, outdir / name)
                names.append(name)
            _emit({"spaces": names}, str(outdir / "manifest.json"))
            _emit({"manifest": str(outdir / "manifest.json"), "members": len(names)})
            return 0
        X = gen.gen_cycle(args.n, args.scale)
    elif args.kind == "interval":
        X = gen.gen_interval(args.n, args.scale, timed=not args.untimed)
    elif args.kind == "diamond":
        X = gen.gen_minkowski_diamond(args.m, args.T)
    else:
        X = gen.gen_random(args.n, args.seed, time_mode=args.time_mode)
    if args.out:
        save_space(X, args.out)
    else:
        _emit(X.to_dict())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="timedgh", description="Finite timed metric space workbench.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def space_cmd(name, fn, help, two=False):
        sp = sub.add_parser(name, help=help)
        if two:
            sp.add_argument("a")
            sp.add_argument("b")
        else:
            sp.add_argument("space")
        sp.add_argument("--tol", type=float, default=0.0, help="validation slack")
        sp.add_argument("--repair", action="store_true", help="shortest-path repair on load")
        sp.add_argument("--normalize", action="store_true", help="divide distances and times by the diameter")
        sp.set_defaults(func=fn)
        return sp

    def limit_opts(sp):
        sp.add_argument("--depth", type=int)
        sp.add_argument("--window", type=int, default=3)
        sp.add_argument("--tol-cauchy", type=float)
        sp.add_argument("--glue", type=float, help="glue tolerance (default: deepest radius)")
        sp.add_argument("--out")

    space_cmd("validate", cmd_validate, "check a space document")
    sp = space_cmd("net", cmd_net, "build and verify a net hierarchy")
    sp.add_argument("--depth", type=int)
    sp.add_argument("--out")
    sp = space_cmd("address", cmd_address, "address of a point, or point of an address")
    sp.add_argument("--depth", type=int)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--point", type=int)
    g.add_argument("--resolve", metavar="A1.A2...")
    sp = space_cmd("embed", cmd_embed, "write the canonical timed cloud as CSV")
    sp.add_argument("--depth", type=int)
    sp.add_argument("--out", required=True)
    sp.add_argument("--untimed", action="store_true")
    sp = space_cmd("tdist", cmd_tdist, "timed Hausdorff upper bound", two=True)
    sp.add_argument("--depth", type=int)
    sp.add_argument("--untimed", action="store_true")

    sp = sub.add_parser("limit", help="synthesize the limit of a family manifest")
    sp.add_argument("manifest")
    limit_opts(sp)
    sp.add_argument("--class-distance", choices=["representative", "max"], default="representative")
    sp.add_argument("--gaps", action="store_true", help="include per-member gap sequences")
    sp.set_defaults(func=cmd_limit, tol=0.0, repair=False)

    sp = sub.add_parser("oracle", help="exact distances for tiny spaces")
    sp.add_argument("kind", choices=["gh", "kgh", "kth"])
    sp.add_argument("a")
    sp.add_argument("b")
    sp.set_defaults(func=cmd_oracle, tol=0.0, repair=False)

    sp = sub.add_parser("aa", help="limit of Lipschitz functions along a family")
    sp.add_argument("manifest")
    sp.add_argument("--lipschitz", type=float)
    sp.add_argument("--fmax", type=float)
    limit_opts(sp)
    sp.set_defaults(func=cmd_aa, tol=0.0, repair=False)

    sp = sub.add_parser("gen", help="generate spaces")
    gsub = sp.add_subparsers(dest="kind", required=True)
    c = gsub.add_parser("cycle")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--scale", type=float, default=1.0)
    c.add_argument("--family", type=int, metavar="J", help="write members 1..J at scale 1/j")
    c.add_argument("--outdir")
    c = gsub.add_parser("interval")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--scale", type=float, default=1.0)
    c.add_argument("--untimed", action="store_true")
    c = gsub.add_parser("diamond")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--T", type=float, default=1.0)
    c = gsub.add_parser("random")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--time-mode", choices=["zero", "cone", "mixed"])
    for c in gsub.choices.values():
        c.add_argument("--out")
    sp.set_defaults(func=cmd_gen)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except Failure as exc:
        doc = exc.doc
    except (InvalidSpaceError, PlanTooSmallError, LimitSynthesisError, OracleSizeError,
            IncompatibleAddressError) as exc:
        doc = {"error": str(exc), "type": type(exc).__name__}
        if isinstance(exc, InvalidSpaceError):
            doc["diagnostics"] = [d.to_dict() for d in exc.diagnostics]
    except (OSError, json.JSONDecodeError, ValueError, IndexError) as exc:
        doc = {"error": str(exc), "type": type(exc).__name__}
    print(json.dumps(doc), file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
