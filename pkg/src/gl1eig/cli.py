"""Command-line front end.

Exit codes: 0 success, 2 invariant violation, 3 precision insufficiency,
4 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from .demos import formal_density_check, unit_disc_torsion_check
from .eigenvariety import (
    NotInWeightSpaceError,
    RankMismatchError,
    classify_point,
    eig_report,
    finite_quotient_order,
    infinity_type_lattice,
    leopoldt_defect,
)
from .number_field import (
    FieldInvariantError,
    FixtureSchemaError,
    NumberFieldData,
    TameLevel,
    hensel_embeddings,
    load_field,
    split_prime_search,
)
from .padic import PrecisionError
from .weights import Weight, is_trivial_on, rigid_locus_values

EXIT_OK = 0
EXIT_INVARIANT = 2
EXIT_PRECISION = 3
EXIT_INPUT = 4

AUTO_PRIME_LIMIT = 2000


@dataclass(frozen=True)
class RunConfig:
    field: str | None
    p: int | None  # None means "auto"
    N: int
    slack: int
    level: TameLevel
    bound: int | None
    fmt: str

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        N = args.precision
        if N < 8:
            raise ValueError("--precision must be at least 8")
        slack = -(-N // 4) if args.slack is None else args.slack
        if not 0 <= slack < N:
            raise ValueError("--slack must lie in [0, N)")
        signs = tuple(int(s) for s in args.signs.split(",") if s.strip()) if args.signs else ()
        p = None if args.p in (None, "auto") else int(args.p)
        return cls(args.field, p, N, slack, TameLevel(args.modulus, signs), args.bound, args.format)

    def load(self) -> NumberFieldData:
        if self.field is None:
            raise ValueError("--field is required")
        return load_field(self.field)

    def prime(self, K: NumberFieldData) -> int:
        if self.p is not None:
            return self.p
        primes = [q for q in split_prime_search(K, AUTO_PRIME_LIMIT) if self.level.m % q]
        if not primes:
            raise ValueError(f"no totally split odd prime below {AUTO_PRIME_LIMIT}")
        return primes[0]

    def provenance(self, p: int | None = None) -> dict:
        out = {"N": self.N, "slack": self.slack}
        if p is not None:
            out["p"] = p
        return out


def _emit(payload: dict, fmt: str, out) -> None:
    if fmt == "json":
        json.dump(payload, out, indent=2, sort_keys=True)
        out.write("\n")
        return
    for key, value in payload.items():
        if isinstance(value, dict):
            out.write(f"{key}:\n")
            for k2, v2 in value.items():
                out.write(f"  {k2}: {v2}\n")
        else:
            out.write(f"{key}: {value}\n")


def cmd_field_info(cfg: RunConfig, args) -> dict:
    K = cfg.load()
    units = [{"coords": list(u.coords), "norm": u.norm()} for u in K.fundamental_units]
    return {
        "label": K.label,
        "poly": list(K.poly),
        "degree": K.degree,
        "r1": K.r1,
        "r2": K.r2,
        "discriminant": K.discriminant,
        "torsion_order": K.torsion_order,
        "class_number": K.class_number,
        "fundamental_units": units,
        "split_primes": split_prime_search(K, args.limit),
    }


def cmd_split_primes(cfg: RunConfig, args) -> dict:
    K = cfg.load()
    return {"label": K.label, "limit": args.limit, "split_primes": split_prime_search(K, args.limit)}


def cmd_eigenvariety(cfg: RunConfig, args) -> dict:
    K = cfg.load()
    p = cfg.prime(K)
    sp = hensel_embeddings(K, p, cfg.N)
    report = eig_report(K, sp, cfg.level, cfg.slack)
    out = report.to_dict()
    out["defect_margin"] = leopoldt_defect(K, sp, cfg.slack).margin
    return out


def _load_weight(path: str) -> Weight:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed weight file: {exc}") from exc
    try:
        return Weight.from_dict(raw)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"weight file does not follow the schema: {exc}") from exc


def cmd_weight(cfg: RunConfig, args) -> dict:
    kappa = _load_weight(args.weight)
    prov = {"N": kappa.ctx.N, "slack": cfg.slack, "p": kappa.ctx.p}
    if args.action == "rigid-locus":
        vals = rigid_locus_values(kappa)
        return {
            "action": "rigid-locus",
            "values": [v.residue for v in vals],
            "valuations": [v.valuation() for v in vals],
            "on_locus": all(v.valuation() >= kappa.ctx.N - cfg.slack for v in vals),
            "precision": prov,
        }
    K = cfg.load()
    if K.degree != kappa.d:
        raise ValueError(f"weight has d = {kappa.d} but {K.label} has degree {K.degree}")
    sp = hensel_embeddings(K, kappa.ctx.p, kappa.ctx.N)
    if args.action == "membership":
        report = eig_report(K, sp, cfg.level, cfg.slack)
        return {
            "action": "membership",
            "field": K.label,
            "in_W(U)": is_trivial_on(kappa, report.closure_images(), cfg.slack),
            "precision": prov,
        }
    report = eig_report(K, sp, cfg.level, cfg.slack)
    pc = classify_point(kappa, report, cfg.bound, cfg.slack)
    out = {"action": "classify", "field": K.label, **pc.to_dict(), "precision": prov}
    return out


def cmd_infinity_types(cfg: RunConfig, args) -> dict:
    K = cfg.load()
    p = cfg.prime(K)
    sp = hensel_embeddings(K, p, cfg.N)
    lat = infinity_type_lattice(K, sp, cfg.bound, cfg.slack)
    return {"label": K.label, "p": p, **lat.to_dict()}


def cmd_demo(cfg: RunConfig, args) -> dict:
    if args.demo == "unit-disc":
        return unit_disc_torsion_check(args.demo_p, args.n, args.terms).to_dict()
    exps = tuple(int(e) for e in args.exponents.split(","))
    ok = formal_density_check(args.demo_p, exps, args.trials, seed=args.seed)
    return {"p": args.demo_p, "group": [args.demo_p**e for e in exps], "trials": args.trials, "passed": ok}


def cmd_quotient_orders(cfg: RunConfig, args) -> dict:
    K = cfg.load()
    p = cfg.prime(K)
    sp = hensel_embeddings(K, p, cfg.N)
    levels = [int(r) for r in args.levels.split(",")]
    return {
        "label": K.label,
        "tame_level": {"m": cfg.level.m, "signs": list(cfg.level.signs)},
        "orders": {str(r): finite_quotient_order(K, sp, cfg.level, r) for r in levels},
        "precision": cfg.provenance(p),
    }


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", help="fixture path or name (q, q_i, q_sqrt2, q_sqrt_m23, cubic)")
    common.add_argument("--p", default="auto", help="odd totally split prime, or 'auto'")
    common.add_argument("--precision", type=int, default=40, help="p-adic digits N")
    common.add_argument("--slack", type=int, default=None, help="default ceil(N/4)")
    common.add_argument("--modulus", type=int, default=1, help="rational tame modulus m")
    common.add_argument("--signs", default="", help="comma-separated real places that must be positive")
    common.add_argument("--bound", type=int, default=None, help="integer reconstruction bound B")
    common.add_argument("--format", choices=("text", "json"), default="text")

    parser = argparse.ArgumentParser(prog="gl1eig", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field-info", parents=[common])
    p.add_argument("field_pos", nargs="?", help="fixture (alternative to --field)")
    p.add_argument("--limit", type=int, default=200)
    p.set_defaults(func=cmd_field_info)

    p = sub.add_parser("split-primes", parents=[common])
    p.add_argument("--limit", type=int, default=200)
    p.set_defaults(func=cmd_split_primes)

    p = sub.add_parser("eigenvariety", parents=[common])
    p.set_defaults(func=cmd_eigenvariety)

    p = sub.add_parser("weight", parents=[common])
    p.add_argument("action", choices=("classify", "rigid-locus", "membership"))
    p.add_argument("--weight", required=True, help="weight JSON file")
    p.set_defaults(func=cmd_weight)

    p = sub.add_parser("infinity-types", parents=[common])
    p.set_defaults(func=cmd_infinity_types)

    p = sub.add_parser("demo", parents=[common])
    dsub = p.add_subparsers(dest="demo", required=True)
    d1 = dsub.add_parser("unit-disc", parents=[common])
    d1.add_argument("--demo-p", dest="demo_p", type=int, default=5)
    d1.add_argument("--n", type=int, default=1)
    d1.add_argument("--terms", type=int, default=60)
    d2 = dsub.add_parser("formal-density", parents=[common])
    d2.add_argument("--demo-p", dest="demo_p", type=int, default=3)
    d2.add_argument("--exponents", default="1,1", help="G = prod Z/p^e")
    d2.add_argument("--trials", type=int, default=200)
    d2.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("quotient-orders", parents=[common])
    p.add_argument("--levels", default="1,2,3")
    p.set_defaults(func=cmd_quotient_orders)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "field_pos", None) and not args.field:
        args.field = args.field_pos
    try:
        cfg = RunConfig.from_args(args)
        payload: dict[str, Any] = args.func(cfg, args)
    except PrecisionError as exc:
        print(f"precision insufficient: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (FieldInvariantError, RankMismatchError, NotInWeightSpaceError, ArithmeticError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (FixtureSchemaError, FileNotFoundError, ValueError, KeyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(payload, cfg.fmt, out)
    return EXIT_OK


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
