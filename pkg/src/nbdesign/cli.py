"""Command-line interface: ``nbdesign <subcommand> ...``.

Exit status is 0 on success, 1 on domain or validation failures (including
malformed design files) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import string
import sys
from fractions import Fraction

import numpy as np

from . import matrixkit as mk
from .designs import DesignParseError, classify, fixture_text, format_design, load_design, parse_design
from .estimation import monte_carlo_check
from .information import (
    DomainError,
    EffectModel,
    closed_form_cnbd,
    commutes_with_k,
    info_joint,
    info_total_exact,
    info_total_upper,
)
from .optimality import efficiency, kiefer_verdict, phi_p, symmetric_design
from .sequences import optimal_composition, representative_sequence
from .tables import table_csv, table_text


def _load(path: str):
    if os.path.exists(path):
        return load_design(path)
    name = path[len("fixtures/"):] if path.startswith("fixtures/") else None
    if name:
        try:
            return parse_design(fixture_text(name))
        except FileNotFoundError:
            pass
    raise DesignParseError(f"no such design file: {path}")


def _num(x, fmt: str) -> str:
    if isinstance(x, Fraction):
        if fmt == "csv":
            return str(x)
        if x.denominator == 1:
            return str(x.numerator)
        return f"{float(x):.6g}"
    if isinstance(x, bool):
        return "yes" if x else "no"
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def _emit(pairs, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["field", "value"])
        for key, val in pairs:
            w.writerow([key, _num(val, fmt)])
        return buf.getvalue()
    width = max(len(k) for k, _ in pairs)
    return "".join(f"{k.ljust(width)}  {_num(v, fmt)}\n" for k, v in pairs)


def _matrix(M, fmt: str) -> str:
    rows = [[_num(Fraction(x), fmt) for x in r] for r in M]
    if fmt == "csv":
        return "".join(",".join(r) + "\n" for r in rows)
    wd = max(len(c) for r in rows for c in r)
    return "".join(" ".join(c.rjust(wd) for c in r) + "\n" for r in rows)


def _letters(seq) -> str:
    return "(" + ", ".join(string.ascii_lowercase[x - 1] if x <= 26 else str(x) for x in seq) + ")"


def cmd_verify(args) -> str:
    d = _load(args.design)
    r = classify(d)
    ell = str(r.ell) if r.ell_integral or args.format == "csv" else f"{float(r.ell):.6g} (not an integer)"
    if args.format == "csv":
        return _emit([("t", d.t), ("b", d.b), ("k", d.k), ("binary", r.is_binary),
                      ("balanced_block", r.is_balanced_block), ("cnbd", r.is_cnbd),
                      ("cnbd2", r.is_cnbd2), ("ell", r.ell),
                      ("no_self_neighbor_d1", r.no_self_neighbor_d1),
                      ("no_self_neighbor_d2", r.no_self_neighbor_d2)], "csv")
    yn = _num
    return (f"design: t={d.t} b={d.b} k={d.k}\n"
            f"binary: {yn(r.is_binary, 'text')}\n"
            f"balanced block: {yn(r.is_balanced_block, 'text')}\n"
            f"CNBD: {yn(r.is_cnbd, 'text')}, ℓ = {ell}\n"
            f"CNBD2: {yn(r.is_cnbd2, 'text')}, ℓ = {ell}\n"
            f"self neighbours at distance 1: {yn(not r.no_self_neighbor_d1, 'text')}\n"
            f"self neighbours at distance 2: {yn(not r.no_self_neighbor_d2, 'text')}\n")


def cmd_info(args) -> str:
    d = _load(args.design)
    m = args.model
    if args.kind == "joint":
        C = info_joint(d, m)
    elif args.kind == "upper":
        C = info_total_upper(d, m)
    elif args.kind == "closed":
        C = closed_form_cnbd(d.t, d.b, d.k, m)
    else:
        C = info_total_exact(d, m)
    sym, a, b = mk.complete_symmetry(C.matrix)
    pairs = [("model", m.name), ("kind", C.kind), ("order", C.matrix.shape[0]),
             ("trace", C.trace), ("completely_symmetric", sym)]
    if sym:
        pairs += [("a", a), ("b", b)]
    pairs += [("bound_equals_exact", commutes_with_k(d, m))]
    return _emit(pairs, args.format) + "\n" + _matrix(C.matrix, args.format)


def cmd_eff(args) -> str:
    d = _load(args.design)
    m = args.model
    e = efficiency(d, m)
    C = info_total_exact(d, m)
    pairs = [("model", m.name), ("trace", C.trace), ("efficiency", e.exact),
             ("efficiency_rounded", str(e.rounded))]
    if e.approximation is not None:
        pairs.append(("large_k_approximation", e.approximation))
    for p in (0, 1, float("inf")):
        r = phi_p(C, p)
        pairs.append((f"phi_{r.alias}", r.value))
    for kind in ("no-self-neighbor", "unrestricted"):
        try:
            v = kiefer_verdict(d, m, kind)
        except DomainError as exc:
            pairs.append((f"verdict[{kind}]", f"not applicable: {exc}"))
            continue
        label = "universally optimal" if v.conclusive else "not certified"
        if v.bound_based:
            label += " (bound-based)"
        pairs += [(f"trace_bound[{kind}]", v.trace_bound), (f"verdict[{kind}]", label)]
    return _emit(pairs, args.format)


def cmd_optseq(args) -> str:
    m = args.model
    t = args.t if args.t is not None else args.k
    oc = optimal_composition(args.k, t, m)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if m is EffectModel.M1:
            w.writerow(["k", "t", "v_star", "v_minus", "v_plus", "n_minus", "n_plus", "value", "representative"])
            for c in oc.compositions:
                w.writerow([args.k, t, c.v, c.v_minus, c.v_plus, c.n_minus, c.n_plus, c.value,
                            " ".join(map(str, representative_sequence(c)))])
        else:
            w.writerow(["k", "t", "v1", "v2", "runs", "value", "representative"])
            for c in oc.compositions:
                w.writerow([args.k, t, c.v1, c.v2, " ".join(map(str, c.runs)), c.value,
                            " ".join(map(str, representative_sequence(c)))])
        return buf.getvalue()
    lines = [f"model {m.name}, k={args.k}, t={t}: best block value {_num(oc.value, 'text')} ({oc.value})"]
    if oc.sqrt_bound is not None:
        lines.append(f"bound k - sqrt(2k) = {oc.sqrt_bound:.6f}")
    for c in oc.compositions:
        if m is EffectModel.M1:
            desc = f"v*={c.v}, v_-={c.v_minus}, v_+={c.v_plus}, n_-={c.n_minus}, n_+={c.n_plus}"
        else:
            desc = f"v1*={c.v1}, v2*={c.v2}, runs={list(c.runs)}"
        lines.append(f"{desc}: {_letters(representative_sequence(c))}")
    return "\n".join(lines) + "\n"


def cmd_optdesign(args) -> str:
    m = args.model
    t = args.t if args.t is not None else args.k
    d = symmetric_design(args.k, t, m, args.index)
    v = kiefer_verdict(d, m, "unrestricted")
    note = (f"all relabellings of an optimal sequence; model {m.name}\n"
            f"trace {v.trace}, bound {v.trace_bound}, "
            f"{'universally optimal' if v.conclusive else 'not certified'}")
    if m is EffectModel.M2:
        note += " (two-sided construction, experimental)"
    return format_design(d, note)


def cmd_tables(args) -> str:
    return table_csv(args.which) if args.format == "csv" else table_text(args.which)


def cmd_simulate(args) -> str:
    d = _load(args.design)
    if args.contrast is None:
        h = np.zeros(d.t)
        h[:2] = [1, -1]
    else:
        h = np.array([float(x) for x in args.contrast.split(",")])
    r = monte_carlo_check(d, args.model, h, args.sigma, args.replicates, args.seed)
    return _emit([("model", args.model.name), ("contrast", " ".join(f"{x:g}" for x in h)),
                  ("sigma", float(args.sigma)), ("replicates", r.replicates), ("seed", args.seed),
                  ("empirical_variance", r.empirical_variance),
                  ("theoretical_variance", r.theoretical_variance), ("ratio", r.ratio)],
                 args.format)


def _model(value: str) -> EffectModel:
    try:
        return EffectModel.parse(value)
    except ValueError:
        raise argparse.ArgumentTypeError("model must be m1 or m2") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nbdesign", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help, design=False, model=False):
        p = sub.add_parser(name, help=help)
        if design:
            p.add_argument("design", help="design file (bundled fixtures: fixtures/<name>)")
        if model:
            p.add_argument("--model", type=_model, default=EffectModel.M1, help="m1 or m2")
        p.add_argument("--format", choices=["text", "csv"], default="text")
        p.set_defaults(func=func)
        return p

    add("verify", cmd_verify, "classify a design", design=True)
    p = add("info", cmd_info, "information matrix of a design", design=True, model=True)
    p.add_argument("--kind", choices=["exact", "upper", "joint", "closed"], default="exact")
    add("eff", cmd_eff, "efficiency and optimality verdicts", design=True, model=True)
    p = add("optseq", cmd_optseq, "optimal block sequences", model=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=int)
    p = add("optdesign", cmd_optdesign, "design from all relabellings of an optimal sequence", model=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=int)
    p.add_argument("--index", type=int, default=0, help="which tied composition to use")
    p = add("tables", cmd_tables, "optimal compositions and efficiency tables")
    p.add_argument("--which", type=int, choices=[1, 2, 3], required=True)
    p = add("simulate", cmd_simulate, "Monte Carlo check of a contrast variance", design=True, model=True)
    p.add_argument("--contrast", help="comma-separated contrast, default e1 - e2")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--replicates", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    return parser


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = args.func(args)
    except (DomainError, DesignParseError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
