"""Command-line front end.

Exit status: 0 success, 1 invalid input, 2 infeasible or not-applicable
computation (also: a failed reproduction check or a fuzz violation),
3 enumeration limit.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Optional, Sequence

from . import __version__
from .divergences import REGISTRY, conditional_entropy, f_divergence, generator
from .errors import EnumerationLimit, Infeasible, InfoBoundsError, InvalidArgument, NotApplicable, NotMajorized
from .fuzz import fuzz_campaign
from .io import dumps, load_cluster_map, load_code, load_joint, load_pmf, load_rule, rule_to_json
from .listdecoding import (
    FixedListRule,
    ak_invert,
    egamma_bound,
    equality_check,
    error_prob,
    expected_log_list,
    fano_fixed_invert,
    gen_fano_check,
    gen_fano_invert,
    is_most_probable,
    optimize_gamma,
    refined_bound,
    refined_invert,
)
from .majorization import cluster_oracle, tilde_x_m
from .worked_example import reproduce_paper
from .prob import DEFAULT_TOL, map_error
from .sourcecoding import campbell_lengths, campbell_verify, clustering_report, huffman, kraft_sum

UNITS = ("bits", "nats", "logD")


def to_unit(nats: float, unit: str, D: int = 2) -> float:
    """Convert an information quantity from nats."""
    if unit == "nats":
        return nats
    if unit == "bits":
        return nats / math.log(2)
    if unit == "logD":
        return nats / math.log(D)
    raise InvalidArgument(f"unknown unit {unit!r}")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


# -- commands ---------------------------------------------------------------------


def cmd_divergence(args) -> tuple[dict, int]:
    P = load_pmf(args.p, args.tol)
    Q = load_pmf(args.q, args.tol)
    if not P.same_atoms(Q):
        raise InvalidArgument("the two pmf files list different atoms")
    names = [args.f] if args.f else list(REGISTRY)
    if args.gamma is not None:
        names.append(f"egamma:{args.gamma:g}")
    values = {}
    for name in names:
        f = generator(name)
        # E_gamma and TV are probabilities, the rest information quantities
        raw = f_divergence(P, Q, f)
        values[name] = raw if name == "tv" or name.startswith("egamma") else to_unit(raw, args.unit, args.D)
    return {"command": "divergence", "unit": args.unit, "divergences": values}, 0


def cmd_listbound(args) -> tuple[dict, int]:
    J = load_joint(args.joint, args.tol)
    rule = load_rule(args.rule, J)
    h = conditional_entropy(J)
    pl = error_prob(J, rule)
    report: dict = {
        "command": "listbound",
        "unit": args.unit,
        "M": J.M,
        "rule": rule_to_json(rule, J),
        "error_prob": pl,
        "map_error": map_error(J),
        "conditional_entropy": to_unit(h, args.unit),
        "bounds": {},
    }
    bounds = report["bounds"]

    def add(name: str, raw: float, **extra):
        bounds[name] = {"raw": raw, "clamped": max(raw, 0.0), "sound": raw <= pl + 1e-9, **extra}

    inv = ak_invert(h, J.M, expected_log_list(J, rule), rule.max_size)
    add("fano_variable_list", inv.p_general, iterations=inv.iterations)
    add("fano_max_list", inv.p_maxlist, N=rule.max_size)
    g_star, best = optimize_gamma(J, rule)
    add("egamma_optimized", best, gamma=g_star)
    if args.gamma is not None:
        add("egamma", egamma_bound(J, rule, args.gamma), gamma=args.gamma)
        w = equality_check(J, rule, args.gamma)
        report["equality_witness"] = {"gamma": w.gamma, "alpha": list(w.alpha), "satisfied": w.satisfied,
                                      "violations": [{"y": J.y_labels[j], "reason": r} for j, r in w.violations]}

    if isinstance(rule, FixedListRule) and (args.all or args.f):
        L = rule.L
        names = list(REGISTRY) + ["egamma:1.5"] if args.all else [args.f]
        for name in names:
            f = generator(name)
            chk = gen_fano_check(J, rule, f)
            g_inv = gen_fano_invert(chk.lhs, J.M, L, f)
            add(f"gen_fano[{name}]", g_inv.p, lhs=chk.lhs, rhs_at_error_prob=chk.rhs, holds=chk.holds,
                iterations=g_inv.iterations)
        f_inv = fano_fixed_invert(h, J.M, L)
        add("fano_fixed_list", f_inv.p, iterations=f_inv.iterations)
        for name in ("kl", "chi2") if args.all else [args.f]:
            f = generator(name)
            try:
                rep = refined_bound(J, rule, f)
            except NotApplicable as e:
                report.setdefault("not_applicable", {})[f"refined[{name}]"] = str(e)
                continue
            a = refined_invert(J, L, f, "a")
            add(f"refined_a[{name}]", a.p, m_f=rep.m_f_used, xi1=rep.xi1_star, xi2=rep.xi2_star,
                correction=rep.correction_a, iterations=a.iterations)
            if is_most_probable(J, rule):
                b = refined_invert(J, L, f, "b")
                add(f"refined_b[{name}]", b.p, correction=rep.correction_b,
                    correction_nonnegative=rep.correction_b_nonnegative, iterations=b.iterations)
    return report, 0


def _code_for(args, P, rho: float):
    if args.code:
        return load_code(args.code, P)
    if args.construct == "huffman":
        return huffman(P, args.D)
    return campbell_lengths(P, rho, args.D)


def cmd_campbell(args) -> tuple[dict, int]:
    P = load_pmf(args.pmf, args.tol)
    rows = []
    for rho in args.rho:
        spec = _code_for(args, P, rho)
        rep = campbell_verify(P, spec, rho, k=args.k)
        rows.append({
            "rho": rho, "k": rep.k, "D": rep.D, "lengths": dict(zip(P.labels, spec.lengths)),
            "kraft_sum": kraft_sum(spec),
            "lambda_k": {"logD": rep.lambda_k, "nats": rep.lambda_k_nats},
            "renyi_term": {"logD": rep.renyi_term, "nats": rep.renyi_term * math.log(rep.D)},
            "converse_margin": {"logD": rep.converse_margin, "nats": rep.converse_margin_nats},
            "achievability_margin": {"logD": rep.achievability_margin, "nats": rep.achievability_margin_nats},
            "slack": rep.slack, "converse_holds": rep.converse_holds, "achievability_holds": rep.achievability_holds,
        })
    return {"command": "campbell", "code": args.code or args.construct, "reports": rows}, 0


def cmd_cluster(args) -> tuple[dict, int]:
    P = load_pmf(args.pmf, args.tol)
    c = load_cluster_map(args.map)
    rep = clustering_report(P, args.m, c, args.D, args.k, args.rho)
    tilde = tilde_x_m(P, args.m)
    out = {
        "command": "cluster", "unit": args.unit, "m": rep.m, "D": rep.D, "k": rep.k, "n_star": rep.n_star,
        "tilde_pmf": list(rep.tilde_pmf), "sort_order": [P.labels[i] for i in tilde.order],
        "induced_pmf": list(rep.induced_pmf),
        "avg_length_source": rep.avg_length_source, "avg_length_clustered": rep.avg_length_clustered,
        "entropy_source": to_unit(rep.entropy_source, args.unit, args.D),
        "entropy_tilde": to_unit(rep.entropy_tilde, args.unit, args.D),
        "entropy_induced": to_unit(rep.entropy_induced, args.unit, args.D),
        "delta": rep.delta, "band": list(rep.band), "in_band": rep.in_band,
        "renyi_reference": {str(r): v for r, v in rep.renyi_reference.items()},
    }
    if args.oracle:
        best, h = cluster_oracle(P, args.m, 1.0)
        out["oracle_max_entropy"] = to_unit(h, args.unit, args.D)
        out["oracle_map"] = dict(best.mapping)
    return out, 0


def cmd_fuzz(args) -> tuple[dict, int]:
    report = fuzz_campaign(args.seed, args.trials, args.max_M, args.max_ny)
    report["command"] = "fuzz"
    return report, 0 if report["total_violations"] == 0 else 2


def cmd_reproduce(args) -> tuple[dict, int]:
    checks = [c.as_dict() for c in reproduce_paper()]
    ok = all(c["passed"] for c in checks)
    return {"command": "reproduce-paper", "all_passed": ok, "checks": checks}, 0 if ok else 2


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--unit", choices=UNITS, default="bits", help="unit for information quantities")
    common.add_argument("--tol", type=_positive, default=DEFAULT_TOL, help="pmf validation tolerance")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--D", type=int, default=2, help="code alphabet size")

    parser = argparse.ArgumentParser(prog="infobounds", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("divergence", parents=[common], help="f-divergences between two pmf files")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--f", help="kl | tv | chi2 | egamma:<gamma> (default: all registry generators)")
    p.add_argument("--gamma", type=float, help="also report E_gamma")
    p.set_defaults(run=cmd_divergence)

    p = sub.add_parser("listbound", parents=[common], help="list-decoding error probability and lower bounds")
    p.add_argument("--joint", required=True)
    p.add_argument("--rule", required=True)
    p.add_argument("--f", help="generator for the fixed-size bounds")
    p.add_argument("--gamma", type=float, help="evaluate the E_gamma bound and equality condition here")
    p.add_argument("--all", action="store_true", help="every applicable bound")
    p.set_defaults(run=cmd_listbound)

    p = sub.add_parser("campbell", parents=[common], help="Campbell converse/achievability margins")
    p.add_argument("--pmf", required=True)
    p.add_argument("--rho", type=_floats, default=[1.0], help="comma-separated rho values")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--code", help="code file; otherwise a code is constructed")
    p.add_argument("--construct", choices=("campbell", "huffman"), default="campbell")
    p.set_defaults(run=cmd_campbell)

    p = sub.add_parser("cluster", parents=[common], help="average-length change under clustering")
    p.add_argument("--pmf", required=True)
    p.add_argument("--map", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--rho", type=_floats, default=[0.25, 1.0, 4.0])
    p.add_argument("--oracle", action="store_true", help="also run the exhaustive entropy oracle")
    p.set_defaults(run=cmd_cluster)

    p = sub.add_parser("fuzz", parents=[common], help="randomized invariant campaign")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--max-M", dest="max_M", type=int, default=8)
    p.add_argument("--max-ny", dest="max_ny", type=int, default=4)
    p.set_defaults(run=cmd_fuzz)

    p = sub.add_parser("reproduce-paper", parents=[common], help="recompute the 5x2 worked example")
    p.set_defaults(run=cmd_reproduce)
    return parser


def _summary(report: dict, prefix: str = "") -> list[str]:
    lines = []
    for k, v in report.items():
        if isinstance(v, dict):
            lines.extend(_summary(v, f"{prefix}{k}."))
        elif isinstance(v, float):
            lines.append(f"{prefix}{k} = {v:.9g}")
        elif isinstance(v, (int, bool, str)):
            lines.append(f"{prefix}{k} = {v}")
    return lines


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, status = args.run(args)
    except (InvalidArgument, ValueError) as e:
        print(f"infobounds: invalid input: {e}", file=sys.stderr)
        return 1
    except EnumerationLimit as e:
        print(f"infobounds: enumeration limit: {e}", file=sys.stderr)
        return 3
    except (NotApplicable, Infeasible, NotMajorized) as e:
        print(f"infobounds: {e}", file=sys.stderr)
        return 2
    except InfoBoundsError as e:
        print(f"infobounds: {e}", file=sys.stderr)
        return 2
    text = dumps(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print("\n".join(_summary(report)))
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
