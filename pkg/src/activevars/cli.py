"""Command-line interface.

Subcommands
-----------
bounds      truncation levels over an (eps, d) grid as CSV/JSON
spectrum    serialize a univariate spectrum
cda         plan and price the changing-dimension algorithm
optimal     the spectral algorithm: term count, error, active variables
complexity  complexity grid plus tractability fits
table       reproduce the factorial-majorant reference table
mc-check    Monte Carlo cross-check of exact truncation errors

Exit codes: 0 on success, 2 when a reference check fails, 1 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from .cda import build_plan, price_plan
from .cost import CostModel, complexity_curve, tractability_classify
from .errors import ActiveVarsError
from .harness import (
    GOLDEN_MAJORANT_CEILINGS,
    RunConfig,
    mc_l2_error,
    single_subset_function,
    table_check,
)
from .optimal import optimal_algorithm
from .space import g_norm_exact
from .spectrum import (
    KernelSpec,
    build_spectrum,
    power_sum,
    spectrum_to_json,
)
from .truncation import truncation_level

USAGE_ERROR = 1
CHECK_FAILED = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; this tool reserves 2 for failed checks."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(USAGE_ERROR)


def _parse_kernel(text: str) -> tuple[str, float | None, str | None]:
    if text == "wiener":
        return "wiener", None, None
    if text.startswith("korobov:"):
        return "korobov", float(text.split(":", 1)[1]), None
    if text.startswith("custom:"):
        return "custom", None, text.split(":", 1)[1]
    raise argparse.ArgumentTypeError(
        f"kernel must be wiener, korobov:R or custom:FILE, got {text!r}"
    )


def _parse_cost(text: str) -> tuple[str, float]:
    if text == "constant":
        return "constant", 0.0
    for prefix, family in (
        ("poly:", "polynomial"),
        ("exp:", "exponential"),
        ("doubleexp:", "double_exponential"),
        ("linfloor:", "linear_floor"),
    ):
        if text.startswith(prefix):
            return family, float(text.split(":", 1)[1])
    raise argparse.ArgumentTypeError(f"unknown cost model {text!r}")


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(","))


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(","))


def _build_config(args: argparse.Namespace) -> RunConfig:
    kernel, r, custom_path = args.kernel
    cost_family, cost_param = getattr(args, "cost", ("constant", 0.0))
    return RunConfig(
        subcommand=args.subcommand,
        kernel=kernel,
        r=r,
        custom_path=custom_path,
        c0sq_mode="paper_bound" if args.c0sq_mode == "paper" else "exact",
        n_eigenvalues=args.n_eigenvalues,
        eps_grid=tuple(getattr(args, "eps_grid", ()) or ()),
        d_grid=tuple(getattr(args, "d_grid", ()) or ()),
        tau=getattr(args, "tau", None),
        cost=cost_family,
        cost_param=cost_param,
        c_const=getattr(args, "c_const", 1.0),
        seed=args.seed,
        samples=getattr(args, "samples", 100_000),
        trials=getattr(args, "trials", 50),
        top=getattr(args, "top", 10),
        out=args.out,
        fmt=args.format,
    )


def _spectrum_from_config(cfg: RunConfig):
    if cfg.kernel == "wiener":
        spec = KernelSpec(kind="wiener")
    elif cfg.kernel == "korobov":
        spec = KernelSpec(kind="korobov", r=cfg.r)
    else:
        with open(cfg.custom_path) as fh:
            values = json.load(fh)
        spec = KernelSpec(kind="custom", eigenvalues=tuple(values))
    return build_spectrum(spec, cfg.n_eigenvalues, cfg.c0sq_mode)


def _cost_model(cfg: RunConfig) -> CostModel:
    if cfg.cost == "linear_floor":
        return CostModel(family="linear_floor", c=cfg.cost_param)
    return CostModel(family=cfg.cost, q=cfg.cost_param)


def _emit(cfg: RunConfig, header: list[str], rows: list[list], summary: dict) -> None:
    if cfg.fmt == "json":
        text = json.dumps(
            {"rows": [dict(zip(header, row)) for row in rows], "summary": summary},
            sort_keys=True,
            indent=2,
        )
    else:
        buf = io.StringIO()
        for key in sorted(summary):
            buf.write(f"# {key}={summary[key]}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        text = buf.getvalue().rstrip("\n")
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# -- subcommand implementations ----------------------------------------------


def _run_bounds(cfg: RunConfig) -> int:
    s = _spectrum_from_config(cfg)
    rows = []
    for d in cfg.d_grid:
        for eps in cfg.eps_grid:
            rep = truncation_level(eps, d, s.c0sq, c_const=cfg.c_const)
            rows.append(
                [eps, d, rep.level, rep.tail_at_level, rep.majorant_ceil, rep.orthogonal_level]
            )
    _emit(cfg, ["epsilon", "d", "m1", "tail_at_m1", "ceil_big_m", "m2"], rows, {})
    return 0


def _run_spectrum(cfg: RunConfig) -> int:
    s = _spectrum_from_config(cfg)
    text = spectrum_to_json(s)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _run_cda(cfg: RunConfig, epsilon: float, d: int) -> int:
    s = _spectrum_from_config(cfg)
    plan = build_plan(epsilon, d, s, tau=cfg.tau)
    price = price_plan(plan, _cost_model(cfg))
    rows = [[row.cardinality, row.eps_l, row.n_l] for row in plan.rows]
    summary = {
        "epsilon": plan.epsilon,
        "d": plan.d,
        "tau": plan.tau,
        "m1": plan.level,
        "R": plan.big_r,
        "ell_star": plan.ell_star,
        "l_tau": plan.l_tau_value,
        "exact_cost": price.exact,
        "bound_cost": price.bound,
        "log_exact_cost": price.log_exact,
        "log_bound_cost": price.log_bound,
    }
    _emit(cfg, ["cardinality", "eps_l", "n_l"], rows, summary)
    return 0


def _run_optimal(cfg: RunConfig, epsilon: float, d: int) -> int:
    s = _spectrum_from_config(cfg)
    alg = optimal_algorithm(epsilon, d, s, c_const=cfg.c_const)
    rows = [
        [e.cardinality, ":".join(map(str, e.indices)), e.value, e.multiplicity]
        for e in alg.entries[: cfg.top]
    ]
    summary = {
        "epsilon": epsilon,
        "d": d,
        "n": alg.n_terms,
        "worst_case_error": alg.worst_case_error,
        "max_act": alg.max_act,
        "m2_ceiling": alg.m2_ceiling,
    }
    if cfg.tau is not None:
        ltau = power_sum(s, cfg.tau)
        summary["n_cap"] = (
            math.ceil(
                math.exp(ltau * d ** (1.0 - cfg.tau))
                * alg.epsilon_effective ** (-2.0 * cfg.tau)
            )
            - 1
        )
    _emit(cfg, ["cardinality", "indices", "eigenvalue", "multiplicity"], rows, summary)
    return 0


def _run_complexity(cfg: RunConfig) -> int:
    s = _spectrum_from_config(cfg)
    tau = cfg.tau if cfg.tau is not None else 1.0
    report = complexity_curve(
        s, cfg.c_const, _cost_model(cfg), cfg.eps_grid, cfg.d_grid, tau=tau
    )
    rows = [
        [p.d, p.epsilon, p.comp, p.bound, p.n_terms, p.max_act, int(p.within_bound)]
        for p in report.points
    ]
    try:
        labels = tractability_classify(report)
    except ActiveVarsError:
        labels = []
    summary = {
        "p_str_fit": report.p_str_fit,
        "p_str_residual": report.p_str_residual,
        "qpt_t_fit": report.qpt_t_fit,
        "qpt_c_fit": report.qpt_c_fit,
        "qpt_residual": report.qpt_residual,
        "weak_max": report.weak_max,
        "labels": labels,
        "flags": list(report.flags),
    }
    _emit(
        cfg,
        ["d", "epsilon", "comp", "bound", "n_terms", "max_act", "within_bound"],
        rows,
        summary,
    )
    return 0


def _run_table(cfg: RunConfig) -> int:
    rows, diffs = table_check()
    _emit(
        cfg,
        ["q", "ceil_majorant", "expected"],
        [[q, got, want] for (q, got), want in zip(rows, GOLDEN_MAJORANT_CEILINGS)],
        {"mismatches": diffs} if diffs else {},
    )
    if diffs:
        for line in diffs:
            print(f"MISMATCH {line}", file=sys.stderr)
        return CHECK_FAILED
    return 0


def _run_mc_check(cfg: RunConfig, d: int) -> int:
    s = _spectrum_from_config(cfg)
    if s.kind == "wiener":
        print("mc-check needs a kernel with orthogonal embedded norms", file=sys.stderr)
        return USAGE_ERROR
    rows = []
    inside = 0
    for trial in range(cfg.trials):
        rng_seed = cfg.seed + trial
        u = tuple(range(1, min(2, d) + 1))
        k = tuple([1 + (trial % 3)] * len(u))
        f = single_subset_function(d, u, k, value=1.0)
        approx = single_subset_function(d, u, k, value=0.0)
        exact = g_norm_exact(f, s, orthogonal=True).value
        est, se = mc_l2_error(f, approx, s, samples=cfg.samples, seed=rng_seed)
        ok = abs(exact - est) <= 3.0 * se if se > 0 else exact == est
        inside += int(ok)
        rows.append([trial, exact, est, se, int(ok)])
    needed = math.ceil(0.94 * cfg.trials)
    _emit(
        cfg,
        ["trial", "exact", "estimate", "std_error", "inside_3_sigma"],
        rows,
        {"inside": inside, "trials": cfg.trials, "needed": needed},
    )
    return 0 if inside >= needed else CHECK_FAILED


# -- argument wiring -----------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kernel", type=_parse_kernel, default=("wiener", None, None))
    p.add_argument("--c0sq-mode", choices=("exact", "paper"), default="exact")
    p.add_argument("--n-eigenvalues", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="activevars", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("bounds")
    _add_common(p)
    p.add_argument("--eps-grid", type=_floats, required=True)
    p.add_argument("--d-grid", type=_ints, required=True)
    p.add_argument("--c-const", type=float, default=1.0)

    p = sub.add_parser("spectrum")
    _add_common(p)

    p = sub.add_parser("cda")
    _add_common(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--cost", type=_parse_cost, default=("constant", 0.0))

    p = sub.add_parser("optimal")
    _add_common(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--c-const", type=float, default=1.0)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--top", type=int, default=10)

    p = sub.add_parser("complexity")
    _add_common(p)
    p.add_argument("--eps-grid", type=_floats, required=True)
    p.add_argument("--d-grid", type=_ints, required=True)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--cost", type=_parse_cost, default=("constant", 0.0))
    p.add_argument("--c-const", type=float, default=1.0)

    p = sub.add_parser("table")
    _add_common(p)

    p = sub.add_parser("mc-check")
    _add_common(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--trials", type=int, default=50)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR
    try:
        cfg = _build_config(args)
        if cfg.subcommand == "bounds":
            return _run_bounds(cfg)
        if cfg.subcommand == "spectrum":
            return _run_spectrum(cfg)
        if cfg.subcommand == "cda":
            return _run_cda(cfg, args.epsilon, args.d)
        if cfg.subcommand == "optimal":
            return _run_optimal(cfg, args.epsilon, args.d)
        if cfg.subcommand == "complexity":
            return _run_complexity(cfg)
        if cfg.subcommand == "table":
            return _run_table(cfg)
        if cfg.subcommand == "mc-check":
            return _run_mc_check(cfg, args.d)
        return USAGE_ERROR  # pragma: no cover
    except ActiveVarsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
