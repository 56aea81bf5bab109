"""Command-line front end.

Exit status: 0 success, 1 usage or parse error, 2 an oracle disagreed beyond
tolerance, 3 quadrature did not converge, 4 the double integral came out
negative beyond its error bound (a finding, reported separately).
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from typing import Sequence

import numpy as np
from scipy import special as sp_special

from . import closed_form as cf
from .distributions import Gaussian, Scenario, Source, sample_triples
from .experiments import (
    ConjectureResult,
    Estimate,
    Method,
    QuadratureError,
    TiePolicy,
    conjecture_integral,
    get_sweep,
    mc_conditional_success,
    mc_success_probability,
    quad_success_probability,
    rule_agreement_matrix,
)
from .experiments.montecarlo import _STREAM_TRIPLES, CHUNK_SIZE, chunk_rng
from .report import Report, write_report
from .rules import resolve_rule, verdicts
from .scenario_io import ScenarioParseError, load_scenario
from .special import owen_t

log = logging.getLogger("nnmix")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DISAGREE = 2
EXIT_QUADRATURE = 3
EXIT_SIGN_VIOLATION = 4

DEFAULT_N = 1_000_000
THEOREM1_GRID = (0.1, 0.5, 1.0, 2.0, 5.0)
THEOREM2_EPS = (-5.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 5.0)
THEOREM2_BETA = (0.1, 0.25, 0.5, 2.0, 4.0, 10.0)
DEFAULT_RULES = "nearest_neighbor,cusum,max_likelihood,kernel_linear,kernel_gaussian:1,kernel_poly:2"
# rules the equivalence result says must always agree with nearest neighbor
_EQUIVALENT = ("nearest_neighbor", "cusum", "max_likelihood", "kernel_linear", "kernel_gaussian")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        v = int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not -(1 << 63) <= v < (1 << 64):
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=_positive_int, default=DEFAULT_N, help="Monte Carlo sample size (default: 10^6)")
    common.add_argument("--seed", type=_seed, default=0, help="random seed (default: 0)")
    common.add_argument(
        "--tie-policy",
        choices=[p.value for p in TiePolicy],
        default=TiePolicy.HALF_CREDIT.value,
        help="how ties are scored (default: HalfCredit)",
    )
    common.add_argument(
        "--threads", type=_positive_int, default=None, help="worker threads (default: all cores; output is unaffected)"
    )
    common.add_argument("--output-format", choices=["json", "csv"], default="json", help="default: json")
    common.add_argument("--output", default=None, help="output file (default: stdout)")
    common.add_argument("--scenario", default=None, help="scenario file with fx/fz lines")
    common.add_argument("--tolerance", type=_positive_float, default=None, help="oracle agreement tolerance")

    gauss = argparse.ArgumentParser(add_help=False)
    gauss.add_argument("--epsilon", type=float, default=None, help="mean gap mu_Z - mu_X")
    gauss.add_argument("--sigma-x", type=_positive_float, default=None, help="standard deviation of f_X (default 1)")

    p = _Parser(prog="nnmix", description="Nearest-neighbor rule for a two-component mixture: exact values and checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("verify-theorem1", parents=[common, gauss], help="equal-variance Gaussian triangulation")
    t2 = sub.add_parser("verify-theorem2", parents=[common, gauss], help="unequal-variance Gaussian triangulation")
    t2.add_argument("--beta", type=_positive_float, default=None, help="variance ratio var(Z)/var(X)")
    cr = sub.add_parser("compare-rules", parents=[common], help="pairwise agreement between decision rules")
    cr.add_argument("--rules", default=DEFAULT_RULES, help=f"comma-separated rule ids (default: {DEFAULT_RULES})")
    cs = sub.add_parser("conjecture-scan", parents=[common], help="double integral over a scenario sweep")
    cs.add_argument("--sweep", default="catalog", help="named sweep: catalog, gaussian-laplace-grid, gaussian-grid")
    si = sub.add_parser("simulate", parents=[common], help="raw per-triple records with every rule's verdict")
    si.add_argument("--rules", default=DEFAULT_RULES)
    sub.add_parser("owen-table", parents=[common], help="Owen's T over a grid, with a reference column")
    return p


def _gaussian_params(args) -> tuple[float | None, float, float | None]:
    sigma = args.sigma_x
    eps = args.epsilon
    beta = getattr(args, "beta", None)
    if args.scenario:
        s = load_scenario(args.scenario)
        if not s.is_gaussian:
            raise UsageError(f"{args.command} needs Gaussian densities; {args.scenario} has {s.fx.to_text()} / {s.fz.to_text()}")
        params = cf.GaussianScenarioParams.from_scenario(s)
        eps = params.epsilon if eps is None else eps
        sigma = params.sigma_x if sigma is None else sigma
        beta = params.beta if beta is None else beta
    return eps, (1.0 if sigma is None else sigma), beta


def _config(args, **extra) -> dict:
    # --threads and --output are left out so outputs are byte-identical across them
    cfg = {"n": args.n, "seed": args.seed, "tie_policy": args.tie_policy}
    cfg.update(extra)
    return cfg


def _within(a: float, b: float, se: float) -> bool:
    return abs(a - b) < 3.0 * se


# -- commands ---------------------------------------------------------------


def cmd_verify_theorem1(args) -> tuple[Report, int]:
    eps, sigma, _ = _gaussian_params(args)
    tol = args.tolerance or 1e-6
    ratios = THEOREM1_GRID if eps is None else (eps / sigma,)
    rows, status = [], EXIT_OK
    for k, ratio in enumerate(ratios):
        e = ratio * sigma
        s = cf.GaussianScenarioParams(e, sigma, 1.0).to_scenario()
        closed = cf.theorem1_success(e, sigma)
        quad = quad_success_probability(s, Source.FROM_X)
        mc = mc_success_probability(s, "nearest_neighbor", args.n, args.seed + k, args.tie_policy, args.threads)
        ok = abs(closed - quad.value) < tol and _within(closed, mc.value, mc.std_error)
        if not ok:
            status = EXIT_DISAGREE
            log.error("theorem 1 oracle disagreement at eps/sigma=%r", ratio)
        rows.append(
            {
                "eps_over_sigma": ratio,
                "epsilon": e,
                "sigma": sigma,
                "closed_form": closed,
                "quadrature": quad.to_dict(),
                "monte_carlo": mc.to_dict(),
                "bayes": cf.bayes_success(e, sigma),
                "agree": ok,
            }
        )
    curve = [
        {"eps_over_sigma": float(r), "nearest_neighbor": cf.theorem1_success(float(r), 1.0), "bayes": cf.bayes_success(float(r), 1.0)}
        for r in np.linspace(0.0, 6.0, 121)
    ]
    return Report(args.command, _config(args, sigma=sigma, tolerance=tol), rows, plots={"success_curve": curve}), status


def cmd_verify_theorem2(args) -> tuple[Report, int]:
    eps, sigma, beta = _gaussian_params(args)
    tol = args.tolerance or 1e-6
    eps_grid = THEOREM2_EPS if eps is None else (eps,)
    beta_grid = THEOREM2_BETA if beta is None else (beta,)
    rows, status = [], EXIT_OK
    for k, (e, b) in enumerate((e, b) for e in eps_grid for b in beta_grid):
        params = cf.GaussianScenarioParams(e, sigma, b)
        s = params.to_scenario()
        p1, p2, comb = cf.theorem2_p_star(params), cf.theorem2_p_star_star(params), cf.theorem2_success(params)
        q1 = quad_success_probability(s, Source.FROM_X)
        q2 = quad_success_probability(s, Source.FROM_Z)
        seed = args.seed + 3 * k
        m1 = mc_conditional_success(s, "nearest_neighbor", Source.FROM_X, args.n, seed, args.tie_policy, args.threads)
        m2 = mc_conditional_success(s, "nearest_neighbor", Source.FROM_Z, args.n, seed + 1, args.tie_policy, args.threads)
        mc = mc_success_probability(s, "nearest_neighbor", args.n, seed + 2, args.tie_policy, args.threads)
        ok = (
            abs(p1 - q1.value) < tol
            and abs(p2 - q2.value) < tol
            and _within(p1, m1.value, m1.std_error)
            and _within(p2, m2.value, m2.std_error)
            and _within(comb, mc.value, mc.std_error)
        )
        if not ok:
            status = EXIT_DISAGREE
            log.error("theorem 2 oracle disagreement at epsilon=%r beta=%r", e, b)
        rows.append(
            {
                "epsilon": e,
                "sigma_x": sigma,
                "beta": b,
                "p_star": p1,
                "p_star_star": p2,
                "combined": comb,
                "quad_p_star": q1.to_dict(),
                "quad_p_star_star": q2.to_dict(),
                "mc_p_star": m1.to_dict(),
                "mc_p_star_star": m2.to_dict(),
                "mc_combined": mc.to_dict(),
                "t_script": cf.t_script(b, e, sigma),
                "t_script_at_zero": cf.t_script_at_zero(b),
                "agree": ok,
            }
        )
    betas = np.logspace(-3, 3, 201)
    t_curve = [{"beta": float(b), "t_script_at_zero": cf.t_script_at_zero(float(b)), "pi": math.pi} for b in betas]
    plots = {"t_script_curve": t_curve}
    if len(eps_grid) == 1 and len(beta_grid) == 1:
        s = cf.GaussianScenarioParams(eps_grid[0], sigma, beta_grid[0]).to_scenario()
        lo = min(s.fx.mean - 4 * s.fx.std, s.fz.mean - 4 * s.fz.std)
        hi = max(s.fx.mean + 4 * s.fx.std, s.fz.mean + 4 * s.fz.std)
        plots["densities"] = [
            {"w": float(w), "f_x": float(s.fx.pdf(w)), "f_z": float(s.fz.pdf(w))} for w in np.linspace(lo, hi, 401)
        ]
    cfg = _config(args, sigma_x=sigma, tolerance=tol)
    return Report(args.command, cfg, rows, plots=plots), status


def _scenario_or_default(args) -> Scenario:
    if args.scenario:
        return load_scenario(args.scenario)
    return Scenario(Gaussian(0.0, 1.0), Gaussian(1.0, 1.0))


def _rule_list(text: str) -> list[str]:
    rules = [r.strip() for r in text.split(",") if r.strip()]
    for r in rules:
        try:
            resolve_rule(r)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return rules


def cmd_compare_rules(args) -> tuple[Report, int]:
    s = _scenario_or_default(args)
    rules = _rule_list(args.rules)
    if len(rules) < 2:
        raise UsageError("--rules needs at least two rules")
    m = rule_agreement_matrix(s, rules, args.n, args.seed, args.threads)
    rows, status = [], EXIT_OK
    for i, a in enumerate(rules):
        for j, b in enumerate(rules):
            rate = float(m.rates[i, j])
            rows.append({"rule_a": a, "rule_b": b, "agreement_rate": rate, "compared": int(m.compared[i, j])})
            if a.split(":")[0] in _EQUIVALENT and b.split(":")[0] in _EQUIVALENT and rate != 1.0:
                status = EXIT_DISAGREE
                log.error("rules %s and %s disagree (rate %r)", a, b, rate)
    sections = {
        "scenario": {"fx": s.fx.to_text(), "fz": s.fz.to_text()},
        "tie_counts": dict(zip(rules, m.tie_counts)),
        "disagreement_exemplars": m.exemplars,
    }
    plots = {"exemplars": [_flat_exemplar(e) for e in m.exemplars]} if m.exemplars else {}
    cfg = _config(args, rules=rules)
    return Report(args.command, cfg, rows, sections=sections, plots=plots), status


def _flat_exemplar(e: dict) -> dict:
    out = {k: e[k] for k in ("x", "y", "z", "true_source")}
    out.update({f"verdict.{k}": v for k, v in e["verdicts"].items()})
    return out


def cmd_conjecture_scan(args) -> tuple[Report, int]:
    if args.scenario:
        scenarios = [load_scenario(args.scenario)]
    else:
        try:
            scenarios = get_sweep(args.sweep)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    tol = args.tolerance or 1e-10
    rows, status = [], EXIT_OK
    violations = 0
    for k, s in enumerate(scenarios):
        res = conjecture_integral(s, epsabs=tol)
        mc = mc_success_probability(s, "nearest_neighbor", args.n, args.seed + k, args.tie_policy, args.threads)
        diff = mc.value - 0.5
        mc_resolved = abs(diff) > 3.0 * mc.std_error
        consistent = not (res.resolved and mc_resolved) or (np.sign(res.integral_value) == np.sign(diff))
        if not consistent:
            status = EXIT_DISAGREE
            log.error("sign mismatch for %s vs %s", s.fx.to_text(), s.fz.to_text())
        if res.sign_violation:
            violations += 1
            log.warning("negative integral for %s vs %s: %r", s.fx.to_text(), s.fz.to_text(), res.integral_value)
        row = res.to_dict()
        row.update(
            {
                "mc_success": mc.value,
                "mc_std_error": mc.std_error,
                "mc_minus_half": diff,
                "sign_consistent": bool(consistent),
            }
        )
        rows.append(row)
    if status == EXIT_OK and violations:
        status = EXIT_SIGN_VIOLATION
    cfg = _config(args, sweep=None if args.scenario else args.sweep, tolerance=tol)
    return Report(args.command, cfg, rows, sections={"sign_violations": violations}), status


def cmd_simulate(args) -> tuple[Report, int]:
    s = _scenario_or_default(args)
    rules = _rule_list(args.rules)
    specs = [resolve_rule(r) for r in rules]
    names = {1: "FromX", -1: "FromZ", 0: "Tie"}
    rows = []
    n_chunks = (args.n + CHUNK_SIZE - 1) // CHUNK_SIZE
    for i in range(n_chunks):
        m = min(CHUNK_SIZE, args.n - i * CHUNK_SIZE)
        batch = sample_triples(s, m, chunk_rng(args.seed, _STREAM_TRIPLES, i))
        v = [verdicts(sp, batch, s) for sp in specs]
        for j in range(m):
            row = {
                "x": float(batch.x[j]),
                "y": float(batch.y[j]),
                "z": float(batch.z[j]),
                "true_source": "FromX" if batch.from_x[j] else "FromZ",
            }
            row.update({r: names[int(v[a][j])] for a, r in enumerate(rules)})
            rows.append(row)
    sections = {"scenario": {"fx": s.fx.to_text(), "fz": s.fz.to_text()}}
    return Report(args.command, _config(args, rules=rules), rows, sections=sections), EXIT_OK


def cmd_owen_table(args) -> tuple[Report, int]:
    tol = args.tolerance or 1e-12
    rows, status = [], EXIT_OK
    hs = [round(0.25 * i, 2) for i in range(0, 17)]
    as_ = [0.0, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 100.0]
    for h in hs:
        for a in as_:
            t = owen_t(h, a)
            ref = float(sp_special.owens_t(h, a))
            diff = abs(t - ref)
            if diff > tol:
                status = EXIT_DISAGREE
            rows.append({"h": h, "a": a, "T": t, "reference": ref, "abs_diff": diff})
    return Report(args.command, {"tolerance": tol}, rows), status


COMMANDS = {
    "verify-theorem1": cmd_verify_theorem1,
    "verify-theorem2": cmd_verify_theorem2,
    "compare-rules": cmd_compare_rules,
    "conjecture-scan": cmd_conjecture_scan,
    "simulate": cmd_simulate,
    "owen-table": cmd_owen_table,
}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits on --help and on usage errors; hand the code back
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(levelname)s: %(message)s")
    try:
        report, status = COMMANDS[args.command](args)
    except (UsageError, ScenarioParseError) as exc:
        print(f"nnmix {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuadratureError as exc:
        print(f"nnmix {args.command}: quadrature failure: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE
    try:
        write_report(report, args.output_format, args.output)
    except OSError as exc:
        print(f"nnmix {args.command}: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return status


def main() -> None:
    sys.exit(run())


def estimates_from_row(row: dict) -> dict[str, Estimate]:
    """Pull every nested Estimate back out of a JSON report row."""
    return {k: Estimate.from_dict(v) for k, v in row.items() if isinstance(v, dict) and v.get("method") in {m.value for m in Method}}


def conjecture_results(obj: dict) -> list[ConjectureResult]:
    return [ConjectureResult.from_dict(r) for r in obj["rows"]]
