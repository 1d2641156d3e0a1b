"""Command-line front end: generation, IO, bound evaluation and campaigns.

Every command emits one JSON object per line with keys ``cmd``, ``params``,
``result`` and ``versions``; floats are serialized with 17 significant
digits, so identical argv (and master seed) reproduce identical bytes.
Wall-clock timings go to stderr, never into records.
"""

from __future__ import annotations

import argparse
import json
import math
import secrets
import sys
import time
from dataclasses import asdict

import numpy as np
import scipy

from . import __version__, bounds, extensions, generators, hgr, montecarlo, oracle, percolation
from .core import BudgetError, InfeasibleError, degree_profile, stats_of
from .rng import TrialStream


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _dump(obj) -> str:
    """Deterministic JSON with 17-significant-digit floats and sorted keys."""
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError("non-finite value in output record")
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        inner = ",".join(f"{json.dumps(str(k))}:{_dump(v)}" for k, v in sorted(obj.items()))
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(_dump(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _versions() -> dict:
    return {"hypertail": __version__, "numpy": np.__version__, "scipy": scipy.__version__}


def _record(cmd: str, params: dict, result) -> dict:
    return {"cmd": cmd, "params": params, "result": result, "versions": _versions()}


def _load_config(path) -> dict:
    config = {}
    if path is None:
        return config
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"config line {line!r} is not key=value")
            key, value = line.split("=", 1)
            config[key.strip()] = value.strip()
    return config


def _fill(args, config, key, cast):
    if getattr(args, key, None) is None and key in config:
        setattr(args, key, cast(config[key]))


def _resolve_seed(args, config) -> tuple[int, bool]:
    seed = getattr(args, "seed", None)
    if seed is None and "seed" in config:
        seed = config["seed"]
    if seed is None:
        raise UsageError("stochastic command requires --seed (use '--seed auto' to draw one)")
    if seed == "auto":
        return secrets.randbits(63), True
    try:
        return int(seed), False
    except ValueError as exc:
        raise UsageError(f"--seed must be an integer or 'auto', got {seed!r}") from exc


def _floats(text: str) -> list[float]:
    values = [float(tok) for tok in text.split(",") if tok]
    if not values:
        raise UsageError("expected a comma-separated list of numbers")
    return values


def _graph_spec(args) -> generators.GraphSpec:
    if args.family == "complete":
        if args.r is None:
            raise UsageError("--family complete requires --r")
        return generators.complete(args.r)
    if args.family == "complete-bipartite":
        if args.a is None or args.b is None:
            raise UsageError("--family complete-bipartite requires --a and --b")
        return generators.complete_bipartite(args.a, args.b)
    raise UsageError(f"unsupported pattern family {args.family!r}")


def _trial_config(args, seed) -> montecarlo.TrialConfig:
    return montecarlo.TrialConfig(
        master_seed=seed,
        trials=args.trials,
        significance=args.significance,
        workers=args.workers,
    )


def _tail_dict(est: montecarlo.TailEstimate) -> dict:
    return {
        "threshold": est.threshold,
        "exceed_count": est.exceed_count,
        "trials": est.trials,
        "point_estimate": est.point_estimate,
        "ci_low": est.ci_low,
        "ci_high": est.ci_high,
        "significance": est.significance,
    }


def _nice_dict(report: bounds.NicenessReport) -> dict:
    out = {
        "p1": {
            "holds": report.p1.holds,
            "p": report.p1.p,
            "p_max": report.p1.p_max,
            "k": report.p1.k,
            "k_min": report.p1.k_min,
            "n": report.p1.n,
            "n0": report.p1.n0,
        },
        "p2": {"holds": report.p2.holds, "lhs": report.p2.lhs, "rhs": report.p2.rhs},
        "p3": {"holds": report.p3.holds, "lhs": report.p3.lhs, "rhs": report.p3.rhs},
        "p4": {"status": report.p4_status},
        "analytic_ok": report.analytic_ok,
    }
    if report.p4_evidence is not None:
        ev = report.p4_evidence
        out["p4"]["threshold"] = ev.threshold
        out["p4"]["supported"] = ev.supported
        out["p4"]["grid"] = [
            {
                "q": pt.q,
                "trials": pt.trials,
                "violations": pt.violations,
                "ci_high": pt.ci_high,
                "trigger": pt.trigger,
                "supported": pt.supported,
            }
            for pt in ev.points
        ]
    return out


def _cmd_gen(args, config, stdout):
    _fill(args, config, "budget", int)
    budget = args.budget or generators.DEFAULT_ENUMERATION_BUDGET
    params = {"family": args.family, "budget": budget}
    if args.family in ("complete", "complete-bipartite"):
        spec = _graph_spec(args)
        if args.N is None:
            raise UsageError("pattern families require --N")
        H = generators.subgraph_hypergraph(spec, args.N, budget=budget)
        params.update(N=args.N, pattern=spec.label)
    elif args.family == "disjoint":
        if args.m is None or args.k is None:
            raise UsageError("--family disjoint requires --m and --k")
        H = generators.disjoint_edges(args.m, args.k)
        params.update(m=args.m, k=args.k)
    elif args.family == "random":
        if args.n is None or args.m is None or args.k is None:
            raise UsageError("--family random requires --n, --m and --k")
        seed, auto = _resolve_seed(args, config)
        H = generators.random_uniform(args.n, args.m, args.k, seed=seed, budget=min(budget, 10**6))
        params.update(n=args.n, m=args.m, k=args.k, seed=seed, seed_auto=auto)
    else:
        raise UsageError(f"unknown family {args.family!r}")
    if args.out:
        hgr.write_hgr(H, args.out)
        result = {"path": args.out, "k": H.k, "n": H.n, "m": H.m}
        return [_record("gen", params, result)], None
    return [], hgr.dumps(H)


def _cmd_stats(args, config, stdout):
    H = hgr.read_hgr(args.infile)
    profile = degree_profile(H)
    result = {
        "n": H.n,
        "m": H.m,
        "k": H.k,
        "max_degree": profile.max_degree,
        "min_degree": profile.min_degree,
        "max_codegree": profile.max_codegree,
        "degree_sum": int(profile.deg.sum()),
    }
    return [_record("stats", {"in": args.infile}, result)], None


def _niceness_params(args) -> bounds.NicenessParams:
    return bounds.NicenessParams(
        p=args.p,
        lam=args.lam,
        gamma_cap=args.gamma,
        b=args.b,
        b_k=args.bk,
        n0=args.n0,
    )


def _cmd_nice(args, config, stdout):
    H = hgr.read_hgr(args.infile)
    stats = stats_of(H)
    params = _niceness_params(args)
    evidence = None
    record_params = {
        "in": args.infile,
        "p": args.p,
        "lambda": args.lam,
        "gamma": args.gamma,
        "b": args.b,
        "bk": args.bk,
        "n0": args.n0,
    }
    if args.p4_grid:
        seed, auto = _resolve_seed(args, config)
        cfg = _trial_config(args, seed)
        grid = _floats(args.p4_grid)
        evidence = montecarlo.verify_p4(H, params, grid, cfg)
        record_params.update(
            p4_grid=grid, seed=seed, seed_auto=auto, trials=args.trials, workers=args.workers
        )
    report = bounds.check_nice(stats, params, p4_evidence=evidence)
    return [_record("nice", record_params, _nice_dict(report))], None


def _cmd_bound(args, config, stdout):
    H = hgr.read_hgr(args.infile)
    stats = stats_of(H)
    params = _niceness_params(args)
    mb = bounds.main_bound(stats, params)
    result = {
        "gamma1": mb.gamma1,
        "gamma2": mb.gamma2,
        "gamma1_terms": list(mb.gamma1_terms),
        "gamma2_terms": list(mb.gamma2_terms),
        "window": mb.window,
        "prob_bound_raw": mb.prob_bound_raw,
        "prob_bound": mb.prob_bound,
        "vacuous": mb.vacuous,
    }
    record_params = {
        "in": args.infile,
        "p": args.p,
        "lambda": args.lam,
        "gamma": args.gamma,
        "b": args.b,
        "bk": args.bk,
        "n0": args.n0,
    }
    return [_record("bound", record_params, result)], None


def _cmd_regime(args, config, stdout):
    spec = _graph_spec(args)
    reg = bounds.regime(spec, args.N, args.c1)
    result = {
        "pattern": spec.label,
        "rho1": reg.rho1,
        "rho2": reg.rho2,
        "c1": reg.c1,
        "c2": reg.c2,
        "p_range": list(reg.p_range),
        "p_range_empty": reg.p_range_empty,
        "lambda_range": list(reg.lambda_range),
    }
    params = {"family": args.family, "N": args.N, "c1": args.c1, "pattern": spec.label}
    return [_record("regime", params, result)], None


def _cmd_oracle(args, config, stdout):
    _fill(args, config, "budget", int)
    H = hgr.read_hgr(args.infile)
    pair_budget = args.budget or oracle.DEFAULT_PAIR_BUDGET
    result = {
        "expectation": oracle.exact_expectation(H, args.p),
        "variance": oracle.exact_variance(H, args.p, pair_budget=pair_budget),
    }
    if args.dist:
        limit = args.budget or oracle.DEFAULT_ENUMERATION_LIMIT
        dist = oracle.exact_distribution(H, args.p, limit=limit)
        result["distribution"] = [[x, dist.probabilities[x]] for x in sorted(dist.probabilities)]
        result["distribution_mean"] = dist.mean()
        result["distribution_variance"] = dist.variance()
    params = {"in": args.infile, "p": args.p, "dist": bool(args.dist)}
    return [_record("oracle", params, result)], None


def _cmd_mcdiarmid(args, config, stdout):
    coeffs = _floats(args.lipschitz)
    value = bounds.mcdiarmid(args.t, coeffs)
    params = {"t": args.t, "lipschitz": coeffs}
    return [_record("mcdiarmid", params, {"bound": value})], None


def _schedule_from_args(args, n: int) -> percolation.ExposureSchedule:
    eps_range = tuple(_floats(args.eps_range)) if args.eps_range else None
    if eps_range is not None and len(eps_range) != 2:
        raise UsageError("--eps-range expects 'lo,hi'")
    return percolation.build_schedule(
        args.p, n, eps_range=eps_range, strict_mode=args.strict_mode, force_rounds=args.force_rounds
    )


def _cmd_expose(args, config, stdout):
    H = hgr.read_hgr(args.infile)
    profile = degree_profile(H)
    schedule = _schedule_from_args(args, H.n)
    seed, auto = _resolve_seed(args, config)
    rounds = schedule.rounds
    sums_x = np.zeros(rounds + 1)
    sums_x2 = np.zeros(rounds + 1)
    sums_y = np.zeros(rounds + 1)
    holds = np.zeros((rounds + 1, 4), dtype=np.int64)
    trigger = [False] * (rounds + 1)
    for t in range(args.trials):
        states = percolation.run_exposure(
            H, schedule, TrialStream(seed, t, montecarlo.LANE_EXPOSURE), profile
        )
        for state in states:
            i = state.index
            sums_x[i] += state.edge_count
            sums_x2[i] += state.edge_count**2
            sums_y[i] += state.deg_sq_sum
            trigger[i] = state.codeg_trigger
            report = percolation.check_preconditions(
                H, state, schedule, args.lam, args.gamma, profile
            )
            holds[i] += np.array(report.holds, dtype=np.int64)
    per_round = []
    for i in range(rounds + 1):
        mean_x = sums_x[i] / args.trials
        per_round.append(
            {
                "round": i,
                "mean_edge_count": mean_x,
                "var_edge_count": sums_x2[i] / args.trials - mean_x**2,
                "mean_deg_sq_sum": sums_y[i] / args.trials,
                "codeg_trigger": trigger[i],
                "holds_counts": holds[i].tolist(),
            }
        )
    params = {
        "in": args.infile,
        "p": args.p,
        "epsilon": schedule.epsilon,
        "rounds": schedule.rounds,
        "strict_mode": schedule.strict_mode,
        "lambda": args.lam,
        "gamma": args.gamma,
        "trials": args.trials,
        "seed": seed,
        "seed_auto": auto,
    }
    return [_record("expose", params, {"per_round": per_round})], None


def _cmd_simulate(args, config, stdout):
    H = hgr.read_hgr(args.infile)
    seed, auto = _resolve_seed(args, config)
    cfg = _trial_config(args, seed)
    base_params = {
        "in": args.infile,
        "task": args.task,
        "p": args.p,
        "trials": args.trials,
        "workers": args.workers,
        "significance": args.significance,
        "seed": seed,
        "seed_auto": auto,
    }
    if args.task == "tail":
        if not args.thresholds:
            raise UsageError("--task tail requires --thresholds")
        thresholds = _floats(args.thresholds)
        estimates = montecarlo.estimate_tail(H, args.p, thresholds, cfg)
        result = {"center": oracle.exact_expectation(H, args.p)}
        result["estimates"] = [_tail_dict(est) for est in estimates]
        base_params["thresholds"] = thresholds
        return [_record("simulate", base_params, result)], None
    if args.task == "p4":
        params = _niceness_params(args)
        grid = _floats(args.p4_grid) if args.p4_grid else list(
            montecarlo.geometric_q_grid(args.p)
        )
        evidence = montecarlo.verify_p4(H, params, grid, cfg)
        base_params.update(
            p4_grid=grid, **{"lambda": args.lam, "gamma": args.gamma, "b": args.b, "bk": args.bk}
        )
        result = {
            "threshold": evidence.threshold,
            "supported": evidence.supported,
            "grid": [
                {
                    "q": pt.q,
                    "trials": pt.trials,
                    "deg_cap": pt.deg_cap,
                    "trigger": pt.trigger,
                    "deg_violations": pt.deg_violations,
                    "codeg_violations": pt.codeg_violations,
                    "violations": pt.violations,
                    "point_estimate": pt.point_estimate,
                    "ci_low": pt.ci_low,
                    "ci_high": pt.ci_high,
                    "max_deg_seen": pt.max_deg_seen,
                    "max_codeg_seen": pt.max_codeg_seen,
                    "supported": pt.supported,
                }
                for pt in evidence.points
            ],
        }
        return [_record("simulate", base_params, result)], None
    if args.task == "subgaussian":
        if not args.lambdas:
            raise UsageError("--task subgaussian requires --lambdas")
        lambdas = _floats(args.lambdas)
        fit = montecarlo.fit_subgaussian(
            H, args.p, lambdas, args.variance_source, cfg, pair_budget=args.budget
        )
        base_params.update(lambdas=lambdas, variance_source=args.variance_source)
        result = {
            "variance": fit.variance,
            "variance_assumed": fit.variance_assumed,
            "c_g": fit.c_g,
            "c_g_candidates": list(fit.c_g_candidates),
            "c_g_lower_bounds": list(fit.c_g_lower_bounds),
            "feasible": fit.feasible,
            "estimates": [_tail_dict(est) for est in fit.estimates],
        }
        return [_record("simulate", base_params, result)], None
    if args.task == "deg-moment":
        schedule = _schedule_from_args(args, H.n)
        if not 0 <= args.round <= schedule.rounds:
            raise UsageError(f"--round must lie in [0, {schedule.rounds}]")
        states = percolation.run_exposure(
            H, schedule, TrialStream(seed, 0, montecarlo.LANE_EXPOSURE)
        )
        state = states[args.round]
        report = montecarlo.check_degree_moment(
            H, state, schedule, cfg, vertices=args.vertices, continuations=args.continuations
        )
        base_params.update(round=args.round, continuations=args.continuations)
        result = {
            "epsilon": report.epsilon,
            "eta": report.eta,
            "holds": report.holds,
            "entries": [asdict(e) for e in report.entries],
        }
        return [_record("simulate", base_params, result)], None
    if args.task == "deg-square-sum":
        schedule = _schedule_from_args(args, H.n)
        report = montecarlo.check_degree_square_sum(H, schedule, args.lam, args.gamma, cfg)
        base_params.update(**{"lambda": args.lam, "gamma": args.gamma})
        result = {"holds": report.holds, "entries": [asdict(e) for e in report.entries]}
        return [_record("simulate", base_params, result)], None
    raise UsageError(f"unknown simulate task {args.task!r}")


def _cmd_ext(args, config, stdout):
    spec = _graph_spec(args)
    base_params = {"family": args.family, "pattern": spec.label, "task": args.task}
    if args.task == "balanced":
        rg = extensions.build_rooted(spec, args.roots)
        result = {
            "roots": args.roots,
            "s": rg.s,
            "t": rg.t,
            "density": rg.density,
            "balanced": extensions.is_balanced(rg),
        }
        base_params["roots"] = args.roots
        return [_record("ext", base_params, result)], None
    if args.task == "expected":
        if args.N is None or args.q is None:
            raise UsageError("--task expected requires --N and --q")
        value = extensions.expected_extensions(spec, args.roots, args.N, args.q)
        base_params.update(roots=args.roots, N=args.N, q=args.q)
        return [_record("ext", base_params, {"expected_extensions": value})], None
    if args.N is None or args.q is None:
        raise UsageError(f"--task {args.task} requires --N and --q")
    seed, auto = _resolve_seed(args, config)
    cfg = _trial_config(args, seed)
    base_params.update(
        N=args.N, q=args.q, trials=args.trials, seed=seed, seed_auto=auto, workers=args.workers
    )
    if args.task == "zcheck":
        report = extensions.z_identity_check(
            spec, args.N, args.q, cfg, conditioned_target=args.conditioned
        )
        result = asdict(report)
        return [_record("ext", base_params, result)], None
    if args.task == "caps":
        if args.p is None:
            raise UsageError("--task caps requires --p")
        params = _niceness_params(args)
        report = extensions.extension_cap_check(spec, args.N, args.p, args.q, params, cfg)
        base_params.update(p=args.p, **{"lambda": args.lam, "gamma": args.gamma, "b": args.b})
        result = asdict(report)
        result["z1_ci"] = list(report.z1_ci)
        result["z2_ci"] = list(report.z2_ci) if report.z2_ci else None
        return [_record("ext", base_params, result)], None
    raise UsageError(f"unknown ext task {args.task!r}")


def _add_pattern_flags(parser):
    parser.add_argument("--family", required=True)
    parser.add_argument("--r", type=int)
    parser.add_argument("--a", type=int)
    parser.add_argument("--b-side", dest="b", type=int)
    parser.add_argument("--N", type=int)


def _add_niceness_flags(parser):
    parser.add_argument("--p", type=float, required=True)
    parser.add_argument("--lambda", dest="lam", type=float, required=True)
    parser.add_argument("--gamma", type=float, required=True)
    parser.add_argument("--b", type=float, required=True)
    parser.add_argument("--bk", type=float, default=bounds.DEFAULT_B_K)
    parser.add_argument("--n0", type=int, default=bounds.DEFAULT_N0)


def build_parser() -> _Parser:
    parser = _Parser(prog="hypertail")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out")
    common.add_argument("--config")
    common.add_argument("--budget", type=int)

    stoch = argparse.ArgumentParser(add_help=False)
    stoch.add_argument("--seed")
    stoch.add_argument("--trials", type=int, default=1000)
    stoch.add_argument("--workers", type=int, default=1)
    stoch.add_argument("--significance", type=float, default=0.01)

    p = sub.add_parser("gen", parents=[common, stoch])
    p.add_argument("--family", required=True)
    p.add_argument("--r", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--b-side", dest="b", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=int)
    p.set_defaults(handler=_cmd_gen)

    p = sub.add_parser("stats", parents=[common])
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(handler=_cmd_stats)

    p = sub.add_parser("nice", parents=[common, stoch])
    p.add_argument("--in", dest="infile", required=True)
    _add_niceness_flags(p)
    p.add_argument("--p4-grid")
    p.set_defaults(handler=_cmd_nice)

    p = sub.add_parser("bound", parents=[common])
    p.add_argument("--in", dest="infile", required=True)
    _add_niceness_flags(p)
    p.set_defaults(handler=_cmd_bound)

    p = sub.add_parser("regime", parents=[common])
    _add_pattern_flags(p)
    p.add_argument("--c1", type=float, required=True)
    p.set_defaults(handler=_cmd_regime)

    p = sub.add_parser("oracle", parents=[common])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--dist", action="store_true")
    p.set_defaults(handler=_cmd_oracle)

    p = sub.add_parser("simulate", parents=[common, stoch])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--task", default="tail")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--thresholds")
    p.add_argument("--lambdas")
    p.add_argument("--variance-source", default="exact")
    p.add_argument("--p4-grid")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--bk", type=float, default=bounds.DEFAULT_B_K)
    p.add_argument("--n0", type=int, default=bounds.DEFAULT_N0)
    p.add_argument("--eps-range")
    p.add_argument("--strict", dest="strict_mode", action="store_true")
    p.add_argument("--force-rounds", type=int)
    p.add_argument("--round", type=int, default=0)
    p.add_argument("--vertices", type=int, default=20)
    p.add_argument("--continuations", type=int, default=10_000)
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("expose", parents=[common, stoch])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--eps-range")
    p.add_argument("--strict", dest="strict_mode", action="store_true")
    p.add_argument("--force-rounds", type=int)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.set_defaults(handler=_cmd_expose)

    p = sub.add_parser("ext", parents=[common, stoch])
    _add_pattern_flags(p)
    p.add_argument("--task", required=True)
    p.add_argument("--roots", type=int, default=2)
    p.add_argument("--q", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--bk", type=float, default=bounds.DEFAULT_B_K)
    p.add_argument("--n0", type=int, default=bounds.DEFAULT_N0)
    p.add_argument("--conditioned", type=int)
    p.set_defaults(handler=_cmd_ext)

    p = sub.add_parser("mcdiarmid", parents=[common])
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--lipschitz", required=True)
    p.set_defaults(handler=_cmd_mcdiarmid)

    return parser


def dispatch(argv=None, stdout=None, stderr=None) -> int:
    """Parse argv, run the subcommand, emit records; returns the exit code."""
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    started = time.perf_counter()
    try:
        args = parser.parse_args(argv)
        config = _load_config(getattr(args, "config", None))
        for key, cast in (("trials", int), ("workers", int), ("budget", int)):
            if hasattr(args, key):
                _fill(args, config, key, cast)
        records, raw = args.handler(args, config, stdout)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    except (BudgetError, InfeasibleError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    lines = [_dump(record) for record in records]
    out_path = getattr(args, "out", None)
    if raw is not None:
        stdout.write(raw)
    if lines:
        if out_path and args.command != "gen":
            with open(out_path, "w", newline="\n") as fh:
                fh.write("\n".join(lines) + "\n")
        else:
            for line in lines:
                stdout.write(line + "\n")
    elapsed = time.perf_counter() - started
    print(f"# {args.command} finished in {elapsed:.3f}s", file=stderr)
    return 0


def main() -> None:
    sys.exit(dispatch())
