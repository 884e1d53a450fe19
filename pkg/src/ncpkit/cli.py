"""Command-line entry point: ``ncpkit <subcommand> [options]``.

Exit codes: 0 success, 2 usage error, 3 malformed input, 4 infeasible
parameters, 5 any other failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import time
import warnings

from .graph import GraphError, read_edgelist, write_edgelist
from .ncp import METHODS, NCP_COLUMNS, CoverageBudget, format_value, global_ncp, local_ncp, write_csv

EXIT_USAGE, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_OTHER = 2, 3, 4, 5
STATS_COLUMNS = ("n", "m", "mean_strength", "lambda2", "mean_clustering")
CRP_COLUMNS = ("size", "conductance", "internal_conductance", "ratio")


class UsageError(Exception):
    pass


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list of numbers, got {text!r}") from None


def _emit(columns, rows, output) -> int:
    if output:
        return write_csv(output, columns, rows)
    sys.stdout.write(",".join(columns) + "\n")
    for row in rows:
        sys.stdout.write(",".join(format_value(row[c]) for c in columns) + "\n")
    return len(rows)


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("NCPKIT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"NCPKIT_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _methods(name: str) -> tuple:
    return METHODS if name == "all" else (name,)


def _load(args):
    return read_edgelist(args.input, lcc=args.lcc)


def _budget(args) -> CoverageBudget:
    return CoverageBudget(
        min_coverage=math.inf if args.all_seeds else args.min_coverage,
        max_seeds=args.max_seeds,
        rng_seed=args.seed,
        eps_count=args.eps_count,
        alpha_count=args.alpha_count,
        alpha_tilde=args.alpha_tilde,
        epsilons=tuple(args.epsilons) if args.epsilons else None,
        gammas=tuple(args.gammas) if args.gammas else None,
    )


def _global(args, g):
    return global_ncp(
        g, _methods(args.method), _budget(args),
        connected_only=not args.allow_disconnected,
        degree_normalized=args.degree_normalized,
        volume_cap=args.volume_cap,
        lengths=args.lengths,
        threads=_threads(args),
    )


# -- subcommands -------------------------------------------------------------


def cmd_stats(args) -> int:
    from .quality import lambda2, mean_clustering

    g = _load(args)
    row = {"n": g.n, "m": g.m, "mean_strength": float(g.strength.mean()),
           "lambda2": lambda2(g), "mean_clustering": mean_clustering(g)}
    return _emit(STATS_COLUMNS, [row], args.output)


def cmd_ncp(args) -> int:
    g = _load(args)
    curve = _global(args, g)
    return _emit(NCP_COLUMNS, curve.rows(with_internal=not args.no_internal, mode=args.internal_mode), args.output)


def cmd_crp(args) -> int:
    g = _load(args)
    curve = _global(args, g)
    rows = [r for r in curve.rows(with_internal=True, mode=args.internal_mode) if not math.isnan(r["ratio"])]
    return _emit(CRP_COLUMNS, rows, args.output)


def cmd_local_ncp(args) -> int:
    g = _load(args)
    try:
        label = int(args.seed_node)
    except ValueError:
        label = args.seed_node
    seed = g.index_of(label)
    curve = local_ncp(
        g, args.method, seed, args.params,
        connected_only=args.connected_only,
        degree_normalized=args.degree_normalized,
        volume_cap=args.volume_cap,
        lengths=args.lengths,
        alpha_tilde=args.alpha_tilde,
    )
    return _emit(NCP_COLUMNS, curve.rows(with_internal=not args.no_internal, mode=args.internal_mode), args.output)


def cmd_compare(args) -> int:
    from .compare import COMPARE_COLUMNS, compare_methods

    g = _load(args)
    grid = compare_methods(g, None, args.epsilons, args.alphas, n_seeds=args.n_seeds,
                           rng_seed=args.seed, rerank=not args.no_rerank, lengths=args.lengths)
    return _emit(COMPARE_COLUMNS, grid.rows(), args.output)


def cmd_association(args) -> int:
    from .association import (
        accumulate,
        order_nodes,
        reweight_graph,
        sample_communities,
        write_coordinates,
        write_permutation,
    )

    g = _load(args)
    samples = sample_communities(g, args.method, args.param, n_samples=args.samples, volume_cap=args.volume_cap,
                                 rng_seed=args.seed, connected_only=not args.allow_disconnected, lengths=args.lengths)
    a = accumulate(samples, g.n)
    rows = write_coordinates(a, args.output, g)
    if args.order_output:
        write_permutation(order_nodes(a), args.order_output, g)
    if args.reweighted_output:
        write_edgelist(reweight_graph(g, a, mean_threshold=args.mean_threshold), args.reweighted_output)
    return rows


def cmd_generate_lfr(args) -> int:
    from dataclasses import replace

    from .lfr import LfrParams, generate_lfr, preset

    if args.preset:
        p = preset(args.preset, n=args.n, mu=args.mu, rng_seed=args.seed)
    else:
        missing = [k for k in ("k_mean", "k_max", "c_min", "c_max") if getattr(args, k) is None]
        if missing:
            raise UsageError("without --preset, give " + ", ".join("--" + k.replace("_", "-") for k in missing))
        p = LfrParams(n=args.n, k_mean=args.k_mean, k_max=args.k_max, mu=args.mu, c_min=args.c_min,
                      c_max=args.c_max, rng_seed=args.seed)
    overrides = {k: getattr(args, k) for k in ("k_mean", "k_max", "c_min", "c_max", "tau1", "tau2")
                 if getattr(args, k) is not None}
    p = replace(p, **overrides)
    g, part = generate_lfr(p, clamp_degrees=not args.no_clamp)
    write_edgelist(g, args.output)
    if args.communities:
        part.write(args.communities, g)
    return g.m


def cmd_ingest_votes(args) -> int:
    from .ingest import build_supra, read_vote_csv, write_node_index

    spec = read_vote_csv(args.input, omega=args.omega)
    g = build_supra(spec)
    write_edgelist(g, args.output)
    if args.node_map:
        write_node_index(spec, args.node_map)
    return g.m


# -- parser ------------------------------------------------------------------


def _common(p, *, graph_input=True):
    p.add_argument("--config", help="file of 'key = value' lines; command-line flags take precedence")
    p.add_argument("--output", "-o", help="output path (default: stdout where applicable)")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: $NCPKIT_THREADS or all cores)")
    p.add_argument("--verbose", "-v", action="store_true")
    if graph_input:
        p.add_argument("--input", "-i", required=True, help="edge list: 'u v [w]' per line")
        p.add_argument("--lcc", action="store_true", help="keep only the largest connected component")


def _sweep_options(p):
    p.add_argument("--degree-normalized", action="store_true", help="sweep over score / strength")
    p.add_argument("--volume-cap", type=float)
    p.add_argument("--lengths", choices=("inverse_weight", "unit"), default="inverse_weight")
    p.add_argument("--alpha-tilde", type=float, default=0.001)
    p.add_argument("--internal-mode", choices=("auto", "exact", "spectral"), default="auto")
    p.add_argument("--no-internal", action="store_true", help="skip internal conductance columns")


def _ncp_options(p):
    p.add_argument("--method", choices=(*METHODS, "all"), default="aclcut")
    p.add_argument("--eps-count", type=int, default=20)
    p.add_argument("--alpha-count", type=int, default=20)
    p.add_argument("--epsilons", type=_float_list)
    p.add_argument("--gammas", type=_float_list)
    p.add_argument("--min-coverage", type=float, default=10)
    p.add_argument("--all-seeds", action="store_true", help="use every node as a seed for every parameter")
    p.add_argument("--max-seeds", type=int)
    p.add_argument("--allow-disconnected", action="store_true", help="admit disconnected sweep sets")
    _sweep_options(p)


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(prog="ncpkit", description="Network community profiles and related tools.")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = subs["stats"] = sub.add_parser("stats", help="n, m, mean strength, lambda_2, mean clustering")
    _common(p)
    p.set_defaults(func=cmd_stats)

    for name, func, help_ in (("ncp", cmd_ncp, "global network community profile"),
                              ("crp", cmd_crp, "conductance ratio profile")):
        p = subs[name] = sub.add_parser(name, help=help_)
        _common(p)
        _ncp_options(p)
        p.set_defaults(func=func)

    p = subs["local-ncp"] = sub.add_parser("local-ncp", help="NCP of a single seed over a parameter grid")
    _common(p)
    p.add_argument("--method", choices=METHODS, default="aclcut")
    p.add_argument("--seed-node", required=True, help="seed node label")
    p.add_argument("--params", type=_float_list, help="epsilon (aclcut) or gamma (movcut) values")
    p.add_argument("--connected-only", action="store_true", help="drop disconnected sweep sets")
    _sweep_options(p)
    p.set_defaults(func=cmd_local_ncp)

    p = subs["compare-methods"] = sub.add_parser("compare-methods", help="Spearman agreement grid")
    _common(p)
    p.add_argument("--epsilons", type=_float_list, default=[1e-3, 1e-4, 1e-5, 1e-6])
    p.add_argument("--alphas", type=_float_list, default=[0.6, 0.7, 0.8, 0.9, 0.99])
    p.add_argument("--n-seeds", type=int, default=50)
    p.add_argument("--no-rerank", action="store_true", help="rank over all nodes before restricting")
    p.add_argument("--lengths", choices=("inverse_weight", "unit"), default="inverse_weight")
    p.set_defaults(func=cmd_compare)

    p = subs["association"] = sub.add_parser("association", help="association matrix of sampled communities")
    _common(p)
    p.add_argument("--method", choices=METHODS, default="movcut")
    p.add_argument("--param", type=float, help="epsilon (aclcut) or gamma (movcut)")
    p.add_argument("--samples", type=int, help="number of seeds (default: all nodes)")
    p.add_argument("--volume-cap", type=float)
    p.add_argument("--allow-disconnected", action="store_true")
    p.add_argument("--lengths", choices=("inverse_weight", "unit"), default="inverse_weight")
    p.add_argument("--order-output", help="write the node ordering here")
    p.add_argument("--reweighted-output", help="write the association-weighted edge list here")
    p.add_argument("--mean-threshold", action="store_true", help="keep only above-mean reweighted edges")
    p.set_defaults(func=cmd_association, output_required=True)

    p = subs["generate-lfr"] = sub.add_parser("generate-lfr", help="LFR benchmark graph")
    _common(p, graph_input=False)
    p.add_argument("--preset", choices=("fig17a", "fig17b", "fig17c"))
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--mu", type=float, default=0.1)
    p.add_argument("--k-mean", type=float)
    p.add_argument("--k-max", type=int)
    p.add_argument("--tau1", type=float)
    p.add_argument("--tau2", type=float)
    p.add_argument("--c-min", type=int)
    p.add_argument("--c-max", type=int)
    p.add_argument("--no-clamp", action="store_true", help="reject instead of capping an infeasible k_max")
    p.add_argument("--communities", help="write 'node community' lines here")
    p.set_defaults(func=cmd_generate_lfr, output_required=True)

    p = subs["ingest-votes"] = sub.add_parser("ingest-votes", help="supra-graph from a vote CSV")
    _common(p)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--node-map", help="write 'node layer actor' lines here")
    p.set_defaults(func=cmd_ingest_votes, output_required=True)
    return parser, subs


def _read_config(path: str) -> dict:
    out = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise GraphError(f"cannot read config {path}: {exc}") from None
    with fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _apply_config(subparser: argparse.ArgumentParser, config: dict) -> None:
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, text in config.items():
        action = actions.get(key)
        if action is None or key in ("help", "config"):
            raise UsageError(f"unknown config key {key!r}")
        if action.nargs == 0:
            low = text.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise UsageError(f"config key {key!r} expects a boolean, got {text!r}")
            defaults[key] = low in ("true", "1", "yes")
            continue
        try:
            value = action.type(text) if action.type else text
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise UsageError(f"config key {key!r}: {exc}") from None
        if action.choices is not None and value not in action.choices:
            raise UsageError(f"config key {key!r} must be one of {list(action.choices)}")
        defaults[key] = value
    subparser.set_defaults(**defaults)
    for action in subparser._actions:
        if action.dest in defaults:
            action.required = False


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    # config values become parser defaults, so they must be known before parsing
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config")
    early, _ = pre.parse_known_args(argv)
    try:
        if early.config and early.command in subs:
            _apply_config(subs[early.command], _read_config(early.config))
        args = parser.parse_args(argv)
        if getattr(args, "output_required", False) and not args.output:
            raise UsageError(f"{args.command} needs --output")
    except UsageError as exc:
        print(f"ncpkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GraphError as exc:
        print(f"ncpkit: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if not args.verbose:
        warnings.simplefilter("ignore")
    from .lfr import InfeasibleError

    start = time.perf_counter()
    try:
        rows = args.func(args)
    except UsageError as exc:
        print(f"ncpkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleError as exc:
        print(f"ncpkit: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (GraphError, OSError, UnicodeDecodeError) as exc:
        print(f"ncpkit: bad input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"ncpkit: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except Exception as exc:  # noqa: BLE001 - last-resort diagnostic
        print(f"ncpkit: failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_OTHER
    elapsed = time.perf_counter() - start
    where = f" to {args.output}" if args.output else ""
    print(f"ncpkit {args.command}: {rows} rows{where} in {elapsed:.2f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
