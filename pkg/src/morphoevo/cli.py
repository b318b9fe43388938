"""Command-line driver: batch execution, presets, oracle checks, rendering.

Exit codes: 0 ok, 1 internal error, 2 usage, 3 missing input file,
4 config schema violation, 5 infeasible parameters.
"""

import argparse
import json
import os
import shutil
import sys
from fractions import Fraction

from .combinatorics import (brute_force_counts, check_inequality,
                            contingency_probabilities, feasible_k_range)
from .errors import ConfigError, SchemaError
from .render import render_outputs
from .runner import (PRESET_NAMES, aggregate_records, config_from_dict,
                     config_to_dict, preset_experiment, run_batch,
                     run_simulation, with_overrides, write_batch_outputs)

EXIT_MISSING_FILE = 3
EXIT_SCHEMA = 4
EXIT_INFEASIBLE = 5


def _parse_value(text):
    # JSON first so numbers/bools/null round-trip; bare words stay strings
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _apply_override(data, dotted, value):
    keys = dotted.split(".")
    node = data
    for k in keys[:-1]:
        nxt = node.get(k)
        if not isinstance(nxt, dict):
            nxt = {}
            node[k] = nxt
        node = nxt
    node[keys[-1]] = value


def load_config(path, overrides=(), preset=None):
    """Resolve a config file plus dotted key=value overrides."""
    if preset is not None and path is None:
        data = {"preset": preset}
    else:
        if path is None:
            raise SchemaError("either --config or --preset is required")
        if not os.path.exists(path):
            raise FileNotFoundError(path)
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise SchemaError(f"{path}: top level must be a JSON object")
        if preset is not None:
            data.setdefault("preset", preset)
    for dotted, value in overrides:
        _apply_override(data, dotted, value)
    cfg = config_from_dict(data)
    env_seed = os.environ.get("MORPHOEVO_SEED")
    if env_seed is not None:
        cfg = with_overrides(cfg, master_seed=int(env_seed))
    return cfg


def _overrides(args):
    out = []
    for item in args.set or []:
        if "=" not in item:
            raise SchemaError(f"--set expects key=value, got {item!r}")
        key, _, val = item.partition("=")
        out.append((key, _parse_value(val)))
    return out


def _write_outputs(out_dir, cfg, records):
    existed = os.path.isdir(out_dir)
    try:
        write_batch_outputs(out_dir, cfg, aggregate_records(records), records)
    except BaseException:
        # do not leave a half-written results directory behind
        if not existed:
            shutil.rmtree(out_dir, ignore_errors=True)
        raise


def cmd_run(args):
    cfg = load_config(args.config, _overrides(args), args.preset)
    cfg = with_overrides(cfg, runs=1)
    rec = run_simulation(cfg, 0)
    _write_outputs(args.out, cfg, [rec])
    final = rec.frames[-1]
    print(f"run 0: {rec.final_cycle} cycles, {final.class_count} classes, "
          f"U={final.mean_theils_u:.3f}, H={final.mean_cond_entropy:.3f}")
    return 0


def cmd_batch(args):
    cfg = load_config(args.config, _overrides(args), args.preset)
    _, records = run_batch(cfg, processes=args.threads)
    _write_outputs(args.out, cfg, records)
    ended_multi = sum(r.frames[-1].class_count > 1 for r in records)
    print(f"{len(records)} runs -> {args.out} "
          f"({ended_multi} ended with more than one class)")
    return 0


def cmd_sweep_alpha(args):
    values = [float(v) for v in args.values.split(",") if v]
    if not values:
        raise SchemaError("--values needs at least one alpha")
    base = load_config(args.config, _overrides(args), args.preset)
    for alpha in values:
        data = config_to_dict(base)
        data["step"]["alpha"] = alpha
        cfg = config_from_dict(data)
        _, records = run_batch(cfg, processes=args.threads)
        sub = os.path.join(args.out, f"alpha_{alpha:g}")
        _write_outputs(sub, cfg, records)
        ended_multi = sum(r.frames[-1].class_count > 1 for r in records)
        print(f"alpha={alpha:g}: {len(records)} runs, "
              f"{ended_multi} ended multi-class -> {sub}")
    return 0


def cmd_oracle(args):
    bad = 0
    print("m,n,k,N,p_i,p_j,p_0,oracle_match")
    for m in range(2, args.max_mn + 1):
        for n in range(2, args.max_mn + 1):
            for k in feasible_k_range(m, n):
                cp = contingency_probabilities(m, n, k)
                total, n_row, n_col, n_other = brute_force_counts(m, n, k)
                holds, _ = check_inequality(m, n, k)
                agree = (cp.N == total
                         and cp.p_i == Fraction(n_row, total)
                         and cp.p_j == Fraction(n_col, total)
                         and cp.p_0 == Fraction(n_other, total))
                bad += not (agree and holds)
                print(f"{m},{n},{k},{cp.N},{cp.p_i},{cp.p_j},{cp.p_0},"
                      f"{'true' if agree else 'false'}")
    if bad:
        print(f"{bad} check(s) failed", file=sys.stderr)
    return 0 if bad == 0 else 1


def cmd_render(args):
    if not os.path.isdir(args.dir):
        raise FileNotFoundError(args.dir)
    files = render_outputs(args.dir, args.out)
    print(f"wrote {len(files)} SVG file(s)")
    return 0


def build_parser():
    epilog = "presets: " + ", ".join(PRESET_NAMES)
    parser = argparse.ArgumentParser(
        prog="morphoevo",
        description="Seeded simulations of inflection-class and morphomic-zone "
                    "evolution under analogical cell filling.",
        epilog=epilog)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_config_args(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--preset", choices=PRESET_NAMES, metavar="NAME",
                       help="named preset (see list below)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="dotted config override, e.g. step.alpha=0.5")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--threads", type=int, default=1,
                       help="worker process cap for batches")

    p = sub.add_parser("run", help="single simulation run", epilog=epilog)
    add_config_args(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("batch", help="full batch of runs", epilog=epilog)
    add_config_args(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("sweep-alpha", help="batch per alpha value",
                       epilog=epilog)
    add_config_args(p)
    p.add_argument("--values", required=True,
                   help="comma-separated alphas, e.g. 0.1,0.2,0.5")
    p.set_defaults(func=cmd_sweep_alpha)

    p = sub.add_parser("oracle",
                       help="exact formula vs. enumeration cross-check")
    p.add_argument("--max-mn", type=int, default=4)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("render", help="SVG charts and heatmaps from a batch dir")
    p.add_argument("dir")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: missing file: {exc}", file=sys.stderr)
        return EXIT_MISSING_FILE
    except SchemaError as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except ConfigError as exc:
        print(f"error: infeasible parameters: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
