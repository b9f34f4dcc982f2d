"""Command-line interface: run experiments, sweep privacy levels, print bounds.

Verbs:

* ``run``           simulate all configured policies, write a regret CSV
* ``sweep-epsilon`` re-run under symmetric epsilon-private feedback, one CSV
                    per epsilon
* ``bounds``        print closed-form bound values, optionally as CSV curves
* ``presets``       list the shipped scenarios

Configuration comes from ``--preset`` or a ``--config`` file of flat
``key = value`` lines (keys: preset, means, p00, p11, policies, horizon,
replications, seed, checkpoints, eps, out); command-line flags override file
values.  CFBANDITS_WORKERS sets the replication thread count without
affecting results.
"""

from __future__ import annotations

import argparse
import sys

from . import bounds as bounds_mod
from . import harness
from .corruption import NonInvertibleScheme


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfbandits",
        description="Bandit simulations with corrupted feedback.",
        epilog="Environment: CFBANDITS_WORKERS sets the replication thread count.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_config_flags(p: argparse.ArgumentParser, default_out: str | None) -> None:
        p.add_argument("--config", help="flat key = value configuration file")
        p.add_argument("--preset", help=f"scenario name ({', '.join(harness.PRESET_NAMES)})")
        p.add_argument("--policies", help="comma-separated policy tags")
        p.add_argument("--horizon", type=int, help="number of rounds T")
        p.add_argument("--reps", type=int, help="number of replications")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--checkpoints", help="comma-separated checkpoint rounds")
        p.add_argument(
            "--out",
            help="output CSV path"
            + (f" (default {default_out})" if default_out else ""),
        )

    run_p = sub.add_parser("run", help="simulate policies and write a regret CSV")
    add_config_flags(run_p, "results.csv")

    sweep_p = sub.add_parser(
        "sweep-epsilon", help="run the scenario under ldp_scheme(eps) per epsilon"
    )
    add_config_flags(sweep_p, "sweep.csv")
    sweep_p.add_argument(
        "--eps",
        help="comma-separated epsilon values (default "
        + ",".join(f"{e:g}" for e in harness.PAPER_EPSILONS)
        + ")",
    )

    bounds_p = sub.add_parser("bounds", help="evaluate closed-form regret bounds")
    add_config_flags(bounds_p, None)
    bounds_p.add_argument(
        "--eps", type=float, help="also evaluate the private-feedback bound at this epsilon"
    )

    sub.add_parser("presets", help="list shipped scenario presets")
    return parser


def _mapping_from_args(args: argparse.Namespace) -> tuple[dict[str, str], str | None]:
    mapping: dict[str, str] = {}
    if args.config:
        mapping.update(harness.parse_config_file(args.config))
    for key, attr in (
        ("preset", "preset"),
        ("policies", "policies"),
        ("horizon", "horizon"),
        ("replications", "reps"),
        ("seed", "seed"),
        ("checkpoints", "checkpoints"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            mapping[key] = str(value)
            if key == "preset":
                mapping.pop("means", None)
                mapping.pop("p00", None)
                mapping.pop("p11", None)
    out = args.out if getattr(args, "out", None) else mapping.pop("out", None)
    return mapping, out


def _cmd_run(args: argparse.Namespace) -> int:
    mapping, out = _mapping_from_args(args)
    mapping.pop("eps", None)
    config = harness.config_from_mapping(mapping)
    out = out or "results.csv"
    harness.run_to_csv(config, out)
    print(f"wrote {out} ({len(config.policies)} policies, "
          f"{config.replications} replications, T={config.horizon})")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    mapping, out = _mapping_from_args(args)
    if args.eps is not None:
        mapping["eps"] = str(args.eps)
    mapping.setdefault("eps", ",".join(f"{e:g}" for e in harness.PAPER_EPSILONS))
    if "policies" not in mapping:
        mapping["policies"] = ",".join(harness.SWEEP_POLICIES)
    config = harness.config_from_mapping(mapping)
    out = out or "sweep.csv"
    written = harness.sweep_to_csv(config, out)
    for eps in sorted(written):
        print(f"eps={eps:g}: wrote {written[eps]}")
    return 0


def _cmd_bounds(args: argparse.Namespace) -> int:
    mapping, out = _mapping_from_args(args)
    mapping.pop("eps", None)
    config = harness.config_from_mapping(mapping)
    model = config.model
    T = config.horizon
    label = config.preset_name or "explicit model"
    print(f"scenario: {label} (K={model.n_arms}, T={T})")
    report = bounds_mod.lower_bound_report(model)
    print(f"lower bound coefficient: {report.total_coefficient:.9g}")
    print(f"lower_bound_curve(T={T}) = {bounds_mod.lower_bound_curve(model, T):.9g}")
    try:
        ub = bounds_mod.finite_time_ub_klucb(model, T)
        print(f"finite_time_ub_klucb(T={T}) = {ub:.9g}")
    except bounds_mod.UnidentifiableModel as exc:
        print(f"finite_time_ub_klucb(T={T}) undefined: {exc}")
    flagged = bounds_mod.identifiability_check(model)
    if flagged:
        for arm, div in flagged:
            print(f"unidentifiable arm {arm}: divergence {div:.3g}")
    else:
        print("identifiability: all suboptimal arms identifiable")
    if args.eps is not None:
        value = bounds_mod.ldp_ub_curve(model.gaps(), args.eps, T)
        print(f"ldp_ub_curve(eps={args.eps:g}, T={T}) = {value:.9g} (leading order)")
    if out:
        traces = harness.bound_traces(config, epsilon=args.eps)
        harness.emit_csv(traces, out)
        print(f"wrote {out}")
    return 0


def _cmd_presets() -> int:
    for name in harness.PRESET_NAMES:
        config = harness.preset(name)
        means = ",".join(f"{m:g}" for m in config.model.means)
        schemes = {(s.p00, s.p11) for s in config.model.schemes}
        schemes_txt = "; ".join(f"({a:g},{b:g})" for a, b in sorted(schemes))
        print(f"{name}: K={config.model.n_arms} means=[{means}] schemes {schemes_txt}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verb == "run":
            return _cmd_run(args)
        if args.verb == "sweep-epsilon":
            return _cmd_sweep(args)
        if args.verb == "bounds":
            return _cmd_bounds(args)
        return _cmd_presets()
    except (ValueError, OSError, NonInvertibleScheme, bounds_mod.UnidentifiableModel) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
