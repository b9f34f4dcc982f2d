"""Experiment configuration, replication running, and CSV emission.

A run is fully determined by (model, policies, horizon, replications,
master_seed, checkpoints).  Every replication derives its own environment,
policy, and auxiliary random streams from (master_seed, purpose, policy tag,
replication index), so replications can execute in any order, on any number
of threads, and still produce byte-identical output.

Regret is accounted as cumulative pseudo-regret: the sum of reward-mean gaps
of the pulled arms.  Its expectation equals expected regret while the
per-replication variance is strictly smaller, which is what averaged
regret-vs-time plots want.

The CFBANDITS_WORKERS environment variable sets the replication thread count
(default 1); the compiled loop releases the GIL, so workers scale on real
cores without affecting results.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import bounds as bounds_mod
from ._engine import run_loop
from ._rng import RandomStream
from .corruption import RandomizedResponseScheme, ldp_scheme
from .environment import CorruptBanditModel
from .policies import PolicyKind

DEFAULT_POLICIES = (
    "klucb-cf",
    "ts-cf",
    "klucb",
    "ucb1",
    "ts",
    "wrapper:klucb",
    "wrapper:ts",
)
SWEEP_POLICIES = ("klucb-cf", "ts-cf")
PAPER_EPSILONS = (0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0)
LB_TAG = "LB"
UB_LDP_TAG = "UB-ldp"

_SCENARIO_MEANS: dict[str, tuple[float, ...]] = {
    "main": (0.9,) + (0.8,) * 9,
    "scenario1": (0.9, 0.6),
    "scenario2": (0.9, 0.8),
    "scenario3": (0.9, 0.8, 0.8, 0.8, 0.7, 0.7, 0.7, 0.6, 0.6, 0.6),
    "scenario4": (0.9,) + (0.6,) * 9,
}

PRESET_NAMES = tuple(_SCENARIO_MEANS)

_CONFIG_KEYS = (
    "preset",
    "means",
    "p00",
    "p11",
    "policies",
    "horizon",
    "replications",
    "seed",
    "checkpoints",
    "eps",
    "out",
)


def default_checkpoints(horizon: int) -> tuple[int, ...]:
    """50 log-spaced integer checkpoints plus the horizon, deduplicated."""
    if int(horizon) != horizon or horizon < 1:
        raise ValueError(f"horizon must be a positive integer, got {horizon!r}")
    pts = np.unique(np.round(np.logspace(0.0, math.log10(horizon), 50)).astype(np.int64))
    pts = pts[(pts >= 1) & (pts <= horizon)]
    out = sorted(set(pts.tolist()) | {int(horizon)})
    return tuple(out)


@dataclass(frozen=True)
class ExperimentConfig:
    model: CorruptBanditModel
    policies: tuple[PolicyKind, ...]
    horizon: int
    replications: int
    master_seed: int
    checkpoints: tuple[int, ...]
    preset_name: str | None = None
    epsilon_sweep: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.model, CorruptBanditModel):
            raise TypeError("model must be a CorruptBanditModel")
        kinds = tuple(
            p if isinstance(p, PolicyKind) else PolicyKind(str(p)) for p in self.policies
        )
        if not kinds:
            raise ValueError("at least one policy is required")
        tags = [k.tag for k in kinds]
        if len(set(tags)) != len(tags):
            raise ValueError(f"duplicate policy tags: {tags}")
        object.__setattr__(self, "policies", kinds)
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ValueError(f"horizon must be a positive integer, got {self.horizon!r}")
        if int(self.replications) != self.replications or self.replications < 1:
            raise ValueError(
                f"replications must be a positive integer, got {self.replications!r}"
            )
        object.__setattr__(self, "horizon", int(self.horizon))
        object.__setattr__(self, "replications", int(self.replications))
        object.__setattr__(self, "master_seed", int(self.master_seed))
        cp = tuple(int(c) for c in self.checkpoints)
        if not cp:
            raise ValueError("checkpoints must be nonempty")
        if any(b <= a for a, b in zip(cp, cp[1:])):
            raise ValueError("checkpoints must be strictly increasing")
        if cp[0] < 1 or cp[-1] > self.horizon:
            raise ValueError("checkpoints must lie in [1, horizon]")
        object.__setattr__(self, "checkpoints", cp)
        if self.epsilon_sweep is not None:
            eps = tuple(float(e) for e in self.epsilon_sweep)
            if not eps:
                raise ValueError("epsilon_sweep, when given, must be nonempty")
            if any(e <= 0.0 or math.isnan(e) for e in eps):
                raise ValueError("epsilon_sweep values must be positive")
            object.__setattr__(self, "epsilon_sweep", eps)


@dataclass
class RegretTrace:
    """Mean cumulative pseudo-regret at each checkpoint, with standard errors.

    Bound curves reuse this shape with replications = 0 and stderr = 0.
    """

    policy: str
    checkpoints: np.ndarray
    mean_regret: np.ndarray
    stderr: np.ndarray
    replications: int


def preset(
    name: str,
    *,
    policies: Sequence[str | PolicyKind] | None = None,
    horizon: int = 100_000,
    replications: int = 100,
    master_seed: int = 42,
    checkpoints: Sequence[int] | None = None,
    epsilon_sweep: Sequence[float] | None = None,
) -> ExperimentConfig:
    """Named experiment scenario as a ready-to-run configuration.

    Every preset corrupts the optimal arm with scheme (0.6, 0.6) and all
    other arms with (0.9, 0.9); the feedback means then order inversely to
    the reward means, which is the regime the corruption-aware algorithms
    are built for.
    """
    if name not in _SCENARIO_MEANS:
        raise ValueError(
            f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}"
        )
    means = _SCENARIO_MEANS[name]
    schemes = [RandomizedResponseScheme(0.6, 0.6)] + [
        RandomizedResponseScheme(0.9, 0.9) for _ in means[1:]
    ]
    return ExperimentConfig(
        model=CorruptBanditModel(means, schemes),
        policies=tuple(policies) if policies is not None else DEFAULT_POLICIES,
        horizon=horizon,
        replications=replications,
        master_seed=master_seed,
        checkpoints=tuple(checkpoints) if checkpoints is not None else default_checkpoints(horizon),
        preset_name=name,
        epsilon_sweep=tuple(epsilon_sweep) if epsilon_sweep is not None else None,
    )


def _policy_arrays(model: CorruptBanditModel, kind: PolicyKind) -> tuple[np.ndarray, np.ndarray]:
    """Linear corruption parameters for kinds that invert; empty for baselines."""
    if kind.tag in ("klucb", "ucb1", "ts"):
        empty = np.zeros(0, dtype=np.float64)
        return empty, empty
    functions = model.functions  # raises NonInvertibleScheme on zero slope
    intercept = np.array([f.intercept for f in functions], dtype=np.float64)
    slope = np.array([f.slope for f in functions], dtype=np.float64)
    return intercept, slope


def run_single(
    model: CorruptBanditModel,
    kind: PolicyKind | str,
    horizon: int,
    checkpoints: Sequence[int],
    env_rng: RandomStream,
    policy_rng: RandomStream,
    aux_rng: RandomStream,
    record_arms: bool = False,
) -> tuple[np.ndarray, np.ndarray | None]:
    """One replication with caller-supplied streams.

    Returns (per-checkpoint cumulative pseudo-regret, arm sequence or None).
    Streams are advanced in place, so fresh streams per call are the rule.
    """
    kind = kind if isinstance(kind, PolicyKind) else PolicyKind(str(kind))
    checkpoints = np.asarray(checkpoints, dtype=np.int64)
    if checkpoints.size == 0:
        raise ValueError("checkpoints must be nonempty")
    code, inner = kind.codes
    intercept, slope = _policy_arrays(model, kind)
    p00 = np.array([s.p00 for s in model.schemes], dtype=np.float64)
    p11 = np.array([s.p11 for s in model.schemes], dtype=np.float64)
    regret = np.zeros(checkpoints.size, dtype=np.float64)
    arms = np.zeros(int(horizon) if record_arms else 1, dtype=np.int64)
    run_loop(
        code,
        inner,
        int(horizon),
        model.means,
        p00,
        p11,
        intercept,
        slope,
        model.gaps(),
        checkpoints,
        env_rng.state,
        policy_rng.state,
        aux_rng.state,
        regret,
        arms,
        record_arms,
    )
    return regret, (arms if record_arms else None)


def replication_streams(
    master_seed: int, kind: PolicyKind | str, replication: int
) -> tuple[RandomStream, RandomStream, RandomStream]:
    """The (environment, policy, auxiliary) streams for one replication."""
    tag = kind.tag if isinstance(kind, PolicyKind) else str(kind)
    return (
        RandomStream.from_key(master_seed, "env", tag, replication),
        RandomStream.from_key(master_seed, "policy", tag, replication),
        RandomStream.from_key(master_seed, "aux", tag, replication),
    )


def run_replication(
    config: ExperimentConfig, policy: PolicyKind | str, replication: int
) -> np.ndarray:
    """Per-checkpoint cumulative pseudo-regret for one (policy, replication)."""
    kind = policy if isinstance(policy, PolicyKind) else PolicyKind(str(policy))
    env_rng, policy_rng, aux_rng = replication_streams(
        config.master_seed, kind, replication
    )
    regret, _ = run_single(
        config.model, kind, config.horizon, config.checkpoints, env_rng, policy_rng, aux_rng
    )
    return regret


def _worker_count() -> int:
    raw = os.environ.get("CFBANDITS_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"CFBANDITS_WORKERS must be an integer, got {raw!r}") from None


def _trace_from_matrix(tag: str, checkpoints: tuple[int, ...], matrix: np.ndarray) -> RegretTrace:
    reps = matrix.shape[0]
    mean = matrix.mean(axis=0)
    if reps > 1:
        stderr = matrix.std(axis=0, ddof=1) / math.sqrt(reps)
    else:
        stderr = np.zeros(matrix.shape[1], dtype=np.float64)
    return RegretTrace(tag, np.asarray(checkpoints, dtype=np.int64), mean, stderr, reps)


def _curve_trace(tag: str, checkpoints: tuple[int, ...], coefficient: float) -> RegretTrace:
    cp = np.asarray(checkpoints, dtype=np.int64)
    values = np.array([0.0 if t <= 1 else coefficient * math.log(t) for t in cp])
    return RegretTrace(tag, cp, values, np.zeros(cp.size, dtype=np.float64), 0)


def run_experiment(config: ExperimentConfig) -> list[RegretTrace]:
    """All policies of the config, averaged over replications, plus the
    logarithmic lower-bound curve."""
    workers = _worker_count()
    traces: list[RegretTrace] = []
    for kind in config.policies:
        matrix = np.empty((config.replications, len(config.checkpoints)), dtype=np.float64)
        if workers == 1 or config.replications == 1:
            for r in range(config.replications):
                matrix[r] = run_replication(config, kind, r)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = {
                    pool.submit(run_replication, config, kind, r): r
                    for r in range(config.replications)
                }
                for fut, r in futures.items():
                    matrix[r] = fut.result()
        traces.append(_trace_from_matrix(kind.tag, config.checkpoints, matrix))
    lb = bounds_mod.lower_bound_report(config.model)
    traces.append(_curve_trace(LB_TAG, config.checkpoints, lb.total_coefficient))
    return traces


def run_epsilon_sweep(config: ExperimentConfig) -> dict[float, list[RegretTrace]]:
    """Re-run the config once per epsilon with ldp_scheme(eps) on every arm.

    Each epsilon's trace list carries the usual lower-bound curve plus the
    leading-order private-feedback upper bound curve (tag UB-ldp).
    """
    if config.epsilon_sweep is None:
        raise ValueError("config has no epsilon_sweep")
    results: dict[float, list[RegretTrace]] = {}
    gaps = config.model.gaps()
    for eps in config.epsilon_sweep:
        scheme = ldp_scheme(eps)
        model = CorruptBanditModel(
            config.model.means, [scheme] * config.model.n_arms
        )
        sub = ExperimentConfig(
            model=model,
            policies=config.policies,
            horizon=config.horizon,
            replications=config.replications,
            master_seed=config.master_seed,
            checkpoints=config.checkpoints,
            preset_name=config.preset_name,
        )
        traces = run_experiment(sub)
        factor = bounds_mod.ldp_epsilon_factor(eps)
        coeff = float(sum(2.0 / (g * factor) for g in gaps if g > 0.0))
        traces.append(_curve_trace(UB_LDP_TAG, config.checkpoints, coeff))
        results[float(eps)] = traces
    return results


def bound_traces(config: ExperimentConfig, epsilon: float | None = None) -> list[RegretTrace]:
    """Bound curves alone, in trace form: LB always, UB-ldp when epsilon given."""
    lb = bounds_mod.lower_bound_report(config.model)
    traces = [_curve_trace(LB_TAG, config.checkpoints, lb.total_coefficient)]
    if epsilon is not None:
        factor = bounds_mod.ldp_epsilon_factor(epsilon)
        coeff = float(
            sum(2.0 / (g * factor) for g in config.model.gaps() if g > 0.0)
        )
        traces.append(_curve_trace(UB_LDP_TAG, config.checkpoints, coeff))
    return traces


def _fmt(x: float) -> str:
    return f"{float(x):.9g}"


def emit_csv(traces: Sequence[RegretTrace], destination: str | Path) -> Path:
    """Write traces as `t,policy,mean_regret,stderr,replications` rows.

    Rows are sorted by policy tag then checkpoint, floats carry 9 significant
    digits, line endings are LF; identical traces give byte-identical files.
    """
    if not traces:
        raise ValueError("no traces to write")
    rows = []
    for tr in traces:
        for t, m, se in zip(tr.checkpoints, tr.mean_regret, tr.stderr):
            rows.append((str(tr.policy), int(t), float(m), float(se), int(tr.replications)))
    rows.sort(key=lambda r: (r[0], r[1]))
    lines = ["t,policy,mean_regret,stderr,replications"]
    for policy, t, mean, se, reps in rows:
        lines.append(f"{t},{policy},{_fmt(mean)},{_fmt(se)},{reps}")
    destination = Path(destination)
    try:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"could not write CSV to {destination}: {exc}") from exc
    return destination


def metadata_path(csv_path: str | Path) -> Path:
    return Path(csv_path).with_suffix(".meta.json")


def write_metadata(
    config: ExperimentConfig, csv_path: str | Path, extra: Mapping[str, object] | None = None
) -> Path:
    """Sidecar JSON describing the run; the CSV itself stays rows-only."""
    meta: dict[str, object] = {
        "arm_means": [float(m) for m in config.model.means],
        "schemes": [[s.p00, s.p11] for s in config.model.schemes],
        "policies": [k.tag for k in config.policies],
        "horizon": config.horizon,
        "replications": config.replications,
        "master_seed": config.master_seed,
        "checkpoint_count": len(config.checkpoints),
        "preset": config.preset_name,
        "notes": {
            "regret": "cumulative pseudo-regret, mean over replications",
            "ub_ldp": "leading-order log T term only; lower-order terms omitted",
            "epsilon_sweep": "ldp_scheme(eps) applied uniformly to all arms",
        },
    }
    if extra:
        meta.update(extra)
    path = metadata_path(csv_path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"could not write metadata to {path}: {exc}") from exc
    return path


def run_to_csv(config: ExperimentConfig, destination: str | Path) -> list[RegretTrace]:
    """run_experiment + emit_csv + metadata sidecar."""
    traces = run_experiment(config)
    emit_csv(traces, destination)
    write_metadata(config, destination)
    return traces


def sweep_to_csv(config: ExperimentConfig, destination: str | Path) -> dict[float, Path]:
    """One CSV per epsilon, named `<stem>_eps<value>.csv` next to destination."""
    results = run_epsilon_sweep(config)
    base = Path(destination)
    written: dict[float, Path] = {}
    for eps, traces in results.items():
        path = base.with_name(f"{base.stem}_eps{eps:g}{base.suffix or '.csv'}")
        emit_csv(traces, path)
        scheme = ldp_scheme(eps)
        write_metadata(
            config,
            path,
            extra={
                "epsilon": eps,
                # the sweep replaces every arm's scheme; record what actually ran
                "schemes": [[scheme.p00, scheme.p11]] * config.model.n_arms,
            },
        )
        written[eps] = path
    return written


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Flat `key = value` file; blank lines and # comments ignored."""
    mapping: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"could not read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected `key = value`, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ValueError(
                f"{path}:{lineno}: unknown key {key!r}; valid keys: {', '.join(_CONFIG_KEYS)}"
            )
        mapping[key] = value.strip()
    return mapping


def _parse_floats(text: str, what: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in str(text).split(",") if part.strip() != "")
    except ValueError:
        raise ValueError(f"could not parse {what} from {text!r}") from None


def _parse_ints(text: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in str(text).split(",") if part.strip() != "")
    except ValueError:
        raise ValueError(f"could not parse {what} from {text!r}") from None


def config_from_mapping(mapping: Mapping[str, object]) -> ExperimentConfig:
    """Build an ExperimentConfig from string-valued keys (file and/or CLI).

    Either `preset` or an explicit model (`means` plus `p00`/`p11`, each a
    single value broadcast to all arms or one value per arm) must be present.
    """
    mapping = dict(mapping)
    unknown = set(mapping) - set(_CONFIG_KEYS)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    has_preset = "preset" in mapping and str(mapping["preset"]).strip() != ""
    has_means = "means" in mapping and str(mapping["means"]).strip() != ""
    if has_preset and has_means:
        raise ValueError("give either `preset` or `means`, not both")
    if not has_preset and not has_means:
        raise ValueError("config needs a `preset` or explicit `means`")

    if has_means:
        means = _parse_floats(mapping["means"], "means")
        if "p00" not in mapping or "p11" not in mapping:
            raise ValueError("explicit `means` requires `p00` and `p11`")
        p00 = _parse_floats(mapping["p00"], "p00")
        p11 = _parse_floats(mapping["p11"], "p11")
        if len(p00) == 1:
            p00 = p00 * len(means)
        if len(p11) == 1:
            p11 = p11 * len(means)
        if len(p00) != len(means) or len(p11) != len(means):
            raise ValueError("p00/p11 must be a single value or one value per arm")
        model = CorruptBanditModel(
            means, [RandomizedResponseScheme(a, b) for a, b in zip(p00, p11)]
        )
        preset_name = None
        default_policy_list = DEFAULT_POLICIES
    else:
        name = str(mapping["preset"]).strip()
        base = preset(name)
        model = base.model
        preset_name = name
        default_policy_list = DEFAULT_POLICIES

    horizon = int(mapping.get("horizon", 100_000))
    replications = int(mapping.get("replications", 100))
    master_seed = int(mapping.get("seed", 42))
    if "policies" in mapping and str(mapping["policies"]).strip() != "":
        policies = tuple(
            tag.strip() for tag in str(mapping["policies"]).split(",") if tag.strip()
        )
    else:
        policies = default_policy_list
    if "checkpoints" in mapping and str(mapping["checkpoints"]).strip() != "":
        checkpoints = _parse_ints(mapping["checkpoints"], "checkpoints")
    else:
        checkpoints = default_checkpoints(horizon)
    epsilon_sweep = None
    if "eps" in mapping and str(mapping["eps"]).strip() != "":
        epsilon_sweep = _parse_floats(mapping["eps"], "eps")
    return ExperimentConfig(
        model=model,
        policies=policies,
        horizon=horizon,
        replications=replications,
        master_seed=master_seed,
        checkpoints=checkpoints,
        preset_name=preset_name,
        epsilon_sweep=epsilon_sweep,
    )
