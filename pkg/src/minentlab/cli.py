"""Command-line orchestration: config ingestion, seeded suites, report export."""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from . import bounds as B
from .bounds import BoundReport
from .discretize import (
    METRICS, Discretization, covering_partition, greedy_packing_net, pairwise, uniform_grid,
    validate_discretization,
)
from .entfrac import channel_family, verify_thm1, verify_thm2
from .entropy import conditional_shannon, random_joint_table
from .errors import InvalidInput
from .learning_sim import (
    ESTIMATORS, LearningTask, exact_learning_scenario, induced_joint, map_decoder_success,
    monte_carlo_risk, substream,
)
from .minent_sdp import bell_state, channel_from_dual, solve_hmin
from .quantum_core import (
    DensityOperator, apply_channel, random_density, random_pure, singlet_fraction,
    standard_channel,
)

log = logging.getLogger("minentlab")

SCHEMA_VERSION = 1
COMMANDS = ("discretize", "minent", "singlet-fraction", "verify", "simulate", "exact-learning")
CHECKS = ("classical", "qfano", "prop2", "prop3", "dephasing", "thm1", "thm2")
RANDOM_CHECKS = ("classical", "qfano", "prop2", "prop3", "dephasing")
CHANNELS = ("identity", "depolarizing", "dephasing")
FORMATS = ("jsonl", "csv")
CSV_FIELDS = ("name", "lhs", "rhs", "slack", "pass", "instance", "seed", "config_hash")


# ---- config -----------------------------------------------------------------

@dataclass
class ExperimentConfig:
    command: str
    check: str | None = None
    suite: str | None = None
    n: int = 100
    seed: int | None = None
    tol: float | None = None
    epsilon: float | None = None
    channel: str | None = None
    partition_size: int | None = None
    state: Any = None
    space: dict | None = None
    task: dict | None = None
    learning: dict | None = None
    estimator: str = "map-center"
    out: str | None = None
    format: str = "jsonl"
    schema_version: int = SCHEMA_VERSION
    extra: dict = field(default_factory=dict)

    def needs_seed(self) -> bool:
        if self.command == "verify":
            return self.check in RANDOM_CHECKS or (self.channel or "").startswith("random")
        if self.command == "simulate":
            return True
        return isinstance(self.state, str) and self.state.startswith("random")

    def hash(self) -> str:
        body = {k: v for k, v in self.__dict__.items() if k not in ("out", "format", "extra")}
        blob = json.dumps(body, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


CONFIG_FIELDS = set(ExperimentConfig.__dataclass_fields__) - {"extra"}


def config_diagnostics(raw: dict) -> list[str]:
    """Field-path diagnostics for a config mapping; empty iff valid."""
    diags = []
    if not isinstance(raw, dict):
        return ["<root>: config must be a JSON object"]
    for k in raw:
        if k not in CONFIG_FIELDS:
            diags.append(f"{k}: unknown field")
    if raw.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
        diags.append(f"schema_version: expected {SCHEMA_VERSION}")
    cmd = raw.get("command")
    if cmd not in COMMANDS:
        diags.append(f"command: must be one of {', '.join(COMMANDS)}")
    if cmd == "verify" and raw.get("check") not in CHECKS:
        diags.append(f"check: must be one of {', '.join(CHECKS)}")
    n = raw.get("n", 1)
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        diags.append("n: must be a positive integer")
    seed = raw.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool) or seed < 0):
        diags.append("seed: must be a nonnegative integer")
    for key in ("tol", "epsilon"):
        v = raw.get(key)
        if v is not None and (not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0):
            diags.append(f"{key}: must be > 0")
    if raw.get("format", "jsonl") not in FORMATS:
        diags.append("format: must be jsonl or csv")
    ch = raw.get("channel")
    if ch is not None and str(ch).split(":")[0] not in CHANNELS + ("random", "all"):
        diags.append(f"channel: unknown channel {ch!r}")
    ps = raw.get("partition_size")
    if ps is not None and (not isinstance(ps, int) or not 1 <= ps <= 8):
        diags.append("partition_size: must be an integer in [1, 8]")
    est = raw.get("estimator", "map-center")
    if est not in ESTIMATORS:
        diags.append(f"estimator: unknown estimator {est!r}")
    space = raw.get("space")
    if space is not None:
        if not isinstance(space, dict):
            diags.append("space: must be an object")
        elif space.get("metric", "euclidean") not in METRICS:
            diags.append("space.metric: unknown metric")
    if not diags and cmd is not None:
        cfg = ExperimentConfig(**{k: raw[k] for k in raw if k in CONFIG_FIELDS})
        if cfg.needs_seed() and cfg.seed is None:
            diags.append("seed: required for randomized suites")
    return diags


def validate_config(path: str) -> list[str]:
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            return [f"<root>: invalid JSON ({exc})"]
    return config_diagnostics(raw)


# ---- export -----------------------------------------------------------------

def export(reports: Sequence[BoundReport], fh, fmt: str = "jsonl") -> None:
    if fmt == "jsonl":
        for r in reports:
            fh.write(json.dumps(r.to_dict()) + "\n")
    elif fmt == "csv":
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in reports:
            d = r.to_dict()
            w.writerow([d["name"], repr(d["lhs"]), repr(d["rhs"]), repr(d["slack"]),
                        "true" if d["pass"] else "false", d["instance"],
                        "" if d["seed"] is None else d["seed"], d["config_hash"]])
    else:
        raise InvalidInput(f"unknown format {fmt!r}")


def import_reports(fh, fmt: str = "jsonl") -> list[BoundReport]:
    if fmt == "jsonl":
        return [BoundReport.from_dict(json.loads(line)) for line in fh if line.strip()]
    if fmt == "csv":
        rows = list(csv.DictReader(fh))
        for row in rows:
            row["pass"] = row["pass"] == "true"
        return [BoundReport.from_dict(row) for row in rows]
    raise InvalidInput(f"unknown format {fmt!r}")


# ---- instances --------------------------------------------------------------

def complex_matrix(obj) -> np.ndarray:
    """Nested lists of ``[re, im]`` pairs (or reals) to a complex array."""
    a = np.asarray(obj, dtype=float)
    if a.ndim == 3 and a.shape[-1] == 2:
        return a[..., 0] + 1j * a[..., 1]
    return a.astype(complex)


def parse_state(spec, seed: int | None) -> DensityOperator:
    if isinstance(spec, dict):
        return DensityOperator(complex_matrix(spec["matrix"]), tuple(spec["dims"]))
    name, _, arg = str(spec).partition(":")
    if name == "bell":
        return bell_state()
    if name == "depolarized-bell":
        return apply_channel(standard_channel("depolarizing", 2, float(arg or 0.5)), bell_state(), 1)
    if name == "maximally-mixed":
        d = int(arg or 2)
        return DensityOperator(np.eye(d * d, dtype=complex) / d ** 2, (d, d))
    if name == "random":
        d_r, d_b = (int(x) for x in (arg or "2,2").split(","))
        return random_density((d_r, d_b), substream(seed or 0))
    raise InvalidInput(f"unknown state {spec!r}")


def parse_channel(spec: str, d: int):
    name, _, arg = spec.partition(":")
    if name in ("identity", "dephasing"):
        return standard_channel(name, d)
    if name == "depolarizing":
        return standard_channel(name, d, float(arg or 0.5))
    raise InvalidInput(f"unknown channel {spec!r}")


def cell_disc(k: int) -> Discretization:
    """``k`` equal cells of [0, 1]; the midpoints are both a 1/(2k)-net and a packing."""
    sp = uniform_grid([[0.0, 1.0]], [k], midpoints=True)
    return Discretization(sp, np.arange(k), 1.0 / k, "both")


def random_task(rng: np.random.Generator) -> LearningTask:
    """Cell-constant task on 2-4 grid points with at most 6 observations."""
    n_pts = int(rng.integers(2, 5))
    n_obs = int(rng.integers(2, 7))
    sp = uniform_grid([[0.0, 1.0]], [n_pts], midpoints=True)
    model = covering_partition(Discretization(sp, np.arange(n_pts), 0.5 / n_pts, "both"))
    lik = rng.dirichlet(np.full(n_obs, 0.5), size=n_pts)
    lik[:, -1] = 1.0 - lik[:, :-1].sum(axis=1)
    lik = np.clip(lik, 0, None)
    lik /= lik.sum(axis=1, keepdims=True)
    return LearningTask(model, lik, loss="zero-one", epsilon=0.5 / n_pts)


def task_from_config(tc: dict | None) -> LearningTask:
    tc = tc or {}
    counts = tc.get("counts", 4)
    sp = uniform_grid(tc.get("bounds", [[0.0, 1.0]]), counts, tc.get("metric", "euclidean"),
                      midpoints=tc.get("midpoints", True))
    eps = float(tc.get("epsilon", 0.5 / (counts if np.isscalar(counts) else max(counts))))
    centers = tc.get("centers")
    model = covering_partition(Discretization(sp, np.arange(len(sp)) if centers is None else centers, eps, "net"))
    lik = tc.get("likelihood")
    if lik is None:
        lik = np.full((model.size, int(tc.get("n_obs", 3))), 1.0 / int(tc.get("n_obs", 3)))
    return LearningTask(model, np.asarray(lik, float), tc.get("prior"), tc.get("loss", "zero-one"),
                        tc.get("score", "indicator"), eps, tc.get("score_c"))


# ---- commands ---------------------------------------------------------------

def _threads() -> int:
    try:
        return max(1, int(os.environ.get("MINENTLAB_THREADS", "1")))
    except ValueError:
        return 1


def ordered_map(fn: Callable[[int], list[BoundReport]], n: int) -> list[BoundReport]:
    """Run ``fn`` over instance indices; output is ordered by index."""
    workers = _threads()
    if workers == 1:
        chunks = map(fn, range(n))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(fn, range(n)))
    return [r for chunk in chunks for r in chunk]


def _classical(cfg: ExperimentConfig, i: int) -> list[BoundReport]:
    rng = substream(cfg.seed, i)
    t = random_joint_table(int(rng.integers(1, 7)), int(rng.integers(1, 7)), rng, sparsity=0.3)
    success, _ = map_decoder_success(t)
    tag = f"table {i}"
    return [B.fano_check(t, success, instance=f"unit=bits; {tag} shape={t.shape}"),
            B.guarantee_check(t, instance=f"unit=probability; {tag} shape={t.shape}"),
            B.hmin_le_h_check(t, instance=f"unit=bits; {tag} shape={t.shape}")]


def _qfano(cfg: ExperimentConfig, i: int) -> list[BoundReport]:
    rng = substream(cfg.seed, i)
    dims = (int(rng.integers(1, 4)), int(rng.integers(1, 4)))
    rank = int(rng.integers(1, dims[0] * dims[1] + 1))
    return [B.quantum_fano_check(random_pure(dims, rng), random_density(dims, rng, rank),
                                 instance=f"unit=bits; pair {i} dims={dims}")]


def _prop2(cfg: ExperimentConfig, i: int) -> list[BoundReport]:
    task = random_task(substream(cfg.seed, i))
    return [B.prop2_check(task)]


def _prop3(cfg: ExperimentConfig, i: int) -> list[BoundReport]:
    task = random_task(substream(cfg.seed, i))
    return [B.prop3_check(task)]


def _dephasing(cfg: ExperimentConfig, i: int) -> list[BoundReport]:
    rng = substream(cfg.seed, i)
    dims = (int(rng.integers(1, 4)), int(rng.integers(1, 4)))
    return [B.dephasing_reduction_check(random_density(dims, rng), instance=f"unit=probability; state {i} dims={dims}")]


SUITES = {"classical": _classical, "qfano": _qfano, "prop2": _prop2, "prop3": _prop3, "dephasing": _dephasing}


def _theorem(cfg: ExperimentConfig) -> list[BoundReport]:
    check = verify_thm1 if cfg.check == "thm1" else verify_thm2
    tol = cfg.tol if cfg.tol is not None else B.SDP_TOL
    sizes = [cfg.partition_size] if cfg.partition_size else [2, 3, 4]
    out = []
    for k in sizes:
        disc = cell_disc(k)
        if cfg.channel in (None, "all") or (cfg.channel or "").startswith("random"):
            n_rand = 0 if cfg.channel is None else (20 if cfg.seed is not None else 0)
            items = list(channel_family(k, substream(cfg.seed or 0, k), n_rand))
            if (cfg.channel or "").startswith("random"):
                items = [it for it in items if it[0].startswith("random")]
        else:
            items = [(cfg.channel, parse_channel(cfg.channel, k))]
        out += ordered_map(lambda j: [check(disc, items[j][1], tol=tol,
                                            instance=f"size={k} channel={items[j][0]}")], len(items))
    return out


def _minent(cfg: ExperimentConfig) -> list[BoundReport]:
    rho = parse_state(cfg.state or "bell", cfg.seed)
    tol = cfg.tol if cfg.tol is not None else 1e-8
    sol = solve_hmin(rho, tol=tol)
    if sol.status == "infeasible_input":
        raise InvalidInput("state rejected by the solver")
    return [BoundReport.build("minent", sol.primal_value, sol.dual_value, slack=tol - sol.gap, tol=0.0,
                              instance=f"unit=probability; dims={rho.dims} hmin={sol.hmin!r} "
                                       f"status={sol.status} iterations={sol.iterations}")]


def _singlet_fraction(cfg: ExperimentConfig) -> list[BoundReport]:
    rho = parse_state(cfg.state or "bell", cfg.seed)
    sol = solve_hmin(rho)
    dec = channel_from_dual(sol)
    q = singlet_fraction(rho, dec)
    tol = cfg.tol if cfg.tol is not None else B.SDP_TOL
    return [BoundReport.build("singlet_fraction", q, sol.primal_value, slack=tol - abs(q - sol.primal_value),
                              tol=0.0, instance=f"unit=probability; dims={rho.dims} decoder=dual-recovered")]


def _discretize(cfg: ExperimentConfig) -> list[BoundReport]:
    sc = cfg.space or {}
    sp = uniform_grid(sc.get("bounds", [[0.0, 1.0]]), sc.get("counts", 101), sc.get("metric", "euclidean"),
                      midpoints=sc.get("midpoints", False))
    eps = cfg.epsilon if cfg.epsilon is not None else 0.1
    disc = greedy_packing_net(sp, eps)
    problems = validate_discretization(disc)
    if disc.size > 1:
        dc = pairwise(sp.metric, disc.centers, disc.centers)
        np.fill_diagonal(dc, np.inf)
        sep = float(dc.min())
    else:
        sep = float("inf")
    cover = float(pairwise(sp.metric, sp.points, disc.centers).min(axis=1).max())
    tag = f"|W|={disc.size} points={len(sp)} problems={len(problems)}"
    return [BoundReport.build("packing", sep if np.isfinite(sep) else eps, eps, instance=f"unit=distance; {tag}"),
            BoundReport.build("net", eps, cover, instance=f"unit=distance; {tag}")]


def _simulate(cfg: ExperimentConfig) -> list[BoundReport]:
    task = task_from_config(cfg.task)
    v = greedy_packing_net(task.space, 2 * task.epsilon)
    bound = B.minimax_bound(conditional_shannon(induced_joint(task, v)), max(v.size, 2),
                            float(task.loss_fn(task.epsilon)))
    res = monte_carlo_risk(task, cfg.estimator, cfg.n, cfg.seed)
    return [BoundReport.build("monte_carlo_risk", res.expected_loss + res.half_width, bound,
                              instance=f"unit=loss; mean={res.expected_loss!r} half_width={res.half_width!r} "
                                       f"success={res.success!r} samples={cfg.n}")]


def _exact_learning(cfg: ExperimentConfig) -> list[BoundReport]:
    lc = cfg.learning or {}
    inst = exact_learning_scenario(int(lc.get("n_bits", 2)), lc.get("concepts", [0, 1]), int(lc.get("m", 1)),
                                   lc.get("p_x"), lc.get("prior"))
    classical, _ = map_decoder_success(inst.table)
    dephased, _ = map_decoder_success(inst.dephased_table())
    tag = f"n={inst.n_bits} |C|={len(inst.concepts)} m={inst.m}"
    return [BoundReport.build("exact_learning_dephasing", dephased, classical,
                              slack=1e-9 - abs(dephased - classical), tol=0.0, instance=f"unit=probability; {tag}"),
            B.guarantee_check(inst.table, instance=f"unit=probability; {tag}")]


def run(cfg: ExperimentConfig) -> list[BoundReport]:
    diags = config_diagnostics({k: v for k, v in cfg.__dict__.items() if k in CONFIG_FIELDS and v is not None})
    if diags:
        raise InvalidInput("; ".join(diags))
    if cfg.command == "verify":
        if cfg.check in SUITES:
            fn = SUITES[cfg.check]
            reports = ordered_map(lambda i: fn(cfg, i), cfg.n)
        else:
            reports = _theorem(cfg)
    else:
        reports = {"minent": _minent, "singlet-fraction": _singlet_fraction, "discretize": _discretize,
                   "simulate": _simulate, "exact-learning": _exact_learning}[cfg.command](cfg)
    h = cfg.hash()
    return [r.with_provenance(cfg.seed, h) for r in reports]


# ---- argument parsing -------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config")
    common.add_argument("--seed", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--n", type=int, help="number of random instances or samples")
    common.add_argument("--suite")
    common.add_argument("--epsilon", type=float)
    common.add_argument("--partition-size", type=int)
    common.add_argument("--channel")
    common.add_argument("--state")
    common.add_argument("--estimator")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="minentlab", description="Min-entropy and learning-bound experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("discretize", "minent", "singlet-fraction", "simulate", "exact-learning"):
        sub.add_parser(name, parents=[common])
    v = sub.add_parser("verify", parents=[common])
    v.add_argument("check", choices=CHECKS)
    vc = sub.add_parser("validate-config")
    vc.add_argument("path")
    return p


def _merge(args: argparse.Namespace) -> ExperimentConfig:
    raw: dict = {}
    if args.config:
        with open(args.config) as fh:
            raw = json.load(fh)
        diags = config_diagnostics({**raw, "command": raw.get("command", args.command)})
        if diags:
            raise InvalidInput("; ".join(diags))
    raw["command"] = args.command
    if args.command == "verify":
        raw["check"] = args.check
    for key in ("seed", "tol", "out", "format", "n", "suite", "epsilon", "partition_size", "channel",
                "state", "estimator"):
        val = getattr(args, key, None)
        if val is not None:
            raw[key] = val
    return ExperimentConfig(**{k: v for k, v in raw.items() if k in CONFIG_FIELDS})


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "validate-config":
        try:
            diags = validate_config(args.path)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        for d in diags:
            print(d)
        return 0 if not diags else 2
    try:
        cfg = _merge(args)
        reports = run(cfg)
        if cfg.out:
            with open(cfg.out, "w", newline="") as fh:
                export(reports, fh, cfg.format)
        else:
            export(reports, sys.stdout, cfg.format)
    except (InvalidInput, OSError, RuntimeError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    failed = sum(not r.passed for r in reports)
    print(f"{len(reports)} reports, {failed} failed", file=sys.stderr)
    return 1 if failed else 0
