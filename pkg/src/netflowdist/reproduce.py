"""End-to-end scenario runs: generate, measure, cluster, score, and check the expected outcomes.

A run is described by a line-oriented ``key = value`` config::

    scenario = fixed42
    seeds = 0:20
    metrics = nld, gdd, frobenius
    p = 0.8
    t_max = 4
    n_samples = 400
    output_dir = out/fixed42

Outputs (per seed, under ``output_dir/seed_XXXX``): the bundle, one CSV
distance matrix per metric, PPM and PNG heatmaps, similarity matrices,
cluster tables. ``output_dir/report.txt`` lists all of it together with the
scenario assertions; the run passes when every assertion does.
"""

from __future__ import annotations

import statistics
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io as nio
from .clustering import (
    DEFAULT_RESTARTS,
    adjusted_rand_index,
    kmeans_row,
    misclassified,
    replace_diagonal_with_average,
    similarity_matrix,
    spectral_cluster,
    top_eigenvectors,
)
from .distance import METRICS, DisconnectedGraphWarning, make_time_grid, nld_distance, pairwise_distance_matrix
from .errors import DegenerateInputError, InputError
from .generators import (
    BRIDGE_PARAMS,
    absent_bridges,
    add_bridges_variant,
    bridge_deletion_scenario,
    fixed_bridge_scenario,
    two_block_params,
    two_sbm_scenario,
)
from .plotting import plot_eigenvectors, plot_matrix, render_heatmap

SCENARIOS = ("bridge41", "fixed42", "twosbm43", "custom")

_DEFAULTS = {
    "bridge41": dict(t_max=40.0, n_samples=1200, kmeans_rows=(0,), replace_diagonal=False),
    "fixed42": dict(t_max=4.0, n_samples=400, kmeans_rows=(0, 10), replace_diagonal=True),
    "twosbm43": dict(t_max=40.0, n_samples=1200, kmeans_rows=(0,), replace_diagonal=False),
    "custom": dict(t_max=40.0, n_samples=1200, kmeans_rows=(0,), replace_diagonal=False),
}

BRIDGE_PAIR = (1, 5)
BRIDGE_SHARE = 0.9


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    seeds: tuple = (0,)
    metrics: tuple = METRICS
    t_max: float = 40.0
    n_samples: int = 1200
    output_dir: Path = Path("out")
    p: float = 0.8
    p11: float | None = None
    p22: float | None = None
    p12: float | None = None
    bundle: Path | None = None
    k: int = 2
    cluster_seed: int = 0
    restarts: int = DEFAULT_RESTARTS
    kmeans_rows: tuple = (0,)
    replace_diagonal: bool = False
    figures: bool = True

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise InputError(f"unknown scenario {self.scenario!r}; choose from {', '.join(SCENARIOS)}")
        if not self.t_max > 0:
            raise InputError("t_max must be positive")
        if self.n_samples < 2:
            raise InputError("n_samples must be >= 2")
        if not self.metrics or set(self.metrics) - set(METRICS):
            raise InputError(f"metrics must be a nonempty subset of {', '.join(METRICS)}")
        if not self.seeds:
            raise InputError("need at least one seed")
        if self.scenario == "custom" and self.bundle is None:
            raise InputError("custom scenario needs 'bundle = <directory>'")


def _parse_seeds(value: str) -> tuple:
    value = value.strip()
    if ":" in value:
        lo, hi = value.split(":", 1)
        return tuple(range(int(lo), int(hi)))
    return tuple(int(x) for x in value.replace(",", " ").split())


def _parse_bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise InputError(f"expected a boolean, got {value!r}")


def parse_config(text: str, base_dir: Path | None = None) -> RunConfig:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"config line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        raw[key.strip().lower()] = value.strip()
    if "scenario" not in raw:
        raise InputError("config must name a scenario")
    scenario = raw.pop("scenario")
    if scenario not in SCENARIOS:
        raise InputError(f"unknown scenario {scenario!r}; choose from {', '.join(SCENARIOS)}")
    kw = dict(_DEFAULTS[scenario])
    base_dir = base_dir or Path(".")
    try:
        for key, value in raw.items():
            if key == "seed":
                kw["seeds"] = (int(value),)
            elif key == "seeds":
                kw["seeds"] = _parse_seeds(value)
            elif key in ("metrics", "metric"):
                kw["metrics"] = tuple(m.strip() for m in value.replace(",", " ").split())
            elif key in ("t_max", "tmax"):
                kw["t_max"] = float(value)
            elif key in ("n_samples", "samples"):
                kw["n_samples"] = int(value)
            elif key in ("output_dir", "out"):
                kw["output_dir"] = base_dir / value
            elif key == "bundle":
                kw["bundle"] = base_dir / value
            elif key in ("p", "p11", "p22", "p12"):
                kw[key] = float(value)
            elif key in ("k", "cluster_seed", "restarts"):
                kw[key] = int(value)
            elif key == "kmeans_rows":
                kw["kmeans_rows"] = tuple(int(x) for x in value.replace(",", " ").split())
            elif key in ("replace_diagonal", "figures"):
                kw[key] = _parse_bool(value)
            else:
                raise InputError(f"unknown config key {key!r}")
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad config value: {exc}") from None
    return RunConfig(scenario=scenario, **kw)


def load_config(path) -> RunConfig:
    path = Path(path)
    return parse_config(path.read_text(), base_dir=path.parent)


def default_config(scenario: str, **overrides) -> RunConfig:
    return RunConfig(scenario=scenario, **{**_DEFAULTS[scenario], **overrides})


# -- per-seed work -----------------------------------------------------------

def make_bundle(cfg: RunConfig, seed: int):
    if cfg.scenario == "bridge41":
        params = BRIDGE_PARAMS
        if any(x is not None for x in (cfg.p11, cfg.p22, cfg.p12)):
            params = two_block_params(
                cfg.p11 if cfg.p11 is not None else 0.75,
                cfg.p22 if cfg.p22 is not None else 0.6,
                cfg.p12 if cfg.p12 is not None else 0.04,
            )
        return bridge_deletion_scenario(params, seed)
    if cfg.scenario == "fixed42":
        return fixed_bridge_scenario(cfg.p, seed)
    if cfg.scenario == "twosbm43":
        p_in = cfg.p11 if cfg.p11 is not None else 0.8
        p_out = cfg.p12 if cfg.p12 is not None else 0.05
        return two_sbm_scenario(seed, p_in=p_in, p_out=p_out)
    return nio.load_bundle(cfg.bundle)


@dataclass
class SeedResult:
    seed: int
    directory: str
    matrices: dict = field(default_factory=dict)
    files: list = field(default_factory=list)
    clusters: dict = field(default_factory=dict)
    ari: dict = field(default_factory=dict)
    misses: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)


def _vector(labels) -> str:
    return "(" + ",".join(str(int(x) + 1) for x in labels) + ")"


def run_seed(cfg: RunConfig, seed: int) -> SeedResult:
    rel = f"seed_{seed:04d}"
    out = Path(cfg.output_dir) / rel
    out.mkdir(parents=True, exist_ok=True)
    bundle = make_bundle(cfg, seed)
    res = SeedResult(seed, rel)
    nio.save_bundle(bundle, out / "bundle")
    res.files.append(f"{rel}/bundle/{nio.MANIFEST}")
    grid = make_time_grid(cfg.t_max, cfg.n_samples)
    truth = np.array(bundle.ground_truth)
    two_groups = set(truth.tolist()) <= {0, 1}

    for metric in cfg.metrics:
        D = pairwise_distance_matrix(bundle.graphs, metric, grid, labels=bundle.labels)
        res.matrices[metric] = D
        stem = f"{rel}/{metric}"
        nio.save_distance_matrix(D, out / f"{metric}.csv")
        render_heatmap(D, out / f"{metric}.ppm")
        res.files += [f"{stem}.csv", f"{stem}.ppm"]
        if cfg.figures:
            plot_matrix(D, out / f"{metric}.png", title=f"{metric} distance, seed {seed}")
            res.files.append(f"{stem}.png")

        rows_source = replace_diagonal_with_average(D) if cfg.replace_diagonal else D.entries
        for r in cfg.kmeans_rows:
            if r >= D.size:
                continue
            a = kmeans_row(rows_source, r, cfg.k, seed=cfg.cluster_seed, restarts=cfg.restarts)
            key = f"{metric}/kmeans_row{r + 1}"
            res.clusters[key] = a.labels
            res.ari[key] = adjusted_rand_index(a, truth)
            if two_groups and cfg.k == 2:
                res.misses[key] = misclassified(a, truth)
            nio.save_cluster_table(a, bundle.labels, out / f"{metric}_kmeans_row{r + 1}.csv")
            res.files.append(f"{stem}_kmeans_row{r + 1}.csv")

        try:
            S = similarity_matrix(D)
        except DegenerateInputError:
            res.notes.append(f"{metric}: all off-diagonal distances equal; spectral clustering skipped")
            continue
        nio.save_similarity_matrix(S, out / f"{metric}_similarity.csv")
        a = spectral_cluster(S, cfg.k, seed=cfg.cluster_seed, restarts=cfg.restarts)
        key = f"{metric}/spectral"
        res.clusters[key] = a.labels
        res.ari[key] = adjusted_rand_index(a, truth)
        if two_groups and cfg.k == 2:
            res.misses[key] = misclassified(a, truth)
        nio.save_cluster_table(a, bundle.labels, out / f"{metric}_spectral.csv")
        res.files += [f"{stem}_similarity.csv", f"{stem}_spectral.csv"]
        if cfg.figures:
            plot_eigenvectors(
                top_eigenvectors(S.entries, cfg.k), out / f"{metric}_eigenvectors.png",
                labels=bundle.labels, title=f"{metric} similarity eigenvectors",
            )
            res.files.append(f"{stem}_eigenvectors.png")

    if cfg.scenario == "bridge41":
        _bridge_checks(cfg, bundle, grid, res)
    return res


def _bridge_checks(cfg: RunConfig, bundle, grid, res: SeedResult) -> None:
    truth = np.array(bundle.ground_truth)
    bridges = list(BRIDGE_PAIR)
    within = [k for k in range(1, len(bundle)) if k not in bridges]
    if "hamming" in res.matrices:
        H = res.matrices["hamming"].entries
        kids = range(1, len(bundle))
        res.checks["exact_hamming"] = all(H[0, k] == 1 for k in kids) and all(
            H[i, j] == 2 for i in kids for j in kids if i != j
        )
        res.checks["hamming_ties"] = len({H[0, k] for k in kids}) == 1
    if "frobenius" in res.matrices:
        F = res.matrices["frobenius"].entries
        kids = range(1, len(bundle))
        res.checks["exact_frobenius"] = all(F[0, k] == 2.0 for k in kids) and all(
            abs(F[i, j] - 2 * np.sqrt(2)) <= 1e-12 for i in kids for j in kids if i != j
        )
    if "nld" not in res.matrices:
        return
    N = res.matrices["nld"].entries
    res.checks["bridge_discrimination"] = min(N[0, bridges]) > max(N[0, within])
    rows_ok = [
        misclassified(kmeans_row(N, r, 2, seed=cfg.cluster_seed, restarts=cfg.restarts), truth) == 0
        for r in range(len(bundle))
    ]
    res.checks["kmeans_row_g1"] = rows_ok[0]
    res.checks["kmeans_every_row"] = all(rows_ok)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DisconnectedGraphWarning)
        pairs = absent_bridges(bundle, 2)
        g1, g2 = bundle.graphs[0], bundle.graphs[1]
        d0 = nld_distance(g1, g2, grid).total
        one = add_bridges_variant(bundle, pairs[:1])
        d1 = nld_distance(one.graphs[0], one.graphs[1], grid).total
        two = add_bridges_variant(bundle, pairs)
        d2 = nld_distance(two.graphs[0], two.graphs[1], grid).total
    res.checks["bridge_dilution"] = d0 > d1 > d2
    res.notes.append(
        f"dilution d_NLD(G1,G2): original {d0:.6f}, +{pairs[0]} {d1:.6f}, +{pairs[0]}{pairs[1]} {d2:.6f}"
    )


# -- aggregation ---------------------------------------------------------------

@dataclass(frozen=True)
class Assertion:
    name: str
    passed: bool
    detail: str


def _share(results, key) -> tuple[int, int]:
    vals = [r.checks[key] for r in results if key in r.checks]
    return sum(vals), len(vals)


def scenario_assertions(cfg: RunConfig, results: list) -> list:
    out = []
    if cfg.scenario == "bridge41":
        for key in ("exact_hamming", "exact_frobenius"):
            ok, n = _share(results, key)
            if n:
                out.append(Assertion(key, ok == n, f"{ok}/{n} seeds"))
        for key in ("bridge_discrimination", "kmeans_row_g1", "kmeans_every_row", "bridge_dilution"):
            ok, n = _share(results, key)
            if n:
                out.append(Assertion(key, ok >= BRIDGE_SHARE * n, f"{ok}/{n} seeds (need >= {BRIDGE_SHARE:.0%})"))
        ok, n = _share(results, "hamming_ties")
        if n:
            out.append(Assertion("hamming_cannot_discriminate", ok == n, f"{ok}/{n} seeds with all G1 distances tied"))
    elif cfg.scenario == "fixed42":
        medians = {
            m: statistics.median(r.ari[f"{m}/spectral"] for r in results)
            for m in cfg.metrics
            if all(f"{m}/spectral" in r.ari for r in results)
        }
        if "nld" in medians:
            out.append(Assertion("nld_median_ari", medians["nld"] >= 0.9, f"median ARI {medians['nld']:.4f} (need >= 0.9)"))
            for other in ("gdd", "frobenius"):
                if other in medians:
                    out.append(Assertion(
                        f"nld_beats_{other}", medians["nld"] > medians[other],
                        f"median ARI nld {medians['nld']:.4f} vs {other} {medians[other]:.4f}",
                    ))
    elif cfg.scenario == "twosbm43":
        vals = [r.misses["nld/spectral"] for r in results if "nld/spectral" in r.misses]
        if vals:
            ok = sum(v <= 2 for v in vals)
            out.append(Assertion("nld_at_most_2_misses", 2 * ok > len(vals), f"{ok}/{len(vals)} seeds (need a majority)"))
    return out


def format_report(cfg: RunConfig, results: list, assertions: list) -> str:
    lines = [
        nio.VERSION_LINE,
        f"scenario: {cfg.scenario}",
        f"seeds: {' '.join(str(s) for s in cfg.seeds)}",
        f"metrics: {' '.join(cfg.metrics)}",
        f"grid: t_max={nio.fmt_real(cfg.t_max)} n_samples={cfg.n_samples}",
        f"clustering: k={cfg.k} seed={cfg.cluster_seed} restarts={cfg.restarts} "
        f"kmeans_rows={','.join(str(r + 1) for r in cfg.kmeans_rows)} replace_diagonal={cfg.replace_diagonal}",
        "",
    ]
    for r in results:
        lines.append(f"[seed {r.seed}]")
        lines.append("files:")
        lines += [f"  {f}" for f in r.files]
        lines.append("clusters:")
        for key in r.clusters:
            extra = f" misses={r.misses[key]}" if key in r.misses else ""
            lines.append(f"  {key}: {_vector(r.clusters[key])} ARI={r.ari[key]:.6f}{extra}")
        if r.checks:
            lines.append("checks:")
            lines += [f"  {k}: {'pass' if v else 'fail'}" for k, v in r.checks.items()]
        lines += [f"note: {n}" for n in r.notes]
        lines.append("")
    lines.append("assertions:")
    if not assertions:
        lines.append("  (none for this scenario)")
    for a in assertions:
        lines.append(f"  {'PASS' if a.passed else 'FAIL'} {a.name}: {a.detail}")
    overall = all(a.passed for a in assertions)
    lines.append(f"result: {'PASS' if overall else 'FAIL'}")
    return "\n".join(lines) + "\n"


def reproduce(cfg: RunConfig) -> tuple[bool, Path]:
    """Run every seed, write ``report.txt``; returns (all assertions passed, report path)."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DisconnectedGraphWarning)
        results = [run_seed(cfg, s) for s in cfg.seeds]
    assertions = scenario_assertions(cfg, results)
    report = out / "report.txt"
    report.write_text(format_report(cfg, results, assertions))
    return all(a.passed for a in assertions), report

