"""Monte-Carlo campaigns: generate, initialize, run every method, write CSVs.

Layout of an output directory::

    manifest.json           config echo, PRNG, versions, clock, failures
    summary.csv             one row per method
    traces/run_0000.csv     run, method, k, t_seconds, F
    h_last/run_0000_RMU.csv final H of each method
"""

import configparser
import csv
import json
import platform
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .initialization import NNSVD_VARIANTS, initialize
from .methods import Method
from .metrics import summarize_campaign
from .model import GramCache, ProblemInstance
from .solvers import FlopClock, SolverConfig, SolverTrace, WallClock, run_solver
from .synthetic import PRNG_NAME, DatasetSpec, generate

TRACE_COLUMNS = ["run", "method", "k", "t_seconds", "F"]
SUMMARY_COLUMNS = [
    "method", "mean_F", "std_F", "rank1", "rank2", "rank3", "rank4",
    "median_sparsity_pct", "mean_auc",
]


@dataclass
class CampaignConfig:
    m: int = 20
    n: int = 100
    r: int = 3
    s: float = 0.6
    sigma: float = 0.0
    seed: int = 0
    runs: int = 10
    k_max: int = 1_000_000
    t_max: float = 5.0
    methods: tuple = tuple(Method)
    lambda_override: Optional[float] = None
    out_dir: str = "campaign_out"
    parallel_runs: bool = False
    deterministic_clock: bool = False
    flops_per_second: float = 1e8
    quartic_penalty_factor: float = 0.5
    nnsvd_variant: str = "nndsvda"

    def __post_init__(self):
        self.methods = tuple(Method.parse(m) for m in self.methods)
        if not self.methods:
            raise ValueError("methods must be nonempty")
        if len(set(self.methods)) != len(self.methods):
            raise ValueError("duplicate methods")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.nnsvd_variant not in NNSVD_VARIANTS:
            raise ValueError(f"unknown nnsvd_variant {self.nnsvd_variant!r}")
        # validates m, n, r, s, sigma
        self.dataset_spec(0)
        self.solver_config()

    def dataset_spec(self, run):
        return DatasetSpec(self.m, self.n, self.r, self.s, self.sigma, self.seed + run)

    def solver_config(self):
        return SolverConfig(
            k_max=self.k_max,
            t_max=self.t_max,
            quartic_penalty_factor=self.quartic_penalty_factor,
        )

    def make_clock(self):
        return FlopClock(self.flops_per_second) if self.deterministic_clock else WallClock()

    def as_dict(self):
        d = asdict(self)
        d["methods"] = [m.value for m in self.methods]
        return d


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_config(text):
    """Parse a flat ``key = value`` file into a :class:`CampaignConfig`.

    ``#`` starts a comment. ``methods`` is a comma-separated list.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.optionxform = str
    cp.read_string("[campaign]\n" + text)
    known = {f.name: f for f in fields(CampaignConfig)}
    kwargs = {}
    for key, raw in cp["campaign"].items():
        if key not in known:
            raise ValueError(f"unknown config key {key!r}")
        raw = raw.strip()
        if key == "methods":
            kwargs[key] = tuple(x for x in (s.strip() for s in raw.split(",")) if x)
        elif key == "lambda_override":
            kwargs[key] = None if raw.lower() in ("", "none") else float(raw)
        elif key in ("parallel_runs", "deterministic_clock"):
            kwargs[key] = _parse_bool(raw)
        elif key in ("m", "n", "r", "seed", "runs", "k_max"):
            kwargs[key] = int(float(raw)) if "e" in raw.lower() else int(raw)
        elif key in ("out_dir", "nnsvd_variant"):
            kwargs[key] = raw
        else:
            kwargs[key] = float(raw)
    return CampaignConfig(**kwargs)


def load_config(path):
    return parse_config(Path(path).read_text())


@dataclass
class RunResult:
    run: int
    seed: int
    lam: float = float("nan")
    traces: dict = field(default_factory=dict)
    error: Optional[str] = None


@dataclass
class CampaignOutput:
    config: CampaignConfig
    results: list
    summary: list
    out_dir: Path

    @property
    def completed(self):
        return [r for r in self.results if r.error is None]


def run_single(cfg, run):
    """One Monte-Carlo repetition: every method on the same instance, start
    point and penalty."""
    spec = cfg.dataset_spec(run)
    res = RunResult(run=run, seed=spec.seed)
    try:
        data = generate(spec)
        bundle = initialize(data.X, data.W_true, cfg.r, cfg.nnsvd_variant)
        lam = bundle.lam if cfg.lambda_override is None else cfg.lambda_override
        inst = ProblemInstance(data.X, data.W_true, lam)
        cache = GramCache.from_instance(inst)
        scfg = cfg.solver_config()
        res.lam = float(lam)
        for method in cfg.methods:
            res.traces[method] = run_solver(
                method, inst, bundle.H_init, scfg, cache=cache, clock=cfg.make_clock()
            )
    except Exception as exc:  # a failed run is recorded, the campaign goes on
        res.error = f"{type(exc).__name__}: {exc}"
        res.traces = {}
    return res


def _fmt(x):
    return repr(float(x))


def emit_traces(results, out_dir):
    tdir = Path(out_dir) / "traces"
    hdir = Path(out_dir) / "h_last"
    tdir.mkdir(parents=True, exist_ok=True)
    hdir.mkdir(parents=True, exist_ok=True)
    for res in results:
        if res.error is not None:
            continue
        with open(tdir / f"run_{res.run:04d}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(TRACE_COLUMNS)
            for method, tr in res.traces.items():
                for k, (t, F) in enumerate(zip(tr.times, tr.values)):
                    w.writerow([res.run, method.value, k, _fmt(t), _fmt(F)])
        for method, tr in res.traces.items():
            np.savetxt(
                hdir / f"run_{res.run:04d}_{method.value}.csv",
                tr.H_last, delimiter=",", fmt="%.17g",
            )


def emit_summary(summary, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_COLUMNS)
        for row in summary:
            w.writerow(
                [row.method.value, _fmt(row.mean_F), _fmt(row.std_F), *row.ranks,
                 _fmt(row.median_sparsity_pct), _fmt(row.mean_auc)]
            )
    return path


def _manifest(cfg, results):
    clock = (
        {"type": "flop", "flops_per_second": cfg.flops_per_second}
        if cfg.deterministic_clock
        else {"type": "wall", "source": "time.perf_counter",
              "resolution_s": WallClock.resolution}
    )
    return {
        "config": cfg.as_dict(),
        "prng": PRNG_NAME,
        "stream_order": ["W_true", "H_true", "mask", "E"],
        "run_seeds": [r.seed for r in results],
        "lambdas": [r.lam for r in results],
        "failed_runs": {r.run: r.error for r in results if r.error},
        "solver_errors": {
            f"{r.run}/{m.value}": tr.error
            for r in results for m, tr in r.traces.items() if tr.error
        },
        "software": {
            "oblique_rmu": __version__,
            "numpy": np.__version__,
            "python": sys.version.split()[0],
        },
        "host": {"platform": platform.platform(), "processor": platform.processor()},
        "clock": clock,
    }


def run_campaign(cfg, write=True):
    if cfg.parallel_runs:
        # timing-distorting: solver loops overlap in wall-clock time
        with ProcessPoolExecutor() as pool:
            results = list(pool.map(run_single, [cfg] * cfg.runs, range(cfg.runs)))
    else:
        results = [run_single(cfg, i) for i in range(cfg.runs)]
    done = [r.traces for r in results if r.error is None]
    summary = summarize_campaign(done, cfg.t_max) if done else []
    out = Path(cfg.out_dir)
    if write:
        out.mkdir(parents=True, exist_ok=True)
        emit_traces(results, out)
        emit_summary(summary, out / "summary.csv")
        (out / "manifest.json").write_text(json.dumps(_manifest(cfg, results), indent=2))
    return CampaignOutput(config=cfg, results=results, summary=summary, out_dir=out)


def load_traces(out_dir):
    """Rebuild ``[{method: SolverTrace}]`` from a campaign directory."""
    out = Path(out_dir)
    runs = {}
    for path in sorted((out / "traces").glob("run_*.csv")):
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                run, method = int(row["run"]), Method(row["method"])
                tr = runs.setdefault(run, {}).get(method)
                if tr is None:
                    H = np.loadtxt(
                        out / "h_last" / f"run_{run:04d}_{method.value}.csv",
                        delimiter=",", ndmin=2,
                    )
                    tr = SolverTrace(method, [], [], H, 0)
                    runs[run][method] = tr
                tr.times.append(float(row["t_seconds"]))
                tr.values.append(float(row["F"]))
                tr.iterations = int(row["k"])
    return [runs[k] for k in sorted(runs)]


def summarize_dir(out_dir, t_horizon=None):
    out = Path(out_dir)
    if t_horizon is None:
        manifest = json.loads((out / "manifest.json").read_text())
        t_horizon = manifest["config"]["t_max"]
    runs = load_traces(out)
    if not runs:
        raise FileNotFoundError(f"no trace files under {out / 'traces'}")
    return summarize_campaign(runs, t_horizon)
