"""Experiment driver: configuration, replication engine, reports.

A configuration fixes a Gaussian model, a missingness model, a list of
events and a replication budget.  Each replication r derives two
substreams from (master_seed, r) — one for the path, one for the
indicators — so results are bit-identical for any worker count and any
scheduling.  Event hits are aggregated as integer counts, compared
against the limit laws (and the exact one-factor value when available),
and written as CSV plus a JSON mirror, both carrying the configuration
hash so distinct configurations can never silently share a report file.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, GapExtremesError
from .events import CompiledEvents, Event, parse_event, theory_finite_n, theory_limit
from .gaussian import FAMILIES, CovarianceSpec, GaussianModel, build_model, sample_path
from .lambdalaw import LambdaLaw
from .limit_laws import LimitLawParams
from .missingness import MissingnessModel, fixed_pattern, sample_indicators
from .streams import substream

__all__ = [
    "ExperimentConfig",
    "EstimateRecord",
    "ReportRow",
    "ComparisonReport",
    "parse_config",
    "config_hash",
    "estimate_event_probability",
    "compare_estimates",
    "run_experiment",
    "evaluate_theory",
    "write_report",
]

CI99_Z = 2.5758293035489004  # two-sided 99% normal quantile

CSV_COLUMNS = (
    "event_id",
    "n",
    "gamma",
    "lambda_law",
    "reps",
    "p_hat",
    "se",
    "theory_limit",
    "theory_finite_n",
    "z_limit",
    "z_finite_n",
    "pass",
    "config_hash",
)


# ---------------------------------------------------------------------------
# configuration


def _require_keys(doc: dict, required: set[str], optional: set[str], where: str) -> None:
    keys = set(doc)
    if keys - required - optional:
        raise ConfigError(f"{where}: unknown keys {sorted(keys - required - optional)}")
    if required - keys:
        raise ConfigError(f"{where}: missing keys {sorted(required - keys)}")


def parse_lambda_law(doc: dict) -> LambdaLaw:
    _require_keys(doc, {"kind"}, {"p", "values", "weights", "a", "b", "alpha", "beta"}, "lambda_law")
    kind = doc["kind"]
    try:
        if kind == "point":
            _require_keys(doc, {"kind", "p"}, set(), "lambda_law")
            return LambdaLaw.point(doc["p"])
        if kind == "discrete":
            _require_keys(doc, {"kind", "values", "weights"}, set(), "lambda_law")
            return LambdaLaw.discrete(doc["values"], doc["weights"])
        if kind == "uniform":
            _require_keys(doc, {"kind", "a", "b"}, set(), "lambda_law")
            return LambdaLaw.uniform(doc["a"], doc["b"])
        if kind == "beta":
            _require_keys(doc, {"kind", "alpha", "beta"}, set(), "lambda_law")
            return LambdaLaw.beta(doc["alpha"], doc["beta"])
    except GapExtremesError as exc:
        raise ConfigError(f"lambda_law: {exc}") from exc
    raise ConfigError(f"lambda_law: unknown kind {kind!r}")


def _parse_missingness(doc: dict) -> MissingnessModel:
    _require_keys(doc, {"kind"}, {"p", "lambda_law", "pattern"}, "missingness")
    kind = doc["kind"]
    try:
        if kind == "iid_bernoulli":
            _require_keys(doc, {"kind", "p"}, set(), "missingness")
            return MissingnessModel.iid_bernoulli(doc["p"])
        if kind == "exchangeable":
            _require_keys(doc, {"kind", "lambda_law"}, set(), "missingness")
            return MissingnessModel.exchangeable(parse_lambda_law(doc["lambda_law"]))
        if kind == "periodic":
            _require_keys(doc, {"kind", "pattern"}, set(), "missingness")
            return MissingnessModel.periodic(str(doc["pattern"]))
    except GapExtremesError as exc:
        raise ConfigError(f"missingness: {exc}") from exc
    raise ConfigError(f"missingness: unknown kind {kind!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    spec: CovarianceSpec
    n: int
    missingness: MissingnessModel
    events: tuple[Event, ...]
    reps: int
    master_seed: int
    workers: int = 1
    sigma: float = 4.0
    report_name: str = "report"
    out_dir: str = "reports"
    doc: dict | None = None

    def build_model(self) -> GaussianModel:
        return build_model(self.n, self.spec)

    def limit_params(self) -> LimitLawParams:
        return LimitLawParams(self.spec.gamma, self.missingness.limit_law())

    def hash(self) -> str:
        return config_hash(self.doc)


def parse_config(doc: dict) -> ExperimentConfig:
    """Validate a configuration document.  Unknown keys are errors."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    _require_keys(
        doc,
        {"model", "missingness", "targets", "reps", "master_seed"},
        {"workers", "sigma", "report_name", "out_dir"},
        "config",
    )
    model_doc = doc["model"]
    _require_keys(model_doc, {"family", "n"}, {"gamma", "shift"}, "model")
    family = model_doc["family"]
    if family not in FAMILIES:
        raise ConfigError(f"model: unknown family {family!r}")
    try:
        spec_kwargs = {"family": family, "gamma": float(model_doc.get("gamma", 0.0))}
        if "shift" in model_doc:
            if family != "log_decay":
                raise ConfigError("model: 'shift' applies to the log_decay family only")
            spec_kwargs["shift"] = float(model_doc["shift"])
        spec = CovarianceSpec(**spec_kwargs)
        n = int(model_doc["n"])
        build_model(n, spec)  # fail fast on bad (n, spec)
    except GapExtremesError as exc:
        raise ConfigError(f"model: {exc}") from exc

    missing = _parse_missingness(doc["missingness"])
    if not isinstance(doc["targets"], list) or not doc["targets"]:
        raise ConfigError("targets must be a nonempty list")
    events = tuple(parse_event(e) for e in doc["targets"])
    seen = set()
    for event in events:
        if event.event_id in seen:
            raise ConfigError(f"duplicate event id {event.event_id!r}")
        seen.add(event.event_id)

    reps = int(doc["reps"])
    if reps < 1:
        raise ConfigError(f"reps must be >= 1, got {doc['reps']}")
    workers = int(doc.get("workers", 1))
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    sigma = float(doc.get("sigma", 4.0))
    if sigma <= 0:
        raise ConfigError(f"sigma must be positive, got {sigma}")
    return ExperimentConfig(
        spec=spec,
        n=n,
        missingness=missing,
        events=events,
        reps=reps,
        master_seed=int(doc["master_seed"]),
        workers=workers,
        sigma=sigma,
        report_name=str(doc.get("report_name", "report")),
        out_dir=str(doc.get("out_dir", "reports")),
        doc=doc,
    )


def config_hash(doc: dict) -> str:
    """Hash of the experiment identity.

    Execution-only keys (worker count, report basename) are excluded: they
    cannot change row content, and reports must be byte-identical across
    worker counts.
    """
    identity = {k: v for k, v in doc.items() if k not in ("workers", "report_name")}
    canonical = json.dumps(identity, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(canonical).hexdigest()[:12]


# ---------------------------------------------------------------------------
# estimates and comparisons


@dataclass(frozen=True)
class EstimateRecord:
    event_id: str
    p_hat: float
    reps: int
    se: float
    ci_low: float
    ci_high: float


def estimate_from_count(event_id: str, hits: int, reps: int) -> EstimateRecord:
    if reps < 1:
        raise ConfigError(f"reps must be >= 1, got {reps}")
    p = hits / reps
    se = math.sqrt(p * (1.0 - p) / reps)
    return EstimateRecord(
        event_id=event_id,
        p_hat=p,
        reps=reps,
        se=se,
        ci_low=max(0.0, p - CI99_Z * se),
        ci_high=min(1.0, p + CI99_Z * se),
    )


def estimate_event_probability(samples, reps: int | None = None) -> EstimateRecord:
    """Binomial estimate from a stream of event indicators."""
    arr = np.fromiter((bool(s) for s in samples), dtype=bool)
    if reps is not None and len(arr) != reps:
        raise ConfigError(f"indicator stream has {len(arr)} entries, expected {reps}")
    return estimate_from_count("", int(arr.sum()), len(arr))


def compare_estimates(
    est: EstimateRecord, theory: float, sigma_threshold: float = 4.0
) -> tuple[float, bool]:
    """z-score of the estimate against a theoretical probability and the
    pass flag at the sigma threshold."""
    if not 0.0 <= theory <= 1.0:
        raise ConfigError(f"theory value must lie in [0,1], got {theory}")
    if est.se > 0.0:
        z = (est.p_hat - theory) / est.se
    else:
        z = 0.0 if est.p_hat == theory else math.inf
    return z, abs(z) <= sigma_threshold


# ---------------------------------------------------------------------------
# the replication engine


def _simulate_range(config: ExperimentConfig, lo: int, hi: int) -> np.ndarray:
    model = config.build_model()
    compiled = CompiledEvents(config.events, config.n)
    counts = np.zeros(len(config.events), dtype=np.int64)
    seed = config.master_seed
    for r in range(lo, hi):
        path = sample_path(model, substream(seed, r, "path"))
        ind = sample_indicators(config.missingness, config.n, substream(seed, r, "indicators"))
        counts += compiled(path.values, ind.eps.astype(bool))
    return counts


def _worker(payload: tuple[dict, int, int]) -> np.ndarray:
    doc, lo, hi = payload
    return _simulate_range(parse_config(doc), lo, hi)


def simulate_event_counts(config: ExperimentConfig) -> np.ndarray:
    """Total event hit counts over all replications.

    Counts are integers summed in chunk order, so the result does not
    depend on the worker count or on scheduling.
    """
    if config.workers == 1:
        return _simulate_range(config, 0, config.reps)
    chunk = max(1, -(-config.reps // (config.workers * 4)))
    ranges = [(lo, min(lo + chunk, config.reps)) for lo in range(0, config.reps, chunk)]
    payloads = [(config.doc, lo, hi) for lo, hi in ranges]
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        partials = list(pool.map(_worker, payloads))
    total = np.zeros(len(config.events), dtype=np.int64)
    for part in partials:
        total += part
    return total


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class ReportRow:
    event_id: str
    n: int
    gamma: float
    lambda_law: str
    reps: int
    p_hat: float | None
    se: float | None
    theory_limit: float | None
    theory_finite_n: float | None
    z_limit: float | None
    z_finite_n: float | None
    passed: bool


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[ReportRow, ...]
    config_hash: str
    sigma: float

    def all_pass(self) -> bool:
        return all(row.passed for row in self.rows)

    def to_csv(self) -> str:
        lines = [",".join(CSV_COLUMNS)]
        for row in self.rows:
            lines.append(
                ",".join(
                    (
                        row.event_id,
                        str(row.n),
                        _fmt(row.gamma),
                        row.lambda_law,
                        str(row.reps),
                        _fmt(row.p_hat),
                        _fmt(row.se),
                        _fmt(row.theory_limit),
                        _fmt(row.theory_finite_n),
                        _fmt(row.z_limit),
                        _fmt(row.z_finite_n),
                        "true" if row.passed else "false",
                        self.config_hash,
                    )
                )
            )
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "config_hash": self.config_hash,
            "sigma": self.sigma,
            "rows": [
                {
                    "event_id": row.event_id,
                    "n": row.n,
                    "gamma": row.gamma,
                    "lambda_law": row.lambda_law,
                    "reps": row.reps,
                    "p_hat": row.p_hat,
                    "se": row.se,
                    "theory_limit": row.theory_limit,
                    "theory_finite_n": row.theory_finite_n,
                    "z_limit": row.z_limit,
                    "z_finite_n": row.z_finite_n,
                    "pass": row.passed,
                    "config_hash": self.config_hash,
                }
                for row in self.rows
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _fmt(value: float | None) -> str:
    if value is None:
        return ""
    if value != value:  # NaN
        return "nan"
    return format(value, ".17g")


def _event_theory(config: ExperimentConfig, event: Event) -> tuple[float | None, float | None]:
    params = config.limit_params()
    limit = theory_limit(event, params)
    finite = None
    if config.spec.family == "one_factor" and config.missingness.is_deterministic():
        pattern = fixed_pattern(config.missingness, config.n)
        finite = theory_finite_n(event, config.n, config.spec.gamma, pattern)
    return limit, finite


def evaluate_theory(config: ExperimentConfig) -> ComparisonReport:
    """Theory-only report: no simulation columns filled in."""
    rows = []
    law = config.missingness.limit_law().describe()
    for event in config.events:
        limit, finite = _event_theory(config, event)
        rows.append(
            ReportRow(
                event_id=event.event_id,
                n=config.n,
                gamma=config.spec.gamma,
                lambda_law=law,
                reps=0,
                p_hat=None,
                se=None,
                theory_limit=limit,
                theory_finite_n=finite,
                z_limit=None,
                z_finite_n=None,
                passed=True,
            )
        )
    return ComparisonReport(rows=tuple(rows), config_hash=config.hash(), sigma=config.sigma)


def run_experiment(config: ExperimentConfig) -> ComparisonReport:
    """Simulate, estimate, attach theory, and compare.

    The pass flag tests the estimate against the exact finite-n value when
    one exists, otherwise against the limit value; events with no theory
    pass vacuously (they still report their estimates).
    """
    counts = simulate_event_counts(config)
    law = config.missingness.limit_law().describe()
    rows = []
    for event, hits in zip(config.events, counts):
        est = estimate_from_count(event.event_id, int(hits), config.reps)
        limit, finite = _event_theory(config, event)
        z_limit = z_finite = None
        passed = True
        if limit is not None:
            z_limit, ok = compare_estimates(est, limit, config.sigma)
            passed = ok
        if finite is not None:
            z_finite, ok = compare_estimates(est, finite, config.sigma)
            passed = ok  # exact theory takes precedence over the limit
        rows.append(
            ReportRow(
                event_id=event.event_id,
                n=config.n,
                gamma=config.spec.gamma,
                lambda_law=law,
                reps=config.reps,
                p_hat=est.p_hat,
                se=est.se,
                theory_limit=limit,
                theory_finite_n=finite,
                z_limit=z_limit,
                z_finite_n=z_finite,
                passed=passed,
            )
        )
    return ComparisonReport(rows=tuple(rows), config_hash=config.hash(), sigma=config.sigma)


def write_report(report: ComparisonReport, out_dir: str, name: str) -> tuple[str, str]:
    """Write CSV and JSON mirrors named by the config hash; returns paths."""
    os.makedirs(out_dir, exist_ok=True)
    base = f"{name}-{report.config_hash}"
    csv_path = os.path.join(out_dir, base + ".csv")
    json_path = os.path.join(out_dir, base + ".json")
    with open(csv_path, "w", newline="") as fh:
        fh.write(report.to_csv())
    with open(json_path, "w", newline="") as fh:
        fh.write(report.to_json())
    return csv_path, json_path
