"""Finite-shot simulation of the purity measurement.

Every (preparation level, protocol run) is an independent Bernoulli trial,
so success counts are binomial. Random streams are derived from
``(seed, repeat, level, stream)`` with :class:`numpy.random.SeedSequence`;
changing the shot count of one level never reshuffles another.

In ``"harvested"`` mode the ancillas are not prepared independently: a
fraction of the target ensemble is measured in level n, affirmative
outcomes are kept as ancillas in ``|n><n|``, and the same counts give the
estimate of the target population ``p_n``.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .algebra import build_generators
from .exceptions import InsufficientAncillaError
from .protocol import (
    ESTIMATORS,
    EstimateReport,
    check_estimators,
    estimate,
    evaluate_estimator,
    measure_protocol,
)
from .states import purity_exact, random_density, read_state, require_physical

ANCILLA_MODES = ("independent", "harvested")
CSV_HEADER = ("level", "shots", "successes", "target_shots", "target_successes")

_ANCILLA_STREAM = 0
_TARGET_STREAM = 1


@dataclass(frozen=True)
class ShotRecord:
    level: int
    shots: int
    successes: int
    target_shots: int = 0
    target_successes: int = 0

    def __post_init__(self):
        if not 0 <= self.successes <= self.shots:
            raise ValueError(f"successes {self.successes} not in [0, {self.shots}]")
        if not 0 <= self.target_successes <= self.target_shots:
            raise ValueError(
                f"target_successes {self.target_successes} not in [0, {self.target_shots}]"
            )

    @property
    def ancilla_frequency(self) -> float:
        return self.successes / self.shots

    @property
    def target_frequency(self) -> float:
        return self.target_successes / self.target_shots


@dataclass(frozen=True)
class HarvestResult:
    level: int
    attempts: int
    prepared: int

    @property
    def population_estimate(self) -> float:
        return self.prepared / self.attempts


@dataclass
class ExperimentConfig:
    """One unit of work for :func:`run_experiment`.

    The target state comes from ``state_path`` if set, otherwise it is drawn
    with :func:`random_density` using ``random_rank`` (default: full rank)
    and ``state_seed`` (default: ``seed``). ``harvest_attempts`` is the
    number of target systems measured per level in harvested mode; it
    defaults to ``2 * dim * shots_per_level``.
    """

    dim: int
    shots_per_level: int = 10_000
    ancilla_mode: str = "independent"
    seed: int = 0
    estimators: Sequence[str] | None = None
    state_path: str | None = None
    random_rank: int | None = None
    state_seed: int | None = None
    harvest_attempts: int | None = None
    exact: bool = False
    bias_corrected: bool = False

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"dim must be >= 2, got {self.dim}")
        if self.shots_per_level < 1:
            raise ValueError(f"shots_per_level must be >= 1, got {self.shots_per_level}")
        if self.ancilla_mode not in ANCILLA_MODES:
            raise ValueError(f"ancilla_mode must be one of {ANCILLA_MODES}")
        if self.harvest_attempts is not None and self.harvest_attempts < 1:
            raise ValueError("harvest_attempts must be >= 1")
        self.estimators = tuple(check_estimators(self.estimators, self.dim))

    @property
    def attempts_per_level(self) -> int:
        if self.harvest_attempts is not None:
            return self.harvest_attempts
        return 2 * self.dim * self.shots_per_level

    def load_state(self) -> np.ndarray:
        if self.state_path is not None:
            rho = read_state(self.state_path)
            if rho.shape[0] != self.dim:
                raise ValueError(f"state file has dim {rho.shape[0]}, config says {self.dim}")
            return rho
        seed = self.seed if self.state_seed is None else self.state_seed
        return random_density(self.dim, self.random_rank, seed)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["estimators"] = list(self.estimators)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        return cls(**data)


def level_rng(seed: int, level: int, stream: int, repeat: int = 0) -> np.random.Generator:
    """Independent generator for one (repeat, level, stream) triple."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(repeat, level, stream)))


def _binomial(rng: np.random.Generator, n: int, p: float) -> int:
    return int(rng.binomial(n, min(max(p, 0.0), 1.0)))


def sample_protocol(
    rho,
    n: int,
    shots: int,
    seed=None,
    *,
    target_shots: int | None = None,
    probability: float | None = None,
) -> ShotRecord:
    """Simulate ``shots`` protocol runs with the ancilla prepared in level ``n``.

    Successes count the runs where the ancilla is found back in ``n``.
    ``target_shots`` direct measurements of the target are also simulated
    (default: as many as ``shots``). ``probability`` overrides the exact
    return probability, e.g. for synthetic tests.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rho = require_physical(rho, name="target state")
    if probability is None:
        probability = measure_protocol(rho, intermediate=False).ancilla_populations[n]
    target_shots = shots if target_shots is None else target_shots
    rng = np.random.default_rng(seed)
    successes = _binomial(rng, shots, probability)
    target_successes = _binomial(rng, target_shots, rho[n, n].real)
    return ShotRecord(n, shots, successes, target_shots, target_successes)


def harvest_ancilla(rho, n: int, attempts: int, seed=None) -> HarvestResult:
    """Measure ``attempts`` target copies in level ``n`` and keep the hits."""
    if attempts < 1:
        raise ValueError(f"attempts must be >= 1, got {attempts}")
    rho = require_physical(rho, name="target state")
    rng = np.random.default_rng(seed)
    return HarvestResult(n, attempts, _binomial(rng, attempts, rho[n, n].real))


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    records: list[ShotRecord]
    estimates: list[EstimateReport]
    exact_purity: float
    repeat: int = 0

    def estimate_for(self, name: str) -> EstimateReport:
        for e in self.estimates:
            if e.name == name:
                return e
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "records": [asdict(r) for r in self.records],
            "estimates": [e.to_dict() for e in self.estimates],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentReport":
        estimates = [EstimateReport.from_dict(e) for e in data["estimates"]]
        exact = estimates[0].exact if estimates else float("nan")
        return cls(
            config=ExperimentConfig.from_dict(data["config"]),
            records=[ShotRecord(**r) for r in data["records"]],
            estimates=estimates,
            exact_purity=exact,
        )


def records_to_csv(records: Sequence[ShotRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow([getattr(r, col) for col in CSV_HEADER])
    return buf.getvalue()


def records_from_csv(text: str) -> list[ShotRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return [ShotRecord(**{k: int(v) for k, v in row.items()}) for row in reader]


def _std_error(name: str, P, p, var_P, var_p, gens, step: float = 1e-6) -> float:
    """First-order propagation of binomial variances through an estimator.

    The estimators are quadratic in (P, p), so central differences give the
    gradient up to rounding.
    """
    grad_P = np.empty_like(P)
    grad_p = np.empty_like(p)
    for vec, grad in ((P, grad_P), (p, grad_p)):
        for k in range(len(vec)):
            orig = vec[k]
            vec[k] = orig + step
            hi = evaluate_estimator(name, P, p, gens, strict=False)
            vec[k] = orig - step
            lo = evaluate_estimator(name, P, p, gens, strict=False)
            vec[k] = orig
            grad[k] = (hi - lo) / (2 * step)
    return float(np.sqrt(grad_P**2 @ var_P + grad_p**2 @ var_p))


def bias_corrected_populations(P_hat, p_hat, target_shots) -> float:
    """Populations estimator with ``p_n^2`` replaced by its unbiased estimate."""
    p_hat = np.asarray(p_hat, dtype=float)
    T = np.asarray(target_shots, dtype=float)
    p_sq = p_hat**2 - p_hat * (1 - p_hat) / np.maximum(T - 1, 1)
    N = len(p_hat)
    return (N + 3) / 2 + float(p_sq.sum()) - 2 * float(np.sum(P_hat))


def run_experiment(config: ExperimentConfig, rho=None, repeat: int = 0) -> ExperimentReport:
    """Run the protocol for every level and feed the selected estimators.

    With ``config.exact`` no sampling happens and the estimates are the
    noiseless ones from :func:`puritymeter.protocol.estimate`.

    Raises
    ------
    InsufficientAncillaError
        In harvested mode, when some level yields fewer ancillas than
        ``shots_per_level``.
    """
    rho = config.load_state() if rho is None else require_physical(rho, name="target state")
    N = config.dim
    if rho.shape != (N, N):
        raise ValueError(f"state has dim {rho.shape[0]}, config says {N}")
    exact_purity = purity_exact(rho).exact
    outcome = measure_protocol(rho, intermediate=False)

    if config.exact:
        reports = estimate(outcome, config.estimators, exact_purity)
        for r in reports:
            r.std_error = 0.0
        return ExperimentReport(config, [], reports, exact_purity, repeat)

    M = config.shots_per_level
    records = []
    for n in range(N):
        target_rng = level_rng(config.seed, n, _TARGET_STREAM, repeat)
        ancilla_rng = level_rng(config.seed, n, _ANCILLA_STREAM, repeat)
        p_n = outcome.target_populations[n]
        if config.ancilla_mode == "harvested":
            attempts = config.attempts_per_level
            harvest = HarvestResult(n, attempts, _binomial(target_rng, attempts, p_n))
            if harvest.prepared < M:
                raise InsufficientAncillaError(
                    f"level {n}: harvested {harvest.prepared} ancillas from {attempts} "
                    f"attempts, need {M}"
                )
            target_shots, target_successes = attempts, harvest.prepared
        else:
            target_shots, target_successes = M, _binomial(target_rng, M, p_n)
        successes = _binomial(ancilla_rng, M, outcome.ancilla_populations[n])
        records.append(ShotRecord(n, M, successes, target_shots, target_successes))

    P_hat = np.array([r.ancilla_frequency for r in records])
    p_hat = np.array([r.target_frequency for r in records])
    var_P = P_hat * (1 - P_hat) / np.array([r.shots for r in records])
    var_p = p_hat * (1 - p_hat) / np.array([r.target_shots for r in records])
    gens = build_generators(N)
    reports = []
    for name in config.estimators:
        value = evaluate_estimator(name, P_hat, p_hat, gens, strict=False)
        err = _std_error(name, P_hat.copy(), p_hat.copy(), var_P, var_p, gens)
        reports.append(EstimateReport(name, value, exact_purity, ESTIMATORS[name].inputs_used, err))
    if config.bias_corrected:
        value = bias_corrected_populations(P_hat, p_hat, [r.target_shots for r in records])
        err = _std_error("populations", P_hat.copy(), p_hat.copy(), var_P, var_p, gens)
        reports.append(
            EstimateReport("populations-corrected", value, exact_purity,
                           "as populations, with p_n^2 bias removed", err)
        )
    return ExperimentReport(config, records, reports, exact_purity, repeat)


def run_repeats(config: ExperimentConfig, repeats: int, rho=None) -> list[ExperimentReport]:
    """Independent repetitions of one experiment, ordered by repeat index."""
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    rho = config.load_state() if rho is None else rho
    return [run_experiment(config, rho, repeat=r) for r in range(repeats)]


def summarize(reports: Sequence[ExperimentReport]) -> dict:
    """Mean and empirical spread of each estimator over repetitions."""
    out = {}
    for e in reports[0].estimates:
        values = np.array([r.estimate_for(e.name).value for r in reports])
        std = float(values.std(ddof=1)) if len(values) > 1 else 0.0
        out[e.name] = {
            "mean": float(values.mean()),
            "std": std,
            "std_error_of_mean": std / np.sqrt(len(values)),
            "exact": e.exact,
        }
    return out


def simulation_to_dict(reports: Sequence[ExperimentReport]) -> dict:
    """JSON document for one or many repetitions of the same experiment."""
    if len(reports) == 1:
        return reports[0].to_dict()
    return {
        "config": reports[0].config.to_dict(),
        "repeats": [
            {
                "repeat": r.repeat,
                "records": [asdict(rec) for rec in r.records],
                "estimates": [e.to_dict() for e in r.estimates],
            }
            for r in reports
        ],
        "summary": summarize(reports),
    }


def simulation_from_dict(data: dict) -> list[ExperimentReport]:
    if "repeats" not in data:
        return [ExperimentReport.from_dict(data)]
    config = data["config"]
    reports = []
    for entry in data["repeats"]:
        report = ExperimentReport.from_dict(
            {"config": config, "records": entry["records"], "estimates": entry["estimates"]}
        )
        report.repeat = entry["repeat"]
        reports.append(report)
    return reports
