"""Finite-shot simulation of the exclusion tests under noise.

The noise model is depolarizing (weight p on the maximally mixed state)
followed by a uniform outcome flip (weight q on the uniform outcome
distribution). The overlap bound uses exact one-sided Clopper-Pearson
intervals with a union bound across the d excluded outcomes; zero-count
cells dominate these experiments and exact intervals are much tighter
there than Hoeffding-style bounds. The choice of statistical procedure is
recorded in every report via the confidence field and, for multi-copy
ensembles, the preparation-independence flag.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.stats import beta

from .ensembles import KIND_THEOREM2, NoGoEnsemble
from .qcore import ContractViolation, Povm, StateVector, born_prob, validate_povm


@dataclass(frozen=True)
class NoiseSpec:
    depolarizing_p: float
    outcome_flip_q: float

    def __post_init__(self):
        for name, value in (
            ("depolarizing_p", self.depolarizing_p),
            ("outcome_flip_q", self.outcome_flip_q),
        ):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class EstimateReport:
    ensemble_kind: str
    shots_per_preparation: int
    counts: np.ndarray  # (preparations, outcomes) integer matrix
    epsilon_exp_hat: float
    epsilon_upper_bound: float
    confidence: float
    n_copies: int
    epsilon_single_copy_bound: float
    assumes_preparation_independence: bool
    seed: int


def noisy_outcome_distribution(
    state: StateVector, povm: Povm, noise: NoiseSpec
) -> np.ndarray:
    """Outcome distribution on the depolarized state, then mixed with the
    uniform outcome distribution with weight q."""
    report = validate_povm(povm)
    if not report.passed:
        raise ContractViolation(
            "invalid POVM: hermiticity error "
            f"{report.hermiticity_error:.3e}, min eigenvalue "
            f"{report.min_eigenvalue:.3e}, completeness error "
            f"{report.completeness_error:.3e}"
        )
    p = noise.depolarizing_p
    q = noise.outcome_flip_q
    dim = povm.dim
    n_out = povm.outcome_count
    probs = np.empty(n_out)
    for r, effect in enumerate(povm.effects):
        born = born_prob(state, effect)
        mixed = float(np.trace(effect.entries).real) / dim
        probs[r] = (1.0 - p) * born + p * mixed
    probs = (1.0 - q) * probs + q / n_out
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def _clopper_pearson_upper(successes: int, trials: int, significance: float) -> float:
    """Exact one-sided upper confidence limit for a binomial proportion."""
    if successes >= trials:
        return 1.0
    return float(beta.ppf(1.0 - significance, successes + 1, trials - successes))


def run_protocol(
    ensemble: NoGoEnsemble,
    noise: NoiseSpec,
    shots: int,
    confidence: float = 0.95,
    seed: int = 0,
) -> EstimateReport:
    """Sample multinomial counts per preparation and bound the overlap.

    epsilon_exp_hat sums the empirical frequencies of each preparation's
    paired outcome. The upper bound sums per-term Clopper-Pearson limits at
    significance (1 - confidence)/d, a union bound over the d terms. For an
    n-copy ensemble the single-copy bound is the n-th root of the bound,
    valid only if the n copies are prepared independently; the report says
    so explicitly.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must lie in (0, 1), got {confidence}")
    d = len(ensemble.states)
    children = np.random.SeedSequence(seed).spawn(d)
    count_rows = []
    for k, state in enumerate(ensemble.states):
        dist = noisy_outcome_distribution(state, ensemble.measurement, noise)
        rng = np.random.default_rng(children[k])
        count_rows.append(rng.multinomial(shots, dist))
    counts = np.array(count_rows)
    counts.flags.writeable = False

    eps_hat = float(sum(counts[k][k] for k in range(d))) / shots
    per_term = (1.0 - confidence) / d
    eps_upper = float(
        sum(_clopper_pearson_upper(int(counts[k][k]), shots, per_term) for k in range(d))
    )

    n_copies = int(ensemble.params.get("n", 1)) if ensemble.kind == KIND_THEOREM2 else 1
    if n_copies > 1:
        single = eps_upper ** (1.0 / n_copies)
        independent = True
    else:
        single = eps_upper
        independent = False
    return EstimateReport(
        ensemble_kind=ensemble.kind,
        shots_per_preparation=shots,
        counts=counts,
        epsilon_exp_hat=eps_hat,
        epsilon_upper_bound=eps_upper,
        confidence=confidence,
        n_copies=n_copies,
        epsilon_single_copy_bound=single,
        assumes_preparation_independence=independent,
        seed=seed,
    )


def report_to_json(report: EstimateReport) -> dict:
    return {
        "ensemble_kind": report.ensemble_kind,
        "shots_per_preparation": report.shots_per_preparation,
        "counts": [[int(c) for c in row] for row in report.counts],
        "epsilon_exp_hat": report.epsilon_exp_hat,
        "epsilon_upper_bound": report.epsilon_upper_bound,
        "confidence": report.confidence,
        "n_copies": report.n_copies,
        "epsilon_single_copy_bound": report.epsilon_single_copy_bound,
        "assumes_preparation_independence": report.assumes_preparation_independence,
        "seed": report.seed,
    }


SWEEP_FIELDS = (
    "family",
    "dim",
    "copies",
    "noise_p",
    "noise_q",
    "shots",
    "eps_hat",
    "eps_upper",
    "confidence",
    "seed",
)


def sweep(
    factory: Callable[[int, int], NoGoEnsemble],
    grid: Sequence[tuple],
    noise: NoiseSpec,
    shots: int,
    confidence: float = 0.95,
    seed: int = 0,
) -> list:
    """One protocol run per (dim, copies) grid point; row i uses seed + i."""
    if not grid:
        raise ValueError("parameter grid must be nonempty")
    rows = []
    for index, (dim, copies) in enumerate(grid):
        ensemble = factory(int(dim), int(copies))
        report = run_protocol(ensemble, noise, shots, confidence, seed + index)
        rows.append(
            {
                "family": report.ensemble_kind,
                "dim": int(dim),
                "copies": report.n_copies,
                "noise_p": noise.depolarizing_p,
                "noise_q": noise.outcome_flip_q,
                "shots": shots,
                "eps_hat": report.epsilon_exp_hat,
                "eps_upper": report.epsilon_upper_bound,
                "confidence": confidence,
                "seed": seed + index,
            }
        )
    return rows


def sweep_to_csv(rows: Sequence[dict]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=SWEEP_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()
