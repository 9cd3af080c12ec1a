import numpy as np
import pytest

from psigauge.ontic import DiscreteOnticModel


def haar_state(rng: np.random.Generator, dim: int):
    from psigauge.qcore import StateVector

    raw = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(dim, raw / np.linalg.norm(raw))


def random_discrete_model(seed: int) -> DiscreteOnticModel:
    """Arbitrary model whose measurements all have one outcome per
    preparation (the regime where the exclusion bound is a theorem)."""
    rng = np.random.default_rng(seed)
    lam = int(rng.integers(1, 9))
    n_prep = int(rng.integers(2, 6))
    preps = {}
    for k in range(n_prep):
        weights = rng.dirichlet(rng.uniform(0.2, 3.0, size=lam))
        # occasionally force sparse supports
        if lam > 1 and rng.random() < 0.4:
            weights[rng.integers(0, lam)] = 0.0
            weights /= weights.sum()
        preps[f"q{k}"] = weights
    resps = {}
    for m in range(int(rng.integers(1, 4))):
        if rng.random() < 0.3:
            # deterministic responder
            table = np.zeros((lam, n_prep))
            table[np.arange(lam), rng.integers(0, n_prep, size=lam)] = 1.0
        else:
            table = rng.dirichlet(np.ones(n_prep), size=lam)
        resps[f"m{m}"] = table
    return DiscreteOnticModel(lam, preps, resps)


@pytest.fixture(scope="session")
def ks_100k():
    from psigauge.ontic import ks_qubit_model

    return ks_qubit_model(100_000)
