"""Exact constructions of the antidistinguishable state families, their
conclusive-exclusion measurements, the continuity bounds they certify, and
the resource-scaling comparisons between the different routes.

Each factory returns a :class:`NoGoEnsemble` whose states sit exactly on the
boundary of the fidelity ball around the ensemble center, and whose
measurement never fires outcome k on state k (up to construction residuals).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .qcore import (
    ContractViolation,
    Operator,
    Povm,
    StateVector,
    TENSOR_CAP,
    born_prob,
    inner,
    povm_from_json,
    povm_to_json,
    state_from_json,
    state_to_json,
    tensor_power,
    unitary_from_correspondence,
)

KIND_THEOREM1 = "theorem1"
KIND_THEOREM2 = "theorem2"
KIND_THEOREM4 = "theorem4"


@dataclass(frozen=True)
class NoGoEnsemble:
    """A packaged instance: preparations, exclusion measurement, the center
    state they all hug, and the fidelity-ball radius placing them exactly on
    its boundary. ``params`` records the construction inputs plus derived
    quantities (single-copy bound, Gram level, ...)."""

    kind: str
    params: dict
    states: tuple
    measurement: Povm
    center: StateVector
    delta_star: float


@dataclass(frozen=True)
class ScalingReport:
    """Resource counts needed to reach a target continuity bound by three
    different routes: growing the dimension, growing the copy count at d=3,
    or the product-qubit route (asymptotic formula only)."""

    delta_target: float
    thm1_dim: int
    thm2_copies_d3: int
    pbr_copies: int
    pbr_state_count: int
    notes: str


def _assemble(kind, params, states, measurement, center, delta_star) -> NoGoEnsemble:
    """Bundle an ensemble after verifying its two defining guarantees."""
    target = 1.0 - delta_star
    for k, s in enumerate(states):
        fid = abs(inner(s, center))
        if abs(fid - target) > 1e-10:
            raise ContractViolation(
                f"state {k} sits at fidelity {fid!r}, expected {target!r}"
            )
    excl = sum(born_prob(s, measurement.effects[k]) for k, s in enumerate(states))
    if excl > 1e-9:
        raise ContractViolation(f"exclusion sum {excl:.3e} exceeds 1e-9")
    return NoGoEnsemble(kind, dict(params), tuple(states), measurement, center, delta_star)


def theorem1_ensemble(d: int) -> NoGoEnsemble:
    """The d states that each omit one basis direction, excluded by the
    computational-basis measurement.

    states[k] = (1/sqrt(d-1)) sum_{j != k} |j>; every state has fidelity
    sqrt((d-1)/d) to the uniform center, so the certified ball radius is
    delta_star = 1 - sqrt((d-1)/d).
    """
    if d < 2:
        raise ValueError(f"need dimension >= 2, got {d}")
    states = []
    for k in range(d):
        amps = np.full(d, 1.0, dtype=complex)
        amps[k] = 0.0
        states.append(StateVector(d, amps / np.linalg.norm(amps)))
    delta_star = 1.0 - math.sqrt((d - 1) / d)
    return _assemble(
        KIND_THEOREM1,
        {"d": d},
        states,
        Povm.basis(d),
        StateVector.uniform(d),
        delta_star,
    )


class Theorem2Family(NamedTuple):
    states: tuple
    c: float
    alpha: float
    beta: float
    delta_nd: float


def _delta_from_alpha(d: int, alpha: float) -> float:
    return 1.0 - math.sqrt(1.0 - (d - 1) * alpha * alpha / d)


def theorem2_states(d: int, n: int) -> Theorem2Family:
    """Single-copy states whose n-fold tensor powers have pairwise overlap
    (d-2)/(d-1).

    c = ((d-2)/(d-1))^(1/n) is the single-copy Gram level; the states are
    states[k] = alpha |k> + (beta/sqrt(d)) sum_i |i> with alpha = -sqrt(1-c)
    and beta chosen so each state is normalized. All of them sit at fidelity
    1 - delta_nd from the uniform center, delta_nd = 1 - sqrt(1-(d-1)a^2/d).
    """
    if d < 3:
        raise ValueError(f"need dimension >= 3, got {d}")
    if n < 1:
        raise ValueError(f"need copy count >= 1, got {n}")
    c = ((d - 2) / (d - 1)) ** (1.0 / n)
    alpha = -math.sqrt(1.0 - c)
    beta = -alpha / math.sqrt(d) + math.sqrt(alpha * alpha / d + c)
    states = []
    for k in range(d):
        amps = np.full(d, beta / math.sqrt(d), dtype=complex)
        amps[k] += alpha
        states.append(StateVector(d, amps / np.linalg.norm(amps)))
    return Theorem2Family(tuple(states), c, alpha, beta, _delta_from_alpha(d, alpha))


def theorem2_ensemble(d: int, n: int, cap: int = TENSOR_CAP) -> NoGoEnsemble:
    """n-copy ensemble: tensor powers of the theorem2_states family plus a
    d-outcome measurement on C_(d^n) that never fires outcome k on state k.

    The measurement comes from the isometry V matching the tensor powers to
    the theorem1_ensemble states embedded in C_(d^n) (legitimate because the
    two families share one Gram matrix). With u_k the V-preimage of embedded
    |k>, the effects are E_k = |u_k><u_k| + (1/d)(I - sum_m |u_m><u_m|); the
    complement never fires on the span of the tensor powers, so the
    zero-probability property survives the completion.

    delta_star is the n-copy ball radius 1 - (1 - delta_nd)^n around the
    uniform center of C_(d^n); the single-copy bound delta_nd is in params.
    """
    if d**n > cap:
        raise ValueError(f"tensor dimension {d}**{n} exceeds the cap of {cap} amplitudes")
    family = theorem2_states(d, n)
    big = d**n
    powers = [tensor_power(s, n, cap=cap) for s in family.states]
    reference = theorem1_ensemble(d)
    embedded = []
    for s in reference.states:
        amps = np.zeros(big, dtype=complex)
        amps[:d] = s.amplitudes
        embedded.append(StateVector(big, amps))
    v = unitary_from_correspondence(powers, embedded).entries
    u_vecs = v.conj().T[:, :d]  # column k is the V-preimage of embedded |k>
    complement = (np.eye(big) - u_vecs @ u_vecs.conj().T) / d
    effects = tuple(
        Operator(big, np.outer(u_vecs[:, k], u_vecs[:, k].conj()) + complement)
        for k in range(d)
    )
    delta_star = 1.0 - (1.0 - family.delta_nd) ** n
    params = {
        "d": d,
        "n": n,
        "c": family.c,
        "alpha": family.alpha,
        "beta": family.beta,
        "delta_nd": family.delta_nd,
    }
    return _assemble(
        KIND_THEOREM2,
        params,
        powers,
        Povm(big, effects),
        StateVector.uniform(big),
        delta_star,
    )


def gamma_coefficient(d: int) -> float:
    """Leading coefficient of the large-n continuity bound at dimension d:
    n * delta_nd -> gamma = (d-1)(log(d-1) - log(d-2)) / (2d)."""
    if d < 3:
        raise ValueError(f"need dimension >= 3, got {d}")
    return (d - 1) * (math.log(d - 1) - math.log(d - 2)) / (2 * d)


def theorem4_states(d: int, t: float):
    """Cyclic-shift family of real states at fidelity t from the uniform
    center, each with zero amplitude on one basis direction.

    Coefficients: a_0 = 0 and (a_1, ..., a_(d-1)) = (t sqrt(d)/(d-1)) * ones
    + r * w, where w = (1, -1, 0, ..., 0)/sqrt(2) is a fixed unit vector
    orthogonal to the ones vector and r = sqrt(1 - t^2 d/(d-1)). State k is
    the k-step cyclic shift, so its amplitude at position k vanishes and the
    basis measurement conclusively excludes it. Requires
    0 <= t <= sqrt((d-1)/d); at d = 2 only the extreme point t = 1/sqrt(2)
    is consistent (the orthogonal direction w does not exist in 1 dimension).

    Returns (states, center).
    """
    if d < 2:
        raise ValueError(f"need dimension >= 2, got {d}")
    t_max = math.sqrt((d - 1) / d)
    if not -1e-12 <= t <= t_max + 1e-12:
        raise ValueError(f"fidelity parameter t = {t!r} outside [0, {t_max!r}]")
    t = min(max(t, 0.0), t_max)
    r_sq = 1.0 - t * t * d / (d - 1)
    if d == 2 and r_sq > 1e-12:
        raise ValueError(
            f"at d = 2 only t = {t_max!r} admits real coefficients, got t = {t!r}"
        )
    r = math.sqrt(max(0.0, r_sq))
    coeff = np.full(d, t * math.sqrt(d) / (d - 1))
    coeff[0] = 0.0
    if d >= 3:
        coeff[1] += r / math.sqrt(2.0)
        coeff[2] -= r / math.sqrt(2.0)
    states = []
    for k in range(d):
        amps = np.roll(coeff, k).astype(complex)
        states.append(StateVector(d, amps / np.linalg.norm(amps)))
    return tuple(states), StateVector.uniform(d)


def theorem4_ensemble(d: int, t: float) -> NoGoEnsemble:
    """theorem4_states packaged with the computational-basis measurement."""
    states, center = theorem4_states(d, t)
    return _assemble(
        KIND_THEOREM4, {"d": d, "t": t}, states, Povm.basis(d), center, 1.0 - t
    )


def _thm1_reaches(d: int, delta: float) -> bool:
    return 1.0 - math.sqrt((d - 1) / d) <= delta


def scaling_report(delta_target: float) -> ScalingReport:
    """Resource counts to certify a continuity bound of delta_target.

    thm1_dim and thm2_copies_d3 come from exact predicate searches over the
    closed-form bounds; the product-qubit route is reported from its
    asymptotic formula only (ceil(sqrt(2) ln 2 / sqrt(delta)) copies, 2^n
    states) and is flagged as such in the notes.
    """
    if not 0.0 < delta_target < 1.0:
        raise ValueError(f"delta target must lie in (0, 1), got {delta_target}")
    d = max(2, math.ceil(1.0 / (delta_target * (2.0 - delta_target))))
    while not _thm1_reaches(d, delta_target):
        d += 1
    while d > 2 and _thm1_reaches(d - 1, delta_target):
        d -= 1
    lo, hi = 0, 1
    while theorem2_states(3, hi).delta_nd > delta_target:
        lo = hi
        hi *= 2
        if hi > 2**40:
            raise ValueError(f"copy-count search diverged for delta {delta_target!r}")
    while hi - lo > 1:  # smallest n with delta_nd <= target; delta_nd decreases in n
        mid = (lo + hi) // 2
        if theorem2_states(3, mid).delta_nd <= delta_target:
            hi = mid
        else:
            lo = mid
    pbr_copies = math.ceil(math.sqrt(2.0) * math.log(2.0) / math.sqrt(delta_target))
    return ScalingReport(
        delta_target=delta_target,
        thm1_dim=d,
        thm2_copies_d3=hi,
        pbr_copies=pbr_copies,
        pbr_state_count=2**pbr_copies,
        notes=(
            "dimension and copy counts are exact predicate searches; the "
            "product-qubit route uses its asymptotic formula only"
        ),
    )


def ensemble_to_json(e: NoGoEnsemble) -> dict:
    return {
        "kind": e.kind,
        "params": dict(e.params),
        "states": [state_to_json(s) for s in e.states],
        "measurement": povm_to_json(e.measurement)["effects"],
        "center": state_to_json(e.center),
        "delta_star": e.delta_star,
    }


def ensemble_from_json(obj: dict) -> NoGoEnsemble:
    for key in ("kind", "params", "states", "measurement", "center", "delta_star"):
        if key not in obj:
            raise ValueError(f"ensemble JSON: missing field {key!r}")
    states = tuple(state_from_json(s) for s in obj["states"])
    dim = states[0].dim
    povm = povm_from_json({"dim": dim, "effects": obj["measurement"]})
    # re-verify the boundary-fidelity and exclusion invariants: serialized
    # payloads come from outside and must not bypass construction checks
    return _assemble(
        kind=str(obj["kind"]),
        params=dict(obj["params"]),
        states=states,
        measurement=povm,
        center=state_from_json(obj["center"]),
        delta_star=float(obj["delta_star"]),
    )
