import json

import numpy as np
import pytest

from psigauge.ensembles import (
    KIND_THEOREM1,
    KIND_THEOREM2,
    KIND_THEOREM4,
    ensemble_from_json,
    ensemble_to_json,
    gamma_coefficient,
    scaling_report,
    theorem1_ensemble,
    theorem2_ensemble,
    theorem2_states,
    theorem4_ensemble,
    theorem4_states,
)
from psigauge.exclusion import exclusion_value
from psigauge.qcore import StateVector, born_prob, gram, inner, validate_povm

# delta radius at which the d=2 extremal family sits: 1 - 1/sqrt(2)
DELTA_STAR_D2 = 0.2928932188134524


class TestTheorem1:
    def test_dimension_validation(self):
        with pytest.raises(ValueError):
            theorem1_ensemble(1)

    def test_states_omit_their_own_label(self):
        e = theorem1_ensemble(4)
        for k, s in enumerate(e.states):
            assert s.amplitudes[k] == 0.0

    def test_center_fidelity_closed_form(self):
        for d in (2, 3, 5, 8):
            e = theorem1_ensemble(d)
            target = np.sqrt((d - 1) / d)
            for s in e.states:
                assert abs(abs(inner(s, e.center)) - target) <= 1e-12

    def test_delta_star_d2_frozen(self):
        assert abs(theorem1_ensemble(2).delta_star - DELTA_STAR_D2) < 1e-15

    def test_exclusion_is_exact(self):
        for d in (2, 3, 6):
            e = theorem1_ensemble(d)
            assert exclusion_value(list(e.states), e.measurement) <= 1e-12

    def test_gram_off_diagonal(self):
        # overlap between two omit-one states: (d-2)/(d-1)
        for d in (3, 4, 7):
            g = gram(theorem1_ensemble(d).states)
            off = g[~np.eye(d, dtype=bool)]
            assert np.max(np.abs(off - (d - 2) / (d - 1))) <= 1e-12


class TestTheorem2:
    def test_preconditions(self):
        with pytest.raises(ValueError):
            theorem2_states(2, 1)
        with pytest.raises(ValueError):
            theorem2_states(3, 0)
        with pytest.raises(ValueError):
            theorem2_ensemble(3, 15)  # 3**15 exceeds the amplitude cap

    def test_single_copy_gram_closed_form(self):
        for d, n in ((3, 1), (3, 2), (4, 3), (5, 2)):
            fam = theorem2_states(d, n)
            c = ((d - 2) / (d - 1)) ** (1.0 / n)
            g = gram(fam.states)
            assert np.max(np.abs(np.diag(g) - 1)) <= 1e-12
            off = g[~np.eye(d, dtype=bool)]
            assert np.max(np.abs(off - c)) <= 1e-12

    def test_n_equals_one_matches_the_omit_one_family(self):
        base = theorem1_ensemble(3)
        fam = theorem2_states(3, 1)
        for a, b in zip(fam.states, base.states):
            z = inner(a, b)
            assert abs(abs(z) - 1.0) <= 1e-12

    def test_delta_nd_closed_form(self):
        # independent derivation: 1 - sqrt((1 + (d-1) c)/d)
        for d, n in ((3, 2), (4, 2), (5, 3)):
            c = ((d - 2) / (d - 1)) ** (1.0 / n)
            expected = 1.0 - np.sqrt((1.0 + (d - 1) * c) / d)
            assert abs(theorem2_states(d, n).delta_nd - expected) <= 1e-12

    def test_ensemble_center_fidelity_equals_ball_radius(self):
        e = theorem2_ensemble(3, 2)
        for s in e.states:
            assert abs(abs(inner(s, e.center)) - (1 - e.delta_star)) <= 1e-10

    def test_measurement_is_valid_and_excluding(self):
        e = theorem2_ensemble(4, 2)
        assert validate_povm(e.measurement).passed
        assert exclusion_value(list(e.states), e.measurement) <= 1e-9

    def test_tensor_power_gram(self):
        e = theorem2_ensemble(5, 2)
        g = gram(e.states)
        off = g[~np.eye(5, dtype=bool)]
        assert np.max(np.abs(off - 3 / 4)) <= 1e-10


class TestGammaCoefficient:
    def test_frozen_value_d3(self):
        # (d-1) (ln(d-1) - ln(d-2)) / (2d) at d=3 reduces to ln(2)/3
        assert abs(gamma_coefficient(3) - np.log(2.0) / 3.0) < 1e-15

    def test_requires_d_at_least_three(self):
        with pytest.raises(ValueError):
            gamma_coefficient(2)

    def test_gamma_times_d_approaches_half(self):
        vals = [gamma_coefficient(d) * d for d in (10, 100, 1000, 10_000)]
        errs = [abs(v - 0.5) for v in vals]
        assert errs == sorted(errs, reverse=True)
        assert errs[-1] < 1e-4


class TestTheorem4:
    def test_zero_amplitude_at_own_label(self):
        states, _ = theorem4_states(4, 0.6)
        for k, s in enumerate(states):
            assert abs(s.amplitudes[k]) <= 1e-15

    def test_coefficients_frozen_d3_t_half(self):
        states, center = theorem4_states(3, 0.5)
        # base weight t sqrt(d)/(d-1), split r/sqrt(2) across two slots
        base = 0.5 * np.sqrt(3.0) / 2.0
        r = np.sqrt(1.0 - 0.25 * 3.0 / 2.0)
        first = states[0].amplitudes
        assert abs(first[1] - (base + r / np.sqrt(2.0))) <= 1e-12
        assert abs(first[2] - (base - r / np.sqrt(2.0))) <= 1e-12
        for s in states:
            assert abs(abs(inner(s, center)) - 0.5) <= 1e-12

    def test_states_are_cyclic_shifts(self):
        states, _ = theorem4_states(5, 0.4)
        base = states[0].amplitudes
        for k, s in enumerate(states):
            assert np.allclose(s.amplitudes, np.roll(base, k), atol=1e-15)

    def test_overlap_range_validation(self):
        with pytest.raises(ValueError):
            theorem4_states(3, -0.1)
        with pytest.raises(ValueError):
            theorem4_states(3, 0.9)  # above sqrt(2/3)
        # zero overlap is a legal degenerate corner
        states, center = theorem4_states(3, 0.0)
        assert abs(inner(states[0], center)) <= 1e-12

    def test_d2_only_admits_maximal_overlap(self):
        states, center = theorem4_states(2, 1 / np.sqrt(2))
        assert abs(abs(inner(states[0], center)) - 1 / np.sqrt(2)) <= 1e-12
        with pytest.raises(ValueError):
            theorem4_states(2, 0.5)

    def test_basis_measurement_excludes_exactly(self):
        e = theorem4_ensemble(3, 0.5)
        assert exclusion_value(list(e.states), e.measurement) == 0.0
        assert e.delta_star == 0.5


class TestScalingReport:
    def test_range_validation(self):
        with pytest.raises(ValueError):
            scaling_report(0.0)
        with pytest.raises(ValueError):
            scaling_report(1.0)

    def test_thm1_dim_is_minimal(self):
        r = scaling_report(0.1)
        d = r.thm1_dim
        assert 1 - np.sqrt((d - 1) / d) <= 0.1
        assert 1 - np.sqrt((d - 2) / (d - 1)) > 0.1

    def test_large_radius_needs_only_a_qubit(self):
        assert scaling_report(0.5).thm1_dim == 2

    def test_thm2_copies_is_minimal(self):
        r = scaling_report(0.05)
        n = r.thm2_copies_d3
        assert theorem2_states(3, n).delta_nd <= 0.05
        if n > 1:
            assert theorem2_states(3, n - 1).delta_nd > 0.05

    def test_pbr_copies_formula(self):
        r = scaling_report(0.01)
        assert r.pbr_copies == int(np.ceil(np.sqrt(2.0) * np.log(2.0) / np.sqrt(0.01)))
        assert r.pbr_state_count == 2**r.pbr_copies
        assert "asymptotic" in r.notes


class TestEnsembleJson:
    def test_round_trip_theorem1(self):
        e = theorem1_ensemble(3)
        back = ensemble_from_json(json.loads(json.dumps(ensemble_to_json(e))))
        assert back.kind == KIND_THEOREM1
        assert back.delta_star == e.delta_star
        for a, b in zip(e.states, back.states):
            assert np.array_equal(a.amplitudes, b.amplitudes)
        for a, b in zip(e.measurement.effects, back.measurement.effects):
            assert np.array_equal(a.entries, b.entries)

    def test_round_trip_theorem2_params(self):
        e = theorem2_ensemble(3, 2)
        back = ensemble_from_json(ensemble_to_json(e))
        assert back.kind == KIND_THEOREM2
        assert back.params["n"] == 2
        assert abs(back.params["delta_nd"] - e.params["delta_nd"]) == 0.0

    def test_kind_constants(self):
        assert theorem4_ensemble(3, 0.5).kind == KIND_THEOREM4

    def test_missing_field_rejected(self):
        obj = ensemble_to_json(theorem1_ensemble(2))
        del obj["center"]
        with pytest.raises(ValueError):
            ensemble_from_json(obj)


class TestTamperResistance:
    def test_assembly_check_rejects_wrong_radius(self):
        # the ensemble constructor cross-checks fidelities against delta_star
        e = theorem1_ensemble(3)
        obj = ensemble_to_json(e)
        obj["delta_star"] = 0.5
        from psigauge.qcore import ContractViolation

        with pytest.raises(ContractViolation):
            ensemble_from_json(obj)
