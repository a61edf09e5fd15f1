import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qshock.scenario import (Detector, EmitterState, SchemaError,
                             ValidationError, classical_mixture, load_scenario,
                             scenario_fingerprint, w_state)

from conftest import three_emitter_config


class TestDetector:
    def test_defaults(self):
        d = Detector((0, 0, 0), 1.0, 1.0)
        assert d.smearing_radius == 0.5
        assert d.gap == 2.0

    def test_negative_radius_rejected(self):
        with pytest.raises(ValidationError, match="smearing_radius"):
            Detector((0, 0, 0), 1.0, 1.0, smearing_radius=-0.1)

    def test_negative_strength_rejected(self):
        with pytest.raises(ValidationError, match="coupling_strength"):
            Detector((0, 0, 0), 1.0, -0.5)

    def test_immutable(self):
        d = Detector((0, 0, 0), 1.0, 1.0)
        with pytest.raises(Exception):
            d.coupling_time = 2.0


class TestWState:
    def test_single_qubit_is_excited_state(self):
        state = w_state(1, [0.0])
        (w, vec), = state.components
        assert w == 1.0
        assert vec == (0j, 1 + 0j)  # index 1 = |e>

    def test_three_equal_phases(self):
        state = w_state(3, [0.0, 0.0, 0.0])
        vec = np.array(state.components[0][1])
        amp = 1.0 / math.sqrt(3.0)
        # emitter 1 = MSB: |egg> = 4, |geg> = 2, |gge> = 1
        assert vec[4] == pytest.approx(amp)
        assert vec[2] == pytest.approx(amp)
        assert vec[1] == pytest.approx(amp)
        assert np.count_nonzero(vec) == 3

    def test_four_with_pi_pattern(self):
        state = w_state(4, [0.0, 0.0, math.pi, math.pi])
        vec = np.array(state.components[0][1])
        assert vec[8] == pytest.approx(0.5)
        assert vec[4] == pytest.approx(0.5)
        assert vec[2] == pytest.approx(-0.5)
        assert vec[1] == pytest.approx(-0.5)

    def test_zero_emitters_rejected(self):
        with pytest.raises(ValueError):
            w_state(0, [])

    @given(n=st.integers(1, 8),
           data=st.data())
    def test_unit_norm_for_all_phases(self, n, data):
        phases = data.draw(st.lists(st.floats(-10, 10), min_size=n, max_size=n))
        vec = np.array(w_state(n, phases).components[0][1])
        assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-12)


class TestClassicalMixture:
    def test_single(self):
        state = classical_mixture(1)
        assert len(state.components) == 1
        assert state.components[0][0] == 1.0

    def test_three_components(self):
        state = classical_mixture(3)
        assert len(state.components) == 3
        assert all(w == pytest.approx(1 / 3) for w, _ in state.components)

    def test_components_match_w_state_support(self):
        # mixture components sit exactly on the superposition's support
        n = 4
        mix = classical_mixture(n)
        wvec = np.array(w_state(n, [0.3, 1.1, -0.4, 2.2]).components[0][1])
        support = set(np.flatnonzero(np.abs(wvec) > 0).tolist())
        for _, vec in mix.components:
            idx = int(np.flatnonzero(np.abs(np.array(vec)) > 0)[0])
            assert idx in support
        assert sum(w for w, _ in mix.components) == pytest.approx(1.0, abs=1e-12)

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            classical_mixture(0)


class TestEmitterState:
    def test_norm_enforced(self):
        with pytest.raises(ValidationError, match="norm"):
            EmitterState.pure([0.5, 0.5])

    def test_weights_must_sum_to_one(self):
        good = np.array([1.0, 0.0])
        with pytest.raises(ValidationError, match="weights"):
            EmitterState.mixture([(0.6, good), (0.6, good)])


class TestLoadScenario:
    def test_three_emitter_example(self):
        scn = load_scenario(three_emitter_config())
        assert scn.n_emitters == 3
        assert [e.position[0] for e in scn.emitters] == [5.0, 6.5, 8.0]
        assert [e.coupling_time for e in scn.emitters] == [1.0, 2.0, 3.0]
        assert all(e.coupling_strength == 1.0 for e in scn.emitters)
        assert all(e.gap == 2.0 for e in scn.emitters)          # default applied
        assert all(e.smearing_radius == 0.5 for e in scn.emitters)
        assert scn.evaluation_time == 8.0

    def test_vacuum_scenario(self):
        cfg = json.dumps({
            "receiver": {"position": [0, 0, 0], "time": 1.0, "lambda": 2.0},
            "evaluation_time": 2.0})
        scn = load_scenario(cfg)
        assert scn.n_emitters == 0
        assert len(scn.emitter_state.components[0][1]) == 1

    def test_negative_radius_names_field(self):
        cfg = json.dumps({
            "emitters": [{"position": [0, 0, 0], "time": 0, "lambda": 1,
                          "radius": -1}],
            "receiver": {"position": [1, 0, 0], "time": 1, "lambda": 1},
            "state": {"type": "w", "phases": [0]},
            "evaluation_time": 2})
        with pytest.raises(ValidationError, match=r"emitters\[0\].smearing_radius"):
            load_scenario(cfg)

    def test_invalid_json_reports_line(self):
        with pytest.raises(SchemaError, match="line"):
            load_scenario("{\n  broken\n}")

    def test_unknown_field_rejected(self):
        cfg = json.dumps({
            "receiver": {"position": [0, 0, 0], "time": 1, "lambda": 1},
            "evaluation_time": 2, "typo_field": 1})
        with pytest.raises(SchemaError, match="typo_field"):
            load_scenario(cfg)

    def test_phase_count_mismatch(self):
        cfg = json.dumps({
            "emitters": [{"position": [0, 0, 0], "time": 0, "lambda": 1}],
            "receiver": {"position": [1, 0, 0], "time": 1, "lambda": 1},
            "state": {"type": "w", "phases": [0, 0]},
            "evaluation_time": 2})
        with pytest.raises(SchemaError, match="phases"):
            load_scenario(cfg)

    def test_pure_state_roundtrip(self):
        amp = 1 / math.sqrt(2)
        cfg = json.dumps({
            "emitters": [{"position": [0, 0, 0], "time": 0, "lambda": 1}],
            "receiver": {"position": [1, 0, 0], "time": 1, "lambda": 1},
            "state": {"type": "pure", "amplitudes": [[amp, 0], [0, amp]]},
            "evaluation_time": 2})
        scn = load_scenario(cfg)
        vec = np.array(scn.emitter_state.components[0][1])
        assert vec[0] == pytest.approx(amp)
        assert vec[1] == pytest.approx(amp * 1j)

    def test_bundled_scenarios_parse(self):
        from pathlib import Path
        root = Path(__file__).resolve().parents[1] / "scenarios"
        for cfg in sorted(root.glob("*.cfg")):
            scn = load_scenario(cfg.read_text())
            assert scn.receiver.coupling_strength == 2.0


class TestFingerprint:
    def test_deterministic_and_sensitive(self):
        a = load_scenario(three_emitter_config())
        b = load_scenario(three_emitter_config())
        c = load_scenario(three_emitter_config(phases=(0.0, 0.0, 0.1)))
        assert scenario_fingerprint(a) == scenario_fingerprint(b)
        assert scenario_fingerprint(a) != scenario_fingerprint(c)
