import math

import numpy as np
import pytest

import mixsynth as mx
from mixsynth.errors import (CoveringValidityError, InsufficientLibraryError,
                             PreconditionError)
from mixsynth.synthesis import (Circuit, SynthesisConfig, conjugate_circuit,
                                deterministic_synthesize, enumerate_library,
                                probabilistic_synthesize, tcount_experiment)

from oracles import trace_distance_oracle

S2 = 1.0 / math.sqrt(2.0)
GATES = {
    "H": np.array([[S2, S2], [S2, -S2]], dtype=complex),
    "T": np.diag([1.0, np.exp(1j * math.pi / 4)]),
    "S": np.diag([1.0, 1j]),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0, -1.0]),
}


def word_state_oracle(word):
    """Apply the word to |0> with plain numpy matrices, first letter last."""
    vec = np.array([1.0, 0.0], dtype=complex)
    for letter in reversed(word):
        vec = GATES[letter] @ vec
    return vec


def assert_same_ray(a, b, tol=1e-12):
    assert abs(abs(np.vdot(a, b)) - 1.0) < tol


def test_circuit_word_semantics():
    for word in ("", "H", "HT", "TH", "HTSHX", "YTZHTS"):
        c = Circuit(word)
        assert_same_ray(c.realized_state().amplitudes, word_state_oracle(word))


def test_t_count():
    assert Circuit("").t_count == 0
    assert Circuit("HSZ").t_count == 0
    assert Circuit("THTH").t_count == 2
    assert Circuit("TTTTTTT").t_count == 7


def test_invalid_letters_rejected():
    with pytest.raises(PreconditionError):
        Circuit("HQ")


def test_conjugate_circuit_realizes_conjugate_state():
    for word in ("H", "TH", "HTSH", "THTSHX", "YHT"):
        c = Circuit(word)
        cc = conjugate_circuit(c)
        assert cc.t_count == c.t_count
        assert_same_ray(cc.realized_state().amplitudes,
                        c.realized_state().amplitudes.conj())


def test_conjugate_rewrite_letters():
    # conjugation commutes with every letter of the rewritten word
    out = conjugate_circuit(Circuit("T")).word
    assert set(out) <= set("HTSXYZ")


class TestLibrary:
    def test_entries_are_deduplicated_rays(self, small_library):
        amps = np.stack([s.amplitudes for s, _ in small_library.entries()])
        ov = np.abs(amps @ amps.conj().T) ** 2
        np.fill_diagonal(ov, 0.0)
        assert ov.max() < 1.0 - 1e-12

    def test_entries_realize_their_circuits(self, small_library):
        for state, circuit in small_library.entries()[::17]:
            assert_same_ray(state.amplitudes,
                            word_state_oracle(circuit.word), tol=1e-10)

    def test_entries_respect_caps(self, small_library):
        for state, circuit in small_library.entries():
            assert circuit.t_count <= 5
            assert len(circuit.word) <= 16

    def test_nearest_matches_brute_force(self, small_library):
        rng = np.random.default_rng(8)
        amps = np.stack([s.amplitudes for s, _ in small_library.entries()])
        for _ in range(20):
            g = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            target = mx.PureState(g / np.linalg.norm(g))
            _, state, dist = small_library.nearest(target)
            ov = np.abs(amps @ target.amplitudes.conj()) ** 2
            want = math.sqrt(max(0.0, 1.0 - ov.max()))
            assert dist == pytest.approx(want, abs=1e-12)

    def test_cheapest_within_prefers_low_t_count(self, small_library):
        target = mx.meridian_state(0.3)
        hit = small_library.cheapest_within(target, 0.5)
        assert hit is not None
        circuit, _, dist = hit
        assert dist <= 0.5
        for state, other in small_library.entries():
            if mx.trace_distance(target, state) <= 0.5:
                assert other.t_count >= circuit.t_count

    def test_save_load_round_trip(self, small_library, tmp_path):
        path = tmp_path / "lib.jsonl"
        small_library.save(str(path))
        loaded = mx.SynthesisLibrary.load(str(path))
        assert len(loaded) == len(small_library)
        a = small_library.nearest(mx.meridian_state(1.2))
        b = loaded.nearest(mx.meridian_state(1.2))
        assert a[2] == pytest.approx(b[2], abs=1e-12)
        assert a[0].word == b[0].word


def test_deterministic_synthesize_nearest_contract(full_library):
    target = mx.meridian_state(0.6)
    circuit, state = deterministic_synthesize(full_library, target, 0.1)
    assert mx.trace_distance(target, state) <= 0.1
    _, _, nearest_dist = full_library.nearest(target)
    assert mx.trace_distance(target, state) == pytest.approx(nearest_dist,
                                                             abs=1e-12)
    assert_same_ray(state.amplitudes, word_state_oracle(circuit.word),
                    tol=1e-10)


def test_deterministic_synthesize_insufficient(small_library):
    with pytest.raises(InsufficientLibraryError) as exc:
        deterministic_synthesize(small_library, mx.meridian_state(0.8), 1e-5)
    assert exc.value.best_error > 1e-5


class TestProbabilisticSynthesize:
    def test_meridian_quadratic_error(self, full_library):
        for t in (0.45, 1.7, 2.8):
            target = mx.meridian_state(t)
            ens = probabilistic_synthesize(full_library, target, 0.1)
            assert ens.achieved_error <= 0.1**2 + 1e-6
            assert len(ens.items) <= 6
            assert sum(p for p, _, _ in ens.items) == pytest.approx(1.0)

    def test_achieved_error_matches_oracle(self, full_library):
        target = mx.meridian_state(1.1)
        ens = probabilistic_synthesize(full_library, target, 0.15)
        mix = sum(p * np.outer(s.amplitudes, s.amplitudes.conj())
                  for p, _, s in ens.items)
        assert ens.achieved_error == pytest.approx(
            trace_distance_oracle(target.density().entries, mix), abs=1e-12)

    def test_exact_library_hit_returns_point_mass(self, full_library):
        ens = probabilistic_synthesize(full_library,
                                       mx.PureState([1.0, 0.0]), 0.1)
        assert len(ens.items) == 1
        assert ens.items[0][0] == 1.0
        assert ens.achieved_error <= 1e-9

    def test_non_meridian_target_rejected_by_default_config(self, full_library):
        off_meridian = mx.PureState(
            [math.cos(0.3), math.sin(0.3) * np.exp(0.9j)])
        with pytest.raises(PreconditionError):
            probabilistic_synthesize(full_library, off_meridian, 0.1)

    def test_exact_hit_bypasses_family_check(self, full_library):
        # y+ is realized exactly (word "SH"), so no covering is needed
        ens = probabilistic_synthesize(full_library,
                                       mx.PureState(np.array([1, 1j]) * S2),
                                       0.1)
        assert len(ens.items) == 1
        assert ens.achieved_error <= 1e-9

    def test_trivial_group_serves_generic_targets(self, full_library):
        config = SynthesisConfig(group="trivial")
        rng = np.random.default_rng(17)
        g = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        target = mx.PureState(g / np.linalg.norm(g))
        ens = probabilistic_synthesize(full_library, target, 0.15, config)
        assert ens.achieved_error <= 0.15**2 + 1e-6

    def test_insufficient_library_carries_best_error(self, small_library):
        with pytest.raises(InsufficientLibraryError) as exc:
            probabilistic_synthesize(small_library, mx.meridian_state(0.8),
                                     0.02)
        assert exc.value.best_error > 0.0

    def test_covering_validity_for_large_eps(self, full_library):
        # c=0.7 three-point covering is only valid up to eps^2 = 0.07
        with pytest.raises((CoveringValidityError, PreconditionError)):
            probabilistic_synthesize(full_library, mx.meridian_state(0.8),
                                     math.sqrt(0.08))

    def test_sampling_follows_weights(self, full_library):
        ens = probabilistic_synthesize(full_library, mx.meridian_state(2.2),
                                       0.2)
        rng = np.random.default_rng(0)
        words = [c.word for _, c, _ in ens.items]
        counts = {w: 0 for w in words}
        for _ in range(4000):
            circuit, _ = ens.sample(rng)
            counts[circuit.word] += 1
        for (p, c, _), w in zip(ens.items, words):
            assert counts[c.word] / 4000 == pytest.approx(p, abs=0.05)

    def test_to_dict_contract(self, full_library):
        d = probabilistic_synthesize(full_library, mx.meridian_state(0.5),
                                     0.1).to_dict()
        assert {"achieved_error", "certified_gap", "support_size",
                "max_t_count", "items"} == set(d)
        assert d["support_size"] == len(d["items"])
        for item in d["items"]:
            assert {"p", "word", "t_count", "state"} == set(item)


def test_tcount_experiment_row_contract(full_library):
    rows = tcount_experiment([0.3, 0.9], [0.01, 0.04], full_library)
    assert len(rows) == 4
    for row in rows:
        assert {"target_t", "target_error", "det_tcount", "det_error",
                "prob_max_tcount", "prob_error", "support_size",
                "det_ok", "prob_ok"} <= set(row)
        if row["prob_ok"]:
            assert row["prob_error"] <= row["target_error"] + 1e-6
        if row["det_ok"]:
            assert row["det_error"] <= row["target_error"]


def test_synthesis_config_validation():
    with pytest.raises(PreconditionError):
        SynthesisConfig(c=0.9, c_prime=0.2)
    with pytest.raises(PreconditionError):
        SynthesisConfig(c=-0.1)
    with pytest.raises(PreconditionError):
        SynthesisConfig(group="dihedral")
    with pytest.raises(PreconditionError):
        SynthesisConfig(delta=0.0)
