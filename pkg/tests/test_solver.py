import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import mixsynth as mx
from mixsynth.errors import (DimensionMismatchError, PreconditionError,
                             SolverStallError)
from mixsynth.solver import project_simplex, witness_objective

from oracles import ginibre_density, haar_states, qubit_hull_distance_oracle


def random_problem(seed, d=None, m=None, pure_target=False):
    rng = np.random.default_rng(seed)
    d = d or int(rng.choice([2, 3, 4]))
    m = m or int(rng.integers(4, 24))
    if pure_target:
        target = mx.PureState(haar_states(rng, 1, d)[0])
    else:
        target = mx.DensityMatrix(ginibre_density(rng, d))
    cands = [mx.PureState(v) for v in haar_states(rng, m, d)]
    return mx.ConvexApproxProblem(target, cands)


def test_empty_candidates_rejected():
    with pytest.raises(PreconditionError):
        mx.ConvexApproxProblem(mx.meridian_state(0.1), [])


def test_dimension_mismatch_rejected():
    with pytest.raises(DimensionMismatchError):
        mx.ConvexApproxProblem(mx.meridian_state(0.1),
                               [mx.PureState([1.0, 0, 0])])


def test_tol_floor():
    prob = random_problem(0)
    with pytest.raises(PreconditionError):
        mx.solve(prob, tol=1e-10)


def test_known_octahedron_value():
    target = mx.density_from_bloch(np.ones(3) / math.sqrt(3))
    sol = mx.solve(mx.ConvexApproxProblem(target, mx.pauli_eigenstates()),
                   tol=1e-9)
    want = (math.sqrt(3) - 1) / (2 * math.sqrt(3))
    assert abs(sol.value - want) <= 1e-8
    assert sol.gap <= 1e-9


def test_target_inside_hull_gives_zero():
    # maximally mixed qubit is a mixture of any two antipodal candidates
    target = mx.DensityMatrix(np.eye(2, dtype=complex) / 2)
    sol = mx.solve(mx.ConvexApproxProblem(target, mx.pauli_eigenstates()),
                   tol=1e-9)
    assert sol.primal_value <= 1e-9
    assert abs(sol.value) <= 1e-9


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=30, deadline=None)
def test_qubit_value_matches_bloch_hull_oracle(seed):
    prob = random_problem(seed, d=2)
    sol = mx.solve(prob, tol=1e-8)
    want, _ = qubit_hull_distance_oracle(
        prob.target.entries, [c.density().entries for c in prob.candidates])
    assert sol.value == pytest.approx(want, abs=5e-7)


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=25, deadline=None)
def test_certificate_is_sound(seed):
    """Witness spectrum within [0,1]; its objective, recomputed through an
    independent route, reproduces the reported dual value; dual <= primal."""
    prob = random_problem(seed)
    sol = mx.solve(prob, tol=1e-7)
    w = np.linalg.eigvalsh(sol.witness)
    assert w[0] >= -1e-10 and w[-1] <= 1.0 + 1e-10
    recomputed = witness_objective(sol.witness, prob.target, prob.candidates)
    assert recomputed == pytest.approx(sol.dual_value, abs=1e-9)
    assert sol.dual_value <= sol.primal_value + 1e-12
    assert sol.gap <= 1e-7
    # reported mixture really achieves the primal value
    sigma = sum(p * c.density().entries
                for p, c in zip(sol.p, prob.candidates))
    diff = np.linalg.eigvalsh(prob.target.entries - sigma)
    assert sol.primal_value == pytest.approx(diff[diff > 0].sum(), abs=1e-9)


def test_solution_serialization_contract():
    sol = mx.solve(random_problem(3), tol=1e-7)
    d = sol.to_dict()
    assert set(d) == {"value", "gap", "p", "witness", "primal", "dual",
                      "iterations"}
    assert d["value"] == d["dual"]
    assert set(d["witness"]) == {"re", "im"}
    assert d["gap"] == pytest.approx(d["primal"] - d["dual"], abs=1e-15)
    re = np.array(d["witness"]["re"])
    im = np.array(d["witness"]["im"])
    assert np.allclose(re + 1j * im, sol.witness)
    assert sum(d["p"]) == pytest.approx(1.0, abs=1e-12)


def test_stall_carries_bracket():
    prob = random_problem(4, d=4, m=40)
    with pytest.raises(SolverStallError) as exc:
        mx.solve(prob, tol=1e-9, budget=5)
    sol = exc.value.solution
    assert sol.dual_value <= sol.primal_value
    assert sol.gap > 1e-9


def test_symmetric_problem_keeps_certificate():
    theta = mx.group_closure(
        [mx.SymmetryElement(np.eye(2), antiunitary=True)])
    target = mx.meridian_state(0.9)
    cands = [mx.meridian_state(t) for t in np.linspace(0, np.pi, 7)]
    sol = mx.solve(mx.ConvexApproxProblem(target, cands, symmetry=theta),
                   tol=1e-9)
    # symmetrized witness commutes with conjugation: real entries
    assert np.abs(sol.witness.imag).max() < 1e-9
    assert sol.gap <= 1e-9


def test_noninvariant_target_rejected_with_symmetry():
    theta = mx.group_closure(
        [mx.SymmetryElement(np.eye(2), antiunitary=True)])
    y_plus = mx.PureState(np.array([1.0, 1.0j]) / math.sqrt(2))
    with pytest.raises(PreconditionError):
        mx.ConvexApproxProblem(y_plus, mx.pauli_eigenstates(), symmetry=theta)


def test_symmetrize_witness_never_decreases_on_invariant_problem():
    theta = mx.group_closure(
        [mx.SymmetryElement(np.eye(2), antiunitary=True)])
    target = mx.meridian_state(0.4)
    cands = [mx.meridian_state(t) for t in (0.0, 0.7, 1.9)]
    m = np.array([[0.8, 0.1 + 0.05j], [0.1 - 0.05j, 0.3]])
    before = witness_objective(m, target, cands)
    after = witness_objective(mx.symmetrize_witness(m, theta), target, cands)
    assert after >= before - 1e-12


def test_restrict_support_requires_pure_target():
    prob = random_problem(5, d=2, pure_target=False)
    with pytest.raises(PreconditionError):
        mx.restrict_support(prob, 0.2)


def test_restrict_support_empty_result_raises():
    target = mx.PureState([1.0, 0.0])
    far = [mx.PureState([0.0, 1.0])]
    with pytest.raises(PreconditionError):
        mx.restrict_support(mx.ConvexApproxProblem(target, far), 0.05)


def test_restrict_support_keeps_near_candidates_only():
    target = mx.meridian_state(0.0)
    cands = [mx.meridian_state(t) for t in (0.05, 0.1, 0.8, 1.4)]
    sub = mx.restrict_support(mx.ConvexApproxProblem(target, cands), 0.08)
    kept = {round(float(np.arccos(np.clip(c.amplitudes[0].real, -1, 1))), 2)
            for c in sub.candidates}
    assert kept == {0.05, 0.1}


def test_sandwich_check_pauli_octahedron():
    corners = [mx.density_from_bloch(np.array(s) / math.sqrt(3))
               for s in [(x, y, z) for x in (1, -1) for y in (1, -1)
                         for z in (1, -1)]]
    target = mx.density_from_bloch(np.ones(3) / math.sqrt(3))
    res = mx.sandwich_check(target, mx.pauli_eigenstates(), corners,
                            tol=1e-9)
    assert res.value == pytest.approx((math.sqrt(3) - 1) / (2 * math.sqrt(3)),
                                      abs=1e-8)
    assert res.nearest_distance ** 2 <= res.value + 1e-9
    assert res.covering_radius >= res.nearest_distance - 1e-12


@given(st.lists(st.floats(-50, 50, allow_nan=False), min_size=1, max_size=12))
def test_project_simplex_properties(v):
    p = project_simplex(np.array(v))
    assert p.min() >= 0.0
    assert p.sum() == pytest.approx(1.0, abs=1e-9)
    assert np.allclose(project_simplex(p), p, atol=1e-12)


def test_project_simplex_fixed_points():
    for p in ([1.0], [0.25, 0.75], [0.2, 0.3, 0.5]):
        assert np.allclose(project_simplex(np.array(p)), p, atol=1e-12)
