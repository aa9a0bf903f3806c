import math

import numpy as np
import pytest

import crn
from crn import (
    classify_state,
    det_rates,
    drift,
    integrate,
    is_equilibrium,
    parse_network,
    reaction_vector_classes,
    same_compatibility_class,
    solve_complex_balanced,
    solve_rvb,
    solve_reaction_balanced,
    system_cycle_balanced,
)
from crn.errors import NonFiniteStateError, NotReversibleError, NotWeaklyReversibleError

from helpers import random_conservative_reversible_system


TRIANGLE = crn.corpus.TRIANGLE
SQUARE = crn.corpus.SQUARE
THREE_ROOTS = crn.corpus.RVB_THREE_ROOTS
ACR = crn.corpus.ABSOLUTE_CONCENTRATION
STOCH_RVB = crn.corpus.STOCH_RVB_ONLY


def rate_by_label(sys, c):
    net = sys.network
    rates = det_rates(sys, c)
    return {
        (
            net.complexes[r.source].format(net.species),
            net.complexes[r.target].format(net.species),
        ): rates[k]
        for k, r in enumerate(net.reactions)
    }


def test_det_rates_triangle_all_ones():
    sys = parse_network(TRIANGLE)
    rates = rate_by_label(sys, [1.0, 1.0])
    assert rates[("2A", "A + B")] == 1.0
    assert rates[("A + B", "2A")] == 2.0
    assert rates[("A + B", "2B")] == 2.0
    assert rates[("2B", "A + B")] == 1.0
    assert rates[("2A", "2B")] == 1.0
    assert rates[("2B", "2A")] == 1.0


def test_det_rates_one_species_monomials():
    sys = parse_network(THREE_ROOTS)
    assert det_rates(sys, [2.0]).tolist() == [6.0, 22.0, 24.0, 8.0]


def test_det_rates_negative_state_all_zero():
    sys = parse_network(SQUARE)
    assert det_rates(sys, [-1.0, 2.0]).tolist() == [0.0] * 8


def test_drift_zeros_at_rvb_roots():
    sys = parse_network(THREE_ROOTS)
    for z in (1.0, 2.0, 3.0):
        assert abs(drift(sys, [z])[0]) < 1e-12
        assert is_equilibrium(sys, [z]).holds


def test_drift_acr_equilibrium():
    sys = parse_network(ACR)
    assert np.allclose(drift(sys, [1.0, 4.0]), 0.0)
    assert is_equilibrium(sys, [1.0, 4.0]).holds
    assert not is_equilibrium(sys, [2.0, 1.0]).holds


def test_reaction_vector_classes_merge_sign():
    net = parse_network(ACR).network
    classes = reaction_vector_classes(net).classes
    assert list(classes) == [(1, -1)]
    fwd, bwd = classes[(1, -1)]
    assert len(fwd) == 1 and len(bwd) == 1
    total = sorted(list(fwd) + list(bwd))
    assert total == list(range(net.r))


def test_classify_triangle_state():
    sys = parse_network(TRIANGLE)
    rep = classify_state(sys, [1.0, 1.0])
    assert rep.rb.fails and rep.cb.fails
    assert rep.rvb.holds and rep.cyb.holds
    assert rep.equilibrium.holds
    # complex-balance witness: influx 3 vs outflux 2 at a corner complex
    assert {rep.cb.witness.lhs, rep.cb.witness.rhs} == {2.0, 3.0}


def test_classify_square_state():
    sys = parse_network(SQUARE)
    rep = classify_state(sys, [1.0, 1.0])
    assert rep.cb.holds and rep.rvb.holds
    assert rep.rb.fails and rep.cyb.fails
    assert abs(rep.cyb.witness.lhs - 16.0) < 1e-9
    assert abs(rep.cyb.witness.rhs - 1.0) < 1e-12


def test_classify_negative_state_everything_holds():
    sys = parse_network(SQUARE)
    rep = classify_state(sys, [-1.0, 1.0])
    assert rep.rb.holds and rep.cb.holds and rep.rvb.holds and rep.cyb.holds
    assert rep.equilibrium.holds and rep.drift_norm == 0.0


def test_system_cycle_balanced():
    assert system_cycle_balanced(parse_network(TRIANGLE))
    assert not system_cycle_balanced(parse_network(SQUARE))
    assert system_cycle_balanced(parse_network(THREE_ROOTS))


def test_solve_reaction_balanced_intro():
    sys = parse_network("A + B <-> 2C : 1, 1\nA <-> B : 1, 1")
    c = solve_reaction_balanced(sys)
    assert c is not None
    assert classify_state(sys, c).rb.holds
    # c_A = c_B and c_A c_B = c_C^2
    assert abs(c[0] - c[1]) < 1e-9
    assert abs(c[0] * c[1] - c[2] ** 2) < 1e-9


def test_solve_reaction_balanced_square_inconsistent():
    assert solve_reaction_balanced(parse_network(SQUARE)) is None


def test_solve_reaction_balanced_requires_reversible():
    with pytest.raises(NotReversibleError):
        solve_reaction_balanced(parse_network(ACR))


def test_solve_reaction_balanced_symmetric_triangle():
    sys = parse_network(crn.corpus.MONO_TRIANGLE)
    c = solve_reaction_balanced(sys)
    assert np.allclose(c, 1.0)


def test_solve_complex_balanced_square():
    sys = parse_network(SQUARE)
    c = solve_complex_balanced(sys)
    assert c is not None
    assert classify_state(sys, c).cb.holds
    assert abs(c[0] - c[1]) < 1e-8


def test_solve_complex_balanced_triangle_none():
    assert solve_complex_balanced(parse_network(TRIANGLE)) is None


def test_solve_complex_balanced_needs_weak_reversibility():
    with pytest.raises(NotWeaklyReversibleError):
        solve_complex_balanced(parse_network(ACR))


def test_solve_complex_balanced_deficiency_zero_random():
    from helpers import random_weakly_reversible_deficiency_zero

    rng = np.random.default_rng(23)
    for _ in range(15):
        sys = random_weakly_reversible_deficiency_zero(rng)
        c = solve_complex_balanced(sys)
        assert c is not None
        assert classify_state(sys, c).cb.holds


def test_solve_rvb_three_roots():
    sys = parse_network(THREE_ROOTS)
    roots = solve_rvb(sys)
    assert len(roots) == 3
    assert np.allclose(sorted(float(c[0]) for c in roots), [1.0, 2.0, 3.0], atol=1e-8)
    for c in roots:
        assert classify_state(sys, c).rvb.holds


def test_solve_rvb_acr_line():
    sys = parse_network(ACR)
    roots = solve_rvb(sys)
    assert roots
    assert all(abs(float(c[0]) - 1.0) < 1e-8 for c in roots)


def test_solve_rvb_stochastic_rvb_system_empty():
    assert solve_rvb(parse_network(STOCH_RVB)) == []


def test_stoch_rvb_polynomials_have_no_common_root():
    # Independent oracle: the per-displacement balance conditions of the
    # five-complex chain, assembled from its rate constants.
    # +-1 jumps: 1 + a = a + 2a^2          -> 1 - 2a^2 = 0
    # +-2 jumps: 2 + 4a + a^2 = 12a^3+4a^4 -> 2 + 4a + a^2 - 12a^3 - 4a^4 = 0
    roots1 = np.roots([-2.0, 0.0, 1.0])
    pos1 = [r.real for r in roots1 if abs(r.imag) < 1e-12 and r.real > 0]
    assert len(pos1) == 1
    a = pos1[0]
    assert abs(a - 1.0 / math.sqrt(2.0)) < 1e-12
    p2 = np.polyval([-4.0, -12.0, 1.0, 4.0, 2.0], a)
    assert abs(p2) > 1e-3  # not a common root, so no RVB equilibrium

    sys = parse_network(STOCH_RVB)
    classes = reaction_vector_classes(sys.network).classes
    rates = det_rates(sys, [a])
    residuals = []
    for xi, (fwd, bwd) in classes.items():
        residuals.append(sum(rates[k] for k in fwd) - sum(rates[k] for k in bwd))
    assert min(abs(r) for r in residuals) < 1e-12  # the +-1 class balances
    assert max(abs(r) for r in residuals) > 1e-3  # the +-2 class does not


def test_integrate_converges_to_smallest_root():
    sys = parse_network(THREE_ROOTS)
    traj = integrate(sys, [0.5], t_end=50.0, dt=1e-3)
    assert abs(traj[-1][1][0] - 1.0) < 1e-6
    # reference run at a finer step agrees
    ref = integrate(sys, [0.5], t_end=50.0, dt=2.5e-4)
    assert abs(traj[-1][1][0] - ref[-1][1][0]) < 1e-9


def test_integrate_square_midpoint():
    sys = parse_network(SQUARE)
    traj = integrate(sys, [3.0, 1.0], t_end=50.0, dt=1e-3)
    assert np.allclose(traj[-1][1], [2.0, 2.0], atol=1e-6)
    # conservation along the trajectory
    totals = [float(state.sum()) for _, state in traj[:: len(traj) // 10]]
    assert max(abs(t - 4.0) for t in totals) < 1e-8 * 50


def test_integrate_zero_horizon():
    sys = parse_network(SQUARE)
    traj = integrate(sys, [3.0, 1.0], t_end=0.0)
    assert len(traj) == 1 and traj[0][0] == 0.0


def test_integrate_divergence_guard():
    sys = parse_network("2A -> 3A : 1")
    with pytest.raises(NonFiniteStateError):
        integrate(sys, [10.0], t_end=50.0, dt=1e-2)


def test_same_compatibility_class():
    sys = parse_network(THREE_ROOTS)
    assert same_compatibility_class(sys.network, [1.0], [3.0])
    net = parse_network(ACR).network
    assert not same_compatibility_class(net, [1.0, 1.0], [1.0, 3.0])
    assert same_compatibility_class(net, [1.0, 3.0], [1.0, 3.0])


def test_relations_between_balanced_states_random():
    rng = np.random.default_rng(77)
    checked_rb = 0
    for _ in range(40):
        sys = random_conservative_reversible_system(rng, balanced=True)
        c = solve_reaction_balanced(sys)
        if c is None:
            continue
        rep = classify_state(sys, c)
        assert rep.rb.holds
        assert rep.cb.holds and rep.rvb.holds and rep.cyb.holds
        assert rep.equilibrium.holds
        checked_rb += 1
    assert checked_rb >= 30
