import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gatecert.canonical import find_product_pair
from gatecert.channels import DepolarizingGateChannel, apply
from gatecert.discrimination import (
    DiscriminationInstance, Povm2, Regime, achieved_guessing, analytic_guessing,
    helstrom_numeric, normalized_povm_states, optimal_povm, regime, regime_povm,
)
from gatecert.gates import NAMED_GATES
from gatecert.qcore import I4, haar_random_unitary, ket, proj, random_density

CNOT = NAMED_GATES["cnot"]
GRID = np.linspace(0, 1, 11)


def test_helstrom_examples():
    assert helstrom_numeric(proj(ket("00")), proj(ket("01")), 0.5) == pytest.approx(1.0)
    rho = random_density(4, np.random.default_rng(0))
    for q in (0.1, 0.5, 0.8):
        assert helstrom_numeric(rho, rho, q) == pytest.approx(max(q, 1 - q), abs=1e-12)
    rho0 = proj(CNOT @ ket("00"))
    rho1 = apply(DepolarizingGateChannel(CNOT, 0.6), proj(ket("00")))
    val = helstrom_numeric(rho0, rho1, 0.5)
    assert val == pytest.approx(0.725, abs=1e-12)
    assert val == pytest.approx(1 - 0.5 + 3 * 0.6 * 0.5 / 4, abs=1e-12)


def test_helstrom_never_below_prior(rng):
    for _ in range(100):
        q = rng.uniform()
        val = helstrom_numeric(random_density(4, rng), random_density(4, rng), q)
        assert max(q, 1 - q) - 1e-12 <= val <= 1 + 1e-12


def test_analytic_examples():
    assert analytic_guessing(0.5, 1.0) == 0.875
    assert analytic_guessing(0.5, 0.0) == 0.5
    # 1 - 1.8 + 0.0675 = -0.7325 < 0, so the bound is the prior q
    assert analytic_guessing(0.9, 0.1) == pytest.approx(0.9, abs=1e-15)


def test_analytic_monotone_in_p():
    vals = [analytic_guessing(0.5, p) for p in np.linspace(0, 1, 101)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_regime_examples():
    for p in GRID:
        assert regime(0.5, p) is Regime.MEASURE
    assert regime(0.9, 0.1) is Regime.NO_MEASUREMENT
    assert regime(1.0, 0.0) is Regime.NO_MEASUREMENT
    assert analytic_guessing(1.0, 0.0) == 1.0
    # boundary 1 - 2q + 3pq/4 = 0 at q = 4/5, p = 1
    assert regime(0.8, 1.0) is Regime.MEASURE


def test_optimal_povm_examples(rng):
    povm = optimal_povm(CNOT, ket("00"))
    assert np.allclose(povm.pi0, proj(ket("00")))
    assert np.allclose(povm.pi1, I4 - proj(ket("00")))
    assert np.allclose(optimal_povm(I4, ket("11")).pi0, proj(ket("11")))
    for _ in range(20):
        u = haar_random_unitary(4, rng)
        psi = haar_random_unitary(4, rng)[:, 0]
        povm = optimal_povm(u, psi)
        assert np.allclose(povm.pi0 + povm.pi1, I4, atol=1e-12)
        assert np.allclose(povm.pi0 @ povm.pi0, povm.pi0, atol=1e-12)
        assert np.allclose(povm.pi1 @ povm.pi1, povm.pi1, atol=1e-12)


def test_normalized_povm_states():
    t1, t2 = normalized_povm_states(optimal_povm(CNOT, ket("00")))
    assert np.allclose(t1, proj(ket("00")))
    assert np.allclose(t2, (I4 - proj(ket("00"))) / 3)
    assert np.trace(t1).real == pytest.approx(1) and np.trace(t2).real == pytest.approx(1)
    assert abs(np.trace(t1 @ t2)) < 1e-15
    with pytest.raises(ValueError):
        normalized_povm_states(Povm2(pi0=I4 / 2, pi1=I4 / 2))


def test_achieved_guessing_examples():
    inst = DiscriminationInstance(gate=CNOT, p=1.0, q=0.5, input=ket("00"))
    assert achieved_guessing(inst, optimal_povm(CNOT, ket("00"))) == pytest.approx(0.875, abs=1e-15)
    for q in (0.2, 0.5, 0.7):
        inst = DiscriminationInstance(gate=CNOT, p=0.4, q=q, input=ket("00"))
        assert achieved_guessing(inst, Povm2(pi0=I4, pi1=0 * I4)) == pytest.approx(1 - q)
    for p in np.linspace(0.1, 1.0, 10):
        inst = DiscriminationInstance(gate=CNOT, p=p, q=0.5, input=ket("00"))
        got = achieved_guessing(inst, optimal_povm(CNOT, ket("00")))
        assert abs(got - analytic_guessing(0.5, p)) < 1e-12


def test_instance_validation():
    with pytest.raises(ValueError):
        DiscriminationInstance(gate=CNOT, p=1.2, q=0.5, input=ket("00"))
    assert DiscriminationInstance(gate=CNOT, p=0.0, q=0.5, input=ket("00")).degenerate


@pytest.mark.parametrize("name", sorted(NAMED_GATES))
def test_single_povm_attains_bound_on_grid(name):
    gate = NAMED_GATES[name]
    psi = find_product_pair(gate).input
    fixed = optimal_povm(gate, psi)
    for q in GRID:
        for p in GRID:
            inst = DiscriminationInstance(gate=gate, p=p, q=q, input=psi)
            bound = analytic_guessing(q, p)
            numeric = helstrom_numeric(proj(gate @ psi), apply(inst.channel, proj(psi)), q)
            assert abs(numeric - bound) < 1e-10
            # one p-independent measurement in the Measure regime, no measurement otherwise
            povm = fixed if regime(q, p) is Regime.MEASURE else regime_povm(gate, psi, q, p)
            assert abs(achieved_guessing(inst, povm) - bound) < 1e-10


@settings(max_examples=100, deadline=None)
@given(q=st.floats(0.0, 1.0), p=st.floats(0.0, 1.0))
def test_analytic_form_matches_helstrom_property(q, p):
    cnot = NAMED_GATES["cnot"]
    psi = ket("00")
    rho1 = apply(DepolarizingGateChannel(cnot, p), proj(psi))
    assert helstrom_numeric(proj(cnot @ psi), rho1, q) == pytest.approx(analytic_guessing(q, p), abs=1e-12)
    assert 0.5 - 1e-15 <= analytic_guessing(q, p) <= 1.0 + 1e-15
