import numpy as np
import pytest

from gatecert.channels import (
    DepolarizingGateChannel, apply, choi, fidelity_bounds, process_fidelity,
    truth_table_fidelity, twirl_depolarize, unitary_choi,
)
from gatecert.gates import NAMED_GATES
from gatecert.qcore import I4, PAULIS, haar_random_unitary, ket, proj, random_density

CNOT = NAMED_GATES["cnot"]
SWAP = NAMED_GATES["swap"]


def test_channel_validation():
    with pytest.raises(ValueError):
        DepolarizingGateChannel(CNOT, 1.5)
    with pytest.raises(ValueError):
        DepolarizingGateChannel(2 * CNOT, 0.1)


def test_apply_examples(rng):
    r00 = proj(ket("00"))
    assert np.allclose(apply(DepolarizingGateChannel(CNOT, 0.0), r00), r00)
    u = haar_random_unitary(4, rng)
    assert np.allclose(apply(DepolarizingGateChannel(u, 1.0), random_density(4, rng)), I4 / 4)
    # termwise: 0.5 |00><00| + 0.5 * I/4
    out = apply(DepolarizingGateChannel(CNOT, 0.5), r00)
    assert np.allclose(out, 0.5 * r00 + 0.125 * I4, atol=1e-15)


def test_apply_preserves_trace_and_positivity(rng):
    for _ in range(100):
        ch = DepolarizingGateChannel(haar_random_unitary(4, rng), rng.uniform())
        out = apply(ch, random_density(4, rng))
        assert abs(np.trace(out) - 1) < 1e-12
        assert np.linalg.eigvalsh(out).min() > -1e-12
        assert np.linalg.norm(out - out.conj().T) < 1e-12


def _twirl_oracle(rho):
    # single-qubit twirls on each factor in turn, independent of the 16-term loop
    t = rho.reshape(2, 2, 2, 2)
    for axes in ((0, 2), (1, 3)):
        t = sum(_conj_factor(t, s, axes) for s in PAULIS) / 4
    return t.reshape(4, 4)


def _conj_factor(t, s, axes):
    if axes == (0, 2):
        return np.einsum("ai,ibjd,jc->abcd", s, t, s)
    return np.einsum("bi,aicj,jd->abcd", s, t, s)


def test_twirl_examples():
    assert np.allclose(twirl_depolarize(I4 / 4), I4 / 4, atol=1e-15)
    assert np.allclose(twirl_depolarize(proj(ket("00"))), I4 / 4, atol=1e-15)


def test_twirl_random_states(rng):
    for _ in range(100):
        rho = random_density(4, rng)
        out = twirl_depolarize(rho)
        assert np.abs(np.linalg.eigvalsh(out - I4 / 4)).sum() < 1e-12
        assert np.allclose(out, _twirl_oracle(rho), atol=1e-14)


def test_mixture_equals_twirl_realization(rng):
    for _ in range(50):
        u = haar_random_unitary(4, rng)
        p = rng.uniform()
        rho = random_density(4, rng)
        lhs = apply(DepolarizingGateChannel(u, p), rho)
        rhs = (1 - p) * apply(DepolarizingGateChannel(u, 0.0), rho) + p * twirl_depolarize(rho)
        assert np.linalg.norm(lhs - rhs) < 1e-12


def test_choi_examples():
    omega = sum(np.kron(ket(f"{i:02b}"), ket(f"{i:02b}")) for i in range(4)) / 2
    assert np.allclose(choi(DepolarizingGateChannel(I4, 0.0)), proj(omega))
    assert np.allclose(choi(DepolarizingGateChannel(CNOT, 1.0)), np.eye(16) / 16)
    chi = choi(DepolarizingGateChannel(CNOT, 0.3))
    assert abs(np.trace(chi) - 1) < 1e-12
    assert np.linalg.eigvalsh(chi).min() > -1e-10


def test_choi_linearity(rng):
    u = haar_random_unitary(4, rng)
    for p in rng.uniform(size=10):
        mixed = choi(DepolarizingGateChannel(u, p))
        expected = (1 - p) * choi(DepolarizingGateChannel(u, 0.0)) + p * choi(DepolarizingGateChannel(u, 1.0))
        assert np.allclose(mixed, expected, atol=1e-14)


def test_process_fidelity_examples():
    chi0 = unitary_choi(CNOT)
    assert process_fidelity(chi0, chi0) == pytest.approx(1.0, abs=1e-12)
    for p in np.linspace(0, 1, 11):
        f = process_fidelity(chi0, choi(DepolarizingGateChannel(CNOT, p)))
        assert f == pytest.approx((1 - p) + p / 16, abs=1e-12)
    f = process_fidelity(chi0, unitary_choi(SWAP))
    # only the |00><00| entries overlap: |tr(CNOT^dag SWAP)|^2 / 16 = 1/16
    assert f == pytest.approx(1 / 16, abs=1e-12)


def test_process_fidelity_rejects_non_psd():
    bad = -unitary_choi(CNOT)
    with pytest.raises(ValueError):
        process_fidelity(unitary_choi(CNOT), bad)


def test_truth_tables():
    for basis in ("ZZ", "XX"):
        assert truth_table_fidelity(DepolarizingGateChannel(CNOT, 0.0), basis, CNOT) == pytest.approx(1.0)
    for p in np.linspace(0, 1, 6):
        ch = DepolarizingGateChannel(CNOT, p)
        assert truth_table_fidelity(ch, "ZZ", CNOT) == pytest.approx(1 - 3 * p / 4, abs=1e-12)
        assert truth_table_fidelity(ch, "XX", CNOT) == pytest.approx(1 - 3 * p / 4, abs=1e-12)
    with pytest.raises(ValueError):
        truth_table_fidelity(DepolarizingGateChannel(CNOT, 0.0), "YY", CNOT)


def test_fidelity_bounds_examples():
    lo, hi = fidelity_bounds(0.96, 0.96)
    assert lo == pytest.approx(0.92, abs=1e-15) and hi == 0.96
    assert fidelity_bounds(1.0, 1.0) == (1.0, 1.0)
    assert fidelity_bounds(0.2, 0.3) == (0.0, 0.2)


@pytest.mark.parametrize("p", [0.0, 0.2, 0.4, 0.6, 0.8, 1.0])
def test_process_fidelity_within_truth_table_bounds(p):
    ch = DepolarizingGateChannel(CNOT, p)
    f = process_fidelity(unitary_choi(CNOT), choi(ch))
    lo, hi = fidelity_bounds(truth_table_fidelity(ch, "ZZ", CNOT), truth_table_fidelity(ch, "XX", CNOT))
    assert lo - 1e-12 <= f <= hi + 1e-12
