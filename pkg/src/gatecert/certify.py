"""Entanglement-free single-copy certification of a two-qubit gate.

Alice and Bob each measure their qubit in a local basis containing their
factor of ``gate |psi>``. Seeing both of those factors concludes the gate
was noiseless; any other outcome concludes depolarizing noise.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .canonical import ProductPair, find_product_pair, pair_from_input
from .channels import DepolarizingGateChannel, apply
from .discrimination import (
    Regime,
    analytic_guessing,
    normalized_povm_states,
    optimal_povm,
    regime,
)
from .qcore import NUMERIC_TOL, equal_up_to_phase, fix_phase, proj

BLOCK_SIZE = 1 << 16
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class CertificationProtocol:
    gate: np.ndarray
    input: np.ndarray
    alice_basis: tuple
    bob_basis: tuple
    accept_outcome: tuple

    @property
    def accept_index(self) -> int:
        return 2 * self.accept_outcome[0] + self.accept_outcome[1]

    @property
    def accept_state(self) -> np.ndarray:
        a, b = self.accept_outcome
        return np.kron(self.alice_basis[a], self.bob_basis[b])

    def outcome_projectors(self) -> list:
        return [proj(np.kron(a, b)) for a in self.alice_basis for b in self.bob_basis]


@dataclass(frozen=True)
class CertificationConfig:
    q: float
    p: float
    trials: int
    seed: int = 0
    input_override: Optional[np.ndarray] = None
    threads: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0.0 <= self.q <= 1.0 or not 0.0 <= self.p <= 1.0:
            raise ValueError("q and p must lie in [0, 1]")


@dataclass
class CertificationReport:
    q: float
    p: float
    trials: int
    seed: int
    counts_noiseless: list
    counts_noisy: list
    p_guess_est: float
    p_guess_stderr: float
    p_est: float
    p_est_stderr: float
    exact: float
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _local_basis(v) -> tuple:
    """Complete a qubit state to an orthonormal basis; return ``(basis, index_of_v)``.

    Both vectors are phase-fixed and ordered canonically (larger ``|<0|.>|``
    first, ties by the second amplitude), so computational-basis factors give
    the ``{|0>, |1>}`` basis in its natural order.
    """
    v = fix_phase(v / np.linalg.norm(v))
    w = fix_phase(np.array([-np.conj(v[1]), np.conj(v[0])]))

    def key(x):
        return (-round(abs(x[0]), 12), -round(x[1].real, 12), -round(x[1].imag, 12))

    if key(v) <= key(w):
        return (v, w), 0
    return (w, v), 1


def build_protocol(gate, pair: Optional[ProductPair] = None, strict=True) -> CertificationProtocol:
    """Local measurement protocol from a product pair (searched for if not given).

    With ``strict=False`` the pair may have an entangled image; the bases are
    then built from its leading Schmidt factors. Such a protocol is not
    optimal and exists to exhibit that failure.
    """
    gate = np.asarray(gate, dtype=complex)
    if pair is None:
        pair = find_product_pair(gate)
    if not equal_up_to_phase(gate @ pair.input, pair.output, 1e-8):
        raise ValueError("product pair is inconsistent with the gate")
    c, d = pair.output_factors
    if strict and not equal_up_to_phase(np.kron(c, d), pair.output, NUMERIC_TOL):
        raise ValueError("image of the input is not a product state")
    alice, ia = _local_basis(c)
    bob, ib = _local_basis(d)
    return CertificationProtocol(
        gate=gate, input=pair.input, alice_basis=alice, bob_basis=bob, accept_outcome=(ia, ib)
    )


def protocol_for_input(gate, psi, strict=True) -> CertificationProtocol:
    pair = pair_from_input(gate, np.asarray(psi, dtype=complex), require_product=strict)
    return build_protocol(gate, pair, strict=strict)


def outcome_distribution(protocol: CertificationProtocol, channel: DepolarizingGateChannel):
    """Born probabilities of the four local outcomes, indexed ``2 * a + b``."""
    rho = apply(channel, proj(protocol.input))
    probs = np.array([np.trace(rho @ pr).real for pr in protocol.outcome_projectors()])
    return np.clip(probs, 0.0, None)


def _accept_probs(protocol, p):
    clean = outcome_distribution(protocol, DepolarizingGateChannel(protocol.gate, 0.0))
    noisy = outcome_distribution(protocol, DepolarizingGateChannel(protocol.gate, p))
    return clean[protocol.accept_index], noisy[protocol.accept_index]


def exact_locc_guessing(protocol: CertificationProtocol, q: float, p: float) -> float:
    acc_clean, acc_noisy = _accept_probs(protocol, p)
    return float((1 - q) * acc_clean + q * (1 - acc_noisy))


def locc_guessing(protocol: CertificationProtocol, q: float, p: float) -> float:
    """Best local strategy: measure, or in the no-measurement regime always guess noisy."""
    if regime(q, p) is Regime.NO_MEASUREMENT:
        return float(q)
    return exact_locc_guessing(protocol, q, p)


def verify_locc_optimality(gate, q_grid, p_grid, protocol=None) -> float:
    """Largest gap between the local protocol and the global optimum over Measure-regime points."""
    q_grid, p_grid = list(q_grid), list(p_grid)
    if not q_grid or not p_grid:
        raise ValueError("grids must be nonempty")
    protocol = build_protocol(gate) if protocol is None else protocol
    worst = 0.0
    for q in q_grid:
        for p in p_grid:
            if regime(q, p) is Regime.MEASURE:
                worst = max(worst, abs(exact_locc_guessing(protocol, q, p) - analytic_guessing(q, p)))
    return worst


def verify_perfect_povm_discrimination(protocol: CertificationProtocol) -> tuple:
    """Local misidentification rates on the normalized optimal POVM states."""
    tilde1, tilde2 = normalized_povm_states(optimal_povm(protocol.gate, protocol.input))
    acc = protocol.accept_state
    err0 = 1.0 - np.vdot(acc, tilde1 @ acc).real
    err1 = np.vdot(acc, tilde2 @ acc).real
    return float(max(err0, 0.0)), float(max(err1, 0.0))


def _block_rng(seed: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed & _SEED_MASK, spawn_key=(block,))
    return np.random.Generator(np.random.Philox(ss))


def _run_block(seed, block, n, q, cdf_clean, cdf_noisy):
    rng = _block_rng(seed, block)
    noisy = rng.random(n) < q
    u = rng.random(n)
    outcome = np.where(
        noisy, np.searchsorted(cdf_noisy, u, side="right"), np.searchsorted(cdf_clean, u, side="right")
    )
    outcome = np.minimum(outcome, 3)
    return np.bincount(noisy * 4 + outcome, minlength=8)


def sample_counts(protocol, q, p, trials, seed, threads=1) -> tuple:
    """Monte Carlo tallies ``(counts_noiseless, counts_noisy)`` keyed by the true channel.

    Trials are split into fixed-size blocks, each with its own stream derived
    from ``(seed, block index)``, so the result does not depend on ``threads``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    cdf_clean = np.cumsum(outcome_distribution(protocol, DepolarizingGateChannel(protocol.gate, 0.0)))
    cdf_noisy = np.cumsum(outcome_distribution(protocol, DepolarizingGateChannel(protocol.gate, p)))
    nblocks = -(-trials // BLOCK_SIZE)
    sizes = [min(BLOCK_SIZE, trials - k * BLOCK_SIZE) for k in range(nblocks)]

    def work(k):
        return _run_block(seed, k, sizes[k], q, cdf_clean, cdf_noisy)

    if threads > 1 and nblocks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, range(nblocks)))
    else:
        parts = [work(k) for k in range(nblocks)]
    total = np.sum(parts, axis=0)
    return [int(x) for x in total[:4]], [int(x) for x in total[4:]]


def estimate_noise(counts, protocol: CertificationProtocol) -> tuple:
    """Noise fraction from outcome counts under the noisy channel alone.

    Not clamped to [0, 1]; the standard error is binomial on the accept rate.
    """
    counts = np.asarray(counts, dtype=float)
    n = counts.sum()
    if n <= 0:
        raise ValueError("estimate_noise needs at least one count")
    f = counts[protocol.accept_index] / n
    p_est = 4.0 / 3.0 * (n - counts[protocol.accept_index]) / n
    stderr = 4.0 / 3.0 * np.sqrt(f * (1 - f) / n)
    return float(p_est), float(stderr)


def run_certification(protocol: CertificationProtocol, config: CertificationConfig) -> CertificationReport:
    if config.input_override is not None:
        protocol = protocol_for_input(protocol.gate, config.input_override)
    counts_u, counts_n = sample_counts(
        protocol, config.q, config.p, config.trials, config.seed, config.threads
    )
    acc = protocol.accept_index
    n_u, n_n = sum(counts_u), sum(counts_n)
    flags = []
    if config.p == 0.0:
        flags.append("degenerate_p")
    f_u = f_n = 0.0
    var = 0.0
    if n_u:
        f_u = counts_u[acc] / n_u
        var += (1 - config.q) ** 2 * f_u * (1 - f_u) / n_u
    else:
        flags.append("no_noiseless_trials")
    if n_n:
        f_n = (n_n - counts_n[acc]) / n_n
        var += config.q**2 * f_n * (1 - f_n) / n_n
        p_est, p_est_err = estimate_noise(counts_n, protocol)
        if not 0.0 <= p_est <= 1.0:
            flags.append("p_est_out_of_range")
    else:
        flags.append("no_noisy_trials")
        p_est, p_est_err = 0.0, 0.0
    return CertificationReport(
        q=config.q,
        p=config.p,
        trials=config.trials,
        seed=config.seed,
        counts_noiseless=counts_u,
        counts_noisy=counts_n,
        p_guess_est=float((1 - config.q) * f_u + config.q * f_n),
        p_guess_stderr=float(np.sqrt(var)),
        p_est=p_est,
        p_est_stderr=p_est_err,
        exact=exact_locc_guessing(protocol, config.q, config.p),
        flags=flags,
    )


def simulate_noise_estimate(protocol, p, trials, seed, threads=1) -> tuple:
    """Counts under the noisy channel only (``q = 1``) and the resulting estimate."""
    _, counts = sample_counts(protocol, 1.0, p, trials, seed, threads)
    return counts, estimate_noise(counts, protocol)
