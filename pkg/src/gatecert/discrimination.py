"""Minimum-error discrimination of a gate from its depolarized counterpart."""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channels import DepolarizingGateChannel, apply
from .qcore import I4, NUMERIC_TOL, dag, proj, trace_norm


class Regime(str, Enum):
    NO_MEASUREMENT = "NoMeasurement"
    MEASURE = "Measure"


@dataclass(frozen=True)
class Povm2:
    """Two-outcome POVM; ``pi0`` concludes the noiseless gate."""

    pi0: np.ndarray
    pi1: np.ndarray


@dataclass(frozen=True)
class DiscriminationInstance:
    gate: np.ndarray
    p: float
    q: float
    input: np.ndarray

    def __post_init__(self):
        # p = 0 is the degenerate limit (identical channels), kept for sweeps
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"q must lie in [0, 1], got {self.q}")

    @property
    def degenerate(self) -> bool:
        return self.p == 0.0

    @property
    def channel(self) -> DepolarizingGateChannel:
        return DepolarizingGateChannel(self.gate, self.p)


def helstrom_numeric(rho0, rho1, q: float) -> float:
    """``1/2 + 1/2 ||(1-q) rho0 - q rho1||_1`` for a fixed pair of states."""
    rho0 = np.asarray(rho0, dtype=complex)
    rho1 = np.asarray(rho1, dtype=complex)
    return 0.5 + 0.5 * trace_norm((1 - q) * rho0 - q * rho1)


def regime_margin(q: float, p: float) -> float:
    return 1 - 2 * q + 0.75 * p * q


def analytic_guessing(q: float, p: float) -> float:
    return 0.5 * (1 + 0.75 * p * q + abs(regime_margin(q, p)))


def regime(q: float, p: float) -> Regime:
    # ties go to Measure: both strategies score the same there
    return Regime.NO_MEASUREMENT if regime_margin(q, p) < 0 else Regime.MEASURE


def optimal_povm(gate, psi) -> Povm2:
    image = np.asarray(gate, dtype=complex) @ np.asarray(psi, dtype=complex)
    pi0 = proj(image)
    return Povm2(pi0=pi0, pi1=I4 - pi0)


def trivial_povm() -> Povm2:
    """Always conclude the noisy channel; optimal in the no-measurement regime."""
    return Povm2(pi0=np.zeros((4, 4), dtype=complex), pi1=I4.copy())


def regime_povm(gate, psi, q: float, p: float) -> Povm2:
    if regime(q, p) is Regime.NO_MEASUREMENT:
        return trivial_povm()
    return optimal_povm(gate, psi)


def normalized_povm_states(povm: Povm2, tol=NUMERIC_TOL) -> tuple:
    ranks = []
    for el in (povm.pi0, povm.pi1):
        eig = np.linalg.eigvalsh((el + dag(el)) / 2)
        ranks.append(int((eig > tol).sum()))
    if ranks != [1, 3]:
        raise ValueError(f"expected POVM element ranks (1, 3), got {tuple(ranks)}")
    return (
        povm.pi0 / np.trace(povm.pi0).real,
        povm.pi1 / np.trace(povm.pi1).real,
    )


def achieved_guessing(instance: DiscriminationInstance, povm: Povm2) -> float:
    rho = proj(instance.input)
    u = np.asarray(instance.gate, dtype=complex)
    noiseless = u @ rho @ dag(u)
    noisy = apply(instance.channel, rho)
    q = instance.q
    return float(
        (1 - q) * np.trace(noiseless @ povm.pi0).real + q * np.trace(noisy @ povm.pi1).real
    )
