"""Depolarized two-qubit gates, Choi matrices and process fidelity."""
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .qcore import I4, PAULIS, NUMERIC_TOL, STRUCT_TOL, dag, is_psd, is_unitary, ket, proj

Basis = Literal["ZZ", "XX"]

_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class DepolarizingGateChannel:
    """``rho -> (1-p) U rho U^dag + p I/4``."""

    gate: np.ndarray
    p: float

    def __post_init__(self):
        gate = np.asarray(self.gate, dtype=complex)
        if gate.shape != (4, 4) or not is_unitary(gate, STRUCT_TOL * 100):
            raise ValueError("gate must be a 4x4 unitary")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"noise fraction must lie in [0, 1], got {self.p}")
        object.__setattr__(self, "gate", gate)

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)


def apply(ch: DepolarizingGateChannel, rho) -> np.ndarray:
    # linear in rho, so also valid on the off-diagonal blocks used by choi()
    rho = np.asarray(rho, dtype=complex)
    u = ch.gate
    return (1 - ch.p) * (u @ rho @ dag(u)) + ch.p * np.trace(rho) * I4 / 4


def twirl_depolarize(rho) -> np.ndarray:
    """Average of ``(s_i x s_j) rho (s_i x s_j)`` over all 16 Pauli pairs."""
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros((4, 4), dtype=complex)
    for si in PAULIS:
        for sj in PAULIS:
            pp = np.kron(si, sj)
            out += pp @ rho @ pp
    return out / 16


def choi(ch: DepolarizingGateChannel) -> np.ndarray:
    """Trace-one Choi matrix ``(id x ch)(|Omega><Omega|)`` with ``|Omega> = sum_i |ii>/2``."""
    out = np.zeros((16, 16), dtype=complex)
    for i in range(4):
        for j in range(4):
            e_ij = np.zeros((4, 4), dtype=complex)
            e_ij[i, j] = 1.0
            out += np.kron(e_ij, apply(ch, e_ij))
    return out / 4


def unitary_choi(u) -> np.ndarray:
    return choi(DepolarizingGateChannel(u, 0.0))


def process_fidelity(chi0, chi_ex) -> float:
    chi0 = np.asarray(chi0, dtype=complex)
    chi_ex = np.asarray(chi_ex, dtype=complex)
    for name, chi in (("chi0", chi0), ("chi_ex", chi_ex)):
        if chi.shape != (16, 16) or not is_psd(chi, NUMERIC_TOL):
            raise ValueError(f"{name} must be a positive semidefinite 16x16 Choi matrix")
    val = np.trace(chi0 @ chi_ex).real / (np.trace(chi0).real * np.trace(chi_ex).real)
    return float(np.clip(val, 0.0, 1.0))


def basis_states(basis: Basis) -> list:
    if basis == "ZZ":
        singles = (ket("0"), ket("1"))
    elif basis == "XX":
        singles = (_PLUS, _MINUS)
    else:
        raise ValueError(f"basis must be 'ZZ' or 'XX', got {basis!r}")
    return [np.kron(a, b) for a in singles for b in singles]


def truth_table_fidelity(ch: DepolarizingGateChannel, basis: Basis, reference) -> float:
    """Mean probability that each prepared basis state ends on the reference output.

    The designated output for input ``|b>`` is ``reference |b>``; when the
    reference permutes the basis this is the classical truth-table entry.
    """
    reference = np.asarray(reference, dtype=complex)
    total = 0.0
    for state in basis_states(basis):
        target = reference @ state
        total += np.vdot(target, apply(ch, proj(state)) @ target).real
    return float(total / 4)


def fidelity_bounds(f_zz: float, f_xx: float) -> tuple:
    """Process-fidelity interval implied by the ZZ and XX truth-table fidelities."""
    for f in (f_zz, f_xx):
        if not 0.0 <= f <= 1.0:
            raise ValueError(f"truth-table fidelities must lie in [0, 1], got {f}")
    return max(0.0, f_zz + f_xx - 1.0), min(f_zz, f_xx)
