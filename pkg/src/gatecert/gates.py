"""Named two-qubit gates and the JSON gate-file format.

A gate file holds ``{"matrix": [[[re, im], ...4], ...4]}``, row-major in the
basis ``|00>, |01>, |10>, |11>`` with qubit A on the left.
"""
import json
from pathlib import Path

import numpy as np

from .qcore import is_unitary

GATE_FILE_TOL = 1e-10

NAMED_GATES = {
    "identity": np.eye(4, dtype=complex),
    # control on qubit A
    "cnot": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "swap": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
    "iswap": np.array([[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]], dtype=complex),
}


class GateFileError(ValueError):
    pass


def named_gate(name: str) -> np.ndarray:
    try:
        return NAMED_GATES[name.lower()].copy()
    except KeyError:
        raise ValueError(f"unknown gate {name!r}; choose from {sorted(NAMED_GATES)}") from None


def parse_gate(text: str, source="<string>") -> np.ndarray:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GateFileError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    if not isinstance(data, dict) or "matrix" not in data:
        raise GateFileError(f"{source}: expected an object with a 'matrix' key")
    rows = data["matrix"]
    if not isinstance(rows, list) or len(rows) != 4:
        raise GateFileError(f"{source}: matrix must have 4 rows")
    out = np.empty((4, 4), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != 4:
            raise GateFileError(f"{source}: matrix[{i}] must have 4 entries")
        for j, entry in enumerate(row):
            ok = (
                isinstance(entry, list)
                and len(entry) == 2
                and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
            )
            if not ok:
                raise GateFileError(f"{source}: matrix[{i}][{j}] must be a [re, im] pair of numbers")
            out[i, j] = complex(entry[0], entry[1])
    if not is_unitary(out, GATE_FILE_TOL):
        dev = np.linalg.norm(out.conj().T @ out - np.eye(4))
        raise GateFileError(f"{source}: matrix is not unitary (||U^dag U - I|| = {dev:.3g})")
    return out


def load_gate(path) -> np.ndarray:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise GateFileError(f"{path}: {exc.strerror}") from None
    return parse_gate(text, str(path))


def gate_to_json(u) -> dict:
    u = np.asarray(u, dtype=complex)
    return {"matrix": [[[float(z.real), float(z.imag)] for z in row] for row in u]}
