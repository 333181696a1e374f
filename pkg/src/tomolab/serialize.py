"""JSON encodings of matrices: ``{"dim": d, "re": [[...]], "im": [[...]]}``, row-major."""

from __future__ import annotations

import json

import numpy as np

from .linalg import InvariantError


def _round17(x: float) -> float:
    # 17 significant digits round-trips every double
    return float(f"{x:.17g}")


def matrix_to_dict(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {
        "dim": int(a.shape[0]),
        "re": [[_round17(x) for x in row] for row in a.real],
        "im": [[_round17(x) for x in row] for row in a.imag],
    }


def matrix_from_dict(obj: dict) -> np.ndarray:
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != im.shape or re.ndim != 2 or re.shape[0] != obj["dim"]:
        raise InvariantError("malformed matrix record")
    return re + 1j * im


def basis_to_list(basis) -> list:
    """Columns of a basis as a list of ``{"re": [...], "im": [...]}`` records."""
    basis = np.asarray(basis, dtype=complex)
    return [
        {"re": [_round17(x) for x in col.real], "im": [_round17(x) for x in col.imag]}
        for col in basis.T
    ]


def basis_from_list(cols: list, d: int) -> np.ndarray:
    if not cols:
        return np.zeros((d, 0), dtype=complex)
    return np.column_stack([np.asarray(c["re"]) + 1j * np.asarray(c["im"]) for c in cols])


def dumps_state(rho) -> str:
    return json.dumps(matrix_to_dict(rho))


def loads_state(text: str) -> np.ndarray:
    return matrix_from_dict(json.loads(text))
