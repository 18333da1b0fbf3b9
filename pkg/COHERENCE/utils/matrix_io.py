import json
import logging
import math
import numbers
from typing import Any, List, Tuple

import numpy as np

from ..core.channels import KrausChannel, validate_channel
from ..core.errors import MatrixFormatError
from ..core.hermitian import DensityMatrix, validate_density

logger = logging.getLogger(__name__)


def _real_grid(values: Any, dim: int, label: str) -> List[List[float]]:
    if not isinstance(values, list) or len(values) != dim:
        raise MatrixFormatError(f"'{label}' must be a list of {dim} rows")
    rows = []
    for i, row in enumerate(values):
        if not isinstance(row, list) or len(row) != dim:
            raise MatrixFormatError(f"'{label}' row {i} must have {dim} entries")
        for entry in row:
            if isinstance(entry, bool) or not isinstance(entry, numbers.Real):
                raise MatrixFormatError(f"'{label}' row {i} has non-numeric entry {entry!r}")
            if not math.isfinite(entry):
                raise MatrixFormatError(f"'{label}' row {i} has non-finite entry {entry!r}")
        rows.append([float(x) for x in row])
    return rows


def parse_matrix(obj: Any) -> np.ndarray:
    """
    Decode {"dim": d, "re": [[...]], "im": [[...]]}.

    "im" may be omitted for real matrices.

    Raises
    ------
    MatrixFormatError
        On a missing or non-integer dim, ragged rows, non-numeric or non-finite entries
    """
    if not isinstance(obj, dict):
        raise MatrixFormatError("matrix must be a JSON object")
    dim = obj.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise MatrixFormatError(f"'dim' must be a positive integer, got {dim!r}")
    if "re" not in obj:
        raise MatrixFormatError("matrix is missing 're'")

    re = np.array(_real_grid(obj["re"], dim, "re"))
    im = np.array(_real_grid(obj["im"], dim, "im")) if "im" in obj else np.zeros_like(re)
    return re + 1j * im


def matrix_to_json(m) -> dict:
    a = np.asarray(m, dtype=np.complex128)
    return {
        "dim": int(a.shape[0]),
        "re": a.real.tolist(),
        "im": a.imag.tolist(),
    }


def _read_json(path: str) -> Any:
    with open(path, "r") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise MatrixFormatError(f"{path} is not valid JSON: {e}") from e


def load_state(path: str) -> DensityMatrix:
    """Read and validate a density matrix from a JSON file."""
    rho = validate_density(parse_matrix(_read_json(path)))
    logger.info(f"Loaded d={rho.dim} state from {path}")
    return rho


def load_channel(path: str) -> KrausChannel:
    """
    Read {"dim": d, "operators": [matrix, ...]} and validate the channel.

    Raises
    ------
    MatrixFormatError
        If the file layout is wrong or an operator's dim disagrees with "dim"
    """
    obj = _read_json(path)
    if not isinstance(obj, dict) or not isinstance(obj.get("operators"), list):
        raise MatrixFormatError("channel must be an object with an 'operators' list")
    operators = [parse_matrix(op) for op in obj["operators"]]
    dim = obj.get("dim")
    for n, op in enumerate(operators):
        if dim is not None and op.shape[0] != dim:
            raise MatrixFormatError(f"operator {n} has dim {op.shape[0]}, channel says {dim}")
    channel = validate_channel(operators)
    logger.info(
        f"Loaded {len(channel)}-operator channel on d={channel.dim} from {path} "
        f"(incoherent={channel.incoherent})"
    )
    return channel


def load_ensemble(path: str) -> List[Tuple[float, DensityMatrix]]:
    """
    Read {"ensemble": [{"weight": p, "state": matrix}, ...]}.

    Weights must be nonnegative and sum to 1 within 1e-10.
    """
    obj = _read_json(path)
    if not isinstance(obj, dict) or not isinstance(obj.get("ensemble"), list):
        raise MatrixFormatError("ensemble must be an object with an 'ensemble' list")

    members = []
    for i, item in enumerate(obj["ensemble"]):
        if not isinstance(item, dict) or "weight" not in item or "state" not in item:
            raise MatrixFormatError(f"ensemble member {i} needs 'weight' and 'state'")
        weight = item["weight"]
        valid = isinstance(weight, numbers.Real) and not isinstance(weight, bool)
        if not valid or not math.isfinite(weight) or weight < 0:
            raise MatrixFormatError(f"ensemble member {i} has invalid weight {weight!r}")
        members.append((float(weight), validate_density(parse_matrix(item["state"]))))

    total = sum(w for w, _ in members)
    if not members or abs(total - 1.0) > 1e-10:
        raise MatrixFormatError(f"ensemble weights sum to {total:.12g}, expected 1")
    return members
