"""Matrix Market and system-descriptor I/O.

Matrices are written as dense ``array complex general`` files with 17
significant digits; coordinate files are densified on load.
"""

import json
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse

from ._errors import InputError
from .operator_model import HamiltonianSystem
from .validation import check_matrix


def read_matrix(path):
    try:
        M = scipy.io.mmread(str(path))
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read Matrix Market file {path}: {exc}") from exc
    if scipy.sparse.issparse(M):
        M = M.toarray()
    return check_matrix(M, str(path))


def write_matrix(path, M, comment=""):
    M = np.asarray(M, dtype=complex)
    scipy.io.mmwrite(str(path), M, comment=comment, field="complex", precision=17)
    return Path(path)


def matrix_from_json(value, name="matrix"):
    """Decode a row-major 2-D list whose entries are numbers or ``[re, im]`` pairs."""
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{name}: malformed inline matrix") from exc
    if arr.ndim == 3 and arr.shape[2] == 2:
        arr = arr[..., 0] + 1j * arr[..., 1]
    elif arr.ndim != 2:
        raise InputError(f"{name}: inline matrix must be a 2-D array of numbers or [re, im] pairs")
    return check_matrix(arr, name)


def matrix_to_json(M):
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def load_system(descriptor, base_dir=None, tol_herm=None):
    """Build a :class:`HamiltonianSystem` from a descriptor.

    ``descriptor`` is a path to a JSON file or an already parsed mapping
    ``{"A": ..., "B": ..., "C": ...}`` whose values are Matrix Market paths
    (relative to the descriptor's directory) or inline matrices.
    """
    if isinstance(descriptor, (str, Path)):
        path = Path(descriptor)
        try:
            data = json.loads(path.read_text())
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read system descriptor {path}: {exc}") from exc
        base_dir = path.parent if base_dir is None else Path(base_dir)
    else:
        data = descriptor
        base_dir = Path(base_dir or ".")
    if not isinstance(data, dict):
        raise InputError("system descriptor must be a JSON object")
    blocks = {}
    for key in ("A", "B", "C"):
        if key not in data:
            raise InputError(f"system descriptor lacks {key!r}")
        value = data[key]
        if isinstance(value, str):
            p = Path(value)
            blocks[key] = read_matrix(p if p.is_absolute() else base_dir / p)
        else:
            blocks[key] = matrix_from_json(value, key)
    kwargs = {} if tol_herm is None else {"tol_herm": tol_herm}
    return HamiltonianSystem(blocks["A"], blocks["B"], blocks["C"], **kwargs)


def save_system(system, out_dir, stem="system"):
    """Write ``A``, ``B``, ``C`` as Matrix Market files plus a descriptor JSON."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    desc = {}
    for key in ("A", "B", "C"):
        name = f"{stem}_{key}.mtx"
        write_matrix(out_dir / name, getattr(system, key))
        desc[key] = name
    path = out_dir / f"{stem}.json"
    path.write_text(json.dumps(desc, indent=2) + "\n")
    return path
