"""MPJSON: the JSON encoding of matrix polynomials and pencils.

A polynomial document is ``{"n": int, "k": int, "coeffs": [A_0, ..., A_k]}`` where every
matrix is a list of rows and every cell a ``[re, im]`` pair. Pencil documents carry
``{"m", "kind", "n", "k", "L1", "L0"}`` with the same cell encoding. An optional
``"metadata"`` object is passed through untouched.
"""

import json
import logging
import os
from typing import Any, Optional, Union

import numpy as np

from .bases import Pencil
from .exceptions import InvalidArgumentException, MPJSONFormatException
from .matpoly import MatrixPolynomial

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]


def encode_matrix(a: np.ndarray) -> list[list[list[float]]]:
    a = np.asarray(a, dtype=complex)
    return [[[float(c.real), float(c.imag)] for c in row] for row in a]


def decode_matrix(cells: Any, n: int, name: str) -> np.ndarray:
    """
    Decode an n x n matrix of [re, im] cells.

    Raises:
        MPJSONFormatException: If the shape or a cell is malformed.
    """
    try:
        arr = np.array(cells, dtype=float)
    except (TypeError, ValueError) as e:
        raise MPJSONFormatException(f"{name}: cells are not numeric [re, im] pairs") from e
    if arr.shape != (n, n, 2):
        raise MPJSONFormatException(f"{name}: expected shape {(n, n, 2)}, got {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def polynomial_to_dict(P: MatrixPolynomial, metadata: Optional[dict] = None) -> dict[str, Any]:
    doc: dict[str, Any] = {"n": P.n, "k": P.k, "coeffs": [encode_matrix(a) for a in P.coeffs]}
    if metadata:
        doc["metadata"] = metadata
    return doc


def polynomial_from_dict(doc: Any) -> tuple[MatrixPolynomial, dict]:
    """
    Build a polynomial from a decoded MPJSON object.

    Returns:
        tuple[MatrixPolynomial, dict]: The polynomial and its metadata (empty if absent).

    Raises:
        MPJSONFormatException: If a key is missing or the sizes disagree.
    """
    if not isinstance(doc, dict):
        raise MPJSONFormatException("MPJSON document must be a JSON object")
    try:
        n, k, coeffs = int(doc["n"]), int(doc["k"]), doc["coeffs"]
    except (KeyError, TypeError, ValueError) as e:
        raise MPJSONFormatException(f"MPJSON polynomial needs integer n, k and coeffs: {e}") from e
    if n < 1 or k < 0:
        raise MPJSONFormatException(f"Invalid dimensions n={n}, k={k}")
    if not isinstance(coeffs, list) or len(coeffs) != k + 1:
        raise MPJSONFormatException(f"Expected {k + 1} coefficients")
    matrices = [decode_matrix(c, n, f"A_{i}") for i, c in enumerate(coeffs)]
    try:
        P = MatrixPolynomial(matrices)
    except InvalidArgumentException as e:
        raise MPJSONFormatException(str(e.message)) from e
    return P, dict(doc.get("metadata") or {})


def pencil_to_dict(L: Pencil) -> dict[str, Any]:
    return {
        "m": L.m,
        "kind": L.kind.value,
        "n": L.n,
        "k": L.k,
        "L1": encode_matrix(L.L1),
        "L0": encode_matrix(L.L0),
    }


def pencil_from_dict(doc: Any) -> Pencil:
    """
    Build a pencil from a decoded MPJSON pencil object.

    Raises:
        MPJSONFormatException: If a key is missing or the sizes disagree.
    """
    if not isinstance(doc, dict):
        raise MPJSONFormatException("MPJSON document must be a JSON object")
    try:
        m = int(doc["m"])
        L1 = decode_matrix(doc["L1"], m, "L1")
        L0 = decode_matrix(doc["L0"], m, "L0")
        data = {"m": m, "kind": doc.get("kind", "custom"), "n": doc.get("n"), "k": doc.get("k"), "L1": L1, "L0": L0}
        return Pencil.from_dict(data)
    except KeyError as e:
        raise MPJSONFormatException(f"MPJSON pencil is missing key {e}") from e
    except InvalidArgumentException as e:
        raise MPJSONFormatException(str(e.message)) from e


def dumps(obj: Union[MatrixPolynomial, Pencil], metadata: Optional[dict] = None) -> str:
    """
    Serialize a polynomial or pencil to MPJSON text.

    Floats are written with their shortest round-tripping representation, so
    ``loads(dumps(P))`` is value-exact.
    """
    doc = pencil_to_dict(obj) if isinstance(obj, Pencil) else polynomial_to_dict(obj, metadata)
    return json.dumps(doc, allow_nan=False) + "\n"


def loads(text: str) -> Union[MatrixPolynomial, Pencil]:
    """Parse MPJSON text into a polynomial or, if it has ``L1``/``L0`` keys, a pencil."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise MPJSONFormatException(f"Invalid JSON: {e}") from e
    if isinstance(doc, dict) and "L1" in doc:
        return pencil_from_dict(doc)
    return polynomial_from_dict(doc)[0]


def dump_polynomial(P: MatrixPolynomial, path: PathLike, metadata: Optional[dict] = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(P, metadata))
    logger.info(f"Wrote {P} to {path}")


def load_polynomial(path: PathLike) -> tuple[MatrixPolynomial, dict]:
    """
    Read a polynomial document from disk.

    Args:
        path (PathLike): The file to read.

    Returns:
        tuple[MatrixPolynomial, dict]: The polynomial and its metadata.

    Raises:
        MPJSONFormatException: If the file is not a valid MPJSON polynomial.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise MPJSONFormatException(f"{path}: invalid JSON: {e}") from e
    P, metadata = polynomial_from_dict(doc)
    logger.info(f"Loaded {P} from {path}")
    return P, metadata


def dump_pencil(L: Pencil, path: PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(L))
    logger.info(f"Wrote {L} to {path}")


def load_pencil(path: PathLike) -> Pencil:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise MPJSONFormatException(f"{path}: invalid JSON: {e}") from e
    return pencil_from_dict(doc)
