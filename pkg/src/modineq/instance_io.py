"""Reading and writing instance files.

An instance file is a JSON document::

    {
      "format": "modineq-instance",
      "version": 1,
      "algebra": [2, 3],
      "functionals": {
        "eta": [{"re": [[...], [...]], "im": [[...], [...]]}, {...}],
        "phi": [...]
      },
      "metadata": {"seed": 1, "kind": "random", "description": "..."}
    }

Each functional lists one density per block as separate real and imaginary
arrays.  Densities must be Hermitian to ``1e-8`` (relative to
``max(1, max |entry|)``) and positive semidefinite.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .algebra import Algebra, NormalFunctional
from .errors import InputError, NotPSDError
from .numerics import DEFAULT_TOL, TolerancePolicy
from .sampling import Instance

__all__ = ["FORMAT", "HERMITIAN_TOL", "dumps_instance", "write_instance", "loads_instance", "read_instance"]

FORMAT = "modineq-instance"
VERSION = 1
HERMITIAN_TOL = 1e-8


def _encode_block(m: np.ndarray) -> dict:
    return {"re": np.real(m).tolist(), "im": np.imag(m).tolist()}


def dumps_instance(instance: Instance) -> str:
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "algebra": list(instance.algebra.blocks),
        "functionals": {
            name: [_encode_block(d) for d in f.densities] for name, f in instance.functionals.items()
        },
        "metadata": dict(instance.metadata, id=instance.id),
    }
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def write_instance(instance: Instance, path) -> None:
    Path(path).write_text(dumps_instance(instance), encoding="utf-8", newline="\n")


def _decode_block(raw, where: str, n: int) -> np.ndarray:
    if not isinstance(raw, dict) or "re" not in raw:
        raise InputError(f"{where}: expected an object with 're' and 'im' arrays")
    try:
        re = np.asarray(raw["re"], dtype=float)
        im = np.asarray(raw.get("im", np.zeros_like(re)), dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: non-numeric entries ({exc})") from None
    if re.shape != (n, n) or im.shape != (n, n):
        raise InputError(f"{where}: expected {n}x{n} arrays, got {re.shape} and {im.shape}")
    m = re + 1j * im
    if not np.all(np.isfinite(m)):
        raise InputError(f"{where}: non-finite entries")
    asym = float(np.max(np.abs(m - m.conj().T)))
    if asym > HERMITIAN_TOL * max(1.0, float(np.max(np.abs(m)))):
        raise InputError(f"{where}: not Hermitian (asymmetry {asym:.2e})")
    return m


def loads_instance(text: str, source: str = "<string>", tol: TolerancePolicy = DEFAULT_TOL) -> Instance:
    """Parse an instance document; errors name the source and the offending entry."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{source}: top level must be an object")
    if doc.get("format", FORMAT) != FORMAT:
        raise InputError(f"{source}: unknown format {doc.get('format')!r}")
    try:
        algebra = Algebra(tuple(doc["algebra"]))
    except KeyError:
        raise InputError(f"{source}: missing 'algebra'") from None
    except (TypeError, ValueError) as exc:
        raise InputError(f"{source}: bad 'algebra' ({exc})") from None
    raw_fs = doc.get("functionals")
    if not isinstance(raw_fs, dict) or not raw_fs:
        raise InputError(f"{source}: 'functionals' must be a non-empty object")
    functionals = {}
    for name, blocks in raw_fs.items():
        where = f"{source}: functionals.{name}"
        if not isinstance(blocks, list) or len(blocks) != len(algebra.blocks):
            raise InputError(f"{where}: expected a list of {len(algebra.blocks)} blocks")
        dens = tuple(_decode_block(b, f"{where}[{k}]", n) for k, (b, n) in enumerate(zip(blocks, algebra.blocks)))
        try:
            functionals[name] = NormalFunctional(algebra, dens, tol)
        except NotPSDError as exc:
            raise NotPSDError(f"{where}: {exc}") from None
    metadata = doc.get("metadata") or {}
    if not isinstance(metadata, dict):
        raise InputError(f"{source}: 'metadata' must be an object")
    ident = str(metadata.get("id", Path(source).stem))
    return Instance(ident, algebra, functionals, metadata)


def read_instance(path, tol: TolerancePolicy = DEFAULT_TOL) -> Instance:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    return loads_instance(text, str(path), tol)
