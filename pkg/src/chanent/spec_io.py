"""Channel specification files.

A specification is a JSON object::

    {"name": "erasure", "dim_in": 2, "dim_out": 3,
     "standard": {"kind": "erasure", "params": {"d": 2, "p": 0.5}}}

with exactly one of ``kraus`` (array of matrices), ``choi`` (one matrix) or
``standard``. A matrix is an array of rows and every entry is ``[re, im]``.
Matrix-valued standard parameters (the replacer's ``sigma``) use the same
encoding.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .channels import ChoiOperator, KrausChannel, choi_to_kraus, standard_channel
from .errors import ChanentError, ValidationError

SOURCES = ("kraus", "choi", "standard")


class SpecError(ValidationError):
    """A channel specification could not be parsed; the message names the field."""


def _matrix(obj: Any, where: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise SpecError(f"{where}: expected a non-empty array of rows")
    rows = []
    width = None
    for i, row in enumerate(obj):
        if not isinstance(row, list):
            raise SpecError(f"{where}[{i}]: expected an array of [re, im] entries")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise SpecError(f"{where}[{i}]: row has {len(row)} entries, expected {width}")
        vals = []
        for j, z in enumerate(row):
            if (
                not isinstance(z, list)
                or len(z) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in z)
            ):
                raise SpecError(f"{where}[{i}][{j}]: expected [re, im] with two numbers, got {z!r}")
            vals.append(complex(z[0], z[1]))
        rows.append(vals)
    return np.array(rows, dtype=np.complex128)


def _encode_matrix(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _int_field(spec: dict, key: str) -> int:
    if key not in spec:
        raise SpecError(f"{key}: missing required field")
    v = spec[key]
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise SpecError(f"{key}: expected a positive integer, got {v!r}")
    return v


def _decode_params(params: dict) -> dict:
    out = {}
    for key, val in params.items():
        if key == "sigma":
            out[key] = _matrix(val, f"standard.params.{key}")
        else:
            out[key] = val
    return out


def channel_from_spec(spec: Any) -> KrausChannel:
    """Build a channel from a decoded specification object.

    Raises:
        SpecError: Missing or malformed fields, several sources, or declared
            dimensions that disagree with the data.
    """
    if not isinstance(spec, dict):
        raise SpecError("top level: expected a JSON object")
    name = spec.get("name", "")
    if not isinstance(name, str):
        raise SpecError(f"name: expected a string, got {name!r}")
    d_in, d_out = _int_field(spec, "dim_in"), _int_field(spec, "dim_out")
    present = [k for k in SOURCES if k in spec]
    if len(present) != 1:
        raise SpecError(f"exactly one of {', '.join(SOURCES)} is required, found {present or 'none'}")
    source = present[0]
    if source == "kraus":
        ops = spec["kraus"]
        if not isinstance(ops, list) or not ops:
            raise SpecError("kraus: expected a non-empty array of matrices")
        mats = [_matrix(k, f"kraus[{i}]") for i, k in enumerate(ops)]
        for i, k in enumerate(mats):
            if k.shape != (d_out, d_in):
                raise SpecError(f"kraus[{i}]: shape {k.shape} does not match dim_out x dim_in = ({d_out}, {d_in})")
        channel = KrausChannel(tuple(mats), d_in, d_out, name)
    elif source == "choi":
        m = _matrix(spec["choi"], "choi")
        if m.shape != (d_in * d_out, d_in * d_out):
            raise SpecError(f"choi: shape {m.shape} does not match (dim_in*dim_out) squared")
        channel = choi_to_kraus(ChoiOperator(m, d_in, d_out), name)
    else:
        std = spec["standard"]
        if not isinstance(std, dict) or "kind" not in std:
            raise SpecError("standard: expected an object with 'kind' and 'params'")
        params = std.get("params", {})
        if not isinstance(params, dict):
            raise SpecError("standard.params: expected an object")
        try:
            channel = standard_channel(std["kind"], **_decode_params(params))
        except SpecError:
            raise
        except ChanentError as exc:
            raise SpecError(f"standard: {exc}") from None
        if (channel.dim_in, channel.dim_out) != (d_in, d_out):
            raise SpecError(
                f"dim_in/dim_out: declared ({d_in}, {d_out}) but {std['kind']} builds "
                f"({channel.dim_in}, {channel.dim_out})"
            )
        channel = KrausChannel(channel.kraus, d_in, d_out, name or channel.name)
    return channel


def load_channel(path: str | Path) -> KrausChannel:
    """Read a channel specification file.

    Raises:
        SpecError: With the line and column of JSON syntax errors, or the
            offending field for schema errors.
        FileNotFoundError: If the file does not exist.
    """
    text = Path(path).read_text()
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return channel_from_spec(spec)
    except SpecError as exc:
        raise SpecError(f"{path}: {exc}") from None


def channel_to_spec(channel: KrausChannel) -> dict:
    return {
        "name": channel.name,
        "dim_in": channel.dim_in,
        "dim_out": channel.dim_out,
        "kraus": [_encode_matrix(k) for k in channel.kraus],
    }


def standard_spec(kind: str, name: str = "", **params) -> dict:
    """Specification object for a standard channel (encodes ``sigma`` if present)."""
    ch = standard_channel(kind, **params)
    enc = {k: (_encode_matrix(v) if k == "sigma" else v) for k, v in params.items()}
    return {
        "name": name or kind,
        "dim_in": ch.dim_in,
        "dim_out": ch.dim_out,
        "standard": {"kind": kind, "params": enc},
    }


def dump_channel(channel: KrausChannel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(channel_to_spec(channel), indent=1))
