"""Plain-text state files.

Layout::

    dims: 2,2
    kind: density
    0.5+0i, 0+0i, 0+0i, 0.5+0i
    ...

``kind: pure`` takes a single line of amplitudes. Complex entries are
written ``a+bi``; whitespace is ignored everywhere.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .qmat import DensityMatrix, InvalidStateError, PureState


class StateFormatError(ValueError):
    pass


def parse_complex(token: str) -> complex:
    t = "".join(token.split())
    if not t:
        raise StateFormatError("empty matrix entry")
    if t.endswith("i"):
        body = t[:-1]
        if body in ("", "+", "-"):
            body += "1"
        t = body + "j"
    try:
        return complex(t)
    except ValueError:
        raise StateFormatError(f"cannot parse complex entry {token!r}") from None


def format_complex(z: complex) -> str:
    re_, im = float(np.real(z)), float(np.imag(z))
    return f"{re_:.17g}{'+' if im >= 0 or np.isnan(im) else '-'}{abs(im):.17g}i"


def _header(line: str, key: str) -> str:
    compact = "".join(line.split())
    prefix = key + ":"
    if not compact.lower().startswith(prefix):
        raise StateFormatError(f"expected '{key}: ...' line, got {line.strip()!r}")
    return compact[len(prefix):]


def loads(text: str) -> DensityMatrix | PureState:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 3:
        raise StateFormatError("state file needs a dims line, a kind line and data")
    try:
        dims = [int(x) for x in _header(lines[0], "dims").split(",")]
    except ValueError:
        raise StateFormatError(f"malformed dims line {lines[0].strip()!r}") from None
    kind = _header(lines[1], "kind").lower()
    rows = [[parse_complex(tok) for tok in ln.split(",")] for ln in lines[2:]]
    n = int(np.prod(dims))
    if kind == "pure":
        if len(rows) != 1 or len(rows[0]) != n:
            raise StateFormatError(f"pure state needs one line of {n} amplitudes")
        return PureState(np.array(rows[0]), dims)
    if kind == "density":
        if len(rows) != n or any(len(r) != n for r in rows):
            raise StateFormatError(f"density matrix needs {n} rows of {n} entries")
        return DensityMatrix(np.array(rows), dims)
    raise StateFormatError(f"unknown kind {kind!r}; expected 'density' or 'pure'")


def load(path: str | Path) -> DensityMatrix | PureState:
    return loads(Path(path).read_text())


def dumps(state: DensityMatrix | PureState) -> str:
    dims = ",".join(str(d) for d in state.dims)
    if isinstance(state, PureState):
        body = [", ".join(format_complex(z) for z in state.amplitudes)]
        kind = "pure"
    else:
        body = [", ".join(format_complex(z) for z in row) for row in state.matrix]
        kind = "density"
    return "\n".join([f"dims: {dims}", f"kind: {kind}", *body]) + "\n"


def dump(state: DensityMatrix | PureState, path: str | Path) -> None:
    Path(path).write_text(dumps(state))


def as_density(state: DensityMatrix | PureState) -> DensityMatrix:
    return state.density() if isinstance(state, PureState) else state


__all__ = [
    "StateFormatError",
    "InvalidStateError",
    "load",
    "loads",
    "dump",
    "dumps",
    "as_density",
    "parse_complex",
    "format_complex",
]
