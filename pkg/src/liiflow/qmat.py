"""Dense linear algebra for small multipartite quantum states.

Matrices are plain ``numpy`` complex arrays. ``DensityMatrix`` and
``PureState`` attach a subsystem-dimension list and validate the physical
invariants on construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
NORM_TOL = 1e-10
NEG_EIG_TOL = 1e-9
RANK_TOL = 1e-10

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


class InvalidStateError(ValueError):
    """Raised when a matrix or vector violates a state invariant."""


class ConvergenceError(RuntimeError):
    pass


def _check_dims(dims: Sequence[int], minimum: int) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims:
        raise InvalidStateError("dims must list at least one subsystem")
    if any(d < minimum for d in dims):
        raise InvalidStateError(f"subsystem dimensions must be >= {minimum}, got {list(dims)}")
    return dims


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix over ``dims``."""

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __init__(self, matrix, dims: Sequence[int], validate: bool = True):
        m = np.array(matrix, dtype=complex)
        dims = _check_dims(dims, 2)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)
        m.setflags(write=False)
        if validate:
            self.validate()

    def validate(self) -> None:
        m, n = self.matrix, int(np.prod(self.dims))
        if m.ndim != 2 or m.shape != (n, n):
            raise InvalidStateError(
                f"matrix shape {m.shape} does not match dims {list(self.dims)} (side {n})"
            )
        herm = np.max(np.abs(m - m.conj().T))
        if herm > HERMITIAN_TOL:
            raise InvalidStateError(f"not Hermitian: max |rho - rho^dagger| = {herm:.3e}")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"trace is {tr:.12g}, expected 1")
        w = eigvals_hermitian(m)
        if w[0] < -NEG_EIG_TOL:
            raise InvalidStateError(
                f"not positive semidefinite: eigenvalue {w[0]:.6g} below {-NEG_EIG_TOL:g}"
            )

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    def __repr__(self) -> str:
        return f"DensityMatrix(dims={list(self.dims)})"


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector over ``dims``.

    Subsystems of dimension 1 are allowed so that a minimal purification of
    a pure state can carry a trivial ancilla.
    """

    amplitudes: np.ndarray
    dims: tuple[int, ...]

    def __init__(self, amplitudes, dims: Sequence[int], validate: bool = True):
        v = np.array(amplitudes, dtype=complex).reshape(-1)
        dims = _check_dims(dims, 1)
        object.__setattr__(self, "amplitudes", v)
        object.__setattr__(self, "dims", dims)
        v.setflags(write=False)
        if validate:
            if v.size != int(np.prod(dims)):
                raise InvalidStateError(
                    f"{v.size} amplitudes do not match dims {list(dims)}"
                )
            norm = np.vdot(v, v).real
            if abs(norm - 1.0) > NORM_TOL:
                raise InvalidStateError(f"squared norm is {norm:.12g}, expected 1")

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)

    def density(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)

    def __repr__(self) -> str:
        return f"PureState(dims={list(self.dims)})"


def approx_equal(a, b, atol: float) -> bool:
    """Elementwise comparison with an explicit absolute tolerance."""
    a, b = np.asarray(a), np.asarray(b)
    return a.shape == b.shape and bool(np.all(np.abs(a - b) <= atol))


def dagger(m: np.ndarray) -> np.ndarray:
    return np.swapaxes(np.conj(m), -1, -2)


def kron(a, b) -> np.ndarray:
    """Tensor product; shape ``(ra*rb, ca*cb)``."""
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    b = np.atleast_2d(np.asarray(b, dtype=complex))
    ra, ca = a.shape
    rb, cb = b.shape
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(ra * rb, ca * cb)


def ket(bits: str, dims: Sequence[int] | None = None) -> np.ndarray:
    """Computational-basis vector, e.g. ``ket("01")``."""
    digits = [int(c) for c in bits]
    dims = tuple(dims) if dims is not None else (2,) * len(digits)
    v = np.zeros(int(np.prod(dims)), dtype=complex)
    v[np.ravel_multi_index(digits, dims)] = 1.0
    return v


def _check_keep(keep: Sequence[int], n: int) -> tuple[int, ...]:
    keep = tuple(int(k) for k in keep)
    if not keep:
        raise ValueError("keep set is empty")
    for k in keep:
        if not 0 <= k < n:
            raise IndexError(f"subsystem index {k} out of range for {n} parties")
    if any(b <= a for a, b in zip(keep, keep[1:])):
        raise ValueError(f"keep indices must be strictly increasing, got {list(keep)}")
    return keep


def partial_trace(state: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state on the subsystems in ``keep`` (original order kept)."""
    dims = state.dims
    n = len(dims)
    keep = _check_keep(keep, n)
    traced = [i for i in range(n) if i not in keep]
    t = state.matrix.reshape(dims + dims)
    # Row and column labels, traced pairs share a label.
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = [rows[i] if i in traced else letters[n + i].upper() for i in range(n)]
    out = [rows[i] for i in keep] + [cols[i] for i in keep]
    reduced = np.einsum(f"{''.join(rows)}{''.join(cols)}->{''.join(out)}", t)
    kd = tuple(dims[i] for i in keep)
    d = int(np.prod(kd))
    return DensityMatrix(reduced.reshape(d, d), kd, validate=False)


def reduce_pure(psi: PureState, keep: Sequence[int]) -> DensityMatrix:
    """Reduced density matrix of a pure state without forming the full projector."""
    n = psi.n_parties
    keep = _check_keep(keep, n)
    rest = [i for i in range(n) if i not in keep]
    t = np.transpose(psi.tensor(), list(keep) + rest)
    kd = tuple(psi.dims[i] for i in keep)
    d = int(np.prod(kd))
    m = t.reshape(d, -1)
    rho = m @ m.conj().T
    if any(x < 2 for x in kd):
        raise InvalidStateError(f"kept subsystems {list(kd)} include a trivial party")
    return DensityMatrix(rho, kd, validate=False)


def _check_perm(perm: Sequence[int], n: int) -> tuple[int, ...]:
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{list(perm)} is not a permutation of 0..{n - 1}")
    return perm


def permute_subsystems(state: DensityMatrix, perm: Sequence[int]) -> DensityMatrix:
    """Reorder subsystems so that new party ``i`` is old party ``perm[i]``."""
    n = state.n_parties
    perm = _check_perm(perm, n)
    t = state.matrix.reshape(state.dims + state.dims)
    t = np.transpose(t, list(perm) + [n + p for p in perm])
    nd = tuple(state.dims[p] for p in perm)
    d = int(np.prod(nd))
    return DensityMatrix(t.reshape(d, d), nd, validate=False)


def permute_pure(psi: PureState, perm: Sequence[int]) -> PureState:
    perm = _check_perm(perm, psi.n_parties)
    t = np.transpose(psi.tensor(), perm)
    return PureState(t.reshape(-1), tuple(psi.dims[p] for p in perm), validate=False)


def group_parties(psi: PureState, groups: Sequence[Sequence[int]]) -> PureState:
    """Merge parties into composite ones, e.g. ``[(0,), (1,), (2, 3)]``."""
    order = [i for g in groups for i in g]
    perm = _check_perm(order, psi.n_parties)
    t = np.transpose(psi.tensor(), perm)
    dims = tuple(int(np.prod([psi.dims[i] for i in g])) for g in groups)
    return PureState(t.reshape(-1), dims, validate=False)


def eig_hermitian(m, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Accepts a single ``(n, n)`` matrix or a stack ``(..., n, n)``; every
    matrix in the stack is rotated in lockstep. Returns ascending real
    eigenvalues and the matrix of eigenvector columns.
    """
    a = np.array(m, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected square matrix, got shape {a.shape}")
    if a.size and np.max(np.abs(a - dagger(a))) > HERMITIAN_TOL:
        raise ValueError("matrix is not Hermitian within 1e-10")
    a = 0.5 * (a + dagger(a))
    n = a.shape[-1]
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy()
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    offmask = ~np.eye(n, dtype=bool)

    for _ in range(max_sweeps + 1):
        if n == 1 or np.max(np.abs(a[..., offmask]), initial=0.0) < tol:
            break
        for p, q in pairs:
            apq = a[..., p, q]
            mag = np.abs(apq)
            live = mag > 1e-30  # far below tol; avoids overflow on subnormals
            phase = np.where(live, apq / np.where(live, mag, 1.0), 1.0)
            app = a[..., p, p].real
            aqq = a[..., q, q].real
            # smaller root of t^2 + 2 t theta - 1 = 0
            theta = np.where(live, (aqq - app) / (2.0 * np.where(live, mag, 1.0)), 0.0)
            t = np.where(
                live, np.sign(theta + (theta == 0)) / (np.abs(theta) + np.hypot(theta, 1.0)), 0.0
            )
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # G = diag(1, conj(phase)) @ [[c, s], [-s, c]] in the (p, q) plane
            g_pp, g_pq = c, s
            g_qp, g_qq = -s * np.conj(phase), c * np.conj(phase)

            cp, cq = a[..., :, p].copy(), a[..., :, q].copy()
            a[..., :, p] = cp * g_pp[..., None] + cq * g_qp[..., None]
            a[..., :, q] = cp * g_pq[..., None] + cq * g_qq[..., None]
            rp, rq = a[..., p, :].copy(), a[..., q, :].copy()
            a[..., p, :] = np.conj(g_pp)[..., None] * rp + np.conj(g_qp)[..., None] * rq
            a[..., q, :] = np.conj(g_pq)[..., None] * rp + np.conj(g_qq)[..., None] * rq
            a[..., p, q] = 0.0
            a[..., q, p] = 0.0

            vp, vq = v[..., :, p].copy(), v[..., :, q].copy()
            v[..., :, p] = vp * g_pp[..., None] + vq * g_qp[..., None]
            v[..., :, q] = vp * g_pq[..., None] + vq * g_qq[..., None]
    else:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")

    w = np.real(np.diagonal(a, axis1=-2, axis2=-1))
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[..., None, :], axis=-1)
    return w, v


def eigvals_hermitian(m) -> np.ndarray:
    return eig_hermitian(m)[0]


def clamp_eigenvalues(w: np.ndarray) -> np.ndarray:
    """Zero round-off negatives in ``[-1e-9, 0)``; anything lower is an error."""
    w = np.asarray(w, dtype=float)
    if w.size and np.min(w) < -NEG_EIG_TOL:
        raise InvalidStateError(
            f"eigenvalue {np.min(w):.6g} below {-NEG_EIG_TOL:g}: matrix is not PSD"
        )
    return np.where(w < 0.0, 0.0, w)


def matrix_sqrt_psd(m) -> np.ndarray:
    w, v = eig_hermitian(m)
    w = clamp_eigenvalues(w)
    return (v * np.sqrt(w)[..., None, :]) @ dagger(v)


def purify(rho: DensityMatrix) -> PureState:
    """Minimal purification: ancilla dimension equals the numerical rank.

    The ancilla is appended as the last party and its basis is the
    eigenbasis of ``rho`` ordered by decreasing eigenvalue.
    """
    w, v = eig_hermitian(rho.matrix)
    w = clamp_eigenvalues(w)[::-1]
    v = v[:, ::-1]
    r = int(np.sum(w > RANK_TOL))
    psi = (v[:, :r] * np.sqrt(w[:r])).reshape(-1)
    psi = psi / np.linalg.norm(psi)
    return PureState(psi, rho.dims + (r,))


def numerical_rank(rho: DensityMatrix, tol: float = RANK_TOL) -> int:
    return int(np.sum(eigvals_hermitian(rho.matrix) > tol))


def haar_random_pure(dims: Sequence[int], seed: int) -> PureState:
    """Haar-distributed pure state from a normalized complex Gaussian vector."""
    dims = _check_dims(dims, 2)
    rng = np.random.default_rng(seed)
    d = int(np.prod(dims))
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(z / np.linalg.norm(z), dims)


def haar_random_pure_batch(dims: Sequence[int], count: int, seed: int) -> list[PureState]:
    """``count`` independent Haar states drawn from one seeded stream."""
    dims = _check_dims(dims, 2)
    rng = np.random.default_rng(seed)
    d = int(np.prod(dims))
    out = []
    for _ in range(count):
        z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        out.append(PureState(z / np.linalg.norm(z), dims))
    return out
