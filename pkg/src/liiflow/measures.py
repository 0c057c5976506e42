"""Entropic and entanglement measures on small density matrices.

All entropies are in bits. Discord and accessible information use rank-1
projective measurements on a single qubit, optimized by an exhaustive
Bloch-angle grid followed by Nelder-Mead refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .qmat import (
    DensityMatrix,
    PureState,
    clamp_eigenvalues,
    eig_hermitian,
    eigvals_hermitian,
    numerical_rank,
    partial_trace,
    permute_subsystems,
    reduce_pure,
)

PRUNE_PROB = 1e-12
KW_RANK_TOL = 1e-8
# eigenvalues of a unit-trace matrix below this are round-off; square roots would amplify them
SPECTRAL_FLOOR = 1e-14

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
_YY = np.kron(SIGMA_Y, SIGMA_Y)


class MeasurementError(ValueError):
    pass


class RankConditionError(ValueError):
    """The qubit-qudit shortcut needs a rank <= 2 pair."""


@dataclass(frozen=True)
class MeasurementBasis:
    """Projective qubit measurement onto ``|v>`` and its complement.

    ``|v> = (cos(theta/2), e^{i phi} sin(theta/2))``.
    """

    theta: float
    phi: float

    @classmethod
    def canonical(cls, theta: float, phi: float) -> "MeasurementBasis":
        """Fold arbitrary angles into theta in [0, pi], phi in [0, 2 pi)."""
        theta = math.fmod(theta, 2 * math.pi)
        if theta < 0:
            theta += 2 * math.pi
        if theta > math.pi:
            theta = 2 * math.pi - theta
            phi += math.pi
        phi = math.fmod(phi, 2 * math.pi)
        if phi < 0:
            phi += 2 * math.pi
        return cls(theta, phi)

    def vector(self) -> np.ndarray:
        return _bloch_vectors(np.array([self.theta]), np.array([self.phi]))[0]

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        v = self.vector()
        p0 = np.outer(v, v.conj())
        return p0, np.eye(2) - p0


def _bloch_vectors(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    return np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)


@dataclass(frozen=True)
class OptimizerConfig:
    grid_theta: int = 60
    grid_phi: int = 120
    refine_iters: int = 200
    tol: float = 1e-7

    def __post_init__(self):
        if min(self.grid_theta, self.grid_phi, self.refine_iters) < 2:
            raise ValueError("optimizer counts must be >= 2")
        if not self.tol > 0:
            raise ValueError("optimizer tol must be positive")


@dataclass(frozen=True)
class PostMeasurementEnsemble:
    outcomes: tuple[tuple[float, DensityMatrix], ...]

    @property
    def probabilities(self) -> tuple[float, ...]:
        return tuple(p for p, _ in self.outcomes)


@dataclass(frozen=True)
class CorrelationReport:
    s_a: float
    s_b: float
    s_ab: float
    mutual_info: float
    accessible: float
    discord: float
    cond_entropy: float
    cond_entropy_measured: float
    basis_opt: MeasurementBasis
    eof: float | None = None

    def items(self) -> list[tuple[str, float]]:
        """Key/value pairs in the fixed report order (``eof`` only when known)."""
        out = [
            ("s_a", self.s_a),
            ("s_b", self.s_b),
            ("s_ab", self.s_ab),
            ("mutual_info", self.mutual_info),
            ("accessible", self.accessible),
            ("discord", self.discord),
            ("cond_entropy", self.cond_entropy),
            ("cond_entropy_measured", self.cond_entropy_measured),
        ]
        if self.eof is not None:
            out.append(("eof", self.eof))
        out += [("theta_opt", self.basis_opt.theta), ("phi_opt", self.basis_opt.phi)]
        return out


# -- entropies -------------------------------------------------------------


def _as_matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def spectrum_entropy(w) -> np.ndarray:
    """-sum w log2 w along the last axis, 0 log 0 = 0."""
    w = clamp_eigenvalues(w)
    safe = np.where(w > 0, w, 1.0)
    return -np.sum(w * np.log2(safe), axis=-1)


def von_neumann_entropy(rho) -> float:
    """Von Neumann entropy in bits of a ``DensityMatrix`` or a raw matrix."""
    s = float(spectrum_entropy(eigvals_hermitian(_as_matrix(rho))))
    return max(s, 0.0)


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def _split(rho: DensityMatrix, cut: Sequence[int] | None):
    n = rho.n_parties
    a = tuple(sorted(cut)) if cut is not None else (0,)
    if not a or any(not 0 <= i < n for i in a) or len(set(a)) != len(a):
        raise ValueError(f"invalid bipartition {cut} for {n} parties")
    b = tuple(i for i in range(n) if i not in a)
    if not b:
        raise ValueError("bipartition leaves side B empty")
    return a, b


def mutual_information(rho: DensityMatrix, cut: Sequence[int] | None = None) -> float:
    """``S_A + S_B - S_AB``; ``cut`` lists the parties of side A (default party 0)."""
    a, b = _split(rho, cut)
    s_a = von_neumann_entropy(partial_trace(rho, a))
    s_b = von_neumann_entropy(partial_trace(rho, b))
    return s_a + s_b - von_neumann_entropy(rho)


def conditional_entropy(rho: DensityMatrix, cut: Sequence[int] | None = None) -> float:
    """``S(A|B) = S_AB - S_B``; may be negative."""
    _, b = _split(rho, cut)
    return von_neumann_entropy(rho) - von_neumann_entropy(partial_trace(rho, b))


# -- measurement and discord -----------------------------------------------


def _measured_blocks(rho: DensityMatrix, measured: int):
    """Return (blocks, unmeasured dims) with blocks[a, j, b, l], measured party last."""
    n = rho.n_parties
    if not 0 <= measured < n:
        raise IndexError(f"measured party {measured} out of range for {n} parties")
    if rho.dims[measured] != 2:
        raise MeasurementError(
            f"measured party {measured} has dimension {rho.dims[measured]}, expected a qubit"
        )
    rest = [i for i in range(n) if i != measured]
    moved = permute_subsystems(rho, rest + [measured])
    d = moved.matrix.shape[0] // 2
    rest_dims = tuple(rho.dims[i] for i in rest)
    return moved.matrix.reshape(d, 2, d, 2), rest_dims


def _conditional_states(blocks: np.ndarray, vecs: np.ndarray):
    """Unnormalized conditional states for outcome 0 and 1, shape (N, d, d)."""
    s0 = np.einsum("nj,ajbl,nl->nab", vecs.conj(), blocks, vecs)
    s0 = 0.5 * (s0 + np.conj(np.swapaxes(s0, -1, -2)))
    rho_rest = np.einsum("ajbj->ab", blocks)
    s1 = rho_rest[None] - s0
    return s0, s1


def _weighted_entropy(states: np.ndarray) -> np.ndarray:
    """p * S(state / p) for a stack of unnormalized states; pruned below 1e-12."""
    p = np.real(np.trace(states, axis1=-2, axis2=-1))
    live = p >= PRUNE_PROB
    out = np.zeros(p.shape)
    if np.any(live):
        normed = states[live] / p[live][:, None, None]
        out[live] = p[live] * spectrum_entropy(eig_hermitian(normed)[0])
    return out


def _measured_conditional_entropy(blocks: np.ndarray, theta, phi) -> np.ndarray:
    vecs = _bloch_vectors(np.asarray(theta, float), np.asarray(phi, float))
    s0, s1 = _conditional_states(blocks, vecs)
    both = _weighted_entropy(np.concatenate([s0, s1]))
    return both[: len(s0)] + both[len(s0) :]


def post_measurement_ensemble(
    rho: DensityMatrix, basis: MeasurementBasis, measured: int = 1
) -> PostMeasurementEnsemble:
    """Outcome probabilities and normalized states of the unmeasured parties."""
    blocks, rest_dims = _measured_blocks(rho, measured)
    s0, s1 = _conditional_states(blocks, basis.vector()[None])
    d = s0.shape[-1]
    outcomes = []
    for s in (s0[0], s1[0]):
        p = float(np.real(np.trace(s)))
        if p < PRUNE_PROB:
            cond = np.eye(d) / d
        else:
            cond = s / p
        outcomes.append((max(p, 0.0), DensityMatrix(cond, rest_dims, validate=False)))
    return PostMeasurementEnsemble(tuple(outcomes))


def _minimize_conditional(blocks: np.ndarray, cfg: OptimizerConfig):
    """Minimum measured conditional entropy and the basis attaining it."""
    thetas = np.linspace(0.0, math.pi, cfg.grid_theta)
    phis = 2 * math.pi * np.arange(cfg.grid_phi) / cfg.grid_phi
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    values = _measured_conditional_entropy(blocks, tt.ravel(), pp.ravel())
    # argmin returns the first hit: lowest theta index, then lowest phi index
    best = int(np.argmin(values))
    x0 = np.array([tt.ravel()[best], pp.ravel()[best]])
    f0 = float(values[best])

    dtheta = thetas[1] - thetas[0]
    dphi = phis[1] - phis[0]
    simplex = np.array([x0, x0 + [dtheta, 0.0], x0 + [0.0, dphi]])

    def objective(x):
        return float(_measured_conditional_entropy(blocks, x[:1], x[1:])[0])

    res = minimize(
        objective,
        x0,
        method="Nelder-Mead",
        options={
            "maxiter": cfg.refine_iters,
            "xatol": cfg.tol,
            "fatol": cfg.tol,
            "initial_simplex": simplex,
        },
    )
    if res.fun < f0:
        x0, f0 = res.x, float(res.fun)
    return f0, MeasurementBasis.canonical(float(x0[0]), float(x0[1]))


def measured_conditional_entropy(
    rho: DensityMatrix, measured: int = 1, cfg: OptimizerConfig | None = None
) -> tuple[float, MeasurementBasis]:
    """``S_q``: minimum over bases of the average post-measurement entropy."""
    cfg = cfg or OptimizerConfig()
    blocks, _ = _measured_blocks(rho, measured)
    return _minimize_conditional(blocks, cfg)


def accessible_information(
    rho: DensityMatrix, measured: int = 1, cfg: OptimizerConfig | None = None
) -> tuple[float, MeasurementBasis]:
    """Classical correlation ``J`` extracted by measuring party ``measured``."""
    sq, basis = measured_conditional_entropy(rho, measured, cfg)
    rest = [i for i in range(rho.n_parties) if i != measured]
    s_rest = von_neumann_entropy(partial_trace(rho, rest))
    return s_rest - sq, basis


def clamp_discord(value: float, tol: float) -> float:
    if value < 0.0:
        if value <= -tol:
            raise ArithmeticError(f"discord {value:.3e} is below -tol={tol:g}")
        return 0.0
    return value


def discord(rho: DensityMatrix, measured: int = 1, cfg: OptimizerConfig | None = None) -> float:
    """Quantum discord with the measurement on party ``measured``.

    For a pair XY, ``discord(rho_XY, measured=1)`` is the discord
    inaccessible to measurements on Y.
    """
    cfg = cfg or OptimizerConfig()
    return correlation_report(rho, measured, cfg, with_eof=False).discord


def correlation_report(
    rho: DensityMatrix,
    measured: int = 1,
    cfg: OptimizerConfig | None = None,
    with_eof: bool = True,
) -> CorrelationReport:
    """All pairwise scalars of a bipartite state, measurement on ``measured``.

    ``s_a`` and ``s_b`` refer to parties 0 and 1; the conditional entropies
    are of the unmeasured party given the measured one.
    """
    cfg = cfg or OptimizerConfig()
    if rho.n_parties != 2:
        raise ValueError(f"expected a bipartite state, got dims {list(rho.dims)}")
    other = 1 - measured
    s_a = von_neumann_entropy(partial_trace(rho, [0]))
    s_b = von_neumann_entropy(partial_trace(rho, [1]))
    s_ab = von_neumann_entropy(rho)
    s_measured = (s_a, s_b)[measured]
    s_other = (s_a, s_b)[other]
    mi = s_a + s_b - s_ab
    cond = s_ab - s_measured
    sq, basis = measured_conditional_entropy(rho, measured, cfg)
    dd = clamp_discord(sq - cond, cfg.tol)
    if dd == 0.0:
        sq = cond
    acc = s_other - sq
    eof = None
    if with_eof and rho.dims == (2, 2):
        eof = eof_two_qubit(rho)
    return CorrelationReport(
        s_a=s_a,
        s_b=s_b,
        s_ab=s_ab,
        mutual_info=mi,
        accessible=acc,
        discord=dd,
        cond_entropy=cond,
        cond_entropy_measured=sq,
        basis_opt=basis,
        eof=eof,
    )


# -- entanglement -----------------------------------------------------------


def _require_two_qubits(rho: DensityMatrix) -> None:
    if rho.dims != (2, 2):
        raise ValueError(f"expected two qubits, got dims {list(rho.dims)}")


def concurrence(rho: DensityMatrix) -> float:
    """Wootters concurrence of a two-qubit state."""
    _require_two_qubits(rho)
    m = rho.matrix
    w, v = eig_hermitian(m)
    w = np.where(clamp_eigenvalues(w) < SPECTRAL_FLOOR, 0.0, w)
    root = (v * np.sqrt(w)) @ v.conj().T
    flipped = _YY @ m.conj() @ _YY
    r = root @ flipped @ root
    r = 0.5 * (r + r.conj().T)
    mu = clamp_eigenvalues(eigvals_hermitian(r))
    lam = np.sqrt(np.where(mu < SPECTRAL_FLOOR, 0.0, mu))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def eof_from_concurrence(c: float) -> float:
    c = min(max(c, 0.0), 1.0)
    return binary_entropy((1.0 + math.sqrt(1.0 - c * c)) / 2.0)


def eof_two_qubit(rho: DensityMatrix) -> float:
    """Entanglement of formation in bits from the concurrence."""
    return eof_from_concurrence(concurrence(rho))


def _ordered_pair(psi: PureState, first: int, second: int) -> DensityMatrix:
    rho = reduce_pure(psi, sorted((first, second)))
    return rho if first < second else permute_subsystems(rho, [1, 0])


def _kw_checks(psi: PureState, a: int, b: int, e: int) -> None:
    if psi.n_parties != 3 or sorted((a, b, e)) != [0, 1, 2]:
        raise ValueError("expected a tripartite pure state and a labelling of its parties")
    if psi.dims[a] != 2 or psi.dims[b] != 2:
        raise ValueError("target party A and bridge party B must be qubits")
    rank = numerical_rank(_ordered_pair(psi, a, e), KW_RANK_TOL)
    if rank > 2:
        raise RankConditionError(f"rho_AE has rank {rank} > 2")


def eof_qubit_qudit_rank2(
    psi_abe: PureState,
    a: int = 0,
    b: int = 1,
    e: int = 2,
    cfg: OptimizerConfig | None = None,
) -> float:
    """EOF of the (A, E) pair as ``discord_AB (measured on B) + S(A|B)``."""
    _kw_checks(psi_abe, a, b, e)
    rho_ab = _ordered_pair(psi_abe, a, b)
    return discord(rho_ab, measured=1, cfg=cfg) + conditional_entropy(rho_ab, [0])


def discord_qubit_qudit_rank2(psi_abe: PureState, a: int = 0, b: int = 1, e: int = 2) -> float:
    """Discord of (A, E) measured on E as ``EOF_AB + S(A|B)``; no optimizer."""
    _kw_checks(psi_abe, a, b, e)
    rho_ab = _ordered_pair(psi_abe, a, b)
    return eof_two_qubit(rho_ab) + conditional_entropy(rho_ab, [0])
