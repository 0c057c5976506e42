"""Entanglement sudden death of two qubits under local amplitude damping.

Each qubit decays into its own zero-temperature reservoir qubit. The joint
state of (A, B, R_A, R_B) stays pure, so the reservoirs together act as the
purifying environment E of the pair AB.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import measures
from .lii import TripartiteLabels, TripartiteSystem
from .measures import OptimizerConfig
from .qmat import PureState

DEFAULT_ALPHA_SQ = 1.0 / 3.0
ESD_LABELS = TripartiteLabels(("A", "B", "E"), ((0,), (1,), (2, 3)))


@dataclass(frozen=True)
class InitialAmplitudes:
    """Real amplitudes of ``alpha|00> + beta|11>``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("amplitudes must be non-negative")
        if abs(self.alpha**2 + self.beta**2 - 1.0) > 1e-12:
            raise ValueError(f"alpha^2 + beta^2 = {self.alpha**2 + self.beta**2!r}, expected 1")

    @classmethod
    def from_alpha_sq(cls, alpha_sq: float = DEFAULT_ALPHA_SQ) -> "InitialAmplitudes":
        if not 0.0 <= alpha_sq <= 1.0:
            raise ValueError(f"alpha_sq must lie in [0, 1], got {alpha_sq}")
        return cls(math.sqrt(alpha_sq), math.sqrt(1.0 - alpha_sq))

    def vector(self) -> np.ndarray:
        return np.array([self.alpha, 0.0, 0.0, self.beta], dtype=complex)

    @property
    def crossing(self) -> float:
        """Damping strength at which the pair's entanglement vanishes (1 if never before)."""
        return min(1.0, self.alpha / self.beta) if self.beta > 0 else 1.0


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"damping strength p must lie in [0, 1], got {p}")
    return p


def p_from_decay(gamma_t: float) -> float:
    """Damping strength after a decay time, ``p = 1 - exp(-gamma t)``."""
    if gamma_t < 0:
        raise ValueError("gamma * t must be non-negative")
    return 1.0 - math.exp(-gamma_t)


def damping_isometry(p: float) -> np.ndarray:
    """4x2 isometry from a qubit to (qubit, reservoir) with the reservoir starting in |0>.

    Column 0 is the image of |0>, column 1 the image of |1>; rows are indexed
    by ``2 * system + reservoir``.
    """
    p = _check_p(p)
    v = np.zeros((4, 2), dtype=complex)
    v[0, 0] = 1.0
    v[2, 1] = math.sqrt(1.0 - p)
    v[1, 1] = math.sqrt(p)
    return v


def evolve_esd(amps: InitialAmplitudes, p: float) -> PureState:
    """Joint pure state ordered (A, B, R_A, R_B) after damping of strength ``p``."""
    iso = damping_isometry(p).reshape(2, 2, 2)  # [system, reservoir, input]
    psi0 = amps.vector().reshape(2, 2)
    out = np.einsum("axi,byj,ij->abxy", iso, iso, psi0)
    return PureState(out.reshape(-1), (2, 2, 2, 2))


def analytic_concurrence_esd(amps: InitialAmplitudes, p: float) -> float:
    """Closed-form concurrence ``2 beta (1-p) max(0, alpha - beta p)`` of the damped pair."""
    p = _check_p(p)
    return 2.0 * amps.beta * (1.0 - p) * max(0.0, amps.alpha - amps.beta * p)


def analytic_rho_ab(amps: InitialAmplitudes, p: float) -> np.ndarray:
    """Closed-form X-state of the damped pair in the basis |00>, |01>, |10>, |11>."""
    p = _check_p(p)
    a2, b2, ab = amps.alpha**2, amps.beta**2, amps.alpha * amps.beta
    rho = np.diag([a2 + b2 * p * p, b2 * p * (1 - p), b2 * p * (1 - p), b2 * (1 - p) ** 2])
    rho = rho.astype(complex)
    rho[0, 3] = rho[3, 0] = ab * (1 - p)
    return rho


@dataclass(frozen=True)
class EsdRecord:
    p: float
    eof_ab: float
    avg_lii_ab: float
    balance_sum: float
    concurrence_ab: float
    eab2_residual: float


def esd_record(amps: InitialAmplitudes, p: float, cfg: OptimizerConfig | None = None) -> EsdRecord:
    """One row of the sweep.

    The environment E is the reservoir pair. Discords measured on A or B are
    optimized directly; those measured on the four-dimensional E go through
    ``D(X, E) = EOF_AB + S(X|Y)``.
    """
    system = TripartiteSystem(evolve_esd(amps, p), ESD_LABELS, cfg)
    rho_ab = system.pair_state("A", "B")
    conc = measures.concurrence(rho_ab)
    eof = measures.eof_from_concurrence(conc)
    avg = system.avg("A", "B")
    balance_sum = system.balance("E", "A") + system.balance("E", "B")
    return EsdRecord(
        p=p,
        eof_ab=eof,
        avg_lii_ab=avg,
        balance_sum=balance_sum,
        concurrence_ab=conc,
        eab2_residual=abs(eof - (avg - balance_sum)),
    )


def default_grid(steps: int = 101) -> list[float]:
    if steps < 2:
        raise ValueError("a sweep grid needs at least two points")
    return [i / (steps - 1) for i in range(steps)]


def esd_sweep(
    amps: InitialAmplitudes,
    grid: Sequence[float] | None = None,
    cfg: OptimizerConfig | None = None,
    workers: int = 1,
) -> list[EsdRecord]:
    """Records for every ``p`` in ``grid``, sorted by ``p``."""
    grid = sorted(_check_p(p) for p in (grid if grid is not None else default_grid()))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda p: esd_record(amps, p, cfg), grid))
    else:
        records = [esd_record(amps, p, cfg) for p in grid]
    return sorted(records, key=lambda r: r.p)


def first_zero_crossing(records: Sequence[EsdRecord], floor: float = 0.0) -> EsdRecord | None:
    """First record whose EOF is at or below ``floor``."""
    for r in records:
        if r.eof_ab <= floor:
            return r
    return None
