"""Locally inaccessible information (LII) on tripartite pure states.

Every quantity here is assembled from three primitives evaluated on a pure
state of parties X, Y, Z:

* ``D(x, y)``: discord of the pair xy with the measurement on y,
* ``E(x, y)``: entanglement of formation of the pair xy,
* ``S(x, y)``: conditional entropy S(x|y).

Identities are stored as linear combinations of these terms so that the
residual report can name the evaluation route behind every number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import measures
from .measures import OptimizerConfig
from .qmat import PureState, eig_hermitian, group_parties, reduce_pure, permute_subsystems

ZERO_ENTROPY = 1e-9
SIGN_THRESHOLD = 1e-6
DEFAULT_TOLERANCE = 2e-3

ROUTE_DIRECT = "direct"
ROUTE_ANALYTIC = "kw"
ROUTE_ZERO = "zero"
ROUTE_WOOTTERS = "wootters"


class NotComputableError(ValueError):
    """No evaluation route applies to the requested pair."""


@dataclass(frozen=True)
class TripartiteLabels:
    """Names for the three parties and the subsystems each one groups.

    ``groups[i]`` lists the indices of the underlying ``PureState`` that
    make up party ``names[i]``; composite parties such as an environment
    made of two reservoirs are written ``(2, 3)``.
    """

    names: tuple[str, str, str] = ("A", "B", "E")
    groups: tuple[tuple[int, ...], ...] = ((0,), (1,), (2,))

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "groups", tuple(tuple(int(i) for i in g) for g in self.groups))
        if len(self.names) != 3 or len(set(self.names)) != 3:
            raise ValueError(f"need three distinct labels, got {self.names}")
        if len(self.groups) != 3 or any(not g for g in self.groups):
            raise ValueError("need one non-empty index group per label")
        flat = [i for g in self.groups for i in g]
        if len(set(flat)) != len(flat):
            raise ValueError(f"index groups overlap: {self.groups}")

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown party label {name!r}; known {self.names}") from None

    def check(self, psi: PureState) -> None:
        flat = sorted(i for g in self.groups for i in g)
        if flat != list(range(psi.n_parties)):
            raise ValueError(
                f"label groups {self.groups} must cover subsystems 0..{psi.n_parties - 1} exactly"
            )


@dataclass(frozen=True)
class LiiReport:
    avg: float
    balance: float
    delta_xy: float
    delta_yx: float


@dataclass(frozen=True)
class FlowReport:
    cw: float
    ccw: float
    directed: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class IdentityResidual:
    name: str
    lhs: float
    rhs: float
    residual: float
    route: str


@dataclass(frozen=True)
class IdentityResiduals:
    entries: tuple[IdentityResidual, ...]

    def __getitem__(self, name: str) -> IdentityResidual:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(e.name == name for e in self.entries)

    @property
    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    @property
    def worst(self) -> IdentityResidual:
        return max(self.entries, key=lambda e: e.residual)

    @property
    def max_residual(self) -> float:
        return self.worst.residual


@dataclass(frozen=True)
class ConditionalEntropySign:
    """``S(A|B)`` computed directly and as ``D(E,A) - D(B,A)``."""

    direct: float
    via_discord: float
    sign: str
    sign_via_discord: str

    @property
    def agree(self) -> bool:
        return self.sign == self.sign_via_discord


def classify_sign(value: float, threshold: float = SIGN_THRESHOLD) -> str:
    if value < -threshold:
        return "negative"
    if value > threshold:
        return "positive"
    return "zero"


def _compress_party(t: np.ndarray, axis: int) -> np.ndarray:
    """Restrict one party to the span of its two dominant Schmidt vectors."""
    moved = np.moveaxis(t, axis, 0)
    d = moved.shape[0]
    m = moved.reshape(d, -1)
    w, v = eig_hermitian(m @ m.conj().T)
    top = v[:, ::-1][:, :2]
    out = (top.conj().T @ m).reshape((2,) + moved.shape[1:])
    return np.moveaxis(out, 0, axis)


class TripartiteSystem:
    """Cached evaluator of discords, EOFs and entropies of a tripartite pure state.

    Parties whose reduced state has rank <= 2 are first mapped onto a qubit by
    a local isometry, which leaves every quantity here unchanged and opens the
    qubit-only routes.
    """

    def __init__(
        self,
        psi: PureState,
        labels: TripartiteLabels | None = None,
        cfg: OptimizerConfig | None = None,
        route: str = "auto",
    ):
        labels = labels or TripartiteLabels()
        labels.check(psi)
        if route not in ("auto", ROUTE_DIRECT, ROUTE_ANALYTIC):
            raise ValueError(f"unknown route {route!r}")
        self.labels = labels
        self.cfg = cfg or OptimizerConfig()
        self.route = route
        grouped = group_parties(psi, labels.groups)
        t = grouped.tensor()
        for axis, d in enumerate(grouped.dims):
            if d > 2 and self._rank(grouped, axis) <= 2:
                t = _compress_party(t, axis)
        self.psi = PureState(t.reshape(-1), t.shape, validate=False)
        self._entropy: dict[str, float] = {}
        self._discord: dict[tuple[str, str], tuple[float, str]] = {}
        self._eof: dict[tuple[str, str], tuple[float, str]] = {}

    @staticmethod
    def _rank(psi: PureState, axis: int) -> int:
        rho = reduce_pure(psi, [axis])
        return int(np.sum(eig_hermitian(rho.matrix)[0] > 1e-10))

    # -- primitives -----------------------------------------------------

    def _idx(self, name: str) -> int:
        return self.labels.index(name)

    def _third(self, x: str, y: str) -> str:
        self._idx(x), self._idx(y)
        if x == y:
            raise ValueError(f"pair needs two distinct parties, got ({x}, {y})")
        (z,) = [n for n in self.labels.names if n not in (x, y)]
        return z

    def dim(self, name: str) -> int:
        return self.psi.dims[self._idx(name)]

    def pair_state(self, x: str, y: str):
        """Reduced state of (x, y) with x as party 0."""
        i, j = self._idx(x), self._idx(y)
        rho = reduce_pure(self.psi, sorted((i, j)))
        return rho if i < j else permute_subsystems(rho, [1, 0])

    def entropy(self, x: str) -> float:
        """Entropy of one party; in a pure state S(xy) equals S(z)."""
        if x not in self._entropy:
            rho = reduce_pure(self.psi, [self._idx(x)])
            self._entropy[x] = measures.von_neumann_entropy(rho)
        return self._entropy[x]

    def cond_entropy(self, x: str, y: str) -> float:
        """S(x|y) = S(xy) - S(y) = S(z) - S(y)."""
        return self.entropy(self._third(x, y)) - self.entropy(y)

    def discord_with_route(self, x: str, y: str) -> tuple[float, str]:
        key = (x, y)
        if key not in self._discord:
            self._discord[key] = self._compute_discord(x, y)
        return self._discord[key]

    def discord(self, x: str, y: str) -> float:
        """D(x, y): discord of the pair xy, measurement on y."""
        return self.discord_with_route(x, y)[0]

    def _compute_discord(self, x: str, y: str) -> tuple[float, str]:
        z = self._third(x, y)
        if self.route == "auto" and min(self.entropy(x), self.entropy(y)) < ZERO_ENTROPY:
            return 0.0, ROUTE_ZERO
        direct_ok = self.dim(y) == 2
        analytic_ok = self.dim(x) == 2 and self.dim(z) == 2
        if self.route == ROUTE_DIRECT or (self.route == "auto" and direct_ok):
            if not direct_ok:
                raise NotComputableError(f"direct route needs {y} to be a qubit")
            sq, _ = measures.measured_conditional_entropy(
                self.pair_state(x, y), measured=1, cfg=self.cfg
            )
            value = sq - self.cond_entropy(x, y)
            return measures.clamp_discord(value, self.cfg.tol), ROUTE_DIRECT
        if not analytic_ok:
            raise NotComputableError(
                f"no route for D({x},{y}): {y} is not a qubit and ({x},{z}) is not a qubit pair"
            )
        # D(x, y) = E(x, z) + S(x|z) with z purifying the rank-2 pair xy
        value = measures.eof_two_qubit(self.pair_state(x, z)) + self.cond_entropy(x, z)
        return max(value, 0.0), ROUTE_ANALYTIC

    def eof_with_route(self, x: str, y: str) -> tuple[float, str]:
        key = tuple(sorted((x, y), key=self._idx))
        if key not in self._eof:
            self._eof[key] = self._compute_eof(*key)
        return self._eof[key]

    def eof(self, x: str, y: str) -> float:
        return self.eof_with_route(x, y)[0]

    def _compute_eof(self, x: str, y: str) -> tuple[float, str]:
        z = self._third(x, y)
        if min(self.entropy(x), self.entropy(y)) < ZERO_ENTROPY:
            return 0.0, ROUTE_ZERO
        if self.dim(x) == 2 and self.dim(y) == 2:
            return measures.eof_two_qubit(self.pair_state(x, y)), ROUTE_WOOTTERS
        # E(x, y) = D(x, z) + S(x|z) for a qubit x and a qubit purifier z
        for q in (x, y):
            if self.dim(q) == 2 and self.dim(z) == 2:
                value = self.discord(q, z) + self.cond_entropy(q, z)
                return max(value, 0.0), ROUTE_ANALYTIC
        raise NotComputableError(f"EOF of ({x},{y}) needs a two-qubit or qubit-qudit rank-2 pair")

    # -- derived quantities ----------------------------------------------

    def avg(self, x: str, y: str) -> float:
        return 0.5 * (self.discord(x, y) + self.discord(y, x))

    def balance(self, x: str, y: str) -> float:
        return 0.5 * (self.discord(x, y) - self.discord(y, x))

    def term_value(self, term: tuple[str, str, str]) -> float:
        kind, x, y = term
        if kind == "D":
            return self.discord(x, y)
        if kind == "E":
            return self.eof(x, y)
        if kind == "S":
            return self.cond_entropy(x, y)
        raise ValueError(f"unknown term kind {kind!r}")

    def term_route(self, term: tuple[str, str, str]) -> str | None:
        kind, x, y = term
        if kind == "D":
            return self.discord_with_route(x, y)[1]
        if kind == "E":
            return self.eof_with_route(x, y)[1]
        return None

    def evaluate(self, expr: "Expr") -> float:
        return float(sum(c * self.term_value(t) for c, t in expr))


# An expression is a list of (coefficient, term) with term = (kind, x, y).
Expr = list


def D(x: str, y: str) -> Expr:
    return [(1.0, ("D", x, y))]


def E(x: str, y: str) -> Expr:
    return [(1.0, ("E", x, y))]


def S(x: str, y: str) -> Expr:
    return [(1.0, ("S", x, y))]


def plus(*exprs: Expr) -> Expr:
    return [term for e in exprs for term in e]


def scale(c: float, expr: Expr) -> Expr:
    return [(c * k, t) for k, t in expr]


def minus(a: Expr, b: Expr) -> Expr:
    return plus(a, scale(-1.0, b))


def avg_expr(x: str, y: str) -> Expr:
    return scale(0.5, plus(D(x, y), D(y, x)))


def balance_expr(x: str, y: str) -> Expr:
    return scale(0.5, minus(D(x, y), D(y, x)))


def directed_flow_expr(x: str, y: str, z: str) -> Expr:
    """Flow x -> y -> z: measure x for the pairs xz and xy, then y for yz."""
    return plus(D(z, x), D(y, x), D(z, y))


def cw_expr(a: str, b: str, e: str) -> Expr:
    return plus(D(b, e), D(a, b), D(e, a))


def ccw_expr(a: str, b: str, e: str) -> Expr:
    return plus(D(b, a), D(e, b), D(a, e))


def identity_table(a: str = "A", b: str = "B", e: str = "E") -> list[tuple[str, Expr, Expr]]:
    """Every checked identity as (name, left side, right side)."""
    e_sum = plus(E(a, b), E(a, e), E(b, e))
    cw, ccw = cw_expr(a, b, e), ccw_expr(a, b, e)
    return [
        ("law1", plus(E(a, b), E(a, e)), plus(D(a, b), D(a, e))),
        ("law2", plus(E(a, b), E(b, e)), plus(D(b, a), D(b, e))),
        ("law3", plus(E(a, e), E(b, e)), plus(D(e, a), D(e, b))),
        ("eab2", E(a, b), minus(minus(avg_expr(a, b), balance_expr(e, a)), balance_expr(e, b))),
        ("sum_avg", e_sum, plus(avg_expr(a, b), avg_expr(a, e), avg_expr(b, e))),
        ("sum_flows", e_sum, scale(0.5, plus(cw, ccw))),
        ("sum3", e_sum, cw),
        ("flow_equality", cw, ccw),
        ("cyclic_balance", plus(balance_expr(a, b), balance_expr(b, e), balance_expr(e, a)), []),
        (
            "dif",
            minus(E(a, b), D(a, b)),
            plus(balance_expr(b, a), balance_expr(a, e), balance_expr(b, e)),
        ),
        (
            "dif3",
            minus(E(a, b), D(a, b)),
            scale(0.5, minus(directed_flow_expr(e, a, b), directed_flow_expr(b, a, e))),
        ),
        (
            "dif3_swapped",
            minus(E(a, b), D(b, a)),
            scale(0.5, minus(directed_flow_expr(e, b, a), directed_flow_expr(a, b, e))),
        ),
        (
            "eab3",
            minus(E(a, b), avg_expr(a, b)),
            scale(0.5, minus(plus(D(a, e), D(b, e)), plus(D(e, a), D(e, b)))),
        ),
        ("minimal", E(a, b), minus(plus(D(a, b), D(b, e)), D(e, b))),
        ("minimal2", E(a, b), minus(plus(D(b, a), D(a, e)), D(e, a))),
        ("entropia", scale(-1.0, S(a, b)), minus(D(b, a), D(e, a))),
    ]


def _route_of(system: TripartiteSystem, *exprs: Expr) -> str:
    routes = {system.term_route(t) for ex in exprs for _, t in ex}
    routes.discard(None)
    return "+".join(sorted(routes)) if routes else "none"


def _system(psi, labels, cfg) -> TripartiteSystem:
    if isinstance(psi, TripartiteSystem):
        return psi
    return TripartiteSystem(psi, labels, cfg)


def pairwise_discord(
    psi: PureState,
    labels: TripartiteLabels | None = None,
    pair: tuple[str, str] = ("A", "B"),
    cfg: OptimizerConfig | None = None,
    route: str = "auto",
) -> float:
    """Discord of ``pair = (X, Y)`` with the measurement on Y.

    ``route`` forces ``"direct"`` optimization or the ``"kw"`` analytic
    shortcut; ``"auto"`` picks direct when Y is a qubit.
    """
    system = TripartiteSystem(psi, labels, cfg, route=route)
    return system.discord(*pair)


def lii_pair(
    psi: PureState,
    labels: TripartiteLabels | None = None,
    pair: tuple[str, str] = ("A", "B"),
    cfg: OptimizerConfig | None = None,
) -> LiiReport:
    system = _system(psi, labels, cfg)
    x, y = pair
    dxy, dyx = system.discord(x, y), system.discord(y, x)
    return LiiReport(avg=0.5 * (dxy + dyx), balance=0.5 * (dxy - dyx), delta_xy=dxy, delta_yx=dyx)


def flows(
    psi: PureState, labels: TripartiteLabels | None = None, cfg: OptimizerConfig | None = None
) -> FlowReport:
    system = _system(psi, labels, cfg)
    a, b, e = system.labels.names
    directed = {
        f"{e}->{a}->{b}": directed_flow_expr(e, a, b),
        f"{b}->{a}->{e}": directed_flow_expr(b, a, e),
        f"{e}->{b}->{a}": directed_flow_expr(e, b, a),
        f"{a}->{b}->{e}": directed_flow_expr(a, b, e),
        f"{e}->({a},{b})": plus(D(a, e), D(b, e)),
        f"({a},{b})->{e}": plus(D(e, a), D(e, b)),
    }
    return FlowReport(
        cw=system.evaluate(cw_expr(a, b, e)),
        ccw=system.evaluate(ccw_expr(a, b, e)),
        directed={k: system.evaluate(v) for k, v in directed.items()},
    )


def identity_residuals(
    psi: PureState, labels: TripartiteLabels | None = None, cfg: OptimizerConfig | None = None
) -> IdentityResiduals:
    """Evaluate both sides of every LII identity and their absolute difference."""
    system = _system(psi, labels, cfg)
    a, b, e = system.labels.names
    table = identity_table(a, b, e)
    if system.entropy(e) < ZERO_ENTROPY:
        # rho_AB is pure exactly when the purifying party is decoupled
        table.append(("pure_cond", scale(-1.0, S(a, b)), D(b, a)))
    entries = []
    for name, lhs, rhs in table:
        lv, rv = system.evaluate(lhs), system.evaluate(rhs)
        entries.append(IdentityResidual(name, lv, rv, abs(lv - rv), _route_of(system, lhs, rhs)))
    return IdentityResiduals(tuple(entries))


def conditional_entropy_sign(
    psi: PureState,
    labels: TripartiteLabels | None = None,
    pair: tuple[str, str] = ("A", "B"),
    cfg: OptimizerConfig | None = None,
    threshold: float = SIGN_THRESHOLD,
) -> ConditionalEntropySign:
    system = _system(psi, labels, cfg)
    a, b = pair
    e = system._third(a, b)
    direct = system.cond_entropy(a, b)
    via = system.discord(e, a) - system.discord(b, a)
    return ConditionalEntropySign(
        direct=direct,
        via_discord=via,
        sign=classify_sign(direct, threshold),
        sign_via_discord=classify_sign(via, threshold),
    )


def max_residual(reports: Iterable[IdentityResiduals]) -> tuple[int, IdentityResidual]:
    """Index and entry of the largest residual over a collection of reports."""
    best: tuple[int, IdentityResidual] | None = None
    for i, rep in enumerate(reports):
        w = rep.worst
        if best is None or w.residual > best[1].residual:
            best = (i, w)
    if best is None:
        raise ValueError("no reports")
    return best


__all__ = [
    "TripartiteLabels",
    "TripartiteSystem",
    "LiiReport",
    "FlowReport",
    "IdentityResidual",
    "IdentityResiduals",
    "ConditionalEntropySign",
    "NotComputableError",
    "pairwise_discord",
    "lii_pair",
    "flows",
    "identity_residuals",
    "conditional_entropy_sign",
    "identity_table",
    "classify_sign",
]
