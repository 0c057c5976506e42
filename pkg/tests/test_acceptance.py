"""End-to-end acceptance criteria, one test per criterion.

Each test records a single ``criterion N: PASS|FAIL ...`` line which the
conftest hook prints in the terminal summary.
"""

import time

import numpy as np
import pytest

from liiflow.cli import run
from liiflow.dynamics import InitialAmplitudes, esd_sweep, first_zero_crossing
from liiflow.lii import (
    TripartiteSystem,
    conditional_entropy_sign,
    identity_residuals,
    lii_pair,
)
from liiflow.measures import (
    concurrence,
    discord,
    eof_two_qubit,
    mutual_information,
)
from liiflow.qmat import DensityMatrix, PureState, haar_random_pure_batch, ket

from .conftest import bell_vector, projector

TOL = 2e-3
ESD_TOL = 5e-3
SUITE_SEED = 42
SUITE_SIZE = 50


def record(log, n, ok, detail):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    log.append(line)
    print(line)
    assert ok, line


def worst(reports, names):
    return max(rep[name].residual for rep in reports for name in names)


@pytest.fixture(scope="module")
def suite():
    states = haar_random_pure_batch([2, 2, 2], SUITE_SIZE, SUITE_SEED)
    start = time.perf_counter()
    systems = [TripartiteSystem(psi) for psi in states]
    reports = [identity_residuals(s) for s in systems]
    elapsed = time.perf_counter() - start
    return systems, reports, elapsed


@pytest.fixture(scope="module")
def esd_records():
    amps = InitialAmplitudes.from_alpha_sq(1 / 3)
    return amps, esd_sweep(amps)


def test_criterion_01_conservation_laws(suite, acceptance_log):
    _, reports, elapsed = suite
    r = worst(reports, ["law1", "law2", "law3"])
    ok = r <= TOL and elapsed <= 120
    record(acceptance_log, 1, ok, f"max law1-3 residual {r:.2e} <= {TOL}; suite {elapsed:.1f}s <= 120s")


def test_criterion_02_flow_equality_and_cycle_sum(suite, acceptance_log):
    _, reports, _ = suite
    r_eq = worst(reports, ["flow_equality"])
    r_sum = worst(reports, ["sum3"])
    ok = r_eq <= TOL and r_sum <= TOL
    record(acceptance_log, 2, ok, f"|cw-ccw| {r_eq:.2e}, |E-sum - cw| {r_sum:.2e} <= {TOL}")


def test_criterion_03_cyclic_balance(suite, acceptance_log):
    _, reports, _ = suite
    r = worst(reports, ["cyclic_balance"])
    record(acceptance_log, 3, r <= TOL, f"cyclic balance residual {r:.2e} <= {TOL}")


def test_criterion_04_minimal_and_conditional_entropy(suite, acceptance_log):
    systems, reports, _ = suite
    r = worst(reports, ["minimal", "minimal2", "entropia"])
    signs = [conditional_entropy_sign(s) for s in systems]
    disagree = sum(not s.agree for s in signs)
    ok = r <= TOL and disagree == 0
    record(acceptance_log, 4, ok, f"minimal/minimal2/entropia residual {r:.2e} <= {TOL}; sign disagreements {disagree}")


def test_criterion_05_pure_state_collapse(acceptance_log):
    states = haar_random_pure_batch([2, 2], 20, 5)
    gaps = []
    for psi in states:
        tri = PureState(np.kron(psi.amplitudes, ket("0")), [2, 2, 2])
        e = eof_two_qubit(psi.density())
        gaps.append(abs(e - lii_pair(tri).avg))
    r = max(gaps)
    record(acceptance_log, 5, r <= TOL, f"max |E - avg LII| {r:.2e} <= {TOL} over 20 states")


def test_criterion_06_dual_routes(acceptance_log):
    states = haar_random_pure_batch([2, 2, 2], 20, 6)
    e_gap = d_gap = 0.0
    for psi in states:
        direct = TripartiteSystem(psi, route="direct")
        analytic = TripartiteSystem(psi, route="kw")
        # E_AE: Wootters on rho_AE against discord(A,B) + S(A|B)
        e_wootters = eof_two_qubit(direct.pair_state("A", "E"))
        e_kw = direct.discord("A", "B") + direct.cond_entropy("A", "B")
        e_gap = max(e_gap, abs(e_wootters - e_kw))
        d_gap = max(d_gap, abs(direct.discord("A", "E") - analytic.discord("A", "E")))
    ok = e_gap <= TOL and d_gap <= TOL
    record(acceptance_log, 6, ok, f"E_AE gap {e_gap:.2e}, discord_AE gap {d_gap:.2e} <= {TOL}")


def test_criterion_07_esd_crossing(esd_records, acceptance_log):
    amps, records = esd_records
    p_star = amps.crossing
    crossing = first_zero_crossing(records)
    assert crossing is not None, "EOF never reaches zero"
    last_positive = max(r.p for r in records if r.eof_ab > 0)
    at = min(records, key=lambda r: abs(r.p - p_star))
    gap = abs(at.avg_lii_ab - at.balance_sum)
    eof_monotone = all(a.eof_ab >= b.eof_ab - 1e-12 for a, b in zip(records, records[1:]))
    ok = (
        abs(crossing.p - p_star) <= 0.01 + 1e-12
        and last_positive < p_star <= crossing.p
        and gap <= ESD_TOL
        and eof_monotone
    )
    record(
        acceptance_log, 7, ok,
        f"EOF zero at p={crossing.p:.2f} (p*={p_star:.5f}); at p={at.p:.2f} "
        f"|avg - balance sum| {gap:.2e} <= {ESD_TOL}",
    )


def test_criterion_08_eab2_along_sweep(esd_records, acceptance_log):
    _, records = esd_records
    r = max(rec.eab2_residual for rec in records)
    ok = len(records) == 101 and r <= ESD_TOL
    record(acceptance_log, 8, ok, f"max eab2 residual {r:.2e} <= {ESD_TOL} over {len(records)} points")


def test_criterion_09_oracle_unit_layer(acceptance_log):
    bell = DensityMatrix(projector(bell_vector()), [2, 2])
    product = DensityMatrix(np.kron(np.diag([0.3, 0.7]), np.diag([0.55, 0.45])), [2, 2])
    classical = DensityMatrix(np.diag([0.5, 0, 0, 0.5]), [2, 2])
    checks = {
        "bell mi": (mutual_information(bell), 2.0),
        "bell discord": (discord(bell), 1.0),
        "bell concurrence": (concurrence(bell), 1.0),
        "product mi": (mutual_information(product), 0.0),
        "product discord": (discord(product), 0.0),
        "product concurrence": (concurrence(product), 0.0),
        "classical mi": (mutual_information(classical), 1.0),
        "classical discord": (discord(classical), 0.0),
    }
    bad = {k: v for k, (v, want) in checks.items() if abs(v - want) > 1e-9}
    err = max(abs(v - want) for v, want in checks.values())
    record(acceptance_log, 9, not bad, f"{len(checks)} oracle values, max error {err:.1e} <= 1e-9 {bad or ''}")


def test_criterion_10_determinism(acceptance_log):
    args = ["verify", "--trials", str(SUITE_SIZE), "--seed", str(SUITE_SEED)]
    code1, out1, _ = run(args)
    code2, out2, _ = run(args)
    ok = code1 == 0 and code2 == 0 and out1.encode() == out2.encode()
    record(acceptance_log, 10, ok, f"two verify runs: exit {code1}/{code2}, {len(out1)} bytes, identical={out1 == out2}")

