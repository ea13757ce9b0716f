"""Acceptance suite: one test per shipped guarantee.

Each test is independent and deterministic (fixed seeds throughout), and the
suite doubles as a worked tour of the package: countering-set convexity,
classical and quantum equilibrium oracles, dynamics convergence, the
analytic-vs-grid cross check, payoff nonlinearity, Bloch geometry, retracts,
boundary coincidence, adiabatic interpolation, and CLI determinism.
"""
import math

import numpy as np
import pytest
import scipy.linalg

import qugame
from qugame import builders as bld
from qugame import gamedoc as gd
from qugame import geometry as geo
from qugame import quantum as qq
from qugame.classical import (
    FiniteGame,
    is_epsilon_nash,
    random_profile,
    support_enumeration_nash,
    verify_countering_convexity,
)
from qugame.cli import run_cli
from qugame.linalg import PureState, haar_random_state, haar_random_unitary
from qugame.quantum import ProductPlay

MATCHING_PENNIES = FiniteGame(
    [np.array([[1.0, -1.0], [-1.0, 1.0]]), np.array([[-1.0, 1.0], [1.0, -1.0]])]
)
PRISONERS = FiniteGame(
    [np.array([[-1.0, -3.0], [0.0, -2.0]]), np.array([[-1.0, 0.0], [-3.0, -2.0]])]
)


def test_01_countering_sets_are_convex():
    # 20 random games (2-3 players, 2-4 strategies each), 5 base profiles
    # apiece, 500 sampled convex combinations of countering profiles per
    # base; every combination must itself counter the base profile
    rng = np.random.default_rng(2025)
    failures = performed = 0
    for _ in range(20):
        num_players = int(rng.integers(2, 4))
        shapes = rng.integers(2, 5, size=num_players)
        tensors = [rng.uniform(-1, 1, size=tuple(shapes)) for _ in range(num_players)]
        game = FiniteGame(tensors)
        done = 0
        while done < 5:
            profile = random_profile(game, rng)
            report = verify_countering_convexity(game, profile, 500, rng)
            if report.shortfall:
                # too few counters sampled to form 500 pairs; draw a new base
                continue
            failures += report.failures
            performed += report.performed
            done += 1
    assert performed == 20 * 5 * 500
    assert failures == 0


def test_02_support_enumeration_matches_textbook_games():
    pennies = support_enumeration_nash(MATCHING_PENNIES)
    assert len(pennies) == 1
    for dist in pennies[0].profile.distributions:
        assert dist == pytest.approx([0.5, 0.5], abs=1e-10)

    dilemma = support_enumeration_nash(PRISONERS)
    assert len(dilemma) == 1
    for dist in dilemma[0].profile.distributions:
        assert dist == pytest.approx([0.0, 1.0], abs=1e-12)

    for game, cert in ((MATCHING_PENNIES, pennies[0]), (PRISONERS, dilemma[0])):
        assert is_epsilon_nash(game, cert.profile, 1e-8) is not None


def test_03_common_target_dynamics_always_reach_verified_equilibria():
    game = bld.bell_state_preparation_demo()
    outcomes = qq.multi_start_dynamics(game, 100, tol=1e-7, max_iter=500, seed=11)
    converged = [o for o in outcomes if o.converged]
    assert len(converged) >= 99
    for outcome in converged:
        cert = qq.verify_epsilon_nash_quantum(
            game, outcome.play, 1e-6, num_probes=16, seed=5
        )
        assert cert is not None


def test_04_analytic_best_response_matches_grid_oracle():
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(10):
        unitary = haar_random_unitary(4, rng)
        targets = (haar_random_state(4, rng), haar_random_state(4, rng))
        game = qugame.build_state_preparation_game((2, 2), unitary, targets)
        play = qq.random_play(game, rng)
        for player in range(2):
            analytic = float(np.linalg.norm(qq.overlap_contraction(game, play, player)))
            grid = qq.grid_best_response_payoff(game, play, player, 64)
            worst = max(worst, abs(analytic - grid))
    assert worst <= 1e-3


def test_05_observable_payoffs_are_nonlinear_and_lose_grid_equilibria():
    witness = qq.observable_nonlinearity_witness()
    assert witness.gap == pytest.approx(0.25, abs=1e-12)
    assert witness.gap > 0.1

    # anti-aligned observable payoffs admit no pure equilibrium on the grid
    alignment = qq.alignment_demo_game()
    report = qq.grid_search_pure_nash(alignment, 32, 0.05)
    assert report.num_equilibria == 0
    assert report.min_max_gain > 0.05

    # the same unitary with a common overlap target does have equilibria:
    # every multi-start run is verified, resolving cycles through the
    # fixed-point candidates of the sweep map
    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 1.0 / math.sqrt(2)
    overlap_game = qq.QuantumGame(
        (2, 2),
        alignment.unitary,
        (qq.OverlapPayoff(PureState(bell)), qq.OverlapPayoff(PureState(bell))),
    )
    outcomes = qq.multi_start_dynamics(overlap_game, 20, tol=1e-9, max_iter=500, seed=7)
    verified = 0
    for outcome in outcomes:
        final = outcome.play
        if not outcome.converged:
            candidates = qq.overlap_fixed_point_candidates(overlap_game)
            assert candidates
            final = min(candidates, key=lambda c: qq.play_distance(c, outcome.play))
        if qq.verify_epsilon_nash_quantum(
            overlap_game, final, 1e-6, num_probes=8, seed=2
        ):
            verified += 1
    assert verified == len(outcomes) == 20


def test_06_bloch_embedding_doubles_projective_distances():
    rng = np.random.default_rng(2024)
    pairs = [(haar_random_state(2, rng), haar_random_state(2, rng)) for _ in range(1000)]
    report = geo.isometry_check(pairs)
    assert report.pairs_checked == 1000
    assert report.max_deviation <= 1e-9


def test_07_hemisphere_retract_fixes_and_projects():
    rng = np.random.default_rng(77)
    worst_fix = 0.0
    for _ in range(1000):
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        v[2] = abs(v[2])
        worst_fix = max(worst_fix, float(np.linalg.norm(geo.hemisphere_retract(v) - v)))
    assert worst_fix <= 1e-12

    rng = np.random.default_rng(123)
    worst_norm = worst_idem = 0.0
    for _ in range(1000):
        v = rng.normal(size=3)
        v *= rng.uniform() ** (1 / 3) / np.linalg.norm(v)
        image = geo.hemisphere_retract(v)
        worst_norm = max(worst_norm, abs(float(np.linalg.norm(image)) - 1.0))
        worst_idem = max(
            worst_idem, float(np.linalg.norm(geo.hemisphere_retract(image) - image))
        )
    assert worst_norm <= 1e-12
    assert worst_idem == 0.0


def test_08_boundary_coincidence_flags_full_sphere_clouds():
    rng = np.random.default_rng(5)
    sphere = rng.normal(size=(8000, 3))
    sphere /= np.linalg.norm(sphere, axis=1, keepdims=True)
    full = geo.boundary_coincidence_check(
        sphere, delta=0.05, num_boundary_samples=2000, seed=99
    )
    assert full.fraction >= 0.95
    assert full.coincident is True
    assert full.status.startswith("retract construction unavailable")

    rng = np.random.default_rng(5)
    hemi = rng.normal(size=(1500, 3))
    hemi /= np.linalg.norm(hemi, axis=1, keepdims=True)
    hemi[:, 2] = np.abs(hemi[:, 2])
    half = geo.boundary_coincidence_check(
        hemi, delta=0.05, num_boundary_samples=2000, seed=99
    )
    assert half.fraction <= 0.7
    assert half.coincident is False


def test_09_adiabatic_games_match_exponentials_and_sweep_verifies():
    schedule = bld.demo_adiabatic_schedule()
    for s, hamiltonian in ((1.0, schedule.h_initial), (0.0, schedule.h_final)):
        game = bld.build_adiabatic_game(schedule, s)
        reference = scipy.linalg.expm(-1j * hamiltonian.matrix * schedule.time)
        assert float(np.abs(game.unitary.matrix - reference).max()) <= 1e-10

    report = bld.sweep_adiabatic(schedule, 3, seed=17)
    assert report.num_rows == 33
    assert {row.s for row in report.rows} == set(schedule.s_values)
    assert len(schedule.s_values) == 11
    assert all(row.verified for row in report.rows)
    assert report.verified == 33


def test_10_cli_outputs_deterministic_and_round_trip(tmp_path):
    builds = [
        (["build", "--kind", "bell-state-prep"], "game"),
        (
            ["build", "--kind", "grover", "--n-qubits", "3", "--target-index", "2",
             "--split", "1,2", "--iterations", "2"],
            "game",
        ),
        (["build", "--kind", "alignment-demo"], "game"),
        (["build", "--kind", "adiabatic", "--s", "0.5"], "game"),
        (["build", "--kind", "schedule"], "schedule"),
    ]
    for index, (argv, doc_kind) in enumerate(builds):
        first = tmp_path / f"first{index}.json"
        second = tmp_path / f"second{index}.json"
        assert run_cli(argv + ["--out", str(first)]) == 0
        assert run_cli(argv + ["--out", str(second)]) == 0
        text = first.read_text()
        assert second.read_text() == text
        if doc_kind == "schedule":
            again = gd.serialize_schedule(gd.parse_schedule(text))
        else:
            again = gd.serialize_game(gd.parse_game(text))
        assert again + "\n" == text

    # seeded commands are byte-stable across repeated runs
    game = tmp_path / "first0.json"
    runs = []
    for name in ("dyn-a.json", "dyn-b.json"):
        out = tmp_path / name
        assert run_cli(
            ["dynamics", "--input", str(game), "--seed", "3", "--out", str(out)]
        ) == 0
        runs.append(out.read_bytes())
    assert runs[0] == runs[1]
