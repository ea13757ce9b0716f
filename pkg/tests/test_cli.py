"""End-to-end checks of the command line front end.

Everything runs in-process through run_cli against files in tmp_path; one
test goes through a real subprocess to cover the module entry point.
"""
import json
import subprocess
import sys

import numpy as np
import pytest

from qugame import builders as bld
from qugame import gamedoc as gd
from qugame import geometry
from qugame.classical import FiniteGame
from qugame.cli import run_cli
from qugame.linalg import PureState
from qugame.quantum import ProductPlay

TRACE_HEADER = "sweep,payoff_p1_re,payoff_p1_im,payoff_p2_re,payoff_p2_im,step_distance"
SWEEP_HEADER = (
    "s,start_id,outcome,iterations,"
    "payoff_player1_re,payoff_player1_im,ground_overlap_magnitude"
)

MATCHING_PENNIES = FiniteGame(
    [np.array([[1.0, -1.0], [-1.0, 1.0]]), np.array([[-1.0, 1.0], [1.0, -1.0]])]
)


def run(*argv) -> int:
    return run_cli([str(a) for a in argv])


def build(tmp_path, kind, *extra):
    out = tmp_path / f"{kind}.json"
    assert run("build", "--kind", kind, *extra, "--out", out) == 0
    return out


def load(path) -> dict:
    return json.loads(path.read_text())


# ----------------------------------------------------------------- build ---

def test_build_kinds_emit_round_trippable_documents(tmp_path):
    games = [
        build(tmp_path, "bell-state-prep"),
        build(tmp_path, "grover", "--n-qubits", 3, "--target-index", 2,
              "--split", "1,2", "--iterations", 2),
        build(tmp_path, "alignment-demo"),
        build(tmp_path, "adiabatic", "--s", 0.5),
    ]
    for path in games:
        text = path.read_text()
        assert gd.serialize_game(gd.parse_game(text)) + "\n" == text
    sched = build(tmp_path, "schedule")
    text = sched.read_text()
    assert gd.serialize_schedule(gd.parse_schedule(text)) + "\n" == text


def test_build_grover_rejects_bad_split(tmp_path):
    out = tmp_path / "g.json"
    rc = run("build", "--kind", "grover", "--n-qubits", 3, "--split", "1,1",
             "--out", out)
    assert rc == 1
    assert not out.exists()


# ----------------------------------------------------------------- solve ---

def test_solve_finite_matching_pennies(tmp_path):
    game = tmp_path / "mp.json"
    game.write_text(gd.serialize_game(MATCHING_PENNIES) + "\n")
    out = tmp_path / "eq.json"
    assert run("solve", "--input", game, "--out", out) == 0
    doc = load(out)
    assert doc["kind"] == "equilibria"
    assert doc["game"] == "finite"
    assert doc["count"] == 1
    for dist in doc["equilibria"][0]["distributions"]:
        assert dist == pytest.approx([0.5, 0.5], abs=1e-10)


def test_solve_quantum_alignment_grid(tmp_path):
    game = build(tmp_path, "alignment-demo")
    out = tmp_path / "grid.json"
    assert run("solve", "--input", game, "--resolution", 8,
               "--epsilon", 0.05, "--out", out) == 0
    doc = load(out)
    assert doc["kind"] == "grid_search"
    assert doc["game"] == "quantum"
    assert doc["resolution"] == 8
    assert doc["num_plays"] == 64 * 64
    # pure misalignment: no profile survives, and the least escapable gain
    # stays at the half-unit floor
    assert doc["num_equilibria"] == 0
    assert doc["equilibrium_indices"] == []
    assert doc["min_max_gain"] >= 0.5 - 1e-9


# -------------------------------------------------------------- dynamics ---

def test_dynamics_bell_converges_with_trace(tmp_path):
    game = build(tmp_path, "bell-state-prep")
    out = tmp_path / "dyn.json"
    trace = tmp_path / "trace.csv"
    assert run("dynamics", "--input", game, "--seed", 11,
               "--trace-out", trace, "--out", out) == 0
    doc = load(out)
    assert doc["kind"] == "dynamics_outcome"
    assert doc["status"] == "converged"
    assert doc["iterations"] == 2
    for re, im in doc["final_payoffs"]:
        assert re == pytest.approx(1.0, abs=1e-9)
        assert im == pytest.approx(0.0, abs=1e-12)
    lines = trace.read_text().splitlines()
    assert lines[0] == TRACE_HEADER
    assert len(lines) - 1 == doc["iterations"]


def test_dynamics_rejects_finite_games(tmp_path):
    game = tmp_path / "mp.json"
    game.write_text(gd.serialize_game(MATCHING_PENNIES) + "\n")
    assert run("dynamics", "--input", game, "--out", tmp_path / "x.json") == 1


def test_dynamics_honours_start_document(tmp_path):
    game = build(tmp_path, "bell-state-prep")
    start = tmp_path / "start.json"
    start.write_text(
        gd.serialize_play(ProductPlay((PureState([1, 0]), PureState([1, 0])))) + "\n"
    )
    out = tmp_path / "dyn.json"
    assert run("dynamics", "--input", game, "--start", start, "--out", out) == 0
    doc = load(out)
    # the prepared pair is already optimal, so the run only confirms it
    assert doc["status"] == "converged"
    assert doc["final_payoffs"][0][0] == pytest.approx(1.0, abs=1e-12)


# ---------------------------------------------------------------- verify ---

def test_verify_quantum_accepts_equilibrium_play(tmp_path):
    game = build(tmp_path, "bell-state-prep")
    play = tmp_path / "play.json"
    play.write_text(
        gd.serialize_play(ProductPlay((PureState([1, 0]), PureState([1, 0])))) + "\n"
    )
    out = tmp_path / "cert.json"
    rc = run("verify", "--input", game, "--play", play,
             "--probes", 8, "--seed", 2, "--out", out)
    doc = load(out)
    assert rc == 0
    assert doc["accepted"] is True
    assert doc["per_player_gain"] == [0, 0]
    assert doc["max_probe_gain"] <= doc["epsilon"]
    assert doc["probes_per_player"] == 8


def test_verify_quantum_rejects_bad_play(tmp_path):
    game = build(tmp_path, "bell-state-prep")
    play = tmp_path / "play.json"
    play.write_text(
        gd.serialize_play(ProductPlay((PureState([0, 1]), PureState([1, 0])))) + "\n"
    )
    out = tmp_path / "cert.json"
    rc = run("verify", "--input", game, "--play", play,
             "--probes", 8, "--seed", 2, "--out", out)
    doc = load(out)
    assert rc == 1
    assert doc["accepted"] is False
    assert doc["per_player_gain"][0] == pytest.approx(1.0, abs=1e-9)
    assert doc["per_player_gain"][1] == 0
    assert "max_probe_gain" not in doc


def test_verify_finite_accepts_uniform_pennies(tmp_path):
    game = tmp_path / "mp.json"
    game.write_text(gd.serialize_game(MATCHING_PENNIES) + "\n")
    prof = tmp_path / "prof.json"
    from qugame.classical import MixedProfile

    prof.write_text(
        gd.serialize_profile(
            MixedProfile((np.array([0.5, 0.5]), np.array([0.5, 0.5])))
        )
        + "\n"
    )
    out = tmp_path / "cert.json"
    rc = run("verify", "--input", game, "--play", prof, "--epsilon", 1e-8,
             "--out", out)
    doc = load(out)
    assert rc == 0
    assert doc["accepted"] is True
    assert doc["per_player_gain"] == [0, 0]


# -------------------------------------------------------------- geometry ---

def _hemisphere_csv(path, count, seed):
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((count, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    pts[:, 2] = np.abs(pts[:, 2])
    lines = ["x,y,z"] + [
        ",".join(gd.format_real(v) for v in row) for row in pts
    ]
    path.write_text("\n".join(lines) + "\n")
    return pts


def test_geometry_report_matches_library(tmp_path):
    cloud = tmp_path / "cloud.csv"
    pts = _hemisphere_csv(cloud, 300, seed=9)
    out = tmp_path / "geo.json"
    assert run("geometry", "--input", cloud, "--boundary-samples", 400,
               "--delta", 0.05, "--seed", 5, "--out", out) == 0
    doc = load(out)
    assert doc["kind"] == "geometry_report"
    assert doc["num_points"] == 300

    hull = geometry.convex_hull(pts)
    report = geometry.boundary_coincidence_check(
        pts, num_boundary_samples=400, delta=0.05, seed=5
    )
    assert doc["hull_vertices"] == hull.vertices.shape[0]
    assert doc["hull_facets"] == hull.facets.shape[0]
    assert doc["coincidence"]["fraction"] == report.fraction
    assert doc["coincidence"]["coincident"] is report.coincident
    assert doc["coincidence"]["status"] == report.status
    # an open hemisphere leaves the flat disc uncovered
    assert doc["coincidence"]["coincident"] is False


# ----------------------------------------------------------------- sweep ---

def _small_schedule(path):
    demo = bld.demo_adiabatic_schedule()
    small = bld.AdiabaticSchedule(demo.h_initial, demo.h_final, (0.0, 1.0), 1.0)
    path.write_text(gd.serialize_schedule(small) + "\n")


def test_sweep_endpoint_schedule(tmp_path):
    sched = tmp_path / "sched.json"
    _small_schedule(sched)
    csv = tmp_path / "sweep.csv"
    rep = tmp_path / "rep.json"
    assert run("sweep", "--input", sched, "--starts", 2, "--seed", 17,
               "--report-out", rep, "--out", csv) == 0
    doc = load(rep)
    assert doc == {"kind": "sweep_report", "rows": 4, "converged": 4, "verified": 4}
    lines = csv.read_text().splitlines()
    assert lines[0] == SWEEP_HEADER
    assert len(lines) - 1 == 4
    cells = [line.split(",") for line in lines[1:]]
    assert [c[0] for c in cells] == ["0", "0", "1", "1"]
    assert [c[1] for c in cells] == ["0", "1", "0", "1"]
    assert all(c[2] == "converged" for c in cells)


# ---------------------------------------------------------- determinism ---

def test_seeded_runs_are_byte_identical(tmp_path):
    game = build(tmp_path, "bell-state-prep")
    cloud = tmp_path / "cloud.csv"
    _hemisphere_csv(cloud, 200, seed=4)

    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    for out in (first, second):
        assert run("dynamics", "--input", game, "--seed", 3, "--out", out) == 0
    assert first.read_bytes() == second.read_bytes()

    for out in (first, second):
        assert run("geometry", "--input", cloud, "--boundary-samples", 300,
                   "--seed", 5, "--out", out) == 0
    assert first.read_bytes() == second.read_bytes()


# --------------------------------------------------------------- failure ---

def test_usage_errors_exit_2(tmp_path):
    assert run() == 2
    assert run("frobnicate") == 2
    assert run("solve") == 2  # missing --input/--out
    assert run("build", "--kind", "nonsense", "--out", tmp_path / "x.json") == 2


def test_domain_errors_exit_1(tmp_path):
    out = tmp_path / "out.json"
    assert run("solve", "--input", tmp_path / "missing.json", "--out", out) == 1

    corrupt = tmp_path / "corrupt.json"
    corrupt.write_text("{not json\n")
    assert run("solve", "--input", corrupt, "--out", out) == 1

    game = build(tmp_path, "bell-state-prep")
    stretched = tmp_path / "stretched.json"
    stretched.write_text(
        '{"schema_version":1,"kind":"play","factors":'
        '[[[1.01,0],[0,0]],[[1,0],[0,0]]]}\n'
    )
    assert run("verify", "--input", game, "--play", stretched, "--out", out) == 1


# ------------------------------------------------------------ entrypoint ---

def test_module_entry_point_subprocess(tmp_path):
    out = tmp_path / "sched.json"
    proc = subprocess.run(
        [sys.executable, "-m", "qugame.cli", "build", "--kind", "schedule",
         "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    sched = gd.parse_schedule(out.read_text())
    assert sched.s_values == bld.demo_adiabatic_schedule().s_values
