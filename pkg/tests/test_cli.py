import xml.etree.ElementTree as ET

import orjson
import pytest
from pydantic import ValidationError

from edgematch.cli import main
from edgematch.cli.bench import format_table, summary
from edgematch.cli.model import CommandName, Method, PuzzleKind
from edgematch.geometry.schema import load_placement, load_puzzle, save_placement, save_puzzle
from edgematch.oracle.service import brute_force_solve
from edgematch.status import ExitCode
from tests.factories import PuzzleTestDataFactory, RunConfigFactory


@pytest.fixture
def grid_file(tmp_path):
    path = tmp_path / "grid.json"
    assert main(["generate", "--rows", "2", "--cols", "2", "--colors", "12", "--seed", "7", "--out", str(path)]) == 0
    return path


def test_generate_solve_verify(grid_file, tmp_path):
    # Given
    out = tmp_path / "solution.json"

    # When
    solved = main(["solve", str(grid_file), "--method", "lp", "--out", str(out)])

    # Then
    assert solved == ExitCode.OK
    report = orjson.loads((tmp_path / "solution.report.json").read_bytes())
    assert report["schema_version"] == 1
    assert report["method"] == "lp"
    assert report["solved"] is True
    assert report["trace"]["kind"] == "lp"
    assert main(["verify", str(grid_file), "--placement", str(out)]) == ExitCode.OK


def test_generated_puzzle_carries_planted_solution(grid_file):
    puzzle, planted = load_puzzle(grid_file)
    assert puzzle.n_pieces == 4
    assert planted is not None
    assert main(["verify", str(grid_file)]) == ExitCode.OK


def test_verify_rejects_a_wrong_placement(tmp_path):
    # Given
    puzzle, planted = PuzzleTestDataFactory.distinct_grid()
    save_puzzle(tmp_path / "grid.json", puzzle, planted)
    save_placement(tmp_path / "wrong.json", PuzzleTestDataFactory.swapped(planted, 0, 1))

    # When
    code = main(["verify", str(tmp_path / "grid.json"), "--placement", str(tmp_path / "wrong.json")])

    # Then
    assert code == ExitCode.UNSOLVED


def test_brute_matches_the_oracle(tmp_path):
    # Given
    puzzle, planted = PuzzleTestDataFactory.distinct_grid()
    save_puzzle(tmp_path / "grid.json", puzzle, planted)

    # When
    code = main(["solve", str(tmp_path / "grid.json"), "--method", "brute", "--out", str(tmp_path / "p.json")])

    # Then
    assert code == ExitCode.OK
    assert load_placement(tmp_path / "p.json").assignment == brute_force_solve(puzzle).first.assignment


@pytest.mark.parametrize("tol, expected", [(None, ExitCode.OK), ("1e-12", ExitCode.UNSOLVED)])
def test_brute_uses_the_given_tolerance(tmp_path, tol, expected):
    # Given
    puzzle, _ = PuzzleTestDataFactory.distinct_grid()
    presets = list(puzzle.preset_locations)
    x, y = presets[0]
    presets[0] = (x + 1e-9, y)
    save_puzzle(tmp_path / "grid.json", puzzle.model_copy(update={"preset_locations": tuple(presets)}))
    argv = ["solve", str(tmp_path / "grid.json"), "--method", "brute"]

    # When
    code = main(argv + (["--tol", tol] if tol else []))

    # Then
    assert code == expected


def test_lp_needs_presets(tmp_path):
    puzzle, planted = PuzzleTestDataFactory.pair()
    save_puzzle(tmp_path / "pair.json", puzzle.model_copy(update={"preset_locations": None}), planted)
    assert main(["solve", str(tmp_path / "pair.json"), "--method", "lp"]) == ExitCode.CONTRACT_VIOLATION


def test_malformed_puzzle_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["verify", str(path)]) == ExitCode.PARSE_ERROR


def test_render_writes_svg(grid_file, tmp_path):
    # Given
    out = tmp_path / "grid.svg"

    # When
    code = main(["render", str(grid_file), "--out", str(out)])

    # Then
    assert code == ExitCode.OK
    root = ET.parse(out).getroot()
    assert root.tag.endswith("svg")


def test_render_lp_trace(grid_file, tmp_path):
    # Given
    out = tmp_path / "solution.json"
    main(["solve", str(grid_file), "--out", str(out)])

    # When
    code = main(["render", str(grid_file), "--trace", str(tmp_path / "solution.report.json"),
                 "--out", str(tmp_path / "trace.svg")])

    # Then
    assert code == ExitCode.OK
    assert ET.parse(tmp_path / "trace.svg").getroot().findall("{http://www.w3.org/2000/svg}g")


def test_render_trace_needs_a_report(grid_file):
    assert main(["render", str(grid_file), "--trace", str(grid_file)]) == ExitCode.PARSE_ERROR


def test_bench_report(tmp_path, capsys):
    # Given
    report = tmp_path / "bench.json"

    # When
    code = main(["bench", "--runs", "2", "--seed", "3", "--report", str(report)])

    # Then
    assert code == ExitCode.OK
    document = orjson.loads(report.read_bytes())
    assert document["schema_version"] == 1
    assert [run["seed"] for run in document["runs"]] == [3, 4]
    assert all("wall_time" not in run for run in document["runs"])
    assert "success" in capsys.readouterr().out


def test_bench_summary():
    # Given
    rows = [
        {"seed": 0, "solved": True, "status": "converged", "iterations": 2, "wall_time": 0.5},
        {"seed": 1, "solved": False, "status": "max_iter", "iterations": 6, "wall_time": 1.5},
    ]

    # When
    totals = summary(rows)

    # Then
    assert totals["success_rate"] == 0.5
    assert totals["median_iterations"] == 4.0
    assert "50.00%" in format_table(rows, totals)


def test_run_config_defaults():
    config = RunConfigFactory(puzzle="grid.json")
    assert config.method == Method.LP
    assert config.kind == PuzzleKind.GRID


@pytest.mark.parametrize(
    "overrides",
    [
        dict(command=CommandName.SOLVE, puzzle=None),
        dict(command=CommandName.GENERATE, kind=PuzzleKind.BUNDLED),
        dict(command=CommandName.BENCH, method=Method.SDP),
        dict(command=CommandName.BENCH, runs=0),
    ],
)
def test_run_config_rejects(overrides):
    with pytest.raises(ValidationError):
        RunConfigFactory(**overrides)


def test_invalid_arguments_exit_with_contract_violation(tmp_path):
    assert main(["generate", "--kind", "bundled", "--out", str(tmp_path / "x.json")]) == ExitCode.CONTRACT_VIOLATION
