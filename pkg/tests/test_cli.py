import json
from pathlib import Path

import pytest

from dimer_forge import __version__
from dimer_forge.cli import EXIT_FAILED, EXIT_INPUT_ERROR, EXIT_OK, main
from dimer_forge.commands import default_registry
from dimer_forge.config.schema import SEED_ENV_VAR
from dimer_forge.dimers.lattices import cycle, honeycomb, split_center
from dimer_forge.dimers.planarmap import graph_to_dict, parse_graph
from dimer_forge.tgraph.families import cevian, t_shape, triangle
from dimer_forge.utils.helpers import read_ndjson


def _segments(graph) -> dict:
    return graph.to_json()


def _load(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


def test_registry_lists_every_command() -> None:
    assert sorted(default_registry().command_names) == [
        "convert", "sample", "spectral", "tile", "tile-periodic", "verify",
    ]


def test_verify_four_cycle(write_input, tmp_path: Path) -> None:
    source = write_input("cycle.json", graph_to_dict(cycle(2)))
    report = tmp_path / "report.json"

    code = main(["verify", str(source), "--report", str(report)])

    assert code == EXIT_OK
    data = _load(report)
    assert data["ok"] is True
    assert data["command"] == "verify"
    assert data["version"] == __version__
    assert data["result"]["partition_function"] == "2"
    assert data["result"]["matchings"] == 2


def test_verify_prints_to_stdout(write_input, capsys) -> None:
    source = write_input("cycle.json", graph_to_dict(cycle(2)))

    assert main(["verify", str(source)]) == EXIT_OK

    assert json.loads(capsys.readouterr().out)["result"]["partition_function"] == "2"


@pytest.mark.parametrize("payload", ["{not json", "[1, 2]", '{"type": "plane", "vertices": []}'])
def test_malformed_input_exits_with_two(write_input, payload: str) -> None:
    source = write_input("bad.json", payload)

    assert main(["verify", str(source)]) == EXIT_INPUT_ERROR


def test_missing_input_exits_with_two(tmp_path: Path) -> None:
    assert main(["verify", str(tmp_path / "absent.json")]) == EXIT_INPUT_ERROR


def test_usage_errors_exit_with_two() -> None:
    assert main(["launch"]) == EXIT_INPUT_ERROR
    assert main(["tile-periodic", "x.json", "--out", "y.svg", "--window", "ten"]) == EXIT_INPUT_ERROR


def test_version_flag_exits_cleanly() -> None:
    assert main(["--version"]) == EXIT_OK


def test_require_two_nondegenerate_lists_the_cuts(write_input, tmp_path: Path) -> None:
    source = write_input("split.json", graph_to_dict(split_center()))
    report = tmp_path / "report.json"

    code = main(["verify", str(source), "--require-2-nondegenerate", "--report", str(report)])

    assert code == EXIT_FAILED
    data = _load(report)
    assert data["ok"] is False
    assert any("1-cuts" in failure for failure in data["failures"])
    assert [9, 10, 11] in data["result"]["degeneracy"]["interior_one_cuts"]


def test_verify_segment_file_checks_the_bijection(write_input, tmp_path: Path) -> None:
    source = write_input("t.json", _segments(t_shape()))
    report = tmp_path / "report.json"

    code = main(["verify", str(source), "--bijection", "--report", str(report)])

    assert code == EXIT_OK
    result = _load(report)["result"]
    assert result["kind"] == "segments"
    assert result["bijection"]["bijective"] is True
    assert result["duality"]["all_dual_trees"] is True
    assert result["martingale_residual"] == "0"
    assert result["stability_radius"] > 0


def test_verify_torus_graph(write_input, tmp_path: Path) -> None:
    source = write_input("hex.json", graph_to_dict(honeycomb(4, 5, 6)))
    report = tmp_path / "report.json"

    assert main(["verify", str(source), "--report", str(report)]) == EXIT_OK
    result = _load(report)["result"]
    assert result["partition_function"] == "15"
    assert result["sanity"]["consistent"] is True


def test_tile_segment_file(write_input, tmp_path: Path) -> None:
    source = write_input("triangle.json", _segments(triangle()))
    svg = tmp_path / "out" / "triangle.svg"

    code = main(["tile", str(source), "--out", str(svg), "--report", str(tmp_path / "r.json")])

    assert code == EXIT_OK
    text = svg.read_text(encoding="utf-8")
    assert text.count("<polygon") == 4
    assert text.count("<line") == 3
    assert text.count("<circle") == 3


def test_tile_graph_with_roundtrip(write_input, tmp_path: Path) -> None:
    source = write_input("cycle.json", graph_to_dict(cycle(2)))
    report = tmp_path / "report.json"

    code = main(["tile", str(source), "--out", str(tmp_path / "c.svg"), "--roundtrip",
                 "--report", str(report)])

    assert code == EXIT_OK
    result = _load(report)["result"]
    assert result["segments"] == 2
    assert result["roundtrip"]["ok"] is True


def test_tile_periodic_window(write_input, tmp_path: Path) -> None:
    source = write_input("hex.json", graph_to_dict(honeycomb(4, 5, 6)))
    svg = tmp_path / "patch.svg"

    code = main(["tile-periodic", str(source), "--out", str(svg), "--window", "4x4",
                 "--report", str(tmp_path / "r.json")])

    assert code == EXIT_OK
    assert svg.read_text(encoding="utf-8").count("<line") == 16


def test_tile_periodic_without_roots_fails(write_input, tmp_path: Path) -> None:
    source = write_input("frozen.json", graph_to_dict(honeycomb(1, 1, 3)))
    svg = tmp_path / "patch.svg"

    code = main(["tile-periodic", str(source), "--out", str(svg),
                 "--report", str(tmp_path / "r.json")])

    assert code == EXIT_FAILED
    assert not svg.exists()


def test_sample_zero_writes_only_the_header(write_input, tmp_path: Path) -> None:
    source = write_input("cevian.json", _segments(cevian()))
    out = tmp_path / "samples.ndjson"

    code = main(["sample", str(source), "-n", "0", "--out", str(out),
                 "--report", str(tmp_path / "r.json")])

    assert code == EXIT_OK
    rows = read_ndjson(out)
    assert len(rows) == 1
    assert rows[0]["header"] is True
    assert rows[0]["samples"] == 0


def test_sample_is_reproducible(write_input, tmp_path: Path) -> None:
    source = write_input("cevian.json", _segments(cevian()))
    first, second = tmp_path / "a.ndjson", tmp_path / "b.ndjson"

    for out in (first, second):
        assert main(["sample", str(source), "-n", "50", "--seed", "5", "--out", str(out),
                     "--report", str(tmp_path / "r.json")]) == EXIT_OK

    assert first.read_text(encoding="utf-8") == second.read_text(encoding="utf-8")
    rows = read_ndjson(first)
    assert len(rows) == 51
    assert rows[0]["seed"] == 5
    assert rows[-1]["index"] == 49


def test_sample_seed_from_environment(write_input, tmp_path: Path, monkeypatch) -> None:
    monkeypatch.setenv(SEED_ENV_VAR, "9")
    source = write_input("cevian.json", _segments(cevian()))
    out = tmp_path / "samples.ndjson"

    assert main(["sample", str(source), "-n", "3", "--out", str(out),
                 "--report", str(tmp_path / "r.json")]) == EXIT_OK

    assert read_ndjson(out)[0]["seed"] == 9


def test_bad_environment_seed_exits_with_two(write_input, monkeypatch) -> None:
    monkeypatch.setenv(SEED_ENV_VAR, "nine")
    source = write_input("cycle.json", graph_to_dict(cycle(2)))

    assert main(["verify", str(source)]) == EXIT_INPUT_ERROR


def test_sample_with_empirical_check(write_input, tmp_path: Path) -> None:
    source = write_input("cevian.json", _segments(cevian()))
    report = tmp_path / "r.json"

    code = main(["sample", str(source), "-n", "2000", "--empirical", "--seed", "1",
                 "--out", str(tmp_path / "s.ndjson"), "--report", str(report)])

    assert code == EXIT_OK
    empirical = _load(report)["result"]["empirical"]
    assert empirical["samples"] == 2000
    assert empirical["matching_tv"] < 0.05


def test_spectral_honeycomb(write_input, tmp_path: Path) -> None:
    source = write_input("hex.json", graph_to_dict(honeycomb(4, 5, 6)))
    out = tmp_path / "spectral.json"

    code = main(["spectral", str(source), "--out", str(out), "--trials", "3"])

    assert code == EXIT_OK
    result = _load(out)["result"]
    assert len(result["roots"]) == 2
    assert len(result["nullvectors"]) == 2
    assert sum(result["trials"].values()) == 3
    assert result["sanity"]["consistent"] is True


def test_spectral_rejects_plane_graphs(write_input) -> None:
    source = write_input("cycle.json", graph_to_dict(cycle(2)))

    assert main(["spectral", str(source)]) == EXIT_INPUT_ERROR


def test_convert_segments_to_graph(write_input, tmp_path: Path) -> None:
    source = write_input("t.json", _segments(t_shape()))
    out = tmp_path / "graph.json"

    assert main(["convert", str(source), "--to", "graph", "--out", str(out),
                 "--report", str(tmp_path / "r.json")]) == EXIT_OK

    graph = parse_graph(out.read_text(encoding="utf-8"))
    assert len(graph.blacks) == len(graph.whites) == 2


def test_convert_normalizes_graph_files(write_input, tmp_path: Path) -> None:
    original = graph_to_dict(cycle(3, weights=[1, "2/4", 3, 4, 5, 6]))
    source = write_input("hexagon.json", original)
    out = tmp_path / "normalized.json"

    assert main(["convert", str(source), "--out", str(out),
                 "--report", str(tmp_path / "r.json")]) == EXIT_OK

    assert _load(out) == original
    assert _load(out)["edges"][1]["weight"] == "1/2"
