import json
import shutil

import pytest
from click.testing import CliRunner

from dramaturg.cli import main
from dramaturg.scriptio import load_session, scrub_timestamps, session_to_dict
from fixtures import pool_pit as pp


@pytest.fixture()
def runner():
    return CliRunner()


def invoke(runner, *args):
    result = runner.invoke(main, list(args), catch_exceptions=False)
    return result


class TestNewRunExport:
    def test_pipeline_writes_script(self, runner, tmp_path):
        session_path = tmp_path / "s.json"
        result = invoke(
            runner, "new", "--logline", "A gardener duels a storm.", "--out", str(session_path)
        )
        assert result.exit_code == 0, result.output
        assert session_path.exists()

        result = invoke(runner, "run", str(session_path), "--full", "--seed", "7")
        assert result.exit_code == 0, result.output

        script_path = tmp_path / "script.txt"
        result = invoke(runner, "export", str(session_path), "--out", str(script_path))
        assert result.exit_code == 0, result.output
        text = script_path.read_text()
        assert "CHARACTERS" in text and "SCENE 1" in text

    def test_run_requires_full_flag(self, runner, tmp_path):
        session_path = tmp_path / "s.json"
        invoke(runner, "new", "--logline", "A tale.", "--out", str(session_path))
        result = runner.invoke(main, ["run", str(session_path)])
        assert result.exit_code != 0

    def test_export_incomplete_session_fails(self, runner, tmp_path):
        session_path = tmp_path / "s.json"
        invoke(runner, "new", "--logline", "A tale.", "--out", str(session_path))
        result = runner.invoke(main, ["export", str(session_path), "--out", str(tmp_path / "x.txt")])
        assert result.exit_code != 0
        assert "unresolved" in result.output


class TestDeterminism:
    def test_same_seed_twice_identical_sessions(self, runner, tmp_path):
        base = tmp_path / "base.json"
        invoke(runner, "new", "--logline", "A lighthouse keeper adopts a comet.", "--out", str(base))
        first = tmp_path / "one.json"
        second = tmp_path / "two.json"
        shutil.copy(base, first)
        shutil.copy(base, second)
        assert invoke(runner, "run", str(first), "--full", "--seed", "7").exit_code == 0
        assert invoke(runner, "run", str(second), "--full", "--seed", "7").exit_code == 0
        left = scrub_timestamps(session_to_dict(load_session(first)))
        right = scrub_timestamps(session_to_dict(load_session(second)))
        assert left == right

    def test_different_seeds_differ(self, runner, tmp_path):
        base = tmp_path / "base.json"
        invoke(runner, "new", "--logline", "A lighthouse keeper adopts a comet.", "--out", str(base))
        first = tmp_path / "one.json"
        second = tmp_path / "two.json"
        shutil.copy(base, first)
        shutil.copy(base, second)
        invoke(runner, "run", str(first), "--full", "--seed", "7")
        invoke(runner, "run", str(second), "--full", "--seed", "8")
        left = scrub_timestamps(session_to_dict(load_session(first)))
        right = scrub_timestamps(session_to_dict(load_session(second)))
        assert left != right


class TestGenEditMetrics:
    def test_gen_and_edit_and_metrics(self, runner, tmp_path):
        session_path = tmp_path / "s.json"
        invoke(runner, "new", "--logline", "A tale of tests.", "--out", str(session_path))
        result = invoke(runner, "gen", str(session_path), "--slot", "title", "--seed", "3")
        assert result.exit_code == 0
        assert "candidate 0" in result.output

        result = invoke(
            runner, "edit", str(session_path), "--slot", "title", "--text", "My Very Own Title"
        )
        assert result.exit_code == 0

        result = invoke(runner, "metrics", str(session_path))
        assert result.exit_code == 0
        lines = result.output.strip().split("\n")
        header = lines[0].split("\t")
        assert header[:5] == ["slot", "levenshtein", "relative", "jaccard", "length_delta"]
        title_row = next(line for line in lines[1:] if line.startswith("title\t"))
        relative = float(title_row.split("\t")[2])
        assert relative > 0

    def test_edit_from_file(self, runner, tmp_path):
        session_path = tmp_path / "s.json"
        text_path = tmp_path / "t.txt"
        text_path.write_text("Title From A File")
        invoke(runner, "new", "--logline", "A tale.", "--out", str(session_path))
        result = invoke(
            runner, "edit", str(session_path), "--slot", "title", "--file", str(text_path)
        )
        assert result.exit_code == 0
        session = load_session(session_path)
        assert session.title_slot.edited_text == "Title From A File"

    def test_edit_needs_exactly_one_source(self, runner, tmp_path):
        session_path = tmp_path / "s.json"
        invoke(runner, "new", "--logline", "A tale.", "--out", str(session_path))
        result = runner.invoke(main, ["edit", str(session_path), "--slot", "title"])
        assert result.exit_code != 0

    def test_metrics_plot_data(self, runner, tmp_path):
        session_path = tmp_path / "s.json"
        invoke(runner, "new", "--logline", "A tale of numbers.", "--out", str(session_path))
        invoke(runner, "gen", str(session_path), "--slot", "title", "--seed", "3")
        invoke(runner, "edit", str(session_path), "--slot", "title", "--text", "Short")
        data_dir = tmp_path / "plots"
        result = invoke(
            runner, "metrics", str(session_path), "--plot-data", str(data_dir)
        )
        assert result.exit_code == 0
        rows = (data_dir / "length_deltas.tsv").read_text().strip().split("\n")
        assert rows[0] == "delta\tnormalized_abs"
        assert len(rows) == 2

    def test_gen_unknown_slot_fails_cleanly(self, runner, tmp_path):
        session_path = tmp_path / "s.json"
        invoke(runner, "new", "--logline", "A tale.", "--out", str(session_path))
        result = runner.invoke(main, ["gen", str(session_path), "--slot", "dialogue:0"])
        assert result.exit_code != 0
        assert "plot" in result.output


class TestPromptSetOption:
    def test_unknown_prompt_set(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["new", "--logline", "A tale.", "--prompt-set", "nope", "--out", str(tmp_path / "s.json")],
        )
        assert result.exit_code != 0

    def test_custom_prompt_set_dir(self, runner, tmp_path):
        custom_dir = tmp_path / "sets"
        custom_dir.mkdir()
        from importlib import resources

        source = resources.files("dramaturg") / "prompts" / "medea.promptset"
        (custom_dir / "house.promptset").write_text(source.read_text())
        session_path = tmp_path / "s.json"
        result = invoke(
            runner,
            "new",
            "--logline",
            "A tale.",
            "--prompt-set",
            "house",
            "--prompt-set-dir",
            str(custom_dir),
            "--out",
            str(session_path),
        )
        assert result.exit_code == 0
        assert json.loads(session_path.read_text())["session"]["prompt_set_name"] == "house"
