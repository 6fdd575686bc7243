import pandas as pd
import pytest

from ris_uwoc_perf import cli, uwoc_link

SPEC = """
[sweep.df_hd]
metric = op
protocol = df
detection = hd
water = salty:4.7
points_db = 0, 10
methods = exact, asymptotic
"""


@pytest.fixture
def spec_file(tmp_path):
    path = tmp_path / "spec.ini"
    path.write_text(SPEC)
    return path


def test_tables(capsys):
    assert cli.main(["tables", "-q"]) == cli.EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 1 + len(uwoc_link.available_rows())
    assert lines[0].startswith("key,")


def test_tables_to_file(tmp_path):
    out = tmp_path / "tables.csv"
    assert cli.main(["tables", "-q", "-o", str(out)]) == cli.EXIT_OK
    assert len(pd.read_csv(out)) == len(uwoc_link.available_rows())


def test_sweep_writes_csv(spec_file, tmp_path):
    out = tmp_path / "out.csv"
    assert cli.main(["sweep", str(spec_file), "-q", "-o", str(out)]) == cli.EXIT_OK
    frame = pd.read_csv(out)
    assert len(frame) == 4
    assert list(frame["method"]) == ["exact", "asymptotic"] * 2
    assert frame["error"].isna().all()


def test_sweep_to_stdout_as_json(spec_file, capsys):
    args = ["sweep", str(spec_file), "-q", "-f", "json", "-m", "exact"]
    assert cli.main(args) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert out.lstrip().startswith("[")
    assert "diagnostics" in out


def test_invalid_spec_exits_with_two(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[sweep.bad]\nmetric = op\npoints_db = 0\nwavelength = 450\n")
    assert cli.main(["sweep", str(path), "-q"]) == cli.EXIT_INVALID_SPEC
    assert cli.main(["sweep", str(tmp_path / "missing.ini"), "-q"]) == cli.EXIT_INVALID_SPEC


def test_unknown_sweep_name(spec_file):
    args = ["sweep", str(spec_file), "-q", "-s", "nope"]
    assert cli.main(args) == cli.EXIT_INVALID_SPEC


def test_failed_points_exit_with_one(spec_file, tmp_path, monkeypatch):
    from ris_uwoc_perf import metrics
    from ris_uwoc_perf.exceptions import ConvergenceError

    def stalled(*args, **kwargs):
        raise ConvergenceError("stalled")

    monkeypatch.setattr(metrics, "op_df", stalled)
    out = tmp_path / "out.csv"
    assert cli.main(["sweep", str(spec_file), "-q", "-o", str(out)]) == cli.EXIT_FAILED_POINTS
    frame = pd.read_csv(out)
    assert frame["error"].fillna("").str.startswith("ConvergenceError").sum() == 2


def test_overrides_and_argument_file(spec_file, tmp_path):
    args_file = tmp_path / "args.txt"
    out = tmp_path / "mc.csv"
    args_file.write_text(
        "\n".join(
            ["sweep", str(spec_file), "-q", "-m", "mc", "--samples", "20000", "--seed", "3",
             "-o", str(out)]
        )
    )
    assert cli.main([f"@{args_file}"]) == cli.EXIT_OK
    frame = pd.read_csv(out)
    assert set(frame["method"]) == {"mc"}
    assert (frame["std_err"] > 0).all()


def test_parser_rejects_missing_arguments():
    with pytest.raises(SystemExit) as exc:
        cli.main(["sweep"])
    assert exc.value.code == 2


def test_tracking(spec_file, tmp_path):
    mlflow = pytest.importorskip("mlflow")
    uri = (tmp_path / "mlruns").as_uri()
    args = ["sweep", str(spec_file), "-q", "-o", str(tmp_path / "o.csv"), "--track",
            "--experiment", "cli-test", "--tracking_uri", uri]
    assert cli.main(args) == cli.EXIT_OK
    mlflow.set_tracking_uri(uri)
    runs = mlflow.search_runs(experiment_names=["cli-test"])
    # one parent run plus one per (method, curve)
    assert len(runs) == 3
