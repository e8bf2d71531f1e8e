import csv
import io

import pytest

from hypersbm.cli import main
from hypersbm.exceptions import ParseError
from hypersbm.experiment import (
    COLUMNS,
    parse_config,
    run_experiment,
    summarize,
    trial_seed,
    write_csv,
)

CONFIG = """\
# tiny sweep
d = 3
k = 2
n_grid = 16, 20
trials = 3
master_seed = 5
a = 150, 20   # scaled by n^(d-1)
mode = simplified
eps_clamp = auto
"""


def test_parse_config():
    cfg = parse_config(CONFIG)
    assert cfg.n_grid == (16, 20) and cfg.a == (150.0, 20.0) and cfg.p is None
    assert cfg.eps_clamp is None and cfg.master_seed == 5


@pytest.mark.parametrize("text,line", [
    ("d = 3\nk 2\n", 2),
    ("d = 3\nd = 3\n", 2),
    ("d = x\n", 1),
    ("d = 3\nk = 2\nn_grid = 10\ntrials = 1\nbogus = 1\n", 5),
])
def test_config_errors_cite_line(text, line):
    with pytest.raises(ParseError) as exc:
        parse_config(text)
    assert exc.value.line == line and f"line {line}" in str(exc.value)


@pytest.mark.parametrize("text", [
    "d = 3\nk = 2\ntrials = 1\np = 0.5,0.1\n",
    "d = 3\nk = 2\nn_grid = 10\ntrials = 1\n",
    "d = 3\nk = 2\nn_grid = 10\ntrials = 1\np = 0.5,0.1\na = 1,2\n",
    "d = 3\nk = 2\nn_grid = 20, 10\ntrials = 1\np = 0.5,0.1\n",
])
def test_config_semantic_errors(text):
    with pytest.raises(ParseError):
        parse_config(text)


def test_trial_seeds_are_distinct():
    seeds = {trial_seed(0, i, t) for i in range(5) for t in range(100)}
    assert len(seeds) == 500


def test_single_trial_csv_layout():
    cfg = parse_config("d = 3\nk = 2\nn_grid = 12\ntrials = 1\np = 0.7, 0.1\n")
    records = run_experiment(cfg)
    buf = io.StringIO()
    write_csv(records, buf)
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    assert rows[0] == COLUMNS
    assert [r[0] for r in rows[1:]] == ["trial", "summary"]
    assert rows[1][4] == "ok"


def test_summary_counts():
    records = run_experiment(parse_config(CONFIG))
    assert [(r.n, r.trial) for r in records] == [(n, t) for n in (16, 20) for t in range(3)]
    for s in summarize(records):
        assert s["nonzero_trials"] + s["zero_trials"] == 3


def test_timings_column_is_opt_in():
    records = run_experiment(parse_config(CONFIG))
    plain, timed = io.StringIO(), io.StringIO()
    write_csv(records, plain)
    write_csv(records, timed, timings=True)
    assert "wall_time" not in plain.getvalue().splitlines()[0]
    assert timed.getvalue().splitlines()[0].endswith(",wall_time")


def test_cli_output_independent_of_jobs(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(CONFIG)
    outputs = []
    for jobs in ("1", "8"):
        out = tmp_path / f"j{jobs}.csv"
        assert main(["experiment", str(cfg), "--out", str(out), "--jobs", jobs]) == 0
        outputs.append(out.read_bytes())
    monkeypatch.setenv("HYPERSBM_JOBS", "2")
    out = tmp_path / "env.csv"
    assert main(["experiment", str(cfg), "--out", str(out)]) == 0
    outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]


def test_cli_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("d = 3\nk two\n")
    assert main(["experiment", str(cfg), "--out", str(tmp_path / "o.csv")]) == 2
    assert "line 2" in capsys.readouterr().err
