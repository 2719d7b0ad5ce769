"""End-to-end command-line checks run through subprocesses."""

import os
import subprocess
import sys

import pytest

SOLO_DIGEST = "ea718c254c866d3ff2e0d0dd87100d4cf789d3d280323884a2e20d760f5251f6"


def cli(tmp_path, *argv, timeout=300):
    env = dict(os.environ)
    env["ANONSHM_OUT"] = str(tmp_path / "out")
    return subprocess.run(
        [sys.executable, "-m", "anonshm.cli", *argv],
        capture_output=True,
        text=True,
        env=env,
        timeout=timeout,
    )


def lines(proc):
    return proc.stdout.splitlines()


def test_admissible_lists_coprime_sizes(tmp_path):
    p = cli(tmp_path, "admissible", "--n", "2", "--limit", "10")
    assert p.returncode == 0
    assert lines(p) == ["1", "3", "5", "7", "9"]


def test_run_writes_a_trace_and_reports_the_section(tmp_path):
    p = cli(
        tmp_path, "run", "--protocol", "mutex", "--n", "2", "--m", "3",
        "--schedule", "S1*18", "--stamp", "solo",
    )
    assert p.returncode == 0
    assert lines(p) == [
        "steps 18",
        f"digest {SOLO_DIGEST}",
        "cs enter pid=1 step=15",
        "cs exit pid=1 step=18",
    ]
    trace = tmp_path / "out" / "solo" / "traces" / "run.trace"
    assert f"wrote {trace}" in p.stderr
    text = trace.read_text()
    assert text.startswith("anonshm-trace 1\n")
    assert f"digest {SOLO_DIGEST}\n" in text
    assert "protocol mutex" in text


def test_run_stamp_is_derived_from_content(tmp_path):
    argv = ("run", "--protocol", "mutex", "--n", "2", "--m", "3",
            "--schedule", "S1*18")
    a = cli(tmp_path, *argv)
    b = cli(tmp_path, *argv)
    path_a = [ln for ln in a.stderr.splitlines() if ln.startswith("wrote")]
    path_b = [ln for ln in b.stderr.splitlines() if ln.startswith("wrote")]
    assert path_a == path_b

    c = cli(tmp_path, "run", "--protocol", "mutex", "--n", "2", "--m", "3",
            "--schedule", "S1*17")
    path_c = [ln for ln in c.stderr.splitlines() if ln.startswith("wrote")]
    assert path_c != path_a


def test_config_file_with_flag_override(tmp_path):
    cfgfile = tmp_path / "exp.cfg"
    cfgfile.write_text(
        "# smallest usable memory\nprotocol = mutex\nn = 2\nm = 3\n")
    p = cli(tmp_path, "check", "--config", str(cfgfile), "--m", "1",
            "--stamp", "small")
    assert p.returncode == 0
    out = lines(p)
    assert len(out) == 5
    for ln in out:
        prop, status, wpath = ln.split()[:3]
        assert status == "true" and wpath == "-"
        assert "states=43" in ln
    assert [ln.split()[0] for ln in out] == [
        "mutual-exclusion", "state-invariants", "deadlock-freedom",
        "livelock-free", "round-progress",
    ]
    verdicts = tmp_path / "out" / "small" / "verdicts" / "check.verdicts"
    body = verdicts.read_text().splitlines()
    assert body[0] == "# anonshm-verdicts 1"
    assert "# protocol mutex" in body
    assert "# m 1" in body


def test_check_reports_progress_violations_with_witnesses(tmp_path):
    p = cli(tmp_path, "check", "--protocol", "mutex", "--n", "2", "--m", "2",
            "--stamp", "split")
    assert p.returncode == 1
    by_prop = {ln.split()[0]: ln for ln in lines(p)}
    assert by_prop["mutual-exclusion"].split()[1] == "true"
    for prop in ("state-invariants", "deadlock-freedom", "livelock-free",
                 "round-progress"):
        ln = by_prop[prop]
        assert ln.split()[1] == "false"
        wpath = ln.split()[2]
        assert wpath.endswith(f"{prop}.witness") and os.path.exists(wpath)
    assert "failures=94" in by_prop["state-invariants"]
    assert "states=392" in by_prop["state-invariants"]
    assert "note=ladder:r=2:holders=2" in by_prop["state-invariants"]


def test_explore_counts_the_crash_closed_graph(tmp_path):
    p = cli(tmp_path, "explore", "--protocol", "consensus", "--n", "2",
            "--m", "1", "--inputs", "3,5", "--crashes", "--stamp", "g",
            "--dump-edges")
    assert p.returncode == 0
    assert lines(p) == ["states 28 truncated 0 bound-hit -"]
    summary = (tmp_path / "out" / "g" / "traces" / "graph.summary").read_text()
    assert "states 28\n" in summary
    assert "truncated 0\n" in summary
    edge_lines = [ln for ln in summary.splitlines() if ln.startswith("E ")]
    assert edge_lines and all(len(ln.split()) == 4 for ln in edge_lines)


def test_explore_truncation_is_reported(tmp_path):
    p = cli(tmp_path, "explore", "--protocol", "mutex", "--n", "2", "--m", "3",
            "--max-states", "50", "--stamp", "t")
    assert p.returncode == 0
    assert lines(p) == ["states 50 truncated 1 bound-hit states"]


def test_hunt_settles_when_exploration_closes(tmp_path):
    p = cli(tmp_path, "hunt", "--protocol", "setagree", "--n", "2", "--m", "3",
            "--inputs", "4,9", "--explore-states", "60000", "--stamp", "h")
    assert p.returncode == 0
    ln = lines(p)[0]
    assert ln.startswith("agreement true - ")
    assert "explore-complete=1" in ln
    assert "explored-states=2311" in ln


def test_hunt_admits_running_out_of_budget(tmp_path):
    p = cli(tmp_path, "hunt", "--protocol", "consensus", "--n", "3", "--m", "5",
            "--inputs", "1,2,3", "--explore-states", "200", "--walks", "4",
            "--walk-steps", "40", "--stamp", "hb")
    assert p.returncode == 2
    ln = lines(p)[0]
    assert ln.startswith("agreement inconclusive - ")
    assert "note=budget exhausted without a violation" in ln


def witness_path(tmp_path, stamp, prop):
    return tmp_path / "out" / stamp / "witnesses" / f"{prop}.witness"


def test_replay_confirms_a_checked_witness(tmp_path):
    cli(tmp_path, "check", "--protocol", "mutex", "--n", "2", "--m", "2",
        "--stamp", "w")
    wfile = witness_path(tmp_path, "w", "deadlock-freedom")
    p = cli(tmp_path, "replay", str(wfile))
    assert p.returncode == 0
    assert lines(p)[0] == "replay confirmed"


def test_replay_rejects_a_tampered_witness(tmp_path):
    cli(tmp_path, "check", "--protocol", "mutex", "--n", "2", "--m", "2",
        "--stamp", "w2")
    wfile = witness_path(tmp_path, "w2", "deadlock-freedom")
    text = wfile.read_text()
    sched = next(ln for ln in text.splitlines() if ln.startswith("schedule "))
    tampered = text.replace(sched, sched + " S1")
    bad = tmp_path / "tampered.witness"
    bad.write_text(tampered)
    p = cli(tmp_path, "replay", str(bad))
    assert p.returncode == 4
    assert lines(p)[0] == "replay diverged"


def test_trace_replay_is_deterministic(tmp_path):
    cli(tmp_path, "run", "--protocol", "setagree", "--n", "3", "--m", "5",
        "--inputs", "4,9,2", "--random-seed", "7", "--max-steps", "200",
        "--stamp", "r")
    trace = tmp_path / "out" / "r" / "traces" / "run.trace"
    a = cli(tmp_path, "replay", str(trace))
    b = cli(tmp_path, "replay", str(trace))
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout
    assert lines(a)[-1] == "replay confirmed"


def test_crash_flag_is_refused_for_the_lock(tmp_path):
    p = cli(tmp_path, "run", "--protocol", "mutex", "--n", "2", "--m", "3",
            "--schedule", "S1*3", "--crash", "2@1")
    assert p.returncode == 3
    assert "error: mutex runs are failure-free; drop --crash" in p.stderr


def test_crash_plan_applies_to_agreement_runs(tmp_path):
    p = cli(tmp_path, "run", "--protocol", "consensus", "--n", "2", "--m", "1",
            "--inputs", "3,5", "--schedule", "S1*2", "--crash", "2@0",
            "--stamp", "c")
    assert p.returncode == 0
    assert "decisions 1=3" in lines(p)


def test_unknown_property_is_a_usage_error(tmp_path):
    p = cli(tmp_path, "check", "--protocol", "mutex", "--n", "2", "--m", "1",
            "--properties", "fairness")
    assert p.returncode == 3
    assert "error: unknown property 'fairness'" in p.stderr


def test_missing_required_setting_is_a_usage_error(tmp_path):
    p = cli(tmp_path, "run", "--protocol", "mutex", "--n", "2",
            "--schedule", "S1")
    assert p.returncode == 3
    assert "missing required setting 'm'" in p.stderr
