"""Schedule grammar, deterministic execution, exploration, minimization."""

import pytest

import anonshm as A
import reference_machines as ref
from anonshm.scheduler import Directive, crash_of, fmt_directive, step_of

IDENT = lambda n, m: A.create_permutations(n, m, identity=True)


def consensus_cfg(m=1, n=2, inputs=(3, 5)):
    return A.RunConfig(protocol="consensus", n=n, m=m, perms=IDENT(n, m),
                       inputs=list(inputs))


def mutex_cfg(m=3, n=2, **kw):
    return A.RunConfig(protocol="mutex", n=n, m=m, perms=IDENT(n, m), **kw)


# ---------------------------------------------------------------- grammar

def test_schedule_token_round_trip():
    text = "S1*3 S2 C1 S2@4 S2*2"
    sched = A.parse_schedule(text)
    assert sched == (
        step_of(1), step_of(1), step_of(1), step_of(2), crash_of(1),
        step_of(2, 4), step_of(2), step_of(2),
    )
    assert A.format_schedule(sched) == text
    assert A.format_schedule(sched, compress=False) == \
        "S1 S1 S1 S2 C1 S2@4 S2 S2"


def test_format_only_compresses_identical_directives():
    sched = (step_of(1), step_of(1, 2), step_of(1, 2), step_of(1, 3))
    text = A.format_schedule(sched)
    assert text == "S1 S1@2*2 S1@3"
    assert A.parse_schedule(text) == sched


@pytest.mark.parametrize("bad", [
    "S0", "Sx", "C1@2", "S1*0", "S1**2", "Q3", "S", "S1@", "S1*"])
def test_bad_tokens_rejected(bad):
    with pytest.raises(A.ConfigError):
        A.parse_schedule(bad)


def test_fmt_directive():
    assert fmt_directive(step_of(2, 3)) == "S2@3"
    assert fmt_directive(crash_of(1)) == "C1"


def test_lockstep_shape():
    sched = A.lockstep_schedule(consensus_cfg(), rounds=3)
    assert A.format_schedule(sched, compress=False) == "S1 S2 S1 S2 S1 S2"


# ---------------------------------------------------------------- running

def test_run_rejects_overruns_and_crashed_targets():
    with pytest.raises(A.SimulationError):
        A.run(mutex_cfg(m=1), "S1*200")
    with pytest.raises(A.SimulationError):
        A.run(consensus_cfg(), "C1 S1")
    with pytest.raises(A.SimulationError):
        A.run(mutex_cfg(), "C1")


def test_run_allows_total_crash():
    res = A.run(consensus_cfg(), "C1 C2")
    assert [p.status for p in res.state.procs] == ["crashed", "crashed"]
    assert res.decisions == {}


def test_run_random_is_reproducible():
    cfg = mutex_cfg()
    a = A.run_random(cfg, seed=11, max_steps=90)
    b = A.run_random(cfg, seed=11, max_steps=90)
    assert a.schedule == b.schedule
    assert A.run(cfg, a.schedule, record=True).digest == \
        A.run(cfg, b.schedule, record=True).digest
    c = A.run_random(cfg, seed=12, max_steps=90)
    assert c.schedule != a.schedule


def test_random_schedules_keep_a_survivor():
    cfg = consensus_cfg(m=2)
    for seed in range(40):
        sched = A.random_schedule(cfg, seed=seed, length=40, crash_prob=0.9)
        assert sum(d.kind == "C" for d in sched) <= cfg.n - 1


def test_random_schedules_never_crash_lock_users():
    cfg = mutex_cfg()
    for seed in range(20):
        sched = A.random_schedule(cfg, seed=seed, length=60, crash_prob=0.9)
        assert all(d.kind == "S" for d in sched)


def test_successor_agrees_with_run():
    cfg = mutex_cfg()
    res = A.run_random(cfg, seed=3, max_steps=80)
    st = A.initial_state(cfg)
    for d in res.schedule:
        st, _ = A.successor(cfg, st, d)
    assert st == res.state


def test_successor_rejects_bad_directives():
    cfg = consensus_cfg()
    st = A.initial_state(cfg)
    with pytest.raises(A.SimulationError):
        A.successor(cfg, st, Directive("S", 3, None))
    st, _ = A.successor(cfg, st, crash_of(1))
    with pytest.raises(A.SimulationError):
        A.successor(cfg, st, step_of(1))


# ------------------------------------------------------------- exploring

def independent_state_count(cfg):
    """Enumerate reachable states over the standalone interpreters.

    States are keyed by (cells, per-process pending request or outcome,
    crashed set), which distinguishes exactly what the package's snapshots
    distinguish for consensus.
    """
    def snapshot(run):
        procs = []
        for pid in range(1, 3):
            if pid in run.crashed:
                procs.append("crashed")
            elif run.pending[pid] is None:
                procs.append(("done", run.outcomes[pid]))
            else:
                procs.append(("pend", run.pending[pid]))
        return (tuple(run.cells[1:]), tuple(procs))

    def replay(directives):
        run = ref.ReferenceRun("consensus", 2, cfg.m,
                               [list(r) for r in cfg.perms.rows],
                               inputs=list(cfg.inputs))
        for kind, pid in directives:
            if kind == "C":
                run.crash(pid)
            else:
                run.step(pid)
        return run

    seen = set()
    frontier = [()]
    while frontier:
        prefix = frontier.pop()
        run = replay(prefix)
        key = snapshot(run)
        if key in seen:
            continue
        seen.add(key)
        for pid in run.steppable():
            frontier.append(prefix + (("S", pid),))
            if pid not in run.crashed:
                frontier.append(prefix + (("C", pid),))
    return len(seen)


def test_explore_matches_independent_interleaver():
    cfg = consensus_cfg()
    g = A.explore(cfg, include_crashes=True)
    assert g.complete
    assert len(g.states) == independent_state_count(cfg) == 28


def test_explore_is_deduplicated_and_well_formed():
    cfg = consensus_cfg(m=2)
    g = A.explore(cfg, include_crashes=True)
    assert len(set(g.states)) == len(g.states)
    assert g.index[g.states[0]] == 0
    for src, outs in g.edges.items():
        for d, dst in outs:
            assert 0 <= dst < len(g.states)
            cost = 1 if d.kind == "S" else 0
            assert g.depths[dst] <= g.depths[src] + cost


def test_path_to_reproduces_each_state():
    cfg = consensus_cfg()
    g = A.explore(cfg, include_crashes=True)
    for i in (0, 5, len(g.states) // 2, len(g.states) - 1):
        sched = g.path_to(i)
        st = A.initial_state(cfg)
        for d in sched:
            st, _ = A.successor(cfg, st, d)
        assert st == g.states[i]


def test_truncation_reporting():
    cfg = mutex_cfg()
    g = A.explore(cfg, max_states=50)
    assert g.truncated and g.bound_hit == "states" and not g.complete
    g = A.explore(cfg, max_depth=4)
    assert g.truncated and g.bound_hit == "depth"
    assert all(d <= 4 for d in g.depths)


def test_stop_on_check_failure():
    from anonshm.properties import mutex_state_check
    cfg = mutex_cfg(m=2)
    full = A.explore(cfg, state_check=mutex_state_check(cfg))
    early = A.explore(cfg, state_check=mutex_state_check(cfg),
                      stop_on_check_failure=True)
    assert len(full.check_failures) > 1
    assert len(early.check_failures) == 1
    assert len(early.states) <= len(full.states)


def test_solo_extension_finds_the_decision():
    cfg = consensus_cfg(m=2)
    st = A.initial_state(cfg)
    value, used, suffix = A.solo_extension(cfg, st, 1, budget=4)
    assert (value, used) == (3, 4)
    assert len(suffix) == 4
    value, used, _ = A.solo_extension(cfg, st, 1, budget=3)
    assert value is None


def test_minimize_schedule_is_one_minimal():
    cfg = consensus_cfg()
    # p2 deciding p1's value needs p1's claim first; junk steps pad the tail
    sched = A.parse_schedule("S1 S2 S2 S1")
    failing = lambda res: res.decisions.get(2) == 3

    assert failing(A.run(cfg, sched))
    small = A.minimize_schedule(cfg, sched, failing)
    assert failing(A.run(cfg, small))
    for i in range(len(small)):
        probe = small[:i] + small[i + 1:]
        try:
            assert not failing(A.run(cfg, probe))
        except A.SimulationError:
            pass


# ---------------------------------------------------------------- config

def test_config_validation():
    good = dict(protocol="mutex", n=2, m=3, perms=IDENT(2, 3))
    with pytest.raises(A.ConfigError):
        A.RunConfig(**{**good, "m": 0})
    with pytest.raises(A.ConfigError):
        A.RunConfig(**{**good, "protocol": "nosuch"})
    with pytest.raises(A.ConfigError):
        A.RunConfig(**{**good, "inputs": [1, 2]})       # mutex takes none
    with pytest.raises(A.ConfigError):
        A.RunConfig(**{**good, "re_entries": 0})
    with pytest.raises(A.ConfigError):
        A.RunConfig(**{**good, "perms": IDENT(3, 3)})   # wrong shape
    with pytest.raises(A.ConfigError):
        A.RunConfig(protocol="consensus", n=2, m=1, perms=IDENT(2, 1),
                    inputs=[3])                          # one input short
    with pytest.raises(A.ConfigError):
        A.RunConfig(protocol="consensus", n=2, m=1, perms=IDENT(2, 1),
                    inputs=[3, True])                    # bools are not values
    with pytest.raises(A.ConfigError):
        A.RunConfig(protocol="consensus", n=2, m=1, perms=IDENT(2, 1),
                    inputs=[3, 5], abortable=True)       # lock flag only


def test_config_kv_round_trip():
    cfg = A.RunConfig(protocol="setagree", n=2, m=3,
                      perms=A.create_permutations(2, 3, index=2),
                      inputs=[4, 9])
    again = A.RunConfig.from_kv(cfg.to_kv())
    assert again == cfg
    with pytest.raises(A.ConfigError):
        A.RunConfig.from_kv({**cfg.to_kv(), "mystery": "1"})
