"""Co-simulation glue between the package and the standalone interpreters.

The interpreters in reference_machines.py never import the package, so
agreement between both sides on the same schedule is real evidence, not
a tautology.
"""

import anonshm as A
import reference_machines as ref


def normalize(events):
    """Package MemoryEvent list in the reference normal form."""
    out = []
    for e in events:
        if e.op == "read":
            out.append(("read", e.pid, e.local, e.gidx, e.old))
        elif e.op == "write":
            out.append(("write", e.pid, e.local, e.gidx, e.new))
        else:
            out.append(("cas", e.pid, e.local, e.gidx, e.old, e.new, e.ok))
    return out


def reference_of(cfg, pick=None):
    rows = [list(row) for row in cfg.perms.rows]
    inputs = list(cfg.inputs) if cfg.inputs else None
    return ref.ReferenceRun(
        cfg.protocol, cfg.n, cfg.m, rows, inputs=inputs,
        abortable=cfg.abortable, exit_on_counter=cfg.exit_on_counter,
        pick=pick,
    )


def cosimulate(cfg, schedule):
    """Run both sides on one schedule and compare every observable."""
    if isinstance(schedule, str):
        schedule = A.parse_schedule(schedule)
    res = A.run(cfg, schedule, record=True)
    run = ref.drive(reference_of(cfg), [(d.kind, d.pid, d.choice) for d in schedule])
    assert normalize(res.events) == run.events
    pkg_enters = [(s, p) for s, p, kind in res.cs_events if kind == "enter"]
    assert pkg_enters == [(c, p) for c, p, _ in run.marks]
    for pid, out in run.outcomes.items():
        snap = res.state.procs[pid - 1]
        if cfg.protocol == "mutex":
            assert snap.status == out
        else:
            assert res.decisions.get(pid) == out
    return res, run
