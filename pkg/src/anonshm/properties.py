"""Verdict-producing checkers for safety and progress of the protocols.

Safety properties sweep explored states; progress properties are encoded as
reachability on the explored graph (some continuation makes progress), never
as all-paths claims.  A graph that hit an exploration bound can yield a
violation (with witness) but never "holds" status: inconclusive is a
first-class result.

Every failed verdict carries a witness: a schedule whose replay reproduces
the violation, plus enough parameters to re-check it mechanically.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

from .memory import events_digest, fmt_event
from .protocols import PROTOCOLS
from .scheduler import (
    ACTIVE,
    CRASHED,
    IN_CS,
    STEP,
    STEPPABLE,
    Directive,
    GlobalState,
    RunConfig,
    RunResult,
    SimulationError,
    StateGraph,
    explore,
    format_schedule,
    minimize_schedule,
    parse_schedule,
    run,
    run_random,
    solo_extension,
    successor,
)

HOLDS = "true"
FAILS = "false"
INCONCLUSIVE = "inconclusive"


@dataclass
class Witness:
    """A replayable demonstration: config + schedule + re-check parameters.

    params carries property-specific fields (k, bound, pid, cycle_from,
    prefix_len, explore_states) as strings.  digest pins the event log the
    schedule must reproduce, so a single edited token is caught as
    divergence.
    """

    config: RunConfig
    prop: str
    schedule: tuple[Directive, ...]
    params: dict[str, str] = field(default_factory=dict)
    digest: str | None = None
    note: str = ""

    def to_text(self) -> str:
        lines = ["anonshm-witness 1"]
        for key, val in self.config.to_kv().items():
            lines.append(f"{key} {val}")
        lines.append(f"property {self.prop}")
        for key in sorted(self.params):
            lines.append(f"param-{key} {self.params[key]}")
        lines.append(f"schedule {format_schedule(self.schedule)}")
        if self.digest is not None:
            lines.append(f"digest {self.digest}")
        if self.note:
            lines.append(f"note {self.note}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Witness":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0].split() != ["anonshm-witness", "1"]:
            raise ValueError("not a witness file")
        kv: dict[str, str] = {}
        params: dict[str, str] = {}
        for ln in lines[1:]:
            key, _, val = ln.partition(" ")
            if key.startswith("param-"):
                params[key[len("param-") :]] = val
            else:
                kv[key] = val
        config_keys = {
            "protocol",
            "n",
            "m",
            "perms",
            "inputs",
            "abortable",
            "exit_on_counter",
            "re_entries",
            "choice_policy",
        }
        config = RunConfig.from_kv({k: v for k, v in kv.items() if k in config_keys})
        return cls(
            config=config,
            prop=kv.get("property", ""),
            schedule=parse_schedule(kv.get("schedule", "")),
            params=params,
            digest=kv.get("digest"),
            note=kv.get("note", ""),
        )


@dataclass
class Verdict:
    """One property's outcome: true, false (witness attached), inconclusive."""

    prop: str
    status: str
    witness: Witness | None = None
    stats: dict[str, str] = field(default_factory=dict)
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    def line(self, witness_path: str = "-") -> str:
        parts = [self.prop, self.status, witness_path]
        for key in sorted(self.stats):
            parts.append(f"{key}={self.stats[key]}")
        if self.note:
            parts.append(f"note={self.note}")
        return " ".join(parts)


def _require_protocol(graph_config: RunConfig, wanted: tuple[str, ...], prop: str):
    if graph_config.protocol not in wanted:
        raise ValueError(
            f"{prop} applies to {'/'.join(wanted)}, not {graph_config.protocol}"
        )


def _stamp(stats: dict[str, str], t0: float) -> dict[str, str]:
    stats["wall"] = f"{time.perf_counter() - t0:.3f}s"
    return stats


def _attach_digest(w: Witness) -> Witness:
    """Pin the event log the witness schedule produces."""
    res = run(w.config, w.schedule, record=True)
    w.digest = res.digest
    return w


# ---------------------------------------------------------------------------
# state-level helpers


def in_cs_pids(state: GlobalState) -> list[int]:
    return [i + 1 for i, p in enumerate(state.procs) if p.status == IN_CS]


def pending_acquire(state: GlobalState) -> bool:
    return any(p.status == ACTIVE for p in state.procs)


def steppable(state: GlobalState) -> bool:
    return any(p.status in STEPPABLE for p in state.procs)


def max_held_round(state: GlobalState) -> int:
    """Largest round held by a process still competing or in the section."""
    best = 0
    for p in state.procs:
        if p.status in STEPPABLE and p.local.rnd > best:
            best = p.local.rnd
    return best


def decisions_of(config: RunConfig, state: GlobalState) -> dict[int, int]:
    proto = config.proto()
    out = {}
    for i, p in enumerate(state.procs):
        if p.status == CRASHED:
            continue
        v = proto.decision(p.local)
        if v is not None:
            out[i + 1] = v
    return out


def ladder_failures(config: RunConfig, state: GlobalState) -> list[str]:
    """At most n-r+1 competitors may hold round r or above, for every r."""
    n = config.n
    rounds = sorted(
        (p.local.rnd for p in state.procs if p.status in STEPPABLE), reverse=True
    )
    out = []
    for r in range(1, n + 1):
        holders = sum(1 for v in rounds if v >= r)
        if holders > n - r + 1:
            out.append(f"ladder:r={r}:holders={holders}")
    return out


def ownership_failures(config: RunConfig, state: GlobalState) -> list[str]:
    """No register owned twice; owned cells non-empty; counters consistent."""
    out = []
    owner_of: dict[int, int] = {}
    for i, p in enumerate(state.procs):
        pid = i + 1
        local = p.local
        count = 0
        for x, mine in enumerate(local.myview, start=1):
            if not mine:
                continue
            count += 1
            g = config.perms.apply(pid, x)
            if g in owner_of:
                out.append(f"double-own:g={g}:pids={owner_of[g]},{pid}")
            owner_of[g] = pid
            if state.cells[g - 1] is None:
                out.append(f"owned-empty:g={g}:pid={pid}")
        if local.counter != count:
            out.append(f"counter-mismatch:pid={pid}:{local.counter}!={count}")
    return out


def mutex_state_check(config: RunConfig) -> Callable[[GlobalState], list[str]]:
    """Per-state incremental assertions for mutex explorations."""

    def check(state: GlobalState) -> list[str]:
        out = []
        if len(in_cs_pids(state)) > 1:
            out.append("cs-overlap")
        out.extend(ladder_failures(config, state))
        out.extend(ownership_failures(config, state))
        return out

    return check


# ---------------------------------------------------------------------------
# graph algorithms


def _reverse_reachable(graph: StateGraph, targets: set[int]) -> set[int]:
    rev: dict[int, list[int]] = {}
    for src, outs in graph.edges.items():
        for _, dst in outs:
            rev.setdefault(dst, []).append(src)
    seen = set(targets)
    stack = list(targets)
    while stack:
        v = stack.pop()
        for u in rev.get(v, ()):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def _entry_edge(graph: StateGraph, src: int, d: Directive, dst: int) -> bool:
    """Does this edge take some process into the critical section?"""
    if d.kind != STEP:
        return False
    before = graph.states[src].procs[d.pid - 1].status
    after = graph.states[dst].procs[d.pid - 1].status
    return before != IN_CS and after == IN_CS


def _decide_edge(graph: StateGraph, src: int, d: Directive, dst: int) -> bool:
    if d.kind != STEP:
        return False
    before = graph.states[src].procs[d.pid - 1].status
    after = graph.states[dst].procs[d.pid - 1].status
    return before != after and after == "decided"


def _progress_edge(graph: StateGraph, src: int, d: Directive, dst: int) -> bool:
    if graph.config.protocol == "mutex":
        return _entry_edge(graph, src, d, dst)
    return _decide_edge(graph, src, d, dst)


def _sccs(count: int, succ: Callable[[int], tuple[int, ...]]) -> list[list[int]]:
    """Iterative Tarjan; components come out sinks-first."""
    index = [0] * count
    low = [0] * count
    onstack = [False] * count
    stack: list[int] = []
    out: list[list[int]] = []
    counter = [1]
    for root in range(count):
        if index[root]:
            continue
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        onstack[root] = True
        work: list[tuple[int, object]] = [(root, iter(succ(root)))]
        while work:
            v, it = work[-1]
            pushed = False
            for w in it:
                if not index[w]:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    onstack[w] = True
                    work.append((w, iter(succ(w))))
                    pushed = True
                    break
                if onstack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if pushed:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    onstack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


# ---------------------------------------------------------------------------
# mutex checkers


def check_mutual_exclusion(graph_or_result) -> Verdict:
    """No reachable state may put two processes in the critical section."""
    t0 = time.perf_counter()
    if isinstance(graph_or_result, RunResult):
        res = graph_or_result
        _require_protocol(res.config, ("mutex",), "mutual-exclusion")
        stats = {"steps": str(res.steps)}
        if res.cs_overlap is not None or len(in_cs_pids(res.state)) > 1:
            w = Witness(
                config=res.config,
                prop="mutual-exclusion",
                schedule=res.schedule,
                note="two processes reached the critical section together",
            )
            return Verdict(
                "mutual-exclusion", FAILS, _attach_digest(w), _stamp(stats, t0)
            )
        return Verdict("mutual-exclusion", HOLDS, None, _stamp(stats, t0))

    graph: StateGraph = graph_or_result
    _require_protocol(graph.config, ("mutex",), "mutual-exclusion")
    stats = {"states": str(len(graph.states))}
    bad = graph.find(lambda st: len(in_cs_pids(st)) > 1)
    if bad is not None:
        w = Witness(
            config=graph.config,
            prop="mutual-exclusion",
            schedule=graph.path_to(bad),
            note="two processes reached the critical section together",
        )
        return Verdict("mutual-exclusion", FAILS, _attach_digest(w), _stamp(stats, t0))
    if not graph.complete:
        return Verdict(
            "mutual-exclusion",
            INCONCLUSIVE,
            None,
            _stamp(stats, t0),
            note=f"no violation within explored bound ({graph.bound_hit})",
        )
    return Verdict("mutual-exclusion", HOLDS, None, _stamp(stats, t0))


def check_deadlock_freedom(graph: StateGraph, explore_bound: int = 50_000) -> Verdict:
    """From every state with a pending acquire and an empty section, some
    continuation must put a process into the section.

    Needs a complete graph; bounded explorations come back inconclusive.
    """
    t0 = time.perf_counter()
    _require_protocol(graph.config, ("mutex",), "deadlock-freedom")
    stats = {"states": str(len(graph.states))}
    if not graph.complete:
        return Verdict(
            "deadlock-freedom",
            INCONCLUSIVE,
            None,
            _stamp(stats, t0),
            note=f"graph truncated ({graph.bound_hit}); liveness needs closure",
        )
    targets = {
        sid for sid, st in enumerate(graph.states) if len(in_cs_pids(st)) >= 1
    }
    good = _reverse_reachable(graph, targets)
    condemned = None
    for sid, st in enumerate(graph.states):
        if sid in good:
            continue
        if pending_acquire(st) and not in_cs_pids(st):
            condemned = sid
            break
    stats["cs-reachable-states"] = str(len(good))
    if condemned is None:
        return Verdict("deadlock-freedom", HOLDS, None, _stamp(stats, t0))
    w = Witness(
        config=graph.config,
        prop="deadlock-freedom",
        schedule=graph.path_to(condemned),
        params={"explore_states": str(explore_bound)},
        note="state with pending acquire from which no section entry is reachable",
    )
    return Verdict("deadlock-freedom", FAILS, _attach_digest(w), _stamp(stats, t0))


def detect_livelock_cycle(graph: StateGraph) -> Verdict:
    """Find a reachable state-repetition cycle with no progress on it.

    Progress means a section entry for mutex and a decision for the
    agreement protocols.  A found cycle is sound even on a truncated graph;
    absence is conclusive only when the graph closed.
    """
    t0 = time.perf_counter()
    stats = {"states": str(len(graph.states))}
    nonprog: dict[int, list[tuple[Directive, int]]] = {}
    for src, outs in graph.edges.items():
        keep = [
            (d, dst)
            for d, dst in outs
            if d.kind == STEP and not _progress_edge(graph, src, d, dst)
        ]
        if keep:
            nonprog[src] = keep

    def succ(v: int) -> tuple[int, ...]:
        return tuple(dst for _, dst in nonprog.get(v, ()))

    comp_of = {}
    comps = _sccs(len(graph.states), succ)
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    # a cycle is only evidence if every process that could still move takes a
    # step on it; otherwise it merely shows the scheduler starving someone
    fair: list[int] = []
    for ci, comp in enumerate(comps):
        members = set(comp)
        internal = [
            (v, d, dst)
            for v in comp
            for d, dst in nonprog.get(v, ())
            if dst in members
        ]
        if len(comp) == 1 and not internal:
            continue
        required = {
            i + 1
            for i, p in enumerate(graph.states[comp[0]].procs)
            if p.status in STEPPABLE
        }
        if required and required <= {d.pid for _, d, _ in internal}:
            fair.append(ci)
    if not fair:
        status = HOLDS if graph.complete else INCONCLUSIVE
        note = "" if graph.complete else "no cycle within explored bound"
        return Verdict("livelock-free", status, None, _stamp(stats, t0), note=note)

    entry = min(min(comps[ci]) for ci in fair)
    comp = comps[comp_of[entry]]
    members = set(comp)
    required = {
        i + 1
        for i, p in enumerate(graph.states[entry].procs)
        if p.status in STEPPABLE
    }

    def bfs(src: int, want):
        """Shortest in-component walk from src to a node satisfying want."""
        dist = {src: ()}
        order = [src]
        qi = 0
        while qi < len(order):
            v = order[qi]
            qi += 1
            if want(v):
                return v, list(dist[v])
            for d, dst in nonprog.get(v, ()):
                if dst in members and dst not in dist:
                    dist[dst] = dist[v] + ((d,),)
                    order.append(dst)
        raise AssertionError("component is strongly connected")

    # stitch a cycle that exercises every live process, then close it
    cycle: list[Directive] = []
    cur = entry
    for pid in sorted(required):
        if any(d.pid == pid for d in cycle):
            continue
        cur, walk = bfs(
            cur,
            lambda v: any(
                d.pid == pid and dst in members for d, dst in nonprog.get(v, ())
            ),
        )
        cycle.extend(d for (d,) in walk)
        d, dst = next(
            (d, dst)
            for d, dst in nonprog.get(cur, ())
            if d.pid == pid and dst in members
        )
        cycle.append(d)
        cur = dst
    if cur != entry:
        cur, walk = bfs(cur, lambda v: v == entry)
        cycle.extend(d for (d,) in walk)
    stem = graph.path_to(entry)
    w = Witness(
        config=graph.config,
        prop="livelock-free",
        schedule=stem + tuple(cycle),
        params={"cycle_from": str(len(stem))},
        note="progress-free cycle stepping every live process",
    )
    stats["cycle-length"] = str(len(cycle))
    return Verdict("livelock-free", FAILS, _attach_digest(w), _stamp(stats, t0))


def check_round_progress(graph: StateGraph) -> Verdict:
    """From any state with top round r < n, a higher round or a section
    entry must be reachable."""
    t0 = time.perf_counter()
    _require_protocol(graph.config, ("mutex",), "round-progress")
    n = graph.config.n
    stats = {"states": str(len(graph.states))}
    if not graph.complete:
        return Verdict(
            "round-progress",
            INCONCLUSIVE,
            None,
            _stamp(stats, t0),
            note=f"graph truncated ({graph.bound_hit}); liveness needs closure",
        )

    def succ(v: int) -> tuple[int, ...]:
        return tuple(dst for _, dst in graph.edges.get(v, ()))

    comps = _sccs(len(graph.states), succ)
    comp_of = {}
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    best_round = [0] * len(comps)
    reach_cs = [False] * len(comps)
    for ci, comp in enumerate(comps):  # sinks first: successors done already
        br = 0
        rc = False
        for v in comp:
            r = max_held_round(graph.states[v])
            if r > br:
                br = r
            if in_cs_pids(graph.states[v]):
                rc = True
            for _, dst in graph.edges.get(v, ()):
                cj = comp_of[dst]
                if cj != ci:
                    if best_round[cj] > br:
                        br = best_round[cj]
                    rc = rc or reach_cs[cj]
        best_round[ci] = br
        reach_cs[ci] = rc
    for sid, st in enumerate(graph.states):
        if not steppable(st):
            continue
        r = max_held_round(st)
        if r >= n:
            continue
        ci = comp_of[sid]
        if reach_cs[ci] or best_round[ci] > r:
            continue
        w = Witness(
            config=graph.config,
            prop="round-progress",
            schedule=graph.path_to(sid),
            note=f"no process can get beyond round {r} from here",
        )
        return Verdict("round-progress", FAILS, _attach_digest(w), _stamp(stats, t0))
    return Verdict("round-progress", HOLDS, None, _stamp(stats, t0))


# ---------------------------------------------------------------------------
# agreement checkers


def check_agreement(decisions, k: int) -> Verdict:
    """At most k distinct decided values (k=1 consensus, k=n-1 set agr.)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    vals = list(decisions.values() if isinstance(decisions, dict) else decisions)
    distinct = sorted(set(vals))
    stats = {"decided": str(len(vals)), "distinct": str(len(distinct))}
    if len(distinct) <= k:
        return Verdict("agreement", HOLDS, None, stats)
    return Verdict(
        "agreement", FAILS, None, stats, note=f"values {distinct} exceed k={k}"
    )


def check_validity(decisions, inputs) -> Verdict:
    """Every decided value must be someone's proposal."""
    vals = list(decisions.values() if isinstance(decisions, dict) else decisions)
    allowed = set(inputs)
    bad = sorted(v for v in set(vals) if v not in allowed)
    stats = {"decided": str(len(vals))}
    if bad:
        return Verdict(
            "validity", FAILS, None, stats, note=f"values {bad} were never proposed"
        )
    return Verdict("validity", HOLDS, None, stats)


def agreement_sweep(graph: StateGraph, k: int) -> Verdict:
    """check_agreement over every explored state's decision set."""
    t0 = time.perf_counter()
    _require_protocol(graph.config, ("consensus", "setagree"), "agreement")
    stats = {"states": str(len(graph.states))}
    for sid, st in enumerate(graph.states):
        dec = decisions_of(graph.config, st)
        if len(set(dec.values())) > k:
            w = Witness(
                config=graph.config,
                prop="agreement",
                schedule=graph.path_to(sid),
                params={"k": str(k)},
                note=f"decisions {sorted(set(dec.values()))}",
            )
            return Verdict("agreement", FAILS, _attach_digest(w), _stamp(stats, t0))
    status = HOLDS if graph.complete else INCONCLUSIVE
    note = "" if graph.complete else "no violation within explored bound"
    return Verdict("agreement", status, None, _stamp(stats, t0), note=note)


def validity_sweep(graph: StateGraph) -> Verdict:
    """check_validity over every explored state's decision set."""
    t0 = time.perf_counter()
    _require_protocol(graph.config, ("consensus", "setagree"), "validity")
    stats = {"states": str(len(graph.states))}
    allowed = set(graph.config.inputs)
    for sid, st in enumerate(graph.states):
        dec = decisions_of(graph.config, st)
        bad = sorted(v for v in dec.values() if v not in allowed)
        if bad:
            w = Witness(
                config=graph.config,
                prop="validity",
                schedule=graph.path_to(sid),
                note=f"decided {bad} never proposed",
            )
            return Verdict("validity", FAILS, _attach_digest(w), _stamp(stats, t0))
    status = HOLDS if graph.complete else INCONCLUSIVE
    note = "" if graph.complete else "no violation within explored bound"
    return Verdict("validity", status, None, _stamp(stats, t0), note=note)


def check_wait_freedom_bound(graph_or_result, bound: int) -> Verdict:
    """Every non-crashed process must decide within its own `bound` accesses."""
    t0 = time.perf_counter()
    if isinstance(graph_or_result, RunResult):
        res = graph_or_result
        _require_protocol(res.config, ("consensus", "setagree"), "wait-freedom")
        stats = {"steps": str(res.steps)}
        for i, p in enumerate(res.state.procs):
            pid = i + 1
            used = res.access_counts[i]
            if p.status == CRASHED:
                continue
            decided = pid in res.decisions
            if (decided and used > bound) or (not decided and used >= bound):
                w = Witness(
                    config=res.config,
                    prop="wait-freedom",
                    schedule=res.schedule,
                    params={"bound": str(bound)},
                    note=f"process {pid} used {used} accesses, decided={decided}",
                )
                return Verdict(
                    "wait-freedom", FAILS, _attach_digest(w), _stamp(stats, t0)
                )
        return Verdict("wait-freedom", HOLDS, None, _stamp(stats, t0))

    graph: StateGraph = graph_or_result
    _require_protocol(graph.config, ("consensus",), "wait-freedom")
    m = graph.config.m
    stats = {"states": str(len(graph.states))}
    for sid, st in enumerate(graph.states):
        for i, p in enumerate(st.procs):
            if p.status == ACTIVE:
                used = p.local.j - 1 if p.local.pc == "cas" else m + p.local.j - 1
                decided = False
            elif p.status == "decided":
                used = 2 * m
                decided = True
            else:
                continue
            if (decided and used > bound) or (not decided and used >= bound):
                w = Witness(
                    config=graph.config,
                    prop="wait-freedom",
                    schedule=graph.path_to(sid),
                    params={"bound": str(bound)},
                    note=f"process {i + 1} at {used} accesses, decided={decided}",
                )
                return Verdict(
                    "wait-freedom", FAILS, _attach_digest(w), _stamp(stats, t0)
                )
    status = HOLDS if graph.complete else INCONCLUSIVE
    return Verdict("wait-freedom", status, None, _stamp(stats, t0))


def check_obstruction_freedom(graph: StateGraph, budget: int) -> Verdict:
    """From every explored state, every live undecided process must decide
    when run alone within the budget.

    Solo runs are memoized on (cells, local state, pid) since the rest of
    the state cannot influence a solo extension.
    """
    t0 = time.perf_counter()
    _require_protocol(graph.config, ("consensus", "setagree"), "obstruction-freedom")
    config = graph.config
    stats = {"states": str(len(graph.states))}
    cache: dict[tuple, bool] = {}
    checked = 0
    for sid, st in enumerate(graph.states):
        for i, p in enumerate(st.procs):
            if p.status not in STEPPABLE:
                continue
            pid = i + 1
            key = (st.cells, p.local, pid)
            hit = cache.get(key)
            if hit is None:
                value, _, _ = solo_extension(config, st, pid, budget)
                hit = value is not None
                cache[key] = hit
                checked += 1
            if not hit:
                prefix = graph.path_to(sid)
                w = Witness(
                    config=config,
                    prop="obstruction-freedom",
                    schedule=prefix + ((Directive(STEP, pid, None),) * budget),
                    params={
                        "budget": str(budget),
                        "pid": str(pid),
                        "prefix_len": str(len(prefix)),
                    },
                    note=f"process {pid} ran {budget} solo steps without deciding",
                )
                stats["solo-runs"] = str(checked)
                return Verdict(
                    "obstruction-freedom", FAILS, _attach_digest(w), _stamp(stats, t0)
                )
    stats["solo-runs"] = str(checked)
    status = HOLDS if graph.complete else INCONCLUSIVE
    note = "" if graph.complete else "all explored extensions decide; graph truncated"
    return Verdict("obstruction-freedom", status, None, _stamp(stats, t0), note=note)


# ---------------------------------------------------------------------------
# the counterexample hunt


@dataclass(frozen=True)
class HuntBudget:
    """Search effort for hunt_agreement_violation, all knobs explicit."""

    explore_states: int = 30_000
    explore_depth: int | None = None
    walks: int = 2_000
    walk_steps: int = 400
    crash_prob: float = 0.05
    seed0: int = 1


def hunt_agreement_violation(
    config: RunConfig, budget: HuntBudget = HuntBudget(), k: int = 1
) -> Verdict:
    """Search for a schedule on which more than k distinct values get decided.

    Portfolio: bounded exhaustive exploration with crash and choice branching
    first (exact within its bounds), then seeded burst-structured random
    walks.  A hit is minimized and replay-confirmed before it is returned;
    exhausting the budget yields inconclusive with search statistics, unless
    exploration closed the full graph cleanly, which settles the property.
    """
    t0 = time.perf_counter()
    _require_protocol(config, ("consensus", "setagree"), "agreement-hunt")

    def violated(res: RunResult) -> bool:
        return len(set(res.decisions.values())) > k

    def finish_found(schedule: tuple[Directive, ...], how: str) -> Verdict:
        small = minimize_schedule(config, schedule, violated)
        res = run(config, small, record=True)
        w = Witness(
            config=config,
            prop="agreement",
            schedule=small,
            params={"k": str(k)},
            digest=res.digest,
            note=f"decisions {sorted(set(res.decisions.values()))} via {how}",
        )
        stats["found-via"] = how
        stats["witness-length"] = str(len(small))
        return Verdict("agreement", FAILS, w, _stamp(stats, t0))

    stats: dict[str, str] = {}

    def state_check(state: GlobalState) -> list[str]:
        dec = decisions_of(config, state)
        if len(set(dec.values())) > k:
            return ["agreement"]
        return []

    if budget.explore_states > 0:
        graph = explore(
            config,
            max_states=budget.explore_states,
            max_depth=budget.explore_depth,
            include_crashes=True,
            state_check=state_check,
            stop_on_check_failure=True,
        )
        stats["explored-states"] = str(len(graph.states))
        stats["explore-complete"] = "1" if graph.complete else "0"
        if graph.check_failures:
            sid = graph.check_failures[0][0]
            return finish_found(graph.path_to(sid), "exploration")
        if graph.complete:
            return Verdict("agreement", HOLDS, None, _stamp(stats, t0))

    steps_total = 0
    for i in range(budget.walks):
        res = run_random(
            config,
            budget.seed0 + i,
            budget.walk_steps,
            crash_prob=budget.crash_prob,
        )
        steps_total += res.steps
        if violated(res):
            stats["walks"] = str(i + 1)
            stats["walk-steps"] = str(steps_total)
            return finish_found(res.schedule, f"random walk seed {budget.seed0 + i}")
    stats["walks"] = str(budget.walks)
    stats["walk-steps"] = str(steps_total)
    return Verdict(
        "agreement",
        INCONCLUSIVE,
        None,
        _stamp(stats, t0),
        note="budget exhausted without a violation",
    )


# ---------------------------------------------------------------------------
# witness replay


def replay_witness(w: Witness, explore_bound: int = 50_000):
    """Re-run a witness and re-check its claim.

    Returns (status, detail, digest) with status one of confirmed / refuted /
    diverged.  Divergence means the schedule no longer produces the pinned
    event log (or does not apply at all); refuted means it replays cleanly
    but the violation is gone.  The digest is the replayed event log hash,
    or None when the schedule did not apply.
    """
    try:
        res = run(w.config, w.schedule, record=True)
    except SimulationError as exc:
        return "diverged", f"schedule no longer applies: {exc}", None
    if w.digest is not None and res.digest != w.digest:
        return (
            "diverged",
            f"event log hash {res.digest} != pinned {w.digest}",
            res.digest,
        )
    status, detail = _recheck(w, res, explore_bound)
    return status, detail, res.digest


def _recheck(w: Witness, res: RunResult, explore_bound: int):
    prop = w.prop
    if prop == "mutual-exclusion":
        ok = res.cs_overlap is not None or len(in_cs_pids(res.state)) > 1
        return ("confirmed", "overlap reproduced") if ok else ("refuted", "no overlap")

    if prop == "state-invariants":
        config = w.config
        labels = mutex_state_check(config)(res.state)
        if labels:
            return "confirmed", f"final state fails {labels}"
        return "refuted", "final state satisfies the invariants"

    if prop == "agreement":
        k = int(w.params.get("k", "1"))
        distinct = sorted(set(res.decisions.values()))
        if len(distinct) > k:
            return "confirmed", f"decisions {distinct}"
        return "refuted", f"decisions {distinct} within k={k}"

    if prop == "validity":
        allowed = set(w.config.inputs or ())
        bad = sorted(v for v in res.decisions.values() if v not in allowed)
        if bad:
            return "confirmed", f"unproposed decisions {bad}"
        return "refuted", "all decisions were proposed"

    if prop == "wait-freedom":
        bound = int(w.params["bound"])
        v = check_wait_freedom_bound(res, bound)
        if v.status == FAILS:
            return "confirmed", v.witness.note if v.witness else "bound exceeded"
        return "refuted", "all processes decided within the bound"

    if prop == "obstruction-freedom":
        prefix_len = int(w.params["prefix_len"])
        pid = int(w.params["pid"])
        budget = int(w.params["budget"])
        pre = run(w.config, w.schedule[:prefix_len])
        value, used, _ = solo_extension(w.config, pre.state, pid, budget)
        if value is None:
            return "confirmed", f"process {pid} undecided after {used} solo steps"
        return "refuted", f"process {pid} decided {value} in {used} solo steps"

    if prop == "livelock-free":
        cycle_from = int(w.params["cycle_from"])
        base = run(w.config, w.schedule[:cycle_from])
        state = base.state
        seen_progress = False
        cur = state
        for d in w.schedule[cycle_from:]:
            nxt, outcome = successor(w.config, cur, d)
            if outcome is not None and outcome.kind in ("entered-cs", "decided"):
                seen_progress = True
            cur = nxt
        if cur == state and not seen_progress:
            return "confirmed", "cycle returns to its start without progress"
        if cur != state:
            return "refuted", "suffix no longer closes the cycle"
        return "refuted", "cycle contains progress"

    if prop == "deadlock-freedom":
        bound = int(w.params.get("explore_states", str(explore_bound)))
        graph = explore(w.config, max_states=bound, start=res.state)
        if not graph.complete:
            return "diverged", "re-check exploration truncated; raise the bound"
        reach_cs = any(in_cs_pids(st) for st in graph.states)
        if not reach_cs and pending_acquire(res.state) and not in_cs_pids(res.state):
            return "confirmed", (
                f"no section entry among {len(graph.states)} states reachable "
                "from the witness state"
            )
        return "refuted", "a section entry is reachable from the witness state"

    return "diverged", f"unknown property {prop!r}"
