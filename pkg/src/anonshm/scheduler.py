"""Adversarial scheduling of identical processes over anonymous memory.

The unit of scheduling is one shared access: a directive S<pid> makes that
process perform exactly one read, write, or cas.  Local computation is free
and happens inside the same step.  C<pid> crashes a process (decision tasks
only); a crashed process takes no further steps.  Scan-completing steps of
the set-agreement protocol may carry an adversary choice, written S<pid>@k,
naming which disagreeing slot the process will overwrite.

Two drivers share the same protocol step functions: run() mutates one memory
in place and is used for long random campaigns, successors()/explore() work
on frozen immutable snapshots and are used for exhaustive state-space search.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from .memory import (
    AnonymousMemory,
    MemoryPort,
    PermutationTable,
    TraceRecorder,
    fmt_perms,
    parse_perms,
)
from .protocols import (
    ABORTED,
    DECIDED,
    ENTERED_CS,
    EXITED_CS,
    PROTOCOLS,
    ConsensusParams,
    MutexParams,
    ProtocolError,
    SetAgreementParams,
    StepOutcome,
)

STEP = "S"
CRASH = "C"

ACTIVE = "active"
IN_CS = "in-cs"
DONE = "done"
ABORTED_ST = "aborted"
DECIDED_ST = "decided"
CRASHED = "crashed"

STEPPABLE = (ACTIVE, IN_CS)


class ConfigError(Exception):
    """A run configuration that does not describe a valid system."""


class SimulationError(Exception):
    """A schedule directive that cannot be applied to the current state."""


class Directive(NamedTuple):
    kind: str
    pid: int
    choice: int | None = None


def step_of(pid: int, choice: int | None = None) -> Directive:
    return Directive(STEP, pid, choice)


def crash_of(pid: int) -> Directive:
    return Directive(CRASH, pid, None)


def fmt_directive(d: Directive) -> str:
    if d.kind == CRASH:
        return f"C{d.pid}"
    if d.choice is None:
        return f"S{d.pid}"
    return f"S{d.pid}@{d.choice}"


def format_schedule(schedule, compress: bool = True) -> str:
    """Render directives as tokens, folding runs into tok*count."""
    toks = [fmt_directive(d) for d in schedule]
    if not compress:
        return " ".join(toks)
    out = []
    i = 0
    while i < len(toks):
        j = i
        while j < len(toks) and toks[j] == toks[i]:
            j += 1
        out.append(toks[i] if j - i == 1 else f"{toks[i]}*{j - i}")
        i = j
    return " ".join(out)


def parse_schedule(text: str) -> tuple[Directive, ...]:
    """Inverse of format_schedule; raises ConfigError on malformed tokens."""
    out: list[Directive] = []
    for tok in text.split():
        body, sep, rep = tok.partition("*")
        count = 1
        if sep:
            if not rep.isdigit() or int(rep) < 1:
                raise ConfigError(f"bad repetition in token {tok!r}")
            count = int(rep)
        if not body or body[0] not in (STEP, CRASH):
            raise ConfigError(f"bad schedule token {tok!r}")
        kind = body[0]
        rest = body[1:]
        choice = None
        if kind == STEP and "@" in rest:
            rest, _, ch = rest.partition("@")
            if not ch.isdigit():
                raise ConfigError(f"bad choice in token {tok!r}")
            choice = int(ch)
        elif kind == CRASH and "@" in rest:
            raise ConfigError(f"crash token cannot carry a choice: {tok!r}")
        if not rest.isdigit() or int(rest) < 1:
            raise ConfigError(f"bad process id in token {tok!r}")
        out.extend([Directive(kind, int(rest), choice)] * count)
    return tuple(out)


# ---------------------------------------------------------------------------
# configuration


_KV_KEYS = (
    "protocol",
    "n",
    "m",
    "perms",
    "inputs",
    "abortable",
    "exit_on_counter",
    "re_entries",
    "choice_policy",
)


@dataclass(frozen=True)
class RunConfig:
    """Everything that pins down a system: who runs what over which memory.

    perms is the adversary's register-naming table, one bijection per
    process.  inputs are the proposal values for the decision tasks and must
    be None for mutex.  re_entries is how many times each mutex process
    acquires before it is done.
    """

    protocol: str
    n: int
    m: int
    perms: PermutationTable
    inputs: tuple[int, ...] | None = None
    abortable: bool = False
    exit_on_counter: bool = False
    re_entries: int = 1
    choice_policy: str = "smallest"

    def __post_init__(self):
        if self.inputs is not None:
            object.__setattr__(self, "inputs", tuple(self.inputs))
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {self.protocol!r}")
        if self.n < 2:
            raise ConfigError("need at least two processes")
        if self.m < 1:
            raise ConfigError("need at least one register")
        if self.protocol == "setagree" and self.m < 3:
            raise ConfigError("set agreement needs m >= 3")
        if self.perms.n != self.n or self.perms.m != self.m:
            raise ConfigError(
                f"permutation table is {self.perms.n}x{self.perms.m}, "
                f"config is {self.n}x{self.m}"
            )
        proto = PROTOCOLS[self.protocol]
        if proto.has_inputs:
            if self.inputs is None or len(self.inputs) != self.n:
                raise ConfigError(f"{self.protocol} needs one input per process")
            for v in self.inputs:
                if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                    raise ConfigError(f"bad proposal value {v!r}")
        elif self.inputs is not None:
            raise ConfigError("mutex takes no inputs")
        if self.protocol != "mutex" and (self.abortable or self.exit_on_counter):
            raise ConfigError("abortable/exit_on_counter are mutex options")
        if self.re_entries < 1:
            raise ConfigError("re_entries must be at least 1")
        if self.protocol != "mutex" and self.re_entries != 1:
            raise ConfigError("re_entries is a mutex option")
        if self.choice_policy != "smallest":
            raise ConfigError(f"unknown choice policy {self.choice_policy!r}")

    @property
    def rw_only(self) -> bool:
        return not PROTOCOLS[self.protocol].needs_cas

    @property
    def allows_crashes(self) -> bool:
        return self.protocol != "mutex"

    def proto(self):
        return PROTOCOLS[self.protocol]

    def params(self):
        if self.protocol == "mutex":
            return MutexParams(self.n, self.m, self.abortable, self.exit_on_counter)
        if self.protocol == "consensus":
            return ConsensusParams(self.m)
        return SetAgreementParams(self.m, self.choice_policy)

    def to_kv(self) -> dict[str, str]:
        return {
            "protocol": self.protocol,
            "n": str(self.n),
            "m": str(self.m),
            "perms": fmt_perms(self.perms),
            "inputs": "-" if self.inputs is None else ",".join(map(str, self.inputs)),
            "abortable": "1" if self.abortable else "0",
            "exit_on_counter": "1" if self.exit_on_counter else "0",
            "re_entries": str(self.re_entries),
            "choice_policy": self.choice_policy,
        }

    @classmethod
    def from_kv(cls, kv: dict[str, str]) -> "RunConfig":
        unknown = set(kv) - set(_KV_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key in ("protocol", "n", "m", "perms"):
            if key not in kv:
                raise ConfigError(f"config is missing {key!r}")
        try:
            n = int(kv["n"])
            m = int(kv["m"])
        except ValueError as exc:
            raise ConfigError(f"n and m must be integers: {exc}") from None
        inputs_s = kv.get("inputs", "-")
        if inputs_s == "-" or inputs_s == "":
            inputs = None
        else:
            try:
                inputs = tuple(int(t) for t in inputs_s.split(","))
            except ValueError:
                raise ConfigError(f"bad inputs {inputs_s!r}") from None
        flags = {}
        for key in ("abortable", "exit_on_counter"):
            raw = kv.get(key, "0")
            if raw not in ("0", "1"):
                raise ConfigError(f"{key} must be 0 or 1, got {raw!r}")
            flags[key] = raw == "1"
        try:
            re_entries = int(kv.get("re_entries", "1"))
        except ValueError:
            raise ConfigError("re_entries must be an integer") from None
        return cls(
            protocol=kv["protocol"],
            n=n,
            m=m,
            perms=parse_perms(kv["perms"]),
            inputs=inputs,
            abortable=flags["abortable"],
            exit_on_counter=flags["exit_on_counter"],
            re_entries=re_entries,
            choice_policy=kv.get("choice_policy", "smallest"),
        )


# ---------------------------------------------------------------------------
# global states


class ProcSnap(NamedTuple):
    status: str
    local: object
    acquires: int


class GlobalState(NamedTuple):
    """Memory contents plus every process's local state; hashable."""

    cells: tuple
    procs: tuple[ProcSnap, ...]


def initial_state(config: RunConfig) -> GlobalState:
    proto = config.proto()
    params = config.params()
    procs = []
    for pid in range(1, config.n + 1):
        value = config.inputs[pid - 1] if proto.has_inputs else None
        procs.append(ProcSnap(ACTIVE, proto.init(params, value), 0))
    return GlobalState((None,) * config.m, tuple(procs))


def _advance(status: str, acquires: int, outcome: StepOutcome, config, params, proto):
    """Map a step outcome onto the scheduler-level process status."""
    kind = outcome.kind
    if kind == ENTERED_CS:
        return IN_CS, acquires, None
    if kind == EXITED_CS:
        acquires += 1
        if acquires < config.re_entries:
            return ACTIVE, acquires, proto.init(params, None)
        return DONE, acquires, None
    if kind == DECIDED:
        return DECIDED_ST, acquires, None
    if kind == ABORTED:
        return ABORTED_ST, acquires, None
    return status, acquires, None


def _check_pid(config: RunConfig, d: Directive):
    if d.pid < 1 or d.pid > config.n:
        raise SimulationError(f"no process {d.pid} in a {config.n}-process system")


def _check_step_target(config: RunConfig, snap: ProcSnap, d: Directive):
    if d.kind == CRASH:
        if not config.allows_crashes:
            raise SimulationError("mutex processes do not crash here")
        if snap.status != ACTIVE:
            raise SimulationError(f"cannot crash process {d.pid} ({snap.status})")
    elif snap.status not in STEPPABLE:
        raise SimulationError(f"cannot step process {d.pid} ({snap.status})")


def successor(config: RunConfig, state: GlobalState, d: Directive):
    """Apply one directive to a frozen state; returns (state, outcome).

    The outcome is None for crash directives.  Raises SimulationError when
    the directive does not apply.
    """
    _check_pid(config, d)
    snap = state.procs[d.pid - 1]
    _check_step_target(config, snap, d)
    if d.kind == CRASH:
        # a crashed process never moves again, so its local state is erased;
        # otherwise behaviorally identical states would be counted apart
        procs = _swap(state.procs, d.pid, ProcSnap(CRASHED, None, snap.acquires))
        return GlobalState(state.cells, procs), None
    mem = AnonymousMemory(config.m, config.rw_only, cells=list(state.cells))
    port = MemoryPort(mem, config.perms, d.pid)
    proto = config.proto()
    params = config.params()
    try:
        local, outcome = proto.step(snap.local, port, params, d.choice)
    except ProtocolError as exc:
        raise SimulationError(f"{fmt_directive(d)}: {exc}") from None
    status, acquires, fresh = _advance(
        snap.status, snap.acquires, outcome, config, params, proto
    )
    if fresh is not None:
        local = fresh
    procs = _swap(state.procs, d.pid, ProcSnap(status, local, acquires))
    return GlobalState(mem.global_view(), procs), outcome


def _swap(procs, pid, snap):
    return procs[: pid - 1] + (snap,) + procs[pid:]


def pending_choices(config: RunConfig, state: GlobalState, pid: int):
    """Choice slots if pid's next step completes an inner collect, else None."""
    snap = state.procs[pid - 1]
    if snap.status not in STEPPABLE:
        return None
    mem = AnonymousMemory(config.m, config.rw_only, cells=list(state.cells))
    port = MemoryPort(mem, config.perms, pid)
    return config.proto().choices(snap.local, port, config.params())


# ---------------------------------------------------------------------------
# the fast mutable runner


class Runner:
    """Stateful driver: one memory mutated in place, locals swapped per step.

    With record=True every shared access lands in a TraceRecorder for
    digesting and replay comparison; leave it off for large campaigns.
    """

    def __init__(self, config: RunConfig, record: bool = False):
        self.config = config
        self.params = config.params()
        self.proto = config.proto()
        self.memory = AnonymousMemory(config.m, config.rw_only)
        self.recorder = TraceRecorder() if record else None
        self.locals: list = []
        self.statuses: list[str] = []
        self.acquires: list[int] = []
        self.ports: list[MemoryPort] = []
        for pid in range(1, config.n + 1):
            value = config.inputs[pid - 1] if self.proto.has_inputs else None
            self.locals.append(self.proto.init(self.params, value))
            self.statuses.append(ACTIVE)
            self.acquires.append(0)
            self.ports.append(MemoryPort(self.memory, config.perms, pid, self.recorder))
        self.steps = 0
        self.access_counts = [0] * config.n
        self.decisions: dict[int, int] = {}
        self.cs_events: list[tuple[int, int, str]] = []
        self.cs_overlap: tuple[int, int, int] | None = None
        self.applied: list[Directive] = []

    def snapshot(self) -> GlobalState:
        procs = tuple(
            ProcSnap(self.statuses[i], self.locals[i], self.acquires[i])
            for i in range(self.config.n)
        )
        return GlobalState(self.memory.global_view(), procs)

    def steppable_pids(self) -> list[int]:
        return [
            i + 1 for i, st in enumerate(self.statuses) if st in STEPPABLE
        ]

    def apply(self, d: Directive) -> StepOutcome | None:
        _check_pid(self.config, d)
        i = d.pid - 1
        snap = ProcSnap(self.statuses[i], self.locals[i], self.acquires[i])
        _check_step_target(self.config, snap, d)
        self.applied.append(d)
        if d.kind == CRASH:
            self.statuses[i] = CRASHED
            self.locals[i] = None
            return None
        try:
            local, outcome = self.proto.step(
                self.locals[i], self.ports[i], self.params, d.choice
            )
        except ProtocolError as exc:
            raise SimulationError(f"{fmt_directive(d)}: {exc}") from None
        self.steps += 1
        self.access_counts[i] += 1
        status, acq, fresh = _advance(
            self.statuses[i], self.acquires[i], outcome, self.config, self.params,
            self.proto,
        )
        self.locals[i] = fresh if fresh is not None else local
        self.statuses[i] = status
        self.acquires[i] = acq
        if outcome.kind == ENTERED_CS:
            self.cs_events.append((self.steps, d.pid, "enter"))
            others = [
                p + 1
                for p in range(self.config.n)
                if p != i and self.statuses[p] == IN_CS
            ]
            if others and self.cs_overlap is None:
                self.cs_overlap = (self.steps, d.pid, others[0])
        elif outcome.kind == EXITED_CS:
            self.cs_events.append((self.steps, d.pid, "exit"))
        elif outcome.kind == DECIDED:
            self.decisions[d.pid] = outcome.value
        return outcome

    def pending_choices(self, pid: int):
        return self.proto.choices(self.locals[pid - 1], self.ports[pid - 1], self.params)

    def all_terminal(self) -> bool:
        return not any(st in STEPPABLE for st in self.statuses)


@dataclass
class RunResult:
    """What came out of driving one schedule to its end."""

    config: RunConfig
    schedule: tuple[Directive, ...]
    state: GlobalState
    steps: int
    access_counts: tuple[int, ...]
    decisions: dict[int, int]
    cs_events: tuple[tuple[int, int, str], ...]
    cs_overlap: tuple[int, int, int] | None
    events: tuple | None = None
    digest: str | None = None


def _result(runner: Runner) -> RunResult:
    events = digest = None
    if runner.recorder is not None:
        events = tuple(runner.recorder.events)
        digest = runner.recorder.digest()
    return RunResult(
        config=runner.config,
        schedule=tuple(runner.applied),
        state=runner.snapshot(),
        steps=runner.steps,
        access_counts=tuple(runner.access_counts),
        decisions=dict(runner.decisions),
        cs_events=tuple(runner.cs_events),
        cs_overlap=runner.cs_overlap,
        events=events,
        digest=digest,
    )


def run(config: RunConfig, schedule, record: bool = False) -> RunResult:
    """Drive the given directives in order and return the final picture."""
    if isinstance(schedule, str):
        schedule = parse_schedule(schedule)
    runner = Runner(config, record=record)
    for d in schedule:
        runner.apply(d)
    return _result(runner)


def lockstep_schedule(config: RunConfig, rounds: int) -> tuple[Directive, ...]:
    """S1 S2 ... Sn repeated; every process moves once per round."""
    return tuple(
        Directive(STEP, pid, None)
        for _ in range(rounds)
        for pid in range(1, config.n + 1)
    )


def run_random(
    config: RunConfig,
    seed: int,
    max_steps: int,
    crash_prob: float = 0.0,
    burst_mean: int = 4,
) -> RunResult:
    """One adversarial random walk, fully determined by (config, seed).

    Scheduling is burst-structured: a process keeps running for a random
    burst, then control moves elsewhere.  Collect choices are drawn uniformly
    and recorded explicitly so the returned schedule replays identically.
    At least one process is always left uncrashed.
    """
    rng = random.Random(seed)
    runner = Runner(config, record=False)
    pid = 0
    burst = 0
    crashed = 0
    while runner.steps < max_steps and not runner.all_terminal():
        live = runner.steppable_pids()
        if (
            crash_prob > 0.0
            and config.allows_crashes
            and crashed < config.n - 1
            and len(live) > 1
            and rng.random() < crash_prob
        ):
            victim = live[rng.randrange(len(live))]
            runner.apply(Directive(CRASH, victim, None))
            crashed += 1
            if pid == victim:
                burst = 0
            continue
        if burst <= 0 or pid not in live:
            pid = live[rng.randrange(len(live))]
            burst = 1 + rng.randrange(2 * burst_mean)
        cands = runner.pending_choices(pid)
        choice = None
        if cands is not None and len(cands) >= 2:
            choice = cands[rng.randrange(len(cands))]
        runner.apply(Directive(STEP, pid, choice))
        burst -= 1
    return _result(runner)


def random_schedule(
    config: RunConfig,
    seed: int,
    length: int,
    crash_prob: float = 0.0,
    burst_mean: int = 4,
) -> tuple[Directive, ...]:
    """The directive sequence a seeded random walk would take; replayable."""
    return run_random(config, seed, length, crash_prob, burst_mean).schedule


# ---------------------------------------------------------------------------
# exhaustive exploration


def successors(
    config: RunConfig,
    state: GlobalState,
    include_crashes: bool = False,
    branch_choices: bool = True,
):
    """All adversary moves from a state, deterministically ordered.

    Step directives come first by pid, with one edge per collect choice when
    the next step branches (unless branch_choices is off, which pins the
    protocol's own policy); crash edges follow, again by pid.  Crash edges
    appear only when asked for and never count toward depth.
    """
    out = []
    for pid in range(1, config.n + 1):
        if state.procs[pid - 1].status not in STEPPABLE:
            continue
        cands = pending_choices(config, state, pid) if branch_choices else None
        if cands is not None and len(cands) >= 2:
            for k in sorted(cands):
                d = Directive(STEP, pid, k)
                nxt, _ = successor(config, state, d)
                out.append((d, nxt))
        else:
            d = Directive(STEP, pid, None)
            nxt, _ = successor(config, state, d)
            out.append((d, nxt))
    if include_crashes and config.allows_crashes:
        for pid in range(1, config.n + 1):
            if state.procs[pid - 1].status == ACTIVE:
                d = Directive(CRASH, pid, None)
                nxt, _ = successor(config, state, d)
                out.append((d, nxt))
    return out


@dataclass
class StateGraph:
    """Explored reachable states with first-discovery parent pointers."""

    config: RunConfig
    states: list[GlobalState]
    index: dict[GlobalState, int]
    edges: dict[int, tuple[tuple[Directive, int], ...]]
    depths: list[int]
    parents: dict[int, tuple[int, Directive]]
    truncated: bool
    bound_hit: str | None
    check_failures: tuple[tuple[int, str], ...] = ()

    def path_to(self, sid: int) -> tuple[Directive, ...]:
        """Directives from the initial state to the given state."""
        out = []
        while sid != 0:
            parent, d = self.parents[sid]
            out.append(d)
            sid = parent
        out.reverse()
        return tuple(out)

    def find(self, pred: Callable[[GlobalState], bool]) -> int | None:
        for sid, st in enumerate(self.states):
            if pred(st):
                return sid
        return None

    @property
    def complete(self) -> bool:
        return not self.truncated


def explore(
    config: RunConfig,
    max_states: int = 200_000,
    max_depth: int | None = None,
    include_crashes: bool = False,
    state_check: Callable[[GlobalState], list[str]] | None = None,
    stop_on_check_failure: bool = False,
    start: GlobalState | None = None,
    branch_choices: bool = True,
) -> StateGraph:
    """Breadth-first reachability with structural dedup.

    Depth counts shared accesses only, so crash edges ride along at the depth
    of their source (0-1 search keeps depths minimal).  state_check runs on
    every state as discovered; its failure labels are collected rather than
    raised.  The graph is complete when neither bound was hit.  Exploration
    starts from the configured initial state unless start says otherwise.
    """
    init = initial_state(config) if start is None else start
    states = [init]
    index = {init: 0}
    depths = [0]
    edges: dict[int, tuple[tuple[Directive, int], ...]] = {}
    parents: dict[int, tuple[int, Directive]] = {}
    failures: list[tuple[int, str]] = []
    truncated = False
    bound_hit: str | None = None

    if state_check is not None:
        for label in state_check(init):
            failures.append((0, label))

    queue: deque[int] = deque([0])
    expanded = set()
    while queue:
        sid = queue.popleft()
        if sid in expanded:
            continue
        expanded.add(sid)
        if max_depth is not None and depths[sid] >= max_depth:
            state = states[sid]
            if any(p.status in STEPPABLE for p in state.procs):
                truncated = True
                bound_hit = bound_hit or "depth"
            continue
        if state_check is not None and stop_on_check_failure and failures:
            break
        out_edges: list[tuple[Directive, int]] = []
        for d, nxt in successors(config, states[sid], include_crashes, branch_choices):
            ndepth = depths[sid] + (1 if d.kind == STEP else 0)
            known = index.get(nxt)
            if known is None:
                if len(states) >= max_states:
                    truncated = True
                    bound_hit = bound_hit or "states"
                    continue
                known = len(states)
                states.append(nxt)
                index[nxt] = known
                depths.append(ndepth)
                parents[known] = (sid, d)
                if state_check is not None:
                    for label in state_check(nxt):
                        failures.append((known, label))
                if d.kind == STEP:
                    queue.append(known)
                else:
                    queue.appendleft(known)
            elif ndepth < depths[known]:
                depths[known] = ndepth
                parents[known] = (sid, d)
                expanded.discard(known)
                if d.kind == STEP:
                    queue.append(known)
                else:
                    queue.appendleft(known)
            out_edges.append((d, known))
        edges[sid] = tuple(out_edges)
    return StateGraph(
        config=config,
        states=states,
        index=index,
        edges=edges,
        depths=depths,
        parents=parents,
        truncated=truncated,
        bound_hit=bound_hit,
        check_failures=tuple(failures),
    )


def solo_extension(
    config: RunConfig, state: GlobalState, pid: int, budget: int
) -> tuple[int | None, int, tuple[Directive, ...]]:
    """Run pid alone from the state; (decided value or None, steps, suffix).

    Choices fall to the protocol's own policy.  Stops on decision, on any
    terminal status, or when the budget runs out.
    """
    used = 0
    suffix: list[Directive] = []
    proto = config.proto()
    while used < budget:
        snap = state.procs[pid - 1]
        if snap.status not in STEPPABLE:
            return proto.decision(snap.local), used, tuple(suffix)
        d = Directive(STEP, pid, None)
        state, outcome = successor(config, state, d)
        suffix.append(d)
        used += 1
        if outcome is not None and outcome.kind == DECIDED:
            return outcome.value, used, tuple(suffix)
    return None, used, tuple(suffix)


# ---------------------------------------------------------------------------
# witness minimization


def minimize_schedule(
    config: RunConfig,
    schedule: tuple[Directive, ...],
    failing: Callable[[RunResult], bool],
) -> tuple[Directive, ...]:
    """Shrink a failing schedule to one where every directive matters.

    Classic delta debugging on the directive sequence: try dropping chunks at
    decreasing granularity, then confirm 1-minimality by dropping singletons.
    Schedules that no longer apply (a dropped step turns a later directive
    invalid) simply do not fail.
    """

    def still_fails(cand: tuple[Directive, ...]) -> bool:
        try:
            return failing(run(config, cand))
        except SimulationError:
            return False

    if not still_fails(schedule):
        raise ValueError("the given schedule does not exhibit the failure")
    current = schedule
    chunk = max(1, len(current) // 2)
    while True:
        i = 0
        shrunk = False
        while i < len(current):
            cand = current[:i] + current[i + chunk :]
            if cand and still_fails(cand):
                current = cand
                shrunk = True
            else:
                i += chunk
        if chunk > 1:
            chunk = chunk // 2
        elif not shrunk:
            return current


def minimize_trace(config: RunConfig, trace, failing) -> tuple[Directive, ...]:
    """minimize_schedule, accepting a RunResult or a raw schedule."""
    schedule = trace.schedule if isinstance(trace, RunResult) else tuple(trace)
    return minimize_schedule(config, schedule, failing)
