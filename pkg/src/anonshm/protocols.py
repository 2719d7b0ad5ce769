"""Step machines for the three protocols under test.

Each protocol is a pure transition function on its own local state plus
exactly one shared access per step, performed through a MemoryPort.  Local
computation costs nothing and is folded into the step that performs the
access, so scheduling granularity is exactly "one shared access".

mutex      lock acquisition by rounds of register grabbing (needs cas)
consensus  grab-then-read-max, wait-free, exactly 2m accesses (needs cas)
setagree   double-collect with majority adoption (reads and writes only)

All processes run identical code from identical initial local state; the only
per-process inputs are the proposal values of the decision tasks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .memory import BOTTOM, MemoryPort, check_value, value_key

RUNNING = "running"
ENTERED_CS = "entered-cs"
EXITED_CS = "exited-cs"
DECIDED = "decided"
ABORTED = "aborted"


class StepOutcome(NamedTuple):
    kind: str
    value: int | None = None


OUT_RUNNING = StepOutcome(RUNNING)
OUT_ENTERED = StepOutcome(ENTERED_CS)
OUT_EXITED = StepOutcome(EXITED_CS)
OUT_ABORTED = StepOutcome(ABORTED)


class ProtocolError(Exception):
    """Stepping a finished process, bad input value, or bad choice."""


# ---------------------------------------------------------------------------
# mutex


@dataclass(frozen=True)
class MutexParams:
    """n contenders, m registers, plus the two documented variants.

    abortable: seeing a higher round aborts instead of waiting for an empty
    memory, and the withdrawal path aborts after releasing.
    exit_on_counter: the winner exits when it owns all m registers rather
    than when its round reaches n.
    """

    n: int
    m: int
    abortable: bool = False
    exit_on_counter: bool = False


class MutexState(NamedTuple):
    """Program counter plus the register-owning bookkeeping.

    pc:      scan | cas1 | upgrade | guard | cas2 | relw | wait | release
             | done | aborted
    rnd:     current round, 0 before the first grab
    counter: number of owned registers, always == popcount(myview)
    myview:  ownership flags by local index
    j:       1-based loop cursor for the current pc
    mx:      running maximum of the current scan
    """

    pc: str
    rnd: int
    counter: int
    myview: tuple[bool, ...]
    j: int
    mx: int


def mutex_init(params: MutexParams) -> MutexState:
    return MutexState("scan", 0, 0, (False,) * params.m, 1, 0)


def _first_owned(myview: tuple[bool, ...], start: int) -> int:
    """Smallest owned local index >= start, or 0 if none."""
    for k in range(start, len(myview) + 1):
        if myview[k - 1]:
            return k
    return 0


def _after_round_body(s: MutexState, params: MutexParams):
    """Withdrawal check, exit check, or back to the top of the loop.

    Runs after the round-1 grab loop or the round>=2 confirm loop finished.
    The share comparison counter < m/(n-rnd+1) is done in exact integer
    arithmetic.
    """
    competitors = params.n - s.rnd + 1
    if s.counter * competitors < params.m:
        k = _first_owned(s.myview, 1)
        if k:
            return s._replace(pc="relw", j=k), OUT_RUNNING
        if params.abortable:
            return s._replace(pc="aborted"), OUT_ABORTED
        return s._replace(pc="wait", j=1), OUT_RUNNING
    done = s.counter == params.m if params.exit_on_counter else s.rnd == params.n
    if done:
        return s._replace(pc="release", j=_first_owned(s.myview, 1)), OUT_ENTERED
    return s._replace(pc="scan", j=1, mx=0), OUT_RUNNING


def mutex_step(s: MutexState, port: MemoryPort, params: MutexParams):
    """Perform one shared access and return (new state, outcome)."""
    pc = s.pc
    if pc == "scan":
        v = port.read(s.j)
        mx = s.mx if value_key(v) <= s.mx else v
        if s.j < params.m:
            return s._replace(j=s.j + 1, mx=mx), OUT_RUNNING
        if s.rnd < mx:
            # someone is in a later round: withdraw from the competition
            if params.abortable:
                return s._replace(pc="aborted", mx=mx), OUT_ABORTED
            return s._replace(rnd=0, j=1, mx=0), OUT_RUNNING
        rnd = s.rnd + 1
        if rnd == 1:
            return s._replace(pc="cas1", rnd=1, j=1, mx=mx), OUT_RUNNING
        k = _first_owned(s.myview, 1)
        if k:
            return s._replace(pc="upgrade", rnd=rnd, j=k, mx=mx), OUT_RUNNING
        return s._replace(pc="guard", rnd=rnd, j=1, mx=mx), OUT_RUNNING

    if pc == "cas1":
        ok = port.cas(s.j, BOTTOM, 1)
        myview = s.myview[: s.j - 1] + (ok,) + s.myview[s.j :] if ok else s.myview
        counter = s.counter + 1 if ok else s.counter
        s = s._replace(myview=myview, counter=counter)
        if s.j < params.m:
            return s._replace(j=s.j + 1), OUT_RUNNING
        return _after_round_body(s, params)

    if pc == "upgrade":
        port.write(s.j, s.rnd)
        k = _first_owned(s.myview, s.j + 1)
        if k:
            return s._replace(j=k), OUT_RUNNING
        return s._replace(pc="guard", j=1), OUT_RUNNING

    if pc == "guard":
        v = port.read(s.j)
        if value_key(v) < s.rnd:
            return s._replace(pc="cas2"), OUT_RUNNING
        if s.j < params.m:
            return s._replace(j=s.j + 1), OUT_RUNNING
        return _after_round_body(s, params)

    if pc == "cas2":
        ok = port.cas(s.j, BOTTOM, s.rnd)
        if ok:
            myview = s.myview[: s.j - 1] + (True,) + s.myview[s.j :]
            s = s._replace(myview=myview, counter=s.counter + 1)
        # the while condition is re-read as its own step either way
        return s._replace(pc="guard"), OUT_RUNNING

    if pc == "relw":
        port.write(s.j, BOTTOM)
        myview = s.myview[: s.j - 1] + (False,) + s.myview[s.j :]
        s = s._replace(myview=myview, counter=s.counter - 1)
        k = _first_owned(s.myview, s.j + 1)
        if k:
            return s._replace(j=k), OUT_RUNNING
        if params.abortable:
            return s._replace(pc="aborted"), OUT_ABORTED
        return s._replace(pc="wait", j=1), OUT_RUNNING

    if pc == "wait":
        v = port.read(s.j)
        if v is not BOTTOM:
            return s._replace(j=1), OUT_RUNNING
        if s.j < params.m:
            return s._replace(j=s.j + 1), OUT_RUNNING
        return s._replace(pc="scan", rnd=0, counter=0, j=1, mx=0), OUT_RUNNING

    if pc == "release":
        port.write(s.j, BOTTOM)
        myview = s.myview[: s.j - 1] + (False,) + s.myview[s.j :]
        s = s._replace(myview=myview, counter=s.counter - 1)
        k = _first_owned(s.myview, s.j + 1)
        if k:
            return s._replace(j=k), OUT_RUNNING
        return s._replace(pc="done"), OUT_EXITED

    raise ProtocolError(f"cannot step mutex process at pc={pc!r}")


# ---------------------------------------------------------------------------
# consensus


@dataclass(frozen=True)
class ConsensusParams:
    m: int


class ConsensusState(NamedTuple):
    """Grab phase then read phase; decides the maximum it read.

    pc is cas or read; val is the proposal; best accumulates the read
    maximum.  A process that finishes used exactly 2m shared accesses.
    """

    pc: str
    val: int
    j: int
    best: int | None


def consensus_init(params: ConsensusParams, value: int) -> ConsensusState:
    check_value(value)
    if value is BOTTOM:
        raise ProtocolError("proposal must be a payload, not bottom")
    return ConsensusState("cas", value, 1, BOTTOM)


def consensus_step(s: ConsensusState, port: MemoryPort, params: ConsensusParams):
    if s.pc == "cas":
        port.cas(s.j, BOTTOM, s.val)
        if s.j < params.m:
            return s._replace(j=s.j + 1), OUT_RUNNING
        return s._replace(pc="read", j=1), OUT_RUNNING
    if s.pc == "read":
        v = port.read(s.j)
        best = v if value_key(v) > value_key(s.best) else s.best
        if s.j < params.m:
            return s._replace(j=s.j + 1, best=best), OUT_RUNNING
        return s._replace(pc="decided", best=best), StepOutcome(DECIDED, best)
    raise ProtocolError(f"cannot step consensus process at pc={s.pc!r}")


# ---------------------------------------------------------------------------
# set agreement


@dataclass(frozen=True)
class SetAgreementParams:
    """m >= 3 registers; choices pick which disagreeing slot to overwrite."""

    m: int
    choice_policy: str = "smallest"


class SetAgreementState(NamedTuple):
    """Inner collect-and-write loop, then a verifying second collect.

    pc:    scan (inner collect) | write (pending overwrite) | vscan
           (verification collect) | decided
    pref:  current preference, adopted from any strict majority value
    j:     collect cursor or (for write) the local index to overwrite
    view:  values collected so far in the current inner scan
    allmatch: verification-scan accumulator
    """

    pc: str
    pref: int
    j: int
    view: tuple
    allmatch: bool


def setagreement_init(params: SetAgreementParams, value: int) -> SetAgreementState:
    check_value(value)
    if value is BOTTOM:
        raise ProtocolError("proposal must be a payload, not bottom")
    if params.m < 3:
        raise ProtocolError("set agreement needs m >= 3 registers")
    return SetAgreementState("scan", value, 1, (), True)


def majority_value(view: tuple, m: int):
    """The unique non-bottom value filling a strict majority of view, or None."""
    counts: dict[int, int] = {}
    for v in view:
        if v is not BOTTOM:
            counts[v] = counts.get(v, 0) + 1
    for v, c in counts.items():
        if 2 * c > m:
            return v
    return None


def _scan_resolution(view: tuple, pref: int, m: int):
    """Apply majority adoption, then list the slots disagreeing with it."""
    adopted = majority_value(view, m)
    if adopted is not None:
        pref = adopted
    candidates = [k for k in range(1, m + 1) if view[k - 1] != pref]
    return pref, candidates


def setagreement_choices(s: SetAgreementState, port: MemoryPort, params):
    """Candidate overwrite slots if the next step completes an inner scan.

    Returns the candidate list (possibly empty, meaning the scan exits the
    inner loop), or None when the next step is not a scan-completing read.
    Peeks at memory without recording; the actual step re-reads.
    """
    if s.pc != "scan" or s.j != params.m:
        return None
    v = port.peek(s.j)
    _, candidates = _scan_resolution(s.view + (v,), s.pref, params.m)
    return candidates


def setagreement_step(
    s: SetAgreementState,
    port: MemoryPort,
    params: SetAgreementParams,
    choice: int | None = None,
):
    if s.pc == "scan":
        v = port.read(s.j)
        view = s.view + (v,)
        if s.j < params.m:
            if choice is not None:
                raise ProtocolError("choice supplied on a step with no choice")
            return s._replace(j=s.j + 1, view=view), OUT_RUNNING
        pref, candidates = _scan_resolution(view, s.pref, params.m)
        if not candidates:
            if choice is not None:
                raise ProtocolError("choice supplied but the collect is uniform")
            return s._replace(pc="vscan", pref=pref, j=1, view=(), allmatch=True), OUT_RUNNING
        if choice is None:
            k = min(candidates)
        else:
            if choice not in candidates:
                raise ProtocolError(
                    f"choice {choice} is not a disagreeing slot {candidates}"
                )
            k = choice
        return s._replace(pc="write", pref=pref, j=k, view=()), OUT_RUNNING

    if choice is not None:
        raise ProtocolError("choice supplied on a step with no choice")

    if s.pc == "write":
        port.write(s.j, s.pref)
        return s._replace(pc="scan", j=1), OUT_RUNNING

    if s.pc == "vscan":
        v = port.read(s.j)
        ok = s.allmatch and v == s.pref
        if s.j < params.m:
            return s._replace(j=s.j + 1, allmatch=ok), OUT_RUNNING
        if ok:
            return s._replace(pc="decided", allmatch=True), StepOutcome(DECIDED, s.pref)
        return s._replace(pc="scan", j=1, allmatch=True), OUT_RUNNING

    raise ProtocolError(f"cannot step set-agreement process at pc={s.pc!r}")


# ---------------------------------------------------------------------------
# registry


def _mutex_init(params, value=None):
    if value is not None:
        raise ProtocolError("mutex takes no proposal value")
    return mutex_init(params)


def _mutex_step(s, port, params, choice=None):
    if choice is not None:
        raise ProtocolError("mutex steps never take a choice")
    return mutex_step(s, port, params)


def _consensus_step(s, port, params, choice=None):
    if choice is not None:
        raise ProtocolError("consensus steps never take a choice")
    return consensus_step(s, port, params)


def _no_choices(s, port, params):
    return None


def _mutex_decision(s):
    return None


def _decided_value(field):
    def get(s):
        return getattr(s, field) if s.pc == "decided" else None

    return get


class ProtocolDef(NamedTuple):
    """Uniform adapter so the scheduler can drive any of the three machines.

    init(params, value) builds the initial local state; step applies one
    shared access; choices lists branch points for adversarial exploration
    (None when the next step is not a branch); decision extracts the decided
    value from a terminal state, if the protocol decides anything.
    """

    name: str
    needs_cas: bool
    has_inputs: bool
    init: object
    step: object
    choices: object
    decision: object


PROTOCOLS = {
    "mutex": ProtocolDef(
        "mutex", True, False, _mutex_init, _mutex_step, _no_choices, _mutex_decision
    ),
    "consensus": ProtocolDef(
        "consensus",
        True,
        True,
        lambda params, value: consensus_init(params, value),
        _consensus_step,
        _no_choices,
        _decided_value("best"),
    ),
    "setagree": ProtocolDef(
        "setagree",
        False,
        True,
        lambda params, value: setagreement_init(params, value),
        setagreement_step,
        setagreement_choices,
        _decided_value("pref"),
    ),
}
