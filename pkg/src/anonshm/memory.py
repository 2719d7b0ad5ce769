"""Anonymous registers behind per-process address permutations.

The memory is an array of m registers, all starting at bottom.  Process i
never sees true register numbers: every access through local index x lands on
register f_i(x), where f_i is a bijection fixed per process for the whole run
(the adversary picks it).  Registers are anonymous because nothing a process
reads or writes reveals f_i.

Bottom is represented as None and compares strictly below every payload;
payloads are non-negative integers.  In serialized form bottom is the token
"B".
"""

from __future__ import annotations

import hashlib
import math
import random
from typing import NamedTuple

BOTTOM = None

READ = "read"
WRITE = "write"
CAS = "cas"


class MemoryError_(Exception):
    """Bad register value, bad index, or an operation the mode forbids."""


def is_value(v) -> bool:
    """Bottom or a non-negative int payload."""
    return v is None or (isinstance(v, int) and not isinstance(v, bool) and v >= 0)


def check_value(v):
    if not is_value(v):
        raise MemoryError_(f"not a register value: {v!r}")
    return v


def value_key(v) -> int:
    """Total order with bottom strictly below every payload."""
    return -1 if v is None else v


def value_lt(a, b) -> bool:
    return value_key(a) < value_key(b)


def fmt_value(v) -> str:
    return "B" if v is None else str(v)


def parse_value(tok: str):
    if tok == "B":
        return BOTTOM
    try:
        v = int(tok)
    except ValueError:
        raise MemoryError_(f"bad value token: {tok!r}") from None
    return check_value(v)


class PermutationTable:
    """One address bijection per process, 1-based on both sides.

    rows[i-1][x-1] is the true register touched when process i addresses its
    local register x.  Row 1 is fixed to the identity in the seeded and
    enumerated sources: relabeling true registers by any permutation cannot be
    observed by any process, so one process's table may be normalized away
    and the adversary loses nothing.
    """

    __slots__ = ("n", "m", "rows")

    def __init__(self, rows: tuple[tuple[int, ...], ...]):
        if not rows:
            raise MemoryError_("permutation table needs at least one row")
        m = len(rows[0])
        for row in rows:
            if sorted(row) != list(range(1, m + 1)):
                raise MemoryError_(f"row is not a bijection on 1..{m}: {row}")
        self.n = len(rows)
        self.m = m
        self.rows = rows

    def apply(self, pid: int, x: int) -> int:
        """Map process pid's local index x to the true register index."""
        return self.rows[pid - 1][x - 1]

    def __eq__(self, other) -> bool:
        return isinstance(other, PermutationTable) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"PermutationTable({self.rows!r})"


def identity_rows(n: int, m: int) -> tuple[tuple[int, ...], ...]:
    row = tuple(range(1, m + 1))
    return (row,) * n


def table_count(n: int, m: int) -> int:
    """Number of distinct tables with the first row normalized to identity."""
    return math.factorial(m) ** (n - 1)


def _kth_permutation(m: int, k: int) -> tuple[int, ...]:
    """k-th permutation of 1..m in lexicographic order, k in 0..m!-1."""
    items = list(range(1, m + 1))
    out = []
    for pos in range(m, 0, -1):
        f = math.factorial(pos - 1)
        idx, k = divmod(k, f)
        out.append(items.pop(idx))
    return tuple(out)


def create_permutations(
    n: int,
    m: int,
    *,
    seed: int | None = None,
    explicit=None,
    index: int | None = None,
    identity: bool = False,
) -> PermutationTable:
    """Build the adversary's address table from exactly one source.

    seed: row 1 is identity, rows 2..n drawn from random.Random(seed).
    explicit: full list of n rows, each a bijection on 1..m (arbitrary rows
        allowed, including a non-identity first row).
    index: the index-th table, 0 <= index < m!**(n-1), row 1 identity and the
        remaining rows in lexicographic order of the permutation product.
    identity: every row is the identity.
    """
    if n < 1 or m < 1:
        raise MemoryError_("need n >= 1 processes and m >= 1 registers")
    sources = [seed is not None, explicit is not None, index is not None, identity]
    if sum(sources) != 1:
        raise MemoryError_("exactly one permutation source must be given")
    if identity:
        return PermutationTable(identity_rows(n, m))
    if explicit is not None:
        rows = tuple(tuple(row) for row in explicit)
        if len(rows) != n:
            raise MemoryError_(f"expected {n} rows, got {len(rows)}")
        return PermutationTable(rows)
    if seed is not None:
        rng = random.Random(seed)
        rows = [tuple(range(1, m + 1))]
        for _ in range(n - 1):
            row = list(range(1, m + 1))
            rng.shuffle(row)
            rows.append(tuple(row))
        return PermutationTable(tuple(rows))
    count = table_count(n, m)
    if not 0 <= index < count:
        raise MemoryError_(f"table index {index} out of range 0..{count - 1}")
    rows = [tuple(range(1, m + 1))]
    rest = index
    digits = []
    for _ in range(n - 1):
        rest, d = divmod(rest, math.factorial(m))
        digits.append(d)
    for d in reversed(digits):
        rows.append(_kth_permutation(m, d))
    return PermutationTable(tuple(rows))


def fmt_perms(table: PermutationTable) -> str:
    return ";".join(",".join(str(g) for g in row) for row in table.rows)


def parse_perms(text: str) -> PermutationTable:
    rows = tuple(
        tuple(int(tok) for tok in part.split(",")) for part in text.split(";")
    )
    return PermutationTable(rows)


class MemoryEvent(NamedTuple):
    """One shared access: what was asked locally and what truly happened.

    gidx is the true register index after permutation.  For reads, old is the
    value observed.  For writes, old is the overwritten value and new the
    value written.  For cas, old/new are the compare/swap arguments and ok
    records whether the swap happened.
    """

    step: int
    pid: int
    op: str
    local: int
    gidx: int
    old: object
    new: object
    ok: bool | None


def fmt_event(e: MemoryEvent) -> str:
    ok = "-" if e.ok is None else ("t" if e.ok else "f")
    return (
        f"{e.step} {e.pid} {e.op} {e.local} {e.gidx} "
        f"{fmt_value(e.old)} {fmt_value(e.new)} {ok}"
    )


def parse_event(line: str) -> MemoryEvent:
    parts = line.split()
    if len(parts) != 8:
        raise MemoryError_(f"bad event line: {line!r}")
    step, pid, op, local, gidx = parts[:5]
    old, new, ok = parts[5], parts[6], parts[7]
    if op not in (READ, WRITE, CAS):
        raise MemoryError_(f"bad op in event line: {op!r}")
    return MemoryEvent(
        step=int(step),
        pid=int(pid),
        op=op,
        local=int(local),
        gidx=int(gidx),
        old=None if old == "-" else parse_value(old),
        new=None if new == "-" else parse_value(new),
        ok={"-": None, "t": True, "f": False}[ok],
    )


def events_digest(events) -> str:
    """Stable content hash of an event sequence."""
    h = hashlib.sha256()
    for e in events:
        h.update(fmt_event(e).encode())
        h.update(b"\n")
    return h.hexdigest()


class TraceRecorder:
    """Collects events and per-process access counts for one run."""

    __slots__ = ("events", "per_pid")

    def __init__(self):
        self.events: list[MemoryEvent] = []
        self.per_pid: dict[int, int] = {}

    def record(self, pid, op, local, gidx, old, new, ok):
        self.per_pid[pid] = self.per_pid.get(pid, 0) + 1
        self.events.append(
            MemoryEvent(len(self.events) + 1, pid, op, local, gidx, old, new, ok)
        )

    def digest(self) -> str:
        return events_digest(self.events)


class AnonymousMemory:
    """m registers, all bottom initially, addressed through a permutation."""

    __slots__ = ("m", "cells", "rw_only")

    def __init__(self, m: int, rw_only: bool = False, cells=None):
        if m < 1:
            raise MemoryError_("need at least one register")
        self.m = m
        self.rw_only = rw_only
        if cells is None:
            self.cells = [BOTTOM] * m
        else:
            if len(cells) != m:
                raise MemoryError_("cell count does not match m")
            self.cells = [check_value(v) for v in cells]

    def _gidx(self, perms: PermutationTable, pid: int, x: int) -> int:
        if not 1 <= x <= self.m:
            raise MemoryError_(f"local index {x} out of range 1..{self.m}")
        return perms.apply(pid, x)

    def read(self, perms, pid, x, recorder=None):
        g = self._gidx(perms, pid, x)
        v = self.cells[g - 1]
        if recorder is not None:
            recorder.record(pid, READ, x, g, v, None, None)
        return v

    def write(self, perms, pid, x, v, recorder=None):
        check_value(v)
        g = self._gidx(perms, pid, x)
        old = self.cells[g - 1]
        self.cells[g - 1] = v
        if recorder is not None:
            recorder.record(pid, WRITE, x, g, old, v, None)

    def cas(self, perms, pid, x, old, new, recorder=None) -> bool:
        if self.rw_only:
            raise MemoryError_("cas is not available on read/write-only memory")
        check_value(old)
        check_value(new)
        g = self._gidx(perms, pid, x)
        ok = self.cells[g - 1] == old
        if ok:
            self.cells[g - 1] = new
        if recorder is not None:
            recorder.record(pid, CAS, x, g, old, new, ok)
        return ok

    def global_view(self) -> tuple:
        """True register contents in true index order; debugging/checking only."""
        return tuple(self.cells)


class MemoryPort:
    """A process's handle on the memory: local indices only.

    The port hides the permutation and the true indices from protocol code;
    everything a step function can do goes through read/write/cas on local
    indices.
    """

    __slots__ = ("memory", "perms", "pid", "recorder")

    def __init__(self, memory, perms, pid, recorder=None):
        self.memory = memory
        self.perms = perms
        self.pid = pid
        self.recorder = recorder

    def read(self, x):
        return self.memory.read(self.perms, self.pid, x, self.recorder)

    def peek(self, x):
        """Read without recording; for lookahead, never for protocol steps."""
        return self.memory.read(self.perms, self.pid, x)

    def write(self, x, v):
        self.memory.write(self.perms, self.pid, x, v, self.recorder)

    def cas(self, x, old, new) -> bool:
        return self.memory.cas(self.perms, self.pid, x, old, new, self.recorder)
