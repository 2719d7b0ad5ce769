"""Register array semantics, naming tables, and event serialization."""

import itertools

import pytest

import anonshm as A
from anonshm.memory import (
    AnonymousMemory,
    MemoryError_,
    MemoryEvent,
    PermutationTable,
    check_value,
    events_digest,
    fmt_event,
    fmt_perms,
    fmt_value,
    identity_rows,
    parse_event,
    parse_perms,
    parse_value,
    table_count,
    value_lt,
)

WORKED = PermutationTable(((1, 2, 3), (2, 3, 1), (3, 1, 2)))


def test_apply_routes_local_names_per_process():
    assert [WORKED.apply(1, x) for x in (1, 2, 3)] == [1, 2, 3]
    assert [WORKED.apply(2, x) for x in (1, 2, 3)] == [2, 3, 1]
    assert [WORKED.apply(3, x) for x in (1, 2, 3)] == [3, 1, 2]
    assert (WORKED.n, WORKED.m) == (3, 3)


def test_rows_must_be_bijections():
    with pytest.raises(MemoryError_):
        PermutationTable(((1, 2), (2, 2)))
    with pytest.raises(MemoryError_):
        A.create_permutations(2, 3, explicit=[[1, 2, 3], [1, 1, 2]])


def test_exactly_one_table_source():
    with pytest.raises(MemoryError_):
        A.create_permutations(2, 3, seed=1, index=2)
    with pytest.raises(MemoryError_):
        A.create_permutations(2, 3)


def test_seeded_tables_are_deterministic():
    a = A.create_permutations(3, 4, seed=99)
    assert a.rows == A.create_permutations(3, 4, seed=99).rows
    assert a.rows[0] == (1, 2, 3, 4)


def test_index_mode_enumerates_all_tables_with_fixed_first_row():
    # process 1 keeps the identity naming; the rest range over all bijections
    assert table_count(2, 3) == 6
    assert table_count(3, 3) == 36
    seen = set()
    for k in range(table_count(2, 3)):
        t = A.create_permutations(2, 3, index=k)
        assert t.rows[0] == (1, 2, 3)
        seen.add(t.rows[1])
    assert seen == set(itertools.permutations((1, 2, 3)))


def test_identity_rows():
    assert identity_rows(2, 3) == ((1, 2, 3), (1, 2, 3))


def test_perms_text_round_trip():
    t = A.create_permutations(2, 3, index=3)
    assert fmt_perms(t) == "1,2,3;2,3,1"
    assert parse_perms(fmt_perms(t)).rows == t.rows


def test_fresh_registers_hold_bottom():
    mem = AnonymousMemory(3)
    t = PermutationTable(identity_rows(1, 3))
    assert all(mem.read(t, 1, x) is None for x in (1, 2, 3))


def test_write_and_cas_through_the_table():
    mem = AnonymousMemory(3)
    t = WORKED
    mem.write(t, 2, 1, 7)              # process 2's register 1 is really 2
    assert mem.cells == [None, 7, None]
    assert mem.read(t, 1, 2) == 7
    # process 3's register 3 is also global 2; a bottom-compare must miss
    assert mem.cas(t, 3, 3, None, 4) is False
    assert mem.cells == [None, 7, None]


def test_cas_semantics():
    mem = AnonymousMemory(2)
    t = PermutationTable(identity_rows(1, 2))
    assert mem.cas(t, 1, 1, None, 5) is True
    assert mem.cas(t, 1, 1, None, 6) is False
    assert mem.cas(t, 1, 1, 5, 6) is True
    assert mem.cells == [6, None]


def test_rw_only_memory_rejects_cas():
    mem = AnonymousMemory(2, rw_only=True)
    t = PermutationTable(identity_rows(1, 2))
    with pytest.raises(MemoryError_):
        mem.cas(t, 1, 1, None, 5)


def test_out_of_range_local_index():
    mem = AnonymousMemory(2)
    t = PermutationTable(identity_rows(1, 2))
    with pytest.raises(MemoryError_):
        mem.read(t, 1, 3)
    with pytest.raises(MemoryError_):
        mem.read(t, 1, 0)


def test_values_are_bottom_or_nonnegative_ints():
    check_value(0)
    check_value(2**40)
    with pytest.raises(MemoryError_):
        check_value(-3)
    with pytest.raises(MemoryError_):
        check_value(True)
    with pytest.raises(MemoryError_):
        check_value("x")


def test_bottom_sorts_below_everything():
    assert value_lt(None, 0)
    assert not value_lt(3, None)
    assert value_lt(2, 3)


def test_value_text_forms():
    assert fmt_value(None) == "B"
    assert parse_value("B") is None
    assert parse_value("12") == 12
    with pytest.raises(MemoryError_):
        parse_value("-12")
    assert fmt_value(7) == "7"


EVS = (
    MemoryEvent(1, 1, "cas", 1, 1, None, 3, True),
    MemoryEvent(2, 2, "read", 2, 3, None, None, None),
    MemoryEvent(3, 1, "write", 3, 2, None, 7, None),
)


def test_event_text_round_trip():
    assert fmt_event(EVS[0]) == "1 1 cas 1 1 B 3 t"
    assert fmt_event(EVS[1]) == "2 2 read 2 3 B B -"
    assert fmt_event(EVS[2]) == "3 1 write 3 2 B 7 -"
    for e in EVS:
        assert parse_event(fmt_event(e)) == e


def test_events_digest_is_stable_and_sensitive():
    base = "3efb3d9b7c27745f3f2ffbcac79bd4deefbd33f1ceb84463b12a17eccc7a1f18"
    assert events_digest(EVS) == base
    assert events_digest(EVS[:2]) != base
    bumped = (EVS[0]._replace(new=4),) + EVS[1:]
    assert events_digest(bumped) != base
