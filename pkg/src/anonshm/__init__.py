"""Simulator and bounded checker for fully anonymous shared memory.

Identical processes without identifiers communicate through registers that
carry no global names: each process addresses the same m registers through
its own adversary-chosen bijection.  This package executes three protocols
in that model under adversarial schedules and checks their announced
properties: a deadlock-free mutual exclusion built on round-tagged register
grabbing (needs compare-and-swap, works iff the register count shares no
divisor with 2..n), a wait-free consensus, and an obstruction-free
set agreement over plain read/write registers.
"""

from .admissibility import (
    AdmissibilitySet,
    admissible_sizes,
    gcd,
    is_admissible,
    share_is_never_integral,
)
from .memory import (
    BOTTOM,
    AnonymousMemory,
    MemoryEvent,
    MemoryPort,
    PermutationTable,
    TraceRecorder,
    create_permutations,
    events_digest,
    fmt_event,
    fmt_perms,
    fmt_value,
    parse_event,
    parse_perms,
    parse_value,
    table_count,
)
from .protocols import (
    PROTOCOLS,
    ConsensusParams,
    ConsensusState,
    MutexParams,
    MutexState,
    ProtocolError,
    SetAgreementParams,
    SetAgreementState,
    StepOutcome,
    consensus_init,
    consensus_step,
    majority_value,
    mutex_init,
    mutex_step,
    setagreement_choices,
    setagreement_init,
    setagreement_step,
)
from .scheduler import (
    ConfigError,
    Directive,
    GlobalState,
    ProcSnap,
    RunConfig,
    RunResult,
    Runner,
    SimulationError,
    StateGraph,
    explore,
    format_schedule,
    initial_state,
    lockstep_schedule,
    minimize_schedule,
    minimize_trace,
    parse_schedule,
    pending_choices,
    random_schedule,
    run,
    run_random,
    solo_extension,
    successor,
    successors,
)
from .properties import (
    HuntBudget,
    Verdict,
    Witness,
    agreement_sweep,
    check_agreement,
    check_deadlock_freedom,
    check_mutual_exclusion,
    check_obstruction_freedom,
    check_round_progress,
    check_validity,
    check_wait_freedom_bound,
    detect_livelock_cycle,
    hunt_agreement_violation,
    ladder_failures,
    mutex_state_check,
    ownership_failures,
    replay_witness,
    validity_sweep,
)

__version__ = "0.1.0"
