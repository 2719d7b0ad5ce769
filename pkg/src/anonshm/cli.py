"""Command-line front end.

Subcommands: admissible, run, explore, check, hunt, replay.  Exit codes are
the machine contract: 0 every checked property holds (or the command is pure
output), 1 a violation was found and its witness written, 2 inconclusive,
3 usage or configuration error, 4 internal error or replay divergence.

Artifacts land under <output root>/<stamp>/{traces,witnesses,verdicts}/ where
the root comes from --out or the ANONSHM_OUT environment variable, and the
stamp is derived from the experiment content (same experiment, same paths)
unless --stamp pins it.  Every artifact embeds the configuration needed to
replay it.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from pathlib import Path

from .admissibility import admissible_sizes
from .memory import MemoryError_, create_permutations, fmt_event
from .properties import (
    FAILS,
    HOLDS,
    INCONCLUSIVE,
    HuntBudget,
    Verdict,
    Witness,
    agreement_sweep,
    check_deadlock_freedom,
    check_mutual_exclusion,
    check_obstruction_freedom,
    check_round_progress,
    check_wait_freedom_bound,
    detect_livelock_cycle,
    hunt_agreement_violation,
    mutex_state_check,
    replay_witness,
    validity_sweep,
)
from .scheduler import (
    CRASH,
    STEPPABLE,
    ConfigError,
    Directive,
    RunConfig,
    SimulationError,
    explore,
    format_schedule,
    parse_schedule,
    run,
    run_random,
)

EXIT_HOLDS = 0
EXIT_VIOLATION = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3
EXIT_INTERNAL = 4

OUT_ENV = "ANONSHM_OUT"

_CONFIG_FLAGS = (
    "protocol",
    "n",
    "m",
    "inputs",
    "perms",
    "abortable",
    "exit_on_counter",
    "re_entries",
    "choice_policy",
)


def _say(msg: str):
    print(msg, file=sys.stderr)


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("--protocol", choices=("mutex", "consensus", "setagree"))
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--inputs", help="comma-separated proposals, one per process")
    p.add_argument(
        "--perms",
        help=(
            "register naming table: 'identity', 'seed:<k>', 'index:<k>', or "
            "explicit rows like '1,2,3;2,3,1'"
        ),
    )
    p.add_argument("--abortable", action="store_true", default=None)
    p.add_argument("--exit-on-counter", action="store_true", default=None)
    p.add_argument("--re-entries", type=int)
    p.add_argument("--choice-policy", choices=("smallest",))


def _add_out_flags(p: argparse.ArgumentParser):
    p.add_argument("--out", help=f"output root (default ${OUT_ENV} or anonshm-out)")
    p.add_argument("--stamp", help="experiment directory name (default: derived)")


def _read_config_file(path: str) -> dict[str, str]:
    kv: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, val = line.partition("=")
        kv[key.strip()] = val.strip()
    return kv


def _resolve_perms(spec: str, n: int, m: int):
    if spec == "identity":
        return create_permutations(n, m, identity=True)
    if spec.startswith("seed:"):
        return create_permutations(n, m, seed=int(spec[len("seed:") :]))
    if spec.startswith("index:"):
        return create_permutations(n, m, index=int(spec[len("index:") :]))
    return create_permutations(n, m, explicit=_parse_rows(spec))


def _parse_rows(spec: str):
    try:
        return [[int(t) for t in part.split(",")] for part in spec.split(";")]
    except ValueError:
        raise ConfigError(f"bad permutation rows {spec!r}") from None


def _build_config(args) -> RunConfig:
    kv: dict[str, str] = {}
    if args.config:
        kv.update(_read_config_file(args.config))
    for flag in _CONFIG_FLAGS:
        val = getattr(args, flag, None)
        if val is None:
            continue
        if isinstance(val, bool):
            kv[flag] = "1" if val else "0"
        else:
            kv[flag] = str(val)
    for key in ("protocol", "n", "m"):
        if key not in kv:
            raise ConfigError(f"missing required setting {key!r}")
    n = int(kv["n"])
    m = int(kv["m"])
    table = _resolve_perms(kv.get("perms", "identity"), n, m)
    kv["perms"] = ";".join(",".join(str(g) for g in row) for row in table.rows)
    return RunConfig.from_kv(kv)


def _out_root(args) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    return Path(os.environ.get(OUT_ENV, "anonshm-out"))


def _stamp(args, *parts: str) -> str:
    if getattr(args, "stamp", None):
        return args.stamp
    h = hashlib.sha256()
    for p in parts:
        h.update(p.encode())
        h.update(b"\x00")
    return h.hexdigest()[:12]


def _outdir(args, *parts: str) -> Path:
    d = _out_root(args) / _stamp(args, *parts)
    return d


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    _say(f"wrote {path}")


def _config_lines(config: RunConfig) -> list[str]:
    return [f"{k} {v}" for k, v in config.to_kv().items()]


# ---------------------------------------------------------------------------
# trace artifacts


def trace_to_text(result) -> str:
    lines = ["anonshm-trace 1"]
    lines.extend(_config_lines(result.config))
    lines.append(f"schedule {format_schedule(result.schedule)}")
    lines.append(f"steps {result.steps}")
    dec = result.decisions
    lines.append(
        "decisions "
        + ("-" if not dec else ",".join(f"{p}={v}" for p, v in sorted(dec.items())))
    )
    if result.digest is not None:
        lines.append(f"digest {result.digest}")
    if result.events is not None:
        lines.append(f"events {len(result.events)}")
        lines.extend(fmt_event(e) for e in result.events)
    return "\n".join(lines) + "\n"


def trace_from_text(text: str):
    """Returns (config, schedule, digest) from a trace artifact."""
    lines = text.splitlines()
    if not lines or lines[0].split() != ["anonshm-trace", "1"]:
        raise ValueError("not a trace file")
    kv: dict[str, str] = {}
    for ln in lines[1:]:
        if not ln.strip():
            continue
        key, _, val = ln.partition(" ")
        if key == "events":
            break
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
    return config, parse_schedule(kv.get("schedule", "")), kv.get("digest")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_admissible(args) -> int:
    result = admissible_sizes(args.n, args.limit)
    for m in result.members:
        print(m)
    return EXIT_HOLDS


def _merge_crashes(schedule, crash_spec: str):
    """Insert C<pid> directives at the given positions: '1@5,2@9'."""
    plan = []
    for part in crash_spec.split(","):
        pid_s, _, at_s = part.partition("@")
        if not pid_s.isdigit() or not at_s.isdigit():
            raise ConfigError(f"bad crash entry {part!r}; expected pid@position")
        plan.append((int(at_s), int(pid_s)))
    plan.sort()
    out = list(schedule)
    for offset, (pos, pid) in enumerate(plan):
        if pos > len(schedule):
            raise ConfigError(f"crash position {pos} beyond schedule end")
        out.insert(pos + offset, Directive(CRASH, pid, None))
    return tuple(out)


def _cmd_run(args) -> int:
    config = _build_config(args)
    if args.schedule is not None:
        schedule = parse_schedule(args.schedule)
        if args.crash:
            if not config.allows_crashes:
                raise ConfigError("mutex runs are failure-free; drop --crash")
            schedule = _merge_crashes(schedule, args.crash)
        result = run(config, schedule, record=not args.no_record)
    elif args.random_seed is not None:
        if args.crash:
            raise ConfigError("--crash applies to scripted schedules only")
        result = run_random(
            config, args.random_seed, args.max_steps, crash_prob=args.crash_prob
        )
        if not args.no_record:
            result = run(config, result.schedule, record=True)
    else:
        raise ConfigError("run needs --schedule or --random-seed")
    outdir = _outdir(
        args, "run", str(sorted(config.to_kv().items())), format_schedule(result.schedule)
    )
    _write(outdir / "traces" / "run.trace", trace_to_text(result))
    print(f"steps {result.steps}")
    if result.digest:
        print(f"digest {result.digest}")
    if result.decisions:
        print(
            "decisions "
            + ",".join(f"{p}={v}" for p, v in sorted(result.decisions.items()))
        )
    for step, pid, what in result.cs_events:
        print(f"cs {what} pid={pid} step={step}")
    if result.cs_overlap is not None:
        step, a, b = result.cs_overlap
        w = Witness(
            config=config,
            prop="mutual-exclusion",
            schedule=result.schedule,
            digest=result.digest,
            note=f"processes {a} and {b} in the section at step {step}",
        )
        _write(outdir / "witnesses" / "mutual-exclusion.witness", w.to_text())
        print("violation mutual-exclusion")
        return EXIT_VIOLATION
    return EXIT_HOLDS


def _graph_summary(config, graph, dump_edges: bool) -> str:
    lines = ["anonshm-graph 1"]
    lines.extend(_config_lines(config))
    terminal = sum(
        1
        for st in graph.states
        if not any(p.status in STEPPABLE for p in st.procs)
    )
    lines.append(f"states {len(graph.states)}")
    lines.append(f"edges {sum(len(v) for v in graph.edges.values())}")
    lines.append(f"max-depth {max(graph.depths) if graph.depths else 0}")
    lines.append(f"terminal {terminal}")
    lines.append(f"truncated {0 if graph.complete else 1}")
    lines.append(f"bound-hit {graph.bound_hit or '-'}")
    if graph.check_failures:
        lines.append(f"check-failures {len(graph.check_failures)}")
    if dump_edges:
        for src in range(len(graph.states)):
            for d, dst in graph.edges.get(src, ()):
                tok = f"C{d.pid}" if d.kind == CRASH else (
                    f"S{d.pid}" if d.choice is None else f"S{d.pid}@{d.choice}"
                )
                lines.append(f"E {src} {tok} {dst}")
    return "\n".join(lines) + "\n"


def _cmd_explore(args) -> int:
    config = _build_config(args)
    graph = explore(
        config,
        max_states=args.max_states,
        max_depth=args.max_depth,
        include_crashes=args.crashes,
        branch_choices=not args.no_choice_branching,
    )
    outdir = _outdir(args, "explore", str(sorted(config.to_kv().items())),
                     str(args.max_states), str(args.max_depth), str(args.crashes))
    _write(outdir / "traces" / "graph.summary", _graph_summary(config, graph, args.dump_edges))
    print(
        f"states {len(graph.states)} truncated {0 if graph.complete else 1} "
        f"bound-hit {graph.bound_hit or '-'}"
    )
    return EXIT_HOLDS


_MUTEX_PROPS = ("mutual-exclusion", "state-invariants", "deadlock-freedom",
                "livelock-free", "round-progress")
_CONSENSUS_PROPS = ("agreement", "validity", "wait-freedom")
_SETAGREE_PROPS = ("agreement", "validity", "obstruction-freedom")


def _default_props(config: RunConfig) -> tuple[str, ...]:
    if config.protocol == "mutex":
        return _MUTEX_PROPS
    if config.protocol == "consensus":
        return _CONSENSUS_PROPS
    return _SETAGREE_PROPS


def _cmd_check(args) -> int:
    config = _build_config(args)
    props = tuple(args.properties.split(",")) if args.properties else _default_props(config)
    known = set(_MUTEX_PROPS) | set(_CONSENSUS_PROPS) | set(_SETAGREE_PROPS)
    for p in props:
        if p not in known:
            raise ConfigError(f"unknown property {p!r}")
    state_check = mutex_state_check(config) if config.protocol == "mutex" else None
    graph = explore(
        config,
        max_states=args.max_states,
        max_depth=args.max_depth,
        include_crashes=args.crashes,
        state_check=state_check,
        branch_choices=not args.no_choice_branching,
    )
    k_default = 1 if config.protocol == "consensus" else config.n - 1
    k = args.k if args.k is not None else k_default
    bound = args.bound if args.bound is not None else 2 * config.m
    budget = args.budget if args.budget is not None else (config.m + 1) ** 2 + config.m

    verdicts: list[Verdict] = []
    for prop in props:
        if prop == "mutual-exclusion":
            verdicts.append(check_mutual_exclusion(graph))
        elif prop == "state-invariants":
            verdicts.append(_state_invariant_verdict(config, graph))
        elif prop == "deadlock-freedom":
            verdicts.append(check_deadlock_freedom(graph, args.max_states))
        elif prop == "livelock-free":
            verdicts.append(detect_livelock_cycle(graph))
        elif prop == "round-progress":
            verdicts.append(check_round_progress(graph))
        elif prop == "agreement":
            verdicts.append(agreement_sweep(graph, k))
        elif prop == "validity":
            verdicts.append(validity_sweep(graph))
        elif prop == "wait-freedom":
            verdicts.append(check_wait_freedom_bound(graph, bound))
        elif prop == "obstruction-freedom":
            verdicts.append(check_obstruction_freedom(graph, budget))
    outdir = _outdir(args, "check", str(sorted(config.to_kv().items())),
                     ",".join(props), str(args.max_states), str(args.max_depth),
                     str(args.crashes), str(k), str(bound), str(budget))
    return _emit_verdicts(config, verdicts, outdir)


def _state_invariant_verdict(config, graph) -> Verdict:
    stats = {"states": str(len(graph.states)),
             "failures": str(len(graph.check_failures))}
    if not graph.check_failures:
        status = HOLDS if graph.complete else INCONCLUSIVE
        return Verdict("state-invariants", status, None, stats)
    sid, label = graph.check_failures[0]
    w = Witness(
        config=config,
        prop="state-invariants",
        schedule=graph.path_to(sid),
        note=label,
    )
    res = run(config, w.schedule, record=True)
    w.digest = res.digest
    return Verdict("state-invariants", FAILS, w, stats, note=label)


def _emit_verdicts(config, verdicts: list[Verdict], outdir: Path) -> int:
    head = ["# anonshm-verdicts 1"]
    head.extend(f"# {ln}" for ln in _config_lines(config))
    lines = []
    wrote_witness = False
    for v in verdicts:
        wpath = "-"
        if v.witness is not None:
            wfile = outdir / "witnesses" / f"{v.prop}.witness"
            _write(wfile, v.witness.to_text())
            wpath = str(wfile)
            wrote_witness = True
        lines.append(v.line(wpath))
    _write(outdir / "verdicts" / "check.verdicts", "\n".join(head + lines) + "\n")
    for ln in lines:
        print(ln)
    if any(v.status == FAILS for v in verdicts):
        return EXIT_VIOLATION
    if any(v.status == INCONCLUSIVE for v in verdicts):
        return EXIT_INCONCLUSIVE
    return EXIT_HOLDS


def _cmd_hunt(args) -> int:
    config = _build_config(args)
    budget = HuntBudget(
        explore_states=args.explore_states,
        explore_depth=args.explore_depth,
        walks=args.walks,
        walk_steps=args.walk_steps,
        crash_prob=args.crash_prob,
        seed0=args.seed,
    )
    k = args.k if args.k is not None else 1
    verdict = hunt_agreement_violation(config, budget, k=k)
    outdir = _outdir(args, "hunt", str(sorted(config.to_kv().items())),
                     str(budget), str(k))
    return _emit_verdicts(config, [verdict], outdir)


def _cmd_replay(args) -> int:
    text = Path(args.artifact).read_text()
    first = text.splitlines()[0].split() if text.splitlines() else []
    if first[:1] == ["anonshm-witness"]:
        w = Witness.from_text(text)
        status, detail, digest = replay_witness(w, explore_bound=args.explore_bound)
        print(f"replay {status}")
        print(f"detail {detail}")
        if digest is not None:
            print(f"digest {digest}")
        if status == "confirmed":
            return EXIT_HOLDS
        if status == "refuted":
            return EXIT_VIOLATION
        return EXIT_INTERNAL
    if first[:1] == ["anonshm-trace"]:
        config, schedule, digest = trace_from_text(text)
        try:
            res = run(config, schedule, record=True)
        except SimulationError as exc:
            print("replay diverged")
            print(f"detail schedule no longer applies: {exc}")
            return EXIT_INTERNAL
        print(f"digest {res.digest}")
        if digest is not None and res.digest != digest:
            print("replay diverged")
            print(f"detail recorded digest {digest} differs")
            return EXIT_INTERNAL
        print("replay confirmed")
        return EXIT_HOLDS
    raise ConfigError(f"{args.artifact}: neither a witness nor a trace artifact")


# ---------------------------------------------------------------------------
# argument wiring


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad arguments, which collides with the
    inconclusive exit code; route its errors to the usage code instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(
        prog="anonshm",
        description=(
            "Simulate and check anonymous-process/anonymous-register "
            "protocols under adversarial schedules."
        ),
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("admissible", help="list admissible register counts")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--limit", type=int, required=True)
    p.set_defaults(fn=_cmd_admissible)

    p = sub.add_parser("run", help="drive one schedule and write its trace")
    _add_config_flags(p)
    _add_out_flags(p)
    p.add_argument("--schedule", help="directive tokens, e.g. 'S1*16 S2@3 C1'")
    p.add_argument("--random-seed", type=int, help="generate the schedule instead")
    p.add_argument("--max-steps", type=int, default=10_000)
    p.add_argument("--crash-prob", type=float, default=0.0)
    p.add_argument("--crash", help="crash plan pid@position[,pid@position...]")
    p.add_argument("--no-record", action="store_true")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("explore", help="bounded exhaustive state search")
    _add_config_flags(p)
    _add_out_flags(p)
    p.add_argument("--max-states", type=int, default=200_000)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--crashes", action="store_true", help="branch on crashes")
    p.add_argument("--no-choice-branching", action="store_true")
    p.add_argument("--dump-edges", action="store_true")
    p.set_defaults(fn=_cmd_explore)

    p = sub.add_parser("check", help="explore then check properties")
    _add_config_flags(p)
    _add_out_flags(p)
    p.add_argument("--max-states", type=int, default=200_000)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--crashes", action="store_true")
    p.add_argument("--no-choice-branching", action="store_true")
    p.add_argument("--properties", help="comma-separated; default per protocol")
    p.add_argument("--k", type=int, help="agreement width (default protocol's)")
    p.add_argument("--bound", type=int, help="wait-freedom bound (default 2m)")
    p.add_argument("--budget", type=int, help="solo budget (default (m+1)^2+m)")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("hunt", help="search for an agreement violation")
    _add_config_flags(p)
    _add_out_flags(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--explore-states", type=int, default=30_000)
    p.add_argument("--explore-depth", type=int, default=None)
    p.add_argument("--walks", type=int, default=2_000)
    p.add_argument("--walk-steps", type=int, default=400)
    p.add_argument("--crash-prob", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(fn=_cmd_hunt)

    p = sub.add_parser("replay", help="re-run a witness or trace artifact")
    p.add_argument("artifact")
    p.add_argument("--explore-bound", type=int, default=50_000)
    p.set_defaults(fn=_cmd_replay)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, SimulationError, MemoryError_, ValueError) as exc:
        _say(f"error: {exc}")
        return EXIT_USAGE
    except OSError as exc:
        _say(f"i/o error: {exc}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
