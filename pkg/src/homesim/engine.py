"""Deterministic tick loop binding model, environment, sensors, reasoning,
and the appliance controller into one pipeline.

Stage order within a tick is part of the public contract:

  1. apply external commands (arrival order), then scheduled commands
  2. environment step (outdoor refresh + per-space indoor update)
  3. sensor sampling
  4. abstraction into the tick's fact set
  5. rule evaluation (with CBR parameter resolution)
  6. application of rule commands
  7. trace emission and tick advance

Commands applied in stage 6 therefore reach the environment on the next
tick. Identical (scenario, seed, external timeline) yields byte-identical
serialized traces.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from . import environment, model, reasoning, sensors
from .controller import Command, HomeController, OVERRIDE
from .errors import SimError, SpecError
from .reasoning import AbstractionMemory, CaseBase, FactSet, Signature

STAGE_COMMANDS = 1
STAGE_ENV = 2
STAGE_SENSE = 3
STAGE_ABSTRACT = 4
STAGE_RULES = 5
STAGE_ACTUATE = 6

# Commands a schedule or client may carry; gateway-level controls
# (pause/step/...) never enter the engine.
WORLD_COMMANDS = ("set_weather", "move_person", "authenticate", "override")


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    start_time_of_day: str = environment.EVENING
    tick_seconds: int = 1
    thresholds: reasoning.Thresholds = field(default_factory=reasoning.Thresholds)

    def __post_init__(self) -> None:
        if self.start_time_of_day not in environment.TIME_BUCKETS:
            raise SpecError(f"unknown time-of-day bucket {self.start_time_of_day}")
        if self.tick_seconds <= 0:
            raise SpecError("tick_seconds must be > 0")


@dataclass(frozen=True)
class ScheduledCommand:
    at_tick: int
    command: dict


@dataclass(frozen=True)
class TraceEvent:
    tick: int
    stage: int
    kind: str  # command_applied | rule_fired | fact_added | fact_removed
    #            | sensor_reading | env_update | error
    payload: dict


@dataclass
class World:
    home: model.HomeModel
    env: environment.EnvironmentState
    controller: HomeController
    sensor_specs: list[sensors.SensorSpec]
    rules: list[reasoning.Rule]
    casebase: CaseBase
    config: SimConfig
    schedule: list[ScheduledCommand] = field(default_factory=list)
    memory: AbstractionMemory = field(default_factory=AbstractionMemory)
    facts_prev: FactSet = reasoning.EMPTY_FACTS
    tick: int = 0
    rng: random.Random = field(default_factory=random.Random)
    _schedule_pos: int = 0

    def __post_init__(self) -> None:
        self.rng = random.Random(self.config.seed)
        self.schedule = sorted(
            enumerate(self.schedule), key=lambda pair: (pair[1].at_tick, pair[0])
        )
        self.schedule = [sc for _, sc in self.schedule]

    def time_bucket(self) -> str:
        start = environment.BUCKET_START_SECOND[self.config.start_time_of_day]
        return environment.bucket_at(start + self.tick * self.config.tick_seconds)

    def signature_of(self, person: model.Person) -> Signature:
        return Signature(person.id, person.activity, self.time_bucket(), self.env.kind)


def round2(obj):
    """Round every float in a JSON-ish structure to 2 decimals."""
    if isinstance(obj, float):
        return round(obj, 2)
    if isinstance(obj, dict):
        return {k: round2(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round2(v) for v in obj]
    return obj


def event_line(e: TraceEvent) -> str:
    return json.dumps(
        {"tick": e.tick, "stage": e.stage, "kind": e.kind, "payload": round2(e.payload)},
        sort_keys=True,
        separators=(",", ":"),
    )


def serialize_trace(events: list[TraceEvent]) -> str:
    return "".join(event_line(e) + "\n" for e in events)


def parse_trace(text: str) -> list[TraceEvent]:
    """Inverse of serialize_trace (numeric fields stay at trace precision)."""
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        doc = json.loads(line)
        out.append(TraceEvent(doc["tick"], doc["stage"], doc["kind"], doc["payload"]))
    return out


def tick(world: World, external: list) -> list[TraceEvent]:
    """Advance the world one tick. Per-command failures become error trace
    events; the tick itself never aborts.

    `external` items are command dicts (origin "client") or (origin, dict)
    pairs; they apply in arrival order, before any scheduled command."""
    events: list[TraceEvent] = []
    t = world.tick

    # stage 1: externals in arrival order, then due scheduled commands
    for item in external:
        origin, cmd = item if isinstance(item, tuple) else ("client", item)
        _apply_world_command(world, cmd, origin, events)
    while world._schedule_pos < len(world.schedule):
        sc = world.schedule[world._schedule_pos]
        if sc.at_tick > t:
            break
        world._schedule_pos += 1
        _apply_world_command(world, sc.command, "schedule", events)

    # stage 2: environment
    environment.step_indoor(world.env, world.home, world.time_bucket())
    events.append(
        TraceEvent(
            t,
            STAGE_ENV,
            "env_update",
            {
                "weather": world.env.kind,
                "outdoor": _conditions_json(world.env.outdoor),
                "indoor": {
                    sid: _conditions_json(c) for sid, c in sorted(world.env.indoor.items())
                },
            },
        )
    )

    # stage 3: sensors
    readings = sensors.sample(world.sensor_specs, world.home, world.env, t, world.rng)
    for r in readings:
        events.append(TraceEvent(t, STAGE_SENSE, "sensor_reading", _reading_json(r)))

    # stage 4: abstraction
    now = reasoning.abstract(
        readings, world.home, world.facts_prev, world.config.thresholds, world.memory, t
    )
    for fact in sorted(now.facts - world.facts_prev.facts, key=reasoning.Fact.sort_key):
        events.append(TraceEvent(t, STAGE_ABSTRACT, "fact_added", {"fact": fact.as_json()}))
    for fact in sorted(world.facts_prev.facts - now.facts, key=reasoning.Fact.sort_key):
        events.append(TraceEvent(t, STAGE_ABSTRACT, "fact_removed", {"fact": fact.as_json()}))
    _refresh_activities(world, now)

    # stage 5: rules + CBR
    def resolver(person_id: str) -> int:
        person = world.home.factors[person_id]
        assert isinstance(person, model.Person)
        return reasoning.resolve_channel(
            person, world.signature_of(person), world.casebase, world.config.thresholds.theta
        )

    commands, dropped, fired = reasoning.evaluate(
        world.rules,
        world.facts_prev,
        now,
        world.controller.active_locks(t),
        world.home.appliances(),
        resolver,
        persons=frozenset(p.id for p in world.home.persons()),
    )
    for rid, binding in fired:
        events.append(
            TraceEvent(t, STAGE_RULES, "rule_fired", {"rule": rid, "binding": dict(sorted(binding.items()))})
        )
    for cmd in dropped:
        events.append(
            TraceEvent(
                t,
                STAGE_RULES,
                "error",
                {
                    "code": "override_lock_drop",
                    "detail": f"{cmd.origin} blocked on {cmd.appliance}.{cmd.prop}",
                    "appliance": cmd.appliance,
                    "property": cmd.prop,
                },
            )
        )

    # stage 6: actuate
    for cmd in commands:
        try:
            event, _ = world.controller.apply(
                cmd, t, from_rule=True, rule_person=cmd.person
            )
            events.append(
                TraceEvent(
                    t,
                    STAGE_ACTUATE,
                    "command_applied",
                    {
                        "origin": "rule",
                        "rule": cmd.origin,
                        "appliance": event.appliance,
                        "property": event.prop,
                        "value": event.value,
                        "prior": event.prior,
                    },
                )
            )
        except SimError as err:
            events.append(
                TraceEvent(
                    t,
                    STAGE_ACTUATE,
                    "error",
                    {"code": err.code, "detail": str(err), "rule": cmd.origin},
                )
            )

    # stage 7: advance
    world.facts_prev = now
    world.tick = t + 1
    return events


def run(world: World, n: int) -> list[TraceEvent]:
    """n sequential ticks driven by the schedule alone."""
    events: list[TraceEvent] = []
    for _ in range(n):
        events.extend(tick(world, []))
    return events


def _refresh_activities(world: World, facts: FactSet) -> None:
    sits: dict[str, list[str]] = {}
    for f in facts.facts:
        if f.predicate == reasoning.SITTING_ON:
            sits.setdefault(f.subject, []).append(str(f.object))
    for p in world.home.persons():
        seats = sorted(sits.get(p.id, ()))
        p.activity = f"sitting-on:{seats[0]}" if seats else None


def _apply_world_command(world: World, cmd: dict, origin: str, events: list[TraceEvent]) -> None:
    t = world.tick
    try:
        kind = cmd.get("type")
        if kind == "set_weather":
            environment.set_weather(world.env, cmd["weather"])
            result = {"weather": cmd["weather"]}
        elif kind == "move_person":
            model.move_person(world.home, cmd["person"], (float(cmd["x"]), float(cmd["y"])))
            result = {"space": world.home.factors[cmd["person"]].space}
        elif kind == "authenticate":
            permit, gate_events = world.controller.authenticate(
                cmd["person"], cmd["credential"], t
            )
            result = {"permit": permit}
            for ge in gate_events:
                events.append(
                    TraceEvent(
                        t,
                        STAGE_COMMANDS,
                        "command_applied",
                        {
                            "origin": ge.origin,
                            "appliance": ge.appliance,
                            "property": ge.prop,
                            "value": ge.value,
                            "prior": ge.prior,
                        },
                    )
                )
        elif kind == "override":
            event, hint = world.controller.apply(
                Command(cmd["appliance"], cmd["property"], cmd["value"], OVERRIDE), t
            )
            result = {"prior": event.prior}
            if hint is not None:
                person = world.home.factors.get(hint.person)
                if isinstance(person, model.Person):
                    reasoning.cbr_retain(
                        world.casebase,
                        reasoning.Case(
                            world.signature_of(person),
                            reasoning.CaseAction(hint.appliance, hint.prop, hint.value),
                            t,
                        ),
                    )
        elif kind == "report_error":
            # plumbing for gateway-side failures (e.g. weather provider)
            events.append(
                TraceEvent(
                    t,
                    STAGE_COMMANDS,
                    "error",
                    {
                        "code": str(cmd.get("code", "error")),
                        "detail": str(cmd.get("detail", "")),
                        "origin": origin,
                    },
                )
            )
            return
        elif kind in ("step", "set_speed", "pause", "resume", "subscribe"):
            raise SpecError(f"gateway control message {kind} cannot be scheduled")
        else:
            raise SpecError(f"unknown command type {kind!r}")
    except KeyError as missing:
        events.append(
            TraceEvent(
                t,
                STAGE_COMMANDS,
                "error",
                {"code": "bad_command", "detail": f"missing field {missing}", "command": cmd, "origin": origin},
            )
        )
        return
    except SimError as err:
        events.append(
            TraceEvent(
                t,
                STAGE_COMMANDS,
                "error",
                {"code": err.code, "detail": str(err), "command": cmd, "origin": origin},
            )
        )
        return
    events.append(
        TraceEvent(
            t,
            STAGE_COMMANDS,
            "command_applied",
            {"origin": origin, "command": cmd, "result": result},
        )
    )


def _conditions_json(c) -> dict:
    return {"temperature": c.temperature, "humidity": c.humidity, "illumination": c.illumination}


def _reading_json(r: sensors.SensorReading) -> dict:
    out = {"sensor": r.sensor, "kind": r.kind, "space": r.space}
    if r.person is not None:
        out["person"] = r.person
        out["position"] = [r.position[0], r.position[1]]
    else:
        out["value"] = r.value
    return out


def snapshot(world: World) -> dict:
    """Immutable full-state view with stable field order and 2-decimal
    numeric rounding; safe to hand across threads."""
    home = world.home
    spaces = []
    for s in sorted(home.spaces.values(), key=lambda s: s.id):
        row = {
            "id": s.id,
            "name": s.name,
            "parent": s.parent,
            "bounds": s.bounds.as_list(),
            "window_factor": s.window_factor,
        }
        if s.id in world.env.indoor:
            row["conditions"] = _conditions_json(world.env.indoor[s.id])
        spaces.append(row)
    factors = []
    for f in sorted(home.factors.values(), key=lambda f: f.id):
        row = {"id": f.id, "kind": f.kind, "space": f.space, "position": [f.position[0], f.position[1]]}
        if isinstance(f, model.Person):
            row["authenticated"] = f.authenticated
            row["activity"] = f.activity
            row["preferences"] = dict(sorted(f.preferences.items()))
        elif isinstance(f, model.Appliance):
            row["appliance_kind"] = f.appliance_kind
            if f.appliance_kind == model.GATE:
                row["open"] = f.open
            else:
                row["power"] = f.power
            if f.appliance_kind == model.AIR_CONDITIONER:
                row["mode"] = f.mode
                row["setpoint"] = f.setpoint
            if f.appliance_kind == model.TV:
                row["channel"] = f.channel
            if f.appliance_kind == model.LIGHT:
                row["lamp_lux"] = f.lamp_lux
        factors.append(row)
    return round2(
        {
            "tick": world.tick,
            "weather": world.env.kind,
            "spaces": spaces,
            "factors": factors,
            "facts": [f.as_json() for f in world.facts_prev.ordered()],
        }
    )


def snapshot_line(world: World) -> str:
    return json.dumps(snapshot(world), sort_keys=True, separators=(",", ":"))


def schedule_from_trace(events: list[TraceEvent]) -> list[ScheduledCommand]:
    """Extract the external command timeline (client and weather-provider
    commands, including ones that failed) so an interactive session replays
    headless with identical snapshots."""
    out: list[ScheduledCommand] = []
    for e in events:
        if e.stage != STAGE_COMMANDS:
            continue
        origin = e.payload.get("origin")
        if origin in (None, "schedule") or "command" not in e.payload:
            continue
        if e.kind in ("command_applied", "error"):
            out.append(ScheduledCommand(e.tick, e.payload["command"]))
    return out


def merge_schedules(
    client: list[ScheduledCommand], scenario: list[ScheduledCommand]
) -> list[ScheduledCommand]:
    """Replay ordering: within a tick, client-derived commands precede the
    scenario's own schedule, mirroring the engine's stage-1 order."""
    tagged = [(sc.at_tick, 0, i, sc) for i, sc in enumerate(client)]
    tagged += [(sc.at_tick, 1, i, sc) for i, sc in enumerate(scenario)]
    tagged.sort(key=lambda row: row[:3])
    return [sc for _, _, _, sc in tagged]
