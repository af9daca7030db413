"""Scenario documents: a single JSON file declaring the home, its factors,
sensors, rules, config, and a scheduled command timeline.

The packaged `lee_autumn` scenario is the normative example of the format.
Parsing failures raise ParseError naming the offending field; structural
violations surface as SpecError from the model builder.
"""

from __future__ import annotations

import json
from importlib import resources

from . import environment, model, reasoning, sensors
from .controller import HomeController
from .engine import ScheduledCommand, SimConfig, World, WORLD_COMMANDS
from .errors import ParseError
from .reasoning import (
    AllOffAction,
    ApplianceInSpace,
    Case,
    CaseAction,
    CaseBase,
    ChannelFor,
    Pattern,
    Rule,
    SetAction,
    Signature,
    Thresholds,
)


def load_scenario(text: str) -> World:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"scenario is not valid JSON: {err}") from err
    if not isinstance(doc, dict):
        raise ParseError("scenario must be a JSON object")

    spaces, outside_id = _parse_spaces(_require(doc, "spaces", list))
    factors, registry = _parse_factors(_require(doc, "factors", list))
    home = model.build_home(spaces, factors, registry, outside_id)

    config_doc = doc.get("config", {})
    if not isinstance(config_doc, dict):
        raise ParseError("config: must be an object")
    thresholds = _parse_thresholds(config_doc.get("thresholds", {}))
    config = SimConfig(
        seed=_int_field(config_doc, "seed", 0),
        start_time_of_day=config_doc.get("start_time_of_day", environment.EVENING),
        tick_seconds=_int_field(config_doc, "tick_seconds", 1),
        thresholds=thresholds,
    )

    env = _parse_environment(config_doc, home)
    specs = _parse_sensors(doc.get("sensors", []), home)
    rules = _parse_rules(doc.get("rules", []), home)
    schedule = _parse_schedule(doc.get("schedule", []))
    casebase = _parse_cases(doc.get("cases", []))

    controller = HomeController(
        home, lock_ticks=thresholds.override_lock_ticks, retain_window=thresholds.retain_window
    )
    return World(
        home=home,
        env=env,
        controller=controller,
        sensor_specs=specs,
        rules=rules,
        casebase=casebase,
        config=config,
        schedule=schedule,
    )


def load_scenario_file(path: str) -> World:
    with open(path, "r", encoding="utf-8") as fh:
        return load_scenario(fh.read())


def builtin_scenario_text(name: str = "lee_autumn") -> str:
    ref = resources.files("homesim").joinpath(f"scenarios/{name}.json")
    return ref.read_text(encoding="utf-8")


def load_builtin(name: str = "lee_autumn") -> World:
    return load_scenario(builtin_scenario_text(name))


# ---------------------------------------------------------------------------


def _require(doc: dict, key: str, kind: type):
    if key not in doc:
        raise ParseError(f"missing required section '{key}'")
    value = doc[key]
    if not isinstance(value, kind):
        raise ParseError(f"{key}: expected {kind.__name__}")
    return value


def _int_field(doc: dict, key: str, default: int) -> int:
    value = doc.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"config.{key}: expected an integer")
    return value


def _num(doc: dict, key: str, where: str) -> float:
    value = doc.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where}.{key}: expected a number")
    return float(value)


def _parse_spaces(rows: list) -> tuple[list[model.VirtualSpace], str]:
    spaces = []
    outside_id = None
    for i, row in enumerate(rows):
        where = f"spaces[{i}]"
        if not isinstance(row, dict) or "id" not in row:
            raise ParseError(f"{where}: expected an object with an 'id'")
        bounds = row.get("bounds")
        if not (isinstance(bounds, list) and len(bounds) == 4):
            raise ParseError(f"{where}.bounds: expected [x0, y0, x1, y1]")
        spaces.append(
            model.VirtualSpace(
                id=str(row["id"]),
                name=str(row.get("name", row["id"])),
                parent=row.get("parent"),
                bounds=model.Rect(*[float(v) for v in bounds]),
                window_factor=float(row.get("window_factor", 0.002)),
            )
        )
        if row.get("outside"):
            if outside_id is not None:
                raise ParseError(f"{where}: more than one space flagged outside")
            outside_id = str(row["id"])
    if outside_id is None:
        raise ParseError("spaces: exactly one space must be flagged \"outside\": true")
    return spaces, outside_id


def _parse_factors(rows: list) -> tuple[list[model.Factor], dict[str, str]]:
    factors: list[model.Factor] = []
    registry: dict[str, str] = {}
    for i, row in enumerate(rows):
        where = f"factors[{i}]"
        if not isinstance(row, dict) or "id" not in row or "kind" not in row:
            raise ParseError(f"{where}: expected an object with 'id' and 'kind'")
        kind = row["kind"]
        if kind not in model.FACTOR_KINDS:
            raise ParseError(f"{where}.kind: unknown factor kind {kind!r}")
        pos = row.get("position")
        if not (isinstance(pos, list) and len(pos) == 2):
            raise ParseError(f"{where}.position: expected [x, y]")
        fid, space = str(row["id"]), str(row.get("space", ""))
        position = (float(pos[0]), float(pos[1]))
        if kind == model.PERSON:
            prefs = row.get("preferences", {})
            if not isinstance(prefs, dict):
                raise ParseError(f"{where}.preferences: expected an object")
            factors.append(
                model.Person(fid, kind, space, position, preferences=dict(prefs))
            )
            if "credential" in row:
                registry[fid] = str(row["credential"])
        elif kind == model.APPLIANCE:
            akind = row.get("appliance")
            if akind not in model.APPLIANCE_KINDS:
                raise ParseError(f"{where}.appliance: unknown appliance kind {akind!r}")
            factors.append(
                model.Appliance(
                    fid,
                    kind,
                    space,
                    position,
                    appliance_kind=akind,
                    channel=row.get("channel"),
                    lamp_lux=float(row.get("lamp_lux", 300.0)),
                )
            )
        else:
            factors.append(model.Factor(fid, kind, space, position))
    return factors, registry


def _parse_environment(config_doc: dict, home: model.HomeModel) -> environment.EnvironmentState:
    kind = config_doc.get("weather", environment.CLOUDY)
    table = dict(environment.DEFAULT_WEATHER_TABLE)
    for name, row in config_doc.get("weather_table", {}).items():
        if name not in environment.WEATHER_KINDS:
            raise ParseError(f"config.weather_table: unknown weather kind {name!r}")
        table[name] = environment.OutdoorConditions(
            _num(row, "temperature", f"weather_table.{name}"),
            _num(row, "humidity", f"weather_table.{name}"),
            _num(row, "illumination", f"weather_table.{name}"),
        )
    if kind not in table:
        raise ParseError(f"config.weather: unknown weather kind {kind!r}")
    daylight = dict(environment.DEFAULT_DAYLIGHT)
    for bucket, mult in config_doc.get("daylight", {}).items():
        if bucket not in environment.TIME_BUCKETS:
            raise ParseError(f"config.daylight: unknown bucket {bucket!r}")
        daylight[bucket] = float(mult)
    env_doc = config_doc.get("env", {})
    params = environment.EnvParams(
        alpha_t=float(env_doc.get("alpha_t", 0.02)),
        alpha_h=float(env_doc.get("alpha_h", 0.01)),
        beta=float(env_doc.get("beta", 0.10)),
    )
    base = table[kind]
    indoor = {}
    overrides = config_doc.get("initial_indoor", {})
    for sid in home.spaces:
        if not home.is_interior(sid):
            continue
        row = overrides.get(sid, {})
        if not isinstance(row, dict):
            raise ParseError(f"config.initial_indoor.{sid}: expected an object")
        indoor[sid] = environment.IndoorConditions(
            temperature=float(row.get("temperature", base.temperature)),
            humidity=float(row.get("humidity", base.humidity)),
            illumination=0.0,  # recomputed instantaneously on the first tick
        )
    for sid in overrides:
        if sid not in indoor:
            raise ParseError(f"config.initial_indoor: {sid} is not an interior space")
    return environment.EnvironmentState(
        kind=kind, table=table, params=params, daylight=daylight, indoor=indoor
    )


def _parse_sensors(rows: list, home: model.HomeModel) -> list[sensors.SensorSpec]:
    specs = []
    seen = set()
    for i, row in enumerate(rows):
        where = f"sensors[{i}]"
        if not isinstance(row, dict):
            raise ParseError(f"{where}: expected an object")
        kind = row.get("kind")
        if kind not in sensors.SENSOR_KINDS:
            raise ParseError(f"{where}.kind: unknown sensor kind {kind!r}")
        space = str(row.get("space", ""))
        if space not in home.spaces or space == home.root_id:
            raise ParseError(f"{where}.space: {space!r} is not a sensed space")
        sid = str(row.get("id", ""))
        if not sid or sid in seen:
            raise ParseError(f"{where}.id: missing or duplicate sensor id")
        seen.add(sid)
        specs.append(
            sensors.SensorSpec(
                id=sid,
                kind=kind,
                space=space,
                period=int(row.get("period", 1)),
                noise_sigma=float(row.get("noise_sigma", 0.0)),
            )
        )
    return specs


def _parse_pattern(raw, where: str) -> Pattern:
    negated = False
    if isinstance(raw, dict):
        if set(raw) != {"not"}:
            raise ParseError(f"{where}: condition object may only contain 'not'")
        raw, negated = raw["not"], True
    if not (isinstance(raw, list) and len(raw) == 3):
        raise ParseError(f"{where}: expected [subject, predicate, object]")
    subject, predicate, obj = raw
    if predicate not in reasoning.PREDICATES:
        raise ParseError(f"{where}: unknown predicate {predicate!r}")
    if not isinstance(subject, str):
        raise ParseError(f"{where}: subject must be a string")
    if not isinstance(obj, (str, bool)):
        raise ParseError(f"{where}: object must be a string or boolean")
    return Pattern(subject, predicate, obj, negated=negated)


def _parse_action(raw, where: str, home: model.HomeModel):
    if not isinstance(raw, dict) or len(raw) != 1:
        raise ParseError(f"{where}: expected {{'set': ...}} or {{'all_off': true}}")
    if "all_off" in raw:
        return AllOffAction()
    if "set" not in raw:
        raise ParseError(f"{where}: unknown action {sorted(raw)}")
    body = raw["set"]
    target = body.get("appliance")
    if isinstance(target, dict):
        akind = target.get("kind")
        if akind not in model.APPLIANCE_KINDS:
            raise ParseError(f"{where}.appliance.kind: unknown appliance kind {akind!r}")
        target = ApplianceInSpace(akind, str(target.get("space", "")))
    elif isinstance(target, str):
        if not reasoning.is_var(target):
            a = home.factors.get(target)
            if not isinstance(a, model.Appliance):
                raise ParseError(f"{where}.appliance: {target!r} is not a declared appliance")
    else:
        raise ParseError(f"{where}.appliance: expected an id or a kind/space object")
    prop = body.get("property")
    if prop not in ("power", "mode", "setpoint", "channel", "open"):
        raise ParseError(f"{where}.property: unknown property {prop!r}")
    value = body.get("value")
    if isinstance(value, dict):
        if set(value) != {"channel_for"}:
            raise ParseError(f"{where}.value: unknown resolver {sorted(value)}")
        value = ChannelFor(str(value["channel_for"]))
    return SetAction(target, prop, value)


def _parse_rules(rows: list, home: model.HomeModel) -> list[Rule]:
    rules = []
    seen = set()
    for i, row in enumerate(rows):
        where = f"rules[{i}]"
        if not isinstance(row, dict) or "id" not in row:
            raise ParseError(f"{where}: expected an object with an 'id'")
        rid = str(row["id"])
        if rid in seen:
            raise ParseError(f"{where}.id: duplicate rule id {rid}")
        seen.add(rid)
        when = row.get("when")
        if not isinstance(when, list) or not when:
            raise ParseError(f"{where}.when: expected a non-empty list of conditions")
        then = row.get("then")
        if not isinstance(then, list) or not then:
            raise ParseError(f"{where}.then: expected a non-empty list of actions")
        conditions = tuple(
            _parse_pattern(c, f"{where}.when[{j}]") for j, c in enumerate(when)
        )
        actions = tuple(
            _parse_action(a, f"{where}.then[{j}]", home) for j, a in enumerate(then)
        )
        rules.append(Rule(rid, _int_field(row, "priority", 0), conditions, actions))
    return rules


def _parse_schedule(rows: list) -> list[ScheduledCommand]:
    out = []
    for i, row in enumerate(rows):
        where = f"schedule[{i}]"
        if not isinstance(row, dict) or "at" not in row or "do" not in row:
            raise ParseError(f"{where}: expected {{'at': tick, 'do': command}}")
        at = row["at"]
        if isinstance(at, bool) or not isinstance(at, int) or at < 0:
            raise ParseError(f"{where}.at: expected a tick >= 0")
        cmd = row["do"]
        if not isinstance(cmd, dict) or cmd.get("type") not in WORLD_COMMANDS:
            raise ParseError(
                f"{where}.do: command type must be one of {list(WORLD_COMMANDS)}"
            )
        out.append(ScheduledCommand(at, normalize_command(cmd)))
    return out


def normalize_command(cmd: dict) -> dict:
    """Canonicalize a world command: floats rounded to 2 decimals so the
    persisted trace replays to the exact same state."""
    out = {}
    for k, v in cmd.items():
        if isinstance(v, float):
            out[k] = round(v, 2)
        else:
            out[k] = v
    return out


def _parse_cases(rows: list) -> CaseBase:
    base = CaseBase()
    for i, row in enumerate(rows):
        where = f"cases[{i}]"
        if not isinstance(row, dict) or "signature" not in row or "action" not in row:
            raise ParseError(f"{where}: expected 'signature' and 'action'")
        sig, act = row["signature"], row["action"]
        try:
            case = Case(
                Signature(
                    str(sig["person"]),
                    sig.get("activity"),
                    str(sig["time_of_day"]),
                    str(sig["weather"]),
                ),
                CaseAction(str(act["appliance"]), str(act["property"]), act["value"]),
                int(row.get("retained_at", 0)),
            )
        except KeyError as missing:
            raise ParseError(f"{where}: missing field {missing}") from None
        reasoning.cbr_retain(base, case)
    return base


def _parse_thresholds(doc: dict) -> Thresholds:
    if not isinstance(doc, dict):
        raise ParseError("config.thresholds: expected an object")
    defaults = Thresholds()
    known = {
        "sit_radius": float,
        "sit_dwell": int,
        "dark_lux": float,
        "comfort_low": float,
        "comfort_high": float,
        "theta": float,
        "retain_window": int,
        "override_lock_ticks": int,
    }
    kwargs = {}
    for key, value in doc.items():
        if key not in known:
            raise ParseError(f"config.thresholds: unknown key {key!r}")
        kwargs[key] = known[key](value)
    return Thresholds(**{**{k: getattr(defaults, k) for k in known}, **kwargs})
