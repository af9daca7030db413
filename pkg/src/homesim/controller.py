"""Appliance state owner: applies commands, arbitrates manual overrides,
and authenticates arrivals at the gate."""

from __future__ import annotations

from dataclasses import dataclass

from . import model
from .errors import InvalidProperty, NotFound, UnknownPerson

OVERRIDE = "override"


@dataclass(frozen=True)
class Command:
    appliance: str
    prop: str  # power | mode | setpoint | channel | open
    value: object
    origin: str  # rule id, "override", "script", or "authenticate:<person>"
    person: str | None = None  # person a rule binding served, for CBR retain


@dataclass(frozen=True)
class AuditEvent:
    tick: int
    appliance: str
    prop: str
    value: object
    prior: object
    origin: str


@dataclass(frozen=True)
class RetainHint:
    """An override landed within the retain window of a rule-set property;
    the engine turns this into a case-base retain."""

    person: str
    appliance: str
    prop: str
    value: object


def _coerce(appliance: model.Appliance, prop: str, value: object) -> object:
    if prop not in appliance.properties():
        raise InvalidProperty(f"{appliance.appliance_kind} {appliance.id} has no property {prop}")
    if prop in ("power", "open"):
        if not isinstance(value, bool):
            raise InvalidProperty(f"{prop} expects a boolean, got {value!r}")
        return value
    if prop == "mode":
        if value not in model.AC_MODES:
            raise InvalidProperty(f"mode expects one of {model.AC_MODES}, got {value!r}")
        return value
    if prop == "setpoint":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InvalidProperty(f"setpoint expects a number, got {value!r}")
        return float(value)
    if prop == "channel":
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise InvalidProperty(f"channel expects a positive integer, got {value!r}")
        return value
    raise InvalidProperty(f"unknown property {prop}")


class HomeController:
    """Single mutator of appliance state; everything it does is audited.

    Tracks, per (appliance, property): an optional manual-override lock and
    the last rule that set it, so an override landing within the retain
    window can feed the case base.
    """

    def __init__(self, home: model.HomeModel, lock_ticks: int = 300, retain_window: int = 60):
        self.home = home
        self.lock_ticks = lock_ticks
        self.retain_window = retain_window
        self.locks: dict[tuple[str, str], int] = {}  # -> expiry tick (exclusive)
        self.rule_set: dict[tuple[str, str], tuple[int, str, str | None]] = {}
        self.audit_log: list[AuditEvent] = []

    def active_locks(self, tick: int) -> dict[tuple[str, str], int]:
        return {k: v for k, v in self.locks.items() if tick < v}

    def apply(
        self,
        cmd: Command,
        tick: int,
        *,
        from_rule: bool = False,
        rule_person: str | None = None,
    ) -> tuple[AuditEvent, RetainHint | None]:
        a = self.home.factors.get(cmd.appliance)
        if not isinstance(a, model.Appliance):
            raise NotFound(f"appliance {cmd.appliance} not found")
        value = _coerce(a, cmd.prop, cmd.value)
        prior = getattr(a, "open" if cmd.prop == "open" else cmd.prop)
        setattr(a, "open" if cmd.prop == "open" else cmd.prop, value)
        event = AuditEvent(tick, cmd.appliance, cmd.prop, value, prior, cmd.origin)
        self.audit_log.append(event)

        hint: RetainHint | None = None
        slot = (cmd.appliance, cmd.prop)
        if cmd.origin == OVERRIDE:
            self.locks[slot] = tick + self.lock_ticks
            last = self.rule_set.get(slot)
            if last is not None:
                set_tick, _rule, person = last
                if person is not None and tick - set_tick <= self.retain_window:
                    hint = RetainHint(person, cmd.appliance, cmd.prop, value)
        elif from_rule:
            self.rule_set[slot] = (tick, cmd.origin, rule_person)
        return event, hint

    def all_off(self, tick: int, origin: str = "script") -> list[AuditEvent]:
        """Power off every appliance that is on; the gate's open state is
        not a power property and stays untouched. Idempotent."""
        events = []
        for a in self.home.appliances():
            if "power" in a.properties() and a.power:
                event, _ = self.apply(Command(a.id, "power", False, origin), tick)
                events.append(event)
        return events

    def authenticate(self, person_id: str, credential: str, tick: int) -> tuple[bool, list[AuditEvent]]:
        """Check a shared secret; a permit authenticates the person and opens
        the gate. Returns (permit, gate audit events)."""
        registry = self.home.auth_registry
        if person_id not in registry:
            raise UnknownPerson(f"{person_id} is not registered")
        person = self.home.factors.get(person_id)
        if not isinstance(person, model.Person):
            raise UnknownPerson(f"{person_id} is registered but absent from the home model")
        if registry[person_id] != credential:
            return False, []
        person.authenticated = True
        events = []
        for a in self.home.appliances():
            if a.appliance_kind == model.GATE and not a.open:
                event, _ = self.apply(Command(a.id, "open", True, f"authenticate:{person_id}"), tick)
                events.append(event)
        return True, events
