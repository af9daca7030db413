"""Context abstraction, edge-triggered rules, and case-based preferences.

Raw readings become (subject, predicate, object) facts; rules pattern-match
the fact set and fire only on the tick their condition set first becomes
satisfied; a small retrieve/retain case base resolves learned parameters
(currently the TV channel) with a weighted exact-match similarity.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields as dc_fields
from typing import Mapping

from . import model
from .controller import Command
from .errors import SchemaMismatch, SpecError
from .sensors import SensorReading, TEMPERATURE, LIGHT, LOCATION

LOCATED_IN = "located-in"
SITTING_ON = "sitting-on"
PRESENT = "present"
ABSENT = "absent"
ENTERED = "entered"
TEMP_BAND = "temp-band"
DARK = "dark"

PREDICATES = (LOCATED_IN, SITTING_ON, PRESENT, ABSENT, ENTERED, TEMP_BAND, DARK)

BAND_HOT = "hot"
BAND_COMFORT = "comfort"
BAND_COLD = "cold"

FactObject = str | bool


@dataclass(frozen=True)
class Fact:
    subject: str
    predicate: str
    object: FactObject

    def sort_key(self) -> tuple[str, str, str]:
        return (self.subject, self.predicate, str(self.object))

    def as_json(self) -> list:
        return [self.subject, self.predicate, self.object]


@dataclass(frozen=True)
class FactSet:
    facts: frozenset[Fact]
    tick: int

    def ordered(self) -> list[Fact]:
        cached = getattr(self, "_ordered", None)
        if cached is None:
            cached = sorted(self.facts, key=Fact.sort_key)
            object.__setattr__(self, "_ordered", cached)
        return cached

    def by_predicate(self, predicate: str) -> list[Fact]:
        cached = getattr(self, "_by_pred", None)
        if cached is None:
            cached = {}
            for fact in self.ordered():
                cached.setdefault(fact.predicate, []).append(fact)
            object.__setattr__(self, "_by_pred", cached)
        return cached.get(predicate, _NO_FACTS)

    def __contains__(self, fact: Fact) -> bool:
        return fact in self.facts


EMPTY_FACTS = FactSet(frozenset(), -1)
_NO_FACTS: list[Fact] = []


def is_var(term: object) -> bool:
    return isinstance(term, str) and term.startswith("?")


@dataclass(frozen=True)
class Pattern:
    """One rule condition; subject/object may be literals or ?variables.

    A negated pattern holds when no fact matches it; its variables bind
    nothing and act as wildcards unless bound by a positive condition.
    """

    subject: str
    predicate: str
    object: FactObject
    negated: bool = False

    def matches(self, fact: Fact, binding: Mapping[str, FactObject]) -> dict | None:
        if self.predicate != fact.predicate:
            return None
        out = dict(binding)
        for term, got in ((self.subject, fact.subject), (self.object, fact.object)):
            if is_var(term):
                bound = out.get(term)
                if bound is None:
                    out[term] = got
                elif bound != got:
                    return None
            elif term != got:
                return None
        return out


@dataclass(frozen=True)
class ApplianceInSpace:
    """Action target resolved at fire time: every appliance of `kind` located
    in the space a condition variable bound."""

    kind: str
    space: str  # literal space id or ?variable


@dataclass(frozen=True)
class ChannelFor:
    """Action value resolved through the preference/case-base channel lookup."""

    person: str  # ?variable bound to a person id


@dataclass(frozen=True)
class SetAction:
    appliance: str | ApplianceInSpace
    prop: str
    value: object  # literal or ChannelFor


@dataclass(frozen=True)
class AllOffAction:
    pass


Action = SetAction | AllOffAction


@dataclass(frozen=True)
class Rule:
    id: str
    priority: int
    conditions: tuple[Pattern, ...]
    actions: tuple[Action, ...]

    def __post_init__(self) -> None:
        if not self.conditions:
            raise SpecError(f"rule {self.id}: needs at least one condition")
        bound = {
            t
            for c in self.conditions
            if not c.negated
            for t in (c.subject, c.object)
            if is_var(t)
        }
        for a in self.actions:
            if isinstance(a, SetAction):
                used = set()
                if isinstance(a.appliance, ApplianceInSpace) and is_var(a.appliance.space):
                    used.add(a.appliance.space)
                if isinstance(a.value, ChannelFor):
                    used.add(a.value.person)
                loose = used - bound
                if loose:
                    raise SpecError(f"rule {self.id}: unbound action variables {sorted(loose)}")


def match_rule(rule: Rule, facts: FactSet) -> list[dict[str, FactObject]]:
    """All bindings under which every condition matches, in lexicographic
    order of the bound values."""
    bindings: list[dict[str, FactObject]] = [{}]
    for cond in rule.conditions:
        if cond.negated:
            continue
        candidates = facts.by_predicate(cond.predicate)
        nxt = []
        for b in bindings:
            for fact in candidates:
                out = cond.matches(fact, b)
                if out is not None:
                    nxt.append(out)
        bindings = nxt
        if not bindings:
            return []
    kept = []
    seen = set()
    for b in bindings:
        if not all(_negation_holds(c, b, facts) for c in rule.conditions if c.negated):
            continue
        key = tuple(sorted((k, str(v)) for k, v in b.items()))
        if key not in seen:
            seen.add(key)
            kept.append(b)
    kept.sort(key=lambda b: tuple(str(b[k]) for k in sorted(b)))
    return kept


def _negation_holds(cond: Pattern, binding: Mapping[str, FactObject], facts: FactSet) -> bool:
    probe = Pattern(cond.subject, cond.predicate, cond.object)
    return not any(
        probe.matches(f, binding) is not None for f in facts.by_predicate(cond.predicate)
    )


def holds(rule: Rule, binding: Mapping[str, FactObject], facts: FactSet) -> bool:
    """True when every condition is satisfied under the given binding."""
    for cond in rule.conditions:
        if cond.negated:
            if not _negation_holds(cond, binding, facts):
                return False
            continue
        if not any(
            cond.matches(f, binding) is not None for f in facts.by_predicate(cond.predicate)
        ):
            return False
    return True


def evaluate(
    rules: list[Rule],
    prev: FactSet,
    now: FactSet,
    override_locks: Mapping[tuple[str, str], int],
    appliances: list[model.Appliance],
    channel_resolver=None,
    persons: frozenset[str] = frozenset(),
) -> tuple[list[Command], list[Command], list[tuple[str, dict]]]:
    """Edge-triggered rule evaluation with conflict resolution.

    A (rule, binding) fires iff its conditions hold in `now` and did not all
    hold in `prev`. Per (appliance, property) the highest-priority command
    survives; ties go to the lexicographically smallest rule id, then to the
    smallest binding. Commands whose target is under an active override lock
    are dropped and reported separately.

    Returns (commands, dropped_by_lock, fired) with commands sorted by
    (appliance, property) and fired by (rule id, binding).
    """
    ids = [r.id for r in rules]
    if len(set(ids)) != len(ids):
        raise SpecError("rule ids must be unique")
    by_id = {a.id: a for a in appliances}
    fired: list[tuple[str, dict]] = []
    raw: list[tuple[int, str, tuple, Command]] = []  # (priority, rule id, binding key, command)
    for rule in sorted(rules, key=lambda r: r.id):
        for binding in match_rule(rule, now):
            if holds(rule, binding, prev):
                continue
            fired.append((rule.id, binding))
            bkey = tuple(str(binding[k]) for k in sorted(binding))
            for cmd in _expand(rule, binding, appliances, by_id, channel_resolver, persons):
                raw.append((rule.priority, rule.id, bkey, cmd))

    best: dict[tuple[str, str], tuple[int, str, tuple, Command]] = {}
    for prio, rid, bkey, cmd in raw:
        slot = (cmd.appliance, cmd.prop)
        cur = best.get(slot)
        if cur is None or (-prio, rid, bkey, str(cmd.value)) < (-cur[0], cur[1], cur[2], str(cur[3].value)):
            best[slot] = (prio, rid, bkey, cmd)

    kept: list[Command] = []
    dropped: list[Command] = []
    for slot in sorted(best):
        cmd = best[slot][3]
        lock = override_locks.get(slot)
        if lock is not None and now.tick < lock:
            dropped.append(cmd)
        else:
            kept.append(cmd)
    fired.sort(key=lambda fb: (fb[0], tuple(str(fb[1][k]) for k in sorted(fb[1]))))
    return kept, dropped, fired


def _expand(rule, binding, appliances, by_id, channel_resolver, persons) -> list[Command]:
    bound_person = next(
        (str(binding[k]) for k in sorted(binding) if str(binding[k]) in persons), None
    )
    out: list[Command] = []
    for action in rule.actions:
        if isinstance(action, AllOffAction):
            for a in appliances:
                if "power" in a.properties() and a.power:
                    out.append(Command(a.id, "power", False, rule.id, person=bound_person))
            continue
        targets: list[str] = []
        if isinstance(action.appliance, ApplianceInSpace):
            space = action.appliance.space
            if is_var(space):
                space = str(binding[space])
            targets = [
                a.id
                for a in appliances
                if a.appliance_kind == action.appliance.kind and a.space == space
            ]
        elif action.appliance in by_id:
            targets = [action.appliance]
        for t in sorted(targets):
            value = action.value
            person = bound_person
            if isinstance(value, ChannelFor):
                if channel_resolver is None:
                    continue
                person = str(binding[value.person])
                value = channel_resolver(person)
            out.append(Command(t, action.prop, value, rule.id, person=person))
    return out


# ---------------------------------------------------------------------------
# Case-based reasoning: retrieve/retain with weighted exact-match similarity.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    person: str
    activity: str | None
    time_of_day: str
    weather: str

    def as_dict(self) -> dict[str, object]:
        return {f.name: getattr(self, f.name) for f in dc_fields(self)}


@dataclass(frozen=True)
class CaseAction:
    appliance: str
    prop: str
    value: object


@dataclass(frozen=True)
class Case:
    signature: Signature
    action: CaseAction
    retained_at: int

    def sort_key(self) -> tuple:
        s = self.signature
        return (s.person, str(s.activity), s.time_of_day, s.weather,
                self.action.appliance, self.action.prop, str(self.action.value))


@dataclass
class CaseBase:
    cases: list[Case] = field(default_factory=list)


def similarity(a: Signature | Mapping, b: Signature | Mapping, weights: Mapping[str, float] | None = None) -> float:
    """Weighted fraction of matching features, in [0, 1]."""
    da = a.as_dict() if isinstance(a, Signature) else dict(a)
    db = b.as_dict() if isinstance(b, Signature) else dict(b)
    if set(da) != set(db):
        raise SchemaMismatch(f"signature schemas differ: {sorted(da)} vs {sorted(db)}")
    if weights is None:
        weights = {k: 1.0 for k in da}
    if set(weights) != set(da):
        raise SchemaMismatch("weights do not cover the signature schema")
    if any(w < 0 for w in weights.values()):
        raise SchemaMismatch("weights must be >= 0")
    total = sum(weights.values())
    if total == 0:
        raise SchemaMismatch("weights must not all be zero")
    return sum(w for k, w in weights.items() if da[k] == db[k]) / total


def cbr_retrieve(
    casebase: CaseBase,
    sig: Signature,
    theta: float,
    weights: Mapping[str, float] | None = None,
) -> Case | None:
    """Most similar case if its score clears theta; ties prefer the most
    recently retained case, then lexicographic case order."""
    best: Case | None = None
    best_key: tuple | None = None
    for case in casebase.cases:
        score = similarity(case.signature, sig, weights)
        key = (-score, -case.retained_at, case.sort_key())
        if best_key is None or key < best_key:
            best, best_key = case, key
    if best is None or -best_key[0] < theta:
        return None
    return best


def cbr_retain(casebase: CaseBase, case: Case) -> CaseBase:
    """Append a case; an existing case with the same signature is replaced."""
    casebase.cases = [c for c in casebase.cases if c.signature != case.signature]
    casebase.cases.append(case)
    return casebase


def resolve_channel(
    person: model.Person,
    sig: Signature,
    casebase: CaseBase,
    theta: float,
    weights: Mapping[str, float] | None = None,
) -> int:
    """Learned channel when a retained case clears theta, else the person's
    static favorite."""
    channels = CaseBase([c for c in casebase.cases if c.action.prop == "channel"])
    hit = cbr_retrieve(channels, sig, theta, weights)
    if hit is not None:
        return int(hit.action.value)  # type: ignore[arg-type]
    return person.favorite_channel


# ---------------------------------------------------------------------------
# Abstraction: readings -> high-level facts.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Thresholds:
    sit_radius: float = 0.6  # meters
    sit_dwell: int = 2  # consecutive in-radius samples
    dark_lux: float = 150.0
    comfort_low: float = 20.0
    comfort_high: float = 26.0
    theta: float = 0.75  # CBR retrieval threshold
    retain_window: int = 60  # ticks after a rule set a property
    override_lock_ticks: int = 300


def temp_band(t: float, th: Thresholds) -> str:
    if t > th.comfort_high:
        return BAND_HOT
    if t < th.comfort_low:
        return BAND_COLD
    return BAND_COMFORT


@dataclass
class AbstractionMemory:
    """Reading history the abstraction needs beyond the previous fact set:
    last known location per person, sit streaks, last scalar per space."""

    last_loc: dict[str, tuple[str, model.Point]] = field(default_factory=dict)
    streaks: dict[tuple[str, str], int] = field(default_factory=dict)
    last_temp: dict[str, float] = field(default_factory=dict)
    last_lux: dict[str, float] = field(default_factory=dict)


def abstract(
    readings: list[SensorReading],
    home: model.HomeModel,
    prev: FactSet,
    thresholds: Thresholds,
    memory: AbstractionMemory,
    tick: int,
) -> FactSet:
    """Derive the tick's fact set from readings plus retained history.

    located-in follows each person's most recent location reading; a person
    is present while that reading points at an interior space and absent
    otherwise (including persons never sensed). entered appears exactly on
    the rising edge of present. sitting-on(p, f) requires the last
    sit_dwell location samples of p within sit_radius of f's anchor; the
    streak persists across ticks without a reading for p. temp-band and dark
    are per sensed space, and the root space carries the band of the mean
    interior temperature.
    """
    temps: dict[str, list[float]] = {}
    luxes: dict[str, list[float]] = {}
    furniture = home.furniture()
    r2 = thresholds.sit_radius * thresholds.sit_radius
    for r in readings:
        if r.kind == LOCATION:
            memory.last_loc[r.person] = (r.space, r.position)
            px, py = r.position
            for f in furniture:
                dx, dy = px - f.position[0], py - f.position[1]
                key = (r.person, f.id)
                if dx * dx + dy * dy <= r2:
                    memory.streaks[key] = memory.streaks.get(key, 0) + 1
                else:
                    memory.streaks[key] = 0
        elif r.kind == TEMPERATURE:
            temps.setdefault(r.space, []).append(float(r.value))
        elif r.kind == LIGHT:
            luxes.setdefault(r.space, []).append(float(r.value))
    for space, vals in temps.items():
        memory.last_temp[space] = sum(vals) / len(vals)
    for space, vals in luxes.items():
        memory.last_lux[space] = sum(vals) / len(vals)

    facts: set[Fact] = set()
    root = home.root_id
    for p in home.persons():
        seen = memory.last_loc.get(p.id)
        if seen is None:
            facts.add(Fact(p.id, ABSENT, root))
            continue
        space = seen[0]
        facts.add(Fact(p.id, LOCATED_IN, space))
        if space != home.outside_id and space != root:
            facts.add(Fact(p.id, PRESENT, root))
            if Fact(p.id, PRESENT, root) not in prev:
                facts.add(Fact(p.id, ENTERED, root))
        else:
            facts.add(Fact(p.id, ABSENT, root))
    alive = {f.id for f in furniture}
    persons = {p.id for p in home.persons()}
    for (pid, fid), streak in memory.streaks.items():
        if streak >= thresholds.sit_dwell and fid in alive and pid in persons:
            facts.add(Fact(pid, SITTING_ON, fid))

    interior_temps = []
    for space, t in sorted(memory.last_temp.items()):
        if space not in home.spaces:
            continue
        facts.add(Fact(space, TEMP_BAND, temp_band(t, thresholds)))
        if home.is_interior(space):
            interior_temps.append(t)
    if interior_temps:
        mean = sum(interior_temps) / len(interior_temps)
        facts.add(Fact(root, TEMP_BAND, temp_band(mean, thresholds)))
    for space, lux in sorted(memory.last_lux.items()):
        if space in home.spaces and lux < thresholds.dark_lux:
            facts.add(Fact(space, DARK, True))
    return FactSet(frozenset(facts), tick)
