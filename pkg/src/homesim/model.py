"""The virtual home: a tree of spaces owning factors by aggregation.

Spaces form a tree rooted at the home lot. One child of the root is the
distinguished outdoor region; every other non-root space is "interior".
Factors (persons, appliances, furniture anchors, environment markers) each
live in exactly one space, and closing a space relocates its factors instead
of destroying them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    CannotCloseRoot,
    NotFound,
    OutOfBounds,
    SpecError,
    TargetIsClosing,
    Unauthorized,
)

Point = tuple[float, float]

PERSON = "person"
APPLIANCE = "appliance"
FURNITURE = "furniture"
ENVIRONMENT = "environment"

FACTOR_KINDS = (PERSON, APPLIANCE, FURNITURE, ENVIRONMENT)

LIGHT = "light"
AIR_CONDITIONER = "air_conditioner"
TV = "tv"
FAN = "fan"
CURTAIN = "curtain"
GATE = "gate"

APPLIANCE_KINDS = (LIGHT, AIR_CONDITIONER, TV, FAN, CURTAIN, GATE)

# Commandable properties per appliance kind. The gate opens and closes in
# place of powering on and off.
APPLIANCE_PROPERTIES: dict[str, tuple[str, ...]] = {
    LIGHT: ("power",),
    AIR_CONDITIONER: ("power", "mode", "setpoint"),
    TV: ("power", "channel"),
    FAN: ("power",),
    CURTAIN: ("power",),
    GATE: ("open",),
}

AC_MODES = ("cool", "heat")


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle in home-local meters, closed on all edges."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self) -> None:
        if self.x1 <= self.x0 or self.y1 <= self.y0:
            raise SpecError(f"degenerate bounds {self.as_list()}")

    def contains(self, p: Point) -> bool:
        return self.x0 <= p[0] <= self.x1 and self.y0 <= p[1] <= self.y1

    def contains_rect(self, other: "Rect") -> bool:
        return (
            self.x0 <= other.x0
            and self.y0 <= other.y0
            and other.x1 <= self.x1
            and other.y1 <= self.y1
        )

    def overlaps(self, other: "Rect") -> bool:
        # Shared edges between siblings are allowed; overlap means positive area.
        return (
            self.x0 < other.x1
            and other.x0 < self.x1
            and self.y0 < other.y1
            and other.y0 < self.y1
        )

    def clamp(self, p: Point) -> Point:
        return (
            min(max(p[0], self.x0), self.x1),
            min(max(p[1], self.y0), self.y1),
        )

    def as_list(self) -> list[float]:
        return [self.x0, self.y0, self.x1, self.y1]


@dataclass
class VirtualSpace:
    id: str
    name: str
    parent: str | None
    bounds: Rect
    window_factor: float = 0.002  # fraction of outdoor illumination admitted


@dataclass
class Factor:
    id: str
    kind: str
    space: str
    position: Point


@dataclass
class Person(Factor):
    authenticated: bool = False
    preferences: dict[str, object] = field(default_factory=dict)
    activity: str | None = None

    @property
    def favorite_channel(self) -> int:
        return int(self.preferences.get("favorite_channel", 1))


@dataclass
class Appliance(Factor):
    appliance_kind: str = LIGHT
    power: bool = False
    mode: str | None = None  # air conditioner: cool | heat
    setpoint: float | None = None  # °C, air conditioner only
    channel: int | None = None  # TV only; survives power cycles
    lamp_lux: float = 300.0  # contribution when a light is on
    open: bool = False  # gate only

    def properties(self) -> tuple[str, ...]:
        return APPLIANCE_PROPERTIES[self.appliance_kind]


@dataclass
class HomeModel:
    spaces: dict[str, VirtualSpace]
    factors: dict[str, Factor]
    auth_registry: dict[str, str]
    root_id: str
    outside_id: str
    _by_kind: dict | None = field(default=None, repr=False)

    def is_interior(self, space_id: str) -> bool:
        return space_id != self.root_id and space_id != self.outside_id

    def depth(self, space_id: str) -> int:
        d = 0
        cur = self.spaces[space_id]
        while cur.parent is not None:
            cur = self.spaces[cur.parent]
            d += 1
        return d

    def children(self, space_id: str) -> list[VirtualSpace]:
        return [s for s in self.spaces.values() if s.parent == space_id]

    def invalidate(self) -> None:
        """Drop the kind caches after changing factor membership. Factor
        membership only changes at build time; movement and space closure
        retag factors in place and keep the caches valid."""
        self._by_kind = None

    def _kinds(self) -> dict:
        if self._by_kind is None:
            self._by_kind = {
                "persons": sorted(
                    (f for f in self.factors.values() if isinstance(f, Person)),
                    key=lambda p: p.id,
                ),
                "appliances": sorted(
                    (f for f in self.factors.values() if isinstance(f, Appliance)),
                    key=lambda a: a.id,
                ),
                "furniture": sorted(
                    (f for f in self.factors.values() if f.kind == FURNITURE),
                    key=lambda f: f.id,
                ),
            }
        return self._by_kind

    def persons(self) -> list[Person]:
        return self._kinds()["persons"]

    def appliances(self) -> list[Appliance]:
        return self._kinds()["appliances"]

    def furniture(self) -> list[Factor]:
        return self._kinds()["furniture"]

    def check_invariants(self) -> None:
        """Raise SpecError on any structural violation. Used by tests."""
        validate_tree(list(self.spaces.values()), self.outside_id)
        for f in self.factors.values():
            if f.space not in self.spaces:
                raise SpecError(f"factor {f.id} references missing space {f.space}")
            if not self.spaces[f.space].bounds.contains(f.position):
                raise SpecError(f"factor {f.id} escapes bounds of {f.space}")
            if isinstance(f, Person) and self.is_interior(f.space) and not f.authenticated:
                raise SpecError(f"unauthenticated person {f.id} in interior space")


def validate_tree(spaces: list[VirtualSpace], outside_id: str) -> str:
    """Validate the space tree and return the root id."""
    by_id: dict[str, VirtualSpace] = {}
    for s in spaces:
        if s.id in by_id:
            raise SpecError(f"duplicate space id {s.id}")
        by_id[s.id] = s
    roots = [s for s in spaces if s.parent is None]
    if len(roots) != 1:
        raise SpecError(f"expected exactly one root space, found {len(roots)}")
    root = roots[0]
    if outside_id not in by_id:
        raise SpecError(f"outside space {outside_id} not declared")
    if by_id[outside_id].parent != root.id:
        raise SpecError("outside space must be a direct child of the root")
    interiors = [s for s in spaces if s.id != root.id and s.id != outside_id]
    if not interiors:
        raise SpecError("at least one interior space is required")
    for s in spaces:
        if s.parent is None:
            continue
        if s.parent not in by_id:
            raise SpecError(f"space {s.id} references missing parent {s.parent}")
        if not by_id[s.parent].bounds.contains_rect(s.bounds):
            raise SpecError(f"space {s.id} escapes parent {s.parent}")
    # acyclicity: every space must reach the root
    for s in spaces:
        seen = set()
        cur = s
        while cur.parent is not None:
            if cur.id in seen:
                raise SpecError(f"cycle through space {cur.id}")
            seen.add(cur.id)
            cur = by_id[cur.parent]
    # siblings must not overlap with positive area
    ordered = sorted(spaces, key=lambda s: s.id)
    for i, a in enumerate(ordered):
        for b in ordered[i + 1 :]:
            if a.parent == b.parent and a.parent is not None and a.bounds.overlaps(b.bounds):
                raise SpecError(f"sibling bounds overlap: {a.id} and {b.id}")
    return root.id


def build_home(
    spaces: list[VirtualSpace],
    factors: list[Factor],
    auth_registry: dict[str, str],
    outside_id: str,
) -> HomeModel:
    """Assemble and validate a HomeModel from declared spaces and factors.

    Persons declared in an interior space start authenticated (they are
    already home); persons outside start unauthenticated.
    """
    root_id = validate_tree(spaces, outside_id)
    home = HomeModel(
        spaces={s.id: s for s in spaces},
        factors={},
        auth_registry=dict(auth_registry),
        root_id=root_id,
        outside_id=outside_id,
    )
    for f in factors:
        if f.id in home.factors or f.id in home.spaces:
            raise SpecError(f"duplicate id {f.id}")
        if f.space not in home.spaces:
            raise SpecError(f"factor {f.id} references missing space {f.space}")
        if not home.spaces[f.space].bounds.contains(f.position):
            raise SpecError(f"factor {f.id} placed outside bounds of {f.space}")
        if isinstance(f, Person):
            f.authenticated = home.is_interior(f.space)
        home.factors[f.id] = f
    home.check_invariants()
    return home


def space_of_point(home: HomeModel, p: Point) -> str:
    """Deepest non-root space whose bounds contain p; outside as fallback.

    Boundary points shared by several candidates resolve to the deepest,
    then to the lexicographically smaller id, so the result is total and
    seed-independent.
    """
    best: VirtualSpace | None = None
    best_key: tuple[int, str] | None = None
    for s in home.spaces.values():
        if s.id == home.root_id:
            continue
        if not s.bounds.contains(p):
            continue
        key = (-home.depth(s.id), s.id)
        if best_key is None or key < best_key:
            best, best_key = s, key
    return best.id if best is not None else home.outside_id


def move_person(home: HomeModel, person_id: str, target: Point) -> HomeModel:
    """Teleport a person to target, updating their containing space.

    Entering any interior space from outside requires prior authentication;
    stepping back outside resets it.
    """
    f = home.factors.get(person_id)
    if not isinstance(f, Person):
        raise NotFound(f"person {person_id} not found")
    dest = space_of_point(home, target)
    if not home.spaces[dest].bounds.contains(target):
        raise OutOfBounds(f"point {target} lies outside every declared space")
    if f.space == home.outside_id and home.is_interior(dest) and not f.authenticated:
        raise Unauthorized(f"{person_id} must authenticate before entering {dest}")
    f.space = dest
    f.position = target
    if dest == home.outside_id:
        f.authenticated = False
    return home


def close_space(home: HomeModel, space_id: str, relocation_target: str) -> HomeModel:
    """Remove an interior space; its factors move to the relocation target.

    Aggregation, not composition: factors survive, positions clamped to the
    target's bounds. Child spaces are re-parented to the closed space's
    parent, which preserves nesting and sibling disjointness.
    """
    if space_id not in home.spaces:
        raise NotFound(f"space {space_id} not found")
    if not home.is_interior(space_id):
        raise CannotCloseRoot(f"space {space_id} is permanent (root/outside)")
    if relocation_target == space_id:
        raise TargetIsClosing(f"cannot relocate factors into closing space {space_id}")
    if relocation_target not in home.spaces:
        raise NotFound(f"relocation target {relocation_target} not found")

    closing = home.spaces[space_id]
    target = home.spaces[relocation_target]
    for child in home.children(space_id):
        child.parent = closing.parent
    for f in home.factors.values():
        if f.space != space_id:
            continue
        f.space = relocation_target
        f.position = target.bounds.clamp(f.position)
        if isinstance(f, Person) and relocation_target == home.outside_id:
            f.authenticated = False
    del home.spaces[space_id]
    return home
