"""Shared builders for the test suite."""

from __future__ import annotations

import random

import pytest

from homesim import model, scenario
from homesim.model import Appliance, Factor, Person, Rect, VirtualSpace


def canonical_world():
    return scenario.load_builtin("lee_autumn")


@pytest.fixture
def world():
    return canonical_world()


def small_home(with_factors: bool = True) -> model.HomeModel:
    """Root lot with an outside strip, hall, and living room; lee outside,
    tv and sofa in the living room."""
    spaces = [
        VirtualSpace("home", "Home", None, Rect(0, 0, 10, 8)),
        VirtualSpace("outside", "Outside", "home", Rect(0, 0, 2, 8)),
        VirtualSpace("hall", "Hall", "home", Rect(2, 4, 4, 8)),
        VirtualSpace("living_room", "Living room", "home", Rect(2, 0, 6, 4)),
    ]
    factors: list[Factor] = []
    if with_factors:
        factors = [
            Person("lee", model.PERSON, "outside", (1.0, 4.0)),
            Appliance("tv", model.APPLIANCE, "living_room", (4.5, 0.3), appliance_kind=model.TV),
            Factor("sofa", model.FURNITURE, "living_room", (3.0, 2.0)),
        ]
    return model.build_home(spaces, factors, {"lee": "1234"}, "outside")


def grid_home(rooms: int = 18, persons: int = 6, seed: int = 1) -> model.HomeModel:
    """Root + outside + `rooms` interior cells in a grid, sprinkled with
    factors of every kind. Used by the randomized conservation checks."""
    rng = random.Random(seed)
    cols = 6
    cell = 6.0
    width = 2.0 + cols * cell
    height = cell * ((rooms + cols - 1) // cols)
    spaces = [
        VirtualSpace("home", "Home", None, Rect(0, 0, width, height)),
        VirtualSpace("outside", "Outside", "home", Rect(0, 0, 2, height)),
    ]
    for i in range(rooms):
        r, c = divmod(i, cols)
        x0 = 2.0 + c * cell
        y0 = r * cell
        spaces.append(
            VirtualSpace(f"room_{i:02d}", f"Room {i}", "home", Rect(x0, y0, x0 + cell, y0 + cell))
        )
    factors: list[Factor] = []
    registry = {}
    for i in range(persons):
        room = spaces[2 + rng.randrange(rooms)]
        pos = (
            rng.uniform(room.bounds.x0, room.bounds.x1),
            rng.uniform(room.bounds.y0, room.bounds.y1),
        )
        factors.append(Person(f"p{i}", model.PERSON, room.id, pos))
        registry[f"p{i}"] = "pw"
    for i in range(persons, persons + 12):
        room = spaces[2 + rng.randrange(rooms)]
        pos = (
            rng.uniform(room.bounds.x0, room.bounds.x1),
            rng.uniform(room.bounds.y0, room.bounds.y1),
        )
        kind = rng.choice(
            [model.FURNITURE, model.ENVIRONMENT, model.APPLIANCE, model.APPLIANCE]
        )
        if kind == model.APPLIANCE:
            factors.append(
                Appliance(
                    f"a{i}",
                    kind,
                    room.id,
                    pos,
                    appliance_kind=rng.choice(list(model.APPLIANCE_KINDS)),
                )
            )
        else:
            factors.append(Factor(f"f{i}", kind, room.id, pos))
    return model.build_home(spaces, factors, registry, "outside")


ACCEPTANCE_LABELS = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    label = name.split("_")[1].upper() if name.startswith("test_a") else name
    outcome = "PASS" if report.passed else "FAIL"
    print(f"\n[acceptance] {label} {outcome}")
