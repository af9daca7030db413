import random

import pytest

from homesim import model
from homesim.errors import (
    CannotCloseRoot,
    NotFound,
    OutOfBounds,
    SpecError,
    TargetIsClosing,
    Unauthorized,
)
from homesim.model import Factor, Person, Rect, VirtualSpace

from conftest import canonical_world, grid_home, small_home


def test_build_canonical_home():
    home = canonical_world().home
    assert home.root_id == "home"
    assert home.outside_id == "outside"
    named = {"outside", "hall", "living_room", "bedroom", "kitchen", "bathroom"}
    assert set(home.spaces) == named | {"home"}
    assert len(home.factors) == 6
    assert isinstance(home.factors["lee"], Person)
    assert home.factors["lee"].favorite_channel == 9
    home.check_invariants()


def test_build_minimal_home():
    spaces = [
        VirtualSpace("home", "Home", None, Rect(0, 0, 4, 4)),
        VirtualSpace("outside", "Outside", "home", Rect(0, 0, 1, 4)),
        VirtualSpace("room", "Room", "home", Rect(1, 0, 4, 4)),
    ]
    home = model.build_home(spaces, [], {}, "outside")
    assert len(home.spaces) == 3
    assert len(home.factors) == 0


def test_build_rejects_overlapping_siblings():
    spaces = [
        VirtualSpace("home", "Home", None, Rect(0, 0, 10, 8)),
        VirtualSpace("outside", "Outside", "home", Rect(0, 0, 2, 8)),
        VirtualSpace("bedroom", "Bedroom", "home", Rect(2, 0, 6, 4)),
        VirtualSpace("living_room", "Living", "home", Rect(5, 0, 9, 4)),
    ]
    with pytest.raises(SpecError, match="overlap"):
        model.build_home(spaces, [], {}, "outside")


def test_build_rejects_child_escaping_parent():
    spaces = [
        VirtualSpace("home", "Home", None, Rect(0, 0, 10, 8)),
        VirtualSpace("outside", "Outside", "home", Rect(0, 0, 2, 8)),
        VirtualSpace("room", "Room", "home", Rect(8, 0, 12, 4)),
    ]
    with pytest.raises(SpecError, match="escapes"):
        model.build_home(spaces, [], {}, "outside")


def test_build_rejects_dangling_references():
    spaces = [
        VirtualSpace("home", "Home", None, Rect(0, 0, 10, 8)),
        VirtualSpace("outside", "Outside", "home", Rect(0, 0, 2, 8)),
        VirtualSpace("room", "Room", "home", Rect(2, 0, 6, 4)),
    ]
    ghost = Factor("chair", model.FURNITURE, "attic", (3.0, 1.0))
    with pytest.raises(SpecError, match="missing space"):
        model.build_home(spaces, [ghost], {}, "outside")


def test_person_inside_at_build_is_authenticated():
    spaces = [
        VirtualSpace("home", "Home", None, Rect(0, 0, 10, 8)),
        VirtualSpace("outside", "Outside", "home", Rect(0, 0, 2, 8)),
        VirtualSpace("room", "Room", "home", Rect(2, 0, 6, 4)),
    ]
    inside = Person("anna", model.PERSON, "room", (3.0, 1.0))
    out = Person("lee", model.PERSON, "outside", (1.0, 1.0))
    home = model.build_home(spaces, [inside, out], {}, "outside")
    assert home.factors["anna"].authenticated is True
    assert home.factors["lee"].authenticated is False


# -- space_of_point ---------------------------------------------------------


def test_space_of_point_inside_living_room():
    home = small_home()
    assert model.space_of_point(home, (3.3, 2.2)) == "living_room"


def test_space_of_point_boundary_tie_is_lexicographic():
    home = small_home()
    # (3.0, 4.0) lies on the hall/living_room shared edge
    assert model.space_of_point(home, (3.0, 4.0)) == "hall"


def test_space_of_point_far_away_falls_back_to_outside():
    home = small_home()
    assert model.space_of_point(home, (-50.0, -50.0)) == "outside"


def test_space_of_point_prefers_deepest_space():
    spaces = [
        VirtualSpace("home", "Home", None, Rect(0, 0, 10, 8)),
        VirtualSpace("outside", "Outside", "home", Rect(0, 0, 2, 8)),
        VirtualSpace("suite", "Suite", "home", Rect(2, 0, 8, 8)),
        VirtualSpace("alcove", "Alcove", "suite", Rect(3, 1, 5, 3)),
    ]
    home = model.build_home(spaces, [], {}, "outside")
    assert model.space_of_point(home, (4.0, 2.0)) == "alcove"
    assert model.space_of_point(home, (6.0, 6.0)) == "suite"


# -- move_person -------------------------------------------------------------


def test_move_authenticated_person_into_living_room():
    home = small_home()
    home.factors["lee"].authenticated = True
    model.move_person(home, "lee", (3.3, 2.2))
    assert home.factors["lee"].space == "living_room"
    assert home.factors["lee"].position == (3.3, 2.2)


def test_move_unauthenticated_person_inside_is_rejected():
    home = small_home()
    with pytest.raises(Unauthorized):
        model.move_person(home, "lee", (3.0, 6.0))
    assert home.factors["lee"].space == "outside"


def test_identity_move_changes_nothing():
    home = small_home()
    before = (home.factors["lee"].space, home.factors["lee"].position)
    model.move_person(home, "lee", before[1])
    assert (home.factors["lee"].space, home.factors["lee"].position) == before


def test_move_to_nowhere_is_out_of_bounds():
    home = small_home()
    with pytest.raises(OutOfBounds):
        model.move_person(home, "lee", (-50.0, -50.0))


def test_move_back_outside_resets_authentication():
    home = small_home()
    lee = home.factors["lee"]
    lee.authenticated = True
    model.move_person(home, "lee", (3.3, 2.2))
    model.move_person(home, "lee", (1.0, 1.0))
    assert lee.space == "outside"
    assert lee.authenticated is False


def test_move_unknown_person():
    with pytest.raises(NotFound):
        model.move_person(small_home(), "ghost", (1.0, 1.0))


# -- close_space -------------------------------------------------------------


def test_close_space_relocates_factors():
    home = small_home()
    before = sorted(home.factors)
    model.close_space(home, "living_room", "hall")
    assert sorted(home.factors) == before
    assert home.factors["tv"].space == "hall"
    assert home.factors["sofa"].space == "hall"
    # positions clamped into the hall
    assert home.spaces["hall"].bounds.contains(home.factors["tv"].position)
    home.check_invariants()


def test_close_empty_space_only_shrinks_tree():
    home = small_home()
    n_spaces, n_factors = len(home.spaces), len(home.factors)
    model.close_space(home, "hall", "living_room")
    assert len(home.spaces) == n_spaces - 1
    assert len(home.factors) == n_factors
    with pytest.raises(NotFound):
        model.close_space(home, "hall", "living_room")


def test_close_root_and_outside_are_rejected():
    home = small_home()
    with pytest.raises(CannotCloseRoot):
        model.close_space(home, "home", "hall")
    with pytest.raises(CannotCloseRoot):
        model.close_space(home, "outside", "hall")


def test_close_into_itself_is_rejected():
    home = small_home()
    with pytest.raises(TargetIsClosing):
        model.close_space(home, "hall", "hall")


def test_close_reparents_child_spaces():
    spaces = [
        VirtualSpace("home", "Home", None, Rect(0, 0, 10, 8)),
        VirtualSpace("outside", "Outside", "home", Rect(0, 0, 2, 8)),
        VirtualSpace("suite", "Suite", "home", Rect(2, 0, 8, 8)),
        VirtualSpace("alcove", "Alcove", "suite", Rect(3, 1, 5, 3)),
    ]
    home = model.build_home(spaces, [], {}, "outside")
    model.close_space(home, "suite", "alcove")
    assert home.spaces["alcove"].parent == "home"
    home.check_invariants()


def test_close_relocation_to_outside_deauthenticates():
    home = small_home()
    lee = home.factors["lee"]
    lee.authenticated = True
    model.move_person(home, "lee", (3.3, 2.2))
    model.close_space(home, "living_room", "outside")
    assert lee.space == "outside"
    assert lee.authenticated is False


# -- conservation property ----------------------------------------------------


def test_random_operations_conserve_factors_and_containment():
    rng = random.Random(42)
    home = grid_home(rooms=12, persons=4, seed=3)
    for p in home.persons():
        p.authenticated = True
    ids = sorted(home.factors)
    for _ in range(300):
        closable = [s for s in home.spaces.values() if home.is_interior(s.id)]
        if rng.random() < 0.25 and len(closable) >= 2:
            victim = rng.choice(closable)
            target = rng.choice([s for s in home.spaces.values() if s.id != victim.id])
            model.close_space(home, victim.id, target.id)
        else:
            persons = home.persons()
            p = rng.choice(persons)
            space = rng.choice(list(home.spaces.values()))
            point = (
                rng.uniform(space.bounds.x0, space.bounds.x1),
                rng.uniform(space.bounds.y0, space.bounds.y1),
            )
            try:
                model.move_person(home, p.id, point)
            except (Unauthorized, OutOfBounds):
                pass  # rejected moves must leave the model untouched
        assert sorted(home.factors) == ids
        for f in home.factors.values():
            assert home.spaces[f.space].bounds.contains(f.position)
