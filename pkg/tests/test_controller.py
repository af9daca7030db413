import pytest

from homesim import model
from homesim.controller import Command, HomeController
from homesim.errors import InvalidProperty, NotFound, UnknownPerson
from homesim.model import Appliance, Person, Rect, VirtualSpace


def build():
    spaces = [
        VirtualSpace("home", "Home", None, Rect(0, 0, 10, 8)),
        VirtualSpace("outside", "Outside", "home", Rect(0, 0, 2, 8)),
        VirtualSpace("living_room", "Living room", "home", Rect(2, 0, 6, 4)),
    ]
    factors = [
        Person("lee", model.PERSON, "outside", (1.0, 4.0), preferences={"favorite_channel": 9}),
        Appliance("gate", model.APPLIANCE, "living_room", (2.2, 1.0), appliance_kind=model.GATE),
        Appliance("tv", model.APPLIANCE, "living_room", (4.5, 0.3), appliance_kind=model.TV),
        Appliance("ac", model.APPLIANCE, "living_room", (5.5, 3.8), appliance_kind=model.AIR_CONDITIONER),
        Appliance("light_living", model.APPLIANCE, "living_room", (4.0, 3.8), appliance_kind=model.LIGHT),
    ]
    home = model.build_home(spaces, factors, {"lee": "1234"}, "outside")
    return home, HomeController(home, lock_ticks=300, retain_window=60)


def test_apply_power_then_channel():
    home, ctl = build()
    ctl.apply(Command("tv", "power", True, "script"), 1)
    ctl.apply(Command("tv", "channel", 9, "script"), 1)
    tv = home.factors["tv"]
    assert tv.power is True and tv.channel == 9


def test_apply_ac_cooling_setup():
    home, ctl = build()
    for prop, value in (("mode", "cool"), ("setpoint", 25), ("power", True)):
        ctl.apply(Command("ac", prop, value, "script"), 2)
    ac = home.factors["ac"]
    assert (ac.power, ac.mode, ac.setpoint) == (True, "cool", 25.0)


def test_invalid_property_for_kind():
    _, ctl = build()
    with pytest.raises(InvalidProperty):
        ctl.apply(Command("light_living", "channel", 7, "script"), 0)


def test_value_type_validation():
    _, ctl = build()
    with pytest.raises(InvalidProperty):
        ctl.apply(Command("tv", "power", "yes", "script"), 0)
    with pytest.raises(InvalidProperty):
        ctl.apply(Command("tv", "channel", 0, "script"), 0)
    with pytest.raises(InvalidProperty):
        ctl.apply(Command("tv", "channel", True, "script"), 0)
    with pytest.raises(InvalidProperty):
        ctl.apply(Command("ac", "mode", "dry", "script"), 0)


def test_unknown_appliance():
    _, ctl = build()
    with pytest.raises(NotFound):
        ctl.apply(Command("toaster", "power", True, "script"), 0)


def test_all_off_reports_only_changes():
    home, ctl = build()
    for a in ("tv", "ac", "light_living"):
        ctl.apply(Command(a, "power", True, "script"), 0)
    ctl.apply(Command("gate", "open", True, "script"), 0)
    events = ctl.all_off(1)
    assert len(events) == 3
    assert all(not a.power for a in home.appliances() if "power" in a.properties())
    assert home.factors["gate"].open is True  # gate untouched
    assert ctl.all_off(2) == []  # idempotent


def test_channel_memory_survives_power_cycle():
    home, ctl = build()
    ctl.apply(Command("tv", "power", True, "script"), 0)
    ctl.apply(Command("tv", "channel", 9, "script"), 0)
    ctl.all_off(1)
    ctl.apply(Command("tv", "power", True, "script"), 2)
    assert home.factors["tv"].channel == 9


def test_authenticate_permit_opens_gate():
    home, ctl = build()
    permit, events = ctl.authenticate("lee", "1234", 3)
    assert permit is True
    assert home.factors["lee"].authenticated is True
    assert home.factors["gate"].open is True
    assert [(e.appliance, e.prop, e.value) for e in events] == [("gate", "open", True)]


def test_authenticate_denied_changes_nothing():
    home, ctl = build()
    permit, events = ctl.authenticate("lee", "9999", 3)
    assert permit is False and events == []
    assert home.factors["lee"].authenticated is False
    assert home.factors["gate"].open is False


def test_authenticate_unknown_person():
    _, ctl = build()
    with pytest.raises(UnknownPerson):
        ctl.authenticate("ghost", "anything", 0)


def test_override_sets_lock_and_retain_hint_inside_window():
    _, ctl = build()
    ctl.apply(Command("tv", "channel", 9, "R3", person="lee"), 41, from_rule=True, rule_person="lee")
    _, hint = ctl.apply(Command("tv", "channel", 11, "override"), 85)
    assert hint is not None
    assert (hint.person, hint.appliance, hint.prop, hint.value) == ("lee", "tv", "channel", 11)
    assert ctl.active_locks(85) == {("tv", "channel"): 385}
    assert ctl.active_locks(385) == {}


def test_override_outside_window_does_not_retain():
    _, ctl = build()
    ctl.apply(Command("tv", "channel", 9, "R3", person="lee"), 10, from_rule=True, rule_person="lee")
    _, hint = ctl.apply(Command("tv", "channel", 11, "override"), 71)
    assert hint is None  # 61 ticks later: window is 60
    assert ctl.active_locks(71) != {}


def test_override_without_prior_rule_set_does_not_retain():
    _, ctl = build()
    _, hint = ctl.apply(Command("tv", "channel", 11, "override"), 5)
    assert hint is None


def test_audit_log_replay_reproduces_state():
    home, ctl = build()
    ctl.authenticate("lee", "1234", 0)
    ctl.apply(Command("tv", "power", True, "script"), 1)
    ctl.apply(Command("tv", "channel", 9, "R3"), 1, from_rule=True)
    ctl.apply(Command("ac", "mode", "cool", "script"), 2)
    ctl.apply(Command("ac", "power", True, "script"), 2)
    ctl.all_off(3)
    ctl.apply(Command("tv", "power", True, "override"), 4)

    fresh_home, fresh_ctl = build()
    fresh_home.factors["lee"].authenticated = True
    for e in ctl.audit_log:
        fresh_ctl.apply(Command(e.appliance, e.prop, e.value, e.origin), e.tick)
    for aid in ("gate", "tv", "ac", "light_living"):
        a, b = home.factors[aid], fresh_home.factors[aid]
        assert (a.power, a.mode, a.setpoint, a.channel, a.open) == (
            b.power, b.mode, b.setpoint, b.channel, b.open)
