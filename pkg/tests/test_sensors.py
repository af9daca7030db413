import random

from homesim import environment as env
from homesim import model, sensors

from conftest import small_home


def env_state(lux=60.0):
    state = env.EnvironmentState(kind=env.CLOUDY)
    state.outdoor = env.OutdoorConditions(22.0, 65.0, 6000.0)
    state.indoor = {
        "hall": env.IndoorConditions(22.0, 65.0, 10.0),
        "living_room": env.IndoorConditions(28.46, 60.0, lux),
    }
    return state


def specs():
    return [
        sensors.SensorSpec("temp_living", sensors.TEMPERATURE, "living_room"),
        sensors.SensorSpec("lux_living", sensors.LIGHT, "living_room"),
        sensors.SensorSpec("loc_living", sensors.LOCATION, "living_room"),
        sensors.SensorSpec("loc_outside", sensors.LOCATION, "outside"),
        sensors.SensorSpec("occ_living", sensors.PRESENCE, "living_room"),
    ]


def test_zero_noise_is_identity_passthrough():
    home = small_home()
    out = sensors.sample(specs(), home, env_state(), 0, random.Random(1))
    by_id = {r.sensor: r for r in out if r.kind != sensors.LOCATION}
    assert by_id["temp_living"].value == 28.46
    assert by_id["lux_living"].value == 60.0


def test_location_reports_each_person_in_space():
    home = small_home()
    home.factors["lee"].authenticated = True
    model.move_person(home, "lee", (3.3, 2.2))
    out = sensors.sample(specs(), home, env_state(), 0, random.Random(1))
    locs = [r for r in out if r.kind == sensors.LOCATION]
    assert len(locs) == 1
    assert locs[0].sensor == "loc_living"
    assert locs[0].person == "lee"
    assert locs[0].position == (3.3, 2.2)


def test_location_never_reports_person_elsewhere():
    home = small_home()  # lee is outside
    out = sensors.sample(specs(), home, env_state(), 0, random.Random(1))
    locs = [r for r in out if r.kind == sensors.LOCATION]
    assert [r.sensor for r in locs] == ["loc_outside"]


def test_presence_flag_tracks_occupancy():
    home = small_home()
    occupied = lambda: [
        r.value
        for r in sensors.sample(specs(), home, env_state(), 0, random.Random(1))
        if r.kind == sensors.PRESENCE
    ][0]
    assert occupied() is False
    home.factors["lee"].authenticated = True
    model.move_person(home, "lee", (3.3, 2.2))
    assert occupied() is True


def test_period_gates_sampling():
    home = small_home()
    spec = [sensors.SensorSpec("slow", sensors.TEMPERATURE, "living_room", period=5)]
    assert sensors.sample(spec, home, env_state(), 7, random.Random(1)) == []
    out = sensors.sample(spec, home, env_state(), 10, random.Random(1))
    assert len(out) == 1 and out[0].tick == 10


def test_output_is_sorted_and_repeatable():
    home = small_home()
    home.factors["lee"].authenticated = True
    model.move_person(home, "lee", (3.3, 2.2))
    a = sensors.sample(specs(), home, env_state(), 0, random.Random(1))
    b = sensors.sample(specs(), home, env_state(), 0, random.Random(99))
    assert a == b
    assert [r.sensor for r in a] == sorted(r.sensor for r in a)


def test_zero_noise_consumes_no_randomness():
    home = small_home()
    rng = random.Random(5)
    state_before = rng.getstate()
    sensors.sample(specs(), home, env_state(), 0, rng)
    assert rng.getstate() == state_before


def test_noise_is_seed_reproducible():
    home = small_home()
    spec = [sensors.SensorSpec("noisy", sensors.TEMPERATURE, "living_room", noise_sigma=0.5)]
    a = sensors.sample(spec, home, env_state(), 0, random.Random(7))[0].value
    b = sensors.sample(spec, home, env_state(), 0, random.Random(7))[0].value
    c = sensors.sample(spec, home, env_state(), 0, random.Random(8))[0].value
    assert a == b
    assert a != c
    assert a != 28.46


def test_outside_scalar_sensor_reads_outdoor_conditions():
    home = small_home()
    spec = [sensors.SensorSpec("temp_out", sensors.TEMPERATURE, "outside")]
    out = sensors.sample(spec, home, env_state(), 0, random.Random(1))
    assert out[0].value == 22.0
