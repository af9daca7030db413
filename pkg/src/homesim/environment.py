"""Outdoor weather and per-space indoor dynamics.

Outdoor conditions are a table lookup per weather kind with illumination
scaled by a time-of-day daylight multiplier. Indoor temperature and humidity
follow a first-order linear update per tick; illumination is recomputed
instantaneously from the window transmission and any lamps that are on.

Temperature update per space:

    T' = T + alpha_t * (T_out - T) + beta * u * (T_set - T)

with u = 1 only while the pull toward the setpoint has the sign the HVAC
mode allows: cooling only pulls down (T > T_set), heating only up
(T < T_set). Stability requires alpha_t + beta < 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import SpecError
from . import model

RAIN = "rain"
SNOW = "snow"
HOT = "hot"
CLOUDY = "cloudy"

WEATHER_KINDS = (RAIN, SNOW, HOT, CLOUDY)

MORNING = "morning"
AFTERNOON = "afternoon"
EVENING = "evening"
NIGHT = "night"

TIME_BUCKETS = (MORNING, AFTERNOON, EVENING, NIGHT)

# Second-of-day at which each bucket begins (6-hour buckets).
BUCKET_START_SECOND = {NIGHT: 0, MORNING: 6 * 3600, AFTERNOON: 12 * 3600, EVENING: 18 * 3600}

DEFAULT_DAYLIGHT = {MORNING: 0.8, AFTERNOON: 1.0, EVENING: 0.2, NIGHT: 0.0}


def bucket_at(second_of_day: int) -> str:
    s = second_of_day % 86400
    if s < 6 * 3600:
        return NIGHT
    if s < 12 * 3600:
        return MORNING
    if s < 18 * 3600:
        return AFTERNOON
    return EVENING


@dataclass(frozen=True)
class OutdoorConditions:
    temperature: float  # °C
    humidity: float  # % relative, in [0, 100]
    illumination: float  # lux, >= 0


@dataclass(frozen=True)
class IndoorConditions:
    temperature: float
    humidity: float
    illumination: float


# Baseline outdoor rows per weather kind (illumination is the full-daylight
# value before the time-of-day multiplier). Overridable in the scenario file.
DEFAULT_WEATHER_TABLE: dict[str, OutdoorConditions] = {
    HOT: OutdoorConditions(32.0, 60.0, 80000.0),
    RAIN: OutdoorConditions(18.0, 95.0, 10000.0),
    SNOW: OutdoorConditions(-2.0, 70.0, 20000.0),
    CLOUDY: OutdoorConditions(22.0, 65.0, 30000.0),
}


@dataclass(frozen=True)
class EnvParams:
    alpha_t: float = 0.02  # per-tick leakage toward outdoor temperature
    alpha_h: float = 0.01  # per-tick humidity leakage
    beta: float = 0.10  # per-tick HVAC pull toward setpoint

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha_t < 1.0 and 0.0 < self.alpha_h < 1.0 and 0.0 <= self.beta < 1.0):
            raise SpecError("environment rates must lie in (0, 1)")
        if self.alpha_t + self.beta >= 1.0:
            raise SpecError("stability requires alpha_t + beta < 1")


@dataclass
class EnvironmentState:
    kind: str
    table: dict[str, OutdoorConditions] = field(
        default_factory=lambda: dict(DEFAULT_WEATHER_TABLE)
    )
    params: EnvParams = field(default_factory=EnvParams)
    daylight: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_DAYLIGHT))
    outdoor: OutdoorConditions = OutdoorConditions(0.0, 0.0, 0.0)
    indoor: dict[str, IndoorConditions] = field(default_factory=dict)


def set_weather(env: EnvironmentState, kind: str) -> None:
    if kind not in env.table:
        raise SpecError(f"unknown weather kind {kind}")
    env.kind = kind


def outdoor_of(kind: str, table: dict[str, OutdoorConditions], daylight_mult: float) -> OutdoorConditions:
    row = table[kind]
    return replace(row, illumination=row.illumination * daylight_mult)


def hvac_pull(temperature: float, ac: model.Appliance) -> float:
    """Setpoint offset the unit is allowed to apply, 0 when gated off."""
    if not ac.power or ac.setpoint is None:
        return 0.0
    if ac.mode == "cool" and temperature > ac.setpoint:
        return ac.setpoint - temperature
    if ac.mode == "heat" and temperature < ac.setpoint:
        return ac.setpoint - temperature
    return 0.0


def step_space(
    cond: IndoorConditions,
    outdoor: OutdoorConditions,
    window_factor: float,
    acs: list[model.Appliance],
    lamps: list[model.Appliance],
    params: EnvParams,
) -> IndoorConditions:
    t = cond.temperature
    dt = params.alpha_t * (outdoor.temperature - t)
    for ac in acs:
        dt += params.beta * hvac_pull(t, ac)
    h = cond.humidity + params.alpha_h * (outdoor.humidity - cond.humidity)
    lux = window_factor * outdoor.illumination
    for lamp in lamps:
        if lamp.power:
            lux += lamp.lamp_lux
    return IndoorConditions(t + dt, h, lux)


def step_indoor(env: EnvironmentState, home: model.HomeModel, time_bucket: str) -> None:
    """Advance one tick: refresh outdoor from the active kind, then update
    every interior space from its own conditions and appliances."""
    env.outdoor = outdoor_of(env.kind, env.table, env.daylight[time_bucket])
    acs_by_space: dict[str, list[model.Appliance]] = {}
    lamps_by_space: dict[str, list[model.Appliance]] = {}
    for a in home.appliances():
        if a.appliance_kind == model.AIR_CONDITIONER:
            acs_by_space.setdefault(a.space, []).append(a)
        elif a.appliance_kind == model.LIGHT:
            lamps_by_space.setdefault(a.space, []).append(a)
    new: dict[str, IndoorConditions] = {}
    for sid in sorted(env.indoor):
        if sid not in home.spaces:
            continue  # space was closed; its conditions evaporate with it
        space = home.spaces[sid]
        new[sid] = step_space(
            env.indoor[sid],
            env.outdoor,
            space.window_factor,
            acs_by_space.get(sid, ()),
            lamps_by_space.get(sid, ()),
            env.params,
        )
    env.indoor = new


def fixed_point(params: EnvParams, t_out: float, t_set: float) -> float:
    """Closed-form equilibrium of the always-engaged HVAC update."""
    return (params.alpha_t * t_out + params.beta * t_set) / (params.alpha_t + params.beta)
