"""Virtual sensors: sample the simulated world each tick into typed readings."""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import model
from .environment import EnvironmentState
from .errors import SpecError

TEMPERATURE = "temperature"
HUMIDITY = "humidity"
LIGHT = "light"
LOCATION = "location"
PRESENCE = "presence"

SENSOR_KINDS = (TEMPERATURE, HUMIDITY, LIGHT, LOCATION, PRESENCE)

_SCALAR_FIELD = {TEMPERATURE: "temperature", HUMIDITY: "humidity", LIGHT: "illumination"}


@dataclass(frozen=True)
class SensorSpec:
    id: str
    kind: str
    space: str
    period: int = 1  # ticks between samples
    noise_sigma: float = 0.0  # stddev in the reading's unit

    def __post_init__(self) -> None:
        if self.kind not in SENSOR_KINDS:
            raise SpecError(f"unknown sensor kind {self.kind}")
        if self.period < 1:
            raise SpecError(f"sensor {self.id}: period must be >= 1")
        if self.noise_sigma < 0:
            raise SpecError(f"sensor {self.id}: noise_sigma must be >= 0")


@dataclass(frozen=True)
class SensorReading:
    sensor: str
    kind: str
    space: str
    tick: int
    value: float | bool | None = None
    person: str | None = None
    position: model.Point | None = None


def sample(
    specs: list[SensorSpec],
    home: model.HomeModel,
    env: EnvironmentState,
    tick: int,
    rng: random.Random,
) -> list[SensorReading]:
    """One reading per due sensor, ordered by (sensor id, subject).

    Scalar sensors report their space's indoor conditions (the outdoor
    conditions when placed outside) plus seeded Gaussian noise; at
    noise_sigma = 0 the PRNG is never consumed, so the output is a pure
    function of (world, tick). Location sensors report each person standing
    in their space; presence sensors report whether anyone does.
    """
    readings: list[SensorReading] = []
    persons = home.persons()
    for spec in sorted(specs, key=lambda s: s.id):
        if tick % spec.period != 0:
            continue
        if spec.kind in _SCALAR_FIELD:
            if spec.space == home.outside_id:
                source = env.outdoor
            elif spec.space in env.indoor:
                source = env.indoor[spec.space]
            else:
                continue  # space closed since the scenario was loaded
            value = float(getattr(source, _SCALAR_FIELD[spec.kind]))
            if spec.noise_sigma > 0:
                value += rng.gauss(0.0, spec.noise_sigma)
            readings.append(SensorReading(spec.id, spec.kind, spec.space, tick, value=value))
        elif spec.kind == LOCATION:
            for p in persons:
                if p.space == spec.space:
                    readings.append(
                        SensorReading(
                            spec.id, spec.kind, spec.space, tick,
                            person=p.id, position=p.position,
                        )
                    )
        elif spec.kind == PRESENCE:
            occupied = any(p.space == spec.space for p in persons)
            readings.append(SensorReading(spec.id, spec.kind, spec.space, tick, value=occupied))
    return readings
