"""Command line entry point.

Exit codes: 0 success, 2 scenario error, 3 listen failure.
"""

from __future__ import annotations

import argparse
import random
import sys
from dataclasses import replace

from . import engine, scenario
from .errors import ParseError, SpecError, WeatherUnavailable
from .gateway import Gateway, WeatherProvider, fetch_weather


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="homesim",
        description="Deterministic interactive smart-home simulator.",
    )
    p.add_argument("--scenario", metavar="PATH", help="scenario JSON file (default: built-in lee_autumn)")
    p.add_argument("--headless", action="store_true", help="run without a server and write the trace")
    p.add_argument("--ticks", type=int, default=250, metavar="N", help="ticks to simulate headless (default 250)")
    p.add_argument("--seed", type=int, default=None, metavar="N", help="override the scenario seed")
    p.add_argument("--listen", default="127.0.0.1:8765", metavar="ADDR", help="host:port for the server (default 127.0.0.1:8765)")
    p.add_argument("--speed", type=float, default=10.0, metavar="TPS", help="ticks per wall-second (default 10)")
    p.add_argument("--weather", metavar="MODE", help="stub:<kind> or live:<region> weather provider")
    p.add_argument("--trace-out", metavar="PATH", help="trace log file (headless default: stdout; serve default: trace.ndjson)")
    return p


def _parse_weather(arg: str | None) -> WeatherProvider | None:
    if arg is None:
        return None
    mode, _, rest = arg.partition(":")
    if mode == "stub":
        return WeatherProvider(mode="stub", kind=rest or "cloudy")
    if mode == "live":
        return WeatherProvider(mode="live", region_code=rest or "KWANGJU")
    raise ParseError(f"--weather expects stub:<kind> or live:<region>, got {arg!r}")


def _parse_listen(arg: str) -> tuple[str, int]:
    host, _, port = arg.rpartition(":")
    if not host or not port.isdigit():
        raise ParseError(f"--listen expects host:port, got {arg!r}")
    return host, int(port)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.scenario:
            world = scenario.load_scenario_file(args.scenario)
        else:
            world = scenario.load_builtin()
        provider = _parse_weather(args.weather)
        listen = _parse_listen(args.listen)
    except (ParseError, SpecError, OSError) as err:
        print(f"homesim: scenario error: {err}", file=sys.stderr)
        return 2

    if args.seed is not None:
        world.config = replace(world.config, seed=args.seed)
        world.rng = random.Random(args.seed)

    if args.headless:
        if provider is not None:
            try:
                kind = fetch_weather(provider)
                world.schedule = engine.merge_schedules(
                    [engine.ScheduledCommand(0, {"type": "set_weather", "weather": kind})],
                    world.schedule,
                )
            except WeatherUnavailable as err:
                print(f"homesim: {err}; keeping scenario weather", file=sys.stderr)
        events = engine.run(world, max(args.ticks, 0))
        text = engine.serialize_trace(events)
        if args.trace_out:
            with open(args.trace_out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0

    gw = Gateway(
        world,
        listen[0],
        listen[1],
        tps=args.speed,
        trace_path=args.trace_out or "trace.ndjson",
        provider=provider,
    )
    try:
        host, port = gw.start()
    except OSError as err:
        print(f"homesim: cannot listen on {args.listen}: {err}", file=sys.stderr)
        return 3
    print(f"homesim: serving on {host}:{port} at {args.speed} ticks/s (Ctrl-C to stop)")
    try:
        while True:
            import time

            time.sleep(0.5)
    except KeyboardInterrupt:
        pass
    finally:
        gw.stop()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
