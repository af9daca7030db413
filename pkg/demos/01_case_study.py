# Replay of the built-in "lee_autumn" scenario, narrated.
#
# An autumn evening: Lee authenticates at the gate, walks into the dark
# living room (light goes on, AC starts cooling the 29 °C room toward 25),
# sits on the sofa (TV turns on at his favorite channel), and later leaves
# (everything powers off). Run: python demos/01_case_study.py

import homesim
from homesim import engine

world = homesim.load_builtin("lee_autumn")
print(f"home: {sorted(world.home.spaces)}")
print(f"factors: {sorted(world.home.factors)}")
print(f"weather: {world.env.kind}, living room starts at "
      f"{world.env.indoor['living_room'].temperature:.2f} °C\n")

events = engine.run(world, 250)

# -------- what the rules did, in order --------
for e in events:
    if e.kind == "rule_fired":
        print(f"tick {e.tick:3d}  rule {e.payload['rule']} fired with {e.payload['binding']}")
    elif e.kind == "command_applied" and e.payload.get("origin") == "rule":
        p = e.payload
        print(f"tick {e.tick:3d}    -> {p['appliance']}.{p['property']} = {p['value']}")

# -------- the temperature story --------
temps = [e.payload["indoor"]["living_room"]["temperature"]
         for e in events if e.kind == "env_update"]
print("\nliving room temperature:")
for t in (0, 20, 30, 40, 60, 120, 249):
    print(f"  tick {t:3d}: {temps[t]:6.2f} °C")

snap = engine.snapshot(world)
states = {f["id"]: f.get("power", f.get("open")) for f in snap["factors"]
          if f["kind"] == "appliance"}
print(f"\nfinal appliance states: {states}")
print(f"TV channel memory: {next(f['channel'] for f in snap['factors'] if f['id'] == 'tv')}")
