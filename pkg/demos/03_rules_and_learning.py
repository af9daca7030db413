# Edge-triggered rules and the case-based preference loop.
#
# Rules fire on the tick their condition set first becomes true, conflicts
# resolve per (appliance, property) by priority then rule id, and a manual
# override soon after a rule acted is retained as a case: the next time the
# same situation arises, the case wins over the static preference.
# Run: python demos/03_rules_and_learning.py

import homesim
from homesim import engine
from homesim.engine import ScheduledCommand

# -------- edge semantics on the canonical run --------
world = homesim.load_builtin("lee_autumn")
events = engine.run(world, 250)
fired = [(e.tick, e.payload["rule"]) for e in events if e.kind == "rule_fired"]
print("rule firings over 250 ticks (each edge exactly once):")
for tick, rule in fired:
    print(f"  tick {tick:3d}: {rule}")

# -------- the learning loop --------
# Lee's static favorite is channel 9; at tick 85 the operator overrides the
# TV to channel 11 while he is still on the sofa. That lands inside the
# retain window of rule R3 (which set the channel at tick 41), so a case
# (lee, sitting-on:sofa, evening, cloudy) -> channel 11 is retained.
world = homesim.load_builtin("lee_autumn")
override = ScheduledCommand(85, {"type": "override", "appliance": "tv",
                                 "property": "channel", "value": 11})
world.schedule = engine.merge_schedules([override], world.schedule)
world._schedule_pos = 0
engine.run(world, 250)

case = world.casebase.cases[0]
print(f"\nretained case: {case.signature} -> "
      f"{case.action.appliance}.{case.action.prop} = {case.action.value}")

# A fresh evening with the learned case base: the sofa rule now resolves to
# channel 11 instead of the static favorite 9.
relearned = homesim.load_builtin("lee_autumn")
relearned.casebase = world.casebase
replay = engine.run(relearned, 250)
channel_cmds = [e.payload for e in replay
                if e.kind == "command_applied"
                and e.payload.get("origin") == "rule"
                and e.payload.get("property") == "channel"]
print(f"fresh run, rule-set TV channel: {channel_cmds[0]['value']} (was 9 before learning)")
