# The indoor climate model, stepped directly.
#
# Per tick: T' = T + alpha_t*(T_out - T) + beta*u*(T_set - T), where the
# HVAC gate u only engages when the pull has the sign the mode allows.
# With genuine cooling demand (T_out above the setpoint) the loop settles at
# the closed-form fixed point (alpha_t*T_out + beta*T_set)/(alpha_t + beta).
# Run: python demos/02_thermal_model.py

from homesim import environment as env
from homesim import model

params = env.EnvParams(alpha_t=0.02, alpha_h=0.01, beta=0.10)

print("weather table (full daylight):")
for kind in env.WEATHER_KINDS:
    row = env.DEFAULT_WEATHER_TABLE[kind]
    print(f"  {kind:7s} {row.temperature:6.1f} °C  {row.humidity:5.1f} %  {row.illumination:8.0f} lx")

# -------- a hot day, AC cooling toward 25 --------
ac = model.Appliance("ac", model.APPLIANCE, "room", (1, 1),
                     appliance_kind=model.AIR_CONDITIONER,
                     power=True, mode="cool", setpoint=25.0)
outdoor = env.outdoor_of(env.HOT, env.DEFAULT_WEATHER_TABLE, 1.0)
cond = env.IndoorConditions(temperature=33.0, humidity=55.0, illumination=0.0)

print(f"\ncooling from {cond.temperature} °C with outdoor {outdoor.temperature} °C:")
for t in range(1, 121):
    cond = env.step_space(cond, outdoor, 0.002, [ac], [], params)
    if t in (1, 5, 10, 20, 40, 80, 120):
        print(f"  tick {t:3d}: {cond.temperature:8.4f} °C")

t_star = env.fixed_point(params, outdoor.temperature, 25.0)
print(f"closed-form fixed point: {t_star:.4f} °C  "
      f"(simulated is {abs(cond.temperature - t_star):.2e} away)")

# -------- illumination is instantaneous, not integrated --------
lamp = model.Appliance("lamp", model.APPLIANCE, "room", (1, 1),
                       appliance_kind=model.LIGHT, power=False, lamp_lux=300.0)
evening = env.outdoor_of(env.CLOUDY, env.DEFAULT_WEATHER_TABLE, 0.2)
dark = env.step_space(cond, evening, 0.002, [], [lamp], params)
lamp.power = True
lit = env.step_space(cond, evening, 0.002, [], [lamp], params)
print(f"\ncloudy evening, window factor 0.002: {dark.illumination:.0f} lx dark, "
      f"{lit.illumination:.0f} lx with the lamp on")
