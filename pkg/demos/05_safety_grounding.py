"""Behavior classification plus guideline-book safety grounding.

The shipped guideline book covers 14 scenario types; each (type, behavior)
pair maps to a safe/unsafe verdict and a one-sentence instruction template.
"""

from motionkit import HorizonConfig, build_behavior_row, classify_behavior, load_default_guidelines
from motionkit.synth import SynthSpec, gen_scenario, gen_trajectory

horizon = HorizonConfig()
book = load_default_guidelines()

profiles = [
    ("parked the whole window", SynthSpec(kind="straight", speed=0.0)),
    ("braking to rest", SynthSpec(kind="stop", speed=10.0, rest_s=1.5)),
    ("waiting 2 s then pulling away", SynthSpec(kind="dwell_then_go", dwell_s=2.0, speed_end=8.0, speed=0.0)),
    ("gently slowing 12 -> 8 m/s", SynthSpec(kind="straight", speed=12.0, speed_end=8.0)),
    ("accelerating 8 -> 14 m/s", SynthSpec(kind="straight", speed=8.0, speed_end=14.0)),
    ("steady cruise", SynthSpec(kind="straight", speed=9.0)),
]

print("behavior labels:")
for name, spec in profiles:
    track, expected = gen_trajectory(spec, horizon)
    label = classify_behavior(track, horizon)
    print(f"  {name:34s} -> {label.value:20s} (expected {expected.behavior.value})")

print("\nsafety grounding in a 'waiting for pedestrian to cross' scene:")
for name, spec in (("staying put", profiles[0][1]), ("accelerating", profiles[4][1])):
    scenario, _ = gen_scenario(spec, name, horizon, scenario_type="waiting_for_pedestrian_to_cross")
    row = build_behavior_row(scenario, book)
    print(f"  {name:14s} -> {row.safety_tag.value:6s} | {row.caption_text}")

print("\nscenario types covered by the shipped book:")
for scenario_type in sorted(book.scenario_types):
    safe = sum(1 for (t, _), (s, _) in book.entries.items() if t == scenario_type and s.value == "Safe")
    print(f"  {scenario_type:38s} ({safe} safe / {8 - safe} unsafe behaviors)")
