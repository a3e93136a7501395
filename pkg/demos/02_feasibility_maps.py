"""Feasible-direction analysis on the four built-in lane topologies.

Shows how the reachable range reacts to speed/limits and how the candidate
samples along the lane graph turn into a GT / Feasible / Infeasible partition.
"""

from motionkit import FeasibilityParams, HorizonConfig, enumerate_candidates, feasibility_set, reachable_range
from motionkit.synth import SynthSpec, TOPOLOGIES, gen_scenario

horizon = HorizonConfig()

print("reachable range (trapezoidal ramp, 15 km/h increase, 60 m cap):")
for v, limit in ((0.0, None), (5.0, None), (10.0, 36.0), (20.0, None), (0.0, 0.0)):
    label = f"v={v:5.1f} m/s, limit={limit}"
    print(f"  {label:28s} -> {reachable_range(v, limit):6.2f} m")

print("\nfeasibility per topology (ego drives straight at 10 m/s = 36 km/h):")
for topology in TOPOLOGIES:
    scenario, _ = gen_scenario(SynthSpec(kind="straight", speed=10.0), topology, horizon, topology=topology)
    candidates = enumerate_candidates(scenario)
    report = feasibility_set(scenario)
    print(f"  {topology:14s} candidates={len(candidates):3d}  gt={report.gt_direction.value:9s}"
          f"  feasible={sorted(d.value for d in report.feasible)}"
          f"  infeasible={sorted(d.value for d in report.infeasible)}")

print("\nthe stationary option flips exactly across the 65 km/h cap:")
for kmh in (60.0, 64.9, 65.0, 70.0):
    scenario, _ = gen_scenario(SynthSpec(kind="straight", speed=kmh / 3.6), "s", horizon, topology="single")
    report = feasibility_set(scenario)
    verdict = "feasible" if any(d.value == "Stationary" for d in report.feasible) else "infeasible"
    print(f"  {kmh:5.1f} km/h -> Stationary {verdict}")

print("\nwidening the range cap only ever adds options (monotonicity):")
scenario, _ = gen_scenario(SynthSpec(kind="straight", speed=10.0), "s", horizon, topology="u_loop")
for max_range in (20.0, 40.0, 60.0):
    report = feasibility_set(scenario, FeasibilityParams(max_range_m=max_range))
    print(f"  max_range={max_range:4.0f} m -> feasible={sorted(d.value for d in report.feasible)}")
