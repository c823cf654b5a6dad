"""Hypothesis generation at scale: sweep every column and every (bucketed)
value, optimize each scenario, and print the impact-ranked action list.

This is the "I ran out of ideas, what does the data suggest?" mode.
"""

from whatif import EngineConfig, ObjectiveSpec, generate_hypotheses
from whatif.tabular import value_label

from sample_data import outage_dataset

dataset = outage_dataset()

config = EngineConfig(
    objective=ObjectiveSpec("restore_minutes", "mean", direction="minimize"),
    n_sample=20,
    iterations=12,
    master_seed=11,
    exclude_columns=["period"],  # time axis is not an actionable lever
)

events = []
result = generate_hypotheses(dataset, config, progress=events.append)

print(f"swept {len(events)} scenarios: {result.attempted} evaluated, "
      f"{len(result.skipped)} skipped\n")

print(f"{'rank':>4} {'scenario':<42} {'now':>6} {'-> x*':>6} "
      f"{'baseline':>9} {'projected':>10} {'impact':>8}")
for rec in result.recommendations:
    scenario = f"{rec.scenario.column} = {value_label(rec.scenario.value)}"
    print(f"{rec.rank:>4} {scenario:<42} {rec.current_fraction:>6.1%} "
          f"{rec.scenario.fraction:>6.1%} {rec.baseline_metric:>9.0f} "
          f"{rec.projected_metric:>10.0f} {rec.impact:>8.1%}")

if result.skipped:
    print("\nskipped scenarios:")
    for s in result.skipped:
        print(f"  {s.column}={s.value}: {s.reason}")

top = result.recommendations[0]
print(f"\ntop action: move '{value_label(top.scenario.value)}' in column "
      f"'{top.scenario.column}' from {top.current_fraction:.0%} to "
      f"{top.scenario.fraction:.0%} of rows; average "
      f"{config.objective.metric_column} is projected to change from "
      f"{top.baseline_metric:.0f} to {top.projected_metric:.0f}")
