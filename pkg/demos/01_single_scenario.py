"""Evaluate a single hypothesis: what if severe-weather outages dropped to
1% of events; would restore times improve, and is the change significant?

Walks through the confirm/reject loop: pick a scenario, resample, compare
distributions, read the KS verdict and the potential gain.
"""

import numpy as np

from whatif import ObjectiveSpec, Scenario, compare, repeated_resample
from whatif.resample import pooled_metric_values
from whatif.tabular import current_fraction

from sample_data import describe, outage_dataset

dataset = outage_dataset()
print("== dataset ==")
describe(dataset)

objective = ObjectiveSpec("restore_minutes", "mean", direction="minimize")
cf = current_fraction(dataset, "cause", "severe weather")
print(f"\nsevere weather currently causes {cf:.1%} of outages")

# Hypothesis: invest in weather-resistant infrastructure until severe
# weather is only 1% of outages.
scenario = Scenario("cause", "severe weather", 0.01)
summary = repeated_resample(dataset, scenario, objective, n_sample=30,
                            master_seed=7)
print(f"what-if mean restore: {summary.metric_mean:.0f} "
      f"+- {summary.metric_std:.0f} minutes over 30 draws")

baseline = dataset.column("restore_minutes")
pooled = pooled_metric_values(dataset, scenario, "restore_minutes",
                              n_sample=30, master_seed=7)
report = compare(baseline, pooled, objective,
                 whatif_draw_metrics=summary.draw_metrics)

print(f"\nbaseline mean {report.baseline_stats['mean']:.0f} -> "
      f"what-if mean {report.whatif_stats['mean']:.0f}")
print(f"potential gain: {report.potential_gain:+.0f} minutes")
print(f"KS D = {report.ks_statistic:.3f}, p = {report.ks_p_value:.2e} "
      f"-> {'significant' if report.significant else 'not significant'}")

# The same comparison for vandalism -> 0%: a much smaller slice of the
# data, so expect a weaker verdict on customer impact.
vandalism = Scenario("cause", "vandalism", 0.0)
cust_obj = ObjectiveSpec("customers", "mean")
v_summary = repeated_resample(dataset, vandalism, cust_obj, 30, 7)
v_pooled = pooled_metric_values(dataset, vandalism, "customers", 30, 7)
v_report = compare(dataset.column("customers"), v_pooled, cust_obj,
                   whatif_draw_metrics=v_summary.draw_metrics)
print(f"\nvandalism -> 0%: customers-affected gain "
      f"{v_report.potential_gain:+.0f}, p = {v_report.ks_p_value:.3f} "
      f"-> {'significant' if v_report.significant else 'not significant'}")
