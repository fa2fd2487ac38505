"""The full deliberation-support loop under churn and idea growth.

Every round: sampled authors contribute ideas, the routing policy plans
attitude queries and the synthetic population answers them, sense-making
(slates, rankings, landscape) runs on the partial matrix, and the results
are scored against the population's ground truth. Participants arrive and
depart between rounds.

Usage:
    python demos/demo_simulation.py
"""

from delib import LoopConfig, MixtureComponent, PopulationConfig, compare_policies

POPULATION = PopulationConfig(
    n0=120,
    approval_radius=3.0,
    mixture=(
        MixtureComponent(0.5, (-3.0, 0.0), 1.0),
        MixtureComponent(0.5, (3.0, 0.0), 1.0),
    ),
    noise_sigma=0.2,
    arrival_rate=2.0,
    departure_prob=0.01,
    idea_jitter=0.25,
    seed=11,
)

CONFIG = LoopConfig(
    population=POPULATION,
    rounds=15,
    query_budget_per_round=250,
    initial_ideas=20,
    ideas_per_round=2,
    slate_k=3,
    landscape_k=2,
    seed=11,
)


def main():
    print("=" * 72)
    print("DELIBERATION-SUPPORT LOOP (15 rounds, churn on, ideas arriving)")
    print("=" * 72)
    results = compare_policies(CONFIG, ["uniform", "ranking", "uncertainty"])
    for label, timeline in results:
        first, last = timeline.rows[0], timeline.rows[-1]
        print(f"\npolicy: {label}")
        print(f"  completion        {first.completion_rate:.3f} -> {last.completion_rate:.3f}")
        print(f"  support MAE       {first.support_mae:.4f} -> {last.support_mae:.4f}")
        print(f"  slate vs oracle   symmetric difference {first.slate_symmetric_difference} -> {last.slate_symmetric_difference}")
        print(f"  rank displacement {first.ranking_displacement:.2f} -> {last.ranking_displacement:.2f}")
        print(f"  bloc recovery     {first.cluster_recovery:.2f} -> {last.cluster_recovery:.2f}")
        print(f"  exposure gini     {first.exposure_gini:.3f} -> {last.exposure_gini:.3f}")
        if timeline.notes:
            print(f"  notes: {', '.join(timeline.notes)}")

    print("\nsame population and seed for every policy; only the routing differed")
    print("(response noise keeps the estimated slate from fully matching the")
    print("noise-free oracle even as the matrix fills in)")


if __name__ == "__main__":
    main()
