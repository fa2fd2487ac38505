"""Adaptive attitude elicitation: three query-routing policies.

Runs uniform, ranking-proportional and uncertainty-greedy routing against
the same synthetic population at the same budget, and tracks how fast each
one drives down the support-estimation error.

Usage:
    python demos/demo_routing.py
"""

import numpy as np

from delib import (
    AttitudeMatrix,
    MixtureComponent,
    PopulationConfig,
    elicitation_ranking,
    estimate_support,
    generate_population,
    ground_truth,
    plan_ranking_proportional,
    plan_uncertainty,
    plan_uniform,
    sample_attitudes,
)


def build_world(seed):
    config = PopulationConfig(
        n0=80,
        approval_radius=2.2,
        mixture=(
            MixtureComponent(0.5, (-3.0, 0.0), 1.0),
            MixtureComponent(0.5, (3.0, 0.0), 1.0),
        ),
        seed=seed,
    )
    model = generate_population(config, seed)
    rng = np.random.default_rng(seed)
    matrix = AttitudeMatrix()
    for _ in range(80):
        matrix.add_participant()
    for j in range(20):
        author = int(rng.integers(80))
        model.spawn_idea(author, rng)
        matrix.add_idea(f"idea {j}", author)
    return model, matrix


def support_mae(matrix, truth):
    errors = [
        abs(estimate_support(matrix, p).mean - truth.support[p])
        for p in range(matrix.n_ideas)
    ]
    return float(np.mean(errors))


def run_policy(policy, rounds=12, budget=60, seed=3):
    model, matrix = build_world(seed)
    truth = ground_truth(model)
    curve = [support_mae(matrix, truth)]
    for round_index in range(1, rounds + 1):
        active = matrix.active_participants
        if policy == "uniform":
            plan = plan_uniform(matrix, active, budget, seed=round_index)
        elif policy == "ranking":
            ranking = elicitation_ranking(matrix)
            plan = plan_ranking_proportional(matrix, ranking, active, budget, seed=round_index)
        else:
            plan = plan_uncertainty(matrix, active, budget, seed=round_index)
        for (i, p), attitude in zip(plan.pairs, sample_attitudes(model, plan.pairs, round_index)):
            matrix.record_attitude(i, p, attitude, served=True)
        curve.append(support_mae(matrix, truth))
    return curve, matrix


def main():
    print("=" * 64)
    print("QUERY ROUTING (80 participants, 20 ideas, budget 60/round)")
    print("=" * 64)
    for policy in ("uniform", "ranking", "uncertainty"):
        curve, matrix = run_policy(policy)
        sparkline = " ".join(f"{value:.3f}" for value in curve[::3])
        print(f"  {policy:12s} MAE {sparkline}   final completion {matrix.completion_rate():.2f}")
    print("\nall policies converge; uncertainty-greedy attacks the widest intervals first")

    model, matrix = build_world(3)
    plan = plan_uncertainty(matrix, matrix.active_participants, 5, seed=1)
    print(f"\nfirst uncertainty plan (all intervals still [0, 1]): {list(plan.pairs)}")
    print("ties broke to the lowest idea ids, one query per idea")


if __name__ == "__main__":
    main()
