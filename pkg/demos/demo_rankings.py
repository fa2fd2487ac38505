"""Proportional versus elicitation-aware rankings.

Shows how the sequential harmonic ranking interleaves bloc ideas in
proportion to bloc sizes, and how the exploration bonus lets a fresh idea
with no exposure outrank an established favorite.

Usage:
    python demos/demo_rankings.py
"""

from delib import (
    Attitude,
    AttitudeMatrix,
    ElicitationWeights,
    elicitation_ranking,
    proportional_ranking,
)


def main():
    print("=" * 64)
    print("PROPORTIONAL RANKING (two blocs, 2:1)")
    print("=" * 64)
    # 8 participants approve ideas 0..3, 4 participants approve ideas 4..7
    rows = [[1, 1, 1, 1, 0, 0, 0, 0]] * 8 + [[0, 0, 0, 0, 1, 1, 1, 1]] * 4
    matrix = AttitudeMatrix.from_dense(rows)
    ranking = proportional_ranking(matrix)
    for position, (idea, gain) in enumerate(zip(ranking.order, ranking.provenance), start=1):
        bloc = "majority" if idea < 4 else "minority"
        print(f"  {position}. idea {idea} ({bloc:8s})  marginal gain {gain:6.3f}")
    top6 = ranking.order[:6]
    print(f"top 6 split: {sum(1 for p in top6 if p < 4)} majority / {sum(1 for p in top6 if p >= 4)} minority\n")

    print("=" * 64)
    print("ELICITATION RANKING (exploration bonus)")
    print("=" * 64)
    fresh = AttitudeMatrix()
    for _ in range(10):
        fresh.add_participant()
    fresh.add_idea("old favorite", 0)
    fresh.add_idea("new arrival", 1)
    # the favorite has been shown a lot and is well liked
    for i in range(10):
        fresh.record_attitude(i, 0, Attitude.APPROVE if i < 8 else Attitude.DISAPPROVE, served=True)
    for _ in range(40):
        fresh.note_exposure(0)

    for c_explore in (0.0, 1.0):
        weights = ElicitationWeights(c_explore=c_explore)
        ranking = elicitation_ranking(fresh, weights)
        order = [fresh.ideas[p].text for p in ranking.order]
        print(f"  c_explore = {c_explore:3.1f}: {order[0]} first  (priorities "
              f"{[round(v, 3) for v in ranking.provenance]})")
    print("\nwith exploration on, the unexposed idea takes the top slot")


if __name__ == "__main__":
    main()
