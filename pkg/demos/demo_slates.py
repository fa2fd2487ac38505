"""Representative slate selection on a small deliberation.

Builds an attitude matrix with a majority and a minority bloc, compares
harmonic and coverage slates, and audits slates for cohesive groups left
without any approved idea.

Usage:
    python demos/demo_slates.py
"""

from delib import (
    AttitudeMatrix,
    ScoringKind,
    Slate,
    exact_slate,
    greedy_slate,
    jr_audit,
    slate_score,
)

IDEAS = ["bike lanes", "night buses", "park benches", "street lights", "dog park", "car tunnel"]


def build_matrix():
    # 6 participants back street infrastructure, 4 care about the park,
    # 1 contrarian wants the tunnel nobody else approves of
    rows = (
        [[1, 1, 0, 1, 0, 0]] * 6
        + [[0, 0, 1, None, 1, 0]] * 4
        + [[0, None, 0, 0, 0, 1]]
    )
    return AttitudeMatrix.from_dense(rows, texts=IDEAS)


def show_slate(label, slate):
    names = sorted(IDEAS[p] for p in slate.ideas)
    print(f"  {label:28s} score {slate.score:7.3f}   {names}")


def main():
    matrix = build_matrix()
    print("=" * 64)
    print("REPRESENTATIVE SLATES (11 participants, 6 ideas)")
    print("=" * 64)
    print(f"completion rate: {matrix.completion_rate():.2f}\n")

    for k in (2, 3):
        print(f"slate size k = {k}")
        for kind in (ScoringKind.HARMONIC, ScoringKind.COVERAGE):
            greedy = greedy_slate(matrix, k, kind)
            exact = exact_slate(matrix, k, kind)
            show_slate(f"greedy {kind.value}", greedy)
            show_slate(f"exact  {kind.value}", exact)
            ratio = 1.0 if exact.score == 0 else greedy.score / exact.score
            print(f"  greedy/exact ratio: {ratio:.4f}")
        print()

    print("representation audit, k = 3 (a group of n/k = 3.67 may not be ignored)")
    good = exact_slate(matrix, 3, ScoringKind.HARMONIC)
    show_slate("harmonic optimum", good)
    if not jr_audit(matrix, good):
        print("  passes: no cohesive group of size >= n/k is unrepresented\n")

    majority_only = frozenset({0, 1, 3})
    bad = Slate(
        ideas=majority_only,
        target_k=3,
        score=slate_score(matrix, majority_only, ScoringKind.HARMONIC),
        kind=ScoringKind.HARMONIC,
    )
    show_slate("majority-only slate", bad)
    for violation in jr_audit(matrix, bad):
        names = sorted(IDEAS[p] for p in violation.witness_ideas)
        print(
            f"  violation: participants {sorted(violation.group)} "
            f"(share {violation.group_share:.2f}) commonly approve {names}"
        )


if __name__ == "__main__":
    main()
