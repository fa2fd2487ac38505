import json

import numpy as np
import pytest

from delib import (
    Attitude,
    AttitudeMatrix,
    FormatError,
    LoopConfig,
    MixtureComponent,
    ParameterError,
    PopulationConfig,
    ScoringKind,
    greedy_slate,
    proportional_ranking,
    run_loop,
)
from delib.dataio import (
    export_long_csv,
    export_results,
    export_wide_csv,
    fmt_float,
    import_long_csv,
    import_polis_long,
    import_wide_csv,
    write_timeline,
)

A, D, U = Attitude.APPROVE, Attitude.DISAPPROVE, Attitude.UNKNOWN


def random_matrix(rng, allow_empty=False):
    n = int(rng.integers(0 if allow_empty else 1, 7))
    m = int(rng.integers(1, 7))
    rows = [
        [int(rng.integers(0, 2)) if rng.random() < 0.6 else None for _ in range(m)]
        for _ in range(n)
    ]
    return AttitudeMatrix.from_dense(rows, texts=[f"idea {j}" for j in range(m)])


# -- wide format -----------------------------------------------------------------


def test_wide_import_example(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("p,a,b\n0,1,\n1,0,1\n")
    matrix, report = import_wide_csv(path)
    assert matrix.shape == (2, 2)
    assert matrix.get(0, 0) is A
    assert matrix.get(0, 1) is U
    assert matrix.get(1, 0) is D
    assert matrix.get(1, 1) is A
    assert report.cells_set == 3
    assert report.rows_read == 2
    assert [idea.text for idea in matrix.ideas] == ["a", "b"]


def test_wide_import_empty_data_section(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("p,a,b\n")
    matrix, report = import_wide_csv(path)
    assert matrix.shape == (0, 2)
    assert report.rows_read == 0


def test_wide_import_skips_bad_cells_with_location(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("p,a,b\n0,2,1\n")
    matrix, report = import_wide_csv(path)
    assert matrix.get(0, 0) is U
    assert matrix.get(0, 1) is A
    assert report.skipped == [(2, 2, "2", "unmapped value")]


def test_wide_import_rejects_duplicate_headers(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("p,a,a\n0,1,0\n")
    with pytest.raises(FormatError):
        import_wide_csv(path)


def test_wide_import_missing_file():
    with pytest.raises(FormatError):
        import_wide_csv("/nonexistent/nope.csv")


def test_import_totals_reconcile(tmp_path):
    rng = np.random.default_rng(0)
    for trial in range(20):
        matrix = random_matrix(rng)
        path = tmp_path / f"w{trial}.csv"
        export_wide_csv(matrix, path)
        loaded, report = import_wide_csv(path)
        n, m = loaded.shape
        unknown = sum(
            1 for i in range(n) for p in range(m) if loaded.get(i, p) is U
        )
        assert report.cells_set + report.cells_skipped + unknown == n * m


# -- long format -------------------------------------------------------------------


def test_long_round_trip_preserves_shape(tmp_path):
    matrix = AttitudeMatrix.from_dense([[None, None], [None, None]])
    path = tmp_path / "long.csv"
    export_long_csv(matrix, path)
    loaded, _ = import_long_csv(path)
    assert loaded.shape == (2, 2)
    assert loaded == matrix


def test_long_import_last_write_wins(tmp_path):
    path = tmp_path / "long.csv"
    path.write_text("participant,idea,value\n0,0,1\n0,0,0\n")
    matrix, _ = import_long_csv(path)
    assert matrix.get(0, 0) is D


def test_round_trips_random_matrices(tmp_path):
    rng = np.random.default_rng(1)
    for trial in range(150):
        matrix = random_matrix(rng, allow_empty=True)
        wide = tmp_path / "wide.csv"
        long = tmp_path / "long.csv"
        export_wide_csv(matrix, wide)
        export_long_csv(matrix, long)
        from_wide, _ = import_wide_csv(wide)
        from_long, _ = import_long_csv(long)
        assert from_wide == matrix
        if matrix.n_participants:
            assert from_long == matrix
        # idea texts survive the wide trip
        assert [i.text for i in from_wide.ideas] == [i.text for i in matrix.ideas]


# -- Polis ingestion ------------------------------------------------------------------


def test_polis_vote_mapping(tmp_path):
    path = tmp_path / "votes.csv"
    path.write_text("participant,comment,vote\n5,12,1\n")
    matrix, report = import_polis_long(path)
    assert matrix.shape == (1, 1)
    assert matrix.get(0, 0) is A
    assert report.cells_set == 1


def test_polis_last_write_wins(tmp_path):
    path = tmp_path / "votes.csv"
    path.write_text("participant,comment,vote\n5,12,1\n5,12,-1\n")
    matrix, _ = import_polis_long(path)
    assert matrix.get(0, 0) is D


def test_polis_pass_stays_unknown_and_is_counted(tmp_path):
    path = tmp_path / "votes.csv"
    path.write_text("participant,comment,vote\n1,2,0\n")
    matrix, report = import_polis_long(path)
    assert matrix.get(0, 0) is U
    assert report.passes == 1
    remapped, _ = import_polis_long(path, pass_as="disapprove")
    assert remapped.get(0, 0) is D


def test_polis_missing_columns(tmp_path):
    path = tmp_path / "votes.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(FormatError):
        import_polis_long(path)


def test_polis_dashed_headers(tmp_path):
    # "voter-id" contains "vote": the vote column must still resolve to "vote"
    path = tmp_path / "votes.csv"
    path.write_text("voter-id,comment-id,vote\n10,3,1\n10,4,-1\n11,4,1\n")
    matrix, report = import_polis_long(path)
    assert matrix.shape == (2, 2)
    assert report.cells_set == 3
    assert matrix.get(0, 0) is A
    assert matrix.get(0, 1) is D
    assert matrix.get(1, 1) is A


def test_polis_bad_pass_mapping(tmp_path):
    with pytest.raises(ParameterError):
        import_polis_long(tmp_path / "whatever.csv", pass_as="approve")


# -- result export ----------------------------------------------------------------------


def test_fmt_float_nine_significant_digits():
    assert fmt_float(1 / 3) == "0.333333333"
    assert fmt_float(2.0) == "2"
    assert fmt_float(1234567891.234) == "1.23456789e+09"


def test_export_matrix_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    matrix = random_matrix(rng)
    path = tmp_path / "matrix.csv"
    export_results(matrix, path, format="csv")
    loaded, _ = import_wide_csv(path)
    assert loaded == matrix


def test_export_slate_json_schema(tmp_path):
    matrix = AttitudeMatrix.from_dense([[1, 0], [1, 1]])
    slate = greedy_slate(matrix, 1, ScoringKind.HARMONIC)
    path = tmp_path / "slate.json"
    export_results(slate, path, format="json")
    payload = json.loads(path.read_text())
    assert set(payload) == {"ideas", "score", "rule", "k"}
    assert payload["rule"] == "harmonic"
    assert payload["ideas"] == [0]


def test_export_ranking_json(tmp_path):
    matrix = AttitudeMatrix.from_dense([[1, 0], [1, 1]])
    ranking = proportional_ranking(matrix)
    path = tmp_path / "rank.json"
    export_results(ranking, path, format="json")
    payload = json.loads(path.read_text())
    assert [row["idea"] for row in payload] == list(ranking.order)
    assert all("provenance" in row for row in payload)


def test_export_unknown_type_rejected(tmp_path):
    with pytest.raises(ParameterError):
        export_results(object(), tmp_path / "x.json")


def tiny_timeline():
    population = PopulationConfig(
        n0=6,
        approval_radius=3.0,
        mixture=(MixtureComponent(1.0, (0.0, 0.0), 1.0),),
        seed=1,
    )
    config = LoopConfig(
        population=population,
        rounds=3,
        query_budget_per_round=6,
        initial_ideas=3,
        slate_k=1,
        landscape_k=2,
        seed=2,
    )
    return run_loop(config)


def test_timeline_csv_row_count(tmp_path):
    timeline = tiny_timeline()
    write_timeline(timeline, tmp_path)
    lines = (tmp_path / "timeline.csv").read_text().strip().splitlines()
    from delib.loop import RoundMetrics

    assert len(lines) - 1 == len(timeline.rows) * len(RoundMetrics.METRIC_FIELDS)
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["rounds"] == 3
    long_lines = (tmp_path / "timeline_long.csv").read_text().strip().splitlines()
    assert len(long_lines) == len(lines)
    assert long_lines[0].startswith("policy,seed,round")
