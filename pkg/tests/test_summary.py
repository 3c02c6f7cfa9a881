import pytest

from routinemotifs.labeling import RecencyLabel, label_sessions
from routinemotifs.sessions import Session, SessionVector
from routinemotifs.summary import ConsistencyError, summarize_labels, write_summary_csv

from conftest import make_sequence, make_vector

H = 3600
D = 86400


def _session(performer, start, end, ordinal, size=None, artifact="X"):
    return Session(
        artifact_id=artifact,
        performer_id=performer,
        start=start,
        end=end,
        edit_count=1,
        size_total=size,
        ordinal=ordinal,
    )


@pytest.fixture
def hand_built():
    # Four sessions: U1, U2, U1 (label A after... no: U1,U2,U1 -> E,E,B), U3.
    sessions = [
        _session("U1", 0, 1 * H, 1, size=100),
        _session("U2", 2 * H, 2 * H, 2, size=-40),
        _session("U1", 4 * H, 5 * H, 3, size=None),
        _session("U1", 7 * H, 7 * H, 4, size=10),
    ]
    vec = SessionVector(artifact_id="X", sessions=sessions)
    seq = label_sessions(vec)
    assert seq.as_string() == "EEBA"
    return [vec], [seq]


def test_hand_built_means(hand_built):
    vectors, seqs = hand_built
    by_label = {s.label: s for s in summarize_labels(vectors, seqs)}

    e = by_label[RecencyLabel.E]
    assert e.count == 2
    assert e.fraction == pytest.approx(0.5)
    assert e.mean_size == pytest.approx((100 + 40) / 2)  # |size| by default
    assert e.mean_duration == pytest.approx(H / 2)
    # Only the second E has a preceding session: gap 2h - 1h = 1h.
    assert e.mean_gap_prev == pytest.approx(H)
    assert e.mean_gap_same is None

    b = by_label[RecencyLabel.B]
    assert b.count == 1
    # Preceding session (U2) ended at 2h, B starts at 4h.
    assert b.mean_gap_prev == pytest.approx(2 * H)
    # U1's own previous session ended at 1h.
    assert b.mean_gap_same == pytest.approx(3 * H)

    a = by_label[RecencyLabel.A]
    # For label A the previous session is the same performer's: gaps equal.
    assert a.mean_gap_prev == a.mean_gap_same == pytest.approx(2 * H)

    assert by_label[RecencyLabel.C].count == 0
    assert by_label[RecencyLabel.C].mean_gap_same is None


def test_signed_size_mode(hand_built):
    vectors, seqs = hand_built
    by_label = {s.label: s for s in summarize_labels(vectors, seqs, size_absolute=False)}
    assert by_label[RecencyLabel.E].mean_size == pytest.approx((100 - 40) / 2)


def test_counts_and_fractions_sum(hand_built):
    vectors, seqs = hand_built
    summaries = summarize_labels(vectors, seqs)
    assert sum(s.count for s in summaries) == 4
    assert sum(s.fraction for s in summaries) == pytest.approx(1.0, abs=1e-12)


def test_single_session_corpus():
    vec = make_vector(["U1"])
    seq = label_sessions(vec)
    by_label = {s.label: s for s in summarize_labels([vec], [seq])}
    e = by_label[RecencyLabel.E]
    assert e.count == 1
    assert e.mean_gap_prev is None
    assert e.mean_gap_same is None


def test_gap_same_equals_gap_prev_for_every_A_session():
    vec = make_vector(["U1", "U1", "U1", "U2", "U2"], spacing=7200)
    seq = label_sessions(vec)
    by_label = {s.label: s for s in summarize_labels([vec], [seq])}
    a = by_label[RecencyLabel.A]
    assert a.count == 3
    assert a.mean_gap_prev == a.mean_gap_same


def test_misaligned_inputs_rejected():
    vec = make_vector(["U1", "U2"])
    seq = make_sequence("E")
    with pytest.raises(ConsistencyError):
        summarize_labels([vec], [seq])
    with pytest.raises(ConsistencyError):
        summarize_labels([vec], [])


def test_csv_rendering(tmp_path):
    vec = make_vector(["U1", "U2", "U1"], spacing=D)
    seq = label_sessions(vec)
    out = tmp_path / "summary.csv"
    write_summary_csv(summarize_labels([vec], [seq]), out)
    lines = out.read_text().splitlines()
    assert lines[0].startswith("label,count,percent")
    assert len(lines) == 7  # header + six labels
    b_row = next(l for l in lines if l.startswith("B,"))
    # U1 returns after 2 days.
    assert ",2.0000" in b_row
