from pathlib import Path

import pytest

from routinemotifs.labeling import LabelSequence, RecencyLabel
from routinemotifs.sessions import Session, SessionVector


@pytest.fixture
def testdata() -> Path:
    return Path(__file__).resolve().parent.parent / "testdata"


def make_vector(performers, artifact="X", spacing=3600, start=0):
    """SessionVector with one single-edit session per performer entry."""
    sessions = []
    for i, performer in enumerate(performers):
        t = start + i * spacing
        sessions.append(
            Session(
                artifact_id=artifact,
                performer_id=performer,
                start=t,
                end=t,
                edit_count=1,
                size_total=None,
                ordinal=i + 1,
            )
        )
    return SessionVector(artifact_id=artifact, sessions=sessions)


def make_sequence(text, artifact="X"):
    return LabelSequence(artifact_id=artifact, labels=[RecencyLabel(ch) for ch in text])
