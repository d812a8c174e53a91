"""Protocol and score file I/O, audio buffers and binary containers."""

from spoofeval.data.audio import AudioBuffer, read_wav, write_wav  # noqa: F401
from spoofeval.data.protocol import (  # noqa: F401
    TrialRecord,
    emit_protocol,
    parse_protocol,
    read_protocol,
    write_protocol,
)
from spoofeval.data.records import Key, ScoreKind, Subset  # noqa: F401
from spoofeval.data.scores import (  # noqa: F401
    JoinReport,
    ScoreRecord,
    ScoreSet,
    emit_scores,
    join,
    join_with_report,
    parse_scores,
    read_scores,
    write_scores,
)
