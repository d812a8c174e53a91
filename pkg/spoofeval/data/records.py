"""Shared vocabulary of the text formats: trial keys, subsets and the line
tokenizer used by both the protocol and the score parsers."""

import re
from enum import Enum
from typing import IO, Iterator, List, Optional, Tuple, Union

from spoofeval.exceptions import ParseError

PLACEHOLDER = "-"
BONAFIDE_LABEL = "bonafide"

_SEPARATOR = re.compile(r"[ \t]+")


class Key(Enum):
    """Ground-truth key of a trial."""

    BONAFIDE = "bonafide"
    SPOOF = "spoof"
    TARGET = "target"
    NONTARGET = "nontarget"

    @property
    def is_spoof(self) -> bool:
        return self is Key.SPOOF


class ScoreKind(Enum):
    """Which system produced a score file."""

    CM = "cm"
    ASV = "asv"


KEY_DOMAIN = {
    ScoreKind.CM: frozenset({Key.BONAFIDE, Key.SPOOF}),
    ScoreKind.ASV: frozenset({Key.TARGET, Key.NONTARGET, Key.SPOOF}),
}


class Subset(Enum):
    TRAIN = "train"
    DEV = "dev"
    EVAL = "eval"


_SUBSET_MARKERS = {"T": Subset.TRAIN, "D": Subset.DEV, "E": Subset.EVAL}


def infer_subset(trial_id: str) -> Optional[Subset]:
    """Infer the partition from ids such as ``LA_E_100`` or ``PA_T_0001``."""
    parts = trial_id.split("_")
    if len(parts) >= 3:
        return _SUBSET_MARKERS.get(parts[1])
    return None


def parse_key(token: str, domain, line: int, source: Optional[str]) -> Key:
    try:
        key = Key(token)
    except ValueError:
        raise ParseError(f"unknown key '{token}'", line=line, source=source)
    if key not in domain:
        allowed = ", ".join(sorted(k.value for k in domain))
        raise ParseError(
            f"key '{token}' outside {{{allowed}}}", line=line, source=source
        )
    return key


def normalize_attack(
    attack: str, key: Key, line: int, source: Optional[str]
) -> str:
    """Enforce that only spoof trials carry an attack id.

    Bona fide, target and nontarget rows may write the placeholder ``-`` in
    the attack column; it is normalised to ``bonafide``.
    """
    if key.is_spoof:
        if attack in (PLACEHOLDER, BONAFIDE_LABEL):
            raise ParseError(
                f"spoof trial needs an attack id, got '{attack}'",
                line=line,
                source=source,
            )
        return attack
    if attack not in (PLACEHOLDER, BONAFIDE_LABEL):
        raise ParseError(
            f"{key.value} trial carries attack id '{attack}'", line=line, source=source
        )
    return BONAFIDE_LABEL


def read_text(text: Union[str, IO[str]]) -> str:
    if isinstance(text, str):
        return text
    return text.read()


def iter_fields(
    text: Union[str, IO[str]], n_fields: int, source: Optional[str] = None
) -> Iterator[Tuple[int, List[str]]]:
    """Yield ``(line_number, fields)`` for each data line.

    Lines split on LF with an optional trailing CR; fields split on runs of
    spaces/tabs. Blank lines and ``#`` comments are skipped.

    Raises:
        ParseError: when a data line does not have exactly ``n_fields`` fields
    """
    for number, line in enumerate(read_text(text).split("\n"), start=1):
        if line.endswith("\r"):
            line = line[:-1]
        stripped = line.strip(" \t")
        if not stripped or stripped.startswith("#"):
            continue
        fields = _SEPARATOR.split(stripped)
        if len(fields) != n_fields:
            raise ParseError(
                f"expected {n_fields} fields, found {len(fields)}",
                line=number,
                source=source,
            )
        yield number, fields
