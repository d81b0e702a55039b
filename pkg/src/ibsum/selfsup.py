"""Fine-tuning corpus construction and dataset statistics.

Each record is one line of plain text: source + delimiter + summary + end
token.  The default delimiter is " TL;DR: " (the surrounding spaces are part
of the delimiter and configurable) and the default end token matches the
remote scorer's end symbol, so the emitted file can be consumed directly by
an external language-model trainer.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .lm import END_TOKEN
from .textprep import TokenizedSentence, tokenize

logger = logging.getLogger(__name__)

DEFAULT_DELIMITER = " TL;DR: "


@dataclass(frozen=True)
class FinetunePair:
    source: str
    summary: str
    delimiter: str = DEFAULT_DELIMITER
    end_token: str = END_TOKEN

    def render(self) -> str:
        return f"{self.source}{self.delimiter}{self.summary}{self.end_token}"


def parse_record(
    line: str, delimiter: str = DEFAULT_DELIMITER, end_token: str = END_TOKEN
) -> tuple[str, str]:
    """Invert :meth:`FinetunePair.render`: split on the first delimiter, strip the end token."""
    if delimiter not in line:
        raise ValueError("record does not contain the delimiter")
    if not line.endswith(end_token):
        raise ValueError("record does not end with the end token")
    source, rest = line.split(delimiter, 1)
    return source, rest[: len(rest) - len(end_token)]


@dataclass(frozen=True)
class DatasetStats:
    n_pairs: int
    mean_compression_ratio: float
    abstractive_token_pct: float


def compression_ratio(source: str, summary: str) -> float:
    """Summary character length divided by source character length."""
    if not source:
        raise ValueError("empty source")
    return len(summary) / len(source)


def abstractive_token_pct(source: TokenizedSentence, summary: TokenizedSentence) -> float:
    """Percentage of summary tokens that never occur in the source (case-sensitive)."""
    if not summary.tokens:
        raise ValueError("empty summary")
    source_tokens = set(source.tokens)
    novel = sum(1 for tok in summary.tokens if tok not in source_tokens)
    return 100.0 * novel / len(summary.tokens)


def build_finetune_corpus(
    pairs: Sequence[tuple[str, str]],
    train_path: str | Path,
    heldout_path: str | Path,
    *,
    heldout: int,
    delimiter: str = DEFAULT_DELIMITER,
    end_token: str = END_TOKEN,
) -> DatasetStats:
    """Write train and held-out record files and return stats over both splits.

    The held-out split is the last ``heldout`` usable pairs in input order
    (deterministic, no seeding).  Pairs whose source contains the delimiter
    would make the record format ambiguous and are excluded with a warning,
    as are pairs containing newlines or an empty source.  A summary longer
    than its source is possible for non-extractive inputs and is flagged but
    kept.
    """
    if heldout < 0:
        raise ValueError("heldout must be >= 0")
    usable: list[tuple[str, str]] = []
    for index, (source, summary) in enumerate(pairs):
        if not source:
            logger.warning("pair %d: empty source, excluded", index)
            continue
        if delimiter in source:
            logger.warning("pair %d: source contains the delimiter, excluded", index)
            continue
        if "\n" in source or "\n" in summary:
            logger.warning("pair %d: embedded newline, excluded", index)
            continue
        if len(summary) > len(source):
            logger.warning("pair %d: summary longer than source", index)
        usable.append((source, summary))
    if heldout >= len(usable):
        raise ValueError("heldout must be smaller than the number of usable pairs")
    split = len(usable) - heldout
    _write_records(train_path, usable[:split], delimiter, end_token)
    _write_records(heldout_path, usable[split:], delimiter, end_token)
    return dataset_stats(usable)


def _write_records(
    path: str | Path, pairs: Iterable[tuple[str, str]], delimiter: str, end_token: str
) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for source, summary in pairs:
            handle.write(FinetunePair(source, summary, delimiter, end_token).render())
            handle.write("\n")


def dataset_stats(pairs: Sequence[tuple[str, str]]) -> DatasetStats:
    """Mean character-length compression ratio and mean abstractive-token %.

    Pairs with an empty summary contribute a compression ratio of 0 but are
    skipped in the abstractiveness mean, which is undefined for them.
    """
    ratios = [compression_ratio(src, summ) for src, summ in pairs]
    pcts = [
        abstractive_token_pct(tokenize(src), tokenize(summ))
        for src, summ in pairs
        if tokenize(summ).tokens
    ]
    return DatasetStats(
        n_pairs=len(pairs),
        mean_compression_ratio=math.fsum(ratios) / len(ratios) if ratios else 0.0,
        abstractive_token_pct=math.fsum(pcts) / len(pcts) if pcts else 0.0,
    )
