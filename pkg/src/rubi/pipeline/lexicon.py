"""Bilingual dictionaries: loading, splitting by frequency and writing."""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional

from ..embeddings import EmbeddingSpace
from ..errors import InputError

logger = logging.getLogger(__name__)

_LANG_PAIR = re.compile(r"^([A-Za-z]+)-([A-Za-z]+)")


@dataclass(frozen=True)
class DictionaryReport:
    """Line counts gathered while parsing a dictionary file."""

    lines_read: int = 0
    pairs: int = 0
    duplicates: int = 0
    malformed: int = 0


@dataclass(frozen=True)
class Lexicon:
    """Multimap from source tokens to their set of translations.

    Keys keep the order in which they were first seen.
    """

    entries: Mapping[str, frozenset[str]]
    source_lang: str = ""
    target_lang: str = ""
    report: Optional[DictionaryReport] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        entries: dict[str, frozenset[str]] = {}
        for source, targets in self.entries.items():
            targets = frozenset(targets)
            if not source:
                raise InputError("dictionary contains an empty source token")
            if not targets:
                raise InputError(f"no translations for {source!r}")
            if any(not t for t in targets):
                raise InputError(f"empty translation for {source!r}")
            entries[source] = targets
        object.__setattr__(self, "entries", entries)

    def translations(self, word: str) -> frozenset[str]:
        """Gold translations of ``word``; empty when the word is not a key."""
        return self.entries.get(word, frozenset())

    def __contains__(self, word: object) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[str]:
        return iter(self.entries)

    @property
    def sources(self) -> tuple[str, ...]:
        return tuple(self.entries)

    def pairs(self) -> Iterator[tuple[str, str]]:
        """Every (source, target) pair, targets in sorted order."""
        for source, targets in self.entries.items():
            for target in sorted(targets):
                yield source, target

    def restrict(self, keys: Iterable[str]) -> "Lexicon":
        """Sub-lexicon over ``keys`` (in the given order); unknown keys are ignored."""
        return Lexicon(
            {k: self.entries[k] for k in keys if k in self.entries},
            self.source_lang,
            self.target_lang,
        )


def _langs_from_name(path: Path) -> tuple[str, str]:
    match = _LANG_PAIR.match(path.name)
    return (match.group(1), match.group(2)) if match else ("", "")


def load_dictionary(
    path: Path | str,
    source_lang: Optional[str] = None,
    target_lang: Optional[str] = None,
) -> Lexicon:
    """Read a ``source target`` per line file; duplicates are merged.

    Language tags default to the ``xx-yy`` prefix of the file name.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read dictionary {path}: {exc}") from exc

    entries: dict[str, set[str]] = {}
    lines_read = pairs = duplicates = malformed = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        lines_read += 1
        parts = line.split()
        if len(parts) != 2:
            malformed += 1
            logger.warning("%s:%d: expected 'source target', skipped", path.name, lineno)
            continue
        source, target = parts
        translations = entries.setdefault(source, set())
        if target in translations:
            duplicates += 1
            continue
        translations.add(target)
        pairs += 1

    if not entries:
        raise InputError(f"dictionary {path} has no usable entries")
    if malformed:
        logger.warning("%s: %d unparseable line(s) skipped", path.name, malformed)

    guessed = _langs_from_name(path)
    return Lexicon(
        {k: frozenset(v) for k, v in entries.items()},
        source_lang if source_lang is not None else guessed[0],
        target_lang if target_lang is not None else guessed[1],
        DictionaryReport(lines_read, pairs, duplicates, malformed),
    )


def write_dictionary(lexicon: Lexicon, path: Path | str) -> None:
    """Write one ``source target`` line per pair."""
    with open(path, "w", encoding="utf-8") as f:
        for source, target in lexicon.pairs():
            f.write(f"{source} {target}\n")


def split_dictionary(
    lex: Lexicon,
    space: EmbeddingSpace,
    train_n: int,
    cv_n: int,
) -> tuple[Lexicon, Lexicon]:
    """Split keys by their frequency rank in ``space``: first train_n, then the next cv_n.

    Keys absent from the embedding vocabulary are dropped from both parts.
    """
    if train_n < 0 or cv_n < 0:
        raise InputError(f"split sizes must be >= 0, got {train_n}/{cv_n}")
    ranked: list[tuple[int, str]] = []
    missing = 0
    for key in lex:
        row = space.lookup(key)
        if row is None:
            missing += 1
        else:
            ranked.append((row, key))
    if missing:
        logger.info(
            "%d of %d dictionary keys are not in the %s vocabulary",
            missing, len(lex), space.lang_tag or "source",
        )
    ranked.sort()
    keys = [key for _, key in ranked]
    train = lex.restrict(keys[:train_n])
    cv = lex.restrict(keys[train_n:train_n + cv_n])
    return train, cv
