"""Reading and writing fastText text vector files (`.vec`, optionally gzipped)."""

import gzip
import logging
import math
from pathlib import Path
from typing import IO, Optional

import numpy as np

from ..errors import InputError, NumericalError
from .space import EmbeddingSpace, LoadReport

logger = logging.getLogger(__name__)

# Fraction of malformed rows tolerated before a load is rejected.
MAX_MALFORMED_FRACTION = 0.01


def _open_text(path: Path, mode: str) -> IO[str]:
    if path.suffix == ".gz":
        return gzip.open(path, mode + "t", encoding="utf-8", newline="\n")
    return open(path, mode, encoding="utf-8", newline="\n")


def _parse_header(line: str, path: Path) -> tuple[int, int]:
    parts = line.split()
    if len(parts) != 2:
        raise InputError(f"{path}: header must be 'n d', got {line.strip()!r}")
    try:
        n, d = int(parts[0]), int(parts[1])
    except ValueError:
        raise InputError(f"{path}: header must be two integers, got {line.strip()!r}") from None
    if n < 0 or d < 1:
        raise InputError(f"{path}: invalid header dimensions n={n} d={d}")
    return n, d


def load_embeddings(
    path: Path | str,
    max_vocab: int,
    lang_tag: Optional[str] = None,
) -> EmbeddingSpace:
    """Load the first ``max_vocab`` unique tokens of a fastText text file.

    File order is kept (fastText writes words by decreasing frequency).
    Duplicate tokens keep their first occurrence. Rows with the wrong number
    of coordinates are skipped with a warning; more than 1% of them fails the
    load, as does any non-finite coordinate.
    """
    path = Path(path)
    if max_vocab < 1:
        raise InputError(f"max_vocab must be >= 1, got {max_vocab}")
    if not path.exists():
        raise InputError(f"embedding file not found: {path}")

    words: list[str] = []
    rows: list[list[float]] = []
    seen: set[str] = set()
    duplicates: list[str] = []
    malformed = 0
    rows_read = 0

    try:
        with _open_text(path, "r") as f:
            header = f.readline()
            if not header:
                raise InputError(f"{path}: empty file")
            n, d = _parse_header(header, path)
            limit = min(n, max_vocab)

            for line_no, line in enumerate(f, start=2):
                if len(words) >= limit:
                    break
                line = line.rstrip("\n").rstrip("\r")
                if not line.strip():
                    continue
                rows_read += 1
                token, _, rest = line.partition(" ")
                coords = rest.split()
                if not token or len(coords) != d:
                    malformed += 1
                    logger.warning(
                        "%s:%d: expected %d coordinates, got %d; row skipped",
                        path, line_no, d, len(coords),
                    )
                    continue
                try:
                    values = [float(c) for c in coords]
                except ValueError:
                    malformed += 1
                    logger.warning("%s:%d: unparsable coordinate; row skipped", path, line_no)
                    continue
                if not all(math.isfinite(v) for v in values):
                    raise NumericalError(f"{path}:{line_no}: non-finite coordinate for {token!r}")
                if token in seen:
                    duplicates.append(token)
                    continue
                seen.add(token)
                words.append(token)
                rows.append(values)
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read embeddings {path}: {exc}") from exc

    if rows_read and malformed / rows_read > MAX_MALFORMED_FRACTION:
        raise InputError(
            f"{path}: {malformed} of {rows_read} rows malformed "
            f"(more than {MAX_MALFORMED_FRACTION:.0%})"
        )
    if duplicates:
        logger.warning("%s: %d duplicate token(s) skipped", path, len(duplicates))

    vectors = np.array(rows, dtype=np.float64).reshape(len(rows), d)
    report = LoadReport(
        rows_read=rows_read,
        duplicates=len(duplicates),
        malformed=malformed,
        duplicate_tokens=tuple(duplicates),
    )
    logger.info("%s: loaded %d x %d vectors", path, len(words), d)
    return EmbeddingSpace(
        words=tuple(words),
        vectors=vectors,
        lang_tag=lang_tag if lang_tag is not None else path.name.split(".")[0],
        report=report,
    )


def save_embeddings(space: EmbeddingSpace, path: Path | str) -> None:
    """Write ``space`` in fastText text format (gzipped when the name ends in .gz)."""
    path = Path(path)
    with _open_text(path, "w") as f:
        f.write(f"{len(space)} {space.dim}\n")
        for word, row in zip(space.words, space.vectors):
            f.write(word + " " + " ".join(f"{v:.17g}" for v in row) + "\n")
