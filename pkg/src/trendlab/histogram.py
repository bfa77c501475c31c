"""Size histograms and their plain-text table format.

A histogram file is a tab-separated table ``size  count  fraction`` preceded
by ``#`` comment lines. Header lines of the form ``# key: value`` carry
run metadata and are returned by :func:`read_histogram`.
"""

from __future__ import annotations

import io
import os
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np


class HistogramParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)
        self.line = line
        self.source = source


@dataclass(frozen=True)
class SizeHistogram:
    """Counts of components (or bins) by size."""

    counts: Mapping[int, int]

    def __post_init__(self):
        clean = {}
        for size, count in sorted(self.counts.items()):
            if int(size) != size or size < 1:
                raise ValueError(f"sizes must be positive integers, got {size!r}")
            if int(count) != count or count < 0:
                raise ValueError(f"counts must be nonnegative integers, got {count!r}")
            if count:
                clean[int(size)] = int(count)
        object.__setattr__(self, "counts", clean)

    @classmethod
    def from_sizes(cls, sizes: Iterable[int]) -> "SizeHistogram":
        return cls(Counter(int(s) for s in sizes))

    @property
    def n(self) -> int:
        return sum(self.counts.values())

    def fractions(self, exact: bool = False) -> dict:
        """``{size: count / n}``; exact rationals when ``exact`` is true."""
        n = self.n
        if exact:
            return {k: Fraction(c, n) for k, c in self.counts.items()}
        return {k: c / n for k, c in self.counts.items()}

    def to_sizes(self) -> np.ndarray:
        """Expand back to one entry per observation, ascending."""
        if not self.counts:
            return np.zeros(0, dtype=np.int64)
        sizes = np.fromiter(self.counts.keys(), dtype=np.int64)
        reps = np.fromiter(self.counts.values(), dtype=np.int64)
        return np.repeat(sizes, reps)

    @property
    def total(self) -> int:
        """Sum of all sizes (nodes or balls)."""
        return sum(k * c for k, c in self.counts.items())

    @property
    def largest(self) -> int:
        return max(self.counts)

    def __eq__(self, other):
        if not isinstance(other, SizeHistogram):
            return NotImplemented
        return self.counts == other.counts

    def __hash__(self):
        return hash(tuple(self.counts.items()))


def format_histogram(hist: SizeHistogram, header: Mapping[str, object] | None = None) -> str:
    out = io.StringIO()
    for key, value in (header or {}).items():
        out.write(f"# {key}: {value}\n")
    out.write("# size\tcount\tfraction\n")
    n = hist.n
    for size, count in hist.counts.items():
        out.write(f"{size}\t{count}\t{count / n!r}\n")
    return out.getvalue()


def write_histogram(path, hist: SizeHistogram, header: Mapping[str, object] | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_histogram(hist, header))


def parse_histogram(text: str, source: str | None = None):
    """Parse a histogram table. Returns ``(histogram, header)``."""
    header: dict[str, str] = {}
    counts: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            key, sep, value = body.partition(":")
            if sep:
                header[key.strip()] = value.strip()
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise HistogramParseError(f"expected 3 tab-separated fields, got {len(fields)}", lineno, source)
        try:
            size, count = int(fields[0]), int(fields[1])
            float(fields[2])
        except ValueError:
            raise HistogramParseError(f"malformed row {line!r}", lineno, source) from None
        if size < 1 or count < 0:
            raise HistogramParseError(f"size must be >= 1 and count >= 0 in row {line!r}", lineno, source)
        if size in counts:
            raise HistogramParseError(f"duplicate size {size}", lineno, source)
        counts[size] = count
    return SizeHistogram(counts), header


def read_histogram(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_histogram(text, source=os.fspath(path))
