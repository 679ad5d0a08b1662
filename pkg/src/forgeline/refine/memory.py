"""Append-only feedback memory for iterative regeneration.

The bank accumulates artifact explanations across analysis rounds:
after round t it holds everything seen in rounds 0..t. Appends preserve
first-seen order and skip exact duplicates, so the bank reads as the
union of all reported explanations.
"""

from __future__ import annotations

from forgeline.backends.protocol import AnalyzerReport


class MemoryBank:
    """Ordered, de-duplicated accumulator of feedback strings."""

    def __init__(self, items: list[str] | None = None):
        self._items: list[str] = []
        self._seen: set[str] = set()
        for item in items or []:
            self.add(item)

    def add(self, item: str) -> bool:
        """Append one entry; returns False when it was already present."""
        if item in self._seen:
            return False
        self._items.append(item)
        self._seen.add(item)
        return True

    def extend_from_report(self, report: AnalyzerReport) -> int:
        """Absorb all region explanations from one analysis; returns the
        number of new entries."""
        return sum(self.add(region.explanation) for region in report.regions)

    def items(self) -> list[str]:
        return list(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self):
        return iter(self._items)

    def __contains__(self, item: str) -> bool:
        return item in self._seen
