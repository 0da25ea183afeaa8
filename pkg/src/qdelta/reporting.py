"""Outcome of a single identity check, recorded in both comparison modes."""

from __future__ import annotations

from dataclasses import dataclass, field

from .distributions import Comparison, Distribution, TruncParams, compare

MODES = ("graded", "flattened")


@dataclass
class Outcome:
    """Failures per mode plus the graded depth reached.

    ``required_depth`` is the depth (in negative grades) the strongest-mode
    verdict insists on; ``None`` means flattened agreement suffices.
    """

    graded: list[dict] = field(default_factory=list)
    flattened: list[dict] = field(default_factory=list)
    depth: float = float("inf")
    required_depth: int | None = None
    info: dict = field(default_factory=dict)

    def fail(self, location: str, order, expected, got) -> None:
        """A failure independent of the comparison mode."""
        entry = {"location": location, "order": order, "expected": str(expected), "got": str(got)}
        self.graded.append(entry)
        self.flattened.append(entry)
        self.depth = min(self.depth, float("-inf"))

    def record(self, location: str, c: Comparison) -> Comparison:
        if not c.graded:
            m = c.graded_mismatch
            self.graded.append({"location": f"{location}:{m.location}", "grade": m.grade, "expected": m.expected, "got": m.got})
        if not c.flattened:
            m = c.flattened_mismatch
            self.flattened.append({"location": f"{location}:{m.location}", "grade": m.grade, "expected": m.expected, "got": m.got})
        self.depth = min(self.depth, c.depth)
        return c

    def compare(self, location: str, a: Distribution, b: Distribution, params: TruncParams) -> Comparison:
        return self.record(location, compare(a, b, params))

    def merge(self, other: "Outcome", prefix: str = "") -> None:
        for mode in MODES:
            for f in getattr(other, mode):
                getattr(self, mode).append({**f, "location": prefix + f["location"]})
        self.depth = min(self.depth, other.depth)

    def passed(self, mode: str) -> bool:
        if mode == "graded":
            return not self.graded
        if mode == "flattened":
            return not self.flattened
        if mode == "strongest":
            if self.flattened:
                return False
            return self.required_depth is None or self.depth >= self.required_depth
        raise ValueError(f"unknown mode {mode!r}")

    def failures(self, mode: str) -> list[dict]:
        if mode == "strongest":
            if self.flattened:
                return self.flattened
            if not self.passed("strongest"):
                return self.graded
            return []
        return list(getattr(self, mode))

    @property
    def strongest(self) -> str | None:
        if not self.graded:
            return "graded"
        if not self.flattened:
            return "flattened"
        return None

    def summary(self) -> dict:
        depth = self.depth
        if depth == float("inf"):
            depth = "all"
        elif depth == float("-inf"):
            depth = None
        else:
            depth = int(depth)
        return {
            "strongestMode": self.strongest,
            "gradedDepth": depth,
            **self.info,
        }
