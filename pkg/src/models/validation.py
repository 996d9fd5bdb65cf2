"""Oracle suite results."""

from dataclasses import dataclass


@dataclass(frozen=True)
class SuiteResult:
    """Outcome of one oracle suite."""

    name: str
    checks: int
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance

    def to_dict(self) -> dict:
        """Convert to dictionary format."""
        return {
            "name": self.name,
            "checks": self.checks,
            "max_error": self.max_error,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }
