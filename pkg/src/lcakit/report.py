"""Pass/fail bookkeeping for identity checks."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckResult:
    """One identity tested on one input tuple (or a summary line)."""

    name: str
    ok: bool
    witness: tuple = ()
    difference: str = ""

    def to_dict(self) -> dict:
        out = {"name": self.name, "status": "pass" if self.ok else "fail"}
        if not self.ok:
            out["witness"] = {"tuple": list(self.witness), "difference": self.difference}
        return out


@dataclass
class AxiomReport:
    """Collected results of an axiom or identity check.

    Only failures are stored individually; passing tuples are counted.
    """

    title: str
    results: list = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def __bool__(self) -> bool:
        return self.ok

    def record(self, name: str, difference, witness: tuple = ()) -> bool:
        """Record a check whose residual is ``difference`` (zero means pass)."""
        self.checked += 1
        if difference is None or _is_zero(difference):
            return True
        self.results.append(CheckResult(name, False, tuple(witness), str(difference)))
        return False

    def note(self, name: str, ok: bool, witness: tuple = (), detail: str = "") -> bool:
        self.checked += 1
        if not ok:
            self.results.append(CheckResult(name, False, tuple(witness), detail))
        return ok

    def extend(self, other: "AxiomReport", prefix: str = "") -> "AxiomReport":
        self.checked += other.checked
        for r in other.results:
            self.results.append(CheckResult(prefix + r.name, r.ok, r.witness, r.difference))
        return self

    def failures(self) -> list:
        return sorted((r for r in self.results if not r.ok), key=lambda r: (r.name, r.witness))

    def failed_names(self) -> set:
        return {r.name for r in self.results if not r.ok}

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "status": "pass" if self.ok else "fail",
            "checked": self.checked,
            "failures": [r.to_dict() for r in self.failures()],
        }

    def __str__(self) -> str:
        head = f"{self.title}: {'pass' if self.ok else 'FAIL'} ({self.checked} checks)"
        lines = [head]
        for r in self.failures()[:10]:
            lines.append(f"  {r.name} at {r.witness}: {r.difference}")
        return "\n".join(lines)


def _is_zero(value) -> bool:
    if hasattr(value, "is_zero"):
        return value.is_zero()
    if isinstance(value, dict):
        return not value
    return not value
