"""Line-oriented verification reports shared by the library and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def check(self, name: str, passed: bool, detail: str = "") -> bool:
        self.checks.append(Check(name, bool(passed), "" if passed else detail))
        return bool(passed)

    def note(self, text: str) -> None:
        self.notes.append(text)

    def extend(self, other: "Report", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.detail))
        self.notes.extend(other.notes)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def format(self, machine: bool = False) -> str:
        lines = []
        if machine:
            lines.append(f"report={self.title}")
            lines += [f"note={n}" for n in self.notes]
            for c in self.checks:
                line = f"check={c.name} status={'pass' if c.passed else 'fail'}"
                if c.detail:
                    line += f" counterexample={c.detail}"
                lines.append(line)
            lines.append(f"result={'pass' if self.ok else 'fail'}")
        else:
            lines.append(f"== {self.title}")
            lines += self.notes
            for c in self.checks:
                line = f"{'PASS' if c.passed else 'FAIL'}  {c.name}"
                if c.detail:
                    line += f"  counterexample: {c.detail}"
                lines.append(line)
            lines.append("all checks passed" if self.ok else f"{len(self.failures())} check(s) failed")
        return "\n".join(lines)

    def __str__(self):
        return self.format()
