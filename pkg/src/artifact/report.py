"""Named pass/fail checks, shared by the verifiers and the CLI."""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass
class Check:
    name: str
    status: str  # "pass" or "fail"
    detail: str = ""
    anchor: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "pass"


def check(name: str, violations: list[str], anchor: str, ok_detail: str = "") -> Check:
    """A check that passes iff ``violations`` is empty; detail lists the first few."""
    if violations:
        more = f" (+{len(violations) - 5} more)" if len(violations) > 5 else ""
        return Check(name, "fail", "; ".join(violations[:5]) + more, anchor)
    return Check(name, "pass", ok_detail, anchor)


def as_dicts(checks: list[Check]) -> list[dict]:
    return [asdict(c) for c in checks]


def all_pass(checks: list[Check]) -> bool:
    return all(c.ok for c in checks)
