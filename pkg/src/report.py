"""Check records and reports in the IDENTITY line format."""

import json
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional

import pandas as pd

from .errors import ValidationFailure

PASS = "PASS"
FAIL = "FAIL"
INFO = "INFO"


def residue_text(value: int, p: int, alias: Optional[int] = None) -> str:
    """Canonical residue, with a signed alias when one is given: ``4 (≡ -1)``."""
    r = value % p
    if alias is not None and alias != r and alias % p == r:
        return f"{r} (≡ {alias})"
    return str(r)


def _render(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_render(v) for v in value) + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


@dataclass
class Record:
    name: str
    p: int
    expected: Any
    got: Any
    status: str
    params: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def check(cls, name: str, p: int, expected: Any, got: Any, **params) -> "Record":
        status = PASS if _render(expected) == _render(got) else FAIL
        return cls(name, p, expected, got, status, params)

    @classmethod
    def info(cls, name: str, p: int, expected: Any, got: Any, **params) -> "Record":
        return cls(name, p, expected, got, INFO, params)

    @classmethod
    def flag(cls, name: str, p: int, ok: bool, expected: Any = True, got: Any = None, **params) -> "Record":
        """Boolean check; ``got`` defaults to the flag itself."""
        return cls(name, p, expected, ok if got is None else got, PASS if ok else FAIL, params)

    def line(self) -> str:
        params = "".join(f" {k}={_render(v)}" for k, v in self.params.items())
        return (
            f"IDENTITY {self.name} p={self.p}{params} "
            f"EXPECTED {_render(self.expected)} GOT {_render(self.got)} {self.status}"
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "p": self.p,
            "params": {k: _render(v) for k, v in self.params.items()},
            "expected": _render(self.expected),
            "got": _render(self.got),
            "status": self.status,
        }


@dataclass
class Report:
    title: str = ""
    records: List[Record] = field(default_factory=list)

    def add(self, record: Record) -> Record:
        self.records.append(record)
        return record

    def extend(self, other: Iterable[Record]) -> "Report":
        if isinstance(other, Report):
            other = other.records
        self.records.extend(other)
        return self

    @property
    def failures(self) -> List[Record]:
        return [r for r in self.records if r.status == FAIL]

    @property
    def passed(self) -> bool:
        return not self.failures

    def count(self, status: str) -> int:
        return sum(1 for r in self.records if r.status == status)

    def named(self, name: str) -> List[Record]:
        return [r for r in self.records if r.name == name]

    def lines(self) -> List[str]:
        return [r.line() for r in self.records]

    def to_text(self) -> str:
        return "\n".join(self.lines())

    def to_json(self) -> str:
        return json.dumps([r.to_dict() for r in self.records], indent=2, ensure_ascii=False)

    def to_frame(self) -> pd.DataFrame:
        columns = ["name", "p", "params", "expected", "got", "status"]
        if not self.records:
            return pd.DataFrame(columns=columns)
        rows = []
        for r in self.records:
            d = r.to_dict()
            d["params"] = " ".join(f"{k}={v}" for k, v in d["params"].items())
            rows.append(d)
        return pd.DataFrame(rows, columns=columns)

    def raise_for_status(self) -> None:
        if self.failures:
            raise ValidationFailure(self.failures)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)
