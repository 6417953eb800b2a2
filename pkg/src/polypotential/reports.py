"""Structured results of identity checks and inequality sweeps.

Every entry records the tolerance it was judged at, so a report can be
re-read without knowing how it was produced. Serialisation is
deterministic: no timestamps, fixed key order, ``repr``-exact floats.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field

SCHEMA_VERSION = 1


@dataclass
class Entry:
    """One checked statement ``lhs (<=, >=, ==) rhs`` up to ``tolerance``."""

    name: str
    lhs: float
    rhs: float
    tolerance: float
    relation: str = "le"
    point: tuple = ()
    note: str = ""

    def __post_init__(self):
        if self.relation not in ("le", "ge", "eq"):
            raise ValueError(f"unknown relation {self.relation!r}")

    @property
    def violation(self):
        """How far the statement misses beyond its tolerance (0 when it holds)."""
        if self.relation == "le":
            gap = self.lhs - self.rhs
        elif self.relation == "ge":
            gap = self.rhs - self.lhs
        else:
            gap = abs(self.lhs - self.rhs)
        if math.isnan(gap):
            return math.inf
        return max(0.0, gap - self.tolerance)

    @property
    def passed(self):
        return self.violation == 0.0

    def as_row(self):
        return {
            "name": self.name,
            "point": " ".join(repr(float(c)) for c in self.point),
            "relation": self.relation,
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "tolerance": float(self.tolerance),
            "violation": float(self.violation),
            "passed": self.passed,
            "note": self.note,
        }


@dataclass
class BoundsReport:
    """A titled list of entries plus free-form metadata (seed, q-model, ...)."""

    title: str
    entries: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, *args, **kwargs):
        self.entries.append(Entry(*args, **kwargs))

    def extend(self, other):
        self.entries.extend(other.entries)

    @property
    def passed(self):
        return all(e.passed for e in self.entries)

    @property
    def violations(self):
        return [e for e in self.entries if not e.passed]

    @property
    def max_violation(self):
        return max((e.violation for e in self.entries), default=0.0)

    def summary(self):
        bad = len(self.violations)
        return f"{self.title}: {len(self.entries) - bad}/{len(self.entries)} hold"

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "title": self.title,
            "meta": self.meta,
            "passed": self.passed,
            "entries": [e.as_row() for e in self.entries],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self):
        return rows_to_csv([e.as_row() for e in self.entries], self.meta)


@dataclass
class ConstantsReport:
    """Named constants of one parameter cell, in insertion order."""

    values: dict
    meta: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def to_dict(self):
        return {"schema_version": SCHEMA_VERSION, "meta": self.meta, "values": self.values}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"


def rows_to_csv(rows, meta=None):
    """CSV text with a ``schema_version`` column and the metadata repeated per row."""
    meta = meta or {}
    buf = io.StringIO()
    if not rows:
        return ""
    fields = ["schema_version", *meta.keys(), *rows[0].keys()]
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({"schema_version": SCHEMA_VERSION, **meta, **row})
    return buf.getvalue()
