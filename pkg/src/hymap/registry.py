"""Hypothesis lifecycle tracking: validation status, risk, evidence.

The registry keeps exactly one current assessment per hypothesis and an
append-only history of superseded ones. A hypothesis may only be marked
validated with at least one piece of evidence, enforced when writing and
re-checked when loading.

The summary table partitions hypotheses by (kind, validated/not-validated,
risk level) with extra columns for unassessed and refuted ones; in paper
mode refuted counts fold into not-validated so the table matches the
published two-row form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

from .analysis import HypothesisKind

REGISTRY_SCHEMA_VERSION = 1


class Status(str, Enum):
    UNASSESSED = "unassessed"
    VALIDATED = "validated"
    REFUTED = "refuted"
    NOT_VALIDATED = "not_validated"


class RiskLevel(str, Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"

    @property
    def letter(self) -> str:
        return {"low": "L", "medium": "M", "high": "H"}[self.value]


class EvidenceSource(str, Enum):
    OWN_EXPERIENCE = "own_experience"
    OFFLINE_SURVEY = "offline_survey"
    ONLINE_SURVEY = "online_survey"
    SIMILAR_TOOLS = "similar_tools"
    RESEMBLING_BUSINESS_MODELS = "resembling_business_models"
    PRODUCT_USAGE = "product_usage"
    INTERVIEWS = "interviews"
    OTHER = "other"


class RegistryError(Exception):
    code = "RegistryError"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class UnknownHypothesis(RegistryError):
    code = "UnknownHypothesis"


class ValidatedWithoutEvidence(RegistryError):
    code = "ValidatedWithoutEvidence"


class DanglingAssessment(RegistryError):
    code = "DanglingAssessment"


class CorruptRegistry(RegistryError):
    code = "CorruptRegistry"


class UnsupportedRegistryVersion(RegistryError):
    code = "UnsupportedVersion"


@dataclass
class Evidence:
    source: EvidenceSource
    note: str = ""
    date: Optional[str] = None

    def to_dict(self) -> dict:
        return {"source": self.source.value, "note": self.note, "date": self.date}

    @classmethod
    def from_dict(cls, data: dict) -> "Evidence":
        return cls(
            source=EvidenceSource(data["source"]),
            note=data.get("note", ""),
            date=data.get("date"),
        )


@dataclass
class Assessment:
    hypothesis_id: str
    status: Status
    risk: Optional[RiskLevel] = None
    evidence: List[Evidence] = field(default_factory=list)
    recorded_at: Optional[str] = None
    archived_at: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "hypothesis_id": self.hypothesis_id,
            "status": self.status.value,
            "risk": self.risk.value if self.risk else None,
            "evidence": [e.to_dict() for e in self.evidence],
            "recorded_at": self.recorded_at,
            "archived_at": self.archived_at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Assessment":
        return cls(
            hypothesis_id=data["hypothesis_id"],
            status=Status(data["status"]),
            risk=RiskLevel(data["risk"]) if data.get("risk") else None,
            evidence=[Evidence.from_dict(e) for e in data.get("evidence", [])],
            recorded_at=data.get("recorded_at"),
            archived_at=data.get("archived_at"),
        )


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class AssessmentRegistry:
    """Single-writer store of one current assessment per hypothesis."""

    def __init__(self):
        self._current: Dict[str, Assessment] = {}
        self._history: List[Assessment] = []

    def current(self, hypothesis_id: str) -> Optional[Assessment]:
        return self._current.get(hypothesis_id)

    def history(self, hypothesis_id: Optional[str] = None) -> List[Assessment]:
        if hypothesis_id is None:
            return list(self._history)
        return [a for a in self._history if a.hypothesis_id == hypothesis_id]

    def assessed_ids(self) -> List[str]:
        return list(self._current)

    def assess(self, hypothesis_id: str, status: Status,
               risk: Optional[RiskLevel] = None,
               evidence: Sequence[Evidence] = (),
               known_ids: Optional[Iterable[str]] = None) -> Assessment:
        if known_ids is not None and hypothesis_id not in set(known_ids):
            raise UnknownHypothesis(f"no hypothesis with id {hypothesis_id!r}")
        if status == Status.VALIDATED and not evidence:
            raise ValidatedWithoutEvidence(
                "a validated hypothesis needs at least one evidence entry"
            )
        previous = self._current.get(hypothesis_id)
        if previous is not None:
            previous.archived_at = _now()
            self._history.append(previous)
        assessment = Assessment(
            hypothesis_id=hypothesis_id,
            status=status,
            risk=risk,
            evidence=list(evidence),
            recorded_at=_now(),
        )
        self._current[hypothesis_id] = assessment
        return assessment

    # -- persistence ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "version": REGISTRY_SCHEMA_VERSION,
            "current": [a.to_dict() for a in self._current.values()],
            "history": [a.to_dict() for a in self._history],
        }

    def save(self, path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path, known_ids: Optional[Iterable[str]] = None) -> "AssessmentRegistry":
        """Strict whole-file load: any malformed entry fails the load."""
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise CorruptRegistry(f"cannot read registry file: {exc}") from None
        return cls.from_dict(data, known_ids=known_ids)

    @classmethod
    def from_dict(cls, data: dict, known_ids: Optional[Iterable[str]] = None
                  ) -> "AssessmentRegistry":
        if not isinstance(data, dict):
            raise CorruptRegistry("registry file must hold a JSON object")
        version = data.get("version")
        if version != REGISTRY_SCHEMA_VERSION:
            raise UnsupportedRegistryVersion(f"unsupported registry version {version!r}")
        registry = cls()
        known = set(known_ids) if known_ids is not None else None
        try:
            current = [Assessment.from_dict(a) for a in data.get("current", [])]
            history = [Assessment.from_dict(a) for a in data.get("history", [])]
        except (KeyError, ValueError, TypeError) as exc:
            raise CorruptRegistry(f"malformed assessment entry: {exc}") from None
        for assessment in current + history:
            if known is not None and assessment.hypothesis_id not in known:
                raise DanglingAssessment(
                    f"assessment references unknown hypothesis "
                    f"{assessment.hypothesis_id!r}"
                )
            if assessment.status == Status.VALIDATED and not assessment.evidence:
                raise ValidatedWithoutEvidence(
                    f"stored assessment for {assessment.hypothesis_id!r} is "
                    f"validated without evidence"
                )
        for assessment in current:
            registry._current[assessment.hypothesis_id] = assessment
        registry._history = history
        return registry


# ---------------------------------------------------------------------------
# Summary table
# ---------------------------------------------------------------------------

RISK_COLUMNS = [RiskLevel.LOW, RiskLevel.MEDIUM, RiskLevel.HIGH]
KIND_COLUMNS = [HypothesisKind.PROBLEM, HypothesisKind.VALUE, HypothesisKind.PRODUCT]


@dataclass
class SummaryTable:
    # cells[kind][status]["low"/"medium"/"high"/"unspecified"/"total"]
    cells: Dict[str, Dict[str, Dict[str, int]]]
    unassessed: Dict[str, int]
    refuted: Dict[str, int]
    kind_totals: Dict[str, int]
    total: int
    paper_mode: bool

    def cell(self, kind: HypothesisKind, status: str, risk: RiskLevel) -> int:
        return self.cells[kind.value][status][risk.value]

    def to_dict(self) -> dict:
        return {
            "cells": self.cells,
            "unassessed": dict(self.unassessed),
            "refuted": dict(self.refuted),
            "kind_totals": dict(self.kind_totals),
            "total": self.total,
            "paper_mode": self.paper_mode,
        }

    def _rows(self) -> List[tuple]:
        rows = [("Validated", "validated"), ("Not validated", "not_validated")]
        if not self.paper_mode:
            rows.append(("Refuted", None))
        rows.append(("Unassessed", None))
        return rows

    def to_markdown(self) -> str:
        header = ["| |"]
        divider = ["| --- |"]
        for kind in KIND_COLUMNS:
            header.append(f" {kind.value.title()} L | M | H | Total |")
            divider.append(" --- | --- | --- | --- |")
        lines = ["".join(header), "".join(divider)]
        for title, status in self._rows():
            row = [f"| {title} |"]
            for kind in KIND_COLUMNS:
                if status is not None:
                    bucket = self.cells[kind.value][status]
                    row.append(
                        f" {bucket['low']} | {bucket['medium']} | {bucket['high']} "
                        f"| {bucket['total']} |"
                    )
                else:
                    count = (self.refuted if title == "Refuted" else self.unassessed)[kind.value]
                    row.append(f" - | - | - | {count} |")
            lines.append("".join(row))
        totals = " | ".join(str(self.kind_totals[k.value]) for k in KIND_COLUMNS)
        lines.append(f"\ntotal hypotheses: {self.total} ({totals})")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        lines = ["row,kind,low,medium,high,total"]
        for title, status in self._rows():
            for kind in KIND_COLUMNS:
                if status is not None:
                    bucket = self.cells[kind.value][status]
                    lines.append(
                        f"{title},{kind.value},{bucket['low']},{bucket['medium']},"
                        f"{bucket['high']},{bucket['total']}"
                    )
                else:
                    count = (self.refuted if title == "Refuted" else self.unassessed)[kind.value]
                    lines.append(f"{title},{kind.value},,,,{count}")
        return "\n".join(lines) + "\n"


def summary(registry: AssessmentRegistry, hypotheses, paper_mode: bool = True) -> SummaryTable:
    """Count hypotheses into the (kind, status, risk) grid. Cells partition the set."""
    cells = {
        kind.value: {
            status: {"low": 0, "medium": 0, "high": 0, "unspecified": 0, "total": 0}
            for status in ("validated", "not_validated")
        }
        for kind in KIND_COLUMNS
    }
    unassessed = {kind.value: 0 for kind in KIND_COLUMNS}
    refuted = {kind.value: 0 for kind in KIND_COLUMNS}
    kind_totals = {kind.value: 0 for kind in KIND_COLUMNS}

    total = 0
    for hyp in hypotheses:
        total += 1
        kind_totals[hyp.kind.value] += 1
        assessment = registry.current(hyp.id)
        status = assessment.status if assessment else Status.UNASSESSED
        if status == Status.UNASSESSED:
            unassessed[hyp.kind.value] += 1
            continue
        if status == Status.REFUTED and not paper_mode:
            refuted[hyp.kind.value] += 1
            continue
        bucket_name = "validated" if status == Status.VALIDATED else "not_validated"
        bucket = cells[hyp.kind.value][bucket_name]
        risk_key = assessment.risk.value if assessment.risk else "unspecified"
        bucket[risk_key] += 1
        bucket["total"] += 1

    return SummaryTable(
        cells=cells,
        unassessed=unassessed,
        refuted=refuted,
        kind_totals=kind_totals,
        total=total,
        paper_mode=paper_mode,
    )
