"""Guided interview that turns founder answers into a cognitive map.

Phases run in order: naming, customers, aspects (per customer), features
(feature list, then aspect links per feature), deepening (per unsaturated
edge: explain it with an underlying concept or declare it testable as-is),
cross-linking (relate concepts added while deepening to older ones), and a
review that loops until the founder confirms the map is coherent. Review
edits that introduce new relationships re-enter deepening for them.

Every answer is applied atomically: it either commits fully or raises and
leaves the session untouched. The append-only answer log replays
deterministically into an identical session, which is what suspends,
resumes, and scripted runs are built on.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import List, Optional, Tuple

from . import hypogen
from .analysis import require_valid
from .model import (
    CONNECTIVE_HAS,
    CONNECTIVE_WOULD_LIKE,
    CognitiveMap,
    EdgeKind,
    MapError,
    NodeKind,
    Sign,
    collapse_ws,
)

DEFAULT_NODE_BUDGET = 200

PRODUCT_QUESTION = "What is the product/solution name?"
CUSTOMERS_QUESTION = "What are the customers targeted by the solution?"
ASPECTS_QUESTION = 'What are the aspects "{customer}" expects to improve using the solution?'
FEATURES_QUESTION = ("Which are the solution features envisioned, and which aspects "
                     "identified in the previous step do they help fulfill?")
FEATURE_LINKS_QUESTION = ('Which aspects does "{feature}" help fulfill, and does it '
                          "increase (+), decrease (-), or not affect (o) each one?")
DEEPENING_QUESTION = ('Consider the relationship: "{statement}". How or why does it hold '
                      "— is there an underlying concept that explains it? If nothing is "
                      "missing, can you create a simple experiment to evaluate this "
                      "relationship?")
CROSS_LINK_QUESTION = ('Is "{concept}" related to other concepts already on the map, and '
                       "does it increase (+), decrease (-), or not affect (o) each one?")
REVIEW_QUESTION = ("Is the map coherent with your understanding of the customers and the "
                   "market? You can still add, remove, or substitute elements.")


class Phase(str, Enum):
    NAMING = "naming"
    CUSTOMERS = "customers"
    ASPECTS = "aspects"
    FEATURES = "features"
    DEEPENING = "deepening"
    CROSS_LINKING = "cross_linking"
    REVIEW = "review"
    DONE = "done"


class AnswerShape(str, Enum):
    TEXT = "text"
    TEXT_LIST = "text-list"
    NODE_CHOICE = "node-choice"
    YES_NO = "yes/no"
    EDGE_ANNOTATION = "edge-annotation"


@dataclass
class Prompt:
    id: str
    text: str
    shape: AnswerShape
    subjects: List[str]
    phase: Phase

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "shape": self.shape.value,
            "subjects": list(self.subjects),
            "phase": self.phase.value,
        }


@dataclass
class FinishResult:
    map: CognitiveMap
    hypotheses: List[hypogen.Hypothesis]
    warnings: List[dict] = field(default_factory=list)


class SessionError(Exception):
    code = "SessionError"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class SessionDone(SessionError):
    code = "SessionDone"


class PhaseError(SessionError):
    code = "PhaseError"


class StalePrompt(SessionError):
    code = "StalePrompt"


class ShapeMismatch(SessionError):
    code = "ShapeMismatch"


class UnknownLabel(SessionError):
    code = "UnknownLabel"


class AmbiguousLabel(SessionError):
    code = "AmbiguousLabel"


class InvalidDecomposition(SessionError):
    code = "InvalidDecomposition"


class BudgetExceeded(SessionError):
    code = "BudgetExceeded"


class ReplayMismatch(SessionError):
    code = "ReplayMismatch"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _parse_sign(raw, context: str) -> Sign:
    try:
        return Sign(raw)
    except (ValueError, TypeError):
        raise ShapeMismatch(f"{context}: expected sign +, - or o, got {raw!r}") from None


class ElicitationSession:
    """Resumable question protocol over a map under construction."""

    def __init__(self, title: str = "", node_budget: int = DEFAULT_NODE_BUDGET,
                 session_id: Optional[str] = None):
        self.id = session_id or f"session-{uuid.uuid4().hex[:12]}"
        self.title = title
        self.node_budget = node_budget
        self.phase = Phase.NAMING
        self.events: List[dict] = []
        self._map = CognitiveMap(title=title)
        self._seq = 0
        self._prompt_seq = 0
        self._current: Optional[Prompt] = None
        self._aspect_queue: List[str] = []
        self._features_asked = False
        self._link_queue: List[str] = []
        self._deepen_queue: List[str] = []
        self._crosslink_queue: List[str] = []
        self._confirmed = False
        self._log({"event": "start", "title": title, "node_budget": node_budget})

    # -- public surface -------------------------------------------------------

    @property
    def map(self) -> CognitiveMap:
        return self._map

    @property
    def confirmed(self) -> bool:
        return self._confirmed

    def next_prompt(self) -> Optional[Prompt]:
        """The current prompt, or None when review is confirmed and only
        finish() remains. Raises SessionDone on a finished session."""
        if self.phase == Phase.DONE:
            raise SessionDone("session is finished")
        if self._current is not None:
            return self._current
        self._current = self._build_prompt()
        return self._current

    def answer(self, prompt_id: str, payload) -> List[dict]:
        if self.phase == Phase.DONE:
            raise SessionDone("session is finished")
        current = self.next_prompt()
        if current is None:
            raise PhaseError("review is confirmed; call finish()")
        if prompt_id != current.id:
            raise StalePrompt(
                f"prompt {prompt_id!r} is not the current prompt ({current.id!r})"
            )

        if isinstance(payload, dict) and payload.get("skip") is True:
            if self.phase in (Phase.NAMING, Phase.REVIEW):
                raise ShapeMismatch(f"the {self.phase.value} phase cannot be skipped")
            deltas: List[dict] = []
            self._apply_skip()
        else:
            deltas = self._dispatch(current, payload)

        self._log({"event": "answer", "prompt_id": prompt_id, "payload": payload})
        self._current = None
        return deltas

    def finish(self) -> FinishResult:
        if self.phase == Phase.DONE:
            raise SessionDone("session is finished")
        if self.phase != Phase.REVIEW or not self._confirmed:
            raise PhaseError("finish requires a confirmed review")
        require_valid(self._map)
        hypotheses = hypogen.generate(self._map)
        warnings = []
        unsaturated = [e for e in self._map.edges.values() if not e.saturated]
        if unsaturated:
            warnings.append({
                "code": "UnsaturatedEdges",
                "edges": [
                    {"id": e.id, "statement": hypogen.statement_for_edge(self._map, e)}
                    for e in unsaturated
                ],
            })
        self.phase = Phase.DONE
        self._log({"event": "finish"})
        return FinishResult(map=self._map, hypotheses=hypotheses, warnings=warnings)

    # -- prompt construction ----------------------------------------------------

    def _build_prompt(self) -> Optional[Prompt]:
        if self.phase == Phase.NAMING:
            return self._prompt(PRODUCT_QUESTION, AnswerShape.TEXT, [])
        if self.phase == Phase.CUSTOMERS:
            return self._prompt(CUSTOMERS_QUESTION, AnswerShape.TEXT_LIST, [])
        if self.phase == Phase.ASPECTS:
            cid = self._aspect_queue[0]
            label = self._map.nodes[cid].label
            return self._prompt(ASPECTS_QUESTION.format(customer=label),
                                AnswerShape.TEXT_LIST, [cid])
        if self.phase == Phase.FEATURES:
            if not self._features_asked:
                return self._prompt(FEATURES_QUESTION, AnswerShape.TEXT_LIST, [])
            fid = self._link_queue[0]
            label = self._map.nodes[fid].label
            return self._prompt(FEATURE_LINKS_QUESTION.format(feature=label),
                                AnswerShape.EDGE_ANNOTATION, [fid])
        if self.phase == Phase.DEEPENING:
            eid = self._deepen_queue[0]
            statement = hypogen.statement_for_edge(self._map, self._map.edges[eid])
            return self._prompt(DEEPENING_QUESTION.format(statement=statement),
                                AnswerShape.EDGE_ANNOTATION, [eid])
        if self.phase == Phase.CROSS_LINKING:
            cid = self._crosslink_queue[0]
            label = self._map.nodes[cid].label
            return self._prompt(CROSS_LINK_QUESTION.format(concept=label),
                                AnswerShape.NODE_CHOICE, [cid])
        if self.phase == Phase.REVIEW:
            if self._confirmed:
                return None
            return self._prompt(REVIEW_QUESTION, AnswerShape.YES_NO, [])
        raise PhaseError(f"no prompt in phase {self.phase.value}")

    def _prompt(self, text: str, shape: AnswerShape, subjects: List[str]) -> Prompt:
        self._prompt_seq += 1
        return Prompt(id=f"p{self._prompt_seq}", text=text, shape=shape,
                      subjects=subjects, phase=self.phase)

    # -- answer application -------------------------------------------------------

    def _dispatch(self, prompt: Prompt, payload) -> List[dict]:
        if self.phase == Phase.NAMING:
            return self._apply_naming(payload)
        if self.phase == Phase.CUSTOMERS:
            return self._apply_customers(payload)
        if self.phase == Phase.ASPECTS:
            return self._apply_aspects(prompt.subjects[0], payload)
        if self.phase == Phase.FEATURES:
            if not self._features_asked:
                return self._apply_feature_list(payload)
            return self._apply_feature_links(prompt.subjects[0], payload)
        if self.phase == Phase.DEEPENING:
            return self._apply_deepening(prompt.subjects[0], payload)
        if self.phase == Phase.CROSS_LINKING:
            return self._apply_crosslink(prompt.subjects[0], payload)
        if self.phase == Phase.REVIEW:
            return self._apply_review(payload)
        raise PhaseError(f"cannot answer in phase {self.phase.value}")

    def _apply_skip(self) -> None:
        if self.phase == Phase.CUSTOMERS:
            self.phase = Phase.FEATURES
            self._features_asked = False
        elif self.phase == Phase.ASPECTS:
            self._aspect_queue.clear()
            self.phase = Phase.FEATURES
            self._features_asked = False
        elif self.phase == Phase.FEATURES:
            self._link_queue.clear()
            self._features_asked = True
            self._enter_deepening()
        elif self.phase == Phase.DEEPENING:
            self._deepen_queue.clear()
            self._enter_crosslinking()
        elif self.phase == Phase.CROSS_LINKING:
            self._crosslink_queue.clear()
            self._enter_review()

    def _commit(self, draft: CognitiveMap) -> None:
        if len(draft.nodes) > self.node_budget:
            raise BudgetExceeded(
                f"map would exceed the node budget of {self.node_budget}"
            )
        self._map = draft

    @staticmethod
    def _text_item(item, context: str) -> str:
        if not isinstance(item, str) or not collapse_ws(item):
            raise ShapeMismatch(f"{context}: expected non-empty text, got {item!r}")
        return collapse_ws(item)

    def _apply_naming(self, payload) -> List[dict]:
        name = self._text_item(payload, "product name")
        draft = self._map.clone()
        nid = draft.add_node(NodeKind.PRODUCT, name)
        if not draft.title:
            draft.title = draft.nodes[nid].label
        self._commit(draft)
        if not self.title:
            self.title = self._map.title
        self.phase = Phase.CUSTOMERS
        return [{"op": "add_node", "node": self._map.nodes[nid].to_dict()}]

    def _apply_customers(self, payload) -> List[dict]:
        if not isinstance(payload, list):
            raise ShapeMismatch("expected a list of customer segment names")
        draft = self._map.clone()
        ids = [draft.add_node(NodeKind.CUSTOMER, self._text_item(item, "customer"))
               for item in payload]
        self._commit(draft)
        self._aspect_queue = list(ids)
        if self._aspect_queue:
            self.phase = Phase.ASPECTS
        else:
            self.phase = Phase.FEATURES
            self._features_asked = False
        return [{"op": "add_node", "node": self._map.nodes[i].to_dict()} for i in ids]

    def _apply_aspects(self, customer_id: str, payload) -> List[dict]:
        if not isinstance(payload, list):
            raise ShapeMismatch("expected a list of aspects")
        draft = self._map.clone()
        deltas: List[dict] = []
        for item in payload:
            connective = CONNECTIVE_HAS
            if isinstance(item, dict):
                label = self._text_item(item.get("aspect"), "aspect")
                connective = item.get("connective", CONNECTIVE_HAS)
                if connective not in (CONNECTIVE_HAS, CONNECTIVE_WOULD_LIKE):
                    raise ShapeMismatch(f"unknown connective {connective!r}")
            else:
                label = self._text_item(item, "aspect")
            concept = draft.find_node(NodeKind.CONCEPT, label)
            if concept is None:
                cid = draft.add_node(NodeKind.CONCEPT, label)
                deltas.append({"op": "add_node", "node": draft.nodes[cid].to_dict()})
            else:
                cid = concept.id
            eid = draft.add_edge(customer_id, cid, connective=connective)
            deltas.append({"op": "add_edge", "edge": draft.edges[eid].to_dict()})
        self._commit(draft)
        self._aspect_queue.pop(0)
        if not self._aspect_queue:
            self.phase = Phase.FEATURES
            self._features_asked = False
        return deltas

    def _apply_feature_list(self, payload) -> List[dict]:
        if not isinstance(payload, list):
            raise ShapeMismatch("expected a list of feature names")
        draft = self._map.clone()
        product = draft.product()
        if product is None:
            raise PhaseError("no product node; the naming phase must run first")
        deltas: List[dict] = []
        ids: List[str] = []
        for item in payload:
            fid = draft.add_node(NodeKind.FEATURE, self._text_item(item, "feature"))
            eid = draft.add_edge(product.id, fid)
            ids.append(fid)
            deltas.append({"op": "add_node", "node": draft.nodes[fid].to_dict()})
            deltas.append({"op": "add_edge", "edge": draft.edges[eid].to_dict()})
        self._commit(draft)
        self._features_asked = True
        has_concepts = bool(self._map.nodes_of_kind(NodeKind.CONCEPT))
        self._link_queue = list(ids) if has_concepts else []
        if not self._link_queue:
            self._enter_deepening()
        return deltas

    def _apply_feature_links(self, feature_id: str, payload) -> List[dict]:
        if not isinstance(payload, list):
            raise ShapeMismatch("expected a list of {aspect, sign} links")
        draft = self._map.clone()
        deltas: List[dict] = []
        for item in payload:
            if not isinstance(item, dict):
                raise ShapeMismatch(f"expected an object with aspect and sign, got {item!r}")
            label = self._text_item(item.get("aspect"), "aspect")
            sign = _parse_sign(item.get("sign"), f"link to {label!r}")
            concept = draft.find_node(NodeKind.CONCEPT, label)
            if concept is None:
                raise UnknownLabel(f"no concept named {label!r} on the map")
            eid = draft.add_edge(feature_id, concept.id, sign=sign)
            deltas.append({"op": "add_edge", "edge": draft.edges[eid].to_dict()})
        self._commit(draft)
        self._link_queue.pop(0)
        if not self._link_queue:
            self._enter_deepening()
        return deltas

    def _enter_deepening(self) -> None:
        self._deepen_queue = [e.id for e in self._map.edges.values() if not e.saturated]
        if self._deepen_queue:
            self.phase = Phase.DEEPENING
        else:
            self._enter_crosslinking()

    def _apply_deepening(self, edge_id: str, payload) -> List[dict]:
        if not isinstance(payload, dict):
            raise ShapeMismatch("expected {saturated: true} or {concept, signs}")
        edge = self._map.edges[edge_id]

        if payload.get("saturated") is True:
            draft = self._map.clone()
            draft.edges[edge_id].saturated = True
            self._commit(draft)
            self._deepen_queue.pop(0)
            if not self._deepen_queue:
                self._enter_crosslinking()
            return [{"op": "saturate_edge", "edge_id": edge_id}]

        if "concept" not in payload:
            raise ShapeMismatch("expected {saturated: true} or {concept, signs}")
        label = self._text_item(payload.get("concept"), "intermediate concept")
        raw_signs = payload.get("signs", [])
        if not isinstance(raw_signs, list):
            raise ShapeMismatch("signs must be a list")

        if edge.kind == EdgeKind.OFFERING:
            raise InvalidDecomposition(
                "an offering cannot be explained by an intermediate concept; "
                "mark it saturated or skip"
            )
        expected_signs = 2 if edge.kind == EdgeKind.INFLUENCE else 1
        if len(raw_signs) != expected_signs:
            raise ShapeMismatch(
                f"decomposing a {edge.kind.value} edge takes {expected_signs} sign(s)"
            )
        signs = [_parse_sign(s, "decomposition") for s in raw_signs]

        draft = self._map.clone()
        if draft.find_node(NodeKind.CONCEPT, label) is not None:
            raise InvalidDecomposition(
                f"{label!r} already exists; new relationships to existing concepts "
                f"belong to cross-linking or review"
            )
        deltas: List[dict] = []
        cid = draft.add_node(NodeKind.CONCEPT, label)
        deltas.append({"op": "add_node", "node": draft.nodes[cid].to_dict()})
        draft.remove_element(edge_id)
        deltas.append({"op": "remove_edge", "edge_id": edge_id})
        if edge.kind == EdgeKind.INFLUENCE:
            first = draft.add_edge(edge.src, cid, sign=signs[0])
        else:
            first = draft.add_edge(edge.src, cid, connective=edge.connective)
        second = draft.add_edge(cid, edge.dst, sign=signs[-1])
        deltas.append({"op": "add_edge", "edge": draft.edges[first].to_dict()})
        deltas.append({"op": "add_edge", "edge": draft.edges[second].to_dict()})

        self._commit(draft)
        self._deepen_queue.pop(0)
        self._deepen_queue.extend([first, second])
        self._crosslink_queue.append(cid)
        return deltas

    def _enter_crosslinking(self) -> None:
        if self._crosslink_queue:
            self.phase = Phase.CROSS_LINKING
        else:
            self._enter_review()

    def _apply_crosslink(self, concept_id: str, payload) -> List[dict]:
        if not isinstance(payload, list):
            raise ShapeMismatch("expected a list of {concept, sign} links")
        draft = self._map.clone()
        deltas: List[dict] = []
        for item in payload:
            if not isinstance(item, dict):
                raise ShapeMismatch(f"expected an object with concept and sign, got {item!r}")
            label = self._text_item(item.get("concept"), "concept")
            sign = _parse_sign(item.get("sign"), f"link to {label!r}")
            target = draft.find_node(NodeKind.CONCEPT, label)
            if target is None:
                raise UnknownLabel(f"no concept named {label!r} on the map")
            eid = draft.add_edge(concept_id, target.id, sign=sign)
            deltas.append({"op": "add_edge", "edge": draft.edges[eid].to_dict()})
        self._commit(draft)
        self._crosslink_queue.pop(0)
        if not self._crosslink_queue:
            self._enter_review()
        return deltas

    def _enter_review(self) -> None:
        self.phase = Phase.REVIEW
        self._confirmed = False

    def _apply_review(self, payload) -> List[dict]:
        if not isinstance(payload, dict):
            raise ShapeMismatch("expected {coherent: bool} or {commands: [...]}")
        if "coherent" in payload:
            if not isinstance(payload["coherent"], bool):
                raise ShapeMismatch("coherent must be true or false")
            self._confirmed = payload["coherent"]
            return []
        if "commands" not in payload:
            raise ShapeMismatch("expected {coherent: bool} or {commands: [...]}")
        commands = payload["commands"]
        if not isinstance(commands, list):
            raise ShapeMismatch("commands must be a list")

        draft = self._map.clone()
        before_edges = set(draft.edges)
        deltas = [self._apply_command(draft, cmd) for cmd in commands]
        self._commit(draft)
        new_unsaturated = [
            e.id for e in self._map.edges.values()
            if e.id not in before_edges and not e.saturated
        ]
        if new_unsaturated:
            # review hands the new relationships back to deepening
            self._deepen_queue = new_unsaturated
            self.phase = Phase.DEEPENING
        return deltas

    def _apply_command(self, draft: CognitiveMap, cmd) -> dict:
        if not isinstance(cmd, dict) or "op" not in cmd:
            raise ShapeMismatch(f"malformed command {cmd!r}")
        op = cmd["op"]
        adders = {
            "add_customer": NodeKind.CUSTOMER,
            "add_feature": NodeKind.FEATURE,
            "add_concept": NodeKind.CONCEPT,
        }
        if op in adders:
            label = self._text_item(cmd.get("label"), op)
            nid = draft.add_node(adders[op], label, notes=cmd.get("notes"))
            return {"op": "add_node", "node": draft.nodes[nid].to_dict()}
        if op == "add_edge":
            src = self._resolve(draft, cmd.get("src"))
            dst = self._resolve(draft, cmd.get("dst"))
            sign = _parse_sign(cmd["sign"], "add_edge") if cmd.get("sign") else None
            connective = cmd.get("connective")
            eid = draft.add_edge(src, dst, sign=sign, connective=connective)
            return {"op": "add_edge", "edge": draft.edges[eid].to_dict()}
        if op == "remove":
            target = self._resolve(draft, cmd.get("target"), allow_edges=True)
            removed_node = target in draft.nodes
            draft.remove_element(target)
            return ({"op": "remove_node", "node_id": target} if removed_node
                    else {"op": "remove_edge", "edge_id": target})
        if op == "substitute":
            target = self._resolve(draft, cmd.get("target"))
            label = self._text_item(cmd.get("label"), "substitute")
            draft.substitute_node(target, label)
            return {"op": "rename_node", "node_id": target, "label": label}
        raise ShapeMismatch(f"unknown review command {op!r}")

    def _resolve(self, draft: CognitiveMap, ref, allow_edges: bool = False) -> str:
        """Resolve an id or a label to an element id."""
        if not isinstance(ref, str) or not ref.strip():
            raise ShapeMismatch(f"expected an element reference, got {ref!r}")
        if ref in draft.nodes or (allow_edges and ref in draft.edges):
            return ref
        hits = draft.find_nodes_by_label(ref)
        if not hits:
            raise UnknownLabel(f"nothing on the map is named {ref!r}")
        if len(hits) > 1:
            kinds = ", ".join(sorted(n.kind.value for n in hits))
            raise AmbiguousLabel(f"{ref!r} names more than one element ({kinds})")
        return hits[0].id

    # -- event log ---------------------------------------------------------------

    def _log(self, event: dict) -> None:
        event = dict(event)
        event["seq"] = self._seq
        event["ts"] = _now()
        self._seq += 1
        self.events.append(event)

    def log_jsonl(self) -> str:
        return "".join(json.dumps(e, ensure_ascii=False) + "\n" for e in self.events)

    @classmethod
    def replay(cls, events: List[dict], strict: bool = True
               ) -> Tuple["ElicitationSession", Optional[FinishResult]]:
        """Rebuild a session by re-running its answer log."""
        if not events or events[0].get("event") != "start":
            raise ReplayMismatch("log must begin with a start event")
        session = cls(
            title=events[0].get("title", ""),
            node_budget=events[0].get("node_budget", DEFAULT_NODE_BUDGET),
        )
        result: Optional[FinishResult] = None
        for event in events[1:]:
            kind = event.get("event")
            if kind == "answer":
                prompt = session.next_prompt()
                if prompt is None or (strict and prompt.id != event.get("prompt_id")):
                    raise ReplayMismatch(
                        f"log answers prompt {event.get('prompt_id')!r} but the session "
                        f"is at {prompt.id if prompt else 'finish'!r}"
                    )
                session.answer(prompt.id if not strict else event["prompt_id"],
                               event.get("payload"))
            elif kind == "finish":
                result = session.finish()
            else:
                raise ReplayMismatch(f"unknown event kind {kind!r}")
        return session, result


def read_log(text: str) -> List[dict]:
    """Parse a JSON-lines answer log."""
    events = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            events.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise ReplayMismatch(f"log line {line_no} is not valid JSON: {exc}") from None
    return events
