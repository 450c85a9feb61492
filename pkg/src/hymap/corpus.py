"""Worked startup cases used by tests, demos, and the acceptance suite.

Five reconstructed founder maps:

    case C  digital mentor for software developers (concept sketch)
    case D  network transparency product (concept sketch)
    case E  board-game meetup app, 22 relationships, fully assessed
    case F  patient/health-professional matching app, 23 relationships
    case G  second-hand sports gear marketplace, 16 relationships

E, F, and G ship with the founder's recorded assessments (status, risk,
evidence). Case D also exists as a scripted elicitation run whose replay
must rebuild the same map.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .elicitation import ElicitationSession
from .hypogen import hypothesis_id_for_edge
from .model import CognitiveMap, NodeKind, Sign
from .registry import (
    AssessmentRegistry,
    Evidence,
    EvidenceSource,
    RiskLevel,
    Status,
)

POS, NEG, NEU = Sign.POSITIVE, Sign.NEGATIVE, Sign.NEUTRAL
V, NV = Status.VALIDATED, Status.NOT_VALIDATED
L, M, H = RiskLevel.LOW, RiskLevel.MEDIUM, RiskLevel.HIGH

OWN = EvidenceSource.OWN_EXPERIENCE
OFF = EvidenceSource.OFFLINE_SURVEY
ON = EvidenceSource.ONLINE_SURVEY
SIM = EvidenceSource.SIMILAR_TOOLS
RBM = EvidenceSource.RESEMBLING_BUSINESS_MODELS
USE = EvidenceSource.PRODUCT_USAGE
INT = EvidenceSource.INTERVIEWS


@dataclass
class CaseFixture:
    name: str
    map: CognitiveMap
    registry: AssessmentRegistry = field(default_factory=AssessmentRegistry)


class _Builder:
    """Thin helper so the case tables below stay readable."""

    def __init__(self, title: str):
        self.map = CognitiveMap(title=title)
        self.registry = AssessmentRegistry()
        self.product_id = self.map.add_node(NodeKind.PRODUCT, title)

    def customer(self, label: str) -> str:
        return self.map.add_node(NodeKind.CUSTOMER, label)

    def feature(self, label: str) -> str:
        return self.map.add_node(NodeKind.FEATURE, label)

    def concept(self, label: str) -> str:
        return self.map.add_node(NodeKind.CONCEPT, label)

    def _assess(self, edge_id: str, outcome: Optional[Tuple]) -> None:
        if outcome is None:
            return
        status, risk, sources = outcome
        self.registry.assess(
            hypothesis_id_for_edge(edge_id),
            status,
            risk=risk,
            evidence=[Evidence(source=s) for s in sources],
        )

    def offers(self, feature_id: str, outcome: Optional[Tuple] = None) -> str:
        edge_id = self.map.add_edge(self.product_id, feature_id)
        self.map.edges[edge_id].saturated = True
        self._assess(edge_id, outcome)
        return edge_id

    def influences(self, src: str, sign: Sign, dst: str,
                   outcome: Optional[Tuple] = None) -> str:
        edge_id = self.map.add_edge(src, dst, sign=sign)
        self.map.edges[edge_id].saturated = True
        self._assess(edge_id, outcome)
        return edge_id

    def perceives(self, customer_id: str, concept_id: str,
                  outcome: Optional[Tuple] = None, connective: Optional[str] = None) -> str:
        edge_id = self.map.add_edge(customer_id, concept_id, connective=connective)
        self.map.edges[edge_id].saturated = True
        self._assess(edge_id, outcome)
        return edge_id

    def fixture(self, name: str) -> CaseFixture:
        return CaseFixture(name=name, map=self.map, registry=self.registry)


# ---------------------------------------------------------------------------
# Case C — digital mentor for software developers
# ---------------------------------------------------------------------------


def case_c() -> CaseFixture:
    b = _Builder("digital mentor")
    results = b.concept("company results")
    productivity = b.concept("developers productivity")
    satisfaction = b.concept("developers satisfaction")
    fun = b.concept("making the development work more fun")
    gamification = b.concept("gamification")
    company_satisfaction = b.concept("company satisfaction")

    b.influences(productivity, POS, results)
    b.influences(satisfaction, POS, productivity)
    b.influences(fun, POS, productivity)
    b.influences(fun, POS, satisfaction)
    b.influences(gamification, POS, fun)
    b.influences(fun, POS, company_satisfaction)
    return b.fixture("case_c")


# ---------------------------------------------------------------------------
# Case D — network transparency product
# ---------------------------------------------------------------------------


def case_d() -> CaseFixture:
    b = _Builder("NetFix")
    efficiency = b.concept("network efficiency")
    transparent = b.concept("transparent network")
    willingness = b.concept("willingness to react")
    satisfaction = b.concept("user satisfaction")

    b.influences(efficiency, POS, satisfaction)
    b.influences(transparent, NEU, satisfaction)
    b.influences(transparent, POS, willingness)
    b.influences(willingness, POS, satisfaction)
    return b.fixture("case_d")


def case_d_script() -> List[dict]:
    """Recorded elicitation run that rebuilds the case-D map.

    The founder names the product, skips customers and features, sketches
    the four relationships during review, and confirms each one is
    directly testable.
    """
    session = ElicitationSession(title="")
    answers = [
        "NetFix",
        [],
        [],
        {"commands": [
            {"op": "add_concept", "label": "network efficiency"},
            {"op": "add_concept", "label": "transparent network"},
            {"op": "add_concept", "label": "willingness to react"},
            {"op": "add_concept", "label": "user satisfaction"},
            {"op": "add_edge", "src": "network efficiency",
             "dst": "user satisfaction", "sign": "+"},
            {"op": "add_edge", "src": "transparent network",
             "dst": "user satisfaction", "sign": "o"},
            {"op": "add_edge", "src": "transparent network",
             "dst": "willingness to react", "sign": "+"},
            {"op": "add_edge", "src": "willingness to react",
             "dst": "user satisfaction", "sign": "+"},
        ]},
        {"saturated": True},
        {"saturated": True},
        {"saturated": True},
        {"saturated": True},
        {"coherent": True},
    ]
    for payload in answers:
        prompt = session.next_prompt()
        session.answer(prompt.id, payload)
    session.finish()
    return session.events


# ---------------------------------------------------------------------------
# Case E — board-game meetup app (4 problem / 12 value / 6 product)
# ---------------------------------------------------------------------------


def case_e() -> CaseFixture:
    b = _Builder("Board-game meetup app")

    players = b.customer("board game players")
    shops = b.customer("board game shops")
    publishers = b.customer("board game publishers")

    tables = b.concept("difficulty to form game tables")
    find_people = b.concept("difficulty to find people with similar interests")
    bring_people = b.concept("difficulty to bring people to play at the shop")
    promote = b.concept("difficulty to promote new games")

    search = b.feature("search of nearby people with similar interests")
    create_tables = b.feature("creating game tables through the app")
    news_feed = b.feature("news feed")
    suggestions = b.feature("suggestions")
    shop_events = b.feature("shop event promotion")
    showcase = b.feature("game publisher showcase")

    b.perceives(players, tables, (V, H, [OWN, OFF, ON]))
    b.perceives(players, find_people, (V, M, [INT]))
    b.perceives(shops, bring_people, (V, M, [INT]))
    b.perceives(publishers, promote, (V, M, [INT]))

    b.offers(search, (NV, H, []))
    b.offers(create_tables, (NV, H, []))
    b.offers(news_feed, (NV, L, []))
    b.offers(suggestions, (NV, M, []))
    b.offers(shop_events, (NV, H, []))
    b.offers(showcase, (NV, H, []))

    b.influences(search, NEG, find_people, (V, H, [OFF, ON, SIM]))
    b.influences(create_tables, NEG, tables, (V, H, [OFF, ON]))
    b.influences(create_tables, NEG, bring_people, (NV, M, []))
    b.influences(news_feed, NEG, promote, (V, M, [OFF, ON, SIM]))
    b.influences(suggestions, NEG, find_people, (V, M, [OFF, ON, SIM]))
    b.influences(shop_events, NEG, bring_people, (V, H, [RBM]))
    b.influences(showcase, NEG, promote, (V, H, [RBM]))
    b.influences(find_people, POS, tables, (V, H, [OWN]))
    b.influences(tables, POS, bring_people, (V, H, [OWN]))
    b.influences(suggestions, NEG, promote, (V, M, [SIM, RBM]))
    b.influences(news_feed, NEG, find_people, (V, H, [OFF, ON]))
    b.influences(search, NEG, tables, (V, H, [OFF, ON, OWN]))

    return b.fixture("case_e")


# ---------------------------------------------------------------------------
# Case F — patient / health-professional matching app (8 / 10 / 5)
# ---------------------------------------------------------------------------


def case_f() -> CaseFixture:
    b = _Builder("health connection app")

    patient = b.customer("patient")
    professional = b.customer("health professional")

    find = b.concept("difficulty to find professionals")
    compare = b.concept("difficulty to compare professionals")
    verify = b.concept("difficulty to verify professional quality")
    rewards = b.concept("earn rewards for referring friends")
    outside = b.concept("difficulty to reach professionals outside insurance networks")
    attract = b.concept("difficulty to attract new patients")
    advertising = b.concept("high cost of advertising services")
    reputation = b.concept("difficulty to build online reputation")

    search = b.feature("search for professionals by type and place")
    profiles = b.feature("professional profiles with reviews")
    referral = b.feature("referral program")
    messaging = b.feature("direct messaging")
    listings = b.feature("professional service listings")

    b.perceives(patient, find, (V, H, [OWN]))
    b.perceives(patient, compare, (V, H, [OWN]))
    b.perceives(patient, verify, (V, L, [INT]))
    b.perceives(patient, rewards, (NV, M, []), connective="would like to")
    b.perceives(patient, outside, (V, H, [OWN]))
    b.perceives(professional, attract, (V, H, [INT]))
    b.perceives(professional, advertising, (V, L, [INT]))
    b.perceives(professional, reputation, (V, H, [INT]))

    b.offers(search, (V, H, [USE]))
    b.offers(profiles, (V, H, [USE]))
    b.offers(referral, (V, L, [USE]))
    b.offers(messaging, (V, H, [USE]))
    b.offers(listings, (V, L, [USE]))

    b.influences(search, NEG, find, (NV, H, []))
    b.influences(search, NEG, outside, (NV, H, []))
    b.influences(profiles, NEG, compare, (NV, H, []))
    b.influences(profiles, NEG, verify, (NV, L, []))
    b.influences(profiles, NEG, reputation, (NV, M, []))
    b.influences(referral, NEG, attract, (NV, L, []))
    b.influences(messaging, NEG, outside, (NV, H, []))
    b.influences(listings, NEG, attract, (NV, H, []))
    b.influences(listings, NEG, advertising, (NV, L, []))
    b.influences(verify, POS, compare, (NV, L, []))

    return b.fixture("case_f")


# ---------------------------------------------------------------------------
# Case G — second-hand sports gear marketplace (2 / 10 / 4)
# ---------------------------------------------------------------------------


def case_g() -> CaseFixture:
    b = _Builder("sports gear marketplace")

    enthusiasts = b.customer("sports enthusiasts")
    sellers = b.customer("gear sellers")

    trust = b.concept("lack of trust in the products")
    access = b.concept("difficulty to access sports gear")
    sell = b.concept("difficulty to sell used sports gear")
    supply = b.concept("supply of second-hand gear")

    reputation = b.feature("seller's reputation")
    search = b.feature("search for sports gear")
    listing = b.feature("gear listing")
    checkout = b.feature("secure checkout")

    b.perceives(enthusiasts, access, (V, H, [OFF, ON]))
    b.perceives(sellers, sell, (V, H, [OFF, ON]))

    b.offers(reputation, (V, H, [USE]))
    b.offers(search, (V, H, [USE]))
    b.offers(listing, (V, H, [USE]))
    b.offers(checkout, (V, H, [USE]))

    b.influences(trust, POS, access, (V, H, [USE, ON]))
    b.influences(reputation, NEG, trust, (V, M, [OFF, ON]))
    b.influences(search, NEG, access, (V, M, [USE]))
    b.influences(listing, NEG, sell, (V, M, [USE]))
    b.influences(checkout, NEG, trust, (V, M, [OFF, ON]))
    b.influences(sell, POS, access, (V, L, [OWN]))
    b.influences(reputation, NEG, sell, (NV, H, []))
    b.influences(listing, POS, supply, (NV, M, []))
    b.influences(supply, NEG, access, (NV, M, []))
    b.influences(search, NEG, sell, (NV, M, []))

    return b.fixture("case_g")


def all_cases() -> Dict[str, CaseFixture]:
    return {
        "case_c": case_c(),
        "case_d": case_d(),
        "case_e": case_e(),
        "case_f": case_f(),
        "case_g": case_g(),
    }
