"""Technique registry: authoring intents, user intents, and per-technique
component signatures with required / optional / alternative terms.

The registry ships as a versioned JSON data file next to this module;
``VIZACT_REGISTRY`` overrides the path.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .model import E040_UNKNOWN_TECHNIQUE, E041_UNKNOWN_INTENT, OpError

COMPONENT_IDS = (
    "mouse_params", "hit_object", "predicate", "state_variable",
    "field_reference", "component_reference", "evaluator", "evaluation_scale",
    "camera", "target_data", "encoding", "scale",
)

# observable components appear as their own report columns; the rest are the
# "internal components" cell
INTERNAL_COMPONENTS = (
    "predicate", "state_variable", "field_reference", "component_reference",
    "camera", "evaluator", "evaluation_scale", "target_data", "encoding", "scale",
)

COMPONENT_DISPLAY = {
    "mouse_params": "mouse parameters",
    "hit_object": "hit object",
    "predicate": "predicate",
    "state_variable": "state variable",
    "field_reference": "field reference",
    "component_reference": "component references",
    "evaluator": "target evaluator",
    "evaluation_scale": "evaluation scale",
    "camera": "camera",
    "target_data": "target data",
    "encoding": "encoding",
    "scale": "scale",
}


@dataclass(frozen=True)
class SignatureTerm:
    """One slot of a signature: required component, optional component, or a
    choice between alternatives (each alternative may be a component group)."""

    kind: str  # required | optional | one_of
    component: str | None = None
    evaluator_kind: str | None = None  # qualifier on evaluator terms
    branches: tuple[tuple[str, ...], ...] = ()

    def mentions(self) -> tuple[str, ...]:
        if self.kind == "one_of":
            return tuple(c for b in self.branches for c in b)
        return (self.component,)


@dataclass(frozen=True)
class TechniqueSignature:
    id: str
    display_name: str
    user_intents: tuple[str, ...]
    scope: str  # S | M | SM
    terms: tuple[SignatureTerm, ...]
    aliases: tuple[str, ...]
    source: str  # catalog | case_study
    notes: str = ""

    @property
    def required_count(self) -> int:
        return sum(1 for t in self.terms if t.kind != "optional")


@dataclass(frozen=True)
class AuthoringIntent:
    id: str
    label: str
    user_intents: tuple[str, ...]


@dataclass(frozen=True)
class UserIntent:
    id: str
    short_label: str
    definition: str


@dataclass
class Registry:
    authoring_intents: list[AuthoringIntent]
    user_intents: list[UserIntent]
    techniques: list[TechniqueSignature]
    unmapped_aliases: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self):
        self._by_id = {t.id: t for t in self.techniques}
        self._alias = {}
        for t in self.techniques:
            for a in t.aliases:
                key = normalize_alias(a)
                if key in self._alias:
                    raise ValueError(f"alias {a!r} is not globally unique")
                self._alias[key] = t.id

    def signature_of(self, technique_id: str) -> TechniqueSignature:
        """Signature by id or alias; raises OpError(E040) when unknown."""
        tid = technique_id if technique_id in self._by_id else self._alias.get(normalize_alias(technique_id))
        if tid is None:
            raise OpError(E040_UNKNOWN_TECHNIQUE, f"unknown technique {technique_id!r}")
        return self._by_id[tid]

    def techniques_for_user_intent(self, intent_id: str) -> list[str]:
        """Technique ids serving an intent, in registry order. Multi-intent
        techniques appear under every one of their intents."""
        if all(u.id != intent_id for u in self.user_intents):
            raise OpError(E041_UNKNOWN_INTENT, f"unknown user intent {intent_id!r}")
        return [t.id for t in self.techniques if intent_id in t.user_intents]

    def intents_of_technique(self, technique_id: str) -> tuple[tuple[str, ...], tuple[str, ...]]:
        """(user intents, authoring intents) of a technique; the authoring
        intents derive from the fixed user-intent partition."""
        sig = self.signature_of(technique_id)
        ais = tuple(
            ai.id for ai in self.authoring_intents
            if any(u in ai.user_intents for u in sig.user_intents)
        )
        return sig.user_intents, ais

    def authoring_intent_of(self, user_intent: str) -> str:
        for ai in self.authoring_intents:
            if user_intent in ai.user_intents:
                return ai.id
        raise OpError(E041_UNKNOWN_INTENT, f"unknown user intent {user_intent!r}")

    def user_intent(self, intent_id: str) -> UserIntent:
        for u in self.user_intents:
            if u.id == intent_id:
                return u
        raise OpError(E041_UNKNOWN_INTENT, f"unknown user intent {intent_id!r}")


def normalize_alias(name: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", name.lower()).strip("_")


def _parse_term(raw: dict) -> SignatureTerm:
    if "required" in raw:
        return SignatureTerm(kind="required", component=raw["required"],
                             evaluator_kind=raw.get("evaluatorKind"))
    if "optional" in raw:
        return SignatureTerm(kind="optional", component=raw["optional"])
    if "oneOf" in raw:
        return SignatureTerm(kind="one_of", branches=tuple(tuple(b) for b in raw["oneOf"]))
    raise ValueError(f"bad signature term: {raw!r}")


def load_registry(path: str | Path | None = None) -> Registry:
    if path is None:
        path = os.environ.get("VIZACT_REGISTRY") or Path(__file__).with_name("registry.json")
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    ais = [AuthoringIntent(a["id"], a["label"], tuple(a["userIntents"])) for a in raw["authoringIntents"]]
    uis = [UserIntent(u["id"], u.get("shortLabel", u["id"]), u.get("definition", "")) for u in raw["userIntents"]]
    techniques = []
    for t in raw["techniques"]:
        sig = TechniqueSignature(
            id=t["id"],
            display_name=t.get("displayName", t["id"].replace("_", " ")),
            user_intents=tuple(t["userIntents"]),
            scope=t["scope"],
            terms=tuple(_parse_term(term) for term in t["terms"]),
            aliases=tuple(t.get("aliases", [])),
            source=t.get("source", "catalog"),
            notes=t.get("notes", ""),
        )
        for c in sig.terms:
            for comp in c.mentions():
                if comp not in COMPONENT_IDS:
                    raise ValueError(f"technique {sig.id}: unknown component {comp!r}")
        techniques.append(sig)
    return Registry(
        authoring_intents=ais, user_intents=uis, techniques=techniques,
        unmapped_aliases=dict(raw.get("unmappedAliases", {})),
    )


@lru_cache(maxsize=4)
def _cached(path: str | None) -> Registry:
    return load_registry(path)


def default_registry() -> Registry:
    """Process-wide registry honoring VIZACT_REGISTRY."""
    return _cached(os.environ.get("VIZACT_REGISTRY"))


def signature_of(technique_id: str) -> TechniqueSignature:
    return default_registry().signature_of(technique_id)


def techniques_for_user_intent(intent_id: str) -> list[str]:
    return default_registry().techniques_for_user_intent(intent_id)


def intents_of_technique(technique_id: str) -> tuple[tuple[str, ...], tuple[str, ...]]:
    return default_registry().intents_of_technique(technique_id)
