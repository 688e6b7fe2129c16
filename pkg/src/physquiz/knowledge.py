"""Concept records: where formulas and identifier semantics come from.

A :class:`ConceptRecord` bundles everything the pipeline needs about one
physics concept: its item id, label, defining formula in LaTeX, an
optional formula dimension, and one :class:`IdentifierInfo` per identifier
(symbol, human name, optional item id, optional dimension).

Records come from two interchangeable sources:

* a fixture snapshot, a versioned JSON file checked against a schema,
  which makes every lookup deterministic and offline; or
* the live knowledge base over HTTPS, opt-in, with an on-disk response
  cache so evaluation runs do not hammer the API.

Lookups that cannot produce a record with a defining formula raise
ConceptNotFound with the exact message "No Wikidata item with formula
found." which callers surface verbatim.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping

import jsonschema

from .dimensions import DimensionVector, parse_isq, to_isq_string
from .expr_core import Identifier, Symbol, free_identifiers, parse_infix
from .latex_frontend import TranslationError, translate

CONCEPT_NOT_FOUND_MESSAGE = "No Wikidata item with formula found."

SNAPSHOT_SCHEMA_VERSION = 1

SNAPSHOT_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "records"],
    "properties": {
        "schema_version": {"const": SNAPSHOT_SCHEMA_VERSION},
        "records": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "qid",
                    "label",
                    "defining_formula_latex",
                    "formula_dimension",
                    "identifiers",
                    "source",
                    "retrieved_at",
                ],
                "properties": {
                    "qid": {"type": "string", "pattern": "^Q[0-9]+$"},
                    "label": {"type": "string", "minLength": 1},
                    "defining_formula_latex": {"type": "string", "minLength": 1},
                    "formula_dimension": {"type": ["string", "null"]},
                    "identifiers": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["symbol", "name"],
                            "properties": {
                                "symbol": {"type": "string", "minLength": 1},
                                "name": {"type": "string", "minLength": 1},
                                "qid": {"type": ["string", "null"], "pattern": "^Q[0-9]+$"},
                                "dimension": {"type": ["string", "null"]},
                            },
                        },
                    },
                    "source": {"enum": ["live", "fixture"]},
                    "retrieved_at": {"type": "string"},
                },
            },
        },
    },
}


class StoreError(Exception):
    pass


class ConceptNotFound(StoreError):
    def __init__(self, message: str = CONCEPT_NOT_FOUND_MESSAGE):
        super().__init__(message)


class AmbiguousLabel(StoreError):
    def __init__(self, label: str, candidates: list[str]):
        super().__init__(f"label {label!r} matches several items: {', '.join(candidates)}")
        self.label = label
        self.candidates = candidates


class NetworkError(StoreError):
    def __init__(self, message: str, retriable: bool = True):
        super().__init__(message)
        self.retriable = retriable


class SchemaViolation(StoreError):
    pass


class SnapshotIoError(StoreError):
    pass


@dataclass(frozen=True)
class IdentifierInfo:
    symbol: Symbol
    name: str
    qid: str | None = None
    dimension: DimensionVector | None = None


@dataclass(frozen=True)
class ConceptRecord:
    qid: str
    label: str
    defining_formula_latex: str
    formula_dimension: DimensionVector | None
    identifiers: tuple[IdentifierInfo, ...]
    source: str
    retrieved_at: str

    def identifier_for(self, symbol: Symbol) -> IdentifierInfo | None:
        for info in self.identifiers:
            if info.symbol == symbol:
                return info
        return None


def parse_symbol_text(text: str) -> Symbol:
    """Parse a rendered symbol like ``v``, ``E_k`` or ``p_{tot,1}``."""
    try:
        node = parse_infix(text.strip())
    except Exception as exc:
        raise SchemaViolation(f"bad identifier symbol {text!r}: {exc}") from exc
    if not isinstance(node, Identifier):
        raise SchemaViolation(f"bad identifier symbol {text!r}: not a bare identifier")
    return node.symbol


def _info_to_dict(info: IdentifierInfo) -> dict:
    return {
        "symbol": str(info.symbol),
        "name": info.name,
        "qid": info.qid,
        "dimension": to_isq_string(info.dimension) if info.dimension is not None else None,
    }


def _info_from_dict(raw: Mapping) -> IdentifierInfo:
    dimension = raw.get("dimension")
    return IdentifierInfo(
        symbol=parse_symbol_text(raw["symbol"]),
        name=raw["name"],
        qid=raw.get("qid"),
        dimension=parse_isq(dimension) if dimension is not None else None,
    )


def record_to_dict(record: ConceptRecord) -> dict:
    return {
        "qid": record.qid,
        "label": record.label,
        "defining_formula_latex": record.defining_formula_latex,
        "formula_dimension": (
            to_isq_string(record.formula_dimension)
            if record.formula_dimension is not None
            else None
        ),
        "identifiers": [_info_to_dict(i) for i in record.identifiers],
        "source": record.source,
        "retrieved_at": record.retrieved_at,
    }


def record_from_dict(raw: Mapping) -> ConceptRecord:
    dimension = raw.get("formula_dimension")
    try:
        formula_dim = parse_isq(dimension) if dimension is not None else None
    except Exception as exc:
        raise SchemaViolation(f"bad formula_dimension {dimension!r}: {exc}") from exc
    return ConceptRecord(
        qid=raw["qid"],
        label=raw["label"],
        defining_formula_latex=raw["defining_formula_latex"],
        formula_dimension=formula_dim,
        identifiers=tuple(_info_from_dict(i) for i in raw["identifiers"]),
        source=raw["source"],
        retrieved_at=raw["retrieved_at"],
    )


def snapshot_to_dict(records: Iterable[ConceptRecord]) -> dict:
    return {
        "schema_version": SNAPSHOT_SCHEMA_VERSION,
        "records": [record_to_dict(r) for r in records],
    }


def validate_snapshot_dict(raw: Mapping):
    try:
        jsonschema.validate(raw, SNAPSHOT_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaViolation(f"snapshot does not match schema: {exc.message}") from exc


def load_snapshot(path: str | Path) -> list[ConceptRecord]:
    """Read and validate a snapshot file into records."""
    try:
        text = Path(path).read_text("utf-8")
    except OSError as exc:
        raise SnapshotIoError(f"cannot read snapshot {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"snapshot {path} is not valid JSON: {exc}") from exc
    validate_snapshot_dict(raw)
    return [record_from_dict(r) for r in raw["records"]]


def snapshot_fixture(records: Iterable[ConceptRecord], path: str | Path):
    """Write records to a snapshot file, schema-checked, byte-deterministic."""
    payload = snapshot_to_dict(records)
    validate_snapshot_dict(payload)
    text = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    try:
        Path(path).write_text(text, "utf-8")
    except OSError as exc:
        raise SnapshotIoError(f"cannot write snapshot {path}: {exc}") from exc


def missing_identifiers(record: ConceptRecord) -> list[Symbol] | None:
    """Formula identifiers without an IdentifierInfo entry.

    Returns None when the defining formula does not parse (coverage is then
    unknown).  A non-empty result flags the record as incomplete.
    """
    try:
        equation, _ = translate(record.defining_formula_latex, heuristic_derivatives=True)
    except TranslationError:
        return None
    known = {info.symbol for info in record.identifiers}
    return [sym for sym in free_identifiers(equation) if sym not in known]


_QID_PATTERN = re.compile(r"^[Qq][0-9]+$")


class FixtureStore:
    """Lookup over an in-memory list of records from a snapshot file."""

    def __init__(self, records: Iterable[ConceptRecord]):
        self.records = list(records)
        self._by_qid = {r.qid: r for r in self.records}
        self._by_label: dict[str, list[ConceptRecord]] = {}
        for r in self.records:
            self._by_label.setdefault(r.label.casefold(), []).append(r)

    @classmethod
    def from_file(cls, path: str | Path) -> "FixtureStore":
        return cls(load_snapshot(path))

    @classmethod
    def bundled(cls) -> "FixtureStore":
        from importlib import resources

        with resources.as_file(
            resources.files("physquiz").joinpath("data/concepts_snapshot.json")
        ) as path:
            return cls.from_file(path)

    def lookup(self, query: str) -> ConceptRecord:
        """Find a record by item id (``Q123``) or exact label, case-insensitive."""
        term = query.strip()
        if _QID_PATTERN.match(term):
            record = self._by_qid.get(term.upper())
            if record is None:
                raise ConceptNotFound()
            return record
        matches = self._by_label.get(term.casefold(), [])
        if not matches:
            raise ConceptNotFound()
        if len(matches) > 1:
            raise AmbiguousLabel(term, [r.qid for r in matches])
        return matches[0]


# ---------------------------------------------------------------------------
# Live client


@dataclass(frozen=True)
class LiveConfig:
    """Endpoints and property ids for the live knowledge base.

    Property ids are configuration, not constants, so deployments can track
    upstream vocabulary changes without a code change.
    """

    api_url: str = "https://www.wikidata.org/w/api.php"
    language: str = "en"
    defining_formula_property: str = "P2534"
    isq_dimension_property: str = "P4020"
    identifier_link_properties: tuple[str, ...] = ("P4934", "P527")
    symbol_qualifier_property: str = "P7235"
    cache_dir: str | None = None
    cache_ttl_seconds: int = 86400
    timeout_seconds: float = 10.0
    max_in_flight: int = 4


Transport = Callable[[str, dict], dict]


def _requests_transport(url: str, params: dict) -> dict:
    import requests

    try:
        response = requests.get(url, params=params, timeout=30)
        response.raise_for_status()
        return response.json()
    except requests.RequestException as exc:
        raise NetworkError(str(exc)) from exc


class LiveStore:
    """Fetch and normalize concept records from the live API.

    The transport is injectable for tests; by default it is a plain HTTPS
    GET.  Responses are cached on disk under a digest of the request for
    ``cache_ttl_seconds``.
    """

    def __init__(self, config: LiveConfig | None = None, transport: Transport | None = None):
        self.config = config or LiveConfig()
        self._transport = transport or _requests_transport
        self._gate = threading.Semaphore(self.config.max_in_flight)

    # -- transport with caching ------------------------------------------

    def _cache_path(self, params: dict) -> Path | None:
        if not self.config.cache_dir:
            return None
        digest = hashlib.sha256(
            json.dumps(params, sort_keys=True).encode("utf-8")
        ).hexdigest()
        return Path(self.config.cache_dir) / f"{digest}.json"

    def _get(self, params: dict) -> dict:
        cache_path = self._cache_path(params)
        if cache_path is not None and cache_path.exists():
            try:
                cached = json.loads(cache_path.read_text("utf-8"))
                if time.time() - cached["fetched_at"] <= self.config.cache_ttl_seconds:
                    return cached["payload"]
            except (OSError, json.JSONDecodeError, KeyError):
                pass
        with self._gate:
            payload = self._transport(self.config.api_url, params)
        if cache_path is not None:
            cache_path.parent.mkdir(parents=True, exist_ok=True)
            cache_path.write_text(
                json.dumps({"fetched_at": time.time(), "payload": payload}), "utf-8"
            )
        return payload

    # -- lookup steps -----------------------------------------------------

    def _search_label(self, label: str) -> str:
        data = self._get(
            {
                "action": "wbsearchentities",
                "search": label,
                "language": self.config.language,
                "format": "json",
                "type": "item",
                "limit": 10,
            }
        )
        hits = data.get("search", [])
        exact = [h for h in hits if h.get("label", "").casefold() == label.casefold()]
        if not exact:
            if not hits:
                raise ConceptNotFound()
            exact = hits[:1]
        if len(exact) > 1:
            raise AmbiguousLabel(label, [h["id"] for h in exact])
        return exact[0]["id"]

    def _fetch_entities(self, qids: list[str]) -> dict:
        data = self._get(
            {
                "action": "wbgetentities",
                "ids": "|".join(qids),
                "props": "labels|claims",
                "languages": self.config.language,
                "format": "json",
            }
        )
        return data.get("entities", {})

    @staticmethod
    def _claim_values(entity: dict, prop: str) -> list[dict]:
        return entity.get("claims", {}).get(prop, [])

    @staticmethod
    def _main_value(claim: dict):
        snak = claim.get("mainsnak", {})
        return snak.get("datavalue", {}).get("value")

    def _label_of(self, entity: dict) -> str | None:
        labels = entity.get("labels", {})
        lang = labels.get(self.config.language)
        return lang.get("value") if lang else None

    def normalize(self, qid: str, entity: dict, linked: Mapping[str, dict]) -> ConceptRecord:
        """Build a record from raw entity JSON plus pre-fetched linked items."""
        formula_claims = self._claim_values(entity, self.config.defining_formula_property)
        formula = self._main_value(formula_claims[0]) if formula_claims else None
        if not formula or not isinstance(formula, str):
            raise ConceptNotFound()
        dim_claims = self._claim_values(entity, self.config.isq_dimension_property)
        formula_dimension = None
        if dim_claims:
            raw_dim = self._main_value(dim_claims[0])
            if isinstance(raw_dim, str):
                try:
                    formula_dimension = parse_isq(raw_dim)
                except Exception:
                    formula_dimension = None
        infos: list[IdentifierInfo] = []
        seen: set[Symbol] = set()
        for prop in self.config.identifier_link_properties:
            for claim in self._claim_values(entity, prop):
                value = self._main_value(claim)
                if not isinstance(value, dict) or "id" not in value:
                    continue
                linked_qid = value["id"]
                symbol_text = None
                qualifiers = claim.get("qualifiers", {}).get(
                    self.config.symbol_qualifier_property, []
                )
                if qualifiers:
                    symbol_value = qualifiers[0].get("datavalue", {}).get("value")
                    if isinstance(symbol_value, str):
                        symbol_text = symbol_value
                item = linked.get(linked_qid, {})
                name = self._label_of(item)
                if symbol_text is None or name is None:
                    continue
                try:
                    symbol = parse_symbol_text(symbol_text.strip().strip("$"))
                except SchemaViolation:
                    continue
                if symbol in seen:
                    continue
                seen.add(symbol)
                dimension = None
                item_dims = self._claim_values(item, self.config.isq_dimension_property)
                if item_dims:
                    raw = self._main_value(item_dims[0])
                    if isinstance(raw, str):
                        try:
                            dimension = parse_isq(raw)
                        except Exception:
                            dimension = None
                infos.append(
                    IdentifierInfo(symbol=symbol, name=name, qid=linked_qid, dimension=dimension)
                )
        return ConceptRecord(
            qid=qid,
            label=self._label_of(entity) or qid,
            defining_formula_latex=formula.strip().strip("$"),
            formula_dimension=formula_dimension,
            identifiers=tuple(infos),
            source="live",
            retrieved_at=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        )

    def lookup(self, query: str) -> ConceptRecord:
        term = query.strip()
        qid = term if _QID_PATTERN.match(term) else self._search_label(term)
        qid = qid.upper() if qid[0] == "q" else qid
        entities = self._fetch_entities([qid])
        entity = entities.get(qid)
        if entity is None or "missing" in entity:
            raise ConceptNotFound()
        linked_ids: list[str] = []
        for prop in self.config.identifier_link_properties:
            for claim in self._claim_values(entity, prop):
                value = self._main_value(claim)
                if isinstance(value, dict) and "id" in value:
                    linked_ids.append(value["id"])
        linked = self._fetch_entities(linked_ids) if linked_ids else {}
        return self.normalize(qid, entity, linked)
