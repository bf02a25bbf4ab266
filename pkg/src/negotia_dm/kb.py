"""Phone-directory knowledge base: entity storage, constraint search and fixtures.

The store is an immutable in-memory list of entities; queries are conjunctions
of feature constraints evaluated by linear scan.  Text constraints match
case-insensitively after whitespace normalization, ages match exactly.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .semantics import Individual

QUERYABLE_FEATURES = ("person_name", "person_city", "person_street_name", "age")

FEATURE_SORTS = {
    "person_name": "individual-name",
    "person_city": "city",
    "person_street_name": "street",
    "age": "integer-age",
    "street_number": "street-number",
    "phonenumber": "phone-number",
}

_FIXTURE_KEYS = (
    "id",
    "person_name",
    "person_city",
    "person_street_name",
    "street_number",
    "age",
    "phonenumber",
)

# The three §4.1 Annas: (street, street number, age, phone).  F1 ships them
# verbatim and the large generated fixture embeds the same profiles.
ANNA_PROFILES = (
    ("Olivedalsgatan", "12", 77, "031-111 11 11"),
    ("Vasagatan", "11", 42, "031-222 22 22"),
    ("Kompassgatan", "10", 31, "031-333 33 33"),
)
ANNA_NAME = "Anna Andersson"
ANNA_CITY = "Gothenburg"


class UnknownPredicate(Exception):
    """A constraint or projection names something that is not an entity feature."""


class FixtureFormatError(Exception):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


def normalize_text(text: str) -> str:
    return " ".join(text.split()).casefold()


@dataclass(frozen=True)
class Entity:
    id: str
    person_name: str
    person_city: str
    person_street_name: str
    street_number: str
    age: int
    phonenumber: str

    def feature(self, predicate: str) -> str | int:
        if predicate not in FEATURE_SORTS:
            raise UnknownPredicate(predicate)
        return getattr(self, predicate)


# A query maps feature predicates to required values, at most one per predicate.
Query = dict[str, Individual]


@dataclass(frozen=True)
class ResultSet:
    matches: tuple[Entity, ...]

    @property
    def count(self) -> int:
        return len(self.matches)


class DirectoryKb:
    """Immutable entity collection with precomputed normalized feature values."""

    queryable = QUERYABLE_FEATURES
    feature_sorts = FEATURE_SORTS

    def __init__(self, entities: list[Entity] | tuple[Entity, ...]):
        ordered = tuple(sorted(entities, key=lambda e: e.id))
        seen: set[str] = set()
        for entity in ordered:
            if entity.id in seen:
                raise ValueError(f"duplicate entity id: {entity.id}")
            seen.add(entity.id)
            if entity.age < 0:
                raise ValueError(f"entity {entity.id}: negative age")
            if not entity.phonenumber:
                raise ValueError(f"entity {entity.id}: empty phone number")
        self.entities = ordered
        self.by_id = {e.id: e for e in ordered}
        self._norms = tuple(
            {
                "person_name": normalize_text(e.person_name),
                "person_city": normalize_text(e.person_city),
                "person_street_name": normalize_text(e.person_street_name),
                "age": e.age,
            }
            for e in ordered
        )

    def __len__(self) -> int:
        return len(self.entities)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DirectoryKb) and self.entities == other.entities

    def feature_for_sort(self, sort: str) -> str | None:
        """The unique queryable feature whose values carry ``sort``, if any."""
        for predicate in QUERYABLE_FEATURES:
            if FEATURE_SORTS[predicate] == sort:
                return predicate
        return None


def _normalized_constraint(predicate: str, value: Individual) -> str | int:
    if predicate == "age":
        if not isinstance(value.surface, int):
            raise UnknownPredicate(f"age constraint needs an integer, got {value.surface!r}")
        return value.surface
    return normalize_text(str(value.surface))


def search(kb: DirectoryKb, query: Query) -> ResultSet:
    """All entities satisfying every constraint, in stable id order."""
    for predicate in query:
        if predicate not in QUERYABLE_FEATURES:
            raise UnknownPredicate(predicate)
    wanted = {p: _normalized_constraint(p, v) for p, v in query.items()}
    matches = tuple(
        entity
        for entity, norms in zip(kb.entities, kb._norms)
        if all(norms[p] == w for p, w in wanted.items())
    )
    return ResultSet(matches)


def project(rs: ResultSet, predicate: str) -> list[tuple[Entity, Individual]]:
    """Pair each matched entity with its value for ``predicate``, in result order."""
    if predicate not in FEATURE_SORTS:
        raise UnknownPredicate(predicate)
    sort = FEATURE_SORTS[predicate]
    return [(e, Individual(sort, e.feature(predicate))) for e in rs.matches]


def load_fixture(path: str | Path) -> DirectoryKb:
    """Read a JSON-lines fixture file into a knowledge base."""
    entities: list[Entity] = []
    seen: set[str] = set()
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FixtureFormatError(f"invalid JSON: {exc.msg}", lineno) from exc
        if not isinstance(record, dict):
            raise FixtureFormatError("record is not an object", lineno)
        missing = [k for k in _FIXTURE_KEYS if k not in record]
        if missing:
            raise FixtureFormatError(f"missing keys: {', '.join(missing)}", lineno)
        if not isinstance(record["age"], int) or isinstance(record["age"], bool):
            raise FixtureFormatError("age must be an integer", lineno)
        if record["age"] < 0:
            raise FixtureFormatError("age must be non-negative", lineno)
        for key in _FIXTURE_KEYS:
            if key != "age" and not isinstance(record[key], str):
                raise FixtureFormatError(f"{key} must be a string", lineno)
        if not record["phonenumber"]:
            raise FixtureFormatError("phonenumber must be non-empty", lineno)
        if record["id"] in seen:
            raise FixtureFormatError(f"duplicate id: {record['id']}", lineno)
        seen.add(record["id"])
        entities.append(Entity(**{k: record[k] for k in _FIXTURE_KEYS}))
    return DirectoryKb(entities)


def save_fixture(kb: DirectoryKb, path: str | Path) -> None:
    lines = [
        json.dumps({k: getattr(e, k) for k in _FIXTURE_KEYS}, ensure_ascii=False)
        for e in kb.entities
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


_FILLER_FIRST = (
    "Erik", "Lars", "Karl", "Johan", "Maria", "Eva", "Karin", "Sara",
    "Per", "Nils", "Ingrid", "Astrid", "Bengt", "Ulla", "Gunnar",
)
_FILLER_LAST = (
    "Johansson", "Karlsson", "Nilsson", "Eriksson", "Larsson", "Olsson",
    "Persson", "Svensson", "Gustafsson", "Pettersson", "Jonsson", "Lindberg",
)
_OTHER_CITIES = (
    "Stockholm", "Malmö", "Uppsala", "Västerås", "Örebro", "Linköping",
    "Helsingborg", "Jönköping", "Norrköping", "Lund", "Umeå", "Gävle",
)
_STREETS = (
    "Storgatan", "Kungsgatan", "Drottninggatan", "Järntorgsgatan", "Ringvägen",
    "Parkgatan", "Linnégatan", "Husargatan", "Plantagegatan", "Bangatan",
    "Fjällgatan", "Sveagatan", "Södra Allégatan", "Berzeliigatan",
)

LARGE_ANNA_COUNT = 4345
LARGE_GOTHENBURG_ANNAS = 86
_LARGE_FILLER_COUNT = 155
_PROFILE_AGES = {age for _, _, age, _ in ANNA_PROFILES}


def _fresh_phone(rng: random.Random, seen: set[str], prefix: str) -> str:
    while True:
        phone = f"{prefix}-{rng.randint(100, 999)} {rng.randint(10, 99)} {rng.randint(10, 99)}"
        if phone not in seen:
            seen.add(phone)
            return phone


def generate_large_fixture(seed: int) -> DirectoryKb:
    """Deterministic large directory: 4345 Anna Anderssons, 86 of them in
    Gothenburg, including the three small-fixture profiles, plus fillers."""
    rng = random.Random(seed)
    phones: set[str] = set()
    entities: list[Entity] = []
    counter = 0

    def add(name: str, city: str, street: str, number: str, age: int, phone: str) -> None:
        nonlocal counter
        counter += 1
        entities.append(Entity(f"f2-{counter:05d}", name, city, street, number, age, phone))

    for street, number, age, phone in ANNA_PROFILES:
        phones.add(phone)
        add(ANNA_NAME, ANNA_CITY, street, number, age, phone)

    # Remaining Gothenburg Annas avoid the profile ages so each profile stays
    # the unique (street, age) match within the city.
    for _ in range(LARGE_GOTHENBURG_ANNAS - len(ANNA_PROFILES)):
        age = rng.randint(18, 90)
        while age in _PROFILE_AGES:
            age = rng.randint(18, 90)
        add(
            ANNA_NAME,
            ANNA_CITY,
            rng.choice(_STREETS),
            str(rng.randint(1, 60)),
            age,
            _fresh_phone(rng, phones, "031"),
        )

    for _ in range(LARGE_ANNA_COUNT - LARGE_GOTHENBURG_ANNAS):
        add(
            ANNA_NAME,
            rng.choice(_OTHER_CITIES),
            rng.choice(_STREETS),
            str(rng.randint(1, 60)),
            rng.randint(18, 90),
            _fresh_phone(rng, phones, "08"),
        )

    for _ in range(_LARGE_FILLER_COUNT):
        name = f"{rng.choice(_FILLER_FIRST)} {rng.choice(_FILLER_LAST)}"
        city = rng.choice((ANNA_CITY,) + _OTHER_CITIES)
        add(
            name,
            city,
            rng.choice(_STREETS),
            str(rng.randint(1, 60)),
            rng.randint(18, 90),
            _fresh_phone(rng, phones, "046"),
        )

    return DirectoryKb(entities)
