"""Bundled decision-model catalog and provenance utilities.

Six curated models ship as ``.qdm`` assets together with a manifest that
pins each file's pattern count and content digest.  ``load_builtin``
parses and validates the bundle (any discrepancy is reported as asset
corruption, never silently ignored); ``load_dir`` loads a user-supplied
directory of models with the same guarantees minus the manifest pinning.

The module also houses the catalog's study-inclusion quality score — the
screening formula used when the underlying pattern sources were selected
— because it is the one numeric rule the source material defines.  It is
a provenance tool, not part of the decision engine.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from ..dsl import parse
from ..errors import CatalogError, NoModelsFoundError, UnknownAreaError
from ..model import DecisionModel, DesignArea, validate_model
from ..vocabulary import BUILTIN_VOCABULARY, Vocabulary

__all__ = [
    "Catalog",
    "CatalogManifest",
    "ManifestEntry",
    "QualityAssessment",
    "load_builtin",
    "load_dir",
    "slr_include",
    "slr_quality_score",
]

_MANIFEST_FILE = "manifest.json"

_ALLOWED_SCORES = (Decimal("0"), Decimal("0.5"), Decimal("1"))
_INCLUSION_THRESHOLD = Decimal("1.5")


@dataclass(frozen=True)
class ManifestEntry:
    """Pinned facts about one bundled model file."""

    area: str
    file: str
    pattern_count: int
    sources: tuple[str, ...]
    sha256: str


@dataclass(frozen=True)
class CatalogManifest:
    entries: tuple[ManifestEntry, ...]
    total: int
    checksum: str

    def entry(self, area: str) -> ManifestEntry:
        for item in self.entries:
            if item.area == area:
                return item
        raise UnknownAreaError(f"no manifest entry for area {area!r}")


@dataclass(frozen=True)
class Catalog:
    """An immutable set of loaded decision models keyed by design area."""

    models: Mapping[str, DecisionModel]
    vocabulary: Vocabulary
    manifest: CatalogManifest

    @property
    def areas(self) -> tuple[str, ...]:
        return tuple(sorted(self.models))

    def model(self, area: str) -> DecisionModel:
        try:
            return self.models[area]
        except KeyError:
            raise UnknownAreaError(
                f"unknown design area {area!r}; available: {', '.join(self.areas)}"
            ) from None

    @property
    def checksum(self) -> str:
        return self.manifest.checksum


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _combined_checksum(entries: Iterable[ManifestEntry]) -> str:
    lines = "".join(f"{e.area}:{e.sha256}\n" for e in entries)
    return _digest(lines.encode("utf-8"))


def _parse_asset(name: str, data: bytes, vocabulary: Vocabulary) -> DecisionModel:
    result = parse(data, vocabulary)
    errors = [d for d in result.diagnostics if d.is_error]
    if errors or result.model is None:
        rendered = "; ".join(d.render() for d in errors) or "no model produced"
        raise CatalogError(f"model file {name!r} failed to parse: {rendered}")
    report = validate_model(result.model, vocabulary)
    if not report.ok:
        raise CatalogError(
            f"model file {name!r} failed validation:\n{report.render()}"
        )
    return result.model


def _build_entries(
    files: Mapping[str, bytes], models: Mapping[str, DecisionModel]
) -> tuple[ManifestEntry, ...]:
    entries = []
    by_area = {models[area].area.value: area for area in models}
    for area_id in sorted(by_area):
        file_name = by_area[area_id]
        model = models[file_name]
        entries.append(
            ManifestEntry(
                area=area_id,
                file=file_name,
                pattern_count=len(model.patterns),
                sources=model.meta.sources,
                sha256=_digest(files[file_name]),
            )
        )
    return tuple(entries)


def _check_canonical_pointers(models: Mapping[str, DecisionModel]) -> None:
    """Cross-area duplicate patterns must point at a real primary definition."""
    for area, model in sorted(models.items()):
        for pat in model.patterns:
            if pat.canonical is None:
                continue
            target_area, target_id = pat.canonical
            target_model = models.get(target_area)
            if target_model is None:
                raise CatalogError(
                    f"pattern {pat.id!r} in {area!r} points at unknown area "
                    f"{target_area!r}"
                )
            target = target_model.pattern_map.get(target_id)
            if target is None:
                raise CatalogError(
                    f"pattern {pat.id!r} in {area!r} points at missing pattern "
                    f"{target_area}/{target_id}"
                )
            if target.canonical is not None:
                raise CatalogError(
                    f"pattern {pat.id!r} in {area!r} points at "
                    f"{target_area}/{target_id}, which is itself an alias"
                )


def _assemble(
    files: Mapping[str, bytes], vocabulary: Vocabulary, *, origin: str
) -> Catalog:
    models: dict[str, DecisionModel] = {}
    by_area: dict[str, str] = {}
    for name in sorted(files):
        model = _parse_asset(name, files[name], vocabulary)
        area_id = model.area.value
        if area_id in by_area:
            raise CatalogError(
                f"area {area_id!r} defined by both {by_area[area_id]!r} and "
                f"{name!r} in {origin}"
            )
        by_area[area_id] = name
        models[name] = model

    entries = _build_entries(files, models)
    manifest = CatalogManifest(
        entries=entries,
        total=sum(e.pattern_count for e in entries),
        checksum=_combined_checksum(entries),
    )
    catalog_models = {e.area: models[e.file] for e in entries}
    return Catalog(models=catalog_models, vocabulary=vocabulary, manifest=manifest)


def _verify_builtin(catalog: Catalog, pinned: dict) -> None:
    """Compare the loaded bundle against the shipped manifest, field by field."""
    try:
        pinned_entries = {e["area"]: e for e in pinned["areas"]}
        pinned_total = pinned["total"]
        pinned_checksum = pinned["checksum"]
    except (KeyError, TypeError) as exc:
        raise CatalogError(f"bundled manifest is malformed: {exc}") from exc

    loaded = {e.area: e for e in catalog.manifest.entries}
    if set(pinned_entries) != set(loaded):
        raise CatalogError(
            "bundled manifest areas do not match shipped model files: "
            f"manifest={sorted(pinned_entries)} files={sorted(loaded)}"
        )
    for area, entry in sorted(loaded.items()):
        expected = pinned_entries[area]
        if entry.file != expected.get("file"):
            raise CatalogError(f"area {area!r}: file name drifted from manifest")
        if entry.pattern_count != expected.get("patterns"):
            raise CatalogError(
                f"area {area!r}: expected {expected.get('patterns')} patterns, "
                f"loaded {entry.pattern_count}"
            )
        if entry.sha256 != expected.get("sha256"):
            raise CatalogError(f"area {area!r}: model file digest drifted from manifest")
    if catalog.manifest.total != pinned_total:
        raise CatalogError(
            f"manifest total {pinned_total} != loaded total {catalog.manifest.total}"
        )
    if catalog.manifest.checksum != pinned_checksum:
        raise CatalogError("catalog checksum drifted from manifest")

    for area, model in sorted(catalog.models.items()):
        for pat in model.patterns:
            if not pat.refs:
                raise CatalogError(
                    f"bundled pattern {area}/{pat.id} carries no source reference"
                )


@lru_cache(maxsize=1)
def load_builtin() -> Catalog:
    """Load the six bundled models, verifying them against the manifest.

    The result is cached: assets are immutable for the life of the
    process, so every caller shares one catalog value.
    """
    root = resources.files(__package__) / "assets"
    files: dict[str, bytes] = {}
    for entry in root.iterdir():
        if entry.name.endswith(".qdm"):
            files[entry.name] = entry.read_bytes()
    if not files:
        raise CatalogError("no bundled model assets found")
    try:
        pinned = json.loads((root / _MANIFEST_FILE).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CatalogError("bundled manifest is missing") from None
    except json.JSONDecodeError as exc:
        raise CatalogError(f"bundled manifest is not valid JSON: {exc}") from exc

    catalog = _assemble(files, BUILTIN_VOCABULARY, origin="the bundled assets")
    _verify_builtin(catalog, pinned)
    _check_canonical_pointers(catalog.models)
    return catalog


def load_dir(path: str | Path, vocabulary: Vocabulary = BUILTIN_VOCABULARY) -> Catalog:
    """Load every ``.qdm`` file in ``path`` as one catalog.

    Unlike the bundled catalog there is no pinned manifest; the manifest is
    derived from the files found.  Canonical pointers may reference areas
    outside the directory, so cross-area checks are skipped.
    """
    directory = Path(path)
    if not directory.is_dir():
        raise NoModelsFoundError(f"{directory} is not a readable directory")
    files = {
        entry.name: entry.read_bytes()
        for entry in sorted(directory.iterdir())
        if entry.is_file() and entry.suffix == ".qdm"
    }
    if not files:
        raise NoModelsFoundError(f"no .qdm model files in {directory}")
    return _assemble(files, vocabulary, origin=str(directory))


@dataclass(frozen=True)
class QualityAssessment:
    """A study-screening scorecard: five generic and three specific scores.

    Each score is 0 (criterion unmet), 0.5 (partially met), or 1 (met).
    """

    generic: tuple[Decimal, Decimal, Decimal, Decimal, Decimal]
    specific: tuple[Decimal, Decimal, Decimal]

    @classmethod
    def of(cls, generic: Iterable[object], specific: Iterable[object]) -> "QualityAssessment":
        return cls(_coerce_scores(generic, "generic", 5), _coerce_scores(specific, "specific", 3))


def _coerce_scores(values: Iterable[object], label: str, arity: int) -> tuple:
    coerced = []
    for value in values:
        try:
            score = Decimal(str(value))
        except InvalidOperation:
            raise ValueError(f"{label} score {value!r} is not a number") from None
        if score not in _ALLOWED_SCORES:
            raise ValueError(f"{label} score {value!r} is not one of 0, 0.5, 1")
        coerced.append(score)
    if len(coerced) != arity:
        raise ValueError(f"expected {arity} {label} scores, got {len(coerced)}")
    return tuple(coerced)


def slr_quality_score(assessment: QualityAssessment) -> Decimal:
    """Inclusion score: the generic sum plus three times the specific sum.

    Specific criteria are weighted by a factor of three because they probe
    direct relevance rather than general study quality.
    """
    generic_sum = sum(assessment.generic, Decimal(0))
    specific_sum = sum(assessment.specific, Decimal(0))
    return generic_sum + 3 * specific_sum


def slr_include(score: Decimal | int | float | str) -> bool:
    """A study is included when its quality score reaches 1.5."""
    return Decimal(str(score)) >= _INCLUSION_THRESHOLD
