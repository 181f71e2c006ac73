from __future__ import annotations

import hashlib
import json
import shutil
from decimal import Decimal
from importlib import resources
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsa import load_builtin, load_dir
from qsa.catalog import QualityAssessment, slr_include, slr_quality_score
from qsa.errors import CatalogError, NoModelsFoundError, UnknownAreaError

EXPECTED_COUNTS = {
    "communication": 18,
    "decomposition": 7,
    "data-processing": 12,
    "fault-tolerance": 8,
    "integration-optimization": 9,
    "algorithm-implementation": 9,
}

SCORE_VALUES = (Decimal("0"), Decimal("0.5"), Decimal("1"))


def assets_dir() -> Path:
    return Path(str(resources.files("qsa.catalog") / "assets"))


def normalize_name(name: str) -> str:
    text = name.strip().lower()
    for suffix in (" pattern", " strategy"):
        if text.endswith(suffix):
            text = text[: -len(suffix)]
    return text


# --- catalog shape -----------------------------------------------------------


def test_area_pattern_counts(catalog):
    assert catalog.areas == tuple(sorted(EXPECTED_COUNTS))
    for area, expected in EXPECTED_COUNTS.items():
        assert len(catalog.model(area).patterns) == expected, area
    assert catalog.manifest.total == 63
    assert sum(len(catalog.model(a).patterns) for a in catalog.areas) == 63


def test_manifest_matches_loaded_models(catalog):
    for entry in catalog.manifest.entries:
        model = catalog.model(entry.area)
        assert entry.pattern_count == len(model.patterns)
        assert entry.sources == model.meta.sources
        raw = (assets_dir() / entry.file).read_bytes()
        assert entry.sha256 == hashlib.sha256(raw).hexdigest()
    assert catalog.manifest.checksum == catalog.checksum


def test_unknown_area_raises(catalog):
    with pytest.raises(UnknownAreaError):
        catalog.model("cooking")


def test_every_pattern_cites_a_source(catalog):
    for area in catalog.areas:
        for pattern in catalog.model(area).patterns:
            assert pattern.refs, f"{area}/{pattern.id}"


def test_load_builtin_is_cached():
    assert load_builtin() is load_builtin()


def test_named_patterns_present(catalog):
    communication = catalog.model("communication")
    gateway_pattern = communication.pattern_map["quantum-api-gateway"]
    assert gateway_pattern.name == "Quantum API Gateway"
    assert gateway_pattern.summary.startswith(
        "Provide a unified interface for accessing quantum services"
    )
    fault_tolerance = catalog.model("fault-tolerance")
    sparing = fault_tolerance.pattern_map["sparing"]
    assert normalize_name(sparing.name) == "sparing"
    assert "fault-recovery" in sparing.improves()


def test_cross_area_duplicates_point_at_canonical_definitions(catalog):
    expected = {
        ("algorithm-implementation", "quantum-classic-split"): (
            "decomposition",
            "quantum-classic-split",
        ),
        ("integration-optimization", "decorator-design"): (
            "fault-tolerance",
            "decorator-design",
        ),
        ("integration-optimization", "quantum-broadcast"): (
            "data-processing",
            "quantum-broadcast",
        ),
    }
    found = {}
    for area in catalog.areas:
        for pattern in catalog.model(area).patterns:
            if pattern.canonical is not None:
                found[(area, pattern.id)] = pattern.canonical
    assert found == expected
    for (_, pid), (canonical_area, canonical_id) in expected.items():
        target = catalog.model(canonical_area).pattern_map[canonical_id]
        assert target.canonical is None  # canonical occurrences don't chain
        assert normalize_name(target.name) == normalize_name(
            catalog.model(_area_of(pid)).pattern_map[pid].name
        )


def _area_of(pattern_id: str) -> str:
    return {
        "quantum-classic-split": "algorithm-implementation",
        "decorator-design": "integration-optimization",
        "quantum-broadcast": "integration-optimization",
    }[pattern_id]


# --- transcription audit -----------------------------------------------------


def audit_table() -> dict[str, dict[str, dict]]:
    raw = json.loads((assets_dir() / "audit.json").read_text(encoding="utf-8"))
    return {k: v for k, v in raw.items() if not k.startswith("_")}


def test_audit_covers_catalog_exactly(catalog):
    audit = audit_table()
    assert set(audit) == set(catalog.areas)
    for area in catalog.areas:
        model = catalog.model(area)
        assert set(audit[area]) == set(model.pattern_map), area


def test_impacts_match_audit_row_for_row(catalog):
    audit = audit_table()
    for area in catalog.areas:
        model = catalog.model(area)
        for pid, row in audit[area].items():
            pattern = model.pattern_map[pid]
            assert set(pattern.improves()) == set(row["improves"]), f"{area}/{pid}"
            assert set(pattern.degrades()) == set(row["degrades"]), f"{area}/{pid}"


def test_names_match_audit_modulo_suffix(catalog):
    audit = audit_table()
    for area in catalog.areas:
        model = catalog.model(area)
        for pid, row in audit[area].items():
            assert normalize_name(model.pattern_map[pid].name) == normalize_name(
                row["table_name"]
            ), f"{area}/{pid}"


def test_audit_hedges_surface_as_constraints(catalog):
    audit = audit_table()
    for area in catalog.areas:
        model = catalog.model(area)
        for pid, row in audit[area].items():
            for hedge in row.get("hedges", ()):
                if "constraint" in hedge:
                    assert model.pattern_map[pid].constraints, f"{area}/{pid}"


# --- custom catalog loading --------------------------------------------------


def test_load_dir_roundtrips_a_copied_asset(tmp_path, catalog):
    shutil.copy(assets_dir() / "decomposition.qdm", tmp_path / "decomposition.qdm")
    loaded = load_dir(tmp_path)
    assert loaded.areas == ("decomposition",)
    assert loaded.model("decomposition") == catalog.model("decomposition")
    assert loaded.manifest.total == 7


def test_load_dir_missing_or_empty(tmp_path):
    with pytest.raises(NoModelsFoundError):
        load_dir(tmp_path / "nope")
    with pytest.raises(NoModelsFoundError):
        load_dir(tmp_path)
    (tmp_path / "note.txt").write_text("not a model")
    with pytest.raises(NoModelsFoundError):
        load_dir(tmp_path)


def test_load_dir_rejects_invalid_document(tmp_path):
    (tmp_path / "bad.qdm").write_text("model communication \"X\" {\n  start -> ghost\n}\n")
    with pytest.raises(CatalogError):
        load_dir(tmp_path)


def test_load_dir_rejects_duplicate_area(tmp_path):
    for name in ("one.qdm", "two.qdm"):
        shutil.copy(assets_dir() / "decomposition.qdm", tmp_path / name)
    with pytest.raises(CatalogError, match="decomposition"):
        load_dir(tmp_path)


def test_load_dir_rejects_content_errors(tmp_path):
    source = (assets_dir() / "decomposition.qdm").read_text(encoding="utf-8")
    # Duplicate one improves entry: parse reports it, loading must refuse.
    broken = source.replace("improves performance", "improves performance, performance", 1)
    assert broken != source
    (tmp_path / "decomposition.qdm").write_text(broken, encoding="utf-8")
    with pytest.raises(CatalogError):
        load_dir(tmp_path)


# --- screening-score utilities ----------------------------------------------


def test_quality_score_full_marks():
    assessment = QualityAssessment.of((1, 1, 1, 1, 1), (1, 1, 1))
    assert slr_quality_score(assessment) == Decimal(14)


def test_quality_score_zero():
    assert slr_quality_score(QualityAssessment.of((0,) * 5, (0,) * 3)) == 0


def test_quality_score_mixed():
    assessment = QualityAssessment.of((0.5, 0, 0, 0, 0), (0, 0, 0.5))
    assert slr_quality_score(assessment) == Decimal("2.0")


def test_inclusion_threshold():
    assert slr_include(Decimal("1.5"))
    assert not slr_include(Decimal("1.4999"))
    assert slr_include(14)
    assert not slr_include(0)


def test_assessment_rejects_bad_values():
    with pytest.raises(ValueError):
        QualityAssessment.of((0.25, 0, 0, 0, 0), (0, 0, 0))
    with pytest.raises(ValueError):
        QualityAssessment.of((0, 0, 0, 0), (0, 0, 0))
    with pytest.raises(ValueError):
        QualityAssessment.of((0, 0, 0, 0, 0), (0, 0, 0, 0))
    with pytest.raises(ValueError):
        QualityAssessment.of(("x", 0, 0, 0, 0), (0, 0, 0))


@given(
    generic=st.tuples(*[st.sampled_from(SCORE_VALUES)] * 5),
    specific=st.tuples(*[st.sampled_from(SCORE_VALUES)] * 3),
    data=st.data(),
)
@settings(max_examples=80, deadline=None)
def test_quality_score_monotone_and_specific_weighted_triple(generic, specific, data):
    base = slr_quality_score(QualityAssessment.of(generic, specific))
    # Raising any single component never lowers the score, and a specific
    # bump is worth exactly three times a generic bump of the same size.
    slot = data.draw(st.integers(min_value=0, max_value=7))
    bump = data.draw(st.sampled_from((Decimal("0.5"), Decimal("1"))))
    if slot < 5:
        values = list(generic)
        values[slot] = min(Decimal(1), values[slot] + bump)
        delta = values[slot] - generic[slot]
        raised = slr_quality_score(QualityAssessment.of(values, specific))
        assert raised == base + delta
    else:
        values = list(specific)
        values[slot - 5] = min(Decimal(1), values[slot - 5] + bump)
        delta = values[slot - 5] - specific[slot - 5]
        raised = slr_quality_score(QualityAssessment.of(generic, values))
        assert raised == base + 3 * delta
    assert raised >= base
