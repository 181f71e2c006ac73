from __future__ import annotations

from dataclasses import replace

import pytest
from hypothesis import given, settings

from qsa.errors import UnvalidatedModelError
from qsa.model import (
    STRUCTURAL_CODES,
    Branch,
    DecisionModel,
    DesignArea,
    Direction,
    Gateway,
    GatewayKind,
    ModelMeta,
    Pattern,
    Severity,
    ensure_traversable,
    impacts_from,
    qa_usage,
    reachable_patterns,
    validate_model,
)

from .generators import tree_models


def baseline() -> DecisionModel:
    """A small valid model the mutation tests below each break one way."""
    return DecisionModel(
        area=DesignArea.COMMUNICATION,
        start="g1",
        gateways=(
            Gateway(
                "g1",
                GatewayKind.EXCLUSIVE,
                "Which route?",
                (Branch("a", "direct", "p1"), Branch("b", "mediated", "g2")),
            ),
            Gateway(
                "g2",
                GatewayKind.INCLUSIVE,
                "Which concerns?",
                (Branch("x", "performance", "p2"), Branch("y", "scale", "p3")),
            ),
        ),
        patterns=(
            Pattern("p1", "P1", impacts_from(improves=("security",))),
            Pattern(
                "p2",
                "P2",
                impacts_from(improves=("performance",), degrades=("cost",)),
                complements=("p3",),
            ),
            Pattern(
                "p3",
                "P3",
                impacts_from(improves=("scalability",)),
                complements=("p2",),
                next="p4",
            ),
            Pattern("p4", "P4", impacts_from(degrades=("complexity",))),
        ),
        meta=ModelMeta(title="Baseline", version="1", sources=("test",)),
    )


def mutate(model: DecisionModel, **changes) -> DecisionModel:
    return replace(model, **changes)


def swap_pattern(model: DecisionModel, pattern: Pattern) -> DecisionModel:
    patterns = tuple(pattern if p.id == pattern.id else p for p in model.patterns)
    return replace(model, patterns=patterns)


def swap_gateway(model: DecisionModel, gateway: Gateway) -> DecisionModel:
    gateways = tuple(gateway if g.id == gateway.id else g for g in model.gateways)
    return replace(model, gateways=gateways)


def test_baseline_is_clean():
    report = validate_model(baseline())
    assert report.findings == ()
    assert report.ok


def error_codes(model: DecisionModel) -> set[str]:
    return {f.code for f in validate_model(model).errors()}


def test_duplicate_id_detected():
    m = baseline()
    m = mutate(m, patterns=m.patterns + (Pattern("p1", "Clone"),))
    assert error_codes(m) == {"duplicate-id"}


def test_missing_start_suppresses_reachability_noise():
    m = mutate(baseline(), start="nope")
    report = validate_model(m)
    assert {f.code for f in report.errors()} == {"missing-start"}
    assert "unreachable-node" not in report.codes()


def test_dangling_branch_target():
    m = baseline()
    g2 = m.gateway_map["g2"]
    m = swap_gateway(m, replace(g2, branches=g2.branches + (Branch("z", "?", "ghost"),)))
    assert error_codes(m) == {"dangling-target"}


def test_dangling_next_target():
    m = baseline()
    m = swap_pattern(m, replace(m.pattern_map["p4"], next="ghost"))
    assert error_codes(m) == {"dangling-target"}


def test_cycle_detected_with_path():
    m = baseline()
    m = swap_pattern(m, replace(m.pattern_map["p4"], next="g2"))
    report = validate_model(m)
    assert {f.code for f in report.errors()} == {"cycle"}
    (finding,) = report.errors()
    assert " -> " in finding.message


def test_exclusive_gateway_needs_two_branches():
    m = baseline()
    m = swap_pattern(m, replace(m.pattern_map["p1"], next="g3"))
    m = mutate(
        m,
        gateways=m.gateways
        + (Gateway("g3", GatewayKind.EXCLUSIVE, "?", (Branch("x", "c", "p2"),)),),
    )
    assert error_codes(m) == {"exclusive-needs-two"}


def test_gateway_needs_branch():
    m = baseline()
    m = swap_pattern(m, replace(m.pattern_map["p1"], next="g3"))
    m = mutate(m, gateways=m.gateways + (Gateway("g3", GatewayKind.INCLUSIVE, "?", ()),))
    assert error_codes(m) == {"gateway-needs-branch"}


def test_branchless_exclusive_fires_both_codes():
    m = baseline()
    m = swap_pattern(m, replace(m.pattern_map["p1"], next="g3"))
    m = mutate(m, gateways=m.gateways + (Gateway("g3", GatewayKind.EXCLUSIVE, "?", ()),))
    assert error_codes(m) == {"gateway-needs-branch", "exclusive-needs-two"}


def test_duplicate_branch_label():
    m = baseline()
    g2 = m.gateway_map["g2"]
    m = swap_gateway(m, replace(g2, branches=g2.branches + (Branch("x", "again", "p2"),)))
    assert error_codes(m) == {"duplicate-branch-label"}


def test_unreachable_node_is_content_error():
    m = baseline()
    m = mutate(m, patterns=m.patterns + (Pattern("p9", "Island"),))
    report = validate_model(m)
    assert {f.code for f in report.errors()} == {"unreachable-node"}
    assert not report.ok
    # Content errors do not block traversal.
    assert ensure_traversable(m).codes() == {"unreachable-node"}


def test_duplicate_impact():
    m = baseline()
    m = swap_pattern(
        m,
        replace(
            m.pattern_map["p1"],
            impacts=impacts_from(improves=("security", "security")),
        ),
    )
    assert error_codes(m) == {"duplicate-impact"}


def test_conflicting_impact():
    m = baseline()
    m = swap_pattern(
        m,
        replace(
            m.pattern_map["p1"],
            impacts=impacts_from(improves=("security",), degrades=("security",)),
        ),
    )
    assert error_codes(m) == {"conflicting-impact"}


def test_unknown_attribute():
    m = baseline()
    m = swap_pattern(
        m, replace(m.pattern_map["p1"], impacts=impacts_from(improves=("velocity",)))
    )
    assert error_codes(m) == {"unknown-attribute"}


def test_dangling_complement_does_not_also_warn_asymmetric():
    m = baseline()
    m = swap_pattern(m, replace(m.pattern_map["p1"], complements=("ghost",)))
    report = validate_model(m)
    assert {f.code for f in report.errors()} == {"dangling-complement"}
    assert report.warnings() == ()


def test_asymmetric_complement_is_warning_only():
    m = baseline()
    m = swap_pattern(m, replace(m.pattern_map["p3"], complements=()))
    report = validate_model(m)
    assert report.ok
    assert {f.code for f in report.warnings()} == {"asymmetric-complements"}
    assert report.warnings()[0].node == "p2"


def test_findings_sorted_and_deterministic():
    m = baseline()
    m = mutate(m, start="nope")
    m = swap_pattern(m, replace(m.pattern_map["p1"], impacts=impacts_from(improves=("velocity",))))
    first, second = validate_model(m), validate_model(m)
    assert first == second
    keys = [(f.node or "", f.code, f.message) for f in first.findings]
    assert keys == sorted(keys)


def test_render_format():
    report = validate_model(mutate(baseline(), start="nope"))
    assert report.render() == "error: missing-start: start node 'nope' does not exist"
    m = baseline()
    m = swap_pattern(m, replace(m.pattern_map["p3"], complements=()))
    line = validate_model(m).render()
    assert line.startswith("warning: asymmetric-complements at p2: ")


def test_structural_codes_partition():
    assert STRUCTURAL_CODES == {
        "duplicate-id",
        "missing-start",
        "dangling-target",
        "cycle",
        "exclusive-needs-two",
        "gateway-needs-branch",
        "duplicate-branch-label",
    }
    content = {
        "unreachable-node",
        "unknown-attribute",
        "conflicting-impact",
        "duplicate-impact",
        "dangling-complement",
    }
    assert not (STRUCTURAL_CODES & content)


def test_ensure_traversable_raises_on_structural_error():
    m = mutate(baseline(), start="nope")
    with pytest.raises(UnvalidatedModelError) as exc_info:
        ensure_traversable(m)
    assert exc_info.value.report is not None
    assert "missing-start" in str(exc_info.value)


def test_ensure_traversable_passes_baseline():
    assert ensure_traversable(baseline()).ok


def test_reachable_patterns_baseline():
    assert reachable_patterns(baseline()) == ("p1", "p2", "p3", "p4")


def test_reachable_patterns_requires_traversable():
    with pytest.raises(UnvalidatedModelError):
        reachable_patterns(mutate(baseline(), start="nope"))


def test_builtin_models_fully_reachable(catalog):
    for area in catalog.areas:
        model = catalog.model(area)
        assert validate_model(model).findings == ()
        assert set(reachable_patterns(model)) == set(model.pattern_map)


def test_qa_usage_partitions_reachable_impacts(catalog):
    for area in catalog.areas:
        model = catalog.model(area)
        usage = qa_usage(model)
        seen: set[tuple[str, str, Direction]] = set()
        for attr, use in usage.items():
            assert not (set(use.improved_by) & set(use.degraded_by))
            assert list(use.improved_by) == sorted(use.improved_by)
            assert list(use.degraded_by) == sorted(use.degraded_by)
            for pid in use.improved_by:
                seen.add((attr, pid, Direction.IMPROVES))
            for pid in use.degraded_by:
                seen.add((attr, pid, Direction.DEGRADES))
        expected = {
            (imp.attribute, pat.id, imp.direction)
            for pat in model.patterns
            for imp in pat.impacts
        }
        assert seen == expected


def test_qa_usage_excludes_unreachable_patterns():
    m = baseline()
    m = mutate(
        m,
        patterns=m.patterns
        + (Pattern("p9", "Island", impacts_from(improves=("usability",))),),
    )
    assert "usability" not in qa_usage(m)


@given(model=tree_models())
@settings(max_examples=60, deadline=None)
def test_generated_tree_models_are_traversable(model):
    report = validate_model(model)
    assert not {f.code for f in report.errors()} & STRUCTURAL_CODES
    assert "unreachable-node" not in report.codes()
    assert set(reachable_patterns(model)) == set(model.pattern_map)


def test_design_area_roundtrip():
    for area in DesignArea:
        assert DesignArea.from_id(area.value) is area
        assert str(area) == area.value
    with pytest.raises(ValueError, match="unknown design area"):
        DesignArea.from_id("cooking")


def test_edges_from_order_and_fallbacks():
    m = baseline()
    assert m.edges_from("g1") == ("p1", "g2")
    assert m.edges_from("p3") == ("p4",)
    assert m.edges_from("p1") == ()
    assert m.edges_from("ghost") == ()


def test_severity_and_finding_shapes():
    assert str(Severity.ERROR) == "error"
    report = validate_model(mutate(baseline(), start="nope"))
    finding = report.findings[0]
    assert finding.node is None
    assert finding.severity is Severity.ERROR
