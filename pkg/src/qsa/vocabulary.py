"""Controlled vocabulary of quality attributes.

Every impact in a decision model refers to one of these attributes by its
canonical kebab-case id.  Aliases cover the spelled-out and inverted forms
that appear in source material ("cost efficiency", "low gate complexity"),
and each alias resolves to exactly one attribute.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class QualityAttribute:
    """One quality attribute: canonical id, display name, and known aliases."""

    id: str
    display_name: str
    aliases: tuple[str, ...] = ()
    polarity_note: str | None = None


@dataclass(frozen=True)
class Vocabulary:
    """Immutable set of quality attributes with alias lookup."""

    attributes: tuple[QualityAttribute, ...]
    _by_name: dict[str, str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        by_name: dict[str, str] = {}
        for attr in self.attributes:
            for name in (attr.id, *attr.aliases):
                key = name.lower()
                if key in by_name and by_name[key] != attr.id:
                    raise ValueError(
                        f"name {name!r} is claimed by both "
                        f"{by_name[key]!r} and {attr.id!r}"
                    )
                by_name[key] = attr.id
        object.__setattr__(self, "_by_name", by_name)

    @property
    def ids(self) -> frozenset[str]:
        return frozenset(attr.id for attr in self.attributes)

    def __contains__(self, attribute_id: str) -> bool:
        return any(attr.id == attribute_id for attr in self.attributes)

    def get(self, attribute_id: str) -> QualityAttribute | None:
        for attr in self.attributes:
            if attr.id == attribute_id:
                return attr
        return None

    def resolve(self, name: str) -> str | None:
        """Map a name or alias to its canonical attribute id, or None."""
        return self._by_name.get(name.lower())


def _qa(
    id: str,
    display_name: str,
    *aliases: str,
    polarity_note: str | None = None,
) -> QualityAttribute:
    extra: list[str] = list(aliases)
    spaced = id.replace("-", " ")
    if spaced != id and spaced not in extra:
        extra.append(spaced)
    return QualityAttribute(id, display_name, tuple(extra), polarity_note)


#: Attributes used across the six built-in decision models.  Polarity notes
#: flag attributes whose source phrasing is inverted: "improves cost" here
#: means the cost burden goes down, never up.
BUILTIN_VOCABULARY = Vocabulary(
    (
        _qa("accuracy", "Accuracy"),
        _qa("adaptability", "Adaptability"),
        _qa("availability", "Availability"),
        _qa(
            "capacity",
            "Capacity",
            "limited capacity",
            polarity_note="degrading capacity means data capacity is limited",
        ),
        _qa("compatibility", "Compatibility"),
        _qa(
            "complexity",
            "Complexity",
            "implementation complexity",
            polarity_note="improving complexity means the system gets simpler",
        ),
        _qa("configurability", "Configurability"),
        _qa(
            "cost",
            "Cost",
            "cost-efficiency",
            "cost efficiency",
            polarity_note="improving cost means the cost burden drops",
        ),
        _qa("discoverability", "Discoverability"),
        _qa("ease-of-implementation", "Ease of Implementation"),
        _qa("efficiency", "Efficiency"),
        _qa(
            "effort",
            "Effort",
            polarity_note="improving effort means less work is required",
        ),
        _qa(
            "error-rate",
            "Error Rate",
            "error",
            "error rates",
            polarity_note="improving error-rate means fewer errors",
        ),
        _qa("extensibility", "Extensibility"),
        _qa("fault-detection", "Fault Detection"),
        _qa("fault-diagnosis", "Fault Diagnosis"),
        _qa("fault-isolation", "Fault Isolation"),
        _qa("fault-recovery", "Fault Recovery"),
        _qa("fault-tolerance", "Fault Tolerance"),
        _qa("flexibility", "Flexibility"),
        _qa("functionality", "Functionality"),
        _qa(
            "gate-complexity",
            "Gate Complexity",
            "low gate complexity",
            polarity_note="improving gate-complexity means fewer or simpler gates",
        ),
        _qa("interoperability", "Interoperability"),
        _qa(
            "latency",
            "Latency",
            "latency issues",
            polarity_note="improving latency means responses get faster",
        ),
        _qa("loss-tolerance", "Loss Tolerance"),
        _qa("maintainability", "Maintainability"),
        _qa("modularity", "Modularity"),
        _qa("performance", "Performance"),
        _qa("portability", "Portability"),
        _qa("precision", "Precision"),
        _qa("reliability", "Reliability"),
        _qa("reusability", "Reusability"),
        _qa("scalability", "Scalability"),
        _qa("security", "Security"),
        _qa("testability", "Testability"),
        _qa("usability", "Usability"),
    )
)
