"""Request bodies accepted by the HTTP API.

Weights are declared as :class:`~decimal.Decimal` so the JSON number a
client sends is preserved digit-for-digit; scores computed from them are
returned as decimal strings for the same reason.  Shape errors raised
here surface as 400 ``malformed-body``; domain errors (unknown gateway,
arity violations, negative weights, …) are left to the engine so they
surface as 422 with the engine's own error code.
"""

from __future__ import annotations

from decimal import Decimal

from pydantic import BaseModel, Field

Answers = dict[str, list[str]]
Weights = dict[str, Decimal]


class NextQuestionsRequest(BaseModel):
    answers: Answers = Field(default_factory=dict)


class RecommendRequest(BaseModel):
    answers: Answers = Field(default_factory=dict)
    weights: Weights = Field(default_factory=dict)
    k: int | None = Field(default=None, ge=1)


class AutoSelectRequest(BaseModel):
    weights: Weights = Field(default_factory=dict)


class CompareRequest(BaseModel):
    answers: Answers = Field(default_factory=dict)
    weights_a: Weights = Field(default_factory=dict)
    weights_b: Weights = Field(default_factory=dict)
