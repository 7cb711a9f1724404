"""Prompt assembly, completion client and output extraction."""

from .client import (
    API_KEY_ENV,
    DEFAULT_MODEL,
    Backend,
    ClientConfig,
    CompletionRequest,
    ConfigError,
    FixtureStore,
    LLMError,
    MalformedResponse,
    MissingFixture,
    TransportError,
    complete,
    http_transport,
)
from .extract import NoPlanningFileFound, extract_item_ids, extract_one, extract_pddl, extract_subgoals
from .prompts import (
    DecompositionExample,
    DomainExample,
    ProblemExample,
    PromptError,
    PromptTemplate,
    PruningExample,
    build_decomposition_prompt,
    build_domain_prompt,
    build_problem_prompt,
    build_pruning_prompt,
)

__all__ = [
    "API_KEY_ENV",
    "DEFAULT_MODEL",
    "Backend",
    "ClientConfig",
    "CompletionRequest",
    "ConfigError",
    "FixtureStore",
    "LLMError",
    "MalformedResponse",
    "MissingFixture",
    "TransportError",
    "complete",
    "http_transport",
    "NoPlanningFileFound",
    "extract_item_ids",
    "extract_one",
    "extract_pddl",
    "extract_subgoals",
    "DecompositionExample",
    "DomainExample",
    "ProblemExample",
    "PromptError",
    "PromptTemplate",
    "PruningExample",
    "build_decomposition_prompt",
    "build_domain_prompt",
    "build_problem_prompt",
    "build_pruning_prompt",
]
