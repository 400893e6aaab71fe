"""Model backends: one call protocol, served by mocks, caches, or HTTP."""

from .base import (
    ALL_OPS,
    OP_COMPLETE,
    OP_DEPTH,
    OP_DETECT,
    OP_SCORE,
    OP_SIMILARITY,
    OP_VQA,
    Backend,
    BackendError,
    BackendSuite,
    BaseBackend,
    Box,
    Completion,
    FixtureError,
    ProtocolError,
    TokenScore,
    TransportError,
    UnsupportedOperationError,
    canonical_json,
    complete,
    depth_at,
    detect,
    digest,
    image_extent,
    score_continuations,
    similarity,
    token,
    tokens_to_wire,
    vqa,
)
from .cache import CachedBackend, CallCache, cached
from .fixtures import (
    cached_suite,
    mock_suite,
    remote_suite,
    suite_from_selector,
    suite_from_world,
)
from .remote import RemoteBackend
from .scene import MockVLM, SceneGraph, SceneObject, SceneOracle
from .scripted import CompletionRule, MatchRule, ScoreRule, ScriptedLM

__all__ = [
    "ALL_OPS",
    "OP_COMPLETE",
    "OP_DEPTH",
    "OP_DETECT",
    "OP_SCORE",
    "OP_SIMILARITY",
    "OP_VQA",
    "Backend",
    "BackendError",
    "BackendSuite",
    "BaseBackend",
    "Box",
    "CachedBackend",
    "CallCache",
    "Completion",
    "CompletionRule",
    "FixtureError",
    "MatchRule",
    "MockVLM",
    "ProtocolError",
    "RemoteBackend",
    "SceneGraph",
    "SceneObject",
    "SceneOracle",
    "ScoreRule",
    "ScriptedLM",
    "TokenScore",
    "TransportError",
    "UnsupportedOperationError",
    "cached",
    "cached_suite",
    "canonical_json",
    "complete",
    "depth_at",
    "detect",
    "digest",
    "image_extent",
    "mock_suite",
    "remote_suite",
    "score_continuations",
    "similarity",
    "suite_from_selector",
    "suite_from_world",
    "token",
    "tokens_to_wire",
    "vqa",
]
