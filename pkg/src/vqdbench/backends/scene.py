"""Scene-graph vision mock: detect, depth, similarity, and VQA from fixtures.

A scene graph fully describes one image: objects with boxes, attributes,
and depths, plus lookup tables for whole-scene and per-object questions.
Region queries resolve to the dominant object, the one with the largest
fraction of its own box inside the query region (ties go to the smaller
object id).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .base import (
    Backend,
    BackendError,
    BaseBackend,
    Box,
    FixtureError,
    OP_DEPTH,
    OP_DETECT,
    OP_SCORE,
    OP_SIMILARITY,
    OP_VQA,
    _parse_box,
)

FALLBACK_ANSWER = "unknown"


def box_area(box: Box) -> float:
    left, lower, right, upper = box
    return max(0.0, right - left) * max(0.0, upper - lower)


def box_intersection(a: Box, b: Box) -> Box:
    return (max(a[0], b[0]), max(a[1], b[1]), min(a[2], b[2]), min(a[3], b[3]))


@dataclass(frozen=True, slots=True)
class SceneObject:
    id: int
    category: str
    box: Box
    attributes: frozenset[str] = frozenset()
    depth: float = 1.0

    def to_record(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "category": self.category,
            "box": list(self.box),
            "attributes": sorted(self.attributes),
            "depth": self.depth,
        }


@dataclass(frozen=True)
class SceneGraph:
    """Ground truth for one image."""

    image_ref: str
    width: float
    height: float
    objects: tuple[SceneObject, ...] = ()
    scene_qa: Mapping[str, str] = field(default_factory=dict)
    patch_qa: Mapping[tuple[int, str], str] = field(default_factory=dict)
    caption: str = ""

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"scene {self.image_ref!r}: extent must be positive")
        ids = [o.id for o in self.objects]
        if len(set(ids)) != len(ids):
            raise ValueError(f"scene {self.image_ref!r}: object ids must be unique")
        for obj in self.objects:
            left, lower, right, upper = obj.box
            if not (0 <= left < right <= self.width and 0 <= lower < upper <= self.height):
                raise ValueError(
                    f"scene {self.image_ref!r}: object {obj.id} box {obj.box} must have "
                    f"positive area within the {self.width}x{self.height} extent"
                )

    @property
    def extent_box(self) -> Box:
        return (0.0, 0.0, self.width, self.height)

    def dominant_object(self, region: Box) -> SceneObject | None:
        """Object with the largest own-area fraction inside region.

        Ties resolve to the smaller object id. None when nothing overlaps.
        """
        best: SceneObject | None = None
        best_fraction = 0.0
        for obj in sorted(self.objects, key=lambda o: o.id):
            fraction = box_area(box_intersection(obj.box, region)) / box_area(obj.box)
            if fraction > best_fraction:
                best = obj
                best_fraction = fraction
        return best

    def to_record(self) -> dict[str, Any]:
        return {
            "image_ref": self.image_ref,
            "width": self.width,
            "height": self.height,
            "objects": [o.to_record() for o in self.objects],
            "scene_qa": dict(self.scene_qa),
            "patch_qa": [
                {"object_id": obj_id, "question": q, "answer": a}
                for (obj_id, q), a in self.patch_qa.items()
            ],
            "caption": self.caption,
        }

    @classmethod
    def from_record(cls, record: dict) -> "SceneGraph":
        objects = tuple(
            SceneObject(
                id=int(o["id"]),
                category=str(o["category"]),
                box=_parse_box(o["box"], "scene object"),
                attributes=frozenset(o.get("attributes", ())),
                depth=float(o.get("depth", 1.0)),
            )
            for o in record.get("objects", ())
        )
        patch_qa = {
            (int(row["object_id"]), str(row["question"])): str(row["answer"])
            for row in record.get("patch_qa", ())
        }
        return cls(
            image_ref=str(record["image_ref"]),
            width=float(record["width"]),
            height=float(record["height"]),
            objects=objects,
            scene_qa={str(k): str(v) for k, v in record.get("scene_qa", {}).items()},
            patch_qa=patch_qa,
            caption=str(record.get("caption", "")),
        )


class SceneOracle(BaseBackend):
    """Vision backend answering entirely from scene-graph fixtures."""

    def __init__(self, scenes: Iterable[SceneGraph], backend_id: str = "scene-oracle"):
        super().__init__(
            backend_id, frozenset({OP_VQA, OP_DETECT, OP_DEPTH, OP_SIMILARITY})
        )
        self._scenes: dict[str, SceneGraph] = {}
        for scene in scenes:
            if scene.image_ref in self._scenes:
                raise ValueError(f"duplicate scene for image_ref {scene.image_ref!r}")
            self._scenes[scene.image_ref] = scene

    def scene_for(self, image_ref: str) -> SceneGraph:
        scene = self._scenes.get(image_ref)
        if scene is None:
            raise FixtureError(f"{self.backend_id}: no scene for image_ref {image_ref!r}")
        return scene

    def extent_of(self, image_ref: str) -> tuple[float, float] | None:
        scene = self._scenes.get(image_ref)
        return (scene.width, scene.height) if scene else None

    def _region(self, scene: SceneGraph, request: dict) -> Box:
        raw = request.get("box")
        if raw is None:
            return scene.extent_box
        box = _parse_box(raw, "region")
        if box_area(box) <= 0:
            raise BackendError(f"region {box} has no area")
        return box

    def _serve(self, op: str, request: dict) -> dict:
        scene = self.scene_for(str(request.get("image_ref", "")))
        if op == OP_VQA:
            return {"answer": self._answer_vqa(scene, request)}
        if op == OP_DETECT:
            category = str(request.get("category", "")).casefold()
            boxes = sorted(
                (o.box for o in scene.objects if o.category.casefold() == category),
                key=lambda b: (b[0], b[1], b[2], b[3]),
            )
            return {"boxes": [list(b) for b in boxes]}
        if op == OP_DEPTH:
            region = self._region(scene, request)
            obj = scene.dominant_object(region)
            if obj is None:
                raise BackendError(f"no object overlaps region {region}")
            return {"depth": obj.depth}
        if op == OP_SIMILARITY:
            texts = request.get("texts")
            if not isinstance(texts, list) or not texts:
                raise BackendError("similarity requires a non-empty texts list")
            region = self._region(scene, request)
            obj = scene.dominant_object(region)
            return {"scores": [self._match_score(obj, str(t)) for t in texts]}
        raise AssertionError(op)

    def _answer_vqa(self, scene: SceneGraph, request: dict) -> str:
        question = str(request.get("question", ""))
        if request.get("box") is None:
            return scene.scene_qa.get(question, FALLBACK_ANSWER)
        region = self._region(scene, request)
        obj = scene.dominant_object(region)
        if obj is None:
            return FALLBACK_ANSWER
        return scene.patch_qa.get((obj.id, question), FALLBACK_ANSWER)

    @staticmethod
    def _match_score(obj: SceneObject | None, text: str) -> float:
        if obj is None:
            return 0.0
        needle = text.casefold()
        haystack = {obj.category.casefold(), *(a.casefold() for a in obj.attributes)}
        return 1.0 if needle in haystack else 0.0


class MockVLM(BaseBackend):
    """Composite VLM mock: scene-backed vqa plus scripted scoring.

    Scoring rules match on prompt text only; any image_ref in the request
    is ignored, since fixture prompts already embed the question.
    """

    def __init__(
        self,
        oracle: SceneOracle | None,
        scorer: Backend | None = None,
        backend_id: str = "vlm",
    ):
        ops = set()
        if oracle is not None:
            ops.add(OP_VQA)
        if scorer is not None:
            ops.add(OP_SCORE)
        super().__init__(backend_id, frozenset(ops))
        self._oracle = oracle
        self._scorer = scorer

    def extent_of(self, image_ref: str) -> tuple[float, float] | None:
        if self._oracle is None:
            return None
        return self._oracle.extent_of(image_ref)

    def _serve(self, op: str, request: dict) -> dict:
        if op == OP_VQA:
            assert self._oracle is not None
            scene = self._oracle.scene_for(str(request.get("image_ref", "")))
            return {"answer": self._oracle._answer_vqa(scene, request)}
        assert self._scorer is not None
        request = {k: v for k, v in request.items() if k != "image_ref"}
        return self._scorer.call(OP_SCORE, request)
