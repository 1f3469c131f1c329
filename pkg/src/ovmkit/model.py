"""Core domain types for layered activity models and variability models.

A layered model holds activities grouped into artifacts on up to three
layers (feature above functional above component), cross-layer refinements,
and material/information interactions. A variability model holds variation
points, the variants realizing them, variant-level interactions, and the
refinement edges that arrange variation points into a forest of trees.

All types are immutable values. Collections are normalized (deduplicated,
sorted by identifier) on construction, so structural equality is plain
``==`` and serialization order never depends on input order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class Layer(str, Enum):
    FEATURE = "feature"
    FUNCTIONAL = "functional"
    COMPONENT = "component"


# Layer one step up from the key; features have nothing above them.
LAYER_ABOVE: dict[Layer, Layer] = {
    Layer.COMPONENT: Layer.FUNCTIONAL,
    Layer.FUNCTIONAL: Layer.FEATURE,
}


class InteractionKind(str, Enum):
    MATERIAL = "material"
    INFORMATION = "information"


class InteractionLevel(str, Enum):
    ARTIFACT = "artifact"
    VARIANT = "variant"


class RefinementKind(str, Enum):
    FEATURE = "feature"
    FUNCTIONAL = "functional"


class BindingKind(str, Enum):
    ACTIVITY_VARIANT = "activity-variant"
    ARTIFACT_VP = "artifact-vp"


class ModelError(Exception):
    """Base class for errors raised by this package."""


@dataclass(frozen=True)
class Violation:
    """A broken invariant, reported as data rather than raised.

    ``invariant`` is a stable label naming the rule; ``subject_ids`` are the
    offending identifiers.
    """

    invariant: str
    subject_ids: tuple[str, ...]
    message: str

    def __str__(self) -> str:
        return f"{self.invariant} [{', '.join(self.subject_ids)}]: {self.message}"


@dataclass(frozen=True, order=True)
class Activity:
    id: str
    name: str
    layer: Layer
    artifact_id: str
    mandatory: bool
    group: str | None = None


@dataclass(frozen=True, order=True)
class FunctionalArtifact:
    id: str
    layer: Layer
    activity_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "activity_ids", _sorted_unique(self.activity_ids))


@dataclass(frozen=True, order=True)
class Refinement:
    """A lower-layer artifact refining an activity one layer above it."""

    child_artifact_id: str
    parent_activity_id: str
    kind: RefinementKind


@dataclass(frozen=True, order=True)
class Interaction:
    """Directed material or information flow.

    Artifact-level interactions connect activities of the same layer;
    variant-level ones connect variants of distinct variation points.
    ``requires`` marks flows known to be requires-dependencies; any such
    dependency is still an interaction, so it stays in the same set.
    """

    from_id: str
    to_id: str
    kind: InteractionKind
    level: InteractionLevel
    requires: bool = False


@dataclass(frozen=True, order=True)
class VariationPoint:
    id: str
    name: str
    level: Layer


@dataclass(frozen=True, order=True)
class Variant:
    """One selectable option of a variation point.

    ``vp_id`` is the realization dependency: every variant realizes exactly
    one variation point, so the edge is stored on the variant itself.
    """

    id: str
    name: str
    vp_id: str


@dataclass(frozen=True, order=True)
class Binding:
    """Artifact dependency: activity-to-variant or artifact-to-variation-point."""

    kind: BindingKind
    source_id: str
    target_id: str


@dataclass(frozen=True, order=True)
class VariabilityRefinement:
    """A variation point refining (sitting under) a higher-level variant."""

    child_vp_id: str
    parent_variant_id: str


def _sort_key(item):
    # None-safe ordering: optional fields sort as empty strings, so a
    # malformed model (e.g. duplicate ids differing only in an optional
    # field) still normalizes and is then reported by validate.
    if hasattr(item, "__dataclass_fields__"):
        return tuple(
            "" if value is None else value
            for value in (getattr(item, name) for name in item.__dataclass_fields__)
        )
    return item


def _sorted_unique(items) -> tuple:
    return tuple(sorted(set(items), key=_sort_key))


def _normalize(obj, *names: str) -> None:
    for name in names:
        object.__setattr__(obj, name, _sorted_unique(getattr(obj, name)))


@dataclass(frozen=True)
class LayeredModel:
    """Activities, their artifacts, cross-layer refinements, and interactions."""

    artifacts: tuple[FunctionalArtifact, ...] = ()
    activities: tuple[Activity, ...] = ()
    refinements: tuple[Refinement, ...] = ()
    interactions: tuple[Interaction, ...] = ()

    def __post_init__(self) -> None:
        _normalize(self, "artifacts", "activities", "refinements", "interactions")

    def activity(self, activity_id: str) -> Activity:
        act = self.activities_by_id().get(activity_id)
        if act is None:
            raise ModelError(f"unknown activity id: {activity_id}")
        return act

    def activities_by_id(self) -> dict[str, Activity]:
        return {a.id: a for a in self.activities}

    def artifacts_by_id(self) -> dict[str, FunctionalArtifact]:
        return {a.id: a for a in self.artifacts}

    def refinement_parents(self, artifact_id: str) -> tuple[str, ...]:
        """Parent activities the given artifact refines."""
        return tuple(
            r.parent_activity_id
            for r in self.refinements
            if r.child_artifact_id == artifact_id
        )

    @property
    def is_empty(self) -> bool:
        return not (self.artifacts or self.activities or self.refinements or self.interactions)


@dataclass(frozen=True)
class VariabilityModel:
    """Variation points, variants, variant interactions, and the tree forest."""

    variation_points: tuple[VariationPoint, ...] = ()
    variants: tuple[Variant, ...] = ()
    variant_interactions: tuple[Interaction, ...] = ()
    refinements: tuple[VariabilityRefinement, ...] = ()

    def __post_init__(self) -> None:
        _normalize(self, "variation_points", "variants", "variant_interactions", "refinements")

    def vp(self, vp_id: str) -> VariationPoint:
        vp = self.vps_by_id().get(vp_id)
        if vp is None:
            raise ModelError(f"unknown variation point id: {vp_id}")
        return vp

    def vps_by_id(self) -> dict[str, VariationPoint]:
        return {vp.id: vp for vp in self.variation_points}

    def variants_by_id(self) -> dict[str, Variant]:
        return {v.id: v for v in self.variants}

    def variants_of(self, vp_id: str) -> tuple[Variant, ...]:
        return tuple(v for v in self.variants if v.vp_id == vp_id)

    def parent_variant_of(self, vp_id: str) -> str | None:
        """Id of the variant the given variation point refines, if any."""
        for r in self.refinements:
            if r.child_vp_id == vp_id:
                return r.parent_variant_id
        return None

    def child_vps_of(self, variant_id: str) -> tuple[str, ...]:
        return tuple(r.child_vp_id for r in self.refinements if r.parent_variant_id == variant_id)


@dataclass(frozen=True)
class ProductLineModel:
    """A variability model bound to the layered model it was derived from."""

    vm: VariabilityModel = field(default_factory=VariabilityModel)
    artifacts: LayeredModel = field(default_factory=LayeredModel)
    bindings: tuple[Binding, ...] = ()

    def __post_init__(self) -> None:
        _normalize(self, "bindings")

    def activity_bindings(self) -> tuple[Binding, ...]:
        return tuple(b for b in self.bindings if b.kind is BindingKind.ACTIVITY_VARIANT)

    def variant_of_activity(self, activity_id: str) -> str | None:
        for b in self.bindings:
            if b.kind is BindingKind.ACTIVITY_VARIANT and b.source_id == activity_id:
                return b.target_id
        return None


@dataclass(frozen=True, order=True)
class Product:
    id: str
    includes: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "includes", _sorted_unique(self.includes))


@dataclass(frozen=True)
class ProductSet:
    """Per-product activity inclusion, the input for comparison-based diffing."""

    products: tuple[Product, ...] = ()

    def __post_init__(self) -> None:
        _normalize(self, "products")


def roots(vm: VariabilityModel) -> list[VariationPoint]:
    """Variation points with no parent variant, in ascending id order."""
    children = {r.child_vp_id for r in vm.refinements}
    return [vp for vp in vm.variation_points if vp.id not in children]


def tree_size(vm: VariabilityModel, root_vp_id: str) -> int:
    """Total number of variants in the tree rooted at the given variation point.

    Counts variants at every depth, alternating realization edges
    (variation point to its variants) with refinement edges (variant to its
    child variation points).
    """
    vm.vp(root_vp_id)
    return _subtree_variant_count(vm, root_vp_id, seen=set())


def _subtree_variant_count(vm: VariabilityModel, vp_id: str, seen: set[str]) -> int:
    # The seen set guards traversal on invalid (cyclic) inputs.
    if vp_id in seen:
        return 0
    seen.add(vp_id)
    total = 0
    for variant in vm.variants_of(vp_id):
        total += 1
        for child in vm.child_vps_of(variant.id):
            total += _subtree_variant_count(vm, child, seen)
    return total


def tree_vp_ids(vm: VariabilityModel, root_vp_id: str) -> set[str]:
    """All variation point ids in the tree rooted at the given one."""
    result: set[str] = set()
    stack = [root_vp_id]
    while stack:
        vp_id = stack.pop()
        if vp_id in result:
            continue
        result.add(vp_id)
        for variant in vm.variants_of(vp_id):
            stack.extend(vm.child_vps_of(variant.id))
    return result


def validate(plm: ProductLineModel) -> list[Violation]:
    """Check every structural invariant; an empty list means the model is valid."""
    out: list[Violation] = []
    out.extend(_validate_layered(plm.artifacts))
    out.extend(_validate_vm(plm.vm))
    out.extend(_validate_bindings(plm))
    return out


def _check_unique_ids(items, what: str, out: list[Violation]) -> None:
    seen: set[str] = set()
    for item in items:
        if item.id in seen:
            out.append(Violation(
                "unique-ids", (item.id,), f"duplicate {what} id {item.id!r}"))
        seen.add(item.id)


def _validate_layered(model: LayeredModel) -> list[Violation]:
    out: list[Violation] = []
    _check_unique_ids(model.activities, "activity", out)
    _check_unique_ids(model.artifacts, "artifact", out)
    artifacts = model.artifacts_by_id()
    activities = model.activities_by_id()

    for act in model.activities:
        owner = artifacts.get(act.artifact_id)
        if owner is None:
            out.append(Violation(
                "activity-artifact-resolution", (act.id, act.artifact_id),
                f"activity {act.id!r} names unknown artifact {act.artifact_id!r}"))
        else:
            if owner.layer is not act.layer:
                out.append(Violation(
                    "activity-layer-match", (act.id, owner.id),
                    f"activity {act.id!r} is on layer {act.layer.value!r} but its "
                    f"artifact {owner.id!r} is on {owner.layer.value!r}"))
            if act.id not in owner.activity_ids:
                out.append(Violation(
                    "artifact-membership", (act.id, owner.id),
                    f"activity {act.id!r} names artifact {owner.id!r} which does not list it"))

    for artifact in model.artifacts:
        for member_id in artifact.activity_ids:
            member = activities.get(member_id)
            if member is None:
                out.append(Violation(
                    "artifact-membership", (artifact.id, member_id),
                    f"artifact {artifact.id!r} lists unknown activity {member_id!r}"))
            elif member.artifact_id != artifact.id:
                out.append(Violation(
                    "artifact-membership", (artifact.id, member_id),
                    f"artifact {artifact.id!r} lists activity {member_id!r} owned by "
                    f"{member.artifact_id!r}"))

    for ref in model.refinements:
        child = artifacts.get(ref.child_artifact_id)
        parent = activities.get(ref.parent_activity_id)
        if child is None or parent is None:
            missing = ref.child_artifact_id if child is None else ref.parent_activity_id
            out.append(Violation(
                "refinement-resolution", (ref.child_artifact_id, ref.parent_activity_id),
                f"refinement references unknown id {missing!r}"))
            continue
        if LAYER_ABOVE.get(child.layer) is not parent.layer:
            out.append(Violation(
                "refinement-layer-adjacency", (child.id, parent.id),
                f"artifact {child.id!r} ({child.layer.value}) may only refine an "
                f"activity one layer above, not {parent.id!r} ({parent.layer.value})"))
        expected = RefinementKind.FEATURE if parent.layer is Layer.FEATURE else RefinementKind.FUNCTIONAL
        if ref.kind is not expected:
            out.append(Violation(
                "refinement-kind", (child.id, parent.id),
                f"refinement of {parent.id!r} must have kind {expected.value!r}"))

    for inter in model.interactions:
        out.extend(_validate_interaction_shape(inter, InteractionLevel.ARTIFACT))
        a, b = activities.get(inter.from_id), activities.get(inter.to_id)
        if a is None or b is None:
            missing = inter.from_id if a is None else inter.to_id
            out.append(Violation(
                "interaction-resolution", (inter.from_id, inter.to_id),
                f"interaction references unknown activity {missing!r}"))
        elif a.layer is not b.layer:
            out.append(Violation(
                "interaction-same-layer", (inter.from_id, inter.to_id),
                f"interaction endpoints {inter.from_id!r} and {inter.to_id!r} "
                f"are on different layers"))
    return out


def _validate_interaction_shape(inter: Interaction, expected: InteractionLevel) -> list[Violation]:
    out = []
    if inter.from_id == inter.to_id:
        out.append(Violation(
            "interaction-distinct-endpoints", (inter.from_id,),
            f"interaction from {inter.from_id!r} to itself"))
    if inter.level is not expected:
        out.append(Violation(
            "interaction-level", (inter.from_id, inter.to_id),
            f"expected a {expected.value}-level interaction"))
    return out


def _validate_vm(vm: VariabilityModel) -> list[Violation]:
    out: list[Violation] = []
    _check_unique_ids(vm.variation_points, "variation point", out)
    _check_unique_ids(vm.variants, "variant", out)
    vps = vm.vps_by_id()
    variants = vm.variants_by_id()

    for variant in vm.variants:
        if variant.vp_id not in vps:
            out.append(Violation(
                "delta-consistency", (variant.id, variant.vp_id),
                f"variant {variant.id!r} realizes unknown variation point {variant.vp_id!r}"))

    for inter in vm.variant_interactions:
        out.extend(_validate_interaction_shape(inter, InteractionLevel.VARIANT))
        a, b = variants.get(inter.from_id), variants.get(inter.to_id)
        if a is None or b is None:
            missing = inter.from_id if a is None else inter.to_id
            out.append(Violation(
                "interaction-resolution", (inter.from_id, inter.to_id),
                f"variant interaction references unknown variant {missing!r}"))
        elif a.vp_id == b.vp_id:
            out.append(Violation(
                "interaction-distinct-vps", (inter.from_id, inter.to_id),
                f"variant interaction connects {a.id!r} and {b.id!r} of the same "
                f"variation point {a.vp_id!r}"))

    parents: dict[str, str] = {}
    for ref in vm.refinements:
        if ref.child_vp_id not in vps or ref.parent_variant_id not in variants:
            missing = ref.child_vp_id if ref.child_vp_id not in vps else ref.parent_variant_id
            out.append(Violation(
                "psi-resolution", (ref.child_vp_id, ref.parent_variant_id),
                f"variability refinement references unknown id {missing!r}"))
            continue
        if ref.child_vp_id in parents:
            out.append(Violation(
                "psi-single-parent", (ref.child_vp_id,),
                f"variation point {ref.child_vp_id!r} has more than one parent variant"))
        parents[ref.child_vp_id] = ref.parent_variant_id

    # Forest acyclicity over the induced parent-of relation between vps.
    parent_vp = {
        child: variants[parent].vp_id
        for child, parent in parents.items()
        if parent in variants
    }
    for start in parent_vp:
        seen = {start}
        cursor = parent_vp.get(start)
        while cursor is not None:
            if cursor in seen:
                out.append(Violation(
                    "psi-forest-acyclicity", (start,),
                    f"variability refinements form a cycle through {start!r}"))
                break
            seen.add(cursor)
            cursor = parent_vp.get(cursor)
    return out


def _validate_bindings(plm: ProductLineModel) -> list[Violation]:
    out: list[Violation] = []
    activities = plm.artifacts.activities_by_id()
    artifacts = plm.artifacts.artifacts_by_id()
    variants = plm.vm.variants_by_id()
    vps = plm.vm.vps_by_id()

    artifact_vp: dict[str, str] = {}
    for b in plm.bindings:
        if b.kind is BindingKind.ARTIFACT_VP:
            if b.source_id not in artifacts or b.target_id not in vps:
                missing = b.source_id if b.source_id not in artifacts else b.target_id
                out.append(Violation(
                    "binding-resolution", (b.source_id, b.target_id),
                    f"artifact binding references unknown id {missing!r}"))
            else:
                artifact_vp[b.source_id] = b.target_id

    for b in plm.bindings:
        if b.kind is not BindingKind.ACTIVITY_VARIANT:
            continue
        act = activities.get(b.source_id)
        variant = variants.get(b.target_id)
        if act is None or variant is None:
            missing = b.source_id if act is None else b.target_id
            out.append(Violation(
                "binding-resolution", (b.source_id, b.target_id),
                f"activity binding references unknown id {missing!r}"))
            continue
        bound_vp = artifact_vp.get(act.artifact_id)
        if bound_vp is not None and variant.vp_id != bound_vp:
            out.append(Violation(
                "binding-theta-consistency", (b.source_id, b.target_id),
                f"activity {act.id!r} binds variant {variant.id!r} of "
                f"{variant.vp_id!r}, but its artifact binds {bound_vp!r}"))
    return out
