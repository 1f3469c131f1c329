"""Main-root selection, pair identification, the two checks, merging, and
the reduction fixpoint."""

from __future__ import annotations

from dataclasses import replace

import pytest

from ovmkit.documents import serialize
from ovmkit.model import (
    Interaction,
    InteractionKind,
    InteractionLevel,
    Layer,
    ProductLineModel,
    VariabilityModel,
    VariabilityRefinement,
    VariationPoint,
    Variant,
    tree_size,
    validate,
)
from ovmkit.reduction import (
    ReductionError,
    check_completeness,
    check_uniqueness,
    interacting_pairs,
    main_root,
    merge,
    reduce,
)


def vp(vp_id):
    return VariationPoint(id=vp_id, name=vp_id.upper(), level=Layer.FUNCTIONAL)


def variant(v_id, vp_id):
    return Variant(id=v_id, name=v_id.upper(), vp_id=vp_id)


def edge(from_id, to_id):
    return Interaction(from_id=from_id, to_id=to_id,
                       kind=InteractionKind.INFORMATION,
                       level=InteractionLevel.VARIANT)


def two_vps_one_edge() -> VariabilityModel:
    return VariabilityModel(
        variation_points=(vp("vpa"), vp("vpb")),
        variants=(variant("a1", "vpa"), variant("a2", "vpa"),
                  variant("b1", "vpb"), variant("b2", "vpb")),
        variant_interactions=(edge("a1", "b1"),),
    )


def with_extra_edge(plm: ProductLineModel, from_id: str, to_id: str) -> ProductLineModel:
    vm = plm.vm
    vm = replace(vm, variant_interactions=vm.variant_interactions + (edge(from_id, to_id),))
    return replace(plm, vm=vm)


class TestMainRoot:
    def test_engine_picks_process_function(self, engine_plm):
        assert main_root(engine_plm.vm).id == "pf"

    def test_single_root(self):
        vm = VariabilityModel(variation_points=(vp("only"),),
                              variants=(variant("o1", "only"),))
        assert main_root(vm).id == "only"

    def test_tie_breaks_on_smaller_id(self):
        vm = VariabilityModel(
            variation_points=(vp("zz"), vp("aa")),
            variants=(variant("z1", "zz"), variant("a1", "aa")),
        )
        assert main_root(vm).id == "aa"

    def test_empty_model_raises(self):
        with pytest.raises(ReductionError):
            main_root(VariabilityModel())


class TestInteractingPairs:
    def test_engine_first_pass(self, engine_plm):
        assert interacting_pairs(engine_plm.vm, "pf") == [("pf", "sf")]

    def test_no_interactions(self, logistics_plm):
        assert interacting_pairs(logistics_plm.vm, "bi") == []

    def test_equal_sizes_first_encountered_is_source(self):
        vm = two_vps_one_edge()
        assert interacting_pairs(vm, "vpa") == [("vpa", "vpb")]
        assert interacting_pairs(vm, "vpb") == [("vpb", "vpa")]

    def test_pairs_cover_descendant_vps(self):
        # The child vp's variants sit inside the root's tree and interact
        # with an outside vp of equal size: the child side is the source.
        vm = VariabilityModel(
            variation_points=(vp("root"), vp("child"), vp("other")),
            variants=(
                variant("r1", "root"),
                variant("c1", "child"), variant("c2", "child"),
                variant("o1", "other"), variant("o2", "other"),
            ),
            refinements=(VariabilityRefinement("child", "r1"),),
            variant_interactions=(edge("c1", "o1"), edge("c2", "o2")),
        )
        assert interacting_pairs(vm, "root") == [("child", "other")]


class TestCompleteness:
    def test_engine_sensing_vs_process(self, engine_plm):
        assert check_completeness(engine_plm.vm, "pf", "sf") is True

    def test_variant_without_interactions(self, engine_plm):
        # pf1 never interacts, so "ip" cannot be complete against "pf".
        assert check_completeness(engine_plm.vm, "ip", "pf") is False

    def test_two_of_three_variants_connected(self):
        vm = VariabilityModel(
            variation_points=(vp("src"), vp("tgt")),
            variants=(variant("s1", "src"),
                      variant("t1", "tgt"), variant("t2", "tgt"), variant("t3", "tgt")),
            variant_interactions=(edge("s1", "t1"), edge("t2", "s1")),
        )
        assert check_completeness(vm, "src", "tgt") is False
        without_t3 = replace(
            vm, variants=tuple(v for v in vm.variants if v.id != "t3"))
        assert check_completeness(without_t3, "src", "tgt") is True


class TestUniqueness:
    def test_engine_sole_paths(self, engine_plm):
        assert check_uniqueness(engine_plm.vm, "pf", "sf") is True

    def test_direct_edge_with_detour_is_not_unique(self, engine_plm):
        # An added direct p3->pf3 edge has the detour p3->s3->pf3.
        modified = with_extra_edge(engine_plm, "p3", "pf3")
        assert check_uniqueness(modified.vm, "pf", "ip") is False

    def test_single_edge_alone_is_unique(self):
        vm = VariabilityModel(
            variation_points=(vp("x"), vp("y")),
            variants=(variant("x1", "x"), variant("y1", "y")),
            variant_interactions=(edge("x1", "y1"),),
        )
        assert check_uniqueness(vm, "x", "y") is True

    def test_parallel_edges_are_two_paths(self):
        vm = VariabilityModel(
            variation_points=(vp("x"), vp("y")),
            variants=(variant("x1", "x"), variant("y1", "y")),
            variant_interactions=(
                edge("x1", "y1"),
                Interaction("x1", "y1", InteractionKind.MATERIAL,
                            InteractionLevel.VARIANT),
            ),
        )
        assert check_uniqueness(vm, "x", "y") is False

    def test_two_partners_per_target_variant(self):
        vm = VariabilityModel(
            variation_points=(vp("src"), vp("tgt")),
            variants=(variant("s1", "src"), variant("s2", "src"), variant("s3", "src"),
                      variant("t1", "tgt")),
            variant_interactions=(edge("s1", "t1"), edge("s2", "t1")),
        )
        assert check_completeness(vm, "src", "tgt") is True
        assert check_uniqueness(vm, "src", "tgt") is False


class TestMerge:
    def test_engine_first_merge_transfers_and_rebinds(self, engine_plm):
        merged, record = merge(engine_plm, "pf", "sf")
        assert record.pairing() == {"s2": "pf2", "s3": "pf3"}
        edges = {(e.from_id, e.to_id) for e in merged.vm.variant_interactions}
        assert edges == {("p2", "pf2"), ("p3", "pf3")}
        rebound = {(a, new) for a, _, new in record.rebound_bindings}
        assert rebound == {("sense-pfuel2", "pf2"), ("sense-pfuel3", "pf3")}
        assert merged.variant_of_activity("sense-pfuel2") == "pf2"
        assert merged.variant_of_activity("sense-pfuel3") == "pf3"
        assert len(merged.vm.variation_points) == 2
        assert validate(merged) == []

    def test_engine_second_merge_reaches_single_vp(self, engine_plm):
        merged, _ = merge(engine_plm, "pf", "sf")
        final, record = merge(merged, "pf", "ip")
        assert record.pairing() == {"p2": "pf2", "p3": "pf3"}
        assert [v.id for v in final.vm.variants] == ["pf1", "pf2", "pf3"]
        assert [v.id for v in final.vm.variation_points] == ["pf"]
        assert final.vm.variant_interactions == ()

    def test_subtree_reparenting_grows_source_tree(self):
        vm = VariabilityModel(
            variation_points=(vp("vpa"), vp("vpb"), vp("vpc")),
            variants=(
                variant("a1", "vpa"), variant("a2", "vpa"),
                variant("b1", "vpb"), variant("b2", "vpb"),
                variant("c1", "vpc"), variant("c2", "vpc"), variant("c3", "vpc"),
            ),
            refinements=(VariabilityRefinement("vpc", "b1"),),
            variant_interactions=(edge("a1", "b1"), edge("b2", "a2")),
        )
        plm = ProductLineModel(vm=vm)
        size_before = tree_size(vm, "vpa")
        subtree = tree_size(vm, "vpc")
        merged, record = merge(plm, "vpa", "vpb")
        assert record.transferred_refinements == (("vpc", "b1", "a1"),)
        assert merged.vm.parent_variant_of("vpc") == "a1"
        assert tree_size(merged.vm, "vpa") == size_before + subtree
        assert validate(merged) == []

    def test_artifact_vp_binding_follows_the_merge(self, engine_plm):
        from ovmkit.model import Binding, BindingKind
        extended = replace(engine_plm, bindings=engine_plm.bindings + (
            Binding(BindingKind.ARTIFACT_VP, "sensing-functions", "sf"),))
        merged, _ = merge(extended, "pf", "sf")
        artifact_bindings = [
            b for b in merged.bindings if b.kind is BindingKind.ARTIFACT_VP]
        assert artifact_bindings == [
            Binding(BindingKind.ARTIFACT_VP, "sensing-functions", "pf")]
        assert validate(merged) == []

    def test_refuses_merge_that_would_cycle_the_forest(self):
        # vpa > vpb > vpc by refinement, with an interaction between the
        # bottom and top variants. Absorbing the top would re-parent vpb
        # below its own descendant.
        vm = VariabilityModel(
            variation_points=(vp("vpa"), vp("vpb"), vp("vpc")),
            variants=(variant("a1", "vpa"), variant("b1", "vpb"), variant("c1", "vpc")),
            refinements=(
                VariabilityRefinement("vpb", "a1"),
                VariabilityRefinement("vpc", "b1"),
            ),
            variant_interactions=(edge("c1", "a1"),),
        )
        plm = ProductLineModel(vm=vm)
        with pytest.raises(ReductionError, match="forest"):
            merge(plm, "vpc", "vpa")
        # The opposite direction removes a leaf and stays a forest.
        merged, _ = merge(plm, "vpa", "vpc")
        assert validate(merged) == []

    def test_refuses_without_completeness(self, engine_plm):
        with pytest.raises(ReductionError, match="interacts"):
            merge(engine_plm, "ip", "pf")

    def test_refuses_without_uniqueness(self, engine_plm):
        # Direct edges alongside the detours through the sensing variants
        # make the pair complete but not unique.
        modified = with_extra_edge(
            with_extra_edge(engine_plm, "p3", "pf3"), "p2", "pf2")
        assert check_completeness(modified.vm, "pf", "ip") is True
        with pytest.raises(ReductionError, match="not unique"):
            merge(modified, "pf", "ip")


class TestReduce:
    def test_engine_two_merges(self, engine_plm):
        reduced, trace = reduce(engine_plm)
        assert [(m.source_vp_id, m.target_vp_id) for m in trace.merges] \
            == [("pf", "sf"), ("pf", "ip")]
        assert [v.id for v in reduced.vm.variation_points] == ["pf"]
        assert [v.id for v in reduced.vm.variants] == ["pf1", "pf2", "pf3"]
        bound = {(b.source_id, b.target_id) for b in reduced.bindings}
        assert bound == {
            ("process-p1", "pf1"),
            ("process-p12", "pf2"), ("pfuel2", "pf2"), ("sense-pfuel2", "pf2"),
            ("process-p13", "pf3"), ("pfuel3", "pf3"), ("sense-pfuel3", "pf3"),
        }

    def test_logistics_single_merge(self, logistics_plm):
        reduced, trace = reduce(logistics_plm)
        assert len(reduced.vm.variation_points) == 4
        assert len(trace.merges) == 1
        pair = {trace.merges[0].source_vp_id, trace.merges[0].target_vp_id}
        assert pair == {"tir", "ble"}

    def test_no_interactions_unchanged(self, logistics_plm):
        vm = replace(logistics_plm.vm, variant_interactions=())
        quiet = replace(logistics_plm, vm=vm)
        reduced, trace = reduce(quiet)
        assert trace.merges == ()
        assert serialize(reduced) == serialize(quiet)

    def test_binding_count_conserved(self, engine_plm):
        reduced, _ = reduce(engine_plm)
        assert len(reduced.activity_bindings()) == len(engine_plm.activity_bindings())

    def test_idempotent(self, engine_plm, logistics_plm):
        for plm in (engine_plm, logistics_plm):
            reduced, _ = reduce(plm)
            again, trace = reduce(reduced)
            assert trace.merges == ()
            assert again == reduced
