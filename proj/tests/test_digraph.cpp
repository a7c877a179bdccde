#include <catch2/catch_amalgamated.hpp>

#include <cubeamalg/digraph.hpp>
#include <cubeamalg/fraisse.hpp>

#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace cubeamalg;
using namespace cubeamalg::testing;

TEST_CASE("a single structure gives one vertex with a self-loop") {
    auto d = build_digraph({bkl_singleton(2, 0)});
    REQUIRE(d.size() == 1);
    CHECK(d.arc(0, 0));
}

TEST_CASE("isomorphic structures share a vertex") {
    Structure a = bkl1_two_loops();
    ElementMap renaming;
    renaming.set(0, 10);
    renaming.set(1, 11);
    Structure b = rename_structure(a, renaming);
    auto d = build_digraph({a, b});
    CHECK(d.size() == 1);
}

TEST_CASE("mixed families are refused") {
    CHECK_THROWS_AS(build_digraph({bkl_singleton(1, 0), labeled_set(0, {})}), refusal_error);
}

TEST_CASE("digraphs are reflexive and transitive on random families") {
    Rng rng(51);
    std::vector<Structure> family;
    for (int i = 0; i < 5; ++i) {
        std::uniform_int_distribution<std::size_t> sizes(0, 3);
        family.push_back(random_bkl_structure(rng, 2, sizes(rng), 10 * i));
    }
    auto d = build_digraph(family);  // construction validates both properties
    for (std::size_t u = 0; u < d.size(); ++u) CHECK(d.arc(u, u));
}

TEST_CASE("a zero-dimensional witness needs a nonempty digraph") {
    EmbeddabilityDigraph empty;
    CHECK_FALSE(find_cube_embedding(empty, 0).has_value());
    auto d = build_digraph({bkl_singleton(2, 0)});
    auto w = find_cube_embedding(d, 0);
    REQUIRE(w.has_value());
    CHECK(w->assignment.at(0) == 0);
    CHECK(dimension_estimate(d, 4) == 0);
}

TEST_CASE("a clique admits no induced one-cube") {
    // two distinct labeled singletons with equal label content embed either way
    // only if isomorphic; instead build the clique from one structure repeated
    // at different sizes where everything embeds everywhere
    Rng rng(52);
    Structure small = bkl_empty(1);
    Structure large = bkl_singleton(1, 0);
    // empty embeds into the singleton and vice versa fails: that is not a clique;
    // use two isomorphic-but-distinct vertices? they dedup. A genuine clique needs
    // bi-embeddable non-isomorphic structures, impossible at equal finite size;
    // so the clique case is the single-vertex digraph
    auto d = build_digraph({small});
    CHECK(dimension_estimate(d, 3) == 0);
    CHECK_FALSE(find_cube_embedding(d, 1).has_value());
    (void)large;
    (void)rng;
}

TEST_CASE("the faces of an irreducible labeled run cube realize their dimension") {
    RunConfig c;
    c.strategy = AmalgamationStrategy{Family::bkl, 3, 16};
    c.k = 2;
    c.rounds = 1;
    c.size_cap = 2;
    RunState s = run(c);
    REQUIRE(certify_irreducible(s).passed);
    std::vector<Structure> family;
    for (Face f : s.cube.required_faces()) family.push_back(s.cube.at(f));
    auto d = build_digraph(family);
    REQUIRE(d.size() == 4);
    CHECK(find_cube_embedding(d, 2).has_value());
    CHECK(dimension_estimate(d, 4) >= 2);
    // negative side: no 3-cube on a 4-vertex family
    CHECK_FALSE(find_cube_embedding(d, 3).has_value());
}

TEST_CASE("labeled containment equivalence holds on run cubes") {
    RunConfig c;
    c.strategy = AmalgamationStrategy{Family::bkl, 3, 16};
    c.k = 1;
    c.rounds = 2;
    c.size_cap = 2;
    RunState s = run(c);
    CHECK_FALSE(labeled_containment_mismatch(s.cube).has_value());
}

TEST_CASE("dimension never drops when vertices join the family") {
    Rng rng(53);
    RunConfig c;
    c.strategy = AmalgamationStrategy{Family::sets, 1, 16};
    c.k = 2;
    c.rounds = 1;
    c.size_cap = 1;
    RunState s = run(c);
    std::vector<Structure> family;
    for (Face f : s.cube.required_faces()) family.push_back(s.cube.at(f));
    auto small = build_digraph(family);
    std::uint32_t before = dimension_estimate(small, 3);
    // add an unrelated labeled set
    family.push_back(labeled_set(16, {LabelSet{1} << 15}));
    auto big = build_digraph(family);
    CHECK(dimension_estimate(big, 3) >= before);
}

TEST_CASE("pattern decoding walks the ternary digits") {
    auto p0 = decode_label_pattern(0, 4);
    CHECK(p0.required == 0);
    CHECK(p0.forbidden == 0);
    auto p1 = decode_label_pattern(1, 4);
    CHECK(p1.required == 0b1);
    auto p2 = decode_label_pattern(2, 4);
    CHECK(p2.forbidden == 0b1);
    auto p5 = decode_label_pattern(5, 4);  // digits: 2,1 -> forbid 0, require 1
    CHECK(p5.forbidden == 0b01);
    CHECK(p5.required == 0b10);
    CHECK_THROWS_AS(decode_label_pattern(3, 1), refusal_error);
}

TEST_CASE("the sets sample with one required and one forbidden pattern has two points") {
    auto s = generic_labeled_sample(AmalgamationStrategy{Family::sets, 1, 8}, 1, 3);
    REQUIRE(s.elements.size() == 2);
    CHECK(validate_labels(s).ok());
    bool has_label0 = false, lacks_label0 = false;
    for (LabelSet l : s.labels) {
        if (l & 1) has_label0 = true;
        if (!(l & 1)) lacks_label0 = true;
    }
    CHECK(has_label0);
    CHECK(lacks_label0);
}

TEST_CASE("the bkl sample realizes each labeled singleton type and stays valid") {
    AmalgamationStrategy strat{Family::bkl, 2, 8};
    auto s = generic_labeled_sample(strat, 1, 3);
    CHECK(strat.validate_member(s).ok());
    CHECK(validate_labels(s).ok());
    // both pattern classes are witnessed by elements of the singleton type
    Structure singleton_type = bkl_singleton(2, 0);
    Structure reduct = s;
    reduct.label_universe = 0;
    reduct.labels.clear();
    auto embeddings = find_embeddings(singleton_type, reduct, 1000);
    bool with0 = false, without0 = false;
    for (const auto& m : embeddings) {
        LabelSet l = s.labels[*s.index_of(m.at(0))];
        if (l & 1) with0 = true;
        if (!(l & 1)) without0 = true;
    }
    CHECK(with0);
    CHECK(without0);
}

TEST_CASE("samples refuse families without the needed amalgamation") {
    CHECK_THROWS_AS(generic_labeled_sample(AmalgamationStrategy{Family::bkl, 1, 8}, 1, 2),
                    refusal_error);
    CHECK_THROWS_AS(generic_labeled_sample(AmalgamationStrategy{Family::bkl, 2, 0}, 1, 2),
                    refusal_error);
}
