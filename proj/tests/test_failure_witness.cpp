#include <catch2/catch_amalgamated.hpp>

#include <cubeamalg/failure_witness.hpp>

using namespace cubeamalg;

TEST_CASE("at n=1 the two-singleton boundary defeats every completion up to size 4") {
    auto witness = search_failure_witness(AmalgamationStrategy{Family::bkl, 1, 0}, 4);
    REQUIRE(witness.has_value());
    CHECK(witness->boundary.k == 2);
    CHECK(witness->verification.refuted);
    // the literal enumeration went through every table at sizes 2..4
    CHECK(witness->verification.sizes_exhausted == std::vector<std::size_t>{2, 3, 4});
    CHECK(witness->verification.tables_enumerated > 100000);
    // and the certificate names a forced independent pair
    CHECK(witness->verification.forced_independent.size() == 2);
    // the boundary itself is a valid disjoint partial 2-cube
    CHECK(validate_disjoint(witness->boundary).ok());
}

TEST_CASE("the certificate-only route refutes without enumeration where forced") {
    auto witness = search_failure_witness(AmalgamationStrategy{Family::bkl, 1, 0}, 4);
    REQUIRE(witness.has_value());
    // re-verify the forced independent set by hand: complete nothing, just check
    // that the boundary's singleton entries pin both elements' closures
    const CubeDiagram& b = witness->boundary;
    const Structure& side_a = b.at(0b01);
    REQUIRE(side_a.elements.size() == 1);
    std::vector<std::uint32_t> t{0};
    CHECK(side_a.entry(t).rel_index == 0);
    CHECK(side_a.entry(t).fn_values == std::vector<ElementId>{side_a.elements[0]});
}

TEST_CASE("families with unbounded amalgamation refuse the search") {
    CHECK_THROWS_AS(search_failure_witness(AmalgamationStrategy{Family::sets, 1, 0}, 4),
                    refusal_error);
    CHECK_THROWS_AS(search_failure_witness(AmalgamationStrategy{Family::graphs, 2, 0}, 4),
                    refusal_error);
}

TEST_CASE("n beyond the exhaustive range is refused") {
    CHECK_THROWS_AS(search_failure_witness(AmalgamationStrategy{Family::bkl, 3, 0}, 8),
                    refusal_error);
}

TEST_CASE("a completable boundary is not refuted") {
    // the two-singleton k=2 boundary at n=2 completes (the amalgamation lemma),
    // so the refutation machinery must find the completion
    CubeDiagram boundary;
    boundary.k = 2;
    boundary.shape = CubeShape::boundary;
    Structure empty;
    empty.family = Family::bkl;
    empty.arity = 2;
    auto singleton = [&](ElementId id) {
        Structure s = empty;
        s.elements = {id};
        s.table.resize(1);
        s.table[0] = {0, {id}};
        return s;
    };
    boundary.faces[0b00] = empty;
    boundary.faces[0b01] = singleton(0);
    boundary.faces[0b10] = singleton(1);
    for (Face t : boundary.required_faces())
        for (Face s : subfaces_of(t))
            boundary.maps[{s, t}] = ElementMap::identity(boundary.at(s).elements);
    AmalgamationStrategy strat{Family::bkl, 2, 0};
    CompletionRefutation r = refute_completions(strat, boundary, 4);
    CHECK_FALSE(r.refuted);
    REQUIRE(r.completion.has_value());
    CHECK(validate_bkl(r.completion->at(r.completion->top())).ok());
}
