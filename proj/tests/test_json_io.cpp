#include <catch2/catch_amalgamated.hpp>

#include <cubeamalg/json_io.hpp>

#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace cubeamalg;
using namespace cubeamalg::testing;

TEST_CASE("the canonical empty document parses to the empty structure") {
    json doc;
    doc["version"] = 1;
    doc["family"] = "bkl";
    doc["n"] = 2;
    doc["L"] = 0;
    doc["elements"] = json::array();
    doc["tuples"] = json::array();
    Structure s = structure_from_json(doc);
    CHECK(s.elements.empty());
    CHECK(s.arity == 2);
    CHECK(structure_to_json(s) == doc);
}

TEST_CASE("a missing tuple row is a non-total-table error") {
    json doc = structure_to_json(bkl1_two_loops());
    doc["tuples"].erase(1);
    try {
        structure_from_json(doc);
        FAIL("expected an error");
    } catch (const input_error& e) {
        CHECK(e.code == "non-total-table");
    }
}

TEST_CASE("error codes are distinct per failure kind") {
    CHECK_THROWS_AS(parse_json_text("{nope"), input_error);
    try {
        parse_json_text("{nope");
    } catch (const input_error& e) {
        CHECK(e.code == "malformed-json");
    }

    json doc = structure_to_json(bkl1_two_loops());
    doc.erase("family");
    try {
        structure_from_json(doc);
        FAIL("expected an error");
    } catch (const input_error& e) {
        CHECK(e.code == "schema-violation");
    }

    json dangling = structure_to_json(bkl1_two_loops());
    dangling["tuples"][0]["s"][0] = 99;
    try {
        structure_from_json(dangling);
        FAIL("expected an error");
    } catch (const input_error& e) {
        CHECK(e.code == "dangling-id");
    }
}

TEST_CASE("parse then serialize is the identity on canonical documents") {
    Rng rng(61);
    for (int trial = 0; trial < 25; ++trial) {
        std::uniform_int_distribution<std::uint32_t> arities(1, 2);
        std::uniform_int_distribution<std::size_t> sizes(0, 4);
        Structure s = random_bkl_structure(rng, arities(rng), sizes(rng));
        if (trial % 2 == 0 && !s.elements.empty()) attach_random_labels(rng, s, 5);
        json doc = structure_to_json(s);
        Structure back = structure_from_json(doc);
        CHECK(back == s);
        CHECK(structure_to_json(back) == doc);
    }
}

TEST_CASE("serialize then parse canonicalizes scrambled documents") {
    Rng rng(62);
    Structure s = random_bkl_structure(rng, 2, 3);
    json doc = structure_to_json(s);
    // scramble the tuple order and element order
    std::reverse(doc["tuples"].begin(), doc["tuples"].end());
    std::reverse(doc["elements"].begin(), doc["elements"].end());
    Structure back = structure_from_json(doc);
    CHECK(back == s);
    CHECK(canonical_bytes(structure_to_json(back)) == canonical_bytes(structure_to_json(s)));
}

TEST_CASE("cube documents round-trip") {
    IdAllocator alloc;
    CubeDiagram full = complete_bkl(two_singleton_boundary(2), 2, alloc);
    json doc = cube_to_json(full);
    CubeDiagram back = cube_from_json(doc);
    CHECK(back == full);
    CHECK(cube_to_json(back) == doc);
}

TEST_CASE("cube documents with missing maps are rejected") {
    IdAllocator alloc;
    CubeDiagram full = complete_bkl(two_singleton_boundary(2), 2, alloc);
    json doc = cube_to_json(full);
    doc["maps"].erase(0);
    CHECK_THROWS_AS(cube_from_json(doc), input_error);
}

TEST_CASE("hashing is stable and content sensitive") {
    CHECK(hash_hex("") == hash_hex(""));
    CHECK(hash_hex("a") != hash_hex("b"));
    // pinned value of the 64-bit FNV-1a offset basis
    CHECK(hash_hex("") == "cbf29ce484222325");
}

TEST_CASE("theta documents list conjunct groups in formula order") {
    Structure s = bkl_singleton(1, 0);
    json doc = theta_to_json(theta(s));
    REQUIRE(doc["conjuncts"].size() == 2);
    CHECK(doc["conjuncts"][0]["kind"] == "rel");
    CHECK(doc["conjuncts"][1]["kind"] == "fn");
    CHECK(doc["variables"] == 1);
}

TEST_CASE("digraph serialization carries vertices, arcs, and a DOT view") {
    auto d = build_digraph({bkl_singleton(2, 0), bkl_empty(2)});
    json doc = digraph_to_json(d);
    CHECK(doc["vertices"].size() == 2);
    std::string dot = digraph_to_dot(d);
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("->") != std::string::npos);
}
