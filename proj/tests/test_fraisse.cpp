#include <catch2/catch_amalgamated.hpp>

#include <cubeamalg/fraisse.hpp>
#include <cubeamalg/run_io.hpp>

using namespace cubeamalg;

namespace {

RunConfig bkl_config(std::uint32_t n, std::uint32_t k, std::uint32_t rounds,
                     std::uint32_t cap = 2, std::uint32_t labels = 16) {
    RunConfig c;
    c.strategy = AmalgamationStrategy{Family::bkl, n, labels};
    c.k = k;
    c.rounds = rounds;
    c.size_cap = cap;
    c.seed = 7;
    return c;
}

}  // namespace

TEST_CASE("zero rounds leave the empty cube with no witnesses and no coverage") {
    RunConfig c = bkl_config(2, 1, 0);
    RunState s = run(c);
    CHECK(s.stage == 0);
    CHECK(s.chains.empty());
    for (Face f : s.cube.required_faces()) CHECK(s.cube.at(f).elements.empty());
    auto cov = coverage_report(s);
    CHECK(cov.realized_total() == 0);
    CHECK_THROWS_AS(certify_irreducible(s), refusal_error);
}

TEST_CASE("the first tasks from the empty cube add one fresh element per face") {
    RunConfig c = bkl_config(2, 1, 1);
    RunState s;
    s.config = c;
    s.cube = make_empty_cube(c.k, CubeShape::full, c.strategy.empty_structure());
    s.stage_cubes.push_back(s.cube);
    auto tasks = enumerate_tasks(s);
    REQUIRE(tasks.size() == 2);  // one per face of the 1-cube
    for (const auto& t : tasks) {
        CHECK(t.base_elements.empty());
        CHECK(t.target.elements.size() == 1);
        // the single one-element type: relation 0, the self value
        CHECK(t.target.table[0].rel_index == 0);
    }
    CHECK(tasks[0].rho == 0b0);
    CHECK(tasks[1].rho == 0b1);
}

TEST_CASE("invalid configurations are refused") {
    CHECK_THROWS_AS(run(bkl_config(2, 2, 1)), refusal_error);  // k >= n
    CHECK_THROWS_AS(run(bkl_config(1, 1, 1)), refusal_error);  // k >= n
    RunConfig c = bkl_config(2, 1, 1);
    c.size_cap = 0;
    CHECK_THROWS_AS(run(c), refusal_error);
}

TEST_CASE("runs are deterministic: identical configs give identical states") {
    RunConfig c = bkl_config(2, 1, 2);
    RunState a = run(c);
    RunState b = run(c);
    CHECK(a.stage == b.stage);
    CHECK(a.cube == b.cube);
    CHECK(a.chains == b.chains);
    CHECK(a.history == b.history);
}

TEST_CASE("every face grows in every round that targets it") {
    RunConfig c = bkl_config(3, 2, 2);
    RunState s = run(c);
    // each round schedules at least the empty-base task per face, so sizes
    // strictly increase round over round; stage 0 is empty
    for (Face f : s.cube.required_faces()) {
        CHECK(s.cube.at(f).elements.size() >= 2);
        CHECK(s.stage_cubes.front().at(f).elements.empty());
    }
}

TEST_CASE("steps leave faces not above rho bit-identical") {
    RunConfig c = bkl_config(3, 2, 1);
    RunState s = run(c);
    for (std::size_t i = 0; i < s.history.size(); ++i) {
        const auto& rec = s.history[i];
        const CubeDiagram& before = s.stage_cubes[i];
        const CubeDiagram& after = s.stage_cubes[i + 1];
        for (Face f : before.required_faces()) {
            if (face_subset(rec.task.rho, f)) continue;
            CHECK(before.at(f) == after.at(f));
        }
    }
}

TEST_CASE("witness chains satisfy their invariant at every stage") {
    RunConfig c = bkl_config(3, 2, 2);
    RunState s = run(c);
    REQUIRE_FALSE(s.chains.empty());
    for (const auto& chain : s.chains) {
        REQUIRE(chain.xs.size() == chain.ys.size());
        for (std::size_t j = 0; j < chain.xs.size(); ++j) {
            const CubeDiagram& cube = s.stage_cubes[chain.birth_stage + j];
            ElementId x = chain.xs[j];
            ElementId y = chain.ys[j];
            CHECK(cube.map_at(chain.sigma, cube.top()).at(x) == y);
            auto img_tau = cube.image_in_top(chain.tau);
            CHECK_FALSE(std::binary_search(img_tau.begin(), img_tau.end(), y));
        }
    }
}

TEST_CASE("after a round every ordered pair carries a witness and the cube is irreducible") {
    for (auto [n, k] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{{2, 1}, {3, 2}}) {
        RunConfig c = bkl_config(n, k, 1);
        RunState s = run(c);
        Certificate cert = certify_irreducible(s);
        CHECK(cert.passed);
        CHECK_FALSE(is_reducible(s.cube).has_value());
    }
}

TEST_CASE("labeled stages are valid labeled members throughout") {
    RunConfig c = bkl_config(3, 1, 2);
    RunState s = run(c);
    for (const auto& cube : s.stage_cubes) {
        for (Face f : cube.required_faces()) {
            CHECK(validate_labels(cube.at(f)).ok());
            CHECK(validate_bkl(cube.at(f)).ok());
        }
    }
}

TEST_CASE("coverage: empty faces leave the base instance pending, one round realizes it") {
    RunConfig c = bkl_config(2, 1, 1);
    RunState empty_state;
    empty_state.config = c;
    empty_state.cube = make_empty_cube(c.k, CubeShape::full, c.strategy.empty_structure());
    empty_state.stage_cubes.push_back(empty_state.cube);
    auto before = coverage_report(empty_state);
    for (const auto& inst : before.instances)
        if (inst.premise.elements.empty()) CHECK_FALSE(inst.realized);

    RunState s = run(c);
    auto after = coverage_report(s);
    bool found_any = false;
    for (const auto& inst : after.instances) {
        if (inst.premise.elements.empty() && inst.target.elements.size() == 1) {
            CHECK(inst.realized);
            found_any = true;
        }
    }
    CHECK(found_any);
}

TEST_CASE("the realized fraction does not decrease with more rounds") {
    std::vector<double> fractions;
    std::map<std::tuple<Face, std::string, std::string>, bool> last;
    for (std::uint32_t rounds = 1; rounds <= 3; ++rounds) {
        RunState s = run(bkl_config(2, 1, rounds));
        auto rep = coverage_report(s);
        // compare on matched instances: anything present in both reports
        std::map<std::tuple<Face, std::string, std::string>, bool> now;
        for (const auto& inst : rep.instances) {
            auto key = std::make_tuple(
                inst.face, canonical_bytes(structure_to_json(inst.premise)),
                canonical_bytes(structure_to_json(inst.target)));
            now[key] = inst.realized;
        }
        for (const auto& [key, was_realized] : last) {
            auto it = now.find(key);
            if (it != now.end() && was_realized) CHECK(it->second);
        }
        fractions.push_back(rep.instances.empty()
                                ? 0.0
                                : double(rep.realized_total()) / double(rep.instances.size()));
        last = std::move(now);
    }
    for (std::size_t i = 1; i < fractions.size(); ++i) CHECK(fractions[i] >= fractions[i - 1] - 1e-12);
}

TEST_CASE("independent tasks commute up to isomorphism of the resulting faces") {
    // unlabeled: the least-unused labeling records execution order by design,
    // so commutation is a statement about the family content
    RunConfig c = bkl_config(3, 1, 1, 2, 0);
    RunState base;
    base.config = c;
    base.cube = make_empty_cube(c.k, CubeShape::full, c.strategy.empty_structure());
    base.stage_cubes.push_back(base.cube);
    auto tasks = enumerate_tasks(base);
    REQUIRE(tasks.size() >= 2);

    RunState ab = base;
    step(ab, tasks[0]);
    step(ab, tasks[1]);
    RunState ba = base;
    step(ba, tasks[1]);
    step(ba, tasks[0]);
    for (Face f : ab.cube.required_faces()) {
        auto iso = is_isomorphic(ab.cube.at(f), ba.cube.at(f));
        CHECK(iso.has_value());
    }
}

TEST_CASE("sets runs build strictly growing labeled set cubes") {
    RunConfig c;
    c.strategy = AmalgamationStrategy{Family::sets, 1, 16};
    c.k = 3;
    c.rounds = 2;
    c.size_cap = 1;
    RunState s = run(c);
    Certificate cert = certify_irreducible(s);
    CHECK(cert.passed);
    CHECK_FALSE(is_reducible(s.cube).has_value());
}
