#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <cubeamalg/amalgamation.hpp>
#include <cubeamalg/digraph.hpp>
#include <cubeamalg/failure_witness.hpp>
#include <cubeamalg/fraisse.hpp>
#include <cubeamalg/json_io.hpp>
#include <cubeamalg/run_io.hpp>

namespace fs = std::filesystem;
using namespace cubeamalg;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_refused = 1;
constexpr int exit_input = 2;

void emit(const json& result, const std::string& out_path) {
    std::string bytes = canonical_bytes(result);
    if (out_path.empty())
        std::cout << bytes;
    else
        write_text_file(out_path, bytes);
}

AmalgamationStrategy make_strategy(const std::string& family, std::uint32_t n,
                                   std::uint32_t labels) {
    auto fam = family_from_name(family);
    if (!fam) throw input_error("family", "unknown family '" + family + "'");
    return AmalgamationStrategy{*fam, n, labels};
}

json load_json(const std::string& path) { return parse_json_text(read_text_file(path)); }

std::uint32_t cube_label_universe(const CubeDiagram& c) {
    for (const auto& [f, s] : c.faces) return s.label_universe;
    return 0;
}

struct ValidateCmd {
    std::string file, out;
    int run() const {
        json doc = load_json(file);
        ValidationReport rep;
        json result;
        if (doc.contains("faces")) {
            CubeDiagram cube = cube_from_json(doc);
            rep = validate_cube(cube);
            if (rep.ok()) rep.merge(validate_disjoint(cube));
            result["kind"] = "cube";
        } else {
            Structure s = structure_from_json(doc);
            AmalgamationStrategy strat{s.family, s.arity, s.label_universe};
            rep = strat.validate_member(s);
            result["kind"] = "structure";
        }
        result["report"] = report_to_json(rep);
        emit(result, out);
        return exit_ok;
    }
};

struct ThetaCmd {
    std::string file, out;
    int run() const {
        Structure s = structure_from_json(load_json(file));
        emit(theta_to_json(theta(s)), out);
        return exit_ok;
    }
};

struct EmbedCmd {
    std::string file_a, file_b, out;
    std::size_t limit = 1;
    int run() const {
        Structure a = structure_from_json(load_json(file_a));
        Structure b = structure_from_json(load_json(file_b));
        auto found = find_embeddings(a, b, limit);
        json list = json::array();
        for (const auto& m : found) list.push_back(map_to_json(m));
        json result;
        result["embeddings"] = list;
        result["count"] = found.size();
        result["complete"] = found.size() < limit;
        emit(result, out);
        return exit_ok;
    }
};

struct AmalgamateCmd {
    std::string file, family = "bkl", out;
    std::uint32_t n = 2, labels = 0;
    bool labels_given = false;
    int run() const {
        CubeDiagram boundary = cube_from_json(load_json(file));
        std::uint32_t universe = labels_given ? labels : cube_label_universe(boundary);
        AmalgamationStrategy strategy = make_strategy(family, n, universe);
        IdAllocator alloc;
        CubeDiagram full = disjoint_amalgamate(strategy, boundary, alloc);
        emit(cube_to_json(full), out);
        return exit_ok;
    }
};

struct ExtendCmd {
    std::string cube_file, target_file, map_file, family = "bkl", out;
    std::uint32_t rho = 0, n = 2, labels = 0;
    bool labels_given = false;
    int run() const {
        CubeDiagram cube = cube_from_json(load_json(cube_file));
        Structure target = structure_from_json(load_json(target_file));
        std::uint32_t universe = labels_given ? labels : cube_label_universe(cube);
        AmalgamationStrategy strategy = make_strategy(family, n, universe);
        ElementMap h;
        if (!map_file.empty()) {
            h = map_from_json(load_json(map_file));
        } else {
            auto found = find_embeddings(cube.at(rho), target, 1);
            if (found.empty())
                throw refusal_error("no embedding from the rho face into the target exists");
            h = found.front();
        }
        IdAllocator alloc;
        auto [extended, emb] = extend_cube(strategy, cube, rho, target, h, alloc);
        json maps = json::array();
        for (const auto& [face, m] : emb.maps) {
            json row;
            row["face"] = face;
            row["map"] = map_to_json(m);
            maps.push_back(row);
        }
        json result;
        result["cube"] = cube_to_json(extended);
        result["disjoint_embedding"] = maps;
        emit(result, out);
        return exit_ok;
    }
};

struct FraisseCmd {
    std::string family = "bkl", out;
    std::uint32_t n = 2, k = 1, rounds = 1, cap = 2, labels = 16;
    std::uint64_t seed = 0;
    int run() const {
        RunConfig config;
        config.strategy = make_strategy(family, n, labels);
        config.k = k;
        config.rounds = rounds;
        config.size_cap = cap;
        config.seed = seed;
        RunState state = cubeamalg::run(config);
        std::string out_dir = out;
        if (out_dir.empty()) {
            auto stamp = std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count();
            out_dir = "runs/" + std::to_string(seed) + "-" + std::to_string(stamp);
        }
        write_run(state, out_dir);
        json result;
        result["out"] = out_dir;
        result["stages"] = state.stage;
        result["certificate"] = certificate_to_json(certify_irreducible(state));
        std::cout << canonical_bytes(result);
        return exit_ok;
    }
};

struct DimensionCmd {
    std::vector<std::string> inputs;
    std::uint32_t kmax = 4;
    std::string out, dot_out;
    int run() const {
        std::vector<std::string> files;
        for (const auto& input : inputs) {
            if (fs::is_directory(input)) {
                std::vector<std::string> found;
                for (const auto& entry : fs::directory_iterator(input))
                    if (entry.path().extension() == ".json") found.push_back(entry.path().string());
                std::sort(found.begin(), found.end());
                files.insert(files.end(), found.begin(), found.end());
            } else {
                files.push_back(input);
            }
        }
        if (files.empty()) throw input_error("no-input", "no structure files given");
        std::vector<Structure> family;
        for (const auto& f : files) family.push_back(structure_from_json(load_json(f)));
        EmbeddabilityDigraph d = build_digraph(family);
        std::uint32_t dim = dimension_estimate(d, kmax);
        json result;
        result["dimension"] = dim;
        result["kmax"] = kmax;
        result["note"] = "lower-bound estimate on the given finite family";
        result["digraph"] = digraph_to_json(d);
        if (auto w = find_cube_embedding(d, dim)) result["witness"] = cube_witness_to_json(*w);
        emit(result, out);
        if (!dot_out.empty()) write_text_file(dot_out, digraph_to_dot(d));
        return exit_ok;
    }
};

struct CounterexampleCmd {
    std::string family = "bkl", out;
    std::uint32_t n = 1;
    std::size_t cap = 0;
    int run() const {
        std::size_t effective_cap = cap == 0 ? 2 * static_cast<std::size_t>(n) + 2 : cap;
        AmalgamationStrategy strategy = make_strategy(family, n, 0);
        auto witness = search_failure_witness(strategy, effective_cap);
        json result;
        if (witness) {
            result = failure_witness_to_json(*witness);
        } else {
            result["version"] = document_version;
            result["found"] = false;
            result["n"] = n;
            result["size_cap"] = effective_cap;
            result["note"] = "no witness found within the caps; nothing is asserted beyond them";
        }
        emit(result, out);
        return exit_ok;
    }
};

struct SampleCmd {
    std::string family = "bkl", out;
    std::uint32_t n = 2, labels = 16;
    std::size_t size = 1;
    std::uint64_t patterns = 3;
    int run() const {
        AmalgamationStrategy strategy = make_strategy(family, n, labels);
        Structure s = generic_labeled_sample(strategy, size, patterns);
        emit(structure_to_json(s), out);
        return exit_ok;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "cube-amalgam: build, validate, amalgamate, and measure cubes of finite structures"};
    app.require_subcommand(1);

    ValidateCmd validate_cmd;
    auto* validate = app.add_subcommand("validate", "validate a structure or cube document");
    validate->add_option("file", validate_cmd.file)->required();
    validate->add_option("--out", validate_cmd.out);

    ThetaCmd theta_cmd;
    auto* theta_sub = app.add_subcommand("theta", "emit the characteristic formula of a structure");
    theta_sub->add_option("file", theta_cmd.file)->required();
    theta_sub->add_option("--out", theta_cmd.out);

    EmbedCmd embed_cmd;
    auto* embed = app.add_subcommand("embed", "search for embeddings between two structures");
    embed->add_option("fileA", embed_cmd.file_a)->required();
    embed->add_option("fileB", embed_cmd.file_b)->required();
    embed->add_option("--limit", embed_cmd.limit);
    embed->add_option("--out", embed_cmd.out);

    AmalgamateCmd amalgamate_cmd;
    auto* amalgamate = app.add_subcommand("amalgamate", "complete a disjoint boundary cube");
    amalgamate->add_option("file", amalgamate_cmd.file)->required();
    amalgamate->add_option("--family", amalgamate_cmd.family);
    amalgamate->add_option("--n", amalgamate_cmd.n);
    auto* am_labels = amalgamate->add_option("--labels", amalgamate_cmd.labels);
    amalgamate->add_option("--out", amalgamate_cmd.out);

    ExtendCmd extend_cmd;
    auto* extend = app.add_subcommand("extend", "extend a full cube along an embedding at a face");
    extend->add_option("cube", extend_cmd.cube_file)->required();
    extend->add_option("--rho", extend_cmd.rho)->required();
    extend->add_option("--target", extend_cmd.target_file)->required();
    extend->add_option("--map", extend_cmd.map_file);
    extend->add_option("--family", extend_cmd.family);
    extend->add_option("--n", extend_cmd.n);
    auto* ex_labels = extend->add_option("--labels", extend_cmd.labels);
    extend->add_option("--out", extend_cmd.out);

    FraisseCmd fraisse_cmd;
    auto* fraisse = app.add_subcommand("fraisse", "run the iterative cube construction");
    fraisse->add_option("--family", fraisse_cmd.family);
    fraisse->add_option("--n", fraisse_cmd.n);
    fraisse->add_option("--k", fraisse_cmd.k);
    fraisse->add_option("--rounds", fraisse_cmd.rounds);
    fraisse->add_option("--cap", fraisse_cmd.cap);
    fraisse->add_option("--labels", fraisse_cmd.labels);
    fraisse->add_option("--seed", fraisse_cmd.seed);
    fraisse->add_option("--out", fraisse_cmd.out);

    DimensionCmd dimension_cmd;
    auto* dimension =
        app.add_subcommand("dimension", "embeddability digraph and dimension estimate");
    dimension->add_option("inputs", dimension_cmd.inputs, "structure files or directories")
        ->required();
    dimension->add_option("--kmax", dimension_cmd.kmax);
    dimension->add_option("--out", dimension_cmd.out);
    dimension->add_option("--dot-out", dimension_cmd.dot_out);

    CounterexampleCmd counterexample_cmd;
    auto* counterexample =
        app.add_subcommand("counterexample", "partial cube with no valid completion");
    counterexample->add_option("--n", counterexample_cmd.n)->required();
    counterexample->add_option("--family", counterexample_cmd.family);
    counterexample->add_option("--cap", counterexample_cmd.cap);
    counterexample->add_option("--out", counterexample_cmd.out);

    SampleCmd sample_cmd;
    auto* sample = app.add_subcommand("sample", "labeled structure realizing the pattern schema");
    sample->add_option("--family", sample_cmd.family);
    sample->add_option("--n", sample_cmd.n);
    sample->add_option("--size", sample_cmd.size);
    sample->add_option("--patterns", sample_cmd.patterns);
    sample->add_option("--labels", sample_cmd.labels);
    sample->add_option("--out", sample_cmd.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return exit_input;
    }

    amalgamate_cmd.labels_given = am_labels->count() > 0;
    extend_cmd.labels_given = ex_labels->count() > 0;

    try {
        if (app.got_subcommand(validate)) return validate_cmd.run();
        if (app.got_subcommand(theta_sub)) return theta_cmd.run();
        if (app.got_subcommand(embed)) return embed_cmd.run();
        if (app.got_subcommand(amalgamate)) return amalgamate_cmd.run();
        if (app.got_subcommand(extend)) return extend_cmd.run();
        if (app.got_subcommand(fraisse)) return fraisse_cmd.run();
        if (app.got_subcommand(dimension)) return dimension_cmd.run();
        if (app.got_subcommand(counterexample)) return counterexample_cmd.run();
        if (app.got_subcommand(sample)) return sample_cmd.run();
    } catch (const input_error& e) {
        std::cerr << "input error [" << e.code << "]: " << e.what() << "\n";
        return exit_input;
    } catch (const refusal_error& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return exit_refused;
    } catch (const internal_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_refused;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    }
    return exit_input;
}
