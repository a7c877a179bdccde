#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <cubeamalg/fraisse.hpp>
#include <cubeamalg/json_io.hpp>

namespace cubeamalg {

inline json config_to_json(const RunConfig& c) {
    json out;
    out["family"] = family_name(c.strategy.family);
    out["n"] = c.strategy.n;
    out["L"] = c.strategy.label_universe;
    out["k"] = c.k;
    out["rounds"] = c.rounds;
    out["size_cap"] = c.size_cap;
    out["seed"] = c.seed;
    return out;
}

inline json task_to_json(const ExtensionTask& t) {
    json out;
    out["rho"] = t.rho;
    out["birth_stage"] = t.birth_stage;
    out["base"] = t.base_elements;
    out["target"] = structure_to_json(t.target);
    return out;
}

inline json chain_to_json(const WitnessChain& c) {
    json out;
    out["sigma"] = c.sigma;
    out["tau"] = c.tau;
    out["birth_stage"] = c.birth_stage;
    out["xs"] = c.xs;
    out["ys"] = c.ys;
    return out;
}

inline json coverage_to_json(const CoverageReport& rep) {
    json instances = json::array();
    for (const auto& inst : rep.instances) {
        json row;
        row["face"] = inst.face;
        row["premise_hash"] = hash_hex(canonical_bytes(structure_to_json(inst.premise)));
        row["premise_size"] = inst.premise.elements.size();
        row["target_hash"] = hash_hex(canonical_bytes(structure_to_json(inst.target)));
        row["target_size"] = inst.target.elements.size();
        row["status"] = inst.realized ? "REALIZED" : "PENDING";
        row["realizations"] = inst.realization_count;
        row["extended"] = inst.extended_count;
        instances.push_back(row);
    }
    json out;
    out["stage"] = rep.stage;
    out["instances"] = instances;
    out["realized"] = rep.realized_total();
    out["total"] = rep.instances.size();
    return out;
}

inline json certificate_to_json(const Certificate& cert) {
    json pairs = json::array();
    for (const auto& p : cert.pairs) {
        json row;
        row["sigma"] = p.sigma;
        row["tau"] = p.tau;
        if (p.witness)
            row["witness"] = *p.witness;
        else
            row["witness"] = nullptr;
        pairs.push_back(row);
    }
    json out;
    out["status"] = cert.passed ? "PASS" : "FAIL";
    out["pairs"] = pairs;
    return out;
}

/// Persist a run: stage cube documents, step records, and a manifest whose
/// hashes cover the canonical bytes of every referenced file. Paths inside the
/// manifest are relative to the run directory.
inline void write_run(const RunState& state, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "stages");
    fs::create_directories(dir / "steps");
    json stage_files = json::array();
    for (std::size_t i = 0; i < state.stage_cubes.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "stages/%04zu.json", i);
        std::string bytes = canonical_bytes(cube_to_json(state.stage_cubes[i]));
        write_text_file((dir / name).string(), bytes);
        json row;
        row["file"] = name;
        row["hash"] = hash_hex(bytes);
        stage_files.push_back(row);
    }
    json step_files = json::array();
    for (std::size_t i = 0; i < state.history.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "steps/%04zu.json", i);
        const StepRecord& rec = state.history[i];
        json maps = json::array();
        for (const auto& [face, m] : rec.h) {
            json row;
            row["face"] = face;
            row["map"] = map_to_json(m);
            maps.push_back(row);
        }
        json doc;
        doc["stage"] = rec.stage;
        doc["task"] = task_to_json(rec.task);
        doc["maps"] = maps;
        std::string bytes = canonical_bytes(doc);
        write_text_file((dir / name).string(), bytes);
        json row;
        row["file"] = name;
        row["hash"] = hash_hex(bytes);
        step_files.push_back(row);
    }
    json chains = json::array();
    for (const auto& c : state.chains) chains.push_back(chain_to_json(c));

    json manifest;
    manifest["version"] = document_version;
    manifest["config"] = config_to_json(state.config);
    manifest["stage_count"] = state.stage + 1;
    manifest["completed_rounds"] = state.completed_rounds;
    manifest["aborted"] = state.aborted;
    manifest["diagnostics"] = state.diagnostics;
    manifest["stages"] = stage_files;
    manifest["steps"] = step_files;
    manifest["witness_chains"] = chains;
    manifest["coverage"] = coverage_to_json(coverage_report(state));
    manifest["certificate"] =
        certificate_to_json(state.completed_rounds >= 1 ? certify_irreducible(state)
                                                        : Certificate{});
    write_text_file((dir / "manifest.json").string(), canonical_bytes(manifest));
}

/// Re-hash every file referenced by a manifest; the first mismatching path, if any.
inline std::optional<std::string> verify_manifest(const std::filesystem::path& dir) {
    json manifest = parse_json_text(read_text_file((dir / "manifest.json").string()));
    for (const char* key : {"stages", "steps"}) {
        if (!manifest.contains(key)) continue;
        for (const auto& row : manifest.at(key)) {
            std::string file = row.at("file").get<std::string>();
            std::string expected = row.at("hash").get<std::string>();
            std::string actual = hash_hex(read_text_file((dir / file).string()));
            if (actual != expected) return file;
        }
    }
    return std::nullopt;
}

}  // namespace cubeamalg
