#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <cubeamalg/amalgamation.hpp>
#include <cubeamalg/core.hpp>
#include <cubeamalg/cube.hpp>
#include <cubeamalg/embedding.hpp>
#include <cubeamalg/strategy.hpp>
#include <cubeamalg/structure.hpp>

namespace cubeamalg {

struct RunConfig {
    AmalgamationStrategy strategy;
    std::uint32_t k = 1;         // cube dimension
    std::uint32_t rounds = 1;    // R
    std::uint32_t size_cap = 2;  // S: extension targets have at most S elements
    std::uint64_t seed = 0;      // recorded; the schedule itself is deterministic
    std::size_t element_cap = 10000;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// One scheduled extension: a generated substructure B of the stage-i structure
/// at face rho, and a one-point extension target over B's ids (the embedding
/// B -> B' is the identity inclusion). Ids are stage-relative; step() translates
/// them forward through the history.
struct ExtensionTask {
    Face rho = 0;
    std::uint32_t birth_stage = 0;
    std::vector<ElementId> base_elements;  // sorted, at birth stage
    Structure target;                      // unlabeled family type over base ids + one fresh id

    friend bool operator==(const ExtensionTask&, const ExtensionTask&) = default;
};

struct StepRecord {
    std::uint32_t stage = 0;  // index of the state this step consumed
    ExtensionTask task;
    std::map<Face, ElementMap> h;  // the disjoint embedding A^i -> A^{i+1}

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

/// Proof-carrying witness that pair (sigma, tau) with sigma ⊄ tau stays
/// irreducible: per stage j >= birth, x_j in A^j_sigma with image y_j in the top
/// face outside tau's image.
struct WitnessChain {
    Face sigma = 0, tau = 0;
    std::uint32_t birth_stage = 0;
    std::vector<ElementId> xs;
    std::vector<ElementId> ys;

    friend bool operator==(const WitnessChain&, const WitnessChain&) = default;
};

struct RunState {
    RunConfig config;
    std::uint32_t stage = 0;
    CubeDiagram cube;
    IdAllocator alloc{0};
    std::vector<CubeDiagram> stage_cubes;  // stage_cubes[i] is the stage-i cube
    std::vector<StepRecord> history;       // history[i] maps stage i to stage i+1
    std::vector<WitnessChain> chains;
    std::uint32_t completed_rounds = 0;
    std::vector<std::string> diagnostics;
    bool aborted = false;
};

struct CoverageInstance {
    Face face = 0;
    Structure premise;  // canonical type
    Structure target;   // canonical type
    bool realized = false;
    std::uint32_t realization_count = 0;
    std::uint32_t extended_count = 0;
};

struct CoverageReport {
    std::uint32_t stage = 0;
    std::vector<CoverageInstance> instances;

    std::uint32_t realized_total() const {
        std::uint32_t c = 0;
        for (const auto& i : instances) c += i.realized ? 1 : 0;
        return c;
    }
};

struct CertificatePair {
    Face sigma = 0, tau = 0;
    std::optional<ElementId> witness;  // element of the top face
};

struct Certificate {
    bool passed = false;
    std::vector<CertificatePair> pairs;
};

inline void validate_config(const RunConfig& config) {
    if (config.k < 1) throw refusal_error("runs need cube dimension k >= 1");
    if (config.k > max_cube_dimension) throw refusal_error("cube dimension exceeds the bound");
    if (auto kmax = config.strategy.max_amalgamation_k(); kmax && config.k >= *kmax)
        throw refusal_error("runs in " + family_name(config.strategy.family) + "(" +
                            std::to_string(config.strategy.n) + ") require 1 <= k < " +
                            std::to_string(*kmax));
    if (config.size_cap < 1) throw refusal_error("the extension size cap must be at least 1");
}

namespace detail {

/// Generated substructures of s with at most max_size elements, as sorted id
/// lists in (size, lexicographic) order.
inline std::vector<std::vector<ElementId>> closed_subsets_up_to(const Structure& s,
                                                                std::size_t max_size) {
    std::vector<std::vector<ElementId>> out;
    out.push_back({});  // the empty substructure
    auto consider = [&](const std::vector<ElementId>& subset) {
        auto closure = generated_substructure(s, subset);
        if (closure.size() <= max_size && closure == subset) out.push_back(subset);
    };
    for (std::size_t size = 1; size <= max_size && size <= s.elements.size(); ++size) {
        std::vector<std::size_t> idx(size);
        for (std::size_t i = 0; i < size; ++i) idx[i] = i;
        for (;;) {
            std::vector<ElementId> subset(size);
            for (std::size_t i = 0; i < size; ++i) subset[i] = s.elements[idx[i]];
            consider(subset);
            std::int64_t p = static_cast<std::int64_t>(size) - 1;
            while (p >= 0 && idx[p] == s.elements.size() - size + p) --p;
            if (p < 0) break;
            ++idx[p];
            for (std::size_t q = static_cast<std::size_t>(p) + 1; q < size; ++q)
                idx[q] = idx[q - 1] + 1;
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return out;
}

inline std::set<LabelSet> label_pool(const CubeDiagram& cube) {
    std::set<LabelSet> pool;
    for (const auto& [f, s] : cube.faces)
        for (LabelSet l : s.labels) pool.insert(l);
    return pool;
}

inline Structure unlabeled_reduct(const Structure& s) {
    Structure out = s;
    out.label_universe = 0;
    out.labels.clear();
    return out;
}

}  // namespace detail

/// All tasks for the current state: per face, per generated substructure of
/// size < S, each canonical one-point extension type. Deterministic order.
inline std::vector<ExtensionTask> enumerate_tasks(const RunState& state) {
    std::vector<ExtensionTask> out;
    const std::uint32_t S = state.config.size_cap;
    for (Face f : state.cube.required_faces()) {
        const Structure& face_structure = state.cube.at(f);
        Structure reduct = detail::unlabeled_reduct(face_structure);
        auto bases = detail::closed_subsets_up_to(reduct, S >= 1 ? S - 1 : 0);
        for (const auto& base_ids : bases) {
            Structure base = restrict_to(reduct, base_ids);
            for (auto& target : state.config.strategy.one_point_extension_types(base)) {
                if (target.elements.size() > S) continue;
                ExtensionTask t;
                t.rho = f;
                t.birth_stage = state.stage;
                t.base_elements = base_ids;
                t.target = std::move(target);
                out.push_back(std::move(t));
            }
        }
    }
    return out;
}

namespace detail {

inline ElementId translate_forward(const RunState& state, Face face, std::uint32_t from_stage,
                                   ElementId id) {
    for (std::uint32_t j = from_stage; j < state.stage; ++j) id = state.history[j].h.at(face).at(id);
    return id;
}

/// Open chains for pairs that this step made witnessable, and advance the
/// existing ones, re-verifying the invariant y_j outside tau's image.
inline void update_chains(RunState& state, Face rho, const std::map<Face, ElementMap>& h) {
    const CubeDiagram& now = state.cube;
    const Face top = now.top();
    for (auto& chain : state.chains) {
        ElementId x = h.at(chain.sigma).at(chain.xs.back());
        ElementId y = h.at(top).at(chain.ys.back());
        if (now.map_at(chain.sigma, top).at(x) != y)
            throw internal_error("witness chain broke naturality");
        auto img = now.image_in_top(chain.tau);
        if (std::binary_search(img.begin(), img.end(), y))
            throw internal_error("witness chain invariant failed: y entered tau's image");
        chain.xs.push_back(x);
        chain.ys.push_back(y);
    }
    std::set<std::pair<Face, Face>> open;
    for (const auto& c : state.chains) open.insert({c.sigma, c.tau});
    for (Face sigma : now.required_faces()) {
        if (!face_subset(rho, sigma)) continue;  // only faces above rho gained elements
        // new elements of A^{i+1}_sigma: outside the h_sigma image
        auto img_h = h.at(sigma).image();
        std::vector<ElementId> fresh;
        for (ElementId e : now.at(sigma).elements)
            if (!std::binary_search(img_h.begin(), img_h.end(), e)) fresh.push_back(e);
        if (fresh.empty()) continue;
        for (Face tau : now.required_faces()) {
            if (face_subset(sigma, tau)) continue;
            if (face_subset(rho, tau)) continue;  // tau must be untouched for the base case
            if (open.count({sigma, tau})) continue;
            ElementId x = fresh.front();
            ElementId y = now.map_at(sigma, top).at(x);
            auto img = now.image_in_top(tau);
            if (std::binary_search(img.begin(), img.end(), y))
                throw internal_error("fresh witness already lies in tau's image");
            WitnessChain c;
            c.sigma = sigma;
            c.tau = tau;
            c.birth_stage = state.stage;
            c.xs = {x};
            c.ys = {y};
            state.chains.push_back(std::move(c));
            open.insert({sigma, tau});
        }
    }
}

}  // namespace detail

/// Execute one task: disjoint 2-amalgamation of the face structure with the
/// target over the base, then cube extension to propagate the change, with
/// witness-chain bookkeeping.
inline void step(RunState& state, const ExtensionTask& task) {
    const AmalgamationStrategy& strategy = state.config.strategy;
    const Face rho = task.rho;
    const Structure& face_now = state.cube.at(rho);

    // translate the task's ids to the current stage
    ElementMap translation;
    for (ElementId id : task.base_elements)
        translation.set(id, detail::translate_forward(state, rho, task.birth_stage, id));
    std::vector<ElementId> base_now = translation.image();

    Structure base_struct = restrict_to(face_now, base_now);
    {
        auto closure = generated_substructure(face_now, base_now);
        if (closure != base_now)
            throw internal_error("task base is no longer a generated substructure");
    }

    // rebuild the target over current ids, its fresh element above everything live
    ElementId fresh_old = task.target.elements.back();
    ElementId fresh_now = state.alloc.peek();
    for (const auto& [f, s] : state.cube.faces)
        if (!s.elements.empty()) fresh_now = std::max(fresh_now, s.elements.back() + 1);
    ElementMap target_renaming = translation;
    target_renaming.set(fresh_old, fresh_now);
    Structure target_now = rename_structure(task.target, target_renaming);
    target_now.label_universe = strategy.label_universe;
    if (strategy.label_universe > 0) {
        target_now.labels.assign(target_now.elements.size(), 0);
        auto pool = detail::label_pool(state.cube);
        for (std::size_t i = 0; i < target_now.elements.size(); ++i) {
            ElementId id = target_now.elements[i];
            if (id == fresh_now) {
                LabelSet fresh_label = least_unused_label_set(strategy.label_universe, pool);
                target_now.labels[i] = fresh_label;
                pool.insert(fresh_label);
            } else {
                target_now.labels[i] = face_now.labels[*face_now.index_of(id)];
            }
        }
    }

    // disjoint 2-amalgamation over the base
    CubeDiagram two;
    two.k = 2;
    two.shape = CubeShape::boundary;
    two.faces[0b00] = base_struct;
    two.faces[0b01] = face_now;
    two.faces[0b10] = target_now;
    two.maps[{0b00, 0b00}] = ElementMap::identity(base_struct.elements);
    two.maps[{0b01, 0b01}] = ElementMap::identity(face_now.elements);
    two.maps[{0b10, 0b10}] = ElementMap::identity(target_now.elements);
    two.maps[{0b00, 0b01}] = ElementMap::identity(base_struct.elements);
    two.maps[{0b00, 0b10}] = ElementMap::identity(base_struct.elements);
    CubeDiagram amalgam = disjoint_amalgamate(strategy, two, state.alloc);
    const Structure& face_next = amalgam.at(0b11);
    const ElementMap& h_rho = amalgam.map_at(0b01, 0b11);

    auto [extended, emb] = extend_cube(strategy, state.cube, rho, face_next, h_rho, state.alloc);

    state.cube = std::move(extended);
    StepRecord rec;
    rec.stage = state.stage;
    rec.task = task;
    rec.h = emb.maps;
    state.history.push_back(std::move(rec));
    state.stage += 1;
    detail::update_chains(state, rho, state.history.back().h);
    state.stage_cubes.push_back(state.cube);

    for (const auto& [f, s] : state.cube.faces) {
        if (s.elements.size() > state.config.element_cap) {
            state.aborted = true;
            state.diagnostics.push_back("element cap exceeded at face " + std::to_string(f));
        }
    }
}

/// The iterative construction: R rounds, each enqueuing the round-start task
/// enumeration and draining it in FIFO order. Fully deterministic.
inline RunState run(const RunConfig& config) {
    validate_config(config);
    RunState state;
    state.config = config;
    state.cube = make_empty_cube(config.k, CubeShape::full, config.strategy.empty_structure());
    state.stage_cubes.push_back(state.cube);
    for (std::uint32_t round = 0; round < config.rounds && !state.aborted; ++round) {
        auto tasks = enumerate_tasks(state);
        for (const auto& task : tasks) {
            if (state.aborted) break;
            step(state, task);
        }
        if (!state.aborted) state.completed_rounds += 1;
    }
    return state;
}

/// Extension-axiom coverage at the current stage, over the canonical instance
/// enumeration: premise types are the generated substructures of each face (up
/// to isomorphism, size < S), targets their canonical one-point extensions.
/// An instance is REALIZED when the premise has at least one realization and
/// every realization extends.
inline CoverageReport coverage_report(const RunState& state) {
    CoverageReport rep;
    rep.stage = state.stage;
    const std::uint32_t S = state.config.size_cap;
    for (Face f : state.cube.required_faces()) {
        Structure reduct = detail::unlabeled_reduct(state.cube.at(f));
        auto bases = detail::closed_subsets_up_to(reduct, S >= 1 ? S - 1 : 0);
        std::vector<Structure> premise_types;
        for (const auto& ids : bases) {
            Structure t = canonical_type(restrict_to(reduct, ids));
            bool seen = false;
            for (const auto& p : premise_types)
                if (is_isomorphic(p, t)) { seen = true; break; }
            if (!seen) premise_types.push_back(std::move(t));
        }
        for (const auto& premise : premise_types) {
            for (const auto& target : state.config.strategy.one_point_extension_types(premise)) {
                if (target.elements.size() > S) continue;
                CoverageInstance inst;
                inst.face = f;
                inst.premise = premise;
                inst.target = target;
                auto realizations = find_embeddings(premise, reduct, 100000);
                inst.realization_count = static_cast<std::uint32_t>(realizations.size());
                for (const auto& m : realizations) {
                    if (!find_embeddings(target, reduct, 1, &m).empty()) inst.extended_count += 1;
                }
                inst.realized = inst.realization_count > 0 &&
                                inst.extended_count == inst.realization_count;
                rep.instances.push_back(std::move(inst));
            }
        }
    }
    return rep;
}

/// Irreducibility certificate from the witness chains: for every ordered pair
/// sigma ⊄ tau, an element of the top face inside sigma's image and outside
/// tau's, re-verified by direct membership tests on the final cube.
inline Certificate certify_irreducible(const RunState& state) {
    if (state.completed_rounds < 1)
        throw refusal_error("irreducibility certification needs at least one completed round");
    Certificate cert;
    cert.passed = true;
    for (Face sigma : state.cube.required_faces()) {
        for (Face tau : state.cube.required_faces()) {
            if (face_subset(sigma, tau)) continue;
            CertificatePair pair;
            pair.sigma = sigma;
            pair.tau = tau;
            for (const auto& chain : state.chains) {
                if (chain.sigma != sigma || chain.tau != tau) continue;
                ElementId y = chain.ys.back();
                auto img_sigma = state.cube.image_in_top(sigma);
                auto img_tau = state.cube.image_in_top(tau);
                if (std::binary_search(img_sigma.begin(), img_sigma.end(), y) &&
                    !std::binary_search(img_tau.begin(), img_tau.end(), y)) {
                    pair.witness = y;
                }
                break;
            }
            if (!pair.witness) cert.passed = false;
            cert.pairs.push_back(pair);
        }
    }
    return cert;
}

}  // namespace cubeamalg
