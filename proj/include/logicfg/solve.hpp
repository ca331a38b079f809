#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "logicfg/derive.hpp"
#include "logicfg/facts.hpp"

namespace logicfg::solve {

enum class Sourcing { Single, Double };

constexpr const char* sourcing_name(Sourcing s) {
    return s == Sourcing::Single ? "single" : "double";
}

struct SolveConfig {
    Sourcing sourcing = Sourcing::Single;
    ground::EncodingVariant variant = ground::EncodingVariant::Baseline;
    std::uint64_t seed = 0;
    // Collapses path options that agree on (part, from, to, distance, means)
    // to the one with canonically least vias.
    bool dedupPaths = true;
    std::string shipMeanName = "ship";
    std::optional<std::chrono::milliseconds> timeout;
};

// One assigned site pair; [1] stays invalid under single sourcing.
using SiteChoice = std::array<SymbolId, 2>;

inline int site_count(const SiteChoice& s) { return s[1].valid() ? 2 : (s[0].valid() ? 1 : 0); }

struct ModelPath {
    SymbolId part, from, to;
    ground::RouteCandidate cand;
    bool isRoot = false; // anchors the root at its site: distance 0, no legs
};

struct Model {
    std::vector<SiteChoice> sites; // parallel to Problem::parts
    std::vector<ModelPath> paths;  // sorted by (part, from, to) text order
    std::int64_t totalDistance = 0;
    std::int64_t legCount = 0;
};

struct PlanEdge {
    SymbolId super, part;
    std::size_t superIdx = 0, partIdx = 0; // into Problem::parts
};

// Per plan edge: cheapest candidate for every domain (from, to) pair, the
// backbone of both the optimizer bound and its model reconstruction.
struct EdgeInfo {
    std::map<std::uint64_t, ground::RouteCandidate> cheapest; // packPair(from, to)
    std::int64_t minPairCost = 0; // min over pairs with candidates
    bool anyPair = false;         // false: no pair has a candidate
};

struct Infeasibility {
    SymbolId part;
    std::string message;
};

struct Problem {
    const kb::FactSet* facts = nullptr;
    SolveConfig config;
    ground::DerivedDB db;
    ground::LegIndex index;

    std::vector<SymbolId> parts; // assignment order: BFS from the plan root
    std::vector<std::size_t> partsByText;
    std::vector<std::vector<SymbolId>> domains;             // sites, text order
    std::vector<std::vector<SiteChoice>> choiceValues;      // per part
    std::vector<PlanEdge> edges;                            // (super, part) text order
    std::vector<EdgeInfo> edgeInfos;                        // parallel to edges
    std::optional<std::size_t> rootIdx;
    std::unordered_map<SymbolId, std::vector<SymbolId>> countriesOf;
    std::optional<Infeasibility> infeasible;

    std::size_t partIndexOf(SymbolId part) const {
        for (std::size_t i = 0; i < parts.size(); ++i)
            if (parts[i] == part)
                return i;
        return parts.size();
    }
};

// Derives, indexes and precomputes the search structures. Statically
// unsatisfiable inputs (a part without sites, a plan edge with no transport
// option at all) set `infeasible` instead of throwing.
Problem build_problem(const kb::FactSet& facts, const SolveConfig& config);

struct EnumerateOptions {
    std::uint64_t limit = 0; // 0: all
};

struct EnumerateStats {
    std::uint64_t emitted = 0;
    std::uint64_t nodesExpanded = 0;
    bool truncated = false; // limit reached or callback stopped
    bool timedOut = false;
};

struct EnumerateResult {
    std::vector<Model> models;
    std::uint64_t nodesExpanded = 0;
    bool truncated = false;
    bool timedOut = false;
};

// Emits every model (up to the limit). The seed permutes exploration order
// only; the full model set is seed independent. Returning false from the
// callback stops the search.
EnumerateStats enumerate_models(const Problem& problem, const EnumerateOptions& options,
                                const std::function<bool(const Model&)>& emit);
EnumerateResult enumerate_models(const Problem& problem, const EnumerateOptions& options = {});

struct OptimizeResult {
    std::optional<Model> model; // absent: unsatisfiable (or timed out early)
    std::uint64_t nodesExpanded = 0;
    bool timedOut = false;
};

// Branch-and-bound over site assignments; each plan-edge grounding then takes
// its cheapest path independently. Among cost ties the model with the least
// canonical key wins, so the result does not depend on seed or job count.
OptimizeResult optimize(const Problem& problem, unsigned jobs = 1);

// Constraint audit of an arbitrary model against the problem. Empty result
// means valid; each violation is one line with a stable prefix.
std::vector<std::string> check_model(const Problem& problem, const Model& model);

std::uint64_t count_choice_points(const Problem& problem);

// Canonical text key: site assignment plus path atoms. Total order over
// models of one problem; used for dedup and optimizer tie-breaks.
std::string model_key(const Problem& problem, const Model& model);

// The deduplicated, canonically sorted path options of one plan-edge
// grounding; cheapest first, independent of the configured seed.
std::vector<ground::RouteCandidate> grounding_candidates(const Problem& problem, SymbolId part,
                                                         SymbolId from, SymbolId to);

} // namespace logicfg::solve
