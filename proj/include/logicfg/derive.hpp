#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "logicfg/facts.hpp"
#include "logicfg/symbols.hpp"

namespace logicfg::ground {

using kb::FactSet;
using kb::Route;
using kb::SymbolPair;

enum class EncodingVariant { Baseline, PLChoiceAsIC, LocTypeReq, TMTypeReq, All };

constexpr const char* variant_name(EncodingVariant v) {
    switch (v) {
    case EncodingVariant::Baseline: return "Baseline";
    case EncodingVariant::PLChoiceAsIC: return "PLChoiceAsIC";
    case EncodingVariant::LocTypeReq: return "LocTypeReq";
    case EncodingVariant::TMTypeReq: return "TMTypeReq";
    case EncodingVariant::All: return "All";
    }
    return "?";
}

std::optional<EncodingVariant> variant_from_name(std::string_view name);

inline constexpr EncodingVariant kAllVariants[] = {
    EncodingVariant::Baseline, EncodingVariant::PLChoiceAsIC, EncodingVariant::LocTypeReq,
    EncodingVariant::TMTypeReq, EncodingVariant::All};

// The variants form a cumulative chain of restrictions: each filter stays
// active in every later variant.
inline constexpr bool restricts_endpoint_types(EncodingVariant v) {
    return v == EncodingVariant::LocTypeReq || v == EncodingVariant::TMTypeReq ||
           v == EncodingVariant::All;
}
inline constexpr bool restricts_middle_mean(EncodingVariant v) {
    return v == EncodingVariant::TMTypeReq || v == EncodingVariant::All;
}
inline constexpr bool coverage_choice_as_constraint(EncodingVariant v) {
    return v == EncodingVariant::PLChoiceAsIC || v == EncodingVariant::All;
}

struct Cbtft {
    SymbolId from, to, part, mean;
    std::int64_t distance = 0;

    friend bool operator==(const Cbtft& a, const Cbtft& b) {
        return a.from == b.from && a.to == b.to && a.part == b.part && a.mean == b.mean &&
               a.distance == b.distance;
    }
};

// Closure of the derivation rules over one FactSet. Variant independent;
// the variants only filter the stitched candidates below.
struct DerivedDB {
    std::vector<SymbolId> locations;
    std::optional<SymbolId> root;
    std::vector<Route> routesClosed;
    std::vector<SymbolPair> meanAtSiteClosed;  // (location, mean)
    std::vector<SymbolPair> canTransportClosed; // (mean, part)
    std::vector<Cbtft> cbtft;

    std::size_t closureSize() const {
        return locations.size() + (root ? 1 : 0) + routesClosed.size() + meanAtSiteClosed.size() +
               canTransportClosed.size();
    }
};

// A stitched transport option: 1, 2 or 3 cbtft legs chained through vias.
struct RouteCandidate {
    SymbolId part, from, to;
    std::array<SymbolId, 2> vias{};
    std::array<SymbolId, 3> means{};
    int viaCount = 0; // legs = viaCount + 1
    std::int64_t distance = 0;

    int legCount() const { return viaCount + 1; }

    friend bool operator==(const RouteCandidate& a, const RouteCandidate& b) {
        if (a.part != b.part || a.from != b.from || a.to != b.to || a.viaCount != b.viaCount ||
            a.distance != b.distance)
            return false;
        for (int i = 0; i < a.viaCount; ++i)
            if (a.vias[i] != b.vias[i])
                return false;
        for (int i = 0; i <= a.viaCount; ++i)
            if (a.means[i] != b.means[i])
                return false;
        return true;
    }
};

struct CandidateSets {
    std::vector<RouteCandidate> directs, via1s, via2s;
};

struct GroundStats {
    std::uint64_t cbtftCount = 0;
    std::uint64_t directCount = 0;
    std::uint64_t via1Count = 0;
    std::uint64_t via2Count = 0;
    std::uint64_t groundProxy = 0;
    std::uint64_t choicePoints = 0;
};

// Computes location/root/symmetric/intra-site closures. Throws DeriveError
// when the reserved intraSite symbol occurs in the input, when a nonempty
// production plan has no unique root, or when the plan is cyclic. An empty
// plan leaves root unset.
DerivedDB derive_base(const FactSet& facts);

// Join rule: (F,T,P,M,D) iff canTransport(M,P), mean at F and T, route(F,T,M,D).
// Includes the intra-site seeds for every (location, part) pair.
std::vector<Cbtft> derive_cbtft(const FactSet& facts, const DerivedDB& db);

// derive_base + derive_cbtft in one call; cbtft stored in the result.
DerivedDB derive_all(const FactSet& facts);

// Per-part leg adjacency over the cbtft relation, shared by candidate
// stitching, counting, and the solver.
struct LegIndex {
    struct Leg {
        int to = 0;
        SymbolId mean;
        std::int64_t distance = 0;
    };
    struct PartLegs {
        std::vector<std::vector<Leg>> byFrom; // location index -> outgoing legs
        bool parallelLegs = false; // same (from,to,mean) with two distances
    };

    std::vector<SymbolId> locs; // canonical order; index = position
    std::unordered_map<SymbolId, int> locIdx;
    std::vector<bool> isProduction, isWarehouse;
    std::unordered_map<SymbolId, PartLegs> perPart;
    SymbolId shipMean; // invalid when the designated mean is absent

    const PartLegs* legsOf(SymbolId part) const {
        auto it = perPart.find(part);
        return it == perPart.end() ? nullptr : &it->second;
    }
    int indexOf(SymbolId loc) const {
        auto it = locIdx.find(loc);
        return it == locIdx.end() ? -1 : it->second;
    }
};

// shipMeanName designates the mean required on the middle via2 leg under
// TMTypeReq/All; when the name is not interned the filter admits nothing.
LegIndex build_leg_index(const FactSet& facts, const DerivedDB& db,
                         std::string_view shipMeanName = "ship");

// Streams every candidate for one (part, from, to) group under the variant
// filters, after all-field deduplication. from == to admits only directs.
void for_each_candidate(const FactSet& facts, const LegIndex& index, SymbolId part, SymbolId from,
                        SymbolId to, EncodingVariant variant,
                        const std::function<void(const RouteCandidate&)>& fn);

// Materializes every candidate (all (from,to) groups). Intended for small
// instances; counts at benchmark scale go through ground_stats instead.
CandidateSets derive_candidates(const FactSet& facts, const DerivedDB& db, EncodingVariant variant);

// Counting form of derive_candidates: cardinalities of the deduplicated
// candidate sets without materializing them, plus the ground-size proxy
// (tuple counts + closure sizes + choice points) and the choice-point count.
GroundStats ground_stats(const FactSet& facts, const DerivedDB& db, EncodingVariant variant);
GroundStats ground_stats(const FactSet& facts, const DerivedDB& db, const LegIndex& index,
                         EncodingVariant variant);

// Ground choice-rule instances: one per part, one per production location
// (except when the coverage choice is rewritten as a constraint), one per
// (part, from, to) plan-edge grounding.
std::uint64_t count_choice_points(const FactSet& facts, EncodingVariant variant);

} // namespace logicfg::ground
