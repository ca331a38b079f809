#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "logicfg/symbols.hpp"

namespace logicfg::kb {

struct Route {
    SymbolId from, to, mean;
    std::int64_t distance = 0;

    friend bool operator==(const Route& a, const Route& b) {
        return a.from == b.from && a.to == b.to && a.mean == b.mean && a.distance == b.distance;
    }
};

using SymbolPair = std::pair<SymbolId, SymbolId>;

// The ground facts of one industrial system: eleven relations, set semantics.
// Immutable after normalize(); relations are kept sorted in canonical text
// order so that serialization and derivation are insertion-order independent.
struct FactSet {
    SymbolTable symbols;

    std::vector<SymbolId> countries;
    std::vector<SymbolId> productionLocs;
    std::vector<SymbolId> warehouseLocs;
    std::vector<SymbolPair> locatedIn;           // (location, country)
    std::vector<SymbolId> transportMeans;
    std::vector<SymbolPair> transportMeanAtSite; // (location, mean)
    std::vector<SymbolId> parts;
    std::vector<SymbolPair> canTransport;        // (mean, part)
    std::vector<SymbolPair> partProduceableAt;   // (part, location)
    std::vector<Route> transportRoutes;          // (from, to, mean, distance)
    std::vector<SymbolPair> productionPlan;      // (super, part)

    static constexpr int kRelationCount = 11;

    // Sorts every relation canonically and drops duplicates.
    void normalize();

    std::size_t totalFacts() const;
    bool empty() const { return totalFacts() == 0; }
};

// Parses `predicate(arg1,...,argN).` lines; '%' starts a comment. Throws
// ParseError with the offending line on bad syntax, unknown predicates,
// wrong arity, or a non-integer distance.
FactSet parse_fact_file(std::string_view text);
FactSet parse_fact_file(std::istream& in);
FactSet load_fact_file(const std::string& path);

// Canonical text form; parse_fact_file(serialize_facts(f)) reproduces f.
std::string serialize_facts(const FactSet& facts);

// Per-predicate fact counts in declaration order, e.g. {"country", 3}.
std::vector<std::pair<std::string, std::size_t>> fact_counts(const FactSet& facts);

} // namespace logicfg::kb
