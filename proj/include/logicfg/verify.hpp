#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "logicfg/facts.hpp"
#include "logicfg/solve.hpp"

namespace logicfg::verify {

enum class Severity { Error, Warning };
enum class Origin { Core, Extended };

constexpr const char* severity_name(Severity s) {
    return s == Severity::Error ? "error" : "warning";
}

constexpr const char* origin_name(Origin o) {
    return o == Origin::Core ? "core" : "extended";
}

struct Finding {
    std::string assertion;
    std::vector<SymbolId> subjects;
    std::string message;
    Severity severity = Severity::Error;
    Origin origin = Origin::Extended;
};

struct AssertionReport {
    std::vector<Finding> findings;

    bool pass() const { return findings.empty(); }
    std::size_t errorCount() const;
    std::size_t warningCount() const;
};

// Checks a fact set for referential and structural problems. Violations come
// back as data; nothing throws and the facts are left untouched. The suite:
//
//   core      invalidLocatedIn              location without a country
//   core      invalidLocatedInTwoCountries  location in two countries
//   extended  invalidRouteEndpoint          route from/to an undeclared location
//   extended  invalidMeanAtSite             placement of an undeclared mean
//   extended  invalidCanTransportMean       capability of an undeclared mean
//   extended  invalidPartProduceableAt      undeclared part or location
//   extended  invalidProductionPlanRef      plan edge naming an undeclared part
//   extended  invalidNegativeDistance       route with negative distance
//   extended  invalidUnproduceablePart      part produceable nowhere
//   extended  invalidProductionPlanCycle    cyclic production plan
//   extended  invalidMultipleRoots          more than one plan root
//   extended  invalidLocationTypeConflict   both production site and warehouse
//   extended  invalidMeanAtNoSite           declared mean placed nowhere
//   extended  countryWithoutLocation        country with no location (warning)
AssertionReport run_assertions(const kb::FactSet& facts);

// One line per finding plus a summary line.
std::string report_text(const AssertionReport& report, const kb::FactSet& facts);

// Columns: assertionName,subject,message. Multiple subjects join with ';'.
std::string report_csv(const AssertionReport& report, const kb::FactSet& facts);

struct BruteForceResult {
    std::vector<solve::Model> models;
    std::optional<std::int64_t> optimum; // unset: no model exists
};

// Exhaustive oracle for the solver: walks every site assignment and every
// combination of route candidates, keeping exactly the combinations that
// check_model accepts. Throws Error once the instance exceeds 10^7 units of
// work, so keep inputs small.
BruteForceResult brute_force_solve(const solve::Problem& problem);

} // namespace logicfg::verify
