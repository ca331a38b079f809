#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "logicfg/derive.hpp"
#include "logicfg/facts.hpp"
#include "logicfg/solve.hpp"

namespace logicfg::bench {

// Generator knobs at the reference scale: 29 locations, 34 parts, 182 mean
// placements. routeDensity drives the optional route sample of the extra
// means and is calibrated so the baseline closure lands near 30000 tuples.
struct InstanceParams {
    int nProductionLocs = 13;
    int nWarehouseLocs = 16;
    int nTransportMeanAtSite = 182;
    int nParts = 34;
    int nCountries = 5;
    int nMeans = 8;
    double routeDensity = 0.19;
    std::uint64_t seed = 0;
};

// Deterministic per (params, seed). The result is always assertion-clean and
// has a first model under single sourcing; generation retries with a derived
// sub-seed until both hold and reports the retry count through `retries`.
// Throws Error when the parameters cannot yield such an instance.
kb::FactSet generate_instance(const InstanceParams& params, int* retries = nullptr);

struct VariantRow {
    ground::EncodingVariant variant = ground::EncodingVariant::Baseline;
    ground::GroundStats stats;
    std::int64_t deriveMs = 0;
    std::int64_t firstModelMs = -1; // -1: no model within the configured timeout
};

struct VariantReport {
    std::vector<VariantRow> rows; // one per encoding variant, fixed order
};

// Derives and counts under every encoding variant, then times the path to a
// first model with the given solve settings (the variant field is overridden
// per row). cfg.timeout bounds each per-variant solve; hitting it is recorded
// as firstModelMs -1, not an error. Expects assertion-clean facts.
VariantReport run_variants(const kb::FactSet& facts, const solve::SolveConfig& cfg);

// Columns: variant,cbtft,direct,via1,via2,groundProxy,choicePoints,deriveMs,firstModelMs
std::string report_csv(const VariantReport& report);

} // namespace logicfg::bench
