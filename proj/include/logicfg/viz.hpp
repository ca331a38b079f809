#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "logicfg/facts.hpp"
#include "logicfg/solve.hpp"

namespace logicfg::viz {

inline constexpr int kCanvasWidth = 640;
inline constexpr int kCanvasHeight = 480;
inline constexpr int kCanvasMargin = 56;

struct OverviewRow {
    std::uint64_t modelId = 0;
    std::int64_t totalDistance = 0;
    std::int64_t legCount = 0;
};

struct DetailRow {
    std::uint64_t modelId = 0;
    std::string part, from, to;
    std::vector<std::string> vias;  // in travel order
    std::vector<std::string> means; // one per leg; root anchors carry intraSite
    std::int64_t distance = 0;
};

// One overview row per model, detail rows one per path entry, both keyed by
// the model's position in the export call.
struct ModelTable {
    std::vector<OverviewRow> overview;
    std::vector<DetailRow> details;

    // Columns: modelId,totalDistance,legCount
    std::string overviewCsv() const;
    // Columns: modelId,part,from,viaList,to,meansList,distance ';'-joined lists
    std::string detailsCsv() const;
};

ModelTable export_csv(const kb::FactSet& facts, const std::vector<solve::Model>& models);

// Inverse of the two serializers; throws Error on malformed input.
ModelTable parse_model_table(const std::string& overviewCsv, const std::string& detailsCsv);

// Abstract canvas coordinates per location plus optional per-mean styling
// overrides; means without an entry get a fixed builtin or palette style.
struct MapLayout {
    std::map<std::string, std::pair<double, double>> coordinates;
    std::map<std::string, std::pair<std::string, std::string>> styling; // color, dash
};

// Columns: location,x,y. Throws Error on malformed rows.
MapLayout parse_layout_csv(const std::string& text);
MapLayout load_layout_csv(const std::string& path);

// Deterministic fallback: all declared locations on a square grid.
MapLayout grid_layout(const kb::FactSet& facts);

// Scatter of two overview KPIs ("totalDistance" or its alias "distance", and
// "legCount"); one marker per model. Unknown KPI names throw Error.
std::string render_scatter(const std::vector<OverviewRow>& overview, const std::string& kpiX,
                           const std::string& kpiY);

// Route map of one model: production sites as red boxes, warehouses as black
// dots, one polyline per leg styled by its mean, intra-site legs as self
// loops, the root anchor as a ring. Locations referenced by the model must
// have a coordinate; a missing one throws Error naming the location.
std::string render_map(const kb::FactSet& facts, const solve::Model& model,
                       const MapLayout& layout);

} // namespace logicfg::viz
