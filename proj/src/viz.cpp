#include "logicfg/viz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "logicfg/csv.hpp"
#include "logicfg/errors.hpp"

namespace logicfg::viz {

using kb::FactSet;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string xmlEscape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string joinList(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i)
            out += ';';
        out += items[i];
    }
    return out;
}

std::vector<std::string> splitList(const std::string& field) {
    std::vector<std::string> out;
    if (field.empty())
        return out;
    std::string cur;
    for (char c : field) {
        if (c == ';') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

std::int64_t parseInt(const std::string& field, const char* what) {
    try {
        std::size_t used = 0;
        const std::int64_t v = std::stoll(field, &used);
        if (used != field.size())
            throw Error("");
        return v;
    } catch (const std::exception&) {
        throw Error(std::string("model table: bad ") + what + " value '" + field + "'");
    }
}

double parseDouble(const std::string& field, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (used != field.size())
            throw Error("");
        return v;
    } catch (const std::exception&) {
        throw Error("layout: bad coordinate '" + field + "' for " + where);
    }
}

constexpr const char* kOverviewHeader = "modelId,totalDistance,legCount";
constexpr const char* kDetailsHeader = "modelId,part,from,viaList,to,meansList,distance";
constexpr const char* kLayoutHeader = "location,x,y";

// Fixed looks for the narrative means; everything else cycles the palette.
const std::pair<std::string, std::string>* builtinStyle(const std::string& mean) {
    static const std::map<std::string, std::pair<std::string, std::string>> kBuiltin = {
        {"truck", {"#d4a017", ""}},
        {"ship", {"#1f6fd0", "6 4"}},
        {"plane", {"#2e9e44", "2 3"}},
        {std::string(kIntraSiteName), {"#888888", "1 3"}},
    };
    const auto it = kBuiltin.find(mean);
    return it == kBuiltin.end() ? nullptr : &it->second;
}

constexpr const char* kPalette[] = {"#b04fd0", "#c0504d", "#4bacc6",
                                    "#8064a2", "#9bbb59", "#f79646"};

} // namespace

std::string ModelTable::overviewCsv() const {
    std::string out = std::string(kOverviewHeader) + "\n";
    for (const OverviewRow& r : overview)
        out += csv_row({std::to_string(r.modelId), std::to_string(r.totalDistance),
                        std::to_string(r.legCount)});
    return out;
}

std::string ModelTable::detailsCsv() const {
    std::string out = std::string(kDetailsHeader) + "\n";
    for (const DetailRow& r : details)
        out += csv_row({std::to_string(r.modelId), r.part, r.from, joinList(r.vias), r.to,
                        joinList(r.means), std::to_string(r.distance)});
    return out;
}

ModelTable export_csv(const FactSet& facts, const std::vector<solve::Model>& models) {
    ModelTable table;
    const auto name = [&](SymbolId id) { return std::string(facts.symbols.text(id)); };
    for (std::size_t i = 0; i < models.size(); ++i) {
        const solve::Model& m = models[i];
        table.overview.push_back({i, m.totalDistance, m.legCount});
        for (const solve::ModelPath& p : m.paths) {
            DetailRow row;
            row.modelId = i;
            row.part = name(p.part);
            row.from = name(p.from);
            row.to = name(p.to);
            for (int v = 0; v < p.cand.viaCount; ++v)
                row.vias.push_back(name(p.cand.vias[v]));
            for (int l = 0; l <= p.cand.viaCount; ++l)
                row.means.push_back(name(p.cand.means[l]));
            row.distance = p.cand.distance;
            table.details.push_back(std::move(row));
        }
    }
    return table;
}

ModelTable parse_model_table(const std::string& overviewCsv, const std::string& detailsCsv) {
    ModelTable table;
    const auto overviewLines = csv_lines(overviewCsv);
    if (overviewLines.empty() || overviewLines[0] != kOverviewHeader)
        throw Error("model table: missing overview header");
    for (std::size_t i = 1; i < overviewLines.size(); ++i) {
        const auto fields = csv_split(overviewLines[i]);
        if (fields.size() != 3)
            throw Error("model table: overview row needs 3 fields");
        table.overview.push_back({static_cast<std::uint64_t>(parseInt(fields[0], "modelId")),
                                  parseInt(fields[1], "totalDistance"),
                                  parseInt(fields[2], "legCount")});
    }
    const auto detailLines = csv_lines(detailsCsv);
    if (detailLines.empty() || detailLines[0] != kDetailsHeader)
        throw Error("model table: missing details header");
    for (std::size_t i = 1; i < detailLines.size(); ++i) {
        const auto fields = csv_split(detailLines[i]);
        if (fields.size() != 7)
            throw Error("model table: detail row needs 7 fields");
        DetailRow row;
        row.modelId = static_cast<std::uint64_t>(parseInt(fields[0], "modelId"));
        row.part = fields[1];
        row.from = fields[2];
        row.vias = splitList(fields[3]);
        row.to = fields[4];
        row.means = splitList(fields[5]);
        row.distance = parseInt(fields[6], "distance");
        table.details.push_back(std::move(row));
    }
    return table;
}

MapLayout parse_layout_csv(const std::string& text) {
    MapLayout layout;
    const auto lines = csv_lines(text);
    if (lines.empty() || lines[0] != kLayoutHeader)
        throw Error("layout: first line must be '" + std::string(kLayoutHeader) + "'");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty())
            continue;
        const auto fields = csv_split(lines[i]);
        if (fields.size() != 3 || fields[0].empty())
            throw Error("layout: row " + std::to_string(i + 1) +
                        " needs location,x,y fields");
        layout.coordinates[fields[0]] = {parseDouble(fields[1], fields[0]),
                                         parseDouble(fields[2], fields[0])};
    }
    return layout;
}

MapLayout load_layout_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open layout file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_layout_csv(buf.str());
}

MapLayout grid_layout(const FactSet& facts) {
    std::vector<std::string> names;
    for (SymbolId l : facts.productionLocs)
        names.push_back(std::string(facts.symbols.text(l)));
    for (SymbolId l : facts.warehouseLocs)
        names.push_back(std::string(facts.symbols.text(l)));
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());

    MapLayout layout;
    const int cols = std::max(1, static_cast<int>(std::ceil(std::sqrt(
                                      static_cast<double>(names.size())))));
    for (std::size_t i = 0; i < names.size(); ++i)
        layout.coordinates[names[i]] = {static_cast<double>(i % cols) * 100.0,
                                        static_cast<double>(i / cols) * 100.0};
    return layout;
}

std::string render_scatter(const std::vector<OverviewRow>& overview, const std::string& kpiX,
                           const std::string& kpiY) {
    const auto kpi = [](const std::string& name) -> std::int64_t OverviewRow::* {
        if (name == "totalDistance" || name == "distance")
            return &OverviewRow::totalDistance;
        if (name == "legCount")
            return &OverviewRow::legCount;
        throw Error("unknown KPI: " + name);
    };
    const auto fieldX = kpi(kpiX);
    const auto fieldY = kpi(kpiY);

    std::int64_t lo = 0, hi = 1;
    if (!overview.empty()) {
        lo = hi = overview[0].*fieldX;
        for (const OverviewRow& r : overview) {
            for (std::int64_t v : {r.*fieldX, r.*fieldY}) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        if (lo == hi) {
            --lo;
            ++hi;
        }
    }

    const double left = kCanvasMargin, right = kCanvasWidth - kCanvasMargin;
    const double top = kCanvasMargin, bottom = kCanvasHeight - kCanvasMargin;
    const auto sx = [&](std::int64_t v) {
        return left + (right - left) * static_cast<double>(v - lo) /
                          static_cast<double>(hi - lo);
    };
    const auto sy = [&](std::int64_t v) {
        return bottom - (bottom - top) * static_cast<double>(v - lo) /
                            static_cast<double>(hi - lo);
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(kCanvasWidth) + "\" height=\"" + std::to_string(kCanvasHeight) +
           "\" viewBox=\"0 0 " + std::to_string(kCanvasWidth) + " " +
           std::to_string(kCanvasHeight) + "\">\n";
    svg += "<rect class=\"canvas\" width=\"" + std::to_string(kCanvasWidth) + "\" height=\"" +
           std::to_string(kCanvasHeight) + "\" fill=\"#ffffff\"/>\n";
    svg += "<line class=\"axis\" x1=\"" + fmt(left) + "\" y1=\"" + fmt(bottom) + "\" x2=\"" +
           fmt(right) + "\" y2=\"" + fmt(bottom) + "\" stroke=\"#333333\"/>\n";
    svg += "<line class=\"axis\" x1=\"" + fmt(left) + "\" y1=\"" + fmt(top) + "\" x2=\"" +
           fmt(left) + "\" y2=\"" + fmt(bottom) + "\" stroke=\"#333333\"/>\n";
    svg += "<text class=\"axis-label\" x=\"" + fmt((left + right) / 2) + "\" y=\"" +
           fmt(bottom + 36) + "\" text-anchor=\"middle\">" + xmlEscape(kpiX) + "</text>\n";
    svg += "<text class=\"axis-label\" transform=\"translate(18 " +
           fmt((top + bottom) / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
           xmlEscape(kpiY) + "</text>\n";
    svg += "<text class=\"tick\" x=\"" + fmt(left) + "\" y=\"" + fmt(bottom + 16) +
           "\" text-anchor=\"middle\">" + std::to_string(lo) + "</text>\n";
    svg += "<text class=\"tick\" x=\"" + fmt(right) + "\" y=\"" + fmt(bottom + 16) +
           "\" text-anchor=\"middle\">" + std::to_string(hi) + "</text>\n";
    svg += "<text class=\"tick\" x=\"" + fmt(left - 8) + "\" y=\"" + fmt(bottom) +
           "\" text-anchor=\"end\">" + std::to_string(lo) + "</text>\n";
    svg += "<text class=\"tick\" x=\"" + fmt(left - 8) + "\" y=\"" + fmt(top + 4) +
           "\" text-anchor=\"end\">" + std::to_string(hi) + "</text>\n";

    for (const OverviewRow& r : overview) {
        const std::int64_t vx = r.*fieldX, vy = r.*fieldY;
        svg += "<circle class=\"model\" cx=\"" + fmt(sx(vx)) + "\" cy=\"" + fmt(sy(vy)) +
               "\" r=\"4\" fill=\"#1f6fd0\" fill-opacity=\"0.7\" data-x=\"" +
               std::to_string(vx) + "\" data-y=\"" + std::to_string(vy) + "\"><title>model " +
               std::to_string(r.modelId) + "</title></circle>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::string render_map(const FactSet& facts, const solve::Model& model,
                       const MapLayout& layout) {
    const auto name = [&](SymbolId id) { return std::string(facts.symbols.text(id)); };

    // Everything the model touches needs a coordinate.
    std::set<std::string> referenced;
    for (const solve::SiteChoice& s : model.sites)
        for (SymbolId site : s)
            if (site.valid())
                referenced.insert(name(site));
    for (const solve::ModelPath& p : model.paths) {
        referenced.insert(name(p.from));
        referenced.insert(name(p.to));
        for (int v = 0; v < p.cand.viaCount; ++v)
            referenced.insert(name(p.cand.vias[v]));
    }
    for (const std::string& loc : referenced)
        if (!layout.coordinates.count(loc))
            throw Error("no layout coordinate for location " + loc);

    // World frame over the whole layout so every model of one world shares it.
    double minX = 0, maxX = 1, minY = 0, maxY = 1;
    if (!layout.coordinates.empty()) {
        minX = maxX = layout.coordinates.begin()->second.first;
        minY = maxY = layout.coordinates.begin()->second.second;
        for (const auto& [loc, xy] : layout.coordinates) {
            minX = std::min(minX, xy.first);
            maxX = std::max(maxX, xy.first);
            minY = std::min(minY, xy.second);
            maxY = std::max(maxY, xy.second);
        }
    }
    const double spanX = maxX > minX ? maxX - minX : 1.0;
    const double spanY = maxY > minY ? maxY - minY : 1.0;
    const double left = kCanvasMargin, right = kCanvasWidth - kCanvasMargin;
    const double top = kCanvasMargin, bottom = kCanvasHeight - kCanvasMargin;
    const auto px = [&](double x) { return left + (right - left) * (x - minX) / spanX; };
    const auto py = [&](double y) { return top + (bottom - top) * (y - minY) / spanY; };
    const auto at = [&](const std::string& loc) {
        const auto& xy = layout.coordinates.at(loc);
        return std::pair<double, double>{px(xy.first), py(xy.second)};
    };

    // Styling: overrides first, then the builtin trio, then the palette over
    // the remaining declared means in text order.
    std::map<std::string, std::pair<std::string, std::string>> styles = layout.styling;
    std::vector<std::string> meanNames;
    for (SymbolId m : facts.transportMeans)
        meanNames.push_back(name(m));
    meanNames.push_back(std::string(kIntraSiteName));
    std::sort(meanNames.begin(), meanNames.end());
    meanNames.erase(std::unique(meanNames.begin(), meanNames.end()), meanNames.end());
    std::size_t nextPalette = 0;
    for (const std::string& m : meanNames) {
        if (styles.count(m))
            continue;
        if (const auto* builtin = builtinStyle(m))
            styles[m] = *builtin;
        else
            styles[m] = {kPalette[nextPalette++ % (sizeof kPalette / sizeof *kPalette)], ""};
    }
    const auto styleOf = [&](const std::string& mean) {
        const auto it = styles.find(mean);
        if (it != styles.end())
            return it->second;
        return std::pair<std::string, std::string>{"#555555", ""};
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(kCanvasWidth) + "\" height=\"" + std::to_string(kCanvasHeight) +
           "\" viewBox=\"0 0 " + std::to_string(kCanvasWidth) + " " +
           std::to_string(kCanvasHeight) + "\">\n";
    svg += "<rect class=\"canvas\" width=\"" + std::to_string(kCanvasWidth) + "\" height=\"" +
           std::to_string(kCanvasHeight) + "\" fill=\"#f8f6f2\"/>\n";

    // Legs under the glyphs.
    for (const solve::ModelPath& p : model.paths) {
        if (p.isRoot) {
            const auto [cx, cy] = at(name(p.from));
            svg += "<circle class=\"anchor\" cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) +
                   "\" r=\"14\" fill=\"none\" stroke=\"#cc3333\" stroke-width=\"2\" "
                   "data-part=\"" +
                   xmlEscape(name(p.part)) + "\"/>\n";
            continue;
        }
        std::vector<std::string> stops{name(p.from)};
        for (int v = 0; v < p.cand.viaCount; ++v)
            stops.push_back(name(p.cand.vias[v]));
        stops.push_back(name(p.to));
        for (int leg = 0; leg <= p.cand.viaCount; ++leg) {
            const std::string& a = stops[leg];
            const std::string& b = stops[leg + 1];
            const std::string mean = name(p.cand.means[leg]);
            const auto [axp, ayp] = at(a);
            const auto [bxp, byp] = at(b);
            const auto [color, dash] = styleOf(mean);
            std::string points;
            double lx = 0, ly = 0; // label spot
            if (a == b) {
                points = fmt(axp) + "," + fmt(ayp - 12) + " " + fmt(axp + 12) + "," +
                         fmt(ayp) + " " + fmt(axp) + "," + fmt(ayp + 12) + " " +
                         fmt(axp - 12) + "," + fmt(ayp) + " " + fmt(axp) + "," +
                         fmt(ayp - 12);
                lx = axp + 14;
                ly = ayp - 14;
            } else {
                points = fmt(axp) + "," + fmt(ayp) + " " + fmt(bxp) + "," + fmt(byp);
                lx = (axp + bxp) / 2;
                ly = (ayp + byp) / 2 - 4;
            }
            svg += "<polyline class=\"leg\" points=\"" + points + "\" fill=\"none\" stroke=\"" +
                   color + "\" stroke-width=\"2.5\"";
            if (!dash.empty())
                svg += " stroke-dasharray=\"" + dash + "\"";
            svg += " data-part=\"" + xmlEscape(name(p.part)) + "\" data-from=\"" +
                   xmlEscape(a) + "\" data-to=\"" + xmlEscape(b) + "\" data-mean=\"" +
                   xmlEscape(mean) + "\"><title>" +
                   xmlEscape(name(p.part) + ": " + a + " to " + b + " by " + mean) +
                   "</title></polyline>\n";
            svg += "<text class=\"leg-label\" x=\"" + fmt(lx) + "\" y=\"" + fmt(ly) +
                   "\" text-anchor=\"middle\" font-size=\"10\">" + xmlEscape(name(p.part)) +
                   "</text>\n";
        }
    }

    // Location glyphs: red boxes for factories, black dots for warehouses.
    std::vector<std::pair<std::string, bool>> glyphs; // name, isProduction
    for (SymbolId l : facts.productionLocs)
        glyphs.push_back({name(l), true});
    for (SymbolId l : facts.warehouseLocs)
        glyphs.push_back({name(l), false});
    std::sort(glyphs.begin(), glyphs.end());
    glyphs.erase(std::unique(glyphs.begin(), glyphs.end()), glyphs.end());
    for (const auto& [loc, isProduction] : glyphs) {
        if (!layout.coordinates.count(loc))
            continue; // only referenced locations are mandatory
        const auto [cx, cy] = at(loc);
        if (isProduction)
            svg += "<rect class=\"production\" x=\"" + fmt(cx - 6) + "\" y=\"" + fmt(cy - 6) +
                   "\" width=\"12\" height=\"12\" fill=\"#cc2222\"/>\n";
        else
            svg += "<circle class=\"warehouse\" cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) +
                   "\" r=\"6\" fill=\"#111111\"/>\n";
        svg += "<text class=\"site-label\" x=\"" + fmt(cx) + "\" y=\"" + fmt(cy + 20) +
               "\" text-anchor=\"middle\" font-size=\"11\">" + xmlEscape(loc) + "</text>\n";
    }

    svg += "</svg>\n";
    return svg;
}

} // namespace logicfg::viz
