#include "logicfg/verify.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "logicfg/csv.hpp"
#include "logicfg/derive.hpp"
#include "logicfg/errors.hpp"

namespace logicfg::verify {

using kb::FactSet;

namespace {

std::string subjectList(const std::vector<SymbolId>& subjects, const FactSet& facts,
                        const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        if (i)
            out += sep;
        out += std::string(facts.symbols.text(subjects[i]));
    }
    return out;
}

class Collector {
public:
    explicit Collector(const FactSet& facts) : facts_(facts) {}

    void add(const char* assertion, std::vector<SymbolId> subjects, std::string message,
             Severity severity, Origin origin) {
        findings_.push_back(
            {assertion, std::move(subjects), std::move(message), severity, origin});
    }

    std::vector<Finding> take() {
        // Canonical order keeps the report independent of fact insertion order.
        std::sort(findings_.begin(), findings_.end(), [](const Finding& a, const Finding& b) {
            if (a.assertion != b.assertion)
                return a.assertion < b.assertion;
            return a.message < b.message;
        });
        return std::move(findings_);
    }

    std::string name(SymbolId id) const { return std::string(facts_.symbols.text(id)); }

private:
    const FactSet& facts_;
    std::vector<Finding> findings_;
};

// Reports one finding per back edge of the plan graph, with the cycle spelled
// out along the walk that found it.
void findPlanCycles(const FactSet& facts, Collector& out) {
    std::map<SymbolId, std::vector<SymbolId>> children;
    std::set<SymbolId> nodes;
    for (const auto& [super, part] : facts.productionPlan) {
        children[super].push_back(part);
        nodes.insert(super);
        nodes.insert(part);
    }
    auto textLess = [&](SymbolId a, SymbolId b) { return facts.symbols.textLess(a, b); };
    std::vector<SymbolId> order(nodes.begin(), nodes.end());
    std::sort(order.begin(), order.end(), textLess);
    for (auto& [super, kids] : children)
        std::sort(kids.begin(), kids.end(), textLess);

    enum class Mark { White, Grey, Black };
    std::map<SymbolId, Mark> mark;
    std::vector<SymbolId> stack;

    // Explicit frames; a frame is (node, next child index).
    struct Frame {
        SymbolId node;
        std::size_t next = 0;
    };
    for (SymbolId start : order) {
        if (mark.count(start))
            continue;
        std::vector<Frame> frames{{start, 0}};
        mark[start] = Mark::Grey;
        stack.push_back(start);
        while (!frames.empty()) {
            Frame& f = frames.back();
            const auto it = children.find(f.node);
            if (it == children.end() || f.next >= it->second.size()) {
                mark[f.node] = Mark::Black;
                stack.pop_back();
                frames.pop_back();
                continue;
            }
            SymbolId kid = it->second[f.next++];
            auto kidMark = mark.find(kid);
            if (kidMark == mark.end()) {
                mark[kid] = Mark::Grey;
                stack.push_back(kid);
                frames.push_back({kid, 0});
            } else if (kidMark->second == Mark::Grey) {
                auto begin = std::find(stack.begin(), stack.end(), kid);
                std::vector<SymbolId> cycle(begin, stack.end());
                std::string msg = "production plan cycle: ";
                for (SymbolId n : cycle)
                    msg += out.name(n) + " -> ";
                msg += out.name(kid);
                out.add("invalidProductionPlanCycle", cycle, msg, Severity::Error,
                        Origin::Extended);
            }
        }
    }
}

struct CandLess {
    const SymbolTable* syms;

    bool operator()(const ground::RouteCandidate& a, const ground::RouteCandidate& b) const {
        if (a.distance != b.distance)
            return a.distance < b.distance;
        if (a.viaCount != b.viaCount)
            return a.viaCount < b.viaCount;
        for (int i = 0; i <= std::max(a.viaCount, b.viaCount); ++i) {
            if (a.means[i] != b.means[i])
                return syms->textLess(a.means[i], b.means[i]);
        }
        for (int i = 0; i < a.viaCount; ++i) {
            if (a.vias[i] != b.vias[i])
                return syms->textLess(a.vias[i], b.vias[i]);
        }
        return false;
    }
};

bool sameDistanceMeans(const ground::RouteCandidate& a, const ground::RouteCandidate& b) {
    if (a.distance != b.distance || a.viaCount != b.viaCount)
        return false;
    for (int i = 0; i <= a.viaCount; ++i)
        if (a.means[i] != b.means[i])
            return false;
    return true;
}

} // namespace

std::size_t AssertionReport::errorCount() const {
    return static_cast<std::size_t>(std::count_if(
        findings.begin(), findings.end(),
        [](const Finding& f) { return f.severity == Severity::Error; }));
}

std::size_t AssertionReport::warningCount() const {
    return findings.size() - errorCount();
}

AssertionReport run_assertions(const FactSet& facts) {
    Collector out(facts);

    std::unordered_set<SymbolId> countries(facts.countries.begin(), facts.countries.end());
    std::unordered_set<SymbolId> prods(facts.productionLocs.begin(), facts.productionLocs.end());
    std::unordered_set<SymbolId> whs(facts.warehouseLocs.begin(), facts.warehouseLocs.end());
    std::unordered_set<SymbolId> means(facts.transportMeans.begin(), facts.transportMeans.end());
    std::unordered_set<SymbolId> parts(facts.parts.begin(), facts.parts.end());
    std::unordered_set<SymbolId> locations = prods;
    locations.insert(whs.begin(), whs.end());

    std::unordered_map<SymbolId, std::vector<SymbolId>> locCountries;
    std::unordered_set<SymbolId> countriesUsed;
    for (const auto& [loc, country] : facts.locatedIn) {
        locCountries[loc].push_back(country);
        countriesUsed.insert(country);
    }

    auto textLess = [&](SymbolId a, SymbolId b) { return facts.symbols.textLess(a, b); };

    std::vector<SymbolId> sortedLocs(locations.begin(), locations.end());
    std::sort(sortedLocs.begin(), sortedLocs.end(), textLess);
    for (SymbolId loc : sortedLocs) {
        if (!locCountries.count(loc))
            out.add("invalidLocatedIn", {loc},
                    "location " + out.name(loc) + " is not located in any country",
                    Severity::Error, Origin::Core);
        if (prods.count(loc) && whs.count(loc))
            out.add("invalidLocationTypeConflict", {loc},
                    out.name(loc) + " is declared both production location and warehouse",
                    Severity::Error, Origin::Extended);
    }

    for (auto& [loc, cs] : locCountries) {
        std::sort(cs.begin(), cs.end(), textLess);
        cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
        if (cs.size() >= 2)
            out.add("invalidLocatedInTwoCountries", {loc},
                    "location " + out.name(loc) + " is located in " +
                        std::to_string(cs.size()) + " countries: " +
                        subjectList(cs, facts, ", "),
                    Severity::Error, Origin::Core);
    }

    for (const auto& r : facts.transportRoutes) {
        const std::string routeText = "transportRoute(" + out.name(r.from) + "," +
                                      out.name(r.to) + "," + out.name(r.mean) + "," +
                                      std::to_string(r.distance) + ")";
        if (!locations.count(r.from))
            out.add("invalidRouteEndpoint", {r.from},
                    routeText + " starts at undeclared location " + out.name(r.from),
                    Severity::Error, Origin::Extended);
        if (!locations.count(r.to))
            out.add("invalidRouteEndpoint", {r.to},
                    routeText + " ends at undeclared location " + out.name(r.to),
                    Severity::Error, Origin::Extended);
        if (r.distance < 0)
            out.add("invalidNegativeDistance", {r.from, r.to, r.mean},
                    routeText + " has a negative distance", Severity::Error, Origin::Extended);
    }

    std::unordered_set<SymbolId> meansPlaced;
    for (const auto& [loc, mean] : facts.transportMeanAtSite) {
        meansPlaced.insert(mean);
        if (!means.count(mean))
            out.add("invalidMeanAtSite", {mean},
                    "transportMeanAtSite(" + out.name(loc) + "," + out.name(mean) +
                        ") places undeclared transport mean " + out.name(mean),
                    Severity::Error, Origin::Extended);
    }

    for (const auto& [mean, part] : facts.canTransport) {
        if (!means.count(mean))
            out.add("invalidCanTransportMean", {mean},
                    "canTransport(" + out.name(mean) + "," + out.name(part) +
                        ") names undeclared transport mean " + out.name(mean),
                    Severity::Error, Origin::Extended);
    }

    std::unordered_set<SymbolId> produceable;
    for (const auto& [part, loc] : facts.partProduceableAt) {
        produceable.insert(part);
        const std::string atomText =
            "partProduceableAt(" + out.name(part) + "," + out.name(loc) + ")";
        if (!parts.count(part))
            out.add("invalidPartProduceableAt", {part},
                    atomText + " names undeclared part " + out.name(part), Severity::Error,
                    Origin::Extended);
        if (!locations.count(loc))
            out.add("invalidPartProduceableAt", {loc},
                    atomText + " names undeclared location " + out.name(loc), Severity::Error,
                    Origin::Extended);
    }

    std::vector<SymbolId> sortedParts(facts.parts);
    std::sort(sortedParts.begin(), sortedParts.end(), textLess);
    for (SymbolId part : sortedParts) {
        if (!produceable.count(part))
            out.add("invalidUnproduceablePart", {part},
                    "part " + out.name(part) + " is not produceable at any location",
                    Severity::Error, Origin::Extended);
    }

    std::set<SymbolId> supers, children;
    for (const auto& [super, part] : facts.productionPlan) {
        supers.insert(super);
        children.insert(part);
        const std::string atomText =
            "productionPlan(" + out.name(super) + "," + out.name(part) + ")";
        if (!parts.count(super))
            out.add("invalidProductionPlanRef", {super},
                    atomText + " names undeclared part " + out.name(super), Severity::Error,
                    Origin::Extended);
        if (!parts.count(part))
            out.add("invalidProductionPlanRef", {part},
                    atomText + " names undeclared part " + out.name(part), Severity::Error,
                    Origin::Extended);
    }

    std::vector<SymbolId> roots;
    for (SymbolId s : supers)
        if (!children.count(s))
            roots.push_back(s);
    std::sort(roots.begin(), roots.end(), textLess);
    if (roots.size() > 1)
        out.add("invalidMultipleRoots", roots,
                "production plan has " + std::to_string(roots.size()) +
                    " roots: " + subjectList(roots, facts, ", "),
                Severity::Error, Origin::Extended);

    findPlanCycles(facts, out);

    std::vector<SymbolId> sortedMeans(facts.transportMeans);
    std::sort(sortedMeans.begin(), sortedMeans.end(), textLess);
    for (SymbolId mean : sortedMeans) {
        if (!meansPlaced.count(mean))
            out.add("invalidMeanAtNoSite", {mean},
                    "transport mean " + out.name(mean) + " is available at no site",
                    Severity::Error, Origin::Extended);
    }

    std::vector<SymbolId> sortedCountries(facts.countries);
    std::sort(sortedCountries.begin(), sortedCountries.end(), textLess);
    for (SymbolId c : sortedCountries) {
        if (!countriesUsed.count(c))
            out.add("countryWithoutLocation", {c},
                    "country " + out.name(c) + " has no location", Severity::Warning,
                    Origin::Extended);
    }

    AssertionReport report;
    report.findings = out.take();
    return report;
}

std::string report_text(const AssertionReport& report, const FactSet& facts) {
    std::string out;
    for (const Finding& f : report.findings) {
        out += severity_name(f.severity);
        out += ' ';
        out += f.assertion;
        out += '(';
        out += subjectList(f.subjects, facts, ",");
        out += "): ";
        out += f.message;
        out += " [";
        out += origin_name(f.origin);
        out += "]\n";
    }
    if (report.findings.empty())
        out += "all assertions passed\n";
    else
        out += std::to_string(report.errorCount()) + " error(s), " +
               std::to_string(report.warningCount()) + " warning(s)\n";
    return out;
}

std::string report_csv(const AssertionReport& report, const FactSet& facts) {
    std::string out = "assertionName,subject,message\n";
    for (const Finding& f : report.findings)
        out += csv_row({f.assertion, subjectList(f.subjects, facts, ";"), f.message});
    return out;
}

BruteForceResult brute_force_solve(const solve::Problem& problem) {
    constexpr std::uint64_t kWorkLimit = 10'000'000;
    const FactSet& facts = *problem.facts;
    const auto tooLarge = [] {
        return Error("instance too large for exhaustive enumeration");
    };

    // Site choices straight from the raw domains; under double sourcing every
    // unordered pair goes in, the country rule is left to check_model.
    std::vector<std::vector<solve::SiteChoice>> choices(problem.parts.size());
    for (std::size_t i = 0; i < problem.parts.size(); ++i) {
        const auto& dom = problem.domains[i];
        if (problem.config.sourcing == solve::Sourcing::Single) {
            for (SymbolId s : dom)
                choices[i].push_back({s, SymbolId{}});
        } else {
            for (std::size_t a = 0; a < dom.size(); ++a)
                for (std::size_t b = a + 1; b < dom.size(); ++b)
                    choices[i].push_back({dom[a], dom[b]});
        }
    }

    std::uint64_t combos = 1;
    for (const auto& c : choices) {
        if (c.empty()) {
            combos = 0;
            break;
        }
        if (combos > kWorkLimit / c.size())
            throw tooLarge();
        combos *= c.size();
    }

    // Candidate paths bucketed per grounding, from the materialized sets.
    ground::CandidateSets sets = ground::derive_candidates(facts, problem.db,
                                                           problem.config.variant);
    using GKey = std::array<std::uint32_t, 3>;
    std::map<GKey, std::vector<ground::RouteCandidate>> byGrounding;
    const auto bucket = [&](const std::vector<ground::RouteCandidate>& cands) {
        for (const auto& c : cands)
            byGrounding[{c.part.value, c.from.value, c.to.value}].push_back(c);
    };
    bucket(sets.directs);
    bucket(sets.via1s);
    bucket(sets.via2s);
    const CandLess less{&facts.symbols};
    for (auto& [key, list] : byGrounding) {
        std::sort(list.begin(), list.end(), less);
        if (problem.config.dedupPaths)
            list.erase(std::unique(list.begin(), list.end(), sameDistanceMeans), list.end());
    }

    BruteForceResult res;
    if (combos == 0)
        return res;

    std::uint64_t work = 0;
    std::vector<std::size_t> pick(problem.parts.size(), 0);
    for (;;) {
        if (++work > kWorkLimit)
            throw tooLarge();

        // Required groundings for this assignment, deduplicated across edges.
        std::set<GKey> keys;
        for (const auto& e : problem.edges) {
            for (SymbolId from : choices[e.partIdx][pick[e.partIdx]]) {
                if (!from.valid())
                    continue;
                for (SymbolId to : choices[e.superIdx][pick[e.superIdx]]) {
                    if (to.valid())
                        keys.insert({e.part.value, from.value, to.value});
                }
            }
        }

        std::vector<const std::vector<ground::RouteCandidate>*> lists;
        bool dead = false;
        for (const GKey& k : keys) {
            auto it = byGrounding.find(k);
            if (it == byGrounding.end() || it->second.empty()) {
                dead = true;
                break;
            }
            lists.push_back(&it->second);
        }

        if (!dead) {
            std::vector<std::size_t> pathPick(lists.size(), 0);
            for (;;) {
                if (++work > kWorkLimit)
                    throw tooLarge();
                solve::Model m;
                for (std::size_t i = 0; i < problem.parts.size(); ++i)
                    m.sites.push_back(choices[i][pick[i]]);
                for (std::size_t i = 0; i < lists.size(); ++i) {
                    const auto& cand = (*lists[i])[pathPick[i]];
                    m.paths.push_back({cand.part, cand.from, cand.to, cand, false});
                }
                if (problem.rootIdx) {
                    for (SymbolId site : m.sites[*problem.rootIdx]) {
                        if (!site.valid())
                            continue;
                        ground::RouteCandidate anchor;
                        anchor.part = problem.parts[*problem.rootIdx];
                        anchor.from = site;
                        anchor.to = site;
                        anchor.means[0] = kIntraSite;
                        m.paths.push_back({anchor.part, anchor.from, anchor.to, anchor, true});
                    }
                }
                std::sort(m.paths.begin(), m.paths.end(),
                          [&](const solve::ModelPath& a, const solve::ModelPath& b) {
                              if (a.part != b.part)
                                  return facts.symbols.textLess(a.part, b.part);
                              if (a.from != b.from)
                                  return facts.symbols.textLess(a.from, b.from);
                              return facts.symbols.textLess(a.to, b.to);
                          });
                for (const auto& p : m.paths) {
                    m.totalDistance += p.cand.distance;
                    if (!p.isRoot)
                        m.legCount += p.cand.legCount();
                }
                if (solve::check_model(problem, m).empty())
                    res.models.push_back(std::move(m));

                std::size_t d = 0;
                while (d < pathPick.size() && ++pathPick[d] == lists[d]->size())
                    pathPick[d++] = 0;
                if (d == pathPick.size())
                    break;
            }
        }

        std::size_t d = 0;
        while (d < pick.size() && ++pick[d] == choices[d].size())
            pick[d++] = 0;
        if (d == pick.size())
            break;
    }

    for (const auto& m : res.models)
        if (!res.optimum || m.totalDistance < *res.optimum)
            res.optimum = m.totalDistance;
    return res;
}

} // namespace logicfg::verify
