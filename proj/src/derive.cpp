#include "logicfg/derive.hpp"

#include <algorithm>
#include <unordered_set>

#include "logicfg/errors.hpp"

namespace logicfg::ground {

namespace {

struct TextLess {
    const SymbolTable& tab;
    bool operator()(SymbolId a, SymbolId b) const { return tab.textLess(a, b); }
};

void requireNoIntraSite(const FactSet& f) {
    auto used = [&](SymbolId s) { return s == kIntraSite; };
    bool hit = false;
    for (SymbolId s : f.countries) hit |= used(s);
    for (SymbolId s : f.productionLocs) hit |= used(s);
    for (SymbolId s : f.warehouseLocs) hit |= used(s);
    for (SymbolId s : f.transportMeans) hit |= used(s);
    for (SymbolId s : f.parts) hit |= used(s);
    for (const auto& [a, b] : f.locatedIn) hit |= used(a) || used(b);
    for (const auto& [a, b] : f.transportMeanAtSite) hit |= used(a) || used(b);
    for (const auto& [a, b] : f.canTransport) hit |= used(a) || used(b);
    for (const auto& [a, b] : f.partProduceableAt) hit |= used(a) || used(b);
    for (const auto& [a, b] : f.productionPlan) hit |= used(a) || used(b);
    for (const Route& r : f.transportRoutes)
        hit |= used(r.from) || used(r.to) || used(r.mean);
    if (hit)
        throw DeriveError("the symbol '" + std::string(kIntraSiteName) +
                          "' is reserved for the synthesized intra-site mean");
}

// Returns one cycle of the plan graph (edges super -> part) or empty.
std::vector<SymbolId> findPlanCycle(const FactSet& f) {
    std::unordered_map<SymbolId, std::vector<SymbolId>> next;
    for (const auto& [super, part] : f.productionPlan)
        next[super].push_back(part);

    enum class Color { white, gray, black };
    std::unordered_map<SymbolId, Color> color;
    std::vector<SymbolId> stack;

    std::function<std::vector<SymbolId>(SymbolId)> dfs = [&](SymbolId u) -> std::vector<SymbolId> {
        color[u] = Color::gray;
        stack.push_back(u);
        auto it = next.find(u);
        if (it != next.end()) {
            for (SymbolId v : it->second) {
                Color c = color.count(v) ? color[v] : Color::white;
                if (c == Color::gray) {
                    auto at = std::find(stack.begin(), stack.end(), v);
                    return std::vector<SymbolId>(at, stack.end());
                }
                if (c == Color::white) {
                    auto cyc = dfs(v);
                    if (!cyc.empty())
                        return cyc;
                }
            }
        }
        stack.pop_back();
        color[u] = Color::black;
        return {};
    };

    for (const auto& [super, part] : f.productionPlan) {
        (void)part;
        if (!color.count(super)) {
            auto cyc = dfs(super);
            if (!cyc.empty())
                return cyc;
        }
    }
    return {};
}

} // namespace

std::optional<EncodingVariant> variant_from_name(std::string_view name) {
    for (EncodingVariant v : kAllVariants)
        if (name == variant_name(v))
            return v;
    return std::nullopt;
}

DerivedDB derive_base(const FactSet& facts) {
    requireNoIntraSite(facts);
    const SymbolTable& tab = facts.symbols;
    DerivedDB db;

    db.locations = facts.productionLocs;
    db.locations.insert(db.locations.end(), facts.warehouseLocs.begin(), facts.warehouseLocs.end());
    std::sort(db.locations.begin(), db.locations.end(), TextLess{tab});
    db.locations.erase(std::unique(db.locations.begin(), db.locations.end()), db.locations.end());

    if (!facts.productionPlan.empty()) {
        auto cycle = findPlanCycle(facts);
        if (!cycle.empty()) {
            std::string msg = "cyclic productionPlan: ";
            for (SymbolId s : cycle)
                msg += tab.text(s) + " -> ";
            msg += tab.text(cycle.front());
            throw DeriveError(msg);
        }
        std::unordered_set<SymbolId> subs;
        for (const auto& [super, part] : facts.productionPlan)
            subs.insert(part);
        std::vector<SymbolId> maximal;
        for (const auto& [super, part] : facts.productionPlan)
            if (!subs.count(super))
                maximal.push_back(super);
        std::sort(maximal.begin(), maximal.end(), TextLess{tab});
        maximal.erase(std::unique(maximal.begin(), maximal.end()), maximal.end());
        if (maximal.size() != 1) {
            std::string msg = "production plan needs exactly one root, maximal parts: ";
            for (std::size_t i = 0; i < maximal.size(); ++i)
                msg += (i ? ", " : "") + tab.text(maximal[i]);
            throw DeriveError(msg);
        }
        db.root = maximal.front();
    }

    db.routesClosed = facts.transportRoutes;
    for (const Route& r : facts.transportRoutes)
        db.routesClosed.push_back({r.to, r.from, r.mean, r.distance});
    for (SymbolId loc : db.locations)
        db.routesClosed.push_back({loc, loc, kIntraSite, 0});
    std::sort(db.routesClosed.begin(), db.routesClosed.end(), [&](const Route& a, const Route& b) {
        if (a.from != b.from) return tab.textLess(a.from, b.from);
        if (a.to != b.to) return tab.textLess(a.to, b.to);
        if (a.mean != b.mean) return tab.textLess(a.mean, b.mean);
        return a.distance < b.distance;
    });
    db.routesClosed.erase(std::unique(db.routesClosed.begin(), db.routesClosed.end()),
                          db.routesClosed.end());

    auto pairLess = [&](const SymbolPair& a, const SymbolPair& b) {
        if (a.first != b.first) return tab.textLess(a.first, b.first);
        return tab.textLess(a.second, b.second);
    };
    db.meanAtSiteClosed = facts.transportMeanAtSite;
    for (SymbolId loc : db.locations)
        db.meanAtSiteClosed.emplace_back(loc, kIntraSite);
    std::sort(db.meanAtSiteClosed.begin(), db.meanAtSiteClosed.end(), pairLess);
    db.meanAtSiteClosed.erase(std::unique(db.meanAtSiteClosed.begin(), db.meanAtSiteClosed.end()),
                              db.meanAtSiteClosed.end());

    db.canTransportClosed = facts.canTransport;
    for (SymbolId part : facts.parts)
        db.canTransportClosed.emplace_back(kIntraSite, part);
    std::sort(db.canTransportClosed.begin(), db.canTransportClosed.end(), pairLess);
    db.canTransportClosed.erase(
        std::unique(db.canTransportClosed.begin(), db.canTransportClosed.end()),
        db.canTransportClosed.end());

    return db;
}

std::vector<Cbtft> derive_cbtft(const FactSet& facts, const DerivedDB& db) {
    const SymbolTable& tab = facts.symbols;
    std::unordered_set<std::uint64_t> meanAt;
    for (const auto& [loc, mean] : db.meanAtSiteClosed)
        meanAt.insert(packPair(loc, mean));
    std::unordered_map<SymbolId, std::vector<SymbolId>> carries; // mean -> parts
    for (const auto& [mean, part] : db.canTransportClosed)
        carries[mean].push_back(part);

    std::vector<Cbtft> out;
    for (const Route& r : db.routesClosed) {
        if (!meanAt.count(packPair(r.from, r.mean)) || !meanAt.count(packPair(r.to, r.mean)))
            continue;
        auto it = carries.find(r.mean);
        if (it == carries.end())
            continue;
        for (SymbolId part : it->second)
            out.push_back({r.from, r.to, part, r.mean, r.distance});
    }
    std::sort(out.begin(), out.end(), [&](const Cbtft& a, const Cbtft& b) {
        if (a.from != b.from) return tab.textLess(a.from, b.from);
        if (a.to != b.to) return tab.textLess(a.to, b.to);
        if (a.part != b.part) return tab.textLess(a.part, b.part);
        if (a.mean != b.mean) return tab.textLess(a.mean, b.mean);
        return a.distance < b.distance;
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

DerivedDB derive_all(const FactSet& facts) {
    DerivedDB db = derive_base(facts);
    db.cbtft = derive_cbtft(facts, db);
    return db;
}

LegIndex build_leg_index(const FactSet& facts, const DerivedDB& db,
                         std::string_view shipMeanName) {
    LegIndex idx;
    // cbtft endpoints are not necessarily declared locations (dangling facts
    // pass derivation and are reported by the assertion suite), so index every
    // endpoint that actually occurs.
    idx.locs = db.locations;
    for (const Cbtft& t : db.cbtft) {
        idx.locs.push_back(t.from);
        idx.locs.push_back(t.to);
    }
    std::sort(idx.locs.begin(), idx.locs.end(), TextLess{facts.symbols});
    idx.locs.erase(std::unique(idx.locs.begin(), idx.locs.end()), idx.locs.end());
    for (std::size_t i = 0; i < idx.locs.size(); ++i)
        idx.locIdx[idx.locs[i]] = static_cast<int>(i);
    idx.isProduction.assign(idx.locs.size(), false);
    idx.isWarehouse.assign(idx.locs.size(), false);
    for (SymbolId loc : facts.productionLocs)
        idx.isProduction[idx.locIdx.at(loc)] = true;
    for (SymbolId loc : facts.warehouseLocs)
        idx.isWarehouse[idx.locIdx.at(loc)] = true;
    if (auto ship = facts.symbols.find(shipMeanName))
        idx.shipMean = *ship;

    const std::size_t L = idx.locs.size();
    std::unordered_map<SymbolId, std::unordered_set<std::uint64_t>> seenKeys;
    const std::uint64_t meanStride = facts.symbols.size() + 1;
    for (const Cbtft& t : db.cbtft) {
        auto& part = idx.perPart[t.part];
        if (part.byFrom.empty())
            part.byFrom.resize(L);
        int f = idx.locIdx.at(t.from);
        int to = idx.locIdx.at(t.to);
        part.byFrom[f].push_back({to, t.mean, t.distance});
        std::uint64_t key = (static_cast<std::uint64_t>(f) * L + to) * meanStride + t.mean.value;
        if (!seenKeys[t.part].insert(key).second)
            part.parallelLegs = true;
    }
    // cbtft arrives canonically sorted, so each byFrom list is already in
    // (to, mean, distance) text order.
    return idx;
}

namespace {

struct CandLess {
    const SymbolTable& tab;
    bool less(SymbolId a, SymbolId b) const { return tab.textLess(a, b); }
    bool operator()(const RouteCandidate& a, const RouteCandidate& b) const {
        if (a.part != b.part) return less(a.part, b.part);
        if (a.from != b.from) return less(a.from, b.from);
        if (a.to != b.to) return less(a.to, b.to);
        if (a.viaCount != b.viaCount) return a.viaCount < b.viaCount;
        if (a.distance != b.distance) return a.distance < b.distance;
        for (int i = 0; i <= a.viaCount; ++i)
            if (a.means[i] != b.means[i])
                return less(a.means[i], b.means[i]);
        for (int i = 0; i < a.viaCount; ++i)
            if (a.vias[i] != b.vias[i])
                return less(a.vias[i], b.vias[i]);
        return false;
    }
};

void sortUniqueCandidates(std::vector<RouteCandidate>& v, const SymbolTable& tab) {
    std::sort(v.begin(), v.end(), CandLess{tab});
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Shared stitching core. Emits raw (undeduplicated) via1/via2 candidates for
// one part and one from-location; masks implement the variant filters.
struct Stitcher {
    const LegIndex& idx;
    const LegIndex::PartLegs& legs;
    SymbolId part;
    bool restrictTypes;
    bool restrictMiddle;

    bool endpointOk(int loc) const { return !restrictTypes || idx.isProduction[loc]; }
    bool viaOk(int loc) const { return !restrictTypes || idx.isWarehouse[loc]; }
    bool middleOk(SymbolId mean) const { return !restrictMiddle || mean == idx.shipMean; }

    template <typename Fn> // Fn(to, vias..., means..., distance)
    void via1FromLoc(int f, const Fn& emit) const {
        if (!endpointOk(f))
            return;
        for (const auto& leg1 : legs.byFrom[f]) {
            if (!viaOk(leg1.to))
                continue;
            for (const auto& leg2 : legs.byFrom[leg1.to]) {
                if (leg2.to == f || !endpointOk(leg2.to))
                    continue;
                emit(leg2.to, leg1.to, leg1.mean, leg2.mean, leg1.distance + leg2.distance);
            }
        }
    }

    template <typename Fn> // Fn(to, via1, via2, means..., distance)
    void via2FromLoc(int f, const Fn& emit) const {
        if (!endpointOk(f))
            return;
        for (const auto& leg1 : legs.byFrom[f]) {
            if (!viaOk(leg1.to))
                continue;
            for (const auto& leg2 : legs.byFrom[leg1.to]) {
                if (leg2.to == leg1.to || !viaOk(leg2.to) || !middleOk(leg2.mean))
                    continue;
                for (const auto& leg3 : legs.byFrom[leg2.to]) {
                    if (leg3.to == f || !endpointOk(leg3.to))
                        continue;
                    emit(leg3.to, leg1.to, leg2.to, leg1.mean, leg2.mean, leg3.mean,
                         leg1.distance + leg2.distance + leg3.distance);
                }
            }
        }
    }
};

RouteCandidate makeDirect(SymbolId part, SymbolId from, SymbolId to, SymbolId mean,
                          std::int64_t d) {
    RouteCandidate c;
    c.part = part;
    c.from = from;
    c.to = to;
    c.viaCount = 0;
    c.means[0] = mean;
    c.distance = d;
    return c;
}

} // namespace

void for_each_candidate(const FactSet& facts, const LegIndex& index, SymbolId part, SymbolId from,
                        SymbolId to, EncodingVariant variant,
                        const std::function<void(const RouteCandidate&)>& fn) {
    const auto* legs = index.legsOf(part);
    if (!legs)
        return;
    int f = index.indexOf(from);
    int t = index.indexOf(to);
    if (f < 0 || t < 0)
        return;

    std::vector<RouteCandidate> out;
    for (const auto& leg : legs->byFrom[f])
        if (leg.to == t)
            out.push_back(makeDirect(part, from, to, leg.mean, leg.distance));

    if (f != t) {
        Stitcher st{index, *legs, part, restricts_endpoint_types(variant),
                    restricts_middle_mean(variant)};
        if (st.endpointOk(t)) {
            st.via1FromLoc(f, [&](int toLoc, int via, SymbolId m1, SymbolId m2, std::int64_t d) {
                if (toLoc != t)
                    return;
                RouteCandidate c;
                c.part = part;
                c.from = from;
                c.to = to;
                c.viaCount = 1;
                c.vias[0] = index.locs[via];
                c.means[0] = m1;
                c.means[1] = m2;
                c.distance = d;
                out.push_back(c);
            });
            st.via2FromLoc(f, [&](int toLoc, int v1, int v2, SymbolId m1, SymbolId m2, SymbolId m3,
                                  std::int64_t d) {
                if (toLoc != t)
                    return;
                RouteCandidate c;
                c.part = part;
                c.from = from;
                c.to = to;
                c.viaCount = 2;
                c.vias[0] = index.locs[v1];
                c.vias[1] = index.locs[v2];
                c.means[0] = m1;
                c.means[1] = m2;
                c.means[2] = m3;
                c.distance = d;
                out.push_back(c);
            });
        }
    }

    sortUniqueCandidates(out, facts.symbols);
    for (const RouteCandidate& c : out)
        fn(c);
}

CandidateSets derive_candidates(const FactSet& facts, const DerivedDB& db,
                                EncodingVariant variant) {
    LegIndex index = build_leg_index(facts, db);
    CandidateSets sets;
    for (const Cbtft& tup : db.cbtft)
        sets.directs.push_back(makeDirect(tup.part, tup.from, tup.to, tup.mean, tup.distance));

    for (const auto& [part, legs] : index.perPart) {
        Stitcher st{index, legs, part, restricts_endpoint_types(variant),
                    restricts_middle_mean(variant)};
        for (std::size_t f = 0; f < index.locs.size(); ++f) {
            st.via1FromLoc(static_cast<int>(f),
                           [&](int toLoc, int via, SymbolId m1, SymbolId m2, std::int64_t d) {
                               RouteCandidate c;
                               c.part = part;
                               c.from = index.locs[f];
                               c.to = index.locs[toLoc];
                               c.viaCount = 1;
                               c.vias[0] = index.locs[via];
                               c.means[0] = m1;
                               c.means[1] = m2;
                               c.distance = d;
                               sets.via1s.push_back(c);
                           });
            st.via2FromLoc(static_cast<int>(f), [&](int toLoc, int v1, int v2, SymbolId m1,
                                                    SymbolId m2, SymbolId m3, std::int64_t d) {
                RouteCandidate c;
                c.part = part;
                c.from = index.locs[f];
                c.to = index.locs[toLoc];
                c.viaCount = 2;
                c.vias[0] = index.locs[v1];
                c.vias[1] = index.locs[v2];
                c.means[0] = m1;
                c.means[1] = m2;
                c.means[2] = m3;
                c.distance = d;
                sets.via2s.push_back(c);
            });
        }
    }

    sortUniqueCandidates(sets.directs, facts.symbols);
    sortUniqueCandidates(sets.via1s, facts.symbols);
    sortUniqueCandidates(sets.via2s, facts.symbols);
    return sets;
}

namespace {

// Exact via counting for one part without materializing candidates. Fast
// path multiplies leg counts; it is exact only when the part has no two legs
// sharing (from, to, mean), because then every leg combination names a
// distinct candidate. Otherwise candidates may coincide on the distance sum,
// so the slow path enumerates and deduplicates.
struct PartCounter {
    const LegIndex& idx;
    const LegIndex::PartLegs& legs;
    bool restrictTypes;
    bool restrictMiddle;

    std::uint64_t via1 = 0, via2 = 0;

    void countFast() {
        const std::size_t L = idx.locs.size();
        std::vector<std::unordered_map<int, std::uint64_t>> cnt(L), cntMid(L);
        std::vector<std::uint64_t> outEnd(L, 0); // legs v -> endpoint-eligible targets
        for (std::size_t v = 0; v < L; ++v) {
            for (const auto& leg : legs.byFrom[v]) {
                ++cnt[v][leg.to];
                if (!restrictMiddle || leg.mean == idx.shipMean)
                    ++cntMid[v][leg.to];
                if (!restrictTypes || idx.isProduction[leg.to])
                    ++outEnd[v];
            }
        }
        auto endCnt = [&](std::size_t v, int target) -> std::uint64_t {
            if (restrictTypes && !idx.isProduction[target])
                return 0;
            auto it = cnt[v].find(target);
            return it == cnt[v].end() ? 0 : it->second;
        };

        for (std::size_t f = 0; f < L; ++f) {
            if (restrictTypes && !idx.isProduction[f])
                continue;
            for (const auto& [v, c1] : cnt[f]) {
                if (restrictTypes && !idx.isWarehouse[v])
                    continue;
                // via1: F -> V -> T with T != F
                via1 += c1 * (outEnd[v] - endCnt(v, static_cast<int>(f)));
                // via2: F -> V -> V2 -> T with V2 != V, T != F
                std::uint64_t inner = 0;
                for (const auto& [v2, cMidAll] : cnt[v]) {
                    (void)cMidAll;
                    if (v2 == v)
                        continue;
                    if (restrictTypes && !idx.isWarehouse[v2])
                        continue;
                    auto itMid = cntMid[v].find(v2);
                    if (itMid == cntMid[v].end())
                        continue;
                    inner += itMid->second * (outEnd[v2] - endCnt(v2, static_cast<int>(f)));
                }
                via2 += c1 * inner;
            }
        }
    }

    void countSlow(SymbolId part) {
        Stitcher st{idx, legs, part, restrictTypes, restrictMiddle};
        using Key1 = std::array<std::int64_t, 5>; // to, via, m1, m2, d
        using Key2 = std::array<std::int64_t, 7>; // to, v1, v2, m1, m2, m3, d
        for (std::size_t f = 0; f < idx.locs.size(); ++f) {
            std::vector<Key1> seen1;
            std::vector<Key2> seen2;
            st.via1FromLoc(static_cast<int>(f),
                           [&](int to, int via, SymbolId m1, SymbolId m2, std::int64_t d) {
                               seen1.push_back({to, via, m1.value, m2.value, d});
                           });
            st.via2FromLoc(static_cast<int>(f), [&](int to, int v1, int v2, SymbolId m1,
                                                    SymbolId m2, SymbolId m3, std::int64_t d) {
                seen2.push_back({to, v1, v2, m1.value, m2.value, m3.value, d});
            });
            std::sort(seen1.begin(), seen1.end());
            seen1.erase(std::unique(seen1.begin(), seen1.end()), seen1.end());
            std::sort(seen2.begin(), seen2.end());
            seen2.erase(std::unique(seen2.begin(), seen2.end()), seen2.end());
            via1 += seen1.size();
            via2 += seen2.size();
        }
    }
};

} // namespace

std::uint64_t count_choice_points(const FactSet& facts, EncodingVariant variant) {
    std::uint64_t points = facts.parts.size();
    if (!coverage_choice_as_constraint(variant))
        points += facts.productionLocs.size();
    std::unordered_map<SymbolId, std::uint64_t> siteCount;
    for (const auto& [part, loc] : facts.partProduceableAt) {
        (void)loc;
        ++siteCount[part];
    }
    auto sites = [&](SymbolId part) -> std::uint64_t {
        auto it = siteCount.find(part);
        return it == siteCount.end() ? 0 : it->second;
    };
    for (const auto& [super, part] : facts.productionPlan)
        points += sites(part) * sites(super);
    return points;
}

GroundStats ground_stats(const FactSet& facts, const DerivedDB& db, const LegIndex& index,
                         EncodingVariant variant) {
    GroundStats s;
    s.cbtftCount = db.cbtft.size();
    s.directCount = db.cbtft.size(); // one direct candidate per cbtft tuple
    for (const auto& [part, legs] : index.perPart) {
        PartCounter counter{index, legs, restricts_endpoint_types(variant),
                            restricts_middle_mean(variant)};
        if (legs.parallelLegs)
            counter.countSlow(part);
        else
            counter.countFast();
        s.via1Count += counter.via1;
        s.via2Count += counter.via2;
    }
    s.choicePoints = count_choice_points(facts, variant);
    s.groundProxy = s.cbtftCount + s.directCount + s.via1Count + s.via2Count + db.closureSize() +
                    s.choicePoints;
    return s;
}

GroundStats ground_stats(const FactSet& facts, const DerivedDB& db, EncodingVariant variant) {
    LegIndex index = build_leg_index(facts, db);
    return ground_stats(facts, db, index, variant);
}

} // namespace logicfg::ground
