#include <doctest.h>

#include <algorithm>
#include <set>
#include <tuple>

#include "logicfg/derive.hpp"
#include "logicfg/errors.hpp"
#include "logicfg/facts.hpp"

using namespace logicfg;
using namespace logicfg::kb;
using namespace logicfg::ground;

namespace {

const char* kPaperworldLp = LOGICFG_DATA_DIR "/paperworld.lp";

// Text form of a cbtft tuple, independent of symbol ids.
using CbtftText = std::tuple<std::string, std::string, std::string, std::string, std::int64_t>;

std::set<CbtftText> cbtftTexts(const FactSet& f, const std::vector<Cbtft>& rel) {
    std::set<CbtftText> out;
    for (const Cbtft& t : rel)
        out.insert({f.symbols.text(t.from), f.symbols.text(t.to), f.symbols.text(t.part),
                    f.symbols.text(t.mean), t.distance});
    return out;
}

// Independent oracle: evaluate the join rule by four nested loops over the
// closed relations, plus the intra-site seed rule.
std::set<CbtftText> joinOracle(const FactSet& f, const DerivedDB& db) {
    std::set<CbtftText> out;
    for (const auto& [mean, part] : db.canTransportClosed)
        for (const auto& [fromLoc, m1] : db.meanAtSiteClosed) {
            if (m1 != mean)
                continue;
            for (const auto& [toLoc, m2] : db.meanAtSiteClosed) {
                if (m2 != mean)
                    continue;
                for (const Route& r : db.routesClosed)
                    if (r.from == fromLoc && r.to == toLoc && r.mean == mean)
                        out.insert({f.symbols.text(fromLoc), f.symbols.text(toLoc),
                                    f.symbols.text(part), f.symbols.text(mean), r.distance});
            }
        }
    for (SymbolId loc : db.locations)
        for (SymbolId part : f.parts)
            out.insert({f.symbols.text(loc), f.symbols.text(loc), f.symbols.text(part),
                        std::string(kIntraSiteName), 0});
    return out;
}

using CandText = std::tuple<std::string, std::string, std::string, std::vector<std::string>,
                            std::vector<std::string>, std::int64_t>;

CandText candText(const FactSet& f, const RouteCandidate& c) {
    std::vector<std::string> vias, means;
    for (int i = 0; i < c.viaCount; ++i)
        vias.push_back(f.symbols.text(c.vias[i]));
    for (int i = 0; i <= c.viaCount; ++i)
        means.push_back(f.symbols.text(c.means[i]));
    return {f.symbols.text(c.part), f.symbols.text(c.from), f.symbols.text(c.to), vias, means,
            c.distance};
}

std::set<CandText> candTexts(const FactSet& f, const std::vector<RouteCandidate>& v) {
    std::set<CandText> out;
    for (const auto& c : v)
        out.insert(candText(f, c));
    return out;
}

// Independent candidate oracle: stitch via1/via2 straight from the cbtft
// relation with nested loops, applying the variant filters literally.
struct CandidateOracle {
    const FactSet& f;
    const DerivedDB& db;
    EncodingVariant variant;

    bool isProd(SymbolId s) const {
        return std::find(f.productionLocs.begin(), f.productionLocs.end(), s) !=
               f.productionLocs.end();
    }
    bool isWh(SymbolId s) const {
        return std::find(f.warehouseLocs.begin(), f.warehouseLocs.end(), s) !=
               f.warehouseLocs.end();
    }
    bool endpointOk(SymbolId s) const { return !restricts_endpoint_types(variant) || isProd(s); }
    bool viaOk(SymbolId s) const { return !restricts_endpoint_types(variant) || isWh(s); }
    bool middleOk(SymbolId m) const {
        if (!restricts_middle_mean(variant))
            return true;
        auto ship = f.symbols.find("ship");
        return ship && m == *ship;
    }

    std::set<CandText> via1s() const {
        std::set<CandText> out;
        for (const Cbtft& a : db.cbtft)
            for (const Cbtft& b : db.cbtft) {
                if (a.part != b.part || a.to != b.from || a.from == b.to)
                    continue;
                if (!endpointOk(a.from) || !viaOk(a.to) || !endpointOk(b.to))
                    continue;
                out.insert({f.symbols.text(a.part), f.symbols.text(a.from), f.symbols.text(b.to),
                            {f.symbols.text(a.to)},
                            {f.symbols.text(a.mean), f.symbols.text(b.mean)},
                            a.distance + b.distance});
            }
        return out;
    }

    std::set<CandText> via2s() const {
        std::set<CandText> out;
        for (const Cbtft& a : db.cbtft)
            for (const Cbtft& b : db.cbtft) {
                if (a.part != b.part || a.to != b.from || a.to == b.to)
                    continue;
                for (const Cbtft& c : db.cbtft) {
                    if (b.part != c.part || b.to != c.from || a.from == c.to)
                        continue;
                    if (!endpointOk(a.from) || !viaOk(a.to) || !viaOk(b.to) || !middleOk(b.mean) ||
                        !endpointOk(c.to))
                        continue;
                    out.insert({f.symbols.text(a.part), f.symbols.text(a.from),
                                f.symbols.text(c.to),
                                {f.symbols.text(a.to), f.symbols.text(b.to)},
                                {f.symbols.text(a.mean), f.symbols.text(b.mean),
                                 f.symbols.text(c.mean)},
                                a.distance + b.distance + c.distance});
                }
            }
        return out;
    }
};

} // namespace

TEST_CASE("root of a chain plan") {
    FactSet f = parse_fact_file("productionPlan(p1,p2).\nproductionPlan(p2,p3).\n"
                                "productionPlan(p3,p4).\n");
    DerivedDB db = derive_base(f);
    REQUIRE(db.root.has_value());
    CHECK(f.symbols.text(*db.root) == "p1");
}

TEST_CASE("empty plan leaves root unset") {
    FactSet f = parse_fact_file("part(p1).\n");
    DerivedDB db = derive_base(f);
    CHECK_FALSE(db.root.has_value());
}

TEST_CASE("derive_base errors") {
    CHECK_THROWS_AS(derive_base(parse_fact_file("productionPlan(p1,p3).\n"
                                                "productionPlan(p2,p3).\n")),
                    DeriveError);
    try {
        derive_base(parse_fact_file("productionPlan(p1,p3).\nproductionPlan(p2,p3).\n"));
    } catch (const DeriveError& e) {
        std::string msg = e.what();
        CHECK(msg.find("p1") != std::string::npos);
        CHECK(msg.find("p2") != std::string::npos);
    }

    CHECK_THROWS_AS(derive_base(parse_fact_file("productionPlan(p1,p2).\n"
                                                "productionPlan(p2,p1).\n")),
                    DeriveError);
    try {
        derive_base(parse_fact_file("productionPlan(a,b).\nproductionPlan(b,c).\n"
                                    "productionPlan(c,b).\n"));
    } catch (const DeriveError& e) {
        CHECK(std::string(e.what()).find("cyclic") != std::string::npos);
    }

    CHECK_THROWS_AS(derive_base(parse_fact_file("transportMean(intraSite).\n")), DeriveError);
    CHECK_THROWS_AS(derive_base(parse_fact_file("transportRoute(a,b,intraSite,3).\n")),
                    DeriveError);
}

TEST_CASE("symmetric and intra-site closure") {
    FactSet f = parse_fact_file("warehouseLoc(aH).\nwarehouseLoc(bH).\npart(p4).\n"
                                "transportMean(ship).\ntransportRoute(aH,bH,ship,7).\n");
    DerivedDB db = derive_base(f);

    auto hasRoute = [&](const char* from, const char* to, const char* mean, std::int64_t d) {
        for (const Route& r : db.routesClosed)
            if (f.symbols.text(r.from) == from && f.symbols.text(r.to) == to &&
                f.symbols.text(r.mean) == mean && r.distance == d)
                return true;
        return false;
    };
    CHECK(hasRoute("aH", "bH", "ship", 7));
    CHECK(hasRoute("bH", "aH", "ship", 7));
    CHECK(hasRoute("aH", "aH", "intraSite", 0));
    CHECK(hasRoute("bH", "bH", "intraSite", 0));

    SUBCASE("closure is idempotent") {
        // Feed the closed routes back in as input; the closure must not grow.
        FactSet g = f;
        g.transportRoutes = db.routesClosed;
        g.transportRoutes.erase(
            std::remove_if(g.transportRoutes.begin(), g.transportRoutes.end(),
                           [](const Route& r) { return r.mean == kIntraSite; }),
            g.transportRoutes.end());
        g.normalize();
        DerivedDB db2 = derive_base(g);
        CHECK(db2.routesClosed.size() == db.routesClosed.size());
    }

    bool meanAt = false, carries = false;
    for (const auto& [loc, mean] : db.meanAtSiteClosed)
        if (mean == kIntraSite && f.symbols.text(loc) == "aH")
            meanAt = true;
    for (const auto& [mean, part] : db.canTransportClosed)
        if (mean == kIntraSite && f.symbols.text(part) == "p4")
            carries = true;
    CHECK(meanAt);
    CHECK(carries);
}

TEST_CASE("derivation is insertion-order independent") {
    const char* forward = "productionLoc(aP).\nwarehouseLoc(aH).\npart(p1).\n"
                          "transportMean(truck).\ntransportMeanAtSite(aP,truck).\n"
                          "transportMeanAtSite(aH,truck).\ncanTransport(truck,p1).\n"
                          "transportRoute(aP,aH,truck,2).\n";
    const char* backward = "transportRoute(aP,aH,truck,2).\ncanTransport(truck,p1).\n"
                           "transportMeanAtSite(aH,truck).\ntransportMeanAtSite(aP,truck).\n"
                           "transportMean(truck).\npart(p1).\nwarehouseLoc(aH).\n"
                           "productionLoc(aP).\n";
    FactSet a = parse_fact_file(forward);
    FactSet b = parse_fact_file(backward);
    DerivedDB da = derive_all(a);
    DerivedDB dbb = derive_all(b);
    CHECK(cbtftTexts(a, da.cbtft) == cbtftTexts(b, dbb.cbtft));
}

TEST_CASE("cbtft join") {
    SUBCASE("single route instance") {
        FactSet f = parse_fact_file("warehouseLoc(aH).\nwarehouseLoc(bH).\npart(p4).\n"
                                    "transportMean(ship).\ntransportMeanAtSite(aH,ship).\n"
                                    "transportMeanAtSite(bH,ship).\ncanTransport(ship,p4).\n"
                                    "transportRoute(aH,bH,ship,7).\n");
        DerivedDB db = derive_all(f);
        auto set = cbtftTexts(f, db.cbtft);
        CHECK(set.count({"aH", "bH", "p4", "ship", 7}) == 1);
        CHECK(set.count({"bH", "aH", "p4", "ship", 7}) == 1);
    }
    SUBCASE("part with no carrying mean only appears intra-site") {
        FactSet f = parse_fact_file("productionLoc(aP).\nwarehouseLoc(aH).\npart(lonely).\n"
                                    "transportMean(ship).\ntransportMeanAtSite(aP,ship).\n"
                                    "transportMeanAtSite(aH,ship).\n"
                                    "transportRoute(aP,aH,ship,5).\n");
        DerivedDB db = derive_all(f);
        for (const Cbtft& t : db.cbtft)
            if (f.symbols.text(t.part) == "lonely") {
                CHECK(t.from == t.to);
                CHECK(t.mean == kIntraSite);
                CHECK(t.distance == 0);
            }
    }
    SUBCASE("fixture equals nested-loop oracle") {
        FactSet f = load_fact_file(kPaperworldLp);
        DerivedDB db = derive_all(f);
        CHECK(cbtftTexts(f, db.cbtft) == joinOracle(f, db));
    }
}

TEST_CASE("candidate stitching on the fixture") {
    FactSet f = load_fact_file(kPaperworldLp);
    DerivedDB db = derive_all(f);

    SUBCASE("the narrative via1 hop exists") {
        CandidateSets sets = derive_candidates(f, db, EncodingVariant::Baseline);
        auto via1 = candTexts(f, sets.via1s);
        CandText narrative{"p4", "cP", "bP", {"bH"}, {"ship", "truck"}, 6};
        CHECK(via1.count(narrative) == 1);
    }

    SUBCASE("sets equal the nested-loop oracle under every variant") {
        for (EncodingVariant v : kAllVariants) {
            CandidateSets sets = derive_candidates(f, db, v);
            CandidateOracle oracle{f, db, v};
            CHECK(candTexts(f, sets.via1s) == oracle.via1s());
            CHECK(candTexts(f, sets.via2s) == oracle.via2s());
            CHECK(sets.directs.size() == db.cbtft.size());
        }
    }

    SUBCASE("type filters hold") {
        CandidateSets sets = derive_candidates(f, db, EncodingVariant::LocTypeReq);
        auto isWh = [&](SymbolId s) {
            return std::find(f.warehouseLocs.begin(), f.warehouseLocs.end(), s) !=
                   f.warehouseLocs.end();
        };
        auto isProd = [&](SymbolId s) {
            return std::find(f.productionLocs.begin(), f.productionLocs.end(), s) !=
                   f.productionLocs.end();
        };
        for (const auto& c : sets.via1s) {
            CHECK(isProd(c.from));
            CHECK(isProd(c.to));
            CHECK(isWh(c.vias[0]));
        }
        CandidateSets ship = derive_candidates(f, db, EncodingVariant::TMTypeReq);
        for (const auto& c : ship.via2s)
            CHECK(f.symbols.text(c.means[1]) == "ship");
    }

    SUBCASE("monotone filtering chain") {
        auto baseline = derive_candidates(f, db, EncodingVariant::Baseline);
        auto loc = derive_candidates(f, db, EncodingVariant::LocTypeReq);
        auto tm = derive_candidates(f, db, EncodingVariant::TMTypeReq);
        auto all = derive_candidates(f, db, EncodingVariant::All);
        auto sub = [&](const std::vector<RouteCandidate>& small,
                       const std::vector<RouteCandidate>& big) {
            auto bigSet = candTexts(f, big);
            for (const auto& c : small)
                if (!bigSet.count(candText(f, c)))
                    return false;
            return true;
        };
        CHECK(sub(all.via2s, tm.via2s));
        CHECK(sub(tm.via2s, loc.via2s));
        CHECK(sub(loc.via2s, baseline.via2s));
        CHECK(sub(loc.via1s, baseline.via1s));
        CHECK(candTexts(f, all.directs) == candTexts(f, baseline.directs));
    }

    SUBCASE("candidate distances are leg sums") {
        CandidateSets sets = derive_candidates(f, db, EncodingVariant::Baseline);
        auto legExists = [&](SymbolId part, SymbolId from, SymbolId to, SymbolId mean,
                             std::vector<std::int64_t>& dists) {
            dists.clear();
            for (const Cbtft& t : db.cbtft)
                if (t.part == part && t.from == from && t.to == to && t.mean == mean)
                    dists.push_back(t.distance);
            return !dists.empty();
        };
        for (const auto& c : sets.via1s) {
            std::vector<std::int64_t> d1, d2;
            REQUIRE(legExists(c.part, c.from, c.vias[0], c.means[0], d1));
            REQUIRE(legExists(c.part, c.vias[0], c.to, c.means[1], d2));
            bool sumMatches = false;
            for (auto a : d1)
                for (auto b : d2)
                    sumMatches |= a + b == c.distance;
            CHECK(sumMatches);
        }
    }
}

TEST_CASE("for_each_candidate groups match the materialized sets") {
    FactSet f = load_fact_file(kPaperworldLp);
    DerivedDB db = derive_all(f);
    LegIndex index = build_leg_index(f, db);
    CandidateSets sets = derive_candidates(f, db, EncodingVariant::Baseline);

    SymbolId p2 = *f.symbols.find("p2");
    SymbolId aP = *f.symbols.find("aP");
    SymbolId cP = *f.symbols.find("cP");
    std::set<CandText> streamed;
    for_each_candidate(f, index, p2, aP, cP, EncodingVariant::Baseline,
                       [&](const RouteCandidate& c) { streamed.insert(candText(f, c)); });

    std::set<CandText> expected;
    auto collect = [&](const std::vector<RouteCandidate>& v) {
        for (const auto& c : v)
            if (c.part == p2 && c.from == aP && c.to == cP)
                expected.insert(candText(f, c));
    };
    collect(sets.directs);
    collect(sets.via1s);
    collect(sets.via2s);
    CHECK(streamed == expected);
    CHECK(streamed.count({"p2", "aP", "cP", {"aH"}, {"truck", "ship"}, 4}) == 1);

    SUBCASE("same location group has only directs") {
        for_each_candidate(f, index, p2, aP, aP, EncodingVariant::Baseline,
                           [&](const RouteCandidate& c) { CHECK(c.viaCount == 0); });
    }
}

TEST_CASE("ground_stats matches materialized candidate sets") {
    FactSet f = load_fact_file(kPaperworldLp);
    DerivedDB db = derive_all(f);
    for (EncodingVariant v : kAllVariants) {
        CandidateSets sets = derive_candidates(f, db, v);
        GroundStats s = ground_stats(f, db, v);
        CHECK(s.cbtftCount == db.cbtft.size());
        CHECK(s.directCount == sets.directs.size());
        CHECK(s.via1Count == sets.via1s.size());
        CHECK(s.via2Count == sets.via2s.size());
    }
}

TEST_CASE("ground_stats with parallel legs takes the dedup path") {
    // Two truck routes between the same pair with different distances force
    // candidates that can collide on the distance sum.
    FactSet f = parse_fact_file("productionLoc(a).\nproductionLoc(b).\nwarehouseLoc(w).\n"
                                "part(p).\ntransportMean(truck).\n"
                                "transportMeanAtSite(a,truck).\ntransportMeanAtSite(b,truck).\n"
                                "transportMeanAtSite(w,truck).\ncanTransport(truck,p).\n"
                                "transportRoute(a,w,truck,3).\ntransportRoute(a,w,truck,5).\n"
                                "transportRoute(w,b,truck,2).\n");
    DerivedDB db = derive_all(f);
    LegIndex index = build_leg_index(f, db);
    bool sawParallel = false;
    for (const auto& [part, legs] : index.perPart)
        sawParallel |= legs.parallelLegs;
    CHECK(sawParallel);
    for (EncodingVariant v : kAllVariants) {
        CandidateSets sets = derive_candidates(f, db, v);
        GroundStats s = ground_stats(f, db, v);
        CHECK(s.via1Count == sets.via1s.size());
        CHECK(s.via2Count == sets.via2s.size());
    }
}

TEST_CASE("empty facts give zero stats") {
    FactSet f;
    DerivedDB db = derive_all(f);
    GroundStats s = ground_stats(f, db, EncodingVariant::Baseline);
    CHECK(s.cbtftCount == 0);
    CHECK(s.directCount == 0);
    CHECK(s.via1Count == 0);
    CHECK(s.via2Count == 0);
    CHECK(s.choicePoints == 0);
    CHECK(s.groundProxy == 0);
}

TEST_CASE("choice point accounting") {
    FactSet f = load_fact_file(kPaperworldLp);
    // 4 parts + 3 production locations + plan-edge groundings
    // (p1,p2): 1*1, (p2,p3): 1*1, (p3,p4): 2*1.
    CHECK(count_choice_points(f, EncodingVariant::Baseline) == 4 + 3 + 4);
    CHECK(count_choice_points(f, EncodingVariant::PLChoiceAsIC) ==
          count_choice_points(f, EncodingVariant::Baseline) - f.productionLocs.size());
    CHECK(count_choice_points(f, EncodingVariant::All) ==
          count_choice_points(f, EncodingVariant::TMTypeReq) - f.productionLocs.size());

    DerivedDB db = derive_all(f);
    GroundStats tm = ground_stats(f, db, EncodingVariant::TMTypeReq);
    GroundStats all = ground_stats(f, db, EncodingVariant::All);
    CHECK(tm.groundProxy == all.groundProxy + f.productionLocs.size());
}

TEST_CASE("variant names round-trip") {
    for (EncodingVariant v : kAllVariants) {
        auto back = variant_from_name(variant_name(v));
        REQUIRE(back.has_value());
        CHECK(*back == v);
    }
    CHECK_FALSE(variant_from_name("Bogus").has_value());
}
