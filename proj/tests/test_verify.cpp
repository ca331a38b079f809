#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "logicfg/errors.hpp"
#include "logicfg/facts.hpp"
#include "logicfg/solve.hpp"
#include "logicfg/verify.hpp"
#include "support/random_instance.hpp"

using namespace logicfg;
using namespace logicfg::kb;
using namespace logicfg::verify;

namespace {

const char* kPaperworldLp = LOGICFG_DATA_DIR "/paperworld.lp";

AssertionReport reportOf(const std::string& text) {
    FactSet f = parse_fact_file(text);
    return run_assertions(f);
}

std::vector<std::string> subjectNames(const Finding& f, const FactSet& facts) {
    std::vector<std::string> out;
    for (SymbolId s : f.subjects)
        out.push_back(std::string(facts.symbols.text(s)));
    return out;
}

// Asserts that `text` yields exactly the findings named in `expected`
// (assertion, first subject), in canonical report order.
void expectFindings(const std::string& text,
                    const std::vector<std::pair<std::string, std::string>>& expected) {
    FactSet f = parse_fact_file(text);
    AssertionReport r = run_assertions(f);
    REQUIRE(r.findings.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(r.findings[i].assertion == expected[i].first);
        REQUIRE(!r.findings[i].subjects.empty());
        CHECK(std::string(f.symbols.text(r.findings[i].subjects[0])) == expected[i].second);
    }
}

std::set<std::string> keySet(const solve::Problem& pb, const std::vector<solve::Model>& models) {
    std::set<std::string> keys;
    for (const auto& m : models)
        keys.insert(solve::model_key(pb, m));
    return keys;
}

} // namespace

TEST_CASE("the narrative world passes every assertion") {
    FactSet f = load_fact_file(kPaperworldLp);
    AssertionReport r = run_assertions(f);
    CHECK(r.pass());
    CHECK(r.errorCount() == 0);
    CHECK(r.warningCount() == 0);
    CHECK(report_text(r, f) == "all assertions passed\n");
    CHECK(report_csv(r, f) == "assertionName,subject,message\n");
}

TEST_CASE("published assertion fixtures") {
    SUBCASE("location without a country") {
        FactSet f = load_fact_file(LOGICFG_DATA_DIR "/assert_located_in_fail.lp");
        AssertionReport r = run_assertions(f);
        REQUIRE(r.findings.size() == 1);
        const Finding& got = r.findings[0];
        CHECK(got.assertion == "invalidLocatedIn");
        CHECK(subjectNames(got, f) == std::vector<std::string>{"aP"});
        CHECK(got.severity == Severity::Error);
        CHECK(got.origin == Origin::Core);

        FactSet ok = load_fact_file(LOGICFG_DATA_DIR "/assert_located_in_pass.lp");
        CHECK(run_assertions(ok).pass());
    }
    SUBCASE("location in two countries") {
        FactSet f = load_fact_file(LOGICFG_DATA_DIR "/assert_two_countries_fail.lp");
        AssertionReport r = run_assertions(f);
        REQUIRE(r.findings.size() == 1);
        const Finding& got = r.findings[0];
        CHECK(got.assertion == "invalidLocatedInTwoCountries");
        CHECK(subjectNames(got, f) == std::vector<std::string>{"aP"});
        CHECK(got.origin == Origin::Core);
        CHECK(got.message == "location aP is located in 2 countries: aCountry, bCountry");

        FactSet ok = load_fact_file(LOGICFG_DATA_DIR "/assert_two_countries_pass.lp");
        CHECK(run_assertions(ok).pass());
    }
}

TEST_CASE("extended assertions fire on their fixture and are quiet on the fix") {
    // A clean base every fixture builds on.
    const std::string base = "country(c).\nproductionLoc(f).\nlocatedIn(f,c).\n";

    SUBCASE("route endpoints must be declared locations") {
        const std::string bad = base + "transportMean(t).\ntransportMeanAtSite(f,t).\n" +
                                "transportRoute(f,g,t,3).\n";
        expectFindings(bad, {{"invalidRouteEndpoint", "g"}});
        CHECK(reportOf(bad + "warehouseLoc(g).\nlocatedIn(g,c).\n").pass());
    }
    SUBCASE("placements must name a declared mean") {
        const std::string bad = base + "transportMeanAtSite(f,x).\n";
        expectFindings(bad, {{"invalidMeanAtSite", "x"}});
        CHECK(reportOf(bad + "transportMean(x).\n").pass());
    }
    SUBCASE("capabilities must name a declared mean") {
        const std::string bad =
            base + "part(p).\npartProduceableAt(p,f).\ncanTransport(x,p).\n";
        expectFindings(bad, {{"invalidCanTransportMean", "x"}});
        CHECK(reportOf(bad + "transportMean(x).\ntransportMeanAtSite(f,x).\n").pass());
    }
    SUBCASE("produceability must name declared parts and locations") {
        const std::string bad = base + "partProduceableAt(p,g).\n";
        expectFindings(bad,
                       {{"invalidPartProduceableAt", "g"}, {"invalidPartProduceableAt", "p"}});
        CHECK(reportOf(base + "part(p).\npartProduceableAt(p,f).\n").pass());
    }
    SUBCASE("plan edges must name declared parts") {
        const std::string bad =
            base + "part(p).\npartProduceableAt(p,f).\nproductionPlan(p,q).\n";
        expectFindings(bad, {{"invalidProductionPlanRef", "q"}});
        CHECK(reportOf(bad + "part(q).\npartProduceableAt(q,f).\n").pass());
    }
    SUBCASE("distances must not be negative") {
        const std::string bad = base +
                                "warehouseLoc(g).\nlocatedIn(g,c).\ntransportMean(t).\n"
                                "transportMeanAtSite(f,t).\ntransportRoute(f,g,t,-2).\n";
        FactSet f = parse_fact_file(bad);
        AssertionReport r = run_assertions(f);
        REQUIRE(r.findings.size() == 1);
        CHECK(r.findings[0].assertion == "invalidNegativeDistance");
        CHECK(subjectNames(r.findings[0], f) ==
              std::vector<std::string>{"f", "g", "t"});
    }
    SUBCASE("every part needs a production site") {
        const std::string bad = base + "part(p).\n";
        expectFindings(bad, {{"invalidUnproduceablePart", "p"}});
        CHECK(reportOf(bad + "partProduceableAt(p,f).\n").pass());
    }
    SUBCASE("plans must be acyclic") {
        const std::string bad = base +
                                "part(p).\npart(q).\npartProduceableAt(p,f).\n"
                                "partProduceableAt(q,f).\nproductionPlan(p,q).\n"
                                "productionPlan(q,p).\n";
        FactSet f = parse_fact_file(bad);
        AssertionReport r = run_assertions(f);
        REQUIRE(r.findings.size() == 1);
        CHECK(r.findings[0].assertion == "invalidProductionPlanCycle");
        CHECK(r.findings[0].message == "production plan cycle: p -> q -> p");
    }
    SUBCASE("plans have one root") {
        const std::string bad = base +
                                "part(p).\npart(q).\npart(r).\npartProduceableAt(p,f).\n"
                                "partProduceableAt(q,f).\npartProduceableAt(r,f).\n"
                                "productionPlan(p,r).\nproductionPlan(q,r).\n";
        FactSet f = parse_fact_file(bad);
        AssertionReport r = run_assertions(f);
        REQUIRE(r.findings.size() == 1);
        CHECK(r.findings[0].assertion == "invalidMultipleRoots");
        CHECK(subjectNames(r.findings[0], f) == std::vector<std::string>{"p", "q"});
    }
    SUBCASE("a location cannot be both site kinds") {
        const std::string bad = base + "warehouseLoc(f).\n";
        expectFindings(bad, {{"invalidLocationTypeConflict", "f"}});
    }
    SUBCASE("declared means must be placed somewhere") {
        const std::string bad = base + "transportMean(t).\n";
        expectFindings(bad, {{"invalidMeanAtNoSite", "t"}});
        CHECK(reportOf(bad + "transportMeanAtSite(f,t).\n").pass());
    }
    SUBCASE("empty countries only warn") {
        const std::string bad = base + "country(d).\n";
        FactSet f = parse_fact_file(bad);
        AssertionReport r = run_assertions(f);
        REQUIRE(r.findings.size() == 1);
        CHECK(r.findings[0].assertion == "countryWithoutLocation");
        CHECK(r.findings[0].severity == Severity::Warning);
        CHECK(r.errorCount() == 0);
        CHECK(r.warningCount() == 1);
        CHECK_FALSE(r.pass());
    }
}

TEST_CASE("reports are independent of fact order") {
    const std::string world = "country(c).\ncountry(d).\nproductionLoc(f).\n"
                              "warehouseLoc(f).\ntransportMean(t).\n"
                              "part(p).\npartProduceableAt(p,f).\n"
                              "transportRoute(f,g,t,-1).\n";
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < world.size()) {
        const auto end = world.find('\n', pos);
        lines.push_back(world.substr(pos, end - pos));
        pos = end + 1;
    }
    std::string reversed;
    for (auto it = lines.rbegin(); it != lines.rend(); ++it)
        reversed += *it + "\n";

    FactSet a = parse_fact_file(world);
    FactSet b = parse_fact_file(reversed);
    CHECK(report_text(run_assertions(a), a) == report_text(run_assertions(b), b));
    // Both countries idle, f without a country and doubly typed, t placed
    // nowhere, the route endpoint g undeclared, the distance negative.
    CHECK(run_assertions(a).findings.size() == 7);
}

TEST_CASE("report rendering") {
    const std::string world = "country(aCountry).\ncountry(bCountry).\nproductionLoc(aP).\n"
                              "locatedIn(aP,aCountry).\nlocatedIn(aP,bCountry).\ncountry(empty).\n";
    FactSet f = parse_fact_file(world);
    AssertionReport r = run_assertions(f);
    REQUIRE(r.findings.size() == 2);

    const std::string text = report_text(r, f);
    CHECK(text ==
          "warning countryWithoutLocation(empty): country empty has no location [extended]\n"
          "error invalidLocatedInTwoCountries(aP): location aP is located in 2 countries: "
          "aCountry, bCountry [core]\n"
          "1 error(s), 1 warning(s)\n");

    const std::string csv = report_csv(r, f);
    CHECK(csv == "assertionName,subject,message\n"
                 "countryWithoutLocation,empty,country empty has no location\n"
                 "invalidLocatedInTwoCountries,aP,"
                 "\"location aP is located in 2 countries: aCountry, bCountry\"\n");
}

TEST_CASE("assertion evaluation leaves the facts untouched") {
    FactSet f = load_fact_file(kPaperworldLp);
    const std::string before = serialize_facts(f);
    run_assertions(f);
    CHECK(serialize_facts(f) == before);
}

TEST_CASE("the oracle agrees on the narrative world") {
    FactSet f = load_fact_file(kPaperworldLp);
    for (auto variant : {ground::EncodingVariant::Baseline, ground::EncodingVariant::All}) {
        solve::SolveConfig cfg;
        cfg.variant = variant;
        solve::Problem pb = solve::build_problem(f, cfg);

        BruteForceResult oracle = brute_force_solve(pb);
        auto enumerated = solve::enumerate_models(pb);
        CHECK(keySet(pb, enumerated.models) == keySet(pb, oracle.models));

        auto best = solve::optimize(pb);
        REQUIRE(best.model.has_value());
        REQUIRE(oracle.optimum.has_value());
        CHECK(best.model->totalDistance == *oracle.optimum);
        CHECK(*oracle.optimum == 17);
    }
}

TEST_CASE("oracle edge cases") {
    SUBCASE("single part, single site, no transports") {
        FactSet f = parse_fact_file("country(c).\nproductionLoc(f).\nlocatedIn(f,c).\n"
                                    "part(p).\npartProduceableAt(p,f).\n");
        solve::Problem pb = solve::build_problem(f, {});
        BruteForceResult r = brute_force_solve(pb);
        REQUIRE(r.models.size() == 1);
        CHECK(r.models[0].totalDistance == 0);
        CHECK(r.models[0].paths.empty());
        CHECK(r.optimum == 0);
    }
    SUBCASE("part produceable nowhere") {
        FactSet f = parse_fact_file("country(c).\nproductionLoc(f).\nlocatedIn(f,c).\n"
                                    "part(p).\n");
        solve::Problem pb = solve::build_problem(f, {});
        BruteForceResult r = brute_force_solve(pb);
        CHECK(r.models.empty());
        CHECK_FALSE(r.optimum.has_value());
    }
    SUBCASE("the work guard rejects huge instances") {
        std::string world = "country(c).\nproductionLoc(f).\nproductionLoc(g).\n"
                            "locatedIn(f,c).\nlocatedIn(g,c).\n";
        for (int i = 0; i < 24; ++i) {
            const std::string p = "p" + std::to_string(i);
            world += "part(" + p + ").\npartProduceableAt(" + p + ",f).\n" +
                     "partProduceableAt(" + p + ",g).\n";
        }
        FactSet f = parse_fact_file(world);
        solve::Problem pb = solve::build_problem(f, {});
        CHECK_THROWS_AS(brute_force_solve(pb), Error);
    }
}

TEST_CASE("random worlds: search agrees with the exhaustive oracle") {
    int skipped = 0;
    int satisfiable = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        INFO("seed " << seed);
        FactSet f = parse_fact_file(testsupport::random_world(seed));

        solve::SolveConfig cfg;
        cfg.sourcing = (seed % 2) ? solve::Sourcing::Single : solve::Sourcing::Double;
        cfg.variant = ground::kAllVariants[seed % 5];
        cfg.dedupPaths = ((seed / 2) % 2) == 0;
        cfg.seed = seed;
        solve::Problem pb = solve::build_problem(f, cfg);

        BruteForceResult oracle;
        try {
            oracle = brute_force_solve(pb);
        } catch (const Error&) {
            ++skipped;
            continue;
        }

        auto enumerated = solve::enumerate_models(pb);
        CHECK(keySet(pb, enumerated.models) == keySet(pb, oracle.models));
        CHECK(enumerated.models.size() == oracle.models.size());

        auto best = solve::optimize(pb);
        CHECK(best.model.has_value() == oracle.optimum.has_value());
        if (best.model && oracle.optimum) {
            ++satisfiable;
            CHECK(best.model->totalDistance == *oracle.optimum);
        }
    }
    CHECK(skipped <= 10);
    CHECK(satisfiable >= 15);
}
