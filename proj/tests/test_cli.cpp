#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "logicfg/facts.hpp"
#include "logicfg/triples.hpp"
#include "support/xml_check.hpp"

using namespace logicfg;
namespace fs = std::filesystem;

namespace {

const char* kPaperworldLp = LOGICFG_DATA_DIR "/paperworld.lp";
const char* kPaperworldKg = LOGICFG_DATA_DIR "/paperworld.kg";
const char* kBadLocatedIn = LOGICFG_DATA_DIR "/assert_located_in_fail.lp";
const char* kDoubleWorld = LOGICFG_DATA_DIR "/doubleworld.lp";
const char* kDoubleWorldUnsat = LOGICFG_DATA_DIR "/doubleworld_unsat.lp";

struct RunResult {
    int exit = -1;
    std::string output; // stdout and stderr merged
};

// Runs the binary with stderr folded into stdout; asserts the process exited
// normally so a crash never masquerades as an exit code.
RunResult runCli(const std::string& args) {
    const std::string cmd = std::string(LOGICFG_BIN) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe))
        res.output.append(buf, n);
    const int status = pclose(pipe);
    REQUIRE(WIFEXITED(status));
    res.exit = WEXITSTATUS(status);
    return res;
}

// Fresh directory per test case, under the build tree's temp area.
fs::path freshDir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("logicfg_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::size_t lineCount(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n')
            ++n;
    return n;
}

} // namespace

TEST_CASE("ingest echoes fact counts and writes the canonical form") {
    const fs::path dir = freshDir("ingest_ok");
    const RunResult res = runCli("ingest " + std::string(kPaperworldLp) + " --out " +
                                 dir.string());
    CHECK(res.exit == 0);
    CHECK(res.output.find("part 4") != std::string::npos);
    CHECK(res.output.find("transportRoute 8") != std::string::npos);
    CHECK(res.output.find("productionPlan 3") != std::string::npos);

    // The exported file is the canonical serialization of the input.
    const kb::FactSet original = kb::load_fact_file(kPaperworldLp);
    CHECK(slurp(dir / "facts.lp") == kb::serialize_facts(original));
    CHECK(slurp(dir / "assertions.csv") == "assertionName,subject,message\n");
    CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("ingest accepts a triple document") {
    const fs::path dir = freshDir("ingest_kg");
    const RunResult res = runCli("ingest " + std::string(kPaperworldKg) + " --out " +
                                 dir.string());
    CHECK(res.exit == 0);

    const kb::FactSet viaKg = kb::kg_to_facts(kb::load_triple_file(kPaperworldKg));
    CHECK(slurp(dir / "facts.lp") == kb::serialize_facts(viaKg));
}

TEST_CASE("ingest fails on findings unless told to warn only") {
    const fs::path dir = freshDir("ingest_fail");
    const RunResult res = runCli("ingest " + std::string(kBadLocatedIn) + " --out " +
                                 dir.string());
    CHECK(res.exit == 1);
    CHECK(res.output.find("invalidLocatedIn") != std::string::npos);

    const RunResult lax = runCli("ingest " + std::string(kBadLocatedIn) + " --warn-only --out " +
                                 dir.string());
    CHECK(lax.exit == 0);
}

TEST_CASE("ingest rejects malformed input with exit 1") {
    const fs::path dir = freshDir("ingest_bad");
    const fs::path bad = dir / "broken.lp";
    std::ofstream(bad) << "part(x)\n"; // missing the closing dot
    const RunResult res = runCli("ingest " + bad.string() + " --out " + dir.string());
    CHECK(res.exit == 1);
    CHECK(res.output.find("line 1") != std::string::npos);
}

TEST_CASE("solve optimize reports the paperworld optimum") {
    const fs::path dir = freshDir("solve_opt");
    const RunResult res = runCli("solve " + std::string(kPaperworldLp) + " --out " +
                                 dir.string());
    CHECK(res.exit == 0);
    CHECK(res.output.find("optimum 17") != std::string::npos);
    CHECK(slurp(dir / "overview.csv") == "modelId,totalDistance,legCount\n0,17,7\n");
    CHECK(fs::exists(dir / "details.csv"));
    CHECK(fs::exists(dir / "facts.lp"));
    CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("solve enumerate respects the model limit") {
    const fs::path dir = freshDir("solve_enum");
    const RunResult res = runCli("solve " + std::string(kPaperworldLp) +
                                 " --mode enumerate --limit 5 --out " + dir.string());
    CHECK(res.exit == 0);

    const std::string overview = slurp(dir / "overview.csv");
    const std::size_t rows = lineCount(overview) - 1;
    CHECK(rows >= 1);
    CHECK(rows <= 5);
}

TEST_CASE("solve signals unsatisfiable double sourcing with exit 2") {
    const fs::path dir = freshDir("solve_unsat");
    const RunResult res = runCli("solve " + std::string(kDoubleWorldUnsat) +
                                 " --sourcing double --mode enumerate --out " + dir.string());
    CHECK(res.exit == 2);
    CHECK(res.output.find("shares a country") != std::string::npos);
    // The empty tables still land on disk, next to the manifest.
    CHECK(slurp(dir / "overview.csv") == "modelId,totalDistance,legCount\n");

    const fs::path okDir = freshDir("solve_double_ok");
    const RunResult ok = runCli("solve " + std::string(kDoubleWorld) +
                                " --sourcing double --mode enumerate --out " + okDir.string());
    CHECK(ok.exit == 0);
    CHECK(lineCount(slurp(okDir / "overview.csv")) >= 2);
}

TEST_CASE("bench wants at least one seed") {
    const RunResult res = runCli("bench --seeds 0");
    CHECK(res.exit == 1);
    CHECK(res.output.find("at least one seed") != std::string::npos);
}

TEST_CASE("bench writes one variant block per seed") {
    const fs::path dir = freshDir("bench_small");
    const RunResult res = runCli("bench --production-locs 3 --warehouse-locs 3 "
                                 "--mean-placements 12 --parts 5 --countries 2 --means 3 "
                                 "--seeds 2 --out " +
                                 dir.string());
    CHECK(res.exit == 0);

    const std::string csv = slurp(dir / "bench.csv");
    CHECK(lineCount(csv) == 1 + 2 * 5); // header once, 5 variants per seed
    CHECK(csv.rfind("variant,cbtft,direct,via1,via2,groundProxy,choicePoints,", 0) == 0);
    CHECK(testsupport::count_of(csv, "\nBaseline,") == 2);
    CHECK(testsupport::count_of(csv, "\nAll,") == 2);
}

TEST_CASE("viz renders a scatter and one map per model") {
    const fs::path solveDir = freshDir("viz_solve");
    REQUIRE(runCli("solve " + std::string(kPaperworldLp) + " --mode enumerate --limit 3 --out " +
                   solveDir.string())
                .exit == 0);

    const fs::path vizDir = freshDir("viz_out");
    const RunResult res = runCli("viz " + solveDir.string() + " --layout " + LOGICFG_DATA_DIR
                                 "/paperworld_layout.csv --out " +
                                 vizDir.string());
    CHECK(res.exit == 0);

    const std::string scatter = slurp(vizDir / "scatter.svg");
    CHECK(testsupport::xml_error(scatter) == std::nullopt);
    const std::size_t models = lineCount(slurp(solveDir / "overview.csv")) - 1;
    for (std::size_t i = 0; i < models; ++i) {
        const std::string map = slurp(vizDir / ("map_" + std::to_string(i) + ".svg"));
        CHECK(testsupport::xml_error(map) == std::nullopt);
    }
    CHECK_FALSE(fs::exists(vizDir / ("map_" + std::to_string(models) + ".svg")));
}

TEST_CASE("viz names the location missing from the layout") {
    const fs::path solveDir = freshDir("viz_missing_solve");
    REQUIRE(runCli("solve " + std::string(kPaperworldLp) + " --out " + solveDir.string()).exit ==
            0);

    const fs::path layout = solveDir / "partial_layout.csv";
    std::ofstream(layout) << "location,x,y\naP,0,0\naH,1,0\nbP,2,0\nbH,3,0\n"; // no cP
    const RunResult res = runCli("viz " + solveDir.string() + " --layout " + layout.string());
    CHECK(res.exit == 1);
    CHECK(res.output.find("cP") != std::string::npos);
}

TEST_CASE("rerun reproduces a solve byte for byte") {
    const fs::path dir = freshDir("rerun");
    REQUIRE(runCli("solve " + std::string(kPaperworldLp) + " --mode enumerate --out " +
                   dir.string())
                .exit == 0);
    const std::string overview = slurp(dir / "overview.csv");
    const std::string details = slurp(dir / "details.csv");
    const std::string facts = slurp(dir / "facts.lp");

    const RunResult res = runCli("rerun " + (dir / "manifest.json").string());
    CHECK(res.exit == 0);
    CHECK(slurp(dir / "overview.csv") == overview);
    CHECK(slurp(dir / "details.csv") == details);
    CHECK(slurp(dir / "facts.lp") == facts);
}

TEST_CASE("bad flags exit with the validation code") {
    CHECK(runCli("solve").exit == 1);                       // missing positional
    CHECK(runCli("solve nosuchfile.lp").exit == 1);         // nonexistent input
    CHECK(runCli("frobnicate").exit == 1);                  // unknown subcommand
    CHECK(runCli("bench --route-density nan2").exit == 1);  // unparsable value
    CHECK(runCli("--help").exit == 0);
}
