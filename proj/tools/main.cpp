#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "logicfg/bench.hpp"
#include "logicfg/derive.hpp"
#include "logicfg/errors.hpp"
#include "logicfg/facts.hpp"
#include "logicfg/solve.hpp"
#include "logicfg/triples.hpp"
#include "logicfg/verify.hpp"
#include "logicfg/viz.hpp"

using json = nlohmann::json;
using namespace logicfg;

namespace {

constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Logging: everything diagnostic goes to stderr. LOGICFG_LOG picks the
// threshold (debug|info|warn|error), LOGICFG_COLOR the severity coloring
// (auto|always|never).

enum class Level { Debug = 0, Info = 1, Warn = 2, Error = 3 };

Level logThreshold() {
    const char* v = std::getenv("LOGICFG_LOG");
    const std::string s = v ? v : "info";
    if (s == "debug")
        return Level::Debug;
    if (s == "warn")
        return Level::Warn;
    if (s == "error")
        return Level::Error;
    return Level::Info;
}

bool colorOn() {
    const char* v = std::getenv("LOGICFG_COLOR");
    const std::string s = v ? v : "auto";
    if (s == "always")
        return true;
    if (s == "never")
        return false;
    return isatty(fileno(stderr)) != 0;
}

void log(Level level, const std::string& msg) {
    static const Level threshold = logThreshold();
    static const bool color = colorOn();
    if (level < threshold)
        return;
    const char* tag = level == Level::Debug  ? "debug"
                      : level == Level::Info ? "info"
                      : level == Level::Warn ? "warn"
                                             : "error";
    if (color && level >= Level::Warn)
        std::cerr << (level == Level::Warn ? "\x1b[33m" : "\x1b[31m") << "[" << tag << "]\x1b[0m ";
    else
        std::cerr << "[" << tag << "] ";
    std::cerr << msg << "\n";
}

void logInfo(const std::string& msg) { log(Level::Info, msg); }
void logWarn(const std::string& msg) { log(Level::Warn, msg); }
void logError(const std::string& msg) { log(Level::Error, msg); }

// ---------------------------------------------------------------------------
// File plumbing.

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void writeFile(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write " + path);
    out << content;
    if (!out)
        throw Error("cannot write " + path);
}

std::string joinPath(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

std::string utcNow() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Every output set carries the manifest that reproduces it (`logicfg rerun`).
void writeManifest(const std::string& outDir, const std::string& command,
                   const std::vector<std::string>& inputs, const json& config,
                   std::uint64_t seed) {
    json m;
    m["command"] = command;
    m["inputs"] = inputs;
    m["config"] = config;
    m["outDir"] = outDir;
    m["timestamp"] = utcNow();
    m["toolVersion"] = kToolVersion;
    m["seed"] = seed;
    writeFile(joinPath(outDir, "manifest.json"), m.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// ingest: parse facts or a triple document, validate, write canonical facts.

struct IngestOpts {
    std::string input;
    bool kg = false;
    bool warnOnly = false;
    std::string outDir = ".";
};

bool endsWith(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

int runIngest(const IngestOpts& opts) {
    kb::FactSet facts;
    if (opts.kg || endsWith(opts.input, ".kg")) {
        facts = kb::kg_to_facts(kb::load_triple_file(opts.input));
    } else {
        facts = kb::load_fact_file(opts.input);
    }

    const verify::AssertionReport report = verify::run_assertions(facts);

    std::filesystem::create_directories(opts.outDir);
    writeFile(joinPath(opts.outDir, "facts.lp"), kb::serialize_facts(facts));
    writeFile(joinPath(opts.outDir, "assertions.csv"), verify::report_csv(report, facts));
    writeManifest(opts.outDir, "ingest", {opts.input},
                  json{{"kg", opts.kg}, {"warnOnly", opts.warnOnly}}, 0);

    std::cout << "country " << facts.countries.size() << "\n"
              << "productionLoc " << facts.productionLocs.size() << "\n"
              << "warehouseLoc " << facts.warehouseLocs.size() << "\n"
              << "locatedIn " << facts.locatedIn.size() << "\n"
              << "transportMean " << facts.transportMeans.size() << "\n"
              << "transportMeanAtSite " << facts.transportMeanAtSite.size() << "\n"
              << "part " << facts.parts.size() << "\n"
              << "canTransport " << facts.canTransport.size() << "\n"
              << "partProduceableAt " << facts.partProduceableAt.size() << "\n"
              << "transportRoute " << facts.transportRoutes.size() << "\n"
              << "productionPlan " << facts.productionPlan.size() << "\n";

    if (!report.findings.empty()) {
        std::cerr << verify::report_text(report, facts);
        if (!opts.warnOnly)
            return 1;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// solve: enumerate or optimize configurations, export the model tables.

struct SolveOpts {
    std::string input;
    std::string sourcing = "single";
    std::string variant = "Baseline";
    std::string mode = "optimize";
    std::uint64_t limit = 0;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    bool noPathDedup = false;
    std::string shipMean = "ship";
    std::int64_t timeoutMs = -1;
    std::string outDir = ".";
};

solve::SolveConfig toConfig(const SolveOpts& opts) {
    solve::SolveConfig cfg;
    cfg.sourcing = opts.sourcing == "double" ? solve::Sourcing::Double : solve::Sourcing::Single;
    cfg.variant = *ground::variant_from_name(opts.variant);
    cfg.seed = opts.seed;
    cfg.dedupPaths = !opts.noPathDedup;
    cfg.shipMeanName = opts.shipMean;
    if (opts.timeoutMs >= 0)
        cfg.timeout = std::chrono::milliseconds(opts.timeoutMs);
    return cfg;
}

json solveConfigJson(const SolveOpts& opts) {
    return json{{"sourcing", opts.sourcing},   {"variant", opts.variant},
                {"mode", opts.mode},           {"limit", opts.limit},
                {"jobs", opts.jobs},           {"pathDedup", !opts.noPathDedup},
                {"shipMean", opts.shipMean},   {"timeoutMs", opts.timeoutMs},
                {"outDir", opts.outDir}};
}

int runSolve(const SolveOpts& opts) {
    const kb::FactSet facts = kb::load_fact_file(opts.input);

    const verify::AssertionReport report = verify::run_assertions(facts);
    if (!report.findings.empty()) {
        std::cerr << verify::report_text(report, facts);
        if (report.errorCount() > 0)
            return 1;
    }

    const solve::SolveConfig cfg = toConfig(opts);
    const solve::Problem pb = solve::build_problem(facts, cfg);

    std::vector<solve::Model> models;
    std::string diagnostic;
    if (pb.infeasible) {
        diagnostic = pb.infeasible->message;
    } else if (opts.mode == "enumerate") {
        const solve::EnumerateResult res = solve::enumerate_models(pb, {opts.limit});
        models = res.models;
        if (res.timedOut)
            logWarn("enumeration hit the timeout; the exported set is incomplete");
        else if (res.truncated)
            logInfo("enumeration stopped at the model limit");
        if (models.empty())
            diagnostic = "no model satisfies the constraints";
    } else {
        const solve::OptimizeResult res = solve::optimize(pb, opts.jobs);
        if (res.timedOut)
            logWarn("optimization hit the timeout");
        if (res.model)
            models.push_back(*res.model);
        else if (!res.timedOut)
            diagnostic = "no model satisfies the constraints";
        else
            diagnostic = "no model found within the timeout";
    }

    std::filesystem::create_directories(opts.outDir);
    const viz::ModelTable table = viz::export_csv(facts, models);
    writeFile(joinPath(opts.outDir, "overview.csv"), table.overviewCsv());
    writeFile(joinPath(opts.outDir, "details.csv"), table.detailsCsv());
    writeFile(joinPath(opts.outDir, "facts.lp"), kb::serialize_facts(facts));
    writeManifest(opts.outDir, "solve", {opts.input}, solveConfigJson(opts), opts.seed);

    if (!diagnostic.empty()) {
        logError(diagnostic);
        return 2;
    }
    if (opts.mode == "enumerate")
        std::cout << "models " << models.size() << "\n";
    else
        std::cout << "optimum " << models[0].totalDistance << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// bench: generate instances and compare the encoding variants.

struct BenchOpts {
    bench::InstanceParams params;
    std::uint64_t seeds = 1;
    std::uint64_t seed = 0;
    std::int64_t timeoutMs = 30000;
    std::string outDir = ".";
};

json benchConfigJson(const BenchOpts& opts) {
    return json{{"productionLocs", opts.params.nProductionLocs},
                {"warehouseLocs", opts.params.nWarehouseLocs},
                {"meanPlacements", opts.params.nTransportMeanAtSite},
                {"parts", opts.params.nParts},
                {"countries", opts.params.nCountries},
                {"means", opts.params.nMeans},
                {"routeDensity", opts.params.routeDensity},
                {"seeds", opts.seeds},
                {"timeoutMs", opts.timeoutMs},
                {"outDir", opts.outDir}};
}

int runBench(const BenchOpts& opts) {
    if (opts.seeds == 0) {
        logError("at least one seed");
        return 1;
    }

    solve::SolveConfig cfg;
    if (opts.timeoutMs >= 0)
        cfg.timeout = std::chrono::milliseconds(opts.timeoutMs);

    std::string csv;
    bench::InstanceParams params = opts.params;
    for (std::uint64_t i = 0; i < opts.seeds; ++i) {
        params.seed = opts.seed + i;
        cfg.seed = params.seed;
        int retries = 0;
        const kb::FactSet facts = bench::generate_instance(params, &retries);
        if (retries > 0)
            logInfo("seed " + std::to_string(params.seed) + ": " + std::to_string(retries) +
                    " generator retries");
        const bench::VariantReport rep = bench::run_variants(facts, cfg);
        const std::string block = bench::report_csv(rep);
        if (i == 0) {
            csv = block;
        } else {
            csv += block.substr(block.find('\n') + 1); // header once
        }
        logInfo("seed " + std::to_string(params.seed) + " done");
    }

    std::filesystem::create_directories(opts.outDir);
    writeFile(joinPath(opts.outDir, "bench.csv"), csv);
    writeManifest(opts.outDir, "bench", {}, benchConfigJson(opts), opts.seed);

    std::cout << "seeds " << opts.seeds << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// viz: turn a solve output directory into a scatter plot and route maps.

struct VizOpts {
    std::string modelsDir;
    std::string layout;
    std::string kpiX = "totalDistance";
    std::string kpiY = "legCount";
    std::string outDir;
};

// The plan root never travels; its detail row only anchors it at its site.
std::optional<std::string> planRootName(const kb::FactSet& facts) {
    std::set<std::string> supers, children;
    for (const auto& [super, part] : facts.productionPlan) {
        supers.insert(facts.symbols.text(super));
        children.insert(facts.symbols.text(part));
    }
    for (const std::string& s : supers)
        if (!children.count(s))
            return s;
    return std::nullopt;
}

std::vector<solve::Model> rebuildModels(kb::FactSet& facts, const viz::ModelTable& table) {
    const std::optional<std::string> root = planRootName(facts);
    std::vector<solve::Model> models(table.overview.size());
    for (std::size_t i = 0; i < table.overview.size(); ++i) {
        models[i].totalDistance = table.overview[i].totalDistance;
        models[i].legCount = table.overview[i].legCount;
    }
    for (const viz::DetailRow& row : table.details) {
        if (row.modelId >= models.size())
            throw Error("model table: detail row for unknown model " +
                        std::to_string(row.modelId));
        if (row.vias.size() > 2 || row.means.size() != row.vias.size() + 1)
            throw Error("model table: malformed leg lists for part " + row.part);
        solve::ModelPath p;
        p.part = facts.symbols.intern(row.part);
        p.from = facts.symbols.intern(row.from);
        p.to = facts.symbols.intern(row.to);
        p.cand.part = p.part;
        p.cand.from = p.from;
        p.cand.to = p.to;
        p.cand.viaCount = static_cast<int>(row.vias.size());
        for (std::size_t v = 0; v < row.vias.size(); ++v)
            p.cand.vias[v] = facts.symbols.intern(row.vias[v]);
        for (std::size_t l = 0; l < row.means.size(); ++l)
            p.cand.means[l] = facts.symbols.intern(row.means[l]);
        p.cand.distance = row.distance;
        p.isRoot = root && row.part == *root && row.from == row.to && row.vias.empty();
        models[row.modelId].paths.push_back(p);
    }
    return models;
}

int runViz(const VizOpts& opts) {
    const std::string outDir = opts.outDir.empty() ? opts.modelsDir : opts.outDir;

    const viz::ModelTable table =
        viz::parse_model_table(readFile(joinPath(opts.modelsDir, "overview.csv")),
                               readFile(joinPath(opts.modelsDir, "details.csv")));
    kb::FactSet facts = kb::parse_fact_file(readFile(joinPath(opts.modelsDir, "facts.lp")));
    const viz::MapLayout layout =
        opts.layout.empty() ? viz::grid_layout(facts) : viz::load_layout_csv(opts.layout);

    std::filesystem::create_directories(outDir);
    writeFile(joinPath(outDir, "scatter.svg"),
              viz::render_scatter(table.overview, opts.kpiX, opts.kpiY));

    const std::vector<solve::Model> models = rebuildModels(facts, table);
    for (std::size_t i = 0; i < models.size(); ++i)
        writeFile(joinPath(outDir, "map_" + std::to_string(table.overview[i].modelId) + ".svg"),
                  viz::render_map(facts, models[i], layout));

    std::vector<std::string> inputs{opts.modelsDir};
    if (!opts.layout.empty())
        inputs.push_back(opts.layout);
    writeManifest(outDir, "viz", inputs,
                  json{{"layout", opts.layout}, {"kpiX", opts.kpiX}, {"kpiY", opts.kpiY},
                       {"outDir", outDir}},
                  0);

    std::cout << "maps " << models.size() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// rerun: replay the command recorded in a manifest.

int runRerun(const std::string& manifestPath) {
    json m;
    try {
        m = json::parse(readFile(manifestPath));
    } catch (const json::exception& e) {
        throw Error("manifest: " + std::string(e.what()));
    }

    const std::string command = m.value("command", "");
    const json cfg = m.value("config", json::object());
    const std::vector<std::string> inputs = m.value("inputs", std::vector<std::string>{});
    const std::string outDir = m.value("outDir", ".");
    const std::uint64_t seed = m.value("seed", std::uint64_t{0});

    if (command == "ingest") {
        if (inputs.empty())
            throw Error("manifest: ingest needs an input");
        IngestOpts o;
        o.input = inputs[0];
        o.kg = cfg.value("kg", false);
        o.warnOnly = cfg.value("warnOnly", false);
        o.outDir = outDir;
        return runIngest(o);
    }
    if (command == "solve") {
        if (inputs.empty())
            throw Error("manifest: solve needs an input");
        SolveOpts o;
        o.input = inputs[0];
        o.sourcing = cfg.value("sourcing", o.sourcing);
        o.variant = cfg.value("variant", o.variant);
        o.mode = cfg.value("mode", o.mode);
        o.limit = cfg.value("limit", o.limit);
        o.seed = seed;
        o.jobs = cfg.value("jobs", o.jobs);
        o.noPathDedup = !cfg.value("pathDedup", true);
        o.shipMean = cfg.value("shipMean", o.shipMean);
        o.timeoutMs = cfg.value("timeoutMs", o.timeoutMs);
        o.outDir = outDir;
        if (!ground::variant_from_name(o.variant))
            throw Error("manifest: unknown variant " + o.variant);
        return runSolve(o);
    }
    if (command == "bench") {
        BenchOpts o;
        o.params.nProductionLocs = cfg.value("productionLocs", o.params.nProductionLocs);
        o.params.nWarehouseLocs = cfg.value("warehouseLocs", o.params.nWarehouseLocs);
        o.params.nTransportMeanAtSite = cfg.value("meanPlacements", o.params.nTransportMeanAtSite);
        o.params.nParts = cfg.value("parts", o.params.nParts);
        o.params.nCountries = cfg.value("countries", o.params.nCountries);
        o.params.nMeans = cfg.value("means", o.params.nMeans);
        o.params.routeDensity = cfg.value("routeDensity", o.params.routeDensity);
        o.seeds = cfg.value("seeds", o.seeds);
        o.seed = seed;
        o.timeoutMs = cfg.value("timeoutMs", o.timeoutMs);
        o.outDir = outDir;
        return runBench(o);
    }
    if (command == "viz") {
        if (inputs.empty())
            throw Error("manifest: viz needs an input directory");
        VizOpts o;
        o.modelsDir = inputs[0];
        o.layout = cfg.value("layout", o.layout);
        o.kpiX = cfg.value("kpiX", o.kpiX);
        o.kpiY = cfg.value("kpiY", o.kpiY);
        o.outDir = outDir;
        return runViz(o);
    }
    throw Error("manifest: unknown command '" + command + "'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"logistics configuration pipeline: ingest, solve, bench, viz"};
    app.set_config("--config", "", "read defaults from an INI/TOML file");
    app.require_subcommand(1);

    IngestOpts ingest;
    CLI::App* cmdIngest =
        app.add_subcommand("ingest", "parse facts or a triple document, validate, export");
    cmdIngest->add_option("input", ingest.input, "fact file or triple document")
        ->required()
        ->check(CLI::ExistingFile);
    cmdIngest->add_flag("--kg", ingest.kg, "force triple-document parsing (default for .kg)");
    cmdIngest->add_flag("--warn-only", ingest.warnOnly, "report findings but exit 0");
    cmdIngest->add_option("--out", ingest.outDir, "output directory")->capture_default_str();

    SolveOpts solveOpts;
    CLI::App* cmdSolve = app.add_subcommand("solve", "enumerate or optimize configurations");
    cmdSolve->add_option("facts", solveOpts.input, "fact file")
        ->required()
        ->check(CLI::ExistingFile);
    cmdSolve->add_option("--sourcing", solveOpts.sourcing, "sites per part")
        ->check(CLI::IsMember({"single", "double"}))
        ->capture_default_str();
    cmdSolve->add_option("--variant", solveOpts.variant, "encoding variant")
        ->check(CLI::IsMember({"Baseline", "PLChoiceAsIC", "LocTypeReq", "TMTypeReq", "All"}))
        ->capture_default_str();
    cmdSolve->add_option("--mode", solveOpts.mode, "enumerate all models or optimize distance")
        ->check(CLI::IsMember({"enumerate", "optimize"}))
        ->capture_default_str();
    cmdSolve->add_option("--limit", solveOpts.limit, "model cap for enumerate; 0 keeps all")
        ->capture_default_str();
    cmdSolve->add_option("--seed", solveOpts.seed, "exploration order seed")
        ->capture_default_str();
    cmdSolve->add_option("--jobs", solveOpts.jobs, "worker threads for optimize")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmdSolve->add_flag("--no-path-dedup", solveOpts.noPathDedup,
                       "keep path options that differ only in vias");
    cmdSolve->add_option("--ship-mean", solveOpts.shipMean, "mean required mid-route by TMTypeReq")
        ->capture_default_str();
    cmdSolve->add_option("--timeout-ms", solveOpts.timeoutMs, "search budget; -1 is unbounded")
        ->capture_default_str();
    cmdSolve->add_option("--out", solveOpts.outDir, "output directory")->capture_default_str();

    BenchOpts benchOpts;
    CLI::App* cmdBench = app.add_subcommand("bench", "generate instances, compare variants");
    cmdBench->add_option("--production-locs", benchOpts.params.nProductionLocs)
        ->capture_default_str();
    cmdBench->add_option("--warehouse-locs", benchOpts.params.nWarehouseLocs)
        ->capture_default_str();
    cmdBench->add_option("--mean-placements", benchOpts.params.nTransportMeanAtSite)
        ->capture_default_str();
    cmdBench->add_option("--parts", benchOpts.params.nParts)->capture_default_str();
    cmdBench->add_option("--countries", benchOpts.params.nCountries)->capture_default_str();
    cmdBench->add_option("--means", benchOpts.params.nMeans)->capture_default_str();
    cmdBench->add_option("--route-density", benchOpts.params.routeDensity)
        ->capture_default_str();
    cmdBench->add_option("--seeds", benchOpts.seeds, "instances to generate")
        ->capture_default_str();
    cmdBench->add_option("--seed", benchOpts.seed, "first instance seed")->capture_default_str();
    cmdBench->add_option("--timeout-ms", benchOpts.timeoutMs, "per-variant solve budget")
        ->capture_default_str();
    cmdBench->add_option("--out", benchOpts.outDir, "output directory")->capture_default_str();

    VizOpts vizOpts;
    CLI::App* cmdViz = app.add_subcommand("viz", "render a solve output directory");
    cmdViz->add_option("models", vizOpts.modelsDir, "solve output directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    cmdViz->add_option("--layout", vizOpts.layout, "location,x,y coordinates; default grid")
        ->check(CLI::ExistingFile);
    cmdViz->add_option("--kpi-x", vizOpts.kpiX, "scatter x axis")->capture_default_str();
    cmdViz->add_option("--kpi-y", vizOpts.kpiY, "scatter y axis")->capture_default_str();
    cmdViz->add_option("--out", vizOpts.outDir, "output directory; default the input directory");

    std::string manifestPath;
    CLI::App* cmdRerun = app.add_subcommand("rerun", "replay a recorded manifest");
    cmdRerun->add_option("manifest", manifestPath, "manifest.json from a previous run")
        ->required()
        ->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cmdIngest->parsed())
            return runIngest(ingest);
        if (cmdSolve->parsed())
            return runSolve(solveOpts);
        if (cmdBench->parsed())
            return runBench(benchOpts);
        if (cmdViz->parsed())
            return runViz(vizOpts);
        if (cmdRerun->parsed())
            return runRerun(manifestPath);
    } catch (const Error& e) {
        logError(e.what());
        return 1;
    } catch (const std::exception& e) {
        logError(std::string("internal: ") + e.what());
        return 3;
    }
    return 3; // unreachable: require_subcommand guarantees a dispatch
}
