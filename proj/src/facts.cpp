#include "logicfg/facts.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "logicfg/errors.hpp"

namespace logicfg::kb {

namespace {

bool isSymbolChar(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

struct LineParser {
    std::string_view line;
    std::size_t pos = 0;
    int lineNo;

    LineParser(std::string_view l, int n) : line(l), lineNo(n) {}

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(lineNo, msg); }

    void skipWs() {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t'))
            ++pos;
    }

    void expect(char c) {
        skipWs();
        if (pos >= line.size() || line[pos] != c)
            fail(std::string("expected '") + c + "'");
        ++pos;
    }

    std::string_view token() {
        skipWs();
        std::size_t start = pos;
        if (pos < line.size() && line[pos] == '-')
            ++pos; // negative integer literal
        while (pos < line.size() && isSymbolChar(line[pos]))
            ++pos;
        if (pos == start)
            fail("expected a symbol or integer");
        return line.substr(start, pos - start);
    }

    bool atEnd() {
        skipWs();
        return pos >= line.size();
    }
};

std::int64_t parseDistance(std::string_view tok, const LineParser& p) {
    std::size_t i = tok.size() > 0 && tok[0] == '-' ? 1 : 0;
    if (i == tok.size())
        p.fail("non-integer distance '" + std::string(tok) + "'");
    std::int64_t v = 0;
    for (; i < tok.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(tok[i])))
            p.fail("non-integer distance '" + std::string(tok) + "'");
        v = v * 10 + (tok[i] - '0');
    }
    return tok[0] == '-' ? -v : v;
}

SymbolId internArg(FactSet& f, std::string_view tok, const LineParser& p) {
    if (tok.empty() || std::isdigit(static_cast<unsigned char>(tok[0])) || tok[0] == '-')
        p.fail("expected a symbol, got '" + std::string(tok) + "'");
    return f.symbols.intern(tok);
}

template <typename T>
void sortUnique(std::vector<T>& v, const SymbolTable& tab);

struct TextOrder {
    const SymbolTable& tab;
    bool operator()(SymbolId a, SymbolId b) const { return tab.textLess(a, b); }
    bool operator()(const SymbolPair& a, const SymbolPair& b) const {
        if (a.first != b.first)
            return tab.textLess(a.first, b.first);
        return tab.textLess(a.second, b.second);
    }
    bool operator()(const Route& a, const Route& b) const {
        if (a.from != b.from)
            return tab.textLess(a.from, b.from);
        if (a.to != b.to)
            return tab.textLess(a.to, b.to);
        if (a.mean != b.mean)
            return tab.textLess(a.mean, b.mean);
        return a.distance < b.distance;
    }
};

template <typename T>
void sortUnique(std::vector<T>& v, const SymbolTable& tab) {
    std::sort(v.begin(), v.end(), TextOrder{tab});
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

} // namespace

void FactSet::normalize() {
    sortUnique(countries, symbols);
    sortUnique(productionLocs, symbols);
    sortUnique(warehouseLocs, symbols);
    sortUnique(locatedIn, symbols);
    sortUnique(transportMeans, symbols);
    sortUnique(transportMeanAtSite, symbols);
    sortUnique(parts, symbols);
    sortUnique(canTransport, symbols);
    sortUnique(partProduceableAt, symbols);
    sortUnique(transportRoutes, symbols);
    sortUnique(productionPlan, symbols);
}

std::size_t FactSet::totalFacts() const {
    return countries.size() + productionLocs.size() + warehouseLocs.size() + locatedIn.size() +
           transportMeans.size() + transportMeanAtSite.size() + parts.size() + canTransport.size() +
           partProduceableAt.size() + transportRoutes.size() + productionPlan.size();
}

FactSet parse_fact_file(std::string_view text) {
    FactSet facts;
    int lineNo = 0;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        std::size_t end = text.find('\n', begin);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(begin, end - begin);
        begin = end + 1;
        ++lineNo;
        if (begin > text.size() && line.empty())
            break;

        if (auto comment = line.find('%'); comment != std::string_view::npos)
            line = line.substr(0, comment);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);

        LineParser p(line, lineNo);
        if (p.atEnd())
            continue;

        std::string_view pred = p.token();
        p.expect('(');
        std::vector<std::string_view> args;
        args.push_back(p.token());
        while (true) {
            p.skipWs();
            if (p.pos < line.size() && line[p.pos] == ',') {
                ++p.pos;
                args.push_back(p.token());
            } else {
                break;
            }
        }
        p.expect(')');
        p.expect('.');
        if (!p.atEnd())
            p.fail("trailing characters after '.'");

        auto needArity = [&](std::size_t n) {
            if (args.size() != n)
                p.fail(std::string(pred) + " expects " + std::to_string(n) + " arguments, got " +
                       std::to_string(args.size()));
        };

        if (pred == "country") {
            needArity(1);
            facts.countries.push_back(internArg(facts, args[0], p));
        } else if (pred == "productionLoc") {
            needArity(1);
            facts.productionLocs.push_back(internArg(facts, args[0], p));
        } else if (pred == "warehouseLoc") {
            needArity(1);
            facts.warehouseLocs.push_back(internArg(facts, args[0], p));
        } else if (pred == "locatedIn") {
            needArity(2);
            facts.locatedIn.emplace_back(internArg(facts, args[0], p), internArg(facts, args[1], p));
        } else if (pred == "transportMean") {
            needArity(1);
            facts.transportMeans.push_back(internArg(facts, args[0], p));
        } else if (pred == "transportMeanAtSite") {
            needArity(2);
            facts.transportMeanAtSite.emplace_back(internArg(facts, args[0], p),
                                                   internArg(facts, args[1], p));
        } else if (pred == "part") {
            needArity(1);
            facts.parts.push_back(internArg(facts, args[0], p));
        } else if (pred == "canTransport") {
            needArity(2);
            facts.canTransport.emplace_back(internArg(facts, args[0], p),
                                            internArg(facts, args[1], p));
        } else if (pred == "partProduceableAt") {
            needArity(2);
            facts.partProduceableAt.emplace_back(internArg(facts, args[0], p),
                                                 internArg(facts, args[1], p));
        } else if (pred == "transportRoute") {
            needArity(4);
            Route r;
            r.from = internArg(facts, args[0], p);
            r.to = internArg(facts, args[1], p);
            r.mean = internArg(facts, args[2], p);
            r.distance = parseDistance(args[3], p);
            facts.transportRoutes.push_back(r);
        } else if (pred == "productionPlan") {
            needArity(2);
            facts.productionPlan.emplace_back(internArg(facts, args[0], p),
                                              internArg(facts, args[1], p));
        } else {
            p.fail("unknown predicate '" + std::string(pred) + "'");
        }
    }
    facts.normalize();
    return facts;
}

FactSet parse_fact_file(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_fact_file(std::string_view(buf.str()));
}

FactSet load_fact_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open fact file: " + path);
    return parse_fact_file(in);
}

std::string serialize_facts(const FactSet& f) {
    std::ostringstream out;
    const SymbolTable& t = f.symbols;
    auto unary = [&](const char* pred, const std::vector<SymbolId>& rel) {
        for (SymbolId s : rel)
            out << pred << '(' << t.text(s) << ").\n";
    };
    auto binary = [&](const char* pred, const std::vector<SymbolPair>& rel) {
        for (const auto& [a, b] : rel)
            out << pred << '(' << t.text(a) << ',' << t.text(b) << ").\n";
    };
    unary("country", f.countries);
    unary("productionLoc", f.productionLocs);
    unary("warehouseLoc", f.warehouseLocs);
    binary("locatedIn", f.locatedIn);
    unary("transportMean", f.transportMeans);
    binary("transportMeanAtSite", f.transportMeanAtSite);
    unary("part", f.parts);
    binary("canTransport", f.canTransport);
    binary("partProduceableAt", f.partProduceableAt);
    for (const Route& r : f.transportRoutes)
        out << "transportRoute(" << t.text(r.from) << ',' << t.text(r.to) << ',' << t.text(r.mean)
            << ',' << r.distance << ").\n";
    binary("productionPlan", f.productionPlan);
    return out.str();
}

std::vector<std::pair<std::string, std::size_t>> fact_counts(const FactSet& f) {
    return {
        {"country", f.countries.size()},
        {"productionLoc", f.productionLocs.size()},
        {"warehouseLoc", f.warehouseLocs.size()},
        {"locatedIn", f.locatedIn.size()},
        {"transportMean", f.transportMeans.size()},
        {"transportMeanAtSite", f.transportMeanAtSite.size()},
        {"part", f.parts.size()},
        {"canTransport", f.canTransport.size()},
        {"partProduceableAt", f.partProduceableAt.size()},
        {"transportRoute", f.transportRoutes.size()},
        {"productionPlan", f.productionPlan.size()},
    };
}

} // namespace logicfg::kb
