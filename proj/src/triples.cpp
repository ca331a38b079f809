#include "logicfg/triples.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "logicfg/errors.hpp"

namespace logicfg::kb {

namespace {

// Vocabulary of the ingestion mapping. Class names are objects of `type`.
constexpr std::string_view kType = "type";
constexpr std::string_view kIsLocatedIn = "is_located_in";
constexpr std::string_view kHasTerminal = "has_terminal";
constexpr std::string_view kCanHandle = "can_handle";
constexpr std::string_view kMeanAtSite = "transport_mean_at_site";
constexpr std::string_view kCanTransport = "can_transport";
constexpr std::string_view kIsTransportedBy = "is_transported_by";
constexpr std::string_view kHasLocation = "has_location";
constexpr std::string_view kCanProduce = "can_produce";
constexpr std::string_view kHasSource = "has_source";
constexpr std::string_view kHasDestination = "has_destination";
constexpr std::string_view kHasTransportMean = "has_transport_mean";
constexpr std::string_view kDistance = "distance";
constexpr std::string_view kHasPart = "has_part";

constexpr std::string_view kClassCountry = "Country";
constexpr std::string_view kClassProductionLoc = "ProductionLocation";
constexpr std::string_view kClassWarehouseLoc = "WarehouseLocation";
constexpr std::string_view kClassTransportRes = "TransportationResource";
constexpr std::string_view kClassProduct = "Product";
constexpr std::string_view kClassRoute = "Route";

bool isIntegerToken(std::string_view tok) {
    std::size_t i = tok.size() > 0 && tok[0] == '-' ? 1 : 0;
    if (i == tok.size())
        return false;
    for (; i < tok.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(tok[i])))
            return false;
    return true;
}

std::int64_t toInteger(std::string_view tok) {
    std::int64_t v = 0;
    std::size_t i = tok[0] == '-' ? 1 : 0;
    for (; i < tok.size(); ++i)
        v = v * 10 + (tok[i] - '0');
    return tok[0] == '-' ? -v : v;
}

struct TripleOrder {
    const SymbolTable& tab;

    // Numbers sort after symbols within one (subject, predicate) group.
    bool objectLess(const TripleObject& a, const TripleObject& b) const {
        if (a.kind != b.kind)
            return a.isSymbol();
        if (a.isSymbol())
            return tab.textLess(a.sym, b.sym);
        return a.number < b.number;
    }

    bool operator()(const Triple& a, const Triple& b) const {
        if (a.subject != b.subject)
            return tab.textLess(a.subject, b.subject);
        if (a.predicate != b.predicate)
            return tab.textLess(a.predicate, b.predicate);
        return objectLess(a.object, b.object);
    }
};

// Per-subject view of the composite-forming predicates.
struct NodeProps {
    std::vector<SymbolId> sources, destinations, means;
    std::vector<std::int64_t> distances;
    bool distanceWasSymbol = false;
    std::vector<SymbolId> produceLocations, producedParts;
    bool typedRoute = false;

    bool looksLikeRoute() const {
        return typedRoute || !sources.empty() || !destinations.empty() || !means.empty() ||
               !distances.empty() || distanceWasSymbol;
    }
};

struct KgView {
    const TripleSet& kg;
    std::unordered_map<SymbolId, std::vector<SymbolId>> classMembers; // class -> instances
    std::map<SymbolId, NodeProps> nodes; // ordered for deterministic error reporting

    explicit KgView(const TripleSet& k) : kg(k) {
        auto pred = [&](std::string_view name) { return kg.symbols.find(name); };
        auto typeId = pred(kType);
        auto routeClass = kg.symbols.find(kClassRoute);
        for (const Triple& t : kg.triples) {
            const std::string& p = kg.symbols.text(t.predicate);
            if (typeId && t.predicate == *typeId && t.object.isSymbol()) {
                classMembers[t.object.sym].push_back(t.subject);
                if (routeClass && t.object.sym == *routeClass)
                    nodes[t.subject].typedRoute = true;
            } else if (p == kHasSource && t.object.isSymbol()) {
                nodes[t.subject].sources.push_back(t.object.sym);
            } else if (p == kHasDestination && t.object.isSymbol()) {
                nodes[t.subject].destinations.push_back(t.object.sym);
            } else if (p == kHasTransportMean && t.object.isSymbol()) {
                nodes[t.subject].means.push_back(t.object.sym);
            } else if (p == kDistance) {
                if (t.object.isNumber())
                    nodes[t.subject].distances.push_back(t.object.number);
                else
                    nodes[t.subject].distanceWasSymbol = true;
            } else if (p == kHasLocation && t.object.isSymbol()) {
                nodes[t.subject].produceLocations.push_back(t.object.sym);
            } else if (p == kCanProduce && t.object.isSymbol()) {
                nodes[t.subject].producedParts.push_back(t.object.sym);
            }
        }
    }

    const std::vector<SymbolId>* membersOf(std::string_view className) const {
        auto id = kg.symbols.find(className);
        if (!id)
            return nullptr;
        auto it = classMembers.find(*id);
        return it == classMembers.end() ? nullptr : &it->second;
    }
};

} // namespace

void TripleSet::normalize() {
    std::sort(triples.begin(), triples.end(), TripleOrder{symbols});
    triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
}

TripleSet parse_triple_file(std::string_view text) {
    TripleSet kg;
    int lineNo = 0;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        std::size_t end = text.find('\n', begin);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(begin, end - begin);
        bool lastChunk = end == text.size();
        begin = end + 1;
        ++lineNo;
        if (lastChunk && line.empty())
            break;

        if (auto comment = line.find('%'); comment != std::string_view::npos)
            line = line.substr(0, comment);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);

        std::vector<std::string_view> toks;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
                ++i;
            std::size_t start = i;
            while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
                ++i;
            if (i > start)
                toks.push_back(line.substr(start, i - start));
        }
        if (toks.empty())
            continue;
        if (toks.size() != 3)
            throw ParseError(lineNo, "expected `subject predicate object`, got " +
                                         std::to_string(toks.size()) + " fields");
        if (isIntegerToken(toks[0]))
            throw ParseError(lineNo, "subject must be a symbol, got '" + std::string(toks[0]) + "'");
        if (isIntegerToken(toks[1]))
            throw ParseError(lineNo,
                             "predicate must be a symbol, got '" + std::string(toks[1]) + "'");

        Triple t;
        t.subject = kg.symbols.intern(toks[0]);
        t.predicate = kg.symbols.intern(toks[1]);
        if (isIntegerToken(toks[2]))
            t.object = TripleObject::integer(toInteger(toks[2]));
        else
            t.object = TripleObject::symbol(kg.symbols.intern(toks[2]));
        kg.triples.push_back(t);
    }
    kg.normalize();
    return kg;
}

TripleSet parse_triple_file(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_triple_file(std::string_view(buf.str()));
}

TripleSet load_triple_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open triple file: " + path);
    return parse_triple_file(in);
}

std::string serialize_triples(const TripleSet& kg) {
    std::ostringstream out;
    for (const Triple& t : kg.triples) {
        out << kg.symbols.text(t.subject) << ' ' << kg.symbols.text(t.predicate) << ' ';
        if (t.object.isSymbol())
            out << kg.symbols.text(t.object.sym);
        else
            out << t.object.number;
        out << '\n';
    }
    return out.str();
}

TripleSet materialize_inverses(const TripleSet& kg) {
    TripleSet out = kg;
    auto canTransport = out.symbols.find(kCanTransport);
    if (canTransport) {
        SymbolId inverse = out.symbols.intern(kIsTransportedBy);
        std::size_t n = out.triples.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Triple& t = out.triples[i];
            if (t.predicate == *canTransport && t.object.isSymbol())
                out.triples.push_back({t.object.sym, inverse, TripleObject::symbol(t.subject)});
        }
    }
    out.normalize();
    return out;
}

FactSet kg_to_facts(const TripleSet& kg) {
    KgView view(kg);
    FactSet f;
    auto intern = [&](SymbolId s) { return f.symbols.intern(kg.symbols.text(s)); };

    auto copyClass = [&](std::string_view className, std::vector<SymbolId>& rel) {
        if (const auto* members = view.membersOf(className))
            for (SymbolId m : *members)
                rel.push_back(intern(m));
    };
    copyClass(kClassCountry, f.countries);
    copyClass(kClassProductionLoc, f.productionLocs);
    copyClass(kClassWarehouseLoc, f.warehouseLocs);
    copyClass(kClassTransportRes, f.transportMeans);
    copyClass(kClassProduct, f.parts);

    // Terminal join: has_terminal(loc, t) + can_handle(t, mean).
    std::unordered_map<SymbolId, std::vector<SymbolId>> handledBy; // terminal -> means
    for (const Triple& t : kg.triples) {
        if (kg.symbols.text(t.predicate) == kCanHandle && t.object.isSymbol())
            handledBy[t.subject].push_back(t.object.sym);
    }

    for (const Triple& t : kg.triples) {
        const std::string& p = kg.symbols.text(t.predicate);
        if (p == kIsLocatedIn) {
            if (!t.object.isSymbol())
                throw KgError("is_located_in object of " + kg.symbols.text(t.subject) +
                              " must be a symbol");
            f.locatedIn.emplace_back(intern(t.subject), intern(t.object.sym));
        } else if (p == kHasTerminal && t.object.isSymbol()) {
            if (auto it = handledBy.find(t.object.sym); it != handledBy.end())
                for (SymbolId mean : it->second)
                    f.transportMeanAtSite.emplace_back(intern(t.subject), intern(mean));
        } else if (p == kMeanAtSite) {
            if (!t.object.isSymbol())
                throw KgError("transport_mean_at_site object of " + kg.symbols.text(t.subject) +
                              " must be a symbol");
            f.transportMeanAtSite.emplace_back(intern(t.subject), intern(t.object.sym));
        } else if (p == kCanTransport) {
            if (!t.object.isSymbol())
                throw KgError("can_transport object of " + kg.symbols.text(t.subject) +
                              " must be a symbol");
            f.canTransport.emplace_back(intern(t.subject), intern(t.object.sym));
        } else if (p == kIsTransportedBy && t.object.isSymbol()) {
            f.canTransport.emplace_back(intern(t.object.sym), intern(t.subject));
        } else if (p == kHasPart) {
            if (!t.object.isSymbol())
                throw KgError("has_part object of " + kg.symbols.text(t.subject) +
                              " must be a symbol");
            f.productionPlan.emplace_back(intern(t.subject), intern(t.object.sym));
        }
    }

    for (const auto& [node, props] : view.nodes) {
        const std::string& name = kg.symbols.text(node);
        if (!props.producedParts.empty() || !props.produceLocations.empty()) {
            if (props.producedParts.empty())
                throw KgError("production resource " + name + ": missing can_produce");
            if (props.produceLocations.empty())
                throw KgError("production resource " + name + ": missing has_location");
            for (SymbolId part : props.producedParts)
                for (SymbolId loc : props.produceLocations)
                    f.partProduceableAt.emplace_back(intern(part), intern(loc));
        }
        if (props.looksLikeRoute()) {
            auto exactlyOne = [&](const auto& v, const char* what) {
                if (v.empty())
                    throw KgError("route " + name + ": missing " + what);
                if (v.size() > 1)
                    throw KgError("route " + name + ": multiple " + what + " values");
            };
            exactlyOne(props.sources, kHasSource.data());
            exactlyOne(props.destinations, kHasDestination.data());
            exactlyOne(props.means, kHasTransportMean.data());
            if (props.distanceWasSymbol)
                throw KgError("route " + name + ": distance must be an integer");
            exactlyOne(props.distances, kDistance.data());
            Route r;
            r.from = intern(props.sources[0]);
            r.to = intern(props.destinations[0]);
            r.mean = intern(props.means[0]);
            r.distance = props.distances[0];
            f.transportRoutes.push_back(r);
        }
    }

    f.normalize();
    return f;
}

std::vector<ShapeViolation> shape_check(const TripleSet& kg) {
    KgView view(kg);
    std::vector<ShapeViolation> out;
    auto add = [&](SymbolId subject, std::string message) {
        out.push_back({kg.symbols.text(subject), std::move(message)});
    };

    // Every location names exactly one country.
    std::unordered_map<SymbolId, int> countryCount;
    for (const Triple& t : kg.triples)
        if (kg.symbols.text(t.predicate) == kIsLocatedIn && t.object.isSymbol())
            ++countryCount[t.subject];
    auto checkLocations = [&](std::string_view className) {
        if (const auto* members = view.membersOf(className))
            for (SymbolId loc : *members) {
                auto it = countryCount.find(loc);
                if (it == countryCount.end())
                    add(loc, "missing country");
                else if (it->second > 1)
                    add(loc, "multiple countries");
            }
    };
    checkLocations(kClassProductionLoc);
    checkLocations(kClassWarehouseLoc);

    // Route nodes are complete and carry a nonnegative integer distance.
    for (const auto& [node, props] : view.nodes) {
        if (!props.looksLikeRoute())
            continue;
        auto exactlyOne = [&](const auto& v, const char* what) {
            if (v.empty())
                add(node, std::string("missing ") + what);
            else if (v.size() > 1)
                add(node, std::string("multiple ") + what + " values");
        };
        exactlyOne(props.sources, "source");
        exactlyOne(props.destinations, "destination");
        exactlyOne(props.means, "transport mean");
        if (props.distanceWasSymbol) {
            add(node, "non-integer distance");
        } else if (props.distances.empty()) {
            add(node, "missing distance");
        } else if (props.distances.size() > 1) {
            add(node, "multiple distance values");
        } else if (props.distances[0] < 0) {
            add(node, "negative distance");
        }
    }

    // has_part may only reference declared products.
    std::unordered_set<SymbolId> products;
    if (const auto* members = view.membersOf(kClassProduct))
        products.insert(members->begin(), members->end());
    for (const Triple& t : kg.triples) {
        if (kg.symbols.text(t.predicate) != kHasPart)
            continue;
        if (!products.count(t.subject))
            add(t.subject, "undeclared product");
        if (t.object.isSymbol() && !products.count(t.object.sym))
            add(t.object.sym, "undeclared product");
    }

    std::sort(out.begin(), out.end(), [](const ShapeViolation& a, const ShapeViolation& b) {
        return a.subject != b.subject ? a.subject < b.subject : a.message < b.message;
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace logicfg::kb
