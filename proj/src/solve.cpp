#include "logicfg/solve.hpp"

#include "logicfg/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <memory>
#include <numeric>
#include <set>
#include <thread>

namespace logicfg::solve {
namespace {

using ground::EncodingVariant;
using ground::RouteCandidate;

// Headroom under int64 so bound sums never overflow.
constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

// Cheapest-first total order within one (part, from, to) group: distance,
// then fewest legs, then means and vias by text. The minimum is invariant
// under path dedup, which only drops non-minimal members of tie groups.
struct PathLess {
    const SymbolTable* syms;
    bool operator()(const RouteCandidate& a, const RouteCandidate& b) const {
        if (a.distance != b.distance)
            return a.distance < b.distance;
        if (a.viaCount != b.viaCount)
            return a.viaCount < b.viaCount;
        for (int i = 0; i <= a.viaCount; ++i)
            if (a.means[i] != b.means[i])
                return syms->textLess(a.means[i], b.means[i]);
        for (int i = 0; i < a.viaCount; ++i)
            if (a.vias[i] != b.vias[i])
                return syms->textLess(a.vias[i], b.vias[i]);
        return false;
    }
};

bool sameDistanceAndMeans(const RouteCandidate& a, const RouteCandidate& b) {
    if (a.distance != b.distance || a.viaCount != b.viaCount)
        return false;
    for (int i = 0; i <= a.viaCount; ++i)
        if (a.means[i] != b.means[i])
            return false;
    return true;
}

// Stable per-grounding stream for seed permutation, independent of the order
// in which groundings get materialized.
std::uint64_t mixKey(std::uint64_t seed, SymbolId a, SymbolId b, SymbolId c) {
    SplitMix64 r{seed};
    r.state ^= r.next() + a.value;
    r.state ^= r.next() + b.value;
    r.state ^= r.next() + c.value;
    return r.next();
}

std::vector<RouteCandidate> collectCandidates(const Problem& pb, SymbolId part, SymbolId from,
                                              SymbolId to) {
    std::vector<RouteCandidate> out;
    ground::for_each_candidate(*pb.facts, pb.index, part, from, to, pb.config.variant,
                               [&](const RouteCandidate& c) { out.push_back(c); });
    std::sort(out.begin(), out.end(), PathLess{&pb.facts->symbols});
    if (pb.config.dedupPaths)
        out.erase(std::unique(out.begin(), out.end(), sameDistanceAndMeans), out.end());
    return out;
}

template <class F>
void forEachSite(const SiteChoice& s, F f) {
    for (int k = 0; k < 2; ++k)
        if (s[k].valid())
            f(s[k]);
}

using GroundKey = std::array<std::uint32_t, 3>;

GroundKey groundKey(SymbolId part, SymbolId from, SymbolId to) {
    return {part.value, from.value, to.value};
}

void appendRootPaths(const Problem& pb, const std::vector<SiteChoice>& chosen, Model& m) {
    if (!pb.rootIdx || *pb.rootIdx >= chosen.size())
        return;
    SymbolId root = pb.parts[*pb.rootIdx];
    forEachSite(chosen[*pb.rootIdx], [&](SymbolId site) {
        RouteCandidate c;
        c.part = root;
        c.from = site;
        c.to = site;
        c.means[0] = kIntraSite;
        c.viaCount = 0;
        c.distance = 0;
        m.paths.push_back({root, site, site, c, true});
    });
}

void finalizeModel(const Problem& pb, Model& m) {
    const SymbolTable& syms = pb.facts->symbols;
    std::sort(m.paths.begin(), m.paths.end(), [&](const ModelPath& a, const ModelPath& b) {
        if (a.part != b.part)
            return syms.textLess(a.part, b.part);
        if (a.from != b.from)
            return syms.textLess(a.from, b.from);
        return syms.textLess(a.to, b.to);
    });
    m.totalDistance = 0;
    m.legCount = 0;
    for (const ModelPath& p : m.paths) {
        m.totalDistance += p.cand.distance;
        if (!p.isRoot)
            m.legCount += p.cand.legCount();
    }
}

struct Deadline {
    std::optional<std::chrono::steady_clock::time_point> at;

    static Deadline from(const SolveConfig& config) {
        Deadline d;
        if (config.timeout)
            d.at = std::chrono::steady_clock::now() + *config.timeout;
        return d;
    }
    bool expired() const { return at && std::chrono::steady_clock::now() >= *at; }
};

// Incremental coverage bookkeeping: which production locations already
// produce something, and whether the unassigned parts can still plug every
// remaining hole.
class CoverageTracker {
public:
    explicit CoverageTracker(const Problem& pb) {
        locs_ = pb.facts->productionLocs;
        for (std::size_t i = 0; i < locs_.size(); ++i)
            idx_.emplace(locs_[i], static_cast<int>(i));
        cover_.assign(locs_.size(), 0);
        remainingWith_.assign(locs_.size(), 0);
        domProd_.resize(pb.parts.size());
        for (std::size_t p = 0; p < pb.parts.size(); ++p)
            for (SymbolId s : pb.domains[p]) {
                auto it = idx_.find(s);
                if (it != idx_.end()) {
                    domProd_[p].push_back(it->second);
                    ++remainingWith_[it->second];
                }
            }
        uncovered_ = static_cast<int>(locs_.size());
        remainingParts_ = static_cast<int>(pb.parts.size());
        capacity_ = pb.config.sourcing == Sourcing::Double ? 2 : 1;
    }

    void apply(std::size_t part, const SiteChoice& choice) {
        --remainingParts_;
        for (int l : domProd_[part])
            --remainingWith_[l];
        forEachProd(choice, [&](int l) {
            if (++cover_[l] == 1)
                --uncovered_;
        });
    }

    void undo(std::size_t part, const SiteChoice& choice) {
        ++remainingParts_;
        for (int l : domProd_[part])
            ++remainingWith_[l];
        forEachProd(choice, [&](int l) {
            if (--cover_[l] == 0)
                ++uncovered_;
        });
    }

    // False once a hole can no longer be filled: an uncovered location out of
    // every remaining domain, or more holes than remaining parts can cover.
    bool viable() const {
        if (uncovered_ > remainingParts_ * capacity_)
            return false;
        for (std::size_t i = 0; i < locs_.size(); ++i)
            if (cover_[i] == 0 && remainingWith_[i] == 0)
                return false;
        return true;
    }

    bool complete() const { return uncovered_ == 0; }

private:
    template <class F>
    void forEachProd(const SiteChoice& c, F f) {
        forEachSite(c, [&](SymbolId s) {
            auto it = idx_.find(s);
            if (it != idx_.end())
                f(it->second);
        });
    }

    std::vector<SymbolId> locs_;
    std::unordered_map<SymbolId, int> idx_;
    std::vector<int> cover_, remainingWith_;
    std::vector<std::vector<int>> domProd_;
    int uncovered_ = 0, remainingParts_ = 0, capacity_ = 1;
};

class Enumerator {
public:
    Enumerator(const Problem& pb, const EnumerateOptions& opt,
               const std::function<bool(const Model&)>& emit)
        : pb_(pb), opt_(opt), emit_(emit), cov_(pb), deadline_(Deadline::from(pb.config)) {
        valueOrder_.resize(pb.parts.size());
        SplitMix64 rng{pb.config.seed};
        for (std::size_t i = 0; i < pb.parts.size(); ++i) {
            valueOrder_[i].resize(pb.choiceValues[i].size());
            std::iota(valueOrder_[i].begin(), valueOrder_[i].end(), std::size_t{0});
            if (pb.config.seed != 0)
                shuffle_in_place(valueOrder_[i], rng);
        }
        chosen_.resize(pb.parts.size());
    }

    EnumerateStats run() {
        if (!pb_.infeasible)
            assign(0);
        return stats_;
    }

private:
    bool tick() {
        if ((stats_.nodesExpanded++ & 1023u) == 0 && deadline_.expired()) {
            stats_.timedOut = true;
            stopped_ = true;
        }
        return !stopped_;
    }

    void assign(std::size_t level) {
        if (!tick())
            return;
        if (level == pb_.parts.size()) {
            if (cov_.complete())
                leaf();
            return;
        }
        for (std::size_t vi : valueOrder_[level]) {
            const SiteChoice& val = pb_.choiceValues[level][vi];
            chosen_[level] = val;
            cov_.apply(level, val);
            if (cov_.viable())
                assign(level + 1);
            cov_.undo(level, val);
            if (stopped_)
                return;
        }
    }

    // A part below two supers on the same site yields one shared grounding,
    // so keys are deduplicated across edges.
    void leaf() {
        groundKeys_.clear();
        groundLists_.clear();
        std::set<GroundKey> seen;
        for (const PlanEdge& edge : pb_.edges) {
            bool dead = false;
            forEachSite(chosen_[edge.partIdx], [&](SymbolId f) {
                forEachSite(chosen_[edge.superIdx], [&](SymbolId t) {
                    if (dead || !seen.insert(groundKey(edge.part, f, t)).second)
                        return;
                    const auto& list = lists(edge.part, f, t);
                    if (list.empty()) {
                        dead = true;
                        return;
                    }
                    groundKeys_.push_back({edge.part, f, t});
                    groundLists_.push_back(&list);
                });
            });
            if (dead)
                return;
        }
        pick_.assign(groundKeys_.size(), 0);
        product(0);
    }

    void product(std::size_t g) {
        if (!tick())
            return;
        if (g == groundKeys_.size()) {
            emitModel();
            return;
        }
        for (std::size_t ci = 0; ci < groundLists_[g]->size(); ++ci) {
            pick_[g] = ci;
            product(g + 1);
            if (stopped_)
                return;
        }
    }

    void emitModel() {
        Model m;
        m.sites = chosen_;
        for (std::size_t g = 0; g < groundKeys_.size(); ++g) {
            const Grounding& k = groundKeys_[g];
            m.paths.push_back({k.part, k.from, k.to, (*groundLists_[g])[pick_[g]], false});
        }
        appendRootPaths(pb_, chosen_, m);
        finalizeModel(pb_, m);
        ++stats_.emitted;
        if (!emit_(m)) {
            stats_.truncated = true;
            stopped_ = true;
            return;
        }
        if (opt_.limit && stats_.emitted >= opt_.limit) {
            stats_.truncated = true;
            stopped_ = true;
        }
    }

    const std::vector<RouteCandidate>& lists(SymbolId part, SymbolId f, SymbolId t) {
        GroundKey key = groundKey(part, f, t);
        auto it = cache_.find(key);
        if (it != cache_.end())
            return it->second;
        auto list = collectCandidates(pb_, part, f, t);
        if (pb_.config.seed != 0) {
            SplitMix64 rng{mixKey(pb_.config.seed, part, f, t)};
            shuffle_in_place(list, rng);
        }
        return cache_.emplace(key, std::move(list)).first->second;
    }

    struct Grounding {
        SymbolId part, from, to;
    };

    const Problem& pb_;
    EnumerateOptions opt_;
    const std::function<bool(const Model&)>& emit_;
    CoverageTracker cov_;
    Deadline deadline_;
    EnumerateStats stats_;
    bool stopped_ = false;
    std::vector<std::vector<std::size_t>> valueOrder_;
    std::vector<SiteChoice> chosen_;
    std::vector<Grounding> groundKeys_;
    std::vector<const std::vector<RouteCandidate>*> groundLists_;
    std::vector<std::size_t> pick_;
    std::map<GroundKey, std::vector<RouteCandidate>> cache_;
};

// Full assignment scored on every grounding's cheapest candidate.
Model cheapestModel(const Problem& pb, const std::vector<SiteChoice>& chosen) {
    Model m;
    m.sites = chosen;
    std::set<GroundKey> seen;
    for (std::size_t e = 0; e < pb.edges.size(); ++e) {
        const PlanEdge& edge = pb.edges[e];
        forEachSite(chosen[edge.partIdx], [&](SymbolId f) {
            forEachSite(chosen[edge.superIdx], [&](SymbolId t) {
                if (!seen.insert(groundKey(edge.part, f, t)).second)
                    return;
                const RouteCandidate& c = pb.edgeInfos[e].cheapest.at(packPair(f, t));
                m.paths.push_back({edge.part, f, t, c, false});
            });
        });
    }
    appendRootPaths(pb, chosen, m);
    finalizeModel(pb, m);
    return m;
}

// Branch and bound over assignments. Decided edges contribute the exact sum
// of their groundings' cheapest candidates (groundings shared between edges
// counted once); undecided edges contribute an admissible per-edge minimum.
class Optimizer {
public:
    Optimizer(const Problem& pb, std::atomic<std::int64_t>& best, Deadline deadline)
        : pb_(pb), best_(best), deadline_(deadline), cov_(pb) {
        chosen_.resize(pb.parts.size());
        decidedAt_.resize(pb.parts.size());
        std::vector<int> edgesPerPart(pb.parts.size(), 0);
        for (const PlanEdge& e : pb.edges)
            ++edgesPerPart[e.partIdx];
        bool overlapPossible = false;
        for (int n : edgesPerPart)
            overlapPossible |= n > 1;
        std::int64_t multiplier = pb.config.sourcing == Sourcing::Double ? 4 : 1;
        edgeTerm_.resize(pb.edges.size(), 0);
        // An edge without any candidate pair marks the problem infeasible, so
        // here every minPairCost is finite.
        if (!pb.infeasible)
            for (std::size_t e = 0; e < pb.edges.size(); ++e) {
                const PlanEdge& ed = pb.edges[e];
                decidedAt_[std::max(ed.superIdx, ed.partIdx)].push_back(e);
                std::int64_t term = multiplier * pb.edgeInfos[e].minPairCost;
                if (overlapPossible)
                    term = std::min<std::int64_t>(term, 0);
                edgeTerm_[e] = term;
                undecidedBound_ += term;
            }
    }

    void run(std::size_t offset, std::size_t stride) {
        offset_ = offset;
        stride_ = stride;
        if (!pb_.infeasible)
            assign(0);
    }

    std::uint64_t nodes() const { return nodes_; }
    bool timedOut() const { return timedOut_; }
    std::int64_t localCost() const { return localCost_; }
    const std::string& localKey() const { return localKey_; }
    std::optional<Model> takeModel() { return std::move(localModel_); }

private:
    bool tick() {
        if ((nodes_++ & 1023u) == 0 && deadline_.expired()) {
            timedOut_ = true;
            stop_ = true;
        }
        return !stop_;
    }

    void assign(std::size_t level) {
        if (!tick())
            return;
        if (level == pb_.parts.size()) {
            if (cov_.complete())
                leaf();
            return;
        }
        const auto& vals = pb_.choiceValues[level];
        std::size_t start = level == 0 ? offset_ : 0;
        std::size_t step = level == 0 ? stride_ : 1;
        for (std::size_t vi = start; vi < vals.size(); vi += step) {
            const SiteChoice& val = vals[vi];
            chosen_[level] = val;
            cov_.apply(level, val);
            bool ok = cov_.viable();
            std::size_t applied = 0;
            if (ok)
                for (std::size_t e : decidedAt_[level]) {
                    ++applied;
                    if (!decideEdge(e)) {
                        ok = false;
                        break;
                    }
                }
            if (ok && fixedCost_ + undecidedBound_ <= best_.load(std::memory_order_relaxed))
                assign(level + 1);
            while (applied-- > 0)
                undecideEdge();
            cov_.undo(level, val);
            if (stop_)
                return;
        }
    }

    bool decideEdge(std::size_t e) {
        const PlanEdge& ed = pb_.edges[e];
        const EdgeInfo& info = pb_.edgeInfos[e];
        edgeLog_.push_back({e, pairLog_.size()});
        undecidedBound_ -= edgeTerm_[e];
        bool ok = true;
        forEachSite(chosen_[ed.partIdx], [&](SymbolId f) {
            forEachSite(chosen_[ed.superIdx], [&](SymbolId t) {
                if (!ok)
                    return;
                auto it = info.cheapest.find(packPair(f, t));
                if (it == info.cheapest.end()) {
                    ok = false; // this grounding has no path at all
                    return;
                }
                GroundKey key = groundKey(ed.part, f, t);
                int& cnt = counts_[key];
                bool isNew = cnt++ == 0;
                if (isNew)
                    fixedCost_ += it->second.distance;
                pairLog_.push_back({key, it->second.distance, isNew});
            });
        });
        return ok;
    }

    void undecideEdge() {
        auto [e, mark] = edgeLog_.back();
        edgeLog_.pop_back();
        while (pairLog_.size() > mark) {
            const PairLog& p = pairLog_.back();
            auto it = counts_.find(p.key);
            if (--it->second == 0) {
                counts_.erase(it);
                if (p.wasNew)
                    fixedCost_ -= p.cost;
            }
            pairLog_.pop_back();
        }
        undecidedBound_ += edgeTerm_[e];
    }

    void leaf() {
        std::int64_t cost = fixedCost_;
        std::int64_t cur = best_.load(std::memory_order_relaxed);
        if (cost > cur)
            return;
        Model m = cheapestModel(pb_, chosen_);
        std::string key = model_key(pb_, m);
        if (cost < localCost_ || (cost == localCost_ && key < localKey_)) {
            localCost_ = cost;
            localKey_ = std::move(key);
            localModel_ = std::move(m);
        }
        while (cost < cur && !best_.compare_exchange_weak(cur, cost)) {
        }
    }

    struct PairLog {
        GroundKey key;
        std::int64_t cost;
        bool wasNew;
    };
    struct EdgeLog {
        std::size_t edge;
        std::size_t mark;
    };

    const Problem& pb_;
    std::atomic<std::int64_t>& best_;
    Deadline deadline_;
    CoverageTracker cov_;
    std::vector<SiteChoice> chosen_;
    std::vector<std::vector<std::size_t>> decidedAt_;
    std::vector<std::int64_t> edgeTerm_;
    std::map<GroundKey, int> counts_;
    std::vector<PairLog> pairLog_;
    std::vector<EdgeLog> edgeLog_;
    std::int64_t fixedCost_ = 0, undecidedBound_ = 0;
    std::size_t offset_ = 0, stride_ = 1;
    std::uint64_t nodes_ = 0;
    bool stop_ = false, timedOut_ = false;
    std::int64_t localCost_ = kInf;
    std::string localKey_;
    std::optional<Model> localModel_;
};

bool countriesDisjoint(const std::vector<SymbolId>& a, const std::vector<SymbolId>& b) {
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia == *ib)
            return false;
        if (*ia < *ib)
            ++ia;
        else
            ++ib;
    }
    return true;
}

} // namespace

Problem build_problem(const kb::FactSet& facts, const SolveConfig& config) {
    Problem pb;
    pb.facts = &facts;
    pb.config = config;
    pb.db = ground::derive_all(facts);
    pb.index = ground::build_leg_index(facts, pb.db, config.shipMeanName);

    const SymbolTable& syms = facts.symbols;
    auto textLess = [&syms](SymbolId a, SymbolId b) { return syms.textLess(a, b); };

    std::set<SymbolId> declared(facts.parts.begin(), facts.parts.end());
    std::unordered_map<SymbolId, std::vector<SymbolId>> children;
    for (const auto& [super, part] : facts.productionPlan)
        children[super].push_back(part); // normalized input: children stay text sorted

    // Assignment order: root, then plan levels breadth first, then parts
    // outside the plan in text order. Supers thereby precede their parts,
    // which lets the optimizer settle edges as early as possible.
    std::set<SymbolId> visited;
    if (pb.db.root && declared.count(*pb.db.root)) {
        pb.parts.push_back(*pb.db.root);
        visited.insert(*pb.db.root);
        for (std::size_t head = 0; head < pb.parts.size(); ++head) {
            auto it = children.find(pb.parts[head]);
            if (it == children.end())
                continue;
            for (SymbolId ch : it->second)
                if (declared.count(ch) && visited.insert(ch).second)
                    pb.parts.push_back(ch);
        }
    }
    for (SymbolId p : facts.parts)
        if (!visited.count(p))
            pb.parts.push_back(p);

    std::unordered_map<SymbolId, std::size_t> partIdx;
    for (std::size_t i = 0; i < pb.parts.size(); ++i)
        partIdx.emplace(pb.parts[i], i);
    pb.partsByText.resize(pb.parts.size());
    std::iota(pb.partsByText.begin(), pb.partsByText.end(), std::size_t{0});
    std::sort(pb.partsByText.begin(), pb.partsByText.end(),
              [&](std::size_t a, std::size_t b) { return textLess(pb.parts[a], pb.parts[b]); });

    if (pb.db.root) {
        auto it = partIdx.find(*pb.db.root);
        if (it != partIdx.end())
            pb.rootIdx = it->second;
    }

    pb.domains.resize(pb.parts.size());
    for (const auto& [part, loc] : facts.partProduceableAt) {
        auto it = partIdx.find(part);
        if (it != partIdx.end())
            pb.domains[it->second].push_back(loc);
    }
    for (auto& d : pb.domains) {
        std::sort(d.begin(), d.end(), textLess);
        d.erase(std::unique(d.begin(), d.end()), d.end());
    }

    for (const auto& [loc, country] : facts.locatedIn)
        pb.countriesOf[loc].push_back(country);
    for (auto& [loc, cs] : pb.countriesOf) {
        std::sort(cs.begin(), cs.end());
        cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    }

    static const std::vector<SymbolId> kNoCountries;
    auto countries = [&](SymbolId loc) -> const std::vector<SymbolId>& {
        auto it = pb.countriesOf.find(loc);
        return it == pb.countriesOf.end() ? kNoCountries : it->second;
    };

    pb.choiceValues.resize(pb.parts.size());
    for (std::size_t i = 0; i < pb.parts.size(); ++i) {
        const auto& dom = pb.domains[i];
        auto& vals = pb.choiceValues[i];
        if (config.sourcing == Sourcing::Single) {
            for (SymbolId s : dom)
                vals.push_back({s, SymbolId{}});
        } else {
            for (std::size_t a = 0; a + 1 < dom.size(); ++a)
                for (std::size_t b = a + 1; b < dom.size(); ++b)
                    if (countriesDisjoint(countries(dom[a]), countries(dom[b])))
                        vals.push_back({dom[a], dom[b]});
        }
        if (vals.empty() && !pb.infeasible) {
            std::string who = syms.text(pb.parts[i]);
            if (dom.empty())
                pb.infeasible = {pb.parts[i], who + " has no production site"};
            else if (config.sourcing == Sourcing::Double && dom.size() < 2)
                pb.infeasible = {pb.parts[i], who + " needs two sites for double sourcing, has " +
                                                  std::to_string(dom.size())};
            else
                pb.infeasible = {pb.parts[i],
                                 "every site pair for " + who + " shares a country"};
        }
    }

    for (const auto& [super, part] : facts.productionPlan) {
        auto si = partIdx.find(super);
        auto pi = partIdx.find(part);
        if (si == partIdx.end() || pi == partIdx.end())
            continue; // no producedAt atoms for undeclared parts: nothing to ground
        pb.edges.push_back({super, part, si->second, pi->second});
    }
    std::sort(pb.edges.begin(), pb.edges.end(), [&](const PlanEdge& a, const PlanEdge& b) {
        if (a.super != b.super)
            return textLess(a.super, b.super);
        return textLess(a.part, b.part);
    });

    pb.edgeInfos.resize(pb.edges.size());
    PathLess less{&syms};
    for (std::size_t e = 0; e < pb.edges.size(); ++e) {
        const PlanEdge& ed = pb.edges[e];
        EdgeInfo& info = pb.edgeInfos[e];
        info.minPairCost = kInf;
        for (SymbolId f : pb.domains[ed.partIdx])
            for (SymbolId t : pb.domains[ed.superIdx]) {
                std::optional<RouteCandidate> best;
                ground::for_each_candidate(facts, pb.index, ed.part, f, t, config.variant,
                                           [&](const RouteCandidate& c) {
                                               if (!best || less(c, *best))
                                                   best = c;
                                           });
                if (best) {
                    info.cheapest.emplace(packPair(f, t), *best);
                    info.anyPair = true;
                    info.minPairCost = std::min(info.minPairCost, best->distance);
                }
            }
        if (!info.anyPair && !pb.domains[ed.partIdx].empty() &&
            !pb.domains[ed.superIdx].empty() && !pb.infeasible)
            pb.infeasible = {ed.part, "no transport option from any site of " +
                                          syms.text(ed.part) + " to any site of " +
                                          syms.text(ed.super)};
    }
    return pb;
}

EnumerateStats enumerate_models(const Problem& problem, const EnumerateOptions& options,
                                const std::function<bool(const Model&)>& emit) {
    return Enumerator(problem, options, emit).run();
}

EnumerateResult enumerate_models(const Problem& problem, const EnumerateOptions& options) {
    EnumerateResult res;
    EnumerateStats stats = enumerate_models(problem, options, [&](const Model& m) {
        res.models.push_back(m);
        return true;
    });
    res.nodesExpanded = stats.nodesExpanded;
    res.truncated = stats.truncated;
    res.timedOut = stats.timedOut;
    return res;
}

OptimizeResult optimize(const Problem& problem, unsigned jobs) {
    OptimizeResult res;
    if (problem.infeasible)
        return res;
    Deadline deadline = Deadline::from(problem.config);
    std::atomic<std::int64_t> best{kInf};

    std::size_t level0 = problem.parts.empty() ? 1 : problem.choiceValues[0].size();
    std::size_t n = std::min<std::size_t>(std::max(1u, jobs), std::max<std::size_t>(level0, 1));

    std::vector<std::unique_ptr<Optimizer>> workers;
    for (std::size_t t = 0; t < n; ++t)
        workers.push_back(std::make_unique<Optimizer>(problem, best, deadline));
    if (n == 1) {
        workers[0]->run(0, 1);
    } else {
        std::vector<std::thread> threads;
        for (std::size_t t = 0; t < n; ++t)
            threads.emplace_back([&, t] { workers[t]->run(t, n); });
        for (auto& th : threads)
            th.join();
    }

    std::size_t winner = n;
    for (std::size_t t = 0; t < n; ++t) {
        res.nodesExpanded += workers[t]->nodes();
        res.timedOut = res.timedOut || workers[t]->timedOut();
        if (workers[t]->localCost() >= kInf)
            continue;
        if (winner == n || workers[t]->localCost() < workers[winner]->localCost() ||
            (workers[t]->localCost() == workers[winner]->localCost() &&
             workers[t]->localKey() < workers[winner]->localKey()))
            winner = t;
    }
    if (winner < n)
        res.model = workers[winner]->takeModel();
    return res;
}

std::vector<std::string> check_model(const Problem& problem, const Model& model) {
    const SymbolTable& syms = problem.facts->symbols;
    std::vector<std::string> out;
    auto name = [&](SymbolId s) { return s.valid() ? syms.text(s) : std::string("?"); };

    int want = problem.config.sourcing == Sourcing::Double ? 2 : 1;
    if (model.sites.size() != problem.parts.size())
        out.push_back("choice cardinality: " + std::to_string(model.sites.size()) +
                      " site choices for " + std::to_string(problem.parts.size()) + " parts");
    std::size_t nParts = std::min(model.sites.size(), problem.parts.size());

    for (std::size_t i = 0; i < nParts; ++i) {
        const SiteChoice& s = model.sites[i];
        SymbolId part = problem.parts[i];
        int have = site_count(s);
        if (have != want)
            out.push_back("choice cardinality: " + name(part) + " has " + std::to_string(have) +
                          " sites, expected " + std::to_string(want));
        if (have == 2 && s[0] == s[1])
            out.push_back("choice cardinality: " + name(part) + " repeats site " + name(s[0]));
        forEachSite(s, [&](SymbolId site) {
            const auto& dom = problem.domains[i];
            if (std::find(dom.begin(), dom.end(), site) == dom.end())
                out.push_back("produceability: " + name(part) + "@" + name(site));
        });
        if (have == 2 && s[0] != s[1]) {
            auto ca = problem.countriesOf.find(s[0]);
            auto cb = problem.countriesOf.find(s[1]);
            if (ca != problem.countriesOf.end() && cb != problem.countriesOf.end())
                for (SymbolId c : ca->second)
                    if (std::find(cb->second.begin(), cb->second.end(), c) != cb->second.end())
                        out.push_back("country IC: " + name(part) + " sites " + name(s[0]) +
                                      ", " + name(s[1]) + " share " + name(c));
        }
    }

    for (SymbolId loc : problem.facts->productionLocs) {
        bool covered = false;
        for (std::size_t i = 0; i < nParts && !covered; ++i)
            forEachSite(model.sites[i], [&](SymbolId site) { covered = covered || site == loc; });
        if (!covered)
            out.push_back("location coverage: " + name(loc) + " produces no part");
    }

    // Required groundings: plan edges over the assigned sites, plus the root
    // anchors. Each must be met by exactly one path atom.
    struct Req {
        bool root = false;
        int found = 0;
    };
    std::map<GroundKey, Req> required;
    for (const PlanEdge& edge : problem.edges) {
        if (edge.partIdx >= nParts || edge.superIdx >= nParts)
            continue;
        forEachSite(model.sites[edge.partIdx], [&](SymbolId f) {
            forEachSite(model.sites[edge.superIdx],
                        [&](SymbolId t) { required[groundKey(edge.part, f, t)]; });
        });
    }
    if (problem.rootIdx && *problem.rootIdx < nParts) {
        SymbolId root = problem.parts[*problem.rootIdx];
        forEachSite(model.sites[*problem.rootIdx],
                    [&](SymbolId site) { required[groundKey(root, site, site)].root = true; });
    }

    auto groundName = [&](SymbolId part, SymbolId from, SymbolId to) {
        return "(" + name(part) + ", " + name(from) + ", " + name(to) + ")";
    };

    std::int64_t distanceSum = 0, legSum = 0;
    for (const ModelPath& p : model.paths) {
        std::string where = groundName(p.part, p.from, p.to);
        auto it = required.find(groundKey(p.part, p.from, p.to));
        if (it == required.end()) {
            out.push_back("path cardinality: " + where + " is not a required grounding");
            continue;
        }
        ++it->second.found;
        const RouteCandidate& c = p.cand;
        distanceSum += c.distance;
        if (!it->second.root)
            legSum += c.legCount();

        if (c.part != p.part || c.from != p.from || c.to != p.to) {
            out.push_back("path stitching: " + where + " candidate does not match its grounding");
            continue;
        }
        if (it->second.root) {
            if (c.distance != 0 || c.viaCount != 0)
                out.push_back("path stitching: " + where + " root anchor must have distance 0");
            continue;
        }
        if (c.viaCount < 0 || c.viaCount > 2) {
            out.push_back("path stitching: " + where + " has " + std::to_string(c.viaCount) +
                          " vias");
            continue;
        }
        if (c.viaCount >= 1 && c.from == c.to)
            out.push_back("path stitching: " + where + " via paths need distinct endpoints");
        if (c.viaCount == 2 && c.vias[0] == c.vias[1])
            out.push_back("path stitching: " + where + " vias must differ");
        if (ground::restricts_endpoint_types(problem.config.variant) && c.viaCount >= 1) {
            auto locType = [&](SymbolId loc, bool production) {
                int li = problem.index.indexOf(loc);
                return li >= 0 && (production ? problem.index.isProduction[li]
                                              : problem.index.isWarehouse[li]);
            };
            if (!locType(c.from, true))
                out.push_back("path stitching: " + where + " endpoint " + name(c.from) +
                              " is not a production location");
            if (!locType(c.to, true))
                out.push_back("path stitching: " + where + " endpoint " + name(c.to) +
                              " is not a production location");
            for (int v = 0; v < c.viaCount; ++v)
                if (!locType(c.vias[v], false))
                    out.push_back("path stitching: " + where + " via " + name(c.vias[v]) +
                                  " is not a warehouse");
        }
        if (ground::restricts_middle_mean(problem.config.variant) && c.viaCount == 2 &&
            (!problem.index.shipMean.valid() || c.means[1] != problem.index.shipMean))
            out.push_back("path stitching: " + where + " middle mean must be " +
                          problem.config.shipMeanName);

        // Every leg must be a derivable transport tuple and the distances of
        // some leg combination must add up to the candidate's distance.
        std::array<SymbolId, 4> stops{c.from, c.vias[0], c.vias[1], SymbolId{}};
        stops[c.viaCount + 1] = c.to;
        const auto* legs = problem.index.legsOf(c.part);
        std::vector<std::int64_t> sums{0};
        bool derivable = true;
        for (int leg = 0; leg <= c.viaCount && derivable; ++leg) {
            SymbolId legFrom = stops[leg], legTo = stops[leg + 1];
            int fi = problem.index.indexOf(legFrom);
            std::vector<std::int64_t> found;
            if (legs && fi >= 0) {
                int ti = problem.index.indexOf(legTo);
                for (const auto& l : legs->byFrom[fi])
                    if (l.to == ti && l.mean == c.means[leg])
                        found.push_back(l.distance);
            }
            if (found.empty()) {
                out.push_back("path stitching: " + where + " leg " + name(legFrom) + "->" +
                              name(legTo) + " by " + name(c.means[leg]) + " is not derivable");
                derivable = false;
                break;
            }
            std::vector<std::int64_t> next;
            for (std::int64_t s : sums)
                for (std::int64_t d : found)
                    next.push_back(s + d);
            std::sort(next.begin(), next.end());
            next.erase(std::unique(next.begin(), next.end()), next.end());
            sums = std::move(next);
        }
        if (derivable && !std::binary_search(sums.begin(), sums.end(), c.distance))
            out.push_back("path stitching: " + where + " distance " +
                          std::to_string(c.distance) + " is not a leg sum");
    }

    for (const auto& [key, req] : required)
        if (req.found != 1)
            out.push_back("path cardinality: " +
                          groundName(SymbolId{key[0]}, SymbolId{key[1]}, SymbolId{key[2]}) +
                          " has " + std::to_string(req.found) + " paths, expected 1");

    if (distanceSum != model.totalDistance)
        out.push_back("path stitching: totalDistance " + std::to_string(model.totalDistance) +
                      " does not match the path sum " + std::to_string(distanceSum));
    if (legSum != model.legCount)
        out.push_back("path stitching: legCount " + std::to_string(model.legCount) +
                      " does not match the path sum " + std::to_string(legSum));
    return out;
}

std::uint64_t count_choice_points(const Problem& problem) {
    return ground::count_choice_points(*problem.facts, problem.config.variant);
}

std::string model_key(const Problem& problem, const Model& model) {
    const SymbolTable& syms = problem.facts->symbols;
    std::string out;
    for (std::size_t i : problem.partsByText) {
        if (i >= model.sites.size())
            continue;
        out += syms.text(problem.parts[i]);
        out += '=';
        bool first = true;
        forEachSite(model.sites[i], [&](SymbolId s) {
            if (!first)
                out += ',';
            first = false;
            out += syms.text(s);
        });
        out += ';';
    }
    out += '|';
    for (const ModelPath& p : model.paths) {
        out += '(';
        out += syms.text(p.part);
        out += ',';
        out += syms.text(p.from);
        out += ',';
        out += syms.text(p.to);
        out += ")=";
        out += std::to_string(p.cand.distance);
        out += '[';
        for (int i = 0; i <= p.cand.viaCount; ++i) {
            if (i)
                out += ',';
            out += syms.text(p.cand.means[i]);
        }
        out += '|';
        for (int i = 0; i < p.cand.viaCount; ++i) {
            if (i)
                out += ',';
            out += syms.text(p.cand.vias[i]);
        }
        out += "];";
    }
    return out;
}

std::vector<ground::RouteCandidate> grounding_candidates(const Problem& problem, SymbolId part,
                                                         SymbolId from, SymbolId to) {
    return collectCandidates(problem, part, from, to);
}

} // namespace logicfg::solve
