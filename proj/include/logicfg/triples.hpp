#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "logicfg/facts.hpp"
#include "logicfg/symbols.hpp"

namespace logicfg::kb {

// Object position of a triple: either a symbol or an integer literal.
struct TripleObject {
    enum class Kind { symbol, number };

    Kind kind = Kind::symbol;
    SymbolId sym{};
    std::int64_t number = 0;

    static TripleObject symbol(SymbolId s) { return {Kind::symbol, s, 0}; }
    static TripleObject integer(std::int64_t n) { return {Kind::number, SymbolId{}, n}; }

    bool isSymbol() const { return kind == Kind::symbol; }
    bool isNumber() const { return kind == Kind::number; }

    friend bool operator==(const TripleObject& a, const TripleObject& b) {
        if (a.kind != b.kind)
            return false;
        return a.isSymbol() ? a.sym == b.sym : a.number == b.number;
    }
};

struct Triple {
    SymbolId subject;
    SymbolId predicate;
    TripleObject object;

    friend bool operator==(const Triple& a, const Triple& b) {
        return a.subject == b.subject && a.predicate == b.predicate && a.object == b.object;
    }
};

// A flat subject-predicate-object document with set semantics.
struct TripleSet {
    SymbolTable symbols;
    std::vector<Triple> triples;

    // Sorts by subject/predicate/object text (numbers after symbols) and
    // drops duplicates.
    void normalize();

    bool empty() const { return triples.empty(); }
};

// One triple per line: `subject predicate object`, whitespace separated,
// '%' starts a comment. An object token of the form [-]digits is an integer
// literal; anything else is a symbol.
TripleSet parse_triple_file(std::string_view text);
TripleSet parse_triple_file(std::istream& in);
TripleSet load_triple_file(const std::string& path);

std::string serialize_triples(const TripleSet& kg);

// Adds is_transported_by(p,m) for every can_transport(m,p). Idempotent and
// monotone; never removes triples.
TripleSet materialize_inverses(const TripleSet& kg);

// Realizes the fixed vocabulary mapping into the eleven fact relations.
// Throws KgError naming the offending subject when a composite node (route,
// production resource) is missing or duplicating a required property.
FactSet kg_to_facts(const TripleSet& kg);

struct ShapeViolation {
    std::string subject;
    std::string message;

    friend bool operator==(const ShapeViolation& a, const ShapeViolation& b) {
        return a.subject == b.subject && a.message == b.message;
    }
};

// Built-in shapes: locations carry exactly one country, route nodes are
// complete with a nonnegative integer distance, has_part references declared
// products. Returns violations sorted by (subject, message).
std::vector<ShapeViolation> shape_check(const TripleSet& kg);

} // namespace logicfg::kb
