#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

namespace logicfg {

// Interned identifier. Equal text <=> equal id within one SymbolTable.
struct SymbolId {
    static constexpr std::uint32_t kInvalid = 0xffffffffu;
    std::uint32_t value = kInvalid;

    bool valid() const { return value != kInvalid; }
    friend bool operator==(SymbolId a, SymbolId b) { return a.value == b.value; }
    friend bool operator!=(SymbolId a, SymbolId b) { return a.value != b.value; }
    friend bool operator<(SymbolId a, SymbolId b) { return a.value < b.value; }
};

// The transport mean synthesized for zero-distance transfers within one
// location. Always interned first, so it has a fixed id in every table.
inline constexpr std::string_view kIntraSiteName = "intraSite";
inline constexpr SymbolId kIntraSite{0};

class SymbolTable {
public:
    SymbolTable() { intern(kIntraSiteName); }

    // The index keys are views into texts_, so a copy must rebuild them over
    // its own storage. Moves keep the views valid (deque elements stay put).
    SymbolTable(const SymbolTable& other) : texts_(other.texts_) { rebuildIndex(); }
    SymbolTable& operator=(const SymbolTable& other) {
        if (this != &other) {
            texts_ = other.texts_;
            rebuildIndex();
        }
        return *this;
    }
    SymbolTable(SymbolTable&&) = default;
    SymbolTable& operator=(SymbolTable&&) = default;

    SymbolId intern(std::string_view text) {
        auto it = index_.find(text);
        if (it != index_.end())
            return SymbolId{it->second};
        texts_.emplace_back(text);
        std::uint32_t id = static_cast<std::uint32_t>(texts_.size() - 1);
        index_.emplace(texts_.back(), id);
        return SymbolId{id};
    }

    std::optional<SymbolId> find(std::string_view text) const {
        auto it = index_.find(text);
        if (it == index_.end())
            return std::nullopt;
        return SymbolId{it->second};
    }

    const std::string& text(SymbolId id) const { return texts_[id.value]; }
    std::size_t size() const { return texts_.size(); }

    // Canonical order: by interned text, not by interning order.
    bool textLess(SymbolId a, SymbolId b) const { return texts_[a.value] < texts_[b.value]; }

private:
    void rebuildIndex() {
        index_.clear();
        for (std::size_t i = 0; i < texts_.size(); ++i)
            index_.emplace(texts_[i], static_cast<std::uint32_t>(i));
    }

    struct SvHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
    };
    struct SvEq {
        using is_transparent = void;
        bool operator()(std::string_view a, std::string_view b) const { return a == b; }
    };

    std::deque<std::string> texts_; // deque: stable storage for the index views
    std::unordered_map<std::string_view, std::uint32_t, SvHash, SvEq> index_;
};

inline std::uint64_t packPair(SymbolId a, SymbolId b) {
    return (static_cast<std::uint64_t>(a.value) << 32) | b.value;
}

} // namespace logicfg

template <>
struct std::hash<logicfg::SymbolId> {
    std::size_t operator()(logicfg::SymbolId s) const { return std::hash<std::uint32_t>{}(s.value); }
};
