#pragma once

#include <deque>
#include <string>
#include <unordered_map>

#include "hopu/term.hpp"

namespace hopu {

namespace sym {
// pre-interned, in this order
constexpr SymbolId Arrow = 0, O = 1, Int = 2, String = 3, List = 4;
constexpr SymbolId True = 5, And = 6, Or = 7, Imp = 8, Neck = 9, Pi = 10, Sigma = 11;
constexpr SymbolId Cons = 12, Nil = 13, Amp = 14;
}  // namespace sym

class Symbols {
    std::deque<std::string> names_;
    std::unordered_map<std::string, SymbolId> ids_;

public:
    Symbols();
    SymbolId intern(const std::string& name);
    bool contains(const std::string& name) const { return ids_.count(name) != 0; }
    const std::string& name(SymbolId id) const;
    const std::string* name_ptr(SymbolId id) const { return &name(id); }
};

inline bool is_logical(SymbolId s) { return (s >= sym::True && s <= sym::Sigma) || s == sym::Amp; }

}  // namespace hopu
