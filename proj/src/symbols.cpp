#include "hopu/symbols.hpp"

namespace hopu {

Symbols::Symbols() {
    for (const char* n : {"->", "o", "int", "string", "list", "true", ",", ";", "=>", ":-", "pi", "sigma", "::", "nil", "&"})
        intern(n);
}

SymbolId Symbols::intern(const std::string& name) {
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    SymbolId id = static_cast<SymbolId>(names_.size());
    names_.push_back(name);
    ids_.emplace(name, id);
    return id;
}

const std::string& Symbols::name(SymbolId id) const {
    static const std::string generic = "<generic>";
    if (id >= names_.size()) return generic;
    return names_[id];
}

}  // namespace hopu
