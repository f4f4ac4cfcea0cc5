#include "vardec/core.hpp"

#include <cstdlib>

namespace vardec {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::InvalidQuery: return "InvalidQuery";
    case ErrorKind::NotClosed: return "NotClosed";
    case ErrorKind::InvalidForm: return "InvalidForm";
    case ErrorKind::DegenerateSector: return "DegenerateSector";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::NotIrreduciblyQuantified: return "NotIrreduciblyQuantified";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::WindowExceedsBox: return "WindowExceedsBox";
    }
    return "Unknown";
}

int l1_distance(const Site& a, const Site& b) {
    int s = 0;
    for (int i = 0; i < 3; ++i) s += std::abs(a.x[i] - b.x[i]);
    return s;
}

Site unit(int j, int sign) {
    Site s;
    s.x[static_cast<std::size_t>(j)] = sign;
    return s;
}

std::string to_string(const Site& s, int d) {
    std::string out = "(";
    for (int i = 0; i < d; ++i) {
        if (i) out += ",";
        out += std::to_string(s.x[i]);
    }
    return out + ")";
}

Code config_count(int num_states, std::size_t num_sites, std::uint64_t budget) {
    Code n = 1;
    for (std::size_t i = 0; i < num_sites; ++i) {
        n *= static_cast<Code>(num_states);
        if (n > budget)
            throw Error(ErrorKind::BudgetExceeded,
                        std::to_string(num_states) + "^" + std::to_string(num_sites) +
                            " configurations exceed budget " + std::to_string(budget));
    }
    return n;
}

} // namespace vardec
