#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vardec {

enum class ErrorKind {
    InvalidInput,
    BudgetExceeded,
    InvalidQuery,
    NotClosed,
    InvalidForm,
    DegenerateSector,
    DegenerateDenominator,
    NotIrreduciblyQuantified,
    IllConditioned,
    WindowExceedsBox,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

using Code = std::uint64_t;

// Default cap on |S|^|Λ| for anything that enumerates configurations.
inline constexpr std::uint64_t kDefaultBudget = std::uint64_t{1} << 22;

// A lattice point of Z^d with d <= 3. Vertices of a finite locale that have no
// geometry use (index, 0, 0).
struct Site {
    std::array<int, 3> x{0, 0, 0};

    constexpr Site() = default;
    constexpr Site(int a, int b = 0, int c = 0) : x{a, b, c} {}

    int operator[](int i) const { return x[static_cast<std::size_t>(i)]; }
    int& operator[](int i) { return x[static_cast<std::size_t>(i)]; }

    friend constexpr auto operator<=>(const Site&, const Site&) = default;
    friend Site operator+(Site a, const Site& b) {
        for (int i = 0; i < 3; ++i) a.x[i] += b.x[i];
        return a;
    }
    friend Site operator-(Site a, const Site& b) {
        for (int i = 0; i < 3; ++i) a.x[i] -= b.x[i];
        return a;
    }
};

int l1_distance(const Site& a, const Site& b);
Site unit(int j, int sign = 1);
std::string to_string(const Site& s, int d);

// Number of configurations |S|^m, or throws BudgetExceeded above the budget.
Code config_count(int num_states, std::size_t num_sites, std::uint64_t budget = kDefaultBudget);

} // namespace vardec
