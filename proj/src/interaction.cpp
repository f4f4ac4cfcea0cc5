#include "vardec/interaction.hpp"

#include "vardec/core.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace vardec {

InteractionTable::InteractionTable(StateSpace space, std::vector<StatePair> map, std::string name)
    : space_(std::move(space)), map_(std::move(map)), name_(std::move(name)) {
    const int n = space_.size();
    if (n < 1) throw Error(ErrorKind::InvalidInput, "state space is empty");
    if (space_.base < 0 || space_.base >= n)
        throw Error(ErrorKind::InvalidInput, "base state index out of range");
    std::set<std::string> seen(space_.labels.begin(), space_.labels.end());
    if (static_cast<int>(seen.size()) != n)
        throw Error(ErrorKind::InvalidInput, "state labels are not distinct");
    if (map_.size() != static_cast<std::size_t>(n * n))
        throw Error(ErrorKind::InvalidInput, "interaction map is not total on S×S");
    for (auto [a, b] : map_)
        if (a < 0 || a >= n || b < 0 || b >= n)
            throw Error(ErrorKind::InvalidInput, "interaction image outside S×S");
}

namespace {

StateSpace numbered_states(int n) {
    StateSpace s;
    for (int i = 0; i < n; ++i) s.labels.push_back(std::to_string(i));
    return s;
}

} // namespace

InteractionTable sep(int kappa) {
    if (kappa < 1) throw Error(ErrorKind::InvalidInput, "sep needs kappa >= 1");
    const int n = kappa + 1;
    std::vector<StatePair> map;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) map.emplace_back(b, a);
    return {numbered_states(n), std::move(map), "sep" + std::to_string(kappa)};
}

InteractionTable gep(int kappa) {
    if (kappa < 1) throw Error(ErrorKind::InvalidInput, "gep needs kappa >= 1");
    const int n = kappa + 1;
    std::vector<StatePair> map;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            map.push_back(a > 0 && b < kappa ? StatePair{a - 1, b + 1} : StatePair{a, b});
    return {numbered_states(n), std::move(map), "gep" + std::to_string(kappa)};
}

InteractionTable identity_interaction(int num_states) {
    std::vector<StatePair> map;
    for (int a = 0; a < num_states; ++a)
        for (int b = 0; b < num_states; ++b) map.emplace_back(a, b);
    return {numbered_states(num_states), std::move(map), "identity" + std::to_string(num_states)};
}

ValidationReport validate_interaction(const InteractionTable& phi) {
    ValidationReport r;
    const int n = phi.num_states();
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (phi.fixes(a, b)) continue;
            auto [c, d] = phi.apply(a, b);
            if (phi.apply_bar(c, d) != StatePair{a, b}) r.violations.emplace_back(a, b);
        }
    r.valid = r.violations.empty();
    return r;
}

std::vector<std::vector<double>> ConsvBasis::as_real() const {
    std::vector<std::vector<double>> out;
    for (const auto& v : vectors) {
        std::vector<double> row;
        for (const auto& q : v)
            row.push_back(static_cast<double>(q.numerator()) / static_cast<double>(q.denominator()));
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<std::vector<long long>> ConsvBasis::as_integer() const {
    std::vector<std::vector<long long>> out;
    for (const auto& v : vectors) {
        long long l = 1;
        for (const auto& q : v) l = std::lcm(l, q.denominator());
        std::vector<long long> row;
        for (const auto& q : v) row.push_back(q.numerator() * (l / q.denominator()));
        out.push_back(std::move(row));
    }
    return out;
}

// In-place reduced row echelon form, pivot columns scanned in state order.
// Returns the pivot columns; rows past the rank are left zero.
static std::vector<int> reduce_rows(std::vector<std::vector<Rational>>& rows, int n) {
    std::vector<int> pivot_cols;
    std::size_t prow = 0;
    for (int col = 0; col < n && prow < rows.size(); ++col) {
        const auto c = static_cast<std::size_t>(col);
        std::size_t sel = prow;
        while (sel < rows.size() && rows[sel][c].numerator() == 0) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[prow], rows[sel]);
        const Rational p = rows[prow][c];
        for (auto& q : rows[prow]) q /= p;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == prow || rows[r][c].numerator() == 0) continue;
            const Rational f = rows[r][c];
            for (std::size_t k = 0; k < rows[r].size(); ++k) rows[r][k] -= f * rows[prow][k];
        }
        pivot_cols.push_back(col);
        ++prow;
    }
    return pivot_cols;
}

ConsvBasis conserved_basis(const InteractionTable& phi) {
    const int n = phi.num_states();
    std::vector<std::vector<Rational>> rows;
    {
        std::vector<Rational> r(static_cast<std::size_t>(n), Rational(0));
        r[static_cast<std::size_t>(phi.base())] = 1;
        rows.push_back(r);
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            auto [c, d] = phi.apply(a, b);
            std::vector<Rational> r(static_cast<std::size_t>(n), Rational(0));
            r[static_cast<std::size_t>(c)] += 1;
            r[static_cast<std::size_t>(d)] += 1;
            r[static_cast<std::size_t>(a)] -= 1;
            r[static_cast<std::size_t>(b)] -= 1;
            if (std::any_of(r.begin(), r.end(), [](const Rational& q) { return q.numerator() != 0; }))
                rows.push_back(std::move(r));
        }

    const std::vector<int> pivot_cols = reduce_rows(rows, n);

    ConsvBasis basis;
    for (int free = 0; free < n; ++free) {
        if (std::find(pivot_cols.begin(), pivot_cols.end(), free) != pivot_cols.end()) continue;
        std::vector<Rational> v(static_cast<std::size_t>(n), Rational(0));
        v[static_cast<std::size_t>(free)] = 1;
        for (std::size_t r = 0; r < pivot_cols.size(); ++r)
            v[static_cast<std::size_t>(pivot_cols[r])] = -rows[r][static_cast<std::size_t>(free)];
        basis.vectors.push_back(std::move(v));
    }
    // The basis itself is reported in reduced echelon form, so a kernel
    // spanned by ξ(s)=s is reported as that vector and not a multiple of it.
    reduce_rows(basis.vectors, n);
    return basis;
}

bool is_conserved(const InteractionTable& phi, const std::vector<Rational>& xi) {
    const int n = phi.num_states();
    if (static_cast<int>(xi.size()) != n) return false;
    if (xi[static_cast<std::size_t>(phi.base())].numerator() != 0) return false;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            auto [c, d] = phi.apply(a, b);
            if (xi[static_cast<std::size_t>(c)] + xi[static_cast<std::size_t>(d)] !=
                xi[static_cast<std::size_t>(a)] + xi[static_cast<std::size_t>(b)])
                return false;
        }
    return true;
}

bool is_simple(const InteractionTable& phi) {
    const ConsvBasis basis = conserved_basis(phi);
    if (basis.dimension() != 1) return false;
    const auto values = basis.as_integer().front();
    long long g = 0;
    long long smallest = 0;
    bool positive = false;
    bool negative = false;
    for (long long v : values) {
        if (v == 0) continue;
        positive |= v > 0;
        negative |= v < 0;
        g = std::gcd(g, v);
        const long long a = v < 0 ? -v : v;
        smallest = smallest == 0 ? a : std::min(smallest, a);
    }
    if (g == 0) return false;
    // Mixed signs generate the group gℤ. A one-signed set generates a copy of ℕ
    // only when the generator g itself is among the values.
    if (positive && negative) return true;
    return smallest == g;
}

} // namespace vardec
