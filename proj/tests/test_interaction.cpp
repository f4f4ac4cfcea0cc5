#include "vardec/core.hpp"
#include "vardec/interaction.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace vardec;

namespace {

StateSpace numbered(int n) {
    StateSpace s;
    for (int i = 0; i < n; ++i) s.labels.push_back(std::to_string(i));
    return s;
}

// Conjugate φ by a permutation of the states that keeps the base fixed.
InteractionTable relabel(const InteractionTable& phi, const std::vector<int>& perm) {
    const int n = phi.num_states();
    std::vector<StatePair> map(static_cast<std::size_t>(n * n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            auto [c, d] = phi.apply(a, b);
            map[static_cast<std::size_t>(perm[a] * n + perm[b])] = {perm[c], perm[d]};
        }
    StateSpace s = numbered(n);
    s.base = perm[phi.base()];
    return {s, map};
}

// Dimension of the constraint kernel by floating-point SVD-free elimination in
// a shuffled constraint order.
int kernel_dimension_shuffled(const InteractionTable& phi, std::mt19937_64& rng) {
    const int n = phi.num_states();
    std::vector<std::vector<double>> rows;
    std::vector<double> base(static_cast<std::size_t>(n), 0.0);
    base[static_cast<std::size_t>(phi.base())] = 1.0;
    rows.push_back(base);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            auto [c, d] = phi.apply(a, b);
            std::vector<double> r(static_cast<std::size_t>(n), 0.0);
            r[static_cast<std::size_t>(c)] += 1;
            r[static_cast<std::size_t>(d)] += 1;
            r[static_cast<std::size_t>(a)] -= 1;
            r[static_cast<std::size_t>(b)] -= 1;
            rows.push_back(r);
        }
    std::shuffle(rows.begin(), rows.end(), rng);
    int rank = 0;
    std::vector<int> cols(static_cast<std::size_t>(n));
    std::iota(cols.begin(), cols.end(), 0);
    std::shuffle(cols.begin(), cols.end(), rng);
    for (int col : cols) {
        std::size_t piv = static_cast<std::size_t>(rank);
        while (piv < rows.size() && std::abs(rows[piv][static_cast<std::size_t>(col)]) < 1e-12) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[static_cast<std::size_t>(rank)]);
        const auto& p = rows[static_cast<std::size_t>(rank)];
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == static_cast<std::size_t>(rank)) continue;
            const double f = rows[r][static_cast<std::size_t>(col)] / p[static_cast<std::size_t>(col)];
            for (int k = 0; k < n; ++k) rows[r][static_cast<std::size_t>(k)] -= f * p[static_cast<std::size_t>(k)];
        }
        ++rank;
    }
    return n - rank;
}

} // namespace

TEST_CASE("validate_interaction") {
    CHECK(validate_interaction(sep(2)).valid);
    CHECK(validate_interaction(identity_interaction(3)).valid);
    const InteractionTable bad(numbered(2), {{0, 0}, {1, 1}, {1, 1}, {1, 1}});
    const auto r = validate_interaction(bad);
    CHECK_FALSE(r.valid);
    REQUIRE(!r.violations.empty());
    CHECK(r.violations.front() == StatePair{0, 1});
}

TEST_CASE("interaction table rejects malformed input") {
    CHECK_THROWS_AS(InteractionTable(numbered(2), {{0, 0}}), Error);
    CHECK_THROWS_AS(InteractionTable(numbered(2), {{0, 0}, {0, 5}, {1, 0}, {1, 1}}), Error);
}

TEST_CASE("conserved_basis of the two exclusion families") {
    for (int k = 1; k <= 4; ++k) {
        const auto b = conserved_basis(sep(k));
        CHECK(b.dimension() == k);
        for (int i = 0; i < k; ++i)
            for (int s = 0; s <= k; ++s)
                CHECK(b.vectors[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)] ==
                      Rational(s == i + 1 ? 1 : 0));
    }
    for (int k = 1; k <= 4; ++k) {
        const auto b = conserved_basis(gep(k));
        REQUIRE(b.dimension() == 1);
        for (int s = 0; s <= k; ++s) CHECK(b.vectors[0][static_cast<std::size_t>(s)] == Rational(s));
    }
    CHECK(conserved_basis(identity_interaction(4)).dimension() == 3);
}

TEST_CASE("every basis vector is conserved") {
    for (const auto& phi : {sep(1), sep(3), gep(2), gep(4), identity_interaction(3)})
        for (const auto& xi : conserved_basis(phi).vectors) CHECK(is_conserved(phi, xi));
}

TEST_CASE("conserved dimension is invariant under relabeling") {
    std::mt19937_64 rng(7);
    for (const auto& phi : {sep(2), sep(3), gep(3), identity_interaction(4)}) {
        std::vector<int> perm(static_cast<std::size_t>(phi.num_states()));
        std::iota(perm.begin(), perm.end(), 0);
        for (int t = 0; t < 5; ++t) {
            std::shuffle(perm.begin(), perm.end(), rng);
            CHECK(conserved_basis(relabel(phi, perm)).dimension() == conserved_basis(phi).dimension());
        }
    }
}

TEST_CASE("kernel dimension agrees with shuffled elimination") {
    std::mt19937_64 rng(11);
    for (const auto& phi : {sep(1), sep(2), sep(3), gep(2), gep(3), identity_interaction(2), identity_interaction(4)})
        for (int t = 0; t < 4; ++t) CHECK(kernel_dimension_shuffled(phi, rng) == conserved_basis(phi).dimension());
}

TEST_CASE("is_simple") {
    CHECK(is_simple(gep(3)));
    CHECK(is_simple(sep(1)));
    CHECK_FALSE(is_simple(sep(2)));
    CHECK(is_simple(identity_interaction(2)));
    CHECK_FALSE(is_simple(identity_interaction(3)));
}

TEST_CASE("involution on non-fixed pairs") {
    for (const auto& phi : {sep(3), gep(3)})
        for (int a = 0; a < phi.num_states(); ++a)
            for (int b = 0; b < phi.num_states(); ++b) {
                if (phi.fixes(a, b)) continue;
                auto [c, d] = phi.apply(a, b);
                CHECK(phi.apply_bar(c, d) == StatePair{a, b});
            }
}
