#include "oracles.hpp"

#include "vardec/forms.hpp"
#include "vardec/measure.hpp"

#include <doctest.h>

#include <random>

using namespace vardec;

namespace {

FunctionTable random_table(const Window& w, int S, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    return FunctionTable::tabulate(w, S, [&](const std::vector<int>&) { return g(rng); });
}

const Window kXY = make_window({Site(0), Site(1)});

// Bernoulli(p) on {0, 1}.
SiteMeasure bernoulli(double p) { return SiteMeasure({1.0 - p, p}, "bernoulli"); }

// η_x η_y on the window {x, y}.
FunctionTable product_xy() {
    return FunctionTable::tabulate(kXY, 2, [](const std::vector<int>& s) { return double(s[0] * s[1]); });
}

} // namespace

TEST_CASE("site measures") {
    CHECK_THROWS_AS(SiteMeasure({0.5, 0.6}), Error);
    CHECK_THROWS_AS(SiteMeasure({1.0, 0.0}), Error);
    const auto g = SiteMeasure::geometric(3, 0.5);
    CHECK(g(0) == doctest::Approx(4.0 / 7.0));
    CHECK(g(2) == doctest::Approx(1.0 / 7.0));
}

TEST_CASE("conditional_expectation examples") {
    const double p = 0.3;
    const auto nu = bernoulli(p);
    const Window x{Site(0)};
    const auto fx = FunctionTable::tabulate(x, 2, [](const std::vector<int>& s) { return 2.0 * s[0] - 1.0; });
    CHECK(max_abs_difference(conditional_expectation(fx.extend(kXY), x, nu), fx) < 1e-15);
    const auto ind = FunctionTable::tabulate(Window{Site(1)}, 2, [](const std::vector<int>& s) { return double(s[0] == 1); });
    const auto c = conditional_expectation(ind, x, nu);
    for (Code k = 0; k < c.size(); ++k) CHECK(c[k] == doctest::Approx(p));
    const auto proj = conditional_expectation(product_xy(), x, nu);
    CHECK(proj[0] == doctest::Approx(0.0));
    CHECK(proj[1] == doctest::Approx(p));
}

TEST_CASE("conditional_expectation agrees with brute force, tower, idempotence, self-adjointness") {
    std::mt19937_64 rng(3);
    const auto nu = SiteMeasure::geometric(3, 0.6);
    const Window w = make_window({Site(0), Site(1), Site(2), Site(3)});
    const Window a = make_window({Site(0), Site(1), Site(2)});
    const Window b = make_window({Site(1), Site(3)});
    for (int t = 0; t < 20; ++t) {
        const auto f = random_table(w, 3, rng);
        const auto g = random_table(w, 3, rng);
        CHECK(max_abs_difference(conditional_expectation(f, a, nu), oracle::brute_conditional(f, a, nu)) < 1e-12);
        const auto tower = conditional_expectation(conditional_expectation(f, b, nu), a, nu);
        CHECK(max_abs_difference(tower, conditional_expectation(f, window_intersection(a, b), nu)) < 1e-10);
        const auto pa = conditional_expectation(f, a, nu);
        CHECK(max_abs_difference(conditional_expectation(pa, a, nu), pa) < 1e-12);
        CHECK(inner(pa, g, nu) == doctest::Approx(inner(f, conditional_expectation(g, a, nu), nu)).epsilon(1e-10));
    }
}

TEST_CASE("norms") {
    const auto nu = bernoulli(0.3);
    CHECK(mu_norm(FunctionTable::constant(2, 1.0), nu) == doctest::Approx(1.0));
    const auto fx = FunctionTable::tabulate(Window{Site(0)}, 2, [](const std::vector<int>& s) { return double(s[0]); });
    CHECK(mu_norm(fx, nu) == doctest::Approx(std::sqrt(0.3)));
    const Rate r = trivial_rate(path_locale(2), 2);
    CHECK(weighted_norm(fx, r.edge[0], nu) == doctest::Approx(mu_norm(fx, nu)));
}

TEST_CASE("expand_mu") {
    const double p = 0.3;
    const auto nu = bernoulli(p);
    const auto c = expand_mu(FunctionTable::constant(2, 2.5), nu);
    REQUIRE(c.pieces.size() == 1);
    CHECK(c.pieces.begin()->first.empty());

    // p² + p(η_x−p) + p(η_y−p) + (η_x−p)(η_y−p)
    const auto e = expand_mu(product_xy(), nu);
    auto piece = [&](const Window& w) { return e.pieces.at(w).extend(kXY); };
    for (Code k = 0; k < 4; ++k) {
        const int x = static_cast<int>(k % 2), y = static_cast<int>(k / 2);
        CHECK(piece({})[k] == doctest::Approx(p * p));
        CHECK(piece({Site(0)})[k] == doctest::Approx(p * (x - p)));
        CHECK(piece({Site(1)})[k] == doctest::Approx(p * (y - p)));
        CHECK(piece(kXY)[k] == doctest::Approx((x - p) * (y - p)));
    }

    auto centred = product_xy();
    for (auto& v : centred.values()) v -= p * p;
    const auto z = expand_mu(centred, nu);
    CHECK(std::abs(max_abs(z.pieces.at({}))) < 1e-15);
}

TEST_CASE("expansion reconstruction and annihilation") {
    std::mt19937_64 rng(5);
    const auto nu = SiteMeasure::geometric(3, 0.4);
    const Window w = make_window({Site(0), Site(1), Site(2)});
    for (int t = 0; t < 20; ++t) {
        const auto f = random_table(w, 3, rng);
        const auto em = expand_mu(f, nu);
        const auto eb = expand_base(f, 0);
        CHECK(max_abs_difference(em.reconstruct(3), f) < 1e-10);
        CHECK(max_abs_difference(eb.reconstruct(3), f) < 1e-10);
        for (unsigned mask = 0; mask < 8; ++mask) {
            Window sub;
            for (int i = 0; i < 3; ++i)
                if (mask & (1u << i)) sub.push_back(w[static_cast<std::size_t>(i)]);
            for (const auto& [lam, piece] : em.pieces)
                if (!window_includes(sub, lam)) CHECK(max_abs(conditional_expectation(piece, sub, nu)) < 1e-10);
        }
        for (const auto& [lam, piece] : eb.pieces) {
            const auto full = piece.extend(w);
            for (Code k = 0; k < full.size(); ++k)
                for (const Site& s : lam)
                    if (full.digit(k, full.position(s)) == 0) CHECK(std::abs(full[k]) < 1e-12);
        }
    }
}

TEST_CASE("expand_base examples") {
    const auto one = expand_base(FunctionTable::constant(2, 1.0), 0);
    REQUIRE(one.pieces.size() == 1);
    CHECK(one.pieces.begin()->first.empty());
    const auto xy = expand_base(product_xy(), 0);
    int nonzero = 0;
    for (const auto& [lam, piece] : xy.pieces)
        if (max_abs(piece) > 1e-15) {
            ++nonzero;
            CHECK(lam == kXY);
        }
    CHECK(nonzero == 1);
    const auto xi = FunctionTable::tabulate(Window{Site(4)}, 3, [](const std::vector<int>& s) { return double(s[0]); });
    for (const auto& [lam, piece] : expand_base(xi, 0).pieces)
        if (max_abs(piece) > 1e-15) CHECK(lam == Window{Site(4)});
}

TEST_CASE("renormalize") {
    std::mt19937_64 rng(9);
    const auto nu = SiteMeasure::geometric(3, 0.7);
    const Window w = make_window({Site(0), Site(1), Site(2)});
    for (int t = 0; t < 20; ++t) {
        auto f = random_table(w, 3, rng);
        auto g = f;
        for (auto& v : g.values()) v -= f[0];
        const auto lhs = renormalize(expand_base(g, 0), nu);
        auto centred = f;
        const double m = expectation(f, nu);
        for (auto& v : centred.values()) v -= m;
        auto rhs = expand_mu(centred, nu);
        rhs.pieces.erase(Window{});
        CHECK(max_piece_difference(lhs, rhs) < 1e-10);
        const auto back = unrenormalize(lhs, 0, 3);
        auto base = expand_base(g, 0);
        base.pieces.erase(Window{});
        CHECK(max_piece_difference(back, base) < 1e-10);
    }
    const auto zero = renormalize(expand_base(FunctionTable::zero(w, 3), 0), nu);
    for (const auto& [lam, piece] : zero.pieces) CHECK(max_abs(piece) < 1e-15);
    CHECK_THROWS_AS(renormalize(expand_base(FunctionTable::constant(3, 1.0), 0), nu), Error);
}

TEST_CASE("c_phi_nu") {
    CHECK(c_phi_nu(sep(2), SiteMeasure::geometric(3, 0.3)) == doctest::Approx(1.0));
    CHECK(c_phi_nu(gep(3), SiteMeasure::geometric(4, 0.3)) == doctest::Approx(1.0));
    const SiteMeasure nu({0.5, 0.25, 0.25});
    const auto phi = gep(2);
    double want = 1.0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            auto [c, d] = phi.apply(a, b);
            const double r = nu(c) * nu(d) / (nu(a) * nu(b));
            want = std::max({want, r, 1.0 / r});
        }
    CHECK(want == doctest::Approx(2.0));
    CHECK(c_phi_nu(phi, nu) == doctest::Approx(want));
}

TEST_CASE("rates") {
    const Locale X = path_locale(3);
    CHECK(is_reversible(trivial_rate(X, 3), SiteMeasure::uniform(3), sep(2), X));
    const auto geo = canonical_rate(SiteMeasure::geometric(3, 0.5), gep(2), X);
    for (const auto& t : geo.edge)
        for (double v : t.values()) CHECK(v == doctest::Approx(1.0));
    const SiteMeasure skew({0.5, 0.25, 0.25});
    const auto r = canonical_rate(skew, gep(2), X);
    CHECK(is_reversible(r, skew, gep(2), X));
    double lo = 1e9, hi = 0;
    for (const auto& t : r.edge)
        for (double v : t.values()) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    CHECK(hi - lo > 0.1);
    CHECK_FALSE(is_reversible(trivial_rate(X, 3), skew, gep(2), X));

    const auto triv = rate_bounds(trivial_rate(X, 3), skew, gep(2), X, 0);
    CHECK(triv.M == doctest::Approx(1.0));
    CHECK(triv.A == doctest::Approx(c_phi_nu(gep(2), skew)));
    for (int e = 0; e < X.num_edges(); ++e) {
        const auto b = rate_bounds(r, skew, gep(2), X, e);
        CHECK(b.A == doctest::Approx(1.0));
        const auto bb = rate_bounds(r, skew, gep(2), X, X.reverse(e));
        CHECK(b.A <= b.M * bb.M * c_phi_nu(gep(2), skew) + 1e-12);
    }
}

TEST_CASE("nabla bounds on random functions") {
    std::mt19937_64 rng(13);
    const Locale X = path_locale(3);
    const SiteMeasure skew({0.5, 0.25, 0.25});
    const auto phi = gep(2);
    const ConfigSpace space(X, phi);
    const double C = c_phi_nu(phi, skew);
    for (const Rate& r : {trivial_rate(X, 3), canonical_rate(skew, phi, X)}) {
        const bool rev = is_reversible(r, skew, phi, X);
        for (int t = 0; t < 10; ++t) {
            const auto f = random_table(X.sites(), 3, rng);
            const Form df = differential(space, f);
            for (int e = 0; e < X.num_edges(); ++e) {
                const int eb = X.reverse(e);
                const auto be = rate_bounds(r, skew, phi, X, e);
                const auto bb = rate_bounds(r, skew, phi, X, eb);
                const double ne = std::pow(edge_norm(space, df, e, skew, &r), 2);
                const double nb = std::pow(edge_norm(space, df, eb, skew, &r), 2);
                CHECK(ne <= 4 * be.M * C * std::pow(mu_norm(f, skew), 2) + 1e-12);
                CHECK(ne <= be.A * nb * (1 + 1e-12) + 1e-12);
                CHECK(nb / bb.A <= ne * (1 + 1e-12) + 1e-12);
                if (rev) CHECK(ne == doctest::Approx(nb));
            }
        }
    }
}
