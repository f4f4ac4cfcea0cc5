#include "vardec/spectral.hpp"
#include "vardec/varadhan.hpp"

#include <doctest.h>

#include <limits>
#include <random>

using namespace vardec;

namespace {

FunctionTable random_table(const Window& w, int S, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    return FunctionTable::tabulate(w, S, [&](const std::vector<int>&) { return g(rng); });
}

double max_abs_form(const ShiftInvariantForm& w) {
    double m = 0.0;
    for (const auto& t : w.rep) m = std::max(m, max_abs(t));
    return m;
}

} // namespace

TEST_CASE("current_form values") {
    const auto g = gep(2);
    const auto cg = current_form({0, 1, 2}, 0, 1, g);
    const auto& t = cg.rep[0];
    CHECK(t[t.encode({2, 0})] == 1.0);
    const auto s = sep(1);
    const auto cs = current_form({0, 1}, 0, 1, s);
    CHECK(cs.rep[0][cs.rep[0].encode({1, 0})] == 1.0);
    CHECK(cs.rep[0][cs.rep[0].encode({0, 1})] == -1.0);
    CHECK(cs.rep[0][cs.rep[0].encode({1, 1})] == 0.0);
    CHECK(cs.rep[0][cs.rep[0].encode({0, 0})] == 0.0);
    const auto c2 = current_form({0, 1}, 0, 2, s);
    CHECK(max_abs(c2.rep[1]) == 0.0);
    CHECK(check_representatives(c2, s).ok);
}

TEST_CASE("edge_value on reverse edges alternates") {
    const auto phi = gep(2);
    const auto w = current_form({0, 1, 2}, 0, 1, phi);
    const LatticeEdge fwd{Site(3), Site(4)}, back{Site(4), Site(3)};
    const auto a = edge_value(w, fwd, phi);
    const auto b = edge_value(w, back, phi);
    for (Code c = 0; c < a.size(); ++c) {
        const Code d = a.transition(c, a.position(Site(3)), a.position(Site(4)), phi);
        if (d != c) CHECK(b[d] == doctest::Approx(-a[c]));
    }
}

TEST_CASE("gamma_differential") {
    const auto phi = sep(1);
    CHECK(max_abs(gamma_differential(FunctionTable::constant(2, 4.0), 0, phi)) == 0.0);
    const auto xi = FunctionTable::tabulate(Window{Site(0)}, 2, [](const std::vector<int>& s) { return double(s[0]); });
    CHECK(max_abs(gamma_differential(xi, 0, phi)) < 1e-15);
    const auto prod = FunctionTable::tabulate(make_window({Site(0), Site(1)}), 2,
                                              [](const std::vector<int>& s) { return double(s[0] * s[1]); });
    const auto g = gamma_differential(prod, 0, phi);
    CHECK(g.window() == make_window({Site(-1), Site(0), Site(1), Site(2)}));
    // Σ_x ∇_{(0,1)}(η_x η_{x+1}) swaps η_0, η_1: only the bonds (-1,0) and (1,2) change.
    for (Code c = 0; c < g.size(); ++c) {
        const auto s = g.decode(c);
        const double want = (s[0] * s[2] + s[1] * s[3]) - (s[0] * s[1] + s[2] * s[3]);
        CHECK(g[c] == doctest::Approx(want));
    }
}

TEST_CASE("closedness of shift-invariant forms") {
    std::mt19937_64 rng(37);
    const auto phi = gep(2);
    const auto nu = SiteMeasure::geometric(3, 0.5);
    const auto cur = current_form({0, 1, 2}, 0, 1, phi);
    CHECK(is_closed_shift_invariant(cur, phi, nu));
    const auto ex = exact_form(random_table(make_window({Site(0), Site(1)}), 3, rng), 1, phi);
    CHECK(is_closed_shift_invariant(ex, phi, nu));
    auto bad = cur;
    auto& t = bad.rep[0];
    t = t.extend(make_window({Site(0), Site(1), Site(2)}));
    for (Code c = 0; c < t.size(); ++c)
        if (t.digit(c, 2) == 1 && t[c] != 0.0) t[c] *= 1.5;
    REQUIRE(check_representatives(bad, phi).ok);
    CHECK_FALSE(is_closed_shift_invariant(bad, phi, nu));
}

TEST_CASE("project_to_box") {
    const auto phi = sep(1);
    const auto nu = SiteMeasure::uniform(2);
    const ConfigSpace p2(path_locale(2), phi);
    const Form c = project_to_box(current_form({0, 1}, 0, 1, phi), p2, nu);
    CHECK(is_closed(p2, c));
    std::mt19937_64 rng(41);
    const ConfigSpace p4(path_locale(4), phi);
    const auto f = random_table(make_window({Site(0), Site(1)}), 2, rng);
    const Form e = project_to_box(exact_form(f, 1, phi), p4, nu);
    CHECK(is_closed(p4, e));
    CHECK_NOTHROW(solve_potential(p4, e));
    CHECK(sp_norm(p2, project_to_box(ShiftInvariantForm::zero(1, 2), p2, nu), nu) == 0.0);
    const auto wide = exact_form(random_table(make_window({Site(0), Site(1), Site(2)}), 2, rng), 1, phi);
    try {
        project_to_box(wide, p2, nu);
        FAIL("expected WindowExceedsBox");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::WindowExceedsBox);
    }
}

TEST_CASE("uniform_supports counts") {
    CHECK(uniform_supports(1, 1).size() == 2);
    CHECK(uniform_supports(1, 2).size() == 4);
    CHECK(uniform_supports(1, 3).size() == 8);
    CHECK(uniform_supports(2, 1).size() == 3);
    CHECK(uniform_supports(2, 2).size() == 24);
}

TEST_CASE("decompose: current of the generalized exclusion") {
    const auto phi = gep(2);
    const auto nu = SiteMeasure::geometric(3, 0.5);
    const auto basis = conserved_basis(phi);
    DecomposeOptions opt;
    opt.radius = 1;
    const auto r = decompose(current_form(basis.as_real()[0], 0, 1, phi), basis, phi, nu, opt);
    CHECK(std::abs(r.a(0, 0) - 1.0) < 1e-10);
    CHECK(max_abs(r.f) < 1e-10);
    CHECK(r.residual[0] < 1e-10);
    CHECK(r.closed_checked);
    CHECK(r.warnings.empty());
}

TEST_CASE("decompose: exact forms in two dimensions") {
    std::mt19937_64 rng(43);
    const auto phi = sep(2);
    const auto nu = SiteMeasure::uniform(3);
    const auto basis = conserved_basis(phi);
    const auto f0 = random_table(make_window({Site(0, 0), Site(1, 0)}), 3, rng);
    DecomposeOptions opt;
    opt.radius = 1;
    const auto r = decompose(exact_form(f0, 2, phi), basis, phi, nu, opt);
    CHECK(r.a.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(r.residual[0] < 1e-10);
    CHECK(r.residual[1] < 1e-10);
    CHECK(r.gauge_dim == r.unknowns - r.rank);
    CHECK(std::abs(expectation(r.f, nu)) < 1e-10);
}

TEST_CASE("decompose: zero form and error paths") {
    const auto phi = sep(1);
    const auto nu = SiteMeasure::uniform(2);
    const auto basis = conserved_basis(phi);
    DecomposeOptions opt;
    const auto z = decompose(ShiftInvariantForm::zero(1, 2), basis, phi, nu, opt);
    CHECK(z.a.cwiseAbs().maxCoeff() == 0.0);
    CHECK(max_abs(z.f) == 0.0);

    auto bad = current_form({0, 1}, 0, 1, phi);
    bad.rep[0] = bad.rep[0].extend(make_window({Site(0), Site(1), Site(2)}));
    for (Code c = 0; c < bad.rep[0].size(); ++c)
        if (bad.rep[0].digit(c, 2) == 1) bad.rep[0][c] *= 2.0;
    CHECK_THROWS_AS(decompose(bad, basis, phi, nu, opt), Error);

    auto fixed = current_form({0, 1}, 0, 1, phi);
    fixed.rep[0][0] = 1.0;
    try {
        decompose(fixed, basis, phi, nu, opt);
        FAIL("expected InvalidForm");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidForm);
    }

    const auto s2 = sep(2);
    const auto r = decompose(ShiftInvariantForm::zero(1, 3), conserved_basis(s2), s2, SiteMeasure::uniform(3), opt);
    CHECK(r.warnings.size() == 1);
}

TEST_CASE("delta_map") {
    for (const auto& t : delta_map(FunctionTable::constant(3, 2.0), 2)) CHECK(max_abs(t) == 0.0);
    // f = Σ_{x=0..3} x η_x; f − τ_1 f = η_1 + η_2 + η_3 − 3 η_4 on {0..4}.
    const Window w = make_window({Site(0), Site(1), Site(2), Site(3)});
    const auto a = FunctionTable::tabulate(w, 3, [](const std::vector<int>& s) {
        double v = 0;
        for (int x = 0; x < 4; ++x) v += x * s[static_cast<std::size_t>(x)];
        return v;
    });
    const auto d = delta_map(a, 1)[0];
    CHECK(d.window() == make_window({Site(0), Site(1), Site(2), Site(3), Site(4)}));
    for (Code c = 0; c < d.size(); ++c) {
        const auto s = d.decode(c);
        const double want = s[1] + s[2] + s[3] - 3.0 * s[4];
        CHECK(d[c] == doctest::Approx(want));
    }
}

TEST_CASE("psi_sequence") {
    std::mt19937_64 rng(53);
    const auto phi = sep(1);
    const auto nu = SiteMeasure::uniform(2);
    const auto basis = conserved_basis(phi);
    auto w = exact_form(random_table(make_window({Site(0), Site(1)}), 2, rng), 1, phi);
    auto cur = current_form(basis.as_real()[0], 0, 1, phi);
    cur *= 0.5;
    w += cur;
    const double C = dagger_constant(phi, nu, estimate_csg(phi, nu, 5));
    for (int n = 1; n <= 3; ++n) {
        const auto s = psi_sequence(w, phi, nu, n);
        CHECK(s.identity_error < 1e-10);
        CHECK(boundary_bound_ratio(s, 1, C) <= 1.0);
        CHECK(s.lambda.size() == static_cast<std::size_t>(2 * n + 1));
        CHECK(s.sigma.size() == static_cast<std::size_t>(4 * n + 1));
    }
    const auto z = psi_sequence(ShiftInvariantForm::zero(1, 2), phi, nu, 2);
    CHECK(max_abs_form(z.dpsi) == 0.0);
    CHECK(max_abs_form(z.omega_dagger) == 0.0);

    // A one-site f is conserved by swaps, so its exact form vanishes.
    const auto f1 = random_table(Window{Site(0)}, 2, rng);
    CHECK(max_abs_form(exact_form(f1, 1, phi)) < 1e-15);
    // The ω† part shrinks relative to ω as the boxes grow.
    const auto ex = exact_form(random_table(make_window({Site(0), Site(1)}), 2, rng), 1, phi);
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= 3; ++n) {
        const auto sn = psi_sequence(ex, phi, nu, n);
        CHECK(sn.identity_error < 1e-10);
        REQUIRE(sn.omega_sp > 0.0);
        const double dag = *std::max_element(sn.dagger_norm.begin(), sn.dagger_norm.end()) / sn.omega_sp;
        MESSAGE("n=" << n << " dagger/sp=" << dag);
        CHECK(dag <= prev + 1e-12);
        prev = dag;
    }
}

TEST_CASE("locality_probe") {
    const auto phi = sep(1);
    const auto nu = SiteMeasure::uniform(2);
    const Window lam = make_window({Site(-1), Site(0)});
    const Window lamp = make_window({Site(1), Site(2)});
    const auto in_lam = FunctionTable::tabulate(lam, 2, [](const std::vector<int>& s) { return s[0] + 2.0 * s[1]; });
    CHECK(locality_probe(in_lam, lam, lamp, 1, phi, nu));
    const auto eta_y = FunctionTable::tabulate(Window{Site(1)}, 2, [](const std::vector<int>& s) { return double(s[0]); });
    CHECK_FALSE(locality_probe(eta_y, lam, lamp, 1, phi, nu));
    const auto count = FunctionTable::tabulate(lamp, 2, [](const std::vector<int>& s) { return double(s[0] + s[1]); });
    REQUIRE(is_class_measurable(count.extend(window_union(lam, lamp)), lamp, phi));
    CHECK(locality_probe(count, lam, lamp, 1, phi, nu));
    CHECK_THROWS_AS(locality_probe(count, lam, lam, 1, phi, nu), Error);
}
