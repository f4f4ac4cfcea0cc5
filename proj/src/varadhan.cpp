#include "vardec/varadhan.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

namespace vardec {

namespace {

void check_shape(const ShiftInvariantForm& w) {
    if (w.d < 1 || w.d > 3) throw Error(ErrorKind::InvalidForm, "dimension must be 1, 2 or 3");
    if (static_cast<int>(w.rep.size()) != w.d)
        throw Error(ErrorKind::InvalidForm, "need one representative table per direction");
    for (const auto& t : w.rep)
        if (t.num_states() != w.num_states)
            throw Error(ErrorKind::InvalidForm, "representative table has the wrong number of states");
}

Window edge_window(const Site& o, const Site& t) { return make_window({o, t}); }

// Direction j and sign of a nearest-neighbour step.
std::pair<int, int> direction_of(const Site& delta, int d) {
    for (int j = 0; j < d; ++j)
        for (int sign : {1, -1})
            if (delta == unit(j, sign)) return {j, sign};
    throw Error(ErrorKind::InvalidInput, "not a nearest-neighbour edge of Z^" + std::to_string(d));
}

// Per-axis extent max - min + 1 of a set of sites.
std::array<int, 3> extent(const Window& w) {
    std::array<int, 3> e{0, 0, 0};
    if (w.empty()) return e;
    for (int i = 0; i < 3; ++i) {
        int lo = w.front()[i], hi = w.front()[i];
        for (const Site& s : w) {
            lo = std::min(lo, s[i]);
            hi = std::max(hi, s[i]);
        }
        e[static_cast<std::size_t>(i)] = hi - lo + 1;
    }
    return e;
}

Form project_impl(const ShiftInvariantForm& w, const ConfigSpace& box, const SiteMeasure& nu, bool checked) {
    check_shape(w);
    if (box.num_states() != w.num_states) throw Error(ErrorKind::InvalidInput, "form and box disagree on |S|");
    const Locale& X = box.locale();
    if (checked) {
        const auto box_ext = extent(X.sites());
        for (const auto& t : w.rep) {
            const auto e = extent(t.window());
            for (int i = 0; i < w.d; ++i)
                if (e[static_cast<std::size_t>(i)] > box_ext[static_cast<std::size_t>(i)])
                    throw Error(ErrorKind::WindowExceedsBox,
                                "representative window is wider than the box along axis " + std::to_string(i));
        }
    }
    Form out = Form::zero(box);
    for (int e = 0; e < X.num_edges(); ++e) {
        const LatticeEdge le{X.site(X.edge(e).o), X.site(X.edge(e).t)};
        out.values[static_cast<std::size_t>(e)] =
            conditional_expectation(edge_value(w, le, box.interaction()), X.sites(), nu).values();
    }
    return out;
}

} // namespace

ShiftInvariantForm ShiftInvariantForm::zero(int d, int num_states) {
    ShiftInvariantForm w;
    w.d = d;
    w.num_states = num_states;
    for (int j = 0; j < d; ++j) w.rep.push_back(FunctionTable::zero(edge_window(Site(), unit(j)), num_states));
    return w;
}

ShiftInvariantForm& ShiftInvariantForm::operator+=(const ShiftInvariantForm& other) {
    check_shape(*this);
    check_shape(other);
    if (other.d != d || other.num_states != num_states)
        throw Error(ErrorKind::InvalidForm, "forms live on different spaces");
    for (int j = 0; j < d; ++j) rep[static_cast<std::size_t>(j)] += other.rep[static_cast<std::size_t>(j)];
    return *this;
}

ShiftInvariantForm& ShiftInvariantForm::operator*=(double a) {
    for (auto& t : rep) t *= a;
    return *this;
}

std::vector<LatticeEdge> orbit_representatives(int d) {
    std::vector<LatticeEdge> out;
    for (int j = 0; j < d; ++j) out.push_back({Site(), unit(j)});
    for (int j = 0; j < d; ++j) out.push_back({Site(), unit(j, -1)});
    return out;
}

FunctionTable edge_value(const ShiftInvariantForm& w, const LatticeEdge& e, const InteractionTable& phi) {
    check_shape(w);
    const auto [j, sign] = direction_of(e.t - e.o, w.d);
    const FunctionTable& rep = w.rep[static_cast<std::size_t>(j)];
    if (sign > 0) {
        FunctionTable g = rep.translate(e.o);
        return g.extend(window_union(g.window(), edge_window(e.o, e.t)));
    }
    // ē = (t, o) is the translate of e_j by t.
    FunctionTable g = rep.translate(e.t);
    const Window win = window_union(g.window(), edge_window(e.o, e.t));
    g = g.extend(win);
    FunctionTable out = FunctionTable::zero(win, w.num_states);
    const int io = g.position(e.o);
    const int it = g.position(e.t);
    for (Code c = 0; c < out.size(); ++c) {
        const Code c2 = g.transition(c, io, it, phi);
        out[c] = c2 == c ? 0.0 : -g[c2];
    }
    return out;
}

AlternationReport check_representatives(const ShiftInvariantForm& w, const InteractionTable& phi, double tol) {
    AlternationReport r;
    try {
        check_shape(w);
    } catch (const Error& err) {
        r.ok = false;
        r.first_violation = err.what();
        return r;
    }
    if (phi.num_states() != w.num_states) {
        r.ok = false;
        r.first_violation = "form and interaction disagree on |S|";
        return r;
    }
    double scale = 1.0;
    for (const auto& t : w.rep) scale = std::max(scale, max_abs(t));
    const double eps = tol * scale;
    for (int j = 0; j < w.d; ++j) {
        const FunctionTable& rep = w.rep[static_cast<std::size_t>(j)];
        const FunctionTable t = rep.extend(window_union(rep.window(), edge_window(Site(), unit(j))));
        const int p0 = t.position(Site());
        const int p1 = t.position(unit(j));
        for (Code c = 0; c < t.size(); ++c) {
            const Code fwd = t.transition(c, p0, p1, phi);
            if (fwd == c) {
                if (std::abs(t[c]) > eps) {
                    r.ok = false;
                    r.first_violation = "direction " + std::to_string(j) + " nonzero on fixed configuration " +
                                        std::to_string(c);
                    return r;
                }
                continue;
            }
            const Code back = t.transition(c, p1, p0, phi);
            if (back == fwd && std::abs(t[c] + t[back]) > eps) {
                r.ok = false;
                r.first_violation = "direction " + std::to_string(j) +
                                    " disagrees with the reverse edge at configuration " + std::to_string(c);
                return r;
            }
        }
    }
    return r;
}

ShiftInvariantForm current_form(const std::vector<double>& xi, int j, int d, const InteractionTable& phi) {
    const int S = phi.num_states();
    if (static_cast<int>(xi.size()) != S) throw Error(ErrorKind::InvalidInput, "ξ must have one entry per state");
    if (j < 0 || j >= d) throw Error(ErrorKind::InvalidInput, "direction out of range");
    ShiftInvariantForm w = ShiftInvariantForm::zero(d, S);
    w.rep[static_cast<std::size_t>(j)] =
        FunctionTable::tabulate(edge_window(Site(), unit(j)), S, [&](const std::vector<int>& s) {
            const int b2 = phi.apply(s[0], s[1]).second;
            return xi[static_cast<std::size_t>(b2)] - xi[static_cast<std::size_t>(s[1])];
        });
    return w;
}

FunctionTable gamma_differential(const FunctionTable& f, int j, const InteractionTable& phi) {
    const Site o;
    const Site t = unit(j);
    const Window& T = f.window();
    std::vector<Site> shifts;
    for (const Site& s : T) {
        shifts.push_back(o - s);
        shifts.push_back(t - s);
    }
    std::sort(shifts.begin(), shifts.end());
    shifts.erase(std::unique(shifts.begin(), shifts.end()), shifts.end());
    Window win = edge_window(o, t);
    for (const Site& x : shifts) win = window_union(win, translate_window(T, x));
    FunctionTable out = FunctionTable::zero(win, f.num_states());
    const int io = out.position(o);
    const int it = out.position(t);
    for (const Site& x : shifts) {
        const FunctionTable g = f.translate(x).extend(win);
        for (Code c = 0; c < out.size(); ++c) out[c] += g[out.transition(c, io, it, phi)] - g[c];
    }
    return out;
}

ShiftInvariantForm exact_form(const FunctionTable& f, int d, const InteractionTable& phi) {
    ShiftInvariantForm w = ShiftInvariantForm::zero(d, phi.num_states());
    for (int j = 0; j < d; ++j) w.rep[static_cast<std::size_t>(j)] = gamma_differential(f, j, phi);
    return w;
}

Form project_to_box(const ShiftInvariantForm& w, const ConfigSpace& box, const SiteMeasure& nu) {
    return project_impl(w, box, nu, true);
}

Form project_to_box_averaged(const ShiftInvariantForm& w, const ConfigSpace& box, const SiteMeasure& nu) {
    return project_impl(w, box, nu, false);
}

std::vector<Locale> test_boxes(int d, int num_states, std::uint64_t max_configs) {
    std::vector<Locale> out;
    std::vector<int> widths(static_cast<std::size_t>(d), 2);
    auto fits = [&](int sites) {
        long double n = 1;
        for (int i = 0; i < sites; ++i) n *= num_states;
        return n <= static_cast<long double>(max_configs);
    };
    std::function<void(int, int)> rec = [&](int axis, int sites) {
        if (axis == d) {
            out.push_back(rect_locale(widths));
            return;
        }
        for (int wdt = 2; fits(sites * wdt); ++wdt) {
            widths[static_cast<std::size_t>(axis)] = wdt;
            rec(axis + 1, sites * wdt);
        }
    };
    rec(0, 1);
    return out;
}

bool is_closed_shift_invariant(const ShiftInvariantForm& w, const InteractionTable& phi, const SiteMeasure& nu,
                               std::uint64_t max_configs) {
    const auto boxes = test_boxes(w.d, w.num_states, max_configs);
    if (boxes.empty()) throw Error(ErrorKind::BudgetExceeded, "no test box fits the configuration budget");
    for (const Locale& X : boxes) {
        const ConfigSpace space(X, phi, max_configs);
        if (!is_closed(space, project_to_box_averaged(w, space, nu))) return false;
    }
    return true;
}

std::vector<Window> uniform_supports(int d, int radius) {
    if (radius < 0) throw Error(ErrorKind::InvalidInput, "radius must be nonnegative");
    std::vector<Site> cand;
    std::function<void(int, Site, int)> gen = [&](int axis, Site s, int left) {
        if (axis == d) {
            if (Site() < s) cand.push_back(s);
            return;
        }
        for (int v = -left; v <= left; ++v) {
            Site t = s;
            t[axis] = v;
            gen(axis + 1, t, left - std::abs(v));
        }
    };
    gen(0, Site(), radius);
    std::sort(cand.begin(), cand.end());
    std::vector<Window> out;
    Window cur{Site()};
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
        out.push_back(cur);
        for (std::size_t i = from; i < cand.size(); ++i) {
            bool ok = true;
            for (const Site& s : cur)
                if (l1_distance(s, cand[i]) > radius) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            cur.push_back(cand[i]);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

namespace {

// Orthonormal basis of L²(ν): φ_0 = 1, then Gram–Schmidt on indicators of 1..S-1.
Eigen::MatrixXd orthonormal_basis(const SiteMeasure& nu) {
    const int S = nu.size();
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(S, S);
    auto ip = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
        double s = 0.0;
        for (int a = 0; a < S; ++a) s += nu(a) * u(a) * v(a);
        return s;
    };
    for (int k = 0; k < S; ++k) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(S);
        if (k == 0)
            v.setOnes();
        else
            v(k) = 1.0;
        for (int i = 0; i < k; ++i) {
            const Eigen::VectorXd bi = B.row(i).transpose();
            v -= ip(v, bi) * bi;
        }
        B.row(k) = v.transpose() / std::sqrt(ip(v, v));
    }
    return B;
}

// Coefficients in the product basis; entry at code c is the coefficient of the
// monomial whose level at window position i is digit i of c.
std::vector<double> to_coefficients(const FunctionTable& g, const Eigen::MatrixXd& analysis) {
    const int S = g.num_states();
    std::vector<double> v = g.values();
    std::vector<double> tmp(static_cast<std::size_t>(S));
    for (int i = 0; i < g.num_sites(); ++i) {
        const Code st = g.stride(i);
        for (Code c = 0; c < g.size(); ++c) {
            if (g.digit(c, i) != 0) continue;
            for (int s = 0; s < S; ++s) tmp[static_cast<std::size_t>(s)] = v[c + static_cast<Code>(s) * st];
            for (int k = 0; k < S; ++k) {
                double acc = 0.0;
                for (int s = 0; s < S; ++s) acc += analysis(k, s) * tmp[static_cast<std::size_t>(s)];
                v[c + static_cast<Code>(k) * st] = acc;
            }
        }
    }
    return v;
}

using Monomial = std::vector<std::pair<Site, int>>;  // sorted by site, levels >= 1

std::vector<int> row_key(int j, const Monomial& m) {
    std::vector<int> key{j};
    for (const auto& [s, k] : m) {
        key.insert(key.end(), {s[0], s[1], s[2], k});
    }
    return key;
}

constexpr double kCoefficientCut = 1e-14;

} // namespace

DecompositionResult decompose(const ShiftInvariantForm& w, const ConsvBasis& basis, const InteractionTable& phi,
                              const SiteMeasure& nu, const DecomposeOptions& opt) {
    const auto alt = check_representatives(w, phi);
    if (!alt.ok) throw Error(ErrorKind::InvalidForm, alt.first_violation);
    if (nu.size() != phi.num_states()) throw Error(ErrorKind::InvalidInput, "measure and interaction disagree on |S|");
    const int S = phi.num_states();
    const int d = w.d;
    const int c = basis.dimension();

    DecompositionResult res;
    if (d == 1 && !is_simple(phi))
        res.warnings.push_back("interaction is not simple; the decomposition is not guaranteed in d = 1");
    if (opt.check_closed) {
        try {
            if (!is_closed_shift_invariant(w, phi, nu, opt.closed_check_configs))
                throw Error(ErrorKind::NotClosed, "form has a nonzero cycle integral on a test box");
            res.closed_checked = true;
        } catch (const Error& err) {
            if (err.kind() != ErrorKind::BudgetExceeded) throw;
            res.warnings.push_back("closedness not checked: no test box fits the budget");
        }
    }

    const Eigen::MatrixXd B = orthonormal_basis(nu);
    Eigen::MatrixXd analysis = B;
    for (int k = 0; k < S; ++k)
        for (int s = 0; s < S; ++s) analysis(k, s) *= nu(s);

    // Two-site coefficient transform of ∇(φ_{k0} ⊗ φ_{k1}) along (0, 1_j).
    const Window pair = edge_window(Site(), unit(0));
    std::vector<std::vector<double>> grad(static_cast<std::size_t>(S * S));
    for (int k0 = 0; k0 < S; ++k0)
        for (int k1 = 0; k1 < S; ++k1) {
            const FunctionTable g = FunctionTable::tabulate(pair, S, [&](const std::vector<int>& s) {
                const auto [a2, b2] = phi.apply(s[0], s[1]);
                return B(k0, a2) * B(k1, b2) - B(k0, s[0]) * B(k1, s[1]);
            });
            grad[static_cast<std::size_t>(k0 * S + k1)] = to_coefficients(g, analysis);
        }

    // Unknowns: the c·d current coefficients, then one column per monomial.
    std::vector<Monomial> monomials;
    const auto supports = uniform_supports(d, opt.radius);
    Window fwin;
    for (const Window& T : supports) {
        fwin = window_union(fwin, T);
        std::vector<int> lv(T.size(), 1);
        while (true) {
            Monomial m;
            for (std::size_t i = 0; i < T.size(); ++i) m.emplace_back(T[i], lv[i]);
            monomials.push_back(std::move(m));
            std::size_t i = 0;
            while (i < lv.size() && lv[i] == S - 1) lv[i++] = 1;
            if (i == lv.size()) break;
            ++lv[i];
        }
    }
    const int na = c * d;
    const int n = na + static_cast<int>(monomials.size());
    res.unknowns = n;
    if (n > opt.max_unknowns)
        throw Error(ErrorKind::BudgetExceeded,
                    std::to_string(n) + " unknowns exceed the limit " + std::to_string(opt.max_unknowns));

    std::map<std::vector<int>, int> rows;
    auto row_of = [&](const std::vector<int>& key) {
        auto it = rows.find(key);
        if (it != rows.end()) return it->second;
        const int r = static_cast<int>(rows.size());
        rows.emplace(key, r);
        return r;
    };
    std::vector<std::map<int, double>> cols(static_cast<std::size_t>(n));

    auto add_pair = [&](int col, int j, const Monomial& rest, const std::vector<double>& coef) {
        for (int a = 0; a < S; ++a)
            for (int b = 0; b < S; ++b) {
                const double v = coef[static_cast<std::size_t>(a + b * S)];
                if (std::abs(v) <= kCoefficientCut) continue;
                Monomial m = rest;
                if (a) m.emplace_back(Site(), a);
                if (b) m.emplace_back(unit(j), b);
                std::sort(m.begin(), m.end());
                cols[static_cast<std::size_t>(col)][row_of(row_key(j, m))] += v;
            }
    };

    const auto xi = basis.as_real();
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < d; ++j) {
            const ShiftInvariantForm cur = current_form(xi[static_cast<std::size_t>(i)], j, d, phi);
            add_pair(i * d + j, j, {}, to_coefficients(cur.rep[static_cast<std::size_t>(j)], analysis));
        }

    for (std::size_t mi = 0; mi < monomials.size(); ++mi) {
        const Monomial& m = monomials[mi];
        const int col = na + static_cast<int>(mi);
        for (int j = 0; j < d; ++j) {
            const Site t = unit(j);
            std::vector<Site> shifts;
            for (const auto& [s, k] : m) {
                shifts.push_back(Site() - s);
                shifts.push_back(t - s);
            }
            std::sort(shifts.begin(), shifts.end());
            shifts.erase(std::unique(shifts.begin(), shifts.end()), shifts.end());
            for (const Site& x : shifts) {
                int k0 = 0, k1 = 0;
                Monomial rest;
                for (const auto& [s, k] : m) {
                    const Site y = s + x;
                    if (y == Site())
                        k0 = k;
                    else if (y == t)
                        k1 = k;
                    else
                        rest.emplace_back(y, k);
                }
                add_pair(col, j, rest, grad[static_cast<std::size_t>(k0 * S + k1)]);
            }
        }
    }

    std::vector<std::pair<int, double>> rhs_entries;
    for (int j = 0; j < d; ++j) {
        const FunctionTable& t = w.rep[static_cast<std::size_t>(j)];
        const auto coef = to_coefficients(t, analysis);
        for (Code code = 0; code < t.size(); ++code) {
            if (std::abs(coef[code]) <= kCoefficientCut) continue;
            Monomial m;
            for (int p = 0; p < t.num_sites(); ++p)
                if (const int k = t.digit(code, p)) m.emplace_back(t.window()[static_cast<std::size_t>(p)], k);
            rhs_entries.emplace_back(row_of(row_key(j, m)), coef[code]);
        }
    }

    const int nrows = static_cast<int>(rows.size());
    std::vector<std::vector<std::pair<int, double>>> by_row(static_cast<std::size_t>(nrows));
    for (int col = 0; col < n; ++col)
        for (const auto& [r, v] : cols[static_cast<std::size_t>(col)]) by_row[static_cast<std::size_t>(r)].emplace_back(col, v);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(nrows);
    for (const auto& [r, v] : rhs_entries) b(r) += v;

    Eigen::MatrixXd N = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int r = 0; r < nrows; ++r) {
        const auto& row = by_row[static_cast<std::size_t>(r)];
        for (const auto& [c1, v1] : row) {
            rhs(c1) += v1 * b(r);
            for (const auto& [c2, v2] : row) N(c1, c2) += v1 * v2;
        }
    }

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(N);
    const Eigen::VectorXd& lam = es.eigenvalues();
    const Eigen::MatrixXd& V = es.eigenvectors();
    const double lmax = n > 0 ? std::max(lam.maxCoeff(), 0.0) : 0.0;
    const double cut = opt.rank_tol * lmax;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k) {
        if (lam(k) > cut && lmax > 0.0) {
            inv(k) = 1.0 / lam(k);
            ++res.rank;
        } else {
            for (int i = 0; i < na; ++i)
                if (std::abs(V(i, k)) > 1e-6)
                    throw Error(ErrorKind::IllConditioned,
                                "current coefficients are not determined by the form");
        }
    }
    res.gauge_dim = n - res.rank;
    auto pinv = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        return V * inv.cwiseProduct(V.transpose() * y);
    };
    Eigen::VectorXd x = pinv(rhs);
    for (int step = 0; step < 2; ++step) x += pinv(rhs - N * x);

    res.a = Eigen::MatrixXd::Zero(c, d);
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < d; ++j) res.a(i, j) = x(i * d + j);

    Eigen::VectorXd resid = b;
    for (int r = 0; r < nrows; ++r)
        for (const auto& [col, v] : by_row[static_cast<std::size_t>(r)]) resid(r) -= v * x(col);
    res.residual.assign(static_cast<std::size_t>(d), 0.0);
    for (const auto& [key, r] : rows) res.residual[static_cast<std::size_t>(key[0])] += resid(r) * resid(r);
    for (double& v : res.residual) v = std::sqrt(v);

    config_count(S, fwin.size());
    res.f = FunctionTable::zero(fwin, S);
    for (std::size_t mi = 0; mi < monomials.size(); ++mi) {
        const double coef = x(na + static_cast<int>(mi));
        if (std::abs(coef) <= kCoefficientCut) continue;
        std::vector<std::pair<int, int>> pos;
        for (const auto& [s, k] : monomials[mi]) pos.emplace_back(res.f.position(s), k);
        for (Code code = 0; code < res.f.size(); ++code) {
            double v = coef;
            for (const auto& [p, k] : pos) v *= B(k, res.f.digit(code, p));
            res.f[code] += v;
        }
    }
    return res;
}

std::vector<FunctionTable> delta_map(const FunctionTable& f, int d) {
    std::vector<FunctionTable> out;
    for (int j = 0; j < d; ++j) out.push_back(f - f.translate(unit(j)));
    return out;
}

namespace {

struct OrbitSums {
    FunctionTable inner, plus, minus;
};

// Σ τ_{-o} ∇_{(o, o+δ)} P over edges inside Λ, leaving Λ and entering Λ.
OrbitSums orbit_sums(const FunctionTable& P, const Window& lambda, const Site& delta, const InteractionTable& phi) {
    const int S = P.num_states();
    OrbitSums out{FunctionTable::constant(S, 0.0), FunctionTable::constant(S, 0.0), FunctionTable::constant(S, 0.0)};
    Window origins = window_union(lambda, translate_window(lambda, Site() - delta));
    for (const Site& o : origins) {
        const Site t = o + delta;
        const bool in_o = std::binary_search(lambda.begin(), lambda.end(), o);
        const bool in_t = std::binary_search(lambda.begin(), lambda.end(), t);
        const FunctionTable g = nabla(P, o, t, phi).translate(Site() - o);
        if (in_o && in_t)
            out.inner += g;
        else if (in_o)
            out.plus += g;
        else
            out.minus += g;
    }
    return out;
}

} // namespace

PsiSequenceStep psi_sequence(const ShiftInvariantForm& w, const InteractionTable& phi, const SiteMeasure& nu,
                             int n, std::uint64_t budget) {
    check_shape(w);
    if (n < 1) throw Error(ErrorKind::InvalidInput, "n must be at least 1");
    const int d = w.d;
    const ConfigSpace sigma(box_locale(d, 2 * n), phi, budget);
    const Form big = project_to_box_averaged(w, sigma, nu);
    const Potential pot = solve_potential(sigma, big);

    PsiSequenceStep step;
    step.n = n;
    step.sigma = sigma.window();
    step.lambda = make_window(lattice_box(d, n));
    step.F = project_out_kernel(sigma, pot.f, nu);
    step.summand = conditional_expectation(step.F, step.lambda, nu);
    const double inv_vol = 1.0 / static_cast<double>(step.lambda.size());

    step.dpsi = ShiftInvariantForm::zero(d, w.num_states);
    step.omega_n = step.dpsi;
    step.omega_dagger = step.dpsi;
    const auto reps = orbit_representatives(d);
    step.plus_norm.assign(reps.size(), 0.0);
    step.minus_norm.assign(reps.size(), 0.0);
    step.dagger_norm.assign(reps.size(), 0.0);
    for (std::size_t r = 0; r < reps.size(); ++r) {
        OrbitSums s = orbit_sums(step.summand, step.lambda, reps[r].t - reps[r].o, phi);
        s.inner *= inv_vol;
        s.plus *= inv_vol;
        s.minus *= inv_vol;
        const FunctionTable dagger = s.plus + s.minus;
        step.plus_norm[r] = mu_norm(s.plus, nu);
        step.minus_norm[r] = mu_norm(s.minus, nu);
        step.dagger_norm[r] = mu_norm(dagger, nu);
        step.omega_sp = std::max(step.omega_sp, mu_norm(edge_value(w, reps[r], phi), nu));
        if (r < static_cast<std::size_t>(d)) {
            step.omega_n.rep[r] = s.inner;
            step.omega_dagger.rep[r] = dagger;
            FunctionTable g = gamma_differential(step.summand, static_cast<int>(r), phi);
            g *= inv_vol;
            step.dpsi.rep[r] = g;
            step.identity_error = std::max(step.identity_error, max_abs_difference(g, s.inner + dagger));
        }
    }
    return step;
}

double boundary_bound_ratio(const PsiSequenceStep& step, int d, double constant) {
    const double vol = static_cast<double>(step.lambda.size());
    const double bd = static_cast<double>(lattice_boundary(d, step.lambda).size());
    const double sig = static_cast<double>(step.sigma.size());
    const double diam = static_cast<double>(lattice_diameter(step.sigma));
    const double bound =
        constant * (bd * bd) / (vol * vol) * sig / (sig - vol) * diam * diam * step.omega_sp * step.omega_sp;
    double worst = 0.0;
    for (const auto* v : {&step.plus_norm, &step.minus_norm, &step.dagger_norm})
        for (double x : *v) worst = std::max(worst, x * x);
    if (bound <= 0.0) return worst <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return worst / bound;
}

bool locality_probe(const FunctionTable& g, const Window& lambda, const Window& lambda_prime, int d,
                    const InteractionTable& phi, const SiteMeasure& nu, double tol) {
    if (!window_intersection(lambda, lambda_prime).empty())
        throw Error(ErrorKind::InvalidQuery, "Λ and Λ' must be disjoint");
    const FunctionTable h = conditional_expectation(g, window_union(lambda, lambda_prime), nu);
    for (const LatticeEdge& e : lattice_inner_edges(d, lambda_prime))
        if (max_abs(nabla(h, e.o, e.t, phi)) > tol) return false;
    return true;
}

} // namespace vardec
