#include "vardec/measure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace vardec {

SiteMeasure::SiteMeasure(std::vector<double> weights, std::string name)
    : w_(std::move(weights)), name_(std::move(name)) {
    if (w_.empty()) throw Error(ErrorKind::InvalidInput, "site measure has no weights");
    double total = 0.0;
    for (double x : w_) {
        if (!(x > 0.0)) throw Error(ErrorKind::InvalidInput, "site measure weights must be positive");
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw Error(ErrorKind::InvalidInput, "site measure weights must sum to 1");
}

SiteMeasure SiteMeasure::uniform(int num_states) {
    return SiteMeasure(std::vector<double>(static_cast<std::size_t>(num_states), 1.0 / num_states),
                       "uniform");
}

SiteMeasure SiteMeasure::geometric(int num_states, double rho) {
    if (!(rho > 0.0)) throw Error(ErrorKind::InvalidInput, "geometric measure needs rho > 0");
    std::vector<double> w;
    double p = 1.0;
    for (int m = 0; m < num_states; ++m, p *= rho) w.push_back(p);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= total;
    // Renormalize once more so the sum is 1 to the last bit that matters.
    const double again = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= again;
    char buf[64];
    std::snprintf(buf, sizeof buf, "geometric:%g", rho);
    return SiteMeasure(std::move(w), buf);
}

std::vector<double> product_weights(const SiteMeasure& nu, std::size_t num_sites) {
    std::vector<double> out{1.0};
    for (std::size_t i = 0; i < num_sites; ++i) {
        std::vector<double> next;
        next.reserve(out.size() * static_cast<std::size_t>(nu.size()));
        // Site i is digit i, so it varies slowest among the first i+1 digits.
        for (int s = 0; s < nu.size(); ++s)
            for (double w : out) next.push_back(w * nu(s));
        out = std::move(next);
    }
    return out;
}

namespace {

void check_states(const FunctionTable& f, const SiteMeasure& nu) {
    if (f.num_states() != nu.size())
        throw Error(ErrorKind::InvalidInput, "function and measure disagree on |S|");
}

} // namespace

double expectation(const FunctionTable& f, const SiteMeasure& nu) {
    check_states(f, nu);
    const auto w = product_weights(nu, f.window().size());
    double s = 0.0;
    for (Code c = 0; c < f.size(); ++c) s += w[c] * f[c];
    return s;
}

double inner(const FunctionTable& f, const FunctionTable& g, const SiteMeasure& nu) {
    return expectation(f * g, nu);
}

double mu_norm(const FunctionTable& f, const SiteMeasure& nu) {
    return std::sqrt(std::max(0.0, inner(f, f, nu)));
}

double weighted_norm(const FunctionTable& f, const FunctionTable& rate, const SiteMeasure& nu) {
    return std::sqrt(std::max(0.0, expectation(rate * f * f, nu)));
}

FunctionTable conditional_expectation(const FunctionTable& f, const Window& lambda,
                                      const SiteMeasure& nu) {
    check_states(f, nu);
    const Window keep = window_intersection(f.window(), lambda);
    const Window drop = window_difference(f.window(), lambda);
    const auto to_keep = restriction_map(f.window(), keep, f.num_states());
    const auto to_drop = restriction_map(f.window(), drop, f.num_states());
    const auto w = product_weights(nu, drop.size());
    FunctionTable out = FunctionTable::zero(keep, f.num_states());
    for (Code c = 0; c < f.size(); ++c) out[to_keep[c]] += w[to_drop[c]] * f[c];
    return keep == lambda ? out : out.extend(lambda);
}

FunctionTable ExpansionPieces::reconstruct(int num_states) const {
    FunctionTable sum = FunctionTable::constant(num_states, 0.0);
    for (const auto& [w, piece] : pieces) sum += piece;
    return sum;
}

namespace {

Window subset_of(const Window& w, unsigned mask) {
    Window out;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (mask & (1u << i)) out.push_back(w[i]);
    return out;
}

// Runs the inclusion-exclusion recursion given the projection onto each subset.
template <class Project>
ExpansionPieces inclusion_exclusion(const FunctionTable& f, ExpansionPieces::Flavor flavor,
                                    Project project) {
    const Window& w = f.window();
    if (w.size() > 20) throw Error(ErrorKind::BudgetExceeded, "expansion window too large");
    const unsigned full = (1u << w.size()) - 1u;
    std::vector<unsigned> masks(full + 1u);
    std::iota(masks.begin(), masks.end(), 0u);
    std::stable_sort(masks.begin(), masks.end(),
                     [](unsigned a, unsigned b) { return std::popcount(a) < std::popcount(b); });
    std::vector<FunctionTable> piece(full + 1u);
    ExpansionPieces out;
    out.flavor = flavor;
    for (unsigned mask : masks) {
        const Window lam = subset_of(w, mask);
        FunctionTable p = project(lam);
        // Proper submasks of `mask`.
        for (unsigned sub = (mask - 1u) & mask;; sub = (sub - 1u) & mask) {
            if (sub != mask) p -= piece[sub].extend(lam);
            if (sub == 0u) break;
        }
        piece[mask] = p;
        out.pieces.emplace(lam, std::move(p));
    }
    return out;
}

} // namespace

ExpansionPieces expand_mu(const FunctionTable& f, const SiteMeasure& nu) {
    return inclusion_exclusion(f, ExpansionPieces::Flavor::Mu,
                               [&](const Window& lam) { return conditional_expectation(f, lam, nu); });
}

ExpansionPieces expand_base(const FunctionTable& f, int base) {
    if (base < 0 || base >= f.num_states()) throw Error(ErrorKind::InvalidInput, "base state out of range");
    return inclusion_exclusion(f, ExpansionPieces::Flavor::Base, [&](const Window& lam) {
        FunctionTable out = FunctionTable::zero(lam, f.num_states());
        std::vector<int> pos;
        for (const Site& s : lam) pos.push_back(f.position(s));
        Code all_base = 0;
        for (int i = 0; i < f.num_sites(); ++i) all_base = f.with_digit(all_base, i, base);
        for (Code c = 0; c < out.size(); ++c) {
            Code src = all_base;
            for (std::size_t k = 0; k < lam.size(); ++k)
                src = f.with_digit(src, pos[k], out.digit(c, static_cast<int>(k)));
            out[c] = f[src];
        }
        return out;
    });
}

ExpansionPieces renormalize(const ExpansionPieces& base_pieces, const SiteMeasure& nu, double tol) {
    if (base_pieces.flavor != ExpansionPieces::Flavor::Base)
        throw Error(ErrorKind::InvalidInput, "renormalize expects base-flavour pieces");
    if (auto it = base_pieces.pieces.find(Window{}); it != base_pieces.pieces.end() && max_abs(it->second) > tol)
        throw Error(ErrorKind::InvalidInput, "renormalize expects a normalized input (empty piece nonzero)");
    ExpansionPieces out;
    out.flavor = ExpansionPieces::Flavor::Mu;
    for (const auto& [lam2, piece] : base_pieces.pieces) {
        if (lam2.empty()) continue;
        for (auto& [lam1, sub] : expand_mu(piece.extend(lam2), nu).pieces) {
            if (lam1.empty()) continue;
            auto it = out.pieces.find(lam1);
            if (it == out.pieces.end())
                out.pieces.emplace(lam1, sub);
            else
                it->second += sub;
        }
    }
    return out;
}

ExpansionPieces unrenormalize(const ExpansionPieces& mu_pieces, int base, int num_states, double tol) {
    if (mu_pieces.flavor != ExpansionPieces::Flavor::Mu)
        throw Error(ErrorKind::InvalidInput, "unrenormalize expects mu-flavour pieces");
    if (auto it = mu_pieces.pieces.find(Window{}); it != mu_pieces.pieces.end() && max_abs(it->second) > tol)
        throw Error(ErrorKind::InvalidInput, "unrenormalize expects a mean-zero input");
    FunctionTable g = mu_pieces.reconstruct(num_states);
    Code all_base = 0;
    for (int i = 0; i < g.num_sites(); ++i) all_base = g.with_digit(all_base, i, base);
    const double at_base = g[all_base];
    for (double& v : g.values()) v -= at_base;
    ExpansionPieces out = expand_base(g, base);
    out.pieces.erase(Window{});
    return out;
}

double max_piece_difference(const ExpansionPieces& a, const ExpansionPieces& b) {
    double worst = 0.0;
    for (const auto& [w, p] : a.pieces) {
        auto it = b.pieces.find(w);
        worst = std::max(worst, it == b.pieces.end() ? max_abs(p) : max_abs_difference(p, it->second));
    }
    for (const auto& [w, p] : b.pieces)
        if (!a.pieces.count(w)) worst = std::max(worst, max_abs(p));
    return worst;
}

double c_phi_nu(const InteractionTable& phi, const SiteMeasure& nu) {
    if (phi.num_states() != nu.size())
        throw Error(ErrorKind::InvalidInput, "interaction and measure disagree on |S|");
    double c = 1.0;
    for (int a = 0; a < nu.size(); ++a)
        for (int b = 0; b < nu.size(); ++b) {
            auto [a2, b2] = phi.apply(a, b);
            const double ratio = nu(a2) * nu(b2) / (nu(a) * nu(b));
            c = std::max({c, ratio, 1.0 / ratio});
        }
    return c;
}

Rate trivial_rate(const Locale& X, int num_states) {
    Rate r;
    r.edge.assign(static_cast<std::size_t>(X.num_edges()), FunctionTable::constant(num_states, 1.0));
    return r;
}

Rate canonical_rate(const SiteMeasure& nu, const InteractionTable& phi, const Locale& X) {
    Rate r;
    const int n = phi.num_states();
    for (const Edge& e : X.edges()) {
        const Site so = X.site(e.o);
        const Site st = X.site(e.t);
        FunctionTable table = FunctionTable::zero(make_window({so, st}), n);
        const int io = table.position(so);
        const int it = table.position(st);
        for (Code c = 0; c < table.size(); ++c) {
            const int a = table.digit(c, io);
            const int b = table.digit(c, it);
            int a2 = a;
            int b2 = b;
            if (!phi.fixes(a, b)) {
                std::tie(a2, b2) = phi.apply(a, b);
            } else {
                // Fixed by e: use the reverse transition η^ē instead.
                auto [tb, ta] = phi.apply(b, a);
                a2 = ta;
                b2 = tb;
            }
            table[c] = std::sqrt(nu(a2) * nu(b2) / (nu(a) * nu(b)));
        }
        r.edge.push_back(std::move(table));
    }
    return r;
}

namespace {

struct JointView {
    Window w;
    FunctionTable re;
    FunctionTable rbar;
    int io = 0;
    int it = 0;
};

JointView joint_view(const Rate& r, const Locale& X, int e) {
    const int eb = X.reverse(e);
    const Site so = X.site(X.edge(e).o);
    const Site st = X.site(X.edge(e).t);
    const FunctionTable& re = r.edge[static_cast<std::size_t>(e)];
    const FunctionTable& rb = r.edge[static_cast<std::size_t>(eb)];
    JointView v;
    v.w = window_union(window_union(re.window(), rb.window()), make_window({so, st}));
    v.re = re.extend(v.w);
    v.rbar = rb.extend(v.w);
    v.io = v.re.position(so);
    v.it = v.re.position(st);
    return v;
}

} // namespace

bool is_reversible(const Rate& r, const SiteMeasure& nu, const InteractionTable& phi,
                   const Locale& X, double tol) {
    if (static_cast<int>(r.edge.size()) != X.num_edges())
        throw Error(ErrorKind::InvalidInput, "rate does not cover every locale edge");
    for (int e = 0; e < X.num_edges(); ++e) {
        const JointView v = joint_view(r, X, e);
        for (Code c = 0; c < v.re.size(); ++c) {
            const Code c2 = v.re.transition(c, v.io, v.it, phi);
            const double lhs = nu(v.re.digit(c, v.io)) * nu(v.re.digit(c, v.it)) * v.re[c];
            const double rhs = nu(v.re.digit(c2, v.io)) * nu(v.re.digit(c2, v.it)) * v.rbar[c2];
            if (std::abs(lhs - rhs) > tol * std::max(std::abs(lhs), std::abs(rhs))) return false;
        }
    }
    return true;
}

RateBounds rate_bounds(const Rate& r, const SiteMeasure& nu, const InteractionTable& phi,
                       const Locale& X, int e) {
    RateBounds b;
    for (double x : r.edge[static_cast<std::size_t>(e)].values()) {
        if (!(x > 0.0)) throw Error(ErrorKind::InvalidInput, "rate must be strictly positive");
        b.M = std::max({b.M, x, 1.0 / x});
    }
    const JointView v = joint_view(r, X, e);
    for (Code c = 0; c < v.re.size(); ++c) {
        const Code c2 = v.re.transition(c, v.io, v.it, phi);
        const double num = nu(v.re.digit(c, v.io)) * nu(v.re.digit(c, v.it)) * v.re[c];
        const double den = nu(v.re.digit(c2, v.io)) * nu(v.re.digit(c2, v.it)) * v.rbar[c2];
        const double ratio = num / den;
        b.A = std::max({b.A, ratio, 1.0 / ratio});
    }
    return b;
}

} // namespace vardec
