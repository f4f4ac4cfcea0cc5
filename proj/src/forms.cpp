#include "vardec/forms.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace vardec {

Form Form::zero(const ConfigSpace& space) {
    Form w;
    w.values.assign(static_cast<std::size_t>(space.locale().num_edges()), std::vector<double>(space.size(), 0.0));
    return w;
}

FunctionTable Form::edge_table(const ConfigSpace& space, int e) const {
    return FunctionTable(space.window(), space.num_states(), values[static_cast<std::size_t>(e)]);
}

namespace {

void check_shape(const ConfigSpace& space, const Form& w) {
    if (w.num_edges() != space.locale().num_edges())
        throw Error(ErrorKind::InvalidForm, "form does not have one table per locale edge");
    for (const auto& v : w.values)
        if (v.size() != space.size()) throw Error(ErrorKind::InvalidForm, "form table has the wrong size");
}

double form_scale(const Form& w) {
    double m = 1.0;
    for (const auto& v : w.values)
        for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

AlternationReport check_alternating(const ConfigSpace& space, const Form& w, double tol) {
    check_shape(space, w);
    const Locale& X = space.locale();
    const double eps = tol * form_scale(w);
    AlternationReport r;
    auto fail = [&](const std::string& what) {
        r.ok = false;
        r.first_violation = what;
        return r;
    };
    for (Code c = 0; c < space.size(); ++c) {
        for (int e = 0; e < X.num_edges(); ++e) {
            const double v = w.values[static_cast<std::size_t>(e)][c];
            const Code d = space.apply_edge(c, e);
            if (d == c) {
                if (std::abs(v) > eps)
                    return fail("edge " + std::to_string(e) + " nonzero on fixed configuration " + std::to_string(c));
                continue;
            }
            const double back = w.values[static_cast<std::size_t>(X.reverse(e))][d];
            if (std::abs(v + back) > eps)
                return fail("edge " + std::to_string(e) + " not alternating at configuration " + std::to_string(c));
            for (int e2 = e + 1; e2 < X.num_edges(); ++e2)
                if (space.apply_edge(c, e2) == d &&
                    std::abs(v - w.values[static_cast<std::size_t>(e2)][c]) > eps)
                    return fail("edges " + std::to_string(e) + "," + std::to_string(e2) +
                                " give the same transition different values at " + std::to_string(c));
        }
    }
    return r;
}

Form differential(const ConfigSpace& space, const FunctionTable& f) {
    if (f.num_states() != space.num_states())
        throw Error(ErrorKind::InvalidInput, "function and interaction disagree on |S|");
    const FunctionTable g = f.window() == space.window() ? f : f.extend(space.window());
    Form w = Form::zero(space);
    for (int e = 0; e < space.locale().num_edges(); ++e)
        for (Code c = 0; c < space.size(); ++c)
            w.values[static_cast<std::size_t>(e)][c] = g[space.apply_edge(c, e)] - g[c];
    return w;
}

namespace {

// Spanning-forest potential; returns false on the first inconsistent transition.
bool integrate(const ConfigSpace& space, const Form& w, double tol, Potential& out) {
    check_shape(space, w);
    const int ne = space.locale().num_edges();
    const double eps = tol * form_scale(w);
    std::vector<double> f(space.size(), 0.0);
    std::vector<char> seen(space.size(), 0);
    std::deque<Code> q;
    out.anchors.clear();
    for (Code root = 0; root < space.size(); ++root) {
        if (seen[root]) continue;
        seen[root] = 1;
        out.anchors.push_back(root);
        q.push_back(root);
        while (!q.empty()) {
            const Code c = q.front();
            q.pop_front();
            for (int e = 0; e < ne; ++e) {
                const Code d = space.apply_edge(c, e);
                if (d == c) continue;  // identity transitions carry no integral
                const double step = w.values[static_cast<std::size_t>(e)][c];
                if (!seen[d]) {
                    seen[d] = 1;
                    f[d] = f[c] + step;
                    q.push_back(d);
                }
            }
        }
    }
    for (Code c = 0; c < space.size(); ++c)
        for (int e = 0; e < ne; ++e) {
            const Code d = space.apply_edge(c, e);
            if (d == c) continue;
            if (std::abs(f[d] - f[c] - w.values[static_cast<std::size_t>(e)][c]) > eps) return false;
        }
    out.f = FunctionTable(space.window(), space.num_states(), std::move(f));
    return true;
}

} // namespace

bool is_closed(const ConfigSpace& space, const Form& w, double tol) {
    Potential p;
    return integrate(space, w, tol, p);
}

Potential solve_potential(const ConfigSpace& space, const Form& w, double tol) {
    Potential p;
    if (!integrate(space, w, tol, p)) throw Error(ErrorKind::NotClosed, "form has a nonzero cycle integral");
    return p;
}

Form project_form(const ConfigSpace& big, const Form& w, const ConfigSpace& small, const SiteMeasure& nu) {
    check_shape(big, w);
    const Locale& B = big.locale();
    const Locale& L = small.locale();
    if (!window_includes(B.sites(), L.sites()))
        throw Error(ErrorKind::InvalidInput, "projection target is not inside the source locale");
    Form out = Form::zero(small);
    for (int e = 0; e < L.num_edges(); ++e) {
        const auto o = B.vertex_of(L.site(L.edge(e).o));
        const auto t = B.vertex_of(L.site(L.edge(e).t));
        const auto be = B.edge_index(*o, *t);
        if (!be) throw Error(ErrorKind::InvalidInput, "projection target edge missing in source locale");
        out.values[static_cast<std::size_t>(e)] =
            conditional_expectation(w.edge_table(big, *be), L.sites(), nu).values();
    }
    return out;
}

Form boundary_differential(const ConfigSpace& sigma, const FunctionTable& f,
                           const std::vector<Vertex>& lambda, const SiteMeasure& nu) {
    const Locale& X = sigma.locale();
    Window lam;
    for (Vertex v : lambda) lam.push_back(X.site(v));
    lam = make_window(std::move(lam));
    const FunctionTable p = conditional_expectation(f, lam, nu);
    // ∂(π^Λ f) on all of E_Σ, minus ∂_Λ(π^Λ f) on E_Λ.
    Form out = differential(sigma, p);
    for (int e = 0; e < X.num_edges(); ++e) {
        const Site so = X.site(X.edge(e).o);
        const Site st = X.site(X.edge(e).t);
        if (p.position(so) < 0 || p.position(st) < 0) continue;
        const FunctionTable inner = nabla(p, so, st, sigma.interaction()).extend(sigma.window());
        auto& v = out.values[static_cast<std::size_t>(e)];
        for (Code c = 0; c < sigma.size(); ++c) v[c] -= inner[c];
    }
    return out;
}

double edge_norm(const ConfigSpace& space, const Form& w, int e, const SiteMeasure& nu, const Rate* rate) {
    const FunctionTable t = w.edge_table(space, e);
    return rate ? weighted_norm(t, rate->edge[static_cast<std::size_t>(e)], nu) : mu_norm(t, nu);
}

double sp_norm(const ConfigSpace& space, const Form& w, const SiteMeasure& nu, const Rate* rate) {
    check_shape(space, w);
    double best = 0.0;
    for (int e = 0; e < w.num_edges(); ++e) best = std::max(best, edge_norm(space, w, e, nu, rate));
    return best;
}

double r_norm(const ConfigSpace& space, const Form& w, const SiteMeasure& nu, const std::vector<int>& edges,
              const Rate* rate) {
    double s = 0.0;
    for (int e : edges) {
        const double n = edge_norm(space, w, e, nu, rate);
        s += n * n;
    }
    return std::sqrt(s);
}

FunctionTable project_out_kernel(const ConfigSpace& space, const FunctionTable& f, const SiteMeasure& nu) {
    const FunctionTable g = f.window() == space.window() ? f : f.extend(space.window());
    const auto comp = transition_components(space, build_transition_graph(space));
    const auto mu = product_weights(nu, space.window().size());
    const int nc = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    std::vector<double> mass(static_cast<std::size_t>(nc), 0.0);
    std::vector<double> sum(static_cast<std::size_t>(nc), 0.0);
    for (Code c = 0; c < space.size(); ++c) {
        mass[static_cast<std::size_t>(comp[c])] += mu[c];
        sum[static_cast<std::size_t>(comp[c])] += mu[c] * g[c];
    }
    FunctionTable out = g;
    for (Code c = 0; c < space.size(); ++c)
        out[c] -= sum[static_cast<std::size_t>(comp[c])] / mass[static_cast<std::size_t>(comp[c])];
    return out;
}

} // namespace vardec
