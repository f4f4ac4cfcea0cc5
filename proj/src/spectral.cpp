#include "vardec/spectral.hpp"

#include "vardec/forms.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace vardec {

GapReport spectral_gap(const ConfigSpace& space, const SiteMeasure& nu, const Rate* rate) {
    const Locale& X = space.locale();
    const TransitionGraph g = build_transition_graph(space);
    const auto comp = transition_components(space, g);
    const auto mu = product_weights(nu, space.window().size());
    std::vector<FunctionTable> rates;
    if (rate)
        for (const auto& r : rate->edge) rates.push_back(r.extend(space.window()));

    const int nc = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    std::vector<std::vector<Code>> members(static_cast<std::size_t>(nc));
    for (Code c = 0; c < space.size(); ++c) members[static_cast<std::size_t>(comp[c])].push_back(c);

    GapReport report;
    report.locale = X.name();
    report.sites = X.size();
    report.minimizer = FunctionTable::zero(space.window(), space.num_states());
    for (const auto& m : members) {
        if (m.size() < 2) continue;
        const auto k = static_cast<Eigen::Index>(m.size());
        std::vector<Eigen::Index> local(space.size(), -1);
        for (Eigen::Index i = 0; i < k; ++i) local[m[static_cast<std::size_t>(i)]] = i;
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(k, k);
        for (Eigen::Index i = 0; i < k; ++i) {
            const Code c = m[static_cast<std::size_t>(i)];
            for (int e = 0; e < g.num_edges; ++e) {
                const Code d = g.at(c, e);
                if (d == c) continue;
                const Eigen::Index j = local[d];
                const double w = mu[c] * (rate ? rates[static_cast<std::size_t>(e)][c] : 1.0);
                D(i, i) += w;
                D(j, j) += w;
                D(i, j) -= w;
                D(j, i) -= w;
            }
        }
        Eigen::VectorXd s(k);
        for (Eigen::Index i = 0; i < k; ++i) s(i) = 1.0 / std::sqrt(mu[m[static_cast<std::size_t>(i)]]);
        const Eigen::MatrixXd A = s.asDiagonal() * D * s.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
        // One zero mode per component; the next eigenvalue is the gap here.
        const double lambda = es.eigenvalues()(1);
        if (lambda < report.gap) {
            const Eigen::VectorXd v = es.eigenvectors().col(1);
            report.gap = lambda;
            report.residual = (A * v - lambda * v).norm();
            std::fill(report.minimizer.values().begin(), report.minimizer.values().end(), 0.0);
            for (Eigen::Index i = 0; i < k; ++i) report.minimizer[m[static_cast<std::size_t>(i)]] = s(i) * v(i);
        }
    }
    report.normalized = report.gap / X.size();
    return report;
}

std::vector<GapScanRow> uniform_gap_scan(const InteractionTable& phi, const SiteMeasure& nu,
                                         const std::vector<int>& n_list, std::uint64_t budget) {
    if (n_list.empty()) throw Error(ErrorKind::InvalidInput, "gap scan needs at least one n");
    std::vector<GapScanRow> rows;
    double running = std::numeric_limits<double>::infinity();
    for (int n : n_list) {
        const Locale K = complete_locale(n);
        const IrreducibilityReport irr = irreducibly_quantified_check(phi, K, budget);
        if (!irr.connected)
            throw Error(ErrorKind::NotIrreduciblyQuantified,
                        "conserved classes of " + K.name() + " split into several components");
        const GapReport r = spectral_gap(ConfigSpace(K, phi, budget), nu);
        running = std::min(running, r.normalized);
        rows.push_back({n, r.gap, r.normalized, running});
    }
    return rows;
}

double estimate_csg(const InteractionTable& phi, const SiteMeasure& nu, int max_n) {
    std::vector<int> ns;
    for (int n = 2; n <= max_n; ++n) ns.push_back(n);
    return uniform_gap_scan(phi, nu, ns).back().running_min;
}

double estimate_ctilde(const InteractionTable& phi, const SiteMeasure& nu) {
    const ConfigSpace space(path_locale(2), phi);
    const auto mu = product_weights(nu, 2);
    const auto k = static_cast<Eigen::Index>(space.size());
    Eigen::MatrixXd Dx = Eigen::MatrixXd::Zero(k, k);  // exchange
    Eigen::MatrixXd Dm = Eigen::MatrixXd::Zero(k, k);  // move 0 → 1
    auto add = [&](Eigen::MatrixXd& D, Code c, Code d) {
        if (c == d) return;
        const auto i = static_cast<Eigen::Index>(c);
        const auto j = static_cast<Eigen::Index>(d);
        D(i, i) += mu[c];
        D(j, j) += mu[c];
        D(i, j) -= mu[c];
        D(j, i) -= mu[c];
    };
    for (Code c = 0; c < space.size(); ++c) {
        add(Dx, c, space.exchange(c, 0, 1));
        add(Dm, c, space.apply_move(c, 0, 1));
    }
    const double scale = std::max(1.0, Dx.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Dm);
    const double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 0.0);
    const double cut = 1e-12 * std::max(top, 1.0);
    std::vector<Eigen::Index> range;
    std::vector<Eigen::Index> kernel;
    for (Eigen::Index i = 0; i < k; ++i) (es.eigenvalues()(i) > cut ? range : kernel).push_back(i);
    for (Eigen::Index i : kernel) {
        const Eigen::VectorXd v = es.eigenvectors().col(i);
        if (v.dot(Dx * v) > 1e-10 * scale)
            throw Error(ErrorKind::DegenerateDenominator,
                        "some f has zero move energy but nonzero exchange energy");
    }
    if (range.empty()) return 0.0;
    Eigen::MatrixXd B(k, static_cast<Eigen::Index>(range.size()));
    for (std::size_t i = 0; i < range.size(); ++i)
        B.col(static_cast<Eigen::Index>(i)) =
            es.eigenvectors().col(range[i]) / std::sqrt(es.eigenvalues()(range[i]));
    const Eigen::MatrixXd R = B.transpose() * Dx * B;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rs(0.5 * (R + R.transpose()));
    return rs.eigenvalues().maxCoeff();
}

double mpl_constant(const InteractionTable& phi, const SiteMeasure& nu) {
    return 6.0 * std::max(1.0, estimate_ctilde(phi, nu));
}

double be_constant(const InteractionTable& phi, const SiteMeasure& nu) {
    const double s = phi.num_states();
    return 3.0 * (c_phi_nu(phi, nu) * s * s + s);
}

double dagger_constant(const InteractionTable& phi, const SiteMeasure& nu, double csg) {
    return be_constant(phi, nu) * mpl_constant(phi, nu) * (1.0 / csg + 1.0);
}

FunctionTable random_function(const Window& w, const SiteMeasure& nu, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    FunctionTable f = FunctionTable::zero(w, nu.size());
    for (double& v : f.values()) v = normal(rng);
    const double m = expectation(f, nu);
    for (double& v : f.values()) v -= m;
    return f;
}

namespace {

// Shared state for the inequality checks on one locale.
struct Bench {
    ConfigSpace space;
    std::vector<double> mu;

    Bench(const Locale& X, const InteractionTable& phi, const SiteMeasure& nu)
        : space(X, phi), mu(product_weights(nu, X.sites().size())) {
        if (phi.num_states() != nu.size())
            throw Error(ErrorKind::InvalidInput, "interaction and measure disagree on |S|");
    }

    double norm2(const FunctionTable& f) const {
        double s = 0.0;
        for (Code c = 0; c < space.size(); ++c) s += mu[c] * f[c] * f[c];
        return s;
    }
    double move2(const FunctionTable& f, Vertex x, Vertex y) const {
        double s = 0.0;
        for (Code c = 0; c < space.size(); ++c) {
            const double d = f[space.apply_move(c, x, y)] - f[c];
            s += mu[c] * d * d;
        }
        return s;
    }
    double edge2(const FunctionTable& f, int e) const {
        double s = 0.0;
        for (Code c = 0; c < space.size(); ++c) {
            const double d = f[space.apply_edge(c, e)] - f[c];
            s += mu[c] * d * d;
        }
        return s;
    }
    // ‖∂f‖²_sp
    double sp2(const FunctionTable& f) const {
        double best = 0.0;
        for (int e = 0; e < space.locale().num_edges(); ++e) best = std::max(best, edge2(f, e));
        return best;
    }
};

void record(InequalityReport& r, double lhs, double rhs) {
    double ratio = 0.0;
    if (rhs > 0.0)
        ratio = lhs / rhs;
    else if (lhs > 1e-14)
        ratio = std::numeric_limits<double>::infinity();
    r.worst_ratio = std::max(r.worst_ratio, ratio);
}

void finish(InequalityReport& r) { r.pass = r.worst_ratio <= 1.0 + kInequalitySlack; }

std::vector<char> membership(const Locale& X, const std::vector<Vertex>& lambda) {
    std::vector<char> in(static_cast<std::size_t>(X.size()), 0);
    for (Vertex v : lambda) {
        if (v < 0 || v >= X.size()) throw Error(ErrorKind::InvalidInput, "Λ vertex outside Σ");
        in[static_cast<std::size_t>(v)] = 1;
    }
    return in;
}

Window sites_of(const Locale& X, const std::vector<Vertex>& vs) {
    Window w;
    for (Vertex v : vs) w.push_back(X.site(v));
    return make_window(std::move(w));
}

} // namespace

InequalityReport verify_mpl(const Locale& X, const InteractionTable& phi, const SiteMeasure& nu, int trials,
                            std::uint64_t seed) {
    Bench b(X, phi, nu);
    InequalityReport r;
    r.name = "mpl";
    r.constant = mpl_constant(phi, nu);
    r.trials = trials;
    const double diam = X.diameter();
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        const FunctionTable f = random_function(X.sites(), nu, rng);
        const double rhs = r.constant * diam * diam * b.sp2(f);
        for (Vertex x = 0; x < X.size(); ++x)
            for (Vertex y = 0; y < X.size(); ++y) record(r, b.move2(f, x, y), rhs);
    }
    finish(r);
    return r;
}

InequalityReport verify_boundary_estimate(const Locale& sigma, const std::vector<Vertex>& lambda,
                                          const InteractionTable& phi, const SiteMeasure& nu, int trials,
                                          std::uint64_t seed) {
    Bench b(sigma, phi, nu);
    const auto in = membership(sigma, lambda);
    std::vector<Vertex> outside;
    for (Vertex v = 0; v < sigma.size(); ++v)
        if (!in[static_cast<std::size_t>(v)]) outside.push_back(v);
    if (outside.empty()) throw Error(ErrorKind::InvalidInput, "boundary estimate needs Σ∖Λ nonempty");
    const Window lam = sites_of(sigma, lambda);
    const auto cut = boundary(sigma, lambda);

    InequalityReport r;
    r.name = "be";
    r.constant = be_constant(phi, nu);
    r.trials = trials;
    const double factor = r.constant / static_cast<double>(outside.size());
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        const FunctionTable h = random_function(sigma.sites(), nu, rng);
        const FunctionTable p = conditional_expectation(h, lam, nu).extend(sigma.sites());
        const double h2 = b.norm2(h);
        for (int e : cut) {
            const Vertex o = sigma.edge(e).o;
            double out_moves = 0.0;
            double in_moves = 0.0;
            for (Vertex y : outside) {
                out_moves += b.move2(h, o, y);
                in_moves += b.move2(h, y, o);
            }
            record(r, b.edge2(p, e), factor * (h2 + out_moves));
            // Mirror: the reverse edge enters Λ at o(e), so moves run into o(e).
            record(r, b.edge2(p, sigma.reverse(e)), factor * (h2 + in_moves));
        }
    }
    finish(r);
    return r;
}

InequalityReport verify_sigma_gap_bound(const Locale& sigma, const InteractionTable& phi,
                                        const SiteMeasure& nu, int trials, std::uint64_t seed, double csg) {
    Bench b(sigma, phi, nu);
    InequalityReport r;
    r.name = "sg";
    r.constant = mpl_constant(phi, nu) / csg;
    r.trials = trials;
    const double diam = sigma.diameter();
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        const FunctionTable h = random_function(sigma.sites(), nu, rng);
        const FunctionTable q = project_out_kernel(b.space, h, nu);
        record(r, b.norm2(q), r.constant * sigma.size() * diam * diam * b.sp2(h));
    }
    finish(r);
    return r;
}

InequalityReport verify_dagger_bound(const Locale& sigma, const std::vector<Vertex>& lambda,
                                     const InteractionTable& phi, const SiteMeasure& nu, int trials,
                                     std::uint64_t seed, double csg) {
    Bench b(sigma, phi, nu);
    const auto in = membership(sigma, lambda);
    int outside = 0;
    for (char c : in) outside += c ? 0 : 1;
    InequalityReport r;
    r.name = "dagger";
    r.constant = dagger_constant(phi, nu, csg);
    r.trials = trials;
    const double diam = sigma.diameter();
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        const FunctionTable h = project_out_kernel(b.space, random_function(sigma.sites(), nu, rng), nu);
        const Form dag = boundary_differential(b.space, h, lambda, nu);
        double lhs = 0.0;
        for (int e = 0; e < dag.num_edges(); ++e) {
            const double n = edge_norm(b.space, dag, e, nu);
            lhs = std::max(lhs, n * n);
        }
        if (outside == 0) {
            record(r, lhs, 0.0);
            continue;
        }
        const double rhs = r.constant * (static_cast<double>(sigma.size()) / outside) * diam * diam * b.sp2(h);
        record(r, lhs, rhs);
    }
    finish(r);
    return r;
}

} // namespace vardec
