#pragma once

// Brute-force reference implementations used to cross-check the library.
// They share no code paths with the routines they check beyond ConfigSpace
// transitions.

#include "vardec/configspace.hpp"
#include "vardec/forms.hpp"
#include "vardec/measure.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

namespace oracle {

using vardec::Code;
using vardec::ConfigSpace;

// Union-find over all transitions; labels renumbered by least member.
inline std::vector<int> components(const ConfigSpace& space) {
    std::vector<Code> parent(space.size());
    std::iota(parent.begin(), parent.end(), Code{0});
    auto find = [&](Code x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (Code c = 0; c < space.size(); ++c)
        for (int e = 0; e < space.locale().num_edges(); ++e) {
            const Code a = find(c), b = find(space.apply_edge(c, e));
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    std::vector<int> label(space.size(), -1);
    std::map<Code, int> ids;
    for (Code c = 0; c < space.size(); ++c) {
        auto [it, fresh] = ids.emplace(find(c), static_cast<int>(ids.size()));
        label[c] = it->second;
    }
    return label;
}

// Distinct transitions {c, d}, c < d, with ω on c → d.
struct Transition {
    Code a, b;
    double value;  // ω along a → b
};

inline std::vector<Transition> transitions(const ConfigSpace& space, const vardec::Form& w) {
    std::map<std::pair<Code, Code>, double> seen;
    for (Code c = 0; c < space.size(); ++c)
        for (int e = 0; e < space.locale().num_edges(); ++e) {
            const Code d = space.apply_edge(c, e);
            if (d == c) continue;
            const double v = w.values[static_cast<std::size_t>(e)][c];
            if (c < d)
                seen.emplace(std::make_pair(c, d), v);
            else
                seen.emplace(std::make_pair(d, c), -v);
        }
    std::vector<Transition> out;
    for (const auto& [k, v] : seen) out.push_back({k.first, k.second, v});
    return out;
}

struct CycleCheck {
    bool closed = true;
    bool spans = false;  // the cycles examined span the cycle space
    int cycles = 0;
};

// For every transition, the shortest cycle through it that avoids the
// transition itself; integrates ω around each cycle and confirms that the
// cycles span the full cycle space, so vanishing integrals are equivalent to
// closedness.
inline CycleCheck cycle_integrals(const ConfigSpace& space, const vardec::Form& w, double tol = 1e-9) {
    const auto ts = transitions(space, w);
    const Code n = space.size();
    std::vector<std::vector<std::pair<Code, int>>> adj(n);
    for (int i = 0; i < static_cast<int>(ts.size()); ++i) {
        adj[ts[static_cast<std::size_t>(i)].a].push_back({ts[static_cast<std::size_t>(i)].b, i});
        adj[ts[static_cast<std::size_t>(i)].b].push_back({ts[static_cast<std::size_t>(i)].a, i});
    }
    CycleCheck out;
    std::vector<Eigen::VectorXd> cycles;
    for (int i = 0; i < static_cast<int>(ts.size()); ++i) {
        const auto& t = ts[static_cast<std::size_t>(i)];
        // BFS from b back to a without using transition i.
        std::vector<std::pair<Code, int>> prev(n, {n, -1});
        std::vector<char> seen(n, 0);
        std::deque<Code> q{t.b};
        seen[t.b] = 1;
        while (!q.empty() && !seen[t.a]) {
            const Code c = q.front();
            q.pop_front();
            for (auto [d, k] : adj[c]) {
                if (k == i || seen[d]) continue;
                seen[d] = 1;
                prev[d] = {c, k};
                q.push_back(d);
            }
        }
        if (!seen[t.a]) continue;
        Eigen::VectorXd cyc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ts.size()));
        double integral = t.value;
        cyc(i) = 1.0;
        for (Code c = t.a; c != t.b; c = prev[c].first) {
            const Code from = prev[c].first;
            const auto& s = ts[static_cast<std::size_t>(prev[c].second)];
            const double sign = (s.a == from) ? 1.0 : -1.0;
            integral += sign * s.value;
            cyc(prev[c].second) += sign;
        }
        ++out.cycles;
        if (std::abs(integral) > tol) out.closed = false;
        cycles.push_back(std::move(cyc));
    }
    // Shortest cycles alone need not span; add the fundamental cycles of a
    // depth-first spanning forest.
    std::vector<std::pair<Code, int>> parent(n, {n, -1});
    std::vector<double> height(n, 0.0);
    std::vector<char> visited(n, 0);
    std::vector<char> in_tree(ts.size(), 0);
    for (Code root = 0; root < n; ++root) {
        if (visited[root]) continue;
        std::vector<Code> stack{root};
        visited[root] = 1;
        while (!stack.empty()) {
            const Code c = stack.back();
            stack.pop_back();
            for (auto [d, k] : adj[c]) {
                if (visited[d]) continue;
                visited[d] = 1;
                parent[d] = {c, k};
                in_tree[static_cast<std::size_t>(k)] = 1;
                const auto& s = ts[static_cast<std::size_t>(k)];
                height[d] = height[c] + (s.a == c ? s.value : -s.value);
                stack.push_back(d);
            }
        }
    }
    auto tree_path = [&](Code x) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ts.size()));
        for (; parent[x].second >= 0; x = parent[x].first) {
            const auto& s = ts[static_cast<std::size_t>(parent[x].second)];
            v(parent[x].second) += (s.b == x) ? 1.0 : -1.0;
        }
        return v;
    };
    for (int i = 0; i < static_cast<int>(ts.size()); ++i) {
        if (in_tree[static_cast<std::size_t>(i)]) continue;
        const auto& t = ts[static_cast<std::size_t>(i)];
        Eigen::VectorXd cyc = tree_path(t.a) - tree_path(t.b);
        cyc(i) += 1.0;
        ++out.cycles;
        if (std::abs(height[t.a] + t.value - height[t.b]) > tol) out.closed = false;
        cycles.push_back(std::move(cyc));
    }

    const auto comp = components(space);
    const int nc = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    const long long dim = static_cast<long long>(ts.size()) - static_cast<long long>(n) + nc;
    if (cycles.empty()) {
        out.spans = dim == 0;
        return out;
    }
    Eigen::MatrixXd M(static_cast<Eigen::Index>(ts.size()), static_cast<Eigen::Index>(cycles.size()));
    for (std::size_t k = 0; k < cycles.size(); ++k) M.col(static_cast<Eigen::Index>(k)) = cycles[k];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    out.spans = lu.rank() == dim;
    return out;
}

// Dense generalized eigenproblem D v = λ M v on all of S^Λ; the gap is the
// first eigenvalue above the kernel, whose dimension is the component count.
inline double brute_gap(const ConfigSpace& space, const vardec::SiteMeasure& nu) {
    const auto n = static_cast<Eigen::Index>(space.size());
    const auto mu = vardec::product_weights(nu, space.window().size());
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (Code c = 0; c < space.size(); ++c) {
        M(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)) = mu[c];
        for (int e = 0; e < space.locale().num_edges(); ++e) {
            const Code d = space.apply_edge(c, e);
            if (d == c) continue;
            const auto i = static_cast<Eigen::Index>(c), j = static_cast<Eigen::Index>(d);
            D(i, i) += mu[c];
            D(j, j) += mu[c];
            D(i, j) -= mu[c];
            D(j, i) -= mu[c];
        }
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(D, M);
    const auto comp = components(space);
    const int nc = *std::max_element(comp.begin(), comp.end()) + 1;
    if (nc >= n) return std::numeric_limits<double>::infinity();
    return es.eigenvalues()(nc);
}

// π^Λ f by summing over every full configuration with its μ weight.
inline vardec::FunctionTable brute_conditional(const vardec::FunctionTable& f, const vardec::Window& lambda,
                                               const vardec::SiteMeasure& nu) {
    auto out = vardec::FunctionTable::zero(lambda, f.num_states());
    auto mass = out;
    for (Code c = 0; c < f.size(); ++c) {
        const auto eta = f.decode(c);
        double w = 1.0;
        std::vector<int> sub(lambda.size(), 0);
        for (int i = 0; i < f.num_sites(); ++i) {
            const auto it = std::find(lambda.begin(), lambda.end(), f.window()[static_cast<std::size_t>(i)]);
            if (it == lambda.end())
                w *= nu(eta[static_cast<std::size_t>(i)]);
            else
                sub[static_cast<std::size_t>(it - lambda.begin())] = eta[static_cast<std::size_t>(i)];
        }
        out[out.encode(sub)] += w * f[c];
        mass[out.encode(sub)] += w;
    }
    for (Code c = 0; c < out.size(); ++c) out[c] /= mass[c];
    return out;
}

} // namespace oracle
