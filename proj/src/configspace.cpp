#include "vardec/configspace.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace vardec {

ConfigSpace::ConfigSpace(Locale X, InteractionTable phi, std::uint64_t budget)
    : X_(std::move(X)), phi_(std::move(phi)) {
    size_ = config_count(phi_.num_states(), static_cast<std::size_t>(X_.size()), budget);
    Code s = 1;
    for (int v = 0; v < X_.size(); ++v) {
        stride_.push_back(s);
        s *= static_cast<Code>(phi_.num_states());
    }
}

std::vector<int> ConfigSpace::decode(Code c) const {
    std::vector<int> out(static_cast<std::size_t>(X_.size()));
    for (auto& s : out) {
        s = static_cast<int>(c % static_cast<Code>(num_states()));
        c /= static_cast<Code>(num_states());
    }
    return out;
}

Code ConfigSpace::encode(const std::vector<int>& states) const {
    if (static_cast<int>(states.size()) != X_.size())
        throw Error(ErrorKind::InvalidInput, "configuration length does not match locale");
    Code c = 0;
    for (std::size_t i = states.size(); i-- > 0;) {
        if (states[i] < 0 || states[i] >= num_states())
            throw Error(ErrorKind::InvalidInput, "state index out of range");
        c = c * static_cast<Code>(num_states()) + static_cast<Code>(states[i]);
    }
    return c;
}

Code ConfigSpace::apply_move(Code c, Vertex x, Vertex y) const {
    if (x == y) return c;
    auto [a, b] = phi_.apply(digit(c, x), digit(c, y));
    return with_digit(with_digit(c, x, a), y, b);
}

Code ConfigSpace::apply_edge(Code c, int e) const {
    if (e < 0 || e >= X_.num_edges())
        throw Error(ErrorKind::InvalidQuery, "edge " + std::to_string(e) + " is not in the locale");
    return apply_move(c, X_.edge(e).o, X_.edge(e).t);
}

Code ConfigSpace::exchange(Code c, Vertex x, Vertex y) const {
    const int a = digit(c, x);
    const int b = digit(c, y);
    return with_digit(with_digit(c, x, b), y, a);
}

std::vector<int> ConfigSpace::apply_edge(const std::vector<int>& eta, int e) const {
    return decode(apply_edge(encode(eta), e));
}

std::vector<int> ConfigSpace::apply_move(const std::vector<int>& eta, Vertex x, Vertex y) const {
    return decode(apply_move(encode(eta), x, y));
}

std::vector<int> ConfigSpace::exchange(const std::vector<int>& eta, Vertex x, Vertex y) const {
    return decode(exchange(encode(eta), x, y));
}

TransitionGraph build_transition_graph(const ConfigSpace& space) {
    TransitionGraph g;
    g.nodes = space.size();
    g.num_edges = space.locale().num_edges();
    g.next.resize(g.nodes * static_cast<Code>(g.num_edges));
    for (Code c = 0; c < g.nodes; ++c)
        for (int e = 0; e < g.num_edges; ++e)
            g.next[c * static_cast<Code>(g.num_edges) + static_cast<Code>(e)] = space.apply_edge(c, e);
    return g;
}

std::vector<int> transition_components(const ConfigSpace& space, const TransitionGraph& g) {
    std::vector<int> label(space.size(), -1);
    int next_label = 0;
    std::deque<Code> q;
    for (Code start = 0; start < space.size(); ++start) {
        if (label[start] >= 0) continue;
        label[start] = next_label;
        q.push_back(start);
        while (!q.empty()) {
            const Code c = q.front();
            q.pop_front();
            for (int e = 0; e < g.num_edges; ++e) {
                const Code d = g.at(c, e);
                if (label[d] < 0) {
                    label[d] = next_label;
                    q.push_back(d);
                }
            }
        }
        ++next_label;
    }
    return label;
}

std::vector<Rational> conserved_vector(const std::vector<int>& eta, const ConsvBasis& basis) {
    std::vector<Rational> out;
    for (const auto& xi : basis.vectors) {
        Rational s = 0;
        for (int state : eta) {
            if (state < 0 || state >= static_cast<int>(xi.size()))
                throw Error(ErrorKind::InvalidInput, "state index out of range for basis");
            s += xi[static_cast<std::size_t>(state)];
        }
        out.push_back(s);
    }
    return out;
}

std::vector<std::vector<long long>> conserved_keys(const ConfigSpace& space, const ConsvBasis& basis) {
    const auto xi = basis.as_integer();
    std::vector<std::vector<long long>> keys(space.size(), std::vector<long long>(xi.size(), 0));
    for (Code c = 0; c < space.size(); ++c)
        for (Vertex v = 0; v < space.locale().size(); ++v) {
            const int s = space.digit(c, v);
            for (std::size_t i = 0; i < xi.size(); ++i) keys[c][i] += xi[i][static_cast<std::size_t>(s)];
        }
    return keys;
}

std::vector<int> conserved_classes(const ConfigSpace& space, const ConsvBasis& basis) {
    const auto keys = conserved_keys(space, basis);
    std::map<std::vector<long long>, int> ids;
    std::vector<int> label(space.size());
    for (Code c = 0; c < space.size(); ++c) {
        auto [it, fresh] = ids.try_emplace(keys[c], static_cast<int>(ids.size()));
        label[c] = it->second;
    }
    return label;
}

IrreducibilityReport irreducibly_quantified_check(const InteractionTable& phi, const Locale& X,
                                                  std::uint64_t budget) {
    const ConfigSpace space(X, phi, budget);
    const ConsvBasis basis = conserved_basis(phi);
    const auto cls = conserved_classes(space, basis);
    const auto comp = transition_components(space, build_transition_graph(space));

    IrreducibilityReport r;
    r.locale = X.name();
    r.configurations = space.size();
    r.classes = cls.empty() ? 0 : *std::max_element(cls.begin(), cls.end()) + 1;
    r.components = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    r.connected = r.classes == r.components;
    if (!r.connected) {
        // First class (in code order) holding two components.
        std::vector<Code> first_of_class(static_cast<std::size_t>(r.classes), space.size());
        for (Code c = 0; c < space.size(); ++c) {
            Code& f = first_of_class[static_cast<std::size_t>(cls[c])];
            if (f == space.size()) {
                f = c;
            } else if (comp[f] != comp[c]) {
                auto a = space.decode(f);
                auto b = space.decode(c);
                if (b < a) std::swap(a, b);
                r.witness = std::make_pair(std::move(a), std::move(b));
                break;
            }
        }
    }
    return r;
}

std::vector<IrreducibilityReport> irreducibility_on_family(const InteractionTable& phi,
                                                           const std::vector<Locale>& family,
                                                           std::uint64_t budget) {
    std::vector<IrreducibilityReport> out;
    for (const Locale& X : family) out.push_back(irreducibly_quantified_check(phi, X, budget));
    return out;
}

std::vector<Locale> default_locale_family() {
    return {path_locale(2), path_locale(3), complete_locale(3), rect_locale({2, 2})};
}

std::optional<std::vector<int>> find_path(const ConfigSpace& space, const std::vector<int>& from,
                                          const std::vector<int>& to) {
    const ConsvBasis basis = conserved_basis(space.interaction());
    if (conserved_vector(from, basis) != conserved_vector(to, basis))
        throw Error(ErrorKind::InvalidQuery, "configurations have different conserved vectors");
    const Code src = space.encode(from);
    const Code dst = space.encode(to);
    std::vector<Code> parent(space.size(), space.size());
    std::vector<int> via(space.size(), -1);
    parent[src] = src;
    std::deque<Code> q{src};
    while (!q.empty() && parent[dst] == space.size()) {
        const Code c = q.front();
        q.pop_front();
        for (int e = 0; e < space.locale().num_edges(); ++e) {
            const Code d = space.apply_edge(c, e);
            if (parent[d] == space.size()) {
                parent[d] = c;
                via[d] = e;
                q.push_back(d);
            }
        }
    }
    if (parent[dst] == space.size()) return std::nullopt;
    std::vector<int> path;
    for (Code c = dst; c != src; c = parent[c]) path.push_back(via[c]);
    std::reverse(path.begin(), path.end());
    return path;
}

bool is_class_measurable(const FunctionTable& f, const Window& lambda, const InteractionTable& phi,
                         double tol) {
    if (!window_includes(f.window(), lambda))
        throw Error(ErrorKind::InvalidInput, "Λ must lie inside the function window");
    const auto xi = conserved_basis(phi).as_integer();
    const Window rest = window_difference(f.window(), lambda);
    const auto rest_code = restriction_map(f.window(), rest, f.num_states());
    std::vector<int> lam_pos;
    for (const Site& s : lambda) lam_pos.push_back(f.position(s));
    std::map<std::pair<std::vector<long long>, Code>, double> fibre;
    for (Code c = 0; c < f.size(); ++c) {
        std::vector<long long> key(xi.size(), 0);
        for (int p : lam_pos) {
            const int s = f.digit(c, p);
            for (std::size_t i = 0; i < xi.size(); ++i) key[i] += xi[i][static_cast<std::size_t>(s)];
        }
        auto [it, fresh] = fibre.try_emplace({std::move(key), rest_code[c]}, f[c]);
        if (!fresh && std::abs(it->second - f[c]) > tol) return false;
    }
    return true;
}

} // namespace vardec
