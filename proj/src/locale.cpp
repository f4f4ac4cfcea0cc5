#include "vardec/locale.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

namespace vardec {

Locale::Locale(std::vector<Site> sites, std::vector<Edge> edges, std::string name, int dim)
    : name_(std::move(name)), dim_(dim) {
    const int n = static_cast<int>(sites.size());
    if (n == 0) throw Error(ErrorKind::InvalidInput, "locale has no vertices");
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return sites[static_cast<std::size_t>(a)] < sites[static_cast<std::size_t>(b)];
    });
    std::vector<int> rank(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        rank[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;
        sites_.push_back(sites[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
        if (i > 0 && sites_[static_cast<std::size_t>(i)] == sites_[static_cast<std::size_t>(i - 1)])
            throw Error(ErrorKind::InvalidInput, "duplicate vertex site");
    }

    std::set<Edge> all;
    for (const Edge& e : edges) {
        if (e.o < 0 || e.o >= n || e.t < 0 || e.t >= n)
            throw Error(ErrorKind::InvalidInput, "edge references unknown vertex");
        if (e.o == e.t) throw Error(ErrorKind::InvalidInput, "self-loop edge");
        const Vertex o = rank[static_cast<std::size_t>(e.o)];
        const Vertex t = rank[static_cast<std::size_t>(e.t)];
        all.insert({o, t});
        all.insert({t, o});
    }
    edges_.assign(all.begin(), all.end());
    for (const Edge& e : edges_) {
        auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{e.t, e.o});
        reverse_.push_back(static_cast<int>(it - edges_.begin()));
    }
    for (int d : distances_from(0))
        if (d < 0) throw Error(ErrorKind::InvalidInput, "locale is not connected");
}

std::optional<int> Locale::edge_index(Vertex o, Vertex t) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{o, t});
    if (it == edges_.end() || it->o != o || it->t != t) return std::nullopt;
    return static_cast<int>(it - edges_.begin());
}

std::optional<Vertex> Locale::vertex_of(const Site& s) const {
    auto it = std::lower_bound(sites_.begin(), sites_.end(), s);
    if (it == sites_.end() || *it != s) return std::nullopt;
    return static_cast<Vertex>(it - sites_.begin());
}

int Locale::degree() const {
    std::vector<int> deg(sites_.size(), 0);
    for (const Edge& e : edges_) ++deg[static_cast<std::size_t>(e.o)];
    return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

std::vector<int> Locale::distances_from(Vertex v) const {
    std::vector<std::vector<Vertex>> adj(sites_.size());
    for (const Edge& e : edges_) adj[static_cast<std::size_t>(e.o)].push_back(e.t);
    std::vector<int> dist(sites_.size(), -1);
    std::deque<Vertex> q{v};
    dist[static_cast<std::size_t>(v)] = 0;
    while (!q.empty()) {
        const Vertex x = q.front();
        q.pop_front();
        for (Vertex y : adj[static_cast<std::size_t>(x)])
            if (dist[static_cast<std::size_t>(y)] < 0) {
                dist[static_cast<std::size_t>(y)] = dist[static_cast<std::size_t>(x)] + 1;
                q.push_back(y);
            }
    }
    return dist;
}

int Locale::diameter() const {
    int best = 0;
    for (int v = 0; v < size(); ++v)
        for (int d : distances_from(v)) best = std::max(best, d);
    return best;
}

Locale Locale::induced(const std::vector<Vertex>& subset, std::string name) const {
    std::vector<Vertex> sub = subset;
    std::sort(sub.begin(), sub.end());
    sub.erase(std::unique(sub.begin(), sub.end()), sub.end());
    std::vector<int> pos(sites_.size(), -1);
    std::vector<Site> s;
    for (std::size_t i = 0; i < sub.size(); ++i) {
        pos[static_cast<std::size_t>(sub[i])] = static_cast<int>(i);
        s.push_back(site(sub[i]));
    }
    std::vector<Edge> es;
    for (const Edge& e : edges_) {
        const int a = pos[static_cast<std::size_t>(e.o)];
        const int b = pos[static_cast<std::size_t>(e.t)];
        if (a >= 0 && b >= 0 && a < b) es.push_back({a, b});
    }
    return Locale(std::move(s), std::move(es), name.empty() ? name_ + "|sub" : std::move(name), dim_);
}

Locale path_locale(int k) {
    if (k < 1) throw Error(ErrorKind::InvalidInput, "path needs k >= 1");
    std::vector<Site> s;
    std::vector<Edge> e;
    for (int i = 0; i < k; ++i) s.emplace_back(i);
    for (int i = 0; i + 1 < k; ++i) e.push_back({i, i + 1});
    return Locale(std::move(s), std::move(e), "p" + std::to_string(k));
}

Locale cycle_locale(int k) {
    if (k < 3) throw Error(ErrorKind::InvalidInput, "cycle needs k >= 3");
    std::vector<Site> s;
    std::vector<Edge> e;
    for (int i = 0; i < k; ++i) {
        s.emplace_back(i);
        e.push_back({i, (i + 1) % k});
    }
    return Locale(std::move(s), std::move(e), "c" + std::to_string(k));
}

Locale complete_locale(int k) {
    if (k < 1) throw Error(ErrorKind::InvalidInput, "complete graph needs k >= 1");
    std::vector<Site> s;
    std::vector<Edge> e;
    for (int i = 0; i < k; ++i) {
        s.emplace_back(i);
        for (int j = i + 1; j < k; ++j) e.push_back({i, j});
    }
    return Locale(std::move(s), std::move(e), "k" + std::to_string(k));
}

Locale lattice_locale(int d, std::vector<Site> sites, std::string name) {
    std::sort(sites.begin(), sites.end());
    std::vector<Edge> e;
    for (std::size_t i = 0; i < sites.size(); ++i)
        for (std::size_t j = i + 1; j < sites.size(); ++j)
            if (l1_distance(sites[i], sites[j]) == 1)
                e.push_back({static_cast<int>(i), static_cast<int>(j)});
    return Locale(std::move(sites), std::move(e), std::move(name), d);
}

Locale box_locale(int d, int n) {
    return lattice_locale(d, lattice_box(d, n), "box" + std::to_string(d) + "d" + std::to_string(n));
}

Locale rect_locale(const std::vector<int>& widths) {
    const int d = static_cast<int>(widths.size());
    if (d < 1 || d > 3) throw Error(ErrorKind::InvalidInput, "rect needs 1..3 widths");
    std::vector<Site> s{Site{}};
    for (int j = 0; j < d; ++j) {
        if (widths[static_cast<std::size_t>(j)] < 1)
            throw Error(ErrorKind::InvalidInput, "rect width must be positive");
        std::vector<Site> next;
        for (const Site& p : s)
            for (int i = 0; i < widths[static_cast<std::size_t>(j)]; ++i) {
                Site q = p;
                q[j] = i;
                next.push_back(q);
            }
        s = std::move(next);
    }
    std::string name = "box";
    for (int j = 0; j < d; ++j) name += (j ? "x" : "") + std::to_string(widths[static_cast<std::size_t>(j)]);
    return lattice_locale(d, std::move(s), name);
}

Locale locale_by_name(const std::string& name) {
    auto number = [&](std::size_t from) {
        try {
            return std::stoi(name.substr(from));
        } catch (...) {
            throw Error(ErrorKind::InvalidInput, "bad locale name '" + name + "'");
        }
    };
    if (name.rfind("box", 0) == 0) {
        std::vector<int> w;
        std::size_t pos = 3;
        while (pos <= name.size()) {
            std::size_t next = name.find('x', pos);
            try {
                w.push_back(std::stoi(name.substr(pos, next - pos)));
            } catch (...) {
                throw Error(ErrorKind::InvalidInput, "bad locale name '" + name + "'");
            }
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        return rect_locale(w);
    }
    if (name.size() >= 2 && name[0] == 'p') return path_locale(number(1));
    if (name.size() >= 2 && name[0] == 'c') return cycle_locale(number(1));
    if (name.size() >= 2 && name[0] == 'k') return complete_locale(number(1));
    throw Error(ErrorKind::InvalidInput, "unknown locale '" + name + "'");
}

std::vector<int> boundary(const Locale& X, const std::vector<Vertex>& lambda) {
    std::vector<char> in(static_cast<std::size_t>(X.size()), 0);
    for (Vertex v : lambda) in[static_cast<std::size_t>(v)] = 1;
    std::vector<int> out;
    for (int e = 0; e < X.num_edges(); ++e)
        if (in[static_cast<std::size_t>(X.edge(e).o)] && !in[static_cast<std::size_t>(X.edge(e).t)])
            out.push_back(e);
    return out;
}

std::vector<Vertex> perimeter(const Locale& X, const std::vector<Vertex>& lambda, int ell) {
    if (ell < 1) throw Error(ErrorKind::InvalidInput, "perimeter needs ell >= 1");
    std::vector<char> in(static_cast<std::size_t>(X.size()), 0);
    for (Vertex v : lambda) in[static_cast<std::size_t>(v)] = 1;
    // Multi-source BFS from the complement.
    std::vector<int> dist(static_cast<std::size_t>(X.size()), -1);
    std::deque<Vertex> q;
    for (Vertex v = 0; v < X.size(); ++v)
        if (!in[static_cast<std::size_t>(v)]) {
            dist[static_cast<std::size_t>(v)] = 0;
            q.push_back(v);
        }
    std::vector<std::vector<Vertex>> adj(static_cast<std::size_t>(X.size()));
    for (const Edge& e : X.edges()) adj[static_cast<std::size_t>(e.o)].push_back(e.t);
    while (!q.empty()) {
        const Vertex x = q.front();
        q.pop_front();
        for (Vertex y : adj[static_cast<std::size_t>(x)])
            if (dist[static_cast<std::size_t>(y)] < 0) {
                dist[static_cast<std::size_t>(y)] = dist[static_cast<std::size_t>(x)] + 1;
                q.push_back(y);
            }
    }
    std::vector<Vertex> out;
    for (Vertex v : lambda) {
        const int dv = dist[static_cast<std::size_t>(v)];
        if (dv > 0 && dv <= ell) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Site> lattice_box(int d, int n) {
    if (d < 1 || d > 3) throw Error(ErrorKind::InvalidInput, "lattice dimension must be 1..3");
    std::vector<Site> s{Site{}};
    for (int j = 0; j < d; ++j) {
        std::vector<Site> next;
        for (const Site& p : s)
            for (int i = -n; i <= n; ++i) {
                Site q = p;
                q[j] = i;
                next.push_back(q);
            }
        s = std::move(next);
    }
    std::sort(s.begin(), s.end());
    return s;
}

namespace {

bool contains(const std::vector<Site>& sorted, const Site& s) {
    return std::binary_search(sorted.begin(), sorted.end(), s);
}

} // namespace

std::vector<LatticeEdge> lattice_boundary(int d, const std::vector<Site>& lambda) {
    std::vector<Site> s = lambda;
    std::sort(s.begin(), s.end());
    std::vector<LatticeEdge> out;
    for (const Site& x : s)
        for (int j = 0; j < d; ++j)
            for (int sign : {-1, 1}) {
                const Site y = x + unit(j, sign);
                if (!contains(s, y)) out.push_back({x, y});
            }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Site> lattice_perimeter(int d, const std::vector<Site>& lambda, int ell) {
    if (ell < 1) throw Error(ErrorKind::InvalidInput, "perimeter needs ell >= 1");
    std::vector<Site> s = lambda;
    std::sort(s.begin(), s.end());
    // A shortest path to Λ^c stays in Λ until its last step, so BFS inside Λ
    // from the sites that touch the complement gives d(x, Λ^c).
    std::map<Site, int> dist;
    std::deque<Site> q;
    for (const Site& x : s) {
        bool touches = false;
        for (int j = 0; j < d && !touches; ++j)
            for (int sign : {-1, 1})
                if (!contains(s, x + unit(j, sign))) touches = true;
        if (touches) {
            dist[x] = 1;
            q.push_back(x);
        }
    }
    while (!q.empty()) {
        const Site x = q.front();
        q.pop_front();
        for (int j = 0; j < d; ++j)
            for (int sign : {-1, 1}) {
                const Site y = x + unit(j, sign);
                if (contains(s, y) && !dist.count(y)) {
                    dist[y] = dist[x] + 1;
                    q.push_back(y);
                }
            }
    }
    std::vector<Site> out;
    for (const auto& [x, dx] : dist)
        if (dx <= ell) out.push_back(x);
    return out;
}

int lattice_diameter(const std::vector<Site>& lambda) {
    int best = 0;
    for (const Site& a : lambda)
        for (const Site& b : lambda) best = std::max(best, l1_distance(a, b));
    return best;
}

std::vector<LatticeEdge> lattice_inner_edges(int d, const std::vector<Site>& lambda) {
    std::vector<Site> s = lambda;
    std::sort(s.begin(), s.end());
    std::vector<LatticeEdge> out;
    for (const Site& x : s)
        for (int j = 0; j < d; ++j)
            for (int sign : {-1, 1}) {
                const Site y = x + unit(j, sign);
                if (contains(s, y)) out.push_back({x, y});
            }
    std::sort(out.begin(), out.end());
    return out;
}

CountingReport counting_report(int d, int n, std::vector<int> ells) {
    if (n < 1) throw Error(ErrorKind::InvalidInput, "counting_report needs n >= 1");
    CountingReport r;
    r.d = d;
    r.n = n;
    r.degree = 2 * d;
    const auto box = lattice_box(d, n);
    r.volume = static_cast<long long>(box.size());
    r.boundary = static_cast<long long>(lattice_boundary(d, box).size());
    const long long p1 = static_cast<long long>(lattice_perimeter(d, box, 1).size());
    r.first_inequality = p1 <= r.boundary && r.boundary <= r.degree * p1;
    r.perimeter_inequality = true;
    r.ells = std::move(ells);
    for (int ell : r.ells) {
        const long long pl = static_cast<long long>(lattice_perimeter(d, box, ell).size());
        r.perimeter.push_back(pl);
        long double bound = static_cast<long double>(p1);
        for (int i = 0; i < ell; ++i) bound *= r.degree;
        if (static_cast<long double>(pl) > bound) r.perimeter_inequality = false;
    }
    return r;
}

double tempered_ratio(int d, long long n) {
    const long double a = 2.0L * n + 1.0L;
    const long double b = 4.0L * n + 1.0L;
    const long double boundary = 2.0L * d * std::pow(a, d - 1);
    const long double volume = std::pow(a, d);
    const long double sigma = std::pow(b, d);
    const long double diam = d * b;
    return static_cast<double>((boundary * boundary) / (volume * volume) * (sigma / (sigma - volume)) *
                               diam * diam);
}

double tempered_ratio_limit(int d) {
    return std::pow(4.0, d + 2) * std::pow(static_cast<double>(d), 4) /
           (std::pow(4.0, d) - std::pow(2.0, d));
}

OrbitCounts orbit_edge_counts(int d, int n, const LatticeEdge& e,
                              const std::optional<LatticeEdge>& e2) {
    if (l1_distance(e.o, e.t) != 1 || (e2 && l1_distance(e2->o, e2->t) != 1))
        throw Error(ErrorKind::InvalidInput, "orbit counts need nearest-neighbour edges");
    auto inside = [&](const Site& x) {
        for (int j = 0; j < d; ++j)
            if (x[j] < -n || x[j] > n) return false;
        return true;
    };
    // e ∈ τ(∂Λ_n) iff o(e) - τ ∈ Λ_n and t(e) - τ ∉ Λ_n; τ ranges over o(e) - Λ_n.
    OrbitCounts c;
    for (const Site& y : lattice_box(d, n)) {
        const Site tau = e.o - y;
        if (inside(e.t - tau)) continue;
        ++c.single;
        if (e2 && inside(e2->o - tau) && !inside(e2->t - tau)) ++c.pair;
    }
    return c;
}

bool in_half_space(const LatticeEdge& e, const Site& x) {
    for (int j = 0; j < 3; ++j) {
        const int step = e.t[j] - e.o[j];
        if (step == 1) return x[j] <= e.o[j];
        if (step == -1) return x[j] >= e.o[j];
    }
    return false;
}

} // namespace vardec
