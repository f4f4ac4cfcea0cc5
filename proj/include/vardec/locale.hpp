#pragma once

#include "vardec/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vardec {

using Vertex = int;

struct Edge {
    Vertex o = 0;
    Vertex t = 0;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

// A finite connected symmetric simple directed graph. Every vertex carries a
// Site; vertices are stored in increasing Site order so that vertex index and
// digit position in a configuration code agree.
class Locale {
public:
    Locale() = default;
    // Edges may be listed in one direction only; reverses are added. Throws
    // InvalidInput on self-loops, unknown vertices, duplicate sites or a
    // disconnected graph.
    Locale(std::vector<Site> sites, std::vector<Edge> edges, std::string name, int dim = 1);

    int size() const { return static_cast<int>(sites_.size()); }
    int dim() const { return dim_; }
    const std::string& name() const { return name_; }
    const std::vector<Site>& sites() const { return sites_; }
    const Site& site(Vertex v) const { return sites_[static_cast<std::size_t>(v)]; }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    int reverse(int e) const { return reverse_[static_cast<std::size_t>(e)]; }
    std::optional<int> edge_index(Vertex o, Vertex t) const;
    std::optional<Vertex> vertex_of(const Site& s) const;

    int degree() const;
    // Graph distance restricted to the locale; -1 for unreachable.
    std::vector<int> distances_from(Vertex v) const;
    int diameter() const;

    // Induced sub-locale on `subset`; must itself be connected.
    Locale induced(const std::vector<Vertex>& subset, std::string name = {}) const;

private:
    std::vector<Site> sites_;
    std::vector<Edge> edges_;
    std::vector<int> reverse_;
    std::string name_;
    int dim_ = 1;
};

Locale path_locale(int k);
Locale cycle_locale(int k);
Locale complete_locale(int k);
// Λ_n = [-n, n]^d with nearest-neighbour edges.
Locale box_locale(int d, int n);
// Rectangle [0, w_1) × ... × [0, w_d).
Locale rect_locale(const std::vector<int>& widths);
// Nearest-neighbour locale induced by an arbitrary connected set of lattice sites.
Locale lattice_locale(int d, std::vector<Site> sites, std::string name);
// "p3", "c4", "k3", "box2x2", "box3x2", "cube1" (Λ_1 in d=1), ...
Locale locale_by_name(const std::string& name);

// ∂Λ = {e : o(e) ∈ Λ, t(e) ∉ Λ} inside a finite locale, as edge indices.
std::vector<int> boundary(const Locale& X, const std::vector<Vertex>& lambda);
// {x ∈ Λ : d(x, Λ^c) <= ℓ}; vertices with Λ^c unreachable are never included.
std::vector<Vertex> perimeter(const Locale& X, const std::vector<Vertex>& lambda, int ell);

// ---- Z^d lattice ----

struct LatticeEdge {
    Site o;
    Site t;
    friend auto operator<=>(const LatticeEdge&, const LatticeEdge&) = default;
};

std::vector<Site> lattice_box(int d, int n);
std::vector<LatticeEdge> lattice_boundary(int d, const std::vector<Site>& lambda);
std::vector<Site> lattice_perimeter(int d, const std::vector<Site>& lambda, int ell);
int lattice_diameter(const std::vector<Site>& lambda);
// Edges of Z^d with both endpoints in Λ.
std::vector<LatticeEdge> lattice_inner_edges(int d, const std::vector<Site>& lambda);

struct CountingReport {
    int d = 1;
    int n = 1;
    long long volume = 0;        // |Λ_n|
    long long boundary = 0;      // |∂Λ_n|
    int degree = 0;              // deg(Z^d) = 2d
    std::vector<int> ells;
    std::vector<long long> perimeter;  // |Λ_n^[ℓ]| for each requested ℓ
    bool first_inequality = false;     // |Λ^[1]| <= |∂Λ| <= deg·|Λ^[1]|
    bool perimeter_inequality = false; // |Λ^[ℓ]| <= |Λ^[1]|·deg^ℓ for all requested ℓ
    bool ok() const { return first_inequality && perimeter_inequality; }
};

CountingReport counting_report(int d, int n, std::vector<int> ells = {1, 2, 3});

// (|∂Λ_n|²/|Λ_n|²)·(|Σ_n|/|Σ_n∖Λ_n|)·diam(Σ_n)² with Σ_n = Λ_{2n}, closed form.
double tempered_ratio(int d, long long n);
double tempered_ratio_limit(int d);

struct OrbitCounts {
    long long single = 0;  // |G^e_n|
    long long pair = 0;    // |G^{e,ẽ}_n|, 0 when ẽ is absent
};

OrbitCounts orbit_edge_counts(int d, int n, const LatticeEdge& e,
                              const std::optional<LatticeEdge>& e2 = std::nullopt);

// Membership in the half-space Y^e attached to a nearest-neighbour edge e.
bool in_half_space(const LatticeEdge& e, const Site& x);

} // namespace vardec
