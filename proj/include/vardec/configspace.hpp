#pragma once

#include "vardec/function_table.hpp"
#include "vardec/interaction.hpp"
#include "vardec/locale.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vardec {

// S^Λ for a finite locale together with the interaction acting on it. Codes
// use vertex order as digit order, matching FunctionTable over X.sites().
class ConfigSpace {
public:
    ConfigSpace(Locale X, InteractionTable phi, std::uint64_t budget = kDefaultBudget);

    const Locale& locale() const { return X_; }
    const InteractionTable& interaction() const { return phi_; }
    int num_states() const { return phi_.num_states(); }
    Code size() const { return size_; }
    const Window& window() const { return X_.sites(); }

    int digit(Code c, Vertex v) const {
        return static_cast<int>((c / stride_[static_cast<std::size_t>(v)]) % static_cast<Code>(num_states()));
    }
    Code with_digit(Code c, Vertex v, int s) const {
        return c + static_cast<Code>(s - digit(c, v)) * stride_[static_cast<std::size_t>(v)];
    }
    std::vector<int> decode(Code c) const;
    Code encode(const std::vector<int>& states) const;

    // η^e for edge index e; throws InvalidQuery for an unknown index.
    Code apply_edge(Code c, int e) const;
    // η^{x→y}; identity for x = y.
    Code apply_move(Code c, Vertex x, Vertex y) const;
    // η^{x,y}: unconditional swap of the two components.
    Code exchange(Code c, Vertex x, Vertex y) const;

    std::vector<int> apply_edge(const std::vector<int>& eta, int e) const;
    std::vector<int> apply_move(const std::vector<int>& eta, Vertex x, Vertex y) const;
    std::vector<int> exchange(const std::vector<int>& eta, Vertex x, Vertex y) const;

private:
    Locale X_;
    InteractionTable phi_;
    Code size_ = 1;
    std::vector<Code> stride_;
};

// next[c * |E| + e] = code of η^e.
struct TransitionGraph {
    Code nodes = 0;
    int num_edges = 0;
    std::vector<Code> next;

    Code at(Code c, int e) const { return next[c * static_cast<Code>(num_edges) + static_cast<Code>(e)]; }
};

TransitionGraph build_transition_graph(const ConfigSpace& space);
// Component label per configuration (labels in order of least member).
std::vector<int> transition_components(const ConfigSpace& space, const TransitionGraph& g);

// Σ_x ξ^(i)(η_x), exact.
std::vector<Rational> conserved_vector(const std::vector<int>& eta, const ConsvBasis& basis);
// Integer-scaled conserved vector of every configuration, used as class key.
std::vector<std::vector<long long>> conserved_keys(const ConfigSpace& space, const ConsvBasis& basis);
// Class label per configuration (labels in order of least member).
std::vector<int> conserved_classes(const ConfigSpace& space, const ConsvBasis& basis);

struct IrreducibilityReport {
    std::string locale;
    Code configurations = 0;
    int classes = 0;
    int components = 0;
    bool connected = true;
    // Two configurations with equal conserved vector and no path between them.
    std::optional<std::pair<std::vector<int>, std::vector<int>>> witness;
};

IrreducibilityReport irreducibly_quantified_check(const InteractionTable& phi, const Locale& X,
                                                  std::uint64_t budget = kDefaultBudget);
std::vector<IrreducibilityReport> irreducibility_on_family(const InteractionTable& phi,
                                                           const std::vector<Locale>& family,
                                                           std::uint64_t budget = kDefaultBudget);
std::vector<Locale> default_locale_family();

// Shortest sequence of edge indices taking η to η′, or nullopt when none
// exists. Throws InvalidQuery when the conserved vectors differ.
std::optional<std::vector<int>> find_path(const ConfigSpace& space, const std::vector<int>& from,
                                          const std::vector<int>& to);

// f on S^{Λ'} is constant on every fibre of (ξ_Λ, η|_{Λ'∖Λ}).
bool is_class_measurable(const FunctionTable& f, const Window& lambda, const InteractionTable& phi,
                         double tol = 1e-12);

} // namespace vardec
