#pragma once

#include <boost/rational.hpp>

#include <string>
#include <utility>
#include <vector>

namespace vardec {

using Rational = boost::rational<long long>;
using StatePair = std::pair<int, int>;

struct StateSpace {
    std::vector<std::string> labels;
    int base = 0;

    int size() const { return static_cast<int>(labels.size()); }
};

// The map φ on S×S together with the base state *.
class InteractionTable {
public:
    InteractionTable() = default;
    // `map[s1 * |S| + s2]` is φ(s1, s2). Throws InvalidInput on bad shape,
    // duplicate labels, out-of-range images or base index.
    InteractionTable(StateSpace space, std::vector<StatePair> map, std::string name = "custom");

    const StateSpace& space() const { return space_; }
    int num_states() const { return space_.size(); }
    int base() const { return space_.base; }
    const std::string& name() const { return name_; }

    StatePair apply(int s1, int s2) const { return map_[index(s1, s2)]; }
    // φ̄ = ι∘φ∘ι
    StatePair apply_bar(int s1, int s2) const {
        auto [a, b] = apply(s2, s1);
        return {b, a};
    }
    bool fixes(int s1, int s2) const { return apply(s1, s2) == StatePair{s1, s2}; }

private:
    std::size_t index(int s1, int s2) const {
        return static_cast<std::size_t>(s1 * num_states() + s2);
    }

    StateSpace space_;
    std::vector<StatePair> map_;
    std::string name_;
};

// Multi-species exclusion with κ species: states 0..κ, φ swaps the pair.
InteractionTable sep(int kappa);
// Generalized exclusion with at most κ particles per site: one particle hops.
InteractionTable gep(int kappa);
InteractionTable identity_interaction(int num_states);

struct ValidationReport {
    bool valid = true;
    std::vector<StatePair> violations;
};

ValidationReport validate_interaction(const InteractionTable& phi);

struct ConsvBasis {
    std::vector<std::vector<Rational>> vectors;

    int dimension() const { return static_cast<int>(vectors.size()); }
    std::vector<std::vector<double>> as_real() const;
    // Each vector scaled by the lcm of its denominators, so all entries are integers.
    std::vector<std::vector<long long>> as_integer() const;
};

// Null space of {ξ(*) = 0} ∪ {ξ(s1')+ξ(s2') = ξ(s1)+ξ(s2)} in reduced echelon
// form, pivots taken in state order, one basis vector per free state.
ConsvBasis conserved_basis(const InteractionTable& phi);

bool is_conserved(const InteractionTable& phi, const std::vector<Rational>& xi);

// c_φ = 1 and the additive monoid generated by ξ(S) is ℕ or ℤ.
bool is_simple(const InteractionTable& phi);

} // namespace vardec
