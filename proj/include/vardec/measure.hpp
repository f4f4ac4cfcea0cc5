#pragma once

#include "vardec/function_table.hpp"
#include "vardec/interaction.hpp"
#include "vardec/locale.hpp"

#include <map>
#include <string>
#include <vector>

namespace vardec {

class SiteMeasure {
public:
    SiteMeasure() = default;
    // Weights must be positive and sum to 1 within 1e-12.
    explicit SiteMeasure(std::vector<double> weights, std::string name = "custom");

    static SiteMeasure uniform(int num_states);
    // ν(m) ∝ ρ^m on {0..|S|-1}.
    static SiteMeasure geometric(int num_states, double rho);

    int size() const { return static_cast<int>(w_.size()); }
    double operator()(int s) const { return w_[static_cast<std::size_t>(s)]; }
    const std::vector<double>& weights() const { return w_; }
    const std::string& name() const { return name_; }

private:
    std::vector<double> w_;
    std::string name_;
};

// μ(η) for every code on a window of m sites.
std::vector<double> product_weights(const SiteMeasure& nu, std::size_t num_sites);

double expectation(const FunctionTable& f, const SiteMeasure& nu);
double inner(const FunctionTable& f, const FunctionTable& g, const SiteMeasure& nu);
double mu_norm(const FunctionTable& f, const SiteMeasure& nu);
// sqrt(E_μ[r f²]) on the joint window.
double weighted_norm(const FunctionTable& f, const FunctionTable& rate, const SiteMeasure& nu);

// π^Λ f as a function on Λ (sites of Λ outside supp f are carried as dummies).
FunctionTable conditional_expectation(const FunctionTable& f, const Window& lambda,
                                      const SiteMeasure& nu);

struct ExpansionPieces {
    enum class Flavor { Mu, Base };
    Flavor flavor = Flavor::Mu;
    std::map<Window, FunctionTable> pieces;

    FunctionTable reconstruct(int num_states) const;
};

// f_Λ = π^Λ f − Σ_{Λ''⊊Λ} f_{Λ''} over all Λ ⊆ supp f.
ExpansionPieces expand_mu(const FunctionTable& f, const SiteMeasure& nu);
// f*_Λ = ι^Λ f − Σ_{Λ''⊊Λ} f*_{Λ''}, ι^Λ fixing every coordinate outside Λ to `base`.
ExpansionPieces expand_base(const FunctionTable& f, int base);
// ℛ: base-flavour pieces with f*_∅ = 0 to μ-flavour pieces of f − E_μ f.
ExpansionPieces renormalize(const ExpansionPieces& base_pieces, const SiteMeasure& nu,
                            double tol = 1e-12);
// ℛ⁻¹: μ-flavour pieces with f_∅ = 0 back to normalized base-flavour pieces.
ExpansionPieces unrenormalize(const ExpansionPieces& mu_pieces, int base, int num_states,
                              double tol = 1e-12);
// Largest sup-norm gap between matching pieces, a missing piece counting as zero.
double max_piece_difference(const ExpansionPieces& a, const ExpansionPieces& b);

// C_{φ,ν} = sup over S² of max{ν(s1')ν(s2')/(ν(s1)ν(s2)), reciprocal}.
double c_phi_nu(const InteractionTable& phi, const SiteMeasure& nu);

// One positive table per locale edge, windows given by locale sites.
struct Rate {
    std::vector<FunctionTable> edge;
};

Rate trivial_rate(const Locale& X, int num_states);
Rate canonical_rate(const SiteMeasure& nu, const InteractionTable& phi, const Locale& X);
bool is_reversible(const Rate& r, const SiteMeasure& nu, const InteractionTable& phi,
                   const Locale& X, double tol = 1e-12);

struct RateBounds {
    double M = 1.0;
    double A = 1.0;
};

// M_{r_e} and A_{r_e}, evaluated on the joint window of r_e, r_ē and e.
RateBounds rate_bounds(const Rate& r, const SiteMeasure& nu, const InteractionTable& phi,
                       const Locale& X, int e);

} // namespace vardec
