#pragma once

#include "vardec/configspace.hpp"
#include "vardec/measure.hpp"

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace vardec {

struct GapReport {
    std::string locale;
    int sites = 0;
    // +∞ when every transition component is a single configuration.
    double gap = std::numeric_limits<double>::infinity();
    double normalized = std::numeric_limits<double>::infinity();
    double residual = 0.0;
    FunctionTable minimizer;  // attains the gap; zero outside its component
};

// Smallest Rayleigh quotient Σ_e E_μ[r_e (∇_e f)²] / ‖f‖²_μ over f ⊥ Ker ∂_Λ,
// solved as a dense symmetric eigenproblem per transition component. The
// trivial rate is used when `rate` is null.
GapReport spectral_gap(const ConfigSpace& space, const SiteMeasure& nu, const Rate* rate = nullptr);

struct GapScanRow {
    int n = 0;
    double gap = 0.0;
    double normalized = 0.0;
    double running_min = 0.0;
};

// C_{SG,K_n}/n over complete locales; throws NotIrreduciblyQuantified when some
// conserved class of K_n splits into several components.
std::vector<GapScanRow> uniform_gap_scan(const InteractionTable& phi, const SiteMeasure& nu,
                                         const std::vector<int>& n_list,
                                         std::uint64_t budget = kDefaultBudget);
// inf over n = 2..max_n of C_{SG,K_n}/n.
double estimate_csg(const InteractionTable& phi, const SiteMeasure& nu, int max_n);

// sup 𝒟_{x,y}(f) / 𝒟_{x→y}(f) on the two-site locale.
double estimate_ctilde(const InteractionTable& phi, const SiteMeasure& nu);
double mpl_constant(const InteractionTable& phi, const SiteMeasure& nu);  // 6·max{1, C̃}
double be_constant(const InteractionTable& phi, const SiteMeasure& nu);   // 3(C_{φ,ν}|S|² + |S|)
// C_BE·C_MP·(C_SG⁻¹ + 1)
double dagger_constant(const InteractionTable& phi, const SiteMeasure& nu, double csg);

struct InequalityReport {
    std::string name;
    double constant = 0.0;
    double worst_ratio = 0.0;
    int trials = 0;
    bool pass = true;
};

inline constexpr double kInequalitySlack = 1e-9;

// Standard normal entries, then the μ-mean subtracted.
FunctionTable random_function(const Window& w, const SiteMeasure& nu, std::mt19937_64& rng);

InequalityReport verify_mpl(const Locale& X, const InteractionTable& phi, const SiteMeasure& nu,
                            int trials, std::uint64_t seed);
InequalityReport verify_boundary_estimate(const Locale& sigma, const std::vector<Vertex>& lambda,
                                          const InteractionTable& phi, const SiteMeasure& nu, int trials,
                                          std::uint64_t seed);
InequalityReport verify_sigma_gap_bound(const Locale& sigma, const InteractionTable& phi,
                                        const SiteMeasure& nu, int trials, std::uint64_t seed, double csg);
InequalityReport verify_dagger_bound(const Locale& sigma, const std::vector<Vertex>& lambda,
                                     const InteractionTable& phi, const SiteMeasure& nu, int trials,
                                     std::uint64_t seed, double csg);

} // namespace vardec
