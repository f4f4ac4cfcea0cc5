#pragma once

#include "vardec/configspace.hpp"
#include "vardec/forms.hpp"
#include "vardec/function_table.hpp"
#include "vardec/interaction.hpp"
#include "vardec/locale.hpp"
#include "vardec/measure.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace vardec {

// A translation-invariant form on Z^d stored by its values on e_j = (0, 1_j).
struct ShiftInvariantForm {
    int d = 1;
    int num_states = 1;
    std::vector<FunctionTable> rep;  // one table per direction j

    static ShiftInvariantForm zero(int d, int num_states);
    ShiftInvariantForm& operator+=(const ShiftInvariantForm& other);
    ShiftInvariantForm& operator*=(double a);
};

// The 2d orbit representatives of directed edges: (0, +1_j) then (0, -1_j).
std::vector<LatticeEdge> orbit_representatives(int d);

// ω_e for any nearest-neighbour edge, by translation and, for edges pointing
// in a negative direction, by ω_e(η) = −ω_ē(η^e).
FunctionTable edge_value(const ShiftInvariantForm& w, const LatticeEdge& e, const InteractionTable& phi);

// Representative tables must vanish on fixed points of e_j and agree with the
// reverse edge when both give the same transition.
AlternationReport check_representatives(const ShiftInvariantForm& w, const InteractionTable& phi,
                                        double tol = 1e-9);

// ∂𝔄^j_ξ: representative ξ(η^{e_j}_{1_j}) − ξ(η_{1_j}) in direction j, zero elsewhere.
ShiftInvariantForm current_form(const std::vector<double>& xi, int j, int d, const InteractionTable& phi);

// (∂Γ_f)_{e_j} = Σ_x ∇_{e_j} τ_x f over the translates that meet e_j.
FunctionTable gamma_differential(const FunctionTable& f, int j, const InteractionTable& phi);
ShiftInvariantForm exact_form(const FunctionTable& f, int d, const InteractionTable& phi);

// π^Λ of ω on every edge of a lattice box. Throws WindowExceedsBox when a
// representative window does not fit inside the box.
Form project_to_box(const ShiftInvariantForm& w, const ConfigSpace& box, const SiteMeasure& nu);
// Same, but a representative wider than the box is averaged down by π^Λ.
Form project_to_box_averaged(const ShiftInvariantForm& w, const ConfigSpace& box, const SiteMeasure& nu);

// Rectangular test boxes with at least two sites per axis and at most
// `max_configs` configurations.
std::vector<Locale> test_boxes(int d, int num_states, std::uint64_t max_configs);
bool is_closed_shift_invariant(const ShiftInvariantForm& w, const InteractionTable& phi, const SiteMeasure& nu,
                               std::uint64_t max_configs = 1u << 14);

// Finite supports of uniform functions of diameter <= R, anchored so that the
// lexicographically least site is the origin.
std::vector<Window> uniform_supports(int d, int radius);

struct DecompositionResult {
    Eigen::MatrixXd a;              // c_φ × d, ω = ∂Γ_f + Σ a_ij ∂𝔄^j_{ξ^(i)} + residual
    FunctionTable f;                // mean zero, on the union of the supports
    std::vector<double> residual;   // ‖residual_{e_j}‖_μ per direction
    int unknowns = 0;
    int rank = 0;
    int gauge_dim = 0;
    bool closed_checked = false;
    std::vector<std::string> warnings;
};

struct DecomposeOptions {
    int radius = 1;
    double rank_tol = 1e-10;
    bool check_closed = true;
    std::uint64_t closed_check_configs = 1u << 14;
    int max_unknowns = 4000;
};

DecompositionResult decompose(const ShiftInvariantForm& w, const ConsvBasis& basis, const InteractionTable& phi,
                              const SiteMeasure& nu, const DecomposeOptions& opt);

// f − τ_{1_j} f for every direction j, on the enlarged window.
std::vector<FunctionTable> delta_map(const FunctionTable& f, int d);

struct PsiSequenceStep {
    int n = 0;
    Window lambda;
    Window sigma;
    FunctionTable F;        // potential on S^{Σ_n}, orthogonal to Ker ∂_{Σ_n}
    FunctionTable summand;  // π^{Λ_n} F_n
    ShiftInvariantForm dpsi;
    ShiftInvariantForm omega_n;
    ShiftInvariantForm omega_dagger;
    // Norms ‖·‖_μ per orbit representative (see orbit_representatives).
    std::vector<double> plus_norm;
    std::vector<double> minus_norm;
    std::vector<double> dagger_norm;
    double omega_sp = 0.0;      // ‖ω‖_sp
    double identity_error = 0.0;  // max |∂Ψ_n − ω_n − ω†_n|
};

PsiSequenceStep psi_sequence(const ShiftInvariantForm& w, const InteractionTable& phi, const SiteMeasure& nu,
                             int n, std::uint64_t budget = kDefaultBudget);

// Worst ratio of ‖ω^±_{n,e}‖² and ‖ω†_{n,e}‖² to
// C·(|∂Λ_n|²/|Λ_n|²)·(|Σ_n|/|Σ_n∖Λ_n|)·diam(Σ_n)²·‖ω‖²_sp.
double boundary_bound_ratio(const PsiSequenceStep& step, int d, double constant);

// ∇_ẽ(π^{Λ∪Λ'} g) = 0 for every lattice edge ẽ inside Λ'.
bool locality_probe(const FunctionTable& g, const Window& lambda, const Window& lambda_prime, int d,
                    const InteractionTable& phi, const SiteMeasure& nu, double tol = 1e-10);

} // namespace vardec
