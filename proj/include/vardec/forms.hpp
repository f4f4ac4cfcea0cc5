#pragma once

#include "vardec/configspace.hpp"
#include "vardec/function_table.hpp"
#include "vardec/measure.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vardec {

// An edge-indexed family ω_e on S^Λ for the locale of a ConfigSpace. Each
// ω_e is stored over the full locale window.
struct Form {
    std::vector<std::vector<double>> values;  // [edge][code]

    static Form zero(const ConfigSpace& space);
    int num_edges() const { return static_cast<int>(values.size()); }
    FunctionTable edge_table(const ConfigSpace& space, int e) const;
};

struct AlternationReport {
    bool ok = true;
    std::string first_violation;
};

// ω_e(η)=0 on fixed points, ω_e(η)=−ω_ē(η^e), and ω_e(η)=ω_{e'}(η) when η^e=η^{e'}.
AlternationReport check_alternating(const ConfigSpace& space, const Form& w, double tol = 1e-9);

// (∂f)_e(η) = f(η^e) − f(η); f may live on any sub-window of the locale.
Form differential(const ConfigSpace& space, const FunctionTable& f);

struct Potential {
    FunctionTable f;
    std::vector<Code> anchors;  // least code of each transition component, where f = 0
};

bool is_closed(const ConfigSpace& space, const Form& w, double tol = 1e-9);
// Throws NotClosed when the spanning-tree potential is inconsistent.
Potential solve_potential(const ConfigSpace& space, const Form& w, double tol = 1e-9);

// π^Λ applied edgewise for e ∈ E_Λ; result lives on the induced locale of Λ.
Form project_form(const ConfigSpace& big, const Form& w, const ConfigSpace& small, const SiteMeasure& nu);

// ∂†_Λ f = ∂(π^Λ f) − ∂_Λ(π^Λ f) for f on the Σ locale; Λ given as vertices of Σ.
Form boundary_differential(const ConfigSpace& sigma, const FunctionTable& f,
                           const std::vector<Vertex>& lambda, const SiteMeasure& nu);

// sup_e ‖ω_e‖_{r_e}; an empty rate means r ≡ 1.
double sp_norm(const ConfigSpace& space, const Form& w, const SiteMeasure& nu, const Rate* rate = nullptr);
// sqrt(Σ_{e∈edges} ‖ω_e‖²_{r_e}) over a set of representative edges.
double r_norm(const ConfigSpace& space, const Form& w, const SiteMeasure& nu, const std::vector<int>& edges,
              const Rate* rate = nullptr);
double edge_norm(const ConfigSpace& space, const Form& w, int e, const SiteMeasure& nu,
                 const Rate* rate = nullptr);

// Subtracts the μ-weighted mean of f on every transition component, i.e.
// the μ-orthogonal projection onto (Ker ∂)^⊥.
FunctionTable project_out_kernel(const ConfigSpace& space, const FunctionTable& f, const SiteMeasure& nu);

} // namespace vardec
