#pragma once

#include "vardec/core.hpp"
#include "vardec/interaction.hpp"

#include <functional>
#include <vector>

namespace vardec {

// Sorted, duplicate-free set of sites.
using Window = std::vector<Site>;

Window make_window(std::vector<Site> sites);
Window window_union(const Window& a, const Window& b);
Window window_intersection(const Window& a, const Window& b);
Window window_difference(const Window& a, const Window& b);
bool window_includes(const Window& super, const Window& sub);
Window translate_window(const Window& w, const Site& shift);

// A real function on S^Λ for a finite window Λ. Configuration codes are mixed
// radix with window[0] as the least significant digit.
class FunctionTable {
public:
    FunctionTable() = default;
    FunctionTable(Window window, int num_states, std::vector<double> values);

    static FunctionTable constant(int num_states, double c);
    static FunctionTable zero(Window window, int num_states);
    static FunctionTable tabulate(Window window, int num_states,
                                  const std::function<double(const std::vector<int>&)>& fn);

    const Window& window() const { return window_; }
    int num_states() const { return num_states_; }
    std::size_t size() const { return values_.size(); }
    int num_sites() const { return static_cast<int>(window_.size()); }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    double operator[](Code c) const { return values_[c]; }
    double& operator[](Code c) { return values_[c]; }

    Code stride(int i) const { return strides_[static_cast<std::size_t>(i)]; }
    int digit(Code c, int i) const {
        return static_cast<int>((c / strides_[static_cast<std::size_t>(i)]) %
                                static_cast<Code>(num_states_));
    }
    Code with_digit(Code c, int i, int s) const {
        return c + static_cast<Code>(s - digit(c, i)) * strides_[static_cast<std::size_t>(i)];
    }
    std::vector<int> decode(Code c) const;
    Code encode(const std::vector<int>& states) const;
    // Index of a site in the window, or -1.
    int position(const Site& s) const;

    // Apply φ to the pair of window positions (io, it).
    Code transition(Code c, int io, int it, const InteractionTable& phi) const;

    // Same function viewed on a larger window.
    FunctionTable extend(const Window& super) const;
    FunctionTable translate(const Site& shift) const;
    // Drop every site on which the function does not depend (within tol).
    FunctionTable trimmed(double tol = 0.0) const;

    FunctionTable& operator+=(const FunctionTable& g);
    FunctionTable& operator-=(const FunctionTable& g);
    FunctionTable& operator*=(double a);

private:
    void init_strides();

    Window window_;
    int num_states_ = 1;
    std::vector<double> values_{0.0};
    std::vector<Code> strides_;
};

FunctionTable operator+(const FunctionTable& a, const FunctionTable& b);
FunctionTable operator-(const FunctionTable& a, const FunctionTable& b);
FunctionTable operator*(const FunctionTable& a, const FunctionTable& b);
FunctionTable operator*(double a, FunctionTable f);

// For each code on `super`, the code of its restriction to `sub` ⊆ `super`.
std::vector<Code> restriction_map(const Window& super, const Window& sub, int num_states);

double max_abs(const FunctionTable& f);
// Sup-norm distance after extending both to the union window.
double max_abs_difference(const FunctionTable& a, const FunctionTable& b);

// ∇_e f(η) = f(η^e) − f(η) for the lattice or locale edge (o, t), on the window
// supp f ∪ {o, t}.
FunctionTable nabla(const FunctionTable& f, const Site& o, const Site& t, const InteractionTable& phi);
// ∇_{x→y} f: φ applied to the pair (x, y) whether or not it is an edge; zero for x = y.
FunctionTable nabla_move(const FunctionTable& f, const Site& x, const Site& y,
                         const InteractionTable& phi);

} // namespace vardec
