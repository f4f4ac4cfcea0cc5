#include "vardec/function_table.hpp"

#include <algorithm>
#include <cmath>

namespace vardec {

Window make_window(std::vector<Site> sites) {
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    return sites;
}

Window window_union(const Window& a, const Window& b) {
    Window out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

Window window_intersection(const Window& a, const Window& b) {
    Window out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

Window window_difference(const Window& a, const Window& b) {
    Window out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool window_includes(const Window& super, const Window& sub) {
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

Window translate_window(const Window& w, const Site& shift) {
    Window out;
    out.reserve(w.size());
    for (const Site& s : w) out.push_back(s + shift);
    return out;  // translation preserves lexicographic order
}

FunctionTable::FunctionTable(Window window, int num_states, std::vector<double> values)
    : window_(std::move(window)), num_states_(num_states), values_(std::move(values)) {
    if (num_states_ < 1) throw Error(ErrorKind::InvalidInput, "function table needs |S| >= 1");
    for (std::size_t i = 1; i < window_.size(); ++i)
        if (!(window_[i - 1] < window_[i]))
            throw Error(ErrorKind::InvalidInput, "function table window must be sorted and distinct");
    init_strides();
    Code n = 1;
    for (std::size_t i = 0; i < window_.size(); ++i) n *= static_cast<Code>(num_states_);
    if (values_.size() != n)
        throw Error(ErrorKind::InvalidInput, "function table has " + std::to_string(values_.size()) +
                                                 " values, expected " + std::to_string(n));
}

void FunctionTable::init_strides() {
    strides_.clear();
    Code s = 1;
    for (std::size_t i = 0; i < window_.size(); ++i) {
        strides_.push_back(s);
        s *= static_cast<Code>(num_states_);
    }
}

FunctionTable FunctionTable::constant(int num_states, double c) {
    return FunctionTable({}, num_states, {c});
}

FunctionTable FunctionTable::zero(Window window, int num_states) {
    Code n = 1;
    for (std::size_t i = 0; i < window.size(); ++i) n *= static_cast<Code>(num_states);
    return FunctionTable(std::move(window), num_states, std::vector<double>(n, 0.0));
}

FunctionTable FunctionTable::tabulate(Window window, int num_states,
                                      const std::function<double(const std::vector<int>&)>& fn) {
    FunctionTable f = zero(std::move(window), num_states);
    for (Code c = 0; c < f.size(); ++c) f[c] = fn(f.decode(c));
    return f;
}

std::vector<int> FunctionTable::decode(Code c) const {
    std::vector<int> s(window_.size());
    for (std::size_t i = 0; i < window_.size(); ++i) {
        s[i] = static_cast<int>(c % static_cast<Code>(num_states_));
        c /= static_cast<Code>(num_states_);
    }
    return s;
}

Code FunctionTable::encode(const std::vector<int>& states) const {
    if (states.size() != window_.size())
        throw Error(ErrorKind::InvalidInput, "configuration length does not match window");
    Code c = 0;
    for (std::size_t i = window_.size(); i-- > 0;) {
        if (states[i] < 0 || states[i] >= num_states_)
            throw Error(ErrorKind::InvalidInput, "state index out of range");
        c = c * static_cast<Code>(num_states_) + static_cast<Code>(states[i]);
    }
    return c;
}

int FunctionTable::position(const Site& s) const {
    auto it = std::lower_bound(window_.begin(), window_.end(), s);
    if (it == window_.end() || *it != s) return -1;
    return static_cast<int>(it - window_.begin());
}

Code FunctionTable::transition(Code c, int io, int it, const InteractionTable& phi) const {
    if (io == it) return c;
    const int a = digit(c, io);
    const int b = digit(c, it);
    auto [a2, b2] = phi.apply(a, b);
    return with_digit(with_digit(c, io, a2), it, b2);
}

std::vector<Code> restriction_map(const Window& super, const Window& sub, int num_states) {
    if (!window_includes(super, sub))
        throw Error(ErrorKind::InvalidInput, "restriction target is not a sub-window");
    // Stride in `sub` of each digit of `super` (0 when the site is dropped).
    std::vector<Code> sub_stride(super.size(), 0);
    {
        Code s = 1;
        std::size_t j = 0;
        for (std::size_t i = 0; i < super.size() && j < sub.size(); ++i)
            if (super[i] == sub[j]) {
                sub_stride[i] = s;
                s *= static_cast<Code>(num_states);
                ++j;
            }
    }
    Code n = 1;
    for (std::size_t i = 0; i < super.size(); ++i) n *= static_cast<Code>(num_states);
    std::vector<Code> out(n);
    std::vector<int> digits(super.size(), 0);
    Code cur = 0;
    for (Code c = 0; c < n; ++c) {
        out[c] = cur;
        // Odometer increment keeps `cur` in sync without re-decoding.
        for (std::size_t i = 0; i < super.size(); ++i) {
            if (++digits[i] < num_states) {
                cur += sub_stride[i];
                break;
            }
            digits[i] = 0;
            cur -= sub_stride[i] * static_cast<Code>(num_states - 1);
        }
    }
    return out;
}

FunctionTable FunctionTable::extend(const Window& super) const {
    const auto map = restriction_map(super, window_, num_states_);
    std::vector<double> v(map.size());
    for (std::size_t c = 0; c < map.size(); ++c) v[c] = values_[map[c]];
    return FunctionTable(super, num_states_, std::move(v));
}

FunctionTable FunctionTable::translate(const Site& shift) const {
    return FunctionTable(translate_window(window_, shift), num_states_, values_);
}

FunctionTable FunctionTable::trimmed(double tol) const {
    Window keep;
    for (int i = 0; i < num_sites(); ++i) {
        bool depends = false;
        for (Code c = 0; c < size() && !depends; ++c) {
            if (digit(c, i) != 0) continue;
            for (int s = 1; s < num_states_; ++s)
                if (std::abs(values_[with_digit(c, i, s)] - values_[c]) > tol) {
                    depends = true;
                    break;
                }
        }
        if (depends) keep.push_back(window_[static_cast<std::size_t>(i)]);
    }
    if (keep.size() == window_.size()) return *this;
    // Read the kept coordinates with every dropped coordinate set to 0.
    FunctionTable out = zero(keep, num_states_);
    std::vector<int> pos;
    for (const Site& s : keep) pos.push_back(position(s));
    for (Code c = 0; c < out.size(); ++c) {
        Code src = 0;
        for (std::size_t k = 0; k < keep.size(); ++k)
            src += static_cast<Code>(out.digit(c, static_cast<int>(k))) * strides_[static_cast<std::size_t>(pos[k])];
        out[c] = values_[src];
    }
    return out;
}

namespace {

template <class Op>
FunctionTable combine(const FunctionTable& a, const FunctionTable& b, Op op) {
    if (a.num_states() != b.num_states())
        throw Error(ErrorKind::InvalidInput, "function tables over different state spaces");
    if (a.window() == b.window()) {
        FunctionTable out = a;
        for (Code c = 0; c < out.size(); ++c) out[c] = op(a[c], b[c]);
        return out;
    }
    const Window w = window_union(a.window(), b.window());
    const auto ma = restriction_map(w, a.window(), a.num_states());
    const auto mb = restriction_map(w, b.window(), b.num_states());
    FunctionTable out = FunctionTable::zero(w, a.num_states());
    for (Code c = 0; c < out.size(); ++c) out[c] = op(a[ma[c]], b[mb[c]]);
    return out;
}

} // namespace

FunctionTable& FunctionTable::operator+=(const FunctionTable& g) {
    *this = combine(*this, g, [](double x, double y) { return x + y; });
    return *this;
}

FunctionTable& FunctionTable::operator-=(const FunctionTable& g) {
    *this = combine(*this, g, [](double x, double y) { return x - y; });
    return *this;
}

FunctionTable& FunctionTable::operator*=(double a) {
    for (double& v : values_) v *= a;
    return *this;
}

FunctionTable operator+(const FunctionTable& a, const FunctionTable& b) {
    return combine(a, b, [](double x, double y) { return x + y; });
}

FunctionTable operator-(const FunctionTable& a, const FunctionTable& b) {
    return combine(a, b, [](double x, double y) { return x - y; });
}

FunctionTable operator*(const FunctionTable& a, const FunctionTable& b) {
    return combine(a, b, [](double x, double y) { return x * y; });
}

FunctionTable operator*(double a, FunctionTable f) {
    f *= a;
    return f;
}

double max_abs(const FunctionTable& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

double max_abs_difference(const FunctionTable& a, const FunctionTable& b) {
    return max_abs(a - b);
}

FunctionTable nabla_move(const FunctionTable& f, const Site& x, const Site& y,
                         const InteractionTable& phi) {
    if (f.num_states() != phi.num_states())
        throw Error(ErrorKind::InvalidInput, "function and interaction disagree on |S|");
    const Window w = window_union(f.window(), make_window({x, y}));
    FunctionTable g = f.window() == w ? f : f.extend(w);
    FunctionTable out = FunctionTable::zero(w, f.num_states());
    if (x == y) return out;
    const int io = g.position(x);
    const int it = g.position(y);
    for (Code c = 0; c < out.size(); ++c) out[c] = g[g.transition(c, io, it, phi)] - g[c];
    return out;
}

FunctionTable nabla(const FunctionTable& f, const Site& o, const Site& t, const InteractionTable& phi) {
    if (o == t) throw Error(ErrorKind::InvalidInput, "edge endpoints coincide");
    return nabla_move(f, o, t, phi);
}

} // namespace vardec
