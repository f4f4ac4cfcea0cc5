#include "vardec/configspace.hpp"
#include "vardec/forms.hpp"
#include "vardec/interaction.hpp"
#include "vardec/io.hpp"
#include "vardec/locale.hpp"
#include "vardec/measure.hpp"
#include "vardec/spectral.hpp"
#include "vardec/varadhan.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace vardec;

namespace {

enum Exit { kOk = 0, kViolation = 1, kUsage = 2, kBudget = 3 };

struct Common {
    std::string interaction = "sep1";
    std::string measure = "uniform";
    std::string locales;
    bool locales_given = false;
    std::string out;
    std::string format = "json";
    std::uint64_t seed = 0;
    std::uint64_t budget = kDefaultBudget;
};

// Doubles in CSV use the shortest form that round-trips, like the JSON writer.
std::string num(double v) {
    Json j = v;
    return j.dump();
}

std::string rational(const Rational& q) {
    if (q.denominator() == 1) return std::to_string(q.numerator());
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

int dim_of(const Window& w) {
    int d = 1;
    for (const Site& s : w)
        for (int j = 0; j < 3; ++j)
            if (s[j] != 0) d = std::max(d, j + 1);
    return d;
}

class Table {
public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}
    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    std::string csv() const {
        std::ostringstream s;
        for (std::size_t i = 0; i < columns_.size(); ++i) s << (i ? "," : "") << columns_[i];
        s << '\n';
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) s << (i ? "," : "") << (r[i] == "null" ? "" : r[i]);
            s << '\n';
        }
        return s.str();
    }

    // Cells are already formatted; numbers and booleans are emitted unquoted.
    Json json() const {
        Json rows = Json::array();
        for (const auto& r : rows_) {
            Json o = Json::object();
            for (std::size_t i = 0; i < r.size(); ++i) {
                Json v = Json::parse(r[i], nullptr, false);
                o[columns_[i]] = v.is_discarded() ? Json(r[i]) : v;
            }
            rows.push_back(o);
        }
        return rows;
    }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

void write(const Common& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out);
    if (!f) throw Error(ErrorKind::InvalidInput, "cannot write '" + c.out + "'");
    f << text;
}

void emit(const Common& c, const Json& j) { write(c, j.dump(2) + "\n"); }

void emit(const Common& c, const Table& t, Json meta = Json::object()) {
    if (c.format == "csv") {
        write(c, t.csv());
        return;
    }
    meta["rows"] = t.json();
    emit(c, meta);
}

int run_consv(const Common& c) {
    const auto phi = load_interaction(c.interaction);
    const auto report = validate_interaction(phi);
    if (!report.valid) {
        Json j;
        j["interaction"] = phi.name();
        j["valid"] = false;
        Json v = Json::array();
        for (const auto& [a, b] : report.violations) v.push_back({a, b});
        j["violations"] = v;
        emit(c, j);
        return kViolation;
    }
    const auto b = conserved_basis(phi);
    Json basis = Json::array();
    bool all_conserved = true;
    for (const auto& v : b.vectors) {
        Json row = Json::array();
        for (const auto& q : v) row.push_back(rational(q));
        basis.push_back(row);
        all_conserved = all_conserved && is_conserved(phi, v);
    }
    Json j;
    j["interaction"] = phi.name();
    j["states"] = phi.num_states();
    j["dimension"] = b.dimension();
    j["basis"] = basis;
    j["simple"] = is_simple(phi);
    emit(c, j);
    return all_conserved ? kOk : kViolation;
}

int run_irreducible(const Common& c) {
    const auto phi = load_interaction(c.interaction);
    const auto family = c.locales_given ? parse_locale_list(c.locales) : default_locale_family();
    Table t({"locale", "configurations", "classes", "components", "connected", "witness_a", "witness_b"});
    bool ok = true;
    auto word = [](const std::vector<int>& eta) {
        std::string s;
        for (int v : eta) s += std::to_string(v) + ".";
        if (!s.empty()) s.pop_back();
        return "\"" + s + "\"";
    };
    for (const auto& r : irreducibility_on_family(phi, family, c.budget)) {
        ok = ok && r.connected;
        t.add({"\"" + r.locale + "\"", std::to_string(r.configurations), std::to_string(r.classes),
               std::to_string(r.components), r.connected ? "true" : "false",
               r.witness ? word(r.witness->first) : "null", r.witness ? word(r.witness->second) : "null"});
    }
    Json meta;
    meta["interaction"] = phi.name();
    emit(c, t, meta);
    return ok ? kOk : kViolation;
}

int run_gap(const Common& c, const std::string& scan) {
    const auto phi = load_interaction(c.interaction);
    const auto nu = load_measure(c.measure, phi.num_states());
    Json meta;
    meta["interaction"] = phi.name();
    meta["measure"] = nu.name();
    if (!scan.empty()) {
        std::vector<int> ns;
        for (const auto& X : parse_locale_list(scan)) ns.push_back(X.size());
        Table t({"n", "gap", "normalized", "running_min"});
        for (const auto& r : uniform_gap_scan(phi, nu, ns, c.budget))
            t.add({std::to_string(r.n), num(r.gap), num(r.normalized), num(r.running_min)});
        emit(c, t, meta);
        return kOk;
    }
    Table t({"locale", "sites", "gap", "normalized", "residual"});
    for (const auto& X : parse_locale_list(c.locales_given ? c.locales : "k2")) {
        const auto r = spectral_gap(ConfigSpace(X, phi, c.budget), nu);
        t.add({"\"" + X.name() + "\"", std::to_string(r.sites), num(r.gap), num(r.normalized), num(r.residual)});
    }
    emit(c, t, meta);
    return kOk;
}

int run_verify(const Common& c, const std::string& sigma_name, std::vector<int> lambda, int trials, int max_n) {
    const auto phi = load_interaction(c.interaction);
    const auto nu = load_measure(c.measure, phi.num_states());
    const Locale sigma = parse_locale_list(sigma_name).front();
    if (lambda.empty())
        for (int v = 0; v < sigma.size() / 2; ++v) lambda.push_back(v);
    for (int v : lambda)
        if (v < 0 || v >= sigma.size()) throw Error(ErrorKind::InvalidInput, "lambda vertex out of range");
    const double csg = estimate_csg(phi, nu, max_n);
    const std::vector<InequalityReport> reps{
        verify_mpl(sigma, phi, nu, trials, c.seed),
        verify_boundary_estimate(sigma, lambda, phi, nu, trials, c.seed + 1),
        verify_sigma_gap_bound(sigma, phi, nu, trials, c.seed + 2, csg),
        verify_dagger_bound(sigma, lambda, phi, nu, trials, c.seed + 3, csg),
    };
    Table t({"inequality", "constant", "worst_ratio", "trials", "pass"});
    bool ok = true;
    for (const auto& r : reps) {
        ok = ok && r.pass;
        t.add({"\"" + r.name + "\"", num(r.constant), num(r.worst_ratio), std::to_string(r.trials),
               r.pass ? "true" : "false"});
    }
    Json meta;
    meta["interaction"] = phi.name();
    meta["measure"] = nu.name();
    meta["sigma"] = sigma.name();
    meta["lambda"] = lambda;
    meta["csg"] = csg;
    emit(c, t, meta);
    return ok ? kOk : kViolation;
}

Json pieces_json(const ExpansionPieces& p, int d) {
    Json arr = Json::array();
    for (const auto& [lam, piece] : p.pieces) arr.push_back(table_to_json(piece, d));
    return arr;
}

int run_expand(const Common& c, const std::string& function_path, int random_sites) {
    const auto phi = load_interaction(c.interaction);
    const int S = phi.num_states();
    const auto nu = load_measure(c.measure, S);
    FunctionTable f;
    if (!function_path.empty()) {
        f = table_from_json(read_json_file(function_path), S);
    } else {
        Window w;
        for (int i = 0; i < random_sites; ++i) w.push_back(Site(i));
        std::mt19937_64 rng(c.seed);
        f = random_function(w, nu, rng);
    }
    const int d = dim_of(f.window());
    const auto mu = expand_mu(f, nu);
    const auto base = expand_base(f, phi.base());
    auto shifted = f;
    const double anchor = f[f.encode(std::vector<int>(f.window().size(), phi.base()))];
    for (auto& v : shifted.values()) v -= anchor;
    auto normalized = expand_base(shifted, phi.base());
    normalized.pieces.erase(Window{});
    const auto renorm = renormalize(normalized, nu);
    auto centred = f;
    const double mean = expectation(f, nu);
    for (auto& v : centred.values()) v -= mean;
    auto direct = expand_mu(centred, nu);
    direct.pieces.erase(Window{});

    Json j;
    j["function"] = table_to_json(f, d);
    j["mu_pieces"] = pieces_json(mu, d);
    j["base_pieces"] = pieces_json(base, d);
    j["mu_reconstruction_error"] = max_abs_difference(mu.reconstruct(S), f);
    j["base_reconstruction_error"] = max_abs_difference(base.reconstruct(S), f);
    j["renormalize_error"] = max_piece_difference(renorm, direct);
    j["round_trip_error"] = max_piece_difference(unrenormalize(renorm, phi.base(), S), normalized);
    emit(c, j);
    const double worst = std::max({j["mu_reconstruction_error"].get<double>(), j["base_reconstruction_error"].get<double>(),
                                   j["renormalize_error"].get<double>(), j["round_trip_error"].get<double>()});
    return worst <= 1e-10 ? kOk : kViolation;
}

int run_decompose(const Common& c, const std::string& form_path, const DecomposeOptions& opt) {
    const auto phi = load_interaction(c.interaction);
    const auto nu = load_measure(c.measure, phi.num_states());
    const auto w = shift_form_from_json(read_json_file(form_path));
    if (w.num_states != phi.num_states()) throw Error(ErrorKind::InvalidInput, "form and interaction disagree on |S|");
    const auto r = decompose(w, conserved_basis(phi), phi, nu, opt);
    Json a = Json::array();
    for (Eigen::Index i = 0; i < r.a.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < r.a.cols(); ++j) row.push_back(r.a(i, j));
        a.push_back(row);
    }
    Json j;
    j["interaction"] = phi.name();
    j["measure"] = nu.name();
    j["radius"] = opt.radius;
    j["a"] = a;
    j["residual"] = r.residual;
    j["unknowns"] = r.unknowns;
    j["rank"] = r.rank;
    j["gauge_dim"] = r.gauge_dim;
    j["closed_checked"] = r.closed_checked;
    j["warnings"] = r.warnings;
    j["f"] = table_to_json(r.f, w.d);
    emit(c, j);
    return kOk;
}

int run_psi(const Common& c, const std::string& form_path, int max_n, int csg_n) {
    const auto phi = load_interaction(c.interaction);
    const auto nu = load_measure(c.measure, phi.num_states());
    const auto w = shift_form_from_json(read_json_file(form_path));
    const double C = dagger_constant(phi, nu, estimate_csg(phi, nu, csg_n));
    Table t({"n", "identity_error", "omega_sp", "max_plus_norm", "max_minus_norm", "max_dagger_norm", "bound_ratio"});
    bool ok = true;
    auto top = [](const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); };
    for (int n = 1; n <= max_n; ++n) {
        const auto s = psi_sequence(w, phi, nu, n, c.budget);
        const double ratio = boundary_bound_ratio(s, w.d, C);
        ok = ok && s.identity_error <= 1e-10 && ratio <= 1.0;
        t.add({std::to_string(n), num(s.identity_error), num(s.omega_sp), num(top(s.plus_norm)),
               num(top(s.minus_norm)), num(top(s.dagger_norm)), num(ratio)});
    }
    Json meta;
    meta["interaction"] = phi.name();
    meta["measure"] = nu.name();
    meta["constant"] = C;
    emit(c, t, meta);
    return ok ? kOk : kViolation;
}

int run_counts(const Common& c, int d, long long n, const std::vector<int>& ells) {
    if (d < 1 || d > 3 || n < 1) throw Error(ErrorKind::InvalidInput, "need 1 <= d <= 3 and n >= 1");
    Json j;
    j["d"] = d;
    j["n"] = n;
    j["tempered_ratio"] = tempered_ratio(d, n);
    j["tempered_ratio_limit"] = tempered_ratio_limit(d);
    bool ok = true;
    // Enumerated counts only for boxes small enough to list.
    if (std::pow(2.0 * static_cast<double>(n) + 1.0, d) <= 1e6) {
        const auto r = counting_report(d, static_cast<int>(n), ells);
        j["volume"] = r.volume;
        j["boundary"] = r.boundary;
        j["degree"] = r.degree;
        j["ells"] = r.ells;
        j["perimeter"] = r.perimeter;
        j["first_inequality"] = r.first_inequality;
        j["perimeter_inequality"] = r.perimeter_inequality;
        ok = r.ok();
    }
    emit(c, j);
    return ok ? kOk : kViolation;
}

// Finite forms carry their own locale.
std::pair<ConfigSpace, Form> load_finite_form(const Common& c, const std::string& path) {
    const auto phi = load_interaction(c.interaction);
    const Json j = read_json_file(path);
    if (!j.contains("locale")) throw Error(ErrorKind::InvalidInput, "form file has no locale");
    ConfigSpace space(locale_from_json(j["locale"]), phi, c.budget);
    Form w = form_from_json(j, space);
    return {std::move(space), std::move(w)};
}

int run_check_closed(const Common& c, const std::string& path) {
    const auto [space, w] = load_finite_form(c, path);
    const auto alt = check_alternating(space, w);
    const bool closed = alt.ok && is_closed(space, w);
    Json j;
    j["locale"] = space.locale().name();
    j["alternating"] = alt.ok;
    j["closed"] = closed;
    emit(c, j);
    return closed ? kOk : kViolation;
}

int run_solve_potential(const Common& c, const std::string& path) {
    const auto [space, w] = load_finite_form(c, path);
    const auto p = solve_potential(space, w);
    Json j;
    j["locale"] = space.locale().name();
    j["potential"] = table_to_json(p.f, dim_of(p.f.window()));
    j["anchors"] = p.anchors;
    emit(c, j);
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conserved quantities, forms and decompositions for lattice interactions"};
    app.require_subcommand(1);
    Common c;
    auto common = [&c](CLI::App* s, bool measure, bool locales) {
        s->add_option("-i,--interaction", c.interaction, "sep<k>, gep<k>, identity<n> or a JSON file")
            ->capture_default_str();
        if (measure) s->add_option("-m,--measure", c.measure, "uniform, geometric:<rho> or a JSON file")->capture_default_str();
        if (locales) s->add_option("-l,--locales", c.locales, "comma list, ranges like k2..k5, or .json files");
        s->add_option("-o,--out", c.out, "output file (default stdout)");
        s->add_option("--seed", c.seed, "random seed")->capture_default_str();
        s->add_option("--budget", c.budget, "configuration budget")->capture_default_str()->check(CLI::PositiveNumber);
    };
    auto tabular = [&c](CLI::App* s) {
        s->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    };

    auto* consv = app.add_subcommand("consv", "conserved quantity basis");
    common(consv, false, false);

    auto* irr = app.add_subcommand("irreducible", "irreducible quantification on a locale family");
    common(irr, false, true);
    tabular(irr);

    std::string scan;
    auto* gap = app.add_subcommand("gap", "spectral gaps");
    common(gap, true, true);
    tabular(gap);
    gap->add_option("--uniform-scan", scan, "complete locales to scan, e.g. k2..k5");

    std::string sigma = "p4";
    std::vector<int> lambda;
    int trials = 100, csg_n = 4;
    auto* verify = app.add_subcommand("verify", "check the four inequalities with explicit constants");
    common(verify, true, false);
    tabular(verify);
    verify->add_option("--sigma", sigma, "ambient locale")->capture_default_str();
    verify->add_option("--lambda", lambda, "vertices of the inner region (default: first half)");
    verify->add_option("--trials", trials, "random functions per inequality")->capture_default_str()->check(CLI::PositiveNumber);
    verify->add_option("--csg-n", csg_n, "largest complete graph for the gap constant")->capture_default_str()->check(CLI::Range(2, 12));

    std::string function_path;
    int random_sites = 3;
    auto* expand = app.add_subcommand("expand", "exact-support expansions and renormalization");
    common(expand, true, false);
    expand->add_option("--function", function_path, "function table JSON");
    expand->add_option("--random-sites", random_sites, "sites of a seeded random function when --function is absent")
        ->capture_default_str()->check(CLI::Range(0, 8));

    std::string form_path;
    DecomposeOptions dopt;
    bool no_closed_check = false;
    auto* dec = app.add_subcommand("decompose", "split a shift-invariant closed form into exact part and currents");
    common(dec, true, false);
    dec->add_option("--form", form_path, "shift-invariant form JSON")->required();
    dec->add_option("--radius", dopt.radius, "support diameter of the uniform function")->capture_default_str()->check(CLI::Range(0, 6));
    dec->add_option("--rank-tol", dopt.rank_tol, "relative eigenvalue cut")->capture_default_str();
    dec->add_option("--max-unknowns", dopt.max_unknowns, "unknown budget")->capture_default_str()->check(CLI::PositiveNumber);
    dec->add_flag("--no-closed-check", no_closed_check, "skip the closedness check on test boxes");

    int psi_n = 3;
    auto* psi = app.add_subcommand("psi", "approximating sequence and its boundary terms");
    common(psi, true, false);
    tabular(psi);
    psi->add_option("--form", form_path, "shift-invariant form JSON")->required();
    psi->add_option("--n", psi_n, "largest box index")->capture_default_str()->check(CLI::Range(1, 8));
    psi->add_option("--csg-n", csg_n, "largest complete graph for the gap constant")->capture_default_str()->check(CLI::Range(2, 12));

    int d = 1;
    long long n = 10;
    std::vector<int> ells{1, 2, 3};
    auto* counts = app.add_subcommand("counts", "lattice boundary, perimeter and tempered-ratio counts");
    counts->add_option("--d", d, "dimension")->capture_default_str();
    counts->add_option("--n", n, "box index")->capture_default_str();
    counts->add_option("--ells", ells, "perimeter depths")->capture_default_str();
    counts->add_option("-o,--out", c.out, "output file (default stdout)");

    auto* closed = app.add_subcommand("check-closed", "closedness of a finite form");
    common(closed, false, false);
    closed->add_option("--form", form_path, "finite form JSON")->required();

    auto* potential = app.add_subcommand("solve-potential", "potential of a closed finite form");
    common(potential, false, false);
    potential->add_option("--form", form_path, "finite form JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }
    for (const auto* sub : app.get_subcommands())
        if (sub->get_option_no_throw("--locales")) c.locales_given = sub->count("--locales") > 0;

    try {
        if (*consv) return run_consv(c);
        if (*irr) return run_irreducible(c);
        if (*gap) return run_gap(c, scan);
        if (*verify) return run_verify(c, sigma, lambda, trials, csg_n);
        if (*expand) return run_expand(c, function_path, random_sites);
        if (*dec) {
            dopt.check_closed = !no_closed_check;
            return run_decompose(c, form_path, dopt);
        }
        if (*psi) return run_psi(c, form_path, psi_n, csg_n);
        if (*counts) return run_counts(c, d, n, ells);
        if (*closed) return run_check_closed(c, form_path);
        if (*potential) return run_solve_potential(c, form_path);
    } catch (const Error& e) {
        std::cerr << "vardec: " << e.what() << "\n";
        switch (e.kind()) {
        case ErrorKind::InvalidInput: return kUsage;
        case ErrorKind::BudgetExceeded: return kBudget;
        default: return kViolation;
        }
    } catch (const std::exception& e) {
        std::cerr << "vardec: " << e.what() << "\n";
        return kViolation;
    }
    return kUsage;
}
