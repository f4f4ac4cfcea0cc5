#include "vardec/io.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

namespace vardec {

namespace {

std::string label_of(const Json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    throw Error(ErrorKind::InvalidInput, "state labels must be strings or integers");
}

std::pair<std::string, std::string> split_pair(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos || s.find(',', comma + 1) != std::string::npos)
        throw Error(ErrorKind::InvalidInput, "expected 's1,s2' but got '" + s + "'");
    auto trim = [](std::string x) {
        x.erase(0, x.find_first_not_of(" \t"));
        x.erase(x.find_last_not_of(" \t") + 1);
        return x;
    };
    return {trim(s.substr(0, comma)), trim(s.substr(comma + 1))};
}

int number_after(const std::string& s, std::size_t from) {
    const std::string rest = s.substr(from);
    if (rest.empty() || !std::all_of(rest.begin(), rest.end(), ::isdigit))
        throw Error(ErrorKind::InvalidInput, "bad name '" + s + "'");
    return std::stoi(rest);
}

} // namespace

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidInput, "cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::InvalidInput, "cannot parse '" + path + "': " + e.what());
    }
}

InteractionTable interaction_from_json(const Json& j) {
    try {
        StateSpace space;
        for (const auto& s : j.at("states")) space.labels.push_back(label_of(s));
        const int n = space.size();
        auto index = [&](const std::string& label) {
            auto it = std::find(space.labels.begin(), space.labels.end(), label);
            if (it == space.labels.end()) throw Error(ErrorKind::InvalidInput, "unknown state '" + label + "'");
            return static_cast<int>(it - space.labels.begin());
        };
        const Json& base = j.value("base", Json(0));
        if (base.is_number_integer() && !(std::find(space.labels.begin(), space.labels.end(),
                                                    label_of(base)) != space.labels.end()))
            space.base = base.get<int>();
        else
            space.base = index(label_of(base));
        std::vector<StatePair> map;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) map.emplace_back(a, b);
        if (j.contains("map"))
            for (const auto& [key, val] : j.at("map").items()) {
                const auto [s1, s2] = split_pair(key);
                const auto [t1, t2] = split_pair(val.get<std::string>());
                map[static_cast<std::size_t>(index(s1) * n + index(s2))] = {index(t1), index(t2)};
            }
        return {std::move(space), std::move(map), j.value("name", std::string("custom"))};
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::InvalidInput, std::string("interaction JSON: ") + e.what());
    }
}

Json interaction_to_json(const InteractionTable& phi) {
    const auto& L = phi.space().labels;
    Json j;
    j["name"] = phi.name();
    j["states"] = L;
    j["base"] = L[static_cast<std::size_t>(phi.base())];
    Json map = Json::object();
    for (int a = 0; a < phi.num_states(); ++a)
        for (int b = 0; b < phi.num_states(); ++b) {
            if (phi.fixes(a, b)) continue;
            const auto [c, d] = phi.apply(a, b);
            map[L[static_cast<std::size_t>(a)] + "," + L[static_cast<std::size_t>(b)]] =
                L[static_cast<std::size_t>(c)] + "," + L[static_cast<std::size_t>(d)];
        }
    j["map"] = map;
    return j;
}

InteractionTable load_interaction(const std::string& spec) {
    if (spec.rfind("sep", 0) == 0 && spec.find('.') == std::string::npos) return sep(number_after(spec, 3));
    if (spec.rfind("gep", 0) == 0 && spec.find('.') == std::string::npos) return gep(number_after(spec, 3));
    if (spec.rfind("identity", 0) == 0 && spec.find('.') == std::string::npos)
        return identity_interaction(number_after(spec, 8));
    return interaction_from_json(read_json_file(spec));
}

SiteMeasure load_measure(const std::string& spec, int num_states) {
    if (spec == "uniform") return SiteMeasure::uniform(num_states);
    static const std::regex geo(R"(geometric(?::|\()([0-9.eE+-]+)\)?)");
    std::smatch m;
    if (std::regex_match(spec, m, geo)) {
        double rho = 0.0;
        try {
            rho = std::stod(m[1].str());
        } catch (...) {
            throw Error(ErrorKind::InvalidInput, "bad measure '" + spec + "'");
        }
        if (!(rho > 0.0)) throw Error(ErrorKind::InvalidInput, "geometric measure needs rho > 0");
        return SiteMeasure::geometric(num_states, rho);
    }
    const Json j = read_json_file(spec);
    try {
        SiteMeasure nu(j.at("weights").get<std::vector<double>>(), j.value("name", spec));
        if (nu.size() != num_states) throw Error(ErrorKind::InvalidInput, "measure has the wrong number of states");
        return nu;
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::InvalidInput, std::string("measure JSON: ") + e.what());
    }
}

Json site_to_json(const Site& s, int d) {
    Json j = Json::array();
    for (int i = 0; i < d; ++i) j.push_back(s[i]);
    return j;
}

Site site_from_json(const Json& j) {
    if (j.is_number_integer()) return Site(j.get<int>());
    if (!j.is_array() || j.empty() || j.size() > 3) throw Error(ErrorKind::InvalidInput, "a site is 1 to 3 integers");
    Site s;
    for (std::size_t i = 0; i < j.size(); ++i) s[static_cast<int>(i)] = j[i].get<int>();
    return s;
}

Locale locale_from_json(const Json& j) {
    try {
        std::vector<Site> sites;
        if (j.contains("sites"))
            for (const auto& s : j.at("sites")) sites.push_back(site_from_json(s));
        else
            for (int v = 0; v < j.at("vertices").get<int>(); ++v) sites.emplace_back(v);
        // Edge endpoints index the list as given; Locale sorts by site.
        std::vector<Site> given = sites;
        std::vector<Site> sorted = sites;
        std::sort(sorted.begin(), sorted.end());
        auto vertex = [&](int i) {
            if (i < 0 || i >= static_cast<int>(given.size()))
                throw Error(ErrorKind::InvalidInput, "edge endpoint out of range");
            return static_cast<Vertex>(std::lower_bound(sorted.begin(), sorted.end(), given[static_cast<std::size_t>(i)]) -
                                       sorted.begin());
        };
        std::vector<Edge> edges;
        for (const auto& e : j.at("edges")) edges.push_back({vertex(e.at(0).get<int>()), vertex(e.at(1).get<int>())});
        return Locale(sorted, edges, j.value("name", std::string("custom")), j.value("dim", 1));
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::InvalidInput, std::string("locale JSON: ") + e.what());
    }
}

Json locale_to_json(const Locale& X) {
    Json j;
    j["name"] = X.name();
    j["dim"] = X.dim();
    Json sites = Json::array();
    for (const Site& s : X.sites()) sites.push_back(site_to_json(s, X.dim()));
    j["sites"] = sites;
    Json edges = Json::array();
    for (const Edge& e : X.edges())
        if (e.o < e.t) edges.push_back({e.o, e.t});
    j["edges"] = edges;
    return j;
}

std::vector<Locale> parse_locale_list(const std::string& spec) {
    std::vector<Locale> out;
    std::stringstream ss(spec);
    std::string item;
    static const std::regex range(R"(([a-z]+)(\d+)\.\.([a-z]+)?(\d+))");
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::smatch m;
        if (item.size() > 5 && item.substr(item.size() - 5) == ".json") {
            out.push_back(locale_from_json(read_json_file(item)));
        } else if (std::regex_match(item, m, range)) {
            if (m[3].matched && m[3].str() != m[1].str())
                throw Error(ErrorKind::InvalidInput, "range '" + item + "' mixes locale kinds");
            const int lo = std::stoi(m[2].str());
            const int hi = std::stoi(m[4].str());
            if (lo > hi) throw Error(ErrorKind::InvalidInput, "empty range '" + item + "'");
            for (int k = lo; k <= hi; ++k) out.push_back(locale_by_name(m[1].str() + std::to_string(k)));
        } else {
            out.push_back(locale_by_name(item));
        }
    }
    if (out.empty()) throw Error(ErrorKind::InvalidInput, "empty locale list");
    return out;
}

Json table_to_json(const FunctionTable& f, int d) {
    Json j;
    Json w = Json::array();
    for (const Site& s : f.window()) w.push_back(site_to_json(s, d));
    j["window"] = w;
    j["values"] = f.values();
    return j;
}

FunctionTable table_from_json(const Json& j, int num_states) {
    try {
        std::vector<Site> sites;
        for (const auto& s : j.at("window")) sites.push_back(site_from_json(s));
        const Window w = make_window(sites);
        if (w != Window(sites)) throw Error(ErrorKind::InvalidInput, "table window must be sorted and distinct");
        auto values = j.at("values").get<std::vector<double>>();
        if (values.size() != config_count(num_states, w.size()))
            throw Error(ErrorKind::InvalidInput, "table has the wrong number of values");
        return FunctionTable(w, num_states, std::move(values));
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::InvalidInput, std::string("table JSON: ") + e.what());
    }
}

ShiftInvariantForm shift_form_from_json(const Json& j) {
    try {
        ShiftInvariantForm w;
        w.d = j.at("d").get<int>();
        w.num_states = j.at("states").get<int>();
        for (const auto& t : j.at("directions")) w.rep.push_back(table_from_json(t, w.num_states));
        if (static_cast<int>(w.rep.size()) != w.d)
            throw Error(ErrorKind::InvalidForm, "need one table per direction");
        return w;
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::InvalidInput, std::string("omega JSON: ") + e.what());
    }
}

Json shift_form_to_json(const ShiftInvariantForm& w) {
    Json j;
    j["d"] = w.d;
    j["states"] = w.num_states;
    Json dirs = Json::array();
    for (const auto& t : w.rep) dirs.push_back(table_to_json(t, w.d));
    j["directions"] = dirs;
    return j;
}

Form form_from_json(const Json& j, const ConfigSpace& space) {
    try {
        const Locale& X = space.locale();
        Form w = Form::zero(space);
        std::vector<char> seen(static_cast<std::size_t>(X.num_edges()), 0);
        const auto& edges = j.at("edges");
        const auto& tables = j.at("tables");
        if (edges.size() != tables.size()) throw Error(ErrorKind::InvalidForm, "edges and tables differ in length");
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const auto e = X.edge_index(edges[i].at(0).get<int>(), edges[i].at(1).get<int>());
            if (!e) throw Error(ErrorKind::InvalidForm, "form lists an edge that is not in the locale");
            auto v = tables[i].get<std::vector<double>>();
            if (v.size() != space.size()) throw Error(ErrorKind::InvalidForm, "form table has the wrong size");
            w.values[static_cast<std::size_t>(*e)] = std::move(v);
            seen[static_cast<std::size_t>(*e)] = 1;
        }
        if (std::find(seen.begin(), seen.end(), 0) != seen.end())
            throw Error(ErrorKind::InvalidForm, "form is missing some locale edges");
        return w;
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::InvalidInput, std::string("form JSON: ") + e.what());
    }
}

Json form_to_json(const ConfigSpace& space, const Form& w) {
    const Locale& X = space.locale();
    Json j;
    j["locale"] = locale_to_json(X);
    Json edges = Json::array();
    for (const Edge& e : X.edges()) edges.push_back({e.o, e.t});
    j["edges"] = edges;
    j["tables"] = w.values;
    return j;
}

} // namespace vardec
