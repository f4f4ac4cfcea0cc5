#pragma once

#include "vardec/forms.hpp"
#include "vardec/interaction.hpp"
#include "vardec/locale.hpp"
#include "vardec/measure.hpp"
#include "vardec/varadhan.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace vardec {

using Json = nlohmann::ordered_json;

// {"states": [...], "base": 0, "map": {"s1,s2": "t1,t2", ...}}; pairs that
// are not listed are fixed.
InteractionTable interaction_from_json(const Json& j);
Json interaction_to_json(const InteractionTable& phi);
// Built-in names "sep<k>", "gep<k>", "identity<n>", else a JSON file path.
InteractionTable load_interaction(const std::string& spec);

// "uniform", "geometric:<rho>", "geometric(<rho>)", or a JSON file {"weights": [...]}.
SiteMeasure load_measure(const std::string& spec, int num_states);

// {"name": "...", "dim": 1, "sites": [[x...], ...] | "vertices": n, "edges": [[o, t], ...]}
Locale locale_from_json(const Json& j);
Json locale_to_json(const Locale& X);
// Comma-separated names with ranges such as "k2..k6"; a name ending in
// ".json" is read as a locale file.
std::vector<Locale> parse_locale_list(const std::string& spec);

Json site_to_json(const Site& s, int d);
Site site_from_json(const Json& j);
Json table_to_json(const FunctionTable& f, int d);
FunctionTable table_from_json(const Json& j, int num_states);

// {"d": d, "states": |S|, "directions": [{"window": [...], "values": [...]}, ...]}
ShiftInvariantForm shift_form_from_json(const Json& j);
Json shift_form_to_json(const ShiftInvariantForm& w);

// {"locale": {...}, "edges": [[o, t], ...], "tables": [[...], ...]}
Form form_from_json(const Json& j, const ConfigSpace& space);
Json form_to_json(const ConfigSpace& space, const Form& w);

Json read_json_file(const std::string& path);

} // namespace vardec
