#include "vardec/io.hpp"

#include <doctest.h>

using namespace vardec;

TEST_CASE("interaction round trip") {
    for (const auto& phi : {sep(2), gep(3), identity_interaction(2)}) {
        const auto j = interaction_to_json(phi);
        const auto back = interaction_from_json(j);
        CHECK(interaction_to_json(back).dump() == j.dump());
    }
}

TEST_CASE("named interactions and measures") {
    CHECK(load_interaction("sep2").num_states() == 3);
    CHECK(load_interaction("gep3").num_states() == 4);
    CHECK(load_interaction("identity2").num_states() == 2);
    CHECK_THROWS_AS(load_interaction("/nonexistent/phi.json"), Error);
    CHECK(load_measure("uniform", 3)(1) == doctest::Approx(1.0 / 3));
    const auto g = load_measure("geometric:0.5", 2);
    CHECK(g(0) == doctest::Approx(2.0 / 3));
    CHECK(load_measure("geometric(0.5)", 2)(1) == doctest::Approx(1.0 / 3));
}

TEST_CASE("locale lists") {
    const auto ls = parse_locale_list("k2..k4,p3");
    REQUIRE(ls.size() == 4);
    CHECK(ls[0].size() == 2);
    CHECK(ls[2].size() == 4);
    CHECK(ls[3].num_edges() == 4);
    CHECK_THROWS_AS(parse_locale_list(""), Error);
    const auto j = locale_to_json(rect_locale({2, 3}));
    const auto back = locale_from_json(j);
    CHECK(back.size() == 6);
    CHECK(back.num_edges() == 14);
}

TEST_CASE("form and table round trip") {
    const auto phi = sep(1);
    const auto t = FunctionTable::tabulate(make_window({Site(0), Site(1)}), 2,
                                           [](const std::vector<int>& s) { return s[0] - 0.25 * s[1]; });
    const auto tb = table_from_json(table_to_json(t, 1), 2);
    CHECK(max_abs_difference(t, tb) == 0.0);
    const ShiftInvariantForm w = current_form({0.0, 1.0}, 0, 2, phi);
    const auto wb = shift_form_from_json(shift_form_to_json(w));
    REQUIRE(wb.rep.size() == 2);
    CHECK(max_abs_difference(w.rep[0], wb.rep[0]) == 0.0);

    const ConfigSpace space(path_locale(3), phi);
    const Form f = differential(space, t.extend(space.window()));
    const auto fj = form_to_json(space, f);
    const auto fb = form_from_json(fj, space);
    CHECK(form_to_json(space, fb).dump() == fj.dump());
}
