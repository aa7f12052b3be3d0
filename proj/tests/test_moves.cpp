#include "bridgetri/families.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace bridgetri;

TEST_CASE("degree-one grid matches the base diagram parameters") {
    auto d1 = cp2_curve_grid(1);
    auto p = parameters(d1);
    CHECK(p.g == 1);
    CHECK(p.b == 1);
    CHECK(p.c == std::array<int, 3>{1, 1, 1});
    CHECK(p.efficient);
}

TEST_CASE("grid diagrams have the expected parameters for small degrees") {
    for (int d = 1; d <= 4; ++d) {
        auto grid = cp2_curve_grid(d);
        auto rep = validate(grid);
        CAPTURE(d, rep.failures);
        REQUIRE(rep.ok());
        auto p = parameters(grid);
        CHECK(p.g == 1);
        CHECK(p.k == std::array<int, 3>{0, 0, 0});
        CHECK(p.b == d * d);
        CHECK(p.c == std::array<int, 3>{d, d, d});
        CHECK(p.chi_k == 3 * d - d * d);
        CHECK(p.surface_components == 1);
    }
}

TEST_CASE("the conic grid has exactly one balanced hexagon") {
    auto grid = cp2_curve_grid(2);
    auto sites = find_balanced_hexagons(grid);
    REQUIRE(sites.size() == 1);

    auto eff = contract_hexagon(grid, sites[0]);
    auto rep = validate(eff);
    CAPTURE(rep.failures);
    REQUIRE(rep.ok());
    auto p = parameters(eff);
    CHECK(p.b == 1);
    CHECK(p.c == std::array<int, 3>{1, 1, 1});
    CHECK(p.efficient);

    // the site is stale on the contracted diagram
    CHECK_THROWS_AS(contract_hexagon(eff, sites[0]), SiteInvalidatedError);
}

TEST_CASE("arc destabilization drops b by one and keeps the Euler count") {
    auto grid = cp2_curve_grid(2);
    auto p0 = parameters(grid);
    int tried = 0, rejected = 0;
    for (size_t s = 0; s < grid.strands.size(); ++s) {
        if (grid.strands[s].color.kind != Color::Arc) continue;
        ++tried;
        DestabArcSite site = destab_arc_site(grid, static_cast<int>(s));
        ShadowDiagram out;
        try {
            out = destabilize_arc(grid, site);
        } catch (const SiteInvalidatedError&) {
            ++rejected;
            continue;
        }
        auto rep = validate(out);
        CAPTURE(s, rep.failures);
        REQUIRE(rep.ok());
        auto p = parameters(out);
        CHECK(p.b == p0.b - 1);
        CHECK(p.chi_k == p0.chi_k);
        CHECK(p.g == 1);
        auto h = trisection_homology(out);
        REQUIRE(h.h2.free_rank == 1);
        CHECK(h.h2.torsion.empty());
    }
    CHECK(tried == 12);
    CHECK(tried - rejected == 6);
    CHECK(rejected == 6);
}

TEST_CASE("arcs crossed by a cut curve are rejected as destabilization sites") {
    auto grid = cp2_curve_grid(2);
    int target = -1;
    for (size_t s = 0; s < grid.strands.size(); ++s) {
        const auto& st = grid.strands[s];
        if (st.color == Color::arc(3) && st.darts.size() == 2) target = static_cast<int>(s);
    }
    REQUIRE(target >= 0);
    CHECK_THROWS_AS(destabilize_arc(grid, destab_arc_site(grid, target)),
                    SiteInvalidatedError);

    // the underlying rewrite still works: the crossing curve is rerouted
    // across both replacement strands (the diagram is no longer a valid
    // shadow diagram, but the surface combinatorics survive)
    auto w = weave_from_diagram(grid);
    raw_destabilize(w, target);
    auto out = weave_to_diagram(w);
    auto t = topology(out.map);
    CHECK(t.genus == 1);
    CHECK(t.components == 1);
    CHECK(t.boundary_cycles == 0);
    CHECK(out.bridge_points.size() == 6);
    auto rep = validate(out);
    CHECK_FALSE(rep.ok());
}

TEST_CASE("the efficient one-bridge diagram admits no further destabilization") {
    auto grid = cp2_curve_grid(2);
    auto eff = contract_hexagon(grid, find_balanced_hexagons(grid)[0]);
    CHECK(find_balanced_hexagons(eff).empty());
    for (size_t s = 0; s < eff.strands.size(); ++s) {
        if (eff.strands[s].color.kind != Color::Arc) continue;
        CHECK_THROWS_AS(destabilize_arc(eff, destab_arc_site(eff, static_cast<int>(s))),
                        SiteInvalidatedError);
    }
}

TEST_CASE("cubic and quartic grids contract to the efficient bridge number") {
    for (int d : {3, 4}) {
        auto grid = cp2_curve_grid(d);
        auto sites = find_balanced_hexagons(grid);
        CAPTURE(d);
        CHECK(static_cast<int>(sites.size()) >= d - 1);
        auto eff = efficient_cp2_curve(d);
        auto rep = validate(eff);
        CAPTURE(rep.failures);
        REQUIRE(rep.ok());
        auto p = parameters(eff);
        CHECK(p.b == (d - 1) * (d - 2) + 1);
        CHECK(p.c == std::array<int, 3>{1, 1, 1});
        CHECK(p.chi_k == 3 * d - d * d);
        CHECK(p.efficient);
    }
}
