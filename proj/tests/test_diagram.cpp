#include "bridgetri/diagram.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"

using namespace bridgetri;

using namespace fix;

TEST_CASE("degree-one diagram validates with the expected parameters") {
    auto built = degree_one();
    const auto& d = built.d;

    auto top = topology(d.map);
    CHECK(top.V == 8);
    CHECK(top.E == 15);
    CHECK(top.F == 7);
    CHECK(top.genus == 1);

    auto rep = validate(d);
    CAPTURE(rep.failures);
    CHECK(rep.ok());
    CHECK_FALSE(rep.caveats.empty());

    auto p = parameters(d);
    CHECK(p.g == 1);
    CHECK(p.b == 1);
    CHECK(p.c == std::array<int, 3>{1, 1, 1});
    CHECK(p.k == std::array<int, 3>{0, 0, 0});
    CHECK(p.chi_x == 3);
    CHECK(p.chi_k == 2);
    CHECK(p.surface_components == 1);
    CHECK(p.efficient);
    CHECK_FALSE(p.k_torsion[0]);

    REQUIRE(d.layout);
    CHECK(d.layout->vertex_pos.size() == 8);
    CHECK(d.layout->edge_geom.size() == 15);
}

TEST_CASE("degree-one bridge points carry balanced signs and positive wheels") {
    auto built = degree_one();
    auto signs = bridge_signs(built.d);
    REQUIRE(signs.size() == 2);
    int sigma_sum = 0;
    for (auto [sigma, eps] : signs) {
        sigma_sum += sigma;
        // the diagram is symmetric under the half-turn of the torus, which
        // swaps the two bridge points, so the wheels must match
        CHECK(eps == +1);
    }
    CHECK(sigma_sum == 0);
}

TEST_CASE("cut systems really cut the surface open to a sphere") {
    auto built = degree_one();
    const auto& d = built.d;
    for (int col = 1; col <= 3; ++col) {
        std::vector<DartPath> cuts;
        for (int s : d.strands_of(Color::curve(col))) cuts.push_back({d.strands[s].darts, true});
        auto res = cut_along(d.map, cuts);
        auto ct = topology(res.map);
        CHECK(ct.components == 1);
        CHECK(ct.genus == 0);
        CHECK(ct.boundary_cycles == 2);
    }
}

TEST_CASE("diagram homology matches the complex projective plane") {
    auto built = degree_one();
    auto h = trisection_homology(built.d);
    CHECK(h.h1.free_rank == 0);
    CHECK(h.h1.torsion.empty());
    CHECK(h.h2.free_rank == 1);
    CHECK(h.h2.torsion.empty());
    CHECK(h.h3_rank == 0);

    Int s = surface_class_pairing(built.d, {Int(1)});
    CHECK((s == 1 || s == -1));
    CHECK(surface_class_pairing(built.d, {Int(-1)}) == -s);
    CHECK(surface_class_pairing(built.d, {Int(2)}) == 2 * s);
}

TEST_CASE("results do not depend on strand order") {
    Scene sc = Scene::torus(24, 24);
    auto items = degree_one_items(sc);
    std::reverse(items.begin(), items.end());
    auto built = build(sc, items);

    CHECK(validate(built.d).ok());
    auto p = parameters(built.d);
    CHECK(p.g == 1);
    CHECK(p.b == 1);
    CHECK(p.efficient);
    auto signs = bridge_signs(built.d);
    REQUIRE(signs.size() == 2);
    CHECK(signs[0].second == +1);
    CHECK(signs[1].second == +1);
    CHECK(signs[0].first + signs[1].first == 0);
}

TEST_CASE("split sphere component doubles the patch counts") {
    auto built = degree_one_plus_sphere();
    const auto& d = built.d;
    auto rep = validate(d);
    CAPTURE(rep.failures);
    REQUIRE(rep.ok());

    auto p = parameters(d);
    CHECK(p.g == 1);
    CHECK(p.b == 2);
    CHECK(p.c == std::array<int, 3>{2, 2, 2});
    CHECK(p.k == std::array<int, 3>{0, 0, 0});
    CHECK(p.chi_x == 3);
    CHECK(p.chi_k == 4);
    CHECK(p.surface_components == 2);
    CHECK_FALSE(p.efficient);

    // the extra pair has one clockwise and one counterclockwise wheel
    auto signs = bridge_signs(d);
    REQUIRE(signs.size() == 4);
    int plus = 0, sigma_sum = 0;
    for (auto [sigma, eps] : signs) {
        sigma_sum += sigma;
        if (eps == +1) ++plus;
    }
    CHECK(sigma_sum == 0);
    CHECK(plus == 3);
}

TEST_CASE("validation reports missing bridge data and bad cut systems") {
    SECTION("dropped bridge point") {
        auto built = degree_one();
        built.d.bridge_points.pop_back();
        auto rep = validate(built.d);
        CHECK_FALSE(rep.ok());
        bool parity = false;
        for (const auto& f : rep.failures)
            if (f.find("odd number") != std::string::npos) parity = true;
        CHECK(parity);
        CHECK_THROWS_AS(parameters(built.d), InvalidDiagramError);
    }
    SECTION("null-homotopic curve is not a cut system") {
        Scene sc = Scene::torus(24, 24);
        std::vector<std::pair<TracedPath, PathSpec>> items;
        items.push_back(
            {trace_path(sc, 0, {v(10, 10), v(14, 10), v(14, 14), v(10, 14), v(10, 10)}, true),
             {Color::curve(1)}});
        items.push_back({trace_path(sc, 0, {v(12, 1), v(12, 25)}, true), {Color::curve(2)}});
        items.push_back({trace_path(sc, 0, {v(1, 12), v(25, 12)}, true), {Color::curve(3)}});
        auto built = build(sc, items);
        auto rep = validate(built.d);
        CHECK_FALSE(rep.ok());
        bool cut = false;
        for (const auto& f : rep.failures)
            if (f.find("cut system") != std::string::npos) cut = true;
        CHECK(cut);
    }
    SECTION("unoriented arcs refuse signs but validate") {
        Scene sc = Scene::torus(24, 24);
        auto items = degree_one_items(sc);
        for (auto& [p, s] : items)
            if (s.color.kind == Color::Arc) s.oriented = false;
        auto built = build(sc, items);
        auto rep = validate(built.d);
        CAPTURE(rep.failures);
        CHECK(rep.ok());
        CHECK_THROWS_AS(bridge_signs(built.d), MissingOrientationError);
    }
}
