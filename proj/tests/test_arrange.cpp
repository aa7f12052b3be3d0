#include <catch2/catch_amalgamated.hpp>

#include <bridgetri/arrange.hpp>

using namespace bridgetri;

namespace {

Vec2 v(long x, long y) { return Vec2{Rat(x), Rat(y)}; }

// Two-sheeted branched cover of the sphere: two front/back chart pairs
// joined along a horizontal slit on the front charts.
Scene two_deck_sphere(const Seg& slit) {
    Scene sc;
    Scene base = Scene::sphere(24, 24);
    // decks 0 and 1: charts 0,1 (front/back of deck 0) and 2,3 (deck 1)
    for (int d = 0; d < 2; ++d)
        for (const auto& c : base.charts) sc.charts.push_back(c);
    for (int d = 0; d < 2; ++d)
        for (auto r : base.rules) {
            r.chart += 2 * d;
            r.to_chart += 2 * d;
            sc.rules.push_back(r);
        }
    sc.add_bank_gluing(0, slit, +1, 2, slit, +1);
    sc.add_bank_gluing(2, slit, +1, 0, slit, +1);
    return sc;
}

} // namespace

TEST_CASE("similarities and angle order") {
    Sim r = Sim::ratio(v(1, 0), v(0, 2)); // rotate 90ccw and double
    CHECK(r.apply(v(3, 0)) == v(0, 6));
    CHECK(r.apply(v(0, 1)) == v(-2, 0));
    Sim id = Sim::ratio(v(5, 7), v(5, 7));
    CHECK(id.apply(v(-3, 11)) == v(-3, 11));

    CHECK(angle_compare(v(1, 0), v(1, 1)) < 0);
    CHECK(angle_compare(v(1, 1), v(-1, 1)) < 0);
    CHECK(angle_compare(v(-1, -1), v(1, -1)) < 0);
    CHECK(angle_compare(v(1, 0), v(-1, 0)) < 0);
    CHECK(angle_compare(v(2, 2), v(3, 3)) == 0);
    CHECK(in_ccw_sector(v(1, 0), v(0, 1), v(1, 1)));
    CHECK_FALSE(in_ccw_sector(v(1, 0), v(0, 1), v(-1, 1)));
    CHECK(in_ccw_sector(v(0, 1), v(1, 0), v(-1, -2)));
    CHECK(in_ccw_sector(v(1, 0), v(1, 0), v(-1, 3))); // full turn
    CHECK_FALSE(in_ccw_sector(v(1, 0), v(1, 0), v(2, 0)));
}

TEST_CASE("tracing wraps around the torus") {
    Scene t = Scene::torus(24, 24);

    auto horiz = trace_path(t, 0, {v(1, 4), v(25, 4)}, true);
    REQUIRE(horiz.pieces.size() == 2);
    CHECK(horiz.pieces[0].p == v(1, 4));
    CHECK(horiz.pieces[0].q == v(24, 4));
    CHECK(horiz.pieces[1].p == v(0, 4));
    CHECK(horiz.pieces[1].q == v(1, 4));

    auto diag = trace_path(t, 0, {v(1, 2), v(25, 26)}, true);
    REQUIRE(diag.pieces.size() == 3);
    CHECK(diag.pieces[0].q == v(23, 24));
    CHECK(diag.pieces[1].p == v(23, 0));
    CHECK(diag.pieces[1].q == v(24, 1));
    CHECK(diag.pieces[2].p == v(0, 1));

    // a path that does not close must be rejected when declared closed
    CHECK_THROWS_AS(trace_path(t, 0, {v(1, 2), v(25, 3)}, true), Error);
}

TEST_CASE("tracing onto the back chart of a sphere") {
    Scene s = Scene::sphere(24, 24);
    auto p = trace_path(s, 0, {v(20, 6), v(28, 6)}, false);
    REQUIRE(p.pieces.size() == 2);
    CHECK(p.pieces[0].chart == 0);
    CHECK(p.pieces[0].q == v(24, 6));
    CHECK(p.pieces[1].chart == 1);
    CHECK(p.pieces[1].p == v(0, 6));
    CHECK(p.pieces[1].q == v(4, 6));

    // over the top edge: lands on the back top edge moving down
    auto q = trace_path(s, 0, {v(6, 20), v(6, 28)}, false);
    REQUIRE(q.pieces.size() == 2);
    CHECK(q.pieces[1].chart == 1);
    CHECK(q.pieces[1].p == v(18, 24));
    CHECK(q.pieces[1].q == v(18, 20));
}

TEST_CASE("three curves on the torus reproduce the standard map") {
    Scene t = Scene::torus(24, 24);
    std::vector<TracedPath> paths = {
        trace_path(t, 0, {v(1, 4), v(25, 4)}, true),    // horizontal
        trace_path(t, 0, {v(4, 1), v(4, 25)}, true),    // vertical
        trace_path(t, 0, {v(1, 11), v(25, 35)}, true),  // diagonal y = x + 10
    };
    auto arr = arrange(t, paths);
    auto top = topology(arr.map);
    CHECK(top.V == 3);
    CHECK(top.E == 6);
    CHECK(top.F == 3);
    CHECK(top.genus == 1);
    CHECK(top.components == 1);
    for (size_t p = 0; p < paths.size(); ++p) {
        CHECK(arr.path_darts[p].closed);
        CHECK(arr.path_darts[p].darts.size() == 2);
        CHECK(arr.path_start_vertex[p] == -1);
    }
    CombinatorialMap ref = build_map(12, {{0, 6}, {4, 2}, {1, 11}, {9, 3}, {5, 10}, {8, 7}},
                                     {{0, 1, 2, 3}, {4, 5, 6, 7}, {8, 9, 10, 11}});
    CHECK(isomorphic(arr.map, ref));
}

TEST_CASE("branched double cover merges slit-end germs into one vertex") {
    Seg slit{v(8, 12), v(16, 12)};
    Scene sc = two_deck_sphere(slit);

    std::vector<TracedPath> paths;
    // an arc over the slit on each deck, ending at both branch points
    paths.push_back(trace_path(sc, 0, {v(8, 12), v(12, 18), v(16, 12)}, false));
    paths.push_back(trace_path(sc, 2, {v(8, 12), v(12, 18), v(16, 12)}, false));
    // a loop around the left branch point: crosses the slit once per lap,
    // so it closes up only after two laps
    paths.push_back(trace_path(
        sc, 0,
        {v(6, 8), v(10, 8), v(10, 16), v(6, 16), v(6, 8), v(10, 8), v(10, 16), v(6, 16), v(6, 8)},
        true));

    auto arr = arrange(sc, paths);
    auto top = topology(arr.map);
    CHECK(top.V == 4);
    CHECK(top.E == 6);
    CHECK(top.F == 4);
    CHECK(top.genus == 0);
    CHECK(top.components == 1);
    // both arcs start at the same branch-point vertex and end at the other
    CHECK(arr.path_start_vertex[0] == arr.path_start_vertex[1]);
    CHECK(arr.path_end_vertex[0] == arr.path_end_vertex[1]);
    CHECK(arr.path_start_vertex[0] != arr.path_end_vertex[0]);
    CHECK(arr.map.degree(arr.path_start_vertex[0]) == 2);
}

TEST_CASE("unbranched slit meeting point splits into one vertex per deck") {
    // two collinear slits end-to-end: their shared endpoint has trivial
    // monodromy, so the covers' copies stay distinct points
    Seg slit1{v(8, 12), v(12, 12)}, slit2{v(12, 12), v(16, 12)};
    Scene sc = two_deck_sphere(slit1);
    sc.add_bank_gluing(0, slit2, +1, 2, slit2, +1);
    sc.add_bank_gluing(2, slit2, +1, 0, slit2, +1);

    std::vector<TracedPath> paths;
    paths.push_back(trace_path(sc, 0, {v(12, 6), v(12, 12)}, false)); // deck-0 arc from below
    paths.push_back(trace_path(sc, 2, {v(12, 6), v(12, 12)}, false)); // deck-1 arc from below
    auto arr = arrange(sc, paths);
    auto top = topology(arr.map);
    CHECK(top.V == 4);
    CHECK(top.E == 2);
    CHECK(arr.path_end_vertex[0] != arr.path_end_vertex[1]);
    CHECK(arr.path_start_vertex[0] != arr.path_start_vertex[1]);
    // outer endpoints of the joined slit are genuine branch points: an arc
    // ending there from each deck lands on a shared vertex
    std::vector<TracedPath> more = paths;
    more.push_back(trace_path(sc, 0, {v(4, 6), v(8, 12)}, false));
    more.push_back(trace_path(sc, 2, {v(4, 6), v(8, 12)}, false));
    auto arr2 = arrange(sc, more);
    CHECK(arr2.path_end_vertex[2] == arr2.path_end_vertex[3]);
}

TEST_CASE("arrangement input validation") {
    Scene t = Scene::torus(24, 24);
    // tangential (overlapping) curves
    std::vector<TracedPath> overlap = {
        trace_path(t, 0, {v(1, 4), v(25, 4)}, true),
        trace_path(t, 0, {v(2, 4), v(26, 4)}, true),
    };
    CHECK_THROWS_AS(arrange(t, overlap), Error);
    // an endpoint in another curve's interior
    std::vector<TracedPath> tpoint = {
        trace_path(t, 0, {v(1, 4), v(25, 4)}, true),
        trace_path(t, 0, {v(6, 2), v(6, 4)}, false),
    };
    CHECK_THROWS_AS(arrange(t, tpoint), Error);
    // a closed curve crossing nothing has no vertices to hang the map on
    std::vector<TracedPath> lonely = {trace_path(t, 0, {v(1, 4), v(25, 4)}, true)};
    CHECK_THROWS_AS(arrange(t, lonely), Error);
    // triple point
    std::vector<TracedPath> triple = {
        trace_path(t, 0, {v(1, 4), v(25, 4)}, true),
        trace_path(t, 0, {v(6, 1), v(6, 25)}, true),
        trace_path(t, 0, {v(3, 1), v(27, 25)}, true), // y = x - 2 passes (6,4)
    };
    CHECK_THROWS_AS(arrange(t, triple), Error);
}
