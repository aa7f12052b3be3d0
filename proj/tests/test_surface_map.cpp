#include <catch2/catch_amalgamated.hpp>

#include <bridgetri/combinatorial_map.hpp>

using namespace bridgetri;

namespace {

// Torus with one vertex and two loop edges: rotation (0,1,2,3), pairs
// (0,2) and (1,3).
CombinatorialMap one_vertex_torus() {
    return build_map(4, {{0, 2}, {1, 3}}, {{0, 1, 2, 3}});
}

// Theta graph on the sphere: two vertices joined by three edges.
CombinatorialMap theta_graph() {
    // Darts 0,1,2 out of u (ccw); 3,4,5 out of v.  Edge i pairs dart i with
    // dart 3+i.  For a planar theta the rotations at the two vertices run
    // through the edges in opposite cyclic orders.
    return build_map(6, {{0, 3}, {1, 4}, {2, 5}}, {{0, 1, 2}, {3, 5, 4}});
}

} // namespace

TEST_CASE("one-vertex torus topology") {
    auto m = one_vertex_torus();
    auto t = topology(m);
    CHECK(t.V == 1);
    CHECK(t.E == 2);
    CHECK(t.F == 1);
    CHECK(t.boundary_cycles == 0);
    CHECK(t.euler == 0);
    CHECK(t.genus == 1);
    CHECK(t.components == 1);
}

TEST_CASE("theta graph topology") {
    auto m = theta_graph();
    auto t = topology(m);
    CHECK(t.V == 2);
    CHECK(t.E == 3);
    CHECK(t.F == 3);
    CHECK(t.euler == 2);
    CHECK(t.genus == 0);
}

TEST_CASE("build_map input validation") {
    CHECK_THROWS_AS(build_map(2, {{0, 0}, {1, 1}}, {{0, 1}}), MalformedMapError);
    CHECK_THROWS_AS(build_map(4, {{0, 1}, {0, 2}, {2, 3}}, {{0, 1, 2, 3}}), MalformedMapError);
    CHECK_THROWS_AS(build_map(4, {{0, 1}, {2, 3}}, {{0, 1, 2}}), MalformedMapError);
    CHECK_THROWS_AS(build_map(4, {{0, 1}, {2, 3}}, {{0, 1, 2, 3}, {3}}), MalformedMapError);
    // unpaired darts are not constructible directly
    CHECK_THROWS_AS(build_map(4, {{0, 1}}, {{0, 1, 2, 3}}), MalformedMapError);
}

TEST_CASE("degree-2 vertices do not change the topology") {
    // Torus as above but with the horizontal loop subdivided by a degree-2
    // vertex: darts 0,1,2,3 at the main vertex, 4,5 at the bend.
    auto m = build_map(6, {{0, 4}, {2, 5}, {1, 3}}, {{0, 1, 2, 3}, {4, 5}});
    auto t = topology(m);
    CHECK(t.V == 2);
    CHECK(t.E == 3);
    CHECK(t.F == 1);
    CHECK(t.genus == 1);
}

TEST_CASE("canonical signature detects isomorphism and relabeling invariance") {
    auto a = one_vertex_torus();
    // Same torus with darts relabeled: 0->3, 1->0, 2->1, 3->2.
    auto b = build_map(4, {{3, 1}, {0, 2}}, {{3, 0, 1, 2}});
    CHECK(isomorphic(a, b));
    CHECK_FALSE(isomorphic(a, theta_graph()));
    // Decorations distinguish.
    auto attr0 = [](int) { return 0LL; };
    auto attr1 = [](int d) { return static_cast<long long>(d == 0); };
    CHECK_FALSE(isomorphic(a, attr1, b, attr0));
}

TEST_CASE("cut along an essential curve on the torus gives an annulus") {
    auto m = one_vertex_torus();
    auto res = cut_along(m, {DartPath{{0}, true}});
    auto t = topology(res.map);
    CHECK(t.euler == 0);
    CHECK(t.genus == 0);
    CHECK(t.boundary_cycles == 2);
    CHECK(t.components == 1);
    CHECK(t.V == 2);
    CHECK(t.E == 3);
    CHECK(t.F == 1);
    REQUIRE(res.plus_side.size() == 1);
    CHECK(res.plus_side[0] == std::vector<int>{2});
    CHECK(res.minus_side[0] == std::vector<int>{0});
}

TEST_CASE("cut along open arc on the sphere gives a disk") {
    auto m = theta_graph();
    auto res = cut_along(m, {DartPath{{0}, false}});
    auto t = topology(res.map);
    CHECK(t.euler == 1);
    CHECK(t.genus == 0);
    CHECK(t.boundary_cycles == 1);
    CHECK(t.V == 2);
    CHECK(t.E == 4);
    CHECK(t.F == 3);
}

TEST_CASE("cut rejects bad strands") {
    auto m = one_vertex_torus();
    CHECK_THROWS_AS(cut_along(m, {DartPath{{0, 0}, true}}), NotEmbeddedError);
    CHECK_THROWS_AS(cut_along(m, {DartPath{{0}, false}}), NotEmbeddedError); // loop arc
    CHECK_THROWS_AS(cut_along(m, {DartPath{{}, false}}), DanglingArcEndError);
    // two strands through the same vertex
    CHECK_THROWS_AS(cut_along(m, {DartPath{{0}, true}, DartPath{{1}, true}}), NotEmbeddedError);
}

TEST_CASE("cut then glue along the same slit restores the surface") {
    auto m = one_vertex_torus();
    auto res = cut_along(m, {DartPath{{0}, true}});
    // Find one virtual dart on each boundary cycle.
    std::vector<int> virt;
    for (int d = 0; d < res.map.dart_count(); ++d)
        if (res.map.is_virtual(d)) virt.push_back(d);
    REQUIRE(virt.size() == 2);
    REQUIRE(res.map.face_of(virt[0]) != res.map.face_of(virt[1]));
    auto glued = glue(res.map, virt[0], virt[1]);
    auto t = topology(glued.map);
    CHECK(t.genus == 1);
    CHECK(t.boundary_cycles == 0);
    CHECK(isomorphic(glued.map, m));
}

TEST_CASE("gluing two disks yields a sphere") {
    // Disk = cut sphere bigon along one edge.
    auto sphere = build_map(4, {{0, 2}, {1, 3}}, {{0, 1}, {2, 3}});
    {
        auto t = topology(sphere);
        REQUIRE(t.genus == 0);
        REQUIRE(t.F == 2);
    }
    auto disk2 = cut_along(sphere, {DartPath{{0, 3}, true}});
    auto t2 = topology(disk2.map);
    CHECK(t2.boundary_cycles == 2);
    CHECK(t2.components == 2); // cutting the bigon sphere along its equator
    CHECK(t2.genus == 0);
    // glue the two pieces back together
    std::vector<int> virt;
    for (int d = 0; d < disk2.map.dart_count(); ++d)
        if (disk2.map.is_virtual(d)) virt.push_back(d);
    REQUIRE(virt.size() == 4);
    int a = virt[0], b = -1;
    for (int d : virt)
        if (disk2.map.face_of(d) != disk2.map.face_of(a)) b = d;
    REQUIRE(b != -1);
    auto glued = glue(disk2.map, a, b);
    auto t3 = topology(glued.map);
    CHECK(t3.genus == 0);
    CHECK(t3.boundary_cycles == 0);
    CHECK(t3.components == 1);
    CHECK(isomorphic(glued.map, sphere));
}

TEST_CASE("glue detects length and orientation mismatches") {
    // One torus cut along a length-1 loop, another (with a subdivided loop)
    // cut along a length-2 curve; the boundary cycles have lengths 1 and 2.
    auto a = cut_along(one_vertex_torus(), {DartPath{{0}, true}});
    auto msub = build_map(6, {{0, 4}, {2, 5}, {1, 3}}, {{0, 1, 2, 3}, {4, 5}});
    auto b = cut_along(msub, {DartPath{{0, 5}, true}});
    auto u = disjoint_union(a.map, b.map);
    std::vector<int> len1, len2;
    const auto& faces = u.face_cycles();
    for (size_t f = 0; f < faces.size(); ++f) {
        if (!u.face_is_boundary(static_cast<int>(f))) continue;
        (faces[f].size() == 1 ? len1 : len2).push_back(faces[f][0]);
    }
    REQUIRE(len1.size() == 2);
    REQUIRE(len2.size() == 2);
    CHECK_THROWS_AS(glue(u, len1[0], len2[0]), LengthMismatchError);
    CHECK_THROWS_AS(glue(u, len1[0], len1[0]), OrientationMismatchError);
    // Correct gluings give two disjoint tori.
    auto g1 = glue(u, len1[0], len1[1]);
    std::vector<int> v2;
    for (int d = 0; d < g1.map.dart_count(); ++d)
        if (g1.map.is_virtual(d)) v2.push_back(d);
    REQUIRE(v2.size() == 4);
    int c = v2[0], e = -1;
    for (int d : v2)
        if (g1.map.face_of(d) != g1.map.face_of(c)) e = d;
    REQUIRE(e != -1);
    auto g2 = glue(g1.map, c, e);
    auto t = topology(g2.map);
    CHECK(t.components == 2);
    CHECK(t.genus == 2); // sum over the two torus components
    CHECK(t.boundary_cycles == 0);
}

TEST_CASE("multi-curve cut and cyclic reglue satisfies the covering Euler count") {
    // Cut the genus-1 surface along one essential curve, take 3 copies, and
    // reglue cyclically: a 3-fold cover of the torus, which is again a torus.
    auto m = one_vertex_torus();
    auto cutr = cut_along(m, {DartPath{{0}, true}});
    auto two = disjoint_union(cutr.map, cutr.map);
    auto three = disjoint_union(two, cutr.map);
    // boundary cycles: plus side has real dart 2 (virtual partner twin),
    // minus side real dart 0.  In copy j the darts are shifted by 6j.
    auto vplus = [&](const CombinatorialMap& mm, int copy) {
        return mm.twin_total(6 * copy + 2);
    };
    auto vminus = [&](const CombinatorialMap& mm, int copy) {
        return mm.twin_total(6 * copy + 0);
    };
    REQUIRE(three.is_virtual(vplus(three, 0)));
    auto g1 = glue(three, vplus(three, 0), vminus(three, 1));
    // dart ids shift after each glue; track via trace
    auto relabel = [&](const GlueResult& g, int old_dart) {
        for (int d = 0; d < g.map.dart_count(); ++d)
            if (g.trace.source_dart[d] == old_dart) return d;
        return -1;
    };
    int p1 = relabel(g1, vplus(three, 1)), m2 = relabel(g1, vminus(three, 2));
    auto g2 = glue(g1.map, p1, m2);
    int p2 = relabel(g2, relabel(g1, vplus(three, 2)));
    int m0 = relabel(g2, relabel(g1, vminus(three, 0)));
    auto g3 = glue(g2.map, p2, m0);
    auto t = topology(g3.map);
    CHECK(t.components == 1);
    CHECK(t.boundary_cycles == 0);
    CHECK(t.euler == 0);
    CHECK(t.genus == 1);
    CHECK(t.V == 3);
    CHECK(t.E == 6);
    CHECK(t.F == 3);
}

namespace {

// Torus carrying three curves in general position: horizontal h, vertical v,
// and diagonal g, crossing pairwise once.  Vertices P = h^v, Q = h^g,
// R = v^g.
CombinatorialMap three_curve_torus() {
    // P: darts 0 (h east), 1 (v north), 2 (h west), 3 (v south)
    // Q: 4 (h east), 5 (g northeast), 6 (h west), 7 (g southwest)
    // R: 8 (g northeast), 9 (v north), 10 (g southwest), 11 (v south)
    return build_map(12,
                     {{0, 6}, {4, 2}, {1, 11}, {9, 3}, {5, 10}, {8, 7}},
                     {{0, 1, 2, 3}, {4, 5, 6, 7}, {8, 9, 10, 11}});
}

} // namespace

TEST_CASE("three-curve torus arrangement is a torus") {
    auto m = three_curve_torus();
    auto t = topology(m);
    CHECK(t.V == 3);
    CHECK(t.E == 6);
    CHECK(t.F == 3);
    CHECK(t.genus == 1);
    CHECK(t.components == 1);
}

TEST_CASE("parallel_copies with m=1 is the identity up to isomorphism") {
    auto m = three_curve_torus();
    auto res = parallel_copies(m, {DartPath{{5, 8}, true}}, 1);
    CHECK(isomorphic(res.map, m));
    REQUIRE(res.copies.size() == 1);
    REQUIRE(res.copies[0].size() == 1);
}

TEST_CASE("cabling the diagonal curve with m=2") {
    auto m = three_curve_torus();
    // diagonal curve: dart 5 (Q->R), dart 8 (R->Q)
    auto res = parallel_copies(m, {DartPath{{5, 8}, true}}, 2);
    auto t = topology(res.map);
    // Each copy crosses h once and v once: 4 crossings plus P.
    CHECK(t.V == 5);
    CHECK(t.E == 10);
    CHECK(t.genus == 1);
    CHECK(t.components == 1);
    CHECK(t.euler == 0);
    // The two copies are disjoint closed curves: their darts are disjoint
    // and each closes up.
    REQUIRE(res.copies[0].size() == 2);
    for (const auto& c : res.copies[0]) REQUIRE(c.size() == 2);
}

TEST_CASE("cabling a curve through a degree-2 bend with m=3") {
    // Torus with the horizontal loop subdivided by a bend vertex.
    auto m = build_map(6, {{0, 4}, {2, 5}, {1, 3}}, {{0, 1, 2, 3}, {4, 5}});
    auto res = parallel_copies(m, {DartPath{{0, 5}, true}}, 3);
    auto t = topology(res.map);
    CHECK(t.V == 6);   // 3 bends + 3 crossings with the vertical loop
    CHECK(t.E == 9);
    CHECK(t.genus == 1);
    CHECK(t.euler == 0);
}

TEST_CASE("cabling two crossing curves gives an m x m grid") {
    auto m = three_curve_torus();
    // Cable h and v simultaneously with m = 2; they cross at P.
    // h: darts 0 (P->Q east), 4 (Q->P east); v: 9 (R->P north), 1 (P->R).
    auto res = parallel_copies(m, {DartPath{{0, 4}, true}, DartPath{{9, 1}, true}}, 2);
    auto t = topology(res.map);
    // P becomes a 2x2 grid; Q and R each become 2 crossings on g.
    CHECK(t.V == 4 + 2 + 2);
    CHECK(t.genus == 1);
    CHECK(t.euler == 0);
    CHECK(t.components == 1);
}

TEST_CASE("cabling a self-crossing curve") {
    // Figure-eight on the sphere: one vertex, two loop edges, transverse
    // self-crossing.  Darts ccw: 0 = NE, 1 = NW, 2 = SW, 3 = SE; lobes
    // (0,3) and (1,2).
    auto m = build_map(4, {{0, 3}, {1, 2}}, {{0, 1, 2, 3}});
    {
        auto t = topology(m);
        REQUIRE(t.genus == 0);
        REQUIRE(t.F == 3);
    }
    auto res = parallel_copies(m, {DartPath{{0, 1}, true}}, 2);
    auto t = topology(res.map);
    // The crossing becomes a 2x2 grid of crossings between the two copies.
    CHECK(t.V == 4);
    CHECK(t.E == 8);
    CHECK(t.F == 6);
    CHECK(t.genus == 0);
    CHECK(t.components == 1);
}

TEST_CASE("cabling rejects a cornered passage") {
    auto m = three_curve_torus();
    // h then v concatenated turn a corner at P rather than crossing.
    CHECK_THROWS_AS(parallel_copies(m, {DartPath{{0, 4, 1, 9}, true}}, 2),
                    PreconditionError);
}
