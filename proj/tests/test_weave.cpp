#include "bridgetri/weave.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"

using namespace bridgetri;
using namespace fix;

namespace {

void check_round_trip(const ShadowDiagram& d) {
    auto w = weave_from_diagram(d);
    auto d2 = weave_to_diagram(w);
    CHECK(isomorphic(d.map, d2.map));
    REQUIRE(d2.strands.size() == d.strands.size());
    for (size_t s = 0; s < d.strands.size(); ++s) {
        CHECK(d2.strands[s].color == d.strands[s].color);
        CHECK(d2.strands[s].closed == d.strands[s].closed);
        CHECK(d2.strands[s].darts.size() == d.strands[s].darts.size());
    }
    CHECK(d2.bridge_points.size() == d.bridge_points.size());

    auto p = parameters(d);
    auto p2 = parameters(d2);
    CHECK(p2.g == p.g);
    CHECK(p2.b == p.b);
    CHECK(p2.c == p.c);
    CHECK(p2.k == p.k);
    CHECK(p2.chi_k == p.chi_k);
    CHECK(p2.surface_components == p.surface_components);

    auto signs = bridge_signs(d);
    auto signs2 = bridge_signs(d2);
    std::sort(signs.begin(), signs.end());
    std::sort(signs2.begin(), signs2.end());
    CHECK(signs == signs2);
}

} // namespace

TEST_CASE("weave round trip preserves the degree-one diagram") {
    check_round_trip(degree_one().d);
}

TEST_CASE("weave round trip preserves the split-sphere diagram") {
    check_round_trip(degree_one_plus_sphere().d);
}

TEST_CASE("weave node rotations list one germ per dart") {
    auto built = degree_one();
    auto w = weave_from_diagram(built.d);
    size_t total = 0;
    for (size_t n = 0; n < w.node_germs.size(); ++n) {
        CHECK(w.node_germs[n].size() == static_cast<size_t>(built.d.map.degree(static_cast<int>(n))));
        total += w.node_germs[n].size();
    }
    CHECK(total == static_cast<size_t>(built.d.map.dart_count()));
}
