#pragma once

#include "moves.hpp"

namespace bridgetri {

struct SpecOutOfRangeError : Error {
    using Error::Error;
};

namespace detail_families {

inline Vec2 pt(Int x, Int y) { return Vec2{Rat(x), Rat(y)}; }

} // namespace detail_families

/// Genus-one trisection diagram with one cut curve per color and no
/// surface strands: the standard toric diagram of the complex projective
/// plane on a 24x24 torus.
inline ShadowDiagram cp2_diagram() {
    using detail_families::pt;
    Scene sc = Scene::torus(24, 24);
    std::vector<TracedPath> paths{
        trace_path(sc, 0, {pt(1, 4), pt(25, 4)}, true),
        trace_path(sc, 0, {pt(4, 1), pt(4, 25)}, true),
        trace_path(sc, 0, {pt(1, 3), pt(-23, -21)}, true),
    };
    std::vector<PathSpec> specs{{Color::curve(1)}, {Color::curve(2)}, {Color::curve(3)}};
    auto arr = arrange(sc, paths);
    return diagram_from_arrangement(sc, arr, specs);
}

/// Grid diagram of the degree-d curve in the projective plane: the
/// degree-one diagram pulled back under the d^2-fold torus cover, keeping
/// one cut curve per color.  Parameters (1,0; d^2, (d,d,d)).
inline ShadowDiagram cp2_curve_grid(int d) {
    using detail_families::pt;
    if (d < 1) throw SpecOutOfRangeError("cp2_curve_grid: d must be at least 1");
    const Int L = 24 * d;
    Scene sc = Scene::torus(L, L);
    std::vector<TracedPath> paths;
    std::vector<PathSpec> specs;
    paths.push_back(trace_path(sc, 0, {pt(1, 4), pt(L + 1, 4)}, true));
    specs.push_back({Color::curve(1)});
    paths.push_back(trace_path(sc, 0, {pt(4, 1), pt(4, L + 1)}, true));
    specs.push_back({Color::curve(2)});
    // The diagonal curve is offset by half the grid when d is even: the
    // d-1 hexagons to be contracted must occupy pairwise distinct
    // diagonals, and the diagonal class their selection misses is forced
    // to be d/2 mod d (0 works when d is odd).
    const Int off = 24 * (d % 2 == 0 ? d / 2 : 0);
    paths.push_back(trace_path(sc, 0, {pt(1 + off, 3), pt(1 + off - L, 3 - L)}, true));
    specs.push_back({Color::curve(3)});
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const Int qx = 16 + 24 * i, qy = 8 + 24 * j;
            paths.push_back(trace_path(sc, 0, {pt(qx, qy), pt(qx + 16, qy + 8)}, false));
            specs.push_back({Color::arc(1)});
            paths.push_back(trace_path(sc, 0, {pt(qx, qy), pt(qx - 8, qy + 8)}, false));
            specs.push_back({Color::arc(2)});
            paths.push_back(trace_path(sc, 0, {pt(qx, qy), pt(qx - 8, qy - 16)}, false));
            specs.push_back({Color::arc(3)});
        }
    auto arr = arrange(sc, paths);
    return diagram_from_arrangement(sc, arr, specs);
}

/// Contract balanced hexagons until exactly `steps` contractions have been
/// performed, backtracking over the candidate order if a greedy choice
/// dead-ends.  Returns nothing if no sequence of that length exists.
inline std::optional<ShadowDiagram> contract_hexagons(const ShadowDiagram& d, int steps) {
    if (steps == 0) return d;
    for (const auto& site : find_balanced_hexagons(d)) {
        auto next = contract_hexagon(d, site);
        if (auto out = contract_hexagons(next, steps - 1)) return out;
    }
    return std::nullopt;
}

/// Efficient diagram of the degree-d plane curve: the grid diagram with
/// d-1 hexagons contracted, reaching b = (d-1)(d-2)+1.
inline ShadowDiagram efficient_cp2_curve(int d) {
    auto grid = cp2_curve_grid(d);
    auto out = contract_hexagons(grid, d - 1);
    if (!out)
        throw Error("efficient_cp2_curve: hexagon contraction sequence not found");
    return *out;
}

} // namespace bridgetri
