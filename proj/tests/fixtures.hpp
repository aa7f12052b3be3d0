#pragma once

#include "bridgetri/diagram.hpp"

namespace fix {

using namespace bridgetri;

inline Vec2 v(int x, int y) { return Vec2{Rat(x), Rat(y)}; }

struct Built {
    Scene sc;
    Arrangement arr;
    ShadowDiagram d;
};

inline Built build(const Scene& sc, const std::vector<std::pair<TracedPath, PathSpec>>& items) {
    std::vector<TracedPath> paths;
    std::vector<PathSpec> specs;
    for (const auto& [p, s] : items) {
        paths.push_back(p);
        specs.push_back(s);
    }
    auto arr = arrange(sc, paths);
    auto d = diagram_from_arrangement(sc, arr, specs);
    return {sc, std::move(arr), std::move(d)};
}

// Degree-one curve diagram on the torus: one cut curve per color plus one
// bridge arc per color between two bridge points.
inline std::vector<std::pair<TracedPath, PathSpec>> degree_one_items(const Scene& sc) {
    std::vector<std::pair<TracedPath, PathSpec>> items;
    items.push_back({trace_path(sc, 0, {v(1, 4), v(25, 4)}, true), {Color::curve(1)}});
    items.push_back({trace_path(sc, 0, {v(4, 1), v(4, 25)}, true), {Color::curve(2)}});
    items.push_back({trace_path(sc, 0, {v(1, 3), v(-23, -21)}, true), {Color::curve(3)}});
    items.push_back({trace_path(sc, 0, {v(16, 8), v(32, 16)}, false), {Color::arc(1)}});
    items.push_back({trace_path(sc, 0, {v(16, 8), v(8, 16)}, false), {Color::arc(2)}});
    items.push_back({trace_path(sc, 0, {v(16, 8), v(8, -8)}, false), {Color::arc(3)}});
    return items;
}

inline Built degree_one() {
    Scene sc = Scene::torus(24, 24);
    return build(sc, degree_one_items(sc));
}

// Degree-one diagram plus a split unknotted sphere component: a second
// bridge pair joined by three more arcs, one of which crosses the third
// curve twice so the underlying graph stays connected.
inline Built degree_one_plus_sphere() {
    Scene sc = Scene::torus(24, 24);
    auto items = degree_one_items(sc);
    items.push_back(
        {trace_path(sc, 0, {v(17, 17), v(19, 23), v(21, 17)}, false), {Color::arc(1)}});
    items.push_back({trace_path(sc, 0, {v(17, 17), v(21, 17)}, false), {Color::arc(2)}});
    items.push_back(
        {trace_path(sc, 0, {v(17, 17), v(19, 15), v(21, 17)}, false), {Color::arc(3)}});
    return build(sc, items);
}

} // namespace fix
