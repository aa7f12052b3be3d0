#pragma once

#include "arrange.hpp"
#include "surface_homology.hpp"

#include <array>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace bridgetri {

struct MissingOrientationError : Error {
    using Error::Error;
};
struct InvalidDiagramError : Error {
    using Error::Error;
};
struct ClassNotRepresentableError : Error {
    using Error::Error;
};

/// Strand palette: three families of closed cut curves, three families of
/// shadow arcs, plus branch-cut and auxiliary decorations.
struct Color {
    enum Kind { Curve, Arc, Pairing, Aux };
    Kind kind = Aux;
    int index = 0; // 1..3 for Curve/Arc

    static Color curve(int i) { return {Curve, i}; }
    static Color arc(int i) { return {Arc, i}; }
    static Color pairing() { return {Pairing, 0}; }
    static Color aux() { return {Aux, 0}; }

    friend bool operator==(const Color& a, const Color& b) {
        return a.kind == b.kind && a.index == b.index;
    }
    friend bool operator<(const Color& a, const Color& b) {
        return std::tie(a.kind, a.index) < std::tie(b.kind, b.index);
    }
};

/// A colored curve or arc drawn on the map: its darts in traversal order.
/// When oriented, the dart order is the orientation.
struct Strand {
    Color color;
    bool closed = false;
    bool oriented = true;
    std::vector<int> darts;
};

struct BridgePoint {
    int vertex = -1;
    int sigma = 0; // +1 at arc tails, -1 at arc heads, 0 when unoriented
};

/// Exact geometry backing a diagram, kept for rendering: the chart/seam
/// scene, vertex positions, and a polyline per edge (indexed by edge id,
/// i.e. dart/2, drawn in the direction of the even dart).
struct DiagramLayout {
    Scene scene;
    std::vector<ChartPoint> vertex_pos;
    std::vector<std::vector<PathPiece>> edge_geom;
};

struct ShadowDiagram {
    CombinatorialMap map;
    std::vector<Strand> strands;
    std::vector<BridgePoint> bridge_points;
    std::array<bool, 3> full_shadows{true, true, true};
    std::shared_ptr<const DiagramLayout> layout;

    std::vector<int> strands_of(const Color& c) const {
        std::vector<int> out;
        for (size_t i = 0; i < strands.size(); ++i)
            if (strands[i].color == c) out.push_back(static_cast<int>(i));
        return out;
    }

    int bridge_index_of_vertex(int v) const {
        for (size_t i = 0; i < bridge_points.size(); ++i)
            if (bridge_points[i].vertex == v) return static_cast<int>(i);
        return -1;
    }

    /// Germ darts of an arc strand at its two endpoints (tail germ, head germ).
    std::pair<int, int> arc_end_germs(int s) const {
        const auto& st = strands[s];
        require(!st.closed && !st.darts.empty(), "arc_end_germs: not an arc");
        return {st.darts.front(), map.twin_total(st.darts.back())};
    }
};

struct ValidationReport {
    std::vector<std::string> failures;
    std::vector<std::string> caveats;
    bool ok() const { return failures.empty(); }
};

struct TrisectionParams {
    int g = 0;
    std::array<int, 3> k{0, 0, 0};
    int b = 0;
    std::array<int, 3> c{0, 0, 0};
    int chi_x = 0;
    int chi_k = 0;
    int surface_components = 0;
    bool efficient = false;
    std::array<bool, 3> k_torsion{false, false, false}; // Z^2g/(L_i+L_{i+1}) had torsion
};

namespace detail_diagram {

inline int gf2_rank(std::vector<std::vector<Int>> rows) {
    int rank = 0;
    size_t cols = rows.empty() ? 0 : rows[0].size();
    for (size_t c = 0; c < cols; ++c) {
        size_t piv = rank;
        while (piv < rows.size() && rows[piv][c] % 2 == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[static_cast<size_t>(rank)]);
        for (size_t r = 0; r < rows.size(); ++r)
            if (r != static_cast<size_t>(rank) && rows[r][c] % 2 != 0)
                for (size_t k = 0; k < cols; ++k) rows[r][k] += rows[static_cast<size_t>(rank)][k];
        ++rank;
    }
    return rank;
}

inline std::set<int> strand_vertices(const CombinatorialMap& m, const Strand& s) {
    std::set<int> vs;
    for (int d : s.darts) {
        vs.insert(m.vertex_of(d));
        vs.insert(m.head_vertex(d));
    }
    return vs;
}

} // namespace detail_diagram

/// Structural, incidence, and cut-system checks.  Failures are listed, not
/// thrown; the caveat about tangle triviality is always attached.
inline ValidationReport validate(const ShadowDiagram& d) {
    using namespace detail_diagram;
    ValidationReport rep;
    rep.caveats.push_back("tangle triviality is not verified (necessary conditions only)");
    auto fail = [&](std::string msg) { rep.failures.push_back(std::move(msg)); };

    const auto& m = d.map;
    auto top = topology(m);
    if (top.boundary_cycles != 0) fail("map is not closed");
    if (top.components != 1) fail("map is disconnected");

    // strand chains are connected, closed/open as declared, and together
    // cover every edge exactly once
    std::vector<int> edge_owner(m.dart_count(), -1);
    for (size_t s = 0; s < d.strands.size(); ++s) {
        const auto& st = d.strands[s];
        if (st.darts.empty()) {
            fail("strand " + std::to_string(s) + " is empty");
            continue;
        }
        for (size_t i = 0; i + 1 < st.darts.size(); ++i)
            if (m.head_vertex(st.darts[i]) != m.vertex_of(st.darts[i + 1]))
                fail("strand " + std::to_string(s) + " is not a dart chain");
        if (st.closed && m.head_vertex(st.darts.back()) != m.vertex_of(st.darts.front()))
            fail("strand " + std::to_string(s) + " marked closed but does not close");
        for (int dart : st.darts) {
            int e = std::min(dart, m.twin_total(dart));
            if (edge_owner[e] != -1) fail("edge of dart " + std::to_string(dart) + " covered twice");
            edge_owner[e] = static_cast<int>(s);
        }
    }
    for (int dart = 0; dart < m.dart_count(); ++dart)
        if (dart < m.twin_total(dart) && edge_owner[dart] == -1)
            fail("edge of dart " + std::to_string(dart) + " not covered by any strand");

    // bridge point bookkeeping
    if (d.bridge_points.size() % 2 != 0) fail("odd number of bridge points");
    std::set<int> bridge_vs;
    for (const auto& bp : d.bridge_points)
        if (!bridge_vs.insert(bp.vertex).second) fail("duplicate bridge vertex");

    // per color: curve counts, disjointness, simplicity, cut system
    H1Basis basis;
    bool have_basis = false;
    if (top.genus > 0 && top.components == 1 && top.boundary_cycles == 0) {
        basis = h1_basis(m);
        have_basis = true;
    }
    for (int col = 1; col <= 3; ++col) {
        auto curves = d.strands_of(Color::curve(col));
        auto arcs = d.strands_of(Color::arc(col));
        if (static_cast<int>(curves.size()) != top.genus)
            fail("color " + std::to_string(col) + ": expected " + std::to_string(top.genus) +
                 " curves, found " + std::to_string(curves.size()));
        std::set<int> seen;
        bool disjoint = true, simple = true;
        for (int s : curves) {
            if (!d.strands[s].closed) fail("curve strand " + std::to_string(s) + " is open");
            std::set<int> vs = strand_vertices(m, d.strands[s]);
            if (vs.size() != d.strands[s].darts.size()) simple = false;
            for (int v : vs)
                if (!seen.insert(v).second) disjoint = false;
        }
        for (int s : arcs)
            for (int v : strand_vertices(m, d.strands[s]))
                if (seen.count(v)) disjoint = false;
        if (!simple) fail("color " + std::to_string(col) + ": curve is not simple");
        if (!disjoint) fail("color " + std::to_string(col) + ": curves meet same-color strands");
        if (have_basis && static_cast<int>(curves.size()) == top.genus) {
            std::vector<std::vector<Int>> classes;
            for (int s : curves) classes.push_back(cycle_class(m, basis, d.strands[s].darts));
            if (gf2_rank(classes) != top.genus)
                fail("color " + std::to_string(col) + ": not a cut system (mod-2 dependent)");
        }
        // arc/bridge incidence in full-shadow mode
        if (d.full_shadows[static_cast<size_t>(col - 1)]) {
            std::map<int, int> ends; // bridge vertex -> arc end count of this color
            for (int s : arcs) {
                if (d.strands[s].closed) fail("arc strand " + std::to_string(s) + " is closed");
                int u = m.vertex_of(d.strands[s].darts.front());
                int v = m.head_vertex(d.strands[s].darts.back());
                for (int w : {u, v}) {
                    if (!bridge_vs.count(w))
                        fail("arc strand " + std::to_string(s) + " ends off the bridge points");
                    else
                        ends[w] += 1;
                }
            }
            for (const auto& bp : d.bridge_points)
                if (ends[bp.vertex] != 1)
                    fail("bridge vertex " + std::to_string(bp.vertex) + ": " +
                         std::to_string(ends[bp.vertex]) + " ends of arc color " +
                         std::to_string(col));
        }
    }

    // orientation consistency: arc tails at positive points
    bool arcs_oriented = true;
    for (const auto& st : d.strands)
        if (st.color.kind == Color::Arc && !st.oriented) arcs_oriented = false;
    if (arcs_oriented) {
        Int sum = 0;
        for (const auto& bp : d.bridge_points) {
            if (bp.sigma != 1 && bp.sigma != -1) {
                fail("bridge vertex " + std::to_string(bp.vertex) + " lacks a sign");
                continue;
            }
            sum += bp.sigma;
            for (int col = 1; col <= 3; ++col)
                for (int s : d.strands_of(Color::arc(col))) {
                    const auto& st = d.strands[s];
                    if (d.map.vertex_of(st.darts.front()) == bp.vertex && bp.sigma != +1)
                        fail("arc tail at a negative bridge point");
                    if (d.map.head_vertex(st.darts.back()) == bp.vertex && bp.sigma != -1)
                        fail("arc head at a positive bridge point");
                }
        }
        if (sum != 0) fail("bridge point signs do not balance");
    }
    return rep;
}

/// Curve classes of one color in a common H1 basis.
inline std::vector<std::vector<Int>> curve_classes(const ShadowDiagram& d, const H1Basis& basis,
                                                   int col) {
    std::vector<std::vector<Int>> out;
    for (int s : d.strands_of(Color::curve(col)))
        out.push_back(cycle_class(d.map, basis, d.strands[s].darts));
    return out;
}

inline TrisectionParams parameters(const ShadowDiagram& d) {
    auto rep = validate(d);
    if (!rep.ok()) throw InvalidDiagramError("parameters: invalid diagram: " + rep.failures.front());
    TrisectionParams p;
    auto top = topology(d.map);
    p.g = top.genus;
    p.b = static_cast<int>(d.bridge_points.size()) / 2;

    // c_i: cycles of the union of arc colors i and i+1 across bridge points
    std::map<int, int> bridge_of;
    for (size_t i = 0; i < d.bridge_points.size(); ++i) bridge_of[d.bridge_points[i].vertex] = static_cast<int>(i);
    auto arc_cycles = [&](std::vector<int> cols) {
        detail::UnionFind uf(static_cast<int>(d.bridge_points.size()));
        for (int col : cols)
            for (int s : d.strands_of(Color::arc(col))) {
                int u = bridge_of.at(d.map.vertex_of(d.strands[s].darts.front()));
                int v = bridge_of.at(d.map.head_vertex(d.strands[s].darts.back()));
                uf.unite(u, v);
            }
        std::set<int> roots;
        for (size_t i = 0; i < d.bridge_points.size(); ++i) roots.insert(uf.find(static_cast<int>(i)));
        return static_cast<int>(roots.size());
    };
    for (int i = 0; i < 3; ++i) p.c[static_cast<size_t>(i)] = arc_cycles({i + 1, (i + 1) % 3 + 1});
    p.surface_components = arc_cycles({1, 2, 3});

    // homological k_i
    if (p.g > 0) {
        auto basis = h1_basis(d.map);
        std::array<std::vector<std::vector<Int>>, 3> L;
        for (int i = 0; i < 3; ++i) L[static_cast<size_t>(i)] = curve_classes(d, basis, i + 1);
        for (int i = 0; i < 3; ++i) {
            IntegerLattice s = IntegerLattice::sum(IntegerLattice(2 * p.g, L[static_cast<size_t>(i)]),
                                                   IntegerLattice(2 * p.g, L[static_cast<size_t>((i + 1) % 3)]));
            auto inv = s.ambient_quotient();
            p.k[static_cast<size_t>(i)] = inv.free_rank;
            p.k_torsion[static_cast<size_t>(i)] = !inv.torsion.empty();
        }
    }
    p.chi_x = 2 + p.g - p.k[0] - p.k[1] - p.k[2];
    p.chi_k = p.c[0] + p.c[1] + p.c[2] - p.b;
    p.efficient = p.k[0] == 0 && p.k[1] == 0 && p.k[2] == 0 && p.c[0] == 1 && p.c[1] == 1 && p.c[2] == 1;
    return p;
}

/// Per bridge point: (sigma, epsilon).  sigma needs oriented arcs; epsilon
/// is +1 exactly when the three arc-color germs occur counterclockwise in
/// color order around the vertex.
inline std::vector<std::pair<int, int>> bridge_signs(const ShadowDiagram& d) {
    for (const auto& st : d.strands)
        if (st.color.kind == Color::Arc && !st.oriented)
            throw MissingOrientationError("bridge_signs: arcs are unoriented");
    require(d.full_shadows[0] && d.full_shadows[1] && d.full_shadows[2],
            "bridge_signs: needs full shadows");
    std::map<int, std::map<int, int>> germ_color; // vertex -> dart -> arc color
    for (int col = 1; col <= 3; ++col)
        for (int s : d.strands_of(Color::arc(col))) {
            auto [tg, hg] = d.arc_end_germs(s);
            germ_color[d.map.vertex_of(tg)][tg] = col;
            germ_color[d.map.vertex_of(hg)][hg] = col;
        }
    std::vector<std::pair<int, int>> out;
    for (const auto& bp : d.bridge_points) {
        require(bp.sigma == 1 || bp.sigma == -1, "bridge_signs: missing sigma");
        const auto& germs = germ_color.at(bp.vertex);
        std::vector<int> order; // colors in ccw rotation order
        for (int dart : d.map.vertex_cycle(bp.vertex)) {
            auto it = germs.find(dart);
            if (it != germs.end()) order.push_back(it->second);
        }
        require(order.size() == 3, "bridge_signs: vertex lacks three arc ends");
        bool ccw = (order[0] % 3) + 1 == order[1] && (order[1] % 3) + 1 == order[2];
        out.push_back({bp.sigma, ccw ? +1 : -1});
    }
    return out;
}

/// Homology of the ambient 4-manifold from the diagram's cut systems.
inline TrisectionHomology trisection_homology(const ShadowDiagram& d) {
    auto top = topology(d.map);
    require(top.components == 1 && top.boundary_cycles == 0, "trisection_homology: bad map");
    if (top.genus == 0) return TrisectionHomology{};
    auto basis = h1_basis(d.map);
    return trisection_homology_from_classes(curve_classes(d, basis, 1), curve_classes(d, basis, 2),
                                            curve_classes(d, basis, 3), basis.J);
}

/// Pairing of the class represented by sum c_i [gamma_i] with the knotted
/// surface: solves the class as a combination of alpha and beta classes,
/// bounds the mixed chain by a two-chain, and sums its local multiplicities
/// over the signed bridge points.
inline Int surface_class_pairing(const ShadowDiagram& d, const std::vector<Int>& gamma_coeff) {
    auto top = topology(d.map);
    require(top.genus > 0, "surface_class_pairing: genus-0 map has no classes");
    auto basis = h1_basis(d.map);
    auto alphas = d.strands_of(Color::curve(1));
    auto betas = d.strands_of(Color::curve(2));
    auto gammas = d.strands_of(Color::curve(3));
    require(gamma_coeff.size() == gammas.size(), "surface_class_pairing: coefficient count");

    std::vector<Int> target(2 * top.genus, 0);
    for (size_t i = 0; i < gammas.size(); ++i) {
        auto cls = cycle_class(d.map, basis, d.strands[gammas[i]].darts);
        for (int j = 0; j < 2 * top.genus; ++j) target[static_cast<size_t>(j)] += gamma_coeff[i] * cls[static_cast<size_t>(j)];
    }
    Mat ab(2 * top.genus, static_cast<int>(alphas.size() + betas.size()));
    for (size_t c = 0; c < alphas.size() + betas.size(); ++c) {
        int s = c < alphas.size() ? alphas[c] : betas[c - alphas.size()];
        auto cls = cycle_class(d.map, basis, d.strands[s].darts);
        for (int r = 0; r < 2 * top.genus; ++r) ab(r, static_cast<int>(c)) = cls[static_cast<size_t>(r)];
    }
    auto sol = solve_integer(ab, target);
    if (!sol) throw ClassNotRepresentableError("surface_class_pairing: class not in L_alpha + L_beta");

    // boundary chain: sum a_j alpha_j + b_j beta_j - sum c_i gamma_i
    std::vector<std::vector<int>> cycles;
    std::vector<Int> mult;
    for (size_t c = 0; c < alphas.size() + betas.size(); ++c) {
        int s = c < alphas.size() ? alphas[c] : betas[c - alphas.size()];
        cycles.push_back(d.strands[s].darts);
        mult.push_back((*sol)[c]);
    }
    for (size_t i = 0; i < gammas.size(); ++i) {
        cycles.push_back(d.strands[gammas[i]].darts);
        mult.push_back(-gamma_coeff[i]);
    }
    auto phi = two_chain_with_boundary(d.map, dart_chain(d.map, cycles, mult));
    require(static_cast<bool>(phi), "surface_class_pairing: equal classes but chain does not bound");

    Int total = 0;
    for (const auto& bp : d.bridge_points) {
        require(bp.sigma == 1 || bp.sigma == -1, "surface_class_pairing: missing sigma");
        // all faces around a bridge point carry the same weight: arcs carry
        // no boundary flow
        auto cyc = d.map.vertex_cycle(bp.vertex);
        Int w = (*phi)[static_cast<size_t>(d.map.face_of(cyc.front()))];
        for (int dart : cyc)
            require((*phi)[static_cast<size_t>(d.map.face_of(dart))] == w,
                    "surface_class_pairing: multiplicity jumps across an arc");
        total += bp.sigma * w;
    }
    return total;
}

/// Assemble a diagram from an arrangement: one strand per traced path, with
/// bridge points at the endpoints of arc-colored strands and signs taken
/// from arc orientations (paths are traced tail to head).
struct PathSpec {
    Color color;
    bool oriented = true;
};

inline ShadowDiagram diagram_from_arrangement(const Scene& sc, const Arrangement& arr,
                                              const std::vector<PathSpec>& specs) {
    require(specs.size() == arr.path_darts.size(), "diagram_from_arrangement: spec count");
    ShadowDiagram d;
    d.map = arr.map;
    std::map<int, int> sigma; // bridge vertex -> sign
    for (size_t p = 0; p < specs.size(); ++p) {
        Strand st;
        st.color = specs[p].color;
        st.closed = arr.path_darts[p].closed;
        st.oriented = specs[p].oriented;
        st.darts = arr.path_darts[p].darts;
        bool endpoints = st.color.kind == Color::Arc || st.color.kind == Color::Pairing;
        if (!st.closed && endpoints) {
            int u = arr.path_start_vertex[p];
            int v = arr.path_end_vertex[p];
            if (st.color.kind == Color::Arc && st.oriented) {
                for (auto [vert, sg] : {std::pair<int, int>{u, +1}, {v, -1}}) {
                    auto it = sigma.find(vert);
                    if (it == sigma.end()) sigma[vert] = sg;
                    else
                        check_valid(it->second == sg,
                                    "diagram_from_arrangement: conflicting bridge signs");
                }
            } else {
                sigma.emplace(u, 0);
                sigma.emplace(v, 0);
            }
        }
        d.strands.push_back(std::move(st));
    }
    for (auto [v, sg] : sigma) d.bridge_points.push_back({v, sg});
    auto lay = std::make_shared<DiagramLayout>();
    lay->scene = sc;
    lay->vertex_pos = arr.vertex_pos;
    lay->edge_geom = arr.edge_geom;
    d.layout = std::move(lay);
    return d;
}

} // namespace bridgetri
