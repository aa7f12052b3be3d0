#pragma once

#include "combinatorial_map.hpp"
#include "layout.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <vector>

namespace bridgetri {

/// Result of intersecting traced paths into a map on the scene's surface:
/// the combinatorial map, exact geometry for every edge and vertex, and the
/// dart sequence realizing each input path.
struct Arrangement {
    CombinatorialMap map;
    std::vector<ChartPoint> vertex_pos;             // representative position per vertex
    std::vector<std::vector<PathPiece>> edge_geom;  // per edge, traversed in dart-2e direction
    std::vector<int> edge_path;                     // owning input path per edge
    std::vector<DartPath> path_darts;               // forward darts per input path
    std::vector<int> path_start_vertex;             // -1 for closed paths
    std::vector<int> path_end_vertex;
};

namespace detail_arrange {

inline bool point_on_seg(const Seg& s, const Vec2& p) {
    if (cross(s.dir(), p - s.a) != 0) return false;
    Rat rr = dot(s.dir(), s.dir());
    if (rr == 0) return p == s.a;
    Rat t = dot(p - s.a, s.dir()) / rr;
    return t >= 0 && t <= 1;
}

struct Germ {
    ChartPoint cp;
    Vec2 dir; // pointing away from the vertex
    int dart;
};

struct Ray {
    Vec2 dir; // away from the endpoint
    Seg seg;
    int end; // 0 when the point is seg.a, 1 when seg.b
};

} // namespace detail_arrange

/// Intersect a family of traced paths on a scene.  Paths must meet only in
/// transverse interior double points or at shared open endpoints; open
/// endpoints at seam-segment endpoints are resolved across all charts of
/// the identification (supporting branch points of covers).
inline Arrangement arrange(const Scene& sc, const std::vector<TracedPath>& paths) {
    using namespace detail_arrange;
    require(!paths.empty(), "arrange: no paths");

    // --- junction classes: seam segment endpoints identified by the rules
    std::map<ChartPoint, int> cp_id;
    std::vector<ChartPoint> cps;
    auto intern = [&](const ChartPoint& cp) {
        auto it = cp_id.find(cp);
        if (it != cp_id.end()) return it->second;
        int id = static_cast<int>(cps.size());
        cp_id.emplace(cp, id);
        cps.push_back(cp);
        return id;
    };
    std::vector<std::pair<int, int>> junction_links;
    for (const auto& r : sc.rules) {
        int a0 = intern({r.chart, r.seg.a});
        int a1 = intern({r.chart, r.seg.b});
        int b0 = intern({r.to_chart, r.to_seg.at(r.map_param(Rat(0)))});
        int b1 = intern({r.to_chart, r.to_seg.at(r.map_param(Rat(1)))});
        junction_links.push_back({a0, b0});
        junction_links.push_back({a1, b1});
    }
    int seam_end_count = static_cast<int>(cps.size());
    detail::UnionFind uf(seam_end_count);
    for (auto [a, b] : junction_links) uf.unite(a, b);
    auto is_seam_end = [&](const ChartPoint& cp) {
        auto it = cp_id.find(cp);
        return it != cp_id.end() && it->second < seam_end_count;
    };

    // --- flatten pieces
    struct GPiece {
        int path, idx; // index within the path's chain
        PathPiece pp;
    };
    std::vector<GPiece> gp;
    std::vector<int> path_first(paths.size()), path_len(paths.size());
    for (size_t p = 0; p < paths.size(); ++p) {
        require(!paths[p].pieces.empty(), "arrange: empty path");
        path_first[p] = static_cast<int>(gp.size());
        path_len[p] = static_cast<int>(paths[p].pieces.size());
        for (size_t i = 0; i < paths[p].pieces.size(); ++i)
            gp.push_back({static_cast<int>(p), static_cast<int>(i), paths[p].pieces[i]});
    }

    // --- pairwise intersections
    // splits[k]: interior params on global piece k where crossings occur
    std::vector<std::vector<Rat>> splits(gp.size());
    auto chain_adjacent = [&](const GPiece& x, const GPiece& y) {
        if (x.path != y.path) return false;
        int n = path_len[x.path];
        int d = std::abs(x.idx - y.idx);
        if (d == 1) return true;
        return paths[x.path].closed && d == n - 1 && n > 1;
    };
    auto is_terminal = [&](const GPiece& x, const Rat& t) {
        if (paths[x.path].closed) return false;
        if (x.idx == 0 && t == 0) return true;
        return x.idx == path_len[x.path] - 1 && t == 1;
    };
    for (size_t i = 0; i < gp.size(); ++i) {
        for (size_t j = i + 1; j < gp.size(); ++j) {
            if (gp[i].pp.chart != gp[j].pp.chart) continue;
            Seg si{gp[i].pp.p, gp[i].pp.q}, sj{gp[j].pp.p, gp[j].pp.q};
            if (collinear_overlap(si, sj))
                throw ValidationError("arrange: overlapping collinear path pieces");
            auto h = seg_intersect(si, sj);
            if (!h) continue;
            bool ei = (h->t == 0 || h->t == 1);
            bool ej = (h->u == 0 || h->u == 1);
            if (chain_adjacent(gp[i], gp[j])) {
                if (ei && ej) continue; // the shared bend joint
                throw ValidationError("arrange: consecutive pieces re-intersect");
            }
            if (!ei && !ej) {
                splits[i].push_back(h->t);
                splits[j].push_back(h->u);
            } else if (ei && ej) {
                if (!is_terminal(gp[i], h->t) || !is_terminal(gp[j], h->u))
                    throw ValidationError("arrange: paths touch at a non-terminal point");
                // shared open endpoint: becomes a common vertex below
            } else {
                throw ValidationError("arrange: path endpoint meets another path's interior");
            }
        }
    }
    for (auto& v : splits) {
        std::sort(v.begin(), v.end());
        for (size_t k = 1; k < v.size(); ++k)
            if (v[k] == v[k - 1]) throw ValidationError("arrange: triple point");
    }

    // --- build edges path by path
    std::vector<std::vector<PathPiece>> edge_geom;
    std::vector<int> edge_path;
    std::vector<Germ> germs; // two per edge, start then end
    std::vector<DartPath> path_darts(paths.size());
    std::vector<int> start_germ(paths.size(), -1), end_germ(paths.size(), -1);

    for (size_t p = 0; p < paths.size(); ++p) {
        const auto& P = paths[p].pieces;
        int n = path_len[p];
        bool closed = paths[p].closed;
        std::vector<std::pair<int, Rat>> stations; // (piece, t) along the chain
        if (!closed) stations.push_back({0, Rat(0)});
        for (int i = 0; i < n; ++i)
            for (const auto& t : splits[path_first[p] + i]) stations.push_back({i, t});
        if (!closed) stations.push_back({n - 1, Rat(1)});
        require(!stations.empty(), "arrange: closed path meets nothing");
        int S = static_cast<int>(stations.size());
        int ecount = closed ? S : S - 1;
        path_darts[p].closed = closed;
        for (int k = 0; k < ecount; ++k) {
            auto [pa, ta] = stations[k];
            auto [pb, tb] = stations[(k + 1) % S];
            bool wrap = closed && k + 1 == S;
            int e = static_cast<int>(edge_geom.size());
            std::vector<std::tuple<int, Rat, Rat>> segs;
            if (!wrap && pa == pb) {
                segs.push_back({pa, ta, tb});
            } else {
                segs.push_back({pa, ta, Rat(1)});
                int i = (pa + 1) % n;
                while (i != pb) {
                    segs.push_back({i, Rat(0), Rat(1)});
                    i = (i + 1) % n;
                }
                segs.push_back({pb, Rat(0), tb});
            }
            std::vector<PathPiece> geo;
            for (auto& [pi, f, t] : segs) {
                if (f == t) continue;
                Seg s{P[pi].p, P[pi].q};
                geo.push_back({P[pi].chart, s.at(f), s.at(t)});
            }
            require(!geo.empty(), "arrange: degenerate edge");
            Seg sa{P[pa].p, P[pa].q}, sb{P[pb].p, P[pb].q};
            germs.push_back({{P[pa].chart, sa.at(ta)}, sa.dir(), 2 * e});
            germs.push_back({{P[pb].chart, sb.at(tb)}, Vec2{0, 0} - sb.dir(), 2 * e + 1});
            if (!closed && k == 0) start_germ[p] = 2 * e;
            if (!closed && k == ecount - 1) end_germ[p] = 2 * e + 1;
            edge_geom.push_back(std::move(geo));
            edge_path.push_back(static_cast<int>(p));
            path_darts[p].darts.push_back(2 * e);
        }
    }
    int E = static_cast<int>(edge_geom.size());

    // --- group germs into vertices
    // Plain vertices: germs sharing an exact chart point away from seam
    // endpoints.  Junction vertices: germs at seam-segment endpoints,
    // grouped by walking the angular sectors around the identified points.
    std::map<ChartPoint, std::vector<int>> plain;      // cp -> germ indices
    std::map<int, std::map<ChartPoint, std::vector<int>>> junction; // root -> cp -> germs
    for (size_t g = 0; g < germs.size(); ++g) {
        const auto& cp = germs[g].cp;
        if (is_seam_end(cp)) {
            junction[uf.find(cp_id.at(cp))][cp].push_back(static_cast<int>(g));
        } else {
            for (const auto& r : sc.rules)
                if (r.chart == cp.chart && point_on_seg(r.seg, cp.p))
                    throw ValidationError("arrange: path endpoint on a seam interior");
            plain[cp].push_back(static_cast<int>(g));
        }
    }

    std::vector<std::vector<int>> rotations; // germ indices per vertex, ccw
    std::vector<ChartPoint> vertex_pos;

    for (auto& [cp, gs] : plain) {
        std::sort(gs.begin(), gs.end(), [&](int a, int b) {
            int c = angle_compare(germs[a].dir, germs[b].dir);
            require(c != 0, "arrange: tangent path germs at a point");
            return c < 0;
        });
        rotations.push_back(gs);
        vertex_pos.push_back(cp);
    }

    for (auto& [root, by_cp] : junction) {
        // rays at each member chart point of this identification class,
        // including germ-free members the walk passes through
        std::map<ChartPoint, std::vector<Ray>> rays;
        std::set<ChartPoint> members;
        for (int id = 0; id < seam_end_count; ++id)
            if (uf.find(id) == root) members.insert(cps[id]);
        for (const auto& cp : members) {
            auto& rv = rays[cp];
            for (const auto& r : sc.rules) {
                if (r.chart != cp.chart) continue;
                int end = -1;
                if (r.seg.a == cp.p) end = 0;
                else if (r.seg.b == cp.p) end = 1;
                else continue;
                Vec2 d = end == 0 ? r.seg.dir() : Vec2{0, 0} - r.seg.dir();
                bool dup = false;
                for (const auto& ray : rv)
                    if (angle_compare(ray.dir, d) == 0) {
                        require(ray.seg.a == r.seg.a && ray.seg.b == r.seg.b,
                                "arrange: overlapping seams at a point");
                        dup = true;
                    }
                if (!dup) rv.push_back({d, r.seg, end});
            }
            require(!rv.empty(), "arrange: seam endpoint without rays");
            std::sort(rv.begin(), rv.end(),
                      [](const Ray& a, const Ray& b) { return angle_compare(a.dir, b.dir) < 0; });
        }
        auto find_rule = [&](int chart, const Seg& seg, int side) -> const SeamRule& {
            for (const auto& r : sc.rules)
                if (r.chart == chart && r.seg.a == seg.a && r.seg.b == seg.b && r.side == side)
                    return r;
            throw ValidationError("arrange: seam is one-sided at an endpoint");
        };
        int assigned = 0, total = 0;
        for (auto& [cp, gs] : by_cp) total += static_cast<int>(gs.size());
        std::set<std::pair<ChartPoint, int>> visited; // (member, ray index)
        for (const auto& start_cp : members) {
            for (size_t start_ray = 0; start_ray < rays[start_cp].size(); ++start_ray) {
                if (visited.count({start_cp, static_cast<int>(start_ray)})) continue;
                std::vector<int> cycle;
                ChartPoint cur = start_cp;
                int ri = static_cast<int>(start_ray);
                int guard = 0;
                do {
                    require(++guard < 100000, "arrange: sector walk does not close");
                    visited.insert({cur, ri});
                    const auto& rv = rays[cur];
                    const Ray& lo = rv[ri];
                    const Ray& hi = rv[(ri + 1) % rv.size()];
                    // germs in the ccw sector (lo.dir, hi.dir) at cur
                    std::vector<int> here;
                    auto it = by_cp.find(cur);
                    if (it != by_cp.end())
                        for (int g : it->second)
                            if (in_ccw_sector(lo.dir, hi.dir, germs[g].dir)) here.push_back(g);
                    std::sort(here.begin(), here.end(), [&](int a, int b) {
                        return in_ccw_sector(lo.dir, germs[b].dir, germs[a].dir);
                    });
                    for (int g : here) cycle.push_back(g);
                    // cross the upper boundary ray of the sector
                    int sigma = hi.end == 0 ? +1 : -1;
                    const SeamRule& r = find_rule(cur.chart, hi.seg, sigma);
                    int end2 = r.flip ? 1 - hi.end : hi.end;
                    ChartPoint nxt{r.to_chart, end2 == 0 ? r.to_seg.a : r.to_seg.b};
                    Vec2 nd = end2 == 0 ? r.to_seg.dir() : Vec2{0, 0} - r.to_seg.dir();
                    require(rays.count(nxt), "arrange: seam rule leaves the junction class");
                    const auto& nrv = rays.at(nxt);
                    int nri = -1;
                    for (size_t x = 0; x < nrv.size(); ++x)
                        if (angle_compare(nrv[x].dir, nd) == 0) nri = static_cast<int>(x);
                    require(nri >= 0, "arrange: partner seam ray missing");
                    cur = nxt;
                    ri = nri;
                } while (!(cur == start_cp && ri == static_cast<int>(start_ray)));
                if (!cycle.empty()) {
                    assigned += static_cast<int>(cycle.size());
                    vertex_pos.push_back(germs[cycle.front()].cp);
                    rotations.push_back(std::move(cycle));
                }
            }
        }
        require(assigned == total, "arrange: germ direction coincides with a seam ray");
    }

    // --- assemble the map
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(E);
    for (int e = 0; e < E; ++e) pairs.push_back({2 * e, 2 * e + 1});
    std::vector<std::vector<int>> rot_darts;
    std::vector<int> dart_vertex(2 * E, -1);
    for (size_t v = 0; v < rotations.size(); ++v) {
        std::vector<int> cyc;
        for (int g : rotations[v]) {
            cyc.push_back(germs[g].dart);
            dart_vertex[germs[g].dart] = static_cast<int>(v);
        }
        rot_darts.push_back(std::move(cyc));
    }
    Arrangement out;
    out.map = build_map(2 * E, pairs, rot_darts);
    // reindex positions by the map's own vertex numbering
    out.vertex_pos.resize(static_cast<size_t>(out.map.vertex_count()));
    for (int d = 0; d < 2 * E; ++d)
        out.vertex_pos[static_cast<size_t>(out.map.vertex_of(d))] =
            vertex_pos[static_cast<size_t>(dart_vertex[d])];
    out.edge_geom = std::move(edge_geom);
    out.edge_path = std::move(edge_path);
    out.path_darts = std::move(path_darts);
    out.path_start_vertex.assign(paths.size(), -1);
    out.path_end_vertex.assign(paths.size(), -1);
    for (size_t p = 0; p < paths.size(); ++p) {
        if (start_germ[p] >= 0) out.path_start_vertex[p] = out.map.vertex_of(start_germ[p]);
        if (end_germ[p] >= 0) out.path_end_vertex[p] = out.map.vertex_of(end_germ[p]);
    }
    return out;
}

} // namespace bridgetri
