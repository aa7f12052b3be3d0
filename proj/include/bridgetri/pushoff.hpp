#pragma once

#include "moves.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace bridgetri {

/// The designated surgery site does not have the local shape the push-off
/// templates require.
struct BadSiteError : Error {
    using Error::Error;
};

/// resolve_pushoffs needs self-intersection to trade against; e = 0 inputs
/// belong to singular_pushoff.
struct ZeroSelfIntersectionError : Error {
    using Error::Error;
};

/// No admissible destabilization sequence over the grid region was found.
struct GridNotFoundError : Error {
    using Error::Error;
};

/// Surgery site for push-offs: `bridge` names a map vertex on the boundary
/// circle of the chosen disk of the first disk system, and `e` is the
/// self-intersection number of the surface being pushed off.
struct DiskSite {
    int bridge = -1;
    int e = 0;
};

/// Dimensions of the local torus-link pattern inserted when push-offs are
/// resolved: m strands winding me times around the site circle.
struct GridTemplate {
    int m = 0;
    int me = 0;
};

/// A push-off left singular: the parallel copies form an honest shadow
/// diagram, and the intersections between copies over the site are kept as
/// cone data (a torus link collapsed to a point) instead of being drawn.
struct SingularPushoff {
    ShadowDiagram cables;
    DiskSite site;
    int m = 1;
    int double_points = 0;
    GridTemplate torus_link;
    bool smooth() const { return double_points == 0; }
};

namespace pushdetail {

/// One visit of an output strand under assembly.  `a`/`d` are the germ
/// slots at the node receiving the stream-arrival and stream-departure
/// ends (-1 at an endpoint of an open strand).
struct OutVisit {
    int node = -1;
    int a = -1;
    int d = -1;
};

/// Output strand buffer.  Visits accumulate in "stream" order -- the order
/// construction walks the base diagram -- which for some strand families
/// runs against the strand's own orientation (rev).
struct OutStrand {
    Color color;
    bool closed = false;
    bool oriented = true;
    bool rev = false;
    bool has_end = false;
    OutVisit end;
    std::vector<OutVisit> vis;
};

/// One parallel strand of a bundle passing through a replicated crossing.
struct Member {
    int strand = -1;
    bool along = true; // oriented with the bundle's reference strand
    bool rev = false;  // stream order runs against its own orientation
};

/// A base crossing expanded into a full grid of crossings between the two
/// bundles that replaced the two transversal passes.
struct Block {
    std::vector<std::vector<int>> node; // [pos in bundle 1][pos in bundle 2]
    int s1 = -1, v1 = -1, s2 = -1, v2 = -1;
    int in1 = -1, out1 = -1, in2 = -1, out2 = -1; // germ slot positions
    bool two_from_right = false; // pass 2 enters from pass 1's right
};

// Orientation conventions for the copy machinery, gathered in one place so
// they can be audited (and, while developing, toggled) together.
struct Conventions {
    bool chart_mirror = false;
    bool chart_h = false;
    bool chart_s = false;
    bool endb_asc = false;
    bool endb_seqrev = false;
    bool ribbon_asc = false;
    bool stack_rev = false;
    bool block_left = false;
};

inline Conventions& conv() {
    static Conventions c;
    return c;
};

/// A component of the union of the two seam arc colors, walked once.
struct Circle {
    std::vector<int> bridges; // vertices, strictly alternating source/sink
    std::vector<int> arcs;    // arcs[i] joins bridges[i] to bridges[i+1]
    std::vector<bool> fwd;    // arcs[i] oriented with the walk
    bool site = false;
    bool a_left = false; // row zero lies left of the walk direction
    int rows = 0;
};

class Builder {
  public:
    Builder(const ShadowDiagram& d, int mm, int me_, bool resolved_, int site_vertex_)
        : base(d),
          bw(weave_from_diagram(d)),
          m(mm),
          me(me_),
          resolved(resolved_),
          site_vertex(site_vertex_) {}

    ShadowDiagram run() {
        classify();
        trace_circles();
        make_nodes();
        make_strands();
        make_bundles();
        for (size_t ci = 0; ci < circles.size(); ++ci) {
            int L = static_cast<int>(circles[ci].arcs.size());
            for (int i = 0; i < L; ++i)
                if (!(circles[ci].site && i == 0)) process_span(static_cast<int>(ci), i);
            if (circles[ci].site) process_span(static_cast<int>(ci), 0);
        }
        for (const auto& [s, mem] : bundle_by_strand)
            if (walk_later.count(s)) walk_strand(s);
        if (resolved && site_circle >= 0) gamma1_entries();
        return finish();
    }

    // development aid: provenance tag per created node, printable germ table
    std::vector<std::string> tags;
    void dump() const {
        for (size_t n = 0; n < out.node_germs.size(); ++n) {
            std::fprintf(stderr, "node %zu sigma=%+d [%s]:", n, out.node_sigma[n],
                         tags[n].c_str());
            for (const auto& g : out.node_germs[n])
                std::fprintf(stderr, " (s%d v%d %s)", g.s, g.v, g.out ? "out" : "in");
            std::fprintf(stderr, "\n");
        }
        for (size_t s = 0; s < outs.size(); ++s) {
            const auto& os = outs[s];
            std::fprintf(stderr, "s%zu kind=%d idx=%d closed=%d rev=%d vis:", s,
                         static_cast<int>(os.color.kind), os.color.index,
                         static_cast<int>(os.closed), static_cast<int>(os.rev));
            for (const auto& v : os.vis) std::fprintf(stderr, " %d(a%d d%d)", v.node, v.a, v.d);
            if (os.has_end)
                std::fprintf(stderr, " end %d(a%d d%d)", os.end.node, os.end.a, os.end.d);
            std::fprintf(stderr, "\n");
        }
    }

  private:
    const ShadowDiagram& base;
    Weave bw;
    int m;
    int me; // rows carried around the site circle (m on every other circle)
    bool resolved;
    int site_vertex;

    Weave out;
    std::vector<OutStrand> outs;
    std::map<int, Block> blocks; // base node -> expansion
    std::map<int, std::vector<Member>> bundle_by_strand;
    std::set<int> walk_later; // strands whose own pass is appended by a walk

    std::vector<Circle> circles;
    int site_circle = -1;
    int gamma1 = -1, r1_arc = -1, p1 = -1, q1 = -1;

    // per-bridge incidences in the base
    std::map<int, std::vector<int>> seam_at; // bridge -> seam arc strands
    std::map<int, int> band_at;              // bridge -> band arc strand

    std::vector<int> band_arcs, solo_strands, closed_seams;

    // built strands, site circle only
    std::vector<std::vector<int>> P, Q;                // node grids [u][rho]
    int pr = -1, pb = -1, pg = -1;                     // germ slots at P nodes
    int qr = -1, qb = -1, qg = -1;                     // germ slots at Q nodes
    std::vector<int> red0, grib, gg_, clo_;            // red0/grib by row/col
    std::vector<std::vector<int>> redG, blueG, greenG; // [u][rho]

    std::map<std::pair<int, int>, std::vector<int>> cab; // (circle,span) -> row strands
    std::map<int, std::vector<int>> copies;              // bridge -> copy nodes by row
    std::map<int, std::vector<int>> ribbon_rows;         // band arc -> strand per row
    std::map<int, std::vector<OutVisit>> entry_buf;      // strand -> buffered entry visits

    static constexpr const char* kBad = "push-off: ";

    // ---- base incidence helpers -------------------------------------------

    int tail_of(int s) const { return bw.strands[s].visits.front(); }
    int head_of(int s) const { return bw.strands[s].visits.back(); }

    Weave::Germ end_germ(int s, bool at_tail) const {
        return at_tail ? bw.tail_germ(s) : bw.head_germ(s);
    }

    int germ_slot(int node, const Weave::Germ& g) const {
        const auto& gs = bw.node_germs[node];
        for (size_t i = 0; i < gs.size(); ++i)
            if (gs[i] == g) return static_cast<int>(i);
        throw BadSiteError(std::string(kBad) + "bridge germ not found");
    }

    void classify() {
        for (size_t s = 0; s < bw.strands.size(); ++s) {
            const auto& st = bw.strands[s];
            int id = static_cast<int>(s);
            if (st.color.kind == Color::Arc && !st.closed &&
                (st.color.index == 1 || st.color.index == 2)) {
                seam_at[tail_of(id)].push_back(id);
                seam_at[head_of(id)].push_back(id);
            } else if (st.color.kind == Color::Arc && !st.closed && st.color.index == 3) {
                band_arcs.push_back(id);
                if (band_at.count(tail_of(id)) || band_at.count(head_of(id)))
                    throw BadSiteError(std::string(kBad) + "two bands meet one bridge");
                band_at[tail_of(id)] = id;
                band_at[head_of(id)] = id;
            } else if (st.color.kind == Color::Arc && st.closed) {
                closed_seams.push_back(id);
            } else if (st.closed) {
                solo_strands.push_back(id);
            } else {
                throw BadSiteError(std::string(kBad) + "unsupported open strand");
            }
        }
        for (const auto& bp : base.bridge_points) {
            if (bp.sigma == 0)
                throw BadSiteError(std::string(kBad) + "bridges must be coherently oriented");
            auto it = seam_at.find(bp.vertex);
            if (it == seam_at.end() || it->second.size() != 2 || !band_at.count(bp.vertex))
                throw BadSiteError(std::string(kBad) + "bridge is not a seam/band junction");
        }
    }

    // Walk the seam circle through a bridge, alternating the two arc colors.
    Circle trace_from(int b0, int first_arc) {
        Circle c;
        int bp = b0, arc = first_arc;
        do {
            c.bridges.push_back(bp);
            c.arcs.push_back(arc);
            bool f = (tail_of(arc) == bp);
            if (f && bw.node_sigma[bp] <= 0)
                throw BadSiteError(std::string(kBad) + "arc tail at a sink bridge");
            if (!f && bw.node_sigma[bp] >= 0)
                throw BadSiteError(std::string(kBad) + "arc head at a source bridge");
            c.fwd.push_back(f);
            bp = f ? head_of(arc) : tail_of(arc);
            const auto& pairr = seam_at.at(bp);
            arc = (pairr[0] == arc && !(pairr[0] == pairr[1])) ? pairr[1]
                                                               : (pairr[1] == arc ? pairr[0] : -1);
            if (arc < 0) throw BadSiteError(std::string(kBad) + "seam walk broke");
        } while (bp != b0);
        return c;
    }

    // True when the band germ at circle position i lies left of the walk.
    bool band_left(const Circle& c, int i) const {
        int L = static_cast<int>(c.arcs.size());
        int node = c.bridges[static_cast<size_t>(i)];
        auto go = end_germ(c.arcs[static_cast<size_t>(i)], c.fwd[static_cast<size_t>(i)]);
        int ip = (i + L - 1) % L;
        auto gi = end_germ(c.arcs[static_cast<size_t>(ip)], !c.fwd[static_cast<size_t>(ip)]);
        const auto& gs = bw.node_germs[node];
        if (gs.size() != 3) throw BadSiteError(std::string(kBad) + "bridge is not trivalent");
        int po = germ_slot(node, go);
        return !(gs[static_cast<size_t>((po + 1) % 3)] == gi);
    }

    void trace_circles() {
        std::set<int> seen;
        if (resolved) {
            // locate the local picture: band joining two bridges that are
            // also joined directly by a seam arc
            auto bit = band_at.find(site_vertex);
            if (bit == band_at.end())
                throw BadSiteError(std::string(kBad) + "no band at the designated bridge");
            gamma1 = bit->second;
            p1 = tail_of(gamma1);
            q1 = head_of(gamma1);
            for (int a : seam_at.at(p1))
                if (tail_of(a) == p1 && head_of(a) == q1) r1_arc = a;
            if (r1_arc < 0)
                throw BadSiteError(std::string(kBad) +
                                   "the band at the site does not join adjacent bridges");
            Circle c = trace_from(p1, r1_arc);
            c.site = true;
            c.rows = me;
            c.a_left = band_left(c, 0);
            for (int b : c.bridges) seen.insert(b);
            if (seen.size() != base.bridge_points.size())
                throw BadSiteError(std::string(kBad) + "site circle must carry every bridge");
            site_circle = static_cast<int>(circles.size());
            circles.push_back(std::move(c));
        } else {
            for (const auto& bp : base.bridge_points) {
                if (seen.count(bp.vertex) || bw.node_sigma[bp.vertex] < 0) continue;
                Circle c = trace_from(bp.vertex, seam_at.at(bp.vertex)[0]);
                c.rows = m;
                c.a_left = band_left(c, 0);
                for (int b : c.bridges) seen.insert(b);
                circles.push_back(std::move(c));
            }
        }
    }

    bool clustered(const Circle& c, int bridge) const {
        return !(resolved && c.site && (bridge == p1 || bridge == q1));
    }

    // ---- output scaffolding -----------------------------------------------

    int nd(int slots, int sigma, std::string tag = {}) {
        tags.push_back(std::move(tag));
        return out.new_node(std::vector<Weave::Germ>(static_cast<size_t>(slots)), sigma);
    }

    int new_out(Color col, bool rev, OutVisit start, OutVisit end) {
        OutStrand os;
        os.color = col;
        os.rev = rev;
        os.vis.push_back(start);
        os.end = end;
        os.has_end = true;
        outs.push_back(std::move(os));
        return static_cast<int>(outs.size()) - 1;
    }

    int new_closed(Color col, bool oriented) {
        OutStrand os;
        os.color = col;
        os.closed = true;
        os.oriented = oriented;
        outs.push_back(std::move(os));
        return static_cast<int>(outs.size()) - 1;
    }

    // Template node rotations, written for row zero on the right of the
    // walk and mirrored otherwise.
    int tpl_node(bool is_p, bool a_left) {
        int n = nd(3, is_p ? 1 : -1, std::string(is_p ? "P" : "Q"));
        if (is_p) {
            pr = a_left ? 2 : 0;
            pb = 1;
            pg = a_left ? 0 : 2;
        } else {
            qb = a_left ? 2 : 0;
            qg = 1;
            qr = a_left ? 0 : 2;
        }
        return n;
    }

    void make_nodes() {
        for (auto& c : circles) {
            if (c.site) {
                P.assign(static_cast<size_t>(m), {});
                Q.assign(static_cast<size_t>(m + 1), {});
                for (int u = 0; u < m; ++u)
                    for (int r = 0; r < me; ++r)
                        P[static_cast<size_t>(u)].push_back(tpl_node(true, c.a_left));
                for (int u = 1; u <= m; ++u)
                    for (int r = 0; r < me; ++r)
                        Q[static_cast<size_t>(u)].push_back(tpl_node(false, c.a_left));
            }
            for (size_t i = 0; i < c.bridges.size(); ++i) {
                int b = c.bridges[i];
                if (!clustered(c, b)) continue;
                auto& v = copies[b];
                for (int k = 0; k < m; ++k)
                    v.push_back(nd(3, bw.node_sigma[b], "copy b" + std::to_string(b) + " k" + std::to_string(k)));
            }
        }
    }

    // Germ slot a copied bridge uses for the end of base strand s at bridge b.
    int copy_slot(int b, int s, bool at_tail) const {
        return germ_slot(b, end_germ(s, at_tail));
    }

    // Node and slot where the row-r copy of the circle meets bridge position i.
    std::pair<int, int> row_end(const Circle& c, int i, int row, int arc, bool arc_tail_here) {
        int b = c.bridges[static_cast<size_t>(i)];
        if (clustered(c, b)) return {copies.at(b)[static_cast<size_t>(row)], copy_slot(b, arc, arc_tail_here)};
        if (b == p1) return {P[0][static_cast<size_t>(row)], pb};
        return {Q[static_cast<size_t>(m)][static_cast<size_t>(row)], qb};
    }

    void make_strands() {
        for (size_t ci = 0; ci < circles.size(); ++ci) {
            Circle& c = circles[ci];
            int L = static_cast<int>(c.arcs.size());
            if (c.site) {
                Color cr = bw.strands[static_cast<size_t>(c.arcs[0])].color;
                Color cu = bw.strands[static_cast<size_t>(c.arcs[1])].color;
                Color cg = bw.strands[static_cast<size_t>(gamma1)].color;
                red0.clear();
                grib.clear();
                gg_.clear();
                clo_.clear();
                redG.assign(static_cast<size_t>(m), {});
                blueG.assign(static_cast<size_t>(m), {});
                greenG.assign(static_cast<size_t>(m), {});
                for (int r = 0; r < me; ++r)
                    red0.push_back(new_out(cr, false, {P[0][static_cast<size_t>(r)], -1, pr},
                                           {Q[1][static_cast<size_t>(r)], qr, -1}));
                for (int u = 1; u < m; ++u)
                    for (int r = 0; r < me; ++r) {
                        redG[static_cast<size_t>(u)].push_back(
                            new_out(cr, false, {P[static_cast<size_t>(u)][static_cast<size_t>(r)], -1, pr},
                                    {Q[static_cast<size_t>(u + 1)][static_cast<size_t>(r)], qr, -1}));
                        blueG[static_cast<size_t>(u)].push_back(
                            new_out(cu, false, {P[static_cast<size_t>(u)][static_cast<size_t>(r)], -1, pb},
                                    {Q[static_cast<size_t>(u)][static_cast<size_t>(r)], qb, -1}));
                        if (r >= 1)
                            greenG[static_cast<size_t>(u)].push_back(
                                new_out(cg, false, {P[static_cast<size_t>(u)][static_cast<size_t>(r)], -1, pg},
                                        {Q[static_cast<size_t>(u)][static_cast<size_t>(r - 1)], qg, -1}));
                    }
                for (int u = 0; u < m; ++u) {
                    int hq = (u == 0) ? Q[static_cast<size_t>(m)][static_cast<size_t>(me - 1)]
                                      : Q[static_cast<size_t>(u)][static_cast<size_t>(me - 1)];
                    grib.push_back(new_out(cg, false, {P[static_cast<size_t>(u)][0], -1, pg}, {hq, qg, -1}));
                }
                ribbon_rows[gamma1] = grib;
                for (int r = 1; r < me; ++r)
                    gg_.push_back(new_out(cg, true,
                                          {Q[static_cast<size_t>(m)][static_cast<size_t>(r - 1)], -1, qg},
                                          {P[0][static_cast<size_t>(r)], pg, -1}));
                for (int r = m; r < me; ++r)
                    clo_.push_back(new_out(cu, true,
                                           {Q[static_cast<size_t>(m)][static_cast<size_t>(r)], -1, qb},
                                           {P[0][static_cast<size_t>(r)], pb, -1}));
            }
            int first = c.site ? 1 : 0;
            for (int i = first; i < L; ++i) {
                int a = c.arcs[static_cast<size_t>(i)];
                bool f = c.fwd[static_cast<size_t>(i)];
                Color col = bw.strands[static_cast<size_t>(a)].color;
                auto& v = cab[{static_cast<int>(ci), i}];
                for (int row = 0; row < m; ++row) {
                    auto [n0, s0] = row_end(c, i, row, a, f);
                    auto [n1, s1] = row_end(c, (i + 1) % L, row, a, !f);
                    v.push_back(new_out(col, !f, {n0, -1, s0}, {n1, s1, -1}));
                }
            }
        }
        // band ribbons between clustered bridges
        for (int g : band_arcs) {
            if (g == gamma1 && resolved) continue;
            int tb = tail_of(g), hb = head_of(g);
            Color col = bw.strands[static_cast<size_t>(g)].color;
            auto& v = ribbon_rows[g];
            for (int row = 0; row < m; ++row) {
                int n0 = copies.at(tb)[static_cast<size_t>(row)];
                int n1 = copies.at(hb)[static_cast<size_t>(row)];
                v.push_back(new_out(col, false, {n0, -1, copy_slot(tb, g, true)},
                                    {n1, copy_slot(hb, g, false), -1}));
            }
        }
        // m parallel copies of bridgeless closed seams and bands
        for (int s : closed_seams) {
            auto& v = ribbon_rows[s];
            for (int k = 0; k < m; ++k)
                v.push_back(new_closed(bw.strands[static_cast<size_t>(s)].color,
                                       bw.strands[static_cast<size_t>(s)].oriented));
        }
        // cut curves and auxiliary shadows pass through unreplicated
        for (int s : solo_strands)
            ribbon_rows[s] = {new_closed(bw.strands[static_cast<size_t>(s)].color,
                                         bw.strands[static_cast<size_t>(s)].oriented)};
    }

    // Row strand carried through span i of circle ci at radial level `row`.
    int row_strand(int ci, int i, int row) const {
        const Circle& c = circles[static_cast<size_t>(ci)];
        if (c.site && i == 0) return red0[static_cast<size_t>(row)];
        if (c.site && row >= m) return clo_[static_cast<size_t>(row - m)];
        return cab.at({ci, i})[static_cast<size_t>(row)];
    }

    void make_bundles() {
        for (size_t ci = 0; ci < circles.size(); ++ci) {
            const Circle& c = circles[ci];
            for (size_t i = 0; i < c.arcs.size(); ++i) {
                bool f = c.fwd[i];
                std::vector<Member> afirst;
                if (c.site && i == 0) {
                    for (int r = 0; r < me; ++r)
                        afirst.push_back({red0[static_cast<size_t>(r)], true, false});
                } else {
                    for (int r = 0; r < c.rows; ++r) {
                        if (c.site && r >= 1 && r <= me - 1)
                            afirst.push_back({gg_[static_cast<size_t>(r - 1)], !f, true});
                        bool is_cab = !(c.site && r >= m);
                        afirst.push_back({row_strand(static_cast<int>(ci), static_cast<int>(i), r),
                                          is_cab, is_cab ? !f : true});
                        if (c.site && !is_cab) afirst.back().along = !f;
                    }
                }
                // left-to-right relative to the arc's own orientation: row
                // zero sits walk-left exactly when a_left, and walk and arc
                // agree exactly when fwd
                if ((c.a_left != f) != conv().stack_rev)
                    std::reverse(afirst.begin(), afirst.end());
                bundle_by_strand[c.arcs[i]] = std::move(afirst);
            }
        }
        for (const auto& [g, rows] : ribbon_rows) {
            std::vector<Member> ltr;
            bool asc = true;
            if (bw.strands[static_cast<size_t>(g)].color.index == 3 &&
                !bw.strands[static_cast<size_t>(g)].closed) {
                // left-to-right order fixed where the ribbon leaves its tail
                int tb = tail_of(g);
                asc = circle_of(tb).a_left != conv().ribbon_asc;
            }
            if (asc)
                for (int s : rows) ltr.push_back({s, true, false});
            else
                for (auto it = rows.rbegin(); it != rows.rend(); ++it) ltr.push_back({*it, true, false});
            bundle_by_strand[g] = std::move(ltr);
            walk_later.insert(g);
        }
    }

    const Circle& circle_of(int bridge) const {
        for (const auto& c : circles)
            for (int b : c.bridges)
                if (b == bridge) return c;
        throw BadSiteError(std::string(kBad) + "bridge on no seam circle");
    }

    // ---- crossing machinery -----------------------------------------------

    Block& get_block(int n, int s, int v) {
        auto it = blocks.find(n);
        if (it != blocks.end()) return it->second;
        const auto& gs = bw.node_germs[n];
        require(gs.size() == 4, "push-off: crossing is not four-valent");
        Block b;
        b.s1 = s;
        b.v1 = v;
        for (size_t k = 0; k < 4; ++k) {
            if (gs[k] == Weave::Germ{s, v, false}) b.in1 = static_cast<int>(k);
            if (gs[k] == Weave::Germ{s, v, true}) b.out1 = static_cast<int>(k);
        }
        require(b.in1 >= 0 && b.out1 >= 0, "push-off: pass germs missing");
        require(b.out1 == (b.in1 + 2) % 4, "push-off: crossing is not transversal");
        for (size_t k = 0; k < 4; ++k) {
            if (static_cast<int>(k) == b.in1 || static_cast<int>(k) == b.out1) continue;
            if (!gs[k].out) {
                b.in2 = static_cast<int>(k);
                b.s2 = gs[k].s;
                b.v2 = gs[k].v;
            } else {
                b.out2 = static_cast<int>(k);
            }
        }
        require(b.in2 >= 0 && b.out2 >= 0, "push-off: second pass germs missing");
        b.two_from_right = (b.in2 == (b.in1 + 1) % 4);
        size_t n1 = bundle_by_strand.at(b.s1).size();
        size_t n2 = bundle_by_strand.at(b.s2).size();
        b.node.assign(n1, std::vector<int>(n2, -1));
        for (auto& rowv : b.node)
            for (auto& x : rowv) x = nd(4, 0, "blk n" + std::to_string(n));
        return blocks.emplace(n, std::move(b)).first->second;
    }

    void append_pass(int n, int s, int v) {
        Block& b = get_block(n, s, v);
        bool first = (b.s1 == s && b.v1 == v);
        require(first || (b.s2 == s && b.v2 == v), "push-off: stray pass");
        const auto& U = bundle_by_strand.at(first ? b.s1 : b.s2);
        const auto& V = bundle_by_strand.at(first ? b.s2 : b.s1);
        int uin = first ? b.in1 : b.in2, uout = first ? b.out1 : b.out2;
        bool base_left = first ? b.two_from_right : !b.two_from_right;
        for (size_t i = 0; i < U.size(); ++i) {
            const Member& mem = U[i];
            int oin = mem.along ? uin : uout, oout = mem.along ? uout : uin;
            int a = mem.rev ? oout : oin, d = mem.rev ? oin : oout;
            bool left = base_left ^ (!mem.along) ^ conv().block_left;
            std::vector<size_t> seq(V.size());
            for (size_t j = 0; j < V.size(); ++j) seq[j] = j;
            if (!left) std::reverse(seq.begin(), seq.end());
            if (mem.rev) std::reverse(seq.begin(), seq.end());
            for (size_t j : seq) {
                int node = first ? b.node[i][j] : b.node[j][i];
                outs[static_cast<size_t>(mem.strand)].vis.push_back({node, a, d});
            }
        }
    }

    // One radial hop of a band copy across a carried row or gap strand.
    // Chart rotations assume row zero right of the walk; mirrored otherwise.
    void radial_cross(int hstrand, int bstrand, bool toward_a, bool a_left, bool buffer) {
        int n = nd(4, 0, "rad h" + std::to_string(hstrand) + " b" + std::to_string(bstrand));
        bool mir = a_left != conv().chart_mirror;
        auto slot = [&](int k) { return mir ? 3 - k : k; };
        int hdep = slot(conv().chart_h ? 2 : 0), harr = slot(conv().chart_h ? 0 : 2);
        bool ta = toward_a != conv().chart_s;
        int sin = ta ? slot(1) : slot(3);
        int sout = ta ? slot(3) : slot(1);
        outs[static_cast<size_t>(hstrand)].vis.push_back({n, harr, hdep});
        OutVisit gv{n, sin, sout};
        if (buffer)
            entry_buf[bstrand].push_back(gv);
        else
            outs[static_cast<size_t>(bstrand)].vis.push_back(gv);
    }

    // Crossings made where a band end leaves (or enters) its cluster row.
    void end_blocks(int ci, int i, int g, bool is_exit) {
        const Circle& c = circles[static_cast<size_t>(ci)];
        int L = static_cast<int>(c.arcs.size());
        int pos = is_exit ? i : (i + 1) % L;
        bool side_a = (band_left(c, pos) == c.a_left);
        bool toward_a = is_exit ? side_a : !side_a;
        bool asc_rows = (side_a == is_exit) != conv().endb_asc;
        const auto& rows = ribbon_rows.at(g);
        for (int kk = 0; kk < m; ++kk) {
            int row = asc_rows ? kk : m - 1 - kk;
            int rs = rows[static_cast<size_t>(row)];
            std::vector<int> seq; // strands crossed, nearest first
            if (side_a) {
                for (int x = row - 1; x >= 0; --x) {
                    if (c.site) seq.push_back(gg_[static_cast<size_t>(x)]);
                    seq.push_back(row_strand(ci, i, x));
                }
            } else {
                for (int x = row + 1; x < c.rows; ++x) {
                    if (c.site) seq.push_back(gg_[static_cast<size_t>(x - 1)]);
                    seq.push_back(row_strand(ci, i, x));
                }
            }
            if ((!is_exit) != conv().endb_seqrev) std::reverse(seq.begin(), seq.end());
            for (int h : seq) radial_cross(h, rs, toward_a, c.a_left, !is_exit);
        }
    }

    void process_span(int ci, int i) {
        const Circle& c = circles[static_cast<size_t>(ci)];
        int L = static_cast<int>(c.arcs.size());
        int btail = c.bridges[static_cast<size_t>(i)];
        int bhead = c.bridges[static_cast<size_t>((i + 1) % L)];
        if (bw.node_sigma[btail] > 0 && clustered(c, btail) && band_at.count(btail) &&
            tail_of(band_at.at(btail)) == btail)
            end_blocks(ci, i, band_at.at(btail), true);
        int a = c.arcs[static_cast<size_t>(i)];
        const auto& visq = bw.strands[static_cast<size_t>(a)].visits;
        int last = static_cast<int>(visq.size()) - 1;
        if (c.fwd[static_cast<size_t>(i)]) {
            for (int v = 1; v < last; ++v) append_pass(visq[static_cast<size_t>(v)], a, v);
        } else {
            for (int v = last - 1; v >= 1; --v) append_pass(visq[static_cast<size_t>(v)], a, v);
        }
        if (bw.node_sigma[bhead] < 0 && clustered(c, bhead) && band_at.count(bhead) &&
            head_of(band_at.at(bhead)) == bhead)
            end_blocks(ci, i, band_at.at(bhead), false);
    }

    void walk_strand(int s) {
        const auto& st = bw.strands[static_cast<size_t>(s)];
        if (st.closed) {
            for (size_t v = 0; v < st.visits.size(); ++v)
                append_pass(st.visits[v], s, static_cast<int>(v));
        } else {
            for (size_t v = 1; v + 1 < st.visits.size(); ++v)
                append_pass(st.visits[v], s, static_cast<int>(v));
        }
        for (int rs : ribbon_rows.at(s)) {
            auto it = entry_buf.find(rs);
            if (it == entry_buf.end()) continue;
            auto& ov = outs[static_cast<size_t>(rs)].vis;
            ov.insert(ov.end(), it->second.begin(), it->second.end());
        }
    }

    // When the far band end sits on the same side as row zero, its strands
    // climb through the grid columns to reach the top row.
    void gamma1_entries() {
        const Circle& c = circles[static_cast<size_t>(site_circle)];
        int qpos = 1;
        bool side_a = (band_left(c, qpos) == c.a_left);
        if (!side_a) return;
        for (int u = 0; u < m; ++u) {
            const std::vector<int>& col =
                (u == 0) ? redG[static_cast<size_t>(m - 1)] : (u == 1 ? red0 : redG[static_cast<size_t>(u - 1)]);
            for (int r = 0; r + 1 < me; ++r)
                radial_cross(col[static_cast<size_t>(r)], grib[static_cast<size_t>(u)], false,
                             c.a_left, false);
        }
    }

    ShadowDiagram finish() {
        out.full_shadows = base.full_shadows;
        for (size_t s = 0; s < outs.size(); ++s) {
            OutStrand& os = outs[s];
            if (os.has_end) os.vis.push_back(os.end);
            if (os.rev) std::reverse(os.vis.begin(), os.vis.end());
            Weave::WStrand ws;
            ws.color = os.color;
            ws.closed = os.closed;
            ws.oriented = os.oriented;
            for (size_t v = 0; v < os.vis.size(); ++v) {
                const OutVisit& vv = os.vis[v];
                ws.visits.push_back(vv.node);
                int slot_in = os.rev ? vv.d : vv.a;
                int slot_out = os.rev ? vv.a : vv.d;
                if (slot_in >= 0)
                    out.node_germs[static_cast<size_t>(vv.node)][static_cast<size_t>(slot_in)] =
                        {static_cast<int>(s), static_cast<int>(v), false};
                if (slot_out >= 0)
                    out.node_germs[static_cast<size_t>(vv.node)][static_cast<size_t>(slot_out)] =
                        {static_cast<int>(s), static_cast<int>(v), true};
            }
            out.strands.push_back(std::move(ws));
        }
        for (const auto& gs : out.node_germs)
            for (const auto& g : gs)
                require(g.s >= 0, "push-off: unattached germ slot");
        return weave_to_diagram(out);
    }
};

} // namespace pushdetail

/// m disjoint parallel copies of the whole diagram (cut systems untouched):
/// each seam circle is replicated into m nested rows, bridges become nested
/// clusters, and bands reach their rows through plain crossing fans.
inline ShadowDiagram parallel_copies(const ShadowDiagram& d, int m) {
    require(m >= 1, "parallel_copies: m must be positive");
    if (m == 1) return d;
    pushdetail::Builder b(d, m, m, false, -1);
    return b.run();
}

namespace pushdetail {

inline void check_site(const ShadowDiagram& d, const DiskSite& site) {
    Weave w = weave_from_diagram(d);
    if (site.bridge < 0 || site.bridge >= static_cast<int>(w.node_sigma.size()) ||
        w.node_sigma[static_cast<size_t>(site.bridge)] == 0)
        throw BadSiteError("push-off: designated vertex is not a bridge");
    int band = -1;
    for (size_t s = 0; s < w.strands.size(); ++s) {
        const auto& st = w.strands[s];
        if (st.color == Color::arc(3) && !st.closed &&
            (st.visits.front() == site.bridge || st.visits.back() == site.bridge))
            band = static_cast<int>(s);
    }
    if (band < 0) throw BadSiteError("push-off: no band at the designated bridge");
    int pp = w.strands[static_cast<size_t>(band)].visits.front();
    int qq = w.strands[static_cast<size_t>(band)].visits.back();
    for (size_t s = 0; s < w.strands.size(); ++s) {
        const auto& st = w.strands[s];
        if (st.color.kind == Color::Arc && !st.closed && st.color.index != 3 &&
            st.visits.front() == pp && st.visits.back() == qq)
            return;
    }
    throw BadSiteError("push-off: the band at the site does not join adjacent bridges");
}

} // namespace pushdetail

/// Push off m parallel copies of the surface, keeping the |e|·m(m-1)/2
/// intersection points over the site as recorded cone data.
inline SingularPushoff singular_pushoff(const ShadowDiagram& d, const DiskSite& site, int m) {
    require(m >= 1, "singular_pushoff: m must be positive");
    pushdetail::check_site(d, site);
    SingularPushoff sp;
    sp.site = site;
    sp.m = m;
    sp.cables = parallel_copies(d, m);
    if (m > 1) {
        sp.double_points = std::abs(site.e) * m * (m - 1) / 2;
        if (sp.double_points > 0) sp.torus_link = {m, m * std::abs(site.e)};
    }
    return sp;
}

/// Push off m copies and resolve every intersection point, drawing the
/// local (m, m|e|)-torus-link grid over the site.  Bridge count becomes
/// m·b + m(m|e|-1); seam component counts become
/// (m·c1 - m + m|e|, m·c2, m·c3).
inline ShadowDiagram resolve_pushoffs(const ShadowDiagram& d, const DiskSite& site, int m) {
    require(m >= 1, "resolve_pushoffs: m must be positive");
    if (site.e == 0)
        throw ZeroSelfIntersectionError(
            "resolve_pushoffs: nothing to resolve at self-intersection zero");
    if (m == 1) return d;
    pushdetail::check_site(d, site);
    pushdetail::Builder b(d, m, m * std::abs(site.e), true, site.bridge);
    return b.run();
}

/// Remove the excess bridges introduced by resolve_pushoffs: searches for
/// m-1 destabilizations in each seam arc color and m|e|-1 in the band
/// color, exactly the counts the grid admits.  Bridge count drops by
/// 2m + m|e| - 3.
inline ShadowDiagram grid_destabilize(const ShadowDiagram& d, int m, int e) {
    require(m >= 1 && e != 0, "grid_destabilize: need m >= 1 and e != 0");
    if (m == 1) return d;
    int me = m * std::abs(e);
    std::array<int, 3> want{{m - 1, m - 1, me - 1}};
    long budget = 200000;
    std::function<bool(const ShadowDiagram&, std::array<int, 3>&, ShadowDiagram&)> dfs =
        [&](const ShadowDiagram& cur, std::array<int, 3>& left, ShadowDiagram& res) -> bool {
        if (left[0] == 0 && left[1] == 0 && left[2] == 0) {
            res = cur;
            return true;
        }
        for (int col = 1; col <= 3; ++col) {
            if (left[static_cast<size_t>(col - 1)] == 0) continue;
            auto arcs = cur.strands_of(Color::arc(col));
            // crossing-free arcs first: those are the grid's own edges
            std::stable_sort(arcs.begin(), arcs.end(), [&](int x, int y) {
                return cur.strands[static_cast<size_t>(x)].darts.size() <
                       cur.strands[static_cast<size_t>(y)].darts.size();
            });
            for (int a : arcs) {
                if (--budget < 0)
                    throw GridNotFoundError("grid_destabilize: search budget exhausted");
                ShadowDiagram next;
                try {
                    next = destabilize_arc(cur, destab_arc_site(cur, a));
                } catch (const SiteInvalidatedError&) {
                    continue;
                }
                --left[static_cast<size_t>(col - 1)];
                if (dfs(next, left, res)) return true;
                ++left[static_cast<size_t>(col - 1)];
            }
        }
        return false;
    };
    ShadowDiagram res;
    if (!dfs(d, want, res))
        throw GridNotFoundError("grid_destabilize: no admissible arc sequence");
    return res;
}

} // namespace bridgetri
