#pragma once

#include "weave.hpp"

#include <map>

namespace bridgetri {

/// A rewrite site no longer matches the diagram it is applied to.
struct SiteInvalidatedError : Error {
    using Error::Error;
};
struct BandObstructedError : Error {
    using Error::Error;
};
struct SignMismatchError : Error {
    using Error::Error;
};
struct WrongEpsilonError : Error {
    using Error::Error;
};

/// A hexagonal face bounded by six bridge arcs, colors alternating
/// i,j,k,i,j,k, whose same-color side pairs lie on distinct components of
/// the corresponding two-color link.  corners[i] joins arcs[i] to
/// arcs[i+1]; corners[5] joins arcs[5] back to arcs[0].
struct HexagonSite {
    int face = -1;
    std::array<int, 6> arcs{};
    std::array<int, 6> corners{};
};

/// A single bridge arc with crossing-free interior whose removal is a
/// destabilization.
struct DestabArcSite {
    int arc = -1;
    int tail_vertex = -1;
    int head_vertex = -1;
};

namespace detail_moves {

inline std::vector<Weave::Germ> rotated_to(const std::vector<Weave::Germ>& gs,
                                           const Weave::Germ& g, const char* what) {
    for (size_t i = 0; i < gs.size(); ++i)
        if (gs[i] == g) {
            std::vector<Weave::Germ> out;
            out.reserve(gs.size());
            for (size_t k = 0; k < gs.size(); ++k) out.push_back(gs[(i + k) % gs.size()]);
            return out;
        }
    throw PreconditionError(std::string(what) + ": germ not present at node");
}

inline bool is_terminal(const Weave& w, const Weave::Germ& g) {
    const auto& st = w.strands[g.s];
    if (st.closed) return false;
    return g.out ? g.v == 0 : g.v + 1 == static_cast<int>(st.visits.size());
}

/// Components of the union of arc strands of the given colors, as a
/// union-find over node ids.
inline detail::UnionFind arc_components(const Weave& w, std::vector<int> cols) {
    detail::UnionFind uf(static_cast<int>(w.node_germs.size()));
    for (const auto& st : w.strands) {
        if (st.dead || st.closed || st.color.kind != Color::Arc) continue;
        bool wanted = false;
        for (int c : cols) wanted = wanted || st.color.index == c;
        if (wanted) uf.unite(st.visits.front(), st.visits.back());
    }
    return uf;
}

/// One of the two parallel strands produced by a destabilization: the
/// chain partA -> corridor -> partB, possibly reversed as a whole so the
/// oriented result runs from its positive bridge point.
struct Splice {
    int sA = -1, sB = -1;   // strand ending at va / at vb
    bool revA = false, revB = false;
    std::vector<int> mids;  // corridor nodes, in va->vb order
    int ns = -1;            // index of the replacement strand
    int lenA = 0, lenB = 0, len = 0;
    bool flip = false;

    Weave::Germ chain_germ(int pos, bool out) const {
        if (flip) return {ns, len - 1 - pos, !out};
        return {ns, pos, out};
    }
    // Relabel a germ of sA; returns false for the end being deleted.
    bool map_a(const Weave::Germ& g, Weave::Germ& out) const {
        int pos = revA ? lenA - 1 - g.v : g.v;
        if (pos == lenA - 1) return false; // the va end
        out = chain_germ(pos, g.out != revA);
        return true;
    }
    bool map_b(const Weave::Germ& g, Weave::Germ& out) const {
        int pos = revB ? lenB - 1 - g.v : g.v;
        if (pos == 0) return false; // the vb end
        out = chain_germ(lenA - 1 + static_cast<int>(mids.size()) + pos - 1, g.out != revB);
        return true;
    }
};

} // namespace detail_moves

/// Remove an open arc strand, cancelling its two endpoint nodes and
/// splicing the four neighbouring strand ends into two strands that run
/// parallel to the removed arc.  Strands crossing the arc's interior are
/// rerouted across both replacements.  Purely structural; the caller is
/// responsible for checking that this is a genuine destabilization.
inline void raw_destabilize(Weave& w, int a) {
    using detail_moves::Splice;
    require(a >= 0 && a < static_cast<int>(w.strands.size()), "destabilize: no such strand");
    require(!w.strands[a].dead && !w.strands[a].closed,
            "destabilize: strand is not a live open arc");
    const std::vector<int> a_visits = w.strands[a].visits;
    const int va = a_visits.front();
    const int vb = a_visits.back();
    require(va != vb, "destabilize: arc endpoints coincide");
    const int k = w.segment_count(a);

    auto rva = detail_moves::rotated_to(w.node_germs[va], w.tail_germ(a), "destabilize");
    auto rvb = detail_moves::rotated_to(w.node_germs[vb], w.head_germ(a), "destabilize");
    require(rva.size() == 3 && rvb.size() == 3,
            "destabilize: endpoint is not a plain bridge point");
    const auto U = rva[1], W = rva[2];   // left / right of travel at va
    const auto Ub = rvb[1], Wb = rvb[2]; // right / left of travel at vb
    for (const auto& g : {U, W, Ub, Wb})
        require(detail_moves::is_terminal(w, g),
                "destabilize: neighbouring strand does not end at the bridge point");
    {
        std::set<int> ends{U.s, W.s, Ub.s, Wb.s};
        require(ends.size() == 4 && !ends.count(a),
                "destabilize: the four neighbouring arcs must be distinct");
    }
    auto col = [&](const Weave::Germ& g) { return w.strands[g.s].color; };

    // Pair the loose ends by color.  If the matching ends sit on the same
    // side of the removed arc the replacements run parallel; otherwise
    // they swap sides across one new crossing next to va.
    Splice s1, s2;
    bool crossed = false;
    if (col(U) == col(Wb) && col(W) == col(Ub)) {
        s1 = {U.s, Wb.s};
        s2 = {W.s, Ub.s};
    } else if (col(U) == col(Ub) && col(W) == col(Wb)) {
        s1 = {U.s, Ub.s};
        s2 = {W.s, Wb.s};
        crossed = true;
    } else {
        throw PreconditionError("destabilize: neighbouring arc colors do not pair up");
    }
    s1.revA = U.out;
    s2.revA = W.out;
    // s?.sB ends at vb; traversal from vb keeps its stored order only when
    // the strand starts there.
    auto rev_b = [&](int s) {
        return !(w.strands[s].visits.front() == vb &&
                 (s == Ub.s ? Ub : Wb) == w.tail_germ(s));
    };
    s1.revB = rev_b(s1.sB);
    s2.revB = rev_b(s2.sB);

    // Corridor nodes: one pair per interior crossing of the removed arc,
    // plus the side-swap crossing when the pairing crosses.
    std::vector<int> xL(static_cast<size_t>(k)), xR(static_cast<size_t>(k));
    for (int i = 1; i < k; ++i) {
        xL[static_cast<size_t>(i)] = w.new_node({});
        xR[static_cast<size_t>(i)] = w.new_node({});
    }
    int X = -1;
    if (crossed) {
        X = w.new_node({});
        s1.mids.push_back(X); // s1 swaps to the right-hand lane
        s2.mids.push_back(X);
    }
    for (int i = 1; i < k; ++i) {
        (crossed ? s1 : s2).mids.push_back(xR[static_cast<size_t>(i)]);
        (crossed ? s2 : s1).mids.push_back(xL[static_cast<size_t>(i)]);
    }
    // (splice, corridor position) carried by each left/right lane node
    std::map<int, std::vector<std::pair<const Splice*, int>>> lane;

    auto assemble = [&](Splice& sp) {
        sp.ns = static_cast<int>(w.strands.size());
        sp.lenA = static_cast<int>(w.strands[sp.sA].visits.size());
        sp.lenB = static_cast<int>(w.strands[sp.sB].visits.size());
        sp.len = sp.lenA - 1 + static_cast<int>(sp.mids.size()) + sp.lenB - 1;
        std::vector<int> chain;
        auto va_part = w.strands[sp.sA].visits;
        if (sp.revA) std::reverse(va_part.begin(), va_part.end());
        chain.insert(chain.end(), va_part.begin(), va_part.end() - 1);
        chain.insert(chain.end(), sp.mids.begin(), sp.mids.end());
        auto vb_part = w.strands[sp.sB].visits;
        if (sp.revB) std::reverse(vb_part.begin(), vb_part.end());
        chain.insert(chain.end(), vb_part.begin() + 1, vb_part.end());
        Weave::WStrand ns;
        ns.color = w.strands[sp.sA].color;
        ns.closed = false;
        ns.oriented = w.strands[sp.sA].oriented && w.strands[sp.sB].oriented;
        sp.flip = ns.oriented &&
                  (w.node_sigma[chain.front()] < 0 || w.node_sigma[chain.back()] > 0);
        if (sp.flip) std::reverse(chain.begin(), chain.end());
        ns.visits = std::move(chain);
        w.strands.push_back(std::move(ns));
        for (int j = 0; j < static_cast<int>(sp.mids.size()); ++j)
            lane[sp.mids[static_cast<size_t>(j)]].push_back({&sp, j});
    };
    assemble(s1);
    assemble(s2);

    // relabel every germ of the four consumed strands
    for (size_t n = 0; n < w.node_germs.size(); ++n) {
        if (w.node_dead[n]) continue;
        for (auto& g : w.node_germs[n]) {
            for (const Splice* sp : {&s1, &s2}) {
                Weave::Germ out;
                if (g.s == sp->sA && sp->map_a(g, out)) g = out;
                else if (g.s == sp->sB && sp->map_b(g, out)) g = out;
            }
        }
    }

    // reroute each strand that crossed the removed arc's interior
    for (int i = 1; i < k; ++i) {
        const int xi = a_visits[static_cast<size_t>(i)];
        auto r = detail_moves::rotated_to(w.node_germs[xi], Weave::Germ{a, i, false},
                                          "destabilize");
        require(r.size() == 4 && r[2] == Weave::Germ{a, i, true},
                "destabilize: interior crossing is not transverse");
        const auto g1 = r[1], g2 = r[3]; // right / left of travel
        const int c = g1.s;
        require(c == g2.s && g1.v == g2.v && c != a && c != s1.ns && c != s2.ns,
                "destabilize: interior crossing strand is not a single transverse strand");
        require(c != s1.sA && c != s1.sB && c != s2.sA && c != s2.sB,
                "destabilize: a spliced arc crosses the removed arc");
        const int vc = g1.v;
        for (size_t n = 0; n < w.node_germs.size(); ++n) {
            if (w.node_dead[n]) continue;
            for (auto& g : w.node_germs[n])
                if (g.s == c && g.v > vc) ++g.v;
        }
        auto& cv = w.strands[c].visits;
        const int first = g1.out ? xL[static_cast<size_t>(i)] : xR[static_cast<size_t>(i)];
        const int second = g1.out ? xR[static_cast<size_t>(i)] : xL[static_cast<size_t>(i)];
        cv[static_cast<size_t>(vc)] = first;
        cv.insert(cv.begin() + vc + 1, second);
        auto fill = [&](int node, int visit) {
            auto ln = lane.at(node);
            require(ln.size() == 1, "destabilize: corridor bookkeeping");
            const Splice* sp = ln.front().first;
            const int pos = sp->lenA - 1 + ln.front().second;
            w.node_germs[node] = {sp->chain_germ(pos, false),
                                  Weave::Germ{c, visit, g1.out},
                                  sp->chain_germ(pos, true),
                                  Weave::Germ{c, visit, !g1.out}};
        };
        fill(xL[static_cast<size_t>(i)],
             xL[static_cast<size_t>(i)] == first ? vc : vc + 1);
        fill(xR[static_cast<size_t>(i)],
             xR[static_cast<size_t>(i)] == first ? vc : vc + 1);
    }
    if (crossed)
        w.node_germs[X] = {s1.chain_germ(s1.lenA - 1, true), s2.chain_germ(s2.lenA - 1, true),
                           s1.chain_germ(s1.lenA - 1, false),
                           s2.chain_germ(s2.lenA - 1, false)};

    for (int s : {a, s1.sA, s1.sB, s2.sA, s2.sB}) w.strands[s].dead = true;
    w.node_dead[va] = w.node_dead[vb] = true;
    for (int i = 1; i < k; ++i)
        w.node_dead[static_cast<size_t>(a_visits[static_cast<size_t>(i)])] = true;
}

namespace detail_moves {

inline std::vector<int> edge_owner_strands(const ShadowDiagram& d) {
    std::vector<int> owner(static_cast<size_t>(d.map.dart_count()), -1);
    for (size_t s = 0; s < d.strands.size(); ++s)
        for (int dart : d.strands[s].darts) {
            owner[static_cast<size_t>(dart)] = static_cast<int>(s);
            owner[static_cast<size_t>(d.map.twin_total(dart))] = static_cast<int>(s);
        }
    return owner;
}

inline detail::UnionFind diagram_arc_components(const ShadowDiagram& d, std::vector<int> cols) {
    detail::UnionFind uf(d.map.vertex_count());
    for (int c : cols)
        for (int s : d.strands_of(Color::arc(c))) {
            const auto& st = d.strands[static_cast<size_t>(s)];
            uf.unite(d.map.vertex_of(st.darts.front()), d.map.head_vertex(st.darts.back()));
        }
    return uf;
}

} // namespace detail_moves

/// All hexagonal faces whose six sides are single-segment bridge arcs with
/// alternating colors and whose opposite sides lie on distinct link
/// components, in face order with sides starting from the smallest strand.
inline std::vector<HexagonSite> find_balanced_hexagons(const ShadowDiagram& d) {
    require(d.full_shadows[0] && d.full_shadows[1] && d.full_shadows[2],
            "find_balanced_hexagons: needs full shadows");
    auto owner = detail_moves::edge_owner_strands(d);
    std::array<detail::UnionFind, 3> links{
        detail_moves::diagram_arc_components(d, {1, 2}),
        detail_moves::diagram_arc_components(d, {2, 3}),
        detail_moves::diagram_arc_components(d, {3, 1})};
    std::vector<HexagonSite> out;
    const auto& faces = d.map.face_cycles();
    for (size_t f = 0; f < faces.size(); ++f) {
        const auto& cyc = faces[f];
        if (cyc.size() != 6 || d.map.face_is_boundary(static_cast<int>(f))) continue;
        std::array<int, 6> sides{}, corners{};
        bool good = true;
        for (int i = 0; i < 6 && good; ++i) {
            int s = owner[static_cast<size_t>(cyc[static_cast<size_t>(i)])];
            sides[static_cast<size_t>(i)] = s;
            const auto& st = d.strands[static_cast<size_t>(s)];
            good = st.color.kind == Color::Arc && st.darts.size() == 1;
            corners[static_cast<size_t>(i)] =
                d.map.vertex_of(cyc[static_cast<size_t>((i + 1) % 6)]);
        }
        if (!good) continue;
        std::set<int> us(sides.begin(), sides.end()), uc(corners.begin(), corners.end());
        if (us.size() != 6 || uc.size() != 6) continue;
        for (int i = 0; i < 6 && good; ++i)
            good = d.map.degree(corners[static_cast<size_t>(i)]) == 3;
        for (int i = 0; i < 3 && good; ++i) {
            Color ci = d.strands[static_cast<size_t>(sides[static_cast<size_t>(i)])].color;
            good = ci == d.strands[static_cast<size_t>(sides[static_cast<size_t>(i + 3)])].color;
            for (int j = i + 1; j < 3 && good; ++j)
                good = !(ci == d.strands[static_cast<size_t>(sides[static_cast<size_t>(j)])].color);
        }
        // same-color sides must lie on distinct components of their link
        for (int i = 0; i < 3 && good; ++i) {
            const auto& st = d.strands[static_cast<size_t>(sides[static_cast<size_t>(i)])];
            auto& uf = links[static_cast<size_t>(st.color.index - 1)];
            int u = d.map.vertex_of(st.darts.front());
            const auto& st2 = d.strands[static_cast<size_t>(sides[static_cast<size_t>(i + 3)])];
            int v = d.map.vertex_of(st2.darts.front());
            good = uf.find(u) != uf.find(v);
        }
        if (!good) continue;
        HexagonSite site;
        site.face = static_cast<int>(f);
        int lo = 0;
        for (int i = 1; i < 6; ++i)
            if (sides[static_cast<size_t>(i)] < sides[static_cast<size_t>(lo)]) lo = i;
        for (int i = 0; i < 6; ++i) {
            site.arcs[static_cast<size_t>(i)] = sides[static_cast<size_t>((lo + i) % 6)];
            site.corners[static_cast<size_t>(i)] = corners[static_cast<size_t>((lo + i) % 6)];
        }
        out.push_back(site);
    }
    return out;
}

/// Remove a balanced hexagon: destabilize three alternating sides; the
/// splices absorb the other three sides, deleting all six arcs and all six
/// corners.  Decreases b by 3.
inline ShadowDiagram contract_hexagon(const ShadowDiagram& d, const HexagonSite& site) {
    auto found = find_balanced_hexagons(d);
    const HexagonSite* match = nullptr;
    for (const auto& s : found)
        if (s.face == site.face && s.arcs == site.arcs && s.corners == site.corners)
            match = &s;
    if (!match) throw SiteInvalidatedError("contract_hexagon: stale or invalid site");

    auto w = weave_from_diagram(d);
    for (int i : {0, 2, 4}) {
        const int arc = site.arcs[static_cast<size_t>(i)];
        const auto& st = w.strands[arc];
        const int ci = st.color.index;
        auto uf = detail_moves::arc_components(w, {ci % 3 + 1, (ci + 1) % 3 + 1});
        if (uf.find(st.visits.front()) == uf.find(st.visits.back()))
            throw SiteInvalidatedError("contract_hexagon: side no longer destabilizes");
        raw_destabilize(w, arc);
    }
    return weave_to_diagram(w);
}

/// Package an arc strand as a destabilization site.
inline DestabArcSite destab_arc_site(const ShadowDiagram& d, int arc) {
    require(arc >= 0 && arc < static_cast<int>(d.strands.size()) &&
                d.strands[static_cast<size_t>(arc)].color.kind == Color::Arc &&
                !d.strands[static_cast<size_t>(arc)].closed,
            "destab_arc_site: not an open bridge arc");
    const auto& st = d.strands[static_cast<size_t>(arc)];
    return {arc, d.map.vertex_of(st.darts.front()), d.map.head_vertex(st.darts.back())};
}

/// Destabilize along a single arc whose interior crosses no other arcs and
/// whose endpoints lie on distinct components of the link of the other two
/// colors.  Decreases b by 1.
inline ShadowDiagram destabilize_arc(const ShadowDiagram& d, const DestabArcSite& site) {
    if (site.arc < 0 || site.arc >= static_cast<int>(d.strands.size()))
        throw SiteInvalidatedError("destabilize_arc: no such strand");
    const auto& st = d.strands[static_cast<size_t>(site.arc)];
    if (st.color.kind != Color::Arc || st.closed ||
        d.map.vertex_of(st.darts.front()) != site.tail_vertex ||
        d.map.head_vertex(st.darts.back()) != site.head_vertex)
        throw SiteInvalidatedError("destabilize_arc: stale site");
    // Interior crossings with cut curves are also fatal: the replacement
    // strand of the crossing curve's color would have to cross it.
    auto owner = detail_moves::edge_owner_strands(d);
    for (size_t k = 1; k < st.darts.size(); ++k) {
        int v = d.map.vertex_of(st.darts[k]);
        for (int dart : d.map.vertex_cycle(v)) {
            const auto& other = d.strands[static_cast<size_t>(owner[static_cast<size_t>(dart)])];
            if (&other != &st && other.color.kind != Color::Aux)
                throw SiteInvalidatedError("destabilize_arc: interior is crossed");
        }
    }
    const int ci = st.color.index;
    auto uf = detail_moves::diagram_arc_components(d, {ci % 3 + 1, (ci + 1) % 3 + 1});
    if (uf.find(site.tail_vertex) == uf.find(site.head_vertex))
        throw SiteInvalidatedError(
            "destabilize_arc: endpoints lie on one component of the other-color link");
    auto w = weave_from_diagram(d);
    raw_destabilize(w, site.arc);
    return weave_to_diagram(w);
}

} // namespace bridgetri
