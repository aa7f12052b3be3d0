#pragma once

#include "moves.hpp"

#include <map>

namespace bridgetri {

/// A pairing's arcs do not satisfy the structural requirements.
struct MalformedPairingError : Error {
    using Error::Error;
};
/// The pairing fails the mod-n crossing-count test for this cover degree.
struct InadmissiblePairingError : Error {
    using Error::Error;
};
/// The cover construction needs a full set of shadow arcs.
struct MissingShadowsError : Error {
    using Error::Error;
};

/// A set of oriented auxiliary arcs pairing the bridge points with opposite
/// signs.  The arcs live as Pairing-kind strands on an augmented copy of
/// the diagram they were drawn on.
struct Pairing {
    ShadowDiagram augmented;
    std::vector<int> strands;
};

struct AdmissibilityReport {
    struct CurveLine {
        int strand = -1;
        int count = 0;   // signed crossings with the pairing
        int residue = 0; // count mod n
    };
    int n = 0;
    std::vector<CurveLine> curves;
    bool admissible = false;
    std::vector<std::string> notes;
};

namespace detail_covers {

/// Shift visit indices >= from of strand s up by one in every rotation.
inline void shift_visits(Weave& w, int s, int from) {
    for (auto& gs : w.node_germs)
        for (auto& g : gs)
            if (g.s == s && g.v >= from) ++g.v;
}

/// Reverse an open strand in place: visits flip, every germ flips ends.
inline void reverse_strand(Weave& w, int s) {
    auto& st = w.strands[s];
    require(!st.closed, "reverse_strand: open strands only");
    const int m = static_cast<int>(st.visits.size());
    std::reverse(st.visits.begin(), st.visits.end());
    for (auto& gs : w.node_germs)
        for (auto& g : gs)
            if (g.s == s) g = {s, m - 1 - g.v, !g.out};
}

/// Insert a crossing of a strand under construction with strand c on the
/// segment hanging off germ side_germ (a germ of c at some node).  The new
/// node sits just beside that node.  ns is the new strand's id and nv the
/// visit index it will use; travel direction of the new strand matches the
/// strand it runs parallel to, with the reference node on its RIGHT.
inline int cross_beside(Weave& w, const Weave::Germ& side_germ, int ns, int nv) {
    const int c = side_germ.s;
    int pos;
    Weave::Germ toward, away;
    if (side_germ.out) {
        pos = side_germ.v + 1;
        toward = {c, pos, false};
        away = {c, pos, true};
    } else {
        pos = side_germ.v;
        toward = {c, pos, true};
        away = {c, pos, false};
    }
    shift_visits(w, c, pos);
    // ccw: parallel-forward, c away-side, parallel-back, c toward-side
    int y = w.new_node({{ns, nv, true}, away, {ns, nv, false}, toward});
    auto& cv = w.strands[c].visits;
    cv.insert(cv.begin() + pos, y);
    return y;
}

/// Rotation at node rotated so the in-germ of strand s at visit v comes
/// first; checks the node is a plain transverse crossing.
inline std::vector<Weave::Germ> crossing_frame(const Weave& w, int node,
                                               const Weave::Germ& in_germ) {
    const auto rot = detail_moves::rotated_to(w.node_germs[node], in_germ, "pairing");
    require(rot.size() == 4, "pairing: strand passes a node that is not a crossing");
    require(rot[1].s == rot[3].s && rot[1].s != in_germ.s,
            "pairing: crossing node is not transverse");
    return rot;
}

/// Insert germ g into the rotation at node, directly after (ccw) or before
/// the reference germ.
inline void insert_germ(Weave& w, int node, const Weave::Germ& ref, const Weave::Germ& g,
                        bool after) {
    auto& gs = w.node_germs[node];
    for (size_t i = 0; i < gs.size(); ++i)
        if (gs[i] == ref) {
            gs.insert(gs.begin() + static_cast<long>(after ? i + 1 : i), g);
            return;
        }
    throw PreconditionError("pairing: reference germ not found at node");
}

/// Add an open Pairing strand running parallel to arc strand s along its
/// left side, ending at the same bridge nodes.  Returns the new strand id.
inline int parallel_pairing_strand(Weave& w, int s) {
    const auto sv = w.strands[s].visits; // copy: w.strands reallocates below
    const int m = static_cast<int>(sv.size());
    const int ns = static_cast<int>(w.strands.size());
    Weave::WStrand ws;
    ws.color = Color{Color::Pairing, 0};
    ws.closed = false;
    ws.oriented = true;
    w.strands.push_back(ws);

    std::vector<int> nv;
    nv.push_back(sv.front());
    insert_germ(w, sv.front(), w.tail_germ(s), {ns, 0, true}, /*after=*/true);
    for (int i = 1; i + 1 < m; ++i) {
        auto rot = crossing_frame(w, sv[static_cast<size_t>(i)], {s, i, false});
        // rot = [s_in, right, s_fwd, left]; cross the left-side segment
        nv.push_back(cross_beside(w, rot[3], ns, static_cast<int>(nv.size())));
    }
    nv.push_back(sv.back());
    insert_germ(w, sv.back(), {s, m - 1, false},
                {ns, static_cast<int>(nv.size()) - 1, false}, /*after=*/false);
    w.strands[ns].visits = std::move(nv);
    return ns;
}

inline bool is_curve(const Strand& st) { return st.closed && st.color.kind == Color::Curve; }

} // namespace detail_covers

/// Copy the diagram and add one Pairing arc parallel to each shadow arc of
/// the given color, oriented so heads sit at positively signed bridges.
inline Pairing pairing_from_arcs(const ShadowDiagram& d, int color_index) {
    for (int i = 0; i < 3; ++i)
        if (!d.full_shadows[static_cast<size_t>(i)])
            throw MissingShadowsError("pairing_from_arcs: full shadows required");
    Weave w = weave_from_diagram(d);
    std::vector<int> added;
    for (size_t s = 0; s < d.strands.size(); ++s) {
        const auto& st = d.strands[s];
        if (st.closed || st.color != Color::arc(color_index)) continue;
        added.push_back(detail_covers::parallel_pairing_strand(w, static_cast<int>(s)));
    }
    // Orient each pairing arc toward the positive bridge point.
    for (int ns : added) {
        int head = w.strands[static_cast<size_t>(ns)].visits.back();
        if (w.node_sigma[static_cast<size_t>(head)] < 0) detail_covers::reverse_strand(w, ns);
    }
    Pairing p;
    p.augmented = weave_to_diagram(w);
    p.augmented.layout = nullptr; // combinatorial construction; no geometry
    for (size_t s = 0; s < p.augmented.strands.size(); ++s)
        if (p.augmented.strands[s].color.kind == Color::Pairing)
            p.strands.push_back(static_cast<int>(s));
    return p;
}

inline AdmissibilityReport pairing_admissibility(const ShadowDiagram& base, const Pairing& p,
                                                 int n) {
    require(n >= 1, "pairing_admissibility: n >= 1");
    const auto& d = p.augmented;
    // structural checks
    std::map<int, int> pairing_ends; // bridge vertex -> count
    for (int s : p.strands) {
        if (s < 0 || s >= static_cast<int>(d.strands.size()) ||
            d.strands[static_cast<size_t>(s)].color.kind != Color::Pairing ||
            d.strands[static_cast<size_t>(s)].closed)
            throw MalformedPairingError("pairing: strand list does not name open pairing arcs");
        auto [t, h] = d.arc_end_germs(s);
        int vt = d.map.vertex_of(t), vh = d.map.vertex_of(h);
        if (d.bridge_index_of_vertex(vt) < 0 || d.bridge_index_of_vertex(vh) < 0)
            throw MalformedPairingError("pairing: arc endpoint is not a bridge point");
        ++pairing_ends[vt];
        ++pairing_ends[vh];
        int st = d.bridge_points[static_cast<size_t>(d.bridge_index_of_vertex(vt))].sigma;
        int sh = d.bridge_points[static_cast<size_t>(d.bridge_index_of_vertex(vh))].sigma;
        if (st != 0 && st + sh != 0)
            throw MalformedPairingError("pairing: arc endpoints carry equal signs");
        if (st > 0)
            throw MalformedPairingError("pairing: arc oriented toward the negative bridge");
    }
    if (pairing_ends.size() != d.bridge_points.size() ||
        2 * p.strands.size() != d.bridge_points.size())
        throw MalformedPairingError("pairing: arcs do not pair up the bridge points");
    for (auto [v, cnt] : pairing_ends)
        if (cnt != 1) throw MalformedPairingError("pairing: bridge point paired twice");

    AdmissibilityReport rep;
    rep.n = n;
    auto owner = detail_moves::edge_owner_strands(d);
    std::vector<bool> is_pairing(d.strands.size(), false);
    for (int s : p.strands) is_pairing[static_cast<size_t>(s)] = true;

    std::map<int, AdmissibilityReport::CurveLine> lines;
    for (size_t s = 0; s < d.strands.size(); ++s)
        if (detail_covers::is_curve(d.strands[s]))
            lines[static_cast<int>(s)] = {static_cast<int>(s), 0, 0};

    // dart -> position of the next dart of the same strand (travel order)
    std::vector<int> strand_out(d.map.dart_count(), -1);
    for (size_t s = 0; s < d.strands.size(); ++s)
        for (int dt : d.strands[s].darts) strand_out[static_cast<size_t>(dt)] = static_cast<int>(s);

    bool oriented_counts = true;
    for (auto& [s, line] : lines)
        if (!d.strands[static_cast<size_t>(s)].oriented) oriented_counts = false;
    if (!oriented_counts && n > 2)
        throw MalformedPairingError("pairing: unoriented curves admit only n = 2 counts");

    for (int v = 0; v < d.map.vertex_count(); ++v) {
        auto cyc = d.map.vertex_cycle(v);
        if (cyc.size() != 4) continue;
        // locate an outgoing pairing dart and an outgoing curve dart
        int ppos = -1, cpos = -1;
        for (size_t i = 0; i < cyc.size(); ++i) {
            int dt = cyc[i];
            int so = strand_out[static_cast<size_t>(dt)];
            if (so < 0) continue;
            if (is_pairing[static_cast<size_t>(so)]) ppos = static_cast<int>(i);
            if (detail_covers::is_curve(d.strands[static_cast<size_t>(so)]))
                cpos = static_cast<int>(i);
        }
        if (ppos < 0 || cpos < 0) continue;
        int ce = owner[static_cast<size_t>(cyc[static_cast<size_t>(cpos)] / 2)];
        auto& line = lines.at(ce);
        // ccw successor of the curve's outgoing dart: pairing-out => +1
        int nxt = cyc[static_cast<size_t>((cpos + 1) % 4)];
        line.count += (strand_out[static_cast<size_t>(nxt)] >= 0) ? 1 : -1;
    }

    // flag pairing-arc crossings with shadow arcs (allowed, but reported)
    for (int v = 0; v < d.map.vertex_count(); ++v) {
        auto cyc = d.map.vertex_cycle(v);
        if (cyc.size() != 4) continue;
        bool has_pairing = false, has_arc = false;
        for (int dt : cyc) {
            int e = owner[static_cast<size_t>(dt / 2)];
            if (e < 0) continue;
            const auto& st = d.strands[static_cast<size_t>(e)];
            if (st.color.kind == Color::Pairing) has_pairing = true;
            if (!st.closed && st.color.kind == Color::Arc) has_arc = true;
        }
        if (has_pairing && has_arc)
            rep.notes.push_back("pairing arc crosses a shadow arc near vertex " +
                                std::to_string(v));
    }

    rep.admissible = true;
    for (auto& [s, line] : lines) {
        line.residue = ((line.count % n) + n) % n;
        if (line.residue != 0) rep.admissible = false;
        rep.curves.push_back(line);
    }
    (void)base;
    return rep;
}

/// Provenance of the strands in a covered diagram.
struct CoverTrace {
    struct Lift {
        int base_strand = -1; // -1 for disk-boundary curves
        int deck = -1;        // start deck; for disk curves, the pair index j
        int arc = -1;         // guiding shadow arc for disk-boundary curves
    };
    int n = 0;
    std::vector<Lift> lifts; // indexed by output strand
};

struct CoverResult {
    ShadowDiagram diagram;
    CoverTrace trace;
};

namespace detail_covers {

/// Everything needed to build the cyclic cover of an augmented diagram.
struct CoverBuilder {
    const ShadowDiagram& base;
    const Pairing& p;
    int n;
    std::array<int, 3> discarded;

    Weave w;                         // the augmented base
    std::vector<bool> pairing_strand;
    std::vector<bool> bridge_node;
    std::vector<std::vector<int>> delta; // per strand, deck step at each visit
    std::vector<std::vector<int>> pre;   // prefix sums: deck offset entering visit k

    Weave u; // the cover under construction
    std::vector<std::vector<int>> LN; // [node][deck] -> cover node, -1 if absent
    std::vector<int> BX;              // bridge node -> merged cover node

    // lifted strand bookkeeping ---------------------------------------
    // key: (base strand, base visit, deck) -> (cover strand, rank) where
    // rank orders kept visits and insertions along the cover strand.
    struct Item {
        // sort key along a cover strand: (kc, side, tie)
        long kc;
        int side; // -1 before the base visit, 0 at it, +1 after
        long tie;
        int node;             // cover node (kept visits and finished crossings)
        Weave::Germ out_slot; // rotation slots to patch once ranks are known
        Weave::Germ in_slot;  // (germ value {strand,-1,x} marks "this item")
    };
    std::vector<std::vector<Item>> items; // per cover strand
    std::map<std::tuple<int, int, int>, std::pair<int, int>> kept; // (s,k,deck)->(ls,item idx)
    CoverTrace trace;

    int mod(int a) const { return ((a % n) + n) % n; }

    explicit CoverBuilder(const ShadowDiagram& b, const Pairing& pr, int nn,
                          std::array<int, 3> disc)
        : base(b), p(pr), n(nn), discarded(disc), w(weave_from_diagram(pr.augmented)) {}

    bool is_pairing(int s) const { return pairing_strand[static_cast<size_t>(s)]; }
    bool is_arc(int s) const {
        return !w.strands[static_cast<size_t>(s)].closed &&
               w.strands[static_cast<size_t>(s)].color.kind == Color::Arc;
    }
    bool is_closed_curve(int s) const { return w.strands[static_cast<size_t>(s)].closed; }

    /// Deck offset of strand s when sitting at visit k (arcs: kept lift).
    int deck_at(int s, int k) const { return pre[static_cast<size_t>(s)][static_cast<size_t>(k)]; }

    void classify() {
        pairing_strand.assign(w.strands.size(), false);
        for (int s : p.strands) pairing_strand[static_cast<size_t>(s)] = true;
        bridge_node.assign(w.node_germs.size(), false);
        for (int s : p.strands) {
            bridge_node[static_cast<size_t>(w.strands[static_cast<size_t>(s)].visits.front())] = true;
            bridge_node[static_cast<size_t>(w.strands[static_cast<size_t>(s)].visits.back())] = true;
        }
        delta.resize(w.strands.size());
        pre.resize(w.strands.size());
        for (size_t s = 0; s < w.strands.size(); ++s) {
            const auto& st = w.strands[s];
            if (is_pairing(static_cast<int>(s))) continue;
            int m = static_cast<int>(st.visits.size());
            delta[s].assign(static_cast<size_t>(m), 0);
            pre[s].assign(static_cast<size_t>(m), 0);
            int acc = 0;
            for (int k = 0; k < m; ++k) {
                pre[s][static_cast<size_t>(k)] = acc;
                int v = st.visits[static_cast<size_t>(k)];
                if (bridge_node[static_cast<size_t>(v)]) continue;
                auto rot = w.node_germs[static_cast<size_t>(v)];
                if (rot.size() != 4) continue;
                auto fr = detail_moves::rotated_to(rot, {static_cast<int>(s), k, false}, "cover");
                if (!is_pairing(fr[1].s)) continue;
                delta[s][static_cast<size_t>(k)] = fr[1].out ? 1 : -1;
                acc += delta[s][static_cast<size_t>(k)];
            }
            if (st.closed)
                require(mod(acc) == 0, "cover: closed strand has nonzero pairing monodromy");
        }
    }


    void make_nodes() {
        LN.assign(w.node_germs.size(), std::vector<int>(static_cast<size_t>(n), -1));
        BX.assign(w.node_germs.size(), -1);
        for (size_t v = 0; v < w.node_germs.size(); ++v) {
            const auto& gs = w.node_germs[v];
            if (bridge_node[v]) {
                BX[v] = u.new_node({}, w.node_sigma[v]);
                continue;
            }
            // distinct strand passes at this node
            std::vector<std::pair<int, int>> passes;
            for (const auto& g : gs)
                if (g.out) passes.push_back({g.s, g.v});
                else passes.push_back({g.s, g.v}); // in/out germs share the visit index
            std::sort(passes.begin(), passes.end());
            passes.erase(std::unique(passes.begin(), passes.end()), passes.end());
            // crossings with the pairing dissolve into the deck seams; the
            // other strand continues across them without a node
            bool seam = std::any_of(passes.begin(), passes.end(),
                                    [&](auto pr) { return is_pairing(pr.first); });
            if (seam) {
                require(passes.size() <= 2, "cover: pairing crosses a multiple point");
                continue;
            }
            for (int j = 0; j < n; ++j)
                LN[v][static_cast<size_t>(j)] = u.new_node({});
        }
    }

    int new_cover_strand(Color col, bool closed, bool oriented, CoverTrace::Lift lift) {
        Weave::WStrand ws;
        ws.color = col;
        ws.closed = closed;
        ws.oriented = oriented;
        u.strands.push_back(ws);
        items.emplace_back();
        trace.lifts.push_back(lift);
        return static_cast<int>(u.strands.size()) - 1;
    }

    /// Add a kept visit of a base strand to its cover strand.
    void keep_visit(int ls, int s, int k, int deck, int node) {
        kept[{s, k, deck}] = {ls, static_cast<int>(items[static_cast<size_t>(ls)].size())};
        items[static_cast<size_t>(ls)].push_back({k, 0, 0, node, {}, {}});
    }

    void lift_strands() {
        for (size_t s = 0; s < w.strands.size(); ++s) {
            if (is_pairing(static_cast<int>(s))) continue;
            const auto& st = w.strands[s];
            int m = static_cast<int>(st.visits.size());
            if (st.closed) {
                for (int j0 = 0; j0 < n; ++j0) {
                    int ls = new_cover_strand(st.color, true, st.oriented,
                                              {static_cast<int>(s), j0, -1});
                    for (int k = 0; k < m; ++k) {
                        int j = mod(j0 + deck_at(static_cast<int>(s), k));
                        int node = LN[static_cast<size_t>(st.visits[static_cast<size_t>(k)])]
                                     [static_cast<size_t>(j)];
                        if (node >= 0) keep_visit(ls, static_cast<int>(s), k, j, node);
                    }
                }
            } else {
                // one lift keeps the strand's color; the others become
                // auxiliary strands so that the cover graph still fills
                // the covering surface with disk faces
                for (int j0 = 0; j0 < n; ++j0) {
                    Color col = (j0 == 0) ? st.color : Color{Color::Aux, st.color.index};
                    int ls = new_cover_strand(col, false, st.oriented,
                                              {static_cast<int>(s), j0, -1});
                    for (int k = 0; k < m; ++k) {
                        int v = st.visits[static_cast<size_t>(k)];
                        int j = mod(j0 + deck_at(static_cast<int>(s), k));
                        int node = bridge_node[static_cast<size_t>(v)]
                                       ? BX[static_cast<size_t>(v)]
                                       : LN[static_cast<size_t>(v)][static_cast<size_t>(j)];
                        if (node >= 0) keep_visit(ls, static_cast<int>(s), k, j, node);
                    }
                }
            }
        }
    }

    // bridge rotation slots --------------------------------------------
    struct Slot {
        int deck;
        Weave::Germ base_germ; // arc terminal germ of the augmented base
        bool real;
    };
    std::map<int, std::vector<Slot>> slots; // base bridge node -> 3n slots, ccw

    void make_bridge_slots() {
        for (size_t v = 0; v < w.node_germs.size(); ++v) {
            if (!bridge_node[v]) continue;
            Weave::Germ gp{};
            bool found = false;
            for (const auto& g : w.node_germs[v])
                if (is_pairing(g.s)) gp = g, found = true;
            require(found, "cover: bridge without pairing end");
            auto rot = detail_moves::rotated_to(w.node_germs[v], gp, "cover");
            bool tail = gp.out; // pairing tail here: decks ascend ccw; head: descend
            std::vector<Slot>& out = slots[static_cast<int>(v)];
            for (int t = 0; t < n; ++t) {
                int deck = tail ? t : mod(-t);
                for (size_t i = 1; i < rot.size(); ++i)
                    out.push_back({deck, rot[i], true});
            }
        }
    }

    int slot_pos(int v, int deck, const Weave::Germ& g) const {
        const auto& sl = slots.at(v);
        for (size_t i = 0; i < sl.size(); ++i)
            if (sl[i].deck == deck && sl[i].base_germ == g) return static_cast<int>(i);
        throw Error("cover: bridge slot not found");
    }

    // disk-boundary curves ----------------------------------------------
    struct Pass {
        int K;       // cover strand id of the disk-boundary curve
        int entry;   // slot position of the entering lift's germ
        int radius;  // nesting order near this bridge (smaller = closer)
    };
    std::map<int, std::vector<Pass>> passes; // base bridge node -> passes

    std::map<std::tuple<int, int, int>, int> kk_nodes; // (bridge, Kmin, Kmax) -> node

    int lift_of(int c, int deck_start) const {
        for (size_t t = 0; t < trace.lifts.size(); ++t)
            if (trace.lifts[t].base_strand == c && trace.lifts[t].arc == -1 &&
                (deck_start < 0 || trace.lifts[t].deck == deck_start))
                return static_cast<int>(t);
        throw Error("cover: missing lift");
    }

    /// A disk-curve leg that crossed a strand lift at a node copy.  Other
    /// legs paralleling the crossed lift must cross this leg nearby.
    struct LegRec {
        int K;          // the curve
        int kv;         // its visit rank at the lift crossing
        int lg;         // lift it runs beside
        int lc;         // lift it crossed
        int side_index; // frame slot (1 or 3) of the segment it crossed
        int dir;        // +1 with its guide, -1 against
    };
    std::map<std::pair<int, int>, std::vector<LegRec>> leg_recs; // (node, deck)

    /// Crossing of curve K, running beside guide lift lg, with the strand
    /// lift carrying frame slot `side_index` at deck j.  Legs of other
    /// curves beside the crossed lift get their forced crossings with K.
    void cross_event(int K, int& kv, int j, const std::vector<Weave::Germ>& fr,
                     int side_index, int lg) {
        const Weave::Germ& side = fr[static_cast<size_t>(side_index)];
        int c = side.s, kc = side.v;
        if (is_pairing(c)) return;
        int dir = side_index == 1 ? +1 : -1;
        int lc = lift_of(c, mod(j - deck_at(c, kc))); // the lift through deck j here
        int v = w.strands[static_cast<size_t>(c)].visits[static_cast<size_t>(kc)];

        // legs beside lc that already crossed lg here must cross K once,
        // just before or after K crosses lc depending on their side of lc
        int q_in = side.out ? (side_index + 2) % 4 : side_index; // lc's inbound slot
        bool from_right = (q_in + 1) % 4 == (dir > 0 ? 0 : 2);   // K meets lc's right first
        struct Hit {
            const LegRec* r;
            bool before_K;
        };
        std::vector<Hit> hits;
        for (const auto& r : leg_recs[{v, j}])
            if (r.lc == lg && r.lg == lc)
                hits.push_back({&r, (r.side_index == 1) == from_right});
        auto emit = [&](const Hit& h) {
            const LegRec& r = *h.r;
            int ap = r.dir > 0 ? q_in : (q_in + 2) % 4; // side of lg the leg comes from
            Weave::Germ r_in{r.K, -1, false}, r_out{r.K, -1, true};
            bool r_from_my_right = ap == (dir > 0 ? 1 : 3);
            int node = r_from_my_right
                           ? u.new_node({{K, kv, false}, r_in, {K, kv, true}, r_out})
                           : u.new_node({{K, kv, false}, r_out, {K, kv, true}, r_in});
            items[static_cast<size_t>(r.K)].push_back(
                {r.kv, ap == side_index ? -1 : +1, 0, node, r_out, r_in});
            items[static_cast<size_t>(K)].push_back({kv, 0, 0, node, {}, {}});
            ++kv;
        };
        for (const auto& h : hits)
            if (h.before_K) emit(h);

        // guide sits on K's left: rotation [K_out, toward_guide, K_in, away]
        Weave::Germ toward{lc, -1, !side.out}, away{lc, -1, side.out};
        int node = u.new_node({{K, kv, true}, toward, {K, kv, false}, away});
        items[static_cast<size_t>(lc)].push_back(
            {kc, side.out ? +1 : -1, 0, node, away, toward});
        items[static_cast<size_t>(K)].push_back({kv, 0, 0, node, {}, {}});
        int kv_here = kv;
        ++kv;

        for (const auto& h : hits)
            if (!h.before_K) emit(h);
        leg_recs[{v, j}].push_back({K, kv_here, lg, lc, side_index, dir});
    }

    /// Crossing of K with a kept arc's terminal segment near a bridge.
    void germ_event(int K, int& kv, const Slot& sl, int radius) {
        int lc = kept.at({sl.base_germ.s, sl.base_germ.v, sl.deck}).first;
        bool at_tail = sl.base_germ.out; // terminal germ at the arc's tail
        Weave::Germ toward{lc, -1, !at_tail}, away{lc, -1, at_tail};
        int node = u.new_node({{K, kv, true}, toward, {K, kv, false}, away});
        if (at_tail)
            items[static_cast<size_t>(lc)].push_back({0, +1, radius, node, away, toward});
        else
            items[static_cast<size_t>(lc)].push_back(
                {sl.base_germ.v, -1, -radius, node, away, toward});
        items[static_cast<size_t>(K)].push_back({kv, 0, 0, node, {}, {}});
        ++kv;
    }

    /// Crossing of two disk-boundary curves near a bridge.  inner travels
    /// radially (inward if radial_in), outer along its circle, with the
    /// bridge on both curves' left.
    void kk_event(int v, int inner_K, int outer_K, bool radial_in, int& kv, bool i_am_inner) {
        auto key = std::make_tuple(v, std::min(inner_K, outer_K), std::max(inner_K, outer_K));
        auto it = kk_nodes.find(key);
        int me = i_am_inner ? inner_K : outer_K;
        if (it == kk_nodes.end()) {
            int node = radial_in
                           ? u.new_node({{outer_K, -1, false},
                                         {inner_K, -1, false},
                                         {outer_K, -1, true},
                                         {inner_K, -1, true}})
                           : u.new_node({{outer_K, -1, false},
                                         {inner_K, -1, true},
                                         {outer_K, -1, true},
                                         {inner_K, -1, false}});
            kk_nodes[key] = node;
            it = kk_nodes.find(key);
        }
        // patch this curve's germ slots with its visit index
        for (auto& g : u.node_germs[static_cast<size_t>(it->second)])
            if (g.s == me && g.v == -1) g.v = kv;
        items[static_cast<size_t>(me)].push_back({kv, 0, 0, it->second, {}, {}});
        ++kv;
    }

    /// All crossings of pass `self` inside the bridge region of v, in
    /// travel order: radial inbound, counterclockwise circuit, radial
    /// outbound, with the bridge kept on the curve's left throughout.
    void region_events(int K, int& kv, int v, const Pass& self) {
        const auto& sl = slots.at(v);
        const auto& ps = passes.at(v);
        const int B = static_cast<int>(sl.size()) / n;  // slots spanned by a sector
        const int X = 4 * B - 1;                        // exit-stub angle offset
        const int Q = 4 * static_cast<int>(sl.size()); // angles in quarter-slots
        auto ang = [&](int q) { return ((q % Q) + Q) % Q; };
        const int A4 = 4 * self.entry;
        auto in_span_of = [&](int angle, int entry4) {
            int o = ang(angle - entry4);
            return o > 1 && o < X;
        };
        // inbound: my entry stub across circles of larger radius
        std::vector<const Pass*> hit;
        for (const auto& q : ps)
            if (q.K != K && q.radius > self.radius && in_span_of(A4 + 1, 4 * q.entry))
                hit.push_back(&q);
        std::sort(hit.begin(), hit.end(),
                  [](const Pass* a, const Pass* b) { return a->radius > b->radius; });
        for (auto* q : hit) kk_event(v, K, q->K, /*radial_in=*/true, kv, /*i_am_inner=*/true);
        // circuit: kept germs and smaller-radius stubs, by angle
        struct CE {
            int offset;
            const Slot* slot = nullptr;
            const Pass* q = nullptr;
            bool q_radial_in = false;
        };
        std::vector<CE> ces;
        for (int t = 1; t <= B - 1; ++t) {
            const Slot& s2 = sl[static_cast<size_t>((self.entry + t) %
                                                    static_cast<int>(sl.size()))];
            if (s2.real) ces.push_back({4 * t, &s2, nullptr, false});
        }
        for (const auto& q : ps) {
            if (q.K == K || q.radius >= self.radius) continue;
            if (in_span_of(4 * q.entry + 1, A4))
                ces.push_back({ang(4 * q.entry + 1 - A4), nullptr, &q, true});
            if (in_span_of(4 * q.entry + X, A4))
                ces.push_back({ang(4 * q.entry + X - A4), nullptr, &q, false});
        }
        std::sort(ces.begin(), ces.end(), [](const CE& a, const CE& b) {
            return a.offset < b.offset;
        });
        for (const auto& ce : ces) {
            if (ce.slot)
                germ_event(K, kv, *ce.slot, self.radius);
            else
                kk_event(v, ce.q->K, K, ce.q_radial_in, kv, /*i_am_inner=*/false);
        }
        // outbound: my exit stub across circles of larger radius
        hit.clear();
        for (const auto& q : ps)
            if (q.K != K && q.radius > self.radius && in_span_of(A4 + X, 4 * q.entry))
                hit.push_back(&q);
        std::sort(hit.begin(), hit.end(),
                  [](const Pass* a, const Pass* b) { return a->radius < b->radius; });
        for (auto* q : hit) kk_event(v, K, q->K, /*radial_in=*/false, kv, /*i_am_inner=*/true);
    }

    struct KDesc {
        int K;
        int s; // guiding shadow arc (augmented-base strand id)
        int j; // deck pair (j, j+1)
    };
    std::vector<KDesc> kdescs;

    void plan_disk_curves() {
        for (size_t s = 0; s < w.strands.size(); ++s) {
            if (!is_arc(static_cast<int>(s))) continue;
            int col = w.strands[s].color.index;
            if (discarded[static_cast<size_t>(col - 1)] == static_cast<int>(s)) continue;
            for (int j = 1; j < n; ++j) {
                int K = new_cover_strand(Color{Color::Curve, col}, true, true,
                                         {-1, j, static_cast<int>(s)});
                kdescs.push_back({K, static_cast<int>(s), j});
            }
        }
        // passes per bridge; radius ranks by (deck pair, color)
        for (const auto& kd : kdescs) {
            const auto& st = w.strands[static_cast<size_t>(kd.s)];
            int m = static_cast<int>(st.visits.size());
            int vt = st.visits.front(), vh = st.visits.back();
            int dh = mod(kd.j + deck_at(kd.s, m - 1));
            int dt = mod(kd.j + 1); // deck entering the tail region (pre[0] = 0)
            int eh = slot_pos(vh, dh, {kd.s, m - 1, false});
            int et = slot_pos(vt, dt, {kd.s, 0, true});
            int xh = slot_pos(vh, mod(dh + 1), {kd.s, m - 1, false});
            int xt = slot_pos(vt, mod(dt - 1), {kd.s, 0, true});
            int lh = static_cast<int>(slots.at(vh).size());
            int lt = static_cast<int>(slots.at(vt).size());
            require((xh - eh + lh) % lh == lh / n, "cover: head sector out of order");
            require((xt - et + lt) % lt == lt / n, "cover: tail sector out of order");
            passes[vh].push_back({kd.K, eh, 0});
            passes[vt].push_back({kd.K, et, 0});
        }
        for (auto& [v, ps] : passes) {
            std::sort(ps.begin(), ps.end(), [&](const Pass& a, const Pass& b) {
                const auto& la = trace.lifts[static_cast<size_t>(a.K)];
                const auto& lb = trace.lifts[static_cast<size_t>(b.K)];
                int ca = w.strands[static_cast<size_t>(la.arc)].color.index;
                int cb = w.strands[static_cast<size_t>(lb.arc)].color.index;
                return std::tie(la.deck, ca) < std::tie(lb.deck, cb);
            });
            for (size_t i = 0; i < ps.size(); ++i) ps[i].radius = static_cast<int>(i);
        }
    }

    const Pass& pass_at(int v, int K) const {
        for (const auto& q : passes.at(v))
            if (q.K == K) return q;
        throw Error("cover: pass not registered");
    }

    void build_disk_curves() {
        for (const auto& kd : kdescs) {
            const auto& st = w.strands[static_cast<size_t>(kd.s)];
            int m = static_cast<int>(st.visits.size());
            int vt = st.visits.front(), vh = st.visits.back();
            int kv = 0;
            // leg parallel to lift j, tail to head, beside right-hand segments
            for (int k = 1; k + 1 < m; ++k) {
                if (delta[static_cast<size_t>(kd.s)][static_cast<size_t>(k)] != 0) continue;
                auto fr = detail_moves::rotated_to(
                    w.node_germs[static_cast<size_t>(st.visits[static_cast<size_t>(k)])],
                    {kd.s, k, false}, "cover");
                require(fr.size() == 4, "cover: shadow arc passes a non-crossing node");
                cross_event(kd.K, kv, mod(kd.j + deck_at(kd.s, k)), fr, 1,
                            lift_of(kd.s, kd.j));
            }
            region_events(kd.K, kv, vh, pass_at(vh, kd.K));
            // leg parallel to lift j+1, head back to tail, left-hand segments
            for (int k = m - 2; k >= 1; --k) {
                if (delta[static_cast<size_t>(kd.s)][static_cast<size_t>(k)] != 0) continue;
                auto fr = detail_moves::rotated_to(
                    w.node_germs[static_cast<size_t>(st.visits[static_cast<size_t>(k)])],
                    {kd.s, k, false}, "cover");
                require(fr.size() == 4, "cover: shadow arc passes a non-crossing node");
                cross_event(kd.K, kv, mod(kd.j + 1 + deck_at(kd.s, k)), fr, 3,
                            lift_of(kd.s, mod(kd.j + 1)));
            }
            region_events(kd.K, kv, vt, pass_at(vt, kd.K));
        }
    }

    // ranks of kept visits after sorting: (s, k, deck) -> (ls, rank)
    std::map<std::tuple<int, int, int>, std::pair<int, int>> rank_of;

    int deck_of_kept(int ls, int kc) const {
        const auto& lf = trace.lifts[static_cast<size_t>(ls)];
        return mod(lf.deck + deck_at(lf.base_strand, kc));
    }

    void finalize_strands() {
        for (size_t ls = 0; ls < u.strands.size(); ++ls) {
            auto& its = items[ls];
            std::stable_sort(its.begin(), its.end(), [](const Item& a, const Item& b) {
                return std::tie(a.kc, a.side, a.tie) < std::tie(b.kc, b.side, b.tie);
            });
            require(!its.empty(), "cover: a lifted strand crosses nothing; unsupported");
            // germs are renumbered only after every match is collected, so
            // interleaved insertions cannot be matched against fresh ranks
            std::vector<std::pair<Weave::Germ*, int>> patches;
            for (size_t r = 0; r < its.size(); ++r) {
                const auto& it = its[r];
                u.strands[ls].visits.push_back(it.node);
                if (it.side == 0) {
                    if (trace.lifts[ls].arc == -1) { // kept base visit
                        rank_of[{trace.lifts[ls].base_strand, static_cast<int>(it.kc),
                                 deck_of_kept(static_cast<int>(ls), static_cast<int>(it.kc))}] =
                            {static_cast<int>(ls), static_cast<int>(r)};
                    } else { // curve visit: germs were written with the raw counter
                        for (auto& g : u.node_germs[static_cast<size_t>(it.node)])
                            if (g.s == static_cast<int>(ls) &&
                                g.v == static_cast<int>(it.kc))
                                patches.push_back({&g, static_cast<int>(r)});
                    }
                } else {
                    for (auto& g : u.node_germs[static_cast<size_t>(it.node)])
                        if (g.s == static_cast<int>(ls) && g.v == -1)
                            patches.push_back({&g, static_cast<int>(r)});
                }
            }
            for (auto& [g, r] : patches) g->v = r;
        }
    }

    void fill_rotations() {
        for (size_t v = 0; v < w.node_germs.size(); ++v) {
            if (bridge_node[v]) {
                auto& out = u.node_germs[static_cast<size_t>(BX[v])];
                for (const auto& sl : slots.at(static_cast<int>(v))) {
                    if (!sl.real) continue;
                    auto [ls, r] = rank_of.at({sl.base_germ.s, sl.base_germ.v, sl.deck});
                    out.push_back({ls, r, sl.base_germ.out});
                }
                continue;
            }
            for (int j = 0; j < n; ++j) {
                int node = LN[v][static_cast<size_t>(j)];
                if (node < 0) continue;
                auto& out = u.node_germs[static_cast<size_t>(node)];
                for (const auto& g : w.node_germs[v]) {
                    auto [ls, r] = rank_of.at({g.s, g.v, j});
                    out.push_back({ls, r, g.out});
                }
            }
        }
    }

    CoverResult run() {
        classify();
        make_nodes();
        lift_strands();
        make_bridge_slots();
        plan_disk_curves();
        build_disk_curves();
        finalize_strands();
        fill_rotations();
        u.full_shadows = {true, true, true};
        CoverResult res;
        res.diagram = weave_to_diagram(u);
        res.trace = std::move(trace);
        res.trace.n = n;
        return res;
    }
};

} // namespace detail_covers

/// Cyclic n-fold cover of the pair presented by the diagram, branched over
/// its surface, built deck by deck from an admissible pairing.
inline CoverResult branched_cover(const ShadowDiagram& base, const Pairing& p, int n,
                                  std::array<int, 3> discarded = {-1, -1, -1}) {
    for (int i = 0; i < 3; ++i)
        if (!base.full_shadows[static_cast<size_t>(i)])
            throw MissingShadowsError("branched_cover: full shadows required");
    auto rep = pairing_admissibility(base, p, n);
    if (!rep.admissible) {
        std::string msg = "branched_cover: pairing not admissible for n = " + std::to_string(n) +
                          "; residues";
        for (auto& c : rep.curves) msg += " " + std::to_string(c.residue);
        throw InadmissiblePairingError(msg);
    }
    // default discarded shadow: the last-indexed arc of each color
    for (int i = 0; i < 3; ++i) {
        if (discarded[static_cast<size_t>(i)] != -1) continue;
        for (size_t t = 0; t < p.augmented.strands.size(); ++t) {
            const auto& st = p.augmented.strands[t];
            if (!st.closed && st.color.kind == Color::Arc && st.color.index == i + 1)
                discarded[static_cast<size_t>(i)] = static_cast<int>(t);
        }
    }
    detail_covers::CoverBuilder builder(base, p, n, discarded);
    auto res = builder.run();

    auto v = validate(res.diagram);
    if (!v.failures.empty()) {
        std::string msg = "branched_cover: output failed validation:";
        for (auto& f : v.failures) msg += " [" + f + "]";
        throw ValidationError(msg);
    }
    auto pb = parameters(base), pc = parameters(res.diagram);
    check_valid(pc.g == n * pb.g + (n - 1) * (pb.b - 1), "branched_cover: genus law violated");
    check_valid(pc.b == pb.b, "branched_cover: bridge number changed");
    for (int i = 0; i < 3; ++i) {
        check_valid(pc.c[static_cast<size_t>(i)] == pb.c[static_cast<size_t>(i)],
                    "branched_cover: patch count changed");
        check_valid(pc.k[static_cast<size_t>(i)] ==
                        n * pb.k[static_cast<size_t>(i)] +
                            (n - 1) * (pb.c[static_cast<size_t>(i)] - 1),
                    "branched_cover: handle count law violated");
    }
    check_valid(topology(res.diagram.map).euler ==
                    n * topology(base.map).euler - (n - 1) * 2 * pb.b,
                "branched_cover: Riemann-Hurwitz violated");
    return res;
}

/// Search for a pairing admissible for an n-fold cover, seeding with each
/// color's shadow arcs in turn.
inline Pairing find_admissible_pairing(const ShadowDiagram& d, int n) {
    std::vector<std::string> attempts;
    for (int color : {2, 1, 3}) {
        Pairing p = pairing_from_arcs(d, color);
        auto rep = pairing_admissibility(d, p, n);
        if (rep.admissible) return p;
        std::string line = "color " + std::to_string(color) + " residues:";
        for (auto& c : rep.curves) line += " " + std::to_string(c.residue);
        attempts.push_back(line);
    }
    std::string msg = "no admissible pairing found for n = " + std::to_string(n);
    for (auto& a : attempts) msg += "; " + a;
    throw NoPairingFoundError(msg);
}

} // namespace bridgetri
