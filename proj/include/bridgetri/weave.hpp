#pragma once

#include "diagram.hpp"

namespace bridgetri {

/// Editable strand-level view of a shadow diagram.  A weave lists, per
/// strand, the sequence of nodes it passes through, and per node the
/// counterclockwise rotation of strand ends ("germs").  Segments between
/// consecutive visits become map edges on conversion; geometry is dropped.
///
/// Germ indexing: {s, v, out} is the end of strand s at visit v of its
/// visit list — the tail of the segment starting there when out is true,
/// the head of the segment arriving there otherwise.  Closed strands store
/// each node once (m visits = m segments); open strands store m+1 visits
/// for m segments.
struct Weave {
    struct Germ {
        int s = -1;
        int v = -1;
        bool out = false;
        friend bool operator==(const Germ& a, const Germ& b) {
            return a.s == b.s && a.v == b.v && a.out == b.out;
        }
    };
    struct WStrand {
        Color color;
        bool closed = false;
        bool oriented = true;
        bool dead = false;
        std::vector<int> visits;
    };
    std::vector<WStrand> strands;
    std::vector<std::vector<Germ>> node_germs; // ccw rotation per node
    std::vector<int> node_sigma;               // bridge sign, 0 elsewhere
    std::vector<bool> node_dead;
    std::array<bool, 3> full_shadows{true, true, true};

    int segment_count(int s) const {
        const auto& st = strands[s];
        return static_cast<int>(st.visits.size()) - (st.closed ? 0 : 1);
    }
    /// Visit index receiving the head of segment k of strand s.
    int head_visit(int s, int k) const {
        return strands[s].closed ? (k + 1) % static_cast<int>(strands[s].visits.size()) : k + 1;
    }
    /// Segment whose head is at visit v (in-germ), -1 for an arc's first visit.
    int in_segment(int s, int v) const {
        if (strands[s].closed) {
            int m = static_cast<int>(strands[s].visits.size());
            return (v - 1 + m) % m;
        }
        return v - 1;
    }

    int new_node(std::vector<Germ> germs, int sigma = 0) {
        node_germs.push_back(std::move(germs));
        node_sigma.push_back(sigma);
        node_dead.push_back(false);
        return static_cast<int>(node_germs.size()) - 1;
    }

    Germ* find_germ(int node, const Germ& g) {
        for (auto& x : node_germs[node])
            if (x == g) return &x;
        return nullptr;
    }

    /// Terminal germs of an open strand: (tail germ node slot, head germ).
    Germ tail_germ(int s) const { return {s, 0, true}; }
    Germ head_germ(int s) const {
        return {s, static_cast<int>(strands[s].visits.size()) - 1, false};
    }
};

inline Weave weave_from_diagram(const ShadowDiagram& d) {
    Weave w;
    w.full_shadows = d.full_shadows;
    const auto& m = d.map;
    // dart -> (strand, position)
    std::vector<std::pair<int, int>> at(m.dart_count(), {-1, -1});
    for (size_t s = 0; s < d.strands.size(); ++s)
        for (size_t k = 0; k < d.strands[s].darts.size(); ++k)
            at[d.strands[s].darts[k]] = {static_cast<int>(s), static_cast<int>(k)};
    for (const auto& st : d.strands) {
        Weave::WStrand ws;
        ws.color = st.color;
        ws.closed = st.closed;
        ws.oriented = st.oriented;
        for (int dart : st.darts) ws.visits.push_back(m.vertex_of(dart));
        if (!st.closed) ws.visits.push_back(m.head_vertex(st.darts.back()));
        w.strands.push_back(std::move(ws));
    }
    w.node_germs.resize(static_cast<size_t>(m.vertex_count()));
    w.node_sigma.assign(static_cast<size_t>(m.vertex_count()), 0);
    w.node_dead.assign(static_cast<size_t>(m.vertex_count()), false);
    for (int v = 0; v < m.vertex_count(); ++v)
        for (int dart : m.vertex_cycle(v)) {
            auto [s, k] = at[dart];
            if (s >= 0) {
                w.node_germs[v].push_back({s, k, true});
            } else {
                auto [s2, k2] = at[m.twin_total(dart)];
                require(s2 >= 0, "weave_from_diagram: dart not on any strand");
                w.node_germs[v].push_back({s2, w.head_visit(s2, k2), false});
            }
        }
    for (const auto& bp : d.bridge_points) w.node_sigma[bp.vertex] = bp.sigma;
    return w;
}

inline ShadowDiagram weave_to_diagram(const Weave& w) {
    // segment -> edge ids
    std::vector<int> edge_off(w.strands.size(), 0);
    int E = 0;
    for (size_t s = 0; s < w.strands.size(); ++s) {
        if (w.strands[s].dead) continue;
        edge_off[s] = E;
        E += w.segment_count(static_cast<int>(s));
    }
    auto germ_dart = [&](const Weave::Germ& g) {
        require(!w.strands[g.s].dead, "weave: germ on a dead strand");
        if (g.out) {
            require(w.strands[g.s].closed ||
                        g.v + 1 < static_cast<int>(w.strands[g.s].visits.size()),
                    "weave: outgoing germ at an arc head");
            return 2 * (edge_off[g.s] + g.v);
        }
        int seg = w.in_segment(g.s, g.v);
        require(seg >= 0, "weave: incoming germ at an arc tail");
        return 2 * (edge_off[g.s] + seg) + 1;
    };

    std::vector<std::pair<int, int>> pairs;
    for (int e = 0; e < E; ++e) pairs.push_back({2 * e, 2 * e + 1});
    std::vector<std::vector<int>> rot;
    std::vector<int> dart_node(2 * E, -1);
    for (size_t n = 0; n < w.node_germs.size(); ++n) {
        if (w.node_dead[n]) continue;
        std::vector<int> cyc;
        for (const auto& g : w.node_germs[n]) {
            int dart = germ_dart(g);
            require(dart_node[dart] == -1, "weave: germ listed twice");
            dart_node[dart] = static_cast<int>(n);
            cyc.push_back(dart);
        }
        rot.push_back(std::move(cyc));
    }
    for (int dart = 0; dart < 2 * E; ++dart)
        require(dart_node[dart] >= 0, "weave: segment end not attached to a node");
    // consistency: both ends of every segment sit at the declared visits
    for (size_t s = 0; s < w.strands.size(); ++s) {
        if (w.strands[s].dead) continue;
        for (int k = 0; k < w.segment_count(static_cast<int>(s)); ++k) {
            require(dart_node[2 * (edge_off[s] + k)] == w.strands[s].visits[static_cast<size_t>(k)],
                    "weave: segment tail at the wrong node");
            int hv = w.head_visit(static_cast<int>(s), k);
            require(dart_node[2 * (edge_off[s] + k) + 1] ==
                        w.strands[s].visits[static_cast<size_t>(hv)],
                    "weave: segment head at the wrong node");
        }
    }

    ShadowDiagram d;
    d.map = build_map(2 * E, pairs, rot);
    d.full_shadows = w.full_shadows;
    for (size_t s = 0; s < w.strands.size(); ++s) {
        if (w.strands[s].dead) continue;
        Strand st;
        st.color = w.strands[s].color;
        st.closed = w.strands[s].closed;
        st.oriented = w.strands[s].oriented;
        for (int k = 0; k < w.segment_count(static_cast<int>(s)); ++k)
            st.darts.push_back(2 * (edge_off[s] + k));
        d.strands.push_back(std::move(st));
    }
    // bridge points: nodes where some arc-kind strand terminates.  The map
    // renumbers vertices; translate via any dart at the node.
    std::vector<int> node_vertex(w.node_germs.size(), -1);
    for (int dart = 0; dart < 2 * E; ++dart)
        node_vertex[static_cast<size_t>(dart_node[dart])] = d.map.vertex_of(dart);
    for (size_t n = 0; n < w.node_germs.size(); ++n) {
        if (w.node_dead[n]) continue;
        bool terminal = false;
        for (const auto& g : w.node_germs[n]) {
            const auto& st = w.strands[g.s];
            if (st.closed) continue;
            if (st.color.kind != Color::Arc && st.color.kind != Color::Pairing) continue;
            if ((g.out && g.v == 0) ||
                (!g.out && g.v + 1 == static_cast<int>(st.visits.size())))
                terminal = true;
        }
        if (terminal) d.bridge_points.push_back({node_vertex[n], w.node_sigma[n]});
    }
    return d;
}

} // namespace bridgetri
