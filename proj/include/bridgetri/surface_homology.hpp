#pragma once

#include "combinatorial_map.hpp"
#include "homology_core.hpp"

#include <optional>
#include <vector>

namespace bridgetri {

/// A homology basis for a closed connected oriented map: 2g dart cycles
/// together with their intersection pairing matrix.
struct H1Basis {
    std::vector<std::vector<int>> cycles;
    Mat J{0, 0}; // J(i,j) = <cycle_i, cycle_j>
};

/// Signed intersection number <z, w> of two closed dart cycles.  The cycles
/// may share edges: w is implicitly pushed off to its own left, so it meets
/// z transversally, and the crossings are read off from the rotation data
/// at the vertices w passes through.
inline Int intersection_number(const CombinatorialMap& m, const std::vector<int>& z,
                               const std::vector<int>& w) {
    require(!z.empty() && !w.empty(), "intersection_number: empty cycle");
    std::vector<Int> wz(m.dart_count(), 0);
    for (int d : z) {
        require(d >= 0 && d < m.dart_count(), "intersection_number: dart out of range");
        wz[d] += 1;
    }
    Int total = 0;
    int k = static_cast<int>(w.size());
    for (int i = 0; i < k; ++i) {
        int din = w[i];
        int dout = w[(i + 1) % k];
        require(m.head_vertex(din) == m.vertex_of(dout),
                "intersection_number: w is not a closed dart cycle");
        // the pushed-off copy sweeps through every germ strictly ccw-between
        // dout and twin(din); it crosses outgoing z-darts negatively and
        // incoming ones positively
        int stop = m.twin_total(din);
        int guard = 0;
        for (int g = m.rot(dout); g != stop; g = m.rot(g)) {
            require(++guard <= m.dart_count(), "intersection_number: rotation does not close");
            total += wz[m.twin_total(g)] - wz[g];
        }
    }
    return total;
}

namespace detail_h1 {

/// Dart path from u to v through a spanning tree given by, per vertex, the
/// dart pointing from its parent to it (-1 at the root).
inline std::vector<int> tree_path(const CombinatorialMap& m, const std::vector<int>& parent_dart,
                                  const std::vector<int>& depth, int u, int v) {
    std::vector<int> up;   // darts walking from u toward the root
    std::vector<int> down; // darts walking from v toward the root
    int a = u, b = v;
    while (depth[a] > depth[b]) {
        up.push_back(m.twin_total(parent_dart[a]));
        a = m.vertex_of(parent_dart[a]);
    }
    while (depth[b] > depth[a]) {
        down.push_back(parent_dart[b]);
        b = m.vertex_of(parent_dart[b]);
    }
    while (a != b) {
        up.push_back(m.twin_total(parent_dart[a]));
        a = m.vertex_of(parent_dart[a]);
        down.push_back(parent_dart[b]);
        b = m.vertex_of(parent_dart[b]);
    }
    up.insert(up.end(), down.rbegin(), down.rend());
    return up;
}

} // namespace detail_h1

/// Tree-cotree homology basis of a closed connected map.
inline H1Basis h1_basis(const CombinatorialMap& m) {
    auto top = topology(m);
    require(top.boundary_cycles == 0, "h1_basis: map has boundary");
    require(top.components == 1, "h1_basis: map is disconnected");

    // spanning tree of the vertex graph (flags stored per dart, set on both
    // darts of an edge)
    std::vector<int> parent_dart(top.V, -1), depth(top.V, -1);
    std::vector<char> in_tree(m.dart_count(), 0), in_cotree(m.dart_count(), 0);
    std::vector<int> queue = {0};
    depth[0] = 0;
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        int v = queue[qi];
        for (int d : m.vertex_cycle(v)) {
            int u = m.head_vertex(d);
            if (depth[u] >= 0) continue;
            depth[u] = depth[v] + 1;
            parent_dart[u] = d;
            in_tree[d] = in_tree[m.twin_total(d)] = 1;
            queue.push_back(u);
        }
    }

    // spanning cotree of the face graph on the remaining edges
    int F = top.F;
    std::vector<char> face_seen(F, 0);
    std::vector<int> fq = {0};
    face_seen[0] = 1;
    for (size_t qi = 0; qi < fq.size(); ++qi) {
        int f = fq[qi];
        for (int d : m.face_cycles()[f]) {
            if (in_tree[d]) continue;
            int g = m.face_of(m.twin_total(d));
            if (face_seen[g]) continue;
            face_seen[g] = 1;
            in_cotree[d] = in_cotree[m.twin_total(d)] = 1;
            fq.push_back(g);
        }
    }

    H1Basis basis;
    for (int d = 0; d < m.dart_count(); ++d) {
        if (d > m.twin_total(d)) continue; // one dart per edge
        if (in_tree[d] || in_cotree[d]) continue;
        std::vector<int> cyc = {d};
        auto back = detail_h1::tree_path(m, parent_dart, depth, m.head_vertex(d), m.vertex_of(d));
        cyc.insert(cyc.end(), back.begin(), back.end());
        basis.cycles.push_back(std::move(cyc));
    }
    int n = static_cast<int>(basis.cycles.size());
    require(n == 2 * top.genus, "h1_basis: tree-cotree rank mismatch");
    basis.J = Mat(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            basis.J(i, j) = intersection_number(m, basis.cycles[i], basis.cycles[j]);
    return basis;
}

/// Coordinates of a closed dart cycle in an H1 basis (solves J c = p where
/// p is the vector of pairings of the basis cycles against the input).
inline std::vector<Int> cycle_class(const CombinatorialMap& m, const H1Basis& basis,
                                    const std::vector<int>& cycle) {
    int n = basis.J.rows;
    std::vector<Int> p(n);
    for (int i = 0; i < n; ++i) p[i] = intersection_number(m, basis.cycles[i], cycle);
    auto sol = solve_integer(basis.J, p);
    require(static_cast<bool>(sol), "cycle_class: pairing matrix is degenerate");
    return *sol;
}

/// Antisymmetric dart chain built from closed dart cycles: +1 along each
/// traversed dart, -1 on its twin, accumulated with multiplicity.
inline std::vector<Int> dart_chain(const CombinatorialMap& m,
                                   const std::vector<std::vector<int>>& cycles,
                                   const std::vector<Int>& mult) {
    require(cycles.size() == mult.size(), "dart_chain: size mismatch");
    std::vector<Int> chain(m.dart_count(), 0);
    for (size_t i = 0; i < cycles.size(); ++i)
        for (int d : cycles[i]) {
            chain[d] += mult[i];
            chain[m.twin_total(d)] -= mult[i];
        }
    return chain;
}

/// Integer weights per face whose boundary equals the given antisymmetric
/// dart chain (flow along each dart), with face 0 normalized to weight
/// zero.  Returns nothing when the chain does not bound.
inline std::optional<std::vector<Int>> two_chain_with_boundary(const CombinatorialMap& m,
                                                               const std::vector<Int>& chain) {
    auto top = topology(m);
    require(top.boundary_cycles == 0 && top.components == 1,
            "two_chain_with_boundary: need a closed connected map");
    require(static_cast<int>(chain.size()) == m.dart_count(),
            "two_chain_with_boundary: chain size mismatch");
    for (int d = 0; d < m.dart_count(); ++d)
        require(chain[d] == -chain[m.twin_total(d)], "two_chain_with_boundary: chain not antisymmetric");
    // crossing dart d from its left face to its right face drops the weight
    // by the flow along d: phi[face(d)] - phi[face(twin d)] = chain[d]
    std::vector<Int> phi(top.F, 0);
    std::vector<char> known(top.F, 0);
    known[0] = 1;
    std::vector<int> fq = {0};
    for (size_t qi = 0; qi < fq.size(); ++qi) {
        int f = fq[qi];
        for (int d : m.face_cycles()[f]) {
            int g = m.face_of(m.twin_total(d));
            Int val = phi[f] - chain[d];
            if (!known[g]) {
                known[g] = 1;
                phi[g] = val;
                fq.push_back(g);
            } else if (phi[g] != val) {
                return std::nullopt;
            }
        }
    }
    return phi;
}

/// Invariant factors of the homology groups computed from three Lagrangian
/// systems of closed curves, via the five-term complex whose middle maps are
/// (x,y) -> x+y and x -> <-, x>.
struct TrisectionHomology {
    CokernelInvariants h1; // at the Hom slot
    CokernelInvariants h2; // middle quotient
    int h3_rank = 0;       // kernel of the sum map (free)
};

inline TrisectionHomology trisection_homology_from_classes(const std::vector<std::vector<Int>>& la,
                                                           const std::vector<std::vector<Int>>& lb,
                                                           const std::vector<std::vector<Int>>& lc,
                                                           const Mat& J) {
    int n = J.rows;
    IntegerLattice La(n, la), Lb(n, lb), Lc(n, lc);
    IntegerLattice ab = IntegerLattice::sum(La, Lb);
    IntegerLattice ca = IntegerLattice::intersection(Lc, La);
    IntegerLattice cb = IntegerLattice::intersection(Lc, Lb);
    IntegerLattice num = IntegerLattice::intersection(Lc, ab);
    IntegerLattice den = IntegerLattice::sum(ca, cb);
    TrisectionHomology out;
    out.h2 = num.quotient(den);
    out.h3_rank = IntegerLattice::intersection(ca, cb).rank();
    // H1: cokernel of Lc -> Hom(La n Lb, Z), x -> <u, x> over a basis u
    IntegerLattice meet = IntegerLattice::intersection(La, Lb);
    Mat d2(meet.rank(), Lc.rank());
    for (int r = 0; r < meet.rank(); ++r)
        for (int c = 0; c < Lc.rank(); ++c) {
            Int s = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    s += meet.generators()[r][i] * J.a[i][j] * Lc.generators()[c][j];
            d2(r, c) = s;
        }
    out.h1 = cokernel_invariants(d2);
    return out;
}

/// Homological handlebody defect: the free rank of Z^2g / (L_i + L_{i+1}).
inline int homological_k(const std::vector<std::vector<Int>>& li,
                         const std::vector<std::vector<Int>>& lj, int ambient) {
    IntegerLattice s = IntegerLattice::sum(IntegerLattice(ambient, li), IntegerLattice(ambient, lj));
    return s.ambient_quotient().free_rank;
}

} // namespace bridgetri
