#pragma once

#include "base.hpp"

#include <map>
#include <optional>
#include <tuple>
#include <vector>

namespace bridgetri {

/// Orientation-preserving similarity of the plane, stored as a complex
/// number q: v -> q * v (as complex multiplication).  Always exact.
struct Sim {
    Rat re = 1, im = 0;

    Vec2 apply(const Vec2& v) const { return {re * v.x - im * v.y, re * v.y + im * v.x}; }

    static Sim ratio(const Vec2& from, const Vec2& to) {
        // complex division to / from
        Rat n = from.x * from.x + from.y * from.y;
        require(n != 0, "similarity from zero vector");
        return Sim{(to.x * from.x + to.y * from.y) / n, (to.y * from.x - to.x * from.y) / n};
    }

    friend Sim operator*(const Sim& a, const Sim& b) {
        return Sim{a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
};

/// Exact comparison of directions by counterclockwise angle from east,
/// in [0, 2pi).  Returns -1, 0, +1.
inline int angle_compare(const Vec2& u, const Vec2& v) {
    auto half = [](const Vec2& w) {
        // 0 for angle in [0, pi), 1 for [pi, 2pi)
        if (w.y != 0) return w.y > 0 ? 0 : 1;
        return w.x > 0 ? 0 : 1;
    };
    int hu = half(u), hv = half(v);
    if (hu != hv) return hu < hv ? -1 : 1;
    Rat c = cross(u, v);
    if (c > 0) return -1;
    if (c < 0) return 1;
    return 0;
}

/// True when direction w lies strictly inside the ccw sector from a to b
/// (a == b means the full circle).
inline bool in_ccw_sector(const Vec2& a, const Vec2& b, const Vec2& w) {
    int ab = angle_compare(a, b);
    if (ab == 0) return angle_compare(a, w) != 0; // full turn, excluding the ray itself
    int aw = angle_compare(a, w), wb = angle_compare(w, b);
    if (ab < 0) return aw < 0 && wb < 0;
    return aw < 0 || wb < 0;
}

struct Seg {
    Vec2 a, b;
    Vec2 dir() const { return b - a; }
    Vec2 at(const Rat& t) const { return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}; }
};

/// Proper or degenerate intersection of two segments.
struct SegHit {
    Rat t, u; // params on the first and second segment
    Vec2 p;
};

/// Exact intersection point of non-parallel segment supporting lines,
/// reported when both parameters are within [0,1].
inline std::optional<SegHit> seg_intersect(const Seg& s1, const Seg& s2) {
    Vec2 r = s1.dir(), s = s2.dir();
    Rat den = cross(r, s);
    if (den == 0) return std::nullopt;
    Vec2 qp = s2.a - s1.a;
    Rat t = cross(qp, s) / den;
    Rat u = cross(qp, r) / den;
    if (t < 0 || t > 1 || u < 0 || u > 1) return std::nullopt;
    return SegHit{t, u, s1.at(t)};
}

inline bool collinear_overlap(const Seg& s1, const Seg& s2) {
    Vec2 r = s1.dir(), s = s2.dir();
    if (cross(r, s) != 0) return false;
    if (cross(s2.a - s1.a, r) != 0) return false;
    // project s2 endpoints on s1
    Rat rr = dot(r, r);
    Rat t0 = dot(s2.a - s1.a, r) / rr;
    Rat t1 = dot(s2.b - s1.a, r) / rr;
    if (t0 > t1) std::swap(t0, t1);
    return t1 > 0 && t0 < 1; // overlap in more than a point
}

/// Rectangular chart [0,w] x [0,h].  Charts are glued along seams.
struct Chart {
    Rat w, h;
};

/// A directed seam-crossing rule: a path hitting `seg` (in chart `chart`)
/// while moving toward side `side` (side = sign of cross(seg direction,
/// velocity)) continues in chart `to_chart` on segment `to_seg`, at the same
/// parameter (or 1-t when `flip`), with velocity transformed by the
/// similarity taking seg's direction to (+/-) to_seg's direction.
struct SeamRule {
    int chart = 0;
    Seg seg;
    int side = 1;
    int to_chart = 0;
    Seg to_seg;
    bool flip = false;

    Sim transform() const {
        Vec2 d = to_seg.dir();
        if (flip) d = Vec2{-d.x, -d.y};
        return Sim::ratio(seg.dir(), d);
    }
    Rat map_param(const Rat& t) const { return flip ? Rat(1) - t : t; }
};

struct ChartPoint {
    int chart = 0;
    Vec2 p;
    friend bool operator==(const ChartPoint& a, const ChartPoint& b) {
        return a.chart == b.chart && a.p == b.p;
    }
    friend bool operator<(const ChartPoint& a, const ChartPoint& b) {
        return std::tie(a.chart, a.p.x, a.p.y) < std::tie(b.chart, b.p.x, b.p.y);
    }
};

/// A collection of charts and seam rules describing a closed oriented
/// surface, together with helpers for common gluings.
struct Scene {
    std::vector<Chart> charts;
    std::vector<SeamRule> rules;

    int add_chart(Rat w, Rat h) {
        charts.push_back({std::move(w), std::move(h)});
        return static_cast<int>(charts.size()) - 1;
    }

    /// Two-sided identification of segments (both crossing directions); the
    /// gluing matches seg1 with seg2 directly (t to t) so that crossing
    /// seg1 toward its left emerges from seg2 moving away toward seg2's
    /// left.  Suitable for identified chart edges (e.g. torus sides).
    void add_identification(int c1, Seg s1, int c2, Seg s2, bool flip = false) {
        rules.push_back({c1, s1, +1, c2, s2, flip});
        rules.push_back({c1, s1, -1, c2, s2, flip});
        if (!(c1 == c2 && s1.a == s2.a && s1.b == s2.b)) {
            rules.push_back({c2, s2, +1, c1, s1, flip});
            rules.push_back({c2, s2, -1, c1, s1, flip});
        }
    }

    /// One-sided gluing: crossing `s1` in chart c1 toward side `side1`
    /// continues from `s2` in chart c2 (and back).  Used for slits where the
    /// two banks of a cut go to different partners.
    void add_bank_gluing(int c1, Seg s1, int side1, int c2, Seg s2, int side2, bool flip = false) {
        // Crossing s1 toward side1 emerges at s2 moving toward -side2's
        // opposite... the strand leaves side2: it arrives moving away from
        // s2 into side2's complement?  Convention: the strand emerges moving
        // toward side2.
        // Consistency (derived from the similarity): arrival side equals
        // side1 when !flip and -side1 when flip; callers must match.
        require((flip ? -side1 : side1) == side2, "bank gluing sides inconsistent with flip");
        rules.push_back({c1, s1, side1, c2, s2, flip});
        rules.push_back({c2, s2, -side2, c1, s1, flip});
    }

    /// Standard torus: a single chart with left-right and bottom-top edges
    /// identified by translation.
    static Scene torus(Rat w, Rat h) {
        Scene sc;
        int c = sc.add_chart(w, h);
        Seg left{{Rat(0), Rat(0)}, {Rat(0), h}};
        Seg right{{w, Rat(0)}, {w, h}};
        Seg bottom{{Rat(0), Rat(0)}, {w, Rat(0)}};
        Seg top{{Rat(0), h}, {w, h}};
        sc.add_identification(c, right, c, left);
        sc.add_identification(c, top, c, bottom);
        return sc;
    }

    /// Sphere as two squares glued along all four edges: chart 1 is the
    /// "back" with reversed-orientation content; gluing uses flips so the
    /// doubled square is an oriented sphere.
    static Scene sphere(Rat w, Rat h) {
        // Double of the rectangle: two copies glued along the common
        // boundary.  Crossing the right edge of the front chart emerges on
        // the right edge of the back chart.  To keep both charts positively
        // oriented, the back chart is the mirror image (x -> w - x) of the
        // front's far side, which makes every edge gluing a flip of the
        // vertical edges and a direct match of horizontals... concretely:
        // front (x,y) and back (x,y) represent the doubled surface with the
        // back glued by the mirror x -> w - x; each boundary edge of the
        // front glues to the mirrored edge of the back.
        Scene sc;
        int f = sc.add_chart(w, h);
        int b = sc.add_chart(w, h);
        Seg fleft{{Rat(0), Rat(0)}, {Rat(0), h}};
        Seg fright{{w, Rat(0)}, {w, h}};
        Seg fbottom{{Rat(0), Rat(0)}, {w, Rat(0)}};
        Seg ftop{{Rat(0), h}, {w, h}};
        // mirrored segments on the back chart
        Seg bleft{{w, Rat(0)}, {w, h}};      // image of front-left
        Seg bright{{Rat(0), Rat(0)}, {Rat(0), h}};
        Seg bbottom{{w, Rat(0)}, {Rat(0), Rat(0)}};
        Seg btop{{w, h}, {Rat(0), h}};
        sc.add_identification(f, fleft, b, bleft);
        sc.add_identification(f, fright, b, bright);
        sc.add_identification(f, fbottom, b, bbottom);
        sc.add_identification(f, ftop, b, btop);
        return sc;
    }
};

/// One chart-confined straight piece of a traced path.
struct PathPiece {
    int chart;
    Vec2 p, q;
};

/// A path traced through seams: consecutive pieces are joined either at a
/// bend (same chart) or across a seam.
struct TracedPath {
    std::vector<PathPiece> pieces;
    bool closed = false;
};

/// Trace a polyline given in the virtual (unfolded) coordinates of a start
/// chart through the seam rules of the scene, splitting it at every seam
/// crossing.  For closed paths the final point must land exactly on the
/// first (same chart and coordinates).
inline TracedPath trace_path(const Scene& sc, int chart, std::vector<Vec2> waypoints, bool closed) {
    require(waypoints.size() >= 2, "trace_path: need at least two waypoints");
    TracedPath out;
    out.closed = closed;
    Sim q{1, 0};
    Vec2 shift{0, 0}; // current transform: p -> q*p + shift
    auto xform = [&](const Vec2& v) {
        Vec2 r{q.re * v.x - q.im * v.y, q.re * v.y + q.im * v.x};
        return Vec2{r.x + shift.x, r.y + shift.y};
    };
    int cur_chart = chart;
    Vec2 cur = xform(waypoints[0]);
    for (size_t w = 1; w < waypoints.size(); ++w) {
        bool last_leg = w + 1 == waypoints.size();
        Vec2 target = xform(waypoints[w]);
        int guard = 0;
        while (true) {
            require(++guard < 10000, "trace_path: too many seam crossings in one segment");
            Seg motion{cur, target};
            if (motion.dir() == Vec2{0, 0}) break;
            // earliest seam crossing strictly after the start
            const SeamRule* hit_rule = nullptr;
            Rat hit_t, hit_u;
            for (const auto& r : sc.rules) {
                if (r.chart != cur_chart) continue;
                auto h = seg_intersect(motion, r.seg);
                if (!h) continue;
                if (h->t == 0) continue; // leaving exactly from the seam
                int side = sgn(cross(r.seg.dir(), motion.dir()));
                if (side != r.side) continue;
                if (h->t == 1) {
                    // the piece terminates exactly on the seam: legal only
                    // for a path endpoint (e.g. an arc ending at a slit end)
                    require(last_leg, "trace_path: interior waypoint lies on a seam");
                    continue;
                }
                require(h->u > 0 && h->u < 1, "trace_path: crossing at a seam endpoint");
                if (!hit_rule || h->t < hit_t) {
                    hit_rule = &r;
                    hit_t = h->t;
                    hit_u = h->u;
                }
            }
            if (!hit_rule) {
                out.pieces.push_back({cur_chart, cur, target});
                cur = target;
                break;
            }
            Vec2 hp = motion.at(hit_t);
            if (!(hp == cur)) out.pieces.push_back({cur_chart, cur, hp});
            // teleport
            Sim step = hit_rule->transform();
            Vec2 land = hit_rule->to_seg.at(hit_rule->map_param(hit_u));
            // new global transform: first old, then the seam step around hp
            // p -> step*(p - hp) + land
            Vec2 sh{land.x - (step.re * hp.x - step.im * hp.y),
                    land.y - (step.re * hp.y + step.im * hp.x)};
            // compose with existing: p -> step*(q p + shift) + sh2
            shift = Vec2{step.re * shift.x - step.im * shift.y + sh.x,
                         step.re * shift.y + step.im * shift.x + sh.y};
            q = step * q;
            cur_chart = hit_rule->to_chart;
            cur = land;
            target = xform(waypoints[w]);
        }
    }
    if (closed) {
        require(!out.pieces.empty() && cur_chart == chart && cur == waypoints[0],
                "trace_path: closed path does not return to its start");
    }
    return out;
}

} // namespace bridgetri
