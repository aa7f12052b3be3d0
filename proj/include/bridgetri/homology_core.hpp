#pragma once

#include "base.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace bridgetri {

/// Dense integer matrix with exact entries.
struct Mat {
    int rows = 0, cols = 0;
    std::vector<std::vector<Int>> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(r, std::vector<Int>(c, 0)) {}

    Int& operator()(int i, int j) { return a[i][j]; }
    const Int& operator()(int i, int j) const { return a[i][j]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    Mat transposed() const {
        Mat t(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) t(j, i) = a[i][j];
        return t;
    }

    friend Mat operator*(const Mat& x, const Mat& y) {
        require(x.cols == y.rows, "matrix product shape mismatch");
        Mat z(x.rows, y.cols);
        for (int i = 0; i < x.rows; ++i)
            for (int k = 0; k < x.cols; ++k) {
                if (x(i, k) == 0) continue;
                for (int j = 0; j < y.cols; ++j) z(i, j) += x(i, k) * y(k, j);
            }
        return z;
    }

    friend bool operator==(const Mat& x, const Mat& y) {
        return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
    }

    std::vector<Int> apply(const std::vector<Int>& v) const {
        require(static_cast<int>(v.size()) == cols, "matrix-vector shape mismatch");
        std::vector<Int> r(rows, 0);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                if (a[i][j] != 0) r[i] += a[i][j] * v[j];
        return r;
    }
};

/// Smith normal form U * M * V = S with U, V unimodular and S diagonal with
/// a divisibility chain d1 | d2 | ... .
struct Smith {
    Mat S, U, V;
    std::vector<Int> diag; // nonzero diagonal entries, divisibility chain
    int rank() const { return static_cast<int>(diag.size()); }
};

inline Smith smith_normal_form(Mat m) {
    const int r = m.rows, c = m.cols;
    Smith out;
    out.U = Mat::identity(r);
    out.V = Mat::identity(c);
    Mat& s = m;
    auto swap_rows = [&](int i, int j) {
        std::swap(s.a[i], s.a[j]);
        std::swap(out.U.a[i], out.U.a[j]);
    };
    auto swap_cols = [&](int i, int j) {
        for (int k = 0; k < r; ++k) std::swap(s(k, i), s(k, j));
        for (int k = 0; k < c; ++k) std::swap(out.V(k, i), out.V(k, j));
    };
    auto addmul_row = [&](int dst, int src, const Int& f) {
        for (int k = 0; k < c; ++k) s(dst, k) += f * s(src, k);
        for (int k = 0; k < r; ++k) out.U(dst, k) += f * out.U(src, k);
    };
    auto addmul_col = [&](int dst, int src, const Int& f) {
        for (int k = 0; k < r; ++k) s(k, dst) += f * s(k, src);
        for (int k = 0; k < c; ++k) out.V(k, dst) += f * out.V(k, src);
    };
    auto negate_row = [&](int i) {
        for (int k = 0; k < c; ++k) s(i, k) = -s(i, k);
        for (int k = 0; k < r; ++k) out.U(i, k) = -out.U(i, k);
    };

    int t = 0;
    const int nmin = std::min(r, c);
    while (t < nmin) {
        // find a pivot: smallest nonzero absolute value in the remaining block
        int pi = -1, pj = -1;
        Int best = 0;
        for (int i = t; i < r; ++i)
            for (int j = t; j < c; ++j) {
                if (s(i, j) == 0) continue;
                Int v = abs(s(i, j));
                if (pi == -1 || v < best) {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        if (pi == -1) break;
        swap_rows(t, pi);
        swap_cols(t, pj);
        bool again = true;
        while (again) {
            again = false;
            for (int i = t + 1; i < r; ++i) {
                if (s(i, t) == 0) continue;
                Int q = s(i, t) / s(t, t);
                addmul_row(i, t, -q);
                if (s(i, t) != 0) {
                    swap_rows(t, i);
                    again = true;
                }
            }
            for (int j = t + 1; j < c; ++j) {
                if (s(t, j) == 0) continue;
                Int q = s(t, j) / s(t, t);
                addmul_col(j, t, -q);
                if (s(t, j) != 0) {
                    swap_cols(t, j);
                    again = true;
                }
            }
        }
        if (s(t, t) < 0) negate_row(t);
        // enforce divisibility of the remaining block by the pivot
        bool redo = false;
        for (int i = t + 1; i < r && !redo; ++i)
            for (int j = t + 1; j < c && !redo; ++j)
                if (s(i, j) % s(t, t) != 0) {
                    addmul_row(t, i, 1);
                    redo = true;
                }
        if (redo) continue;
        ++t;
    }
    for (int i = 0; i < nmin; ++i)
        if (s(i, i) != 0) out.diag.push_back(s(i, i));
    out.S = std::move(s);
    return out;
}

/// Invariant factors of the cokernel Z^rows / im(M): torsion orders > 1
/// followed by `free_rank` zeros are summarized separately.
struct CokernelInvariants {
    std::vector<Int> torsion; // invariant factors > 1
    int free_rank = 0;
};

inline CokernelInvariants cokernel_invariants(const Mat& m) {
    auto s = smith_normal_form(m);
    CokernelInvariants inv;
    for (const auto& d : s.diag)
        if (d > 1) inv.torsion.push_back(d);
    inv.free_rank = m.rows - s.rank();
    return inv;
}

/// Solve M x = b over the integers; empty when no solution exists.
inline std::optional<std::vector<Int>> solve_integer(const Mat& m, const std::vector<Int>& b) {
    auto s = smith_normal_form(m);
    std::vector<Int> ub = s.U.apply(b);
    std::vector<Int> y(m.cols, 0);
    int nmin = std::min(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i) {
        Int d = (i < nmin) ? s.S(i, i) : Int(0);
        if (d == 0) {
            if (ub[i] != 0) return std::nullopt;
        } else {
            if (ub[i] % d != 0) return std::nullopt;
            y[i] = ub[i] / d;
        }
    }
    return s.V.apply(y);
}

/// Solve M x = b modulo n (n >= 1); empty when no solution exists.
inline std::optional<std::vector<Int>> solve_mod(const Mat& m, const std::vector<Int>& b, const Int& n) {
    require(n >= 1, "solve_mod: modulus must be positive");
    // Solve [M | nI] (x, k) = b over Z.
    Mat ext(m.rows, m.cols + m.rows);
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) ext(i, j) = m(i, j);
        ext(i, m.cols + i) = n;
    }
    auto sol = solve_integer(ext, b);
    if (!sol) return std::nullopt;
    std::vector<Int> x(sol->begin(), sol->begin() + m.cols);
    for (auto& v : x) {
        v %= n;
        if (v < 0) v += n;
    }
    return x;
}

/// Basis for the integer kernel of M (columns).
inline std::vector<std::vector<Int>> integer_kernel(const Mat& m) {
    auto s = smith_normal_form(m);
    std::vector<std::vector<Int>> ker;
    int nmin = std::min(m.rows, m.cols);
    for (int j = 0; j < m.cols; ++j) {
        bool zero = j >= nmin || s.S(j, j) == 0;
        if (!zero) continue;
        std::vector<Int> col(m.cols);
        for (int i = 0; i < m.cols; ++i) col[i] = s.V(i, j);
        ker.push_back(std::move(col));
    }
    return ker;
}

/// Sublattice of Z^n spanned by integer generator vectors.
class IntegerLattice {
public:
    IntegerLattice(int ambient, std::vector<std::vector<Int>> gens)
        : ambient_(ambient), gens_(std::move(gens)) {
        for (const auto& g : gens_)
            require(static_cast<int>(g.size()) == ambient_, "lattice generator dimension mismatch");
        reduce();
    }

    int ambient() const { return ambient_; }
    int rank() const { return static_cast<int>(gens_.size()); }
    const std::vector<std::vector<Int>>& generators() const { return gens_; }

    Mat generator_matrix() const { // columns are generators
        Mat m(ambient_, rank());
        for (int j = 0; j < rank(); ++j)
            for (int i = 0; i < ambient_; ++i) m(i, j) = gens_[j][i];
        return m;
    }

    bool contains(const std::vector<Int>& v) const {
        return static_cast<bool>(solve_integer(generator_matrix(), v));
    }

    static IntegerLattice sum(const IntegerLattice& a, const IntegerLattice& b) {
        require(a.ambient_ == b.ambient_, "lattice sum ambient mismatch");
        auto g = a.gens_;
        g.insert(g.end(), b.gens_.begin(), b.gens_.end());
        return IntegerLattice(a.ambient_, std::move(g));
    }

    static IntegerLattice intersection(const IntegerLattice& a, const IntegerLattice& b) {
        require(a.ambient_ == b.ambient_, "lattice intersection ambient mismatch");
        // kernel of [A | -B]; the A-part of each kernel vector gives a point
        // in the intersection.
        Mat ab(a.ambient_, a.rank() + b.rank());
        for (int j = 0; j < a.rank(); ++j)
            for (int i = 0; i < a.ambient_; ++i) ab(i, j) = a.gens_[j][i];
        for (int j = 0; j < b.rank(); ++j)
            for (int i = 0; i < a.ambient_; ++i) ab(i, a.rank() + j) = -b.gens_[j][i];
        std::vector<std::vector<Int>> gens;
        for (const auto& k : integer_kernel(ab)) {
            std::vector<Int> coeff(k.begin(), k.begin() + a.rank());
            std::vector<Int> pt(a.ambient_, 0);
            for (int j = 0; j < a.rank(); ++j)
                for (int i = 0; i < a.ambient_; ++i) pt[i] += coeff[j] * a.gens_[j][i];
            gens.push_back(std::move(pt));
        }
        return IntegerLattice(a.ambient_, std::move(gens));
    }

    /// Invariants of Z^ambient / L.
    CokernelInvariants ambient_quotient() const { return cokernel_invariants(generator_matrix()); }

    /// Invariants of L / M for a sublattice M of L.
    CokernelInvariants quotient(const IntegerLattice& sub) const {
        require(sub.ambient_ == ambient_, "lattice quotient ambient mismatch");
        // Express sub's generators in terms of this lattice's basis.
        Mat g = generator_matrix();
        Mat rel(rank(), sub.rank());
        for (int j = 0; j < sub.rank(); ++j) {
            auto sol = solve_integer(g, sub.gens_[j]);
            require(static_cast<bool>(sol), "quotient: argument is not a sublattice");
            for (int i = 0; i < rank(); ++i) rel(i, j) = (*sol)[i];
        }
        return cokernel_invariants(rel);
    }

private:
    void reduce() {
        // Hermite-style reduction to a basis via SNF of the generator matrix:
        // columns of U^{-1} restricted to nonzero diagonal... simpler: use
        // column operations only.  We compute a column echelon form by
        // repeated gcd elimination.
        std::vector<std::vector<Int>> cols = gens_;
        cols.erase(std::remove_if(cols.begin(), cols.end(),
                                  [](const std::vector<Int>& c) {
                                      return std::all_of(c.begin(), c.end(),
                                                         [](const Int& x) { return x == 0; });
                                  }),
                   cols.end());
        int row = 0;
        size_t done = 0;
        while (row < ambient_ && done < cols.size()) {
            // eliminate entries in `row` across columns done..end
            bool any = false;
            for (size_t j = done; j < cols.size(); ++j)
                if (cols[j][row] != 0) any = true;
            if (!any) {
                ++row;
                continue;
            }
            // gcd elimination among columns
            while (true) {
                size_t piv = done;
                Int best = 0;
                bool found = false;
                for (size_t j = done; j < cols.size(); ++j) {
                    if (cols[j][row] == 0) continue;
                    Int v = abs(cols[j][row]);
                    if (!found || v < best) {
                        best = v;
                        piv = j;
                        found = true;
                    }
                }
                std::swap(cols[done], cols[piv]);
                bool nonzero_rest = false;
                for (size_t j = done + 1; j < cols.size(); ++j) {
                    if (cols[j][row] == 0) continue;
                    Int q = cols[j][row] / cols[done][row];
                    for (int i = 0; i < ambient_; ++i) cols[j][i] -= q * cols[done][i];
                    if (cols[j][row] != 0) nonzero_rest = true;
                }
                if (!nonzero_rest) break;
            }
            if (cols[done][row] < 0)
                for (int i = 0; i < ambient_; ++i) cols[done][i] = -cols[done][i];
            ++done;
            ++row;
        }
        cols.resize(done);
        gens_ = std::move(cols);
    }

    int ambient_;
    std::vector<std::vector<Int>> gens_;
};

} // namespace bridgetri
