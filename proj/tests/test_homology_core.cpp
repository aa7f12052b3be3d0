#include <catch2/catch_amalgamated.hpp>

#include <bridgetri/homology_core.hpp>

#include <random>

using namespace bridgetri;

namespace {
Mat from_rows(std::vector<std::vector<long>> rows) {
    Mat m(static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows[0].size()));
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) m(i, j) = rows[i][j];
    return m;
}
bool is_unimodular(const Mat& m) {
    // integer inverse exists iff solve succeeds for each unit vector
    for (int i = 0; i < m.rows; ++i) {
        std::vector<Int> e(m.rows, 0);
        e[i] = 1;
        if (!solve_integer(m, e)) return false;
    }
    return true;
}
} // namespace

TEST_CASE("smith normal form on small known matrices") {
    auto s = smith_normal_form(from_rows({{2, 4}, {6, 8}}));
    REQUIRE(s.diag.size() == 2);
    CHECK(s.diag[0] == 2);
    CHECK(s.diag[1] == 4);

    auto s2 = smith_normal_form(from_rows({{1, 0}, {0, 1}}));
    REQUIRE(s2.diag.size() == 2);
    CHECK(s2.diag[0] == 1);
    CHECK(s2.diag[1] == 1);

    auto s3 = smith_normal_form(from_rows({{0, 0}, {0, 0}}));
    CHECK(s3.diag.empty());

    // divisibility chain on a classic example
    auto s4 = smith_normal_form(from_rows({{2, 0, 0}, {0, 3, 0}, {0, 0, 5}}));
    REQUIRE(s4.diag.size() == 3);
    CHECK(s4.diag[0] == 1);
    CHECK(s4.diag[2] == 30);
}

TEST_CASE("smith factors satisfy U M V = S with unimodular U, V (random)") {
    std::mt19937 rng(12345);
    std::uniform_int_distribution<int> dim(1, 5), val(-6, 6);
    for (int trial = 0; trial < 60; ++trial) {
        Mat m(dim(rng), dim(rng));
        for (int i = 0; i < m.rows; ++i)
            for (int j = 0; j < m.cols; ++j) m(i, j) = val(rng);
        auto s = smith_normal_form(m);
        CHECK(s.U * m * s.V == s.S);
        CHECK(is_unimodular(s.U));
        CHECK(is_unimodular(s.V));
        for (size_t i = 0; i + 1 < s.diag.size(); ++i) CHECK(s.diag[i + 1] % s.diag[i] == 0);
        for (int i = 0; i < std::min(s.S.rows, s.S.cols); ++i)
            for (int j = 0; j < std::min(s.S.rows, s.S.cols); ++j)
                if (i != j) CHECK(s.S(i, j) == 0);
    }
}

TEST_CASE("integer and modular solving") {
    auto m = from_rows({{2, 0}, {0, 3}});
    auto x = solve_integer(m, {4, 9});
    REQUIRE(x);
    CHECK((*x)[0] == 2);
    CHECK((*x)[1] == 3);
    CHECK_FALSE(solve_integer(m, {1, 0}));

    auto y = solve_mod(m, {1, 0}, 3); // 2x = 1 mod 3 -> x = 2
    REQUIRE(y);
    CHECK((*y)[0] == 2);
    CHECK_FALSE(solve_mod(from_rows({{2}}), {1}, 4)); // 2x = 1 mod 4 unsolvable
}

TEST_CASE("integer kernel") {
    auto ker = integer_kernel(from_rows({{1, 2, 3}}));
    CHECK(ker.size() == 2);
    for (const auto& k : ker) CHECK(k[0] + 2 * k[1] + 3 * k[2] == 0);
}

TEST_CASE("lattice operations") {
    IntegerLattice a(2, {{2, 0}, {0, 2}});
    IntegerLattice b(2, {{3, 0}});
    auto inter = IntegerLattice::intersection(a, b);
    REQUIRE(inter.rank() == 1);
    CHECK(abs(inter.generators()[0][0]) == 6);
    CHECK(inter.generators()[0][1] == 0);

    auto s = IntegerLattice::sum(a, b);
    CHECK(s.rank() == 2);
    CHECK(s.contains({1, 0})); // gcd(2,3) = 1

    auto q = a.ambient_quotient();
    REQUIRE(q.torsion.size() == 2);
    CHECK(q.torsion[0] == 2);
    CHECK(q.torsion[1] == 2);
    CHECK(q.free_rank == 0);

    IntegerLattice z4(2, {{4, 0}, {0, 4}});
    auto qq = a.quotient(z4);
    REQUIRE(qq.torsion.size() == 2);
    CHECK(qq.torsion[0] == 2);

    IntegerLattice line(3, {{1, 1, 0}});
    CHECK(line.ambient_quotient().free_rank == 2);
    CHECK(line.ambient_quotient().torsion.empty());

    // redundant generators reduce to a basis
    IntegerLattice red(2, {{1, 0}, {2, 0}, {3, 0}});
    CHECK(red.rank() == 1);
    CHECK(red.contains({1, 0}));
}
