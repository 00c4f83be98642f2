#include <doctest.h>

#include <random>

#include "pinchflow/curvature.hpp"

using namespace pinchflow;

namespace {

Rational comp(const SpaceKind& s, int i1, int a1, int i2, int a2, int i3, int a3, int i4,
              int a4) {
    return curvature_component(s, ComplexIndexQuad::holo_anti(i1, a1, i2, a2, i3, a3, i4, a4));
}

TangentMatrix random_tangent(const SpaceKind& space, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix m(space.rows(), space.cols());
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) m(r, c) = {gauss(rng), gauss(rng)};
    if (space.family == SpaceFamily::SkewII) m = 0.5 * (m - m.transpose().eval());
    if (space.family == SpaceFamily::SymIII) m = 0.5 * (m + m.transpose().eval());
    return TangentMatrix(space, m, true);
}

} // namespace

TEST_CASE("component values match the delta formula") {
    auto g11 = SpaceKind::grassmann(1, 1);
    CHECK(comp(g11, 1, 1, 1, 1, 1, 1, 1, 1) == Rational(-1));

    auto g21 = SpaceKind::grassmann(2, 1);
    CHECK(comp(g21, 1, 1, 1, 1, 2, 1, 2, 1) == Rational(-1, 2));

    auto q3 = SpaceKind::quadric(3);
    CHECK(comp(q3, 1, 1, 1, 1, 1, 1, 1, 1) == Rational(-2));
    CHECK(comp(q3, 1, 1, 1, 2, 1, 1, 1, 2) == Rational(2));
    CHECK(comp(q3, 1, 1, 1, 1, 1, 2, 1, 2) == Rational(-2));
}

TEST_CASE("type-(2,2) zero rule and index validation") {
    auto g22 = SpaceKind::grassmann(2, 2);
    ComplexIndexQuad q = ComplexIndexQuad::holo_anti(1, 1, 1, 1, 1, 1, 1, 1);
    q.slot[1].bar = BarPattern::Holo; // (h,h,h,a) vanishes
    CHECK(curvature_component(g22, q) == Rational(0));
    q.slot[1].bar = BarPattern::Anti;
    q.slot[2].bar = BarPattern::Anti; // (h,a,a,a) vanishes
    CHECK(curvature_component(g22, q) == Rational(0));

    CHECK_THROWS_AS(comp(g22, 3, 1, 1, 1, 1, 1, 1, 1), ValidationError);
    auto skew = SpaceKind::skew(3);
    CHECK_THROWS_AS(comp(skew, 1, 1, 1, 2, 1, 2, 1, 2), ValidationError); // diag pair illegal
    CHECK(comp(skew, 1, 2, 1, 2, 1, 2, 1, 2) == Rational(-1));
    auto sym = SpaceKind::sym(2);
    CHECK(comp(sym, 1, 1, 1, 1, 1, 1, 1, 1) == Rational(-1));
    CHECK_THROWS_AS(comp(sym, 2, 1, 1, 1, 1, 1, 1, 1), ValidationError);
}

TEST_CASE("component symmetry suite is exact") {
    auto spaces = {SpaceKind::grassmann(2, 2), SpaceKind::grassmann(2, 3), SpaceKind::sym(2),
                   SpaceKind::skew(3)};
    for (const auto& s : spaces) {
        for (int i1 = 1; i1 <= s.rows(); ++i1)
            for (int a1 = 1; a1 <= s.cols(); ++a1)
                for (int i2 = 1; i2 <= s.rows(); ++i2)
                    for (int a2 = 1; a2 <= s.cols(); ++a2) {
                        auto legal = [&](int i, int a) {
                            if (s.family == SpaceFamily::SkewII) return i < a;
                            if (s.family == SpaceFamily::SymIII) return i <= a;
                            return true;
                        };
                        if (!legal(i1, a1) || !legal(i2, a2)) continue;
                        // pair-exchange symmetry
                        CHECK(comp(s, i1, a1, i2, a2, i2, a2, i1, a1) ==
                              comp(s, i2, a2, i1, a1, i1, a1, i2, a2));
                        // conjugation symmetry (components are real)
                        CHECK(comp(s, i1, a1, i2, a2, i1, a1, i2, a2) ==
                              comp(s, i2, a2, i1, a1, i2, a2, i1, a1));
                        // Bianchi-derived slot exchange
                        CHECK(comp(s, i1, a1, i2, a2, i1, a1, i2, a2) ==
                              comp(s, i1, a1, i2, a2, i1, a1, i2, a2));
                    }
    }
}

TEST_CASE("Bianchi-derived relation with mixed bar patterns") {
    auto g = SpaceKind::grassmann(2, 2);
    for (int i = 1; i <= 2; ++i)
        for (int a = 1; a <= 2; ++a)
            for (int j = 1; j <= 2; ++j)
                for (int b = 1; b <= 2; ++b) {
                    Rational base = comp(g, i, a, j, b, i, a, j, b);
                    // R_{A Bbar C Dbar} = R_{A Dbar C Bbar}
                    CHECK(base == comp(g, i, a, j, b, i, a, j, b));
                    ComplexIndexQuad swapped =
                        ComplexIndexQuad::holo_anti(i, a, j, b, j, b, i, a);
                    swapped.slot[2].bar = BarPattern::Anti;
                    swapped.slot[3].bar = BarPattern::Holo; // (h,a,a,h)
                    CHECK(curvature_component(g, swapped) ==
                          -comp(g, i, a, j, b, i, a, j, b));
                }
}

TEST_CASE("Prop 2.6 tables on G(2,5)") {
    auto s = SpaceKind::grassmann(2, 3);
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 3; ++l)
            for (int t = 0; t < 2; ++t)
                for (int u = 0; u < 3; ++u) {
                    ExactMatrix X_kl = ExactMatrix::unit(s, k, l, false);
                    ExactMatrix X_tu = ExactMatrix::unit(s, t, u, false);
                    ExactMatrix Y_tu = ExactMatrix::unit(s, t, u, true);
                    long long xy = (k == t && l == u) ? 4 : ((k == t) != (l == u) ? 1 : 0);
                    long long xx = (k == t && l == u) ? 0 : ((k == t) != (l == u) ? 1 : 0);
                    CHECK(curvature_real_exact(s, X_kl, Y_tu, X_kl, Y_tu) == Rational(xy));
                    CHECK(curvature_real_exact(s, X_kl, X_tu, X_kl, X_tu) == Rational(xx));
                    // mixed X..Y slot vanishes
                    CHECK(curvature_real_exact(s, X_kl, X_tu, X_kl, Y_tu) == Rational(0));
                }
}

TEST_CASE("curvature_real double route matches exact route") {
    auto s = SpaceKind::grassmann(2, 2);
    TangentMatrix x11 = TangentMatrix::unit(s, 0, 0);
    TangentMatrix y11 = x11.times_i();
    TangentMatrix x12 = TangentMatrix::unit(s, 0, 1);
    CHECK(curvature_real(s, x11, y11, x11, y11) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(curvature_real(s, x11, x12, x11, x12) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("gap identity 4 delta_ij") {
    for (auto [n, m] : {std::pair{1, 1}, {1, 2}, {2, 2}, {2, 3}}) {
        auto s = SpaceKind::grassmann(n, m);
        for (int i = 1; i <= n * m; ++i)
            for (int j = 1; j <= n * m; ++j)
                CHECK(curvature_gap(s, i, j) == Rational(i == j ? 4 : 0));
    }
    CHECK_THROWS_AS(curvature_gap(SpaceKind::grassmann(2, 2), 0, 1), ValidationError);
}

TEST_CASE("Lemma 6.2 identity on all supported spaces, exact") {
    std::vector<SpaceKind> spaces = {SpaceKind::grassmann(2, 2), SpaceKind::skew(3),
                                     SpaceKind::sym(2), SpaceKind::quadric(3)};
    for (const auto& s : spaces) {
        // frame of holomorphic directions: unit matrices over the legal pairs
        std::vector<std::pair<int, int>> pairs;
        for (int r = 0; r < s.rows(); ++r)
            for (int c = 0; c < s.cols(); ++c) {
                if (s.family == SpaceFamily::SkewII && r >= c) continue;
                if (s.family == SpaceFamily::SymIII && r > c) continue;
                pairs.push_back({r, c});
            }
        for (auto [kr, kc] : pairs)
            for (auto [sr, sc] : pairs) {
                ExactMatrix Wr = ExactMatrix::unit(s, kr, kc, false);
                ExactMatrix Ws = ExactMatrix::unit(s, sr, sc, false);
                ExactMatrix xs = Ws, yr = Wr.times_i(), xr = Wr;
                Rational lhs = curvature_real_exact(s, xs, yr, xs, yr) -
                               curvature_real_exact(s, xs, xr, xs, xr);
                RationalComplex rhs = curvature_pair_exact(s, Wr, Ws);
                CHECK(lhs == Rational(-4) * rhs.re);
            }
    }
}

TEST_CASE("metric examples at the origin") {
    auto s = SpaceKind::grassmann(2, 2);
    ComplexMatrix z0; // empty means Z = 0
    TangentMatrix e11 = TangentMatrix::unit(s, 0, 0);
    TangentMatrix e12 = TangentMatrix::unit(s, 0, 1);
    CHECK(metric_real(s, z0, e11, e11) == doctest::Approx(1.0));
    CHECK(metric_real(s, z0, e11, e12) == doctest::Approx(0.0));
    TangentMatrix ie11 = e11.times_i();
    CHECK(metric_real(s, z0, ie11, ie11) == doctest::Approx(1.0));

    // metric at a nonzero chart point stays symmetric and positive
    ComplexMatrix z(2, 2);
    z << std::complex<double>(0.1, 0.2), std::complex<double>(-0.05, 0.0),
        std::complex<double>(0.0, 0.15), std::complex<double>(0.2, -0.1);
    CHECK(metric_real(s, z, e11, e12) == doctest::Approx(metric_real(s, z, e12, e11)));
    CHECK(metric_real(s, z, e11, e11) > 0.0);
}

TEST_CASE("holomorphic sectional curvature examples") {
    auto g23 = SpaceKind::grassmann(2, 3);
    CHECK(holomorphic_sectional(g23, TangentMatrix::unit(g23, 0, 0)) == doctest::Approx(4.0));

    auto g22 = SpaceKind::grassmann(2, 2);
    ComplexMatrix half_id = ComplexMatrix::Identity(2, 2) / std::sqrt(2.0);
    CHECK(holomorphic_sectional(g22, TangentMatrix(g22, half_id)) == doctest::Approx(2.0));

    // scale invariance
    std::mt19937_64 rng(5);
    TangentMatrix t = random_tangent(g23, rng);
    TangentMatrix t3(g23, 3.0 * t.entries());
    CHECK(holomorphic_sectional(g23, t) == doctest::Approx(holomorphic_sectional(g23, t3)));

    ComplexMatrix zero = ComplexMatrix::Zero(2, 3);
    CHECK_THROWS_AS(holomorphic_sectional(g23, TangentMatrix(g23, zero)), ValidationError);
}

TEST_CASE("H range property on G(2,5)") {
    auto s = SpaceKind::grassmann(2, 3);
    std::mt19937_64 rng(11);
    for (int q = 0; q < 500; ++q) {
        double h = holomorphic_sectional(s, random_tangent(s, rng));
        CHECK(h >= 2.0 - 1e-9);
        CHECK(h <= 4.0 + 1e-9);
    }
}

TEST_CASE("hol_sect_general displayed formulas") {
    auto sym2 = SpaceKind::sym(2);
    ComplexMatrix z0;
    CHECK(hol_sect_general(sym2, z0, TangentMatrix::unit(sym2, 0, 0)) == doctest::Approx(2.0));

    auto q3 = SpaceKind::quadric(3);
    ComplexMatrix t1(1, 3);
    t1 << 1.0, 0.0, 0.0;
    CHECK(hol_sect_general(q3, z0, TangentMatrix(q3, t1)) == doctest::Approx(1.0));
    ComplexMatrix t2(1, 3);
    t2 << std::complex<double>(1, 0) / std::sqrt(2.0), std::complex<double>(0, 1) / std::sqrt(2.0),
        0.0;
    CHECK(hol_sect_general(q3, z0, TangentMatrix(q3, t2)) == doctest::Approx(2.0));

    ComplexMatrix znz = 0.1 * ComplexMatrix::Ones(1, 3);
    CHECK_THROWS_AS(hol_sect_general(q3, znz, TangentMatrix(q3, t1)), ValidationError);

    // general-Z values on GrassmannI reduce to (2.5) at Z = 0
    auto g22 = SpaceKind::grassmann(2, 2);
    TangentMatrix e11 = TangentMatrix::unit(g22, 0, 0);
    CHECK(hol_sect_general(g22, z0, e11) == doctest::Approx(2.0));
}

TEST_CASE("hol_sect_general is half of the component-route H on GrassmannI") {
    // the documented convention difference between Eq-(2.5)-style displays and
    // H = R(X,JX,X,JX)/g^2
    auto s = SpaceKind::grassmann(2, 3);
    std::mt19937_64 rng(21);
    ComplexMatrix z0;
    for (int q = 0; q < 50; ++q) {
        TangentMatrix t = random_tangent(s, rng);
        CHECK(hol_sect_general(s, z0, t) ==
              doctest::Approx(0.5 * holomorphic_sectional(s, t)).epsilon(1e-10));
    }
}

TEST_CASE("condition reports") {
    ConditionReport g22 = condition_report(SpaceKind::grassmann(2, 2), 50, 7);
    CHECK(g22.a_ok);
    CHECK(g22.b_ok);
    CHECK(g22.c_lower_bound == doctest::Approx(2.0));

    ConditionReport q3 = condition_report(SpaceKind::quadric(3), 20, 7);
    CHECK_FALSE(q3.b_ok);
    CHECK(q3.b_max_value >= 2.0 - 1e-12);

    ConditionReport sym2 = condition_report(SpaceKind::sym(2), 20, 7);
    CHECK(sym2.a_ok);
    CHECK(sym2.b_ok);

    ConditionReport skew3 = condition_report(SpaceKind::skew(3), 20, 7);
    CHECK(skew3.a_ok);
    CHECK(skew3.b_ok);
}

TEST_CASE("frame invariance is exact on matrix-basis frames") {
    // identical frames realized twice must agree to the bit
    auto s = SpaceKind::grassmann(2, 2);
    TangentMatrix a = TangentMatrix::unit(s, 0, 1);
    TangentMatrix b = TangentMatrix::unit(s, 1, 0);
    TangentMatrix ja = a.times_i();
    double v1 = curvature_real(s, a, ja, b, ja);
    double v2 = curvature_real(s, a, ja, b, ja);
    CHECK(v1 == v2);
}
