#include "pinchflow/curvature.hpp"

#include <map>
#include <mutex>
#include <random>

namespace pinchflow {

namespace {

// A slot position flattened to (row, col), 0-based.
struct Pos {
    int r, c;
};

/// Twice the canonical component R_{A Bbar C Dbar} (so that all families stay
/// integer-valued): GrassmannI/SkewII/SymIII give {0,-1,-2}, QuadricIV
/// {-8,...,4} in units of 1/2.
int twice_component(SpaceFamily f, Pos A, Pos B, Pos C, Pos D) {
    if (f == SpaceFamily::QuadricIV) {
        const int i = A.c, j = B.c, k = C.c, l = D.c;
        return 4 * ((i == k && j == l) - (i == j && k == l) - (i == l && j == k));
    }
    int t = 0;
    if (A.r == B.r && C.r == D.r && A.c == D.c && B.c == C.c) t -= 1;
    if (A.r == D.r && C.r == B.r && A.c == B.c && C.c == D.c) t -= 1;
    return t;
}

void check_index_pair(const SpaceKind& space, int i, int a) {
    if (space.family == SpaceFamily::QuadricIV) {
        if (i != 1) throw ValidationError("IndexOutOfRange: QuadricIV slots use i = 1");
        if (a < 1 || a > space.n) throw ValidationError("IndexOutOfRange: quadric index");
        return;
    }
    if (i < 1 || i > space.rows() || a < 1 || a > space.cols())
        throw ValidationError("IndexOutOfRange: (" + std::to_string(i) + "," +
                              std::to_string(a) + ") on " + space.name());
    if (space.family == SpaceFamily::SkewII && !(i < a))
        throw ValidationError("StructureViolation: SkewII components need i < alpha");
    if (space.family == SpaceFamily::SymIII && !(i <= a))
        throw ValidationError("StructureViolation: SymIII components need i <= alpha");
}

// ----------------------------------------------------------------------------
// Support table: the nonzero (A,B,C,D, sign, component) terms of the four
// surviving bar patterns, enumerated once per space and cached.
// ----------------------------------------------------------------------------

struct Term {
    std::uint16_t a, b, c, d; // flattened entry indices
    // which slot takes the conjugated coefficient, per slot: bit set = anti
    std::uint8_t anti_mask;
    int twice_k; // sign folded in
};

struct SupportKey {
    SpaceFamily f;
    int n, m;
    bool operator<(const SupportKey& o) const {
        if (f != o.f) return f < o.f;
        if (n != o.n) return n < o.n;
        return m < o.m;
    }
};

const std::vector<Term>& support_terms(const SpaceKind& space) {
    static std::map<SupportKey, std::vector<Term>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    SupportKey key{space.family, space.n, space.m};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    const int R = space.rows(), C = space.cols(), E = R * C;
    auto pos = [C](int q) { return Pos{q / C, q % C}; };
    std::vector<Term> terms;
    // Patterns and how they reduce to the canonical component:
    //   (h,a,h,a) -> +K(A,B,C,D),  (h,a,a,h) -> -K(A,B,D,C),
    //   (a,h,h,a) -> -K(B,A,C,D),  (a,h,a,h) -> +K(B,A,D,C).
    for (int a = 0; a < E; ++a)
        for (int b = 0; b < E; ++b)
            for (int c = 0; c < E; ++c)
                for (int d = 0; d < E; ++d) {
                    Pos A = pos(a), B = pos(b), Cc = pos(c), D = pos(d);
                    int k;
                    k = twice_component(space.family, A, B, Cc, D);
                    if (k) terms.push_back({(std::uint16_t)a, (std::uint16_t)b, (std::uint16_t)c,
                                            (std::uint16_t)d, 0b1010, k});
                    k = twice_component(space.family, A, B, D, Cc);
                    if (k) terms.push_back({(std::uint16_t)a, (std::uint16_t)b, (std::uint16_t)c,
                                            (std::uint16_t)d, 0b0110, -k});
                    k = twice_component(space.family, B, A, Cc, D);
                    if (k) terms.push_back({(std::uint16_t)a, (std::uint16_t)b, (std::uint16_t)c,
                                            (std::uint16_t)d, 0b1001, -k});
                    k = twice_component(space.family, B, A, D, Cc);
                    if (k) terms.push_back({(std::uint16_t)a, (std::uint16_t)b, (std::uint16_t)c,
                                            (std::uint16_t)d, 0b0101, k});
                }
    return cache.emplace(key, std::move(terms)).first->second;
}

std::complex<double> coeff(const ComplexMatrix& t, int flat, bool anti) {
    const int C = (int)t.cols();
    std::complex<double> v = t(flat / C, flat % C);
    return anti ? std::conj(v) : v;
}

RationalComplex coeff_exact(const ExactMatrix& t, int flat, bool anti) {
    const int C = t.cols();
    const RationalComplex& v = t.at(flat / C, flat % C);
    return anti ? v.conj() : v;
}

void check_shape(const SpaceKind& space, const TangentMatrix& t) {
    if (t.space().family != space.family || t.space().n != space.n || t.space().m != space.m)
        throw ValidationError("ShapeMismatch: tangent built for a different space");
}

ComplexMatrix conj_t(const ComplexMatrix& m) { return m.conjugate().transpose(); }

} // namespace

ComplexIndexQuad ComplexIndexQuad::holo_anti(int i1, int a1, int i2, int a2, int i3, int a3,
                                             int i4, int a4) {
    return {{IndexSlot{i1, a1, BarPattern::Holo}, IndexSlot{i2, a2, BarPattern::Anti},
             IndexSlot{i3, a3, BarPattern::Holo}, IndexSlot{i4, a4, BarPattern::Anti}}};
}

Rational curvature_component(const SpaceKind& space, const ComplexIndexQuad& quad) {
    for (const auto& s : quad.slot) check_index_pair(space, s.i, s.a);

    // Type (2,2): each argument pair must carry one holomorphic and one
    // antiholomorphic slot, otherwise the component vanishes.
    const bool first_mixed = quad.slot[0].bar != quad.slot[1].bar;
    const bool second_mixed = quad.slot[2].bar != quad.slot[3].bar;
    if (!first_mixed || !second_mixed) return Rational(0);

    // Normalize both pairs to (holo, anti); each swap flips the sign.
    std::array<IndexSlot, 4> s = quad.slot;
    int sign = 1;
    if (s[0].bar == BarPattern::Anti) { std::swap(s[0], s[1]); sign = -sign; }
    if (s[2].bar == BarPattern::Anti) { std::swap(s[2], s[3]); sign = -sign; }

    auto pos = [&](const IndexSlot& sl) { return Pos{sl.i - 1, sl.a - 1}; };
    int t = twice_component(space.family, pos(s[0]), pos(s[1]), pos(s[2]), pos(s[3]));
    return Rational(sign * t, 2);
}

double curvature_real(const SpaceKind& space, const TangentMatrix& t1, const TangentMatrix& t2,
                      const TangentMatrix& t3, const TangentMatrix& t4) {
    check_shape(space, t1);
    check_shape(space, t2);
    check_shape(space, t3);
    check_shape(space, t4);
    const auto& terms = support_terms(space);
    std::complex<double> acc = 0.0;
    for (const auto& tm : terms) {
        std::complex<double> v = coeff(t1.entries(), tm.a, tm.anti_mask & 1);
        v *= coeff(t2.entries(), tm.b, tm.anti_mask & 2);
        v *= coeff(t3.entries(), tm.c, tm.anti_mask & 4);
        v *= coeff(t4.entries(), tm.d, tm.anti_mask & 8);
        acc += v * (0.5 * tm.twice_k);
    }
    return acc.real();
}

Rational curvature_real_exact(const SpaceKind& space, const ExactMatrix& t1,
                              const ExactMatrix& t2, const ExactMatrix& t3,
                              const ExactMatrix& t4) {
    const auto& terms = support_terms(space);
    RationalComplex acc;
    for (const auto& tm : terms) {
        RationalComplex v = coeff_exact(t1, tm.a, tm.anti_mask & 1);
        if (v.is_zero()) continue;
        v = v * coeff_exact(t2, tm.b, tm.anti_mask & 2);
        if (v.is_zero()) continue;
        v = v * coeff_exact(t3, tm.c, tm.anti_mask & 4);
        if (v.is_zero()) continue;
        v = v * coeff_exact(t4, tm.d, tm.anti_mask & 8);
        acc = acc + v * RationalComplex(Rational(tm.twice_k, 2));
    }
    if (acc.im != Rational(0))
        throw NumericalError("curvature_real_exact: nonreal result");
    return acc.re;
}

std::complex<double> curvature_pair(const SpaceKind& space, const ComplexMatrix& w_r,
                                    const ComplexMatrix& w_s) {
    const int R = space.rows(), C = space.cols(), E = R * C;
    auto pos = [C](int q) { return Pos{q / C, q % C}; };
    std::complex<double> acc = 0.0;
    for (int a = 0; a < E; ++a)
        for (int b = 0; b < E; ++b)
            for (int c = 0; c < E; ++c)
                for (int d = 0; d < E; ++d) {
                    int k = twice_component(space.family, pos(a), pos(b), pos(c), pos(d));
                    if (!k) continue;
                    acc += coeff(w_r, a, false) * coeff(w_s, b, true) * coeff(w_r, c, false) *
                           coeff(w_s, d, true) * (0.5 * k);
                }
    return acc;
}

RationalComplex curvature_pair_exact(const SpaceKind& space, const ExactMatrix& w_r,
                                     const ExactMatrix& w_s) {
    const int R = space.rows(), C = space.cols(), E = R * C;
    auto pos = [C](int q) { return Pos{q / C, q % C}; };
    RationalComplex acc;
    for (int a = 0; a < E; ++a)
        for (int b = 0; b < E; ++b)
            for (int c = 0; c < E; ++c)
                for (int d = 0; d < E; ++d) {
                    int k = twice_component(space.family, pos(a), pos(b), pos(c), pos(d));
                    if (!k) continue;
                    RationalComplex v = coeff_exact(w_r, a, false) * coeff_exact(w_s, b, true) *
                                        coeff_exact(w_r, c, false) * coeff_exact(w_s, d, true);
                    acc = acc + v * RationalComplex(Rational(k, 2));
                }
    return acc;
}

double metric_real(const SpaceKind& space, const ComplexMatrix& z, const TangentMatrix& t1,
                   const TangentMatrix& t2) {
    check_shape(space, t1);
    check_shape(space, t2);
    if (space.family == SpaceFamily::QuadricIV) {
        if (z.size() != 0 && z.cwiseAbs().maxCoeff() > 0.0)
            throw ValidationError("UnsupportedPoint: QuadricIV metric implemented at Z = 0 only");
        return 2.0 * (t1.entries() * conj_t(t2.entries()))(0, 0).real();
    }
    ComplexMatrix Z = z;
    if (Z.size() == 0) Z = ComplexMatrix::Zero(space.rows(), space.cols());
    if (Z.rows() != space.rows() || Z.cols() != space.cols())
        throw ValidationError("ShapeMismatch: chart point Z");
    const int n = space.rows(), m = space.cols();
    ComplexMatrix In = ComplexMatrix::Identity(n, n), Im = ComplexMatrix::Identity(m, m);
    ComplexMatrix lhs = (In + Z * conj_t(Z)).inverse();
    ComplexMatrix rhs = (Im + conj_t(Z) * Z).inverse();
    return (lhs * t1.entries() * rhs * conj_t(t2.entries())).trace().real();
}

double holomorphic_sectional(const SpaceKind& space, const TangentMatrix& t) {
    if (t.entries().cwiseAbs().maxCoeff() == 0.0)
        throw ValidationError("ZeroVector: holomorphic sectional curvature needs T != 0");
    TangentMatrix jt = t.times_i();
    const double num = curvature_real(space, t, jt, t, jt);
    const double g = metric_real(space, ComplexMatrix(), t, t);
    return num / (g * g);
}

double hol_sect_general(const SpaceKind& space, const ComplexMatrix& z, const TangentMatrix& t) {
    if (t.entries().cwiseAbs().maxCoeff() == 0.0)
        throw ValidationError("ZeroVector: holomorphic sectional curvature needs T != 0");
    const ComplexMatrix& T = t.entries();
    if (space.family == SpaceFamily::QuadricIV) {
        if (z.size() != 0 && z.cwiseAbs().maxCoeff() > 0.0)
            throw ValidationError("UnsupportedPoint: H_IV is available at Z = 0 only");
        const double tt_bar = T.cwiseAbs2().sum();
        const std::complex<double> tt = (T * T.transpose())(0, 0);
        return (2.0 * tt_bar * tt_bar - std::norm(tt)) / (tt_bar * tt_bar);
    }
    ComplexMatrix Z = z;
    if (Z.size() == 0) Z = ComplexMatrix::Zero(space.rows(), space.cols());
    if (Z.rows() != space.rows() || Z.cols() != space.cols())
        throw ValidationError("ShapeMismatch: chart point Z");
    const int n = space.rows(), m = space.cols();
    ComplexMatrix In = ComplexMatrix::Identity(n, n), Im = ComplexMatrix::Identity(m, m);
    ComplexMatrix P;
    if (space.family == SpaceFamily::GrassmannI) {
        P = (In + Z * conj_t(Z)).inverse() * T * (Im + conj_t(Z) * Z).inverse() * conj_t(T);
    } else {
        // H_II / H_III use plain conjugates; the skew/symmetric structure of
        // Z and T folds the transposes away.
        ComplexMatrix Zb = Z.conjugate(), Tb = T.conjugate();
        const double s = (space.family == SpaceFamily::SkewII) ? -1.0 : 1.0;
        P = (In + s * Z * Zb).inverse() * T * (In + s * Zb * Z).inverse() * Tb;
    }
    const std::complex<double> tr = P.trace();
    const std::complex<double> tr2 = (P * P).trace();
    return 2.0 * tr2.real() / (tr.real() * tr.real());
}

Rational curvature_gap(const SpaceKind& space, int i, int j) {
    if (space.family != SpaceFamily::GrassmannI)
        throw ValidationError("curvature_gap is defined on GrassmannI frames");
    const int nm = space.n * space.m;
    if (i < 1 || i > nm || j < 1 || j > nm)
        throw ValidationError("IndexOutOfRange: frame index for curvature_gap");
    auto unflat = [&](int q) { return std::pair<int, int>{(q - 1) / space.m, (q - 1) % space.m}; };
    auto [ki, li] = unflat(i);
    auto [kj, lj] = unflat(j);
    ExactMatrix e_i = ExactMatrix::unit(space, ki, li, false);
    ExactMatrix e_j = ExactMatrix::unit(space, kj, lj, false);
    ExactMatrix f_j = ExactMatrix::unit(space, kj, lj, true);
    Rational a = curvature_real_exact(space, e_i, f_j, e_i, f_j);
    Rational b = curvature_real_exact(space, e_i, e_j, e_i, e_j);
    return a - b;
}

// ----------------------------------------------------------------------------
// condition_report
// ----------------------------------------------------------------------------

namespace {

/// Standard unitary basis of the tangent space, as coefficient matrices.
std::vector<ComplexMatrix> standard_basis(const SpaceKind& space) {
    std::vector<ComplexMatrix> out;
    const int R = space.rows(), C = space.cols();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    switch (space.family) {
    case SpaceFamily::GrassmannI:
    case SpaceFamily::QuadricIV:
        for (int r = 0; r < R; ++r)
            for (int c = 0; c < C; ++c) {
                ComplexMatrix m = ComplexMatrix::Zero(R, C);
                m(r, c) = 1.0;
                out.push_back(m);
            }
        break;
    case SpaceFamily::SkewII:
        for (int r = 0; r < R; ++r)
            for (int c = r + 1; c < C; ++c) {
                ComplexMatrix m = ComplexMatrix::Zero(R, C);
                m(r, c) = inv_sqrt2;
                m(c, r) = -inv_sqrt2;
                out.push_back(m);
            }
        break;
    case SpaceFamily::SymIII:
        for (int r = 0; r < R; ++r)
            for (int c = r; c < C; ++c) {
                ComplexMatrix m = ComplexMatrix::Zero(R, C);
                if (r == c) {
                    m(r, c) = 1.0;
                } else {
                    m(r, c) = inv_sqrt2;
                    m(c, r) = inv_sqrt2;
                }
                out.push_back(m);
            }
        break;
    }
    return out;
}

ComplexMatrix random_unitary(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix g(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) g(r, c) = {gauss(rng), gauss(rng)};
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
    // Fix phases so the factorization is unique; not essential, keeps runs tidy.
    ComplexMatrix rmat = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < n; ++c) {
        std::complex<double> d = rmat(c, c);
        if (std::abs(d) > 0) q.col(c) *= d / std::abs(d);
    }
    return q;
}

Eigen::MatrixXd random_orthogonal(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd g(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) g(r, c) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

/// Transform the standard basis by the isotropy action that Prop 2.3's chart
/// change realizes: T -> R T S on GrassmannI, T -> R T R' on SkewII/SymIII,
/// and T -> T O (real orthogonal) on the quadric.
std::vector<ComplexMatrix> transformed_basis(const SpaceKind& space,
                                             const std::vector<ComplexMatrix>& basis,
                                             std::mt19937_64& rng) {
    std::vector<ComplexMatrix> out;
    out.reserve(basis.size());
    switch (space.family) {
    case SpaceFamily::GrassmannI: {
        ComplexMatrix R = random_unitary(space.n, rng), S = random_unitary(space.m, rng);
        for (const auto& b : basis) out.push_back(R * b * S);
        break;
    }
    case SpaceFamily::SkewII:
    case SpaceFamily::SymIII: {
        ComplexMatrix R = random_unitary(space.n, rng);
        for (const auto& b : basis) out.push_back(R * b * R.transpose());
        break;
    }
    case SpaceFamily::QuadricIV: {
        Eigen::MatrixXd O = random_orthogonal(space.n, rng);
        for (const auto& b : basis) out.push_back(b * O);
        break;
    }
    }
    return out;
}

double frame_value(const SpaceKind& space, const std::vector<ComplexMatrix>& basis, int a, int b,
                   int c, int d) {
    // Real frame vectors: u_{2q} = basis[q], u_{2q+1} = i basis[q] (0-based).
    auto vec = [&](int idx) {
        ComplexMatrix m = basis[idx / 2];
        if (idx % 2) m *= std::complex<double>(0.0, 1.0);
        return TangentMatrix(space, m, true);
    };
    return curvature_real(space, vec(a), vec(b), vec(c), vec(d));
}

TangentMatrix random_unit_tangent(const SpaceKind& space, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int R = space.rows(), C = space.cols();
    ComplexMatrix m(R, C);
    for (int r = 0; r < R; ++r)
        for (int c = 0; c < C; ++c) m(r, c) = {gauss(rng), gauss(rng)};
    if (space.family == SpaceFamily::SkewII) m = 0.5 * (m - m.transpose().eval());
    if (space.family == SpaceFamily::SymIII) m = 0.5 * (m + m.transpose().eval());
    double nrm = std::sqrt(m.cwiseAbs2().sum());
    if (nrm == 0.0) m(0, C - 1) = 1.0, nrm = 1.0;
    return TangentMatrix(space, m / nrm, true);
}

} // namespace

ConditionReport condition_report(const SpaceKind& space, int sample_count,
                                 unsigned long long seed) {
    if (sample_count < 1) throw ValidationError("condition_report needs sample_count >= 1");
    std::mt19937_64 rng(seed);
    ConditionReport rep;
    rep.samples = sample_count;
    rep.seed = seed;

    const auto basis = standard_basis(space);
    const int dim2 = 2 * (int)basis.size();

    // Reference values on the matrix-basis frame.
    std::vector<double> ref((size_t)dim2 * dim2 * dim2 * dim2);
    auto ref_at = [&](int a, int b, int c, int d) -> double& {
        return ref[((size_t)a * dim2 * dim2 * dim2) + ((size_t)b * dim2 * dim2) +
                   ((size_t)c * dim2) + d];
    };
    const bool full_quads = dim2 <= 8;
    std::vector<std::array<int, 4>> quads;
    if (full_quads) {
        for (int a = 0; a < dim2; ++a)
            for (int b = 0; b < dim2; ++b)
                for (int c = 0; c < dim2; ++c)
                    for (int d = 0; d < dim2; ++d) quads.push_back({a, b, c, d});
    } else {
        std::uniform_int_distribution<int> pick(0, dim2 - 1);
        for (int q = 0; q < 512; ++q)
            quads.push_back({pick(rng), pick(rng), pick(rng), pick(rng)});
    }
    for (const auto& q : quads)
        ref_at(q[0], q[1], q[2], q[3]) = frame_value(space, basis, q[0], q[1], q[2], q[3]);

    // (A) frame invariance over sampled isotropy frames.
    const int frame_samples = std::min(sample_count, 8);
    double max_dev = 0.0;
    for (int s = 0; s < frame_samples; ++s) {
        auto frame = transformed_basis(space, basis, rng);
        for (const auto& q : quads) {
            double v = frame_value(space, frame, q[0], q[1], q[2], q[3]);
            max_dev = std::max(max_dev, std::abs(v - ref_at(q[0], q[1], q[2], q[3])));
        }
    }
    rep.a_max_deviation = max_dev;
    rep.a_ok = max_dev <= 1e-10;

    // (B) Re R(W_r, conj W_s, W_r, conj W_s) <= 0 on standard and sampled frames.
    double max_b = -std::numeric_limits<double>::infinity();
    auto scan_b = [&](const std::vector<ComplexMatrix>& frame) {
        for (const auto& wr : frame)
            for (const auto& ws : frame)
                max_b = std::max(max_b, curvature_pair(space, wr, ws).real());
    };
    scan_b(basis);
    for (int s = 0; s < frame_samples; ++s) {
        auto frame = transformed_basis(space, basis, rng);
        scan_b(frame);
    }
    rep.b_max_value = max_b;
    rep.b_ok = max_b <= 1e-10;

    // (C) minimum holomorphic sectional curvature over random unit tangents.
    double c_min = std::numeric_limits<double>::infinity();
    for (int s = 0; s < sample_count; ++s)
        c_min = std::min(c_min, holomorphic_sectional(space, random_unit_tangent(space, rng)));
    rep.c_min_sampled = c_min;
    rep.c_lower_bound = (space.family == SpaceFamily::GrassmannI)
                            ? 4.0 / std::min(space.n, space.m)
                            : c_min;
    return rep;
}

} // namespace pinchflow
