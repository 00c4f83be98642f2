#pragma once

#include <array>
#include <complex>
#include <cstdint>

#include "pinchflow/spaces.hpp"

namespace pinchflow {

// ============================================================================
// Curvature engine at chart origins
// ============================================================================
//
// All four families carry an invariant Kaehler-Einstein metric whose curvature
// at the chart origin is an explicit delta-expression in the matrix indices.
// Real 4-tensor values are obtained by expanding each real tangent vector over
// the holomorphic/antiholomorphic coordinate frame and summing the surviving
// type-(2,2) bar patterns.

enum class BarPattern : std::uint8_t { Holo, Anti };

/// One tensor slot: matrix position (i, a), 1-based, plus its bar tag.
/// For QuadricIV tangents (row vectors) use i = 1 and a = the vector index.
struct IndexSlot {
    int i;
    int a;
    BarPattern bar;
};

struct ComplexIndexQuad {
    std::array<IndexSlot, 4> slot;

    /// The canonical pattern R_{A Bbar C Dbar}.
    static ComplexIndexQuad holo_anti(int i1, int a1, int i2, int a2, int i3, int a3, int i4,
                                      int a4);
};

/// Exact curvature component including the type-(2,2) zero rule and slot-swap
/// symmetries.  Values are multiples of 1/2 on GrassmannI/SkewII/SymIII and
/// even integers on QuadricIV.
Rational curvature_component(const SpaceKind& space, const ComplexIndexQuad& quad);

/// R(T1, T2, T3, T4) at the chart origin for real tangent vectors.
double curvature_real(const SpaceKind& space, const TangentMatrix& t1, const TangentMatrix& t2,
                      const TangentMatrix& t3, const TangentMatrix& t4);

/// Exact-arithmetic variant for frames with Gaussian-rational entries.
Rational curvature_real_exact(const SpaceKind& space, const ExactMatrix& t1,
                              const ExactMatrix& t2, const ExactMatrix& t3,
                              const ExactMatrix& t4);

/// C-multilinear value R(W_r, conj(W_s), W_r, conj(W_s)) for holomorphic
/// directions W_r, W_s given by coefficient matrices.  Condition (B) scans the
/// real part of these.
std::complex<double> curvature_pair(const SpaceKind& space, const ComplexMatrix& w_r,
                                    const ComplexMatrix& w_s);
RationalComplex curvature_pair_exact(const SpaceKind& space, const ExactMatrix& w_r,
                                     const ExactMatrix& w_s);

/// Riemannian metric g = Re(h) at chart point Z:
/// Re Tr[(I + Z Zbar')^{-1} T1 (I + Zbar' Z)^{-1} conj(T2)'].
/// QuadricIV is supported at Z = 0 only, where the induced Fubini-Study
/// metric is 2 Re(T1 conj(T2)').
double metric_real(const SpaceKind& space, const ComplexMatrix& z, const TangentMatrix& t1,
                   const TangentMatrix& t2);

/// H(T) = R(T, JT, T, JT) / g(T,T)^2 at the origin.
double holomorphic_sectional(const SpaceKind& space, const TangentMatrix& t);

/// The displayed trace-ratio formulas H_I/H_II/H_III (general Z) and H_IV
/// (Z = 0 only).  Note these carry a different normalization than
/// holomorphic_sectional; both are reported deliberately.
double hol_sect_general(const SpaceKind& space, const ComplexMatrix& z, const TangentMatrix& t);

/// R(e_i, f_j, e_i, f_j) - R(e_i, e_j, e_i, e_j) on GrassmannI matrix-basis
/// frames, 1-based i, j <= nm.  Equals 4*delta_ij.
Rational curvature_gap(const SpaceKind& space, int i, int j);

// ----------------------------------------------------------------------------
// Conditions (A), (B), (C)
// ----------------------------------------------------------------------------

struct ConditionReport {
    bool a_ok = false;
    double a_max_deviation = 0.0; ///< worst |R_frame - R_standard| over samples
    bool b_ok = false;
    double b_max_value = 0.0; ///< max Re R(W_r, conj W_s, W_r, conj W_s)
    double c_min_sampled = 0.0;
    double c_lower_bound = 0.0; ///< analytic 4/min(n,m) on GrassmannI, else sampled min
    int samples = 0;
    unsigned long long seed = 0;
};

/// Frame-invariance (A) on random product-unitary frames, component-sign scan
/// (B), and holomorphic-curvature lower bound (C).
ConditionReport condition_report(const SpaceKind& space, int sample_count,
                                 unsigned long long seed);

} // namespace pinchflow
