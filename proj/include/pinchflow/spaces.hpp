#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "pinchflow/errors.hpp"
#include "pinchflow/rational.hpp"

namespace pinchflow {

// ============================================================================
// Classical compact Hermitian symmetric spaces and their chart tangents
// ============================================================================

enum class SpaceFamily {
    GrassmannI, ///< G(n, n+m; C), tangent matrices in C^{n x m}
    SkewII,     ///< SO(2n)/U(n), skew-symmetric n x n tangent matrices
    SymIII,     ///< Sp(n)/U(n), symmetric n x n tangent matrices
    QuadricIV   ///< complex quadric Q_n, tangent row vectors in C^n
};

struct SpaceKind {
    SpaceFamily family;
    int n;
    int m; // only meaningful for GrassmannI

    static SpaceKind grassmann(int n, int m);
    static SpaceKind skew(int n);
    static SpaceKind sym(int n);
    static SpaceKind quadric(int n);

    /// Tangent matrix shape in the chart at the origin.
    int rows() const;
    int cols() const;

    /// Complex dimension of the space.
    int complex_dim() const;

    std::string name() const;
};

using ComplexMatrix = Eigen::MatrixXcd;

/// Real tangent vector at a chart origin, identified with its complex
/// coefficient matrix T: the vector is sum Re(T^{kl}) d/dX^{kl} +
/// sum Im(T^{kl}) d/dY^{kl}.  Structure (skew / symmetric / row shape) is
/// enforced exactly on construction and to 1e-12 on import.
class TangentMatrix {
public:
    TangentMatrix(const SpaceKind& space, const ComplexMatrix& entries, bool imported = false);

    /// Basis matrix with a single 1 at (k, l), symmetrized/antisymmetrized as
    /// the space requires (0-based indices).
    static TangentMatrix unit(const SpaceKind& space, int k, int l);

    const SpaceKind& space() const { return space_; }
    const ComplexMatrix& entries() const { return m_; }

    TangentMatrix times_i() const; ///< the J-companion iT
    double norm_sq_ambient() const;

private:
    SpaceKind space_;
    ComplexMatrix m_;
};

/// Exact counterpart of a tangent coefficient matrix, for frame contractions
/// that must come out as exact rationals.
class ExactMatrix {
public:
    ExactMatrix(int rows, int cols) : rows_(rows), cols_(cols), v_(rows * cols) {}

    static ExactMatrix zero(const SpaceKind& space) { return ExactMatrix(space.rows(), space.cols()); }
    static ExactMatrix unit(const SpaceKind& space, int k, int l, bool imaginary = false);

    RationalComplex& at(int r, int c) { return v_[r * cols_ + c]; }
    const RationalComplex& at(int r, int c) const { return v_[r * cols_ + c]; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }

    ExactMatrix times_i() const {
        ExactMatrix out(rows_, cols_);
        for (size_t q = 0; q < v_.size(); ++q)
            out.v_[q] = v_[q] * RationalComplex::unit_i();
        return out;
    }

    ComplexMatrix to_complex() const {
        ComplexMatrix out(rows_, cols_);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c)
                out(r, c) = {at(r, c).re.to_double(), at(r, c).im.to_double()};
        return out;
    }

private:
    int rows_, cols_;
    std::vector<RationalComplex> v_;
};

} // namespace pinchflow
