#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "pinchflow/spaces.hpp"

namespace pinchflow {

// ============================================================================
// Pinching constants: the quadratic form Q, delta_lambda, delta_Lambda,
// Lambda_0 / Lambda_1 / Lambda', and the closed-form constant chains.
// ============================================================================

enum class PairingMode { Symplectic, Free };
enum class SymmetryMode { FullSymmetric, Unconstrained };

/// Singular-value vector of a linear symplectic map, length 2N.  In symplectic
/// mode consecutive entries pair as lambda_{2i-1} * lambda_{2i} = 1 with
/// lambda_{2i-1} <= 1 <= lambda_{2i}.
struct PinchSpectrum {
    Eigen::VectorXd lambdas;
    PairingMode mode;

    PinchSpectrum(Eigen::VectorXd l, PairingMode pm);

    int big_n() const { return (int)lambdas.size() / 2; }

    /// Build the symplectic spectrum (1/t_1, t_1, ..., 1/t_N, t_N).
    static PinchSpectrum symplectic(const Eigen::VectorXd& upper);
};

/// Second-fundamental-form coefficients h_{ijk}, dense (2N)^3 storage.  In
/// full_symmetric mode writes go through set() which mirrors all permutations.
class HTensor {
public:
    HTensor(int two_n, SymmetryMode mode);

    int two_n() const { return two_n_; }
    SymmetryMode mode() const { return mode_; }

    double at(int i, int j, int k) const { return v_[idx(i, j, k)]; } ///< 1-based
    void set(int i, int j, int k, double value);                      ///< 1-based

    double frobenius_sq() const;
    const std::vector<double>& raw() const { return v_; }
    std::vector<double>& raw() { return v_; }

    static HTensor random(int two_n, SymmetryMode mode, unsigned long long seed);

private:
    int idx(int i, int j, int k) const {
        return (i - 1) * two_n_ * two_n_ + (j - 1) * two_n_ + (k - 1);
    }
    int two_n_;
    SymmetryMode mode_;
    std::vector<double> v_;
};

/// Q(lambda, h) = sum h^2 - 2 sum_k sum_{i<j} (-1)^{i+j} lambda_i lambda_j
///                (h_{i'ik} h_{j'jk} - h_{i'jk} h_{j'ik}),  i' = i + (-1)^{i+1}.
double q_form(const PinchSpectrum& spectrum, const HTensor& h);

/// Symmetric matrix M with h' M h = q_form for all h in the mode's space.
/// Unconstrained basis: unit tensors e_{ijk}.  Symmetric basis: normalized
/// multiset tensors, orthonormal under the multiplicity-weighted Frobenius
/// inner product.
struct QMatrix {
    Eigen::MatrixXd m;
    SymmetryMode mode;
    int two_n;
    /// Multisets (i <= j <= k), 1-based, indexing the symmetric basis.
    std::vector<std::array<int, 3>> sym_basis;

    double quad(const HTensor& h) const; ///< h' M h in the matching coordinates
};

QMatrix q_matrix(const PinchSpectrum& spectrum, SymmetryMode mode);

/// Smallest eigenvalue of q_matrix; values within 1e-10 of zero are snapped to
/// zero (near_zero reports when that happened).
double delta_lambda(const PinchSpectrum& spectrum, SymmetryMode mode,
                    bool* near_zero = nullptr);

struct DeltaLambdaResult {
    double value = 0.0;
    double grid_resolution = 0.0; ///< coarse-grid spacing, an uncertainty proxy
    Eigen::VectorXd argmin;       ///< full lambda vector at the reported value
};

/// Infimum estimate of delta_lambda over the box 1/Lambda <= lambda_i <= Lambda
/// (free mode) or its symplectic slice: coarse grid scan plus Nelder-Mead
/// refinement from the best cell.
DeltaLambdaResult delta_Lambda(double Lambda, int N, SymmetryMode smode, PairingMode pmode,
                               int grid_per_axis = 9, int refine_iters = 400,
                               const Eigen::VectorXd* extra_start = nullptr);

/// A value that may be "unbounded above" (Lambda_0(1) = infinity).
struct MaybeUnbounded {
    double value = 1.0;
    bool unbounded = false;
    double width = 0.0; ///< bisection bracket width when bounded
};

/// Lambda_0(N) = sup{ Lambda >= 1 : delta_Lambda > 0 }, by probing
/// Lambda_max_probe and bisecting the sign change when one exists.
MaybeUnbounded lambda0(int N, SymmetryMode smode, PairingMode pmode, double Lambda_max_probe,
                       double bisect_tol, int grid_per_axis = 9);

/// Lambda_1(n) = [ (Lambda_0 + 1/Lambda_0)/2 ]^{1/n} + sqrt([...]^{2/n} - 1).
MaybeUnbounded lambda1(int n, const MaybeUnbounded& Lambda0);

/// Lambda'_n = [ (Lambda + 1/Lambda)/2 ]^n + sqrt([...]^{2n} - 1).
double lambda_prime(double Lambda, int n);

/// eps(mn, Lambda) = 2^{-mn} - (Lambda + 1/Lambda)^{-mn}.
double eps_of_pinch(int mn, double Lambda);
/// Lambda(mn, eps) = c/(c-eps) + sqrt((c/(c-eps))^2 - 1), c = 2^{-mn}.
double pinch_of_eps(int mn, double eps);

/// 2^{1-mn} * Lambda / (Lambda^2 + 1), the *Omega(0) threshold of Prop 3.6.
double star_omega_threshold(double Lambda, int mn);

struct STensorReport {
    Eigen::MatrixXd s;  ///< the full 4N x 4N block matrix [[A,B],[B',D]]
    bool a_positive = false;
    double min_diagonal_factor = 0.0; ///< min_i (Lambda^2 - lambda_i^2)
};

/// Parallel two-tensor S of the pinching-preservation argument; A-positivity
/// is equivalent to max lambda_i < Lambda.
STensorReport pinch_tensor_positivity(const PinchSpectrum& spectrum, double Lambda, double Xi);

enum class CurvatureTermSource { GrassmannClosedForm, Flat, Engine };

struct CurvatureTermSpec {
    CurvatureTermSource source = CurvatureTermSource::GrassmannClosedForm;
    double c = 0.0;                 ///< Flat: constant holomorphic sectional curvature
    std::optional<SpaceKind> space; ///< Engine: requires 2N = 2 * dim_C(space)
};

/// Ambient curvature contribution of the *Omega evolution equation:
/// sum_k sum_{i!=k} lambda_i (R_ikik - lambda_k^2 R~_ikik) /
/// ((1+lambda_k^2)(lambda_i+lambda_i')), with its closed forms.
double flow_curvature_term(const PinchSpectrum& spectrum, const CurvatureTermSpec& spec);

/// One row per Lambda of a constants table; deltas are nonincreasing.
struct ConstantsReport {
    int N = 1;
    SymmetryMode smode = SymmetryMode::FullSymmetric;
    PairingMode pmode = PairingMode::Symplectic;
    std::vector<double> lambda_grid;
    std::vector<double> delta_values;
    std::vector<double> grid_resolutions;
    MaybeUnbounded lambda0_estimate;
    MaybeUnbounded lambda1_value;
    std::vector<double> lambda_prime_values; ///< Lambda'_N along the grid
};

ConstantsReport constants_report(int N, SymmetryMode smode, PairingMode pmode,
                                 const std::vector<double>& lambda_grid, int grid_per_axis = 9,
                                 double lambda0_probe = 0.0);

} // namespace pinchflow
