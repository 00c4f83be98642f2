#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pinchflow/convergence.hpp"
#include "pinchflow/errors.hpp"

namespace pinchflow {

// ============================================================================
// Graphical mean curvature flow of area-preserving maps of the flat 2-torus
// ============================================================================
//
// The map u(x) = A x + w(x) on [0,1)^2 splits into an integer linear part A
// (exact, differentiated analytically) and a periodic displacement w carried
// on an L x L grid.  The flow evolves w by the nonparametric MCF system
//   dw/dt = g^{ij}(Du) d^2_ij w,   g = I + Du' Du,
// which moves the same surfaces as MCF up to tangential reparametrization.

struct Mat2 {
    double a11 = 1, a12 = 0, a21 = 0, a22 = 1;
};

struct TorusMap {
    int L = 0;
    std::array<int, 4> linear{1, 0, 0, 1}; ///< integer linear part A, row-major
    std::vector<double> w1, w2;            ///< periodic displacement, row-major (i*L + j)

    double& at1(int i, int j) { return w1[(size_t)i * L + j]; }
    double& at2(int i, int j) { return w2[(size_t)i * L + j]; }
    double get1(int i, int j) const { return w1[(size_t)i * L + j]; }
    double get2(int i, int j) const { return w2[(size_t)i * L + j]; }

    bool has_generator() const { return generator_kind >= 0; }

    // Construction provenance, kept so t=0 invariants can use exact Jacobians.
    int generator_kind = -1; ///< 0 identity, 1 linear, 2 composed shears
    double eps = 0.0;
    int harmonics = 1;

    /// Analytic Jacobian of the generator at grid point (i, j); only valid for
    /// generator-constructed maps at t = 0.
    Mat2 analytic_jacobian(int i, int j) const;
};

enum class MapKind { Identity, Linear, ComposedShears };

/// identity | linear(A in SL(2,Z)) | composed shears s2 . s1 with
/// s1(x,y) = (x, y + eps f(x)), s2(x,y) = (x + eps g(y), y) and trigonometric
/// polynomials f, g; each shear is exactly area-preserving.
TorusMap make_map(MapKind kind, int L, const std::array<int, 4>& A = {1, 0, 0, 1},
                  double eps = 0.0, int harmonics = 1);

struct FlowConfig {
    double dt_factor = 0.2; ///< dt = dt_factor * dx^2, must lie in (0, 0.25]
    double t_end = 1.0;
    int stencil_order = 2; ///< 2 or 4
    int record_every = 100;
    double stop_II2 = 0.0; ///< stop early when max|II|^2 drops below (0 = off)
    /// When set, each record also carries max over the grid of
    /// |II|^2 / sin(k (*Omega)^l) for the Riccati comparison.
    std::optional<std::pair<double, double>> monitor_log_k_l;

    void validate() const;
};

struct FlowRecord {
    double t = 0.0;
    double min_star_omega = 0.0;
    double max_star_omega = 0.0;
    double max_lambda = 0.0;
    double max_II2 = 0.0;
    double det_drift = 0.0; ///< max |det Du - 1| via the configured stencil
    double g_ratio = 0.0;   ///< max |II|^2 / sin(k w^l), when monitored
};

struct FlowSeries {
    std::vector<FlowRecord> records;
    double initial_max_lambda = 0.0;
    double worst_step_drop = 0.0; ///< most negative per-step change of min *Omega
    bool min_omega_monotone = false; ///< per-step drift >= -1e-6 throughout
    bool pinching_preserved = false; ///< max lambda never above initial + 1e-4
    double final_t = 0.0;
    int steps = 0;
};

/// Monitors of the current state via the configured stencil.
FlowRecord monitors(const TorusMap& map, int stencil_order = 2,
                    const std::optional<std::pair<double, double>>& log_k_l = std::nullopt);

/// One explicit RK2 (Heun) step; throws UnstableStep when dt > 0.25 dx^2.
TorusMap flow_step(const TorusMap& map, double dt, int stencil_order = 2);

/// Integrate to t_end (or until max|II|^2 < stop_II2), recording every
/// record_every steps.  Throws NonGraphical if min *Omega falls below 1e-3.
FlowSeries run_flow(const TorusMap& map, const FlowConfig& config);

struct RiccatiComparison {
    bool envelope_valid = false; ///< K1 < 0 and the envelope stays finite
    bool dominated = false;      ///< g(t) <= y(t) at every record
    double K1 = 0.0;
    double y0 = 0.0;
    double worst_margin = 0.0; ///< min over records t > 0 of y(t) - g(t)
    std::vector<double> envelope; ///< y(t) per record
};

/// Check the measured g-series against y(t) = y0 / (1 - y0 K1 t) with
/// y0 = g(0) and K1 from verify_pinch_window at the given window.
/// K1_override substitutes a caller-provided K1 (contract probes).
RiccatiComparison compare_to_riccati(const FlowSeries& series, const KLParams& kl,
                                     std::optional<double> K1_override = std::nullopt);

/// Plain-text grid exchange format: header "L <int>", then L^2 lines
/// "i j v1 v2" row-major with 17 significant digits.
void save_map(const TorusMap& map, const std::string& path);
TorusMap load_map(const std::string& path);

} // namespace pinchflow
