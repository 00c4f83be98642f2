#pragma once

#include <optional>
#include <string>

namespace pinchflow {

// ============================================================================
// Convergence machinery: g(alpha), the Djokovic inequality, the (k,l)
// feasibility system, Lambda-hat, and Riccati comparison solutions.
// ============================================================================

/// x* = sqrt((sqrt(21)-3)/2), the positive root of x^4 + 3x^2 - 3 = 0; the
/// infimum of { x : x(x + x^3/3) >= 1 }.
double critical_x();

/// g(alpha) = alpha * ln(alpha/x*) / tan(alpha) on (x*, pi/2), with its first
/// two derivatives in closed form.
double g_alpha(double alpha);
double g_alpha_d1(double alpha);
double g_alpha_d2(double alpha);

struct GMax {
    double alpha0 = 0.0;
    double g0 = 0.0;
    double second_derivative = 0.0; ///< g''(alpha0), negative at the maximum
};

/// Unique interior maximum of g: bracketing bisection on g' plus Newton
/// polish to |g'| <= 1e-12.
GMax maximize_g();

struct DjokovicReport {
    bool lower_ok = false;  ///< tan x > x + x^3/3
    bool upper_ok = false;  ///< tan x < x + f(alpha) x^3
    double f_alpha = 0.0;   ///< (tan alpha - alpha) / alpha^3
    double lower_margin = 0.0;
    double upper_margin = 0.0;
};

DjokovicReport djokovic_check(double x, double alpha);

/// Feasible (k, l) for the pinching window, or the violated constraint.
/// k can overflow double for Lambda close to 1 (k ~ tau^{nl}); log_k is always
/// finite and is what downstream evaluation uses.
struct KLParams {
    bool feasible = false;
    std::string violated; ///< empty when feasible
    double k = 0.0;
    double log_k = 0.0;
    double l = 0.0;
    double Lambda = 0.0;
    double delta = 0.0;
    double alpha = 0.0;
    int n = 1;
    double margin_51 = 0.0; ///< (pi/2) 2^{nl} - x* tau^{nl}, as a log gap
    double margin_52 = 0.0; ///< l*delta/10 - tan(k 2^{-nl})/(k 2^{-nl})
    double margin_53 = 0.0; ///< min slack of the chain pi/2 > k 2^{-nl} > k tau^{-nl} >= x*
};

/// Midpoints of the feasible l- and k-intervals of the Lemma 5.2 proof, with
/// the three displayed inequalities re-verified numerically.
KLParams select_kl(double Lambda, double delta_L1, int n, double alpha);

/// Largest pinching bound reachable by the window construction:
/// (2 e^{g0 d/(5n)} + 2 e^{g0 d/(10n)} sqrt(e^{g0 d/(5n)} - 1) - 1)^{1/2}.
double lambda_hat(double delta_L1, int n);
/// Same with the printed truncation 0.141446 instead of the exact g0.
double lambda_hat_truncated(double delta_L1, int n);

struct PinchWindowReport {
    bool claim53_ok = false; ///< both (5.10) inequalities on the whole grid
    double K1 = 0.0;         ///< grid max of 10 sin(k w^l) - k l delta w^l cos(k w^l)
    double worst_lower_margin = 0.0;
    double worst_upper_margin = 0.0;
    double omega_lo = 0.0, omega_hi = 0.0;
};

/// Uniform scan of *Omega over [1/(Lambda+1/Lambda)^n, 1/2^n].
PinchWindowReport verify_pinch_window(const KLParams& kl, int samples = 10000);
PinchWindowReport verify_pinch_window(double log_k, double l, double Lambda, double delta_L1,
                                      int n, int samples = 10000);

/// dy/dt = K3 y^2 + K1 y + K4 (general) or dy/dt = K1 y^2 (simple).
struct RiccatiParams {
    bool simple = false; ///< simple: y' = K1 y^2 with K1 < 0
    double K1 = 0.0;
    double K3 = -1.0; ///< general branch requires K3 < 0
    double K4 = 0.0;  ///< general branch requires K4 >= 0
    double y0 = 0.0;
};

/// Closed-form solution value at time t >= 0.
double riccati_solution(const RiccatiParams& p, double t);

/// The envelope constant L of the comparison bound: the attracting equilibrium
/// (-K1 - sqrt(K1^2 - 4 K3 K4)) / (2 K3) when y0 >= -K1/(2 K3), else
/// -K1/(2 K3).
double riccati_limit(const RiccatiParams& p);

} // namespace pinchflow
