#include "pinchflow/convergence.hpp"

#include <cmath>

#include "pinchflow/errors.hpp"
#include "pinchflow/optimize.hpp"

namespace pinchflow {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_alpha(double alpha) {
    if (!(alpha > critical_x()) || !(alpha < kPi / 2))
        throw ValidationError("AlphaOutOfWindow: alpha must lie in (x*, pi/2)");
}
} // namespace

double critical_x() {
    static const double x = std::sqrt((std::sqrt(21.0) - 3.0) / 2.0);
    return x;
}

double g_alpha(double alpha) {
    check_alpha(alpha);
    return alpha * std::log(alpha / critical_x()) / std::tan(alpha);
}

double g_alpha_d1(double alpha) {
    check_alpha(alpha);
    const double s = std::sin(alpha), c = std::cos(alpha);
    const double L = std::log(alpha / critical_x());
    return (s * c * L + s * c - alpha * L) / (s * s);
}

double g_alpha_d2(double alpha) {
    check_alpha(alpha);
    const double s = std::sin(alpha), c = std::cos(alpha);
    const double L = std::log(alpha / critical_x());
    return (s * s * c / alpha + 2.0 * alpha * c * L - 2.0 * s - 2.0 * s * L) / (s * s * s);
}

GMax maximize_g() {
    const double xs = critical_x();
    const double a = xs + 1e-9, b = kPi / 2 - 1e-9;
    // g' > 0 just above x*, g' < 0 just below pi/2, so a sign change exists.
    double alpha0 = root_bisect_newton(g_alpha_d1, g_alpha_d2, a, b, 1e-10, 5, 1e-12);
    GMax out;
    out.alpha0 = alpha0;
    out.g0 = g_alpha(alpha0);
    out.second_derivative = g_alpha_d2(alpha0);
    if (!(out.second_derivative < 0.0))
        throw NumericalError("maximize_g: critical point is not a maximum");
    return out;
}

DjokovicReport djokovic_check(double x, double alpha) {
    if (!(x > 0.0) || !(x < alpha) || !(alpha < kPi / 2))
        throw ValidationError("DomainError: need 0 < x < alpha < pi/2");
    DjokovicReport rep;
    rep.f_alpha = (std::tan(alpha) - alpha) / (alpha * alpha * alpha);
    rep.lower_margin = std::tan(x) - (x + x * x * x / 3.0);
    rep.upper_margin = (x + rep.f_alpha * x * x * x) - std::tan(x);
    rep.lower_ok = rep.lower_margin > 0.0;
    rep.upper_ok = rep.upper_margin > 0.0;
    return rep;
}

KLParams select_kl(double Lambda, double delta_L1, int n, double alpha) {
    if (!(Lambda > 1.0)) throw ValidationError("select_kl needs Lambda > 1");
    if (!(delta_L1 > 0.0)) throw ValidationError("select_kl needs delta_{Lambda_1} > 0");
    if (n < 1) throw ValidationError("select_kl needs n >= 1");
    check_alpha(alpha);

    KLParams kl;
    kl.Lambda = Lambda;
    kl.delta = delta_L1;
    kl.alpha = alpha;
    kl.n = n;

    const double xs = critical_x();
    const double tau = Lambda + 1.0 / Lambda;
    const double log_tau_half = std::log(tau / 2.0);
    const double f_alpha = (std::tan(alpha) - alpha) / (alpha * alpha * alpha);

    const double l_max = std::log(alpha / xs) / (n * log_tau_half);
    const double l_min = (10.0 / delta_L1) * (1.0 + f_alpha * alpha * alpha);
    if (l_min > l_max) {
        kl.feasible = false;
        kl.violated = "empty l-interval: ln(tau/2) > delta*g(alpha)/(10n)";
        return kl;
    }
    kl.l = 0.5 * (l_min + l_max);

    // k-interval [x* tau^{nl}, alpha 2^{nl}], handled in logs: the endpoints
    // overflow double for Lambda near 1.
    const double log_k_lo = std::log(xs) + kl.l * n * std::log(tau);
    const double log_k_hi = std::log(alpha) + kl.l * n * std::log(2.0);
    if (log_k_lo > log_k_hi) {
        kl.feasible = false;
        kl.violated = "empty k-interval";
        return kl;
    }
    kl.log_k = 0.5 * (log_k_lo + log_k_hi);
    kl.k = std::exp(kl.log_k); // may be +inf; log_k stays authoritative

    // Re-verify (5.1)-(5.3) numerically.
    const double x_hi = std::exp(kl.log_k - kl.l * n * std::log(2.0));   // k 2^{-nl}
    const double x_lo = std::exp(kl.log_k - kl.l * n * std::log(tau));   // k tau^{-nl}
    kl.margin_51 = (std::log(kPi / 2) + kl.l * n * std::log(2.0)) -
                   (std::log(xs) + kl.l * n * std::log(tau));
    kl.margin_52 = kl.l * delta_L1 / 10.0 - std::tan(x_hi) / x_hi;
    kl.margin_53 = std::min({kPi / 2 - x_hi, x_hi - x_lo, x_lo - xs});
    kl.feasible = kl.margin_51 > 0.0 && kl.margin_52 >= 0.0 && kl.margin_53 >= 0.0 &&
                  x_hi < kPi / 2;
    if (!kl.feasible) kl.violated = "re-verification of (5.1)-(5.3) failed";
    return kl;
}

namespace {
double lambda_hat_impl(double delta_L1, int n, double g0) {
    if (!(delta_L1 >= 0.0) || n < 1)
        throw ValidationError("lambda_hat needs delta >= 0 and n >= 1");
    const double e5 = std::exp(g0 * delta_L1 / (5.0 * n));
    const double e10 = std::exp(g0 * delta_L1 / (10.0 * n));
    return std::sqrt(2.0 * e5 + 2.0 * e10 * std::sqrt(e5 - 1.0) - 1.0);
}
} // namespace

double lambda_hat(double delta_L1, int n) {
    static const double g0 = maximize_g().g0;
    return lambda_hat_impl(delta_L1, n, g0);
}

double lambda_hat_truncated(double delta_L1, int n) {
    return lambda_hat_impl(delta_L1, n, 0.141446);
}

PinchWindowReport verify_pinch_window(const KLParams& kl, int samples) {
    if (!kl.feasible) throw ValidationError("InfeasibleKL: verify_pinch_window needs feasible k,l");
    return verify_pinch_window(kl.log_k, kl.l, kl.Lambda, kl.delta, kl.n, samples);
}

PinchWindowReport verify_pinch_window(double log_k, double l, double Lambda, double delta_L1,
                                      int n, int samples) {
    if (samples < 2) throw ValidationError("verify_pinch_window needs samples >= 2");
    const double tau = Lambda + 1.0 / Lambda;
    PinchWindowReport rep;
    rep.omega_lo = std::pow(1.0 / tau, (double)n);
    rep.omega_hi = std::pow(0.5, (double)n);
    rep.K1 = -std::numeric_limits<double>::infinity();
    rep.worst_lower_margin = std::numeric_limits<double>::infinity();
    rep.worst_upper_margin = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int i = 0; i < samples; ++i) {
        const double w = rep.omega_lo + (rep.omega_hi - rep.omega_lo) * i / (samples - 1);
        const double x = std::exp(log_k + l * std::log(w)); // k w^l
        const double lower = std::tan(x) - (l - 1.0) / (l * x);
        const double upper = l * delta_L1 * x / 10.0 - std::tan(x);
        rep.worst_lower_margin = std::min(rep.worst_lower_margin, lower);
        rep.worst_upper_margin = std::min(rep.worst_upper_margin, upper);
        if (!(lower > 0.0) || !(upper > 0.0)) ok = false;
        rep.K1 = std::max(rep.K1, 10.0 * std::sin(x) - l * delta_L1 * x * std::cos(x));
    }
    rep.claim53_ok = ok;
    return rep;
}

// ----------------------------------------------------------------------------
// Riccati solutions
// ----------------------------------------------------------------------------

double riccati_solution(const RiccatiParams& p, double t) {
    if (!(t >= 0.0)) throw ValidationError("riccati_solution needs t >= 0");
    if (p.simple) {
        // dy/dt = K1 y^2, K1 < 0: y = y0 / (1 - y0 K1 t).
        return p.y0 / (1.0 - p.y0 * p.K1 * t);
    }
    if (!(p.K3 < 0.0)) throw ValidationError("riccati: general branch needs K3 < 0");
    if (!(p.K4 >= 0.0)) throw ValidationError("riccati: general branch needs K4 >= 0");
    const double disc = p.K1 * p.K1 - 4.0 * p.K3 * p.K4;
    if (disc < 0.0) throw ValidationError("NegativeDiscriminant");
    const double r = std::sqrt(disc);
    const double rho_plus = (-p.K1 + r) / (2.0 * p.K3);  // repelling root (<= 0 here)
    const double rho_minus = (-p.K1 - r) / (2.0 * p.K3); // attracting root (>= 0)
    if (r == 0.0) {
        const double rho = -p.K1 / (2.0 * p.K3);
        return rho + (p.y0 - rho) / (1.0 - p.K3 * (p.y0 - rho) * t);
    }
    if (p.y0 == rho_minus) return rho_minus;
    const double c = (p.y0 - rho_plus) / (p.y0 - rho_minus);
    const double e = c * std::exp(r * t);
    return (rho_plus - rho_minus * e) / (1.0 - e);
}

double riccati_limit(const RiccatiParams& p) {
    if (p.simple) return 0.0; // K1 < 0 drives the simple solution to zero
    if (!(p.K3 < 0.0)) throw ValidationError("riccati: general branch needs K3 < 0");
    const double disc = p.K1 * p.K1 - 4.0 * p.K3 * p.K4;
    if (disc < 0.0) throw ValidationError("NegativeDiscriminant");
    const double vertex = -p.K1 / (2.0 * p.K3);
    if (p.y0 >= vertex) return (-p.K1 - std::sqrt(disc)) / (2.0 * p.K3);
    return vertex;
}

} // namespace pinchflow
