#pragma once

#include <Eigen/Dense>
#include <functional>

namespace pinchflow {

// Small deterministic optimization helpers shared by the constant pipelines.

/// Derivative-free Nelder-Mead minimization with box clamping.  Deterministic:
/// the initial simplex is x0 plus per-axis steps.  Returns the best vertex.
struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
};

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                             const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                             int max_iters, double tol = 1e-12);

/// Bisection for a sign change of f on [a, b]; f(a) and f(b) must have opposite
/// signs.  Returns the midpoint of the final bracket of width <= tol.
double bisect(const std::function<double(double)>& f, double a, double b, double tol);

/// Bracketing bisection on the derivative followed by at most `newton_steps`
/// Newton iterations; used to locate interior critical points.
double root_bisect_newton(const std::function<double(double)>& f,
                          const std::function<double(double)>& fprime, double a, double b,
                          double bisect_tol, int newton_steps, double f_tol);

} // namespace pinchflow
