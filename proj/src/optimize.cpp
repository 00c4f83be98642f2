#include "pinchflow/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pinchflow/errors.hpp"

namespace pinchflow {

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                             const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                             int max_iters, double tol) {
    const int n = (int)x0.size();
    auto clamp = [&](Eigen::VectorXd x) {
        for (int i = 0; i < n; ++i) x[i] = std::min(hi[i], std::max(lo[i], x[i]));
        return x;
    };

    std::vector<Eigen::VectorXd> xs;
    std::vector<double> fs;
    xs.push_back(clamp(x0));
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd v = x0;
        v[i] += (step[i] != 0.0 ? step[i] : 1e-3);
        xs.push_back(clamp(v));
    }
    for (auto& x : xs) fs.push_back(f(x));

    int iters = 0;
    std::vector<int> order(n + 1);
    for (; iters < max_iters; ++iters) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        const int best = order[0], worst = order[n], second = order[n - 1];
        if (std::abs(fs[worst] - fs[best]) < tol) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i <= n; ++i)
            if (i != worst) centroid += xs[i];
        centroid /= n;

        Eigen::VectorXd xr = clamp(centroid + (centroid - xs[worst]));
        double fr = f(xr);
        if (fr < fs[best]) {
            Eigen::VectorXd xe = clamp(centroid + 2.0 * (centroid - xs[worst]));
            double fe = f(xe);
            if (fe < fr) { xs[worst] = xe; fs[worst] = fe; }
            else { xs[worst] = xr; fs[worst] = fr; }
        } else if (fr < fs[second]) {
            xs[worst] = xr;
            fs[worst] = fr;
        } else {
            Eigen::VectorXd xc = clamp(centroid + 0.5 * (xs[worst] - centroid));
            double fc = f(xc);
            if (fc < fs[worst]) { xs[worst] = xc; fs[worst] = fc; }
            else {
                for (int i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    xs[i] = clamp(xs[best] + 0.5 * (xs[i] - xs[best]));
                    fs[i] = f(xs[i]);
                }
            }
        }
    }
    int best = (int)(std::min_element(fs.begin(), fs.end()) - fs.begin());
    return {xs[best], fs[best], iters};
}

double bisect(const std::function<double(double)>& f, double a, double b, double tol) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) throw NumericalError("bisect: no sign change on bracket");
    while (b - a > tol) {
        double m = 0.5 * (a + b), fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0) == (fa > 0)) { a = m; fa = fm; }
        else b = m;
    }
    return 0.5 * (a + b);
}

double root_bisect_newton(const std::function<double(double)>& f,
                          const std::function<double(double)>& fprime, double a, double b,
                          double bisect_tol, int newton_steps, double f_tol) {
    double x = bisect(f, a, b, bisect_tol);
    for (int i = 0; i < newton_steps && std::abs(f(x)) > f_tol; ++i) {
        double d = fprime(x);
        if (d == 0.0) break;
        double nx = x - f(x) / d;
        if (nx <= a || nx >= b) break;
        x = nx;
    }
    return x;
}

} // namespace pinchflow
