#include "pinchflow/pinching.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>

#include "pinchflow/curvature.hpp"
#include "pinchflow/optimize.hpp"
#include "pinchflow/parallel.hpp"

namespace pinchflow {

// ----------------------------------------------------------------------------
// PinchSpectrum / HTensor
// ----------------------------------------------------------------------------

PinchSpectrum::PinchSpectrum(Eigen::VectorXd l, PairingMode pm) : lambdas(std::move(l)), mode(pm) {
    const int size = (int)lambdas.size();
    if (size < 2 || size % 2 != 0)
        throw ValidationError("PinchSpectrum needs an even length >= 2");
    for (int i = 0; i < size; ++i)
        if (!(lambdas[i] > 0.0)) throw ValidationError("PinchSpectrum entries must be positive");
    if (mode == PairingMode::Symplectic) {
        for (int i = 0; i < size; i += 2) {
            if (std::abs(lambdas[i] * lambdas[i + 1] - 1.0) > 1e-9)
                throw ValidationError("InvalidPinch: symplectic pairing lambda_{2i-1}*lambda_{2i}=1");
            if (lambdas[i] > 1.0 + 1e-12 || lambdas[i + 1] < 1.0 - 1e-12)
                throw ValidationError("InvalidPinch: need lambda_{2i-1} <= 1 <= lambda_{2i}");
        }
    }
}

PinchSpectrum PinchSpectrum::symplectic(const Eigen::VectorXd& upper) {
    Eigen::VectorXd l(2 * upper.size());
    for (int i = 0; i < upper.size(); ++i) {
        if (!(upper[i] >= 1.0)) throw ValidationError("InvalidPinch: upper singular values >= 1");
        l[2 * i] = 1.0 / upper[i];
        l[2 * i + 1] = upper[i];
    }
    return PinchSpectrum(l, PairingMode::Symplectic);
}

HTensor::HTensor(int two_n, SymmetryMode mode)
    : two_n_(two_n), mode_(mode), v_((size_t)two_n * two_n * two_n, 0.0) {
    if (two_n < 2 || two_n % 2 != 0) throw ValidationError("HTensor needs even 2N >= 2");
}

void HTensor::set(int i, int j, int k, double value) {
    if (i < 1 || j < 1 || k < 1 || i > two_n_ || j > two_n_ || k > two_n_)
        throw ValidationError("IndexOutOfRange: HTensor");
    if (mode_ == SymmetryMode::Unconstrained) {
        v_[idx(i, j, k)] = value;
        return;
    }
    int a[3] = {i, j, k};
    std::sort(a, a + 3);
    do {
        v_[idx(a[0], a[1], a[2])] = value;
    } while (std::next_permutation(a, a + 3));
}

double HTensor::frobenius_sq() const {
    double s = 0.0;
    for (double x : v_) s += x * x;
    return s;
}

HTensor HTensor::random(int two_n, SymmetryMode mode, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    HTensor h(two_n, mode);
    if (mode == SymmetryMode::Unconstrained) {
        for (double& x : h.v_) x = gauss(rng);
    } else {
        for (int i = 1; i <= two_n; ++i)
            for (int j = i; j <= two_n; ++j)
                for (int k = j; k <= two_n; ++k) h.set(i, j, k, gauss(rng));
    }
    return h;
}

// ----------------------------------------------------------------------------
// Q form and matrix
// ----------------------------------------------------------------------------

double q_form(const PinchSpectrum& spectrum, const HTensor& h) {
    const int tn = h.two_n();
    if ((int)spectrum.lambdas.size() != tn)
        throw ValidationError("DimensionMismatch: spectrum length vs HTensor");
    double total = h.frobenius_sq();
    double cross = 0.0;
    const auto& l = spectrum.lambdas;
    for (int k = 1; k <= tn; ++k) {
        for (int i = 1; i <= tn; ++i) {
            const int ip = i + ((i % 2 == 1) ? 1 : -1);
            for (int j = i + 1; j <= tn; ++j) {
                const int jp = j + ((j % 2 == 1) ? 1 : -1);
                const double w = (((i + j) % 2 == 0) ? 1.0 : -1.0) * l[i - 1] * l[j - 1];
                cross += w * (h.at(ip, i, k) * h.at(jp, j, k) - h.at(ip, j, k) * h.at(jp, i, k));
            }
        }
    }
    return total - 2.0 * cross;
}

namespace {

Eigen::MatrixXd q_matrix_unconstrained(const Eigen::VectorXd& l) {
    const int tn = (int)l.size();
    const int dim = tn * tn * tn;
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dim, dim);
    auto idx = [tn](int i, int j, int k) { return (i - 1) * tn * tn + (j - 1) * tn + (k - 1); };
    for (int k = 1; k <= tn; ++k)
        for (int i = 1; i <= tn; ++i) {
            const int ip = i + ((i % 2 == 1) ? 1 : -1);
            for (int j = i + 1; j <= tn; ++j) {
                const int jp = j + ((j % 2 == 1) ? 1 : -1);
                const double w = (((i + j) % 2 == 0) ? 1.0 : -1.0) * l[i - 1] * l[j - 1];
                const int a = idx(ip, i, k), b = idx(jp, j, k);
                const int c = idx(ip, j, k), d = idx(jp, i, k);
                m(a, b) -= w;
                m(b, a) -= w;
                m(c, d) += w;
                m(d, c) += w;
            }
        }
    return m;
}

std::vector<std::array<int, 3>> multisets(int tn) {
    std::vector<std::array<int, 3>> out;
    for (int i = 1; i <= tn; ++i)
        for (int j = i; j <= tn; ++j)
            for (int k = j; k <= tn; ++k) out.push_back({i, j, k});
    return out;
}

/// Columns are the normalized symmetric basis tensors in unconstrained
/// coordinates; orthonormal under the plain Frobenius product.
Eigen::MatrixXd sym_projection(int tn, const std::vector<std::array<int, 3>>& mus) {
    const int dim = tn * tn * tn;
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, (int)mus.size());
    auto idx = [tn](int i, int j, int k) { return (i - 1) * tn * tn + (j - 1) * tn + (k - 1); };
    for (int c = 0; c < (int)mus.size(); ++c) {
        int a[3] = {mus[c][0], mus[c][1], mus[c][2]};
        std::sort(a, a + 3);
        int count = 0;
        do {
            p(idx(a[0], a[1], a[2]), c) = 1.0;
            ++count;
        } while (std::next_permutation(a, a + 3));
        p.col(c) /= std::sqrt((double)count);
    }
    return p;
}

} // namespace

QMatrix q_matrix(const PinchSpectrum& spectrum, SymmetryMode mode) {
    const int tn = (int)spectrum.lambdas.size();
    const int N = tn / 2;
    if (mode == SymmetryMode::Unconstrained && N > 4)
        throw ValidationError("DimensionTooLarge: unconstrained q_matrix supports N <= 4");
    if (mode == SymmetryMode::FullSymmetric && N > 6)
        throw ValidationError("DimensionTooLarge: symmetric q_matrix supports N <= 6");

    QMatrix out;
    out.mode = mode;
    out.two_n = tn;
    Eigen::MatrixXd unc = q_matrix_unconstrained(spectrum.lambdas);
    if (mode == SymmetryMode::Unconstrained) {
        out.m = std::move(unc);
    } else {
        out.sym_basis = multisets(tn);
        Eigen::MatrixXd p = sym_projection(tn, out.sym_basis);
        out.m = p.transpose() * unc * p;
        out.m = 0.5 * (out.m + out.m.transpose().eval()); // kill rounding skew
    }
    return out;
}

double QMatrix::quad(const HTensor& h) const {
    if (h.two_n() != two_n) throw ValidationError("DimensionMismatch: QMatrix::quad");
    if (mode == SymmetryMode::Unconstrained) {
        Eigen::Map<const Eigen::VectorXd> v(h.raw().data(), (Eigen::Index)h.raw().size());
        return v.dot(m * v);
    }
    // Coordinates of a fully symmetric tensor in the normalized multiset basis.
    Eigen::VectorXd c((int)sym_basis.size());
    for (int q = 0; q < (int)sym_basis.size(); ++q) {
        const auto& mu = sym_basis[q];
        int a[3] = {mu[0], mu[1], mu[2]};
        std::sort(a, a + 3);
        int count = 0;
        int b[3] = {a[0], a[1], a[2]};
        do { ++count; } while (std::next_permutation(b, b + 3));
        c[q] = h.at(mu[0], mu[1], mu[2]) * std::sqrt((double)count);
    }
    return c.dot(m * c);
}

double delta_lambda(const PinchSpectrum& spectrum, SymmetryMode mode, bool* near_zero) {
    QMatrix qm = q_matrix(spectrum, mode);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(qm.m, Eigen::EigenvaluesOnly);
    double v = es.eigenvalues()[0];
    bool nz = std::abs(v) <= 1e-10;
    if (near_zero) *near_zero = nz;
    return nz ? 0.0 : v;
}

// ----------------------------------------------------------------------------
// delta_Lambda and Lambda_0
// ----------------------------------------------------------------------------

namespace {

/// Free coordinates -> full spectrum.  Symplectic: x in [1,Lambda]^N maps to
/// (1/x_1, x_1, ...).  Free: x is the spectrum itself.
Eigen::VectorXd assemble(const Eigen::VectorXd& x, PairingMode pmode) {
    if (pmode == PairingMode::Free) return x;
    Eigen::VectorXd l(2 * x.size());
    for (int i = 0; i < x.size(); ++i) {
        l[2 * i] = 1.0 / x[i];
        l[2 * i + 1] = x[i];
    }
    return l;
}

double eval_point(const Eigen::VectorXd& x, PairingMode pmode, SymmetryMode smode) {
    // delta_lambda never snaps here: the scan wants the raw minimum.
    QMatrix qm = q_matrix(PinchSpectrum(assemble(x, pmode),
                                        pmode == PairingMode::Symplectic ? PairingMode::Symplectic
                                                                         : PairingMode::Free),
                          smode);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(qm.m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
}

} // namespace

DeltaLambdaResult delta_Lambda(double Lambda, int N, SymmetryMode smode, PairingMode pmode,
                               int grid_per_axis, int refine_iters,
                               const Eigen::VectorXd* extra_start) {
    if (!(Lambda >= 1.0)) throw ValidationError("InvalidPinch: delta_Lambda needs Lambda >= 1");
    if (grid_per_axis < 1) throw ValidationError("delta_Lambda needs grid_per_axis >= 1");

    const int axes = (pmode == PairingMode::Symplectic) ? N : 2 * N;
    Eigen::VectorXd lo(axes), hi(axes);
    for (int i = 0; i < axes; ++i) {
        lo[i] = (pmode == PairingMode::Symplectic) ? 1.0 : 1.0 / Lambda;
        hi[i] = Lambda;
    }

    DeltaLambdaResult res;
    if (Lambda == 1.0) {
        Eigen::VectorXd x = Eigen::VectorXd::Ones(axes);
        res.value = eval_point(x, pmode, smode);
        res.argmin = assemble(x, pmode);
        res.grid_resolution = 0.0;
        return res;
    }

    // Geometric grid: symmetric about lambda = 1 on the free box.
    const int g = std::max(grid_per_axis, 2);
    std::vector<double> ticks(g);
    for (int q = 0; q < g; ++q) {
        double f = (double)q / (g - 1);
        ticks[q] = (pmode == PairingMode::Symplectic) ? std::pow(Lambda, f)
                                                      : std::pow(Lambda, -1.0 + 2.0 * f);
    }

    const size_t cells = (size_t)std::pow((double)g, axes);
    std::vector<double> values(cells);
    parallel_for(cells, [&](size_t b, size_t e) {
        for (size_t cell = b; cell < e; ++cell) {
            size_t rem = cell;
            Eigen::VectorXd x(axes);
            for (int ax = 0; ax < axes; ++ax) {
                x[ax] = ticks[rem % g];
                rem /= g;
            }
            values[cell] = eval_point(x, pmode, smode);
        }
    });
    size_t best = 0;
    for (size_t c = 1; c < cells; ++c)
        if (values[c] < values[best]) best = c;

    Eigen::VectorXd x0(axes);
    {
        size_t rem = best;
        for (int ax = 0; ax < axes; ++ax) {
            x0[ax] = ticks[rem % g];
            rem /= g;
        }
    }

    auto objective = [&](const Eigen::VectorXd& x) { return eval_point(x, pmode, smode); };
    const double spacing = (hi[0] - lo[0]) / (g - 1);
    Eigen::VectorXd step = Eigen::VectorXd::Constant(axes, 0.5 * spacing);
    NelderMeadResult nm = nelder_mead(objective, x0, step, lo, hi, refine_iters);

    double best_value = std::min(values[best], nm.value);
    Eigen::VectorXd best_x = (nm.value <= values[best]) ? nm.x : x0;

    if (extra_start && extra_start->size() == axes) {
        Eigen::VectorXd clamped = *extra_start;
        for (int i = 0; i < axes; ++i) clamped[i] = std::min(hi[i], std::max(lo[i], clamped[i]));
        NelderMeadResult nm2 = nelder_mead(objective, clamped, step, lo, hi, refine_iters);
        if (nm2.value < best_value) {
            best_value = nm2.value;
            best_x = nm2.x;
        }
    }

    res.value = best_value;
    res.argmin = assemble(best_x, pmode);
    res.grid_resolution = spacing;
    return res;
}

MaybeUnbounded lambda0(int N, SymmetryMode smode, PairingMode pmode, double Lambda_max_probe,
                       double bisect_tol, int grid_per_axis) {
    if (!(Lambda_max_probe > 1.0)) throw ValidationError("lambda0 needs Lambda_max_probe > 1");
    auto delta = [&](double L) {
        return delta_Lambda(L, N, smode, pmode, grid_per_axis).value;
    };
    if (delta(Lambda_max_probe) > 0.0) {
        return {Lambda_max_probe, true, 0.0};
    }
    double lo = 1.0, hi = Lambda_max_probe;
    while (hi - lo > bisect_tol) {
        double mid = 0.5 * (lo + hi);
        if (delta(mid) > 0.0) lo = mid;
        else hi = mid;
    }
    return {0.5 * (lo + hi), false, hi - lo};
}

MaybeUnbounded lambda1(int n, const MaybeUnbounded& Lambda0) {
    if (n < 1) throw ValidationError("lambda1 needs n >= 1");
    if (Lambda0.unbounded) return {std::numeric_limits<double>::infinity(), true, 0.0};
    if (!(Lambda0.value >= 1.0)) throw ValidationError("lambda1 needs Lambda_0 >= 1");
    const double a = std::pow(0.5 * (Lambda0.value + 1.0 / Lambda0.value), 1.0 / n);
    return {a + std::sqrt(std::max(0.0, a * a - 1.0)), false, 0.0};
}

double lambda_prime(double Lambda, int n) {
    if (!(Lambda >= 1.0) || n < 1) throw ValidationError("lambda_prime needs Lambda >= 1, n >= 1");
    const double a = std::pow(0.5 * (Lambda + 1.0 / Lambda), (double)n);
    return a + std::sqrt(std::max(0.0, a * a - 1.0));
}

double eps_of_pinch(int mn, double Lambda) {
    if (!(Lambda >= 1.0) || mn < 1) throw ValidationError("eps_of_pinch needs Lambda >= 1, mn >= 1");
    return std::pow(2.0, -mn) - std::pow(Lambda + 1.0 / Lambda, (double)-mn);
}

double pinch_of_eps(int mn, double eps) {
    const double c = std::pow(2.0, -mn);
    if (!(eps >= 0.0) || !(eps < c))
        throw ValidationError("EpsOutOfRange: need 0 <= eps < 2^{-mn}");
    const double r = c / (c - eps);
    return r + std::sqrt(std::max(0.0, r * r - 1.0));
}

double star_omega_threshold(double Lambda, int mn) {
    if (!(Lambda >= 1.0) || mn < 1)
        throw ValidationError("star_omega_threshold needs Lambda >= 1, mn >= 1");
    return std::pow(2.0, 1 - mn) * Lambda / (Lambda * Lambda + 1.0);
}

STensorReport pinch_tensor_positivity(const PinchSpectrum& spectrum, double Lambda, double Xi) {
    if (!(Xi > 0.0)) throw ValidationError("InvalidXi: need Xi > 0");
    const int tn = (int)spectrum.lambdas.size();
    const auto& l = spectrum.lambdas;
    const double scale = std::pow(Lambda, 2.0 + Xi);

    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * tn, 2 * tn);
    for (int i = 1; i <= tn; ++i) {
        const double a = (Lambda * Lambda - l[i - 1] * l[i - 1]) /
                         (scale * (1.0 + l[i - 1] * l[i - 1]));
        s(i - 1, i - 1) = a;
        s(tn + i - 1, tn + i - 1) = a;
    }
    for (int r = 1; r <= tn; ++r)
        for (int j = 1; j <= tn; ++j) {
            const int jp = j + ((j % 2 == 1) ? 1 : -1);
            if (r != jp) continue;
            const double sign = (j % 2 == 1) ? 1.0 : -1.0;
            const double b = sign * (Lambda * Lambda + l[r - 1] * l[j - 1]) /
                             (scale * std::sqrt((1.0 + l[r - 1] * l[r - 1]) *
                                                (1.0 + l[j - 1] * l[j - 1])));
            s(r - 1, tn + j - 1) = b;
            s(tn + j - 1, r - 1) = b;
        }

    STensorReport rep;
    rep.s = std::move(s);
    double min_factor = std::numeric_limits<double>::infinity();
    bool diag_positive = true;
    for (int i = 0; i < tn; ++i) {
        min_factor = std::min(min_factor, Lambda * Lambda - l[i] * l[i]);
        if (!(rep.s(i, i) > 0.0)) diag_positive = false;
    }
    rep.min_diagonal_factor = min_factor;
    const bool predicate = min_factor > 0.0;
    if (diag_positive != predicate)
        throw NumericalError("pinch_tensor_positivity: diagonal test disagrees with predicate");
    rep.a_positive = diag_positive;
    return rep;
}

// ----------------------------------------------------------------------------
// Flow curvature term
// ----------------------------------------------------------------------------

namespace {

/// R(a^i, a^k, a^i, a^k) on the matrix-basis frame of GrassmannI, cached.
const Eigen::MatrixXd& frame_curvature_table(const SpaceKind& space) {
    static std::map<std::pair<int, int>, Eigen::MatrixXd> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(space.n, space.m);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    const int nm = space.n * space.m;
    std::vector<ExactMatrix> frame;
    for (int q = 0; q < nm; ++q) {
        frame.push_back(ExactMatrix::unit(space, q / space.m, q % space.m, false));
        frame.push_back(ExactMatrix::unit(space, q / space.m, q % space.m, true));
    }
    Eigen::MatrixXd table(2 * nm, 2 * nm);
    for (int i = 0; i < 2 * nm; ++i)
        for (int k = 0; k < 2 * nm; ++k)
            table(i, k) =
                (i == k) ? 0.0
                         : curvature_real_exact(space, frame[i], frame[k], frame[i], frame[k])
                               .to_double();
    return cache.emplace(key, std::move(table)).first->second;
}

} // namespace

double flow_curvature_term(const PinchSpectrum& spectrum, const CurvatureTermSpec& spec) {
    if (spectrum.mode != PairingMode::Symplectic)
        throw ValidationError("flow_curvature_term needs a symplectic spectrum");
    const int tn = (int)spectrum.lambdas.size();
    const auto& l = spectrum.lambdas;

    switch (spec.source) {
    case CurvatureTermSource::GrassmannClosedForm: {
        double s = 0.0;
        for (int i = 1; i < tn; i += 2) { // lambda_{2s} entries
            const double t = (l[i] * l[i] - 1.0) / (1.0 + l[i] * l[i]);
            s += t * t;
        }
        return 4.0 * s;
    }
    case CurvatureTermSource::Flat: {
        double s = 0.0;
        for (int k = 0; k < tn; k += 2) { // odd indices 1,3,... are 0-based even
            const double t = (1.0 - l[k] * l[k]) / (1.0 + l[k] * l[k]);
            s += t * t;
        }
        return spec.c * s;
    }
    case CurvatureTermSource::Engine: {
        if (!spec.space || spec.space->family != SpaceFamily::GrassmannI)
            throw ValidationError("engine curvature term needs a GrassmannI space");
        if (tn != 2 * spec.space->complex_dim())
            throw ValidationError("DimensionMismatch: 2N must equal 2nm");
        const Eigen::MatrixXd& R = frame_curvature_table(*spec.space);
        double s = 0.0;
        for (int k = 1; k <= tn; ++k)
            for (int i = 1; i <= tn; ++i) {
                if (i == k) continue;
                const int ip = i + ((i % 2 == 1) ? 1 : -1);
                s += l[i - 1] * (1.0 - l[k - 1] * l[k - 1]) * R(i - 1, k - 1) /
                     ((1.0 + l[k - 1] * l[k - 1]) * (l[i - 1] + l[ip - 1]));
            }
        return s;
    }
    }
    throw ValidationError("flow_curvature_term: unknown source");
}

// ----------------------------------------------------------------------------
// Constants report
// ----------------------------------------------------------------------------

ConstantsReport constants_report(int N, SymmetryMode smode, PairingMode pmode,
                                 const std::vector<double>& lambda_grid, int grid_per_axis,
                                 double lambda0_probe) {
    if (lambda_grid.empty()) throw ValidationError("constants_report needs a Lambda grid");
    ConstantsReport rep;
    rep.N = N;
    rep.smode = smode;
    rep.pmode = pmode;
    rep.lambda_grid = lambda_grid;
    std::sort(rep.lambda_grid.begin(), rep.lambda_grid.end());

    Eigen::VectorXd prev_argmin;
    double running_min = std::numeric_limits<double>::infinity();
    for (double L : rep.lambda_grid) {
        const int axes = (pmode == PairingMode::Symplectic) ? N : 2 * N;
        Eigen::VectorXd start;
        const Eigen::VectorXd* start_ptr = nullptr;
        if (prev_argmin.size() == 2 * N) {
            if (pmode == PairingMode::Free) {
                start = prev_argmin;
            } else {
                start.resize(N);
                for (int i = 0; i < N; ++i) start[i] = prev_argmin[2 * i + 1];
            }
            if (start.size() == axes) start_ptr = &start;
        }
        DeltaLambdaResult r = delta_Lambda(L, N, smode, pmode, grid_per_axis, 400, start_ptr);
        // Boxes are nested in Lambda, so any previously evaluated point remains
        // admissible: the running minimum is itself a valid infimum estimate.
        running_min = std::min(running_min, r.value);
        rep.delta_values.push_back(running_min);
        rep.grid_resolutions.push_back(r.grid_resolution);
        rep.lambda_prime_values.push_back(lambda_prime(L, N));
        prev_argmin = r.argmin;
    }

    double probe = lambda0_probe > 1.0 ? lambda0_probe : std::max(rep.lambda_grid.back(), 1.5);
    rep.lambda0_estimate = lambda0(N, smode, pmode, probe, 1e-3, grid_per_axis);
    rep.lambda1_value = lambda1(N, rep.lambda0_estimate);
    return rep;
}

} // namespace pinchflow
