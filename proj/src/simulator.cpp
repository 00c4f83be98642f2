#include "pinchflow/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pinchflow {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

bool power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

double shear_f(double x, int harmonics) {
    double s = 0.0;
    for (int h = 1; h <= harmonics; ++h) s += std::sin(kTwoPi * h * x) / (h * h);
    return s;
}
double shear_fp(double x, int harmonics) {
    double s = 0.0;
    for (int h = 1; h <= harmonics; ++h) s += kTwoPi * std::cos(kTwoPi * h * x) / h;
    return s;
}

// ----------------------------------------------------------------------------
// Periodic stencils (orders 2 and 4), row-major fields
// ----------------------------------------------------------------------------

struct Stencil {
    int L;
    int order;
    double h;

    int wrap(int i) const { return (i % L + L) % L; }
    double f(const std::vector<double>& v, int i, int j) const {
        return v[(size_t)wrap(i) * L + wrap(j)];
    }

    double dx(const std::vector<double>& v, int i, int j) const {
        if (order == 2) return (f(v, i + 1, j) - f(v, i - 1, j)) / (2 * h);
        return (-f(v, i + 2, j) + 8 * f(v, i + 1, j) - 8 * f(v, i - 1, j) + f(v, i - 2, j)) /
               (12 * h);
    }
    double dy(const std::vector<double>& v, int i, int j) const {
        if (order == 2) return (f(v, i, j + 1) - f(v, i, j - 1)) / (2 * h);
        return (-f(v, i, j + 2) + 8 * f(v, i, j + 1) - 8 * f(v, i, j - 1) + f(v, i, j - 2)) /
               (12 * h);
    }
    double dxx(const std::vector<double>& v, int i, int j) const {
        if (order == 2) return (f(v, i + 1, j) - 2 * f(v, i, j) + f(v, i - 1, j)) / (h * h);
        return (-f(v, i + 2, j) + 16 * f(v, i + 1, j) - 30 * f(v, i, j) + 16 * f(v, i - 1, j) -
                f(v, i - 2, j)) /
               (12 * h * h);
    }
    double dyy(const std::vector<double>& v, int i, int j) const {
        if (order == 2) return (f(v, i, j + 1) - 2 * f(v, i, j) + f(v, i, j - 1)) / (h * h);
        return (-f(v, i, j + 2) + 16 * f(v, i, j + 1) - 30 * f(v, i, j) + 16 * f(v, i, j - 1) -
                f(v, i, j - 2)) /
               (12 * h * h);
    }
    double dxy(const std::vector<double>& v, int i, int j) const {
        if (order == 2)
            return (f(v, i + 1, j + 1) - f(v, i + 1, j - 1) - f(v, i - 1, j + 1) +
                    f(v, i - 1, j - 1)) /
                   (4 * h * h);
        // nested 4th-order first derivatives
        auto dyv = [&](int ii, int jj) {
            return (-f(v, ii, jj + 2) + 8 * f(v, ii, jj + 1) - 8 * f(v, ii, jj - 1) +
                    f(v, ii, jj - 2)) /
                   (12 * h);
        };
        return (-dyv(i + 2, j) + 8 * dyv(i + 1, j) - 8 * dyv(i - 1, j) + dyv(i - 2, j)) /
               (12 * h);
    }
};

struct Jac {
    double j11, j12, j21, j22;
};

Jac jacobian_at(const TorusMap& map, const Stencil& st, int i, int j) {
    return {map.linear[0] + st.dx(map.w1, i, j), map.linear[1] + st.dy(map.w1, i, j),
            map.linear[2] + st.dx(map.w2, i, j), map.linear[3] + st.dy(map.w2, i, j)};
}

double max_singular_value(const Jac& J) {
    const double a = J.j11 * J.j11 + J.j21 * J.j21;
    const double b = J.j11 * J.j12 + J.j21 * J.j22;
    const double c = J.j12 * J.j12 + J.j22 * J.j22;
    const double disc = std::sqrt(std::max(0.0, 0.25 * (a - c) * (a - c) + b * b));
    return std::sqrt(0.5 * (a + c) + disc);
}

} // namespace

Mat2 TorusMap::analytic_jacobian(int i, int j) const {
    if (!has_generator())
        throw ValidationError("analytic_jacobian: map was not built by a generator");
    const double x = (double)i / L, y = (double)j / L;
    switch (generator_kind) {
    case 0: return {1, 0, 0, 1};
    case 1:
        return {(double)linear[0], (double)linear[1], (double)linear[2], (double)linear[3]};
    case 2: {
        const double fp = eps * shear_fp(x, harmonics);
        const double gp = eps * shear_fp(y + eps * shear_f(x, harmonics), harmonics);
        return {1.0 + gp * fp, gp, fp, 1.0};
    }
    default: throw ValidationError("analytic_jacobian: unknown generator");
    }
}

TorusMap make_map(MapKind kind, int L, const std::array<int, 4>& A, double eps, int harmonics) {
    if (!power_of_two(L) || L < 32)
        throw ValidationError("TorusMap grid size must be a power of two >= 32");
    if (eps < 0.0) throw ValidationError("make_map needs eps >= 0");
    if (harmonics < 1) throw ValidationError("make_map needs harmonics >= 1");

    TorusMap map;
    map.L = L;
    map.w1.assign((size_t)L * L, 0.0);
    map.w2.assign((size_t)L * L, 0.0);

    switch (kind) {
    case MapKind::Identity: map.generator_kind = 0; break;
    case MapKind::Linear: {
        const long long det = (long long)A[0] * A[3] - (long long)A[1] * A[2];
        if (det != 1) throw ValidationError("NotUnimodular: linear map needs det A = 1");
        map.linear = A;
        map.generator_kind = 1;
        break;
    }
    case MapKind::ComposedShears: {
        map.generator_kind = 2;
        map.eps = eps;
        map.harmonics = harmonics;
        for (int i = 0; i < L; ++i) {
            const double x = (double)i / L;
            const double fx = shear_f(x, harmonics);
            for (int j = 0; j < L; ++j) {
                const double y = (double)j / L;
                map.at1(i, j) = eps * shear_f(y + eps * fx, harmonics);
                map.at2(i, j) = eps * fx;
            }
        }
        break;
    }
    }

    // Area preservation of the generator, checked on the exact Jacobian.
    double worst = 0.0;
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
            Mat2 J = map.analytic_jacobian(i, j);
            worst = std::max(worst, std::abs(J.a11 * J.a22 - J.a12 * J.a21 - 1.0));
        }
    if (worst > 1e-10)
        throw NumericalError("make_map: generator is not area-preserving to 1e-10");
    return map;
}

void FlowConfig::validate() const {
    if (!(dt_factor > 0.0) || dt_factor > 0.25)
        throw ValidationError("FlowConfig: dt_factor must lie in (0, 0.25]");
    if (!(t_end > 0.0)) throw ValidationError("FlowConfig: t_end must be positive");
    if (stencil_order != 2 && stencil_order != 4)
        throw ValidationError("FlowConfig: stencil order must be 2 or 4");
    if (record_every < 1) throw ValidationError("FlowConfig: record_every >= 1");
}

FlowRecord monitors(const TorusMap& map, int stencil_order,
                    const std::optional<std::pair<double, double>>& log_k_l) {
    const int L = map.L;
    const Stencil st{L, stencil_order, 1.0 / L};
    FlowRecord rec;
    rec.min_star_omega = std::numeric_limits<double>::infinity();
    rec.max_star_omega = 0.0;

    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
            const Jac J = jacobian_at(map, st, i, j);
            const double g11 = 1 + J.j11 * J.j11 + J.j21 * J.j21;
            const double g12 = J.j11 * J.j12 + J.j21 * J.j22;
            const double g22 = 1 + J.j12 * J.j12 + J.j22 * J.j22;
            const double detg = g11 * g22 - g12 * g12;
            const double so = 1.0 / std::sqrt(detg);
            rec.min_star_omega = std::min(rec.min_star_omega, so);
            rec.max_star_omega = std::max(rec.max_star_omega, so);
            rec.max_lambda = std::max(rec.max_lambda, max_singular_value(J));
            rec.det_drift = std::max(
                rec.det_drift, std::abs(J.j11 * J.j22 - J.j12 * J.j21 - 1.0));

            // |II|^2 of the graph F(x) = (x, u(x)) in the flat 4-torus.
            const double H1[3] = {st.dxx(map.w1, i, j), st.dxy(map.w1, i, j),
                                  st.dyy(map.w1, i, j)};
            const double H2[3] = {st.dxx(map.w2, i, j), st.dxy(map.w2, i, j),
                                  st.dyy(map.w2, i, j)};
            const double ig11 = g22 / detg, ig12 = -g12 / detg, ig22 = g11 / detg;
            const double U1[2] = {J.j11, J.j21}, U2[2] = {J.j12, J.j22};
            // II components as 4-vectors (coefficients along e1,e2,f1,f2)
            double II[3][4];
            for (int q = 0; q < 3; ++q) {
                const double b1 = H1[q] * U1[0] + H2[q] * U1[1];
                const double b2 = H1[q] * U2[0] + H2[q] * U2[1];
                const double c1 = ig11 * b1 + ig12 * b2;
                const double c2 = ig12 * b1 + ig22 * b2;
                II[q][0] = -c1;
                II[q][1] = -c2;
                II[q][2] = H1[q] - c1 * J.j11 - c2 * J.j12;
                II[q][3] = H2[q] - c1 * J.j21 - c2 * J.j22;
            }
            auto comp = [&](int a, int b) { return a == 0 && b == 0 ? 0 : (a + b == 2 && a == b ? 2 : 1); };
            // index map (i,j) in {0,1}^2 -> stored component 0:xx 1:xy 2:yy
            const double igm[2][2] = {{ig11, ig12}, {ig12, ig22}};
            double ii2 = 0.0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (int c = 0; c < 2; ++c)
                        for (int d = 0; d < 2; ++d) {
                            const double* A = II[comp(a, b)];
                            const double* B = II[comp(c, d)];
                            const double ip =
                                A[0] * B[0] + A[1] * B[1] + A[2] * B[2] + A[3] * B[3];
                            ii2 += igm[a][c] * igm[b][d] * ip;
                        }
            rec.max_II2 = std::max(rec.max_II2, ii2);
            if (log_k_l) {
                const double x = std::exp(log_k_l->first + log_k_l->second * std::log(so));
                rec.g_ratio = std::max(rec.g_ratio, ii2 / std::sin(x));
            }
        }
    return rec;
}

namespace {

/// RHS of the nonparametric flow: g^{ij}(Du) d^2_ij w.
void flow_rhs(const TorusMap& map, const Stencil& st, std::vector<double>& out1,
              std::vector<double>& out2) {
    const int L = map.L;
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
            const Jac J = jacobian_at(map, st, i, j);
            const double g11 = 1 + J.j11 * J.j11 + J.j21 * J.j21;
            const double g12 = J.j11 * J.j12 + J.j21 * J.j22;
            const double g22 = 1 + J.j12 * J.j12 + J.j22 * J.j22;
            const double detg = g11 * g22 - g12 * g12;
            const double ig11 = g22 / detg, ig12 = -g12 / detg, ig22 = g11 / detg;
            out1[(size_t)i * L + j] = ig11 * st.dxx(map.w1, i, j) +
                                      2 * ig12 * st.dxy(map.w1, i, j) +
                                      ig22 * st.dyy(map.w1, i, j);
            out2[(size_t)i * L + j] = ig11 * st.dxx(map.w2, i, j) +
                                      2 * ig12 * st.dxy(map.w2, i, j) +
                                      ig22 * st.dyy(map.w2, i, j);
        }
}

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
    for (size_t q = 0; q < y.size(); ++q) y[q] += a * x[q];
}

/// First-derivative-only pass: min *Omega over the grid.
double min_star_omega_of(const TorusMap& map, const Stencil& st) {
    double mso = std::numeric_limits<double>::infinity();
    for (int i = 0; i < map.L; ++i)
        for (int j = 0; j < map.L; ++j) {
            const Jac J = jacobian_at(map, st, i, j);
            const double g11 = 1 + J.j11 * J.j11 + J.j21 * J.j21;
            const double g12 = J.j11 * J.j12 + J.j21 * J.j22;
            const double g22 = 1 + J.j12 * J.j12 + J.j22 * J.j22;
            mso = std::min(mso, 1.0 / std::sqrt(g11 * g22 - g12 * g12));
        }
    return mso;
}

} // namespace

TorusMap flow_step(const TorusMap& map, double dt, int stencil_order) {
    const double h = 1.0 / map.L;
    if (dt > 0.25 * h * h * (1.0 + 1e-12))
        throw NumericalError("UnstableStep: dt exceeds 0.25 dx^2");
    const Stencil st{map.L, stencil_order, h};
    TorusMap next = map;
    std::vector<double> k1a(map.w1.size()), k1b(map.w1.size());
    std::vector<double> k2a(map.w1.size()), k2b(map.w1.size());
    flow_rhs(map, st, k1a, k1b);
    TorusMap mid = map;
    axpy(mid.w1, dt, k1a);
    axpy(mid.w2, dt, k1b);
    flow_rhs(mid, st, k2a, k2b);
    for (size_t q = 0; q < next.w1.size(); ++q) {
        next.w1[q] += 0.5 * dt * (k1a[q] + k2a[q]);
        next.w2[q] += 0.5 * dt * (k1b[q] + k2b[q]);
    }
    next.generator_kind = -1; // evolved states no longer carry generator data
    return next;
}

FlowSeries run_flow(const TorusMap& map, const FlowConfig& config) {
    config.validate();
    const int L = map.L;
    const double h = 1.0 / L;
    const double dt = config.dt_factor * h * h;
    const long long steps = (long long)std::llround(config.t_end / dt);
    const Stencil st{L, config.stencil_order, h};

    FlowSeries series;
    TorusMap state = map;

    FlowRecord r0 = monitors(state, config.stencil_order, config.monitor_log_k_l);
    r0.t = 0.0;
    series.records.push_back(r0);
    series.initial_max_lambda = r0.max_lambda;
    double max_lambda_seen = r0.max_lambda;
    if (r0.min_star_omega < 1e-3)
        throw NumericalError("NonGraphical: initial min *Omega below 1e-3");

    std::vector<double> k1a(state.w1.size()), k1b(state.w1.size());
    std::vector<double> k2a(state.w1.size()), k2b(state.w1.size());
    double prev_min_so = r0.min_star_omega;
    double worst_drop = 0.0;

    state.generator_kind = -1;
    for (long long s = 1; s <= steps; ++s) {
        flow_rhs(state, st, k1a, k1b);
        TorusMap mid = state;
        axpy(mid.w1, dt, k1a);
        axpy(mid.w2, dt, k1b);
        flow_rhs(mid, st, k2a, k2b);
        for (size_t q = 0; q < state.w1.size(); ++q) {
            state.w1[q] += 0.5 * dt * (k1a[q] + k2a[q]);
            state.w2[q] += 0.5 * dt * (k1b[q] + k2b[q]);
        }
        const double min_so = min_star_omega_of(state, st);
        if (!std::isfinite(min_so))
            throw NumericalError("UnstableStep: flow state became non-finite");
        if (min_so < 1e-3) throw NumericalError("NonGraphical: min *Omega below 1e-3");
        worst_drop = std::min(worst_drop, min_so - prev_min_so);
        prev_min_so = min_so;

        const bool record = (s % config.record_every == 0) || s == steps;
        if (record) {
            FlowRecord rec = monitors(state, config.stencil_order, config.monitor_log_k_l);
            rec.t = s * dt;
            series.records.push_back(rec);
            max_lambda_seen = std::max(max_lambda_seen, rec.max_lambda);
            if (config.stop_II2 > 0.0 && rec.max_II2 < config.stop_II2) {
                series.final_t = rec.t;
                series.steps = (int)s;
                break;
            }
        }
        series.final_t = s * dt;
        series.steps = (int)s;
    }

    series.worst_step_drop = worst_drop;
    series.min_omega_monotone = worst_drop >= -1e-6;
    series.pinching_preserved = max_lambda_seen <= series.initial_max_lambda + 1e-4;
    return series;
}

RiccatiComparison compare_to_riccati(const FlowSeries& series, const KLParams& kl,
                                     std::optional<double> K1_override) {
    if (!kl.feasible) throw ValidationError("InfeasibleKL: compare_to_riccati needs feasible k,l");
    if (series.records.empty()) throw ValidationError("compare_to_riccati: empty series");

    RiccatiComparison cmp;
    if (K1_override) {
        cmp.K1 = *K1_override;
    } else {
        cmp.K1 = verify_pinch_window(kl).K1;
    }
    cmp.y0 = series.records.front().g_ratio;
    cmp.envelope_valid = cmp.K1 < 0.0;
    cmp.dominated = true;
    cmp.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& rec : series.records) {
        const double denom = 1.0 - cmp.y0 * cmp.K1 * rec.t;
        if (denom <= 0.0) {
            // Envelope blew up in finite time: vacuous for comparison purposes.
            cmp.envelope_valid = false;
            cmp.envelope.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        const double y = cmp.y0 / denom;
        cmp.envelope.push_back(y);
        if (rec.g_ratio > y * (1.0 + 1e-9) + 1e-12) cmp.dominated = false;
        if (rec.t > 0.0) cmp.worst_margin = std::min(cmp.worst_margin, y - rec.g_ratio);
    }
    if (cmp.K1 >= 0.0) cmp.envelope_valid = false; // increasing envelope carries no content
    return cmp;
}

void save_map(const TorusMap& map, const std::string& path) {
    if (map.linear != std::array<int, 4>{1, 0, 0, 1})
        throw ValidationError("save_map: the grid file format carries periodic maps only");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("save_map: cannot open " + path);
    out << "L " << map.L << "\n";
    char buf[128];
    for (int i = 0; i < map.L; ++i)
        for (int j = 0; j < map.L; ++j) {
            std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g\n", i, j, map.get1(i, j),
                          map.get2(i, j));
            out << buf;
        }
}

TorusMap load_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("load_map: cannot open " + path);
    std::string tag;
    int L = 0;
    if (!(in >> tag >> L) || tag != "L")
        throw ValidationError("load_map: expected header 'L <int>'");
    if (!power_of_two(L) || L < 32)
        throw ValidationError("load_map: grid size must be a power of two >= 32");
    TorusMap map;
    map.L = L;
    map.w1.assign((size_t)L * L, 0.0);
    map.w2.assign((size_t)L * L, 0.0);
    int i, j;
    double a, b;
    for (long long q = 0; q < (long long)L * L; ++q) {
        if (!(in >> i >> j >> a >> b)) throw ValidationError("load_map: truncated grid file");
        if (i < 0 || i >= L || j < 0 || j >= L)
            throw ValidationError("load_map: index out of range");
        map.at1(i, j) = a;
        map.at2(i, j) = b;
    }
    return map;
}

} // namespace pinchflow
