#include <netflow/expander.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace netflow {

namespace {

// ---------------------------------------------------------------- integrator

// Dormand-Prince 5(4) embedded pair.
template <size_t N>
using State = std::array<double, N>;

template <size_t N>
State<N> axpy(const State<N>& y, double h, const State<N>& d) {
    State<N> out;
    for (size_t i = 0; i < N; ++i) out[i] = y[i] + h * d[i];
    return out;
}

// rhs(t, y) -> dy; record(t, y) -> false to stop after this accepted step.
template <size_t N, typename RHS, typename Record>
void dp54(State<N> y, double t, double t_end, RHS&& rhs, double tol,
          double max_step, Record&& record) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695,
                            e4 = 393.0 / 640, e5 = -92097.0 / 339200,
                            e6 = 187.0 / 2100, e7 = 1.0 / 40;

    double h = max_step;
    while (t < t_end - 1e-15) {
        h = std::min(h, t_end - t);
        const State<N> k1 = rhs(t, y);
        const State<N> k2 = rhs(t + h * a21, axpy(y, h * a21, k1));
        State<N> tmp;
        for (size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        const State<N> k3 = rhs(t + h * 3.0 / 10, tmp);
        for (size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        const State<N> k4 = rhs(t + h * 4.0 / 5, tmp);
        for (size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        const State<N> k5 = rhs(t + h * 8.0 / 9, tmp);
        for (size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                 a64 * k4[i] + a65 * k5[i]);
        const State<N> k6 = rhs(t + h, tmp);
        State<N> y5;
        for (size_t i = 0; i < N; ++i)
            y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                b6 * k6[i]);
        const State<N> k7 = rhs(t + h, y5);
        double err = 0.0;
        for (size_t i = 0; i < N; ++i) {
            const double y4 = y[i] + h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                          e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            err = std::max(err,
                           std::abs(y5[i] - y4) / (1.0 + std::abs(y5[i])));
        }
        if (err <= tol || h <= 1e-12) {
            t += h;
            y = y5;
            if (!record(t, y)) return;
        }
        const double factor =
            err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
        h = std::min(h, max_step);
    }
}

State<3> branch_rhs(double, const State<3>& y) {
    const double c = std::cos(y[2]), s = std::sin(y[2]);
    // phi' = <x, nu>, nu = (-sin phi, cos phi)
    return {c, s, -y[0] * s + y[1] * c};
}

// Fornberg weights for the first derivative at z over five nodes.
std::array<double, 5> fd5_first(const std::array<double, 5>& x, double z) {
    constexpr int n = 5, M = 1;
    double C[n][M + 1] = {};
    double c1 = 1.0;
    double c4 = x[0] - z;
    C[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, M);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    C[i][k] = c1 * (k * C[i - 1][k - 1] - c5 * C[i - 1][k]) / c2;
                C[i][0] = -c1 * c5 * C[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                C[j][k] = (c4 * C[j][k] - k * C[j][k - 1]) / c3;
            C[j][0] = c4 * C[j][0] / c3;
        }
        c1 = c2;
    }
    return {C[0][1], C[1][1], C[2][1], C[3][1], C[4][1]};
}

}  // namespace

BranchTrace branch_integrate(const Vec2& start, double phi0, double r_max,
                             const IntegratorOpts& opts) {
    BranchTrace b;
    b.points.push_back(start);
    b.phi.push_back(phi0);
    b.s.push_back(0.0);
    State<3> y{start.x, start.y, phi0};
    dp54<3>(y, 0.0, opts.max_arclength, branch_rhs, opts.tol, opts.max_step,
            [&](double s, const State<3>& ys) {
                b.points.push_back({ys[0], ys[1]});
                b.phi.push_back(ys[2]);
                b.s.push_back(s);
                if (ys[0] * ys[0] + ys[1] * ys[1] >= r_max * r_max) {
                    b.reached_target = true;
                    return false;
                }
                return true;
            });
    return b;
}

BranchTrace branch_integrate_length(const Vec2& start, double phi0,
                                    double length, const IntegratorOpts& opts) {
    BranchTrace b;
    b.points.push_back(start);
    b.phi.push_back(phi0);
    b.s.push_back(0.0);
    State<3> y{start.x, start.y, phi0};
    dp54<3>(y, 0.0, length, branch_rhs, opts.tol, opts.max_step,
            [&](double s, const State<3>& ys) {
                b.points.push_back({ys[0], ys[1]});
                b.phi.push_back(ys[2]);
                b.s.push_back(s);
                return true;
            });
    b.reached_target = !b.s.empty() && std::abs(b.s.back() - length) < 1e-10;
    return b;
}

double branch_residual_sup(const BranchTrace& b) {
    const size_t n = b.points.size();
    if (n < 5) return 0.0;
    double sup = 0.0;
    for (size_t i = 2; i + 2 < n; ++i) {
        std::array<double, 5> xs, fs;
        for (int j = 0; j < 5; ++j) {
            xs[j] = b.s[i - 2 + j];
            fs[j] = b.phi[i - 2 + j];
        }
        const auto w = fd5_first(xs, b.s[i]);
        double dphi = 0.0;
        for (int j = 0; j < 5; ++j) dphi += w[j] * fs[j];
        const Vec2 p = b.points[i];
        const double k_expect = -p.x * std::sin(b.phi[i]) + p.y * std::cos(b.phi[i]);
        sup = std::max(sup, std::abs(dphi - k_expect));
    }
    return sup;
}

namespace {

double circular_mean(const std::vector<double>& angles) {
    Vec2 acc{0.0, 0.0};
    for (double a : angles) acc += unit_dir(a);
    return angle_of(acc);
}

// Damped Newton with forward-difference Jacobian on an n-dimensional
// residual; reports max-norm of the residual.
struct NewtonResult {
    bool converged = false;
    double residual = 0.0;
    int iterations = 0;
};

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

bool solve_linear(std::vector<std::vector<double>> A, std::vector<double> b,
                  std::vector<double>& out) {
    const size_t n = b.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-14) return false;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (size_t r = col + 1; r < n; ++r) {
            const double m = A[r][col] / A[col][col];
            for (size_t c = col; c < n; ++c) A[r][c] -= m * A[col][c];
            b[r] -= m * b[col];
        }
    }
    out.assign(n, 0.0);
    for (size_t r = n; r-- > 0;) {
        double acc = b[r];
        for (size_t c = r + 1; c < n; ++c) acc -= A[r][c] * out[c];
        out[r] = acc / A[r][r];
    }
    return true;
}

NewtonResult damped_newton(std::vector<double>& z,
                           const std::function<std::vector<double>(
                               const std::vector<double>&)>& F,
                           double tol, int max_iter) {
    NewtonResult res;
    std::vector<double> f = F(z);
    double fn = max_abs(f);
    while (res.iterations < max_iter && fn > tol) {
        ++res.iterations;
        const size_t n = z.size();
        std::vector<std::vector<double>> J(n, std::vector<double>(n, 0.0));
        for (size_t c = 0; c < n; ++c) {
            std::vector<double> zp = z;
            const double eps = 1e-7 * std::max(1.0, std::abs(z[c]));
            zp[c] += eps;
            const auto fp = F(zp);
            for (size_t r = 0; r < n; ++r) J[r][c] = (fp[r] - f[r]) / eps;
        }
        std::vector<double> d;
        std::vector<double> rhs(f);
        for (auto& v : rhs) v = -v;
        if (!solve_linear(J, rhs, d)) break;
        bool accepted = false;
        for (double lam = 1.0; lam >= 1.0 / 512.0; lam *= 0.5) {
            std::vector<double> trial = z;
            for (size_t i = 0; i < n; ++i) trial[i] += lam * d[i];
            const auto ft = F(trial);
            const double ftn = max_abs(ft);
            if (ftn < (1.0 - 0.25 * lam) * fn) {
                z = trial;
                f = ft;
                fn = ftn;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    res.residual = fn;
    res.converged = fn <= tol;
    return res;
}

constexpr double kMissResidual = 10.0;  // branch failed to escape to r_max

}  // namespace

ExpanderSolution solve_triod_expander(const std::vector<double>& angles,
                                      const ShootOpts& opts) {
    if (angles.size() != 3)
        throw NetworkError("triod expander needs exactly 3 ray angles");
    ExpanderSolution sol;
    sol.ray_angles = angles;
    std::sort(sol.ray_angles.begin(), sol.ray_angles.end());
    const auto& alpha = sol.ray_angles;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (std::abs(wrap_angle(alpha[i] - alpha[j])) < 1e-9)
                throw NetworkError("ray angles must be pairwise distinct");

    IntegratorOpts newton_io{opts.ode_tol, opts.newton_step, 12.0 * opts.r_max};

    // Residual of one parameter vector under a fixed cyclic assignment.
    auto residual = [&](const std::vector<double>& z, int shift) {
        std::vector<double> r(3, kMissResidual);
        for (int i = 0; i < 3; ++i) {
            const auto b = branch_integrate({z[0], z[1]},
                                            z[2] + 2.0 * kPi * i / 3.0,
                                            opts.r_max, newton_io);
            if (b.reached_target)
                r[i] = wrap_angle(b.terminal_angle() - alpha[(i + shift) % 3]);
            else
                r[i] = kMissResidual + norm({z[0], z[1]});
        }
        return r;
    };

    // Multi-start seeds: junction along the angular centroid at three scales,
    // frame angle from the mean offset and from each ray.
    const Vec2 centroid =
        (unit_dir(alpha[0]) + unit_dir(alpha[1]) + unit_dir(alpha[2])) / 3.0;
    std::vector<double> psi_seeds;
    {
        std::vector<double> offs;
        for (int i = 0; i < 3; ++i) offs.push_back(alpha[i] - 2.0 * kPi * i / 3.0);
        psi_seeds.push_back(circular_mean(offs));
        for (int i = 0; i < 3; ++i)
            psi_seeds.push_back(alpha[i] - 2.0 * kPi * i / 3.0);
    }

    int seed_index = 0;
    for (double scale : {0.0, 0.5, 1.0}) {
        for (double psi : psi_seeds) {
            std::vector<double> z{scale * centroid.x, scale * centroid.y, psi};
            int best_shift = 0;
            double best_cost = std::numeric_limits<double>::infinity();
            for (int shift = 0; shift < 3; ++shift) {
                const double cost = max_abs(residual(z, shift));
                if (cost < best_cost) { best_cost = cost; best_shift = shift; }
            }
            const int shift = best_shift;
            auto nr = damped_newton(
                z, [&](const std::vector<double>& zz) { return residual(zz, shift); },
                opts.shoot_tol, opts.max_iterations);
            MultiStartEntry entry;
            entry.seed = seed_index++;
            entry.converged = nr.converged;
            entry.residual = nr.residual;
            entry.junction = {z[0], z[1]};
            entry.frame_angle = z[2];
            entry.iterations = nr.iterations;
            sol.multistart.push_back(entry);
            if (nr.converged && !sol.converged) {
                sol.converged = true;
                sol.junctions = {{z[0], z[1]}};
                sol.frame_angles = {z[2]};
                sol.shoot_residual = nr.residual;
                sol.junction_of_ray = {0, 0, 0};
                IntegratorOpts out_io{opts.ode_tol, opts.output_step,
                                      12.0 * opts.r_max};
                sol.ray_branches.clear();
                double sup = 0.0;
                for (int i = 0; i < 3; ++i) {
                    auto b = branch_integrate({z[0], z[1]},
                                              z[2] + 2.0 * kPi * i / 3.0,
                                              opts.r_max, out_io);
                    sup = std::max(sup, branch_residual_sup(b));
                    sol.ray_branches.push_back(std::move(b));
                }
                // Order branches by their matched target ray.
                std::vector<BranchTrace> ordered(3);
                for (int i = 0; i < 3; ++i)
                    ordered[(i + shift) % 3] = std::move(sol.ray_branches[i]);
                sol.ray_branches = std::move(ordered);
                sol.residual_sup = sup;
            }
        }
        if (sol.converged) break;
    }
    return sol;
}

ExpanderSolution solve_tree_expander(const std::vector<double>& angles,
                                     const std::array<int, 4>& pairing,
                                     const ShootOpts& opts) {
    if (angles.size() != 4)
        throw NetworkError("tree expander needs exactly 4 ray angles");
    ExpanderSolution sol;
    sol.ray_angles = angles;
    std::sort(sol.ray_angles.begin(), sol.ray_angles.end());
    const auto& alpha = sol.ray_angles;
    sol.has_internal = true;

    IntegratorOpts newton_io{opts.ode_tol, opts.newton_step, 12.0 * opts.r_max};

    // z = (px, py, psi_p, qx, qy, psi_q, ell); branch 0 of each junction is
    // the internal direction, branches +-2pi/3 serve the junction's rays.
    // sigma in {0,1} per junction swaps which ray takes the +2pi/3 branch.
    auto residual = [&](const std::vector<double>& z, int sp, int sq) {
        std::vector<double> r(7, kMissResidual);
        const Vec2 p{z[0], z[1]}, q{z[3], z[4]};
        const double ell = std::max(z[6], 1e-3);
        for (int jn = 0; jn < 2; ++jn) {
            const Vec2 base = jn == 0 ? p : q;
            const double psi = jn == 0 ? z[2] : z[5];
            const int swap = jn == 0 ? sp : sq;
            for (int b = 0; b < 2; ++b) {
                const double dir = psi + (b == 0 ? 2.0 : -2.0) * kPi / 3.0;
                const int ray = pairing[2 * jn + ((b + swap) % 2)];
                const auto tr = branch_integrate(base, dir, opts.r_max, newton_io);
                r[2 * jn + b] = tr.reached_target
                                    ? wrap_angle(tr.terminal_angle() - alpha[ray])
                                    : kMissResidual + norm(base);
            }
        }
        const auto hp = branch_integrate_length(p, z[2], ell, newton_io);
        const auto hq = branch_integrate_length(q, z[5], ell, newton_io);
        r[4] = hp.points.back().x - hq.points.back().x;
        r[5] = hp.points.back().y - hq.points.back().y;
        r[6] = wrap_angle(hp.terminal_angle() - hq.terminal_angle() - kPi);
        return r;
    };

    const double mid_p = circular_mean({alpha[pairing[0]], alpha[pairing[1]]});
    const double mid_q = circular_mean({alpha[pairing[2]], alpha[pairing[3]]});
    int seed_index = 0;
    for (double scale : {0.35, 0.6, 0.9}) {
        for (int sp = 0; sp < 2 && !sol.converged; ++sp) {
            for (int sq = 0; sq < 2 && !sol.converged; ++sq) {
                const Vec2 p0 = scale * unit_dir(mid_p);
                const Vec2 q0 = scale * unit_dir(mid_q);
                std::vector<double> z{p0.x,      p0.y, angle_of(q0 - p0), q0.x, q0.y,
                                      angle_of(p0 - q0), 0.5 * dist(p0, q0)};
                auto nr = damped_newton(
                    z,
                    [&](const std::vector<double>& zz) { return residual(zz, sp, sq); },
                    opts.shoot_tol, opts.max_iterations);
                MultiStartEntry entry;
                entry.seed = seed_index++;
                entry.converged = nr.converged;
                entry.residual = nr.residual;
                entry.junction = {z[0], z[1]};
                entry.frame_angle = z[2];
                entry.iterations = nr.iterations;
                sol.multistart.push_back(entry);
                if (!nr.converged) continue;

                sol.converged = true;
                sol.junctions = {{z[0], z[1]}, {z[3], z[4]}};
                sol.frame_angles = {z[2], z[5]};
                sol.shoot_residual = nr.residual;
                const double ell = std::max(z[6], 1e-3);
                IntegratorOpts out_io{opts.ode_tol, opts.output_step,
                                      12.0 * opts.r_max};
                sol.ray_branches.assign(4, {});
                sol.junction_of_ray.assign(4, 0);
                double sup = 0.0;
                for (int jn = 0; jn < 2; ++jn) {
                    const Vec2 base = jn == 0 ? sol.junctions[0] : sol.junctions[1];
                    const double psi = sol.frame_angles[jn];
                    const int swap = jn == 0 ? sp : sq;
                    for (int b = 0; b < 2; ++b) {
                        const double dir = psi + (b == 0 ? 2.0 : -2.0) * kPi / 3.0;
                        const int ray = pairing[2 * jn + ((b + swap) % 2)];
                        auto tr = branch_integrate(base, dir, opts.r_max, out_io);
                        sup = std::max(sup, branch_residual_sup(tr));
                        sol.ray_branches[ray] = std::move(tr);
                        sol.junction_of_ray[ray] = jn;
                    }
                    sol.internal[jn] = branch_integrate_length(
                        base, psi, ell, out_io);
                    sup = std::max(sup, branch_residual_sup(sol.internal[jn]));
                }
                sol.residual_sup = sup;
            }
        }
        if (sol.converged) break;
    }
    return sol;
}

GraphProfile graph_profile(double x0, double u0, double up0, double x1,
                           double tol) {
    GraphProfile out;
    out.x.push_back(x0);
    out.u.push_back(u0);
    out.up.push_back(up0);
    State<2> y{u0, up0};
    auto rhs = [](double x, const State<2>& s) -> State<2> {
        return {s[1], (1.0 + s[1] * s[1]) * (s[0] - x * s[1])};
    };
    dp54<2>(y, x0, x1, rhs, tol, 0.01, [&](double x, const State<2>& s) {
        out.x.push_back(x);
        out.u.push_back(s[0]);
        out.up.push_back(s[1]);
        if (std::abs(s[0]) > 1e6 || std::abs(s[1]) > 1e6) {
            out.decaying = false;
            out.note = "blow-up: not on the decaying branch";
            return false;
        }
        return true;
    });
    // Sign structure of the decaying branch: u keeps one sign, u' the
    // opposite, v = u - x u' the same as u (trivial when u == 0).
    bool all_zero = true;
    for (size_t i = 0; i < out.x.size(); ++i) {
        if (out.u[i] != 0.0 || out.up[i] != 0.0) all_zero = false;
    }
    if (!all_zero && out.decaying) {
        const double sgn = out.u.back() >= 0.0 ? 1.0 : -1.0;
        for (size_t i = 1; i < out.x.size(); ++i) {
            const double u = sgn * out.u[i], up = sgn * out.up[i];
            const double v = u - out.x[i] * up;
            if (u < 0.0 || up > 1e-12 || v < -1e-12) {
                out.sign_structure = false;
                break;
            }
        }
    }
    return out;
}

namespace {

// Transverse offsets below the angle-shooting accuracy are noise; the
// exp(x^2/2) weight would amplify anything smaller into the constants.
constexpr double kOffsetFloor = 1e-8;

BranchDecay branch_decay(const BranchTrace& b, double asymptote_angle) {
    BranchDecay d;
    const Vec2 e = unit_dir(asymptote_angle);
    const Vec2 n = rot90(e);
    double max_u = 0.0;
    for (size_t i = 0; i < b.points.size(); ++i)
        max_u = std::max(max_u, std::abs(dot(b.points[i], n)));
    if (max_u < kOffsetFloor) {
        d.straight = true;
        d.monotone_tail = true;
        return d;
    }
    // Fit window: graph coordinates resolvable above the shooting noise.
    int sign_u = 0;
    for (size_t i = 0; i < b.points.size(); ++i) {
        const double xi = dot(b.points[i], e);
        const double u = dot(b.points[i], n);
        if (xi < 1.5 || std::abs(u) < kOffsetFloor) continue;
        const double up = std::tan(b.phi[i] - asymptote_angle);
        const double upp = (1.0 + up * up) * (u - xi * up);
        const double grow = std::exp(0.5 * xi * xi);
        if (!std::isfinite(grow)) break;
        d.C_u = std::max(d.C_u, std::abs(u) * grow);
        d.C_up = std::max(d.C_up, std::abs(up) * xi * grow);
        d.C_upp = std::max(d.C_upp, std::abs(upp) * grow);
        if (d.fit_lo == 0.0) d.fit_lo = xi;
        d.fit_hi = xi;
        const int su = u > 0.0 ? 1 : -1;
        if (sign_u == 0) sign_u = su;
        if (su != sign_u || su * up > 1e-12 || su * (u - xi * up) < -1e-12)
            d.monotone_tail = false;
    }
    return d;
}

}  // namespace

DecayReport verify_decay(const ExpanderSolution& sol) {
    DecayReport rep;
    double r0 = 1.0;
    for (const auto& j : sol.junctions) r0 = std::max(r0, 1.5 * norm(j) + 0.5);
    for (size_t i = 0; i < sol.ray_branches.size(); ++i) {
        auto d = branch_decay(sol.ray_branches[i], sol.ray_angles[i]);
        if (!d.straight && d.C_u > 0.0) {
            const double needed = std::sqrt(2.0 * std::log(d.C_u * 1e8));
            if (std::isfinite(needed)) r0 = std::max(r0, needed);
        }
        rep.branches.push_back(d);
    }
    rep.r0 = r0;
    return rep;
}

Network expander_to_network(const ExpanderSolution& sol, double r_trunc) {
    if (!sol.converged)
        throw NetworkError("cannot materialise an unconverged expander");
    Network net;
    net.name = "expander";
    for (size_t j = 0; j < sol.junctions.size(); ++j)
        net.vertices.push_back({int(j), sol.junctions[j], VertexKind::Triple});
    int next_vid = int(sol.junctions.size());
    int next_sid = 0;
    for (size_t i = 0; i < sol.ray_branches.size(); ++i) {
        const auto& b = sol.ray_branches[i];
        std::vector<Vec2> pts;
        for (const auto& p : b.points) {
            if (r_trunc > 0.0 && norm(p) > r_trunc && pts.size() >= 3) break;
            pts.push_back(p);
        }
        if (pts.size() < 3)
            throw NetworkError("expander branch too short after truncation");
        const int tip = next_vid++;
        net.vertices.push_back({tip, pts.back(), VertexKind::Endpoint});
        Segment s;
        s.id = next_sid++;
        s.from = sol.junction_of_ray.empty() ? 0 : sol.junction_of_ray[i];
        s.to = tip;
        s.points = std::move(pts);
        net.segments.push_back(std::move(s));
    }
    if (sol.has_internal) {
        const auto& hp = sol.internal[0];
        const auto& hq = sol.internal[1];
        std::vector<Vec2> pts(hp.points.begin(), hp.points.end());
        pts.back() = 0.5 * (hp.points.back() + hq.points.back());
        for (size_t i = hq.points.size() - 1; i-- > 0;) pts.push_back(hq.points[i]);
        Segment s;
        s.id = next_sid++;
        s.from = 0;
        s.to = 1;
        s.points = std::move(pts);
        net.segments.push_back(std::move(s));
    }
    return net;
}

}  // namespace netflow
