#include "twistrad/ermakov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "twistrad/detail/format.hpp"
#include "twistrad/errors.hpp"

namespace twistrad {

namespace {

using State = std::array<double, 4>;

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
// Difference between the fifth- and embedded fourth-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Fifth-order dense-output weights.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

constexpr double kCollapseB = 1e-6;

template <typename OmegaFn>
State rhs(const OmegaFn& omega, double z, const State& y) {
    State f;
    const double b = y[0];
    if (!(b > 0.0) || !std::isfinite(b)) {
        f.fill(std::numeric_limits<double>::infinity());
        return f;
    }
    const double w = omega(z);
    const double inv_b2 = 1.0 / (b * b);
    f[0] = y[1];
    f[1] = inv_b2 / b - w * w * b;
    f[2] = inv_b2;
    f[3] = w;
    return f;
}

struct RawTrajectory {
    std::vector<double> z;
    std::vector<detail::DenseSegment4> segments;
    State y_end{};
};

// Adaptive integration of the envelope system from z0 to z1 (z0 < z1).
// `edges` are interior points where the RHS loses smoothness; steps never
// straddle them.  diag_scale maps the internal coordinate to the caller's z
// in diagnostics (-1 for reversed legs).
template <typename OmegaFn>
RawTrajectory run_dopri5(const OmegaFn& omega, State y, double z0, double z1,
                         double rel_tol, const std::vector<double>& edges,
                         bool store_dense, double diag_scale) {
    RawTrajectory out;
    if (y[0] < kCollapseB)
        throw EnvelopeCollapseError("envelope collapse: b below 1e-6 at start",
                                    diag_scale * z0);
    if (store_dense) out.z.push_back(z0);

    const double span = z1 - z0;
    double z = z0;
    double h = std::min(0.01 * span, 0.1);
    State k1 = rhs(omega, z, y);
    std::size_t next_edge = 0;
    long iterations = 0;

    while (z < z1) {
        if (++iterations > 20'000'000)
            throw NumericalError("envelope integration exceeded the step budget");

        while (next_edge < edges.size() && edges[next_edge] <= z) ++next_edge;
        const double target = (next_edge < edges.size()) ? edges[next_edge] : z1;
        const double h_ctrl = h;
        bool clipped = false;
        // Stretch slightly so a sliver shorter than 1% of the step cannot be
        // left behind the edge.
        if (z + 1.01 * h >= target) {
            h = target - z;
            clipped = true;
        }

        State k2, k3, k4, k5, k6, k7, yt, y1;
        for (int i = 0; i < 4; ++i) yt[i] = y[i] + h * a21 * k1[i];
        k2 = rhs(omega, z + c2 * h, yt);
        for (int i = 0; i < 4; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = rhs(omega, z + c3 * h, yt);
        for (int i = 0; i < 4; ++i)
            yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = rhs(omega, z + c4 * h, yt);
        for (int i = 0; i < 4; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = rhs(omega, z + c5 * h, yt);
        for (int i = 0; i < 4; ++i)
            yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                a65 * k5[i]);
        k6 = rhs(omega, z + h, yt);
        for (int i = 0; i < 4; ++i)
            y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                                a76 * k6[i]);
        k7 = rhs(omega, z + h, y1);

        double err_sq = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            const double sc =
                rel_tol * (1.0 + std::max(std::fabs(y[i]), std::fabs(y1[i])));
            err_sq += (ei / sc) * (ei / sc);
        }
        double err = std::sqrt(err_sq / 4.0);
        if (!std::isfinite(err)) err = 1e10;

        if (err <= 1.0) {
            // Clipped steps land exactly on their target edge.
            const double z_new = clipped ? target : z + h;
            if (store_dense) {
                detail::DenseSegment4 seg;
                seg.z0 = z;
                seg.h = h;
                for (int i = 0; i < 4; ++i) {
                    const double dy = y1[i] - y[i];
                    seg.rcont[0][i] = y[i];
                    seg.rcont[1][i] = dy;
                    seg.rcont[2][i] = h * k1[i] - dy;
                    seg.rcont[3][i] = dy - h * k7[i] - seg.rcont[2][i];
                    seg.rcont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] +
                                           d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
                }
                out.segments.push_back(seg);
                out.z.push_back(z_new);
            }
            z = z_new;
            y = y1;
            k1 = k7;
            if (y[0] < kCollapseB)
                throw EnvelopeCollapseError("envelope collapse: b below 1e-6",
                                            diag_scale * z);
            double factor = (err == 0.0) ? 5.0
                                         : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h = h * factor;
            if (clipped) h = std::max(h, h_ctrl);
        } else {
            h = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (h < 1e-14 * std::max(1.0, std::fabs(z)))
                throw NumericalError("step size underflow at z = " +
                                     detail::g17(diag_scale * z));
        }
    }
    out.y_end = y;
    return out;
}

void validate_common(double b0, double z_start, double z_end, double rel_tol,
                     const FieldProfile& profile) {
    if (!(b0 > 0.0)) throw ConfigError("envelope integration requires b0 > 0");
    if (!(z_start < z_end))
        throw ConfigError("envelope integration requires z_start < z_end");
    if (!(rel_tol >= 1e-14 && rel_tol <= 1e-4))
        throw ConfigError("rel_tol must lie in [1e-14, 1e-4]");
    if (!profile.contains(z_start, z_end))
        throw ConfigError("integration window extends outside the field domain");
}

} // namespace

ErmakovTrajectory integrate(const FieldProfile& profile, double b0, double b0_prime,
                            double z_start, double z_end, double rel_tol) {
    validate_common(b0, z_start, z_end, rel_tol, profile);

    State y{b0, b0_prime, 0.0, 0.0};
    auto raw = run_dopri5([&profile](double z) { return profile.omega(z); }, y,
                          z_start, z_end, rel_tol,
                          profile.breakpoints(z_start, z_end), true, 1.0);

    ErmakovTrajectory t;
    t.profile_ = profile;
    t.b0_ = b0;
    t.b0_prime_ = b0_prime;
    t.z_ = std::move(raw.z);
    t.segments_ = std::move(raw.segments);
    return t;
}

ErmakovTrajectory integrate_centered(const FieldProfile& profile, double b_center,
                                     double b_prime_center, double z_center,
                                     double z_start, double z_end, double rel_tol) {
    validate_common(b_center, z_start, z_end, rel_tol, profile);
    if (!(z_center >= z_start && z_center <= z_end))
        throw ConfigError("z_center must lie inside the integration window");

    double b_at_start = b_center;
    double bp_at_start = b_prime_center;
    if (z_center > z_start) {
        // Carry the state backward by integrating the reflected problem
        // forward in u = -z; the envelope is even under this map while b'
        // flips sign.
        std::vector<double> u_edges;
        for (double bp : profile.breakpoints(z_start, z_center))
            u_edges.push_back(-bp);
        std::sort(u_edges.begin(), u_edges.end());
        State y{b_center, -b_prime_center, 0.0, 0.0};
        auto back = run_dopri5([&profile](double u) { return profile.omega(-u); }, y,
                               -z_center, -z_start, rel_tol, u_edges, false, -1.0);
        b_at_start = back.y_end[0];
        bp_at_start = -back.y_end[1];
    }
    return integrate(profile, b_at_start, bp_at_start, z_start, z_end, rel_tol);
}

const detail::DenseSegment4& ErmakovTrajectory::locate(double z) const {
    const double span = z_end() - z_start();
    const double slack = 1e-9 * (span + 1.0);
    if (z < z_start() - slack || z > z_end() + slack)
        throw ConfigError("trajectory evaluated outside its window");
    auto it = std::upper_bound(z_.begin(), z_.end(), z);
    std::size_t i = (it == z_.begin()) ? 0 : static_cast<std::size_t>(it - z_.begin()) - 1;
    i = std::min(i, segments_.size() - 1);
    return segments_[i];
}

double ErmakovTrajectory::component(double z, int c) const {
    const auto& s = locate(z);
    const double th = (z - s.z0) / s.h;
    const auto& r = s.rcont;
    return r[0][c] +
           th * (r[1][c] + (1.0 - th) * (r[2][c] + th * (r[3][c] + (1.0 - th) * r[4][c])));
}

double ErmakovTrajectory::component_z_derivative(double z, int c) const {
    const auto& s = locate(z);
    const double th = (z - s.z0) / s.h;
    const auto& r = s.rcont;
    const double dp = r[1][c] + (1.0 - 2.0 * th) * r[2][c] +
                      th * (2.0 - 3.0 * th) * r[3][c] +
                      2.0 * th * (1.0 - th) * (1.0 - 2.0 * th) * r[4][c];
    return dp / s.h;
}

ErmakovState ErmakovTrajectory::state(double z) const {
    const auto& s = locate(z);
    const double th = (z - s.z0) / s.h;
    ErmakovState st;
    double* out[4] = {&st.b, &st.b_prime, &st.lewis_phase, &st.larmor_phase};
    for (int c = 0; c < 4; ++c) {
        const auto& r = s.rcont;
        *out[c] = r[0][c] + th * (r[1][c] + (1.0 - th) * (r[2][c] +
                                                          th * (r[3][c] +
                                                                (1.0 - th) * r[4][c])));
    }
    return st;
}

double ErmakovTrajectory::b_second(double z) const { return component_z_derivative(z, 1); }

std::vector<double> ErmakovTrajectory::b_prime_zeros(double z_lo, double z_hi) const {
    std::vector<double> zeros;
    const double lo = std::max(z_lo, z_start());
    const double hi = std::min(z_hi, z_end());
    if (!(lo < hi)) return zeros;

    auto bp = [this](double z) { return b_prime(z); };
    for (const auto& s : segments_) {
        const double a = std::max(s.z0, lo);
        const double b = std::min(s.z0 + s.h, hi);
        if (!(a < b)) continue;
        constexpr int kSamples = 8;
        double prev_z = a, prev_f = bp(a);
        for (int j = 1; j <= kSamples; ++j) {
            const double zj = a + (b - a) * j / kSamples;
            const double fj = bp(zj);
            if (prev_f == 0.0 && fj != 0.0) {
                zeros.push_back(prev_z);
            } else if (prev_f * fj < 0.0) {
                double xl = prev_z, xr = zj, fl = prev_f;
                for (int it = 0; it < 100 && (xr - xl) > 1e-13 * (1.0 + std::fabs(xl));
                     ++it) {
                    const double xm = 0.5 * (xl + xr);
                    const double fm = bp(xm);
                    if (fm == 0.0) {
                        xl = xr = xm;
                        break;
                    }
                    if (fl * fm < 0.0) {
                        xr = xm;
                    } else {
                        xl = xm;
                        fl = fm;
                    }
                }
                zeros.push_back(0.5 * (xl + xr));
            } else if (fj == 0.0 && j == kSamples && prev_f != 0.0) {
                zeros.push_back(zj);
            }
            prev_z = zj;
            prev_f = fj;
        }
    }
    std::sort(zeros.begin(), zeros.end());
    const double tol = 1e-9 * (z_end() - z_start() + 1.0);
    zeros.erase(std::unique(zeros.begin(), zeros.end(),
                            [tol](double x, double y) { return std::fabs(x - y) < tol; }),
                zeros.end());
    // Zeros within the dedup tolerance of a boundary count as boundary zeros
    // (they would only produce degenerate quadrature panels downstream).
    std::erase_if(zeros,
                  [&](double z) { return z <= z_lo + tol || z >= z_hi - tol; });
    return zeros;
}

ErmakovState analytic_free(double b0, double z) {
    if (!(b0 > 0.0)) throw ConfigError("analytic_free requires b0 > 0");
    const double b02 = b0 * b0;
    const double root = std::sqrt(1.0 + (z * z) / (b02 * b02));
    ErmakovState st;
    st.b = b0 * root;
    st.b_prime = z / (b02 * b0 * root);
    st.lewis_phase = std::atan(z / b02);
    st.larmor_phase = 0.0;
    return st;
}

double residual(const ErmakovTrajectory& trajectory, double z) {
    const double b = trajectory.b(z);
    const double w = trajectory.profile().omega(z);
    return trajectory.b_second(z) + w * w * b - 1.0 / (b * b * b);
}

double freespace_invariant(double b, double b_prime) {
    if (!(b > 0.0)) throw ConfigError("freespace_invariant requires b > 0");
    return b_prime * b_prime + 1.0 / (b * b);
}

void write_trajectory_csv(const ErmakovTrajectory& trajectory, std::ostream& os,
                          std::size_t n_samples) {
    if (n_samples < 2) throw ConfigError("trajectory export needs at least 2 samples");
    os << "z,b,b_prime,lewis_phase,larmor_phase\n";
    const double z0 = trajectory.z_start();
    const double z1 = trajectory.z_end();
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double z = z0 + (z1 - z0) * static_cast<double>(i) /
                                  static_cast<double>(n_samples - 1);
        const ErmakovState st = trajectory.state(z);
        os << detail::g17(z) << ',' << detail::g17(st.b) << ',' << detail::g17(st.b_prime)
           << ',' << detail::g17(st.lewis_phase) << ',' << detail::g17(st.larmor_phase)
           << '\n';
    }
}

} // namespace twistrad
