#include "twistrad/emission.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

#include "twistrad/detail/format.hpp"
#include "twistrad/detail/quadrature.hpp"
#include "twistrad/errors.hpp"

namespace twistrad {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

void validate_polarization(int lambda) {
    if (lambda != 1 && lambda != -1) throw ConfigError("lambda must be +1 or -1");
}

void validate_angle(double theta) {
    if (!(theta >= 0.0 && theta <= kPi))
        throw ConfigError("theta must lie in [0, pi]");
}

PhotonKinematics build_kinematics(double bracket, const TransitionContext& ctx,
                                  double theta, double phi, int lambda) {
    validate_polarization(lambda);
    validate_angle(theta);
    const double beta = ctx.kin.beta;
    PhotonKinematics kin;
    kin.theta = theta;
    kin.phi = phi;
    kin.lambda = lambda;
    kin.omega_norm = 0.5 * beta * bracket;
    kin.k_z_term = 0.5 * beta * std::cos(theta) * bracket;
    kin.k_perp_scaled = 0.5 * beta * std::sin(theta) / ctx.kin.chi * bracket;
    return kin;
}

// Amplitude integrand with precomputed photon kinematics.
cplx s_perp_with(double z, const TransitionContext& ctx, const PhotonKinematics& kin,
                 bool dipole) {
    const double b = ctx.trajectory.b(z);
    const double bp = ctx.trajectory.b_prime(z);
    const double w = ctx.trajectory.profile().omega(z);
    // Phase-branch fold: both ladder coefficients are taken on the branch
    // that matches the closed-form rate; the branch flips where b' changes
    // sign (b' >= 0 keeps the literal coefficients).
    const double fold = (bp >= 0.0) ? 1.0 : -1.0;

    DisplacementParam kap{};
    if (!dipole) kap = displacement_param(b, kin.k_perp_scaled, kin.phi);

    const double cos_t = std::cos(kin.theta);
    cplx sum{0.0, 0.0};
    for (int sigma : {1, -1}) {
        CircCoeffs c = c_coeffs(b, bp, w, sigma);
        c.c_a *= fold;
        c.c_adag *= fold;
        const cplx kap_same = (sigma > 0) ? kap.kappa_plus : kap.kappa_minus;
        const cplx kap_other = (sigma > 0) ? kap.kappa_minus : kap.kappa_plus;
        const int nf_same = (sigma > 0) ? ctx.final.n_plus : ctx.final.n_minus;
        const int ni_same = (sigma > 0) ? ctx.initial.n_plus : ctx.initial.n_minus;
        const int nf_other = (sigma > 0) ? ctx.final.n_minus : ctx.final.n_plus;
        const int ni_other = (sigma > 0) ? ctx.initial.n_minus : ctx.initial.n_plus;

        const cplx p = p_weight(nf_same, ni_same, kap_same, c);
        const cplx f_other = form_factor(nf_other, ni_other, kap_other);
        const cplx eps_conj = ((cos_t - kin.lambda * sigma) / std::numbers::sqrt2) *
                              std::polar(1.0, -sigma * kin.phi);
        sum += eps_conj * p * f_other;
    }
    return 0.5 * std::exp(kI * delta_phi(z, ctx, kin)) * sum;
}

double simpson_uniform(const std::vector<double>& y, double h) {
    const std::size_t n = y.size();
    if (n < 2) return 0.0;
    std::size_t m = n - 1; // interval count
    double s = 0.0;
    if (m == 1) return 0.5 * h * (y[0] + y[1]);
    if (m % 2 == 1) {
        // 3/8 rule on the last three intervals, classic Simpson on the rest.
        s += 3.0 * h / 8.0 * (y[m - 3] + 3.0 * y[m - 2] + 3.0 * y[m - 1] + y[m]);
        m -= 3;
        if (m == 0) return s;
    }
    double odd = 0.0, even = 0.0;
    for (std::size_t i = 1; i < m; i += 2) odd += y[i];
    for (std::size_t i = 2; i < m; i += 2) even += y[i];
    s += h / 3.0 * (y[0] + 4.0 * odd + 2.0 * even + y[m]);
    return s;
}

} // namespace

double bracket_at(const TransitionContext& ctx, double z) {
    const ErmakovState st = ctx.trajectory.state(z);
    const double w = ctx.trajectory.profile().omega(z);
    const double kinetic = st.b_prime * st.b_prime + 1.0 / (st.b * st.b) +
                           w * w * st.b * st.b;
    return kinetic * ctx.delta_N + 2.0 * w * ctx.delta_l;
}

TransitionContext make_context(const ModeLabel& initial, const ModeLabel& final,
                               const BeamKinematics& kin, double L,
                               ErmakovTrajectory trajectory) {
    if (initial.n_plus < 0 || initial.n_minus < 0 || final.n_plus < 0 ||
        final.n_minus < 0)
        throw ConfigError("mode labels must be non-negative");
    if (!(L > 0.0)) throw ConfigError("interaction length must be positive");

    const double slack = 1e-9 * (L + 1.0);
    if (trajectory.z_start() > -0.5 * L + slack || trajectory.z_end() < 0.5 * L - slack)
        throw ConfigError("trajectory does not span the interaction window");

    TransitionContext ctx{initial, final, kin, L, std::move(trajectory)};
    ctx.z_lo = -0.5 * L;
    ctx.z_hi = 0.5 * L;
    ctx.delta_N = (initial.n_plus + initial.n_minus) - (final.n_plus + final.n_minus);
    ctx.delta_l = initial.ell() - final.ell();

    // Window average of the bracket (fixes the quasi-monochromatic photon).
    std::vector<double> edges{ctx.z_lo};
    for (double b : ctx.trajectory.profile().breakpoints(ctx.z_lo, ctx.z_hi))
        edges.push_back(b);
    edges.push_back(ctx.z_hi);
    const double seg_tol = 1e-11 * std::max(1.0, L) / static_cast<double>(edges.size());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        auto r = detail::integrate_adaptive(
            [&ctx](double z) { return bracket_at(ctx, z); }, edges[i], edges[i + 1],
            seg_tol);
        total += r.value;
    }
    ctx.bracket_avg = total / L;

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = 0; i <= 64; ++i) {
        const double z = ctx.z_lo + (ctx.z_hi - ctx.z_lo) * i / 64.0;
        const double v = bracket_at(ctx, z);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    ctx.bracket_varies = (hi - lo) > 1e-10 * (std::fabs(ctx.bracket_avg) + 1.0);
    return ctx;
}

PhotonKinematics photon_kinematics(double z, const TransitionContext& ctx, double theta,
                                   double phi, int lambda) {
    return build_kinematics(bracket_at(ctx, z), ctx, theta, phi, lambda);
}

PhotonKinematics photon_kinematics_avg(const TransitionContext& ctx, double theta,
                                       double phi, int lambda) {
    return build_kinematics(ctx.bracket_avg, ctx, theta, phi, lambda);
}

double delta_phi(double z, const TransitionContext& ctx, const PhotonKinematics& kin) {
    const double lin = kin.omega_norm / ctx.kin.beta - kin.k_z_term;
    const double lewis_rel =
        ctx.trajectory.lewis_phase(z) - ctx.trajectory.lewis_phase(ctx.z_lo);
    const double larmor_rel =
        ctx.trajectory.larmor_phase(z) - ctx.trajectory.larmor_phase(ctx.z_lo);
    return lin * z - ctx.delta_N * lewis_rel - ctx.delta_l * larmor_rel;
}

std::complex<double> s_perp(double z, const TransitionContext& ctx, double theta,
                            double phi, int lambda, bool dipole) {
    const PhotonKinematics kin = photon_kinematics_avg(ctx, theta, phi, lambda);
    return s_perp_with(z, ctx, kin, dipole);
}

AmplitudeResult amplitude_integral(const TransitionContext& ctx, double theta, double phi,
                                   int lambda, bool dipole) {
    const PhotonKinematics kin = photon_kinematics_avg(ctx, theta, phi, lambda);
    const double lin = kin.omega_norm / ctx.kin.beta - kin.k_z_term;

    // Bound on the local phase advance rate over the window.
    double b_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 128; ++i) {
        const double z = ctx.z_lo + (ctx.z_hi - ctx.z_lo) * i / 128.0;
        b_min = std::min(b_min, ctx.trajectory.b(z));
    }
    b_min = std::max(b_min, 1e-6);
    const double phase_rate = std::fabs(lin) +
                              std::abs(ctx.delta_N) / (b_min * b_min) +
                              std::abs(ctx.delta_l) + 1e-12;

    // Panel edges: window ends, field breakpoints, branch-fold flips.
    std::vector<double> edges{ctx.z_lo};
    for (double b : ctx.trajectory.profile().breakpoints(ctx.z_lo, ctx.z_hi))
        edges.push_back(b);
    for (double zb : ctx.trajectory.b_prime_zeros(ctx.z_lo, ctx.z_hi))
        edges.push_back(zb);
    edges.push_back(ctx.z_hi);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<std::pair<double, double>> panels;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double width = edges[i + 1] - edges[i];
        if (!(width > 0.0)) continue;
        const int parts = std::clamp(
            static_cast<int>(std::ceil(width * phase_rate / (kPi / 4.0))), 1, 200000);
        for (int j = 0; j < parts; ++j) {
            panels.emplace_back(edges[i] + width * j / parts,
                                edges[i] + width * (j + 1) / parts);
        }
    }

    auto f = [&](double z) { return s_perp_with(z, ctx, kin, dipole); };

    double peak = 0.0;
    for (int i = 0; i <= 16; ++i) {
        const double z = ctx.z_lo + (ctx.z_hi - ctx.z_lo) * i / 16.0;
        peak = std::max(peak, std::abs(f(z)));
    }
    const double tol_total = 1e-10 * peak;
    const double panel_tol = tol_total / static_cast<double>(panels.size());

    AmplitudeResult out;
    bool all_converged = true;
    for (const auto& [a, b] : panels) {
        auto r = detail::integrate_adaptive(f, a, b, panel_tol, 8);
        out.value += r.value;
        out.abs_error += r.abs_error;
        all_converged = all_converged && r.converged;
    }
    out.converged = all_converged || out.abs_error <= tol_total;
    return out;
}

double fieldfree_amplitude_sq(double theta, int lambda, double L, double b0, int ell_i,
                              double beta) {
    validate_polarization(lambda);
    validate_angle(theta);
    if (!(b0 > 0.0) || !(L > 0.0) || ell_i < 0)
        throw ConfigError("fieldfree_amplitude_sq requires b0 > 0, L > 0, ell_i >= 0");
    const double x = (1.0 - beta * std::cos(theta)) * L / (8.0 * b0 * b0);
    const double sin_x = std::sin(x);
    const double env = std::pow(sin_x, 4) / (x * x);
    const double pol = 1.0 - lambda * std::cos(theta);
    return static_cast<double>(ell_i) / (b0 * b0) * pol * pol / 8.0 * L * L * env;
}

double fieldfree_rate(double theta, double L, double b0, int ell_i,
                      const BeamKinematics& kin) {
    validate_angle(theta);
    if (!(b0 > 0.0) || !(L > 0.0) || ell_i < 0)
        throw ConfigError("fieldfree_rate requires b0 > 0, L > 0, ell_i >= 0");
    const double s = std::sin(theta);
    if (s <= 1e-15) return 0.0;
    const double cos_t = std::cos(theta);
    const double x = (1.0 - kin.beta * cos_t) * L / (8.0 * b0 * b0);
    const double sin_x = std::sin(x);
    const double env = std::pow(sin_x, 4) / (x * x);
    const double chi2 = kin.chi * kin.chi;
    const double pref = ell_i * constants::fine_structure *
                        std::pow(kin.beta, 4) * kin.gamma / (chi2 * chi2);
    return pref * env * (1.0 + cos_t * cos_t) * s / (8.0 * std::pow(b0, 4));
}

RateCurve fieldfree_rate_curve(const std::vector<double>& thetas, double L, double b0,
                               int ell_i, const BeamKinematics& kin) {
    if (thetas.empty()) throw ConfigError("theta grid must not be empty");
    RateCurve curve;
    curve.theta = thetas;
    curve.rate_norm.reserve(thetas.size());
    for (double t : thetas) curve.rate_norm.push_back(fieldfree_rate(t, L, b0, ell_i, kin));
    curve.b0 = b0;
    curve.L = L;
    curve.beta = kin.beta;
    curve.chi = kin.chi;
    curve.ell_i = ell_i;
    curve.profile_kind = "zero";
    curve.omega_model = "closed-form";
    return curve;
}

RateCurve general_rate_curve(const TransitionContext& ctx,
                             const std::vector<double>& thetas, int phi_samples,
                             bool dipole) {
    if (thetas.empty()) throw ConfigError("theta grid must not be empty");
    if (phi_samples < 1) throw ConfigError("phi_samples must be >= 1");
    if (!(ctx.bracket_avg > 0.0))
        throw NumericalError("dark channel: photon energy is non-positive (bracket = " +
                             detail::g17(ctx.bracket_avg) + ")");

    const double beta = ctx.kin.beta;
    const double chi2 = ctx.kin.chi * ctx.kin.chi;
    const double pref =
        constants::fine_structure * beta * beta * beta * ctx.kin.gamma / (chi2 * chi2);
    const double omega_norm_avg = 0.5 * beta * ctx.bracket_avg;

    std::vector<double> values(thetas.size(), 0.0);
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= thetas.size()) return;
            try {
                const double theta = thetas[i];
                const double s = std::sin(theta);
                if (s <= 1e-15 || theta <= 0.0 || theta >= kPi) {
                    values[i] = 0.0;
                    continue;
                }
                double pol_sum = 0.0;
                for (int lambda : {1, -1}) {
                    if (dipole) {
                        const auto amp = amplitude_integral(ctx, theta, 0.0, lambda, true);
                        pol_sum += std::norm(amp.value);
                    } else {
                        double mean = 0.0;
                        for (int j = 0; j < phi_samples; ++j) {
                            const double phi = 2.0 * kPi * j / phi_samples;
                            const auto amp =
                                amplitude_integral(ctx, theta, phi, lambda, false);
                            mean += std::norm(amp.value);
                        }
                        pol_sum += mean / phi_samples;
                    }
                }
                values[i] = pref * omega_norm_avg * s * pol_sum / (ctx.L * ctx.L);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const std::size_t n_threads = std::min<std::size_t>(hw, thetas.size());
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);

    RateCurve curve;
    curve.theta = thetas;
    curve.rate_norm = std::move(values);
    curve.b0 = ctx.trajectory.b(0.5 * (ctx.z_lo + ctx.z_hi));
    curve.L = ctx.L;
    curve.beta = beta;
    curve.chi = ctx.kin.chi;
    curve.ell_i = ctx.initial.ell();
    curve.profile_kind = ctx.trajectory.profile().kind_name();
    curve.omega_model = ctx.bracket_varies
                            ? "quasi-monochromatic (window-averaged bracket)"
                            : "constant-bracket (exact)";
    return curve;
}

TotalRate total_rate(const RateCurve& curve) {
    TotalRate out;
    const std::size_t n = curve.theta.size();
    if (n < 2) return out;
    const double h = (curve.theta.back() - curve.theta.front()) / (n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::fabs(curve.theta[i + 1] - curve.theta[i] - h) > 1e-9 * std::fabs(h))
            throw ConfigError("total_rate requires a uniform theta grid");
    }
    const double fine = simpson_uniform(curve.rate_norm, h);

    // Every-other-point estimate for the refinement check.
    std::vector<double> coarse_vals;
    for (std::size_t i = 0; i < n; i += 2) coarse_vals.push_back(curve.rate_norm[i]);
    const double coarse = simpson_uniform(coarse_vals, 2.0 * h);
    const double scale = std::max(std::fabs(fine), 1e-300);
    out.refine_rel_change = std::fabs(fine - coarse) / scale;
    out.converged = out.refine_rel_change < 1e-3;
    out.norm = fine;
    out.per_s = fine * constants::rate_unit_per_s;
    return out;
}

void write_rate_csv(const RateCurve& curve, std::ostream& os) {
    os << "# b0 = " << detail::g17(curve.b0) << '\n';
    os << "# L = " << detail::g17(curve.L) << '\n';
    os << "# beta = " << detail::g17(curve.beta) << '\n';
    os << "# chi = " << detail::g17(curve.chi) << '\n';
    os << "# ell_i = " << curve.ell_i << '\n';
    os << "# B_max_T = " << detail::g17(curve.B_max_T) << '\n';
    os << "# profile_kind = " << curve.profile_kind << '\n';
    os << "# omega_model = " << curve.omega_model << '\n';
    os << "theta_rad,rate_per_theta_norm,rate_per_theta_si\n";
    for (std::size_t i = 0; i < curve.theta.size(); ++i) {
        os << detail::g17(curve.theta[i]) << ',' << detail::g17(curve.rate_norm[i]) << ','
           << detail::g17(curve.rate_norm[i] * constants::rate_unit_per_s) << '\n';
    }
}

} // namespace twistrad
