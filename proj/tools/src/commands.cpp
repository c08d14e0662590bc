#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

#include "twistrad/detail/format.hpp"
#include "twistrad/emission.hpp"
#include "twistrad/ermakov.hpp"
#include "twistrad/errors.hpp"
#include "twistrad/verify.hpp"

namespace twistrad::cli {

namespace {

std::string output_path(const RunConfig& config, const CommandFlags& flags) {
    if (!flags.out_override.empty()) return flags.out_override;
    if (!config.output_path.empty()) return config.output_path;
    throw ConfigError("no output path: set [output] path in the config or pass --out");
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary); // binary: byte-stable across platforms
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    return out;
}

// The closed form covers the dipole channel (l,0) -> (l-1,0); reject anything
// else early with a clear message.
int fieldfree_ell(const RunConfig& config) {
    const auto [initial, final_] = mode_labels(config);
    if (initial.n_minus != 0 || final_.n_minus != 0 ||
        final_.n_plus != initial.n_plus - 1)
        throw ConfigError("--fieldfree covers only the dipole channel (l,0) -> "
                          "(l-1,0); use beam.ell_i or matching labels");
    return initial.n_plus;
}

RateCurve compute_curve(const RunConfig& config, const CommandFlags& flags,
                        double& peak_tesla_out) {
    const FieldProfile profile = build_profile(config, peak_tesla_out);
    const BeamKinematics kin = kinematics_for(config, peak_tesla_out);
    const std::vector<double> thetas = theta_grid(config);
    const double L = config.length;

    RateCurve curve;
    if (flags.fieldfree) {
        if (profile.kind() != FieldProfile::Kind::zero)
            throw ConfigError("--fieldfree requires profile.kind = zero");
        curve = fieldfree_rate_curve(thetas, L, config.b0, fieldfree_ell(config), kin);
    } else {
        const auto [initial, final_] = mode_labels(config);
        auto trajectory = integrate_centered(profile, config.b0, config.b0_prime,
                                             0.0, -0.5 * L, 0.5 * L, config.rel_tol);
        const auto ctx = make_context(initial, final_, kin, L, std::move(trajectory));
        curve = general_rate_curve(ctx, thetas, config.phi_samples,
                                   config.dipole);
    }
    curve.B_max_T = peak_tesla_out;
    return curve;
}

} // namespace

int cmd_ermakov(const RunConfig& config, const CommandFlags& flags) {
    validate(config);
    const std::string path = output_path(config, flags);

    double peak_tesla = 0.0;
    const FieldProfile profile = build_profile(config, peak_tesla);
    const double z0 = config.z_start.value_or(-0.5 * config.length);
    const double z1 = config.z_end.value_or(0.5 * config.length);
    const auto trajectory =
        integrate(profile, config.b0, config.b0_prime, z0, z1, config.rel_tol);

    double b_min = trajectory.b(z0), b_max = b_min;
    const int n = std::max(config.samples, 2);
    for (int i = 0; i <= 256; ++i) {
        const double b = trajectory.b(z0 + (z1 - z0) * i / 256.0);
        b_min = std::min(b_min, b);
        b_max = std::max(b_max, b);
    }

    auto out = open_output(path);
    write_trajectory_csv(trajectory, out, static_cast<std::size_t>(n));
    out.close();

    std::printf("profile %s over [%g, %g]\n", profile.kind_name().c_str(), z0, z1);
    std::printf("envelope b: min %.6g, max %.6g\n", b_min, b_max);
    std::printf("total phases: lewis %.6g, larmor %.6g\n",
                trajectory.lewis_phase(z1), trajectory.larmor_phase(z1));
    std::printf("wrote %d samples to %s\n", n, path.c_str());
    return 0;
}

int cmd_rate(const RunConfig& config, const CommandFlags& flags) {
    validate(config);
    const std::string path = output_path(config, flags);

    double peak_tesla = 0.0;
    const RateCurve curve = compute_curve(config, flags, peak_tesla);

    auto out = open_output(path);
    write_rate_csv(curve, out);
    out.close();

    const auto peak = std::max_element(curve.rate_norm.begin(), curve.rate_norm.end());
    const std::size_t at = static_cast<std::size_t>(peak - curve.rate_norm.begin());
    std::printf("rate curve: %zu angles, peak %.6g s^-1/rad at theta = %.6g\n",
                curve.theta.size(), *peak * constants::rate_unit_per_s, curve.theta[at]);
    const TotalRate total = total_rate(curve);
    std::printf("total rate: %.6g s^-1 (normalized %.6g)%s\n", total.per_s, total.norm,
                total.converged ? "" : "  [integration not converged]");
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

int cmd_sweep(const RunConfig& config, const CommandFlags& flags) {
    validate(config);
    const std::string& variable = config.sweep_variable;
    if (variable != "b0" && variable != "L" && variable != "B_max" &&
        variable != "ell_i" && variable != "energy")
        throw ConfigError("sweep.variable must be one of b0, L, B_max, ell_i, energy");
    const std::vector<double>& values = config.sweep_values;
    if (values.empty()) throw ConfigError("sweep.values is empty: nothing to sweep");
    const std::string path = output_path(config, flags);

    struct Point {
        double total_per_s = std::nan("");
        double total_norm = std::nan("");
        std::string status = "ok";
    };
    std::vector<Point> points(values.size());

    auto run_point = [&](std::size_t i) {
        RunConfig local = config;
        const double v = values[i];
        if (variable == "b0") {
            local.b0 = v;
        } else if (variable == "L") {
            local.length = v;
        } else if (variable == "B_max") {
            local.field_tesla = v;
        } else if (variable == "energy") {
            local.energy_kev = v;
        } else { // ell_i
            const double r = std::round(v);
            if (std::fabs(v - r) > 1e-9)
                throw ConfigError("ell_i sweep values must be integers");
            local.initial.reset();
            local.final.reset();
            local.ell_i = static_cast<int>(r);
        }
        validate(local);
        double peak_tesla = 0.0;
        const RateCurve curve = compute_curve(local, flags, peak_tesla);
        const TotalRate total = total_rate(curve);
        points[i].total_per_s = total.per_s;
        points[i].total_norm = total.norm;
        if (!total.converged) points[i].status = "ok (integration not converged)";
    };

    std::atomic<std::size_t> cursor{0};
    const unsigned n_threads = std::max(
        1u, std::min(std::thread::hardware_concurrency(),
                     static_cast<unsigned>(values.size())));
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = cursor.fetch_add(1); i < values.size();
                 i = cursor.fetch_add(1)) {
                try {
                    run_point(i);
                } catch (const std::exception& e) {
                    std::string msg = e.what();
                    std::replace(msg.begin(), msg.end(), ',', ';');
                    std::replace(msg.begin(), msg.end(), '\n', ' ');
                    points[i].status = "error: " + msg;
                }
            }
        });
    }
    for (auto& th : pool) th.join();

    auto out = open_output(path);
    out << "# sweep variable: " << variable << "\n";
    out << "value,total_rate_per_s,total_rate_norm,status\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        out << detail::g17(values[i]) << "," << detail::g17(points[i].total_per_s)
            << "," << detail::g17(points[i].total_norm) << "," << points[i].status
            << "\n";
    }
    out.close();

    std::size_t failed = 0;
    for (const auto& p : points)
        if (p.status.rfind("error:", 0) == 0) ++failed;
    std::printf("sweep over %s: %zu points, %zu failed; wrote %s\n", variable.c_str(),
                values.size(), failed, path.c_str());
    return 0;
}

int cmd_verify(const CommandFlags& flags) {
    VerifyOptions options;
    options.quick = flags.quick;
    const VerifyReport report = run_verification(options);

    std::size_t failed = 0;
    for (const auto& check : report.checks) {
        std::printf("%-6s %-40s max error %.3e (tolerance %.3e)\n",
                    check.passed ? "ok" : "FAIL", check.name.c_str(), check.max_error,
                    check.tolerance);
        if (!check.passed) ++failed;
    }
    if (failed > 0) {
        std::printf("verification FAILED: %zu of %zu properties\n", failed,
                    report.checks.size());
        for (const auto& check : report.checks)
            if (!check.passed) std::printf("  failing property: %s\n", check.name.c_str());
        return 3;
    }
    std::printf("verification passed: %zu properties\n", report.checks.size());
    return 0;
}

} // namespace twistrad::cli
