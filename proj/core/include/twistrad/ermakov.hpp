#pragma once
// Envelope dynamics: integrates b'' + Omega^2(z) b = 1/b^3 together with the
// two phase quadratures
//
//   lewis_phase(z)  = integral of 1/b^2 from z_start,
//   larmor_phase(z) = integral of Omega from z_start,
//
// as one four-component ODE system, using an adaptive embedded Runge-Kutta
// 5(4) pair with fifth-order dense output.  Trajectories are immutable after
// construction and safe to evaluate concurrently.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "twistrad/field.hpp"

namespace twistrad {

struct ErmakovState {
    double b = 0.0;
    double b_prime = 0.0;
    double lewis_phase = 0.0;
    double larmor_phase = 0.0;
};

namespace detail {
// One accepted integrator step with fifth-order interpolation coefficients
// for the four state components.
struct DenseSegment4 {
    double z0 = 0.0;
    double h = 0.0;
    std::array<std::array<double, 4>, 5> rcont{};
};
} // namespace detail

class ErmakovTrajectory {
public:
    double z_start() const { return z_.front(); }
    double z_end() const { return z_.back(); }
    double b0() const { return b0_; }             // b at z_start
    double b0_prime() const { return b0_prime_; } // b' at z_start

    // Dense evaluation anywhere in [z_start, z_end].
    ErmakovState state(double z) const;
    double b(double z) const { return component(z, 0); }
    double b_prime(double z) const { return component(z, 1); }
    double lewis_phase(double z) const { return component(z, 2); }
    double larmor_phase(double z) const { return component(z, 3); }
    // b'' from the derivative of the dense b' polynomial.
    double b_second(double z) const;

    // Accepted step locations (ascending, includes both endpoints).
    const std::vector<double>& grid() const { return z_; }
    const FieldProfile& profile() const { return profile_; }

    // Zeros of b' in (z_lo, z_hi), ascending.  Downstream quadrature splits
    // integration panels here (the envelope phase convention changes branch
    // where b' changes sign).
    std::vector<double> b_prime_zeros(double z_lo, double z_hi) const;

private:
    friend ErmakovTrajectory integrate(const FieldProfile&, double, double, double,
                                       double, double);

    ErmakovTrajectory() = default;

    double component(double z, int c) const;
    double component_z_derivative(double z, int c) const;
    const detail::DenseSegment4& locate(double z) const;

    FieldProfile profile_ = FieldProfile::zero();
    double b0_ = 0.0;
    double b0_prime_ = 0.0;
    std::vector<double> z_;
    std::vector<detail::DenseSegment4> segments_;
};

// Integrates from (b0, b0_prime) at z_start to z_end.  rel_tol in
// [1e-14, 1e-4] controls the local error per step (default 1e-10: downstream
// oscillatory phase integrals need phase error << 1 over windows up to 1e3).
// Throws EnvelopeCollapseError if b falls below 1e-6, NumericalError on
// step-size underflow, ConfigError on bad arguments.
ErmakovTrajectory integrate(const FieldProfile& profile, double b0, double b0_prime,
                            double z_start, double z_end, double rel_tol = 1e-10);

// Same trajectory but with the initial conditions prescribed at z_center
// inside the window (typically the window midpoint, where a waist-centered
// beam has its focus).  The envelope is first carried backward from z_center
// to z_start, then integrated forward across the full window, so the returned
// phases are still zero at z_start.
ErmakovTrajectory integrate_centered(const FieldProfile& profile, double b_center,
                                     double b_prime_center, double z_center,
                                     double z_start, double z_end,
                                     double rel_tol = 1e-10);

// Field-free envelope with a waist b0 at z = 0:
//   b = b0 sqrt(1 + z^2/b0^4), b' = z / (b0^3 sqrt(1 + z^2/b0^4)),
//   lewis_phase = arctan(z/b0^2), larmor_phase = 0.
ErmakovState analytic_free(double b0, double z);

// Defect b'' + Omega^2 b - 1/b^3 of a trajectory at z (diagnostic).
double residual(const ErmakovTrajectory& trajectory, double z);

// b'^2 + 1/b^2: conserved wherever Omega = 0; equals 1/b0^2 for an entirely
// field-free history.
double freespace_invariant(double b, double b_prime);

// CSV export: header + n_samples uniformly spaced rows with columns
// z, b, b_prime, lewis_phase, larmor_phase.
void write_trajectory_csv(const ErmakovTrajectory& trajectory, std::ostream& os,
                          std::size_t n_samples);

} // namespace twistrad
