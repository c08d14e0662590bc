#pragma once
// Transition amplitudes and emission rates.
//
// The amplitude integrand s_perp(z) is assembled from the quantum-module
// pieces on top of an envelope trajectory; the z-quadrature uses phase-aware
// panels; rates come either from the closed-form field-free channel or from
// the general quadrature path.  Rates are expressed in electron-mass units
// (multiply by m_e c^2 / hbar for 1/s).

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "twistrad/ermakov.hpp"
#include "twistrad/quantum.hpp"
#include "twistrad/units.hpp"

namespace twistrad {

// One radiative transition between two transverse modes inside a window
// [-L/2, L/2] covered by the envelope trajectory.
struct TransitionContext {
    ModeLabel initial;
    ModeLabel final;
    BeamKinematics kin;
    double L = 0.0;
    ErmakovTrajectory trajectory;

    // Derived: delta quantities use the initial-minus-final convention.
    int delta_N = 0; // (n+ + n-)_i - (n+ + n-)_f
    int delta_l = 0; // ell_i - ell_f
    double z_lo = 0.0;
    double z_hi = 0.0;
    // Window average of the energy bracket
    //   (b'^2 + 1/b^2 + Omega^2 b^2) delta_N + 2 Omega delta_l,
    // which fixes the (quasi-monochromatic) photon energy.
    double bracket_avg = 0.0;
    // True when the bracket actually varies over the window, i.e. the single
    // photon energy is an averaging approximation.
    bool bracket_varies = false;
};

TransitionContext make_context(const ModeLabel& initial, const ModeLabel& final,
                               const BeamKinematics& kin, double L,
                               ErmakovTrajectory trajectory);

// Local value of the energy bracket at z.
double bracket_at(const TransitionContext& ctx, double z);

struct PhotonKinematics {
    double theta = 0.0;
    double phi = 0.0;
    int lambda = 1;
    double omega_norm = 0.0;     // photon energy in units 1/(k rho_H^2)
    double k_perp_scaled = 0.0;  // rho_H k_perp
    double k_z_term = 0.0;       // (k_z/k) chi^2
};

// Photon kinematics from the local bracket at z (omega_norm = (beta/2)
// bracket and its projections).  A negative bracket signals a non-emitting
// channel; the caller checks omega_norm > 0.
PhotonKinematics photon_kinematics(double z, const TransitionContext& ctx, double theta,
                                   double phi, int lambda);
// Same with the window-averaged bracket: the single photon energy used by
// amplitudes and rates.
PhotonKinematics photon_kinematics_avg(const TransitionContext& ctx, double theta,
                                       double phi, int lambda);

// Accumulated phase: linear (recoil-free) term plus the Lewis and rotation
// phase integrals taken from the trajectory, zeroed at z_lo.
double delta_phi(double z, const TransitionContext& ctx, const PhotonKinematics& kin);

// Amplitude integrand (transverse polarization content only; the
// longitudinal piece is suppressed at large chi and omitted).  The dipole
// flag forces both displacement parameters to zero.
std::complex<double> s_perp(double z, const TransitionContext& ctx, double theta,
                            double phi, int lambda, bool dipole);

struct AmplitudeResult {
    std::complex<double> value;
    double abs_error = 0.0;
    bool converged = true;
};

// Integral of s_perp over [-L/2, L/2] with panels bounded by the local phase
// advance, split additionally at field breakpoints and b' sign changes.
AmplitudeResult amplitude_integral(const TransitionContext& ctx, double theta, double phi,
                                   int lambda, bool dipole);

// Closed form for the field-free dipole channel:
//   |integral|^2 = (ell_i/b0^2) ((1 - lambda cos theta)^2 / 8) L^2 sin^4X/X^2,
//   X = (1 - beta cos theta) L / (8 b0^2).
double fieldfree_amplitude_sq(double theta, int lambda, double L, double b0, int ell_i,
                              double beta);

// Closed-form field-free differential rate (electron-mass units):
//   dw/dtheta = ell_i (alpha beta^4 gamma / chi^4) (sin^4X/X^2)
//               (1 + cos^2 theta) sin theta / (8 b0^4).
double fieldfree_rate(double theta, double L, double b0, int ell_i,
                      const BeamKinematics& kin);

struct RateCurve {
    std::vector<double> theta;
    std::vector<double> rate_norm; // dw/dtheta, electron-mass units
    // Metadata carried into CSV headers.
    double b0 = 0.0;
    double L = 0.0;
    double beta = 0.0;
    double chi = 0.0;
    int ell_i = 0;
    double B_max_T = 0.0;          // filled by the caller (lab setup)
    std::string profile_kind = "zero";
    std::string omega_model = "closed-form";
};

RateCurve fieldfree_rate_curve(const std::vector<double>& thetas, double L, double b0,
                               int ell_i, const BeamKinematics& kin);

// General path: quadrature amplitudes summed over both photon polarizations;
// the azimuthal mean uses a single evaluation in dipole mode (the modulus is
// phi-independent there) and phi_samples points otherwise.  Theta points are
// computed concurrently.  Throws NumericalError for a dark channel
// (non-positive photon energy).
RateCurve general_rate_curve(const TransitionContext& ctx,
                             const std::vector<double>& thetas, int phi_samples,
                             bool dipole);

struct TotalRate {
    double per_s = 0.0;          // integrated rate in 1/s
    double norm = 0.0;           // same in electron-mass units
    double refine_rel_change = 0.0;
    bool converged = true;       // Simpson refinement moved the result < 0.1%
};

// Simpson integration of a rate curve over theta plus SI conversion.
TotalRate total_rate(const RateCurve& curve);

// CSV with `#`-prefixed metadata header lines and columns
// theta_rad, rate_per_theta_norm, rate_per_theta_si.
void write_rate_csv(const RateCurve& curve, std::ostream& os);

} // namespace twistrad
