#pragma once
// Physical constants and conversions between lab-frame quantities and the
// normalized units used throughout the library.
//
// The transverse length scale is the magnetic length
//     rho_H = sqrt(2 hbar / (|e| B_max)),
// the longitudinal scale is k rho_H^2 (k = electron wavenumber), and
// chi = k rho_H is the large paraxial parameter separating the two.
// Transverse coordinates are measured in rho_H, longitudinal coordinates and
// the interaction length L in k rho_H^2, and photon frequencies in
// 1/(k rho_H^2) (natural units hbar = c = 1 internally; conversions below
// restore SI at the API edge).

#include "twistrad/errors.hpp"

namespace twistrad {

namespace constants {
// SI defining constants (exact) and CODATA 2018 measured values,
// >= 10 significant digits.
inline constexpr double c_m_per_s = 299792458.0;             // speed of light (exact)
inline constexpr double elementary_charge_C = 1.602176634e-19; // (exact)
inline constexpr double hbar_J_s = 1.054571817e-34;          // h/2pi (exact to listed digits)
inline constexpr double electron_mass_kg = 9.1093837015e-31;
inline constexpr double fine_structure = 7.2973525693e-3;
inline constexpr double electron_rest_energy_J = 8.1871057769e-14;   // m_e c^2
inline constexpr double electron_rest_energy_keV = 510.9989500;      // m_e c^2 in keV
// Rate unit: multiplying a rate expressed in units of m_e (natural units)
// by m_e c^2 / hbar yields s^-1.
inline constexpr double rate_unit_per_s = electron_rest_energy_J / hbar_J_s;
} // namespace constants

// Lab-frame description of a run: beam kinetic energy, peak field, and the
// interaction length expressed in normalized longitudinal units.
struct LabSetup {
    double kinetic_energy_keV = 0.0;
    double B_max_T = 0.0;
    double interaction_length_norm = 0.0; // L in units of k rho_H^2
};

// Derived beam/field scales.  All fields are SI except the dimensionless
// beta, gamma, chi.
struct BeamKinematics {
    double beta = 0.0;   // v/c
    double gamma = 1.0;  // Lorentz factor
    double k = 0.0;      // electron wavenumber gamma beta m_e c / hbar  [1/m]
    double rho_H = 0.0;  // magnetic length  [m]
    double chi = 0.0;    // k rho_H

    // Longitudinal unit k rho_H^2 in meters.
    double longitudinal_unit_m() const { return k * rho_H * rho_H; }
};

// Computes the derived scales from kinetic energy (keV) and peak field (T).
// Throws ConfigError for non-positive energy or field.
BeamKinematics derive_kinematics(double kinetic_energy_keV, double B_max_T);

inline BeamKinematics derive_kinematics(const LabSetup& setup) {
    return derive_kinematics(setup.kinetic_energy_keV, setup.B_max_T);
}

// Photon frequency conversion: omega_norm (units 1/(k rho_H^2)) -> Hz.
double normalized_frequency_to_hz(double omega_norm, const BeamKinematics& kin);

// Longitudinal length conversions: L_norm <-> meters.
double normalized_length_to_meters(double length_norm, const BeamKinematics& kin);
double meters_to_normalized_length(double length_m, const BeamKinematics& kin);

} // namespace twistrad
