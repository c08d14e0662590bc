#include "twistrad/units.hpp"

#include <cmath>
#include <numbers>

namespace twistrad {

BeamKinematics derive_kinematics(double kinetic_energy_keV, double B_max_T) {
    if (!(kinetic_energy_keV > 0.0))
        throw ConfigError("derive_kinematics: kinetic energy must be positive");
    if (!(B_max_T > 0.0))
        throw ConfigError("derive_kinematics: peak field must be positive");

    using namespace constants;
    BeamKinematics kin;
    kin.gamma = 1.0 + kinetic_energy_keV / electron_rest_energy_keV;
    kin.beta = std::sqrt(1.0 - 1.0 / (kin.gamma * kin.gamma));
    kin.k = kin.gamma * kin.beta * electron_mass_kg * c_m_per_s / hbar_J_s;
    kin.rho_H = std::sqrt(2.0 * hbar_J_s / (elementary_charge_C * B_max_T));
    kin.chi = kin.k * kin.rho_H;
    return kin;
}

double normalized_frequency_to_hz(double omega_norm, const BeamKinematics& kin) {
    // omega_norm carries units of 1/(k rho_H^2); the physical angular
    // frequency is omega_norm * c / (k rho_H^2), and nu = omega/2pi.
    return omega_norm * constants::c_m_per_s / kin.longitudinal_unit_m() /
           (2.0 * std::numbers::pi);
}

double normalized_length_to_meters(double length_norm, const BeamKinematics& kin) {
    return length_norm * kin.longitudinal_unit_m();
}

double meters_to_normalized_length(double length_m, const BeamKinematics& kin) {
    return length_m / kin.longitudinal_unit_m();
}

} // namespace twistrad
