#pragma once
// Normalized axial magnetic-field profile Omega(z) = B_z(z)/max|B_z|.
//
// All built-in families are continuous and piecewise C^1, as required by the
// envelope ODE, and satisfy max|Omega| = 1 over their domain (the zero
// profile excepted).  Analytic profiles are defined for every z; tabulated
// profiles are restricted to their sample interval and use monotone cubic
// (Fritsch-Carlson) interpolation so the interpolant never overshoots the
// node values.

#include <string>
#include <utility>
#include <vector>

namespace twistrad {

class FieldProfile {
public:
    enum class Kind { zero, constant, flat_top, two_solenoid, gaussian, tabulated };

    // Identically zero field (free propagation).
    static FieldProfile zero();
    // Uniform field, Omega = 1 everywhere.
    static FieldProfile constant();
    // Plateau of length plateau_length centered at z = 0 with raised-cosine
    // ramps of length ramp_length on both sides; zero outside.
    static FieldProfile flat_top(double ramp_length, double plateau_length);
    // Two identical coils centered at coil_center_offset -/+ (gap + coil_width)/2,
    // each a flat-top lobe of plateau length coil_width whose raised-cosine
    // ramps span half the gap, so the field dips to zero midway between the
    // coils.  The lobes never overlap, hence the peak value is exactly 1.
    static FieldProfile two_solenoid(double coil_center_offset, double coil_width,
                                     double gap);
    // Gaussian bump exp(-(z-center)^2 / (2 width^2)).
    static FieldProfile gaussian(double center, double width);
    // Tabulated samples on a strictly increasing grid; values are rescaled by
    // max|value| so the invariant max|Omega| = 1 holds.
    static FieldProfile tabulated(std::vector<double> z, std::vector<double> values);

    Kind kind() const { return kind_; }
    // Short lowercase name, e.g. "flat_top", for file metadata.
    std::string kind_name() const;

    // Omega(z); throws ConfigError when z lies outside a tabulated domain.
    double omega(double z) const;
    // dOmega/dz (one-sided limits agree for all built-ins; at a tabulated
    // node the interpolant's derivative is returned).
    double omega_prime(double z) const;

    // Domain of definition: analytic profiles are unbounded, tabulated
    // profiles cover their sample interval.
    double z_min() const { return z_min_; }
    double z_max() const { return z_max_; }
    bool contains(double z0, double z1) const;

    // Interior points in (z_lo, z_hi) where Omega is not C^2 (plateau/ramp
    // junctions, tabulated nodes), sorted ascending.  Quadrature and phase
    // integrals split panels here.
    std::vector<double> breakpoints(double z_lo, double z_hi) const;

    // Signed integral of Omega from z0 to z1 (adaptive quadrature, absolute
    // tolerance 1e-10).
    double larmor_phase_increment(double z0, double z1) const;

private:
    FieldProfile() = default;

    double lobe(double distance_from_center) const;       // flat-top shape
    double lobe_prime(double distance_from_center) const; // its radial slope

    Kind kind_ = Kind::zero;
    double z_min_ = 0.0;
    double z_max_ = 0.0;

    // flat_top / two_solenoid geometry.
    double ramp_ = 0.0;
    double plateau_ = 0.0;
    double center_a_ = 0.0; // flat_top/gaussian center, or first coil center
    double center_b_ = 0.0; // second coil center
    // gaussian width.
    double width_ = 0.0;

    // tabulated data: nodes, normalized values, Hermite slopes.
    std::vector<double> tz_;
    std::vector<double> tv_;
    std::vector<double> tm_;
};

// Normalizes raw (z, B) samples by max|B| into a tabulated profile.
// Preconditions: at least two samples, strictly increasing z, max|B| > 0.
FieldProfile normalize(const std::vector<std::pair<double, double>>& raw_samples);

struct LoadedField {
    FieldProfile profile = FieldProfile::zero();
    double max_abs_tesla = 0.0; // peak |B_z| of the raw data, in tesla
};

// Reads a two-column CSV/whitespace table (z in normalized units, B_z in
// tesla); an optional non-numeric header line is skipped.  The result is
// normalized by max|B_z|.
LoadedField load_field_csv(const std::string& path);

} // namespace twistrad
