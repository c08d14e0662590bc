#pragma once
// Fock-space machinery for the circular transverse modes: generalized
// Laguerre polynomials, displacement-operator matrix elements (form
// factors), the envelope ladder coefficients C_a / C_adag, the combined
// weighting element P, the transverse Laguerre-Gaussian spatial mode, and a
// brute-force truncated-matrix oracle used for cross-validation.

#include <complex>
#include <vector>

namespace twistrad {

// Occupation of the two circular quanta. n_r = min(n+, n-) is the radial
// index and ell = n+ - n- the orbital angular momentum projection.
struct ModeLabel {
    int n_plus = 0;
    int n_minus = 0;

    int n_r() const { return n_plus < n_minus ? n_plus : n_minus; }
    int ell() const { return n_plus - n_minus; }
    bool operator==(const ModeLabel&) const = default;
};

// Envelope ladder coefficients for one circular sector sigma = +/-1:
//   C_a    = b' - i sigma b Omega - i/b,
//   C_adag = b' - i sigma b Omega + i/b.
struct CircCoeffs {
    std::complex<double> c_a;
    std::complex<double> c_adag;
    int sigma = 1;
};

// Displacement parameters for both sectors: kappa_sigma =
// (b k_perp_scaled / 2) e^{i sigma phi}, with k_perp_scaled the photon's
// transverse wavenumber in magnetic-length units.
struct DisplacementParam {
    std::complex<double> kappa_plus;
    std::complex<double> kappa_minus;
};
DisplacementParam displacement_param(double b, double k_perp_scaled, double phi);

// Generalized Laguerre polynomial L_n^alpha(x) by the three-term recurrence
// in n (stable well past n = 1e4; the defining alternating sum is not).
double laguerre(int n, int alpha, double x);

// Displacement form factor <n_f| D |n_i> for the displacement generated by
// -i(kappa a + kappa* adag):
//   n_f >= n_i: (-i kappa*)^(n_f-n_i) sqrt(n_i!/n_f!) e^{-|kappa|^2/2}
//               L_{n_i}^{n_f-n_i}(|kappa|^2)
//   n_f <  n_i: (-i kappa )^(n_i-n_f) sqrt(n_f!/n_i!) e^{-|kappa|^2/2}
//               L_{n_f}^{n_i-n_f}(|kappa|^2)
// Factorial ratios go through lgamma, so quantum numbers up to ~1e4 are fine.
std::complex<double> form_factor(int n_f, int n_i, std::complex<double> kappa);

// Brute-force displacement matrix: exp(-i(kappa a + kappa* adag)) built in a
// dim-dimensional truncated Fock basis by scaling-and-squaring.  Row index is
// the final state.  Requires dim >= n_f + n_i + 8*ceil(|kappa|^2) + 16 for
// the element (n_f, n_i) to be trustworthy.
std::vector<std::complex<double>> oracle_displacement_matrix(std::complex<double> kappa,
                                                             int dim);
std::complex<double> oracle_displacement(int n_f, int n_i, std::complex<double> kappa,
                                         int dim);

// Brute-force <n_f| D(kappa) (C_a a + C_adag adag) |n_i> in the same
// truncated basis; cross-validates p_weight.
std::complex<double> oracle_p_weight(int n_f, int n_i, std::complex<double> kappa,
                                     const CircCoeffs& coeffs, int dim);

// Ladder coefficients at an envelope point (b, b', Omega) for sector sigma.
CircCoeffs c_coeffs(double b, double b_prime, double omega, int sigma);

// Weighting element
//   P = C_a sqrt(n_i) F(n_f, n_i-1) + C_adag sqrt(n_i+1) F(n_f, n_i+1)
// (the lowering term is dropped at n_i = 0).
std::complex<double> p_weight(int n_f, int n_i, std::complex<double> kappa,
                              const CircCoeffs& coeffs);

// Normalized transverse Laguerre-Gaussian mode
//   sqrt(n_r!/(pi (n_r+|ell|)!)) rho^|ell| e^{-rho^2/2} L_{n_r}^{|ell|}(rho^2)
//   e^{i ell phi}.
std::complex<double> spatial_mode(double rho, double phi, const ModeLabel& mode);

} // namespace twistrad
