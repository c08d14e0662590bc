#include "twistrad/quantum.hpp"

#include <cmath>
#include <numbers>

#include "twistrad/errors.hpp"

namespace twistrad {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

// z^n for integer n >= 0 with exact results at z = 0 (0^0 = 1).
cplx ipow(cplx z, int n) {
    cplx r{1.0, 0.0};
    for (int k = 0; k < n; ++k) r *= z;
    return r;
}

double sqrt_factorial_ratio(int num, int den) {
    // sqrt(num!/den!) via lgamma, stable for large arguments.
    return std::exp(0.5 * (std::lgamma(num + 1.0) - std::lgamma(den + 1.0)));
}

void require_nonnegative(int n, const char* what) {
    if (n < 0) throw ConfigError(std::string(what) + " must be non-negative");
}

// dim x dim column-major-agnostic dense complex matrix helpers (row-major).
using Matrix = std::vector<cplx>;

Matrix matmul(const Matrix& a, const Matrix& b, int dim) {
    Matrix c(static_cast<std::size_t>(dim) * dim, cplx{0.0, 0.0});
    for (int i = 0; i < dim; ++i) {
        for (int k = 0; k < dim; ++k) {
            const cplx aik = a[i * dim + k];
            if (aik == cplx{0.0, 0.0}) continue;
            for (int j = 0; j < dim; ++j) c[i * dim + j] += aik * b[k * dim + j];
        }
    }
    return c;
}

double one_norm(const Matrix& m, int dim) {
    double best = 0.0;
    for (int j = 0; j < dim; ++j) {
        double col = 0.0;
        for (int i = 0; i < dim; ++i) col += std::abs(m[i * dim + j]);
        best = std::max(best, col);
    }
    return best;
}

// exp(M) by scaling-and-squaring with a Taylor kernel.
Matrix expm(Matrix m, int dim) {
    const double norm = one_norm(m, dim);
    int squarings = 0;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
        const double scale = std::ldexp(1.0, -squarings);
        for (cplx& v : m) v *= scale;
    }
    Matrix result(static_cast<std::size_t>(dim) * dim, cplx{0.0, 0.0});
    for (int i = 0; i < dim; ++i) result[i * dim + i] = 1.0;
    Matrix term = result;
    for (int k = 1; k <= 80; ++k) {
        term = matmul(term, m, dim);
        for (cplx& v : term) v /= static_cast<double>(k);
        for (std::size_t idx = 0; idx < term.size(); ++idx) result[idx] += term[idx];
        if (one_norm(term, dim) < 1e-20 * std::max(1.0, one_norm(result, dim))) break;
    }
    for (int s = 0; s < squarings; ++s) result = matmul(result, result, dim);
    return result;
}

Matrix annihilation(int dim) {
    Matrix a(static_cast<std::size_t>(dim) * dim, cplx{0.0, 0.0});
    for (int n = 1; n < dim; ++n) a[(n - 1) * dim + n] = std::sqrt(static_cast<double>(n));
    return a;
}

void check_oracle_dim(int n_f, int n_i, cplx kappa, int dim) {
    require_nonnegative(n_f, "n_f");
    require_nonnegative(n_i, "n_i");
    const int needed =
        n_f + n_i + 8 * static_cast<int>(std::ceil(std::norm(kappa))) + 16;
    if (dim < needed)
        throw ConfigError("oracle dimension too small for the requested element: "
                          "truncation risk (need >= " +
                          std::to_string(needed) + ")");
}

} // namespace

DisplacementParam displacement_param(double b, double k_perp_scaled, double phi) {
    const double mag = 0.5 * b * k_perp_scaled;
    DisplacementParam d;
    d.kappa_plus = std::polar(mag, phi);
    d.kappa_minus = std::polar(mag, -phi);
    return d;
}

double laguerre(int n, int alpha, double x) {
    require_nonnegative(n, "laguerre degree");
    require_nonnegative(alpha, "laguerre order");
    if (!(x >= 0.0)) throw ConfigError("laguerre argument must be >= 0");
    if (n == 0) return 1.0;
    double lm1 = 1.0;                  // L_0
    double l = 1.0 + alpha - x;        // L_1
    for (int k = 1; k < n; ++k) {
        const double lp1 =
            ((2.0 * k + 1.0 + alpha - x) * l - (k + alpha) * lm1) / (k + 1.0);
        lm1 = l;
        l = lp1;
    }
    return l;
}

std::complex<double> form_factor(int n_f, int n_i, std::complex<double> kappa) {
    require_nonnegative(n_f, "n_f");
    require_nonnegative(n_i, "n_i");
    const double x = std::norm(kappa); // |kappa|^2
    const double gauss = std::exp(-0.5 * x);
    if (n_f >= n_i) {
        const int d = n_f - n_i;
        return ipow(-kI * std::conj(kappa), d) * sqrt_factorial_ratio(n_i, n_f) * gauss *
               laguerre(n_i, d, x);
    }
    const int d = n_i - n_f;
    return ipow(-kI * kappa, d) * sqrt_factorial_ratio(n_f, n_i) * gauss *
           laguerre(n_f, d, x);
}

std::vector<std::complex<double>> oracle_displacement_matrix(std::complex<double> kappa,
                                                             int dim) {
    if (dim < 1) throw ConfigError("oracle dimension must be positive");
    Matrix m(static_cast<std::size_t>(dim) * dim, cplx{0.0, 0.0});
    // -i (kappa a + kappa* adag)
    for (int n = 1; n < dim; ++n) {
        const double root = std::sqrt(static_cast<double>(n));
        m[(n - 1) * dim + n] += -kI * kappa * root;            // a
        m[n * dim + (n - 1)] += -kI * std::conj(kappa) * root; // adag
    }
    return expm(std::move(m), dim);
}

std::complex<double> oracle_displacement(int n_f, int n_i, std::complex<double> kappa,
                                         int dim) {
    check_oracle_dim(n_f, n_i, kappa, dim);
    const Matrix d = oracle_displacement_matrix(kappa, dim);
    return d[static_cast<std::size_t>(n_f) * dim + n_i];
}

std::complex<double> oracle_p_weight(int n_f, int n_i, std::complex<double> kappa,
                                     const CircCoeffs& coeffs, int dim) {
    check_oracle_dim(n_f, n_i + 1, kappa, dim);
    const Matrix d = oracle_displacement_matrix(kappa, dim);
    const Matrix a = annihilation(dim);
    // pi-bar = C_a a + C_adag adag in the truncated basis.
    Matrix pibar(static_cast<std::size_t>(dim) * dim, cplx{0.0, 0.0});
    for (std::size_t idx = 0; idx < pibar.size(); ++idx) {
        pibar[idx] += coeffs.c_a * a[idx];
    }
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            pibar[i * dim + j] += coeffs.c_adag * std::conj(a[j * dim + i]);
        }
    }
    const Matrix prod = matmul(d, pibar, dim);
    return prod[static_cast<std::size_t>(n_f) * dim + n_i];
}

CircCoeffs c_coeffs(double b, double b_prime, double omega, int sigma) {
    if (!(b > 0.0)) throw ConfigError("c_coeffs requires b > 0");
    if (sigma != 1 && sigma != -1) throw ConfigError("sigma must be +1 or -1");
    CircCoeffs c;
    c.sigma = sigma;
    const double common = -sigma * b * omega;
    c.c_a = cplx{b_prime, common - 1.0 / b};
    c.c_adag = cplx{b_prime, common + 1.0 / b};
    return c;
}

std::complex<double> p_weight(int n_f, int n_i, std::complex<double> kappa,
                              const CircCoeffs& coeffs) {
    require_nonnegative(n_f, "n_f");
    require_nonnegative(n_i, "n_i");
    cplx value{0.0, 0.0};
    if (n_i > 0) {
        value += coeffs.c_a * std::sqrt(static_cast<double>(n_i)) *
                 form_factor(n_f, n_i - 1, kappa);
    }
    value += coeffs.c_adag * std::sqrt(static_cast<double>(n_i) + 1.0) *
             form_factor(n_f, n_i + 1, kappa);
    return value;
}

std::complex<double> spatial_mode(double rho, double phi, const ModeLabel& mode) {
    require_nonnegative(mode.n_plus, "n_plus");
    require_nonnegative(mode.n_minus, "n_minus");
    if (!(rho >= 0.0)) throw ConfigError("spatial_mode requires rho >= 0");
    const int nr = mode.n_r();
    const int al = std::abs(mode.ell());
    const double norm = std::exp(0.5 * (std::lgamma(nr + 1.0) - std::lgamma(nr + al + 1.0))) /
                        std::sqrt(std::numbers::pi);
    const double rho2 = rho * rho;
    const double radial =
        norm * std::pow(rho, al) * std::exp(-0.5 * rho2) * laguerre(nr, al, rho2);
    return radial * std::polar(1.0, mode.ell() * phi);
}

} // namespace twistrad
