#pragma once
// Adaptive Gauss-Kronrod 15(7) quadrature over a single interval, templated
// on the integrand's value type (double or std::complex<double>).  Error is
// estimated from the difference between the 15-point Kronrod rule and its
// embedded 7-point Gauss rule; intervals are bisected recursively until the
// local error budget is met or the depth limit is reached.

#include <cmath>
#include <complex>
#include <cstddef>

namespace twistrad::detail {

// Kronrod abscissae on [-1, 1] (symmetric; the odd-indexed entries plus the
// origin form the embedded 7-point Gauss rule).
inline constexpr double gk15_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double gk15_wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double gk15_wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

inline double quad_norm(double v) { return std::fabs(v); }
inline double quad_norm(const std::complex<double>& v) { return std::abs(v); }

template <typename Value>
struct QuadResult {
    Value value{};
    double abs_error = 0.0;
    bool converged = true;
    std::size_t evaluations = 0;
};

// One Kronrod 15 / Gauss 7 evaluation on [a, b].
template <typename F, typename Value = decltype(std::declval<F&>()(0.0))>
QuadResult<Value> gk15_once(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    Value k15 = gk15_wk[7] * f(c);
    Value g7 = gk15_wg[3] * f(c);
    for (int j = 0; j < 7; ++j) {
        const double dx = h * gk15_x[j];
        const Value pair = f(c - dx) + f(c + dx);
        k15 += gk15_wk[j] * pair;
        if (j % 2 == 1) g7 += gk15_wg[j / 2] * pair;
    }
    QuadResult<Value> r;
    r.value = k15 * h;
    r.abs_error = quad_norm((k15 - g7) * h);
    r.evaluations = 15;
    return r;
}

// Adaptive bisection to absolute tolerance abs_tol.
template <typename F, typename Value = decltype(std::declval<F&>()(0.0))>
QuadResult<Value> integrate_adaptive(F&& f, double a, double b, double abs_tol,
                                     int max_depth = 30) {
    QuadResult<Value> whole = gk15_once(f, a, b);
    if (whole.abs_error <= abs_tol || max_depth <= 0) {
        whole.converged = whole.abs_error <= abs_tol;
        return whole;
    }
    const double mid = 0.5 * (a + b);
    QuadResult<Value> left = integrate_adaptive(f, a, mid, 0.5 * abs_tol, max_depth - 1);
    QuadResult<Value> right = integrate_adaptive(f, mid, b, 0.5 * abs_tol, max_depth - 1);
    QuadResult<Value> r;
    r.value = left.value + right.value;
    r.abs_error = left.abs_error + right.abs_error;
    r.converged = left.converged && right.converged;
    r.evaluations = whole.evaluations + left.evaluations + right.evaluations;
    return r;
}

} // namespace twistrad::detail
