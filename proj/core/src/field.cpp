#include "twistrad/field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "twistrad/detail/quadrature.hpp"
#include "twistrad/errors.hpp"

namespace twistrad {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// Fritsch-Carlson slopes for a monotone cubic Hermite interpolant.  Interior
// slopes are the weighted harmonic mean of adjacent secants (zero across a
// local extremum); end slopes use the one-sided three-point estimate with the
// usual limiters.  This keeps the interpolant inside the node value range,
// so normalized data can never exceed 1 in magnitude between nodes.
std::vector<double> pchip_slopes(const std::vector<double>& z,
                                 const std::vector<double>& y) {
    const std::size_t n = z.size();
    std::vector<double> h(n - 1), delta(n - 1), m(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = z[i + 1] - z[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    if (n == 2) {
        m[0] = m[1] = delta[0];
        return m;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] == 0.0 || delta[i] == 0.0 ||
            sign_of(delta[i - 1]) != sign_of(delta[i])) {
            m[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    auto edge = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (sign_of(s) != sign_of(d0)) {
            s = 0.0;
        } else if (sign_of(d0) != sign_of(d1) && std::fabs(s) > 3.0 * std::fabs(d0)) {
            s = 3.0 * d0;
        }
        return s;
    };
    m[0] = edge(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = edge(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return m;
}

} // namespace

FieldProfile FieldProfile::zero() {
    FieldProfile p;
    p.kind_ = Kind::zero;
    p.z_min_ = -kInf;
    p.z_max_ = kInf;
    return p;
}

FieldProfile FieldProfile::constant() {
    FieldProfile p;
    p.kind_ = Kind::constant;
    p.z_min_ = -kInf;
    p.z_max_ = kInf;
    return p;
}

FieldProfile FieldProfile::flat_top(double ramp_length, double plateau_length) {
    if (!(ramp_length > 0.0))
        throw ConfigError("flat_top: ramp_length must be positive (a zero ramp "
                          "would make the profile discontinuous)");
    if (!(plateau_length >= 0.0))
        throw ConfigError("flat_top: plateau_length must be non-negative");
    FieldProfile p;
    p.kind_ = Kind::flat_top;
    p.ramp_ = ramp_length;
    p.plateau_ = plateau_length;
    p.center_a_ = 0.0;
    p.z_min_ = -kInf;
    p.z_max_ = kInf;
    return p;
}

FieldProfile FieldProfile::two_solenoid(double coil_center_offset, double coil_width,
                                        double gap) {
    if (!(coil_width > 0.0)) throw ConfigError("two_solenoid: coil_width must be positive");
    if (!(gap > 0.0)) throw ConfigError("two_solenoid: gap must be positive");
    FieldProfile p;
    p.kind_ = Kind::two_solenoid;
    p.ramp_ = 0.5 * gap;
    p.plateau_ = coil_width;
    const double half_span = 0.5 * (gap + coil_width);
    p.center_a_ = coil_center_offset - half_span;
    p.center_b_ = coil_center_offset + half_span;
    p.z_min_ = -kInf;
    p.z_max_ = kInf;
    return p;
}

FieldProfile FieldProfile::gaussian(double center, double width) {
    if (!(width > 0.0)) throw ConfigError("gaussian: width must be positive");
    FieldProfile p;
    p.kind_ = Kind::gaussian;
    p.center_a_ = center;
    p.width_ = width;
    p.z_min_ = -kInf;
    p.z_max_ = kInf;
    return p;
}

FieldProfile FieldProfile::tabulated(std::vector<double> z, std::vector<double> values) {
    if (z.size() != values.size())
        throw ConfigError("tabulated field: grid and value counts differ");
    if (z.size() < 2)
        throw ConfigError("tabulated field: need at least two samples");
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
        if (!(z[i] < z[i + 1]))
            throw ConfigError("tabulated field: grid must be strictly increasing");
    }
    double peak = 0.0;
    for (double v : values) peak = std::max(peak, std::fabs(v));
    if (!(peak > 0.0))
        throw ConfigError("tabulated field: all samples are zero; use the zero profile");
    for (double& v : values) v /= peak;

    FieldProfile p;
    p.kind_ = Kind::tabulated;
    p.z_min_ = z.front();
    p.z_max_ = z.back();
    p.tm_ = pchip_slopes(z, values);
    p.tz_ = std::move(z);
    p.tv_ = std::move(values);
    return p;
}

std::string FieldProfile::kind_name() const {
    switch (kind_) {
        case Kind::zero: return "zero";
        case Kind::constant: return "constant";
        case Kind::flat_top: return "flat_top";
        case Kind::two_solenoid: return "two_solenoid";
        case Kind::gaussian: return "gaussian";
        case Kind::tabulated: return "tabulated";
    }
    return "unknown";
}

double FieldProfile::lobe(double d) const {
    const double inner = 0.5 * plateau_;
    if (d <= inner) return 1.0;
    if (d >= inner + ramp_) return 0.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * (d - inner) / ramp_));
}

double FieldProfile::lobe_prime(double d) const {
    const double inner = 0.5 * plateau_;
    if (d <= inner || d >= inner + ramp_) return 0.0;
    return -0.5 * (std::numbers::pi / ramp_) *
           std::sin(std::numbers::pi * (d - inner) / ramp_);
}

double FieldProfile::omega(double z) const {
    switch (kind_) {
        case Kind::zero:
            return 0.0;
        case Kind::constant:
            return 1.0;
        case Kind::flat_top:
            return lobe(std::fabs(z - center_a_));
        case Kind::two_solenoid:
            return lobe(std::fabs(z - center_a_)) + lobe(std::fabs(z - center_b_));
        case Kind::gaussian: {
            const double u = (z - center_a_) / width_;
            return std::exp(-0.5 * u * u);
        }
        case Kind::tabulated: {
            const double slack = 1e-12 * (z_max_ - z_min_);
            if (z < z_min_ - slack || z > z_max_ + slack)
                throw ConfigError("tabulated field: z outside the sampled interval");
            const double zc = std::clamp(z, z_min_, z_max_);
            auto it = std::upper_bound(tz_.begin(), tz_.end(), zc);
            std::size_t i = (it == tz_.begin()) ? 0 : (it - tz_.begin() - 1);
            i = std::min(i, tz_.size() - 2);
            const double h = tz_[i + 1] - tz_[i];
            const double t = (zc - tz_[i]) / h;
            const double t2 = t * t, t3 = t2 * t;
            return (2.0 * t3 - 3.0 * t2 + 1.0) * tv_[i] + (t3 - 2.0 * t2 + t) * h * tm_[i] +
                   (-2.0 * t3 + 3.0 * t2) * tv_[i + 1] + (t3 - t2) * h * tm_[i + 1];
        }
    }
    return 0.0;
}

double FieldProfile::omega_prime(double z) const {
    switch (kind_) {
        case Kind::zero:
        case Kind::constant:
            return 0.0;
        case Kind::flat_top: {
            const double d = z - center_a_;
            return lobe_prime(std::fabs(d)) * sign_of(d);
        }
        case Kind::two_solenoid: {
            const double da = z - center_a_;
            const double db = z - center_b_;
            return lobe_prime(std::fabs(da)) * sign_of(da) +
                   lobe_prime(std::fabs(db)) * sign_of(db);
        }
        case Kind::gaussian: {
            const double u = (z - center_a_) / width_;
            return -u / width_ * std::exp(-0.5 * u * u);
        }
        case Kind::tabulated: {
            const double slack = 1e-12 * (z_max_ - z_min_);
            if (z < z_min_ - slack || z > z_max_ + slack)
                throw ConfigError("tabulated field: z outside the sampled interval");
            const double zc = std::clamp(z, z_min_, z_max_);
            auto it = std::upper_bound(tz_.begin(), tz_.end(), zc);
            std::size_t i = (it == tz_.begin()) ? 0 : (it - tz_.begin() - 1);
            i = std::min(i, tz_.size() - 2);
            const double h = tz_[i + 1] - tz_[i];
            const double t = (zc - tz_[i]) / h;
            const double t2 = t * t;
            return (6.0 * t2 - 6.0 * t) / h * tv_[i] + (3.0 * t2 - 4.0 * t + 1.0) * tm_[i] +
                   (-6.0 * t2 + 6.0 * t) / h * tv_[i + 1] + (3.0 * t2 - 2.0 * t) * tm_[i + 1];
        }
    }
    return 0.0;
}

bool FieldProfile::contains(double z0, double z1) const {
    const double lo = std::min(z0, z1);
    const double hi = std::max(z0, z1);
    if (kind_ != Kind::tabulated) return true;
    const double slack = 1e-12 * (z_max_ - z_min_);
    return lo >= z_min_ - slack && hi <= z_max_ + slack;
}

std::vector<double> FieldProfile::breakpoints(double z_lo, double z_hi) const {
    std::vector<double> pts;
    auto add_lobe = [&](double center) {
        const double inner = 0.5 * plateau_;
        for (double d : {-inner - ramp_, -inner, inner, inner + ramp_})
            pts.push_back(center + d);
    };
    switch (kind_) {
        case Kind::zero:
        case Kind::constant:
        case Kind::gaussian:
            break;
        case Kind::flat_top:
            add_lobe(center_a_);
            break;
        case Kind::two_solenoid:
            add_lobe(center_a_);
            add_lobe(center_b_);
            break;
        case Kind::tabulated:
            pts.assign(tz_.begin() + 1, tz_.end() - 1);
            break;
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::erase_if(pts, [&](double p) { return p <= z_lo || p >= z_hi; });
    return pts;
}

double FieldProfile::larmor_phase_increment(double z0, double z1) const {
    if (z0 == z1) return 0.0;
    const double lo = std::min(z0, z1);
    const double hi = std::max(z0, z1);
    if (!contains(lo, hi))
        throw ConfigError("larmor_phase_increment: interval outside field domain");

    std::vector<double> edges{lo};
    for (double p : breakpoints(lo, hi)) edges.push_back(p);
    edges.push_back(hi);

    const double seg_tol = 1e-10 / static_cast<double>(edges.size() - 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        auto r = detail::integrate_adaptive([this](double z) { return omega(z); },
                                            edges[i], edges[i + 1], seg_tol);
        total += r.value;
    }
    return (z1 >= z0) ? total : -total;
}

FieldProfile normalize(const std::vector<std::pair<double, double>>& raw_samples) {
    std::vector<double> z, v;
    z.reserve(raw_samples.size());
    v.reserve(raw_samples.size());
    for (const auto& [zi, bi] : raw_samples) {
        z.push_back(zi);
        v.push_back(bi);
    }
    return FieldProfile::tabulated(std::move(z), std::move(v));
}

LoadedField load_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open field table: " + path);

    std::vector<std::pair<double, double>> samples;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        for (char& c : line)
            if (c == ',' || c == ';' || c == '\t') c = ' ';
        std::istringstream ss(line);
        double z = 0.0, b = 0.0;
        if (!(ss >> z >> b)) {
            std::string probe;
            std::istringstream blank(line);
            if (!(blank >> probe)) continue; // empty line
            if (probe[0] == '#') continue;   // comment
            if (lineno == 1 && samples.empty()) continue; // header row
            throw ConfigError("field table " + path + ": cannot parse line " +
                              std::to_string(lineno));
        }
        samples.emplace_back(z, b);
    }
    if (samples.size() < 2)
        throw ConfigError("field table " + path + ": need at least two samples");

    LoadedField out;
    for (const auto& [z, b] : samples)
        out.max_abs_tesla = std::max(out.max_abs_tesla, std::fabs(b));
    out.profile = normalize(samples);
    return out;
}

} // namespace twistrad
