#include "config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "twistrad/detail/format.hpp"
#include "twistrad/errors.hpp"

namespace twistrad::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse '" + v + "' as a number");
    }
}

int parse_int(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const int i = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse '" + v + "' as an integer");
    }
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key '" + key + "': cannot parse '" + v + "' as a boolean");
}

ModeLabel parse_mode(const std::string& v, const std::string& key) {
    const auto comma = v.find(',');
    if (comma == std::string::npos)
        throw ConfigError("config key '" + key + "': expected 'n_plus,n_minus'");
    ModeLabel m;
    m.n_plus = parse_int(trim(v.substr(0, comma)), key);
    m.n_minus = parse_int(trim(v.substr(comma + 1)), key);
    if (m.n_plus < 0 || m.n_minus < 0)
        throw ConfigError("config key '" + key + "': mode numbers must be non-negative");
    return m;
}

std::vector<double> parse_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::string item;
    std::stringstream ss(v);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(item, key));
    }
    return out;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "setup" && section != "profile" && section != "beam" &&
                section != "photon" && section != "run" && section != "output" &&
                section != "sweep")
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": unknown section [" + section + "]");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string qual = section.empty() ? key : section + "." + key;

        if (section == "setup") {
            if (key == "energy_kev") cfg.energy_kev = parse_double(value, qual);
            else if (key == "field_tesla") cfg.field_tesla = parse_double(value, qual);
            else if (key == "length") cfg.length = parse_double(value, qual);
            else throw ConfigError("unknown config key '" + qual + "'");
        } else if (section == "profile") {
            if (key == "kind") cfg.profile.kind = value;
            else if (key == "ramp") cfg.profile.ramp = parse_double(value, qual);
            else if (key == "plateau") cfg.profile.plateau = parse_double(value, qual);
            else if (key == "offset") cfg.profile.offset = parse_double(value, qual);
            else if (key == "coil_width") cfg.profile.coil_width = parse_double(value, qual);
            else if (key == "gap") cfg.profile.gap = parse_double(value, qual);
            else if (key == "center") cfg.profile.center = parse_double(value, qual);
            else if (key == "width") cfg.profile.width = parse_double(value, qual);
            else if (key == "file") cfg.profile.file = value;
            else throw ConfigError("unknown config key '" + qual + "'");
        } else if (section == "beam") {
            if (key == "b0") cfg.b0 = parse_double(value, qual);
            else if (key == "b0_prime") cfg.b0_prime = parse_double(value, qual);
            else if (key == "ell_i") cfg.ell_i = parse_int(value, qual);
            else if (key == "initial") cfg.initial = parse_mode(value, qual);
            else if (key == "final") cfg.final = parse_mode(value, qual);
            else throw ConfigError("unknown config key '" + qual + "'");
        } else if (section == "photon") {
            if (key == "theta_points") cfg.theta_points = parse_int(value, qual);
            else if (key == "theta_min") cfg.theta_min = parse_double(value, qual);
            else if (key == "theta_max") cfg.theta_max = parse_double(value, qual);
            else if (key == "phi_samples") cfg.phi_samples = parse_int(value, qual);
            else if (key == "dipole") cfg.dipole = parse_bool(value, qual);
            else throw ConfigError("unknown config key '" + qual + "'");
        } else if (section == "run") {
            if (key == "rel_tol") cfg.rel_tol = parse_double(value, qual);
            else if (key == "z_start") cfg.z_start = parse_double(value, qual);
            else if (key == "z_end") cfg.z_end = parse_double(value, qual);
            else if (key == "samples") cfg.samples = parse_int(value, qual);
            else throw ConfigError("unknown config key '" + qual + "'");
        } else if (section == "output") {
            if (key == "path") cfg.output_path = value;
            else throw ConfigError("unknown config key '" + qual + "'");
        } else if (section == "sweep") {
            if (key == "variable") cfg.sweep_variable = value;
            else if (key == "values") cfg.sweep_values = parse_list(value, qual);
            else throw ConfigError("unknown config key '" + qual + "'");
        } else {
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": key '" + key + "' appears before any [section]");
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& c) {
    using detail::g17;
    std::ostringstream out;
    out << "[setup]\n";
    out << "energy_kev = " << g17(c.energy_kev) << "\n";
    out << "field_tesla = " << g17(c.field_tesla) << "\n";
    out << "length = " << g17(c.length) << "\n";
    out << "\n[profile]\n";
    out << "kind = " << c.profile.kind << "\n";
    if (c.profile.kind == "flat_top") {
        out << "ramp = " << g17(c.profile.ramp) << "\n";
        out << "plateau = " << g17(c.profile.plateau) << "\n";
    } else if (c.profile.kind == "two_solenoid") {
        out << "offset = " << g17(c.profile.offset) << "\n";
        out << "coil_width = " << g17(c.profile.coil_width) << "\n";
        out << "gap = " << g17(c.profile.gap) << "\n";
    } else if (c.profile.kind == "gaussian") {
        out << "center = " << g17(c.profile.center) << "\n";
        out << "width = " << g17(c.profile.width) << "\n";
    } else if (c.profile.kind == "tabulated") {
        out << "file = " << c.profile.file << "\n";
    }
    out << "\n[beam]\n";
    out << "b0 = " << g17(c.b0) << "\n";
    out << "b0_prime = " << g17(c.b0_prime) << "\n";
    if (c.ell_i) out << "ell_i = " << *c.ell_i << "\n";
    if (c.initial)
        out << "initial = " << c.initial->n_plus << "," << c.initial->n_minus << "\n";
    if (c.final)
        out << "final = " << c.final->n_plus << "," << c.final->n_minus << "\n";
    out << "\n[photon]\n";
    out << "theta_points = " << c.theta_points << "\n";
    out << "theta_min = " << g17(c.theta_min) << "\n";
    out << "theta_max = " << g17(c.theta_max) << "\n";
    out << "phi_samples = " << c.phi_samples << "\n";
    out << "dipole = " << (c.dipole ? "true" : "false") << "\n";
    out << "\n[run]\n";
    out << "rel_tol = " << g17(c.rel_tol) << "\n";
    if (c.z_start) out << "z_start = " << g17(*c.z_start) << "\n";
    if (c.z_end) out << "z_end = " << g17(*c.z_end) << "\n";
    out << "samples = " << c.samples << "\n";
    out << "\n[output]\n";
    if (!c.output_path.empty()) out << "path = " << c.output_path << "\n";
    if (!c.sweep_variable.empty() || !c.sweep_values.empty()) {
        out << "\n[sweep]\n";
        if (!c.sweep_variable.empty()) out << "variable = " << c.sweep_variable << "\n";
        if (!c.sweep_values.empty()) {
            out << "values = ";
            for (std::size_t i = 0; i < c.sweep_values.size(); ++i) {
                if (i) out << ", ";
                out << g17(c.sweep_values[i]);
            }
            out << "\n";
        }
    }
    return out.str();
}

void validate(const RunConfig& c) {
    if (!(c.energy_kev > 0.0)) throw ConfigError("setup.energy_kev must be positive");
    if (c.field_tesla < 0.0) throw ConfigError("setup.field_tesla must be non-negative");
    if (c.field_tesla == 0.0 && c.profile.kind != "tabulated")
        throw ConfigError("setup.field_tesla is required (it sets the transverse "
                          "length unit); only tabulated profiles may omit it");
    if (!(c.length > 0.0)) throw ConfigError("setup.length must be positive");
    if (!(c.b0 > 0.0)) throw ConfigError("beam.b0 must be positive");
    if (c.ell_i && (c.initial || c.final))
        throw ConfigError("beam.ell_i and beam.initial/final are mutually exclusive");
    if (static_cast<bool>(c.initial) != static_cast<bool>(c.final))
        throw ConfigError("beam.initial and beam.final must be given together");
    if (c.theta_points < 2) throw ConfigError("photon.theta_points must be at least 2");
    if (c.theta_min < 0.0 || c.theta_min >= (c.theta_max > 0.0 ? c.theta_max : std::numbers::pi))
        throw ConfigError("photon.theta_min must lie in [0, theta_max)");
    if (c.theta_max > std::numbers::pi + 1e-12)
        throw ConfigError("photon.theta_max must not exceed pi");
    if (c.phi_samples < 1) throw ConfigError("photon.phi_samples must be at least 1");
    if (c.samples < 2) throw ConfigError("run.samples must be at least 2");
    if (c.z_start && c.z_end && !(*c.z_start < *c.z_end))
        throw ConfigError("run.z_start must be less than run.z_end");
    const std::string& kind = c.profile.kind;
    if (kind != "zero" && kind != "constant" && kind != "flat_top" &&
        kind != "two_solenoid" && kind != "gaussian" && kind != "tabulated")
        throw ConfigError("unknown profile.kind '" + kind + "'");
    if (kind == "tabulated" && c.profile.file.empty())
        throw ConfigError("profile.file is required for tabulated profiles");
}

std::vector<double> theta_grid(const RunConfig& c) {
    const double hi = c.theta_max > 0.0 ? c.theta_max : std::numbers::pi;
    std::vector<double> thetas(static_cast<std::size_t>(c.theta_points));
    for (int i = 0; i < c.theta_points; ++i)
        thetas[static_cast<std::size_t>(i)] =
            c.theta_min + (hi - c.theta_min) * i / (c.theta_points - 1);
    return thetas;
}

std::pair<ModeLabel, ModeLabel> mode_labels(const RunConfig& c) {
    if (c.initial && c.final) return {*c.initial, *c.final};
    const int l = c.ell_i.value_or(1);
    if (l < 1)
        throw ConfigError("beam.ell_i must be at least 1 to name the dipole "
                          "channel (l,0) -> (l-1,0); use explicit initial/final "
                          "labels otherwise");
    return {ModeLabel{l, 0}, ModeLabel{l - 1, 0}};
}

FieldProfile build_profile(const RunConfig& c, double& peak_tesla_out) {
    peak_tesla_out = c.field_tesla;
    const std::string& kind = c.profile.kind;
    if (kind == "zero") return FieldProfile::zero();
    if (kind == "constant") return FieldProfile::constant();
    if (kind == "flat_top") return FieldProfile::flat_top(c.profile.ramp, c.profile.plateau);
    if (kind == "two_solenoid")
        return FieldProfile::two_solenoid(c.profile.offset, c.profile.coil_width,
                                          c.profile.gap);
    if (kind == "gaussian") return FieldProfile::gaussian(c.profile.center, c.profile.width);
    if (kind == "tabulated") {
        LoadedField loaded = load_field_csv(c.profile.file);
        if (c.field_tesla == 0.0) {
            if (!(loaded.max_abs_tesla > 0.0))
                throw ConfigError("tabulated field '" + c.profile.file +
                                  "' is identically zero and setup.field_tesla is unset");
            peak_tesla_out = loaded.max_abs_tesla;
        }
        return loaded.profile;
    }
    throw ConfigError("unknown profile.kind '" + kind + "'");
}

BeamKinematics kinematics_for(const RunConfig& c, double peak_tesla) {
    return derive_kinematics(c.energy_kev, peak_tesla);
}

} // namespace twistrad::cli
