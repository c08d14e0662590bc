#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "config.hpp"
#include "twistrad/errors.hpp"

namespace fs = std::filesystem;
using namespace twistrad;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Scratch directory shared by all cases in this process.
const fs::path& scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("twistrad_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

RunResult run_cli(const std::string& args) {
    const fs::path out = scratch_dir() / "stdout.txt";
    const fs::path err = scratch_dir() / "stderr.txt";
    const std::string cmd = std::string(TWISTRAD_CLI) + " " + args + " > " +
                            out.string() + " 2> " + err.string();
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path write_file(const std::string& name, const std::string& text) {
    const fs::path p = scratch_dir() / name;
    std::ofstream out(p, std::ios::binary);
    out << text;
    return p;
}

int count_data_rows(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    int rows = 0;
    bool past_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') continue;
        if (!past_header) {
            past_header = true; // column header
            continue;
        }
        ++rows;
    }
    return rows;
}

// Columns of the sweep CSV: value,total_rate_per_s,total_rate_norm,status.
struct SweepRow {
    double value = 0.0;
    double per_s = 0.0;
    double norm = 0.0;
    std::string status;
};

std::vector<SweepRow> parse_sweep_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("value,", 0) == 0) continue;
        SweepRow row;
        std::istringstream ls(line);
        std::string field;
        std::getline(ls, field, ',');
        row.value = std::stod(field);
        std::getline(ls, field, ',');
        row.per_s = std::stod(field);
        std::getline(ls, field, ',');
        row.norm = std::stod(field);
        std::getline(ls, row.status);
        rows.push_back(row);
    }
    return rows;
}

} // namespace

TEST_CASE("running without a subcommand fails") {
    CHECK(run_cli("").exit_code != 0);
}

TEST_CASE("--help exits cleanly") {
    const auto r = run_cli("--help");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("ermakov") != std::string::npos);
    CHECK(r.out.find("rate") != std::string::npos);
}

TEST_CASE("ermakov reproduces the free-envelope checkpoint b(10) = sqrt(101)") {
    const auto cfg = write_file("free_env.cfg",
                                "[setup]\n"
                                "field_tesla = 1\n"
                                "length = 20\n"
                                "[beam]\n"
                                "b0 = 1\n"
                                "[run]\n"
                                "z_start = 0\n"
                                "z_end = 10\n"
                                "samples = 11\n");
    const fs::path out = scratch_dir() / "free_env.csv";
    const auto r = run_cli("ermakov --config " + cfg.string() + " --out " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("profile zero") != std::string::npos);
    const std::string csv = slurp(out);
    CHECK(csv.rfind("z,b,b_prime,lewis_phase,larmor_phase", 0) == 0);
    // last row carries z = 10
    std::istringstream in(csv);
    std::string line, last;
    while (std::getline(in, line))
        if (!line.empty()) last = line;
    std::istringstream ls(last);
    std::string field;
    std::getline(ls, field, ',');
    CHECK(std::stod(field) == doctest::Approx(10.0).epsilon(1e-12));
    std::getline(ls, field, ',');
    CHECK(std::stod(field) == doctest::Approx(std::sqrt(101.0)).epsilon(1e-9));
}

namespace {

std::string fieldfree_cfg_text(int theta_points) {
    std::ostringstream ss;
    ss << "[setup]\nfield_tesla = 1\nlength = 30\n"
       << "[beam]\nb0 = 1.14\nell_i = 1\n"
       << "[photon]\ntheta_points = " << theta_points << "\n";
    return ss.str();
}

} // namespace

TEST_CASE("rate --fieldfree writes the documented CSV and prints totals") {
    const auto cfg = write_file("ff.cfg", fieldfree_cfg_text(101));
    const fs::path out = scratch_dir() / "ff.csv";
    const auto r =
        run_cli("rate --fieldfree --config " + cfg.string() + " --out " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("total rate:") != std::string::npos);
    const std::string csv = slurp(out);
    CHECK(count_data_rows(csv) == 101);
    CHECK(csv.find("theta_rad,rate_per_theta_norm,rate_per_theta_si") != std::string::npos);
    CHECK(csv.find("# profile_kind = zero") != std::string::npos);
}

TEST_CASE("rate CSV output is byte-identical across runs") {
    const auto cfg = write_file("det.cfg", fieldfree_cfg_text(64));
    const fs::path out1 = scratch_dir() / "det1.csv";
    const fs::path out2 = scratch_dir() / "det2.csv";
    CHECK(run_cli("rate --fieldfree --config " + cfg.string() + " --out " + out1.string())
              .exit_code == 0);
    CHECK(run_cli("rate --fieldfree --config " + cfg.string() + " --out " + out2.string())
              .exit_code == 0);
    CHECK(slurp(out1) == slurp(out2));
}

TEST_CASE("--fieldfree refuses a non-zero field profile") {
    const auto cfg = write_file("ff_bad.cfg",
                                "[setup]\nfield_tesla = 1\nlength = 30\n"
                                "[profile]\nkind = constant\n"
                                "[beam]\nb0 = 1.14\nell_i = 1\n");
    const fs::path out = scratch_dir() / "ff_bad.csv";
    const auto r =
        run_cli("rate --fieldfree --config " + cfg.string() + " --out " + out.string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("zero") != std::string::npos);
}

TEST_CASE("general-path rate agrees with the closed form on a free window") {
    const auto cfg = write_file("gen.cfg",
                                "[setup]\nfield_tesla = 1\nlength = 30\n"
                                "[beam]\nb0 = 1.14\nell_i = 1\n"
                                "[photon]\ntheta_points = 5\ntheta_min = 0.4\n"
                                "theta_max = 1.2\ndipole = true\n"
                                "[run]\nrel_tol = 1e-12\n");
    const fs::path gen = scratch_dir() / "gen.csv";
    const fs::path ff = scratch_dir() / "gen_ff.csv";
    CHECK(run_cli("rate --config " + cfg.string() + " --out " + gen.string()).exit_code ==
          0);
    CHECK(run_cli("rate --fieldfree --config " + cfg.string() + " --out " + ff.string())
              .exit_code == 0);

    std::istringstream gin(slurp(gen)), fin(slurp(ff));
    std::string gline, fline;
    int compared = 0;
    while (std::getline(gin, gline) && std::getline(fin, fline)) {
        if (gline.empty() || gline[0] == '#' || gline.rfind("theta", 0) == 0) continue;
        std::istringstream gs(gline), fs_(fline);
        std::string gv, fv;
        std::getline(gs, gv, ',');
        std::getline(fs_, fv, ',');
        CHECK(std::stod(gv) == doctest::Approx(std::stod(fv)).epsilon(1e-12));
        std::getline(gs, gv, ',');
        std::getline(fs_, fv, ',');
        // scale(0): a pure relative comparison (the normalized rates are
        // ~1e-24, far below Approx's default absolute allowance)
        CHECK(std::stod(gv) ==
              doctest::Approx(std::stod(fv)).epsilon(1e-6).scale(0.0));
        ++compared;
    }
    CHECK(compared == 5);
}

TEST_CASE("a dark channel exits with the numerical-failure code and writes nothing") {
    const auto cfg = write_file("dark.cfg",
                                "[setup]\nfield_tesla = 1\nlength = 20\n"
                                "[beam]\nb0 = 1.14\ninitial = 0,0\nfinal = 1,0\n"
                                "[photon]\ntheta_points = 3\n");
    const fs::path out = scratch_dir() / "dark.csv";
    const auto r = run_cli("rate --config " + cfg.string() + " --out " + out.string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("dark channel") != std::string::npos);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("sweep over ell_i scales totals linearly") {
    const auto cfg = write_file("sweep_ell.cfg",
                                fieldfree_cfg_text(201) +
                                    "[sweep]\nvariable = ell_i\nvalues = 1, 2, 3\n");
    const fs::path out = scratch_dir() / "sweep_ell.csv";
    const auto r =
        run_cli("sweep --fieldfree --config " + cfg.string() + " --out " + out.string());
    CHECK(r.exit_code == 0);
    const auto rows = parse_sweep_csv(slurp(out));
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) CHECK(row.status == "ok");
    CHECK(rows[1].norm ==
          doctest::Approx(2.0 * rows[0].norm).epsilon(1e-12).scale(0.0));
    CHECK(rows[2].norm ==
          doctest::Approx(3.0 * rows[0].norm).epsilon(1e-12).scale(0.0));
    CHECK(rows[0].per_s == doctest::Approx(rows[0].norm * constants::rate_unit_per_s)
                               .epsilon(1e-12)
                               .scale(0.0));
}

TEST_CASE("sweep over b0 shows the short-window inverse-eighth-power law") {
    // For L small the node factor is in its quadratic regime, so the total
    // rate scales as b0^-8; successive decades give 1e8 ratios.
    const auto cfg = write_file("sweep_b0.cfg",
                                "[setup]\nfield_tesla = 1\nlength = 0.6\n"
                                "[beam]\nb0 = 1\nell_i = 1\n"
                                "[photon]\ntheta_points = 201\n"
                                "[sweep]\nvariable = b0\nvalues = 1, 10, 100\n");
    const fs::path out = scratch_dir() / "sweep_b0.csv";
    const auto r =
        run_cli("sweep --fieldfree --config " + cfg.string() + " --out " + out.string());
    CHECK(r.exit_code == 0);
    const auto rows = parse_sweep_csv(slurp(out));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].norm / rows[1].norm == doctest::Approx(1e8).epsilon(0.05));
    CHECK(rows[1].norm / rows[2].norm == doctest::Approx(1e8).epsilon(1e-3));
}

TEST_CASE("sweep records a failing point and carries on") {
    const auto cfg = write_file("sweep_fail.cfg",
                                fieldfree_cfg_text(201) +
                                    "[sweep]\nvariable = b0\nvalues = 1, -1, 2\n");
    const fs::path out = scratch_dir() / "sweep_fail.csv";
    const auto r =
        run_cli("sweep --fieldfree --config " + cfg.string() + " --out " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("1 failed") != std::string::npos);
    const auto rows = parse_sweep_csv(slurp(out));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].status == "ok");
    CHECK(rows[1].status.rfind("error:", 0) == 0);
    CHECK(rows[2].status.rfind("ok", 0) == 0);
    CHECK(rows[2].norm > 0.0);
}

TEST_CASE("sweep with no values is rejected before any output is written") {
    const auto cfg = write_file("sweep_empty.cfg",
                                fieldfree_cfg_text(64) + "[sweep]\nvariable = b0\n");
    const fs::path out = scratch_dir() / "sweep_empty.csv";
    const auto r =
        run_cli("sweep --fieldfree --config " + cfg.string() + " --out " + out.string());
    CHECK(r.exit_code == 1);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("verify --quick passes") {
    const auto r = run_cli("verify --quick");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("verification passed") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("unknown config keys are named in the error") {
    const auto cfg = write_file("typo.cfg", "[run]\nrelative_tolerance = 1e-8\n");
    const fs::path out = scratch_dir() / "typo.csv";
    const auto r =
        run_cli("rate --fieldfree --config " + cfg.string() + " --out " + out.string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("run.relative_tolerance") != std::string::npos);
}

TEST_CASE("config round-trips through its canonical serialization") {
    const std::string text = "[setup]\n"
                             "energy_kev = 250\n"
                             "field_tesla = 2.5\n"
                             "length = 17\n"
                             "[profile]\n"
                             "kind = flat_top\n"
                             "ramp = 2\n"
                             "plateau = 9\n"
                             "[beam]\n"
                             "b0 = 1.3   # waist parameter\n"
                             "b0_prime = -0.25\n"
                             "initial = 2,1\n"
                             "final = 1,1\n"
                             "[photon]\n"
                             "theta_points = 33\n"
                             "theta_max = 2.0\n"
                             "phi_samples = 8\n"
                             "dipole = true\n"
                             "[run]\n"
                             "rel_tol = 1e-9\n"
                             "samples = 50\n"
                             "[output]\n"
                             "path = out.csv\n";
    const cli::RunConfig a = cli::parse_config(text);
    CHECK(a.profile.kind == "flat_top");
    CHECK(a.b0 == 1.3); // inline comment stripped
    REQUIRE(a.initial.has_value());
    CHECK(a.initial->n_plus == 2);
    CHECK(a.initial->n_minus == 1);
    const std::string canon = cli::serialize_config(a);
    const cli::RunConfig b = cli::parse_config(canon);
    CHECK(a == b);
    CHECK(cli::serialize_config(b) == canon);
}

TEST_CASE("validation rejects contradictory or unusable settings") {
    cli::RunConfig cfg;
    cfg.field_tesla = 1.0;
    cfg.ell_i = 1;
    cli::validate(cfg); // baseline is fine

    cli::RunConfig both = cfg;
    both.initial = ModeLabel{1, 0};
    both.final = ModeLabel{0, 0};
    CHECK_THROWS_AS(cli::validate(both), ConfigError);

    cli::RunConfig no_field = cfg;
    no_field.field_tesla = 0.0;
    CHECK_THROWS_AS(cli::validate(no_field), ConfigError);

    cli::RunConfig bad_theta = cfg;
    bad_theta.theta_max = 4.0;
    CHECK_THROWS_AS(cli::validate(bad_theta), ConfigError);

    cli::RunConfig lonely_final = cfg;
    lonely_final.ell_i.reset();
    lonely_final.final = ModeLabel{0, 0};
    CHECK_THROWS_AS(cli::validate(lonely_final), ConfigError);
}

TEST_CASE("the mode shorthand expands to the dipole channel") {
    cli::RunConfig cfg;
    cfg.ell_i = 3;
    const auto [initial, final_] = cli::mode_labels(cfg);
    CHECK(initial.n_plus == 3);
    CHECK(initial.n_minus == 0);
    CHECK(final_.n_plus == 2);
    CHECK(final_.n_minus == 0);
    cfg.ell_i = 0;
    CHECK_THROWS_AS(cli::mode_labels(cfg), ConfigError);
}
