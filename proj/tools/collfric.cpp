// collfric: friction sweeps, trajectories, Zeno analysis and figure configs.
//
// Exit codes: 0 ok, 1 I/O failure, 2 bad config or arguments, 3 numerical
// invariant violated.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "collfric/cli.hpp"

#ifndef COLLFRIC_CONFIG_DIR
#define COLLFRIC_CONFIG_DIR "configs"
#endif

namespace {

namespace cli = collfric::cli;

constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Runs `emit` against --out, the config's output path, or stdout.
void with_output(const std::string& out, const std::optional<std::string>& fallback,
                 const std::function<void(std::ostream&)>& emit) {
    const std::string path = !out.empty() ? out : fallback.value_or("");
    if (path.empty() || path == "-") {
        emit(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write '" + path + "'");
    emit(f);
    f.close();
    if (!f) throw IoError("failed writing '" + path + "'");
}

bool dump(const cli::Config& c) {
    std::cout << cli::to_json(c).dump(2) << '\n';
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Friction of a quantum system dragged over a chain of ancillas"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    bool dump_config = false;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", config_path, "JSON config file");
        if (config_required) opt->required();
        sub->add_option("--out", out_path, "output file (default: stdout)");
        sub->add_flag("--dump-config", dump_config, "print the normalized config and exit");
    };

    CLI::App* sweep = app.add_subcommand("sweep", "friction decomposition over a velocity grid");
    add_common(sweep, true);

    CLI::App* trajectory = app.add_subcommand("trajectory", "per-interaction energies at one speed");
    add_common(trajectory, true);

    CLI::App* zeno = app.add_subcommand("zeno", "Zeno critical speed and high-speed limit");
    add_common(zeno, false);
    double zeno_radius_nm = 0.23;
    double zeno_energy = 1e-20;
    auto* radius_opt = zeno->add_option("--radius-nm", zeno_radius_nm, "interaction radius (nm)");
    auto* energy_opt = zeno->add_option("--energy-J", zeno_energy, "interaction energy (J)");

    CLI::App* kin = app.add_subcommand("kinematics", "deceleration under a constant friction force");
    double force = 0.1e-9;
    double mass_amu = 14.0;
    double v0 = 1e4;
    double radius_nm = 0.23;
    kin->add_option("--force-N", force, "friction force (N)")->capture_default_str();
    kin->add_option("--mass-amu", mass_amu, "mass (amu)")->capture_default_str();
    kin->add_option("--v0-m-per-s", v0, "initial speed (m/s)")->capture_default_str();
    kin->add_option("--radius-nm", radius_nm, "radius used to count crossings (nm)")
        ->capture_default_str();

    CLI::App* figure = app.add_subcommand("reproduce-figure", "sweep with a shipped figure config");
    int figure_number = 0;
    std::string config_dir = COLLFRIC_CONFIG_DIR;
    figure->add_option("figure", figure_number, "figure number")
        ->required()
        ->check(CLI::Range(3, 6));
    figure->add_option("--config-dir", config_dir, "directory holding fig3.json .. fig6.json")
        ->capture_default_str();
    figure->add_option("--out", out_path, "output file (default: stdout)");
    figure->add_flag("--dump-config", dump_config, "print the normalized config and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (sweep->parsed() || figure->parsed()) {
            const std::string path = sweep->parsed()
                                         ? config_path
                                         : config_dir + "/fig" + std::to_string(figure_number) + ".json";
            const cli::Config c = cli::load_config(path);
            if (dump_config && dump(c)) return 0;
            const cli::SweepResult r = cli::run_sweep(c);
            with_output(out_path, c.output, [&](std::ostream& os) { cli::write_sweep_csv(os, r); });
        } else if (trajectory->parsed()) {
            const cli::Config c = cli::load_config(config_path);
            if (dump_config && dump(c)) return 0;
            const auto rows = cli::run_trajectory_table(c);
            with_output(out_path, c.output,
                        [&](std::ostream& os) { cli::write_trajectory_csv(os, rows); });
        } else if (zeno->parsed()) {
            std::optional<cli::Config> c;
            if (!config_path.empty()) c = cli::load_config(config_path);
            if (c && dump_config && dump(*c)) return 0;
            cli::ZenoSummary s;
            if (c) {
                // Flags override the config's scale.
                if (!c->zeno) c->zeno = cli::ZenoConfig{};
                if (radius_opt->count()) c->zeno->radius_nm = zeno_radius_nm;
                if (energy_opt->count()) c->zeno->energy_J = zeno_energy;
                s = cli::run_zeno(c);
            } else {
                s.radius = zeno_radius_nm * collfric::units::nanometre;
                s.energy = zeno_energy;
                s.critical_speed = collfric::collision::zeno_critical_speed(s.radius, s.energy);
            }
            cli::write_zeno_report(std::cout, s);
            if (s.ladder && !out_path.empty()) {
                with_output(out_path, std::nullopt,
                            [&](std::ostream& os) { cli::write_zeno_ladder_csv(os, *s.ladder); });
            }
        } else if (kin->parsed()) {
            const cli::Kinematics k =
                cli::kinematics(force, mass_amu * collfric::units::atomic_mass_unit, v0,
                                radius_nm * collfric::units::nanometre);
            cli::write_kinematics_report(std::cout, k);
        }
    } catch (const collfric::ConfigError& e) {
        std::cerr << "collfric: " << e.what() << '\n';
        return kExitConfig;
    } catch (const collfric::InvalidArgument& e) {
        std::cerr << "collfric: " << e.what() << '\n';
        return kExitConfig;
    } catch (const collfric::InvariantViolation& e) {
        std::cerr << "collfric: invariant violated: " << e.what() << '\n';
        return kExitInvariant;
    } catch (const IoError& e) {
        std::cerr << "collfric: " << e.what() << '\n';
        return kExitIo;
    }
    return 0;
}
