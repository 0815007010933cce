#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "collfric/cli.hpp"
#include "support/random_states.hpp"

using namespace collfric;
using namespace collfric::cli;

namespace {

const std::string kConfigDir = COLLFRIC_CONFIG_DIR;

Config config_file(const std::string& name) { return load_config(kConfigDir + "/" + name); }

Config parse(const std::string& text) { return parse_config(Json::parse(text)); }

std::string sweep_csv(const Config& c) {
    std::ostringstream os;
    write_sweep_csv(os, run_sweep(c));
    return os.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

const char* kDampedSwap = R"({
  "model": "damped_swap", "delta_x_nm": 0.2,
  "hbar_omega_S_eV": 0.6, "a_S": -0.5, "hbar_omega_A_eV": 0.6, "a_A": 0.5,
  "gamma_A_THz": 0, "coupling": {"mode": "fixed", "J_THz": 50},
  "velocity_grid": {"spacing": "log", "v_min_km_per_s": 1, "v_max_km_per_s": 100, "n_points": 5},
  "trajectory": {"v_km_per_s": 3, "n_interactions": 8}
})";

}  // namespace

// --- parsing --------------------------------------------------------------

TEST(ParseConfig, ShippedConfigsLoad) {
    for (const char* name : {"fig3.json", "fig4.json", "fig5.json", "fig6.json",
                             "fig2c_trajectory.json", "zeno_nitrogen.json"}) {
        EXPECT_NO_THROW(config_file(name)) << name;
    }
    const Config fig3 = config_file("fig3.json");
    ASSERT_TRUE(std::holds_alternative<DampedSwapConfig>(fig3.model));
    const auto p = damped_swap_params(std::get<DampedSwapConfig>(fig3.model), fig3.spacing());
    EXPECT_NEAR(std::get<models::FixedCoupling>(p.coupling).rate / 91156046928570.631, 1.0, 1e-14);
    EXPECT_EQ(p.leak_rate, 16e12);
    EXPECT_NEAR(fig3.spacing(), 0.2e-9, 1e-25);
    EXPECT_TRUE(std::holds_alternative<EntangleDisentangleConfig>(config_file("fig4.json").model));
    EXPECT_TRUE(std::holds_alternative<GenericHamiltonianConfig>(config_file("zeno_nitrogen.json").model));
}

TEST(ParseConfig, RejectsInvalidInput) {
    const Json base = Json::parse(kDampedSwap);
    auto with = [&](const std::string& pointer, const Json& value) {
        Json j = base;
        j[Json::json_pointer(pointer)] = value;
        return j;
    };
    auto without = [&](const std::string& pointer) {
        Json j = base;
        j.at(Json::json_pointer(pointer).parent_pointer())
            .erase(Json::json_pointer(pointer).back());
        return j;
    };
    const std::vector<Json> bad = {
        with("/unknown", 1),
        with("/coupling/extra", 1),
        with("/velocity_grid/step", 1),
        with("/model", "swap"),
        with("/delta_x_nm", 0.0),
        with("/delta_x_nm", "0.2"),
        with("/a_S", 1.5),
        with("/gamma_A_THz", -1.0),
        with("/coupling/mode", "adaptive"),
        with("/coupling/hbar_J_meV", 60.0),  // both strengths given
        with("/velocity_grid/v_min_km_per_s", 0.0),
        with("/velocity_grid/v_max_km_per_s", 0.5),
        with("/velocity_grid/n_points", 1),
        with("/velocity_grid/n_points", 2.5),
        with("/velocity_grid/spacing", "cubic"),
        with("/times_fs", Json::array({1.0, -2.0})),
        with("/trajectory/n_interactions", 0),
        with("/trajectory/v_km_per_s", -1.0),
        without("/a_A"),
        without("/coupling"),
        without("/coupling/J_THz"),
        Json::array({1, 2}),
    };
    for (const Json& j : bad) EXPECT_THROW(parse_config(j), ConfigError) << j.dump();

    EXPECT_THROW(parse(R"({"model": "entangle_disentangle", "delta_x_nm": 0.2, "epsilon": 1.5,
        "E_S0_eV": 0, "E_S_target_eV": 0.6, "E_A0_eV": 0, "E_A_target_eV": 0.6,
        "coupling": {"mode": "fixed", "J_THz": 1}})"),
                 ConfigError);
    EXPECT_THROW(parse(R"({"model": "generic_hamiltonian", "delta_x_nm": 0.2,
        "splitting_S_eV": 0.06, "splitting_A_eV": 0.05,
        "coupling": {"mode": "velocity_scaled", "form": "xx", "strength_meV": 1}})"),
                 ConfigError);
    EXPECT_THROW(parse(R"({"model": "generic_hamiltonian", "delta_x_nm": 0.2,
        "splitting_S_eV": 0.06, "splitting_A_eV": 0.05, "bloch_S": [1, 1, 0],
        "coupling": {"form": "xx", "strength_meV": 1}})"),
                 ConfigError);
}

TEST(LoadConfig, ReportsUnreadableAndMalformedFiles) {
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
    const std::string path = ::testing::TempDir() + "collfric_bad.json";
    {
        std::ofstream f(path);
        f << "{ \"model\": ";
    }
    EXPECT_THROW(load_config(path), ConfigError);
}

TEST(ToJson, RoundTripsEveryShippedConfig) {
    for (const char* name : {"fig3.json", "fig4.json", "fig5.json", "fig6.json",
                             "fig2c_trajectory.json", "zeno_nitrogen.json"}) {
        const Config c = config_file(name);
        const Json once = to_json(c);
        const Json twice = to_json(parse_config(Json::parse(once.dump(2))));
        EXPECT_EQ(once.dump(), twice.dump()) << name;
        if (c.velocity_grid) {
            EXPECT_EQ(sweep_csv(c), sweep_csv(parse_config(Json::parse(once.dump(2))))) << name;
        }
    }
}

// --- formatting -----------------------------------------------------------

TEST(FormatNumber, SeventeenDigitsAndInfinities) {
    EXPECT_EQ(format_number(0.1), "0.10000000000000001");
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(units::infinity), "inf");
    EXPECT_EQ(format_number(-units::infinity), "-inf");
    testsupport::Rng rng(81);
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.normal() * std::pow(10.0, rng.integer(-40, 40));
        EXPECT_EQ(std::strtod(format_number(x).c_str(), nullptr), x);
    }
}

TEST(ParallelMap, KeepsOrderAndPropagatesErrors) {
    const auto squares = parallel_map<int>(1000, [](std::size_t i) { return static_cast<int>(i * i); });
    for (std::size_t i = 0; i < squares.size(); ++i) EXPECT_EQ(squares[i], static_cast<int>(i * i));
    EXPECT_THROW(parallel_map<int>(50,
                                   [](std::size_t i) -> int {
                                       if (i == 37) throw InvalidArgument("boom");
                                       return 0;
                                   }),
                 InvalidArgument);
}

// --- sweep ----------------------------------------------------------------

TEST(Sweep, HeaderAndShape) {
    const Config c = config_file("fig4.json");
    const auto text = lines(sweep_csv(c));
    ASSERT_EQ(text.size(), 601u);
    EXPECT_EQ(text[0], "v_m_per_s,f_infty_N,f_tr_N,gamma_per_s,f_at_t0_N,f_at_t1_N,f_at_t2_N,f_at_t3_N");
    EXPECT_EQ(text[1].substr(0, text[1].find(',')), "1000");
    EXPECT_EQ(text[600].substr(0, text[600].find(',')), "1000000");
}

TEST(Sweep, Fig4PermanentFrictionPeak) {
    // sin^2(J dx / v) reaches 1 at every v = J dx / (pi / 2 + m pi); the
    // fastest of these is the peak, the next one sits at a third of it.
    const SweepResult r = run_sweep(config_file("fig4.json"));
    double best = 0.0;
    double best_v = 0.0;
    for (const auto& row : r.rows) {
        if (row.decomposition.velocity < 6e3) continue;
        if (row.decomposition.f_infty > best) {
            best = row.decomposition.f_infty;
            best_v = row.decomposition.velocity;
        }
    }
    EXPECT_NEAR(best / 3.6048974265e-10, 1.0, 1e-3);
    EXPECT_NEAR(best_v / 12732.395447351627, 1.0, 0.01);
}

TEST(Sweep, Fig3GammaDivergesAboveLeakBaseline) {
    const SweepResult r = run_sweep(config_file("fig3.json"));
    const double baseline = 2.0 * 16e12;
    int spikes = 0;
    for (const auto& row : r.rows) {
        if (row.decomposition.velocity > 20e3) break;
        EXPECT_GE(row.decomposition.gamma, 0.9 * baseline);
        if (row.decomposition.gamma > 3.0 * baseline) ++spikes;
    }
    EXPECT_GT(spikes, 0);
    ASSERT_GE(r.comments.size(), 2u);
    EXPECT_NE(r.comments[1].find("omega_rad_per_s=89740876369933"), std::string::npos);
}

TEST(Sweep, FullRetentionGivesZeroColumns) {
    Config c = config_file("fig4.json");
    std::get<EntangleDisentangleConfig>(c.model).epsilon = 1.0;
    for (const auto& row : run_sweep(c).rows) {
        EXPECT_EQ(row.decomposition.f_infty, 0.0);
        EXPECT_EQ(row.decomposition.f_tr, 0.0);
        for (double f : row.friction_at_times) EXPECT_EQ(f, 0.0);
    }
}

TEST(Sweep, InfiniteRateIsWrittenAsInf) {
    Config c = config_file("fig4.json");
    std::get<EntangleDisentangleConfig>(c.model).epsilon = 0.0;
    const double v_full = 2.0 * 100e12 * 0.2e-9 / std::numbers::pi;  // J dt = pi / 2
    c.velocity_grid = VelocityGrid{"linear", v_full / 1e3, 2 * v_full / 1e3, 2};
    const auto text = lines(sweep_csv(c));
    ASSERT_EQ(text.size(), 3u);
    EXPECT_NE(text[1].find(",inf,"), std::string::npos) << text[1];
}

TEST(Sweep, DeterministicAcrossRuns) {
    const Config c = config_file("fig5.json");
    const std::string first = sweep_csv(c);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(sweep_csv(c), first);
    EXPECT_NE(first.find("# critical damping at v_c_m_per_s=3000"), std::string::npos);
}

TEST(Sweep, RejectsUnsupportedInput) {
    EXPECT_THROW(run_sweep(config_file("zeno_nitrogen.json")), ConfigError);
    EXPECT_THROW(run_sweep(config_file("fig2c_trajectory.json")), ConfigError);
}

// --- trajectory -----------------------------------------------------------

TEST(Trajectory, SingleInteraction) {
    Config c = config_file("fig2c_trajectory.json");
    c.trajectory->n_interactions = 1;
    const auto rows = run_trajectory_table(c);
    ASSERT_EQ(rows.size(), 1u);
    const auto spec = models::build_convex_spec(
        damped_swap_params(std::get<DampedSwapConfig>(c.model), c.spacing()));
    const auto d = convex::friction_decomposition(spec, c.trajectory->v_km_per_s * 1e3);
    EXPECT_NEAR(rows[0].friction, d.f_infty + d.f_tr, 1e-14 * std::abs(d.f_tr));
    EXPECT_EQ(rows[0].n, 0u);
    EXPECT_EQ(rows[0].time, 0.0);
}

TEST(Trajectory, UndampedEqualGapsGiveZeroFriction) {
    const Config c = parse(kDampedSwap);
    const auto rows = run_trajectory_table(c);
    ASSERT_EQ(rows.size(), 8u);
    // zero up to roundoff in the two cancelling energy flows
    const double scale = 0.6 * units::electron_volt / c.spacing();
    for (const auto& r : rows) EXPECT_LE(std::abs(r.friction), 1e-14 * scale) << r.n;
}

TEST(Trajectory, Fig2cEnvelopeDecaysByRetention) {
    const Config c = config_file("fig2c_trajectory.json");
    const auto rows = run_trajectory_table(c);
    ASSERT_EQ(rows.size(), 20u);
    const auto p = damped_swap_params(std::get<DampedSwapConfig>(c.model), c.spacing());
    const double dt = c.spacing() / (c.trajectory->v_km_per_s * 1e3);
    EXPECT_NEAR(std::get<models::FixedCoupling>(p.coupling).rate * dt, 8.7, 1e-12);
    const double phi = models::damped_swap_retentions(p, dt).system;
    for (std::size_t n = 0; n + 1 < rows.size(); ++n) {
        EXPECT_NEAR(rows[n + 1].friction / rows[n].friction, phi, 1e-12) << n;
        EXPECT_NEAR(rows[n + 1].time - rows[n].time, dt, 1e-12 * dt);
    }
}

TEST(Trajectory, EnergyBookkeepingBalancesRowWise) {
    for (const char* name : {"fig2c_trajectory.json", "zeno_nitrogen.json"}) {
        Config c = config_file(name);
        if (!c.trajectory) c.trajectory = TrajectoryConfig{500.0, 30};
        for (const auto& r : run_trajectory_table(c)) {
            const double scale = std::abs(r.delta_energy_system) + std::abs(r.delta_energy_ancilla);
            EXPECT_LE(std::abs(r.delta_energy_system + r.delta_energy_ancilla + r.work),
                      1e-15 * scale)
                << name << " n " << r.n;
        }
    }
}

TEST(Trajectory, GenericModelFollowsTheCollisionEngine) {
    Config c = config_file("zeno_nitrogen.json");
    c.trajectory = TrajectoryConfig{5.0, 6};
    const auto rows = run_trajectory_table(c);
    const auto& g = std::get<GenericHamiltonianConfig>(c.model);
    const auto records = collision::run_trajectory(generic_spec(g, c.spacing()),
                                                   generic_system_state(g), 5e3, 6);
    ASSERT_EQ(rows.size(), records.size());
    for (std::size_t n = 0; n < rows.size(); ++n) EXPECT_EQ(rows[n].friction, records[n].friction);

    std::ostringstream os;
    write_trajectory_csv(os, rows);
    const auto text = lines(os.str());
    EXPECT_EQ(text[0], "n,t_s,f_n_N,E_S_J,delta_E_S_J,delta_E_A_J,delta_W_J");
    EXPECT_EQ(text.size(), 7u);
}

TEST(Trajectory, NeedsTrajectorySection) {
    EXPECT_THROW(run_trajectory_table(config_file("fig3.json")), ConfigError);
}

// --- zeno -----------------------------------------------------------------

TEST(Zeno, NitrogenDefaults) {
    const ZenoSummary s = run_zeno(std::nullopt);
    EXPECT_NEAR(s.critical_speed, 43619.599214076095, 1e-8);
    EXPECT_LT(std::abs(s.critical_speed - 43.6e3) / 43.6e3, 1e-3);
    EXPECT_FALSE(s.ladder.has_value());
    std::ostringstream os;
    write_zeno_report(os, s);
    EXPECT_NE(os.str().find("critical_speed_m_per_s = 43619.599214076"), std::string::npos);
    EXPECT_NE(os.str().find("critical_speed_over_c = 0.000145499321447"), std::string::npos);
}

TEST(Zeno, CoherentGenericModelConverges) {
    const ZenoSummary s = run_zeno(config_file("zeno_nitrogen.json"));
    ASSERT_TRUE(s.leading_coefficient && s.ladder);
    EXPECT_NE(*s.leading_coefficient, 0.0);
    EXPECT_TRUE(s.ladder->converged);
    EXPECT_LT(std::abs(s.ladder->estimate - *s.leading_coefficient), 1e-3 * std::abs(*s.leading_coefficient));
    EXPECT_GE(s.ladder->speeds.size(), 11u);
    std::ostringstream os;
    write_zeno_ladder_csv(os, *s.ladder);
    EXPECT_EQ(lines(os.str())[0], "v_m_per_s,v_f_W,residual_W");
}

TEST(Zeno, CommutingAndDiagonalIsotropicCouplingsVanish) {
    Config c = config_file("zeno_nitrogen.json");
    auto& g = std::get<GenericHamiltonianConfig>(c.model);
    g.coupling.form = "zz";
    EXPECT_EQ(*run_zeno(c).leading_coefficient, 0.0);

    g.coupling.form = "isotropic";
    g.bloch_S = {0.0, 0.0, -0.6};
    g.bloch_A = {0.0, 0.0, 0.3};
    const ZenoSummary s = run_zeno(c);
    EXPECT_EQ(*s.leading_coefficient, 0.0);
    // friction is O(1/v^2), so v f falls off as 1/v
    const auto& res = s.ladder->residuals;
    EXPECT_NEAR(res[0] / res[1], 2.0, 0.05);
    EXPECT_NEAR(res[2] / res[3], 2.0, 0.05);
}

TEST(Zeno, RejectsUnsuitableConfigs) {
    EXPECT_THROW(run_zeno(config_file("fig3.json")), ConfigError);
    Config c = config_file("zeno_nitrogen.json");
    c.zeno->ladder_points = 5;
    EXPECT_THROW(run_zeno(c), ConfigError);
}

// --- kinematics -----------------------------------------------------------

TEST(Kinematics, NitrogenReferenceExample) {
    const Kinematics k = kinematics(0.1e-9, 14 * units::atomic_mass_unit, 1e4, 0.23e-9);
    EXPECT_NEAR(k.acceleration / 4301529115772230.4, 1.0, 1e-12);
    EXPECT_LT(std::abs(k.acceleration - 4.30e15) / 4.30e15, 0.01);
    EXPECT_NEAR(k.stopping_time / 2.32475469324e-12, 1.0, 1e-10);
    EXPECT_LT(std::abs(k.stopping_time - 2.33e-12) / 2.33e-12, 0.01);
    EXPECT_NEAR(k.distance / 1.16237734662e-8, 1.0, 1e-10);
    EXPECT_LT(std::abs(k.distance - 11.6e-9) / 11.6e-9, 0.01);
    EXPECT_NEAR(k.radii, 50.538145505217391, 1e-9);
}

TEST(Kinematics, ZeroForceNeverStops) {
    const Kinematics k = kinematics(0.0, 14 * units::atomic_mass_unit, 1e4, 0.23e-9);
    EXPECT_EQ(k.acceleration, 0.0);
    EXPECT_TRUE(std::isinf(k.stopping_time));
    std::ostringstream os;
    write_kinematics_report(os, k);
    EXPECT_NE(os.str().find("stopping_time_s = inf"), std::string::npos);
    EXPECT_THROW(kinematics(-1.0, 1.0, 1.0, 1.0), InvalidArgument);
    EXPECT_THROW(kinematics(1.0, 0.0, 1.0, 1.0), InvalidArgument);
}
