// cli.hpp: configuration schema and the commands behind the collfric tool.
//
// Configs are JSON. Physical fields carry their unit in the key name
// (delta_x_nm, gamma_A_THz, hbar_omega_S_eV, ...). Unknown keys are rejected
// so that a typo cannot silently fall back to a default.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "collfric/collision.hpp"
#include "collfric/convex.hpp"
#include "collfric/error.hpp"
#include "collfric/models.hpp"
#include "collfric/oracle.hpp"
#include "collfric/quantum.hpp"
#include "collfric/units.hpp"

namespace collfric::cli {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Schema

struct CouplingConfig {
    std::string mode = "fixed";  // fixed | velocity_scaled
    std::optional<double> hbar_J_meV;
    std::optional<double> J_THz;
    std::optional<double> k_per_nm;
};

struct DampedSwapConfig {
    double hbar_omega_S_eV = 0.0;
    double a_S = 0.0;
    double hbar_omega_A_eV = 0.0;
    double a_A = 0.0;
    double gamma_A_THz = 0.0;
    CouplingConfig coupling;
};

struct EntangleDisentangleConfig {
    double epsilon = 0.0;
    double E_S0_eV = 0.0;
    double E_S_target_eV = 0.0;
    double E_A0_eV = 0.0;
    double E_A_target_eV = 0.0;
    CouplingConfig coupling;
};

struct GenericCouplingConfig {
    std::string mode = "fixed";
    std::string form = "swap";  // swap | isotropic | xx | zz
    double strength_meV = 0.0;
};

struct GenericHamiltonianConfig {
    double splitting_S_eV = 0.0;
    double splitting_A_eV = 0.0;
    std::vector<double> bloch_S{0.0, 0.0, -1.0};
    std::vector<double> bloch_A{0.0, 0.0, -1.0};
    GenericCouplingConfig coupling;
    std::string generator = "full";  // full | interaction_only
};

using ModelConfig = std::variant<DampedSwapConfig, EntangleDisentangleConfig, GenericHamiltonianConfig>;

struct VelocityGrid {
    std::string spacing = "log";  // log | linear
    double v_min_km_per_s = 0.0;
    double v_max_km_per_s = 0.0;
    int n_points = 0;

    /// Grid speeds in m/s, in ascending order.
    std::vector<double> speeds() const {
        std::vector<double> out(static_cast<std::size_t>(n_points));
        const double lo = v_min_km_per_s * units::km_per_s;
        const double hi = v_max_km_per_s * units::km_per_s;
        for (int i = 0; i < n_points; ++i) {
            const double x = static_cast<double>(i) / static_cast<double>(n_points - 1);
            out[static_cast<std::size_t>(i)] =
                spacing == "log" ? std::exp(std::log(lo) + x * (std::log(hi) - std::log(lo)))
                                 : lo + x * (hi - lo);
        }
        out.front() = lo;
        out.back() = hi;
        return out;
    }
};

struct TrajectoryConfig {
    double v_km_per_s = 0.0;
    int n_interactions = 0;
};

struct ZenoConfig {
    double radius_nm = 0.23;
    double energy_J = 1e-20;
    int ladder_points = 12;
};

struct Config {
    ModelConfig model;
    double delta_x_nm = 0.0;
    std::optional<VelocityGrid> velocity_grid;
    std::vector<double> times_fs;
    std::optional<TrajectoryConfig> trajectory;
    std::optional<ZenoConfig> zeno;
    std::optional<std::string> output;

    double spacing() const { return delta_x_nm * units::nanometre; }
};

inline std::string model_name(const ModelConfig& m) {
    if (std::holds_alternative<DampedSwapConfig>(m)) return "damped_swap";
    if (std::holds_alternative<EntangleDisentangleConfig>(m)) return "entangle_disentangle";
    return "generic_hamiltonian";
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

/// Reads one JSON object, remembering which keys were consumed.
class ObjectReader {
public:
    ObjectReader(const Json& j, std::string path) : json_(j), path_(std::move(path)) {
        if (!json_.is_object()) fail("expected an object");
    }

    bool has(const std::string& key) const { return json_.contains(key); }

    const Json& raw(const std::string& key) {
        if (!has(key)) fail("missing key '" + key + "'");
        used_.insert(key);
        return json_.at(key);
    }

    double number(const std::string& key) {
        const Json& v = raw(key);
        if (!v.is_number()) fail("'" + key + "' must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail("'" + key + "' must be finite");
        return x;
    }

    double number(const std::string& key, double fallback) {
        return has(key) ? number(key) : fallback;
    }

    std::optional<double> optional_number(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return number(key);
    }

    int integer(const std::string& key) {
        const Json& v = raw(key);
        if (!v.is_number_integer()) fail("'" + key + "' must be an integer");
        return v.get<int>();
    }

    int integer(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }

    std::string string(const std::string& key) {
        const Json& v = raw(key);
        if (!v.is_string()) fail("'" + key + "' must be a string");
        return v.get<std::string>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        return has(key) ? string(key) : fallback;
    }

    std::string choice(const std::string& key, const std::string& fallback,
                       std::initializer_list<const char*> allowed) {
        const std::string s = string(key, fallback);
        for (const char* a : allowed)
            if (s == a) return s;
        fail("'" + key + "' has unsupported value '" + s + "'");
    }

    std::vector<double> numbers(const std::string& key) {
        const Json& v = raw(key);
        if (!v.is_array()) fail("'" + key + "' must be an array of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) fail("'" + key + "' must be an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    ObjectReader child(const std::string& key) { return ObjectReader(raw(key), path_ + key + "."); }

    /// Rejects keys that were never read.
    void finish() const {
        for (auto it = json_.begin(); it != json_.end(); ++it) {
            if (!used_.count(it.key())) fail("unknown key '" + it.key() + "'");
        }
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("config" + (path_.empty() ? std::string() : " (" + path_ + ")") + ": " +
                          what);
    }

private:
    const Json& json_;
    std::string path_;
    std::set<std::string> used_;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
}

inline CouplingConfig parse_coupling(ObjectReader r) {
    CouplingConfig c;
    c.mode = r.choice("mode", "fixed", {"fixed", "velocity_scaled"});
    if (c.mode == "fixed") {
        c.hbar_J_meV = r.optional_number("hbar_J_meV");
        c.J_THz = r.optional_number("J_THz");
        require(c.hbar_J_meV.has_value() != c.J_THz.has_value(),
                "fixed coupling needs exactly one of hbar_J_meV, J_THz");
        require(c.hbar_J_meV.value_or(0.0) >= 0.0 && c.J_THz.value_or(0.0) >= 0.0,
                "coupling strength must be non-negative");
    } else {
        c.k_per_nm = r.number("k_per_nm");
        require(*c.k_per_nm >= 0.0, "k_per_nm must be non-negative");
    }
    r.finish();
    return c;
}

inline std::vector<double> parse_bloch(ObjectReader& r, const std::string& key) {
    if (!r.has(key)) return {0.0, 0.0, -1.0};
    std::vector<double> b = r.numbers(key);
    require(b.size() == 3, key + " must have three components");
    require(b[0] * b[0] + b[1] * b[1] + b[2] * b[2] <= 1.0 + 1e-12,
            key + " must lie inside the Bloch ball");
    return b;
}

}  // namespace detail

inline Config parse_config(const Json& j) {
    detail::ObjectReader r(j, "");
    Config c;
    const std::string model =
        r.choice("model", "", {"damped_swap", "entangle_disentangle", "generic_hamiltonian"});
    c.delta_x_nm = r.number("delta_x_nm");
    detail::require(c.delta_x_nm > 0.0, "delta_x_nm must be positive");

    if (model == "damped_swap") {
        DampedSwapConfig m;
        m.hbar_omega_S_eV = r.number("hbar_omega_S_eV");
        m.a_S = r.number("a_S");
        m.hbar_omega_A_eV = r.number("hbar_omega_A_eV");
        m.a_A = r.number("a_A");
        m.gamma_A_THz = r.number("gamma_A_THz", 0.0);
        m.coupling = detail::parse_coupling(r.child("coupling"));
        detail::require(std::abs(m.a_S) <= 1.0 && std::abs(m.a_A) <= 1.0,
                        "polarizations must lie in [-1, 1]");
        detail::require(m.gamma_A_THz >= 0.0, "gamma_A_THz must be non-negative");
        c.model = m;
    } else if (model == "entangle_disentangle") {
        EntangleDisentangleConfig m;
        m.epsilon = r.number("epsilon");
        m.E_S0_eV = r.number("E_S0_eV");
        m.E_S_target_eV = r.number("E_S_target_eV");
        m.E_A0_eV = r.number("E_A0_eV");
        m.E_A_target_eV = r.number("E_A_target_eV");
        m.coupling = detail::parse_coupling(r.child("coupling"));
        detail::require(m.epsilon >= 0.0 && m.epsilon <= 1.0, "epsilon must lie in [0, 1]");
        c.model = m;
    } else {
        GenericHamiltonianConfig m;
        m.splitting_S_eV = r.number("splitting_S_eV");
        m.splitting_A_eV = r.number("splitting_A_eV");
        m.bloch_S = detail::parse_bloch(r, "bloch_S");
        m.bloch_A = detail::parse_bloch(r, "bloch_A");
        m.generator = r.choice("generator", "full", {"full", "interaction_only"});
        detail::ObjectReader cr = r.child("coupling");
        m.coupling.mode = cr.choice("mode", "fixed", {"fixed"});
        m.coupling.form = cr.choice("form", "swap", {"swap", "isotropic", "xx", "zz"});
        m.coupling.strength_meV = cr.number("strength_meV");
        cr.finish();
        c.model = m;
    }

    if (r.has("velocity_grid")) {
        detail::ObjectReader g = r.child("velocity_grid");
        VelocityGrid grid;
        grid.spacing = g.choice("spacing", "log", {"log", "linear"});
        grid.v_min_km_per_s = g.number("v_min_km_per_s");
        grid.v_max_km_per_s = g.number("v_max_km_per_s");
        grid.n_points = g.integer("n_points");
        g.finish();
        detail::require(grid.v_min_km_per_s > 0.0, "v_min_km_per_s must be positive");
        detail::require(grid.v_max_km_per_s > grid.v_min_km_per_s,
                        "v_max_km_per_s must exceed v_min_km_per_s");
        detail::require(grid.n_points >= 2, "n_points must be at least 2");
        c.velocity_grid = grid;
    }
    if (r.has("times_fs")) {
        c.times_fs = r.numbers("times_fs");
        for (double t : c.times_fs) detail::require(t >= 0.0, "times_fs must be non-negative");
    }
    if (r.has("trajectory")) {
        detail::ObjectReader t = r.child("trajectory");
        TrajectoryConfig traj;
        traj.v_km_per_s = t.number("v_km_per_s");
        traj.n_interactions = t.integer("n_interactions");
        t.finish();
        detail::require(traj.v_km_per_s > 0.0, "trajectory speed must be positive");
        detail::require(traj.n_interactions >= 1, "n_interactions must be at least 1");
        c.trajectory = traj;
    }
    if (r.has("zeno")) {
        detail::ObjectReader z = r.child("zeno");
        ZenoConfig zeno;
        zeno.radius_nm = z.number("radius_nm", zeno.radius_nm);
        zeno.energy_J = z.number("energy_J", zeno.energy_J);
        zeno.ladder_points = z.integer("ladder_points", zeno.ladder_points);
        z.finish();
        detail::require(zeno.radius_nm > 0.0, "zeno radius must be positive");
        detail::require(zeno.energy_J >= 0.0, "zeno energy must be non-negative");
        c.zeno = zeno;
    }
    if (r.has("output")) c.output = r.string("output");
    r.finish();
    return c;
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    return parse_config(j);
}

namespace detail {

inline Json coupling_json(const CouplingConfig& c) {
    Json j;
    j["mode"] = c.mode;
    if (c.hbar_J_meV) j["hbar_J_meV"] = *c.hbar_J_meV;
    if (c.J_THz) j["J_THz"] = *c.J_THz;
    if (c.k_per_nm) j["k_per_nm"] = *c.k_per_nm;
    return j;
}

}  // namespace detail

/// Canonical JSON of a parsed config; parse_config(to_json(c)) reproduces c.
inline Json to_json(const Config& c) {
    Json j;
    j["model"] = model_name(c.model);
    j["delta_x_nm"] = c.delta_x_nm;
    std::visit(
        [&j](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, DampedSwapConfig>) {
                j["hbar_omega_S_eV"] = m.hbar_omega_S_eV;
                j["a_S"] = m.a_S;
                j["hbar_omega_A_eV"] = m.hbar_omega_A_eV;
                j["a_A"] = m.a_A;
                j["gamma_A_THz"] = m.gamma_A_THz;
                j["coupling"] = detail::coupling_json(m.coupling);
            } else if constexpr (std::is_same_v<T, EntangleDisentangleConfig>) {
                j["epsilon"] = m.epsilon;
                j["E_S0_eV"] = m.E_S0_eV;
                j["E_S_target_eV"] = m.E_S_target_eV;
                j["E_A0_eV"] = m.E_A0_eV;
                j["E_A_target_eV"] = m.E_A_target_eV;
                j["coupling"] = detail::coupling_json(m.coupling);
            } else {
                j["splitting_S_eV"] = m.splitting_S_eV;
                j["splitting_A_eV"] = m.splitting_A_eV;
                j["bloch_S"] = m.bloch_S;
                j["bloch_A"] = m.bloch_A;
                j["generator"] = m.generator;
                j["coupling"] = Json{{"mode", m.coupling.mode},
                                     {"form", m.coupling.form},
                                     {"strength_meV", m.coupling.strength_meV}};
            }
        },
        c.model);
    if (c.velocity_grid) {
        const VelocityGrid& g = *c.velocity_grid;
        j["velocity_grid"] = Json{{"spacing", g.spacing},
                                  {"v_min_km_per_s", g.v_min_km_per_s},
                                  {"v_max_km_per_s", g.v_max_km_per_s},
                                  {"n_points", g.n_points}};
    }
    if (!c.times_fs.empty()) j["times_fs"] = c.times_fs;
    if (c.trajectory) {
        j["trajectory"] = Json{{"v_km_per_s", c.trajectory->v_km_per_s},
                               {"n_interactions", c.trajectory->n_interactions}};
    }
    if (c.zeno) {
        j["zeno"] = Json{{"radius_nm", c.zeno->radius_nm},
                         {"energy_J", c.zeno->energy_J},
                         {"ladder_points", c.zeno->ladder_points}};
    }
    if (c.output) j["output"] = *c.output;
    return j;
}

// ---------------------------------------------------------------------------
// Model construction

inline models::Coupling to_coupling(const CouplingConfig& c) {
    if (c.mode == "velocity_scaled") {
        return models::VelocityScaledCoupling{c.k_per_nm.value_or(0.0) / units::nanometre};
    }
    if (c.hbar_J_meV) {
        return models::FixedCoupling{units::energy_to_angular(units::ev_to_joule(*c.hbar_J_meV * 1e-3))};
    }
    return models::FixedCoupling{c.J_THz.value_or(0.0) * units::terahertz};
}

inline models::DampedSwapParams damped_swap_params(const DampedSwapConfig& m, double spacing) {
    models::DampedSwapParams p;
    p.coupling = to_coupling(m.coupling);
    p.leak_rate = m.gamma_A_THz * units::terahertz;
    p.spacing = spacing;
    p.system = {m.a_S, units::energy_to_angular(units::ev_to_joule(m.hbar_omega_S_eV))};
    p.ancilla = {m.a_A, units::energy_to_angular(units::ev_to_joule(m.hbar_omega_A_eV))};
    return p;
}

inline models::EntangleDisentangleParams ed_params(const EntangleDisentangleConfig& m,
                                                   double spacing) {
    models::EntangleDisentangleParams p;
    p.coupling = to_coupling(m.coupling);
    p.epsilon = m.epsilon;
    p.spacing = spacing;
    p.system_initial_energy = units::ev_to_joule(m.E_S0_eV);
    p.system_target_energy = units::ev_to_joule(m.E_S_target_eV);
    p.ancilla_initial_energy = units::ev_to_joule(m.E_A0_eV);
    p.ancilla_target_energy = units::ev_to_joule(m.E_A_target_eV);
    return p;
}

/// Two qubits with local gaps `splitting` (H = splitting sigma_z / 2) and one
/// of the standard couplings.
inline collision::CollisionSpec generic_spec(const GenericHamiltonianConfig& m, double spacing) {
    using quantum::kron;
    const quantum::Matrix sx = quantum::sigma_x();
    const quantum::Matrix sy = quantum::sigma_y();
    const quantum::Matrix sz = quantum::sigma_z();
    const double strength = units::ev_to_joule(m.coupling.strength_meV * 1e-3);
    quantum::Matrix coupling;
    if (m.coupling.form == "swap") coupling = quantum::swap_operator(2);
    else if (m.coupling.form == "isotropic") coupling = kron(sx, sx) + kron(sy, sy) + kron(sz, sz);
    else if (m.coupling.form == "xx") coupling = kron(sx, sx);
    else coupling = kron(sz, sz);

    const quantum::HermitianOperator h_s(0.5 * units::ev_to_joule(m.splitting_S_eV) * sz);
    const quantum::HermitianOperator h_a(0.5 * units::ev_to_joule(m.splitting_A_eV) * sz);
    const auto& b = m.bloch_A;
    return collision::CollisionSpec(
        h_s, h_a, quantum::HermitianOperator(strength * coupling),
        quantum::DensityMatrix::from_bloch(b[0], b[1], b[2]), spacing, collision::CouplingMode::fixed,
        m.generator == "interaction_only" ? collision::Generator::interaction_only
                                          : collision::Generator::full);
}

inline quantum::DensityMatrix generic_system_state(const GenericHamiltonianConfig& m) {
    return quantum::DensityMatrix::from_bloch(m.bloch_S[0], m.bloch_S[1], m.bloch_S[2]);
}

// ---------------------------------------------------------------------------
// Output helpers

/// %.17g, with infinities spelled inf / -inf.
inline std::string format_number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Evaluates fn(0..n-1) on a thread pool; results keep index order.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn fn) {
    std::vector<std::optional<T>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads =
        std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<T> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepRow {
    convex::FrictionDecomposition decomposition;
    std::vector<double> friction_at_times;  // N
};

struct SweepResult {
    std::vector<std::string> comments;
    std::vector<double> times;  // s
    std::vector<SweepRow> rows;
};

namespace detail {

inline std::vector<std::string> damped_swap_comments(const models::DampedSwapParams& p) {
    std::vector<std::string> out;
    if (const auto* f = std::get_if<models::FixedCoupling>(&p.coupling)) {
        const double s = (f->rate - p.leak_rate) * (f->rate + p.leak_rate);
        out.push_back("damped_swap J_rad_per_s=" + format_number(f->rate) +
                      " gamma_A_per_s=" + format_number(p.leak_rate));
        if (s >= 0.0) {
            out.push_back("derived omega_rad_per_s=" + format_number(std::sqrt(s)) +
                          " (sqrt(J^2 - gamma_A^2))");
        } else {
            out.push_back("overdamped: omega = i*" + format_number(std::sqrt(-s)) + " rad/s");
        }
    } else {
        const double k = std::get<models::VelocityScaledCoupling>(p.coupling).wavenumber;
        out.push_back("damped_swap k_rad_per_m=" + format_number(k) +
                      " gamma_A_per_s=" + format_number(p.leak_rate));
        out.push_back("critical damping at v_c_m_per_s=" + format_number(models::critical_speed(p)));
    }
    return out;
}

}  // namespace detail

inline SweepResult run_sweep(const Config& c) {
    if (!c.velocity_grid) throw ConfigError("config: sweep needs a velocity_grid");
    if (std::holds_alternative<GenericHamiltonianConfig>(c.model)) {
        throw ConfigError("config: sweep supports damped_swap and entangle_disentangle only");
    }
    SweepResult result;
    std::optional<convex::ConvexModelSpec> spec;
    if (const auto* ds = std::get_if<DampedSwapConfig>(&c.model)) {
        const models::DampedSwapParams p = damped_swap_params(*ds, c.spacing());
        result.comments = detail::damped_swap_comments(p);
        spec = models::build_convex_spec(p);
    } else {
        spec = models::build_convex_spec(
            ed_params(std::get<EntangleDisentangleConfig>(c.model), c.spacing()));
    }
    for (double t : c.times_fs) result.times.push_back(t * units::femtosecond);

    const std::vector<double> speeds = c.velocity_grid->speeds();
    result.rows = parallel_map<SweepRow>(speeds.size(), [&](std::size_t i) {
        SweepRow row;
        row.decomposition = convex::friction_decomposition(*spec, speeds[i]);
        for (double t : result.times) row.friction_at_times.push_back(row.decomposition.at_time(t));
        return row;
    });
    return result;
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& r) {
    for (const auto& c : r.comments) os << "# " << c << '\n';
    os << "v_m_per_s,f_infty_N,f_tr_N,gamma_per_s";
    for (std::size_t k = 0; k < r.times.size(); ++k) os << ",f_at_t" << k << "_N";
    os << '\n';
    for (const auto& row : r.rows) {
        const auto& d = row.decomposition;
        os << format_number(d.velocity) << ',' << format_number(d.f_infty) << ','
           << format_number(d.f_tr) << ',' << format_number(d.gamma);
        for (double f : row.friction_at_times) os << ',' << format_number(f);
        os << '\n';
    }
}

// ---------------------------------------------------------------------------
// trajectory

struct TrajectoryRow {
    std::size_t n = 0;
    double time = 0.0;                  // start of interaction n, s
    double friction = 0.0;              // N
    double system_energy = 0.0;         // before interaction n, J
    double delta_energy_system = 0.0;   // J
    double delta_energy_ancilla = 0.0;  // J
    double work = 0.0;                  // J
};

namespace detail {

inline std::vector<TrajectoryRow> convex_trajectory(const convex::ConvexModelSpec& spec,
                                                    double speed, std::size_t count) {
    const double dx = spec.spacing();
    const double dt = dx / speed;
    const convex::ConvexEnergies& e = spec.energies();
    const double step_s = spec.system_retention().complement(dt);
    const double step_a = spec.ancilla_retention().complement(dt);
    std::vector<TrajectoryRow> rows;
    for (std::size_t n = 0; n < count; ++n) {
        const double w = spec.system_retention().power(dt, n);
        TrajectoryRow row;
        row.n = n;
        row.time = static_cast<double>(n) * dt;
        row.system_energy = w * e.system_initial + (1.0 - w) * e.system_target;
        row.delta_energy_system = w * step_s * (e.system_target - e.system_initial);
        const double target_offset = w * (e.ancilla_target_first - e.ancilla_target_limit) +
                                     (e.ancilla_target_limit - e.ancilla_initial);
        row.delta_energy_ancilla = step_a * target_offset;
        row.work = -(row.delta_energy_system + row.delta_energy_ancilla);
        row.friction = -row.work / dx;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace detail

inline std::vector<TrajectoryRow> run_trajectory_table(const Config& c) {
    if (!c.trajectory) throw ConfigError("config: trajectory needs a 'trajectory' section");
    const double speed = c.trajectory->v_km_per_s * units::km_per_s;
    const auto count = static_cast<std::size_t>(c.trajectory->n_interactions);
    if (const auto* ds = std::get_if<DampedSwapConfig>(&c.model)) {
        return detail::convex_trajectory(
            models::build_convex_spec(damped_swap_params(*ds, c.spacing())), speed, count);
    }
    if (const auto* ed = std::get_if<EntangleDisentangleConfig>(&c.model)) {
        return detail::convex_trajectory(models::build_convex_spec(ed_params(*ed, c.spacing())),
                                         speed, count);
    }
    const auto& g = std::get<GenericHamiltonianConfig>(c.model);
    const collision::CollisionSpec spec = generic_spec(g, c.spacing());
    quantum::DensityMatrix state = generic_system_state(g);
    const auto records = collision::run_trajectory(spec, state, speed, count);
    std::vector<TrajectoryRow> rows;
    for (const auto& rec : records) {
        TrajectoryRow row;
        row.n = rec.index;
        row.time = static_cast<double>(rec.index) * spec.spacing() / speed;
        row.system_energy = quantum::expectation(spec.system_hamiltonian(), state);
        row.delta_energy_system = rec.delta_energy_system;
        row.delta_energy_ancilla = rec.delta_energy_ancilla;
        row.work = rec.work;
        row.friction = rec.friction;
        rows.push_back(row);
        state = rec.system_state_after;
    }
    return rows;
}

inline void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRow>& rows) {
    os << "n,t_s,f_n_N,E_S_J,delta_E_S_J,delta_E_A_J,delta_W_J\n";
    for (const auto& r : rows) {
        os << r.n << ',' << format_number(r.time) << ',' << format_number(r.friction) << ','
           << format_number(r.system_energy) << ',' << format_number(r.delta_energy_system) << ','
           << format_number(r.delta_energy_ancilla) << ',' << format_number(r.work) << '\n';
    }
}

// ---------------------------------------------------------------------------
// zeno

struct ZenoSummary {
    double radius = 0.0;          // m
    double energy = 0.0;          // J
    double critical_speed = 0.0;  // 2 r E / hbar, m/s
    std::optional<double> model_zeno_speed;
    std::optional<double> leading_coefficient;  // W
    std::optional<oracle::ZenoLimitReport> ladder;
};

/// Critical speed for (r, E); with a generic model also the commutator
/// coefficient and the numerical ladder that checks it.
inline ZenoSummary run_zeno(const std::optional<Config>& c) {
    ZenoSummary out;
    ZenoConfig z = c && c->zeno ? *c->zeno : ZenoConfig{};
    out.radius = z.radius_nm * units::nanometre;
    out.energy = z.energy_J;
    out.critical_speed = collision::zeno_critical_speed(out.radius, out.energy);
    if (!c) return out;
    const auto* g = std::get_if<GenericHamiltonianConfig>(&c->model);
    if (!g) throw ConfigError("config: zeno needs the generic_hamiltonian model");
    const collision::CollisionSpec spec = generic_spec(*g, c->spacing());
    const quantum::DensityMatrix rho = generic_system_state(*g);
    out.model_zeno_speed = collision::zeno_speed(spec);
    out.leading_coefficient = collision::zeno_leading_coefficient(spec, rho);
    if (z.ladder_points < 11) throw ConfigError("config: zeno.ladder_points must be at least 11");
    std::vector<double> ladder;
    double v = 10.0 * *out.model_zeno_speed;
    if (!(v > 0.0)) throw ConfigError("config: the model has no energy scale for a Zeno ladder");
    for (int i = 0; i < z.ladder_points; ++i, v *= 2.0) ladder.push_back(v);
    out.ladder = oracle::numeric_zeno_limit(spec, rho, ladder);
    return out;
}

inline void write_zeno_report(std::ostream& os, const ZenoSummary& z) {
    os << "radius_m = " << format_number(z.radius) << '\n'
       << "energy_J = " << format_number(z.energy) << '\n'
       << "critical_speed_m_per_s = " << format_number(z.critical_speed) << '\n'
       << "critical_speed_over_c = " << format_number(z.critical_speed / units::speed_of_light)
       << '\n';
    if (z.model_zeno_speed) {
        os << "model_zeno_speed_m_per_s = " << format_number(*z.model_zeno_speed) << '\n';
    }
    if (z.leading_coefficient) {
        os << "leading_coefficient_W = " << format_number(*z.leading_coefficient) << '\n';
    }
    if (z.ladder) {
        os << "numeric_limit_W = " << format_number(z.ladder->estimate) << '\n'
           << "residual_floor_W = " << format_number(z.ladder->floor) << '\n'
           << "converged = " << (z.ladder->converged ? "true" : "false") << '\n';
    }
}

inline void write_zeno_ladder_csv(std::ostream& os, const oracle::ZenoLimitReport& r) {
    os << "v_m_per_s,v_f_W,residual_W\n";
    for (std::size_t i = 0; i < r.speeds.size(); ++i) {
        os << format_number(r.speeds[i]) << ',' << format_number(r.scaled_friction[i]) << ','
           << format_number(r.residuals[i]) << '\n';
    }
}

// ---------------------------------------------------------------------------
// kinematics

struct Kinematics {
    double acceleration = 0.0;   // m/s^2 (deceleration magnitude)
    double stopping_time = 0.0;  // s
    double distance = 0.0;       // m
    double radii = 0.0;          // distance / r
};

/// Uniform deceleration of a particle of mass m from v0 under a constant force F.
inline Kinematics kinematics(double force, double mass, double v0, double radius) {
    if (!(force >= 0.0) || !(mass > 0.0) || !(v0 >= 0.0) || !(radius > 0.0)) {
        throw InvalidArgument("kinematics: force, speed >= 0 and mass, radius > 0 required");
    }
    Kinematics k;
    k.acceleration = force / mass;
    if (k.acceleration == 0.0) {
        k.stopping_time = k.distance = k.radii = v0 == 0.0 ? 0.0 : units::infinity;
        return k;
    }
    k.stopping_time = v0 / k.acceleration;
    k.distance = v0 * v0 / (2.0 * k.acceleration);
    k.radii = k.distance / radius;
    return k;
}

inline void write_kinematics_report(std::ostream& os, const Kinematics& k) {
    os << "acceleration_m_per_s2 = " << format_number(k.acceleration) << '\n'
       << "stopping_time_s = " << format_number(k.stopping_time) << '\n'
       << "stopping_distance_m = " << format_number(k.distance) << '\n'
       << "radii_crossed = " << format_number(k.radii) << '\n';
}

}  // namespace collfric::cli
