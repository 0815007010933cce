// models.hpp: the damped partial swap and entangle-disentangle families.
//
// Both are one-dimensional convex collision models. Each family exposes its
// retention functions, a factory for the equivalent ConvexModelSpec, its own
// closed-form (f_inf, f_tr, Gamma) and the leading behaviour at large and
// small speeds. Couplings are either fixed (J) or grow with speed (J = k v).

#pragma once

#include <cmath>
#include <utility>
#include <variant>

#include "collfric/convex.hpp"
#include "collfric/error.hpp"
#include "collfric/quantum.hpp"
#include "collfric/units.hpp"

namespace collfric::models {

using convex::ConvexModelSpec;
using convex::FrictionDecomposition;
using quantum::QubitThermalState;

struct FixedCoupling {
    double rate = 0.0;  // J, rad/s
};

struct VelocityScaledCoupling {
    double wavenumber = 0.0;  // k, rad/m; J = k v
};

using Coupling = std::variant<FixedCoupling, VelocityScaledCoupling>;

inline bool is_velocity_scaled(const Coupling& c) {
    return std::holds_alternative<VelocityScaledCoupling>(c);
}

/// Coupling rate J at a given speed.
inline double coupling_rate(const Coupling& c, double speed) {
    if (const auto* f = std::get_if<FixedCoupling>(&c)) return f->rate;
    return std::get<VelocityScaledCoupling>(c).wavenumber * speed;
}

inline void validate_coupling(const Coupling& c) {
    const double value = std::visit(
        [](const auto& v) {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, FixedCoupling>) return v.rate;
            else return v.wavenumber;
        },
        c);
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw InvalidArgument("coupling strength must be finite and non-negative");
    }
}

enum class SpeedRegime { large_v, small_v };

/// c * v^p.
struct PowerLaw {
    double coefficient = 0.0;
    double exponent = 0.0;

    double at(double speed) const { return coefficient * std::pow(speed, exponent); }
};

/// Leading-order speed dependence of (f_inf, f_tr, Gamma).
struct FrictionLimit {
    PowerLaw f_infty;
    PowerLaw f_tr;
    PowerLaw gamma;

    FrictionDecomposition at(double speed) const {
        return {f_infty.at(speed), f_tr.at(speed), gamma.at(speed), speed};
    }
};

// ---------------------------------------------------------------------------
// Damped partial swap

/// Partial swap whose ancilla leaks into its own environment at rate gamma_A.
struct DampedSwapParams {
    Coupling coupling = FixedCoupling{};
    double leak_rate = 0.0;  // gamma_A, 1/s
    double spacing = 0.0;    // dx, m
    QubitThermalState system;
    QubitThermalState ancilla;

    void validate() const {
        validate_coupling(coupling);
        if (!(leak_rate >= 0.0) || !std::isfinite(leak_rate)) {
            throw InvalidArgument("DampedSwapParams: leak rate must be non-negative");
        }
        if (!(spacing > 0.0) || !std::isfinite(spacing)) {
            throw InvalidArgument("DampedSwapParams: spacing must be positive");
        }
        system.validate();
        ancilla.validate();
    }
};

enum class Damping { underdamped, critical, overdamped };

/// Damping regime at a given speed (J depends on v for scaled couplings).
inline Damping damping_at(const DampedSwapParams& p, double speed) {
    const double j = coupling_rate(p.coupling, speed);
    if (j > p.leak_rate) return Damping::underdamped;
    if (j < p.leak_rate) return Damping::overdamped;
    return Damping::critical;
}

/// Speed at which a velocity-scaled coupling is critically damped, gamma_A / k.
inline double critical_speed(const DampedSwapParams& p) {
    const auto* scaled = std::get_if<VelocityScaledCoupling>(&p.coupling);
    if (!scaled) throw InvalidArgument("critical_speed: needs a velocity-scaled coupling");
    if (scaled->wavenumber == 0.0) return units::infinity;
    return p.leak_rate / scaled->wavenumber;
}

/// omega^2 = J^2 - gamma_A^2 at a given speed; negative when overdamped.
inline double damped_frequency_squared(const DampedSwapParams& p, double speed) {
    const double j = coupling_rate(p.coupling, speed);
    return (j - p.leak_rate) * (j + p.leak_rate);
}

/// Pieces of the damped swap amplitude at interaction time t. The system
/// amplitude u = e^{-gamma t} (cos(omega t) + gamma sin(omega t) / omega),
/// continued analytically through omega^2 <= 0, solves
/// u'' + 2 gamma u' + J^2 u = 0 with u(0) = 1, u'(0) = 0.
///   log_retention = ln |u|                          (phi_S = u^2)
///   scaled_sine   = e^{-gamma t} sin(omega t) / omega  (1 - phi_A = (J scaled_sine)^2)
struct DampedSwapTerms {
    double log_retention = 0.0;
    double scaled_sine = 0.0;
};

inline DampedSwapTerms damped_swap_terms(double coupling, double leak, double t) {
    DampedSwapTerms out;
    const double j2 = coupling * coupling;
    if ((coupling + leak) * t <= 0.5) {
        // Short interaction: Taylor series from the recurrence of the ODE, so
        // u - 1 and the sine term carry no cancellation. Terms are carried
        // with their powers of t: a_n = c_n t^n.
        const double gt = 2.0 * leak * t;
        const double jt2 = j2 * t * t;
        double a0 = 1.0, a1 = 0.0;  // u
        double b0 = 0.0, b1 = t;    // scaled sine
        double u_minus_one = 0.0;
        double sine = t;
        for (int n = 0; n < 60; ++n) {
            const double scale = 1.0 / ((n + 2.0) * (n + 1.0));
            const double a2 = -(gt * (n + 1.0) * a1 + jt2 * a0) * scale;
            const double b2 = -(gt * (n + 1.0) * b1 + jt2 * b0) * scale;
            u_minus_one += a2;
            sine += b2;
            a0 = a1, a1 = a2, b0 = b1, b1 = b2;
            if (n >= 2 && std::abs(a2) <= 1e-20 * std::abs(u_minus_one) &&
                std::abs(b2) <= 1e-20 * std::abs(sine)) {
                break;
            }
        }
        out.log_retention = std::log1p(u_minus_one);
        out.scaled_sine = sine;
        return out;
    }

    const double s = (coupling - leak) * (coupling + leak);
    const double st2 = s * t * t;
    if (s < 0.0 && std::abs(st2) >= 1e-8) {
        // Overdamped: u = e^{-(gamma - g) t} (1 - (gamma - g) / (2 g) expm1(-2 g t)).
        const double g = std::sqrt(-s);
        const double gap = j2 / (leak + g);  // gamma - g
        const double tail = std::expm1(-2.0 * g * t);
        out.log_retention = -gap * t + std::log1p(-0.5 * (gap / g) * tail);
        out.scaled_sine = std::exp(-gap * t) * (-tail) / (2.0 * g);
        return out;
    }
    double cos_minus_one = 0.0;
    double sine = 0.0;
    if (std::abs(st2) < 1e-8) {
        // Near critical damping: series in omega^2 t^2.
        cos_minus_one = -st2 / 2.0 + st2 * st2 / 24.0;
        sine = t * (1.0 - st2 / 6.0 + st2 * st2 / 120.0);
    } else {
        const double w = std::sqrt(s);
        const double half = std::sin(0.5 * w * t);
        cos_minus_one = -2.0 * half * half;
        sine = std::sin(w * t) / w;
    }
    const double x = cos_minus_one + leak * sine;
    const double log_amplitude = std::abs(x) < 0.5 ? std::log1p(x) : std::log(std::abs(1.0 + x));
    out.log_retention = log_amplitude - leak * t;
    out.scaled_sine = std::exp(-leak * t) * sine;
    return out;
}

/// phi_S and phi_A of one interaction, together with their complements and
/// ln phi_S, evaluated stably.
struct DampedSwapRetention {
    double system = 1.0;
    double ancilla = 1.0;
    double system_complement = 0.0;
    double ancilla_complement = 0.0;
    double system_log = 0.0;
};

namespace detail {

inline double speed_from_duration(const DampedSwapParams& p, double dt) { return p.spacing / dt; }

inline DampedSwapRetention damped_swap_retention_at(double coupling, double leak, double dt) {
    DampedSwapRetention r;
    if (dt == 0.0) return r;
    const DampedSwapTerms terms = damped_swap_terms(coupling, leak, dt);
    r.system_log = 2.0 * terms.log_retention;
    r.system = std::exp(r.system_log);
    r.system_complement = -std::expm1(r.system_log);
    const double amp = coupling * terms.scaled_sine;
    r.ancilla_complement = amp * amp;
    r.ancilla = 1.0 - r.ancilla_complement;
    return r;
}

}  // namespace detail

/// Retention functions of the damped swap for interaction time dt = dx / v.
inline DampedSwapRetention damped_swap_retentions(const DampedSwapParams& p, double dt) {
    p.validate();
    if (!(dt >= 0.0)) throw InvalidArgument("damped_swap_retentions: dt must be non-negative");
    if (dt == 0.0) return {};
    const double j = coupling_rate(p.coupling, detail::speed_from_duration(p, dt));
    return detail::damped_swap_retention_at(j, p.leak_rate, dt);
}

/// Closed-form friction of the damped swap. Entirely transient: f_inf = 0.
inline FrictionDecomposition damped_swap_friction(const DampedSwapParams& p, double speed) {
    p.validate();
    if (!(speed > 0.0)) throw InvalidArgument("damped_swap_friction: speed must be positive");
    const double dx = p.spacing;
    const double dt = dx / speed;
    const double j = coupling_rate(p.coupling, speed);
    const double g = p.leak_rate;
    const DampedSwapTerms terms = damped_swap_terms(j, g, dt);

    // hbar w_S (1 - phi_S) - hbar w_A (J^2 / w^2) e^{-2 g dt} sin^2(w dt)
    const double system_step = -std::expm1(2.0 * terms.log_retention);
    const double ancilla_step = (j * terms.scaled_sine) * (j * terms.scaled_sine);
    const double bracket = units::hbar * p.system.omega * system_step -
                           units::hbar * p.ancilla.omega * ancilla_step;

    FrictionDecomposition out;
    out.velocity = speed;
    out.f_infty = 0.0;
    out.f_tr = bracket * (p.ancilla.polarization - p.system.polarization) / dx;
    out.gamma = std::isinf(terms.log_retention) ? units::infinity
                                                 : -2.0 * speed / dx * terms.log_retention;
    if (out.gamma == 0.0) out.gamma = 0.0;
    return out;
}

/// Speeds that bound the asymptotic regimes: the large-v expansions hold well
/// above `large`, the small-v limits well below `small`.
struct CharacteristicSpeeds {
    double large = 0.0;
    double small = 0.0;
};

inline CharacteristicSpeeds characteristic_speeds(const DampedSwapParams& p) {
    p.validate();
    const double g = p.leak_rate;
    const double dx = p.spacing;
    const double ws = p.system.omega;
    const double wa = p.ancilla.omega;
    // The leading f_tr term is proportional to the gap difference while the
    // corrections scale with the gaps themselves.
    const double sum = std::abs(ws) + std::abs(wa);
    const double diff = std::abs(ws - wa);
    const double gap_ratio = sum == 0.0 ? 1.0 : (diff == 0.0 ? units::infinity : std::max(1.0, sum / diff));

    if (const auto* f = std::get_if<FixedCoupling>(&p.coupling)) {
        const double j = f->rate;
        if (!(g > 0.0)) return {dx * j, 0.0};
        // Gamma relaxes like ln(g t) / (g t) near critical damping.
        const double w = std::sqrt(std::abs((j - g) * (j + g)));
        const double log_factor = 1.0 + std::log1p(g / std::max(w, 1e-3 * g));
        return {dx * std::max(j, 4.0 * g * gap_ratio), dx * std::min(g, j * j / g) / log_factor};
    }
    const double k = std::get<VelocityScaledCoupling>(p.coupling).wavenumber;
    if (k == 0.0) return {dx * g, units::infinity};
    const double theta = k * dx;
    const double s2 = std::pow(std::sin(theta), 2);
    const double log_cos = std::abs(std::log(std::abs(std::cos(theta))));
    // Without leakage J dt = k dx exactly and the large-speed form holds everywhere.
    if (!(g > 0.0)) return {0.0, 0.0};
    const double gamma_term = 2.0 * (1.0 + std::abs(std::tan(theta)) / theta) / log_cos;
    const double large = std::max(g / k, g * dx * std::max(4.0 * gap_ratio / s2, gamma_term));
    const double leak_ratio = wa == 0.0 ? 1.0 : std::min(1.0, std::abs(ws / wa));
    // Three first-order corrections of comparable size add up below this speed.
    return {large, 0.5 * std::min({g / k, g / (k * theta), g * dx * leak_ratio})};
}

/// Leading behaviour of the damped swap deep in a speed regime.
inline FrictionLimit damped_swap_limits(const DampedSwapParams& p, SpeedRegime regime) {
    p.validate();
    const double dx = p.spacing;
    const double g = p.leak_rate;
    const double hbar = units::hbar;
    const double da = p.ancilla.polarization - p.system.polarization;
    const double dw = p.system.omega - p.ancilla.omega;
    FrictionLimit out;

    if (const auto* f = std::get_if<FixedCoupling>(&p.coupling)) {
        const double j = f->rate;
        if (regime == SpeedRegime::large_v) {
            out.f_tr = {hbar * j * j * dx * dw * da, -2.0};
            out.gamma = {j * j * dx, -1.0};
            return out;
        }
        if (!(g > 0.0)) {
            throw InvalidArgument(
                "damped_swap_limits: without leakage the small-speed friction oscillates and has "
                "no limit");
        }
        out.f_tr = {hbar * p.system.omega * da / dx, 0.0};
        const double gamma0 = g <= j ? 2.0 * g : 2.0 * g - 2.0 * std::sqrt((g - j) * (g + j));
        out.gamma = {gamma0, 0.0};
        return out;
    }

    const double k = std::get<VelocityScaledCoupling>(p.coupling).wavenumber;
    if (regime == SpeedRegime::large_v) {
        const double sin_kdx = std::sin(k * dx);
        const double cos_kdx = std::cos(k * dx);
        out.f_tr = {hbar * sin_kdx * sin_kdx * dw * da / dx, 0.0};
        out.gamma = {cos_kdx == 0.0 ? units::infinity : -2.0 * std::log(std::abs(cos_kdx)) / dx,
                     1.0};
        return out;
    }
    if (!(g > 0.0)) {
        throw InvalidArgument(
            "damped_swap_limits: the small-speed limit of a velocity-scaled coupling needs "
            "gamma_A > 0 (overdamped branch)");
    }
    out.f_tr = {k * k * hbar * p.system.omega * da / g, 1.0};
    out.gamma = {k * k / g, 2.0};
    return out;
}

/// The damped swap as a convex model: the system is driven to the ancilla's
/// initial state, and the n-th ancilla toward the system's current state.
inline ConvexModelSpec build_convex_spec(const DampedSwapParams& p) {
    p.validate();
    auto retention = [p](double dt) {
        if (!(dt > 0.0)) return DampedSwapRetention{};
        const double j = coupling_rate(p.coupling, p.spacing / dt);
        return detail::damped_swap_retention_at(j, p.leak_rate, dt);
    };
    convex::RetentionProfile system_profile(
        [retention](double dt) { return retention(dt).system; },
        [retention](double dt) { return retention(dt).system_complement; },
        [retention](double dt) { return retention(dt).system_log; });
    convex::RetentionProfile ancilla_profile(
        [retention](double dt) { return retention(dt).ancilla; },
        [retention](double dt) { return retention(dt).ancilla_complement; });

    const auto rho_s = p.system.to_density_matrix();
    const auto rho_a = p.ancilla.to_density_matrix();
    convex::ConvexStates states{rho_s,
                                rho_a,
                                rho_a,
                                rho_s,
                                rho_a,
                                p.system.hamiltonian(),
                                p.ancilla.hamiltonian()};
    return ConvexModelSpec::from_states(std::move(system_profile), std::move(ancilla_profile),
                                        std::move(states), p.spacing);
}

// ---------------------------------------------------------------------------
// Entangle-disentangle

/// System and ancilla repeatedly entangle and disentangle; both reduced states
/// move toward the maximally mixed state. Only energies enter the friction.
struct EntangleDisentangleParams {
    Coupling coupling = FixedCoupling{};
    double epsilon = 0.0;                  // floor of the retention, in [0, 1]
    double spacing = 0.0;                  // m
    double system_initial_energy = 0.0;    // J
    double system_target_energy = 0.0;     // J, maximally mixed
    double ancilla_initial_energy = 0.0;   // J
    double ancilla_target_energy = 0.0;    // J, maximally mixed

    void validate() const {
        validate_coupling(coupling);
        if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
            throw InvalidArgument("EntangleDisentangleParams: epsilon must lie in [0, 1]");
        }
        if (!(spacing > 0.0) || !std::isfinite(spacing)) {
            throw InvalidArgument("EntangleDisentangleParams: spacing must be positive");
        }
    }
};

/// Energy of the maximally mixed state, Tr(H) / D.
inline double maximally_mixed_energy(const quantum::HermitianOperator& h) {
    return h.matrix().trace().real() / static_cast<double>(h.dim());
}

struct EntangleDisentangleRetention {
    double value = 1.0;       // phi_S = phi_A
    double complement = 0.0;  // (1 - eps) sin^2(J dt)
    double log = 0.0;
};

namespace detail {

inline double ed_angle(const EntangleDisentangleParams& p, double dt) {
    if (const auto* f = std::get_if<FixedCoupling>(&p.coupling)) return f->rate * dt;
    // J dt = k v dt = k dx
    return std::get<VelocityScaledCoupling>(p.coupling).wavenumber * p.spacing;
}

inline EntangleDisentangleRetention ed_retention_at(const EntangleDisentangleParams& p,
                                                    double dt) {
    EntangleDisentangleRetention r;
    if (dt == 0.0 && !is_velocity_scaled(p.coupling)) return r;
    const double s = std::sin(ed_angle(p, dt));
    r.complement = (1.0 - p.epsilon) * s * s;
    r.value = 1.0 - r.complement;
    r.log = r.complement >= 1.0 ? -units::infinity : std::log1p(-r.complement);
    return r;
}

}  // namespace detail

/// phi_S = phi_A = eps + (1 - eps) cos^2(J dt).
inline EntangleDisentangleRetention ed_retentions(const EntangleDisentangleParams& p, double dt) {
    p.validate();
    if (!(dt >= 0.0)) throw InvalidArgument("ed_retentions: dt must be non-negative");
    return detail::ed_retention_at(p, dt);
}

/// Closed-form friction of the entangle-disentangle model.
inline FrictionDecomposition ed_friction(const EntangleDisentangleParams& p, double speed) {
    p.validate();
    if (!(speed > 0.0)) throw InvalidArgument("ed_friction: speed must be positive");
    const double dx = p.spacing;
    const double angle = is_velocity_scaled(p.coupling)
                             ? std::get<VelocityScaledCoupling>(p.coupling).wavenumber * dx
                             : std::get<FixedCoupling>(p.coupling).rate * dx / speed;
    const double s = std::sin(angle);
    const double weight = (1.0 - p.epsilon) * s * s;

    FrictionDecomposition out;
    out.velocity = speed;
    out.f_infty = weight * (p.ancilla_target_energy - p.ancilla_initial_energy) / dx;
    out.f_tr = weight * (p.system_target_energy - p.system_initial_energy) / dx;
    out.gamma = weight >= 1.0 ? units::infinity : -(speed / dx) * std::log1p(-weight);
    if (out.gamma == 0.0) out.gamma = 0.0;
    return out;
}

/// Leading behaviour of the entangle-disentangle friction. With a fixed
/// coupling only the large-speed expansion exists (the small-speed friction
/// oscillates as sin^2(1/v)); with J = k v both regimes are exact.
inline FrictionLimit ed_limits(const EntangleDisentangleParams& p, SpeedRegime regime) {
    p.validate();
    const double dx = p.spacing;
    const double de_a = p.ancilla_target_energy - p.ancilla_initial_energy;
    const double de_s = p.system_target_energy - p.system_initial_energy;
    FrictionLimit out;
    if (const auto* f = std::get_if<FixedCoupling>(&p.coupling)) {
        if (regime == SpeedRegime::small_v) {
            throw InvalidArgument("ed_limits: fixed-coupling friction has no small-speed limit");
        }
        const double c = (1.0 - p.epsilon) * f->rate * f->rate * dx * dx;
        out.f_infty = {c * de_a / dx, -2.0};
        out.f_tr = {c * de_s / dx, -2.0};
        out.gamma = {(1.0 - p.epsilon) * f->rate * f->rate * dx, -1.0};
        return out;
    }
    const double k = std::get<VelocityScaledCoupling>(p.coupling).wavenumber;
    const double s = std::sin(k * dx);
    const double weight = (1.0 - p.epsilon) * s * s;
    out.f_infty = {weight * de_a / dx, 0.0};
    out.f_tr = {weight * de_s / dx, 0.0};
    out.gamma = {weight >= 1.0 ? units::infinity : -std::log1p(-weight) / dx, 1.0};
    return out;
}

/// The entangle-disentangle model as a convex model built from its energies.
inline ConvexModelSpec build_convex_spec(const EntangleDisentangleParams& p) {
    p.validate();
    auto retention = [p](double dt) { return detail::ed_retention_at(p, dt); };
    auto make_profile = [&retention]() {
        return convex::RetentionProfile(
            [retention](double dt) { return retention(dt).value; },
            [retention](double dt) { return retention(dt).complement; },
            [retention](double dt) { return retention(dt).log; });
    };
    convex::ConvexEnergies energies{p.system_initial_energy, p.system_target_energy,
                                    p.ancilla_initial_energy, p.ancilla_target_energy,
                                    p.ancilla_target_energy};
    return ConvexModelSpec::from_energies(make_profile(), make_profile(), energies, p.spacing);
}

}  // namespace collfric::models
