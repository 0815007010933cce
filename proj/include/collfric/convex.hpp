// convex.hpp: one-dimensional convex collision models.
//
// Each interaction moves the system a fraction 1 - phi_S(dt) of the way to a
// fixed target, and moves the fresh ancilla a fraction 1 - phi_A(dt) toward a
// target that depends linearly on the current system state. The friction then
// splits exactly into a permanent part f_inf and a transient part f_tr that
// decays geometrically, by phi_S(dt) per interaction:
//
//     f_n = f_inf + f_tr * phi_S(dt)^n = f_inf + f_tr * exp(-Gamma n dt),
//     Gamma = -ln(phi_S(dt)) / dt.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "collfric/error.hpp"
#include "collfric/quantum.hpp"
#include "collfric/units.hpp"

namespace collfric::convex {

using quantum::DensityMatrix;
using quantum::HermitianOperator;

/// Roundoff allowance on retention values before they count as out of range.
inline constexpr double kRetentionSlack = 1e-12;

/// Clamps values within kRetentionSlack of [0, 1]; anything further out is an error.
inline double checked_retention(double value) {
    if (!(value >= -kRetentionSlack && value <= 1.0 + kRetentionSlack)) {
        throw InvalidArgument("retention value outside [0, 1]");
    }
    return std::clamp(value, 0.0, 1.0);
}

/// Retention function dt -> phi(dt) in [0, 1].
///
/// Closed-form descriptors may also supply 1 - phi and ln(phi) directly; the
/// decomposition then avoids the cancellation of 1 - phi near phi = 1 and the
/// underflow of phi itself at long interaction times.
class RetentionProfile {
public:
    using Function = std::function<double(double)>;

    explicit RetentionProfile(Function value, Function complement = {}, Function log_value = {})
        : value_(std::move(value)),
          complement_(std::move(complement)),
          log_value_(std::move(log_value)) {
        if (!value_) throw InvalidArgument("RetentionProfile: value function required");
    }

    /// A profile that ignores dt.
    static RetentionProfile constant(double phi) {
        checked_retention(phi);
        return RetentionProfile([phi](double) { return phi; });
    }

    double operator()(double dt) const { return checked_retention(value_(dt)); }

    /// 1 - phi(dt).
    double complement(double dt) const {
        if (complement_) return checked_retention(complement_(dt));
        return 1.0 - (*this)(dt);
    }

    /// ln phi(dt); -inf where phi vanishes.
    double log(double dt) const {
        if (log_value_) {
            const double l = log_value_(dt);
            if (l > kRetentionSlack) throw InvalidArgument("retention log above 0");
            return std::min(l, 0.0);
        }
        return std::log((*this)(dt));
    }

    /// phi(dt)^n, through the log form when one is available.
    double power(double dt, std::size_t n) const {
        if (n == 0) return 1.0;
        if (log_value_) return std::exp(static_cast<double>(n) * log(dt));
        return std::pow((*this)(dt), static_cast<double>(n));
    }

private:
    Function value_;
    Function complement_;
    Function log_value_;
};

/// Local energies that fully determine the friction of a convex model (J).
struct ConvexEnergies {
    double system_initial = 0.0;           // E_S(0)
    double system_target = 0.0;            // E_S,target
    double ancilla_initial = 0.0;          // E_A(0)
    double ancilla_target_first = 0.0;     // E_A,target,0
    double ancilla_target_limit = 0.0;     // E_A,target,inf
};

/// Endpoint states and local Hamiltonians of a convex model.
struct ConvexStates {
    DensityMatrix system_initial;
    DensityMatrix system_target;
    DensityMatrix ancilla_initial;
    DensityMatrix ancilla_target_first;  // target of the n = 0 ancilla
    DensityMatrix ancilla_target_limit;  // target as n -> inf
    HermitianOperator system_hamiltonian;
    HermitianOperator ancilla_hamiltonian;

    ConvexEnergies energies() const {
        return {quantum::expectation(system_hamiltonian, system_initial),
                quantum::expectation(system_hamiltonian, system_target),
                quantum::expectation(ancilla_hamiltonian, ancilla_initial),
                quantum::expectation(ancilla_hamiltonian, ancilla_target_first),
                quantum::expectation(ancilla_hamiltonian, ancilla_target_limit)};
    }
};

class ConvexModelSpec {
public:
    static ConvexModelSpec from_states(RetentionProfile system_retention,
                                       RetentionProfile ancilla_retention, ConvexStates states,
                                       double spacing) {
        const auto ds = states.system_hamiltonian.dim();
        const auto da = states.ancilla_hamiltonian.dim();
        if (states.system_initial.dim() != ds || states.system_target.dim() != ds ||
            states.ancilla_initial.dim() != da || states.ancilla_target_first.dim() != da ||
            states.ancilla_target_limit.dim() != da) {
            throw InvalidArgument("ConvexModelSpec: state and Hamiltonian dimensions differ");
        }
        ConvexEnergies energies = states.energies();
        return ConvexModelSpec(std::move(system_retention), std::move(ancilla_retention),
                               energies, std::move(states), spacing);
    }

    static ConvexModelSpec from_energies(RetentionProfile system_retention,
                                         RetentionProfile ancilla_retention,
                                         ConvexEnergies energies, double spacing) {
        return ConvexModelSpec(std::move(system_retention), std::move(ancilla_retention),
                               energies, std::nullopt, spacing);
    }

    const RetentionProfile& system_retention() const { return system_retention_; }
    const RetentionProfile& ancilla_retention() const { return ancilla_retention_; }
    const ConvexEnergies& energies() const { return energies_; }
    double spacing() const { return spacing_; }
    bool has_states() const { return states_.has_value(); }

    const ConvexStates& states() const {
        if (!states_) throw InvalidArgument("ConvexModelSpec: built from energies only");
        return *states_;
    }

private:
    ConvexModelSpec(RetentionProfile system_retention, RetentionProfile ancilla_retention,
                    ConvexEnergies energies, std::optional<ConvexStates> states, double spacing)
        : system_retention_(std::move(system_retention)),
          ancilla_retention_(std::move(ancilla_retention)),
          energies_(energies),
          states_(std::move(states)),
          spacing_(spacing) {
        if (!(spacing_ > 0.0) || !std::isfinite(spacing_)) {
            throw InvalidArgument("ConvexModelSpec: spacing must be positive");
        }
        for (double e : {energies_.system_initial, energies_.system_target,
                         energies_.ancilla_initial, energies_.ancilla_target_first,
                         energies_.ancilla_target_limit}) {
            if (!std::isfinite(e)) throw InvalidArgument("ConvexModelSpec: non-finite energy");
        }
    }

    RetentionProfile system_retention_;
    RetentionProfile ancilla_retention_;
    ConvexEnergies energies_;
    std::optional<ConvexStates> states_;
    double spacing_;
};

/// (f_inf, f_tr, Gamma) at one speed. Gamma may be +inf.
struct FrictionDecomposition {
    double f_infty = 0.0;   // N
    double f_tr = 0.0;      // N
    double gamma = 0.0;     // 1/s
    double velocity = 0.0;  // m/s

    /// Interpolated friction f_inf + f_tr exp(-Gamma t).
    double at_time(double t) const {
        if (t == 0.0) return f_infty + f_tr;
        if (std::isinf(gamma)) return f_infty;
        return f_infty + f_tr * std::exp(-gamma * t);
    }
};

/// Velocity-independent bounds on |f_inf| and |f_tr|.
struct FrictionBounds {
    double f_infty = 0.0;
    double f_tr = 0.0;
};

inline FrictionBounds friction_bounds(const ConvexEnergies& e, double spacing) {
    return {std::abs(e.ancilla_target_limit - e.ancilla_initial) / spacing,
            std::abs(e.system_target - e.system_initial) / spacing +
                std::abs(e.ancilla_target_first - e.ancilla_target_limit) / spacing};
}

inline FrictionBounds friction_bounds(const ConvexModelSpec& spec) {
    return friction_bounds(spec.energies(), spec.spacing());
}

/// Gamma = -ln(phi) / dt; phi = 0 gives +inf.
inline double decay_rate(double retention, double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("decay_rate: dt must be positive");
    const double phi = checked_retention(retention);
    if (phi == 0.0) return units::infinity;
    const double gamma = -std::log(phi) / dt;
    return gamma == 0.0 ? 0.0 : gamma;
}

namespace detail {

inline double decay_rate_from_log(double log_phi, double dt) {
    if (std::isinf(log_phi)) return units::infinity;
    const double gamma = -log_phi / dt;
    return gamma == 0.0 ? 0.0 : gamma;
}

inline double profile_decay_rate(const RetentionProfile& profile, double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("decay_rate: dt must be positive");
    return decay_rate_from_log(profile.log(dt), dt);
}

inline double interpolation_weight(double gamma, double t) {
    if (t == 0.0) return 1.0;
    if (std::isinf(gamma)) return 0.0;
    return std::exp(-gamma * t);
}

}  // namespace detail

/// rho_S(n dt) = phi^n rho_S(0) + (1 - phi^n) rho_S,target.
inline DensityMatrix system_state_at(const ConvexModelSpec& spec, double dt, std::size_t n) {
    const ConvexStates& s = spec.states();
    if (n == 0) return s.system_initial;
    const double weight = spec.system_retention().power(dt, n);
    return DensityMatrix::mix(weight, s.system_initial, s.system_target);
}

/// Exponential interpolation through the lattice states; exact at t = n dt.
inline DensityMatrix interpolated_state(const ConvexModelSpec& spec, double dt, double t) {
    if (!(t >= 0.0)) throw InvalidArgument("interpolated_state: t must be non-negative");
    const double gamma = detail::profile_decay_rate(spec.system_retention(), dt);
    const ConvexStates& s = spec.states();
    return DensityMatrix::mix(detail::interpolation_weight(gamma, t), s.system_initial,
                              s.system_target);
}

/// Target of the n-th ancilla: phi_S^n rho_A,target,0 + (1 - phi_S^n) rho_A,target,inf.
inline DensityMatrix ancilla_target_at(const ConvexModelSpec& spec, double dt, std::size_t n) {
    const ConvexStates& s = spec.states();
    const double weight = spec.system_retention().power(dt, n);
    return DensityMatrix::mix(weight, s.ancilla_target_first, s.ancilla_target_limit);
}

inline FrictionDecomposition friction_decomposition(const ConvexModelSpec& spec, double speed) {
    if (!(speed > 0.0)) throw InvalidArgument("friction_decomposition: speed must be positive");
    const double dx = spec.spacing();
    const double dt = dx / speed;
    const ConvexEnergies& e = spec.energies();
    const double step_s = spec.system_retention().complement(dt);
    const double step_a = spec.ancilla_retention().complement(dt);

    FrictionDecomposition out;
    out.velocity = speed;
    out.f_infty = step_a * (e.ancilla_target_limit - e.ancilla_initial) / dx;
    out.f_tr = step_s * (e.system_target - e.system_initial) / dx +
               step_a * (e.ancilla_target_first - e.ancilla_target_limit) / dx;
    out.gamma = detail::profile_decay_rate(spec.system_retention(), dt);
    return out;
}

/// Friction averaged over the n-th interaction.
inline double friction_at(const ConvexModelSpec& spec, double speed, std::size_t n) {
    const FrictionDecomposition d = friction_decomposition(spec, speed);
    return d.f_infty + d.f_tr * spec.system_retention().power(spec.spacing() / speed, n);
}

// Leading-order behaviour in the four asymptotic regimes. Each alternative
// holds exactly the coefficients of its regime.

/// phi(dt) = 1 - dt * phi_1 + O(dt^2): Zeno friction ~ 1/v as v -> inf.
struct RegularLargeV {
    double system_rate = 0.0;   // phi_S,1 (1/s)
    double ancilla_rate = 0.0;  // phi_A,1 (1/s)
};

/// phi(dt -> 0) = 1 - F: friction tends to a constant as v -> inf.
struct JumpLargeV {
    double system_jump = 0.0;   // F_S
    double ancilla_jump = 0.0;  // F_A
};

/// phi(dt -> inf) = 1 - f: friction tends to a constant as v -> 0.
struct SaturatingSmallV {
    double system_limit = 0.0;   // f_S
    double ancilla_limit = 0.0;  // f_A
};

/// phi(dt) = 1 - dt^-p * phi_p for large dt: friction ~ v^p as v -> 0.
struct PolynomialSmallV {
    double system_coefficient = 0.0;   // phi_S,p (s^p)
    double ancilla_coefficient = 0.0;  // phi_A,p (s^p)
    double exponent = 1.0;             // p > 0
};

using AsymptoticCoefficients =
    std::variant<RegularLargeV, JumpLargeV, SaturatingSmallV, PolynomialSmallV>;

namespace detail {

inline void require_fraction(double value, const char* what) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw InvalidArgument(std::string("asymptotics: ") + what + " must lie in [0, 1]");
    }
}

}  // namespace detail

/// Leading-order (f_inf, f_tr, Gamma) of the regime described by `coefficients`.
inline FrictionDecomposition asymptotics(const AsymptoticCoefficients& coefficients,
                                         const ConvexEnergies& e, double spacing, double speed) {
    if (!(speed > 0.0) || !(spacing > 0.0)) {
        throw InvalidArgument("asymptotics: speed and spacing must be positive");
    }
    const double d_a_limit = e.ancilla_target_limit - e.ancilla_initial;
    const double d_s = e.system_target - e.system_initial;
    const double d_a_shift = e.ancilla_target_first - e.ancilla_target_limit;

    FrictionDecomposition out;
    out.velocity = speed;
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, RegularLargeV>) {
                out.f_infty = d_a_limit * c.ancilla_rate / speed;
                out.f_tr = (d_s * c.system_rate + d_a_shift * c.ancilla_rate) / speed;
                out.gamma = c.system_rate;
            } else if constexpr (std::is_same_v<T, JumpLargeV>) {
                detail::require_fraction(c.system_jump, "F_S");
                detail::require_fraction(c.ancilla_jump, "F_A");
                out.f_infty = d_a_limit * c.ancilla_jump / spacing;
                out.f_tr = (d_s * c.system_jump + d_a_shift * c.ancilla_jump) / spacing;
                out.gamma = c.system_jump == 1.0
                                ? units::infinity
                                : -std::log1p(-c.system_jump) * speed / spacing;
            } else if constexpr (std::is_same_v<T, SaturatingSmallV>) {
                detail::require_fraction(c.system_limit, "f_S");
                detail::require_fraction(c.ancilla_limit, "f_A");
                out.f_infty = d_a_limit * c.ancilla_limit / spacing;
                out.f_tr = (d_s * c.system_limit + d_a_shift * c.ancilla_limit) / spacing;
                out.gamma = 0.0;
            } else {
                if (!(c.exponent > 0.0)) throw InvalidArgument("asymptotics: p must be positive");
                const double scale = std::pow(speed, c.exponent) / std::pow(spacing, c.exponent + 1);
                out.f_infty = d_a_limit * c.ancilla_coefficient * scale;
                out.f_tr = (d_s * c.system_coefficient + d_a_shift * c.ancilla_coefficient) * scale;
                out.gamma = c.system_coefficient * scale * speed;
            }
        },
        coefficients);
    return out;
}

}  // namespace collfric::convex
