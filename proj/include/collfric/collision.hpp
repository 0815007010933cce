// collision.hpp: generic collision-model engine.
//
// A system dragged at speed v meets a fresh ancilla every dt = dx / v. Each
// meeting conjugates rho_S (x) rho_A(0) by a joint unitary; the local energy
// changes of both parties fix the work done by the dragging agent and hence
// the friction f_n = (dE_S + dE_A) / dx.

#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "collfric/error.hpp"
#include "collfric/quantum.hpp"
#include "collfric/units.hpp"

namespace collfric::collision {

using quantum::DensityMatrix;
using quantum::HermitianOperator;
using quantum::Index;
using quantum::Matrix;
using quantum::Unitary;

/// How the joint Hamiltonian depends on the speed.
///  - fixed: U(dt) = exp(-i H dt / hbar), H independent of v.
///  - velocity_scaled: H = v * H0 (H0 read in J s/m), so U = exp(-i H0 dx / hbar)
///    no longer tends to the identity as v grows.
enum class CouplingMode { fixed, velocity_scaled };

/// Which terms generate the joint unitary. Local Hamiltonians always define
/// the energies; `interaction_only` drops them from the generator, which is
/// the rotating frame in which a swap coupling stays a pure partial swap for
/// unequal gaps.
enum class Generator { full, interaction_only };

class CollisionSpec {
public:
    CollisionSpec(HermitianOperator system_hamiltonian, HermitianOperator ancilla_hamiltonian,
                  HermitianOperator interaction, DensityMatrix ancilla_initial, double spacing,
                  CouplingMode mode = CouplingMode::fixed, Generator generator = Generator::full)
        : system_hamiltonian_(std::move(system_hamiltonian)),
          ancilla_hamiltonian_(std::move(ancilla_hamiltonian)),
          interaction_(std::move(interaction)),
          ancilla_initial_(std::move(ancilla_initial)),
          spacing_(spacing),
          mode_(mode),
          generator_kind_(generator) {
        if (interaction_.dim() != system_dim() * ancilla_dim()) {
            throw InvalidArgument("CollisionSpec: interaction must act on the joint space");
        }
        if (ancilla_initial_.dim() != ancilla_dim()) {
            throw InvalidArgument("CollisionSpec: ancilla state does not match its Hamiltonian");
        }
        if (!(spacing_ > 0.0) || !std::isfinite(spacing_)) {
            throw InvalidArgument("CollisionSpec: spacing must be positive");
        }
    }

    const HermitianOperator& system_hamiltonian() const { return system_hamiltonian_; }
    const HermitianOperator& ancilla_hamiltonian() const { return ancilla_hamiltonian_; }
    const HermitianOperator& interaction() const { return interaction_; }
    const DensityMatrix& ancilla_initial() const { return ancilla_initial_; }
    double spacing() const { return spacing_; }
    CouplingMode coupling_mode() const { return mode_; }
    Generator generator_kind() const { return generator_kind_; }
    Index system_dim() const { return system_hamiltonian_.dim(); }
    Index ancilla_dim() const { return ancilla_hamiltonian_.dim(); }

    /// H_S (x) 1 + 1 (x) H_A on the joint space.
    HermitianOperator local_part() const {
        return HermitianOperator(
            quantum::kron(system_hamiltonian_.matrix(), quantum::identity_matrix(ancilla_dim())) +
            quantum::kron(quantum::identity_matrix(system_dim()), ancilla_hamiltonian_.matrix()));
    }

    /// The operator exponentiated to build U(dt).
    HermitianOperator generator() const {
        if (generator_kind_ == Generator::interaction_only) return interaction_;
        return local_part() + interaction_;
    }

    /// Joint unitary of one interaction at speed v.
    Unitary unitary(double speed) const {
        if (!(speed > 0.0)) throw InvalidArgument("collision: speed must be positive");
        // velocity_scaled: (v H0) * (dx / v) = H0 * dx, numerically.
        const double tau = mode_ == CouplingMode::fixed ? spacing_ / speed : spacing_;
        return quantum::propagator(generator(), tau);
    }

private:
    HermitianOperator system_hamiltonian_;
    HermitianOperator ancilla_hamiltonian_;
    HermitianOperator interaction_;
    DensityMatrix ancilla_initial_;
    double spacing_;
    CouplingMode mode_;
    Generator generator_kind_;
};

/// Energy and friction bookkeeping of a single interaction.
struct InteractionRecord {
    std::size_t index = 0;
    double delta_energy_system = 0.0;   // J
    double delta_energy_ancilla = 0.0;  // J
    double work = 0.0;                  // J, dE_S + dE_A + dW = 0
    double friction = 0.0;              // N, -dW / dx
    DensityMatrix system_state_after;
    DensityMatrix ancilla_state_after;
};

namespace detail {

inline InteractionRecord collide(const CollisionSpec& spec, const Unitary& u,
                                 const DensityMatrix& system_state, std::size_t index) {
    if (system_state.dim() != spec.system_dim()) {
        throw InvalidArgument("collision: system state does not match its Hamiltonian");
    }
    const Index ds = spec.system_dim();
    const Index da = spec.ancilla_dim();
    const DensityMatrix joint = quantum::tensor_product(system_state, spec.ancilla_initial());
    const DensityMatrix stepped = quantum::evolve(u, joint);
    // The propagator leaks ~1e-16 of trace per step; over long trajectories that
    // would accumulate past the state tolerance.
    const DensityMatrix evolved(stepped.matrix() / stepped.matrix().trace().real());
    DensityMatrix system_after = quantum::partial_trace(evolved, quantum::Subsystem::first, ds, da);
    DensityMatrix ancilla_after =
        quantum::partial_trace(evolved, quantum::Subsystem::second, ds, da);

    const double de_s = quantum::expectation(spec.system_hamiltonian(), system_after) -
                        quantum::expectation(spec.system_hamiltonian(), system_state);
    const double de_a = quantum::expectation(spec.ancilla_hamiltonian(), ancilla_after) -
                        quantum::expectation(spec.ancilla_hamiltonian(), spec.ancilla_initial());
    const double work = -(de_s + de_a);
    return InteractionRecord{index,
                             de_s,
                             de_a,
                             work,
                             -work / spec.spacing(),
                             std::move(system_after),
                             std::move(ancilla_after)};
}

}  // namespace detail

/// One interaction of the system (state `system_state`) with a fresh ancilla.
inline InteractionRecord collide_once(const CollisionSpec& spec, const DensityMatrix& system_state,
                                      double speed) {
    return detail::collide(spec, spec.unitary(speed), system_state, 0);
}

/// N successive interactions; the system state is threaded, ancillas are fresh.
inline std::vector<InteractionRecord> run_trajectory(const CollisionSpec& spec,
                                                     const DensityMatrix& initial_system,
                                                     double speed, std::size_t count) {
    if (count < 1) throw InvalidArgument("run_trajectory: need at least one interaction");
    const Unitary u = spec.unitary(speed);
    std::vector<InteractionRecord> records;
    records.reserve(count);
    DensityMatrix state = initial_system;
    for (std::size_t n = 0; n < count; ++n) {
        records.push_back(detail::collide(spec, u, state, n));
        state = records.back().system_state_after;
    }
    return records;
}

/// lim_{v -> inf} v f_n = < (i / hbar) [H_SA, H_S + H_A] > evaluated on the
/// uncorrelated product rho_S (x) rho_A(0). Units: watts (N m/s).
inline double zeno_leading_coefficient(const CollisionSpec& spec,
                                       const DensityMatrix& system_state) {
    if (spec.coupling_mode() != CouplingMode::fixed) {
        throw InvalidArgument(
            "zeno_leading_coefficient: velocity-scaled couplings violate the short-time "
            "regularity the expansion relies on");
    }
    const DensityMatrix joint = quantum::tensor_product(system_state, spec.ancilla_initial());
    const Matrix& coupling = spec.interaction().matrix();
    const Matrix local = spec.local_part().matrix();
    const Matrix commutator = coupling * local - local * coupling;
    const quantum::Complex value =
        (quantum::Complex(0.0, 1.0 / units::hbar) * commutator * joint.matrix()).trace();
    const double scale = quantum::detail::max_abs(commutator) / units::hbar;
    if (std::abs(value.imag()) > 1e-10 * std::max(scale, 1e-300)) {
        throw InvariantViolation("zeno_leading_coefficient: expectation is not real");
    }
    return value.real();
}

/// Speed above which each crossing of a region of size r with interaction
/// energy E is perturbatively short: 2 r E / hbar.
inline double zeno_critical_speed(double radius, double energy) {
    if (!(radius > 0.0)) throw InvalidArgument("zeno_critical_speed: radius must be positive");
    if (!(energy >= 0.0)) throw InvalidArgument("zeno_critical_speed: energy must be non-negative");
    return 2.0 * radius * energy / units::hbar;
}

/// Zeno critical speed of a spec: interaction length dx, energy ||generator||.
inline double zeno_speed(const CollisionSpec& spec) {
    return zeno_critical_speed(spec.spacing(), spec.generator().spectral_norm());
}

}  // namespace collfric::collision
