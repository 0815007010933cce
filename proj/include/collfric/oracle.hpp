// oracle.hpp: brute-force reference computations.
//
// Everything here works from joint unitaries and partial traces only. The
// analytic modules are consulted in compare_convex_vs_brute, never to produce
// the reference numbers themselves.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "collfric/collision.hpp"
#include "collfric/convex.hpp"
#include "collfric/error.hpp"
#include "collfric/models.hpp"
#include "collfric/quantum.hpp"
#include "collfric/units.hpp"

namespace collfric::oracle {

using quantum::DensityMatrix;
using quantum::HermitianOperator;
using quantum::Matrix;

struct ComparisonReport {
    double max_abs_error = 0.0;
    /// Largest |difference| divided by the largest |value| of the compared series.
    double max_rel_error = 0.0;
    std::size_t n_points = 0;
    std::string worst_case;
    double max_state_error = 0.0;

    bool passes(double tolerance) const { return max_rel_error <= tolerance; }
};

/// Input of the swap oracle: two thermal qubits coupled by hbar J U_sw.
struct SwapOracleParams {
    quantum::QubitThermalState system;
    quantum::QubitThermalState ancilla;
    double coupling = 0.0;   // J, rad/s
    double leak_rate = 0.0;  // must be 0: the oracle has no dissipation channel
    double spacing = 0.0;    // m
};

struct BruteForceTrajectory {
    std::vector<double> friction;              // f_n, N
    std::vector<DensityMatrix> system_states;  // after interaction n
    double max_trace_drift = 0.0;              // |Tr(rho_SA) - 1|, worst step
    double max_purity_drift = 0.0;             // |Tr(rho_SA^2) after - before|, worst step
};

namespace detail {

struct JointStep {
    DensityMatrix system_after;
    DensityMatrix ancilla_after;
    double system_energy_change;   // J
    double ancilla_energy_change;  // J
    double trace_drift;
    double purity_drift;
};

/// U - 1 for U = exp(-i H tau / hbar). Carrying the increment keeps energy
/// changes far below the energies themselves free of cancellation.
inline Matrix propagator_increment(const HermitianOperator& h, double tau) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
    const Matrix& vecs = solver.eigenvectors();
    const Eigen::VectorXd& vals = solver.eigenvalues();
    quantum::Vector steps(vals.size());
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        const double theta = vals(i) * tau / units::hbar;
        const double half = std::sin(0.5 * theta);
        steps(i) = quantum::Complex(-2.0 * half * half, -std::sin(theta));
    }
    return vecs * steps.asDiagonal() * vecs.adjoint();
}

inline double energy(const HermitianOperator& h, const Matrix& rho) {
    return (h.matrix() * rho).trace().real();
}

inline double energy(const HermitianOperator& h, const DensityMatrix& rho) { return energy(h, rho.matrix()); }

inline JointStep joint_step(const Matrix& increment, const HermitianOperator& h_s,
                            const HermitianOperator& h_a, const DensityMatrix& rho_s,
                            const DensityMatrix& rho_a) {
    const auto ds = rho_s.dim();
    const auto da = rho_a.dim();
    const Matrix joint = quantum::kron(rho_s.matrix(), rho_a.matrix());
    const Matrix moved = increment * joint;
    Matrix change = moved + moved.adjoint() + moved * increment.adjoint();
    change = 0.5 * (change + change.adjoint());
    const double drift = change.trace().real();
    const Matrix out = joint + change;
    const double purity_before = (joint * joint).trace().real();
    const double purity_after = (out * out).trace().real();
    // A propagator off unitarity by one ulp leaks trace every step, and each fresh
    // ancilla would inherit the deficit as an O(1) energy error.
    change = (change - drift * joint) / (1.0 + drift);
    const Matrix dsys = quantum::partial_trace(change, quantum::Subsystem::first, ds, da);
    const Matrix danc = quantum::partial_trace(change, quantum::Subsystem::second, ds, da);
    return {DensityMatrix(rho_s.matrix() + dsys),
            DensityMatrix(rho_a.matrix() + danc),
            energy(h_s, dsys),
            energy(h_a, danc),
            std::abs(drift),
            std::abs(purity_after - purity_before)};
}

}  // namespace detail

/// Full 4x4 simulation of N undamped swap interactions at speed v.
inline BruteForceTrajectory brute_force_swap_trajectory(const SwapOracleParams& p, double speed,
                                                        std::size_t count) {
    if (p.leak_rate != 0.0) {
        throw InvalidArgument("brute_force_swap_trajectory: the unitary oracle cannot model leakage");
    }
    if (!(speed > 0.0)) throw InvalidArgument("brute_force_swap_trajectory: speed must be positive");
    if (!(p.spacing > 0.0)) throw InvalidArgument("brute_force_swap_trajectory: spacing must be positive");
    const HermitianOperator h_s = p.system.hamiltonian();
    const HermitianOperator h_a = p.ancilla.hamiltonian();
    const DensityMatrix rho_a = p.ancilla.to_density_matrix();
    const HermitianOperator generator(units::hbar * p.coupling * quantum::swap_operator(2));
    const Matrix step_increment = detail::propagator_increment(generator, p.spacing / speed);

    BruteForceTrajectory out;
    out.friction.reserve(count);
    out.system_states.reserve(count);
    DensityMatrix rho_s = p.system.to_density_matrix();
    for (std::size_t n = 0; n < count; ++n) {
        detail::JointStep step = detail::joint_step(step_increment, h_s, h_a, rho_s, rho_a);
        out.friction.push_back((step.system_energy_change + step.ancilla_energy_change) / p.spacing);
        out.max_trace_drift = std::max(out.max_trace_drift, step.trace_drift);
        out.max_purity_drift = std::max(out.max_purity_drift, step.purity_drift);
        rho_s = step.system_after;
        out.system_states.push_back(rho_s);
    }
    return out;
}

struct ZenoLimitReport {
    double estimate = 0.0;               // Richardson limit of v f_0(v), W
    std::vector<double> speeds;          // the ladder
    std::vector<double> scaled_friction; // v f_0(v)
    std::vector<double> residuals;       // |v f_0(v) - estimate|
    double floor = 0.0;                  // roundoff level of the residuals
    bool converged = false;
};

/// Numerical lim v f_0(v) for a fixed-coupling spec over a doubling ladder.
///
/// The ladder must double at each step, start above the Zeno speed and span at
/// least three decades. Two rounds of Richardson on the top three points
/// remove the 1/v and 1/v^2 tails. The ladder counts as converged when each
/// residual is either at roundoff or at least 1.9 times the next one.
inline ZenoLimitReport numeric_zeno_limit(const collision::CollisionSpec& spec,
                                          const DensityMatrix& system_state,
                                          const std::vector<double>& ladder) {
    if (spec.coupling_mode() != collision::CouplingMode::fixed) {
        throw InvalidArgument("numeric_zeno_limit: needs a fixed coupling");
    }
    if (ladder.size() < 3) throw InvalidArgument("numeric_zeno_limit: ladder too short");
    for (std::size_t i = 1; i < ladder.size(); ++i) {
        if (std::abs(ladder[i] / ladder[i - 1] - 2.0) > 1e-9) {
            throw InvalidArgument("numeric_zeno_limit: ladder must double at each step");
        }
    }
    const HermitianOperator generator = spec.generator();
    const double zeno = collision::zeno_critical_speed(spec.spacing(), generator.spectral_norm());
    if (!(ladder.front() > zeno)) {
        throw InvalidArgument("numeric_zeno_limit: ladder must start above the Zeno speed");
    }
    if (ladder.back() / ladder.front() < 1e3 * (1.0 - 1e-12)) {
        throw InvalidArgument("numeric_zeno_limit: ladder must span three decades");
    }

    const HermitianOperator& h_s = spec.system_hamiltonian();
    const HermitianOperator& h_a = spec.ancilla_hamiltonian();
    const DensityMatrix& rho_a = spec.ancilla_initial();

    ZenoLimitReport out;
    out.speeds = ladder;
    for (double v : ladder) {
        const Matrix increment = detail::propagator_increment(generator, spec.spacing() / v);
        const detail::JointStep step = detail::joint_step(increment, h_s, h_a, system_state, rho_a);
        const double de = step.system_energy_change + step.ancilla_energy_change;
        out.scaled_friction.push_back(v * de / spec.spacing());
    }

    const std::size_t m = ladder.size();
    const double g1 = out.scaled_friction[m - 3];
    const double g2 = out.scaled_friction[m - 2];
    const double g3 = out.scaled_friction[m - 1];
    const double r1 = 2.0 * g2 - g1;
    const double r2 = 2.0 * g3 - g2;
    out.estimate = (4.0 * r2 - r1) / 3.0;

    // Energies are resolved to ~eps * ||H||, so v f carries eps * v ||H|| / dx.
    const double energy_scale = std::max(h_s.spectral_norm() + h_a.spectral_norm(),
                                         generator.spectral_norm());
    out.floor = 64.0 * 2.2e-16 * ladder.back() * energy_scale / spec.spacing();

    out.converged = true;
    for (std::size_t i = 0; i < m; ++i) {
        out.residuals.push_back(std::abs(out.scaled_friction[i] - out.estimate));
    }
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double a = out.residuals[i];
        const double b = out.residuals[i + 1];
        if (a <= out.floor || b <= out.floor) continue;
        if (a < 1.9 * b) {
            out.converged = false;
            break;
        }
    }
    return out;
}

/// Undamped swap: the convex closed form and state solution against the brute
/// force, over interactions 0..N-1.
inline ComparisonReport compare_convex_vs_brute(const models::DampedSwapParams& p, double speed,
                                                std::size_t count) {
    if (p.leak_rate != 0.0) throw InvalidArgument("compare_convex_vs_brute: leak rate must be 0");
    const auto* fixed = std::get_if<models::FixedCoupling>(&p.coupling);
    if (!fixed) throw InvalidArgument("compare_convex_vs_brute: needs a fixed coupling");
    if (count < 1) throw InvalidArgument("compare_convex_vs_brute: need at least one interaction");

    const SwapOracleParams oracle_params{p.system, p.ancilla, fixed->rate, 0.0, p.spacing};
    const BruteForceTrajectory brute = brute_force_swap_trajectory(oracle_params, speed, count);
    const convex::ConvexModelSpec spec = models::build_convex_spec(p);
    const double dt = p.spacing / speed;
    const convex::FrictionDecomposition d = convex::friction_decomposition(spec, speed);

    ComparisonReport report;
    report.n_points = count;
    double scale = 0.0;
    std::size_t worst = 0;
    for (std::size_t n = 0; n < count; ++n) {
        const double analytic = d.f_infty + d.f_tr * spec.system_retention().power(dt, n);
        const double err = std::abs(analytic - brute.friction[n]);
        scale = std::max({scale, std::abs(analytic), std::abs(brute.friction[n])});
        if (err > report.max_abs_error) {
            report.max_abs_error = err;
            worst = n;
        }
        const DensityMatrix state = convex::system_state_at(spec, dt, n + 1);
        report.max_state_error =
            std::max(report.max_state_error, state.max_abs_difference(brute.system_states[n]));
    }
    if (scale > 0.0) {
        report.max_rel_error = report.max_abs_error / scale;
    } else if (report.max_abs_error > 0.0) {
        report.max_rel_error = units::infinity;
    }
    std::ostringstream os;
    os.precision(17);
    os << "v=" << speed << " n=" << worst << " a_S=" << p.system.polarization
       << " a_A=" << p.ancilla.polarization << " w_S=" << p.system.omega
       << " w_A=" << p.ancilla.omega;
    report.worst_case = os.str();
    return report;
}

}  // namespace collfric::oracle
