// quantum.hpp: dense linear algebra for small Hilbert spaces.
//
// Density matrices, Hermitian operators and unitaries are value types that
// validate their defining invariants on construction. Joint spaces use the
// computational basis with the system index slow and the ancilla index fast,
// i.e. |s a> sits at row s * d_ancilla + a.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "collfric/error.hpp"
#include "collfric/units.hpp"

namespace collfric::quantum {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kPositivityTolerance = 1e-10;
inline constexpr double kUnitaryTolerance = 1e-10;

enum class Subsystem { first, second };

namespace detail {

inline double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// max |m_ij - conj(m_ji)|
inline double hermiticity_defect(const Matrix& m) {
    return max_abs(m - m.adjoint());
}

inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

inline void require_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw InvalidArgument(std::string(what) + ": matrix must be square and non-empty");
    }
}

inline double min_eigenvalue(const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

}  // namespace detail

/// Kronecker product; the first factor carries the slow index.
inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Hermitian operator. Units are whatever the caller puts in (joules for
/// Hamiltonians). Hermiticity is checked relative to the largest entry.
class HermitianOperator {
public:
    explicit HermitianOperator(Matrix m) {
        detail::require_square(m, "HermitianOperator");
        if (detail::hermiticity_defect(m) > kHermitianTolerance * detail::max_abs(m)) {
            throw InvalidArgument("HermitianOperator: matrix is not Hermitian");
        }
        matrix_ = detail::symmetrized(m);
    }

    static HermitianOperator zero(Index dim) { return HermitianOperator(Matrix::Zero(dim, dim)); }
    static HermitianOperator identity(Index dim) {
        return HermitianOperator(Matrix::Identity(dim, dim));
    }

    Index dim() const { return matrix_.rows(); }
    const Matrix& matrix() const { return matrix_; }

    /// Largest absolute eigenvalue.
    double spectral_norm() const {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix_, Eigen::EigenvaluesOnly);
        return solver.eigenvalues().cwiseAbs().maxCoeff();
    }

    HermitianOperator scaled(double factor) const { return HermitianOperator(factor * matrix_); }

    friend HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
        check_same_dim(a, b);
        return HermitianOperator(a.matrix_ + b.matrix_);
    }
    friend HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
        check_same_dim(a, b);
        return HermitianOperator(a.matrix_ - b.matrix_);
    }
    friend HermitianOperator operator*(double s, const HermitianOperator& a) { return a.scaled(s); }

private:
    static void check_same_dim(const HermitianOperator& a, const HermitianOperator& b) {
        if (a.dim() != b.dim()) throw InvalidArgument("HermitianOperator: dimension mismatch");
    }

    Matrix matrix_;
};

/// Unit-trace, Hermitian, positive semidefinite matrix.
class DensityMatrix {
public:
    explicit DensityMatrix(Matrix m) {
        detail::require_square(m, "DensityMatrix");
        if (detail::hermiticity_defect(m) > kHermitianTolerance) {
            throw InvalidArgument("DensityMatrix: matrix is not Hermitian");
        }
        Matrix h = detail::symmetrized(m);
        const double trace = h.trace().real();
        if (std::abs(trace - 1.0) > kTraceTolerance) {
            throw InvalidArgument("DensityMatrix: trace " + std::to_string(trace) + " differs from 1");
        }
        if (detail::min_eigenvalue(h) < -kPositivityTolerance) {
            throw InvalidArgument("DensityMatrix: matrix is not positive semidefinite");
        }
        matrix_ = std::move(h);
    }

    static DensityMatrix maximally_mixed(Index dim) {
        return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
    }
    static DensityMatrix basis_state(Index dim, Index which) {
        Matrix m = Matrix::Zero(dim, dim);
        m(which, which) = 1.0;
        return DensityMatrix(std::move(m));
    }
    static DensityMatrix pure(const Vector& ket) {
        const Vector normalized = ket / ket.norm();
        return DensityMatrix(normalized * normalized.adjoint());
    }
    /// Qubit state (1 + r . sigma) / 2 for a Bloch vector with |r| <= 1.
    static DensityMatrix from_bloch(double x, double y, double z);

    /// weight * a + (1 - weight) * b, for weight in [0, 1].
    static DensityMatrix mix(double weight, const DensityMatrix& a, const DensityMatrix& b) {
        if (a.dim() != b.dim()) throw InvalidArgument("DensityMatrix::mix: dimension mismatch");
        return DensityMatrix(weight * a.matrix_ + (1.0 - weight) * b.matrix_);
    }

    Index dim() const { return matrix_.rows(); }
    const Matrix& matrix() const { return matrix_; }
    double min_eigenvalue() const { return detail::min_eigenvalue(matrix_); }
    double purity() const { return (matrix_ * matrix_).trace().real(); }

    /// Largest elementwise deviation from another state of the same dimension.
    double max_abs_difference(const DensityMatrix& other) const {
        if (dim() != other.dim()) throw InvalidArgument("DensityMatrix: dimension mismatch");
        return detail::max_abs(matrix_ - other.matrix_);
    }

private:
    Matrix matrix_;
};

/// Unitary operator, validated to ||U^dagger U - 1||_max <= 1e-10.
class Unitary {
public:
    explicit Unitary(Matrix m) {
        detail::require_square(m, "Unitary");
        if (unitarity_defect(m) > kUnitaryTolerance) {
            throw InvalidArgument("Unitary: matrix is not unitary");
        }
        matrix_ = std::move(m);
    }

    static double unitarity_defect(const Matrix& m) {
        return detail::max_abs(m.adjoint() * m - Matrix::Identity(m.cols(), m.cols()));
    }

    Index dim() const { return matrix_.rows(); }
    const Matrix& matrix() const { return matrix_; }
    double unitarity_defect() const { return unitarity_defect(matrix_); }

private:
    Matrix matrix_;
};

// Pauli matrices and friends (dimensionless).

inline Matrix identity_matrix(Index dim) { return Matrix::Identity(dim, dim); }

inline Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

inline Matrix sigma_y() {
    Matrix m(2, 2);
    m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    return m;
}

inline Matrix sigma_z() {
    Matrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

inline DensityMatrix DensityMatrix::from_bloch(double x, double y, double z) {
    if (x * x + y * y + z * z > 1.0 + 1e-12) {
        throw InvalidArgument("DensityMatrix::from_bloch: Bloch vector longer than 1");
    }
    return DensityMatrix(0.5 * (identity_matrix(2) + x * sigma_x() + y * sigma_y() + z * sigma_z()));
}

/// The swap U_sw |s>|a> = |a>|s> on C^d (x) C^d.
inline Matrix swap_operator(Index d) {
    Matrix m = Matrix::Zero(d * d, d * d);
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) m(j * d + i, i * d + j) = 1.0;
    }
    return m;
}

inline DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
    return DensityMatrix(kron(a.matrix(), b.matrix()));
}

inline HermitianOperator tensor_product(const HermitianOperator& a, const HermitianOperator& b) {
    return HermitianOperator(kron(a.matrix(), b.matrix()));
}

/// Reduced matrix of a (d1*d2)-dimensional operator, keeping one factor.
inline Matrix partial_trace(const Matrix& joint, Subsystem keep, Index d1, Index d2) {
    if (d1 <= 0 || d2 <= 0 || joint.rows() != d1 * d2 || joint.cols() != d1 * d2) {
        throw InvalidArgument("partial_trace: joint dimension does not match d1 * d2");
    }
    if (keep == Subsystem::first) {
        Matrix out = Matrix::Zero(d1, d1);
        for (Index i = 0; i < d1; ++i)
            for (Index j = 0; j < d1; ++j)
                for (Index k = 0; k < d2; ++k) out(i, j) += joint(i * d2 + k, j * d2 + k);
        return out;
    }
    Matrix out = Matrix::Zero(d2, d2);
    for (Index i = 0; i < d2; ++i)
        for (Index j = 0; j < d2; ++j)
            for (Index k = 0; k < d1; ++k) out(i, j) += joint(k * d2 + i, k * d2 + j);
    return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& joint, Subsystem keep, Index d1, Index d2) {
    return DensityMatrix(partial_trace(joint.matrix(), keep, d1, d2));
}

/// exp(-i H tau / hbar) by Hermitian eigendecomposition. `tau` is in seconds
/// when H is in joules.
inline Unitary propagator(const HermitianOperator& hamiltonian, double tau) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hamiltonian.matrix());
    const Matrix& vecs = solver.eigenvectors();
    const Eigen::VectorXd& vals = solver.eigenvalues();
    Vector phases(vals.size());
    for (Index i = 0; i < vals.size(); ++i) {
        phases(i) = std::polar(1.0, -vals(i) * tau / units::hbar);
    }
    return Unitary(vecs * phases.asDiagonal() * vecs.adjoint());
}

/// cos(J t) 1 - i sin(J t) U_sw on a pair of d-level systems.
inline Unitary partial_swap_unitary(double coupling, double duration, Index d) {
    if (d < 2) throw InvalidArgument("partial_swap_unitary: subsystem dimension must be >= 2");
    const double angle = coupling * duration;
    Matrix u = std::cos(angle) * identity_matrix(d * d) -
               Complex(0.0, std::sin(angle)) * swap_operator(d);
    return Unitary(std::move(u));
}

/// U rho U^dagger. Hermiticity is asserted, then restored by symmetrizing.
inline DensityMatrix evolve(const Unitary& u, const DensityMatrix& rho) {
    if (u.dim() != rho.dim()) throw InvalidArgument("evolve: dimension mismatch");
    Matrix out = u.matrix() * rho.matrix() * u.matrix().adjoint();
    if (detail::hermiticity_defect(out) > kHermitianTolerance) {
        throw InvariantViolation("evolve: conjugated state lost Hermiticity");
    }
    return DensityMatrix(detail::symmetrized(out));
}

/// Tr(A rho). A non-negligible imaginary part means broken Hermiticity upstream.
inline double expectation(const HermitianOperator& a, const DensityMatrix& rho) {
    if (a.dim() != rho.dim()) throw InvalidArgument("expectation: dimension mismatch");
    const Complex value = (a.matrix() * rho.matrix()).trace();
    if (std::abs(value.imag()) >= 1e-10 * std::max(1e-300, detail::max_abs(a.matrix()))) {
        throw InvariantViolation("expectation: imaginary part above tolerance");
    }
    return value.real();
}

/// Thermal qubit (1 + a sigma_z) / 2 with local Hamiltonian hbar * omega * sigma_z,
/// so its energy is hbar * omega * a.
struct QubitThermalState {
    double polarization = -1.0;  // a in [-1, 1]; -1 is the ground state
    double omega = 0.0;          // rad/s

    void validate() const {
        if (!(polarization >= -1.0 && polarization <= 1.0)) {
            throw InvalidArgument("QubitThermalState: polarization must lie in [-1, 1]");
        }
        if (!std::isfinite(omega)) throw InvalidArgument("QubitThermalState: gap must be finite");
    }

    DensityMatrix to_density_matrix() const {
        validate();
        return DensityMatrix(0.5 * (identity_matrix(2) + polarization * sigma_z()));
    }

    HermitianOperator hamiltonian() const {
        return HermitianOperator(units::hbar * omega * sigma_z());
    }

    double energy() const { return units::hbar * omega * polarization; }
};

}  // namespace collfric::quantum
