#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "collfric/quantum.hpp"
#include "support/random_states.hpp"

using namespace collfric;
using namespace collfric::quantum;

namespace {

Matrix ket_bra(Index dim, Index i, Index j) {
    Matrix m = Matrix::Zero(dim, dim);
    m(i, j) = 1.0;
    return m;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

DensityMatrix thermal(double a) { return QubitThermalState{a, 1.0}.to_density_matrix(); }

}  // namespace

TEST(TensorProduct, IdentityTimesIdentity) {
    const auto out = tensor_product(HermitianOperator::identity(2), HermitianOperator::identity(2));
    EXPECT_EQ(max_abs(out.matrix() - Matrix::Identity(4, 4)), 0.0);
}

TEST(TensorProduct, BasisStatesUseSystemSlowIndex) {
    const auto out = tensor_product(DensityMatrix::basis_state(2, 0), DensityMatrix::basis_state(2, 1));
    EXPECT_EQ(max_abs(out.matrix() - ket_bra(4, 1, 1)), 0.0);
}

TEST(TensorProduct, SigmaZSigmaZ) {
    const auto out = tensor_product(HermitianOperator(sigma_z()), HermitianOperator(sigma_z()));
    Matrix expected = Matrix::Zero(4, 4);
    expected.diagonal() << 1.0, -1.0, -1.0, 1.0;
    EXPECT_EQ(max_abs(out.matrix() - expected), 0.0);
}

TEST(PartialTrace, ProductStateReturnsFactors) {
    testsupport::Rng rng(11);
    const auto rho = rng.state(2);
    const auto sigma = rng.state(3);
    const auto joint = tensor_product(rho, sigma);
    EXPECT_LT(partial_trace(joint, Subsystem::first, 2, 3).max_abs_difference(rho), 1e-15);
    EXPECT_LT(partial_trace(joint, Subsystem::second, 2, 3).max_abs_difference(sigma), 1e-15);
}

TEST(PartialTrace, BellStateMarginalIsMaximallyMixed) {
    Vector phi(4);
    phi << 1.0, 0.0, 0.0, 1.0;
    phi /= std::sqrt(2.0);
    const auto reduced = partial_trace(DensityMatrix::pure(phi), Subsystem::first, 2, 2);
    EXPECT_LT(reduced.max_abs_difference(DensityMatrix::maximally_mixed(2)), 1e-15);
}

TEST(PartialTrace, FullSwapExchangesMarginals) {
    testsupport::Rng rng(12);
    const auto rho = rng.state(2);
    const auto sigma = rng.state(2);
    const auto swapped = evolve(Unitary(swap_operator(2)), tensor_product(rho, sigma));
    EXPECT_LT(partial_trace(swapped, Subsystem::first, 2, 2).max_abs_difference(sigma), 1e-15);
    EXPECT_LT(partial_trace(swapped, Subsystem::second, 2, 2).max_abs_difference(rho), 1e-15);
}

TEST(PartialTrace, DimensionMismatchThrows) {
    const auto joint = DensityMatrix::maximally_mixed(4);
    EXPECT_THROW(partial_trace(joint, Subsystem::first, 3, 2), InvalidArgument);
}

TEST(PartialSwap, ZeroAngleIsIdentity) {
    EXPECT_LT(max_abs(partial_swap_unitary(1.0, 0.0, 2).matrix() - Matrix::Identity(4, 4)), 1e-16);
}

TEST(PartialSwap, QuarterTurnIsFullSwapUpToPhase) {
    const auto u = partial_swap_unitary(1.0, std::numbers::pi / 2, 2);
    const Matrix expected = Complex(0.0, -1.0) * swap_operator(2);
    EXPECT_LT(max_abs(u.matrix() - expected), 1e-15);

    const auto out = evolve(u, tensor_product(thermal(-1.0), thermal(0.4)));
    EXPECT_LT(partial_trace(out, Subsystem::first, 2, 2).max_abs_difference(thermal(0.4)), 1e-15);
    EXPECT_LT(partial_trace(out, Subsystem::second, 2, 2).max_abs_difference(thermal(-1.0)), 1e-15);
}

TEST(PartialSwap, EighthTurnGivesEvenMixtures) {
    const auto u = partial_swap_unitary(2.0, std::numbers::pi / 8, 2);
    const auto rho = thermal(-0.6);
    const auto sigma = thermal(0.9);
    const auto out = evolve(u, tensor_product(rho, sigma));
    const auto half = DensityMatrix::mix(0.5, rho, sigma);
    EXPECT_LT(partial_trace(out, Subsystem::first, 2, 2).max_abs_difference(half), 1e-15);
    EXPECT_LT(partial_trace(out, Subsystem::second, 2, 2).max_abs_difference(half), 1e-15);
}

TEST(PartialSwap, RejectsTrivialSubsystem) {
    EXPECT_THROW(partial_swap_unitary(1.0, 1.0, 1), InvalidArgument);
}

TEST(PartialSwap, AgreesWithExponentialOfSwapGenerator) {
    const double j = 3e13;
    const double t = 2.7e-14;
    const auto closed = partial_swap_unitary(j, t, 3);
    const auto generated = propagator(HermitianOperator(units::hbar * j * swap_operator(3)), t);
    EXPECT_LT(max_abs(closed.matrix() - generated.matrix()), 1e-13);
}

TEST(Evolve, IdentityLeavesStateUnchanged) {
    testsupport::Rng rng(13);
    const auto rho = rng.state(3);
    EXPECT_LT(evolve(Unitary(identity_matrix(3)), rho).max_abs_difference(rho), 1e-16);
}

TEST(Evolve, SwapExchangesFactors) {
    testsupport::Rng rng(14);
    const auto rho = rng.state(2);
    const auto sigma = rng.state(2);
    const auto out = evolve(Unitary(swap_operator(2)), tensor_product(rho, sigma));
    EXPECT_LT(out.max_abs_difference(tensor_product(sigma, rho)), 1e-15);
}

TEST(Evolve, ThirdTurnGivesCosSquaredMixtures) {
    const double angle = std::numbers::pi / 3;
    const auto rho = thermal(0.2);
    const auto sigma = thermal(-0.7);
    const auto out = evolve(partial_swap_unitary(1.0, angle, 2), tensor_product(rho, sigma));
    const double c2 = 0.25;  // cos^2(pi/3)
    EXPECT_LT(partial_trace(out, Subsystem::first, 2, 2)
                  .max_abs_difference(DensityMatrix::mix(c2, rho, sigma)),
              1e-15);
    EXPECT_LT(partial_trace(out, Subsystem::second, 2, 2)
                  .max_abs_difference(DensityMatrix::mix(c2, sigma, rho)),
              1e-15);
}

TEST(Evolve, RejectsNonUnitary) {
    Matrix m = identity_matrix(2);
    m(0, 0) = 1.001;
    EXPECT_THROW(Unitary{m}, InvalidArgument);
}

TEST(Evolve, DimensionMismatchThrows) {
    EXPECT_THROW(evolve(Unitary(identity_matrix(4)), DensityMatrix::maximally_mixed(2)),
                 InvalidArgument);
}

TEST(Expectation, IdentityGivesOne) {
    testsupport::Rng rng(15);
    EXPECT_NEAR(expectation(HermitianOperator::identity(3), rng.state(3)), 1.0, 1e-15);
}

TEST(Expectation, QubitEnergyHalfGapConvention) {
    const double hw = 0.6 * units::electron_volt;
    const double a = 0.35;
    const auto rho = thermal(a);
    EXPECT_NEAR(expectation(HermitianOperator(0.5 * hw * sigma_z()), rho) / (hw * a / 2), 1.0, 1e-15);
}

TEST(Expectation, SigmaXOnPlusState) {
    Vector plus(2);
    plus << 1.0, 1.0;
    plus /= std::sqrt(2.0);
    EXPECT_NEAR(expectation(HermitianOperator(sigma_x()), DensityMatrix::pure(plus)), 1.0, 1e-15);
}

TEST(Types, DensityMatrixInvariants) {
    Matrix bad_trace = Matrix::Identity(2, 2);
    EXPECT_THROW(DensityMatrix{bad_trace}, InvalidArgument);

    Matrix not_hermitian = Matrix::Identity(2, 2) / 2.0;
    not_hermitian(0, 1) = 0.1;
    EXPECT_THROW(DensityMatrix{not_hermitian}, InvalidArgument);

    Matrix negative = Matrix::Zero(2, 2);
    negative(0, 0) = 1.5;
    negative(1, 1) = -0.5;
    EXPECT_THROW(DensityMatrix{negative}, InvalidArgument);
}

TEST(Types, HermitianOperatorRejectsAsymmetry) {
    Matrix m = sigma_x();
    m(0, 1) = 2.0;
    EXPECT_THROW(HermitianOperator{m}, InvalidArgument);
}

TEST(Types, QubitThermalState) {
    EXPECT_THROW((QubitThermalState{1.5, 1.0}.to_density_matrix()), InvalidArgument);
    const auto rho = QubitThermalState{-1.0, 1.0}.to_density_matrix();
    EXPECT_EQ(rho.matrix()(1, 1).real(), 1.0);
    EXPECT_EQ(rho.matrix()(0, 0).real(), 0.0);
    const auto inverted = QubitThermalState{0.5, 1.0}.to_density_matrix();
    EXPECT_NEAR(inverted.matrix()(0, 0).real(), 0.75, 1e-16);
    EXPECT_NEAR(inverted.matrix().trace().real(), 1.0, 1e-16);
}

// --- properties -----------------------------------------------------------

TEST(Properties, GeneratedUnitariesAreUnitary) {
    testsupport::Rng rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        const Index d = rng.integer(2, 4);
        const auto h = rng.hermitian(d * d, 1e-21);
        const double tau = rng.log_uniform(1e-17, 1e-11);
        EXPECT_LE(propagator(h, tau).unitarity_defect(), 1e-12);
        EXPECT_LE(partial_swap_unitary(rng.uniform(0, 1e14), tau, d).unitarity_defect(), 1e-12);
    }
}

TEST(Properties, PartialTraceOfProductRecoversFactors) {
    testsupport::Rng rng(102);
    for (int trial = 0; trial < 100; ++trial) {
        const Index d1 = rng.integer(2, 3);
        const Index d2 = rng.integer(2, 3);
        const auto rho = rng.state(d1, rng.integer(1, static_cast<int>(d1)));
        const auto sigma = rng.state(d2, rng.integer(1, static_cast<int>(d2)));
        const auto joint = tensor_product(rho, sigma);
        EXPECT_LE(partial_trace(joint, Subsystem::first, d1, d2).max_abs_difference(rho), 1e-14);
        EXPECT_LE(partial_trace(joint, Subsystem::second, d1, d2).max_abs_difference(sigma), 1e-14);
    }
}

TEST(Properties, EvolvePreservesTraceAndPositivity) {
    testsupport::Rng rng(103);
    for (int trial = 0; trial < 100; ++trial) {
        const Index d = rng.integer(2, 9);
        const auto rho = rng.state(d, rng.integer(1, static_cast<int>(d)));
        const auto u = propagator(rng.hermitian(d, 1e-20), rng.log_uniform(1e-16, 1e-12));
        const auto out = evolve(u, rho);
        EXPECT_NEAR(out.matrix().trace().real(), 1.0, 1e-13);
        EXPECT_GE(out.min_eigenvalue(), -1e-10);
    }
}

TEST(Properties, DiagonalPartialSwapFollowsCosSquaredMixing) {
    testsupport::Rng rng(104);
    for (int trial = 0; trial < 100; ++trial) {
        const auto rho = thermal(rng.polarization());
        const auto sigma = thermal(rng.polarization());
        const double jt = rng.uniform(0.0, 10.0);
        const auto out = evolve(partial_swap_unitary(1.0, jt, 2), tensor_product(rho, sigma));
        const double c2 = std::cos(jt) * std::cos(jt);
        EXPECT_LE(partial_trace(out, Subsystem::first, 2, 2)
                      .max_abs_difference(DensityMatrix::mix(c2, rho, sigma)),
                  1e-12);
    }
}

TEST(Properties, CoherentPartialSwapCrossTerm) {
    testsupport::Rng rng(105);
    const Matrix usw = swap_operator(2);
    for (int trial = 0; trial < 100; ++trial) {
        const auto rho = rng.state(2);
        const auto sigma = rng.state(2);
        const double jt = rng.uniform(0.0, 10.0);
        const double c = std::cos(jt);
        const double s = std::sin(jt);
        const Matrix joint = kron(rho.matrix(), sigma.matrix());
        const Matrix commutator = usw * joint - joint * usw;
        const Matrix expected = c * c * rho.matrix() + s * s * sigma.matrix() -
                                Complex(0.0, c * s) * partial_trace(commutator, Subsystem::first, 2, 2);
        const auto out = evolve(partial_swap_unitary(1.0, jt, 2), tensor_product(rho, sigma));
        EXPECT_LE(max_abs(partial_trace(out, Subsystem::first, 2, 2).matrix() - expected), 1e-12);
    }
}
