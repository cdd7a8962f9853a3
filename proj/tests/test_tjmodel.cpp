#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <numbers>

#include "tripledot/fock.hpp"
#include "tripledot/hubbard.hpp"
#include "tripledot/rng.hpp"
#include "tripledot/tjmodel.hpp"

using namespace tripledot;
using Catch::Matchers::WithinAbs;

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kPi = std::numbers::pi;

double eigen_residual(const Eigen::MatrixXd& h, double lambda, const Eigen::VectorXd& v) {
    return (h * v - lambda * v).norm();
}
}  // namespace

TEST_CASE("effective Hamiltonian entries", "[tjmodel]") {
    const tjmodel::EffectiveParams p{kSqrt2, 0.1};
    const auto h = tjmodel::effective_hamiltonian(p);
    REQUIRE(h.basis.kind == fock::BasisKind::SinglyOccupied);
    REQUIRE_THAT(h.m(0, 0).real(), WithinAbs(-0.2, 1e-15));
    REQUIRE_THAT(h.m(0, 4).real(), WithinAbs(kSqrt2, 1e-15));
    REQUIRE(h.m(4, 5) == hubbard::Complex(0.0, 0.0));
    REQUIRE(hubbard::hermiticity_defect(h.m) == 0.0);
    REQUIRE(h.m.imag().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("effective Hamiltonian at j=0 is pure hopping", "[tjmodel]") {
    const tjmodel::EffectiveParams p{1.7, 0.0};
    const auto h = tjmodel::effective_hamiltonian(p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.m.real());
    const auto& ev = es.eigenvalues();
    // {-sqrt2 t (x2), 0 (x2), +sqrt2 t (x2)}
    REQUIRE_THAT(ev(0), WithinAbs(-kSqrt2 * p.t, 1e-12));
    REQUIRE_THAT(ev(1), WithinAbs(-kSqrt2 * p.t, 1e-12));
    REQUIRE_THAT(ev(2), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(ev(3), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(ev(4), WithinAbs(kSqrt2 * p.t, 1e-12));
    REQUIRE_THAT(ev(5), WithinAbs(kSqrt2 * p.t, 1e-12));
}

TEST_CASE("A-B mirror symmetry of the effective model", "[tjmodel]") {
    const tjmodel::EffectiveParams p{1.3, 0.07};
    const Eigen::MatrixXd h = tjmodel::effective_hamiltonian(p).m.real();
    // Swap of the AC and CB pair states (1<->3, 2<->4).
    Eigen::PermutationMatrix<6> perm;
    perm.indices() << 2, 3, 0, 1, 4, 5;
    const Eigen::MatrixXd swapped = perm.transpose() * h * perm;
    REQUIRE((h - swapped).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("adiabatic elimination reproduces the effective model", "[tjmodel]") {
    const double t = kSqrt2;

    SECTION("u = 20, residual bounded by 10 t^3/u^2") {
        const double u = 20.0;
        const auto h9 = hubbard::build_hubbard(hubbard::HubbardParams::processing(t, u),
                                               fock::enumerate_sector(0));
        const auto eff = tjmodel::eliminate_double_occupancy(h9, u);
        const auto ref = tjmodel::effective_hamiltonian(tjmodel::EffectiveParams::from_hubbard(t, u));
        const double err = (eff.m - ref.m).cwiseAbs().maxCoeff();
        REQUIRE(err <= 10.0 * t * t * t / (u * u));
    }

    SECTION("u = 1e6 matches entrywise to 1e-9") {
        const double u = 1e6;
        const auto h9 = hubbard::build_hubbard(hubbard::HubbardParams::processing(t, u),
                                               fock::enumerate_sector(0));
        const auto eff = tjmodel::eliminate_double_occupancy(h9, u);
        const auto ref = tjmodel::effective_hamiltonian(tjmodel::EffectiveParams::from_hubbard(t, u));
        REQUIRE((eff.m - ref.m).cwiseAbs().maxCoeff() <= 1e-9);
    }

    SECTION("t = 0 eliminates to the zero matrix") {
        const auto h9 = hubbard::build_hubbard(hubbard::HubbardParams::processing(0.0, 8.0),
                                               fock::enumerate_sector(0));
        const auto eff = tjmodel::eliminate_double_occupancy(h9, 8.0);
        REQUIRE(eff.m.cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("u = 0 is singular") {
        const auto h9 = hubbard::build_hubbard(hubbard::HubbardParams::processing(t, 0.0),
                                               fock::enumerate_sector(0));
        REQUIRE_THROWS_AS(tjmodel::eliminate_double_occupancy(h9, 0.0), std::invalid_argument);
    }
}

TEST_CASE("analytic spectrum closed forms at t=sqrt2, j=0.1", "[tjmodel]") {
    const tjmodel::EffectiveParams p{kSqrt2, 0.1};
    const auto sp = tjmodel::analytic_spectrum(p);

    // eta = -(3J +- sqrt(9J^2 + 2t^2)) with sqrt(4.09) = 2.02237484...
    const double s = std::sqrt(4.09);
    REQUIRE_THAT(sp.eta_plus, WithinAbs(-(0.3 + s), 1e-12));
    REQUIRE_THAT(sp.eta_minus, WithinAbs(s - 0.3, 1e-12));
    REQUIRE_THAT(sp.eigenvalues(0), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(sp.eigenvalues(1), WithinAbs(-0.2, 1e-15));
    REQUIRE_THAT(sp.eigenvalues(2), WithinAbs(-2.0, 1e-12));
    REQUIRE_THAT(sp.eigenvalues(3), WithinAbs(2.0, 1e-12));
    REQUIRE_THAT(sp.eigenvalues(4), WithinAbs(-2.3223748416156255, 1e-12));
    REQUIRE_THAT(sp.eigenvalues(5), WithinAbs(1.7223748416156255, 1e-12));

    // Cross-check against a numeric eigensolve.
    const Eigen::MatrixXd h = tjmodel::effective_hamiltonian(p).m.real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    Eigen::VectorXd sorted = sp.eigenvalues;
    std::sort(sorted.data(), sorted.data() + 6);
    REQUIRE((sorted - es.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("analytic eigenpairs over random parameters", "[tjmodel]") {
    rng::StreamRng gen(20240817, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const double t = 0.5 + 2.5 * gen.uniform();
        const double j = t * t / (10.0 + 90.0 * gen.uniform());  // U in [10, 100]
        const tjmodel::EffectiveParams p{t, j};
        const auto sp = tjmodel::analytic_spectrum(p);
        const Eigen::MatrixXd h = tjmodel::effective_hamiltonian(p).m.real();

        for (int k = 0; k < 6; ++k) {
            const Eigen::VectorXd v = sp.eigenvectors.col(k);
            REQUIRE_THAT(v.norm(), WithinAbs(1.0, 1e-12));
            REQUIRE(eigen_residual(h, sp.eigenvalues(k), v) <= 1e-10);
        }
        const Eigen::MatrixXd gram =
            sp.eigenvectors.transpose() * sp.eigenvectors - Eigen::MatrixXd::Identity(6, 6);
        REQUIRE(gram.cwiseAbs().maxCoeff() <= 1e-10);

        // Normalization identity 1/xi+^2 + 1/xi-^2 = 1/2.
        const double id = 1.0 / (sp.xi_plus * sp.xi_plus) + 1.0 / (sp.xi_minus * sp.xi_minus);
        REQUIRE_THAT(id, WithinAbs(0.5, 1e-12));
    }
}

TEST_CASE("flipped v5 tail fails the residual check, corrected v5 passes", "[tjmodel]") {
    const tjmodel::EffectiveParams p{kSqrt2, 0.1};
    const auto sp = tjmodel::analytic_spectrum(p);
    const Eigen::MatrixXd h = tjmodel::effective_hamiltonian(p).m.real();

    Eigen::VectorXd v5 = sp.eigenvectors.col(4);
    REQUIRE(eigen_residual(h, sp.eta_plus, v5) <= 1e-10);

    Eigen::VectorXd flipped = v5;
    flipped(4) = -v5(4);
    flipped(5) = -v5(5);
    REQUIRE(eigen_residual(h, sp.eta_plus, flipped) > 0.1);  // O(t), not round-off
}

TEST_CASE("v1 is a null vector for all parameters", "[tjmodel]") {
    rng::StreamRng gen(7, 1);
    for (int trial = 0; trial < 20; ++trial) {
        const tjmodel::EffectiveParams p{0.2 + 3.0 * gen.uniform(), 0.3 * gen.uniform()};
        const Eigen::MatrixXd h = tjmodel::effective_hamiltonian(p).m.real();
        Eigen::VectorXd v1(6);
        v1 << 0.5, 0.5, -0.5, -0.5, 0, 0;
        REQUIRE(eigen_residual(h, 0.0, v1) <= 1e-12);
    }
}

TEST_CASE("j=0 closed forms", "[tjmodel]") {
    const tjmodel::EffectiveParams p{kSqrt2, 0.0};
    const auto sp = tjmodel::analytic_spectrum(p);
    REQUIRE_THAT(sp.eta_plus, WithinAbs(-kSqrt2 * p.t, 1e-12));
    REQUIRE_THAT(sp.eta_minus, WithinAbs(kSqrt2 * p.t, 1e-12));
    REQUIRE_THAT(sp.xi_plus, WithinAbs(2.0, 1e-12));
    REQUIRE_THAT(sp.xi_minus, WithinAbs(2.0, 1e-12));
}

TEST_CASE("analytic overlap values", "[tjmodel]") {
    const tjmodel::EffectiveParams p{kSqrt2, 0.1};

    REQUIRE_THAT(tjmodel::analytic_overlap(0.0, p), WithinAbs(0.5, 1e-15));

    // tau = 2 pi: cos^2 factor is exactly 1, envelope (1 + sin(0.6 pi))/2.
    const double expected = (1.0 + std::sin(0.6 * kPi)) / 2.0;
    REQUIRE_THAT(expected, WithinAbs(0.97552825814757682, 1e-15));
    REQUIRE_THAT(tjmodel::analytic_overlap(2 * kPi, p), WithinAbs(expected, 1e-12));

    // Forced unity: t chosen so sqrt(2) t tau'_0 is a multiple of pi.
    // tau'_0 = pi/(6 j); sqrt(2) t tau'_0 = 12 pi for t = 72 j / (sqrt(2) ... )
    const double j = 0.1;
    const double tau0 = kPi / (6 * j);
    const double t_forced = 12.0 * kPi / (kSqrt2 * tau0);  // fast phase = 12 pi
    const tjmodel::EffectiveParams forced{t_forced, j};
    REQUIRE_THAT(tjmodel::analytic_overlap(tau0, forced), WithinAbs(1.0, 1e-12));

    // Bounded in [0, 1] across a dense grid.
    for (int k = 0; k <= 20000; ++k) {
        const double v = tjmodel::analytic_overlap(k * 1e-3, p);
        REQUIRE(v >= -1e-15);
        REQUIRE(v <= 1.0 + 1e-15);
    }
}

TEST_CASE("return and target times", "[tjmodel]") {
    REQUIRE_THAT(tjmodel::return_times(kSqrt2, 1), WithinAbs(kPi, 1e-12));
    REQUIRE_THAT(tjmodel::return_times(kSqrt2, 2), WithinAbs(2 * kPi, 1e-12));
    // tau_m scales as 1/t.
    REQUIRE_THAT(tjmodel::return_times(2 * kSqrt2, 3), WithinAbs(0.5 * tjmodel::return_times(kSqrt2, 3), 1e-12));

    const double j = 0.1;
    REQUIRE_THAT(tjmodel::target_times(j, 0), WithinAbs(kPi / 0.6, 1e-12));
    for (int n = 0; n <= 10; ++n) {
        const double th = 3 * j * tjmodel::target_times(j, n);
        // Envelope factor (1 + sin(3 J tau))/2 equals 1 at each target time.
        REQUIRE_THAT((1.0 + std::sin(th)) / 2.0, WithinAbs(1.0, 1e-12));
    }
    // The odd multiples of pi/(6J) sit at envelope zeros instead.
    const double th_odd = 3 * j * (3 * kPi / (6 * j));
    REQUIRE_THAT((1.0 + std::sin(th_odd)) / 2.0, WithinAbs(0.0, 1e-12));

    REQUIRE_THROWS_AS(tjmodel::return_times(0.0, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(tjmodel::return_times(kSqrt2, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(tjmodel::target_times(0.0, 0), std::invalid_argument);
}

TEST_CASE("evolution closure: eigenbasis propagation matches the overlap formula to O(t/u)",
          "[tjmodel]") {
    const double t = kSqrt2, u = 20.0;
    const tjmodel::EffectiveParams p = tjmodel::EffectiveParams::from_hubbard(t, u);
    const auto sp = tjmodel::analytic_spectrum(p);

    Eigen::VectorXd psi0 = Eigen::VectorXd::Zero(6);
    psi0(4) = 1.0;  // AuBd
    Eigen::VectorXcd target = Eigen::VectorXcd::Zero(6);
    const auto pre = std::polar(1.0 / kSqrt2, kPi / 4);
    target(4) = pre;
    target(5) = pre * std::complex<double>(0, -1);

    const Eigen::VectorXd coeff = sp.eigenvectors.transpose() * psi0;
    double worst = 0.0;
    for (int k = 0; k <= 4000; ++k) {
        const double tau = k * 5e-3;
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(6);
        for (int m = 0; m < 6; ++m)
            psi += coeff(m) * std::polar(1.0, -sp.eigenvalues(m) * tau) *
                   sp.eigenvectors.col(m).cast<std::complex<double>>();
        const double overlap = std::norm(target.dot(psi));
        worst = std::max(worst, std::abs(overlap - tjmodel::analytic_overlap(tau, p)));
    }
    REQUIRE(worst <= 5.0 * t / u);
}
