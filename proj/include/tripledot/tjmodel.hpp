#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tripledot/fock.hpp"
#include "tripledot/hubbard.hpp"

namespace tripledot::tjmodel {

/// Effective-model parameters: tunneling t and exchange J = t^2/U.
struct EffectiveParams {
    double t;
    double j;

    static EffectiveParams from_hubbard(double t, double u) {
        if (t <= 0.0 || u <= 0.0)
            throw std::invalid_argument("EffectiveParams: need t > 0 and u > 0");
        return {t, t * t / u};
    }
    void validate() const {
        if (!(t > 0.0) || !std::isfinite(t) || !std::isfinite(j) || j < 0.0)
            throw std::invalid_argument("EffectiveParams: need t > 0 and j >= 0");
    }
};

/// Closed-form eigensystem of the 6x6 effective Hamiltonian.
struct AnalyticSpectrum {
    double eta_plus;   // -(3J + sqrt(9J^2 + 2t^2))
    double eta_minus;  // -(3J - sqrt(9J^2 + 2t^2))
    double xi_plus;    // sqrt(2 + eta_plus^2/t^2)
    double xi_minus;   // sqrt(2 + eta_minus^2/t^2)
    Eigen::VectorXd eigenvalues;   // {0, -2J, -sqrt(2)t, +sqrt(2)t, eta+, eta-}
    Eigen::MatrixXd eigenvectors;  // columns v1..v6, unit norm
};

/// The 3-site t-J Hamiltonian on the six singly occupied S_z = 0 states
/// (AuCd, AdCu, CuBd, CdBu, AuBd, AdBu): a +-J spin block on the displaced
/// pair states and tunneling t into the two (1,0,1) states.
inline hubbard::HamiltonianMatrix effective_hamiltonian(const EffectiveParams& p) {
    p.validate();
    const double t = p.t, j = p.j;
    Eigen::MatrixXd m(6, 6);
    m << -2 * j, 2 * j, -j, j, t, 0,
         2 * j, -2 * j, j, -j, 0, t,
         -j, j, -2 * j, 2 * j, t, 0,
         j, -j, 2 * j, -2 * j, 0, t,
         t, 0, t, 0, 0, 0,
         0, t, 0, t, 0, 0;
    return {fock::singly_occupied_basis(), m.cast<hubbard::Complex>()};
}

/// Leading-order adiabatic elimination of the three doubly occupied states:
/// H_PP - H_PQ H_QQ^{-1} H_QP on the 9x9 S_z = 0 Hamiltonian, whose basis
/// keeps the double occupancies in the trailing block.
inline hubbard::HamiltonianMatrix eliminate_double_occupancy(const hubbard::HamiltonianMatrix& h9,
                                                             double u) {
    if (h9.basis.kind != fock::BasisKind::SzZero || h9.basis.dim() != 9)
        throw std::invalid_argument("eliminate_double_occupancy: expected the 9-state S_z=0 basis");
    hubbard::require_hermitian(h9.m);

    const Eigen::MatrixXcd hpp = h9.m.topLeftCorner(6, 6);
    const Eigen::MatrixXcd hpq = h9.m.topRightCorner(6, 3);
    const Eigen::MatrixXcd hqp = h9.m.bottomLeftCorner(3, 6);
    const Eigen::MatrixXcd hqq = h9.m.bottomRightCorner(3, 3);

    Eigen::FullPivLU<Eigen::MatrixXcd> lu(hqq);
    const double scale = std::max(std::abs(u), hqq.cwiseAbs().maxCoeff());
    if (!lu.isInvertible() || scale == 0.0 || lu.rcond() < 1e-12)
        throw std::invalid_argument("eliminate_double_occupancy: singular H_QQ (u = 0?)");

    Eigen::MatrixXcd m = hpp - hpq * lu.solve(hqp);
    return {fock::singly_occupied_basis(), std::move(m)};
}

/// Closed-form eigenvalues and eigenvectors of the effective Hamiltonian.
/// v5 carries the sign-corrected (1,0,1) components (+1/xi+, -1/xi+); the
/// variant with flipped signs there has eigen-residual O(t) and fails the
/// residual check.
inline AnalyticSpectrum analytic_spectrum(const EffectiveParams& p) {
    p.validate();
    const double t = p.t, j = p.j;
    const double s = std::sqrt(9 * j * j + 2 * t * t);

    AnalyticSpectrum out;
    out.eta_plus = -(3 * j + s);
    out.eta_minus = -(3 * j - s);
    out.xi_plus = std::sqrt(2 + out.eta_plus * out.eta_plus / (t * t));
    out.xi_minus = std::sqrt(2 + out.eta_minus * out.eta_minus / (t * t));

    out.eigenvalues.resize(6);
    out.eigenvalues << 0.0, -2 * j, -std::numbers::sqrt2 * t, std::numbers::sqrt2 * t,
        out.eta_plus, out.eta_minus;

    const double r8 = 1.0 / (2 * std::numbers::sqrt2);
    const double a5 = out.eta_plus / (2 * t * out.xi_plus);
    const double a6 = out.eta_minus / (2 * t * out.xi_minus);
    const double b5 = 1.0 / out.xi_plus;
    const double b6 = 1.0 / out.xi_minus;

    out.eigenvectors.resize(6, 6);
    out.eigenvectors.col(0) << 0.5, 0.5, -0.5, -0.5, 0, 0;
    out.eigenvectors.col(1) << -0.5, 0.5, 0.5, -0.5, 0, 0;
    out.eigenvectors.col(2) << -r8, -r8, -r8, -r8, 0.5, 0.5;
    out.eigenvectors.col(3) << r8, r8, r8, r8, 0.5, 0.5;
    out.eigenvectors.col(4) << a5, -a5, a5, -a5, b5, -b5;
    out.eigenvectors.col(5) << a6, -a6, a6, -a6, b6, -b6;
    return out;
}

/// Squared overlap of the evolved (1,0,1) up-down state with the entangled
/// target, in the U >> t limit:
///   cos^2(sqrt(2) t tau)/8 * [(1 + sqrt(2)cos(3J tau - pi/4))^2
///                             + (1 - sqrt(2)cos(3J tau + pi/4))^2].
inline double analytic_overlap(double tau, const EffectiveParams& p) {
    p.validate();
    if (tau < 0.0) throw std::invalid_argument("analytic_overlap: tau must be >= 0");
    const double fast = std::cos(std::numbers::sqrt2 * p.t * tau);
    const double th = 3 * p.j * tau;
    const double plus = 1 + std::numbers::sqrt2 * std::cos(th - std::numbers::pi / 4);
    const double minus = 1 - std::numbers::sqrt2 * std::cos(th + std::numbers::pi / 4);
    return fast * fast / 8.0 * (plus * plus + minus * minus);
}

/// Charge-revival times tau_m = m 2pi/(sqrt(2) t): the (1,0,1) same-spin
/// state returns with amplitude +1.
inline double return_times(double t, int m) {
    if (!(t > 0.0)) throw std::invalid_argument("return_times: t must be > 0");
    if (m < 1) throw std::invalid_argument("return_times: m must be >= 1");
    return m * 2 * std::numbers::pi / (std::numbers::sqrt2 * t);
}

/// Times where the slow exchange envelope reaches 1, i.e. 3J tau = pi/2
/// (mod 2pi): tau'_n = (4n+1) pi/(6J).
inline double target_times(double j, int n) {
    if (!(j > 0.0)) throw std::invalid_argument("target_times: j must be > 0");
    if (n < 0) throw std::invalid_argument("target_times: n must be >= 0");
    return (4 * n + 1) * std::numbers::pi / (6 * j);
}

}  // namespace tripledot::tjmodel
