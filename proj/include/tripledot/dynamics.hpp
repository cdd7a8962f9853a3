#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "tripledot/fock.hpp"
#include "tripledot/hubbard.hpp"

namespace tripledot::dynamics {

using Complex = std::complex<double>;

/// Normalized state in a declared basis.
struct StateVector {
    fock::Basis basis;
    Eigen::VectorXcd amps;

    double norm() const { return amps.norm(); }
};

inline void require_same_basis(const fock::Basis& a, const fock::Basis& b) {
    if (!(a == b)) throw std::invalid_argument("basis mismatch");
}

/// |<phi|psi>|^2.
inline double squared_overlap(const StateVector& psi, const StateVector& phi) {
    require_same_basis(psi.basis, phi.basis);
    return std::norm(phi.amps.dot(psi.amps));
}

namespace detail {

/// Eigendecomposition-based propagator for one Hermitian matrix; buffers are
/// reused across steps.
class HermitianStepper {
  public:
    void factor(const Eigen::MatrixXcd& h) {
        const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
        if (hubbard::hermiticity_defect(h) > 1e-12 * scale)
            throw std::invalid_argument("propagator: step matrix is not Hermitian");
        herm_ = 0.5 * (h + h.adjoint());
        es_.compute(herm_);
        if (es_.info() != Eigen::Success)
            throw std::runtime_error("propagator: eigendecomposition failed");
    }

    void apply(double tau, Eigen::VectorXcd& psi) const {
        const auto& v = es_.eigenvectors();
        const auto& lam = es_.eigenvalues();
        coeff_ = v.adjoint() * psi;
        for (int k = 0; k < coeff_.size(); ++k)
            coeff_(k) *= std::polar(1.0, -lam(k) * tau);
        psi = v * coeff_;
    }

    const Eigen::VectorXd& eigenvalues() const { return es_.eigenvalues(); }
    const Eigen::MatrixXcd& eigenvectors() const { return es_.eigenvectors(); }

  private:
    Eigen::MatrixXcd herm_;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_;
    mutable Eigen::VectorXcd coeff_;
};

}  // namespace detail

/// psi(tau) = exp(-i H tau) psi0 via Hermitian eigendecomposition (hbar = 1).
inline StateVector evolve_static(const hubbard::HamiltonianMatrix& h, const StateVector& psi0,
                                 double tau) {
    require_same_basis(h.basis, psi0.basis);
    detail::HermitianStepper stepper;
    stepper.factor(h.m);
    StateVector out = psi0;
    stepper.apply(tau, out.amps);
    return out;
}

/// Fills `h` with the Hamiltonian of step k (constant over [k dt, (k+1) dt)).
using StepProvider = std::function<void(std::size_t step, Eigen::MatrixXcd& h)>;
/// Called with the state at each grid time, index 0 = initial state.
using StepObserver = std::function<void(std::size_t index, double time, const Eigen::VectorXcd& psi)>;

/// Piecewise-constant propagation: psi_{k+1} = exp(-i H_k dt) psi_k with each
/// step propagator computed exactly by eigendecomposition.
inline StateVector evolve_piecewise(const StepProvider& provider, const StateVector& psi0,
                                    double dt, std::size_t n_steps,
                                    const StepObserver& observer = {}) {
    if (!(dt > 0.0)) throw std::invalid_argument("evolve_piecewise: dt must be > 0");
    const int n = psi0.basis.dim();
    StateVector out = psi0;
    Eigen::MatrixXcd h(n, n);
    detail::HermitianStepper stepper;

    if (observer) observer(0, 0.0, out.amps);
    for (std::size_t k = 0; k < n_steps; ++k) {
        h.setZero();
        provider(k, h);
        stepper.factor(h);
        stepper.apply(dt, out.amps);
        if (std::abs(out.norm() - 1.0) > 1e-6)
            throw std::runtime_error("evolve_piecewise: norm drift exceeded 1e-6");
        if (observer) observer(k + 1, static_cast<double>(k + 1) * dt, out.amps);
    }
    return out;
}

/// Uniform time grid with the recorded states, for tests and small runs.
struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXcd> states;
};

inline Trajectory record_trajectory(const StepProvider& provider, const StateVector& psi0,
                                    double dt, std::size_t n_steps) {
    Trajectory tr;
    tr.times.reserve(n_steps + 1);
    tr.states.reserve(n_steps + 1);
    evolve_piecewise(provider, psi0, dt, n_steps,
                     [&](std::size_t, double time, const Eigen::VectorXcd& psi) {
                         tr.times.push_back(time);
                         tr.states.push_back(psi);
                     });
    return tr;
}

}  // namespace tripledot::dynamics
