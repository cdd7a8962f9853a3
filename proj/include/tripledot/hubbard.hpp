#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "tripledot/fock.hpp"

namespace tripledot::hubbard {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Mott-Hubbard parameters in scaled energy units (10 ueV = 1).
struct HubbardParams {
    std::array<double, 3> e{0.0, 0.0, 0.0};  // onsite energies E_A, E_C, E_B
    double t_ac = 0.0;                       // tunneling A <-> C
    double t_cb = 0.0;                       // tunneling C <-> B
    std::array<double, 3> u{0.0, 0.0, 0.0};  // Coulomb repulsion U_A, U_C, U_B

    /// Processing mode: all onsite energies aligned, equal tunneling, one U.
    static HubbardParams processing(double t, double u_all) {
        HubbardParams p;
        p.t_ac = p.t_cb = t;
        p.u = {u_all, u_all, u_all};
        return p;
    }

    void validate() const {
        for (double v : e)
            if (!std::isfinite(v)) throw std::invalid_argument("HubbardParams: non-finite onsite energy");
        for (double v : u) {
            if (!std::isfinite(v)) throw std::invalid_argument("HubbardParams: non-finite U");
            if (v < 0.0) throw std::invalid_argument("HubbardParams: U must be non-negative");
        }
        if (!std::isfinite(t_ac) || !std::isfinite(t_cb))
            throw std::invalid_argument("HubbardParams: non-finite tunneling");
    }
};

/// Quasistatic per-dot magnetic fields, folded into energy units.
struct NuclearFields {
    std::array<Eigen::Vector3d, 3> b{Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(),
                                     Eigen::Vector3d::Zero()};
};

/// Dense Hermitian matrix together with the basis it was built in.
struct HamiltonianMatrix {
    fock::Basis basis;
    Matrix m;
};

inline double hermiticity_defect(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline void require_hermitian(const Matrix& m, double tol = 1e-12) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (hermiticity_defect(m) > tol * scale)
        throw std::invalid_argument("matrix is not Hermitian");
}

namespace detail {

// Accumulates amp * d^+_to d_from |ket> into column y of m.
inline void add_hop(Matrix& m, const fock::Basis& basis, int y, fock::FockState ket,
                    fock::SpinOrbital from, fock::SpinOrbital to, double amp) {
    auto ann = fock::apply_annihilation(ket, from);
    if (!ann) return;
    auto cre = fock::apply_creation(ann->state, to);
    if (!cre) return;
    const int x = basis.index_of(cre->state);
    if (x < 0) throw std::logic_error("hopping left the basis");
    m(x, y) += amp * static_cast<double>(ann->sign * cre->sign);
}

}  // namespace detail

/// Hubbard Hamiltonian: onsite energies, A<->C and C<->B tunneling (no direct
/// A<->B), and onsite repulsion U/2 n(n-1).  Elements are obtained by
/// sign-correct operator application on each basis ket.
inline HamiltonianMatrix build_hubbard(const HubbardParams& p, const fock::Basis& basis) {
    p.validate();
    const int n = basis.dim();
    Matrix m = Matrix::Zero(n, n);

    struct Bond {
        fock::Dot a, b;
        double t;
    };
    const std::array<Bond, 2> bonds{Bond{fock::Dot::A, fock::Dot::C, p.t_ac},
                                    Bond{fock::Dot::C, fock::Dot::B, p.t_cb}};

    for (int y = 0; y < n; ++y) {
        const fock::FockState ket = basis.states[static_cast<std::size_t>(y)];
        double diag = 0.0;
        for (int d = 0; d < 3; ++d) {
            const int nd = ket.dot_occupation(static_cast<fock::Dot>(d));
            diag += p.e[static_cast<std::size_t>(d)] * nd;
            diag += 0.5 * p.u[static_cast<std::size_t>(d)] * nd * (nd - 1);
        }
        m(y, y) += diag;

        for (const auto& bond : bonds) {
            if (bond.t == 0.0) continue;
            for (auto spin : {fock::Spin::Up, fock::Spin::Down}) {
                const fock::SpinOrbital pa{bond.a, spin}, pb{bond.b, spin};
                detail::add_hop(m, basis, y, ket, pa, pb, bond.t);
                detail::add_hop(m, basis, y, ket, pb, pa, bond.t);
            }
        }
    }
    return {basis, std::move(m)};
}

/// Zeeman term sum_i (B_i . sigma / 2)_{ss'} d^+_{is} d_{is'}.  Transverse
/// components mix S_z sectors, so the full 15-state basis is required.
inline HamiltonianMatrix build_zeeman(const NuclearFields& f, const fock::Basis& basis) {
    if (basis.kind != fock::BasisKind::Full)
        throw std::invalid_argument("build_zeeman: transverse fields break S_z, use the full basis");
    const int n = basis.dim();
    Matrix m = Matrix::Zero(n, n);

    for (int d = 0; d < 3; ++d) {
        const Eigen::Vector3d& b = f.b[static_cast<std::size_t>(d)];
        if (!b.allFinite()) throw std::invalid_argument("build_zeeman: non-finite field");
        // (B . sigma)/2 in the (up, down) spin basis.
        const Complex h_uu(0.5 * b.z(), 0.0);
        const Complex h_ud(0.5 * b.x(), -0.5 * b.y());
        std::array<std::array<Complex, 2>, 2> h{{{h_uu, h_ud}, {std::conj(h_ud), -h_uu}}};

        for (int y = 0; y < n; ++y) {
            const fock::FockState ket = basis.states[static_cast<std::size_t>(y)];
            for (int s = 0; s < 2; ++s) {
                for (int sp = 0; sp < 2; ++sp) {
                    if (h[s][sp] == Complex(0.0, 0.0)) continue;
                    const fock::SpinOrbital from{static_cast<fock::Dot>(d), static_cast<fock::Spin>(sp)};
                    const fock::SpinOrbital to{static_cast<fock::Dot>(d), static_cast<fock::Spin>(s)};
                    auto ann = fock::apply_annihilation(ket, from);
                    if (!ann) continue;
                    auto cre = fock::apply_creation(ann->state, to);
                    if (!cre) continue;
                    const int x = basis.index_of(cre->state);
                    if (x < 0) throw std::logic_error("Zeeman term left the basis");
                    m(x, y) += h[s][sp] * static_cast<double>(ann->sign * cre->sign);
                }
            }
        }
    }
    return {basis, std::move(m)};
}

/// Sub-matrix of a full-basis Hamiltonian on one S_z sector.  Errors out if
/// the matrix actually couples the sector to the rest.
inline HamiltonianMatrix sector_block(const HamiltonianMatrix& h, int sz) {
    if (h.basis.kind != fock::BasisKind::Full)
        throw std::invalid_argument("sector_block: input must be built on the full basis");
    fock::Basis sector = fock::enumerate_sector(sz);

    const int n = h.basis.dim();
    std::vector<int> pos;
    std::vector<bool> in_sector(static_cast<std::size_t>(n), false);
    for (const auto& s : sector.states) {
        const int i = h.basis.index_of(s);
        if (i < 0) throw std::logic_error("sector state missing from full basis");
        pos.push_back(i);
        in_sector[static_cast<std::size_t>(i)] = true;
    }

    const double scale = std::max(1.0, h.m.cwiseAbs().maxCoeff());
    double off = 0.0;
    for (int i : pos)
        for (int j = 0; j < n; ++j)
            if (!in_sector[static_cast<std::size_t>(j)])
                off = std::max({off, std::abs(h.m(i, j)), std::abs(h.m(j, i))});
    if (off > 1e-12 * scale)
        throw std::invalid_argument("sector_block: matrix is not block-diagonal in S_z");

    const int k = sector.dim();
    Matrix sub(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sub(i, j) = h.m(pos[static_cast<std::size_t>(i)], pos[static_cast<std::size_t>(j)]);
    return {std::move(sector), std::move(sub)};
}

/// Diagonal occupation-number matrix n_dot in the given basis.
inline Matrix occupation_matrix(fock::Dot dot, const fock::Basis& basis) {
    const int n = basis.dim();
    Matrix m = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        m(i, i) = static_cast<double>(basis.states[static_cast<std::size_t>(i)].dot_occupation(dot));
    return m;
}

/// Both hopping bonds at unit amplitude; the matrix charge noise modulates.
inline Matrix hopping_pattern(const fock::Basis& basis) {
    HubbardParams p;
    p.t_ac = p.t_cb = 1.0;
    return build_hubbard(p, basis).m;
}

}  // namespace tripledot::hubbard
