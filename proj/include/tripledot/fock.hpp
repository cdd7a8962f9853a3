#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tripledot::fock {

// Three dots in a row, A -- C -- B, with C the central dot.
enum class Dot : int { A = 0, C = 1, B = 2 };
enum class Spin : int { Up = 0, Down = 1 };

/// One of the six spin-orbitals.  Canonical linear order is
/// A-up < A-down < C-up < C-down < B-up < B-down (indices 0..5).
struct SpinOrbital {
    Dot dot;
    Spin spin;

    constexpr int index() const noexcept {
        return 2 * static_cast<int>(dot) + static_cast<int>(spin);
    }
    static constexpr SpinOrbital from_index(int i) {
        return {static_cast<Dot>(i / 2), static_cast<Spin>(i % 2)};
    }
    constexpr bool operator==(const SpinOrbital&) const = default;

    std::string label() const {
        static const char* dots = "ACB";
        std::string s(1, dots[static_cast<int>(dot)]);
        s += (spin == Spin::Up) ? "u" : "d";
        return s;
    }
};

inline constexpr SpinOrbital AU{Dot::A, Spin::Up}, AD{Dot::A, Spin::Down},
    CU{Dot::C, Spin::Up}, CD{Dot::C, Spin::Down},
    BU{Dot::B, Spin::Up}, BD{Dot::B, Spin::Down};

inline constexpr int kNumOrbitals = 6;

/// Occupation-number state over the six spin-orbitals.  The convention is
/// |n0 n1 .. n5> = (d0^+)^n0 (d1^+)^n1 .. (d5^+)^n5 |vac>, so a mask fixes
/// the state including its sign.
struct FockState {
    std::uint8_t mask = 0;

    constexpr bool occupied(SpinOrbital p) const noexcept {
        return mask & (1u << p.index());
    }
    constexpr int electrons() const noexcept { return std::popcount(mask); }
    constexpr bool operator==(const FockState&) const = default;

    int dot_occupation(Dot d) const noexcept {
        const int base = 2 * static_cast<int>(d);
        return ((mask >> base) & 1) + ((mask >> (base + 1)) & 1);
    }
    /// n_up - n_down, i.e. twice the total spin-z.
    int sz_twice() const noexcept {
        int up = std::popcount(static_cast<unsigned>(mask & 0b010101));
        int dn = std::popcount(static_cast<unsigned>(mask & 0b101010));
        return up - dn;
    }
    std::string label() const {
        std::string s;
        for (int i = 0; i < kNumOrbitals; ++i)
            if (mask & (1u << i)) s += SpinOrbital::from_index(i).label();
        return s.empty() ? "vac" : s;
    }
};

inline constexpr FockState kVacuum{};

struct Applied {
    FockState state;
    int sign;  // +1 or -1
};

/// d^+_p |s>.  Null if p is already occupied; otherwise the sign is
/// (-1)^(number of occupied orbitals with index below p).
inline std::optional<Applied> apply_creation(FockState s, SpinOrbital p) {
    const unsigned bit = 1u << p.index();
    if (s.mask & bit) return std::nullopt;
    const int parity = std::popcount(static_cast<unsigned>(s.mask & (bit - 1)));
    return Applied{FockState{static_cast<std::uint8_t>(s.mask | bit)},
                   (parity % 2 == 0) ? +1 : -1};
}

/// d_p |s>.  Null if p is unoccupied; same sign rule as apply_creation.
inline std::optional<Applied> apply_annihilation(FockState s, SpinOrbital p) {
    const unsigned bit = 1u << p.index();
    if (!(s.mask & bit)) return std::nullopt;
    const int parity = std::popcount(static_cast<unsigned>(s.mask & (bit - 1)));
    return Applied{FockState{static_cast<std::uint8_t>(s.mask & ~bit)},
                   (parity % 2 == 0) ? +1 : -1};
}

/// Canonical two-electron product state d^+_p d^+_q |vac> with p < q.
inline FockState two_electron(SpinOrbital p, SpinOrbital q) {
    if (p.index() >= q.index())
        throw std::invalid_argument("two_electron: orbitals must be ordered p < q");
    return FockState{static_cast<std::uint8_t>((1u << p.index()) | (1u << q.index()))};
}

enum class BasisKind { SzPlus, SzZero, SzMinus, Full, SinglyOccupied };

/// Ordered list of two-electron basis states with a fast mask -> position map.
struct Basis {
    BasisKind kind;
    std::vector<FockState> states;

    Basis(BasisKind k, std::vector<FockState> st) : kind(k), states(std::move(st)) {
        lookup_.fill(-1);
        for (std::size_t i = 0; i < states.size(); ++i)
            lookup_[states[i].mask] = static_cast<int>(i);
    }

    int dim() const noexcept { return static_cast<int>(states.size()); }
    int index_of(FockState s) const noexcept { return lookup_[s.mask]; }
    bool operator==(const Basis& o) const {
        return kind == o.kind && states == o.states;
    }

  private:
    std::array<int, 64> lookup_{};
};

namespace detail {

// S_z = +1 sector.  The (1,0,1) state AuBu is the hopping hub (either outer
// electron can tunnel into the empty central dot), so it is listed first;
// the two singly-displaced configurations follow.
inline std::vector<FockState> sz_plus_states() {
    return {two_electron(AU, BU), two_electron(AU, CU), two_electron(CU, BU)};
}

// S_z = 0 sector, singly occupied states first, doubly occupied last.  The
// trailing double-occupancy block is what adiabatic elimination removes.
inline std::vector<FockState> sz_zero_states() {
    return {two_electron(AU, CD), two_electron(AD, CU), two_electron(CU, BD),
            two_electron(CD, BU), two_electron(AU, BD), two_electron(AD, BU),
            two_electron(AU, AD), two_electron(BU, BD), two_electron(CU, CD)};
}

// S_z = -1 sector, the spin-flip mirror of S_z = +1 in the same order.
inline std::vector<FockState> sz_minus_states() {
    return {two_electron(AD, BD), two_electron(AD, CD), two_electron(CD, BD)};
}

}  // namespace detail

/// Two-electron basis of one total-S_z sector, sz in {-1, 0, +1}.
inline Basis enumerate_sector(int sz) {
    switch (sz) {
        case +1: return Basis(BasisKind::SzPlus, detail::sz_plus_states());
        case 0: return Basis(BasisKind::SzZero, detail::sz_zero_states());
        case -1: return Basis(BasisKind::SzMinus, detail::sz_minus_states());
        default:
            throw std::invalid_argument("enumerate_sector: sz must be -1, 0 or +1");
    }
}

/// All 15 two-electron states, ordered S_z = +1, 0, -1 sector by sector.
inline Basis full_basis() {
    std::vector<FockState> all = detail::sz_plus_states();
    for (auto s : detail::sz_zero_states()) all.push_back(s);
    for (auto s : detail::sz_minus_states()) all.push_back(s);
    return Basis(BasisKind::Full, std::move(all));
}

/// The six singly occupied S_z = 0 states, the domain of the effective
/// t-J Hamiltonian.
inline Basis singly_occupied_basis() {
    auto st = detail::sz_zero_states();
    st.resize(6);
    return Basis(BasisKind::SinglyOccupied, std::move(st));
}

inline int sector_sz(BasisKind k) {
    switch (k) {
        case BasisKind::SzPlus: return +1;
        case BasisKind::SzZero:
        case BasisKind::SinglyOccupied: return 0;
        case BasisKind::SzMinus: return -1;
        default: throw std::logic_error("sector_sz: basis is not a single sector");
    }
}

}  // namespace tripledot::fock
