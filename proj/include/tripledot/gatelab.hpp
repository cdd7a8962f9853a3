#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "tripledot/dynamics.hpp"
#include "tripledot/fock.hpp"
#include "tripledot/hubbard.hpp"
#include "tripledot/noise.hpp"
#include "tripledot/rng.hpp"
#include "tripledot/tjmodel.hpp"

namespace tripledot::gatelab {

using Complex = std::complex<double>;

enum class InitialKind { UpUp, UpDown, DownUp, DownDown, Superposition };
enum class TargetKind { SelfOverlap, Gate, PartialSwap, SuperpositionImage };

namespace detail {

inline fock::FockState pair_state(InitialKind k) {
    switch (k) {
        case InitialKind::UpUp: return fock::two_electron(fock::AU, fock::BU);
        case InitialKind::UpDown: return fock::two_electron(fock::AU, fock::BD);
        case InitialKind::DownUp: return fock::two_electron(fock::AD, fock::BU);
        case InitialKind::DownDown: return fock::two_electron(fock::AD, fock::BD);
        default: throw std::invalid_argument("pair_state: not a basis pair");
    }
}

inline int state_index(const fock::Basis& basis, fock::FockState s) {
    const int i = basis.index_of(s);
    if (i < 0) throw std::invalid_argument("state is not in the given basis");
    return i;
}

}  // namespace detail

/// The (1,0,1) computational basis state embedded in `basis`.
inline dynamics::StateVector initial_state(InitialKind k, const fock::Basis& basis) {
    dynamics::StateVector psi{basis, Eigen::VectorXcd::Zero(basis.dim())};
    if (k == InitialKind::Superposition) {
        psi.amps(detail::state_index(basis, detail::pair_state(InitialKind::UpUp))) = 1.0 / std::numbers::sqrt2;
        psi.amps(detail::state_index(basis, detail::pair_state(InitialKind::UpDown))) = 1.0 / std::numbers::sqrt2;
    } else {
        psi.amps(detail::state_index(basis, detail::pair_state(k))) = 1.0;
    }
    return psi;
}

/// Image of a computational basis state under the entangling gate:
/// up-up and down-down map to themselves, the mixed states map to
/// exp(i pi/4) (|sd> - i |ds>)/sqrt(2).
inline dynamics::StateVector gate_target(InitialKind k, const fock::Basis& basis) {
    dynamics::StateVector phi{basis, Eigen::VectorXcd::Zero(basis.dim())};
    const Complex pre = std::polar(1.0 / std::numbers::sqrt2, std::numbers::pi / 4);
    switch (k) {
        case InitialKind::UpUp:
        case InitialKind::DownDown:
            phi.amps(detail::state_index(basis, detail::pair_state(k))) = 1.0;
            break;
        case InitialKind::UpDown:
            phi.amps(detail::state_index(basis, detail::pair_state(InitialKind::UpDown))) = pre;
            phi.amps(detail::state_index(basis, detail::pair_state(InitialKind::DownUp))) = pre * Complex(0, -1);
            break;
        case InitialKind::DownUp:
            phi.amps(detail::state_index(basis, detail::pair_state(InitialKind::DownUp))) = pre;
            phi.amps(detail::state_index(basis, detail::pair_state(InitialKind::UpDown))) = pre * Complex(0, -1);
            break;
        default:
            throw std::invalid_argument("gate_target: input must be a computational basis state");
    }
    return phi;
}

/// The gate as a 4x4 unitary on (uu, ud, du, dd).
inline Eigen::Matrix4cd gate_unitary() {
    Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
    const Complex pre = std::polar(1.0 / std::numbers::sqrt2, std::numbers::pi / 4);
    u(0, 0) = 1.0;
    u(3, 3) = 1.0;
    u(1, 1) = pre;
    u(2, 1) = pre * Complex(0, -1);
    u(2, 2) = pre;
    u(1, 2) = pre * Complex(0, -1);
    return u;
}

/// Two-qubit concurrence 2|ad - bc| of amplitudes (a, b, c, d).
inline double concurrence(const Eigen::Vector4cd& amps) {
    return 2.0 * std::abs(amps(0) * amps(3) - amps(1) * amps(2));
}

/// Partial-swap trajectory exp(i 3J tau/2)(cos(3J tau/2)|ud> - i sin(3J tau/2)|du>),
/// the ideal image of up-down in the strong-tunneling regime; `mirrored`
/// swaps the roles of the two mixed states (the down-up seeded version).
inline dynamics::StateVector partial_swap_target(double tau, double j, const fock::Basis& basis,
                                                 bool mirrored = false) {
    if (tau < 0.0) throw std::invalid_argument("partial_swap_target: tau must be >= 0");
    const double th = 1.5 * j * tau;
    const Complex pre = std::polar(1.0, th);
    dynamics::StateVector phi{basis, Eigen::VectorXcd::Zero(basis.dim())};
    const int i_ud = detail::state_index(basis, detail::pair_state(InitialKind::UpDown));
    const int i_du = detail::state_index(basis, detail::pair_state(InitialKind::DownUp));
    phi.amps(mirrored ? i_du : i_ud) = pre * std::cos(th);
    phi.amps(mirrored ? i_ud : i_du) = pre * Complex(0, -1) * std::sin(th);
    return phi;
}

/// Normalized ideal image of (|uu> + |ud>)/sqrt(2) under the gate:
/// (1/sqrt(2))|uu> + (exp(i pi/4)/2)(|ud> - i |du>).
inline dynamics::StateVector superposition_target(const fock::Basis& basis) {
    dynamics::StateVector phi{basis, Eigen::VectorXcd::Zero(basis.dim())};
    const Complex pre = std::polar(0.5, std::numbers::pi / 4);
    phi.amps(detail::state_index(basis, detail::pair_state(InitialKind::UpUp))) = 1.0 / std::numbers::sqrt2;
    phi.amps(detail::state_index(basis, detail::pair_state(InitialKind::UpDown))) = pre;
    phi.amps(detail::state_index(basis, detail::pair_state(InitialKind::DownUp))) = pre * Complex(0, -1);
    return phi;
}

/// Charge-noise model: a 1/f detuning added to the dot energies through
/// `coupling` (central dot by default), with both tunnel couplings following
/// the Gaussian profile of the energy mismatch.
struct ChargeNoiseSettings {
    double amplitude = 0.0;
    double f_min = 0.0;  // 0: lowest resolvable frequency, 1/(run length)
    double f_max = 0.0;  // 0: Nyquist
    double width = 0.01;
    std::array<double, 3> coupling{0.0, 1.0, 0.0};
};

struct NuclearSettings {
    double b_nuc = 0.1;
};

struct ExperimentConfig {
    hubbard::HubbardParams params;
    InitialKind initial = InitialKind::UpDown;
    std::vector<TargetKind> targets{TargetKind::Gate};
    double dt = 0.01;
    double tau_max = 20.0;
    std::optional<ChargeNoiseSettings> charge;
    std::optional<NuclearSettings> nuclear;
    int n_mc = 1;
    std::uint64_t seed = 0;
    int workers = 1;

    void validate() const {
        params.validate();
        if (!(dt > 0.0) || !(tau_max > 0.0))
            throw std::invalid_argument("ExperimentConfig: need dt > 0 and tau_max > 0");
        if (n_mc < 1) throw std::invalid_argument("ExperimentConfig: need n_mc >= 1");
        if (targets.empty()) throw std::invalid_argument("ExperimentConfig: no targets");
        if (charge && params.t_ac != params.t_cb)
            throw std::invalid_argument("ExperimentConfig: charge noise assumes t_ac == t_cb");
    }
};

/// Time grid plus per-target mean squared overlaps and standard errors,
/// with the generating configuration echoed for provenance.
struct FidelityTrace {
    std::vector<double> times;
    std::vector<std::vector<double>> mean;            // [target][time]
    std::vector<std::vector<double>> standard_error;  // [target][time], zero when n_mc == 1
    std::uint64_t seed = 0;
    int n_mc = 1;
    hubbard::HubbardParams params;
};

namespace detail {

inline tjmodel::EffectiveParams effective_of(const hubbard::HubbardParams& p) {
    if (p.t_ac != p.t_cb) throw std::invalid_argument("effective model assumes t_ac == t_cb");
    if (!(p.u[0] == p.u[1] && p.u[1] == p.u[2]))
        throw std::invalid_argument("effective model assumes a single U");
    return tjmodel::EffectiveParams::from_hubbard(p.t_ac, p.u[0]);
}

struct TargetEval {
    TargetKind kind;
    Eigen::VectorXcd fixed;  // conjugated amplitudes for fixed targets
    int i_ud = -1, i_du = -1;
    double j = 0.0;

    double overlap(double tau, const Eigen::VectorXcd& psi) const {
        if (kind == TargetKind::PartialSwap) {
            const double th = 1.5 * j * tau;
            const Complex amp = std::polar(1.0, -th) *
                (std::cos(th) * psi(i_ud) + Complex(0, 1) * std::sin(th) * psi(i_du));
            return std::norm(amp);
        }
        return std::norm(fixed.dot(psi));
    }
};

inline std::vector<TargetEval> prepare_targets(const ExperimentConfig& cfg, const fock::Basis& basis) {
    std::vector<TargetEval> out;
    for (TargetKind k : cfg.targets) {
        TargetEval ev;
        ev.kind = k;
        switch (k) {
            case TargetKind::SelfOverlap:
                ev.fixed = initial_state(cfg.initial, basis).amps;
                break;
            case TargetKind::Gate:
                ev.fixed = gate_target(cfg.initial, basis).amps;
                break;
            case TargetKind::SuperpositionImage:
                ev.fixed = superposition_target(basis).amps;
                break;
            case TargetKind::PartialSwap:
                ev.i_ud = state_index(basis, pair_state(InitialKind::UpDown));
                ev.i_du = state_index(basis, pair_state(InitialKind::DownUp));
                ev.j = effective_of(cfg.params).j;
                break;
        }
        out.push_back(std::move(ev));
    }
    return out;
}

}  // namespace detail

/// Basis an experiment runs in: the full 15-state space once nuclear fields
/// mix the sectors (or the initial state spans two of them), otherwise the
/// S_z sector of the initial state.
inline fock::Basis experiment_basis(const ExperimentConfig& cfg) {
    if (cfg.nuclear || cfg.initial == InitialKind::Superposition) return fock::full_basis();
    switch (cfg.initial) {
        case InitialKind::UpUp: return fock::enumerate_sector(+1);
        case InitialKind::DownDown: return fock::enumerate_sector(-1);
        default: return fock::enumerate_sector(0);
    }
}

/// Monte-Carlo fidelity trace.  Sample s draws its charge trace from stream
/// 2s and its nuclear fields from stream 2s+1 of the master seed, so the
/// result is a pure function of (seed, n_mc) no matter how many workers run.
inline FidelityTrace fidelity_trace(const ExperimentConfig& cfg) {
    cfg.validate();
    const fock::Basis basis = experiment_basis(cfg);
    const int dim = basis.dim();
    const std::size_t n_steps = static_cast<std::size_t>(std::lround(cfg.tau_max / cfg.dt));
    if (n_steps == 0) throw std::invalid_argument("fidelity_trace: empty time grid");
    const std::size_t n_times = n_steps + 1;
    const std::size_t n_targets = cfg.targets.size();

    const dynamics::StateVector psi0 = initial_state(cfg.initial, basis);
    const std::vector<detail::TargetEval> targets = detail::prepare_targets(cfg, basis);

    // Static pieces shared by all samples.
    hubbard::HubbardParams static_params = cfg.params;
    Eigen::MatrixXcd hop_pattern, coupled_occ;
    double t0 = 0.0;
    if (cfg.charge) {
        t0 = cfg.params.t_ac;
        static_params.t_ac = static_params.t_cb = 0.0;
        hop_pattern = hubbard::hopping_pattern(basis);
        coupled_occ = Eigen::MatrixXcd::Zero(dim, dim);
        for (int d = 0; d < 3; ++d)
            if (cfg.charge->coupling[static_cast<std::size_t>(d)] != 0.0)
                coupled_occ += cfg.charge->coupling[static_cast<std::size_t>(d)] *
                               hubbard::occupation_matrix(static_cast<fock::Dot>(d), basis);
    }
    const Eigen::MatrixXcd h_static = hubbard::build_hubbard(static_params, basis).m;

    noise::OneOverFConfig trace_cfg;
    if (cfg.charge) {
        trace_cfg.amplitude = cfg.charge->amplitude;
        trace_cfg.n_samples = n_steps;
        trace_cfg.dt = cfg.dt;
        trace_cfg.seed = cfg.seed;
        trace_cfg.f_min = cfg.charge->f_min > 0.0 ? cfg.charge->f_min
                                                  : 1.0 / (static_cast<double>(n_steps) * cfg.dt);
        trace_cfg.f_max = cfg.charge->f_max > 0.0 ? cfg.charge->f_max : 0.5 / cfg.dt;
    }

    // Per-sample rows, reduced in sample order afterwards.
    std::vector<double> rows(static_cast<std::size_t>(cfg.n_mc) * n_targets * n_times);

    auto run_sample = [&](int s) {
        Eigen::MatrixXcd h_sample = h_static;
        if (cfg.nuclear) {
            rng::StreamRng gen(cfg.seed, 2 * static_cast<std::uint64_t>(s) + 1);
            h_sample += hubbard::build_zeeman(noise::sample_nuclear(cfg.nuclear->b_nuc, gen), basis).m;
        }
        double* row = rows.data() + static_cast<std::size_t>(s) * n_targets * n_times;
        auto record = [&](std::size_t idx, double time, const Eigen::VectorXcd& psi) {
            for (std::size_t q = 0; q < n_targets; ++q)
                row[q * n_times + idx] = targets[q].overlap(time, psi);
        };

        if (cfg.charge) {
            noise::OneOverFConfig c = trace_cfg;
            c.stream = 2 * static_cast<std::uint64_t>(s);
            const noise::NoiseTrace delta = noise::gen_one_over_f(c);
            const noise::TunnelingProfile profile{t0, cfg.charge->width};
            dynamics::evolve_piecewise(
                [&](std::size_t k, Eigen::MatrixXcd& h) {
                    h = h_sample;
                    const double d = delta.values[k];
                    h += noise::tunneling_at(profile, d) * hop_pattern;
                    if (d != 0.0) h += d * coupled_occ;
                },
                psi0, cfg.dt, n_steps, record);
        } else {
            dynamics::detail::HermitianStepper stepper;
            stepper.factor(h_sample);
            Eigen::VectorXcd psi(dim);
            for (std::size_t k = 0; k < n_times; ++k) {
                psi = psi0.amps;
                const double time = static_cast<double>(k) * cfg.dt;
                stepper.apply(time, psi);
                record(k, time, psi);
            }
        }
    };

    const int workers = std::max(1, cfg.workers);
    if (workers == 1 || cfg.n_mc == 1) {
        for (int s = 0; s < cfg.n_mc; ++s) run_sample(s);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        const int n_threads = std::min(workers, cfg.n_mc);
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int w = 0; w < n_threads; ++w)
            pool.emplace_back([&] {
                for (int s = next.fetch_add(1); s < cfg.n_mc; s = next.fetch_add(1)) run_sample(s);
            });
        for (auto& th : pool) th.join();
    }

    FidelityTrace out;
    out.seed = cfg.seed;
    out.n_mc = cfg.n_mc;
    out.params = cfg.params;
    out.times.resize(n_times);
    for (std::size_t k = 0; k < n_times; ++k) out.times[k] = static_cast<double>(k) * cfg.dt;
    out.mean.assign(n_targets, std::vector<double>(n_times, 0.0));
    out.standard_error.assign(n_targets, std::vector<double>(n_times, 0.0));
    const double inv_n = 1.0 / static_cast<double>(cfg.n_mc);
    for (std::size_t q = 0; q < n_targets; ++q) {
        for (int s = 0; s < cfg.n_mc; ++s) {
            const double* row = rows.data() + (static_cast<std::size_t>(s) * n_targets + q) * n_times;
            for (std::size_t k = 0; k < n_times; ++k) out.mean[q][k] += row[k];
        }
        for (std::size_t k = 0; k < n_times; ++k) out.mean[q][k] *= inv_n;
        if (cfg.n_mc > 1) {
            for (int s = 0; s < cfg.n_mc; ++s) {
                const double* row = rows.data() + (static_cast<std::size_t>(s) * n_targets + q) * n_times;
                for (std::size_t k = 0; k < n_times; ++k) {
                    const double d = row[k] - out.mean[q][k];
                    out.standard_error[q][k] += d * d;
                }
            }
            const double norm = 1.0 / (static_cast<double>(cfg.n_mc) * static_cast<double>(cfg.n_mc - 1));
            for (std::size_t k = 0; k < n_times; ++k)
                out.standard_error[q][k] = std::sqrt(out.standard_error[q][k] * norm);
        }
    }
    return out;
}

/// Phase-verification run: initial (|uu> + |ud>)/sqrt(2) against the
/// normalized ideal gate image, same machinery as fidelity_trace.
inline FidelityTrace run_superposition_check(ExperimentConfig cfg) {
    cfg.initial = InitialKind::Superposition;
    cfg.targets = {TargetKind::SuperpositionImage};
    return fidelity_trace(cfg);
}

// ---------------------------------------------------------------------------
// Gate-time search
// ---------------------------------------------------------------------------

struct GateTimeWindow {
    double lo = 0.0;
    double hi = 0.0;
};

enum class GateTimeMode { ClosedForm, Hubbard };

struct GateTimeOptions {
    GateTimeMode mode = GateTimeMode::ClosedForm;
    double threshold = 0.999;  // earliest local optimum above this wins
    double grid_step = 0.002;
    int refine_iterations = 80;
};

struct GateTimeResult {
    double tau_star = 0.0;
    double f_upup = 0.0;
    double f_updown = 0.0;
    double f_phase = 0.0;
    double joint = 0.0;  // min(f_upup, f_updown)
};

namespace detail {

struct GatePoint {
    double amp_upup_re;  // Re <uu|psi(tau)>, used for the trivial-phase constraint
    double f_upup;
    double f_updown;
    double f_phase;
    bool valid;          // revival phase is trivial (not a pi-phase return)
    double joint;
};

class GateObjective {
  public:
    GateObjective(const hubbard::HubbardParams& params, GateTimeMode mode) : mode_(mode) {
        eff_ = effective_of(params);
        if (mode_ == GateTimeMode::Hubbard) {
            const fock::Basis b3 = fock::enumerate_sector(+1);
            const fock::Basis b9 = fock::enumerate_sector(0);
            s3_.factor(hubbard::build_hubbard(params, b3).m);
            s9_.factor(hubbard::build_hubbard(params, b9).m);
            psi3_ = initial_state(InitialKind::UpUp, b3).amps;
            psi9_ = initial_state(InitialKind::UpDown, b9).amps;
            target9_ = gate_target(InitialKind::UpDown, b9).amps;
        }
    }

    GatePoint at(double tau) const {
        GatePoint p{};
        Complex amp_uu, amp_t;
        if (mode_ == GateTimeMode::ClosedForm) {
            const double c = std::cos(std::numbers::sqrt2 * eff_.t * tau);
            const double phi = 3.0 * eff_.j * tau;
            amp_uu = c;
            amp_t = 0.5 * c * Complex(1.0 + std::sin(phi), -std::cos(phi));
        } else {
            Eigen::VectorXcd v3 = psi3_;
            s3_.apply(tau, v3);
            amp_uu = psi3_.dot(v3);
            Eigen::VectorXcd v9 = psi9_;
            s9_.apply(tau, v9);
            amp_t = target9_.dot(v9);
        }
        p.amp_upup_re = amp_uu.real();
        p.f_upup = std::norm(amp_uu);
        p.f_updown = std::norm(amp_t);
        p.f_phase = std::norm(0.5 * amp_uu + 0.5 * amp_t);
        // The declared gate needs the same-spin revival to come back with a
        // trivial phase; |.|^2 alone cannot see the pi-phase returns halfway
        // between the tau_m.
        p.valid = p.amp_upup_re >= -1e-9;
        p.joint = std::min(p.f_upup, p.f_updown);
        return p;
    }

  private:
    GateTimeMode mode_;
    tjmodel::EffectiveParams eff_{1.0, 0.0};
    dynamics::detail::HermitianStepper s3_, s9_;
    Eigen::VectorXcd psi3_, psi9_, target9_;
};

}  // namespace detail

/// Noiseless fidelities of the two tracked inputs plus the superposition
/// phase check at a single time, from exact sector evolution.
inline GateTimeResult noiseless_fidelities(const hubbard::HubbardParams& params, double tau) {
    detail::GateObjective obj(params, GateTimeMode::Hubbard);
    const auto p = obj.at(tau);
    return {tau, p.f_upup, p.f_updown, p.f_phase, p.joint};
}

/// Grid search plus local refinement for the gate time: maximizes
/// min(F_uu, F_ud->target) over trivial-phase revivals, returning the
/// earliest local optimum above `threshold`, else the window's best point.
inline GateTimeResult find_gate_time(const hubbard::HubbardParams& params, GateTimeWindow window,
                                     GateTimeOptions opt = {}) {
    if (!(window.hi >= window.lo) || window.hi < 0.0 || !std::isfinite(window.hi))
        throw std::invalid_argument("find_gate_time: empty window");
    const detail::GateObjective obj(params, opt.mode);

    auto result_at = [&](double tau) {
        const auto p = obj.at(tau);
        return GateTimeResult{tau, p.f_upup, p.f_updown, p.f_phase, p.joint};
    };

    if (window.hi - window.lo < opt.grid_step) return result_at(window.hi);

    const std::size_t n = static_cast<std::size_t>(std::ceil((window.hi - window.lo) / opt.grid_step));
    std::vector<detail::GatePoint> pts(n + 1);
    std::vector<double> taus(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        taus[i] = std::min(window.hi, window.lo + static_cast<double>(i) * opt.grid_step);
        pts[i] = obj.at(taus[i]);
    }

    auto refine = [&](std::size_t i) {
        double lo = taus[i > 0 ? i - 1 : 0];
        double hi = taus[std::min(n, i + 1)];
        for (int it = 0; it < opt.refine_iterations; ++it) {
            const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            const auto p1 = obj.at(m1), p2 = obj.at(m2);
            const double v1 = p1.valid ? p1.joint : -1.0;
            const double v2 = p2.valid ? p2.joint : -1.0;
            if (v1 < v2)
                lo = m1;
            else
                hi = m2;
        }
        return 0.5 * (lo + hi);
    };

    double best_tau = -1.0, best_val = -1.0;
    double early_tau = -1.0;
    for (std::size_t i = 0; i <= n; ++i) {
        if (!pts[i].valid) continue;
        const double left = (i > 0 && pts[i - 1].valid) ? pts[i - 1].joint : -1.0;
        const double right = (i < n && pts[i + 1].valid) ? pts[i + 1].joint : -1.0;
        if (pts[i].joint < left || pts[i].joint < right) continue;  // not a local max
        const double tau = refine(i);
        const auto p = obj.at(tau);
        if (!p.valid) continue;
        if (p.joint > best_val) {
            best_val = p.joint;
            best_tau = tau;
        }
        if (early_tau < 0.0 && p.joint >= opt.threshold) early_tau = tau;
    }
    if (best_tau < 0.0) throw std::runtime_error("find_gate_time: no trivial-phase revival in window");
    return result_at(early_tau >= 0.0 ? early_tau : best_tau);
}

// ---------------------------------------------------------------------------
// Charge-noise calibration against the up-up oscillation envelope
// ---------------------------------------------------------------------------

struct CalibrationRunSettings {
    double tau_max = 40.0;
    double dt = 0.01;
    int n_mc = 96;
    std::uint64_t seed = 0x1f5eedULL;
    int workers = 1;
    noise::CalibrationSettings search{};
};

/// Fitted 1/e envelope time of the up-up self-overlap at one amplitude.
inline double measure_upup_decay(const hubbard::HubbardParams& params, double amplitude,
                                 const ChargeNoiseSettings& tmpl, const CalibrationRunSettings& run) {
    ExperimentConfig cfg;
    cfg.params = params;
    cfg.initial = InitialKind::UpUp;
    cfg.targets = {TargetKind::SelfOverlap};
    cfg.dt = run.dt;
    cfg.tau_max = run.tau_max;
    cfg.charge = tmpl;
    cfg.charge->amplitude = amplitude;
    cfg.n_mc = run.n_mc;
    cfg.seed = run.seed;
    cfg.workers = run.workers;
    const FidelityTrace tr = fidelity_trace(cfg);
    // Baseline 0.5: the long-time average of the (1,0,1) return probability;
    // peak window just under half a charge-oscillation period.
    const double window = 0.45 * std::numbers::pi / (std::numbers::sqrt2 * params.t_ac);
    return noise::fit_decay_time(tr.times, tr.mean[0], 0.5, window).time;
}

/// Phenomenological noise-strength calibration: tune the 1/f amplitude until
/// the up-up oscillation envelope decays with the requested 1/e time.
inline noise::CalibrationResult calibrate_charge_amplitude(double target_decay,
                                                           const hubbard::HubbardParams& params,
                                                           const ChargeNoiseSettings& tmpl = {},
                                                           const CalibrationRunSettings& run = {}) {
    return noise::calibrate_amplitude(
        target_decay, [&](double amp) { return measure_upup_decay(params, amp, tmpl, run); },
        run.search);
}

}  // namespace tripledot::gatelab
