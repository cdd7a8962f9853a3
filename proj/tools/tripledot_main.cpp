// tripledot: triple-quantum-dot two-spin entangling gate simulator.
//
// Exit codes: 0 success, 2 usage/config error, 3 numerical failure.

#include <CLI11.hpp>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include "tripledot/gatelab.hpp"
#include "tripledot/io.hpp"
#include "tripledot/tjmodel.hpp"

using namespace tripledot;

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kPi = std::numbers::pi;

struct FigPreset {
    hubbard::HubbardParams params;
    double dt = 0.01;
    double tau_max = 20.0;
    std::optional<double> charge_target_decay;
    std::optional<double> b_nuc;
    int n_mc = 1;
    std::uint64_t seed = 0;
};

FigPreset load_fig_preset(const std::string& path) {
    const io::Json j = io::read_json(path);
    io::detail::reject_unknown(j, "preset",
                               {"params", "grid", "charge_noise", "nuclear_noise", "mc", "seed"});
    FigPreset p;
    const io::Json& params = j.at("params");
    io::detail::reject_unknown(params, "params", {"t", "u"});
    p.params = hubbard::HubbardParams::processing(io::detail::num(params, "t", "params"),
                                                  io::detail::num(params, "u", "params"));
    const io::Json& grid = j.at("grid");
    io::detail::reject_unknown(grid, "grid", {"dt", "tau_max"});
    p.dt = io::detail::num_or(grid, "dt", 0.01);
    p.tau_max = io::detail::num(grid, "tau_max", "grid");
    if (j.contains("charge_noise")) {
        io::detail::reject_unknown(j["charge_noise"], "charge_noise", {"target_decay"});
        p.charge_target_decay = io::detail::num(j["charge_noise"], "target_decay", "charge_noise");
    }
    if (j.contains("nuclear_noise")) {
        io::detail::reject_unknown(j["nuclear_noise"], "nuclear_noise", {"b_nuc"});
        p.b_nuc = io::detail::num(j["nuclear_noise"], "b_nuc", "nuclear_noise");
    }
    p.n_mc = j.value("mc", 1);
    p.seed = j.value("seed", 0ULL);
    return p;
}

gatelab::ChargeNoiseSettings calibrated_charge(const FigPreset& p, int workers) {
    gatelab::ChargeNoiseSettings cs;
    gatelab::CalibrationRunSettings run;
    run.seed = p.seed;
    run.workers = workers;
    const auto res = gatelab::calibrate_charge_amplitude(*p.charge_target_decay, p.params, cs, run);
    cs.amplitude = res.amplitude;
    std::fprintf(stderr, "calibrated 1/f amplitude %.6g (fitted decay %.3g for target %.3g)\n",
                 res.amplitude, res.fitted_decay, res.target_decay);
    return cs;
}

gatelab::FidelityTrace run_curve(const FigPreset& p, gatelab::InitialKind initial,
                                 gatelab::TargetKind target,
                                 std::optional<gatelab::ChargeNoiseSettings> charge, bool nuclear,
                                 int workers) {
    gatelab::ExperimentConfig cfg;
    cfg.params = p.params;
    cfg.initial = initial;
    cfg.targets = {target};
    cfg.dt = p.dt;
    cfg.tau_max = p.tau_max;
    cfg.charge = charge;
    if (nuclear) cfg.nuclear = gatelab::NuclearSettings{*p.b_nuc};
    cfg.n_mc = p.n_mc;
    cfg.seed = p.seed;
    cfg.workers = workers;
    return gatelab::fidelity_trace(cfg);
}

int cmd_spectrum(double t, double u, const std::string& out) {
    const auto eff = tjmodel::EffectiveParams::from_hubbard(t, u);
    const auto sp = tjmodel::analytic_spectrum(eff);
    const Eigen::MatrixXd h = tjmodel::effective_hamiltonian(eff).m.real();

    std::array<int, 6> order{0, 1, 2, 3, 4, 5};
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return sp.eigenvalues(a) < sp.eigenvalues(b); });
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);

    io::CsvWriter csv({"index", "eigenvalue_analytic", "eigenvalue_numeric", "residual"});
    std::printf("effective model: t = %s, J = %s, eta+ = %s, eta- = %s, xi+ = %s, xi- = %s\n",
                io::g9(eff.t).c_str(), io::g9(eff.j).c_str(), io::g9(sp.eta_plus).c_str(),
                io::g9(sp.eta_minus).c_str(), io::g9(sp.xi_plus).c_str(), io::g9(sp.xi_minus).c_str());
    std::printf("%5s %22s %22s %12s\n", "k", "analytic", "numeric", "residual");
    for (int k = 0; k < 6; ++k) {
        const int a = order[static_cast<std::size_t>(k)];
        const double res = (h * sp.eigenvectors.col(a) - sp.eigenvalues(a) * sp.eigenvectors.col(a)).norm();
        std::printf("%5d %22s %22s %12s\n", k, io::g9(sp.eigenvalues(a)).c_str(),
                    io::g9(es.eigenvalues()(k)).c_str(), io::g9(res).c_str());
        csv.row({static_cast<double>(k), sp.eigenvalues(a), es.eigenvalues()(k), res});
    }
    if (!out.empty()) csv.write(out);
    return 0;
}

int cmd_fig(int fig, const std::string& preset_dir, const std::string& out_path,
            std::optional<std::uint64_t> seed, std::optional<int> mc, int workers) {
    FigPreset p = load_fig_preset(preset_dir + "/fig" + std::to_string(fig) + ".json");
    if (seed) p.seed = *seed;
    if (mc) p.n_mc = *mc;

    const std::size_t n_times = static_cast<std::size_t>(std::lround(p.tau_max / p.dt)) + 1;
    auto time_cols = [&](std::size_t k) {
        const double tau = static_cast<double>(k) * p.dt;
        return std::pair<double, double>(tau, tau * io::kNsPerScaledTime);
    };

    std::string csv_out;
    if (fig == 2) {
        const auto upup = run_curve(p, gatelab::InitialKind::UpUp, gatelab::TargetKind::SelfOverlap,
                                    std::nullopt, false, workers);
        const auto updown = run_curve(p, gatelab::InitialKind::UpDown, gatelab::TargetKind::Gate,
                                      std::nullopt, false, workers);
        const auto eff = tjmodel::EffectiveParams::from_hubbard(p.params.t_ac, p.params.u[0]);
        io::CsvWriter csv({"time_scaled", "time_ns", "upup_self", "updown_target_analytic",
                           "updown_target_numeric"});
        for (std::size_t k = 0; k < n_times; ++k) {
            const auto [tau, ns] = time_cols(k);
            csv.row({tau, ns, upup.mean[0][k], tjmodel::analytic_overlap(tau, eff),
                     updown.mean[0][k]});
        }
        csv_out = csv.str();
    } else if (fig == 3) {
        const auto charge = calibrated_charge(p, workers);
        const auto upup = run_curve(p, gatelab::InitialKind::UpUp, gatelab::TargetKind::SelfOverlap,
                                    charge, false, workers);
        const auto updown = run_curve(p, gatelab::InitialKind::UpDown, gatelab::TargetKind::Gate,
                                      charge, false, workers);
        io::CsvWriter csv({"time_scaled", "time_ns", "upup_self", "updown_target",
                           "upup_self_stderr", "updown_target_stderr"});
        for (std::size_t k = 0; k < n_times; ++k) {
            const auto [tau, ns] = time_cols(k);
            csv.row({tau, ns, upup.mean[0][k], updown.mean[0][k], upup.standard_error[0][k],
                     updown.standard_error[0][k]});
        }
        csv_out = csv.str();
    } else if (fig == 4) {
        const auto charge = calibrated_charge(p, workers);
        const auto charge_only = run_curve(p, gatelab::InitialKind::Superposition,
                                           gatelab::TargetKind::SuperpositionImage, charge, false, workers);
        const auto both = run_curve(p, gatelab::InitialKind::Superposition,
                                    gatelab::TargetKind::SuperpositionImage, charge, true, workers);
        io::CsvWriter csv({"time_scaled", "time_ns", "superposition_charge", "superposition_both",
                           "superposition_charge_stderr", "superposition_both_stderr"});
        for (std::size_t k = 0; k < n_times; ++k) {
            const auto [tau, ns] = time_cols(k);
            csv.row({tau, ns, charge_only.mean[0][k], both.mean[0][k],
                     charge_only.standard_error[0][k], both.standard_error[0][k]});
        }
        csv_out = csv.str();
    } else if (fig == 5) {
        const auto charge = calibrated_charge(p, workers);
        const auto charge_only = run_curve(p, gatelab::InitialKind::UpDown,
                                           gatelab::TargetKind::PartialSwap, charge, false, workers);
        const auto both = run_curve(p, gatelab::InitialKind::UpDown, gatelab::TargetKind::PartialSwap,
                                    charge, true, workers);
        io::CsvWriter csv({"time_scaled", "time_ns", "partial_swap_charge", "partial_swap_both",
                           "partial_swap_charge_stderr", "partial_swap_both_stderr"});
        for (std::size_t k = 0; k < n_times; ++k) {
            const auto [tau, ns] = time_cols(k);
            csv.row({tau, ns, charge_only.mean[0][k], both.mean[0][k],
                     charge_only.standard_error[0][k], both.standard_error[0][k]});
        }
        csv_out = csv.str();
    } else {
        throw std::invalid_argument("unknown preset fig" + std::to_string(fig));
    }

    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + out_path);
    f << csv_out;
    std::fprintf(stderr, "wrote %s\n", out_path.c_str());
    return 0;
}

int cmd_calibrate(double target, const std::string& out, std::uint64_t seed, int mc, int workers) {
    hubbard::HubbardParams params = hubbard::HubbardParams::processing(kSqrt2, 20.0);
    gatelab::CalibrationRunSettings run;
    run.seed = seed;
    run.n_mc = mc;
    run.workers = workers;
    const auto res = gatelab::calibrate_charge_amplitude(target, params, {}, run);

    io::CalibrationRecord rec;
    rec.amplitude = res.amplitude;
    rec.target_decay = res.target_decay;
    rec.fitted_decay = res.fitted_decay;
    rec.iterations = res.iterations;
    rec.seed = seed;
    rec.n_mc = mc;
    io::write_json(rec.to_json(), out);
    std::printf("amplitude %s  fitted_decay %s  target %s  iterations %d\n",
                io::g9(rec.amplitude).c_str(), io::g9(rec.fitted_decay).c_str(),
                io::g9(rec.target_decay).c_str(), rec.iterations);
    return 0;
}

int cmd_gate_time(double t, double u, double lo, double hi, double threshold,
                  const std::string& mode) {
    gatelab::GateTimeOptions opt;
    opt.threshold = threshold;
    if (mode == "hubbard")
        opt.mode = gatelab::GateTimeMode::Hubbard;
    else if (mode != "effective")
        throw std::invalid_argument("gate-time: mode must be effective or hubbard");
    const auto params = hubbard::HubbardParams::processing(t, u);
    const auto res = gatelab::find_gate_time(params, {lo, hi}, opt);
    const auto eff = tjmodel::EffectiveParams::from_hubbard(t, u);

    // Closest charge-revival and exchange-envelope times.
    const double tau_1 = tjmodel::return_times(t, 1);
    const int m_near = std::max(1, static_cast<int>(std::lround(res.tau_star / tau_1)));
    const double taup_0 = tjmodel::target_times(eff.j, 0);
    const double period = 2.0 * kPi / (3.0 * eff.j);
    const int n_near = std::max(0, static_cast<int>(std::lround((res.tau_star - taup_0) / period)));

    std::printf("tau_star %s\n", io::g9(res.tau_star).c_str());
    std::printf("f_upup %s  f_updown %s  f_phase %s  joint %s\n", io::g9(res.f_upup).c_str(),
                io::g9(res.f_updown).c_str(), io::g9(res.f_phase).c_str(), io::g9(res.joint).c_str());
    std::printf("nearest tau_m: m=%d at %s (offset %s)\n", m_near,
                io::g9(tjmodel::return_times(t, m_near)).c_str(),
                io::g9(res.tau_star - tjmodel::return_times(t, m_near)).c_str());
    std::printf("nearest tau'_n: n=%d at %s (offset %s)\n", n_near,
                io::g9(tjmodel::target_times(eff.j, n_near)).c_str(),
                io::g9(res.tau_star - tjmodel::target_times(eff.j, n_near)).c_str());
    return 0;
}

int cmd_evolve(const std::string& config_path, const std::string& out,
               std::optional<std::uint64_t> seed, std::optional<int> mc, std::optional<int> workers) {
    io::RunConfig rc = io::load_run_config(config_path);
    if (seed) rc.experiment.seed = *seed;
    if (mc) rc.experiment.n_mc = *mc;
    if (workers) rc.experiment.workers = *workers;

    if (rc.charge_target_decay) {
        gatelab::CalibrationRunSettings run;
        run.seed = rc.experiment.seed;
        run.workers = rc.experiment.workers;
        const auto res = gatelab::calibrate_charge_amplitude(*rc.charge_target_decay,
                                                             rc.experiment.params,
                                                             *rc.experiment.charge, run);
        rc.experiment.charge->amplitude = res.amplitude;
        std::fprintf(stderr, "calibrated 1/f amplitude %.6g\n", res.amplitude);
    }

    const auto tr = gatelab::fidelity_trace(rc.experiment);
    std::vector<std::string> header{"time_scaled", "time_ns"};
    for (auto k : rc.experiment.targets) header.push_back(io::target_name(k));
    if (rc.experiment.n_mc > 1)
        for (auto k : rc.experiment.targets) header.push_back(std::string(io::target_name(k)) + "_stderr");

    io::CsvWriter csv(header);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        std::vector<double> row{tr.times[i], tr.times[i] * io::kNsPerScaledTime};
        for (std::size_t q = 0; q < rc.experiment.targets.size(); ++q) row.push_back(tr.mean[q][i]);
        if (rc.experiment.n_mc > 1)
            for (std::size_t q = 0; q < rc.experiment.targets.size(); ++q)
                row.push_back(tr.standard_error[q][i]);
        csv.row(row);
    }
    csv.write(out);
    std::fprintf(stderr, "wrote %s\n", out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"triple-dot two-spin entangling gate simulator"};
    app.require_subcommand(1);

    // spectrum
    auto* spectrum = app.add_subcommand("spectrum", "analytic vs numeric effective-model eigensystem");
    double sp_t = kSqrt2, sp_u = 20.0;
    std::string sp_out;
    spectrum->add_option("--t", sp_t, "tunneling (scaled energy)");
    spectrum->add_option("--u", sp_u, "onsite repulsion");
    spectrum->add_option("--out", sp_out, "optional CSV path");

    // fig <n>
    auto* fig = app.add_subcommand("fig", "reproduce a preset experiment curve set");
    int fig_n = 2;
    std::string fig_out, fig_presets = TRIPLEDOT_PRESET_DIR;
    std::uint64_t fig_seed = 0;
    int fig_mc = 0, fig_workers = 1;
    bool fig_seed_set = false, fig_mc_set = false;
    fig->add_option("n", fig_n, "preset number (2-5)")->required();
    fig->add_option("--out", fig_out, "output CSV path (default fig<n>.csv)");
    fig->add_option("--presets-dir", fig_presets, "preset config directory");
    fig->add_option("--seed", fig_seed, "override master seed")->each([&](const std::string&) { fig_seed_set = true; });
    fig->add_option("--mc", fig_mc, "override Monte-Carlo sample count")->each([&](const std::string&) { fig_mc_set = true; });
    fig->add_option("--workers", fig_workers, "worker threads (does not affect output bytes)");

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "tune the 1/f amplitude to a decay target");
    double cal_target = 10.0;
    std::string cal_out = "calibration.json";
    std::uint64_t cal_seed = gatelab::CalibrationRunSettings{}.seed;
    int cal_mc = gatelab::CalibrationRunSettings{}.n_mc, cal_workers = 1;
    cal->add_option("--target", cal_target, "target 1/e decay time (scaled units)")->required();
    cal->add_option("--out", cal_out, "output record path");
    cal->add_option("--seed", cal_seed, "master seed");
    cal->add_option("--mc", cal_mc, "samples per candidate amplitude");
    cal->add_option("--workers", cal_workers, "worker threads");

    // gate-time
    auto* gt = app.add_subcommand("gate-time", "search for the gate time");
    double gt_t = kSqrt2, gt_u = 20.0, gt_lo = 0.0, gt_hi = 8.0, gt_threshold = 0.999;
    std::string gt_mode = "effective";
    gt->add_option("--t", gt_t, "tunneling");
    gt->add_option("--u", gt_u, "onsite repulsion");
    gt->add_option("--lo", gt_lo, "window start");
    gt->add_option("--hi", gt_hi, "window end");
    gt->add_option("--threshold", gt_threshold, "earliest-optimum fidelity threshold");
    gt->add_option("--mode", gt_mode, "effective | hubbard");

    // evolve
    auto* ev = app.add_subcommand("evolve", "run a free-form configured experiment");
    std::string ev_config, ev_out = "trace.csv";
    std::uint64_t ev_seed = 0;
    int ev_mc = 0, ev_workers = 0;
    bool ev_seed_set = false, ev_mc_set = false, ev_workers_set = false;
    ev->add_option("--config", ev_config, "RunConfig JSON path")->required();
    ev->add_option("--out", ev_out, "output CSV path");
    ev->add_option("--seed", ev_seed, "override seed")->each([&](const std::string&) { ev_seed_set = true; });
    ev->add_option("--mc", ev_mc, "override sample count")->each([&](const std::string&) { ev_mc_set = true; });
    ev->add_option("--workers", ev_workers, "override worker threads")->each([&](const std::string&) { ev_workers_set = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*spectrum) return cmd_spectrum(sp_t, sp_u, sp_out);
        if (*fig) {
            const std::string out = fig_out.empty() ? "fig" + std::to_string(fig_n) + ".csv" : fig_out;
            return cmd_fig(fig_n, fig_presets, out,
                           fig_seed_set ? std::optional<std::uint64_t>(fig_seed) : std::nullopt,
                           fig_mc_set ? std::optional<int>(fig_mc) : std::nullopt, fig_workers);
        }
        if (*cal) {
            if (!(cal_target > 0.0)) throw std::invalid_argument("calibrate: target must be > 0");
            return cmd_calibrate(cal_target, cal_out, cal_seed, cal_mc, cal_workers);
        }
        if (*gt) return cmd_gate_time(gt_t, gt_u, gt_lo, gt_hi, gt_threshold, gt_mode);
        if (*ev)
            return cmd_evolve(ev_config, ev_out,
                              ev_seed_set ? std::optional<std::uint64_t>(ev_seed) : std::nullopt,
                              ev_mc_set ? std::optional<int>(ev_mc) : std::nullopt,
                              ev_workers_set ? std::optional<int>(ev_workers) : std::nullopt);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 2;
}
