#pragma once

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tripledot/hubbard.hpp"
#include "tripledot/rng.hpp"

namespace tripledot::noise {

/// 1/f synthesis settings.  Frequencies are in inverse scaled time.
struct OneOverFConfig {
    double amplitude = 0.0;  // target rms of the detuning trace
    double f_min = 0.0;
    double f_max = 0.0;
    std::size_t n_samples = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("OneOverFConfig: dt must be > 0");
        if (n_samples < 2) throw std::invalid_argument("OneOverFConfig: need at least 2 samples");
        if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
            throw std::invalid_argument("OneOverFConfig: bad amplitude");
        const double nyquist = 0.5 / dt;
        if (!(f_min > 0.0) || !(f_min < f_max) || f_max > nyquist * (1.0 + 1e-12))
            throw std::invalid_argument("OneOverFConfig: need 0 < f_min < f_max <= 1/(2 dt)");
    }
};

struct NoiseTrace {
    std::vector<double> values;
    OneOverFConfig config;
};

/// Gaussian dependence of the tunneling on the detuning between the dots.
struct TunnelingProfile {
    double t0;
    double width = 0.01;  // scaled energy
};

inline double tunneling_at(const TunnelingProfile& p, double delta) {
    if (!(p.width > 0.0)) throw std::invalid_argument("TunnelingProfile: width must be > 0");
    return p.t0 * std::exp(-delta * delta / (2.0 * p.width * p.width));
}

/// Spectral synthesis of a 1/f trace: amplitudes f^(-1/2) inside the band,
/// zero outside, uniform random phases, inverse FFT, then rescaled to the
/// requested rms.  Fully determined by (seed, stream).
inline NoiseTrace gen_one_over_f(const OneOverFConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.n_samples;
    const double df = 1.0 / (static_cast<double>(n) * cfg.dt);

    std::vector<std::complex<double>> spectrum(n, {0.0, 0.0});
    rng::StreamRng gen(cfg.seed, cfg.stream);
    bool any_bin = false;
    for (std::size_t jj = 1; jj <= n / 2; ++jj) {
        const double f = static_cast<double>(jj) * df;
        const double phase = 2.0 * std::numbers::pi * gen.uniform();
        if (f < cfg.f_min * (1.0 - 1e-12) || f > cfg.f_max * (1.0 + 1e-12)) continue;
        any_bin = true;
        const double mag = 1.0 / std::sqrt(f);
        if (2 * jj == n) {
            // Nyquist bin must stay real; keep a random sign.
            spectrum[jj] = {phase < std::numbers::pi ? mag : -mag, 0.0};
        } else {
            spectrum[jj] = std::polar(mag, phase);
            spectrum[n - jj] = std::conj(spectrum[jj]);
        }
    }

    NoiseTrace out;
    out.config = cfg;
    out.values.assign(n, 0.0);
    if (cfg.amplitude == 0.0) return out;
    if (!any_bin) throw std::invalid_argument("gen_one_over_f: no frequency bins inside [f_min, f_max]");

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> time(n);
    fft.inv(time, spectrum);

    double sumsq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = time[k].real();
        sumsq += out.values[k] * out.values[k];
    }
    const double rms = std::sqrt(sumsq / static_cast<double>(n));
    if (rms == 0.0) throw std::runtime_error("gen_one_over_f: degenerate zero trace");
    const double scale = cfg.amplitude / rms;
    for (double& v : out.values) v *= scale;
    return out;
}

/// Log-log least-squares slope of the trace periodogram over [f_min, f_max].
inline double periodogram_slope(const NoiseTrace& trace) {
    const std::size_t n = trace.values.size();
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spec;
    std::vector<double> padded = trace.values;
    fft.fwd(spec, padded);

    const double df = 1.0 / (static_cast<double>(n) * trace.config.dt);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t jj = 1; jj <= n / 2; ++jj) {
        const double f = static_cast<double>(jj) * df;
        if (f < trace.config.f_min * (1.0 - 1e-12) || f > trace.config.f_max * (1.0 + 1e-12)) continue;
        const double p = std::norm(spec[jj]);
        if (p <= 0.0) continue;
        const double x = std::log(f), y = std::log(p);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++m;
    }
    if (m < 8) throw std::runtime_error("periodogram_slope: too few in-band bins");
    const double denom = static_cast<double>(m) * sxx - sx * sx;
    return (static_cast<double>(m) * sxy - sx * sy) / denom;
}

/// Quasistatic nuclear fields: all nine Cartesian components i.i.d.
/// N(0, b_nuc^2), which realizes the isotropic Gaussian magnitude law.
inline hubbard::NuclearFields sample_nuclear(double b_nuc, rng::StreamRng& gen) {
    if (!(b_nuc >= 0.0) || !std::isfinite(b_nuc))
        throw std::invalid_argument("sample_nuclear: b_nuc must be >= 0");
    hubbard::NuclearFields f;
    for (auto& b : f.b)
        for (int c = 0; c < 3; ++c) b(c) = b_nuc * gen.gaussian();
    return f;
}

inline hubbard::NuclearFields sample_nuclear(double b_nuc, std::uint64_t seed, std::uint64_t stream) {
    rng::StreamRng gen(seed, stream);
    return sample_nuclear(b_nuc, gen);
}

/// Exponential envelope fit through oscillation peaks.
struct DecayFit {
    double time;         // fitted 1/e time of the peak contrast
    std::size_t n_peaks; // peaks used in the fit
    double crossing;     // first time the contrast drops below 1/e
};

/// Fits exp(-tau/T) to the contrast (P - baseline)/(1 - baseline) of the
/// envelope peaks.  The envelope is read off windowed local maxima (window
/// about half a charge-oscillation period) and the fit uses the decaying
/// section up to 1.25x the first 1/e crossing; without a crossing the decay
/// is reported as infinite.
inline DecayFit fit_decay_time(const std::vector<double>& times, const std::vector<double>& values,
                               double baseline, double peak_window) {
    if (times.size() != values.size() || times.size() < 8)
        throw std::invalid_argument("fit_decay_time: bad trace");
    const double dt = times[1] - times[0];
    const int w = std::max(1, static_cast<int>(std::lround(peak_window / dt)));
    const std::size_t n = times.size();
    // Skip the trailing 8%: spectral synthesis makes the noise periodic over
    // the run, which produces a spurious revival at the very end.
    const std::size_t last = n - std::max<std::size_t>(1, n / 12);

    std::vector<std::pair<double, double>> peaks;  // (time, contrast)
    for (std::size_t i = 0; i < last; ++i) {
        const std::size_t lo = (i >= static_cast<std::size_t>(w)) ? i - static_cast<std::size_t>(w) : 0;
        const std::size_t hi = std::min(last - 1, i + static_cast<std::size_t>(w));
        bool is_max = true;
        for (std::size_t k = lo; k <= hi && is_max; ++k)
            if (values[k] > values[i]) is_max = false;
        if (!is_max) continue;
        const double contrast = (values[i] - baseline) / (1.0 - baseline);
        if (contrast > 0.0) peaks.emplace_back(times[i], contrast);
        if (i + static_cast<std::size_t>(w) < last) i += static_cast<std::size_t>(w) - 1;
    }
    if (peaks.size() < 3) throw std::runtime_error("fit_decay_time: too few envelope peaks");

    const double inv_e = std::exp(-1.0);
    double crossing = -1.0;
    for (const auto& [tt, cc] : peaks)
        if (cc < inv_e) { crossing = tt; break; }

    DecayFit fit{};
    fit.crossing = crossing;
    if (crossing < 0.0) {
        fit.time = std::numeric_limits<double>::infinity();
        fit.n_peaks = peaks.size();
        return fit;
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (const auto& [tt, cc] : peaks) {
        if (tt > 1.25 * crossing || cc <= 0.01) continue;
        const double y = std::log(cc);
        sx += tt; sy += y; sxx += tt * tt; sxy += tt * y;
        ++m;
    }
    if (m < 3) throw std::runtime_error("fit_decay_time: too few peaks in the decaying section");
    const double denom = static_cast<double>(m) * sxx - sx * sx;
    const double slope = (static_cast<double>(m) * sxy - sx * sy) / denom;
    if (!(slope < 0.0))
        throw std::runtime_error("fit_decay_time: envelope is not decaying (non-monotonic fit)");
    fit.time = -1.0 / slope;
    fit.n_peaks = m;
    return fit;
}

struct CalibrationSettings {
    double amplitude_lo = 5e-4;
    double amplitude_hi = 1.2e-2;
    double rel_tolerance = 0.05;
    int max_iterations = 48;
};

struct CalibrationResult {
    double amplitude;
    double fitted_decay;
    double target_decay;
    int iterations;
    bool converged;
};

/// Measures the fitted envelope decay time of the up-up charge oscillation
/// at a given noise amplitude; supplied by the experiment layer.
using DecayMeasure = std::function<double(double amplitude)>;

/// Bisection on the noise amplitude until the measured envelope 1/e time is
/// within rel_tolerance of target_decay.  The decay time must bracket the
/// target across [amplitude_lo, amplitude_hi].
inline CalibrationResult calibrate_amplitude(double target_decay, const DecayMeasure& measure,
                                             const CalibrationSettings& settings = {}) {
    if (!(target_decay > 0.0)) throw std::invalid_argument("calibrate_amplitude: target must be > 0");

    double lo = settings.amplitude_lo, hi = settings.amplitude_hi;
    const double t_lo = measure(lo);   // weak noise, long decay
    const double t_hi = measure(hi);   // strong noise, short decay
    if (!(t_lo > target_decay))
        throw std::runtime_error("calibrate_amplitude: window does not bracket the target (lower edge decays too fast)");
    if (!(t_hi < target_decay))
        throw std::runtime_error("calibrate_amplitude: window does not bracket the target (upper edge decays too slowly)");

    CalibrationResult res{};
    res.target_decay = target_decay;
    for (int it = 1; it <= settings.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double t_mid = measure(mid);
        res.amplitude = mid;
        res.fitted_decay = t_mid;
        res.iterations = it;
        if (std::isfinite(t_mid) && std::abs(t_mid - target_decay) <= settings.rel_tolerance * target_decay) {
            res.converged = true;
            return res;
        }
        if (t_mid > target_decay)
            lo = mid;
        else
            hi = mid;
    }
    throw std::runtime_error("calibrate_amplitude: did not converge (fitted " +
                             std::to_string(res.fitted_decay) + " for target " +
                             std::to_string(target_decay) + ")");
}

}  // namespace tripledot::noise
