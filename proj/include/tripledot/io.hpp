#pragma once

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tripledot/gatelab.hpp"

namespace tripledot::io {

/// One scaled time unit (hbar / 10 ueV) in nanoseconds.
inline constexpr double kNsPerScaledTime = 0.06582119569;

/// Floats rendered with 9 significant digits for deterministic byte output.
inline std::string g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

/// Comma-separated UTF-8 with a mandatory header and LF line endings.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out_ += ',';
            out_ += header[i];
        }
        out_ += '\n';
    }

    void row(const std::vector<double>& values) {
        if (values.size() != columns_) throw std::invalid_argument("CsvWriter: column count mismatch");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ += ',';
            out_ += g9(values[i]);
        }
        out_ += '\n';
    }

    const std::string& str() const { return out_; }

    void write(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + path);
        f << out_;
        if (!f) throw std::runtime_error("failed writing output file: " + path);
    }

  private:
    std::size_t columns_;
    std::string out_;
};

using Json = nlohmann::json;

namespace detail {

inline void reject_unknown(const Json& obj, const char* where,
                           std::initializer_list<const char*> known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) ok = true;
        if (!ok)
            throw std::invalid_argument(std::string("config: unknown key \"") + it.key() + "\" in " +
                                        where);
    }
}

inline double num(const Json& obj, const char* key, const char* where) {
    if (!obj.contains(key))
        throw std::invalid_argument(std::string("config: missing \"") + key + "\" in " + where);
    if (!obj[key].is_number())
        throw std::invalid_argument(std::string("config: \"") + key + "\" in " + where +
                                    " must be a number");
    return obj[key].get<double>();
}

inline double num_or(const Json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw std::invalid_argument(std::string("config: \"") + key + "\" must be a number");
    return obj[key].get<double>();
}

}  // namespace detail

inline gatelab::InitialKind parse_initial(const std::string& s) {
    if (s == "up_up") return gatelab::InitialKind::UpUp;
    if (s == "up_down") return gatelab::InitialKind::UpDown;
    if (s == "down_up") return gatelab::InitialKind::DownUp;
    if (s == "down_down") return gatelab::InitialKind::DownDown;
    if (s == "superposition") return gatelab::InitialKind::Superposition;
    throw std::invalid_argument("config: unknown initial state \"" + s + "\"");
}

inline gatelab::TargetKind parse_target(const std::string& s) {
    if (s == "self") return gatelab::TargetKind::SelfOverlap;
    if (s == "gate") return gatelab::TargetKind::Gate;
    if (s == "partial_swap") return gatelab::TargetKind::PartialSwap;
    if (s == "superposition_image") return gatelab::TargetKind::SuperpositionImage;
    throw std::invalid_argument("config: unknown target \"" + s + "\"");
}

inline const char* target_name(gatelab::TargetKind k) {
    switch (k) {
        case gatelab::TargetKind::SelfOverlap: return "self";
        case gatelab::TargetKind::Gate: return "gate";
        case gatelab::TargetKind::PartialSwap: return "partial_swap";
        case gatelab::TargetKind::SuperpositionImage: return "superposition_image";
    }
    return "?";
}

/// Parsed run configuration.  Charge noise may carry a decay target instead
/// of an amplitude; the command layer calibrates before running.
struct RunConfig {
    gatelab::ExperimentConfig experiment;
    std::optional<double> charge_target_decay;
};

/// Strict schema: unknown keys anywhere are rejected before any computation.
inline RunConfig parse_run_config(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
    detail::reject_unknown(j, "top level",
                           {"params", "initial", "targets", "grid", "charge_noise", "nuclear_noise",
                            "mc", "seed", "workers"});
    RunConfig rc;

    if (!j.contains("params")) throw std::invalid_argument("config: missing \"params\"");
    const Json& p = j["params"];
    detail::reject_unknown(p, "params", {"t", "u"});
    rc.experiment.params =
        hubbard::HubbardParams::processing(detail::num(p, "t", "params"), detail::num(p, "u", "params"));

    if (!j.contains("initial") || !j["initial"].is_string())
        throw std::invalid_argument("config: missing string \"initial\"");
    rc.experiment.initial = parse_initial(j["initial"].get<std::string>());

    if (!j.contains("targets") || !j["targets"].is_array() || j["targets"].empty())
        throw std::invalid_argument("config: \"targets\" must be a non-empty array");
    rc.experiment.targets.clear();
    for (const auto& t : j["targets"]) {
        if (!t.is_string()) throw std::invalid_argument("config: targets must be strings");
        rc.experiment.targets.push_back(parse_target(t.get<std::string>()));
    }

    if (!j.contains("grid")) throw std::invalid_argument("config: missing \"grid\"");
    const Json& g = j["grid"];
    detail::reject_unknown(g, "grid", {"dt", "tau_max"});
    rc.experiment.dt = detail::num_or(g, "dt", 0.01);
    rc.experiment.tau_max = detail::num(g, "tau_max", "grid");

    if (j.contains("charge_noise")) {
        const Json& c = j["charge_noise"];
        detail::reject_unknown(c, "charge_noise",
                               {"amplitude", "target_decay", "f_min", "f_max", "width", "coupling"});
        gatelab::ChargeNoiseSettings cs;
        const bool has_amp = c.contains("amplitude");
        const bool has_target = c.contains("target_decay");
        if (has_amp == has_target)
            throw std::invalid_argument(
                "config: charge_noise needs exactly one of \"amplitude\" or \"target_decay\"");
        if (has_amp) cs.amplitude = detail::num(c, "amplitude", "charge_noise");
        if (has_target) rc.charge_target_decay = detail::num(c, "target_decay", "charge_noise");
        cs.f_min = detail::num_or(c, "f_min", 0.0);
        cs.f_max = detail::num_or(c, "f_max", 0.0);
        cs.width = detail::num_or(c, "width", 0.01);
        if (c.contains("coupling")) {
            const Json& cp = c["coupling"];
            if (!cp.is_array() || cp.size() != 3)
                throw std::invalid_argument("config: charge_noise.coupling must have 3 entries");
            for (int d = 0; d < 3; ++d) cs.coupling[static_cast<std::size_t>(d)] = cp[static_cast<std::size_t>(d)].get<double>();
        }
        rc.experiment.charge = cs;
    }

    if (j.contains("nuclear_noise")) {
        const Json& nn = j["nuclear_noise"];
        detail::reject_unknown(nn, "nuclear_noise", {"b_nuc"});
        rc.experiment.nuclear = gatelab::NuclearSettings{detail::num(nn, "b_nuc", "nuclear_noise")};
    }

    if (j.contains("mc")) {
        if (!j["mc"].is_number_integer() || j["mc"].get<long long>() < 1)
            throw std::invalid_argument("config: \"mc\" must be a positive integer");
        rc.experiment.n_mc = j["mc"].get<int>();
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            throw std::invalid_argument("config: \"seed\" must be an integer");
        rc.experiment.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("workers")) {
        if (!j["workers"].is_number_integer() || j["workers"].get<long long>() < 1)
            throw std::invalid_argument("config: \"workers\" must be a positive integer");
        rc.experiment.workers = j["workers"].get<int>();
    }

    rc.experiment.validate();
    return rc;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config file: " + path);
    Json j;
    try {
        j = Json::parse(f);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    return parse_run_config(j);
}

/// Persisted result of a charge-noise calibration run.
struct CalibrationRecord {
    double amplitude = 0.0;
    double target_decay = 0.0;
    double fitted_decay = 0.0;
    int iterations = 0;
    std::uint64_t seed = 0;
    int n_mc = 0;

    Json to_json() const {
        return Json{{"amplitude", amplitude}, {"target_decay", target_decay},
                    {"fitted_decay", fitted_decay}, {"iterations", iterations},
                    {"seed", seed},             {"mc", n_mc}};
    }
    static CalibrationRecord from_json(const Json& j) {
        detail::reject_unknown(j, "calibration record",
                               {"amplitude", "target_decay", "fitted_decay", "iterations", "seed", "mc"});
        CalibrationRecord r;
        r.amplitude = detail::num(j, "amplitude", "calibration record");
        r.target_decay = detail::num(j, "target_decay", "calibration record");
        r.fitted_decay = detail::num(j, "fitted_decay", "calibration record");
        r.iterations = j.value("iterations", 0);
        r.seed = j.value("seed", 0ULL);
        r.n_mc = j.value("mc", 0);
        return r;
    }
};

inline void write_json(const Json& j, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << j.dump(2) << '\n';
}

inline Json read_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open file: " + path);
    try {
        return Json::parse(f);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(std::string("parse error: ") + e.what());
    }
}

}  // namespace tripledot::io
