#include "lkr/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace lkr {

const char* kToolVersion = "0.1.0";

using nlohmann::json;

double parse_number_or_fraction(const std::string& text) {
    const auto slash = text.find('/');
    size_t used = 0;
    if (slash == std::string::npos) {
        const double v = std::stod(text, &used);
        if (used != text.size())
            throw std::invalid_argument("bad numeric literal: " + text);
        return v;
    }
    const long double num = std::stold(text.substr(0, slash), &used);
    if (used != slash)
        throw std::invalid_argument("bad fraction numerator: " + text);
    const long double den = std::stold(text.substr(slash + 1), &used);
    if (used != text.size() - slash - 1 || den == 0.0L)
        throw std::invalid_argument("bad fraction denominator: " + text);
    return static_cast<double>(num / den);
}

namespace {

double json_number(const json& v, const std::string& key) {
    if (v.is_string()) return parse_number_or_fraction(v.get<std::string>());
    if (v.is_number()) return v.get<double>();
    throw std::invalid_argument("config key `" + key + "`: expected number");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j = json::parse(json_text);
    if (!j.is_object()) throw std::invalid_argument("config: not an object");
    static const std::set<std::string> known = {
        "dist", "alpha", "tau0", "kappa", "W", "T", "n", "seed", "K",
        "hbar", "M", "guard_fraction", "leakage_threshold", "workers",
        "samples_per_decade"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw std::invalid_argument("config: unknown key `" + it.key() + "`");

    ExperimentConfig cfg;
    cfg.lattice.K = j.contains("K") ? json_number(j["K"], "K") : 7.5;
    if (j.contains("hbar")) {
        const auto& h = j["hbar"];
        if (h.is_object()) {
            if (!h.contains("two_pi_times"))
                throw std::invalid_argument("config: hbar object needs two_pi_times");
            const auto& r = h["two_pi_times"];
            const long double num = r.at("num").get<long double>();
            const long double den = r.at("den").get<long double>();
            if (den == 0.0L)
                throw std::invalid_argument("config key `hbar`: zero denominator");
            cfg.lattice.hbar = static_cast<double>(
                2.0L * std::numbers::pi_v<long double> * num / den);
        } else {
            cfg.lattice.hbar = json_number(h, "hbar");
        }
    } else {
        cfg.lattice.hbar = default_hbar();
    }
    cfg.lattice.M = j.contains("M") ? j["M"].get<int>() : 4096;
    cfg.T = j.contains("T") ? j["T"].get<long>() : 10000;
    cfg.n_realizations = j.contains("n") ? j["n"].get<int>() : 200;
    cfg.base_seed = j.contains("seed") ? j["seed"].get<std::uint64_t>() : 1;

    const std::string dist =
        j.contains("dist") ? j["dist"].get<std::string>() : "yule_simon";
    if (dist == "yule_simon") {
        if (!j.contains("alpha"))
            throw std::invalid_argument("config: yule_simon requires `alpha`");
        const double alpha = json_number(j["alpha"], "alpha");
        if (!(alpha > 0.0))
            throw std::invalid_argument(
                "config key `alpha`: must satisfy alpha > 0");
        cfg.dist = WaitingTimeDistribution::yule_simon(alpha);
    } else if (dist == "deterministic") {
        cfg.dist = WaitingTimeDistribution::deterministic(
            j.contains("tau0") ? j["tau0"].get<long>() : 1);
    } else if (dist == "geometric") {
        if (!j.contains("alpha"))
            throw std::invalid_argument("config: geometric requires `alpha` (success prob)");
        cfg.dist = WaitingTimeDistribution::geometric(json_number(j["alpha"], "alpha"));
    } else {
        throw std::invalid_argument("config key `dist`: unknown kind " + dist);
    }

    double kappa = j.contains("kappa") ? json_number(j["kappa"], "kappa") : 0.0;
    if (j.contains("W")) {
        const double W = json_number(j["W"], "W");
        const double from_w = W * W / 3.0;
        if (j.contains("kappa") && std::abs(from_w - kappa) > 1e-12)
            throw std::invalid_argument(
                "config: kappa and W disagree (kappa = W^2/3)");
        kappa = from_w;
    }
    if (kappa < 0.0)
        throw std::invalid_argument("config key `kappa`: must be >= 0");
    cfg.kappa = kappa;
    if (j.contains("guard_fraction"))
        cfg.guard_fraction = json_number(j["guard_fraction"], "guard_fraction");
    if (j.contains("leakage_threshold"))
        cfg.leakage_threshold =
            json_number(j["leakage_threshold"], "leakage_threshold");
    if (j.contains("workers")) cfg.n_workers = j["workers"].get<int>();
    const int per_decade =
        j.contains("samples_per_decade") ? j["samples_per_decade"].get<int>() : 64;
    cfg.sample_times = log_spaced_times(cfg.T, per_decade);
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json canonical_config(const ExperimentConfig& c) {
    json j;
    j["M"] = c.lattice.M;
    j["hbar"] = fmt17(c.lattice.hbar);
    j["K"] = fmt17(c.lattice.K);
    switch (c.dist.kind) {
        case WaitingTimeDistribution::Kind::deterministic:
            j["dist"] = "deterministic";
            j["tau0"] = c.dist.tau0;
            break;
        case WaitingTimeDistribution::Kind::yule_simon:
            j["dist"] = "yule_simon";
            j["alpha"] = fmt17(c.dist.alpha);
            break;
        case WaitingTimeDistribution::Kind::custom:
            j["dist"] = "custom";
            j["alpha"] = fmt17(c.dist.alpha);
            j["table_size"] = c.dist.table.size();
            break;
    }
    j["kappa"] = fmt17(c.kappa);
    j["T"] = c.T;
    j["n"] = c.n_realizations;
    j["seed"] = c.base_seed;
    j["guard_fraction"] = fmt17(c.guard_fraction);
    j["leakage_threshold"] = fmt17(c.leakage_threshold);
    j["samples"] = c.sample_times.size();
    return j;
}

}  // namespace

std::string config_hash(const ExperimentConfig& config) {
    const std::string s = canonical_config(config).dump();   // keys sorted
    std::uint64_t h = 0xcbf29ce484222325ULL;                  // FNV-1a
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

Series series_from_ensemble(const EnsembleResult& result) {
    Series s;
    s.columns = {"t", "var_p", "stderr"};
    s.t = result.sample_times;
    s.values = {result.mean_var, result.std_err};
    return s;
}

Series series_from_prediction(const PredictionSeries& pred) {
    Series s;
    s.columns = {"t", "var_p", "localized_term", "noise_floor", "memory_terms"};
    s.t.resize(size_t(pred.T) + 1);
    for (long t = 0; t <= pred.T; ++t) s.t[size_t(t)] = t;
    s.values = {pred.var_p, pred.localized_term, pred.noise_floor,
                pred.memory_terms};
    return s;
}

Series series_from_tables(const RenewalTables& tables) {
    Series s;
    s.columns = {"t", "f", "Nbar", "D1"};
    s.t.resize(size_t(tables.T) + 1);
    for (long t = 0; t <= tables.T; ++t) s.t[size_t(t)] = t;
    s.values = {tables.f, tables.Nbar, tables.D1};
    return s;
}

void emit_series(const Series& series, const std::string& path,
                 const std::string& config_digest, std::uint64_t base_seed) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path);
    for (size_t c = 0; c < series.columns.size(); ++c)
        out << (c ? "," : "") << series.columns[c];
    out << "\n";
    for (size_t r = 0; r < series.t.size(); ++r) {
        out << series.t[r];
        for (const auto& col : series.values) out << "," << fmt17(col[r]);
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
    out.close();

    json manifest;
    manifest["config_hash"] = config_digest;
    manifest["tool_version"] = kToolVersion;
    manifest["base_seed"] = base_seed;
    manifest["timestamp"] = std::time(nullptr);
    manifest["outputs"] = json::array({path});
    std::ofstream mf(path + ".manifest.json", std::ios::binary);
    if (!mf) throw std::runtime_error("cannot write manifest for: " + path);
    mf << manifest.dump(2) << "\n";
}

Series read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    Series s;
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty csv: " + path);
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) s.columns.push_back(cell);
    if (s.columns.empty() || s.columns[0] != "t")
        throw std::runtime_error("csv must start with a `t` column: " + path);
    s.values.resize(s.columns.size() - 1);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::getline(ls, cell, ',');
        s.t.push_back(std::stol(cell));
        for (auto& col : s.values) {
            if (!std::getline(ls, cell, ','))
                throw std::runtime_error("short csv row in: " + path);
            col.push_back(std::stod(cell));
        }
    }
    return s;
}

}  // namespace lkr
