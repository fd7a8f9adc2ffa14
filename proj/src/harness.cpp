#include "pmgp/harness.hpp"

#include "pmgp/errors.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

namespace pmgp {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& field, std::size_t row, const char* column) {
    const std::string f = trim(field);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(f, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (f.empty() || used != f.size()) {
        throw InputError("row " + std::to_string(row) + ": cannot parse " + column + " value '" + f + "'");
    }
    if (!std::isfinite(value)) {
        throw InputError("row " + std::to_string(row) + ": " + column + " must be finite");
    }
    return value;
}

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void finalize_scores(ModelReport& r, const std::vector<SeriesRecord>& records) {
    std::vector<double> actuals;
    actuals.reserve(records.size());
    for (const auto& rec : records) actuals.push_back(rec.y);
    const NMAEResult score = nmae(r.predictions, actuals);
    r.nmae = score.nmae;
    r.nmae_std = score.nmae_std;
    r.running_nmae = score.running;
    r.n_steps = score.normalized_errors.size();
}

struct ARSpec {
    ARVariant variant;
    int order;
};

ARSpec parse_ar_name(const std::string& name) {
    const auto dash = name.find("-ar");
    if (dash == std::string::npos) throw InputError("unknown model '" + name + "'");
    const std::string algo = name.substr(0, dash);
    ARSpec spec{};
    if (algo == "pa") spec.variant = ARVariant::pa;
    else if (algo == "pa1") spec.variant = ARVariant::pa1;
    else if (algo == "pa2") spec.variant = ARVariant::pa2;
    else if (algo == "blr") spec.variant = ARVariant::blr;
    else throw InputError("unknown model '" + name + "'");
    try {
        std::size_t used = 0;
        spec.order = std::stoi(name.substr(dash + 3), &used);
        if (used != name.size() - dash - 3) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw InputError("bad AR order in model '" + name + "'");
    }
    if (spec.order < 1) throw InputError("bad AR order in model '" + name + "'");
    return spec;
}

ModelReport run_model(const std::vector<SeriesRecord>& records, const RunConfig& config, const std::string& name) {
    try {
        return name == "pmgp" ? run_pmgp(records, config) : run_ar(records, name);
    } catch (const std::exception& e) {
        spdlog::error("model {} failed: {}", name, e.what());
        ModelReport r;
        r.model = name;
        r.error = e.what();
        return r;
    }
}

}  // namespace

std::vector<SeriesRecord> parse_csv(std::istream& in) {
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!trim(line).empty()) break;
    }
    if (row == 0 || trim(line).empty()) throw InputError("empty CSV input");
    {
        std::string header = trim(line);
        header.erase(std::remove(header.begin(), header.end(), ' '), header.end());
        if (header != "t,y") throw InputError("row " + std::to_string(row) + ": expected header 't,y'");
    }
    std::vector<SeriesRecord> records;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw InputError("row " + std::to_string(row) + ": expected two comma-separated fields");
        }
        SeriesRecord rec{parse_number(line.substr(0, comma), row, "t"),
                         parse_number(line.substr(comma + 1), row, "y")};
        if (!records.empty() && !(rec.t > records.back().t)) {
            throw OrderingError("row " + std::to_string(row) + ": time " + trim(line.substr(0, comma)) +
                                " is not strictly after the previous row");
        }
        records.push_back(rec);
    }
    return records;
}

std::vector<SeriesRecord> ingest_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return parse_csv(in);
}

double estimate_fs(const std::vector<SeriesRecord>& records, std::optional<double> override_fs) {
    if (override_fs) {
        if (!(*override_fs > 0.0) || !std::isfinite(*override_fs)) throw InputError("F_s override must be > 0");
        return *override_fs;
    }
    if (records.size() < 2) throw InputError("estimate_fs: need at least two records");
    const std::size_t gaps = std::min<std::size_t>(10, records.size() - 1);
    const double mean_dt = (records[gaps].t - records[0].t) / static_cast<double>(gaps);
    return 1.0 / mean_dt;
}

void RunConfig::validate() const {
    if (p < 0) throw InputError("p must be >= 0");
    if (n_components < 1) throw InputError("number of components must be >= 1");
    if (!(c > 0.0)) throw InputError("c must be > 0");
    if (!(eps >= 0.0)) throw InputError("eps must be >= 0");
}

const ModelReport* BenchmarkReport::find(const std::string& name) const {
    for (const auto& m : models) {
        if (m.model == name) return &m;
    }
    return nullptr;
}

ModelReport run_pmgp(const std::vector<SeriesRecord>& records, const RunConfig& config) {
    config.validate();
    if (records.size() < 3) throw InputError("benchmark needs at least 3 records");
    const auto start = Clock::now();
    const double fs = estimate_fs(records, config.fs);
    PmgpForecaster forecaster(config.p, initial_hyperparams(config.trend, config.n_components, fs),
                              PAConfig{config.c, config.eps, 1.0, config.omega_space}, config.record_trace);
    ModelReport r;
    r.model = "pmgp";
    r.predictions.reserve(records.size());
    for (const auto& rec : records) {
        const StepResult s = forecaster.step(rec.t, rec.y);
        r.predictions.push_back(config.score_with_previous_theta ? s.previous_predictive.mean : s.predictive.mean);
    }
    r.theta_updates = forecaster.updates_fired();
    r.theta_trace = forecaster.trace();
    finalize_scores(r, records);
    r.runtime_ms = elapsed_ms(start);
    return r;
}

ModelReport run_ar(const std::vector<SeriesRecord>& records, const std::string& name) {
    if (records.size() < 3) throw InputError("benchmark needs at least 3 records");
    const ARSpec spec = parse_ar_name(name);
    const auto start = Clock::now();
    ARModel model;
    if (spec.variant == ARVariant::blr) {
        std::vector<double> ys;
        ys.reserve(records.size());
        for (const auto& rec : records) ys.push_back(rec.y);
        // Noise level fixed from a preliminary pass over the whole series.
        model = ARModel::bayesian(spec.order, 0.05 * sample_std(ys));
    } else {
        model = ARModel::passive_aggressive(spec.order, spec.variant, 100.0, 0.0);
    }
    ARForecaster forecaster(std::move(model));
    ModelReport r;
    r.model = name;
    r.predictions.reserve(records.size());
    for (const auto& rec : records) {
        r.predictions.push_back(forecaster.predict_next());
        forecaster.observe(rec.y);
    }
    finalize_scores(r, records);
    r.runtime_ms = elapsed_ms(start);
    return r;
}

BenchmarkReport run_benchmark(const std::vector<SeriesRecord>& records, const RunConfig& config) {
    config.validate();
    if (records.size() < 3) throw InputError("benchmark needs at least 3 records");
    BenchmarkReport report;
    report.fs = estimate_fs(records, config.fs);
    report.n_records = records.size();
    report.config = config;
    if (config.parallel) {
        std::vector<std::future<ModelReport>> jobs;
        jobs.reserve(config.models.size());
        for (const auto& name : config.models) {
            jobs.push_back(std::async(std::launch::async, [&records, &config, name] {
                return run_model(records, config, name);
            }));
        }
        for (auto& j : jobs) report.models.push_back(j.get());
    } else {
        for (const auto& name : config.models) report.models.push_back(run_model(records, config, name));
    }
    return report;
}

std::vector<SweepPoint> sweep_c(const std::vector<SeriesRecord>& records, RunConfig config,
                                const std::vector<double>& cs) {
    std::vector<SweepPoint> out;
    for (double c : cs) {
        config.c = c;
        const ModelReport r = run_model(records, config, "pmgp");
        out.push_back(SweepPoint{c, r.nmae, r.nmae_std, r.error});
    }
    return out;
}

std::vector<SweepPoint> sweep_k(const std::vector<SeriesRecord>& records, RunConfig config,
                                const std::vector<int>& ks) {
    std::vector<SweepPoint> out;
    for (int k : ks) {
        config.n_components = k;
        const ModelReport r = run_model(records, config, "pmgp");
        out.push_back(SweepPoint{static_cast<double>(k), r.nmae, r.nmae_std, r.error});
    }
    return out;
}

ForecastRun run_forecast(const std::vector<SeriesRecord>& records, const RunConfig& config, int horizon) {
    config.validate();
    if (records.size() < 3) throw InputError("forecast needs at least 3 records");
    if (horizon < 0) throw InputError("horizon must be >= 0");
    const auto start = Clock::now();
    const double fs = estimate_fs(records, config.fs);
    PmgpForecaster forecaster(config.p, initial_hyperparams(config.trend, config.n_components, fs),
                              PAConfig{config.c, config.eps, 1.0, config.omega_space}, config.record_trace);
    ForecastRun run;
    run.report.model = "pmgp";
    for (const auto& rec : records) {
        const StepResult s = forecaster.step(rec.t, rec.y);
        run.report.predictions.push_back(config.score_with_previous_theta ? s.previous_predictive.mean
                                                                          : s.predictive.mean);
    }
    run.report.theta_updates = forecaster.updates_fired();
    run.report.theta_trace = forecaster.trace();
    finalize_scores(run.report, records);
    const double t_last = records.back().t;
    for (int h = 1; h <= horizon; ++h) {
        const double t = t_last + h / fs;
        const Forecast f = forecaster.forecast(t);
        run.horizon.push_back(HorizonForecast{t, f.observation, f.latent});
    }
    run.final_state = forecaster.state();
    run.report.runtime_ms = elapsed_ms(start);
    return run;
}

nlohmann::json to_json(const ModelReport& r, bool timing) {
    nlohmann::json j;
    j["model"] = r.model;
    if (!r.ok()) {
        j["error"] = r.error;
        return j;
    }
    j["nmae"] = r.nmae;
    j["nmae_std"] = r.nmae_std;
    j["n_steps"] = r.n_steps;
    if (r.model == "pmgp") j["theta_updates"] = r.theta_updates;
    if (!r.theta_trace.empty()) {
        nlohmann::json trace = nlohmann::json::array();
        for (const auto& e : r.theta_trace) {
            trace.push_back({{"k", e.k},
                             {"t", e.t},
                             {"updated", e.updated},
                             {"theta", std::vector<double>(e.theta.data(), e.theta.data() + e.theta.size())}});
        }
        j["theta_trace"] = std::move(trace);
    }
    if (timing) j["runtime_ms"] = r.runtime_ms;
    return j;
}

nlohmann::json to_json(const BenchmarkReport& r) {
    nlohmann::json j;
    j["fs"] = r.fs;
    j["n_records"] = r.n_records;
    j["config"] = {{"p", r.config.p},
                   {"components", r.config.n_components},
                   {"c", r.config.c},
                   {"eps", r.config.eps},
                   {"trend", to_string(r.config.trend)},
                   {"omega_space", to_string(r.config.omega_space)}};
    nlohmann::json models = nlohmann::json::array();
    for (const auto& m : r.models) models.push_back(to_json(m, r.config.timing));
    j["models"] = std::move(models);
    return j;
}

nlohmann::json to_json(const std::vector<SweepPoint>& points, const std::string& parameter) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& p : points) {
        nlohmann::json row{{parameter, p.value}};
        if (p.error.empty()) {
            row["nmae"] = p.nmae;
            row["nmae_std"] = p.nmae_std;
        } else {
            row["error"] = p.error;
        }
        rows.push_back(std::move(row));
    }
    return nlohmann::json{{"parameter", parameter}, {"points", std::move(rows)}};
}

void write_plot_csv(std::ostream& out, const BenchmarkReport& r) {
    std::ostringstream buf;
    buf.precision(17);
    buf << "step,model,running_nmae\n";
    for (const auto& m : r.models) {
        if (!m.ok()) continue;
        for (std::size_t i = 0; i < m.running_nmae.size(); ++i) {
            buf << (i + 1) << ',' << m.model << ',' << m.running_nmae[i] << '\n';
        }
    }
    out << buf.str();
}

std::string to_string(TrendKind kind) { return kind == TrendKind::linear ? "linear" : "constant"; }

TrendKind parse_trend(const std::string& name) {
    if (name == "linear") return TrendKind::linear;
    if (name == "constant") return TrendKind::constant;
    throw InputError("unknown trend '" + name + "' (expected linear or constant)");
}

}  // namespace pmgp
