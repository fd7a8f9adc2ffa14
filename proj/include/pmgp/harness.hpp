#pragma once

#include "pmgp/baselines.hpp"
#include "pmgp/kernels.hpp"
#include "pmgp/learner.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pmgp {

struct SeriesRecord {
    double t = 0.0;
    double y = 0.0;
};

/// Parses a `t,y` CSV. Rejects non-finite values and non-increasing t,
/// naming the offending (1-based, header = row 1) row.
[[nodiscard]] std::vector<SeriesRecord> parse_csv(std::istream& in);
[[nodiscard]] std::vector<SeriesRecord> ingest_csv(const std::string& path);

/// 1 / mean(dt) over the first min(10, N-1) gaps, unless overridden.
[[nodiscard]] double estimate_fs(const std::vector<SeriesRecord>& records,
                                 std::optional<double> override_fs = std::nullopt);

struct RunConfig {
    int p = 2;
    int n_components = 2;  ///< K = n + 1
    double c = 100.0;
    double eps = 0.0;
    TrendKind trend = TrendKind::linear;
    OmegaSpace omega_space = OmegaSpace::log;
    std::optional<double> fs;
    std::vector<std::string> models = {"pmgp", "pa-ar2", "pa1-ar2", "pa2-ar2", "blr-ar2",
                                       "pa-ar10", "pa1-ar10", "pa2-ar10", "blr-ar10"};
    bool record_trace = false;
    /// Score each step with the predictive under theta_{t_{k-1}} instead of theta_{t_k}.
    bool score_with_previous_theta = false;
    bool timing = false;  ///< include runtime_ms in reports
    bool parallel = true;

    void validate() const;
};

struct ModelReport {
    std::string model;
    double nmae = 0.0;
    double nmae_std = 0.0;
    std::size_t n_steps = 0;
    std::vector<double> predictions;  ///< one per record; index 0 is the prior forecast
    std::vector<double> running_nmae;
    long theta_updates = 0;
    std::vector<ThetaTraceEntry> theta_trace;
    double runtime_ms = 0.0;
    std::string error;  ///< non-empty if the model failed

    [[nodiscard]] bool ok() const { return error.empty(); }
};

struct BenchmarkReport {
    double fs = 0.0;
    std::size_t n_records = 0;
    RunConfig config;
    std::vector<ModelReport> models;

    [[nodiscard]] const ModelReport* find(const std::string& name) const;
};

/// One-step-ahead pM-GP forecasts: predict, observe, then update theta.
[[nodiscard]] ModelReport run_pmgp(const std::vector<SeriesRecord>& records, const RunConfig& config);

/// Runs a named baseline: "<pa|pa1|pa2|blr>-ar<order>".
[[nodiscard]] ModelReport run_ar(const std::vector<SeriesRecord>& records, const std::string& name);

/// Runs every configured model; a failing model is reported, not fatal.
[[nodiscard]] BenchmarkReport run_benchmark(const std::vector<SeriesRecord>& records, const RunConfig& config);

struct SweepPoint {
    double value = 0.0;
    double nmae = 0.0;
    double nmae_std = 0.0;
    std::string error;
};

[[nodiscard]] std::vector<SweepPoint> sweep_c(const std::vector<SeriesRecord>& records, RunConfig config,
                                              const std::vector<double>& cs);
[[nodiscard]] std::vector<SweepPoint> sweep_k(const std::vector<SeriesRecord>& records, RunConfig config,
                                              const std::vector<int>& ks);

struct HorizonForecast {
    double t = 0.0;
    Predictive observation;
    Predictive latent;
};

struct ForecastRun {
    ModelReport report;
    std::vector<HorizonForecast> horizon;
    FilterState final_state;
};

/// Streams the whole series through the pM-GP forecaster, then issues
/// read-only forecasts at t_last + h / F_s for h = 1..horizon.
[[nodiscard]] ForecastRun run_forecast(const std::vector<SeriesRecord>& records, const RunConfig& config,
                                       int horizon);

[[nodiscard]] nlohmann::json to_json(const ModelReport& r, bool timing);
[[nodiscard]] nlohmann::json to_json(const BenchmarkReport& r);
[[nodiscard]] nlohmann::json to_json(const std::vector<SweepPoint>& points, const std::string& parameter);

/// Tidy plot data: step,model,running_nmae.
void write_plot_csv(std::ostream& out, const BenchmarkReport& r);

[[nodiscard]] std::string to_string(TrendKind kind);
[[nodiscard]] TrendKind parse_trend(const std::string& name);

}  // namespace pmgp
