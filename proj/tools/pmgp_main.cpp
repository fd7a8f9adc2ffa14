// pmgp: streaming pM-GP forecasting and benchmark harness.
//
// Exit codes: 0 success, 2 input errors, 3 numerical failures.

#include "pmgp/errors.hpp"
#include "pmgp/filter.hpp"
#include "pmgp/gpr_oracle.hpp"
#include "pmgp/harness.hpp"
#include "pmgp/learner.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
    std::string input;
    std::string out;
    int p = 2;
    int components = 2;
    double c = 100.0;
    double eps = 0.0;
    std::string trend = "linear";
    std::string omega_space = "log";
    double fs = 0.0;
    bool score_previous = false;
    bool trace = false;
    bool timing = false;
};

void add_model_options(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--input", o.input, "CSV file with header t,y")->required();
    cmd->add_option("--p", o.p, "Smoothness (Matern-(p+1/2))")->check(CLI::NonNegativeNumber);
    cmd->add_option("--components", o.components, "Number of spectral components K")->check(CLI::PositiveNumber);
    cmd->add_option("--c", o.c, "Normalized PA aggressiveness")->check(CLI::PositiveNumber);
    cmd->add_option("--eps", o.eps, "PA tolerance")->check(CLI::NonNegativeNumber);
    cmd->add_option("--trend", o.trend, "Trend: linear or constant");
    cmd->add_option("--omega-space", o.omega_space, "PA step coordinates for frequencies: log or raw");
    cmd->add_option("--fs", o.fs, "Average sampling frequency override");
    cmd->add_flag("--score-previous-theta", o.score_previous,
                  "Score forecasts under the hyperparameters before each update");
    cmd->add_flag("--trace", o.trace, "Include the hyperparameter trace in the report");
    cmd->add_flag("--timing", o.timing, "Include runtime_ms (makes reports non-reproducible)");
}

pmgp::RunConfig make_config(const CommonOptions& o) {
    pmgp::RunConfig cfg;
    cfg.p = o.p;
    cfg.n_components = o.components;
    cfg.c = o.c;
    cfg.eps = o.eps;
    cfg.trend = pmgp::parse_trend(o.trend);
    cfg.omega_space = pmgp::parse_omega_space(o.omega_space);
    if (o.fs > 0.0) cfg.fs = o.fs;
    cfg.score_with_previous_theta = o.score_previous;
    cfg.record_trace = o.trace;
    cfg.timing = o.timing;
    cfg.validate();
    return cfg;
}

void emit(const nlohmann::json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw pmgp::InputError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

nlohmann::json predictive_json(const pmgp::Predictive& p) { return {{"mean", p.mean}, {"var", p.var}}; }

template <typename T>
std::vector<T> parse_list(const std::string& text) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::istringstream is(item);
        T v{};
        if (!(is >> v)) throw pmgp::InputError("cannot parse list item '" + item + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    // Reports may go to stdout; keep diagnostics on stderr.
    spdlog::set_default_logger(spdlog::stderr_color_mt("pmgp"));

    CLI::App app{"pM-GP streaming forecaster"};
    app.require_subcommand(1);

    CommonOptions forecast_opts;
    int horizon = 0;
    auto* forecast_cmd = app.add_subcommand("forecast", "Run the online pM-GP forecaster over a series");
    add_model_options(forecast_cmd, forecast_opts);
    forecast_cmd->add_option("--horizon", horizon, "Forecast steps beyond the last observation")
        ->check(CLI::NonNegativeNumber);
    forecast_cmd->add_option("--out", forecast_opts.out, "Report path (default stdout)");

    CommonOptions bench_opts;
    std::string models;
    std::string plot_data;
    auto* bench_cmd = app.add_subcommand("benchmark", "One-step-ahead benchmark against AR baselines");
    add_model_options(bench_cmd, bench_opts);
    bench_cmd->add_option("--models", models, "Comma-separated models, e.g. pmgp,pa-ar2,blr-ar10");
    bench_cmd->add_option("--out", bench_opts.out, "Report path (default stdout)");
    bench_cmd->add_option("--plot-data", plot_data, "Running-NMAE curves as CSV");

    CommonOptions loglik_opts;
    bool exact = false;
    std::string theta_text;
    auto* loglik_cmd = app.add_subcommand("loglik", "Log marginal likelihood at fixed hyperparameters");
    add_model_options(loglik_cmd, loglik_opts);
    loglik_cmd->add_flag("--exact", exact, "Use the dense GPR computation instead of the filter");
    loglik_cmd->add_option("--theta", theta_text, "Flat hyperparameter vector (comma-separated)");
    loglik_cmd->add_option("--out", loglik_opts.out, "Report path (default stdout)");

    CommonOptions sweep_c_opts;
    std::string c_values = "0.001,0.01,0.1,1,10,100";
    auto* sweep_c_cmd = app.add_subcommand("sweep-c", "pM-GP NMAE as a function of c");
    add_model_options(sweep_c_cmd, sweep_c_opts);
    sweep_c_cmd->add_option("--values", c_values, "Comma-separated c values");
    sweep_c_cmd->add_option("--out", sweep_c_opts.out, "Report path (default stdout)");

    CommonOptions sweep_k_opts;
    std::string k_values = "1,2,3,4,5";
    auto* sweep_k_cmd = app.add_subcommand("sweep-k", "pM-GP NMAE as a function of the number of components");
    add_model_options(sweep_k_cmd, sweep_k_opts);
    sweep_k_cmd->add_option("--values", k_values, "Comma-separated component counts");
    sweep_k_cmd->add_option("--out", sweep_k_opts.out, "Report path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInput;
    }

    try {
        if (*forecast_cmd) {
            const auto cfg = make_config(forecast_opts);
            const auto records = pmgp::ingest_csv(forecast_opts.input);
            const pmgp::ForecastRun run = pmgp::run_forecast(records, cfg, horizon);
            nlohmann::json j = pmgp::to_json(run.report, cfg.timing);
            j["predictions"] = run.report.predictions;
            nlohmann::json h = nlohmann::json::array();
            for (const auto& f : run.horizon) {
                h.push_back({{"t", f.t}, {"observation", predictive_json(f.observation)},
                             {"latent", predictive_json(f.latent)}});
            }
            j["horizon"] = std::move(h);
            const Eigen::VectorXd theta = run.final_state.theta.pack();
            j["final_theta"] = std::vector<double>(theta.data(), theta.data() + theta.size());
            emit(j, forecast_opts.out);
        } else if (*bench_cmd) {
            auto cfg = make_config(bench_opts);
            if (!models.empty()) cfg.models = parse_list<std::string>(models);
            const auto records = pmgp::ingest_csv(bench_opts.input);
            const pmgp::BenchmarkReport report = pmgp::run_benchmark(records, cfg);
            emit(pmgp::to_json(report), bench_opts.out);
            if (!plot_data.empty()) {
                std::ofstream out(plot_data);
                if (!out) throw pmgp::InputError("cannot write '" + plot_data + "'");
                pmgp::write_plot_csv(out, report);
            }
            for (const auto& m : report.models) {
                if (!m.ok()) return kExitNumerical;
            }
        } else if (*loglik_cmd) {
            const auto cfg = make_config(loglik_opts);
            const auto records = pmgp::ingest_csv(loglik_opts.input);
            const double fs = pmgp::estimate_fs(records, cfg.fs);
            pmgp::HyperParams theta = pmgp::initial_hyperparams(cfg.trend, cfg.n_components, fs);
            if (!theta_text.empty()) {
                theta = pmgp::HyperParams::unpack(std::span<const double>(parse_list<double>(theta_text)),
                                                  cfg.trend, cfg.n_components);
            }
            double total = 0.0;
            if (exact) {
                Eigen::VectorXd ts(static_cast<Eigen::Index>(records.size()));
                Eigen::VectorXd ys(ts.size());
                for (Eigen::Index i = 0; i < ts.size(); ++i) {
                    ts(i) = records[static_cast<std::size_t>(i)].t;
                    ys(i) = records[static_cast<std::size_t>(i)].y;
                }
                total = pmgp::log_marginal_likelihood(
                    pmgp::GPRProblem{ts, ys, theta.kernel(cfg.p), theta.trend(), theta.sigma()});
            } else {
                pmgp::FilterState state = pmgp::FilterState::initial(cfg.p, theta);
                for (const auto& rec : records) {
                    total += pmgp::local_loglik(state, rec.t, rec.y, state.theta);
                    state = pmgp::update(state, rec.t, rec.y).state;
                }
            }
            const Eigen::VectorXd flat = theta.pack();
            emit({{"method", exact ? "dense_gpr" : "filter"},
                  {"n", records.size()},
                  {"loglik", total},
                  {"theta", std::vector<double>(flat.data(), flat.data() + flat.size())}},
                 loglik_opts.out);
        } else if (*sweep_c_cmd) {
            const auto cfg = make_config(sweep_c_opts);
            const auto records = pmgp::ingest_csv(sweep_c_opts.input);
            emit(pmgp::to_json(pmgp::sweep_c(records, cfg, parse_list<double>(c_values)), "c"), sweep_c_opts.out);
        } else if (*sweep_k_cmd) {
            const auto cfg = make_config(sweep_k_opts);
            const auto records = pmgp::ingest_csv(sweep_k_opts.input);
            emit(pmgp::to_json(pmgp::sweep_k(records, cfg, parse_list<int>(k_values)), "K"), sweep_k_opts.out);
        }
    } catch (const pmgp::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const pmgp::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
