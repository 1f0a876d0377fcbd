#include "modacv/cli.hpp"

#include "modacv/errors.hpp"
#include "modacv/estimators.hpp"
#include "modacv/montecarlo.hpp"
#include "modacv/parallel.hpp"
#include "modacv/series.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace modacv::cli {

namespace {

using nlohmann::ordered_json;

ordered_json json_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

MeanMode parse_mean_mode(const std::string& name) {
    if (name == "none") return MeanMode::None;
    if (name == "modulated") return MeanMode::ModulatedMean;
    if (name == "ratio") return MeanMode::RatioMean;
    throw std::invalid_argument("unknown mean mode '" + name + "'");
}

/// Writes a report to a file, or to `fallback` when no path was given.
void emit(const ordered_json& j, const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
        fallback << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

ordered_json condition_json(const ConditionCheck& c) {
    return {{"kind", "theta"},
            {"pass", c.pass},
            {"threshold", c.threshold},
            {"margin", json_or_null(c.margin)},
            {"source", c.from_exact_sequence ? "exact-sequence" : "power-law"}};
}

// ---------------------------------------------------------------- estimate

struct EstimateOpts {
    std::string input;
    long max_lag = -1;
    std::vector<long> lags;
    std::string mean_mode = "modulated";
    bool acf = false;
    std::string output;
};

void run_estimate(const EstimateOpts& opts, std::ostream& out) {
    const ModulatedSeries series = read_series_csv(opts.input);
    const MeanMode mode = parse_mean_mode(opts.mean_mode);

    std::vector<AcvEstimate> estimates;
    if (opts.max_lag >= 0) {
        estimates = acv_profile(series, static_cast<std::size_t>(opts.max_lag), mode);
    } else if (!opts.lags.empty()) {
        for (const long lag : opts.lags) {
            if (lag < 0) throw std::invalid_argument("lags must be non-negative");
            try {
                estimates.push_back(parzen_acv(series, static_cast<std::size_t>(lag), mode));
            } catch (const ZeroOverlapError&) {
                AcvEstimate flagged;
                flagged.lag = static_cast<std::size_t>(lag);
                flagged.gamma_tilde = std::numeric_limits<double>::quiet_NaN();
                flagged.nu_hat = 0.0;
                flagged.zero_overlap = true;
                estimates.push_back(flagged);
            }
        }
    } else {
        throw std::invalid_argument("one of --max-lag or --lags is required");
    }

    ordered_json j;
    j["schema"] = 1;
    ordered_json lags = ordered_json::array();
    for (const AcvEstimate& e : estimates) lags.push_back(e.lag);
    j["config"] = {{"input", opts.input},
                   {"lags", lags},
                   {"mean_mode", opts.mean_mode},
                   {"acf", opts.acf}};
    j["n"] = series.size();
    j["observed_fraction"] = series.observed_fraction();
    ordered_json items = ordered_json::array();
    for (const AcvEstimate& e : estimates) {
        ordered_json item = {{"lag", e.lag},
                             {"gamma", json_or_null(e.gamma_tilde)},
                             {"nu_hat", e.zero_overlap ? ordered_json(nullptr)
                                                       : ordered_json(e.nu_hat)},
                             {"pair_weight_sum", e.pair_weight_sum},
                             {"n_terms", e.n_terms},
                             {"zero_overlap", e.zero_overlap}};
        if (opts.acf) {
            if (e.zero_overlap) {
                item["rho"] = nullptr;
            } else {
                item["rho"] = parzen_acf(series, e.lag, mode);
            }
        }
        items.push_back(item);
    }
    j["estimates"] = items;
    emit(j, opts.output, out);
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
    std::string process = "ar1:0.5:gaussian:1";
    std::string censor = "constant:1";
    std::size_t n = 0;
    std::uint64_t seed = 42;
    std::size_t burnin = 1000;
    bool latent = false;
    std::string output;
    std::string sidecar;
};

void run_simulate(const SimulateOpts& opts, std::ostream& out) {
    const ProcessModel process = parse_process(opts.process);
    const CensorModel censor = parse_censor(opts.censor);
    PhiloxRng xrng(opts.seed, compose_stream(0, 0, 0));
    PhiloxRng crng(opts.seed, compose_stream(0, 0, 1));
    const std::vector<double> x = simulate(process, opts.n, xrng, opts.burnin);
    const std::vector<double> c = simulate_censor(censor, opts.n, crng);
    // --latent writes the uncensored series (unit weights), still a valid
    // y,c file for estimate.
    const ModulatedSeries series =
        opts.latent ? ModulatedSeries(x, std::vector<double>(opts.n, 1.0)) : modulate(x, c);
    if (opts.output.empty() || opts.output == "-") {
        write_series_csv(out, series);
    } else {
        write_series_csv(opts.output, series);
    }

    // Sidecar with the resolved model, its dependence-bound table and the
    // exact autocovariance when one exists.  Written next to a file output
    // by default; stdout output gets no sidecar unless --sidecar names one.
    std::string sidecar = opts.sidecar;
    if (sidecar.empty() && !opts.output.empty() && opts.output != "-") {
        sidecar = opts.output + ".json";
    }
    if (sidecar.empty()) return;

    ordered_json j;
    j["schema"] = 1;
    j["config"] = {{"process", opts.process},
                   {"censor", opts.censor},
                   {"n", opts.n},
                   {"seed", opts.seed},
                   {"burnin", opts.burnin},
                   {"latent", opts.latent}};
    j["model"] = to_string(process);
    j["censor_model"] = to_string(censor);
    j["contraction"] = contraction(process);
    ordered_json table = ordered_json::array();
    for (long r = 1; r <= 20; ++r) {
        table.push_back({{"r", r}, {"bound", theta_bound(process, r)}});
    }
    j["theta_bound"] = table;
    if (const std::optional<AcvModel> acv = analytic_gamma(process)) {
        ordered_json gamma = ordered_json::array();
        for (long k = 0; k <= 20; ++k) gamma.push_back(acv->gamma(k));
        j["analytic_gamma"] = gamma;
    } else {
        j["analytic_gamma"] = nullptr;
    }
    emit(j, sidecar, out);
}

// ------------------------------------------------------------- asymptotics

struct AsymptoticsOpts {
    std::string process = "ar1:0.5:gaussian:1";
    std::string censor = "constant:1";
    std::vector<long> lags;
    long truncation = 0;
    double moment_m = 5.0;
    std::string output;
};

void run_asymptotics(const AsymptoticsOpts& opts, std::ostream& out) {
    const ProcessModel process = parse_process(opts.process);
    const CensorModel censor = parse_censor(opts.censor);
    const std::optional<AcvModel> acv = analytic_gamma(process);
    if (!acv) {
        throw std::invalid_argument(
            "asymptotics needs a model with a closed-form autocovariance");
    }
    const ConditionCheck condition = clt_condition(theta_decay(process), opts.moment_m);
    const auto matrix = sigma_matrix(acv.value(), censor, opts.lags, opts.truncation);

    ordered_json j;
    j["schema"] = 1;
    j["config"] = {{"process", opts.process},
                   {"censor", opts.censor},
                   {"lags", opts.lags},
                   {"truncation_k", opts.truncation},
                   {"moment_m", opts.moment_m}};
    j["condition"] = condition_json(condition);
    ordered_json per_lag = ordered_json::array();
    for (const long lag : opts.lags) {
        const VarianceSum vs = sigma2(acv.value(), censor, lag, opts.truncation);
        ordered_json item = {{"lag", lag},
                             {"sigma2", vs.value},
                             {"truncation", vs.truncation},
                             {"summable", vs.summable},
                             {"last_shell", vs.last_shell}};
        if (vs.has_literal) {
            item["literal_sigma2"] = vs.literal_value;
            item["literal_summable"] = vs.literal_summable;
        } else {
            item["literal_sigma2"] = nullptr;
            item["literal_summable"] = nullptr;
        }
        per_lag.push_back(item);
    }
    j["per_lag"] = per_lag;
    j["sigma_matrix"] = matrix;
    emit(j, opts.output, out);
}

// ---------------------------------------------------------------- spectral

struct SpectralOpts {
    std::string input;
    std::vector<double> freq;
    long max_lag = -1;
    std::string g;
    double s = 2.0;
    std::string mean_mode = "modulated";
    std::string output;
};

void run_spectral(const SpectralOpts& opts, std::ostream& out) {
    if (opts.freq.empty() && opts.g.empty()) {
        throw std::invalid_argument("nothing to do: pass --freq and/or --g");
    }
    const ModulatedSeries series = read_series_csv(opts.input);
    const MeanMode mode = parse_mean_mode(opts.mean_mode);

    ordered_json j;
    j["schema"] = 1;
    j["config"] = {{"input", opts.input},
                   {"freq", opts.freq},
                   {"g", opts.g.empty() ? ordered_json(nullptr) : ordered_json(opts.g)},
                   {"s", opts.s},
                   {"mean_mode", opts.mean_mode}};

    if (!opts.freq.empty()) {
        const std::size_t lag = opts.max_lag >= 0 ? static_cast<std::size_t>(opts.max_lag)
                                                  : default_periodogram_lag(series.size());
        const PeriodogramResult pg = modified_periodogram(series, opts.freq, lag, mode);
        j["config"]["max_lag"] = lag;
        j["periodogram"] = {{"freq", opts.freq},
                            {"values", pg.values},
                            {"flagged_lags", pg.flagged_lags}};
    } else {
        j["config"]["max_lag"] =
            opts.max_lag >= 0 ? ordered_json(opts.max_lag) : ordered_json(nullptr);
        j["periodogram"] = nullptr;
    }

    if (!opts.g.empty()) {
        const SpectralFunctional g = SpectralFunctional::parse(opts.g, opts.s);
        const std::size_t cap = opts.max_lag >= 0 ? static_cast<std::size_t>(opts.max_lag)
                                                  : static_cast<std::size_t>(g.max_lag());
        const FunctionalEstimate fe = integrated_functional(series, g, cap, mode);
        j["functional"] = {{"value", fe.value},
                           {"flagged_lags", fe.flagged_lags},
                           {"sobolev_norm", sobolev_norm(g)}};
    } else {
        j["functional"] = nullptr;
    }
    emit(j, opts.output, out);
}

// ------------------------------------------------------------- monte carlo

struct McCltOpts {
    std::string process = "ar1:0.5:gaussian:1";
    std::string censor = "constant:1";
    std::vector<long> lags;
    std::size_t n = 0;
    int replicates = 0;
    std::uint64_t seed = 42;
    long truncation = 0;
    std::size_t burnin = 1000;
    double moment_m = 5.0;
    int threads = 0;
    std::string output;
};

void run_mc_clt(const McCltOpts& opts, std::ostream& out, std::ostream& err) {
    const CltReport report =
        clt_experiment(parse_process(opts.process), parse_censor(opts.censor), opts.lags, opts.n,
                       opts.replicates, opts.seed, opts.truncation, opts.threads, opts.burnin,
                       opts.moment_m);
    emit(to_json(report), opts.output, out);
    err << "clt: " << (report.pass ? "pass" : "FAIL") << " in " << report.wall_seconds << " s\n";
}

struct McSllnOpts {
    std::string process = "ar1:0.5:gaussian:1";
    std::string censor = "constant:1";
    long lag = 0;
    std::vector<std::size_t> checkpoints;
    int trajectories = 0;
    std::uint64_t seed = 42;
    std::size_t burnin = 1000;
    int threads = 0;
    std::string output;
};

void run_mc_slln(const McSllnOpts& opts, std::ostream& out, std::ostream& err) {
    const SllnReport report =
        slln_experiment(parse_process(opts.process), parse_censor(opts.censor), opts.lag,
                        opts.checkpoints, opts.trajectories, opts.seed, opts.threads,
                        opts.burnin);
    emit(to_json(report), opts.output, out);
    err << "slln: " << (report.pass ? "pass" : "FAIL") << " in " << report.wall_seconds
        << " s\n";
}

struct McRatioOpts {
    std::string generator = "iid";
    double p = 2.0;
    double q = 4.0;
    std::string regime;
    std::vector<std::size_t> n_grid;
    int replicates = 0;
    std::uint64_t seed = 42;
    int threads = 0;
    std::string output;
};

void run_mc_ratio(const McRatioOpts& opts, std::ostream& out, std::ostream& err) {
    const RatioReport report =
        ratio_rate_report(PairGenerator::parse(opts.generator), opts.p, opts.q, opts.regime,
                          opts.n_grid, opts.replicates, opts.seed, opts.threads);
    emit(to_json(report), opts.output, out);
    err << "ratio: " << (report.pass ? "pass" : "FAIL") << " in " << report.wall_seconds
        << " s\n";
}

struct McSpectralOpts {
    std::string process = "ar1:0.5:gaussian:1";
    std::string censor = "constant:1";
    std::string g;
    double s = 2.0;
    std::vector<std::size_t> n_grid;
    int replicates = 0;
    std::uint64_t seed = 42;
    std::size_t burnin = 1000;
    int threads = 0;
    std::string output;
};

void run_mc_spectral(const McSpectralOpts& opts, std::ostream& out, std::ostream& err) {
    const SpectralFunctional g = SpectralFunctional::parse(opts.g, opts.s);
    const SpectralReport report =
        spectral_report(parse_process(opts.process), parse_censor(opts.censor), g, opts.g,
                        opts.n_grid, opts.replicates, opts.seed, opts.threads, opts.burnin);
    emit(to_json(report), opts.output, out);
    err << "spectral: " << (report.pass ? "pass" : "FAIL") << " in " << report.wall_seconds
        << " s\n";
}

struct McSuiteOpts {
    std::string config;
    std::string out_dir;
    int threads = 0;
};

void run_mc_suite(const McSuiteOpts& opts, std::ostream& err) {
    const std::vector<SuiteOutcome> outcomes = run_suite(opts.config, opts.out_dir, opts.threads);
    for (const SuiteOutcome& o : outcomes) {
        if (o.ok) {
            err << o.id << ": " << (o.pass ? "pass" : "FAIL") << " -> " << o.file << '\n';
        } else {
            err << o.id << ": error: " << o.error << '\n';
        }
    }
}

}  // namespace

int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Autocovariance estimation for amplitude-modulated (censored) series"};
    app.name("modacv");
    app.require_subcommand(1);
    app.set_config("--options")
        ->description("INI file with default flag values ([subcommand] sections)");
    app.allow_config_extras(false);
    app.failure_message(CLI::FailureMessage::simple);
    const int default_threads_count = default_threads();

    EstimateOpts est;
    CLI::App* estimate = app.add_subcommand(
        "estimate", "Weight-normalised autocovariances of a y,c CSV series");
    estimate->add_option("--input", est.input, "CSV file with y,c columns")
        ->required()
        ->check(CLI::ExistingFile);
    CLI::Option* opt_max_lag =
        estimate->add_option("--max-lag", est.max_lag, "estimate all lags 0..M");
    estimate->add_option("--lags", est.lags, "comma-separated lag list")
        ->delimiter(',')
        ->excludes(opt_max_lag);
    estimate->add_option("--mean-mode", est.mean_mode, "none | modulated | ratio")
        ->check(CLI::IsMember({"none", "modulated", "ratio"}));
    estimate->add_flag("--acf", est.acf, "also report autocorrelations");
    estimate->add_option("--output", est.output, "JSON output file (default: stdout)");
    estimate->callback([&] { run_estimate(est, out); });

    SimulateOpts sim;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Simulate a latent process under a censoring process, CSV out");
    simulate->add_option("--process", sim.process, "process spec, e.g. ar1:0.5:gaussian:1");
    simulate->add_option("--censor", sim.censor, "censor spec, e.g. bernoulli:0.7");
    simulate->add_option("--n", sim.n, "sample size")->required();
    simulate->add_option("--seed", sim.seed, "RNG seed");
    simulate->add_option("--burnin", sim.burnin, "warm-up steps dropped");
    simulate->add_flag("--latent", sim.latent, "write the uncensored series instead");
    simulate->add_option("--output", sim.output, "CSV output file (default: stdout)");
    simulate->add_option("--sidecar", sim.sidecar,
                         "JSON sidecar path (default: <output>.json, none for stdout)");
    simulate->callback([&] { run_simulate(sim, out); });

    AsymptoticsOpts asy;
    CLI::App* asymptotics = app.add_subcommand(
        "asymptotics", "Asymptotic (co)variances and dependence-rate checks");
    asymptotics->add_option("--process", asy.process, "process spec (closed-form models only)");
    asymptotics->add_option("--censor", asy.censor, "censor spec");
    asymptotics->add_option("--lags", asy.lags, "comma-separated lag list")
        ->delimiter(',')
        ->required();
    asymptotics->add_option("--truncation-k", asy.truncation, "series truncation (0 = auto)");
    asymptotics->add_option("--moment-m", asy.moment_m, "moment order for the rate check");
    asymptotics->add_option("--output", asy.output, "JSON output file (default: stdout)");
    asymptotics->callback([&] { run_asymptotics(asy, out); });

    SpectralOpts spec;
    CLI::App* spectral = app.add_subcommand(
        "spectral", "Modified periodogram and integrated functionals of a CSV series");
    spectral->add_option("--input", spec.input, "CSV file with y,c columns")
        ->required()
        ->check(CLI::ExistingFile);
    spectral->add_option("--freq", spec.freq, "frequencies to evaluate, comma-separated")
        ->delimiter(',');
    spectral->add_option("--max-lag", spec.max_lag, "truncation lag (default: floor(N^(1/3)))");
    spectral->add_option("--g", spec.g, "functional coefficients LAG:VALUE,LAG:VALUE,...");
    spectral->add_option("--s", spec.s, "smoothness index of the coefficient space");
    spectral->add_option("--mean-mode", spec.mean_mode, "none | modulated | ratio")
        ->check(CLI::IsMember({"none", "modulated", "ratio"}));
    spectral->add_option("--output", spec.output, "JSON output file (default: stdout)");
    spectral->callback([&] { run_spectral(spec, out); });

    McCltOpts clt;
    clt.threads = default_threads_count;
    CLI::App* mc_clt = app.add_subcommand(
        "mc-clt", "Monte Carlo check of the estimator's limiting normal law");
    mc_clt->add_option("--process", clt.process, "process spec (closed-form models only)");
    mc_clt->add_option("--censor", clt.censor, "censor spec");
    mc_clt->add_option("--lags", clt.lags, "lags under test")->delimiter(',')->required();
    mc_clt->add_option("--n", clt.n, "sample size per replicate")->required();
    mc_clt->add_option("--replicates", clt.replicates, "number of replicates (>= 100)")
        ->required();
    mc_clt->add_option("--seed", clt.seed, "RNG seed");
    mc_clt->add_option("--truncation-k", clt.truncation, "variance truncation (0 = auto)");
    mc_clt->add_option("--burnin", clt.burnin, "warm-up steps dropped");
    mc_clt->add_option("--moment-m", clt.moment_m, "moment order for the rate check");
    mc_clt->add_option("--threads", clt.threads, "worker threads");
    mc_clt->add_option("--output", clt.output, "JSON report file (default: stdout)");
    mc_clt->callback([&] { run_mc_clt(clt, out, err); });

    McSllnOpts slln;
    slln.threads = default_threads_count;
    CLI::App* mc_slln = app.add_subcommand(
        "mc-slln", "Monte Carlo check of almost-sure convergence via tail sup-errors");
    mc_slln->add_option("--process", slln.process, "process spec (closed-form models only)");
    mc_slln->add_option("--censor", slln.censor, "censor spec");
    mc_slln->add_option("--lag", slln.lag, "lag under test")->required();
    mc_slln->add_option("--checkpoints", slln.checkpoints, "sample sizes to report")
        ->delimiter(',')
        ->required();
    mc_slln->add_option("--trajectories", slln.trajectories, "number of trajectories")
        ->required();
    mc_slln->add_option("--seed", slln.seed, "RNG seed");
    mc_slln->add_option("--burnin", slln.burnin, "warm-up steps dropped");
    mc_slln->add_option("--threads", slln.threads, "worker threads");
    mc_slln->add_option("--output", slln.output, "JSON report file (default: stdout)");
    mc_slln->callback([&] { run_mc_slln(slln, out, err); });

    McRatioOpts ratio;
    ratio.threads = default_threads_count;
    CLI::App* mc_ratio = app.add_subcommand(
        "mc-ratio", "L^p convergence rate of the ratio-of-means estimator");
    mc_ratio->add_option("--generator", ratio.generator,
                         "iid | causal_ar1[:PHI] | noncausal_ma");
    mc_ratio->add_option("--p", ratio.p, "error norm order");
    mc_ratio->add_option("--q", ratio.q, "input moment order");
    mc_ratio->add_option("--regime", ratio.regime,
                         "iid | mixing:RATE:RPRIME | causal:RATE | lambda_nc:RATE");
    mc_ratio->add_option("--n-grid", ratio.n_grid, "sample sizes (>= 4, increasing)")
        ->delimiter(',')
        ->required();
    mc_ratio->add_option("--replicates", ratio.replicates, "replicates per size")->required();
    mc_ratio->add_option("--seed", ratio.seed, "RNG seed");
    mc_ratio->add_option("--threads", ratio.threads, "worker threads");
    mc_ratio->add_option("--output", ratio.output, "JSON report file (default: stdout)");
    mc_ratio->callback([&] { run_mc_ratio(ratio, out, err); });

    McSpectralOpts mspec;
    mspec.threads = default_threads_count;
    CLI::App* mc_spectral = app.add_subcommand(
        "mc-spectral", "Convergence of integrated functionals in the dual norm");
    mc_spectral->add_option("--process", mspec.process,
                            "process spec (closed-form models only)");
    mc_spectral->add_option("--censor", mspec.censor, "censor spec");
    mc_spectral->add_option("--g", mspec.g, "functional coefficients LAG:VALUE,...")
        ->required();
    mc_spectral->add_option("--s", mspec.s, "smoothness index");
    mc_spectral->add_option("--n-grid", mspec.n_grid, "sample sizes (increasing)")
        ->delimiter(',')
        ->required();
    mc_spectral->add_option("--replicates", mspec.replicates, "replicates per size")
        ->required();
    mc_spectral->add_option("--seed", mspec.seed, "RNG seed");
    mc_spectral->add_option("--burnin", mspec.burnin, "warm-up steps dropped");
    mc_spectral->add_option("--threads", mspec.threads, "worker threads");
    mc_spectral->add_option("--output", mspec.output, "JSON report file (default: stdout)");
    mc_spectral->callback([&] { run_mc_spectral(mspec, out, err); });

    McSuiteOpts suite;
    suite.threads = default_threads_count;
    CLI::App* mc_suite = app.add_subcommand(
        "mc-suite", "Run every experiment in a config file, one JSON report each");
    mc_suite->add_option("--config", suite.config, "experiment declarations (key = value)")
        ->required()
        ->check(CLI::ExistingFile);
    mc_suite->add_option("--out", suite.out_dir, "output directory")->required();
    mc_suite->add_option("--threads", suite.threads, "worker threads");
    mc_suite->callback([&] { run_mc_suite(suite, err); });

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace modacv::cli
