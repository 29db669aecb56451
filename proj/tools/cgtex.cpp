#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cgtex/artifacts.hpp"
#include "cgtex/em.hpp"
#include "cgtex/evaluation.hpp"
#include "cgtex/marginal.hpp"
#include "cgtex/signal.hpp"
#include "cgtex/texture.hpp"

namespace fs = std::filesystem;
using namespace cgtex;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

std::vector<std::string> csv_header(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file " + path.string());
    std::vector<std::string> names;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        names.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
    }
    return names;
}

MultichannelRecord load_record(const fs::path& input, std::vector<std::string> channels,
                               double sample_rate) {
    if (channels.empty()) channels = csv_header(input);
    return ingest_csv(input, channels, sample_rate);
}

std::vector<Family> parse_families(const std::string& family) {
    if (family == "all") return {Family::cge, Family::cgg, Family::cgig};
    return {family_from_string(family)};
}

TextureParams texture_from_flags(Family family, double lambda, double alpha, double beta) {
    switch (family) {
        case Family::cge: return Exponential{lambda};
        case Family::cgg: return Gamma{alpha, beta};
        case Family::cgig: return InverseGamma{alpha, beta};
    }
    throw std::logic_error("unknown family");
}

void print_warnings(const CgFit& fit) {
    for (const auto& w : fit.warnings) std::cerr << "warning: " << w << "\n";
}

struct CommonArgs {
    std::string input;
    std::vector<std::string> channels;
    std::vector<int> segments;  // K,N
    std::string family = "cge";
    int bins = 100;
    double phi_o = 1e-5;
    int max_iter = 1000;
    std::uint64_t seed = 0;
    double sample_rate = 2000.0;
    std::string out = ".";
};

void add_fit_flags(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--phi-o", args.phi_o, "Convergence threshold on the parameter change");
    cmd->add_option("--max-iter", args.max_iter, "Iteration cap");
}

void add_input_flags(CLI::App* cmd, CommonArgs& args, bool need_segments) {
    cmd->add_option("--input", args.input, "Input CSV (header row of channel names)")
        ->required();
    cmd->add_option("--channels", args.channels, "Channel columns to use (default: all)")
        ->delimiter(',');
    auto* seg = cmd->add_option("--segments", args.segments, "Segmentation as K,N")
                    ->delimiter(',')
                    ->expected(2);
    if (need_segments) seg->required();
    cmd->add_option("--sample-rate", args.sample_rate, "Sample rate in Hz");
}

int run_fit(const CommonArgs& args) {
    const auto record = load_record(args.input, args.channels, args.sample_rate);
    const auto sig = segment(record, args.segments[0], args.segments[1]);
    FitOptions opts;
    opts.phi_o = args.phi_o;
    opts.max_iter = args.max_iter;
    fs::create_directories(args.out);
    bool all_converged = true;
    for (const Family family : parse_families(args.family)) {
        const CgFit result = fit(sig, family, {}, opts);
        print_warnings(result);
        const fs::path path = fs::path(args.out) / ("fit_" + to_string(family) + ".json");
        save_fit_json(result, path);
        std::cout << to_string(family) << ": iterations=" << result.iterations
                  << " converged=" << (result.converged ? "yes" : "no")
                  << " llv=" << result.final_log_likelihood << " -> " << path.string() << "\n";
        all_converged = all_converged && result.converged;
    }
    return all_converged ? kExitOk : kExitNotConverged;
}

int run_simulate(const CommonArgs& args, double lambda, double alpha, double beta,
                 std::vector<double> mu_flat, std::vector<double> sigma_flat) {
    const Family family = family_from_string(args.family);
    const TextureParams texture = texture_from_flags(family, lambda, alpha, beta);
    if (mu_flat.empty()) mu_flat = {0.0, 0.0};
    const int d = static_cast<int>(mu_flat.size());
    Eigen::VectorXd mu = Eigen::Map<Eigen::VectorXd>(mu_flat.data(), d);
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(d, d);
    if (!sigma_flat.empty()) {
        if (static_cast<int>(sigma_flat.size()) != d * d)
            throw std::runtime_error("--sigma needs d*d row-major entries");
        sigma = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                         Eigen::RowMajor>>(sigma_flat.data(), d, d);
    }
    const int K = args.segments[0], N = args.segments[1];
    const SegmentedSignal sig = simulate_cg(texture, mu, sigma, K, N, args.seed);
    std::vector<std::string> names;
    for (int c = 1; c <= d; ++c) names.push_back("ch" + std::to_string(c));
    fs::create_directories(args.out);
    save_signal_csv(sig, names, fs::path(args.out) / "simulated.csv");
    save_truth_json(texture, mu, sigma, K, N, args.seed,
                    fs::path(args.out) / "simulated_truth.json");
    std::cout << "wrote " << (fs::path(args.out) / "simulated.csv").string() << " (" << K * N
              << " rows, " << d << " channels)\n";
    return kExitOk;
}

int run_evaluate(const CommonArgs& args, const std::vector<std::string>& fit_paths,
                 std::size_t mc_samples) {
    std::vector<CgFit> fits;
    for (const auto& p : fit_paths) fits.push_back(load_fit_json(p));
    const int K = fits.front().segment_count;
    const int N = fits.front().samples_per_segment;
    for (const auto& f : fits)
        if (f.segment_count != K || f.samples_per_segment != N)
            throw std::runtime_error("fit artifacts disagree on the (K, N) segmentation");

    const auto record = load_record(args.input, args.channels, args.sample_rate);
    const auto sig = segment(record, K, N);

    std::vector<std::string> warnings;
    const EmpiricalDensity emp = build_empdf(sig, args.bins, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

    EvalReport report;
    fs::create_directories(args.out);
    for (const auto& f : fits) {
        if (f.mu.size() != sig.channels())
            throw std::runtime_error("fit dimension does not match the data");
        const MarginalModel model(f.mu, f.sigma, f.texture);
        const Eigen::MatrixXd grid = model.pdf_grid(emp.x_edges, emp.y_edges);
        const MomentReport moments = moment_report(f, sig, mc_samples, args.seed);
        ModelEval entry;
        entry.kld = kld(emp, grid);
        entry.r2 = r_squared(emp, grid);
        entry.llv = model.log_likelihood(sig);
        entry.mean = moments.model_mean;
        entry.covariance = moments.model_covariance;
        entry.mardia_kurtosis = moments.model_mardia_kurtosis;
        entry.lambda_summary = texture_mean(f.texture);
        entry.p_t = total_power(f);
        report.models[to_string(f.family)] = entry;
        report.empdf_mean = moments.data_mean;
        report.empdf_covariance = moments.data_covariance;
        report.empdf_mardia_kurtosis = moments.data_mardia_kurtosis;
        save_grid_csv(emp, grid, fs::path(args.out) / ("grid_" + to_string(f.family) + ".csv"));
        std::cout << to_string(f.family) << ": kld=" << entry.kld << " r2=" << entry.r2
                  << " llv=" << entry.llv << "\n";
    }
    save_eval_report_json(report, fs::path(args.out) / "eval_report.json");
    return kExitOk;
}

int run_gridsearch(const CommonArgs& args, const std::vector<int>& k_candidates,
                   const std::vector<int>& n_candidates) {
    const auto record = load_record(args.input, args.channels, args.sample_rate);
    FitOptions opts;
    opts.phi_o = args.phi_o;
    opts.max_iter = args.max_iter;
    fs::create_directories(args.out);
    for (const Family family : parse_families(args.family)) {
        const GridSearchResult result =
            grid_search_kn(record, family, k_candidates, n_candidates, args.bins, opts);
        save_gridsearch_csv(result,
                            fs::path(args.out) / ("gridsearch_" + to_string(family) + ".csv"));
        std::cout << to_string(family) << ": best K=" << result.best_k
                  << " N=" << result.best_n << "\n";
    }
    return kExitOk;
}

int run_report(const CommonArgs& args, const std::vector<std::string>& groups) {
    std::vector<std::pair<std::string, CgFit>> fits;
    for (const auto& spec : groups) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("--group entries must look like label=fit.json, got '" +
                                     spec + "'");
        fits.emplace_back(spec.substr(0, eq), load_fit_json(spec.substr(eq + 1)));
    }
    const auto rows = lambda_and_pt_summary(fits);
    fs::create_directories(args.out);
    save_summary_csv(rows, fs::path(args.out) / "summary.csv");
    std::cout << "wrote " << (fs::path(args.out) / "summary.csv").string() << " (" << rows.size()
              << " groups)\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compound-Gaussian texture models for multichannel signals"};
    app.set_config("--config", "", "Flat key=value config file; command-line flags override");
    app.require_subcommand(1);

    CommonArgs args;

    auto* fit_cmd = app.add_subcommand("fit", "Fit one or more texture families by EM");
    add_input_flags(fit_cmd, args, true);
    add_fit_flags(fit_cmd, args);
    fit_cmd->add_option("--family", args.family, "cge, cgg, cgig or all");
    fit_cmd->add_option("--out", args.out, "Output directory");

    auto* sim_cmd = app.add_subcommand("simulate", "Generate compound-Gaussian data");
    double lambda = 1.0, alpha = 1.0, beta = 1.0;
    std::vector<double> mu_flat, sigma_flat;
    sim_cmd->add_option("--family", args.family, "cge, cgg or cgig");
    sim_cmd->add_option("--lambda", lambda, "Exponential texture mean");
    sim_cmd->add_option("--alpha", alpha, "Gamma/inverse-gamma shape");
    sim_cmd->add_option("--beta", beta, "Gamma rate / inverse-gamma scale");
    sim_cmd->add_option("--mu", mu_flat, "Mean vector (defines d; default 0,0)")->delimiter(',');
    sim_cmd->add_option("--sigma", sigma_flat, "Covariance, row-major d*d (default identity)")
        ->delimiter(',');
    sim_cmd->add_option("--segments", args.segments, "K,N")->delimiter(',')->expected(2)->required();
    sim_cmd->add_option("--seed", args.seed, "RNG seed");
    sim_cmd->add_option("--out", args.out, "Output directory");

    auto* eval_cmd = app.add_subcommand("evaluate", "Score fit artifacts against the empdf");
    std::vector<std::string> fit_paths;
    std::size_t mc_samples = 1000000;
    add_input_flags(eval_cmd, args, false);
    eval_cmd->add_option("--fits", fit_paths, "Fit JSON artifacts")->required();
    eval_cmd->add_option("--bins", args.bins, "Histogram bins per axis");
    eval_cmd->add_option("--mc-samples", mc_samples, "Draws for the model-side kurtosis");
    eval_cmd->add_option("--seed", args.seed, "RNG seed for the model-side kurtosis");
    eval_cmd->add_option("--out", args.out, "Output directory");

    auto* grid_cmd = app.add_subcommand("gridsearch", "KLD grid search over (K, N)");
    std::vector<int> k_candidates, n_candidates;
    add_input_flags(grid_cmd, args, false);
    add_fit_flags(grid_cmd, args);
    grid_cmd->add_option("--family", args.family, "cge, cgg, cgig or all");
    grid_cmd->add_option("--k-candidates", k_candidates, "Segment counts to try")
        ->delimiter(',')
        ->required();
    grid_cmd->add_option("--n-candidates", n_candidates, "Segment lengths to try")
        ->delimiter(',')
        ->required();
    grid_cmd->add_option("--bins", args.bins, "Histogram bins per axis");
    grid_cmd->add_option("--out", args.out, "Output directory");

    auto* report_cmd = app.add_subcommand("report", "Condition summaries of fitted models");
    std::vector<std::string> groups;
    report_cmd->add_option("--group", groups, "label=fit.json (repeatable)")->required();
    report_cmd->add_option("--out", args.out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(fit_cmd)) return run_fit(args);
        if (app.got_subcommand(sim_cmd))
            return run_simulate(args, lambda, alpha, beta, mu_flat, sigma_flat);
        if (app.got_subcommand(eval_cmd)) return run_evaluate(args, fit_paths, mc_samples);
        if (app.got_subcommand(grid_cmd)) return run_gridsearch(args, k_candidates, n_candidates);
        if (app.got_subcommand(report_cmd)) return run_report(args, groups);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
