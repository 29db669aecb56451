#include "cgtex/artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace cgtex {

namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (long i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (long i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (long j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(row);
    }
    return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
    return v;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const long rows = j.size();
    const long cols = rows > 0 ? static_cast<long>(j[0].size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (long i = 0; i < rows; ++i)
        for (long jj = 0; jj < cols; ++jj) m(i, jj) = j[i][jj].get<double>();
    return m;
}

json texture_to_json(const TextureParams& texture) {
    json out;
    out["family"] = to_string(family_of(texture));
    if (const auto* e = std::get_if<Exponential>(&texture)) {
        out["lambda"] = e->lambda;
    } else if (const auto* g = std::get_if<Gamma>(&texture)) {
        out["alpha"] = g->alpha;
        out["beta"] = g->beta;
    } else {
        const auto& ig = std::get<InverseGamma>(texture);
        out["alpha"] = ig.alpha;
        out["beta"] = ig.beta;
    }
    return out;
}

TextureParams texture_from_json(const json& j) {
    const Family family = family_from_string(j.at("family").get<std::string>());
    switch (family) {
        case Family::cge: return Exponential{j.at("lambda").get<double>()};
        case Family::cgg: return Gamma{j.at("alpha").get<double>(), j.at("beta").get<double>()};
        case Family::cgig:
            return InverseGamma{j.at("alpha").get<double>(), j.at("beta").get<double>()};
    }
    throw std::logic_error("texture_from_json: unknown family");
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void save_fit_json(const CgFit& fit, const std::filesystem::path& path) {
    json j;
    j["family"] = to_string(fit.family);
    j["mu"] = vector_to_json(fit.mu);
    j["sigma"] = matrix_to_json(fit.sigma);
    j["texture"] = texture_to_json(fit.texture);
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    j["final_phi"] = fit.final_phi;
    j["final_log_likelihood"] = fit.final_log_likelihood;
    j["segment_count"] = fit.segment_count;
    j["samples_per_segment"] = fit.samples_per_segment;
    j["warnings"] = fit.warnings;
    json trace = json::array();
    for (const auto& t : fit.trace)
        trace.push_back({{"iteration", t.iteration},
                         {"phi", t.phi},
                         {"log_likelihood", t.log_likelihood}});
    j["trace"] = trace;
    write_text_file(path, j.dump(2) + "\n");
}

CgFit load_fit_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open fit artifact " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("corrupted fit artifact " + path.string() + ": " + e.what());
    }
    CgFit fit;
    try {
        fit.family = family_from_string(j.at("family").get<std::string>());
        fit.mu = vector_from_json(j.at("mu"));
        fit.sigma = matrix_from_json(j.at("sigma"));
        fit.texture = texture_from_json(j.at("texture"));
        fit.iterations = j.at("iterations").get<int>();
        fit.converged = j.at("converged").get<bool>();
        fit.final_phi = j.at("final_phi").get<double>();
        fit.final_log_likelihood = j.at("final_log_likelihood").get<double>();
        fit.segment_count = j.at("segment_count").get<int>();
        fit.samples_per_segment = j.at("samples_per_segment").get<int>();
        if (j.contains("warnings"))
            fit.warnings = j.at("warnings").get<std::vector<std::string>>();
        if (j.contains("trace"))
            for (const auto& t : j.at("trace"))
                fit.trace.push_back({t.at("iteration").get<int>(), t.at("phi").get<double>(),
                                     t.at("log_likelihood").get<double>()});
    } catch (const json::exception& e) {
        throw std::runtime_error("corrupted fit artifact " + path.string() + ": " + e.what());
    }
    return fit;
}

void save_eval_report_json(const EvalReport& report, const std::filesystem::path& path) {
    json j;
    j["empdf"] = {{"mean", vector_to_json(report.empdf_mean)},
                  {"covariance", matrix_to_json(report.empdf_covariance)},
                  {"mardia_kurtosis", report.empdf_mardia_kurtosis}};
    json models;
    for (const auto& [name, m] : report.models) {
        models[name] = {{"kld", m.kld},
                        {"r2", m.r2},
                        {"llv", m.llv},
                        {"mean", vector_to_json(m.mean)},
                        {"covariance", matrix_to_json(m.covariance)},
                        {"mardia_kurtosis", m.mardia_kurtosis},
                        {"lambda_summary", m.lambda_summary},
                        {"p_t", m.p_t}};
    }
    j["models"] = models;
    write_text_file(path, j.dump(2) + "\n");
}

void save_grid_csv(const EmpiricalDensity& emp, const Eigen::MatrixXd& model_mass,
                   const std::filesystem::path& path) {
    if (model_mass.rows() != emp.mass.rows() || model_mass.cols() != emp.mass.cols())
        throw std::invalid_argument("save_grid_csv: grid shape mismatch");
    std::string out = "x_center,y_center,empdf_mass,model_mass\n";
    for (long i = 0; i < emp.mass.rows(); ++i) {
        const double xc = 0.5 * (emp.x_edges[i] + emp.x_edges[i + 1]);
        for (long j = 0; j < emp.mass.cols(); ++j) {
            const double yc = 0.5 * (emp.y_edges[j] + emp.y_edges[j + 1]);
            out += format_double(xc) + "," + format_double(yc) + "," +
                   format_double(emp.mass(i, j)) + "," + format_double(model_mass(i, j)) + "\n";
        }
    }
    write_text_file(path, out);
}

void save_signal_csv(const SegmentedSignal& sig, const std::vector<std::string>& channel_names,
                     const std::filesystem::path& path) {
    if (static_cast<int>(channel_names.size()) != sig.channels())
        throw std::invalid_argument("save_signal_csv: channel name count mismatch");
    std::string out;
    for (std::size_t c = 0; c < channel_names.size(); ++c) {
        if (c) out += ",";
        out += channel_names[c];
    }
    out += "\n";
    const Eigen::MatrixXd& samples = sig.samples();
    for (long i = 0; i < samples.rows(); ++i) {
        for (long j = 0; j < samples.cols(); ++j) {
            if (j) out += ",";
            out += format_double(samples(i, j));
        }
        out += "\n";
    }
    write_text_file(path, out);
}

void save_truth_json(const TextureParams& texture, const Eigen::VectorXd& mu,
                     const Eigen::MatrixXd& sigma, int segment_count, int samples_per_segment,
                     std::uint64_t seed, const std::filesystem::path& path) {
    json j;
    j["texture"] = texture_to_json(texture);
    j["mu"] = vector_to_json(mu);
    j["sigma"] = matrix_to_json(sigma);
    j["segment_count"] = segment_count;
    j["samples_per_segment"] = samples_per_segment;
    j["seed"] = seed;
    write_text_file(path, j.dump(2) + "\n");
}

void save_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
    std::string out = "condition,label,lambda,p_t\n";
    for (const auto& row : rows)
        out += row.condition + "," + row.label + "," + format_double(row.lambda) + "," +
               format_double(row.p_t) + "\n";
    write_text_file(path, out);
}

void save_gridsearch_csv(const GridSearchResult& result, const std::filesystem::path& path) {
    std::string out = "K,N,kld\n";
    for (std::size_t i = 0; i < result.k_candidates.size(); ++i)
        for (std::size_t j = 0; j < result.n_candidates.size(); ++j) {
            const double v = result.kld_table(i, j);
            if (std::isnan(v)) continue;
            out += std::to_string(result.k_candidates[i]) + "," +
                   std::to_string(result.n_candidates[j]) + "," + format_double(v) + "\n";
        }
    write_text_file(path, out);
}

}  // namespace cgtex
