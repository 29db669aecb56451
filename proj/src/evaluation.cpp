#include "cgtex/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

#include "cgtex/texture.hpp"

namespace cgtex {

namespace {
constexpr double kKldFloor = 1e-12;
}

EmpiricalDensity build_empdf(const SegmentedSignal& sig, int bins,
                             std::vector<std::string>* warnings) {
    if (sig.channels() != 2)
        throw std::invalid_argument("build_empdf: only defined for d = 2 signals");
    if (bins < 2)
        throw std::invalid_argument("build_empdf: need at least 2 bins");
    const Eigen::MatrixXd& samples = sig.samples();
    const long total = samples.rows();
    if (warnings && total < static_cast<long>(bins) * bins / 100)
        warnings->push_back("build_empdf: fewer than bins^2/100 samples, histogram will be sparse");

    EmpiricalDensity emp;
    emp.total_count = total;
    std::array<std::vector<double>*, 2> edges = {&emp.x_edges, &emp.y_edges};
    std::array<double, 2> lo, width;
    for (int c = 0; c < 2; ++c) {
        const double mn = samples.col(c).minCoeff();
        const double mx = samples.col(c).maxCoeff();
        double range = mx - mn;
        if (range <= 0.0)
            throw std::invalid_argument("build_empdf: channel " + std::to_string(c) +
                                        " has zero range");
        const double pad = 0.0005 * range;  // 0.1% total inflation
        lo[c] = mn - pad;
        const double hi = mx + pad;
        width[c] = (hi - lo[c]) / bins;
        edges[c]->resize(bins + 1);
        for (int i = 0; i <= bins; ++i) (*edges[c])[i] = lo[c] + i * width[c];
    }

    emp.mass = Eigen::MatrixXd::Zero(bins, bins);
    for (long i = 0; i < total; ++i) {
        auto idx = [&](int c) {
            long b = static_cast<long>((samples(i, c) - lo[c]) / width[c]);
            return std::clamp<long>(b, 0, bins - 1);
        };
        emp.mass(idx(0), idx(1)) += 1.0;
    }
    emp.mass /= static_cast<double>(total);
    return emp;
}

double kld(const EmpiricalDensity& emp, const Eigen::MatrixXd& model_mass) {
    if (model_mass.rows() != emp.mass.rows() || model_mass.cols() != emp.mass.cols())
        throw std::invalid_argument("kld: grid shape mismatch");
    if (model_mass.minCoeff() < 0.0)
        throw std::invalid_argument("kld: negative model mass");
    double model_total = model_mass.sum();
    if (!(model_total > 0.0))
        throw std::invalid_argument("kld: model mass sums to zero");
    // A total within rounding of 1 is left untouched so KLD(q, q) is exactly 0.
    if (std::abs(model_total - 1.0) <= 1e-12) model_total = 1.0;
    double sum = 0.0;
    for (long i = 0; i < emp.mass.rows(); ++i) {
        for (long j = 0; j < emp.mass.cols(); ++j) {
            const double q1 = emp.mass(i, j);
            if (q1 <= 0.0) continue;
            const double q2 = std::max(model_mass(i, j) / model_total, kKldFloor);
            sum += q1 * std::log(q1 / q2);
        }
    }
    return sum;
}

double r_squared(const EmpiricalDensity& emp, const Eigen::MatrixXd& model_mass) {
    if (model_mass.rows() != emp.mass.rows() || model_mass.cols() != emp.mass.cols())
        throw std::invalid_argument("r_squared: grid shape mismatch");
    const double mean = emp.mass.mean();
    const double ss_tot = (emp.mass.array() - mean).square().sum();
    if (!(ss_tot > 0.0))
        throw std::invalid_argument("r_squared: degenerate flat histogram");
    const double ss_res = (emp.mass - model_mass).array().square().sum();
    return 1.0 - ss_res / ss_tot;
}

double mardia_kurtosis(const Eigen::MatrixXd& samples) {
    const long T = samples.rows();
    if (T < 2)
        throw std::invalid_argument("mardia_kurtosis: need at least 2 samples");
    const Eigen::RowVectorXd mean = samples.colwise().mean();
    const Eigen::MatrixXd centered = samples.rowwise() - mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(T);
    const auto llt = chol_spd(cov);
    double sum = 0.0;
    for (long i = 0; i < T; ++i) {
        const double q = llt.matrixL().solve(centered.row(i).transpose().eval()).squaredNorm();
        sum += q * q;
    }
    return sum / static_cast<double>(T);
}

MomentReport moment_report(const CgFit& fit, const SegmentedSignal& sig, std::size_t mc_samples,
                           std::uint64_t seed) {
    if (sig.channels() != fit.mu.size())
        throw std::invalid_argument("moment_report: fit/signal dimension mismatch");
    MomentReport report;

    const Eigen::MatrixXd& samples = sig.samples();
    const long T = samples.rows();
    report.data_mean = samples.colwise().mean().transpose();
    const Eigen::MatrixXd centered = samples.rowwise() - report.data_mean.transpose();
    report.data_covariance = centered.transpose() * centered / static_cast<double>(T);
    report.data_mardia_kurtosis = mardia_kurtosis(samples);

    report.model_mean = fit.mu;
    report.model_covariance = texture_mean(fit.texture) * fit.sigma;  // throws for cgig alpha<=1
    // One texture draw per sample (N = 1) so the draws follow the marginal law.
    const SegmentedSignal draws =
        simulate_cg(fit.texture, fit.mu, fit.sigma, static_cast<int>(mc_samples), 1, seed);
    report.model_mardia_kurtosis = mardia_kurtosis(draws.samples());
    return report;
}

double total_power(const CgFit& fit) {
    const double ez = texture_mean(fit.texture);
    return std::sqrt((ez * fit.sigma).diagonal().sum());
}

std::vector<SummaryRow> lambda_and_pt_summary(
    const std::vector<std::pair<std::string, CgFit>>& fits) {
    if (fits.empty())
        throw std::invalid_argument("lambda_and_pt_summary: no fits given");
    std::map<std::string, std::vector<const CgFit*>> groups;
    std::vector<std::string> order;
    for (const auto& [condition, fit] : fits) {
        if (groups[condition].empty()) order.push_back(condition);
        groups[condition].push_back(&fit);
    }
    std::vector<SummaryRow> rows;
    for (const auto& condition : order) {
        const auto& members = groups[condition];
        SummaryRow row;
        row.condition = condition;
        row.label = to_string(members.front()->family);
        for (const CgFit* f : members) {
            row.lambda += texture_mean(f->texture);
            row.p_t += total_power(*f);
        }
        row.lambda /= members.size();
        row.p_t /= members.size();
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace cgtex
