#include "cgtex/signal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cgtex {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace

MultichannelRecord ingest_csv(const std::filesystem::path& path,
                              const std::vector<std::string>& channel_selection,
                              double sample_rate) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("ingest_csv: cannot open file " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("ingest_csv: empty file " + path.string());
    const auto header = split_csv_line(line);

    std::vector<long> col_index;
    for (const auto& name : channel_selection) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw std::runtime_error("ingest_csv: column '" + name + "' not found in " +
                                     path.string());
        col_index.push_back(it - header.begin());
    }
    const int d = static_cast<int>(col_index.size());
    if (d < 1)
        throw std::runtime_error("ingest_csv: no channels selected");

    std::vector<double> values;
    long row = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;  // blank line
        const auto fields = split_csv_line(line);
        ++row;
        for (int j = 0; j < d; ++j) {
            const long c = col_index[j];
            if (c >= static_cast<long>(fields.size()))
                throw std::runtime_error("ingest_csv: row " + std::to_string(row) +
                                         " has too few fields for column '" +
                                         channel_selection[j] + "'");
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(fields[c], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != fields[c].size() || !std::isfinite(v))
                throw std::runtime_error("ingest_csv: non-numeric cell at row " +
                                         std::to_string(row) + ", column '" +
                                         channel_selection[j] + "' (value '" + fields[c] + "')");
            values.push_back(v);
        }
    }
    if (row == 0)
        throw std::runtime_error("ingest_csv: no data rows in " + path.string());

    MultichannelRecord record;
    record.samples.resize(row, d);
    for (long i = 0; i < row; ++i)
        for (int j = 0; j < d; ++j) record.samples(i, j) = values[i * d + j];
    record.sample_rate = sample_rate;
    record.channel_names = channel_selection;
    return record;
}

SegmentedSignal::SegmentedSignal(Eigen::MatrixXd data, int segment_count,
                                 int samples_per_segment)
    : data_(std::move(data)), k_(segment_count), n_(samples_per_segment) {
    if (k_ < 1 || n_ < 1)
        throw std::invalid_argument("SegmentedSignal: K and N must be positive");
    if (data_.rows() != static_cast<long>(k_) * n_)
        throw std::invalid_argument("SegmentedSignal: data has " + std::to_string(data_.rows()) +
                                    " rows, expected K*N = " + std::to_string(static_cast<long>(k_) * n_));
}

SegmentedSignal segment(const MultichannelRecord& record, int segment_count,
                        int samples_per_segment) {
    const long need = static_cast<long>(segment_count) * samples_per_segment;
    if (segment_count < 1 || samples_per_segment < 1)
        throw std::invalid_argument("segment: K and N must be positive");
    if (need > record.total_samples())
        throw std::invalid_argument("segment: K*N = " + std::to_string(need) + " exceeds T = " +
                                    std::to_string(record.total_samples()));
    return SegmentedSignal(record.samples.topRows(need), segment_count, samples_per_segment);
}

Eigen::LLT<Eigen::MatrixXd> chol_spd(const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != sigma.cols())
        throw std::invalid_argument("chol_spd: matrix is not square");
    const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("chol_spd: matrix is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("chol_spd: matrix is not positive-definite");
    return llt;
}

Eigen::VectorXd floor_degenerate_t1(const Eigen::VectorXd& t1, long* floored) {
    Eigen::VectorXd sorted = t1;
    std::sort(sorted.begin(), sorted.end());
    const double floor = 1e-12 * sorted[sorted.size() / 2];
    Eigen::VectorXd out = t1;
    long count = 0;
    for (long k = 0; k < out.size(); ++k) {
        if (out[k] < floor) {
            out[k] = floor;
            ++count;
        }
    }
    if (floored) *floored += count;
    return out;
}

SegmentStat segment_stats(const SegmentedSignal& sig, const Eigen::VectorXd& mu,
                          const Eigen::MatrixXd& sigma) {
    const int d = sig.channels();
    if (mu.size() != d || sigma.rows() != d)
        throw std::invalid_argument("segment_stats: dimension mismatch");
    const auto llt = chol_spd(sigma);

    const int K = sig.segment_count();
    SegmentStat stat;
    stat.t1.resize(K);
    stat.seg_mean.resize(K, d);
    for (int k = 0; k < K; ++k) {
        const auto block = sig.segment(k);
        stat.seg_mean.row(k) = block.colwise().mean();
        // One factorization of sigma shared across segments; t1 via the
        // whitened residuals.
        const Eigen::MatrixXd centered = block.rowwise() - mu.transpose();
        const Eigen::MatrixXd whitened =
            llt.matrixL().solve(centered.transpose());  // d x N
        stat.t1[k] = 0.5 * whitened.squaredNorm();
    }
    return stat;
}

}  // namespace cgtex
