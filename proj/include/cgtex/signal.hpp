#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

namespace cgtex {

/// Raw multichannel recording: one sample per row, one channel per column.
struct MultichannelRecord {
    Eigen::MatrixXd samples;  // T x d
    double sample_rate = 2000.0;
    std::vector<std::string> channel_names;

    long total_samples() const { return samples.rows(); }
    int channels() const { return static_cast<int>(samples.cols()); }
};

/// Reads a comma-separated file whose first row names the channels and whose
/// remaining rows each hold one sample. Only the selected columns are kept,
/// in the order given. Throws std::runtime_error naming the offending
/// row/column on malformed input.
MultichannelRecord ingest_csv(const std::filesystem::path& path,
                              const std::vector<std::string>& channel_selection,
                              double sample_rate = 2000.0);

/// K contiguous non-overlapping segments of N samples each; trailing samples
/// beyond K*N are dropped. Segment k, sample n is source sample k*N + n.
class SegmentedSignal {
public:
    SegmentedSignal(Eigen::MatrixXd data, int segment_count, int samples_per_segment);

    int segment_count() const { return k_; }
    int samples_per_segment() const { return n_; }
    int channels() const { return static_cast<int>(data_.cols()); }
    long total_samples() const { return data_.rows(); }

    /// View of segment k as an N x d block.
    Eigen::Block<const Eigen::MatrixXd> segment(int k) const {
        return data_.middleRows(static_cast<long>(k) * n_, n_);
    }
    /// All K*N samples, flattened in segment order.
    const Eigen::MatrixXd& samples() const { return data_; }

private:
    Eigen::MatrixXd data_;  // (K*N) x d
    int k_;
    int n_;
};

SegmentedSignal segment(const MultichannelRecord& record, int segment_count,
                        int samples_per_segment);

/// Per-segment sufficient statistics for a given (mu, sigma):
///   t1[k]    = 1/2 sum_n (y_{n,k}-mu)' sigma^{-1} (y_{n,k}-mu)
///   seg_mean = row k holds the mean of segment k.
struct SegmentStat {
    Eigen::VectorXd t1;        // K
    Eigen::MatrixXd seg_mean;  // K x d
};

SegmentStat segment_stats(const SegmentedSignal& sig, const Eigen::VectorXd& mu,
                          const Eigen::MatrixXd& sigma);

/// Degenerate-segment rule shared by the E-steps and the observed-data
/// likelihood: entries below 1e-12 * median(t1) are raised to that floor so a
/// constant segment cannot produce a singular Bessel argument. Returns the
/// floored copy; bumps *floored by the number of touched entries.
Eigen::VectorXd floor_degenerate_t1(const Eigen::VectorXd& t1, long* floored = nullptr);

/// Cholesky factorization with a symmetry check; throws std::invalid_argument
/// if sigma is not symmetric positive-definite.
Eigen::LLT<Eigen::MatrixXd> chol_spd(const Eigen::MatrixXd& sigma);

}  // namespace cgtex
