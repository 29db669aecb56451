#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace cgtex::testutil {

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

inline double pure_rel_err(double got, double want) {
    return std::abs(got - want) / std::abs(want);
}

/// Random SPD matrix A A' + eps I.
inline Eigen::MatrixXd random_spd(int d, std::mt19937_64& eng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = normal(eng);
    return a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(d, d);
}

/// Unique scratch directory, removed by the destructor.
class TempDir {
public:
    TempDir() {
        static std::mt19937_64 eng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() /
                ("cgtex_test_" + std::to_string(eng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

}  // namespace cgtex::testutil
