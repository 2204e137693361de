#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "core/matrix.hpp"
#include "core/rng.hpp"

namespace testutil {

// unique scratch directory, removed on destruction
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    auto base = std::filesystem::temp_directory_path();
    dir_ = base / ("zeroday_" + tag + "_" + std::to_string(::getpid()) + "_" +
                   std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path path() const { return dir_; }
  std::string file(const std::string& name) const {
    return (dir_ / name).string();
  }

 private:
  std::filesystem::path dir_;
};

inline zeroday::Matrix random_normal_matrix(std::size_t rows, std::size_t cols,
                                            zeroday::Rng& rng) {
  zeroday::Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.normal();
  }
  return m;
}

// rows lying near a rank-k linear manifold plus isotropic noise
inline zeroday::Matrix low_rank_matrix(std::size_t rows, std::size_t cols,
                                       std::size_t rank, double noise,
                                       zeroday::Rng& rng) {
  zeroday::Matrix basis = random_normal_matrix(cols, rank, rng);
  zeroday::Matrix m(rows, cols);
  std::vector<double> z(rank);
  for (std::size_t r = 0; r < rows; ++r) {
    for (auto& v : z) v = rng.normal();
    for (std::size_t c = 0; c < cols; ++c) {
      double x = 0.0;
      for (std::size_t k = 0; k < rank; ++k) x += basis(c, k) * z[k];
      m(r, c) = x + noise * rng.normal();
    }
  }
  return m;
}

// low-rank rows scaled to zero mean / unit variance per column, the way
// data reaches the models after preprocessing
inline zeroday::Matrix standardized_low_rank(std::size_t rows, std::size_t cols,
                                             std::size_t rank, double noise,
                                             zeroday::Rng& rng) {
  zeroday::Matrix m = low_rank_matrix(rows, cols, rank, noise, rng);
  for (std::size_t c = 0; c < cols; ++c) {
    double mean = 0.0, var = 0.0;
    for (std::size_t r = 0; r < rows; ++r) mean += m(r, c);
    mean /= static_cast<double>(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      var += (m(r, c) - mean) * (m(r, c) - mean);
    }
    var /= static_cast<double>(rows);
    const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
    for (std::size_t r = 0; r < rows; ++r) m(r, c) = (m(r, c) - mean) / sd;
  }
  return m;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

}  // namespace testutil
