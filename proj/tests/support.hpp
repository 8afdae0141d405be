#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

#include "pvdecay/circadian.hpp"
#include "pvdecay/model.hpp"
#include "pvdecay/random.hpp"

namespace pvdecay::testing {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("pvdecay-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(Xoshiro256::for_stream(seed, 99, 0)) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng_.uniform() * static_cast<double>(hi - lo + 1));
  }
  bool coin(double p = 0.5) { return rng_.uniform() < p; }

  /// Positive hour profile with mean around `scale` and up to +-90 % swings.
  circadian::HourProfile profile(double scale = 1000.0) {
    circadian::HourProfile m{};
    const double swing = uniform(0.0, 0.9);
    for (auto& v : m) v = scale * (1.0 + swing * uniform(-1.0, 1.0));
    return m;
  }

  circadian::RedistributionMap map() {
    return circadian::RedistributionMap::from_profile(
        circadian::CircadianProfile::make(profile(), uniform(0.0, 0.99)));
  }

  std::vector<double> positive_series(std::size_t n, double lo = 0.5, double hi = 5000.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

  std::string bytes(std::size_t max_len) {
    std::string s(static_cast<std::size_t>(integer(1, static_cast<std::int64_t>(max_len))), '\0');
    for (auto& c : s) c = static_cast<char>(integer(1, 255));
    return s;
  }

  Xoshiro256& rng() { return rng_; }

 private:
  Xoshiro256 rng_;
};

/// Integrates the cyclic hour profile `m_star` over real hours [a, b].
inline double profile_mass(const circadian::HourProfile& m_star, double a, double b) {
  double total = 0.0;
  for (int h = static_cast<int>(a); h < b; ++h) {
    const double lo = std::max(a, static_cast<double>(h));
    const double hi = std::min(b, static_cast<double>(h + 1));
    if (hi > lo) total += m_star[static_cast<std::size_t>(h % 24)] * (hi - lo);
  }
  return total;
}

}  // namespace pvdecay::testing
