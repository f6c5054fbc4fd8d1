#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

/// Coefficients with magnitudes in [0.25, 1] and random signs.
inline std::vector<double> random_taps(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> mag(0.25, 1.0);
    std::bernoulli_distribution neg(0.5);
    std::vector<double> b(n);
    for (auto& v : b) v = neg(rng) ? -mag(rng) : mag(rng);
    return b;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("firuq_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing_support
