#pragma once

#include <filesystem>
#include <random>
#include <string>

#include <doctest.h>

#include "oemt/model.hpp"

namespace testing {

inline oemt::TransducerModel chain(double g1, double g2, double k1, double k2, double gamma_m, double nu = 1.0) {
    oemt::TransducerModel m;
    m.modes[0] = oemt::ModeSpec::cavity(oemt::ModeLabel::cavity1, 0.0, k1, nu);
    m.modes[1] = oemt::ModeSpec::mechanics(1e4, gamma_m);
    m.modes[2] = oemt::ModeSpec::cavity(oemt::ModeLabel::cavity2, 0.0, k2, nu);
    m.set_g(0, g1);
    m.set_g(1, g2);
    return m;
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("oemt-" + tag + "-" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

}  // namespace testing
