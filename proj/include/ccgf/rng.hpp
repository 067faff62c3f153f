#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ccgf/algebra.hpp"

namespace ccgf {

/**
 * Rng: deterministic sampling on top of mt19937_64. The distributions are
 * hand-rolled (Box-Muller, rejection-free uniforms) so a seed reproduces the
 * same stream on every platform; std::normal_distribution makes no such
 * guarantee.
 */
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1).
    double uniform() {
        // 53 random bits -> dyadic rational in [0,1), exactly representable.
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(gen_() % span);
    }

    /// Log-uniform in [lo, hi], lo > 0.
    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    /// Standard real Gaussian via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Standard complex Gaussian (independent N(0,1) real and imaginary parts).
    Complex cnormal() {
        double re = normal();
        double im = normal();
        return Complex(re, im);
    }

    /// Unit-modulus complex number with uniform phase.
    Complex phase() {
        double theta = 2.0 * M_PI * uniform();
        return Complex(std::cos(theta), std::sin(theta));
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ccgf
