// Shared basics: matrix aliases, error taxonomy, seeded RNG.
#ifndef SASA_COMMON_HPP
#define SASA_COMMON_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace sasa {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// File-system / stream failures (CLI exit code 2).
struct IoError : std::runtime_error {
    explicit IoError(const std::string& m) : std::runtime_error(m) {}
};

/// Malformed input data: CSV rows, manifests, config files (CLI exit code 3).
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& m) : std::runtime_error(m) {}
};

/// Inputs that parse but do not fit together, e.g. task mismatch (CLI exit code 4).
struct SemanticError : std::runtime_error {
    explicit SemanticError(const std::string& m) : std::runtime_error(m) {}
};

/// Numerical contract violations: non-finite values, shape mismatches.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& m) : std::runtime_error(m) {}
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seeded generator; every random choice in the artifact flows through one of
/// these so runs are reproducible bit for bit.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(splitmix64(seed)) {}

    double uniform(double lo, double hi) {
        std::uniform_real_distribution<double> d(lo, hi);
        return d(gen_);
    }
    double normal(double mean, double std) {
        std::normal_distribution<double> d(mean, std);
        return d(gen_);
    }
    /// Inclusive on both ends.
    long long uniform_int(long long lo, long long hi) {
        std::uniform_int_distribution<long long> d(lo, hi);
        return d(gen_);
    }
    bool bernoulli(double p) {
        std::bernoulli_distribution d(p);
        return d(gen_);
    }
    /// Independent child stream; stable under reordering of sibling draws.
    Rng derive(std::uint64_t salt) const {
        return Rng(splitmix64(seed_ ^ splitmix64(salt + 0x51ed2700dcafeULL)));
    }
    std::uint64_t seed() const { return seed_; }
    std::mt19937_64& raw() { return gen_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

} // namespace sasa

#endif
