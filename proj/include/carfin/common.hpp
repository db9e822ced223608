#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace carfin {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using cx = std::complex<double>;

/// Largest supported mode count; the Fock dimension 2^n must stay allocatable
/// as a dense matrix (2^12 = 4096).
inline constexpr int kMaxModes = 12;

/// Largest n for which exhaustive S_n sums (n! terms) are attempted.
inline constexpr int kExhaustiveGroupCap = 8;

/// Requested size exceeds what exhaustive/dense computation can handle.
struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A state failed the symmetry precondition of an operation.
struct not_symmetric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A moment sequence is not realizable by a probability measure on [0,1].
struct infeasible_moments_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Eigen::Index pow2(int n) { return Eigen::Index(1) << n; }

/// Deterministic pairwise (binary-tree) reduction of term(0..count-1).
/// The reduction tree depends only on count, never on partitioning.
template <class T, class TermFn>
T pairwise_reduce(std::size_t count, TermFn&& term, std::size_t lo = 0) {
    if (count == 1) return term(lo);
    std::size_t half = count / 2;
    T left = pairwise_reduce<T>(half, term, lo);
    T right = pairwise_reduce<T>(count - half, term, lo + half);
    return left + right;
}

inline double max_abs(const Mat& a) { return a.cwiseAbs().maxCoeff(); }

inline double max_abs_diff(const Mat& a, const Mat& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

inline double rel_frobenius_diff(const Mat& a, const Mat& b) {
    double scale = std::max(1.0, std::max(a.norm(), b.norm()));
    return (a - b).norm() / scale;
}

/// SplitMix64: 64-bit splittable PRNG. All randomized routines take one of
/// these so that reports are byte-identical across reruns of the same seed.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Independent child stream (the "split" operation).
    SplitMix64 split() { return SplitMix64(next() ^ 0x55aa55aa55aa55aaull); }

    /// Uniform in [0,1).
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller.
    double gaussian() {
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    /// Uniform integer in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t threshold = (~bound + 1) % bound;  // 2^64 mod bound
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

private:
    std::uint64_t state_;
};

/// Dense complex Ginibre matrix (i.i.d. standard complex Gaussian entries).
Mat random_ginibre(Eigen::Index dim, SplitMix64& rng);

/// Random Hermitian matrix, entries O(1).
Mat random_hermitian(Eigen::Index dim, SplitMix64& rng);

/// Haar-ish random unitary (QR of a Ginibre matrix with phase fix).
Mat random_unitary(Eigen::Index dim, SplitMix64& rng);

}  // namespace carfin
