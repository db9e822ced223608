#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "carfin/car.hpp"
#include "carfin/common.hpp"

namespace carfin {

/// A permutation of the mode set {1..n}. 1-based throughout, matching the
/// generator labels a_1..a_n.
class Permutation {
public:
    static Permutation identity(int n);
    /// Transposition (i j); i == j yields the identity.
    static Permutation transposition(int n, int i, int j);
    /// Build from image[k-1] = g(k); validates bijectivity.
    static Permutation from_image(std::vector<int> image);

    int size() const { return int(image_.size()); }
    int operator()(int j) const { return image_[std::size_t(j) - 1]; }
    const std::vector<int>& image() const { return image_; }

    Permutation inverse() const;
    /// Composition (this ∘ other): x ↦ this(other(x)).
    Permutation compose(const Permutation& other) const;
    bool is_identity() const;

    bool operator==(const Permutation& o) const { return image_ == o.image_; }

private:
    explicit Permutation(std::vector<int> image) : image_(std::move(image)) {}
    std::vector<int> image_;
};

/// All n! permutations in lexicographic image order. Capacity-capped.
std::vector<Permutation> all_permutations(int n);

/// Second-quantized permutation unitary, stored as a signed permutation of
/// the Fock basis: column c holds the single entry sign[c] at row target[c].
class FockUnitary {
public:
    FockUnitary(int n_modes, std::vector<Eigen::Index> target, std::vector<std::int8_t> sign);

    int modes() const { return n_; }
    Eigen::Index dim() const { return Eigen::Index(target_.size()); }
    Eigen::Index target(Eigen::Index col) const { return target_[std::size_t(col)]; }
    int sign(Eigen::Index col) const { return sign_[std::size_t(col)]; }

    Mat to_dense() const;
    /// U A U† in O(4^n), one read/write per entry.
    Mat conjugate(const Mat& a) const;
    Vec apply(const Vec& v) const;
    FockUnitary compose(const FockUnitary& other) const;  // this * other
    FockUnitary inverse() const;

private:
    int n_;
    std::vector<Eigen::Index> target_;
    std::vector<std::int8_t> sign_;
};

/// Γ(g): Γ(g)|s> = sgn(σ)|g·s>, where g·s occupies the image of the occupied
/// set of s and sgn(σ) is the parity of the sort of (g(j_1),..,g(j_k)).
/// Satisfies Γ(g) a_j Γ(g)* = a_{g(j)} and Γ(g)Γ(h) = Γ(g∘h).
FockUnitary second_quantize(const Permutation& g);

/// Bogoliubov action α_g = Ad Γ(g^{-1}), so α_g(a_j) = a_{g^{-1}(j)}.
Mat alpha(const CarContext& ctx, const Permutation& g, const Mat& a);

/// Representatives u of the classes of S_n with fixed u(1..m), for averaging
/// conjugations of operators supported on the first m modes: the average of
/// Γ(u) A Γ(u)* over S_n equals the equal-weight average over these
/// n!/(n-m)! representatives. m >= n enumerates the whole group.
/// Throws capacity_error when the class count exceeds term_cap.
std::vector<Permutation> conjugation_representatives(int n, int m, std::size_t term_cap);

/// (1/n!) Σ_g α_g(A), exact. Uses the initial-segment support of A to shrink
/// the enumeration; full-group enumeration is capped at n <= 8.
Mat symmetrize_operator(const CarContext& ctx, const Mat& a);

struct SampledOperatorAverage {
    Mat estimate;
    double standard_error;  // Frobenius-norm scale across samples
    int samples;
    std::uint64_t seed;
};

/// Seeded uniform-sampling estimator of the S_n average, for n beyond the
/// exhaustive cap.
SampledOperatorAverage symmetrize_operator_sampled(const CarContext& ctx, const Mat& a,
                                                   int samples, std::uint64_t seed);

/// The dyadic mixing permutation g_m: swaps the blocks {1..2^(m-1)} and
/// {2^(m-1)+1..2^m}, fixing everything above 2^m. An involution.
Permutation mixing_permutation(int stage, int n);

struct IntersectingFraction {
    double exact;     // 1 - (N-m)!(N-k)!/((N-m-k)! N!)
    double estimate;  // mk/N
};

/// Probability that a uniform g in S_N maps {1..k} to a set meeting {1..m}.
/// Exact arithmetic for N <= 20, log-gamma above.
IntersectingFraction intersecting_fraction(int m, int k, int big_n);

}  // namespace carfin
