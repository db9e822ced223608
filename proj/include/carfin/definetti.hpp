#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "carfin/car.hpp"
#include "carfin/states.hpp"

namespace carfin {

struct MeasureAtom {
    double mu = 0.0;
    double weight = 0.0;
};

/// Atomic probability measure on [0,1]: the mixing measure of a symmetric
/// state over the product states φ_μ.
struct MixingMeasure {
    std::vector<MeasureAtom> atoms;  // sorted by mu

    double total_weight() const;
    /// k-th power moment ∫ μ^k dν.
    double moment(int k) const;
    void validate(double tol = 1e-9) const;
};

struct RecoveryOptions {
    int grid_size = 1001;
    double tol = 1e-6;    // feasibility threshold for Hankel checks and residual
    double ridge = 0.0;   // optional Tikhonov weight on the grid coefficients
};

struct HankelDiagnostics {
    double min_eig_plain = 0.0;      // [m_{i+j}]
    double min_eig_shifted = 0.0;    // [m_{i+j+1}]
    double min_eig_reflected = 0.0;  // [m_{i+j} - m_{i+j+1}]
    std::string worst_condition() const;
    double worst_value() const;
};

struct RecoveryResult {
    MixingMeasure measure;
    double residual = 0.0;  // ‖V w - m‖_2 on the raw grid weights
    HankelDiagnostics hankel;
    int grid_size = 0;
    int nnls_iterations = 0;
};

/// Truncated Hausdorff moment inversion: nonnegative least squares on the
/// grid {0, 1/(G-1), .., 1} with a simplex constraint, followed by merging
/// of adjacent grid atoms and pruning of weights below 1e-9. Rejects moment
/// sequences that violate the Hankel positivity conditions beyond tol, or
/// whose post-solve residual stays above tol.
RecoveryResult recover_measure(const std::vector<double>& moments,
                               const RecoveryOptions& options = {});

/// Σ_j w_j φ_{μ_j} on n modes; symmetric and even by construction.
State reconstruct_state(const MixingMeasure& measure, int n);

struct DecompositionReport {
    MixingMeasure measure;
    std::vector<double> moments;
    double residual = 0.0;
    double battery_occupation = 0.0;  // products of e_11(j)
    double battery_two_site = 0.0;    // words e_kl(i) e_pq(j)
    double battery_random = 0.0;      // random symmetrized even observables
    double battery_max = 0.0;
    std::uint64_t seed = 0;
};

/// Full pipeline: occupation moments -> recover_measure -> reconstruct, with
/// a deviation report of the reconstruction against φ over a test battery.
DecompositionReport decompose_state(const CarContext& ctx, const State& phi,
                                    const RecoveryOptions& options = {},
                                    std::uint64_t seed = 424242);

enum class FactorTag { I_infinity, II_1, III_lambda };

struct FactorType {
    FactorTag tag = FactorTag::II_1;
    double lambda = 0.0;  // set iff tag == III_lambda
    std::string name() const;
};

/// Factor classification of the product state φ_μ: I_∞ at μ ∈ {0,1}, II_1 at
/// μ = 1/2, and III_λ with λ = min(μ,1-μ)/max(μ,1-μ) otherwise.
FactorType classify_type(double mu);

struct RatioSpectrum {
    std::vector<double> eigenvalues;  // distinct values μ^k (1-μ)^(n-k), descending
    std::vector<double> ratios;       // consecutive ratios; all equal λ
};

/// Finite-n witness of the III_λ parameter: the distinct eigenvalues of the
/// product density and their consecutive ratios. Rejects μ ∈ {0,1}.
RatioSpectrum eigenvalue_ratio_spectrum(double mu, int n);

}  // namespace carfin
