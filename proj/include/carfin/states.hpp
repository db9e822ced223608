#pragma once

#include <functional>
#include <vector>

#include "carfin/car.hpp"
#include "carfin/perms.hpp"

namespace carfin {

/// A state on CAR(n), stored as its density matrix D with tr(D) = 1 and
/// φ(A) = tr(D A). The adjusted density in the tracial-state pairing is
/// 2^n · D.
struct State {
    int n = 0;
    Mat density;
};

/// Hermiticity / positivity / unit-trace check; throws std::invalid_argument
/// with a description of the first violated condition.
void validate_state(const State& phi, double tol = 1e-10);

cx evaluate(const State& phi, const Mat& a);

/// The even one-mode state ρ_μ with ρ_μ(e_11) = μ, as diag(μ, 1-μ).
Mat even_qubit_density(double mu);

/// Araki-Moriya product state φ_μ = ⊗_n ρ_μ.
State product_state(double mu, int n);

/// (w_1 φ_{μ1} + w_2 φ_{μ2} + ...) for convenience in tests and drivers.
State mixture_of_product_states(const std::vector<std::pair<double, double>>& atoms, int n);

/// S_n-average of a state; a projection onto the symmetric states.
State symmetrize_state(const CarContext& ctx, const State& phi);

/// Invariance under the adjacent transpositions (which generate S_n),
/// measured in Frobenius norm on the density.
bool is_symmetric(const CarContext& ctx, const State& phi, double tol = 1e-10);
double symmetry_defect(const CarContext& ctx, const State& phi);

/// ‖P D P - D‖_F <= tol.
bool is_even(const CarContext& ctx, const State& phi, double tol = 1e-10);
double evenness_defect(const CarContext& ctx, const State& phi);

/// Partial trace onto the first k modes.
State restrict_state(const CarContext& ctx, const State& phi, int k);

/// m_j = φ(e_11(1) e_11(2) ... e_11(j)) for j = 0..K. m_0 = 1; for the
/// product state φ_μ this is exactly μ^j. Warns on stderr when φ is not
/// symmetric.
std::vector<double> occupation_moments(const CarContext& ctx, const State& phi, int K);

/// (1/n!) Σ_g φ(α_g(A) B), exact via support-aware enumeration.
cx weak_clustering_average(const CarContext& ctx, const State& phi, const Mat& a,
                           const Mat& b);

/// φ(α_{g_m}(A) B) - φ(A) φ(B). Requires supp(A), supp(B) ⊆ {1..2^(m-1)}
/// and 2^m <= n, so the shifted support is disjoint from supp(B).
cx strong_clustering_check(const CarContext& ctx, const State& phi, const Mat& a,
                           const Mat& b, int stage);

/// Exact group average (1/n!) Σ_g φ({A, α_g(A*)}) for odd localized A, per
/// mode count in 'ns'. For A = a_1 this is 1/n for every unital φ.
/// Builders receive the per-n context; the state defaults to the trace state.
std::vector<std::pair<int, cx>> oddness_decay(
    const std::vector<int>& ns, const std::function<Mat(const CarContext&)>& build_a,
    const std::function<State(const CarContext&)>& build_phi = {});

}  // namespace carfin
