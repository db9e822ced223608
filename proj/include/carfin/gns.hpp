#pragma once

#include <vector>

#include "carfin/car.hpp"
#include "carfin/perms.hpp"
#include "carfin/states.hpp"

namespace carfin {

/// Orthonormal basis of the permutation-invariant subspace of a GNS space,
/// stored sparsely. Vectors live on the d x r matrix realization; entry
/// indices are column-major (index = q*d + i).
struct FixedBasis {
    Eigen::Index d = 0;
    Eigen::Index r = 0;
    std::vector<std::vector<std::pair<Eigen::Index, cx>>> vectors;

    Eigen::Index size() const { return Eigen::Index(vectors.size()); }
    Mat densify(std::size_t which) const;
    /// P = Σ_b |b><b| as a dense (d*r) x (d*r) matrix.
    Mat projection_matrix() const;
};

/// Finite-dimensional GNS data for a state φ on CAR(n).
///
/// The GNS space is realized as C^{d x r} with the Frobenius inner product,
/// d = 2^n and r = rank of the density: the class of x is ι(x) = x V Λ^{1/2}
/// where D = V Λ V*. Left multiplication represents the algebra and, for
/// symmetric φ, X ↦ Γ(g^{-1}) X w(g)* implements the covariant unitaries,
/// w(g) = V* Γ(g^{-1}) V.
class GnsRep {
public:
    int modes() const { return n_; }
    Eigen::Index fock_dim() const { return d_; }
    Eigen::Index rank() const { return r_; }
    Eigen::Index dim() const { return d_ * r_; }
    bool covariant() const { return covariant_; }
    /// True when the density was diagonal in the Fock basis; unitaries then
    /// act as generalized signed permutations of the GNS basis.
    bool diagonal() const { return diagonal_; }

    const Mat& isometry() const { return v_; }
    const RVec& sqrt_weights() const { return sqrt_p_; }

    /// Ω as a d x r matrix; ι(1).
    Mat cyclic_vector() const;
    /// ι(x) = x V Λ^{1/2}.
    Mat vector_of(const Mat& x) const;
    /// <X, Y> Frobenius pairing.
    static cx inner(const Mat& x, const Mat& y) { return (y.adjoint() * x).trace(); }

    Mat rep_apply(const Mat& a, const Mat& x) const;
    Mat unitary_apply(const Permutation& g, const Mat& x) const;

    /// Dense materializations (column-major vec); capacity-capped.
    Mat rep_matrix(const Mat& a) const;
    Mat unitary_matrix(const Permutation& g) const;

    /// w = V* W V, the r x r unitary the Fock-space unitary W induces on the
    /// support of the density.
    Mat small_unitary(const FockUnitary& w_fock) const;

    friend GnsRep build_gns(const CarContext& ctx, const State& phi, bool require_covariance);

private:
    int n_ = 0;
    Eigen::Index d_ = 0;
    Eigen::Index r_ = 0;
    Mat v_;
    RVec sqrt_p_;
    bool diagonal_ = false;
    std::vector<Eigen::Index> support_;       // diagonal case: basis index per column
    std::vector<Eigen::Index> support_slot_;  // inverse map, -1 when outside
    bool covariant_ = false;
};

/// GNS construction from the spectral decomposition of the density; null
/// directions are cut at eigenvalue < 1e-12 x the largest. When
/// require_covariance is set, a non-symmetric state is rejected.
GnsRep build_gns(const CarContext& ctx, const State& phi, bool require_covariance = true);

/// E_k = (1/k!) Σ_{g in S_k ⊂ S_n} U(g), dense. S_k permutes modes 1..k.
Mat invariant_projection(const GnsRep& gns, int k);

struct ErgodicReport {
    std::vector<double> loewner_min_eigs;  // min eig of E_k - E_{k+1}
    double fixed_space_deviation = 0.0;    // ‖E_n - P_fix‖_F, P_fix independent
    double cyclic_invariance = 0.0;        // ‖E_n Ω - Ω‖
    Eigen::Index fixed_dim = 0;

    double min_loewner() const;
    bool passed(double tol = 1e-10) const;
};

/// Finite form of the nested von Neumann ergodic theorem: the chain
/// E_1 >= E_2 >= ... >= E_n and E_n = projection onto the joint fixed space,
/// the latter computed independently from the null space of {U(t) - 1} over
/// adjacent transpositions.
ErgodicReport nested_ergodic_check(const GnsRep& gns);

/// (1/n!) Σ_g U(g) rep(A) U(g)^{-1}, dense; commutes with every U(h).
Mat cesaro_conjugation_average(const GnsRep& gns, const Mat& a);

/// Orthonormal basis of {ξ : U(g)ξ = ξ}. Diagonal densities use an exact
/// signed-orbit construction (scales to n = 12); otherwise the null-space
/// route below is used.
FixedBasis fixed_space_basis(const GnsRep& gns);

/// Independent computation via the null space of Σ_t (U(t)-1)*(U(t)-1).
FixedBasis fixed_space_basis_nullspace(const GnsRep& gns);

/// Compression of rep(A) to the fixed space, in the coordinates of 'basis'.
Mat fixed_compression(const GnsRep& gns, const Mat& a, const FixedBasis& basis);
Mat fixed_compression(const GnsRep& gns, const Mat& a);

/// ‖E rep(A) E‖ for odd A. Bounded by sqrt((1/n!) Σ_g φ({A, α_g(A*)})),
/// hence by sqrt(1/n) for A = a_1.
double ep_odd_compression(const CarContext& ctx, const GnsRep& gns, const Mat& a);

}  // namespace carfin
