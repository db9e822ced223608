#pragma once

#include <array>
#include <utility>
#include <vector>

#include "carfin/common.hpp"

namespace carfin {

/// One factor e_{kl}(site) of a matrix-unit word; k, l in {1, 2}.
struct WordFactor {
    int site;
    int k;
    int l;
};

/// The CAR algebra on n fermionic modes, realized as dense matrices on the
/// 2^n-dimensional Fock space.
///
/// Basis convention: index i encodes the occupation bitstring with mode 1 as
/// the most significant bit, so mode j occupies bit (n - j). Basis vectors are
/// |s> = a†_{j1}...a†_{jk} |vac> with occupied modes in increasing order.
/// Annihilators carry the Jordan-Wigner sign string on modes < j, which makes
/// every anticommutation relation an exact integer-matrix identity.
class CarContext {
public:
    explicit CarContext(int n_modes);

    int modes() const { return n_; }
    Eigen::Index dim() const { return dim_; }

    /// a_j, 1-based mode index.
    const Mat& annihilator(int j) const;
    /// a†_j.
    Mat creator(int j) const { return annihilator(j).adjoint(); }

    const Mat& identity() const { return id_; }

    /// The self-adjoint unitary P with P a_j P = -a_j; P^2 = I.
    const Mat& parity_unitary() const { return parity_; }

    /// Grading automorphism Θ(A) = P A P.
    Mat parity(const Mat& a) const;

    /// (A_+, A_-) with A_± = (A ± Θ(A))/2.
    std::pair<Mat, Mat> even_odd_split(const Mat& a) const;

    bool is_even_element(const Mat& a, double tol = 1e-10) const;
    bool is_odd_element(const Mat& a, double tol = 1e-10) const;

    /// Jordan-Klein-Wigner matrix unit e_{kl}(j), computed from
    /// e_11 = a a†, e_12 = V_{j-1} a, e_21 = V_{j-1} a†, e_22 = a† a
    /// with V_j the product of the sign unitaries U_1..U_j.
    Mat matrix_unit(int j, int k, int l) const;

    /// Product of matrix units over distinct sites. Verifies, entrywise, that
    /// the product equals the pure tensor of single-site elementary matrices
    /// (the isomorphism γ onto the 2x2-matrix tensor algebra) and throws
    /// std::logic_error if the identity fails.
    Mat gamma_iso(const std::vector<WordFactor>& word) const;

    /// The pure tensor side of gamma_iso, built independently of the
    /// CAR generators.
    Mat elementary_tensor(const std::vector<WordFactor>& word) const;

    /// tr(A) / 2^n, the unique tracial state.
    cx normalized_trace(const Mat& a) const;

    /// Smallest m such that A acts as A' ⊗ I on modes {1..m}; returns n when
    /// A has full support.
    int initial_support(const Mat& a, double tol = 1e-12) const;

    /// Extract A' with A = A' ⊗ I_{2^(n-m)}. Requires initial_support(A) <= m.
    Mat restrict_to_initial(const Mat& a, int m) const;

    /// Embed an operator on the first m modes as A' ⊗ I.
    Mat embed_initial(const Mat& a_small, int m) const;

    void check_dim(const Mat& a) const;

private:
    Mat literal_matrix_unit(int j, int k, int l) const;

    int n_;
    Eigen::Index dim_;
    std::vector<Mat> annihilators_;
    std::vector<RVec> v_diag_;  // V_j = U_1...U_j, diagonal ±1; index 0 is V_0 = I
    Mat parity_;
    Mat id_;
    // matrix units cached eagerly for small n; recomputed per call above
    std::vector<std::array<Mat, 4>> unit_cache_;
};

}  // namespace carfin
