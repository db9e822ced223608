#include "carfin/car.hpp"

#include <algorithm>

namespace carfin {

namespace {

constexpr int kUnitCacheCap = 8;

int bit_of_mode(Eigen::Index index, int n, int j) {
    return int((index >> (n - j)) & 1);
}

}  // namespace

CarContext::CarContext(int n_modes) : n_(n_modes) {
    if (n_ < 1 || n_ > kMaxModes)
        throw capacity_error("CarContext: mode count " + std::to_string(n_) +
                             " outside supported range 1.." + std::to_string(kMaxModes));
    dim_ = pow2(n_);
    id_ = Mat::Identity(dim_, dim_);

    // a_j |s> clears bit j and picks up (-1)^(# occupied modes < j).
    annihilators_.reserve(std::size_t(n_));
    for (int j = 1; j <= n_; ++j) {
        Mat a = Mat::Zero(dim_, dim_);
        for (Eigen::Index s = 0; s < dim_; ++s) {
            if (!bit_of_mode(s, n_, j)) continue;
            int preceding = 0;
            for (int m = 1; m < j; ++m) preceding += bit_of_mode(s, n_, m);
            Eigen::Index t = s & ~(Eigen::Index(1) << (n_ - j));
            a(t, s) = (preceding % 2 == 0) ? 1.0 : -1.0;
        }
        annihilators_.push_back(std::move(a));
    }

    // V_j = U_1...U_j with U_m = a a† - a† a = diag sign of mode m.
    v_diag_.resize(std::size_t(n_) + 1);
    v_diag_[0] = RVec::Ones(dim_);
    for (int j = 1; j <= n_; ++j) {
        RVec v = v_diag_[std::size_t(j) - 1];
        for (Eigen::Index s = 0; s < dim_; ++s)
            if (bit_of_mode(s, n_, j)) v(s) = -v(s);
        v_diag_[std::size_t(j)] = std::move(v);
    }

    parity_ = v_diag_[std::size_t(n_)].cast<cx>().asDiagonal();

    if (n_ <= kUnitCacheCap) {
        unit_cache_.resize(std::size_t(n_));
        for (int j = 1; j <= n_; ++j)
            for (int k = 1; k <= 2; ++k)
                for (int l = 1; l <= 2; ++l)
                    unit_cache_[std::size_t(j) - 1][std::size_t((k - 1) * 2 + (l - 1))] =
                        literal_matrix_unit(j, k, l);
    }
}

const Mat& CarContext::annihilator(int j) const {
    if (j < 1 || j > n_) throw std::invalid_argument("annihilator: mode index out of range");
    return annihilators_[std::size_t(j) - 1];
}

void CarContext::check_dim(const Mat& a) const {
    if (a.rows() != dim_ || a.cols() != dim_)
        throw std::invalid_argument("operator dimension does not match the 2^n Fock space");
}

Mat CarContext::parity(const Mat& a) const {
    check_dim(a);
    const RVec& p = v_diag_[std::size_t(n_)];
    Mat out = a;
    for (Eigen::Index c = 0; c < dim_; ++c)
        for (Eigen::Index r = 0; r < dim_; ++r)
            out(r, c) *= p(r) * p(c);
    return out;
}

std::pair<Mat, Mat> CarContext::even_odd_split(const Mat& a) const {
    Mat th = parity(a);
    return {0.5 * (a + th), 0.5 * (a - th)};
}

bool CarContext::is_even_element(const Mat& a, double tol) const {
    return max_abs_diff(parity(a), a) <= tol;
}

bool CarContext::is_odd_element(const Mat& a, double tol) const {
    return max_abs(parity(a) + a) <= tol;
}

Mat CarContext::literal_matrix_unit(int j, int k, int l) const {
    const Mat& a = annihilator(j);
    if (k == 1 && l == 1) return a * a.adjoint();
    if (k == 2 && l == 2) return a.adjoint() * a;
    const RVec& v = v_diag_[std::size_t(j) - 1];
    Mat base = (k == 1) ? a : Mat(a.adjoint());  // e_12 = V a, e_21 = V a†
    for (Eigen::Index r = 0; r < dim_; ++r) base.row(r) *= v(r);
    return base;
}

Mat CarContext::matrix_unit(int j, int k, int l) const {
    if (j < 1 || j > n_ || k < 1 || k > 2 || l < 1 || l > 2)
        throw std::invalid_argument("matrix_unit: index out of range");
    if (!unit_cache_.empty())
        return unit_cache_[std::size_t(j) - 1][std::size_t((k - 1) * 2 + (l - 1))];
    return literal_matrix_unit(j, k, l);
}

Mat CarContext::elementary_tensor(const std::vector<WordFactor>& word) const {
    // entry ((r1..rn),(c1..cn)) of ⊗ M_j is Π M_j(r_j, c_j); every M_j is
    // either the 2x2 identity or a single elementary matrix, so each basis
    // pair contributes 0 or 1.
    Mat out = Mat::Zero(dim_, dim_);
    std::vector<int> kk(static_cast<std::size_t>(n_) + 1, 0), ll(static_cast<std::size_t>(n_) + 1, 0);
    for (const auto& f : word) {
        kk[std::size_t(f.site)] = f.k;
        ll[std::size_t(f.site)] = f.l;
    }
    for (Eigen::Index c = 0; c < dim_; ++c) {
        Eigen::Index r = 0;
        bool alive = true;
        for (int j = 1; j <= n_ && alive; ++j) {
            int cb = bit_of_mode(c, n_, j);
            int rb;
            if (kk[std::size_t(j)] == 0) {
                rb = cb;  // identity factor
            } else {
                // ε_kl = |k-1><l-1| in the (|0>,|1>) basis
                if (cb != ll[std::size_t(j)] - 1) { alive = false; break; }
                rb = kk[std::size_t(j)] - 1;
            }
            if (rb) r |= Eigen::Index(1) << (n_ - j);
        }
        if (alive) out(r, c) = 1.0;
    }
    return out;
}

Mat CarContext::gamma_iso(const std::vector<WordFactor>& word) const {
    std::vector<bool> seen(std::size_t(n_) + 1, false);
    for (const auto& f : word) {
        if (f.site < 1 || f.site > n_ || f.k < 1 || f.k > 2 || f.l < 1 || f.l > 2)
            throw std::invalid_argument("gamma_iso: word factor index out of range");
        if (seen[std::size_t(f.site)])
            throw std::invalid_argument("gamma_iso: repeated site in word");
        seen[std::size_t(f.site)] = true;
    }
    Mat lhs = id_;
    for (const auto& f : word) lhs = lhs * matrix_unit(f.site, f.k, f.l);
    Mat rhs = elementary_tensor(word);
    if (max_abs_diff(lhs, rhs) > 1e-12)
        throw std::logic_error("gamma_iso: matrix-unit word differs from its tensor image");
    return lhs;
}

cx CarContext::normalized_trace(const Mat& a) const {
    check_dim(a);
    return a.trace() / double(dim_);
}

int CarContext::initial_support(const Mat& a, double tol) const {
    check_dim(a);
    for (int m = 0; m <= n_; ++m) {
        Eigen::Index db = pow2(n_ - m);  // trailing block size
        Eigen::Index nb = pow2(m);
        bool ok = true;
        for (Eigen::Index bi = 0; bi < nb && ok; ++bi) {
            for (Eigen::Index bj = 0; bj < nb && ok; ++bj) {
                const auto block = a.block(bi * db, bj * db, db, db);
                cx scale = block.trace() / double(db);
                if ((block - scale * Mat::Identity(db, db)).cwiseAbs().maxCoeff() > tol)
                    ok = false;
            }
        }
        if (ok) return m;
    }
    return n_;
}

Mat CarContext::restrict_to_initial(const Mat& a, int m) const {
    check_dim(a);
    if (m < 0 || m > n_) throw std::invalid_argument("restrict_to_initial: bad mode count");
    Eigen::Index db = pow2(n_ - m);
    Eigen::Index nb = pow2(m);
    Mat out(nb, nb);
    for (Eigen::Index bi = 0; bi < nb; ++bi)
        for (Eigen::Index bj = 0; bj < nb; ++bj)
            out(bi, bj) = a.block(bi * db, bj * db, db, db).trace() / double(db);
    return out;
}

Mat CarContext::embed_initial(const Mat& a_small, int m) const {
    if (m < 0 || m > n_) throw std::invalid_argument("embed_initial: bad mode count");
    Eigen::Index nb = pow2(m);
    if (a_small.rows() != nb || a_small.cols() != nb)
        throw std::invalid_argument("embed_initial: operator does not act on 2^m space");
    Eigen::Index db = pow2(n_ - m);
    Mat out = Mat::Zero(dim_, dim_);
    for (Eigen::Index bi = 0; bi < nb; ++bi)
        for (Eigen::Index bj = 0; bj < nb; ++bj)
            if (a_small(bi, bj) != 0.0)
                out.block(bi * db, bj * db, db, db) =
                    a_small(bi, bj) * Mat::Identity(db, db);
    return out;
}

}  // namespace carfin
