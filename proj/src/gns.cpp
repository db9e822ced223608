#include "carfin/gns.hpp"

#include <algorithm>
#include <cmath>

namespace carfin {

namespace {

constexpr Eigen::Index kDenseGnsCap = 2048;       // dense dr x dr materializations
constexpr Eigen::Index kNullspaceGnsCap = 2048;   // eigensolver route
constexpr double kNullCutoffFactor = 1e-12;       // density rank cutoff
constexpr double kDiagonalTol = 1e-13;

void check_dense_cap(const GnsRep& gns, const char* what) {
    if (gns.dim() > kDenseGnsCap)
        throw capacity_error(std::string(what) + ": GNS dimension " +
                             std::to_string(gns.dim()) + " exceeds the dense cap " +
                             std::to_string(kDenseGnsCap));
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace

Mat FixedBasis::densify(std::size_t which) const {
    Mat out = Mat::Zero(d, r);
    for (const auto& [idx, c] : vectors[which]) out(idx % d, idx / d) = c;
    return out;
}

Mat FixedBasis::projection_matrix() const {
    Mat p = Mat::Zero(d * r, d * r);
    for (const auto& vec : vectors)
        for (const auto& [i, ci] : vec)
            for (const auto& [j, cj] : vec) p(i, j) += ci * std::conj(cj);
    return p;
}

GnsRep build_gns(const CarContext& ctx, const State& phi, bool require_covariance) {
    ctx.check_dim(phi.density);
    if (require_covariance && !is_symmetric(ctx, phi, 1e-8))
        throw not_symmetric_error(
            "build_gns: covariant unitaries need a permutation-invariant state");

    GnsRep g;
    g.n_ = ctx.modes();
    g.d_ = ctx.dim();
    g.covariant_ = require_covariance;

    double offdiag = 0.0;
    for (Eigen::Index c = 0; c < g.d_; ++c)
        for (Eigen::Index r = 0; r < g.d_; ++r)
            if (r != c) offdiag = std::max(offdiag, std::abs(phi.density(r, c)));

    if (offdiag <= kDiagonalTol) {
        g.diagonal_ = true;
        double top = phi.density.diagonal().real().maxCoeff();
        g.support_slot_.assign(std::size_t(g.d_), -1);
        std::vector<double> weights;
        for (Eigen::Index i = 0; i < g.d_; ++i) {
            double p = phi.density(i, i).real();
            if (p > kNullCutoffFactor * top) {
                g.support_slot_[std::size_t(i)] = Eigen::Index(g.support_.size());
                g.support_.push_back(i);
                weights.push_back(p);
            }
        }
        g.r_ = Eigen::Index(g.support_.size());
        g.v_ = Mat::Zero(g.d_, g.r_);
        g.sqrt_p_ = RVec(g.r_);
        for (Eigen::Index q = 0; q < g.r_; ++q) {
            g.v_(g.support_[std::size_t(q)], q) = 1.0;
            g.sqrt_p_(q) = std::sqrt(weights[std::size_t(q)]);
        }
    } else {
        Eigen::SelfAdjointEigenSolver<Mat> es(phi.density);
        RVec evals = es.eigenvalues();
        double top = evals.maxCoeff();
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = g.d_ - 1; i >= 0; --i)  // descending
            if (evals(i) > kNullCutoffFactor * top) keep.push_back(i);
        g.r_ = Eigen::Index(keep.size());
        g.v_ = Mat(g.d_, g.r_);
        g.sqrt_p_ = RVec(g.r_);
        for (Eigen::Index q = 0; q < g.r_; ++q) {
            g.v_.col(q) = es.eigenvectors().col(keep[std::size_t(q)]);
            g.sqrt_p_(q) = std::sqrt(evals(keep[std::size_t(q)]));
        }
    }
    return g;
}

Mat GnsRep::cyclic_vector() const {
    Mat omega = v_;
    for (Eigen::Index q = 0; q < r_; ++q) omega.col(q) *= sqrt_p_(q);
    return omega;
}

Mat GnsRep::vector_of(const Mat& x) const {
    if (x.rows() != d_ || x.cols() != d_)
        throw std::invalid_argument("vector_of: dimension mismatch");
    Mat xv = x * v_;
    for (Eigen::Index q = 0; q < r_; ++q) xv.col(q) *= sqrt_p_(q);
    return xv;
}

Mat GnsRep::rep_apply(const Mat& a, const Mat& x) const {
    if (a.rows() != d_ || x.rows() != d_ || x.cols() != r_)
        throw std::invalid_argument("rep_apply: dimension mismatch");
    return a * x;
}

Mat GnsRep::small_unitary(const FockUnitary& w_fock) const {
    if (diagonal_) {
        Mat w = Mat::Zero(r_, r_);
        for (Eigen::Index q = 0; q < r_; ++q) {
            Eigen::Index src = support_[std::size_t(q)];
            Eigen::Index dst = w_fock.target(src);
            Eigen::Index slot = support_slot_[std::size_t(dst)];
            if (slot < 0)
                throw std::logic_error(
                    "GNS unitary: the density support is not permutation-invariant");
            w(slot, q) = double(w_fock.sign(src));
        }
        return w;
    }
    Mat wv(d_, r_);
    for (Eigen::Index q = 0; q < r_; ++q) wv.col(q) = w_fock.apply(v_.col(q));
    return v_.adjoint() * wv;
}

Mat GnsRep::unitary_apply(const Permutation& g, const Mat& x) const {
    if (!covariant_) throw std::logic_error("unitary_apply: representation is not covariant");
    if (x.rows() != d_ || x.cols() != r_)
        throw std::invalid_argument("unitary_apply: dimension mismatch");
    FockUnitary w_fock = second_quantize(g.inverse());
    Mat w = small_unitary(w_fock);
    Mat wx(d_, r_);
    for (Eigen::Index q = 0; q < r_; ++q) wx.col(q) = w_fock.apply(x.col(q));
    return wx * w.adjoint();
}

Mat GnsRep::rep_matrix(const Mat& a) const {
    check_dense_cap(*this, "rep_matrix");
    if (a.rows() != d_ || a.cols() != d_)
        throw std::invalid_argument("rep_matrix: dimension mismatch");
    Mat out = Mat::Zero(dim(), dim());
    for (Eigen::Index q = 0; q < r_; ++q) out.block(q * d_, q * d_, d_, d_) = a;
    return out;
}

Mat GnsRep::unitary_matrix(const Permutation& g) const {
    if (!covariant_) throw std::logic_error("unitary_matrix: representation is not covariant");
    check_dense_cap(*this, "unitary_matrix");
    FockUnitary w_fock = second_quantize(g.inverse());
    Mat w = small_unitary(w_fock);
    return kron(w.conjugate(), w_fock.to_dense());
}

Mat invariant_projection(const GnsRep& gns, int k) {
    check_dense_cap(gns, "invariant_projection");
    if (k < 1 || k > gns.modes())
        throw std::invalid_argument("invariant_projection: k out of range");
    if (k > kExhaustiveGroupCap)
        throw capacity_error("invariant_projection: k! terms capped at k = 8");
    auto small = all_permutations(k);
    int n = gns.modes();
    Mat sum = pairwise_reduce<Mat>(small.size(), [&](std::size_t i) {
        std::vector<int> img(static_cast<std::size_t>(n));
        for (int j = 1; j <= n; ++j) img[std::size_t(j) - 1] = (j <= k) ? small[i](j) : j;
        return gns.unitary_matrix(Permutation::from_image(std::move(img)));
    });
    return sum / double(small.size());
}

double ErgodicReport::min_loewner() const {
    double m = 0.0;
    for (double v : loewner_min_eigs) m = std::min(m, v);
    return m;
}

bool ErgodicReport::passed(double tol) const {
    return min_loewner() >= -tol && fixed_space_deviation <= tol && cyclic_invariance <= tol;
}

ErgodicReport nested_ergodic_check(const GnsRep& gns) {
    check_dense_cap(gns, "nested_ergodic_check");
    int n = gns.modes();
    ErgodicReport report;
    Mat prev = invariant_projection(gns, 1);
    for (int k = 2; k <= n; ++k) {
        Mat cur = invariant_projection(gns, k);
        Eigen::SelfAdjointEigenSolver<Mat> es(prev - cur, Eigen::EigenvaluesOnly);
        report.loewner_min_eigs.push_back(es.eigenvalues().minCoeff());
        prev = std::move(cur);
    }
    FixedBasis basis = fixed_space_basis_nullspace(gns);
    report.fixed_dim = basis.size();
    report.fixed_space_deviation = (prev - basis.projection_matrix()).norm();
    Mat omega = gns.cyclic_vector();
    Vec omega_vec = Eigen::Map<const Vec>(omega.data(), gns.dim());
    report.cyclic_invariance = (prev * omega_vec - omega_vec).norm();
    return report;
}

Mat cesaro_conjugation_average(const GnsRep& gns, const Mat& a) {
    check_dense_cap(gns, "cesaro_conjugation_average");
    auto group = all_permutations(gns.modes());
    Mat rep_a = gns.rep_matrix(a);
    if (gns.diagonal()) {
        // U(g) is a generalized signed permutation: conjugate entrywise
        Mat sum = pairwise_reduce<Mat>(group.size(), [&](std::size_t i) {
            FockUnitary w_fock = second_quantize(group[i].inverse());
            Mat w = gns.small_unitary(w_fock);
            Eigen::Index d = gns.fock_dim(), r = gns.rank(), dr = gns.dim();
            std::vector<Eigen::Index> tgt(static_cast<std::size_t>(dr));
            std::vector<cx> coef(static_cast<std::size_t>(dr));
            for (Eigen::Index q = 0; q < r; ++q) {
                // column q of w has one entry
                Eigen::Index p = 0;
                cx wq = 0.0;
                for (Eigen::Index row = 0; row < r; ++row)
                    if (w(row, q) != 0.0) { p = row; wq = w(row, q); }
                for (Eigen::Index c = 0; c < d; ++c) {
                    tgt[std::size_t(q * d + c)] = p * d + w_fock.target(c);
                    coef[std::size_t(q * d + c)] =
                        std::conj(wq) * double(w_fock.sign(c));
                }
            }
            Mat out(dr, dr);
            for (Eigen::Index cc = 0; cc < dr; ++cc)
                for (Eigen::Index rr = 0; rr < dr; ++rr)
                    out(tgt[std::size_t(rr)], tgt[std::size_t(cc)]) =
                        coef[std::size_t(rr)] * std::conj(coef[std::size_t(cc)]) *
                        rep_a(rr, cc);
            return out;
        });
        return sum / double(group.size());
    }
    Mat sum = pairwise_reduce<Mat>(group.size(), [&](std::size_t i) {
        Mat u = gns.unitary_matrix(group[i]);
        return Mat(u * rep_a * u.adjoint());
    });
    return sum / double(group.size());
}

FixedBasis fixed_space_basis(const GnsRep& gns) {
    if (!gns.covariant())
        throw std::logic_error("fixed_space_basis: representation is not covariant");
    if (!gns.diagonal()) return fixed_space_basis_nullspace(gns);

    int n = gns.modes();
    Eigen::Index d = gns.fock_dim(), r = gns.rank();
    // action of each adjacent transposition on pairs (Fock row i, support col q)
    struct Gen {
        std::vector<Eigen::Index> row_t;
        std::vector<std::int8_t> row_s;
        std::vector<Eigen::Index> col_t;
        std::vector<std::int8_t> col_s;
    };
    std::vector<Gen> gens;
    for (int t = 1; t < n; ++t) {
        FockUnitary w = second_quantize(Permutation::transposition(n, t, t + 1));
        Gen gen;
        gen.row_t.resize(std::size_t(d));
        gen.row_s.resize(std::size_t(d));
        for (Eigen::Index i = 0; i < d; ++i) {
            gen.row_t[std::size_t(i)] = w.target(i);
            gen.row_s[std::size_t(i)] = std::int8_t(w.sign(i));
        }
        gen.col_t.resize(std::size_t(r));
        gen.col_s.resize(std::size_t(r));
        Mat ws = gns.small_unitary(w);
        for (Eigen::Index q = 0; q < r; ++q) {
            for (Eigen::Index p = 0; p < r; ++p)
                if (ws(p, q) != 0.0) {
                    gen.col_t[std::size_t(q)] = p;
                    gen.col_s[std::size_t(q)] = std::int8_t(ws(p, q).real() > 0 ? 1 : -1);
                }
        }
        gens.push_back(std::move(gen));
    }

    FixedBasis basis;
    basis.d = d;
    basis.r = r;
    Eigen::Index total = d * r;
    std::vector<std::int8_t> coeff(std::size_t(total), 0);  // 0 = unvisited
    std::vector<Eigen::Index> stack, orbit;
    for (Eigen::Index seed = 0; seed < total; ++seed) {
        if (coeff[std::size_t(seed)] != 0) continue;
        orbit.clear();
        stack.assign(1, seed);
        coeff[std::size_t(seed)] = 1;
        orbit.push_back(seed);
        bool dead = false;
        while (!stack.empty()) {
            Eigen::Index cur = stack.back();
            stack.pop_back();
            Eigen::Index i = cur % d, q = cur / d;
            std::int8_t c = coeff[std::size_t(cur)];
            for (const Gen& gen : gens) {
                Eigen::Index nxt = gen.col_t[std::size_t(q)] * d + gen.row_t[std::size_t(i)];
                std::int8_t nc =
                    std::int8_t(c * gen.row_s[std::size_t(i)] * gen.col_s[std::size_t(q)]);
                if (coeff[std::size_t(nxt)] == 0) {
                    coeff[std::size_t(nxt)] = nc;
                    orbit.push_back(nxt);
                    stack.push_back(nxt);
                } else if (coeff[std::size_t(nxt)] != nc) {
                    dead = true;
                }
            }
        }
        if (dead) {
            for (Eigen::Index idx : orbit) coeff[std::size_t(idx)] = 2;  // visited, no vector
            continue;
        }
        double norm = 1.0 / std::sqrt(double(orbit.size()));
        std::vector<std::pair<Eigen::Index, cx>> vec;
        vec.reserve(orbit.size());
        for (Eigen::Index idx : orbit) {
            vec.emplace_back(idx, cx(double(coeff[std::size_t(idx)]) * norm, 0.0));
            coeff[std::size_t(idx)] = 2;
        }
        basis.vectors.push_back(std::move(vec));
    }
    return basis;
}

FixedBasis fixed_space_basis_nullspace(const GnsRep& gns) {
    if (!gns.covariant())
        throw std::logic_error("fixed_space_basis_nullspace: representation is not covariant");
    if (gns.dim() > kNullspaceGnsCap)
        throw capacity_error("fixed_space_basis_nullspace: GNS dimension exceeds the cap");
    int n = gns.modes();
    Eigen::Index dr = gns.dim();
    Mat q_mat = Mat::Zero(dr, dr);
    Mat eye = Mat::Identity(dr, dr);
    for (int t = 1; t < n; ++t) {
        Mat u = gns.unitary_matrix(Permutation::transposition(n, t, t + 1));
        Mat diff = u - eye;
        q_mat += diff.adjoint() * diff;
    }
    FixedBasis basis;
    basis.d = gns.fock_dim();
    basis.r = gns.rank();
    if (n == 1) {  // trivial group: the whole space is fixed
        for (Eigen::Index i = 0; i < dr; ++i)
            basis.vectors.push_back({{i, cx(1.0, 0.0)}});
        return basis;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(q_mat);
    double scale = std::max(1.0, es.eigenvalues().maxCoeff());
    for (Eigen::Index k = 0; k < dr; ++k) {
        if (es.eigenvalues()(k) > 1e-10 * scale) continue;
        std::vector<std::pair<Eigen::Index, cx>> vec;
        for (Eigen::Index i = 0; i < dr; ++i) {
            cx v = es.eigenvectors()(i, k);
            if (std::abs(v) > 1e-14) vec.emplace_back(i, v);
        }
        basis.vectors.push_back(std::move(vec));
    }
    return basis;
}

Mat fixed_compression(const GnsRep& gns, const Mat& a, const FixedBasis& basis) {
    if (a.rows() != gns.fock_dim() || a.cols() != gns.fock_dim())
        throw std::invalid_argument("fixed_compression: dimension mismatch");
    Eigen::Index k = basis.size();
    Eigen::Index d = basis.d, r = basis.r;
    Mat m(k, k);
    Mat t(d, r);
    for (Eigen::Index j = 0; j < k; ++j) {
        t.setZero();
        for (const auto& [idx, c] : basis.vectors[std::size_t(j)])
            t.col(idx / d) += c * a.col(idx % d);
        for (Eigen::Index i = 0; i < k; ++i) {
            cx acc = 0.0;
            for (const auto& [idx, c] : basis.vectors[std::size_t(i)])
                acc += std::conj(c) * t(idx % d, idx / d);
            m(i, j) = acc;
        }
    }
    return m;
}

Mat fixed_compression(const GnsRep& gns, const Mat& a) {
    return fixed_compression(gns, a, fixed_space_basis(gns));
}

double ep_odd_compression(const CarContext& ctx, const GnsRep& gns, const Mat& a) {
    ctx.check_dim(a);
    if (!ctx.is_odd_element(a, 1e-10))
        throw std::invalid_argument("ep_odd_compression: element is not odd");
    Mat m = fixed_compression(gns, a);
    if (m.rows() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

}  // namespace carfin
