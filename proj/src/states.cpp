#include "carfin/states.hpp"

#include <cmath>
#include <iostream>

namespace carfin {

namespace {

// term cap for support-aware exact averages (n!/(n-m)! representatives)
constexpr std::size_t kAverageTermCap = std::size_t(1) << 22;

}  // namespace

void validate_state(const State& phi, double tol) {
    Eigen::Index d = pow2(phi.n);
    if (phi.n < 1 || phi.n > kMaxModes)
        throw std::invalid_argument("state: mode count out of range");
    if (phi.density.rows() != d || phi.density.cols() != d)
        throw std::invalid_argument("state: density is not 2^n x 2^n");
    if (max_abs_diff(phi.density, phi.density.adjoint()) > tol)
        throw std::invalid_argument("state: density is not Hermitian");
    if (std::abs(phi.density.trace() - cx(1.0)) > 1e-12)
        throw std::invalid_argument("state: density trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Mat> es(phi.density, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol)
        throw std::invalid_argument("state: density has a negative eigenvalue");
}

cx evaluate(const State& phi, const Mat& a) {
    if (a.rows() != phi.density.rows() || a.cols() != phi.density.cols())
        throw std::invalid_argument("evaluate: dimension mismatch");
    // tr(D A) without forming the product
    return (phi.density.transpose().cwiseProduct(a)).sum();
}

Mat even_qubit_density(double mu) {
    if (mu < 0.0 || mu > 1.0)
        throw std::invalid_argument("even qubit state needs mu in [0,1]");
    Mat rho = Mat::Zero(2, 2);
    rho(0, 0) = mu;
    rho(1, 1) = 1.0 - mu;
    return rho;
}

State product_state(double mu, int n) {
    if (n < 1 || n > kMaxModes) throw capacity_error("product_state: mode count out of range");
    if (mu < 0.0 || mu > 1.0) throw std::invalid_argument("product_state: mu outside [0,1]");
    Eigen::Index d = pow2(n);
    RVec diag(d);
    for (Eigen::Index s = 0; s < d; ++s) {
        double p = 1.0;
        for (int j = 0; j < n; ++j) p *= ((s >> j) & 1) ? (1.0 - mu) : mu;
        diag(s) = p;
    }
    // bit 0 of the loop above is mode n; the weight only depends on the
    // number of set bits, so the ordering convention drops out.
    State phi;
    phi.n = n;
    phi.density = diag.cast<cx>().asDiagonal();
    return phi;
}

State mixture_of_product_states(const std::vector<std::pair<double, double>>& atoms, int n) {
    if (atoms.empty()) throw std::invalid_argument("mixture: no atoms");
    State phi;
    phi.n = n;
    phi.density = Mat::Zero(pow2(n), pow2(n));
    double total = 0.0;
    for (const auto& [mu, w] : atoms) {
        if (w < 0.0) throw std::invalid_argument("mixture: negative weight");
        phi.density += w * product_state(mu, n).density;
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("mixture: weights do not sum to 1");
    return phi;
}

State symmetrize_state(const CarContext& ctx, const State& phi) {
    ctx.check_dim(phi.density);
    auto reps = conjugation_representatives(ctx.modes(), ctx.modes(), kAverageTermCap);
    Mat sum = pairwise_reduce<Mat>(reps.size(), [&](std::size_t i) {
        return second_quantize(reps[i]).conjugate(phi.density);
    });
    return State{ctx.modes(), sum / double(reps.size())};
}

double symmetry_defect(const CarContext& ctx, const State& phi) {
    ctx.check_dim(phi.density);
    double worst = 0.0;
    for (int i = 1; i < ctx.modes(); ++i) {
        FockUnitary u = second_quantize(Permutation::transposition(ctx.modes(), i, i + 1));
        worst = std::max(worst, (u.conjugate(phi.density) - phi.density).norm());
    }
    return worst;
}

bool is_symmetric(const CarContext& ctx, const State& phi, double tol) {
    return symmetry_defect(ctx, phi) <= tol;
}

double evenness_defect(const CarContext& ctx, const State& phi) {
    ctx.check_dim(phi.density);
    return (ctx.parity(phi.density) - phi.density).norm();
}

bool is_even(const CarContext& ctx, const State& phi, double tol) {
    return evenness_defect(ctx, phi) <= tol;
}

State restrict_state(const CarContext& ctx, const State& phi, int k) {
    ctx.check_dim(phi.density);
    if (k < 1 || k > ctx.modes()) throw std::invalid_argument("restrict: k out of range");
    Eigen::Index nb = pow2(k);
    Eigen::Index db = pow2(ctx.modes() - k);
    Mat out(nb, nb);
    for (Eigen::Index bi = 0; bi < nb; ++bi)
        for (Eigen::Index bj = 0; bj < nb; ++bj)
            out(bi, bj) = phi.density.block(bi * db, bj * db, db, db).trace();
    return State{k, std::move(out)};
}

std::vector<double> occupation_moments(const CarContext& ctx, const State& phi, int K) {
    ctx.check_dim(phi.density);
    if (K < 0 || K > ctx.modes())
        throw std::invalid_argument("occupation_moments: K exceeds the mode count");
    if (!is_symmetric(ctx, phi, 1e-8))
        std::cerr << "occupation_moments: warning: state is not symmetric; "
                     "moments depend on the site choice\n";
    // e_11(1)..e_11(k) projects onto bitstrings whose first k modes are empty
    std::vector<double> m(std::size_t(K) + 1, 0.0);
    m[0] = 1.0;
    int n = ctx.modes();
    for (int k = 1; k <= K; ++k) {
        cx acc = 0.0;
        Eigen::Index step = pow2(n - k);
        for (Eigen::Index s = 0; s < step; ++s) acc += phi.density(s, s);
        m[std::size_t(k)] = acc.real();
    }
    return m;
}

cx weak_clustering_average(const CarContext& ctx, const State& phi, const Mat& a,
                           const Mat& b) {
    ctx.check_dim(a);
    ctx.check_dim(b);
    ctx.check_dim(phi.density);
    int n = ctx.modes();
    int m = ctx.initial_support(a);
    auto reps = conjugation_representatives(n, m, kAverageTermCap);
    // Σ_g φ(α_g(A) B) over the full group equals the average of
    // φ(Γ(u) A Γ(u)* B) over representatives; tr(D M B) = tr(M (B D)).
    Mat bd = b * phi.density;
    cx sum = pairwise_reduce<cx>(reps.size(), [&](std::size_t i) {
        Mat conj = second_quantize(reps[i]).conjugate(a);
        return cx((conj.transpose().cwiseProduct(bd)).sum());
    });
    return sum / double(reps.size());
}

cx strong_clustering_check(const CarContext& ctx, const State& phi, const Mat& a,
                           const Mat& b, int stage) {
    ctx.check_dim(a);
    ctx.check_dim(b);
    int n = ctx.modes();
    if ((Eigen::Index(1) << stage) > n)
        throw capacity_error("strong_clustering_check: 2^m exceeds the mode count");
    int half = 1 << (stage - 1);
    int sa = ctx.initial_support(a);
    int sb = ctx.initial_support(b);
    if (sa > half || sb > half)
        throw std::invalid_argument(
            "strong_clustering_check: operators must live on modes 1..2^(m-1)");
    Mat shifted = alpha(ctx, mixing_permutation(stage, n), a);
    return evaluate(phi, shifted * b) - evaluate(phi, a) * evaluate(phi, b);
}

std::vector<std::pair<int, cx>> oddness_decay(
    const std::vector<int>& ns, const std::function<Mat(const CarContext&)>& build_a,
    const std::function<State(const CarContext&)>& build_phi) {
    std::vector<std::pair<int, cx>> out;
    out.reserve(ns.size());
    for (int n : ns) {
        CarContext ctx(n);
        Mat a = build_a(ctx);
        ctx.check_dim(a);
        if (!ctx.is_odd_element(a, 1e-10))
            throw std::invalid_argument("oddness_decay: element is not odd");
        State phi = build_phi ? build_phi(ctx) : product_state(0.5, n);
        int m = ctx.initial_support(a);
        auto reps = conjugation_representatives(n, m, kAverageTermCap);
        Mat adj = a.adjoint();
        Mat da = phi.density * a;
        Mat ad = a * phi.density;
        cx sum = pairwise_reduce<cx>(reps.size(), [&](std::size_t i) {
            Mat conj = second_quantize(reps[i]).conjugate(adj);
            // φ(A·conj + conj·A) = tr((D A) conj) + tr(conj (A D))
            cx t1 = (conj.transpose().cwiseProduct(da)).sum();
            cx t2 = (ad.transpose().cwiseProduct(conj)).sum();
            return t1 + t2;
        });
        out.emplace_back(n, sum / double(reps.size()));
    }
    return out;
}

}  // namespace carfin
