#include "carfin/definetti.hpp"

#include <algorithm>
#include <cmath>

#include "carfin/nnls.hpp"
#include "carfin/perms.hpp"

namespace carfin {

namespace {

constexpr double kPruneWeight = 1e-9;
constexpr double kClassifyTol = 1e-12;

double min_hankel_eig(const std::vector<double>& h, Eigen::Index size) {
    // h is indexed by i+j
    Eigen::MatrixXd mat(size, size);
    for (Eigen::Index i = 0; i < size; ++i)
        for (Eigen::Index j = 0; j < size; ++j) mat(i, j) = h[std::size_t(i + j)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace

double MixingMeasure::total_weight() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.weight;
    return s;
}

double MixingMeasure::moment(int k) const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.weight * std::pow(a.mu, double(k));
    return s;
}

void MixingMeasure::validate(double tol) const {
    if (atoms.empty()) throw std::invalid_argument("measure: no atoms");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].mu < 0.0 || atoms[i].mu > 1.0)
            throw std::invalid_argument("measure: atom outside [0,1]");
        if (atoms[i].weight < 0.0) throw std::invalid_argument("measure: negative weight");
        if (i > 0 && atoms[i].mu < atoms[i - 1].mu)
            throw std::invalid_argument("measure: atoms not sorted by mu");
    }
    if (std::abs(total_weight() - 1.0) > tol)
        throw std::invalid_argument("measure: weights do not sum to 1");
}

std::string HankelDiagnostics::worst_condition() const {
    double p = min_eig_plain, s = min_eig_shifted, r = min_eig_reflected;
    if (p <= s && p <= r) return "Hankel [m_{i+j}] >= 0";
    if (s <= r) return "Hankel [m_{i+j+1}] >= 0";
    return "Hankel [m_{i+j} - m_{i+j+1}] >= 0";
}

double HankelDiagnostics::worst_value() const {
    return std::min({min_eig_plain, min_eig_shifted, min_eig_reflected});
}

RecoveryResult recover_measure(const std::vector<double>& moments,
                               const RecoveryOptions& options) {
    if (moments.empty() || std::abs(moments[0] - 1.0) > 1e-9)
        throw std::invalid_argument("recover_measure: moment sequence must start with m_0 = 1");
    if (options.grid_size < 2)
        throw std::invalid_argument("recover_measure: grid needs at least two points");
    const int K = int(moments.size()) - 1;

    RecoveryResult result;
    result.grid_size = options.grid_size;
    if (K >= 1) {
        std::vector<double> shifted(moments.begin() + 1, moments.end());
        std::vector<double> reflected(std::size_t(K), 0.0);
        for (int i = 0; i < K; ++i)
            reflected[std::size_t(i)] = moments[std::size_t(i)] - moments[std::size_t(i) + 1];
        result.hankel.min_eig_plain = min_hankel_eig(moments, K / 2 + 1);
        result.hankel.min_eig_shifted = min_hankel_eig(shifted, (K - 1) / 2 + 1);
        result.hankel.min_eig_reflected = min_hankel_eig(reflected, (K - 1) / 2 + 1);
        if (result.hankel.worst_value() < -options.tol)
            throw infeasible_moments_error(
                "recover_measure: moment sequence violates " +
                result.hankel.worst_condition() + " (min eigenvalue " +
                std::to_string(result.hankel.worst_value()) + ")");
    }

    const int G = options.grid_size;
    Eigen::MatrixXd vand(K + 1, G);
    for (int j = 0; j < G; ++j) {
        double mu = double(j) / double(G - 1);
        double p = 1.0;
        for (int k = 0; k <= K; ++k) {
            vand(k, j) = p;
            p *= mu;
        }
    }

    // the m_0 = 1 row of the Vandermonde system is the simplex constraint;
    // weights are renormalized exactly after pruning
    Eigen::Index rows = K + 1 + (options.ridge > 0.0 ? G : 0);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, G);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
    a.topRows(K + 1) = vand;
    for (int k = 0; k <= K; ++k) b(k) = moments[std::size_t(k)];
    if (options.ridge > 0.0)
        a.bottomRows(G) = std::sqrt(options.ridge) * Eigen::MatrixXd::Identity(G, G);

    NnlsResult sol = nnls(a, b);
    result.nnls_iterations = sol.iterations;

    // Condensation polish. The active-set path often leaves an atom's mass
    // scattered over a few nearby grid points: a scattered pair has more
    // degrees of freedom than one atom, so it can fit imperfect neighbors
    // slightly better. Build the sparse candidate with one grid point per
    // support cluster (at the weighted centroid), refine each point by
    // coordinate descent, and keep the sparse support whenever it fits the
    // moments at least as well.
    {
        std::vector<int> support;
        for (int j = 0; j < G; ++j)
            if (sol.x(j) > 0.0) support.push_back(j);
        auto solve_on = [&](const std::vector<int>& idx, Eigen::VectorXd& xfull) {
            Eigen::MatrixXd sub(a.rows(), Eigen::Index(idx.size()));
            for (std::size_t c = 0; c < idx.size(); ++c)
                sub.col(Eigen::Index(c)) = a.col(idx[c]);
            NnlsResult r = nnls(sub, b);
            xfull = Eigen::VectorXd::Zero(G);
            for (std::size_t c = 0; c < idx.size(); ++c)
                xfull(idx[c]) = r.x(Eigen::Index(c));
            return r.residual;
        };
        const int cluster_gap = 25;
        if (support.size() >= 2 && support.size() <= 40) {
            std::vector<int> candidate;  // one point per cluster
            {
                double mass = 0.0, center = 0.0;
                int prev = support.front();
                for (int j : support) {
                    if (j - prev > cluster_gap) {
                        candidate.push_back(int(std::lround(center / mass)));
                        mass = center = 0.0;
                    }
                    mass += sol.x(j);
                    center += sol.x(j) * double(j);
                    prev = j;
                }
                candidate.push_back(int(std::lround(center / mass)));
            }
            if (candidate.size() < support.size()) {
                Eigen::VectorXd x_sparse;
                double resid = solve_on(candidate, x_sparse);
                for (int round = 0; round < 8; ++round) {
                    bool moved = false;
                    for (std::size_t c = 0; c < candidate.size(); ++c) {
                        int here = candidate[std::size_t(c)];
                        for (int p = std::max(0, here - 3); p <= std::min(G - 1, here + 3);
                             ++p) {
                            if (p == here) continue;
                            std::vector<int> trial = candidate;
                            trial[std::size_t(c)] = p;
                            std::sort(trial.begin(), trial.end());
                            Eigen::VectorXd xtmp;
                            double r = solve_on(trial, xtmp);
                            if (r < resid * (1.0 - 1e-12)) {
                                resid = r;
                                candidate = trial;
                                x_sparse = xtmp;
                                moved = true;
                            }
                        }
                    }
                    if (!moved) break;
                }
                if (resid <= (a * sol.x - b).norm()) sol.x = x_sparse;
            }
        }
    }

    Eigen::VectorXd m_vec(K + 1);
    for (int k = 0; k <= K; ++k) m_vec(k) = moments[std::size_t(k)];
    result.residual = (vand * sol.x - m_vec).norm();
    if (result.residual > options.tol)
        throw infeasible_moments_error(
            "recover_measure: residual " + std::to_string(result.residual) +
            " exceeds tol; most violated condition: " + result.hankel.worst_condition() +
            " (min eigenvalue " + std::to_string(result.hankel.worst_value()) + ")");

    // merge maximal runs of adjacent grid atoms, prune, renormalize
    std::vector<MeasureAtom> atoms;
    int j = 0;
    while (j < G) {
        if (sol.x(j) <= 0.0) {
            ++j;
            continue;
        }
        double w = 0.0, wmu = 0.0;
        int end = j;
        while (end < G && sol.x(end) > 0.0) {
            w += sol.x(end);
            wmu += sol.x(end) * double(end) / double(G - 1);
            ++end;
        }
        if (w > kPruneWeight) atoms.push_back({wmu / w, w});
        j = end;
    }
    if (atoms.empty())
        throw infeasible_moments_error("recover_measure: all grid weights pruned");
    double total = 0.0;
    for (const auto& atom : atoms) total += atom.weight;
    for (auto& atom : atoms) atom.weight /= total;
    std::sort(atoms.begin(), atoms.end(),
              [](const MeasureAtom& x, const MeasureAtom& y) { return x.mu < y.mu; });
    result.measure.atoms = std::move(atoms);
    return result;
}

State reconstruct_state(const MixingMeasure& measure, int n) {
    measure.validate();
    std::vector<std::pair<double, double>> atoms;
    atoms.reserve(measure.atoms.size());
    double total = measure.total_weight();
    for (const auto& a : measure.atoms) atoms.emplace_back(a.mu, a.weight / total);
    return mixture_of_product_states(atoms, n);
}

DecompositionReport decompose_state(const CarContext& ctx, const State& phi,
                                    const RecoveryOptions& options, std::uint64_t seed) {
    ctx.check_dim(phi.density);
    if (!is_symmetric(ctx, phi, 1e-8))
        throw not_symmetric_error("decompose_state: state is not symmetric");

    const int n = ctx.modes();
    DecompositionReport report;
    report.seed = seed;
    report.moments = occupation_moments(ctx, phi, n);
    RecoveryResult rec = recover_measure(report.moments, options);
    report.measure = rec.measure;
    report.residual = rec.residual;
    State recon = reconstruct_state(rec.measure, n);

    // all products of e_11(j): diagonal projectors onto "modes in S empty"
    for (Eigen::Index mask = 0; mask < pow2(n); ++mask) {
        cx lhs = 0.0, rhs = 0.0;
        for (Eigen::Index s = 0; s < ctx.dim(); ++s) {
            if ((s & mask) != 0) continue;
            lhs += phi.density(s, s);
            rhs += recon.density(s, s);
        }
        report.battery_occupation = std::max(report.battery_occupation, std::abs(lhs - rhs));
    }

    // all two-site matrix-unit words
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            for (int k = 1; k <= 2; ++k)
                for (int l = 1; l <= 2; ++l)
                    for (int p = 1; p <= 2; ++p)
                        for (int q = 1; q <= 2; ++q) {
                            Mat word = ctx.elementary_tensor({{i, k, l}, {j, p, q}});
                            cx dev = evaluate(phi, word) - evaluate(recon, word);
                            report.battery_two_site =
                                std::max(report.battery_two_site, std::abs(dev));
                        }

    // random symmetrized even observables, localized on the first few modes;
    // trimmed above n = 8 where each symmetrization walks n!/(n-s)! cosets of
    // a 4^n conjugation
    SplitMix64 rng(seed);
    int s_modes = std::min(n <= 9 ? 3 : 2, n);
    int trials = n <= 8 ? 50 : 12;
    CarContext small(s_modes);
    for (int trial = 0; trial < trials; ++trial) {
        Mat h = random_hermitian(small.dim(), rng);
        Mat even = small.even_odd_split(h).first;
        Mat sym = symmetrize_operator(ctx, ctx.embed_initial(even, s_modes));
        cx dev = evaluate(phi, sym) - evaluate(recon, sym);
        report.battery_random = std::max(report.battery_random, std::abs(dev));
    }

    report.battery_max = std::max(
        {report.battery_occupation, report.battery_two_site, report.battery_random});
    return report;
}

std::string FactorType::name() const {
    switch (tag) {
        case FactorTag::I_infinity: return "I_infinity";
        case FactorTag::II_1: return "II_1";
        case FactorTag::III_lambda: return "III_lambda";
    }
    return "";
}

FactorType classify_type(double mu) {
    if (mu < 0.0 || mu > 1.0) throw std::invalid_argument("classify_type: mu outside [0,1]");
    if (mu <= kClassifyTol || mu >= 1.0 - kClassifyTol) return {FactorTag::I_infinity, 0.0};
    if (std::abs(mu - 0.5) <= kClassifyTol) return {FactorTag::II_1, 0.0};
    double lambda = (mu < 0.5) ? mu / (1.0 - mu) : (1.0 - mu) / mu;
    return {FactorTag::III_lambda, lambda};
}

RatioSpectrum eigenvalue_ratio_spectrum(double mu, int n) {
    if (mu < 0.0 || mu > 1.0)
        throw std::invalid_argument("eigenvalue_ratio_spectrum: mu outside [0,1]");
    if (mu <= kClassifyTol || mu >= 1.0 - kClassifyTol)
        throw std::invalid_argument(
            "eigenvalue_ratio_spectrum: spectrum degenerates at mu = 0 and mu = 1");
    if (n < 1 || n > 64) throw std::invalid_argument("eigenvalue_ratio_spectrum: bad n");

    RatioSpectrum out;
    if (std::abs(mu - 0.5) <= kClassifyTol) {
        out.eigenvalues.push_back(std::pow(0.5, double(n)));
        return out;  // single eigenvalue, no ratios
    }
    double hi = std::max(mu, 1.0 - mu), lo = std::min(mu, 1.0 - mu);
    for (int k = 0; k <= n; ++k)
        out.eigenvalues.push_back(std::pow(hi, double(n - k)) * std::pow(lo, double(k)));
    for (int k = 0; k < n; ++k)
        out.ratios.push_back(out.eigenvalues[std::size_t(k) + 1] /
                             out.eigenvalues[std::size_t(k)]);
    return out;
}

}  // namespace carfin
