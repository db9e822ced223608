#include "carfin/nnls.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace carfin {

namespace {

Eigen::VectorXd solve_passive(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                              const std::vector<int>& passive) {
    Eigen::MatrixXd ap(a.rows(), Eigen::Index(passive.size()));
    for (std::size_t c = 0; c < passive.size(); ++c) ap.col(Eigen::Index(c)) = a.col(passive[c]);
    return ap.colPivHouseholderQr().solve(b);
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tol,
                int max_iterations) {
    const Eigen::Index cols = a.cols();
    Eigen::VectorXd col_norm(cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        col_norm(j) = std::max(a.col(j).norm(), std::numeric_limits<double>::min());
    if (tol < 0.0) {
        // threshold on the column-normalized gradient, just above the
        // round-off floor; moment-type problems are extremely flat near the
        // optimum, so a loose threshold stops far from the best residual
        tol = 20.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, b.norm());
    }
    if (max_iterations < 0) max_iterations = int(3 * cols);

    NnlsResult result;
    result.x = Eigen::VectorXd::Zero(cols);
    std::vector<bool> in_passive(std::size_t(cols), false);
    std::vector<int> passive;

    Eigen::VectorXd resid = b;
    for (int iter = 0; iter < max_iterations; ++iter) {
        result.iterations = iter + 1;
        Eigen::VectorXd w = a.transpose() * resid;
        int best = -1;
        double best_w = tol;
        for (Eigen::Index j = 0; j < cols; ++j) {
            if (in_passive[std::size_t(j)]) continue;
            double scaled = w(j) / col_norm(j);
            if (scaled > best_w) {
                best_w = scaled;
                best = int(j);
            }
        }
        if (best < 0) break;  // KKT satisfied

        in_passive[std::size_t(best)] = true;
        passive.push_back(best);

        Eigen::VectorXd z = solve_passive(a, b, passive);
        // inner loop: back off along the segment x -> z until feasible
        while (z.minCoeff() <= 0.0) {
            double alpha = std::numeric_limits<double>::infinity();
            for (std::size_t p = 0; p < passive.size(); ++p) {
                double zp = z(Eigen::Index(p));
                if (zp <= 0.0) {
                    double xp = result.x(passive[p]);
                    alpha = std::min(alpha, xp / (xp - zp));
                }
            }
            for (std::size_t p = 0; p < passive.size(); ++p) {
                double xp = result.x(passive[p]);
                result.x(passive[p]) = xp + alpha * (z(Eigen::Index(p)) - xp);
            }
            double drop = 1e-14 * std::max(1.0, result.x.cwiseAbs().maxCoeff());
            std::vector<int> still;
            for (std::size_t p = 0; p < passive.size(); ++p) {
                if (result.x(passive[p]) > drop) {
                    still.push_back(passive[p]);
                } else {
                    result.x(passive[p]) = 0.0;
                    in_passive[std::size_t(passive[p])] = false;
                }
            }
            passive = std::move(still);
            if (passive.empty()) break;
            z = solve_passive(a, b, passive);
        }
        for (std::size_t p = 0; p < passive.size(); ++p)
            result.x(passive[p]) = z(Eigen::Index(p));
        resid = b - a * result.x;
    }
    result.residual = resid.norm();
    return result;
}

}  // namespace carfin
