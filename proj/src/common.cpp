#include "carfin/common.hpp"

namespace carfin {

Mat random_ginibre(Eigen::Index dim, SplitMix64& rng) {
    Mat g(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index i = 0; i < dim; ++i)
            g(i, j) = cx(rng.gaussian(), rng.gaussian());
    return g;
}

Mat random_hermitian(Eigen::Index dim, SplitMix64& rng) {
    Mat g = random_ginibre(dim, rng);
    return 0.5 * (g + g.adjoint().eval());
}

Mat random_unitary(Eigen::Index dim, SplitMix64& rng) {
    Mat g = random_ginibre(dim, rng);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    // fix phases so the factorization is unique
    for (Eigen::Index j = 0; j < dim; ++j) {
        cx d = r(j, j);
        if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
    }
    return q;
}

}  // namespace carfin
