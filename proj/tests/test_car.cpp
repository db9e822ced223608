#include <doctest.h>

#include "carfin/car.hpp"

using namespace carfin;

namespace {

// independent tensor builder: kron over explicit 2x2 factors, mode 1 first
Mat kron2(const std::vector<Mat>& factors) {
    Mat out = Mat::Ones(1, 1);
    for (const Mat& f : factors) {
        Mat next(out.rows() * f.rows(), out.cols() * f.cols());
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            for (Eigen::Index j = 0; j < out.cols(); ++j)
                next.block(i * f.rows(), j * f.cols(), f.rows(), f.cols()) = out(i, j) * f;
        out = std::move(next);
    }
    return out;
}

Mat lower2() {  // |0><1|
    Mat a = Mat::Zero(2, 2);
    a(0, 1) = 1.0;
    return a;
}

Mat eye2() { return Mat::Identity(2, 2); }

}  // namespace

TEST_CASE("single-mode annihilator and number projector") {
    CarContext ctx(1);
    const Mat& a = ctx.annihilator(1);
    CHECK(a.rows() == 2);
    CHECK(a(0, 1) == cx(1.0));
    CHECK(a(0, 0) == cx(0.0));
    CHECK(a(1, 0) == cx(0.0));
    CHECK(a(1, 1) == cx(0.0));
    Mat proj = a * a.adjoint();
    CHECK(proj(0, 0) == cx(1.0));
    CHECK(proj(1, 1) == cx(0.0));
}

TEST_CASE("anticommutation relations are exact for n = 1..4") {
    for (int n = 1; n <= 4; ++n) {
        CarContext ctx(n);
        for (int j = 1; j <= n; ++j) {
            for (int k = 1; k <= n; ++k) {
                Mat mixed =
                    ctx.creator(j) * ctx.annihilator(k) + ctx.annihilator(k) * ctx.creator(j);
                if (j == k) mixed -= ctx.identity();
                CHECK(max_abs(mixed) == 0.0);
                Mat same = ctx.annihilator(j) * ctx.annihilator(k) +
                           ctx.annihilator(k) * ctx.annihilator(j);
                CHECK(max_abs(same) == 0.0);
            }
        }
    }
}

TEST_CASE("mode count capacity") {
    CHECK_THROWS_AS(CarContext(0), capacity_error);
    CHECK_THROWS_AS(CarContext(13), capacity_error);
}

TEST_CASE("parity automorphism") {
    CarContext ctx(3);
    CHECK(max_abs(ctx.parity(ctx.annihilator(1)) + ctx.annihilator(1)) == 0.0);
    Mat number = ctx.creator(1) * ctx.annihilator(1);
    CHECK(max_abs_diff(ctx.parity(number), number) == 0.0);

    SplitMix64 rng(7);
    Mat a = random_ginibre(ctx.dim(), rng);
    Mat b = random_ginibre(ctx.dim(), rng);
    CHECK(max_abs_diff(ctx.parity(ctx.parity(a)), a) < 1e-12);
    CHECK(max_abs_diff(ctx.parity(a * b), ctx.parity(a) * ctx.parity(b)) < 1e-12);
    CHECK(max_abs_diff(ctx.parity(a.adjoint()), ctx.parity(a).adjoint()) < 1e-12);

    const Mat& p = ctx.parity_unitary();
    CHECK(max_abs_diff(p * p, ctx.identity()) == 0.0);
    CHECK(max_abs_diff(p.adjoint(), p) == 0.0);
}

TEST_CASE("even/odd split") {
    CarContext ctx(2);
    Mat a1 = ctx.annihilator(1);
    auto [even1, odd1] = ctx.even_odd_split(a1);
    CHECK(max_abs(even1) == 0.0);
    CHECK(max_abs_diff(odd1, a1) == 0.0);

    Mat pair = ctx.creator(1) * ctx.annihilator(2);
    auto [even2, odd2] = ctx.even_odd_split(pair);
    CHECK(max_abs_diff(even2, pair) == 0.0);
    CHECK(max_abs(odd2) == 0.0);

    Mat combo = a1 + ctx.creator(1) * ctx.annihilator(1);
    auto [even3, odd3] = ctx.even_odd_split(combo);
    CHECK(max_abs_diff(even3, ctx.creator(1) * ctx.annihilator(1)) == 0.0);
    CHECK(max_abs_diff(odd3, a1) == 0.0);
    CHECK(max_abs_diff(even3 + odd3, combo) == 0.0);
}

TEST_CASE("matrix units: formulas, algebra, locality") {
    for (int n : {2, 3}) {
        CarContext ctx(n);
        for (int j = 1; j <= n; ++j) {
            const Mat& a = ctx.annihilator(j);
            CHECK(max_abs_diff(ctx.matrix_unit(j, 1, 1), a * a.adjoint()) == 0.0);
            CHECK(max_abs_diff(ctx.matrix_unit(j, 2, 2), a.adjoint() * a) == 0.0);
            CHECK(max_abs_diff(ctx.matrix_unit(j, 1, 2).adjoint(), ctx.matrix_unit(j, 2, 1)) ==
                  0.0);

            // matrix-unit algebra e_kl e_pq = δ_lp e_kq, exact
            for (int k = 1; k <= 2; ++k)
                for (int l = 1; l <= 2; ++l)
                    for (int p = 1; p <= 2; ++p)
                        for (int q = 1; q <= 2; ++q) {
                            Mat lhs = ctx.matrix_unit(j, k, l) * ctx.matrix_unit(j, p, q);
                            Mat rhs = (l == p) ? ctx.matrix_unit(j, k, q)
                                               : Mat(Mat::Zero(ctx.dim(), ctx.dim()));
                            CHECK(max_abs_diff(lhs, rhs) == 0.0);
                        }
            Mat unity = ctx.matrix_unit(j, 1, 1) + ctx.matrix_unit(j, 2, 2);
            CHECK(max_abs_diff(unity, ctx.identity()) == 0.0);

            // diagonal units are single-site projectors
            std::vector<Mat> factors(std::size_t(n), eye2());
            Mat e00 = Mat::Zero(2, 2);
            e00(0, 0) = 1.0;
            factors[std::size_t(j) - 1] = e00;
            CHECK(max_abs_diff(ctx.matrix_unit(j, 1, 1), kron2(factors)) == 0.0);
        }
        // cross-site commutation
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j) {
                if (i == j) continue;
                Mat x = ctx.matrix_unit(i, 1, 2);
                Mat y = ctx.matrix_unit(j, 2, 1);
                CHECK(max_abs(x * y - y * x) == 0.0);
            }
    }
}

TEST_CASE("the sign string cancels: e_12(2) is the single-site lowering matrix") {
    CarContext ctx(2);
    Mat expected = kron2({eye2(), lower2()});
    CHECK(max_abs_diff(ctx.matrix_unit(2, 1, 2), expected) == 0.0);
}

TEST_CASE("gamma isomorphism on explicit words") {
    CarContext ctx(2);
    Mat d10 = Mat::Zero(2, 2);
    d10(0, 0) = 1.0;
    Mat d01 = Mat::Zero(2, 2);
    d01(1, 1) = 1.0;
    CHECK(max_abs_diff(ctx.gamma_iso({{1, 1, 1}, {2, 2, 2}}), kron2({d10, d01})) == 0.0);
    CHECK(max_abs_diff(ctx.gamma_iso({}), ctx.identity()) == 0.0);
    CHECK(max_abs_diff(ctx.gamma_iso({{1, 1, 2}}), ctx.annihilator(1)) == 0.0);

    CHECK_THROWS_AS(ctx.gamma_iso({{1, 1, 1}, {1, 2, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(ctx.gamma_iso({{3, 1, 1}}), std::invalid_argument);
}

TEST_CASE("gamma isomorphism exhaustively over all words, n <= 3") {
    for (int n = 1; n <= 3; ++n) {
        CarContext ctx(n);
        std::int64_t total = 1;
        for (int j = 0; j < n; ++j) total *= 5;
        for (std::int64_t code = 0; code < total; ++code) {
            std::vector<WordFactor> word;
            std::int64_t c = code;
            for (int j = 1; j <= n; ++j) {
                int digit = int(c % 5);
                c /= 5;
                if (digit > 0) word.push_back({j, (digit - 1) / 2 + 1, (digit - 1) % 2 + 1});
            }
            Mat lhs = ctx.identity();
            for (const auto& f : word) lhs = lhs * ctx.matrix_unit(f.site, f.k, f.l);
            CHECK(max_abs_diff(lhs, ctx.elementary_tensor(word)) == 0.0);
        }
    }
}

TEST_CASE("normalized trace") {
    CarContext ctx(3);
    CHECK(ctx.normalized_trace(ctx.identity()) == cx(1.0));
    CHECK(std::abs(ctx.normalized_trace(ctx.annihilator(1))) == 0.0);

    // diagonal-count oracle for tau(a†_1 a_1): half the basis states are occupied
    Mat number = ctx.creator(1) * ctx.annihilator(1);
    int occupied = 0;
    for (Eigen::Index s = 0; s < ctx.dim(); ++s)
        if ((s >> (ctx.modes() - 1)) & 1) ++occupied;
    CHECK(double(occupied) / double(ctx.dim()) == 0.5);
    CHECK(ctx.normalized_trace(number) == cx(0.5));

    SplitMix64 rng(11);
    Mat a = random_ginibre(ctx.dim(), rng);
    Mat b = random_ginibre(ctx.dim(), rng);
    CHECK(std::abs(ctx.normalized_trace(a * b) - ctx.normalized_trace(b * a)) < 1e-12);
    Mat u = random_unitary(ctx.dim(), rng);
    CHECK(std::abs(ctx.normalized_trace(u * a * u.adjoint()) - ctx.normalized_trace(a)) <
          1e-10);
}

TEST_CASE("initial-segment support detection and embedding") {
    CarContext ctx(4);
    SplitMix64 rng(3);
    CarContext small(2);
    Mat a_small = random_ginibre(small.dim(), rng);
    Mat embedded = ctx.embed_initial(a_small, 2);
    CHECK(ctx.initial_support(embedded) == 2);
    CHECK(max_abs_diff(ctx.restrict_to_initial(embedded, 2), a_small) < 1e-12);
    CHECK(ctx.initial_support(ctx.identity()) == 0);
    CHECK(ctx.initial_support(ctx.annihilator(3)) == 3);
    Mat full = random_ginibre(ctx.dim(), rng);
    CHECK(ctx.initial_support(full) == 4);
    CHECK_THROWS_AS(ctx.check_dim(a_small), std::invalid_argument);
}
