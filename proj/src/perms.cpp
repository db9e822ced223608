#include "carfin/perms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace carfin {

Permutation Permutation::identity(int n) {
    std::vector<int> img(static_cast<std::size_t>(n));
    std::iota(img.begin(), img.end(), 1);
    return Permutation(std::move(img));
}

Permutation Permutation::transposition(int n, int i, int j) {
    if (i < 1 || i > n || j < 1 || j > n)
        throw std::invalid_argument("transposition: index out of range");
    Permutation p = identity(n);
    std::swap(p.image_[std::size_t(i) - 1], p.image_[std::size_t(j) - 1]);
    return p;
}

Permutation Permutation::from_image(std::vector<int> image) {
    std::vector<bool> seen(image.size() + 1, false);
    for (int v : image) {
        if (v < 1 || v > int(image.size()) || seen[std::size_t(v)])
            throw std::invalid_argument("from_image: not a bijection of {1..n}");
        seen[std::size_t(v)] = true;
    }
    return Permutation(std::move(image));
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(image_.size());
    for (int j = 1; j <= size(); ++j) inv[std::size_t(image_[std::size_t(j) - 1]) - 1] = j;
    return Permutation(std::move(inv));
}

Permutation Permutation::compose(const Permutation& other) const {
    if (size() != other.size())
        throw std::invalid_argument("compose: size mismatch");
    std::vector<int> img(image_.size());
    for (int j = 1; j <= size(); ++j)
        img[std::size_t(j) - 1] = (*this)(other(j));
    return Permutation(std::move(img));
}

bool Permutation::is_identity() const {
    for (int j = 1; j <= size(); ++j)
        if ((*this)(j) != j) return false;
    return true;
}

std::vector<Permutation> all_permutations(int n) {
    if (n > kExhaustiveGroupCap)
        throw capacity_error("all_permutations: n! enumeration capped at n = " +
                             std::to_string(kExhaustiveGroupCap));
    std::vector<int> img(static_cast<std::size_t>(n));
    std::iota(img.begin(), img.end(), 1);
    std::vector<Permutation> out;
    do {
        out.push_back(Permutation::from_image(img));
    } while (std::next_permutation(img.begin(), img.end()));
    return out;
}

FockUnitary::FockUnitary(int n_modes, std::vector<Eigen::Index> target,
                         std::vector<std::int8_t> sign)
    : n_(n_modes), target_(std::move(target)), sign_(std::move(sign)) {
    if (target_.size() != sign_.size() || Eigen::Index(target_.size()) != pow2(n_))
        throw std::invalid_argument("FockUnitary: inconsistent arrays");
}

Mat FockUnitary::to_dense() const {
    Mat u = Mat::Zero(dim(), dim());
    for (Eigen::Index c = 0; c < dim(); ++c) u(target(c), c) = double(sign(c));
    return u;
}

Mat FockUnitary::conjugate(const Mat& a) const {
    if (a.rows() != dim() || a.cols() != dim())
        throw std::invalid_argument("FockUnitary::conjugate: dimension mismatch");
    Mat out(dim(), dim());
    for (Eigen::Index c = 0; c < dim(); ++c) {
        Eigen::Index tc = target(c);
        double sc = sign(c);
        for (Eigen::Index r = 0; r < dim(); ++r)
            out(target(r), tc) = double(sign(r)) * sc * a(r, c);
    }
    return out;
}

Vec FockUnitary::apply(const Vec& v) const {
    Vec out = Vec::Zero(dim());
    for (Eigen::Index c = 0; c < dim(); ++c) out(target(c)) = double(sign(c)) * v(c);
    return out;
}

FockUnitary FockUnitary::compose(const FockUnitary& other) const {
    if (dim() != other.dim()) throw std::invalid_argument("compose: dimension mismatch");
    std::vector<Eigen::Index> t(static_cast<std::size_t>(dim()));
    std::vector<std::int8_t> s(static_cast<std::size_t>(dim()));
    for (Eigen::Index c = 0; c < dim(); ++c) {
        Eigen::Index mid = other.target(c);
        t[std::size_t(c)] = target(mid);
        s[std::size_t(c)] = std::int8_t(sign(mid) * other.sign(c));
    }
    return FockUnitary(n_, std::move(t), std::move(s));
}

FockUnitary FockUnitary::inverse() const {
    std::vector<Eigen::Index> t(static_cast<std::size_t>(dim()));
    std::vector<std::int8_t> s(static_cast<std::size_t>(dim()));
    for (Eigen::Index c = 0; c < dim(); ++c) {
        t[std::size_t(target(c))] = c;
        s[std::size_t(target(c))] = sign_[std::size_t(c)];
    }
    return FockUnitary(n_, std::move(t), std::move(s));
}

FockUnitary second_quantize(const Permutation& g) {
    int n = g.size();
    Eigen::Index d = pow2(n);
    std::vector<Eigen::Index> target(static_cast<std::size_t>(d));
    std::vector<std::int8_t> sign(static_cast<std::size_t>(d));
    std::vector<int> images;
    images.reserve(std::size_t(n));
    for (Eigen::Index s = 0; s < d; ++s) {
        images.clear();
        Eigen::Index t = 0;
        for (int j = 1; j <= n; ++j) {
            if ((s >> (n - j)) & 1) {
                images.push_back(g(j));
                t |= Eigen::Index(1) << (n - g(j));
            }
        }
        // parity of the sort of the image list
        int inversions = 0;
        for (std::size_t a = 0; a < images.size(); ++a)
            for (std::size_t b = a + 1; b < images.size(); ++b)
                if (images[a] > images[b]) ++inversions;
        target[std::size_t(s)] = t;
        sign[std::size_t(s)] = (inversions % 2 == 0) ? 1 : -1;
    }
    return FockUnitary(n, std::move(target), std::move(sign));
}

Mat alpha(const CarContext& ctx, const Permutation& g, const Mat& a) {
    ctx.check_dim(a);
    if (g.size() != ctx.modes())
        throw std::invalid_argument("alpha: permutation degree differs from mode count");
    return second_quantize(g.inverse()).conjugate(a);
}

std::vector<Permutation> conjugation_representatives(int n, int m, std::size_t term_cap) {
    if (m >= n) {
        std::size_t fact = 1;
        for (int i = 2; i <= n; ++i) fact *= std::size_t(i);
        if (n > kExhaustiveGroupCap || fact > term_cap)
            throw capacity_error(
                "group average needs " + std::to_string(fact) +
                " terms; use symmetrize_operator_sampled beyond n = " +
                std::to_string(kExhaustiveGroupCap));
        return all_permutations(n);
    }
    std::size_t count = 1;
    for (int i = 0; i < m; ++i) count *= std::size_t(n - i);
    if (count > term_cap)
        throw capacity_error("group average needs " + std::to_string(count) + " terms");

    std::vector<Permutation> out;
    out.reserve(count);
    std::vector<int> chosen;
    std::vector<bool> used(std::size_t(n) + 1, false);
    // depth-first enumeration of injections {1..m} -> {1..n}, lexicographic
    std::function<void()> rec = [&]() {
        if (int(chosen.size()) == m) {
            std::vector<int> img(static_cast<std::size_t>(n));
            for (int j = 1; j <= m; ++j) img[std::size_t(j) - 1] = chosen[std::size_t(j) - 1];
            int fill = m;
            for (int v = 1; v <= n; ++v)
                if (!used[std::size_t(v)]) img[std::size_t(fill++)] = v;
            out.push_back(Permutation::from_image(std::move(img)));
            return;
        }
        for (int v = 1; v <= n; ++v) {
            if (used[std::size_t(v)]) continue;
            used[std::size_t(v)] = true;
            chosen.push_back(v);
            rec();
            chosen.pop_back();
            used[std::size_t(v)] = false;
        }
    };
    rec();
    return out;
}

Mat symmetrize_operator(const CarContext& ctx, const Mat& a) {
    ctx.check_dim(a);
    int n = ctx.modes();
    int m = ctx.initial_support(a);
    auto reps = conjugation_representatives(n, m, std::size_t(1) << 22);
    Mat sum = pairwise_reduce<Mat>(reps.size(), [&](std::size_t i) {
        return second_quantize(reps[i]).conjugate(a);
    });
    return sum / double(reps.size());
}

SampledOperatorAverage symmetrize_operator_sampled(const CarContext& ctx, const Mat& a,
                                                   int samples, std::uint64_t seed) {
    ctx.check_dim(a);
    if (samples < 2) throw std::invalid_argument("sampled average needs >= 2 samples");
    int n = ctx.modes();
    SplitMix64 rng(seed);
    std::vector<Mat> terms;
    terms.reserve(std::size_t(samples));
    std::vector<int> img(static_cast<std::size_t>(n));
    for (int s = 0; s < samples; ++s) {
        std::iota(img.begin(), img.end(), 1);
        for (int i = n - 1; i > 0; --i)  // Fisher-Yates
            std::swap(img[std::size_t(i)], img[std::size_t(rng.below(std::uint64_t(i) + 1))]);
        terms.push_back(second_quantize(Permutation::from_image(img)).conjugate(a));
    }
    Mat mean = pairwise_reduce<Mat>(terms.size(), [&](std::size_t i) { return terms[i]; }) /
               double(samples);
    double variance = 0.0;
    for (const Mat& t : terms) variance += (t - mean).squaredNorm();
    variance /= double(samples - 1);
    return {std::move(mean), std::sqrt(variance / double(samples)), samples, seed};
}

Permutation mixing_permutation(int stage, int n) {
    if (stage < 1) throw std::invalid_argument("mixing_permutation: stage must be >= 1");
    if (stage >= 31 || (Eigen::Index(1) << stage) > n)
        throw capacity_error("mixing_permutation: 2^m exceeds the available modes");
    int half = 1 << (stage - 1);
    std::vector<int> img(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        int v = k;
        if (k <= half)
            v = k + half;
        else if (k <= 2 * half)
            v = k - half;
        img[std::size_t(k) - 1] = v;
    }
    return Permutation::from_image(std::move(img));
}

IntersectingFraction intersecting_fraction(int m, int k, int big_n) {
    if (m < 1 || k < 1 || m >= big_n || k >= big_n || m + k > big_n)
        throw std::invalid_argument(
            "intersecting_fraction: need 1 <= m,k < N and m + k <= N");
    double estimate = double(m) * double(k) / double(big_n);
    double exact;
    if (big_n <= 20) {
        // A/N! = Π_{i<k} (N-m-i)/(N-i), exact in 64-bit integers
        std::uint64_t num = 1, den = 1;
        for (int i = 0; i < k; ++i) {
            num *= std::uint64_t(big_n - m - i);
            den *= std::uint64_t(big_n - i);
        }
        std::uint64_t g = std::gcd(num, den);
        exact = 1.0 - double(num / g) / double(den / g);
    } else {
        // same falling-factorial ratio, accumulated as factors in (0,1];
        // never overflows and keeps ~k*eps relative accuracy, which the
        // log-gamma route cannot (it loses |lgamma| * eps absolute)
        double ratio = 1.0;
        for (int i = 0; i < k; ++i)
            ratio *= double(big_n - m - i) / double(big_n - i);
        exact = 1.0 - ratio;
    }
    return {exact, estimate};
}

}  // namespace carfin
