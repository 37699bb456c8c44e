// util.hpp
// Small shared numerics: finite-difference weights on arbitrary meshes,
// dense linear solves for the (tiny) Newton/Broyden systems, log-linear
// regression, a portable seeded Gaussian generator, and FNV-1a checksums.
#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgms {

// Fornberg weights for the m-th derivative at point x0 from nodes x.
// Returns w such that f^(m)(x0) ~= sum_i w[i] f(x[i]).
inline std::vector<double> fornberg_weights(double x0, std::span<const double> x, int m)
{
    const int n = static_cast<int>(x.size()) - 1;
    std::vector<double> c((n + 1) * (m + 1), 0.0);
    auto C = [&](int i, int j) -> double& { return c[i * (m + 1) + j]; };
    double c1 = 1.0, c4 = x[0] - x0;
    C(0, 0) = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0, c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    C(i, k) = c1 * (k * C(i - 1, k - 1) - c5 * C(i - 1, k)) / c2;
                C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k)
                C(j, k) = (c4 * C(j, k) - k * C(j, k - 1)) / c3;
            C(j, 0) = c4 * C(j, 0) / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n + 1);
    for (int i = 0; i <= n; ++i)
        w[i] = C(i, m);
    return w;
}

// In-place Gaussian elimination with partial pivoting; A is row-major n*n.
// Solves A x = b. Throws on (near-)singular systems.
inline std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b)
{
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col]))
                piv = r;
        if (std::abs(a[piv * n + col]) < 1e-300)
            throw std::runtime_error("solve_dense: singular matrix");
        if (piv != col) {
            for (int k = 0; k < n; ++k)
                std::swap(a[col * n + k], a[piv * n + k]);
            std::swap(b[col], b[piv]);
        }
        const double inv = 1.0 / a[col * n + col];
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] * inv;
            if (f == 0.0)
                continue;
            for (int k = col; k < n; ++k)
                a[r * n + k] -= f * a[col * n + k];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int k = r + 1; k < n; ++k)
            s -= a[r * n + k] * x[k];
        x[r] = s / a[r * n + r];
    }
    return x;
}

inline std::vector<double> invert_dense(const std::vector<double>& a, int n)
{
    std::vector<double> inv(n * n);
    for (int col = 0; col < n; ++col) {
        std::vector<double> e(n, 0.0);
        e[col] = 1.0;
        auto x = solve_dense(a, e);
        for (int r = 0; r < n; ++r)
            inv[r * n + col] = x[r];
    }
    return inv;
}

// 1-norm condition estimate from an explicit inverse.
inline double cond_from_inverse(const std::vector<double>& a, const std::vector<double>& ainv, int n)
{
    auto norm1 = [n](const std::vector<double>& m) {
        double best = 0.0;
        for (int c = 0; c < n; ++c) {
            double s = 0.0;
            for (int r = 0; r < n; ++r)
                s += std::abs(m[r * n + c]);
            best = std::max(best, s);
        }
        return best;
    };
    return norm1(a) * norm1(ainv);
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

inline LinearFit fit_line(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n)
        throw std::invalid_argument("fit_line: need >= 2 matching samples");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = (syy > 0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

// Deterministic Gaussian stream: mt19937_64 -> 53-bit uniforms -> Box-Muller.
// The construction is pinned so seeded runs reproduce bit-for-bit anywhere.
class NoiseGen {
public:
    explicit NoiseGen(std::uint64_t seed) : eng_(seed) {}

    double uniform()
    {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double gaussian()
    {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ull)
{
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s)
{
    return fnv1a64(s.data(), s.size());
}

} // namespace kgms
