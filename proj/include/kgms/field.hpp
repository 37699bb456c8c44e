// field.hpp
// Periodic 3D grid, real scalar fields on it, and the two-component state
// (psi, psi_t) that lives in the discrete energy space H^1 x L^2.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace kgms {

struct Grid3 {
    std::array<int, 3> n{64, 64, 64};       // points per dimension (powers of two)
    std::array<double, 3> box{25.6, 25.6, 25.6};

    std::size_t total() const { return std::size_t(n[0]) * n[1] * n[2]; }
    double dx(int d) const { return box[d] / n[d]; }
    double cell_volume() const { return dx(0) * dx(1) * dx(2); }

    std::size_t index(int i, int j, int k) const
    {
        return (std::size_t(i) * n[1] + j) * n[2] + k;
    }

    // Coordinate of node i along dimension d, in [-box/2, box/2).
    double coord(int i, int d) const { return -0.5 * box[d] + i * dx(d); }

    // Shortest signed displacement a-b on the torus, per component.
    double wrap(double v, int d) const
    {
        const double L = box[d];
        v = std::fmod(v, L);
        if (v > 0.5 * L) v -= L;
        if (v < -0.5 * L) v += L;
        return v;
    }

    bool operator==(const Grid3& o) const { return n == o.n && box == o.box; }

    void validate() const
    {
        for (int d = 0; d < 3; ++d) {
            if (n[d] < 2 || (n[d] & (n[d] - 1)) != 0)
                throw std::invalid_argument("Grid3: dims must be powers of two");
            if (!(box[d] > 0))
                throw std::invalid_argument("Grid3: box lengths must be positive");
        }
    }
};

struct Field {
    Grid3 grid;
    std::vector<double> v;

    Field() = default;
    explicit Field(const Grid3& g, double fill = 0.0) : grid(g), v(g.total(), fill) {}

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    std::size_t size() const { return v.size(); }
};

struct FieldPair {
    Grid3 grid;
    Field psi1;
    Field psi2;

    FieldPair() = default;
    explicit FieldPair(const Grid3& g) : grid(g), psi1(g), psi2(g) {}

    bool finite() const
    {
        for (double x : psi1.v)
            if (!std::isfinite(x)) return false;
        for (double x : psi2.v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

inline void check_same_grid(const FieldPair& a, const FieldPair& b)
{
    if (!(a.grid == b.grid))
        throw std::invalid_argument("FieldPair: grid mismatch");
}

// Discrete L^2 x L^2 pairing <a,b> = sum (a1 b1 + a2 b2) dV.
inline double pair(const FieldPair& a, const FieldPair& b)
{
    check_same_grid(a, b);
    double s = 0.0;
    const std::size_t n = a.psi1.size();
    for (std::size_t i = 0; i < n; ++i)
        s += a.psi1[i] * b.psi1[i] + a.psi2[i] * b.psi2[i];
    return s * a.grid.cell_volume();
}

inline double l2_norm(const FieldPair& a) { return std::sqrt(pair(a, a)); }

inline void axpy(FieldPair& y, double c, const FieldPair& x)
{
    check_same_grid(y, x);
    const std::size_t n = y.psi1.size();
    for (std::size_t i = 0; i < n; ++i) {
        y.psi1[i] += c * x.psi1[i];
        y.psi2[i] += c * x.psi2[i];
    }
}

inline void scale(FieldPair& y, double c)
{
    for (auto& x : y.psi1.v) x *= c;
    for (auto& x : y.psi2.v) x *= c;
}

} // namespace kgms
