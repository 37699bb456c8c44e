// fft.hpp
// FFTW-backed spectral workspace for one grid: r2c/c2r transforms, wavenumber
// tables, per-dimension 2/3 dealias mask, spectral derivatives and shifts.
// Plans use FFTW_ESTIMATE so plan choice (and hence roundoff) is reproducible.
#pragma once

#include <complex>
#include <fftw3.h>
#include <vector>

#include "kgms/field.hpp"

namespace kgms {

class SpectralWorkspace {
public:
    using cplx = std::complex<double>;

    explicit SpectralWorkspace(const Grid3& g) : grid_(g)
    {
        g.validate();
        nc_ = std::size_t(g.n[0]) * g.n[1] * (g.n[2] / 2 + 1);
        real_.resize(g.total());
        spec_ = static_cast<cplx*>(fftw_malloc(sizeof(cplx) * nc_));
        plan_fwd_ = fftw_plan_dft_r2c_3d(g.n[0], g.n[1], g.n[2], real_.data(),
                                         reinterpret_cast<fftw_complex*>(spec_), FFTW_ESTIMATE);
        plan_bwd_ = fftw_plan_dft_c2r_3d(g.n[0], g.n[1], g.n[2],
                                         reinterpret_cast<fftw_complex*>(spec_), real_.data(),
                                         FFTW_ESTIMATE);
        for (int d = 0; d < 3; ++d) {
            kax_[d].resize(g.n[d]);
            const double dk = 2.0 * M_PI / g.box[d];
            for (int i = 0; i < g.n[d]; ++i)
                kax_[d][i] = dk * (i <= g.n[d] / 2 ? i : i - g.n[d]);
        }
    }

    ~SpectralWorkspace()
    {
        fftw_destroy_plan(plan_fwd_);
        fftw_destroy_plan(plan_bwd_);
        fftw_free(spec_);
    }

    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    const Grid3& grid() const { return grid_; }
    std::size_t nc() const { return nc_; }

    void forward(const Field& f, std::vector<cplx>& out)
    {
        std::copy(f.v.begin(), f.v.end(), real_.begin());
        fftw_execute(plan_fwd_);
        out.assign(spec_, spec_ + nc_);
    }

    // Inverse transform with 1/N normalization.
    void backward(const std::vector<cplx>& in, Field& out)
    {
        std::copy(in.begin(), in.end(), spec_);
        fftw_execute(plan_bwd_);
        if (out.v.size() != real_.size())
            out = Field(grid_);
        const double inv = 1.0 / static_cast<double>(grid_.total());
        for (std::size_t i = 0; i < real_.size(); ++i)
            out.v[i] = real_[i] * inv;
    }

    double kx(int i) const { return kax_[0][i]; }
    double ky(int j) const { return kax_[1][j]; }
    double kz(int k) const { return kax_[2][k]; }

    // Iterate the r2c spectrum; fn(flat_index, kx, ky, kz).
    template <class Fn>
    void for_each_mode(Fn&& fn) const
    {
        const int n0 = grid_.n[0], n1 = grid_.n[1], n2h = grid_.n[2] / 2 + 1;
        std::size_t idx = 0;
        for (int i = 0; i < n0; ++i)
            for (int j = 0; j < n1; ++j)
                for (int k = 0; k < n2h; ++k, ++idx)
                    fn(idx, kax_[0][i], kax_[1][j], kax_[2][k]);
    }

    // Plancherel weight: number of real-space modes each r2c entry represents.
    double mode_weight(int k_index) const
    {
        return (k_index == 0 || k_index == grid_.n[2] / 2) ? 1.0 : 2.0;
    }

    // sum |f|^2 dx via the spectrum, with optional multiplier m(k^2).
    template <class Mult>
    double spectral_quadratic(const std::vector<cplx>& f, Mult&& m) const
    {
        const int n2h = grid_.n[2] / 2 + 1;
        double s = 0.0;
        std::size_t idx = 0;
        const int n0 = grid_.n[0], n1 = grid_.n[1];
        for (int i = 0; i < n0; ++i)
            for (int j = 0; j < n1; ++j)
                for (int k = 0; k < n2h; ++k, ++idx) {
                    const double k2 = kax_[0][i] * kax_[0][i] + kax_[1][j] * kax_[1][j] + kax_[2][k] * kax_[2][k];
                    s += mode_weight(k) * m(k2) * std::norm(f[idx]);
                }
        // |f_hat|^2 carries N^2; L^2 integral is dV/N * sum.
        return s * grid_.cell_volume() / static_cast<double>(grid_.total());
    }

    // Zero every mode with |k_d| > 2/3 k_max_d in any dimension.
    void dealias(std::vector<cplx>& f) const
    {
        const Grid3& g = grid_;
        const double c0 = (2.0 / 3.0) * M_PI / g.dx(0);
        const double c1 = (2.0 / 3.0) * M_PI / g.dx(1);
        const double c2 = (2.0 / 3.0) * M_PI / g.dx(2);
        for_each_mode([&](std::size_t idx, double kx_, double ky_, double kz_) {
            if (std::abs(kx_) > c0 || std::abs(ky_) > c1 || std::abs(kz_) > c2)
                f[idx] = 0.0;
        });
    }

    void gradient(const Field& f, Field out[3])
    {
        std::vector<cplx> fh;
        forward(f, fh);
        std::vector<cplx> gh(nc_);
        for (int d = 0; d < 3; ++d) {
            for_each_mode([&](std::size_t idx, double kx_, double ky_, double kz_) {
                const double k = (d == 0) ? kx_ : (d == 1) ? ky_ : kz_;
                gh[idx] = cplx(0.0, k) * fh[idx];
            });
            // Nyquist derivative mode is dropped (its i*k counterpart is not representable).
            backward(gh, out[d]);
        }
    }

    void laplacian(const Field& f, Field& out)
    {
        std::vector<cplx> fh;
        forward(f, fh);
        for_each_mode([&](std::size_t idx, double kx_, double ky_, double kz_) {
            fh[idx] *= -(kx_ * kx_ + ky_ * ky_ + kz_ * kz_);
        });
        backward(fh, out);
    }

    // translate(f, s)(x) = f(x - s) on the torus (exact for the sampled band).
    void translate(Field& f, const std::array<double, 3>& s)
    {
        std::vector<cplx> fh;
        forward(f, fh);
        for_each_mode([&](std::size_t idx, double kx_, double ky_, double kz_) {
            const double ph = kx_ * s[0] + ky_ * s[1] + kz_ * s[2];
            fh[idx] *= cplx(std::cos(ph), -std::sin(ph));
        });
        backward(fh, f);
    }

private:
    Grid3 grid_;
    std::size_t nc_ = 0;
    std::vector<double> real_;
    cplx* spec_ = nullptr;
    fftw_plan plan_fwd_{};
    fftw_plan plan_bwd_{};
    std::array<std::vector<double>, 3> kax_;
};

} // namespace kgms
