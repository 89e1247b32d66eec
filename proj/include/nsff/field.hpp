#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <fftw3.h>

#include <nsff/defs.hpp>

namespace nsff {

/// Uniform cell-centered grid on [-L,L]^d with a zero-padding factor for linear convolution.
struct GridSpec {
    int d = 2;
    int n = 256;
    double L = 32.0;
    int pad = 2;

    /// Throws std::invalid_argument unless d in {2,3}, n a power of two >= 8, L > 0, pad >= 2.
    void validate() const;

    double dx() const { return 2.0 * L / n; }
    /// Cell center i of the box lattice, i in [0, n).
    double coord(int i) const { return -L + (i + 0.5) * dx(); }
    /// Cell center i of the padded lattice, i in [0, pad*n).
    double padded_coord(int i) const { return -pad * L + (i + 0.5) * dx(); }
    int padded_n() const { return pad * n; }
    /// Index offset of box cell 0 inside the padded lattice (per axis).
    int offset() const { return (pad - 1) * n / 2; }
    std::size_t box_size() const;
    std::size_t padded_size() const;
    /// Number of complex entries of the padded real-to-complex transform.
    std::size_t spectral_size() const;
};

bool operator==(const GridSpec& a, const GridSpec& b);

/// Real array in fftw-aligned storage.
class RealBuf {
public:
    RealBuf() = default;
    explicit RealBuf(std::size_t n);
    RealBuf(const RealBuf& o);
    RealBuf& operator=(const RealBuf& o);
    RealBuf(RealBuf&& o) noexcept;
    RealBuf& operator=(RealBuf&& o) noexcept;
    ~RealBuf();

    double* data() { return p_; }
    const double* data() const { return p_; }
    double& operator[](std::size_t i) { return p_[i]; }
    double operator[](std::size_t i) const { return p_[i]; }
    std::size_t size() const { return n_; }
    void fill(double v);

private:
    double* p_ = nullptr;
    std::size_t n_ = 0;
};

/// Complex array in fftw-aligned storage.
class CplxBuf {
public:
    CplxBuf() = default;
    explicit CplxBuf(std::size_t n);
    CplxBuf(const CplxBuf& o);
    CplxBuf& operator=(const CplxBuf& o);
    CplxBuf(CplxBuf&& o) noexcept;
    CplxBuf& operator=(CplxBuf&& o) noexcept;
    ~CplxBuf();

    fftw_complex* data() { return p_; }
    const fftw_complex* data() const { return p_; }
    double& re(std::size_t i) { return p_[i][0]; }
    double& im(std::size_t i) { return p_[i][1]; }
    double re(std::size_t i) const { return p_[i][0]; }
    double im(std::size_t i) const { return p_[i][1]; }
    std::size_t size() const { return n_; }
    void fill(double v);

private:
    fftw_complex* p_ = nullptr;
    std::size_t n_ = 0;
};

/// Scalar samples on the box lattice, row-major with x1 the slowest index.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const GridSpec& g);

    const GridSpec& grid() const { return g_; }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    std::size_t size() const { return v_.size(); }

    double& at(int i, int j) { return v_[static_cast<std::size_t>(i) * g_.n + j]; }
    double at(int i, int j) const { return v_[static_cast<std::size_t>(i) * g_.n + j]; }
    double& at(int i, int j, int k) {
        return v_[(static_cast<std::size_t>(i) * g_.n + j) * g_.n + k];
    }
    double at(int i, int j, int k) const {
        return v_[(static_cast<std::size_t>(i) * g_.n + j) * g_.n + k];
    }

    double max_abs() const;
    /// dx^d * sum of samples.
    double integral() const;
    /// sqrt(dx^d * sum of squares).
    double l2() const;
    double l1() const;

private:
    GridSpec g_;
    RealBuf v_;
};

/// Velocity (or any vector) field on the box lattice with a timestamp.
struct VectorField {
    GridSpec grid;
    double time = 0.0;
    std::vector<ScalarField> comp;

    VectorField() = default;
    explicit VectorField(const GridSpec& g);
    double max_abs() const;
};

/// FFT plans, wavenumber tables, and spectral operators for one padded grid shape.
/// Transforms are single-threaded unless fft_set_threads was called first.
class FourierWorkspace {
public:
    explicit FourierWorkspace(const GridSpec& g);
    ~FourierWorkspace();
    FourierWorkspace(const FourierWorkspace&) = delete;
    FourierWorkspace& operator=(const FourierWorkspace&) = delete;

    const GridSpec& grid() const { return g_; }

    /// Padded real -> spectral; input preserved.
    void forward(const RealBuf& in, CplxBuf& out) const;
    /// Spectral -> padded real, normalized; the spectral input is clobbered.
    void backward(CplxBuf& in, RealBuf& out) const;

    /// Signed physical wavenumber of index k along any axis.
    double xi(int k) const { return freq_[k]; }

    void apply_heat(CplxBuf& f, double t) const;
    /// Zero all modes with any |xi| above 2/3 of the box Nyquist pi/dx.
    void apply_dealias(CplxBuf& f) const;
    /// Plain torus (-Laplace)^{-1}; the zero mode is set to zero.
    void apply_inv_neg_laplacian(CplxBuf& f) const;
    /// Free-space (-Laplace)^{-1} by truncated-kernel multiplier; exact in the
    /// analysis window for sources concentrated in the box.
    void apply_trunc_inv_neg_laplacian(CplxBuf& f) const;
    /// Plain spectral Leray projection; the zero mode passes through unchanged.
    void project(std::vector<CplxBuf>& f) const;

    /// Truncation radius of the free-space kernel, in physical units.
    double trunc_radius() const { return trunc_R_; }

    /// max_k |xi . f(k)| / max(max_k |xi| |f(k)|, floor) over spectral entries.
    double relative_divergence(const std::vector<CplxBuf>& f) const;

    /// Per-axis integer indices of spectral entry s (last axis is the halved one).
    std::array<int, 3> spectral_index(std::size_t s) const;

private:
    void ensure_trunc_table() const;

    GridSpec g_;
    int N_ = 0;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
    std::vector<double> freq_;
    mutable std::vector<double> trunc_tab_;
    double trunc_R_ = 0.0;
};

/// Request FFTW threading for subsequently created workspaces (1 = serial, default).
void fft_set_threads(int n);

/// Copy a box field into the centered slot of a zero-filled padded array.
void embed(const ScalarField& box, RealBuf& padded);
/// Extract the centered box window from a padded array.
void crop(const GridSpec& g, const RealBuf& padded, ScalarField& box);

/// dx^d * sum over the padded array.
double padded_integral(const GridSpec& g, const RealBuf& padded);

/// Bilinear interpolation of a 2-d box field at a physical point; throws outside the grid hull.
double bilinear(const ScalarField& f, double x1, double x2);

/// Linear convolution f * kernel evaluated on the box, using zero padding and
/// vertex-lattice kernel samples; kernel(z) takes the displacement vector.
template <class Kernel>
ScalarField convolve_sampled(const ScalarField& f, Kernel&& kernel);

/// Free-space heat semigroup applied to a box field through the padded transform.
ScalarField heat_evolve(const ScalarField& f, double t);

namespace detail {
ScalarField convolve_sampled_impl(const ScalarField& f, const std::vector<double>& wrap);
}  // namespace detail

template <class Kernel>
ScalarField convolve_sampled(const ScalarField& f, Kernel&& kernel) {
    const GridSpec& g = f.grid();
    const int N = g.padded_n();
    std::vector<double> wrap(g.padded_size());
    const double h = g.dx();
    if (g.d == 2) {
        for (int a = 0; a < N; ++a) {
            int ma = (a < N / 2) ? a : a - N;
            for (int b = 0; b < N; ++b) {
                int mb = (b < N / 2) ? b : b - N;
                wrap[static_cast<std::size_t>(a) * N + b] = kernel(Vec3{ma * h, mb * h, 0.0});
            }
        }
    } else {
        for (int a = 0; a < N; ++a) {
            int ma = (a < N / 2) ? a : a - N;
            for (int b = 0; b < N; ++b) {
                int mb = (b < N / 2) ? b : b - N;
                for (int c = 0; c < N; ++c) {
                    int mc = (c < N / 2) ? c : c - N;
                    wrap[(static_cast<std::size_t>(a) * N + b) * N + c] =
                        kernel(Vec3{ma * h, mb * h, mc * h});
                }
            }
        }
    }
    return detail::convolve_sampled_impl(f, wrap);
}

}  // namespace nsff
