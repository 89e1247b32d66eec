#include <nsff/field.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace nsff {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int g_fft_threads = 1;

void apply_fft_threads() {
#ifdef NSFF_FFTW_THREADS
    static bool inited = false;
    if (!inited) {
        fftw_init_threads();
        inited = true;
    }
    fftw_plan_with_nthreads(g_fft_threads > 0 ? g_fft_threads : 1);
#endif
}

}  // namespace

void fft_set_threads(int n) { g_fft_threads = n; }

void GridSpec::validate() const {
    if (d != 2 && d != 3) throw std::invalid_argument("GridSpec: d must be 2 or 3");
    if (!power_of_two(n) || n < 8) throw std::invalid_argument("GridSpec: n must be a power of two >= 8");
    if (!(L > 0.0)) throw std::invalid_argument("GridSpec: L must be positive");
    if (pad < 2) throw std::invalid_argument("GridSpec: pad must be >= 2");
}

std::size_t GridSpec::box_size() const {
    std::size_t s = 1;
    for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(n);
    return s;
}

std::size_t GridSpec::padded_size() const {
    std::size_t s = 1;
    for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(padded_n());
    return s;
}

std::size_t GridSpec::spectral_size() const {
    const std::size_t N = static_cast<std::size_t>(padded_n());
    std::size_t s = N / 2 + 1;
    for (int i = 0; i < d - 1; ++i) s *= N;
    return s;
}

bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.d == b.d && a.n == b.n && a.L == b.L && a.pad == b.pad;
}

RealBuf::RealBuf(std::size_t n) : n_(n) {
    p_ = static_cast<double*>(fftw_malloc(n * sizeof(double)));
    if (!p_) throw std::bad_alloc();
    std::memset(p_, 0, n * sizeof(double));
}

RealBuf::RealBuf(const RealBuf& o) : RealBuf(o.n_) {
    std::memcpy(p_, o.p_, n_ * sizeof(double));
}

RealBuf& RealBuf::operator=(const RealBuf& o) {
    if (this == &o) return *this;
    if (n_ != o.n_) {
        RealBuf tmp(o);
        std::swap(p_, tmp.p_);
        std::swap(n_, tmp.n_);
        return *this;
    }
    std::memcpy(p_, o.p_, n_ * sizeof(double));
    return *this;
}

RealBuf::RealBuf(RealBuf&& o) noexcept : p_(o.p_), n_(o.n_) {
    o.p_ = nullptr;
    o.n_ = 0;
}

RealBuf& RealBuf::operator=(RealBuf&& o) noexcept {
    std::swap(p_, o.p_);
    std::swap(n_, o.n_);
    return *this;
}

RealBuf::~RealBuf() {
    if (p_) fftw_free(p_);
}

void RealBuf::fill(double v) { std::fill(p_, p_ + n_, v); }

CplxBuf::CplxBuf(std::size_t n) : n_(n) {
    p_ = static_cast<fftw_complex*>(fftw_malloc(n * sizeof(fftw_complex)));
    if (!p_) throw std::bad_alloc();
    std::memset(p_, 0, n * sizeof(fftw_complex));
}

CplxBuf::CplxBuf(const CplxBuf& o) : CplxBuf(o.n_) {
    std::memcpy(p_, o.p_, n_ * sizeof(fftw_complex));
}

CplxBuf& CplxBuf::operator=(const CplxBuf& o) {
    if (this == &o) return *this;
    if (n_ != o.n_) {
        CplxBuf tmp(o);
        std::swap(p_, tmp.p_);
        std::swap(n_, tmp.n_);
        return *this;
    }
    std::memcpy(p_, o.p_, n_ * sizeof(fftw_complex));
    return *this;
}

CplxBuf::CplxBuf(CplxBuf&& o) noexcept : p_(o.p_), n_(o.n_) {
    o.p_ = nullptr;
    o.n_ = 0;
}

CplxBuf& CplxBuf::operator=(CplxBuf&& o) noexcept {
    std::swap(p_, o.p_);
    std::swap(n_, o.n_);
    return *this;
}

CplxBuf::~CplxBuf() {
    if (p_) fftw_free(p_);
}

void CplxBuf::fill(double v) {
    for (std::size_t i = 0; i < n_; ++i) p_[i][0] = p_[i][1] = v;
}

ScalarField::ScalarField(const GridSpec& g) : g_(g), v_(g.box_size()) {}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) m = std::max(m, std::fabs(v_[i]));
    return m;
}

double ScalarField::integral() const {
    double s = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) s += v_[i];
    return s * std::pow(g_.dx(), g_.d);
}

double ScalarField::l2() const {
    double s = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) s += v_[i] * v_[i];
    return std::sqrt(s * std::pow(g_.dx(), g_.d));
}

double ScalarField::l1() const {
    double s = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) s += std::fabs(v_[i]);
    return s * std::pow(g_.dx(), g_.d);
}

VectorField::VectorField(const GridSpec& g) : grid(g), comp(g.d, ScalarField(g)) {}

double VectorField::max_abs() const {
    double m = 0.0;
    for (const auto& c : comp) m = std::max(m, c.max_abs());
    return m;
}

FourierWorkspace::FourierWorkspace(const GridSpec& g) : g_(g) {
    g_.validate();
    N_ = g_.padded_n();
    apply_fft_threads();

    RealBuf scratch_r(g_.padded_size());
    CplxBuf scratch_c(g_.spectral_size());
    if (g_.d == 2) {
        fwd_ = fftw_plan_dft_r2c_2d(N_, N_, scratch_r.data(), scratch_c.data(), FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_2d(N_, N_, scratch_c.data(), scratch_r.data(), FFTW_ESTIMATE);
    } else {
        fwd_ = fftw_plan_dft_r2c_3d(N_, N_, N_, scratch_r.data(), scratch_c.data(), FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_3d(N_, N_, N_, scratch_c.data(), scratch_r.data(), FFTW_ESTIMATE);
    }
    if (!fwd_ || !bwd_) throw std::runtime_error("FourierWorkspace: fftw planning failed");

    const double dxi = pi / (g_.pad * g_.L);
    freq_.resize(N_);
    for (int k = 0; k < N_; ++k) freq_[k] = dxi * (k <= N_ / 2 ? k : k - N_);

    // Geometric window for the truncated free-space kernel: large enough to cover
    // box-to-window displacements, small enough that aliased copies miss the window.
    const double w_in = 0.55 * g_.L;
    trunc_R_ = 0.5 * (std::sqrt(2.0) * (g_.L + w_in) + (2.0 * g_.pad - 1.0) * g_.L - w_in);
}

FourierWorkspace::~FourierWorkspace() {
    if (fwd_) fftw_destroy_plan(fwd_);
    if (bwd_) fftw_destroy_plan(bwd_);
}

void FourierWorkspace::forward(const RealBuf& in, CplxBuf& out) const {
    fftw_execute_dft_r2c(fwd_, const_cast<double*>(in.data()), out.data());
}

void FourierWorkspace::backward(CplxBuf& in, RealBuf& out) const {
    fftw_execute_dft_c2r(bwd_, in.data(), out.data());
    const double scale = 1.0 / static_cast<double>(g_.padded_size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= scale;
}

std::array<int, 3> FourierWorkspace::spectral_index(std::size_t s) const {
    const int nc = N_ / 2 + 1;
    std::array<int, 3> k{0, 0, 0};
    if (g_.d == 2) {
        k[0] = static_cast<int>(s / nc);
        k[1] = static_cast<int>(s % nc);
    } else {
        k[2] = static_cast<int>(s % nc);
        std::size_t r = s / nc;
        k[1] = static_cast<int>(r % N_);
        k[0] = static_cast<int>(r / N_);
    }
    return k;
}

void FourierWorkspace::apply_heat(CplxBuf& f, double t) const {
    const int nc = N_ / 2 + 1;
    std::vector<double> ex(N_);
    for (int k = 0; k < N_; ++k) ex[k] = std::exp(-t * freq_[k] * freq_[k]);
    if (g_.d == 2) {
        std::size_t s = 0;
        for (int k0 = 0; k0 < N_; ++k0)
            for (int k1 = 0; k1 < nc; ++k1, ++s) {
                const double m = ex[k0] * ex[k1];
                f.re(s) *= m;
                f.im(s) *= m;
            }
    } else {
        std::size_t s = 0;
        for (int k0 = 0; k0 < N_; ++k0)
            for (int k1 = 0; k1 < N_; ++k1) {
                const double m01 = ex[k0] * ex[k1];
                for (int k2 = 0; k2 < nc; ++k2, ++s) {
                    const double m = m01 * ex[k2];
                    f.re(s) *= m;
                    f.im(s) *= m;
                }
            }
    }
}

void FourierWorkspace::apply_dealias(CplxBuf& f) const {
    const double cutoff = (2.0 / 3.0) * pi / g_.dx();
    const int nc = N_ / 2 + 1;
    std::vector<char> keep(N_);
    for (int k = 0; k < N_; ++k) keep[k] = std::fabs(freq_[k]) <= cutoff ? 1 : 0;
    if (g_.d == 2) {
        std::size_t s = 0;
        for (int k0 = 0; k0 < N_; ++k0)
            for (int k1 = 0; k1 < nc; ++k1, ++s)
                if (!(keep[k0] && keep[k1])) f.re(s) = f.im(s) = 0.0;
    } else {
        std::size_t s = 0;
        for (int k0 = 0; k0 < N_; ++k0)
            for (int k1 = 0; k1 < N_; ++k1)
                for (int k2 = 0; k2 < nc; ++k2, ++s)
                    if (!(keep[k0] && keep[k1] && keep[k2])) f.re(s) = f.im(s) = 0.0;
    }
}

void FourierWorkspace::apply_inv_neg_laplacian(CplxBuf& f) const {
    const std::size_t M = g_.spectral_size();
    for (std::size_t s = 0; s < M; ++s) {
        const auto k = spectral_index(s);
        double k2 = 0.0;
        for (int i = 0; i < g_.d; ++i) k2 += freq_[k[i]] * freq_[k[i]];
        if (k2 == 0.0) {
            f.re(s) = f.im(s) = 0.0;
        } else {
            f.re(s) /= k2;
            f.im(s) /= k2;
        }
    }
}

void FourierWorkspace::ensure_trunc_table() const {
    if (!trunc_tab_.empty()) return;
    const std::size_t M = g_.spectral_size();
    trunc_tab_.resize(M);
    const double R = trunc_R_;
    for (std::size_t s = 0; s < M; ++s) {
        const auto k = spectral_index(s);
        double k2 = 0.0;
        for (int i = 0; i < g_.d; ++i) k2 += freq_[k[i]] * freq_[k[i]];
        if (k2 == 0.0) {
            trunc_tab_[s] = (g_.d == 2) ? R * R * (0.25 - 0.5 * std::log(R)) : 0.5 * R * R;
            continue;
        }
        const double kk = std::sqrt(k2);
        if (g_.d == 2) {
            trunc_tab_[s] = (1.0 - std::cyl_bessel_j(0, kk * R)) / k2 -
                            R * std::log(R) * std::cyl_bessel_j(1, kk * R) / kk;
        } else {
            trunc_tab_[s] = (1.0 - std::cos(kk * R)) / k2;
        }
    }
}

void FourierWorkspace::apply_trunc_inv_neg_laplacian(CplxBuf& f) const {
    ensure_trunc_table();
    const std::size_t M = g_.spectral_size();
    for (std::size_t s = 0; s < M; ++s) {
        f.re(s) *= trunc_tab_[s];
        f.im(s) *= trunc_tab_[s];
    }
}

void FourierWorkspace::project(std::vector<CplxBuf>& f) const {
    const int d = g_.d;
    if (static_cast<int>(f.size()) != d)
        throw std::invalid_argument("project: component count does not match dimension");
    const std::size_t M = g_.spectral_size();
    for (std::size_t s = 0; s < M; ++s) {
        const auto k = spectral_index(s);
        double xi[3] = {0.0, 0.0, 0.0};
        double k2 = 0.0;
        for (int i = 0; i < d; ++i) {
            xi[i] = freq_[k[i]];
            k2 += xi[i] * xi[i];
        }
        if (k2 == 0.0) continue;
        double dot_re = 0.0, dot_im = 0.0;
        for (int i = 0; i < d; ++i) {
            dot_re += xi[i] * f[i].re(s);
            dot_im += xi[i] * f[i].im(s);
        }
        for (int i = 0; i < d; ++i) {
            f[i].re(s) -= xi[i] * dot_re / k2;
            f[i].im(s) -= xi[i] * dot_im / k2;
        }
    }
}

double FourierWorkspace::relative_divergence(const std::vector<CplxBuf>& f) const {
    const int d = g_.d;
    const std::size_t M = g_.spectral_size();
    double num = 0.0, den = 0.0;
    for (std::size_t s = 0; s < M; ++s) {
        const auto k = spectral_index(s);
        double xi[3] = {0.0, 0.0, 0.0};
        double k2 = 0.0;
        for (int i = 0; i < d; ++i) {
            xi[i] = freq_[k[i]];
            k2 += xi[i] * xi[i];
        }
        double dot_re = 0.0, dot_im = 0.0, amp = 0.0;
        for (int i = 0; i < d; ++i) {
            dot_re += xi[i] * f[i].re(s);
            dot_im += xi[i] * f[i].im(s);
            amp = std::max(amp, std::hypot(f[i].re(s), f[i].im(s)));
        }
        num = std::max(num, std::hypot(dot_re, dot_im));
        den = std::max(den, std::sqrt(k2) * amp);
    }
    return num / std::max(den, 1e-300);
}

void embed(const ScalarField& box, RealBuf& padded) {
    const GridSpec& g = box.grid();
    const int n = g.n, N = g.padded_n(), off = g.offset();
    if (padded.size() != g.padded_size()) padded = RealBuf(g.padded_size());
    padded.fill(0.0);
    if (g.d == 2) {
        for (int i = 0; i < n; ++i)
            std::memcpy(padded.data() + static_cast<std::size_t>(i + off) * N + off,
                        box.data() + static_cast<std::size_t>(i) * n, n * sizeof(double));
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                std::memcpy(padded.data() +
                                (static_cast<std::size_t>(i + off) * N + (j + off)) * N + off,
                            box.data() + (static_cast<std::size_t>(i) * n + j) * n,
                            n * sizeof(double));
    }
}

void crop(const GridSpec& g, const RealBuf& padded, ScalarField& box) {
    const int n = g.n, N = g.padded_n(), off = g.offset();
    if (!(box.grid() == g)) box = ScalarField(g);
    if (g.d == 2) {
        for (int i = 0; i < n; ++i)
            std::memcpy(box.data() + static_cast<std::size_t>(i) * n,
                        padded.data() + static_cast<std::size_t>(i + off) * N + off,
                        n * sizeof(double));
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                std::memcpy(box.data() + (static_cast<std::size_t>(i) * n + j) * n,
                            padded.data() +
                                (static_cast<std::size_t>(i + off) * N + (j + off)) * N + off,
                            n * sizeof(double));
    }
}

double padded_integral(const GridSpec& g, const RealBuf& padded) {
    double s = 0.0;
    for (std::size_t i = 0; i < padded.size(); ++i) s += padded[i];
    return s * std::pow(g.dx(), g.d);
}

double bilinear(const ScalarField& f, double x1, double x2) {
    const GridSpec& g = f.grid();
    if (g.d != 2) throw std::domain_error("bilinear: needs a 2-d field");
    const double h = g.dx(), lo = g.coord(0);
    const double s1 = (x1 - lo) / h, s2 = (x2 - lo) / h;
    if (s1 < 0.0 || s2 < 0.0 || s1 > g.n - 1 || s2 > g.n - 1)
        throw std::domain_error("bilinear: point outside the grid hull");
    int i = std::min(static_cast<int>(s1), g.n - 2);
    int j = std::min(static_cast<int>(s2), g.n - 2);
    const double a = s1 - i, b = s2 - j;
    return (1 - a) * (1 - b) * f.at(i, j) + a * (1 - b) * f.at(i + 1, j) +
           (1 - a) * b * f.at(i, j + 1) + a * b * f.at(i + 1, j + 1);
}

namespace detail {

ScalarField convolve_sampled_impl(const ScalarField& f, const std::vector<double>& wrap) {
    const GridSpec& g = f.grid();
    FourierWorkspace ws(g);
    RealBuf pf(g.padded_size());
    embed(f, pf);
    RealBuf pk(g.padded_size());
    std::memcpy(pk.data(), wrap.data(), wrap.size() * sizeof(double));

    CplxBuf F(g.spectral_size()), K(g.spectral_size());
    ws.forward(pf, F);
    ws.forward(pk, K);
    for (std::size_t s = 0; s < F.size(); ++s) {
        const double re = F.re(s) * K.re(s) - F.im(s) * K.im(s);
        const double im = F.re(s) * K.im(s) + F.im(s) * K.re(s);
        F.re(s) = re;
        F.im(s) = im;
    }
    ws.backward(F, pf);

    ScalarField out(g);
    crop(g, pf, out);
    const double scale = std::pow(g.dx(), g.d);
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= scale;
    return out;
}

}  // namespace detail

ScalarField heat_evolve(const ScalarField& f, double t) {
    if (t < 0.0) throw std::domain_error("heat_evolve: negative time");
    if (t == 0.0) return f;
    const GridSpec& g = f.grid();
    FourierWorkspace ws(g);
    RealBuf p(g.padded_size());
    embed(f, p);
    CplxBuf F(g.spectral_size());
    ws.forward(p, F);
    ws.apply_heat(F, t);
    ws.backward(F, p);
    ScalarField out(g);
    crop(g, p, out);
    return out;
}

}  // namespace nsff
