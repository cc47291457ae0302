#pragma once

#include <algorithm>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "gqk/core.hpp"
#include "gqk/fft.hpp"

namespace gqk {

/// Periodic position grid with n points per axis on [-L/2, L/2) and the
/// conjugate momentum lattice k_m = 2 pi m / L, m in [-n/2, n/2).
/// Dimensionless units with hbar = 1.
class GridSpec {
public:
    GridSpec() = default;

    GridSpec(std::uint32_t n, double box_length) : n_(n), length_(box_length) {
        if (!is_power_of_two(n) || n < 4)
            throw std::invalid_argument("GridSpec: n must be a power of two >= 4, got " +
                                        std::to_string(n));
        if (!(box_length > 0.0))
            throw std::invalid_argument("GridSpec: box length must be positive");
        plan_ = std::make_shared<const fft::Plan>(n);
    }

    std::uint32_t n() const { return n_; }
    double length() const { return length_; }
    double spacing() const { return length_ / static_cast<double>(n_); }
    double k_max() const { return pi * static_cast<double>(n_) / length_; }
    double k_step() const { return 2.0 * pi / length_; }
    std::size_t sites() const { return static_cast<std::size_t>(n_) * n_ * n_; }

    /// Lattice coordinate x_i = -L/2 + i * (L/n).
    double x(std::uint32_t i) const { return (static_cast<double>(i) - n_ / 2.0) * spacing(); }

    /// Momentum value of storage index i (FFT natural order: frequencies
    /// 0..n/2-1 then -n/2..-1).
    double k(std::uint32_t i) const {
        const auto m = static_cast<std::int64_t>(i) < n_ / 2 ? static_cast<std::int64_t>(i)
                                                             : static_cast<std::int64_t>(i) - n_;
        return 2.0 * pi * static_cast<double>(m) / length_;
    }

    /// Storage index of the wrapped lattice site nearest to position v;
    /// throws if v is not a lattice point within tol.
    std::uint32_t index_of(double v, double tol = 1e-9) const {
        const double raw = v / spacing() + n_ / 2.0;
        const double r = std::round(raw);
        if (std::fabs(raw - r) > tol)
            throw std::invalid_argument("GridSpec: value not on the lattice");
        auto i = static_cast<std::int64_t>(r) % static_cast<std::int64_t>(n_);
        if (i < 0) i += n_;
        return static_cast<std::uint32_t>(i);
    }

    bool on_lattice(double v, double tol = 1e-9) const {
        const double raw = v / spacing();
        return std::fabs(raw - std::round(raw)) <= tol;
    }

    const fft::Plan& plan() const { return *plan_; }

    bool operator==(const GridSpec& o) const { return n_ == o.n_ && length_ == o.length_; }

private:
    std::uint32_t n_ = 0;
    double length_ = 0.0;
    std::shared_ptr<const fft::Plan> plan_;
};

inline GridSpec make_grid(std::uint32_t n, double box_length) { return GridSpec(n, box_length); }

/// Internal spin degree of freedom C^{2s+1}.
struct SpinSpec {
    std::uint32_t two_s = 0;

    SpinSpec() = default;
    explicit SpinSpec(std::uint32_t ts) : two_s(ts) {}

    std::uint32_t dim() const { return two_s + 1; }
    double s() const { return two_s / 2.0; }
    bool operator==(const SpinSpec& o) const { return two_s == o.two_s; }
};

enum class Rep : std::uint8_t { Position = 0, Momentum = 1 };

/// Complex amplitude field over grid x spin. Flat layout: spin fastest, then
/// x1, then x2, then x3 outermost. Immutable by convention: operations return
/// fresh states.
struct State {
    GridSpec grid;
    SpinSpec spin;
    Rep rep = Rep::Position;
    std::vector<cplx> amp;

    State() = default;
    State(const GridSpec& g, const SpinSpec& s, Rep r = Rep::Position)
        : grid(g), spin(s), rep(r), amp(g.sites() * s.dim()) {}

    std::size_t size() const { return amp.size(); }
    std::uint32_t dim() const { return spin.dim(); }

    std::size_t index(std::uint32_t i1, std::uint32_t i2, std::uint32_t i3,
                      std::uint32_t sp = 0) const {
        const std::size_t n = grid.n();
        return ((static_cast<std::size_t>(i3) * n + i2) * n + i1) * spin.dim() + sp;
    }

    cplx& at(std::uint32_t i1, std::uint32_t i2, std::uint32_t i3, std::uint32_t sp = 0) {
        return amp[index(i1, i2, i3, sp)];
    }
    const cplx& at(std::uint32_t i1, std::uint32_t i2, std::uint32_t i3,
                   std::uint32_t sp = 0) const {
        return amp[index(i1, i2, i3, sp)];
    }
};

inline void require_compatible(const State& a, const State& b, const char* what) {
    if (!(a.grid == b.grid) || !(a.spin == b.spin))
        throw std::invalid_argument(std::string(what) + ": grid/spin spec mismatch");
    if (a.rep != b.rep)
        throw std::invalid_argument(std::string(what) + ": representation mismatch");
}

/// <psi|phi> with measure weight (L/n)^3, conjugate-linear in the first slot.
/// Momentum-representation states carry the same weight so the transforms
/// below are unitary for this product.
inline cplx inner_product(const State& psi, const State& phi) {
    require_compatible(psi, phi, "inner_product");
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < psi.amp.size(); ++i) acc += std::conj(psi.amp[i]) * phi.amp[i];
    const double w = psi.grid.spacing();
    return acc * (w * w * w);
}

inline double norm_sq(const State& psi) {
    double acc = 0.0;
    for (const cplx& v : psi.amp) acc += std::norm(v);
    const double w = psi.grid.spacing();
    return acc * (w * w * w);
}

inline double norm(const State& psi) { return std::sqrt(norm_sq(psi)); }

inline State& scale_inplace(State& psi, cplx c) {
    for (cplx& v : psi.amp) v *= c;
    return psi;
}

inline State scaled(State psi, cplx c) {
    scale_inplace(psi, c);
    return psi;
}

inline State normalized(State psi) {
    const double nn = norm(psi);
    if (nn < 1e-300) throw std::invalid_argument("normalized: zero state");
    return scaled(std::move(psi), 1.0 / nn);
}

inline State add(const State& a, const State& b) {
    require_compatible(a, b, "add");
    State out = a;
    for (std::size_t i = 0; i < out.amp.size(); ++i) out.amp[i] += b.amp[i];
    return out;
}

inline State sub(const State& a, const State& b) {
    require_compatible(a, b, "sub");
    State out = a;
    for (std::size_t i = 0; i < out.amp.size(); ++i) out.amp[i] -= b.amp[i];
    return out;
}

/// a += c*b
inline void axpy_inplace(State& a, cplx c, const State& b) {
    require_compatible(a, b, "axpy");
    for (std::size_t i = 0; i < a.amp.size(); ++i) a.amp[i] += c * b.amp[i];
}

namespace detail {

/// Applies the per-axis parity factor (-1)^{m1+m2+m3} that converts the
/// index-space DFT into the transform with kernel e^{-i k_m x_j} on the
/// centered lattices.
inline void apply_parity(State& s) {
    const std::size_t n = s.grid.n();
    const std::size_t dim = s.dim();
    for (std::size_t i3 = 0; i3 < n; ++i3)
        for (std::size_t i2 = 0; i2 < n; ++i2)
            for (std::size_t i1 = 0; i1 < n; ++i1) {
                if (((i1 + i2 + i3) & 1u) == 0) continue;
                const std::size_t base = ((i3 * n + i2) * n + i1) * dim;
                for (std::size_t sp = 0; sp < dim; ++sp) s.amp[base + sp] = -s.amp[base + sp];
            }
}

inline void fft3(State& s, bool forward) {
    const auto& plan = s.grid.plan();
    const std::size_t dim = s.dim();
    const std::size_t n = s.grid.n();
    fft::axis(s.amp, plan, dim, forward);
    fft::axis(s.amp, plan, dim * n, forward);
    fft::axis(s.amp, plan, dim * n * n, forward);
    const double scale = 1.0 / std::pow(static_cast<double>(n), 1.5);
    for (cplx& v : s.amp) v *= scale;
}

}  // namespace detail

/// Unitary map to the momentum representation:
/// psi~(k_m) = n^{-3/2} sum_j psi(x_j) e^{-i k_m . x_j}.
inline State to_momentum(const State& psi) {
    if (psi.rep != Rep::Position)
        throw std::invalid_argument("to_momentum: state already in momentum representation");
    State out = psi;
    detail::fft3(out, true);
    detail::apply_parity(out);
    out.rep = Rep::Momentum;
    return out;
}

inline State to_position(const State& psi) {
    if (psi.rep != Rep::Momentum)
        throw std::invalid_argument("to_position: state already in position representation");
    State out = psi;
    detail::apply_parity(out);
    detail::fft3(out, false);
    out.rep = Rep::Position;
    return out;
}

inline State ensure_rep(const State& psi, Rep r) {
    if (psi.rep == r) return psi;
    return r == Rep::Momentum ? to_momentum(psi) : to_position(psi);
}

/// Normalized Gaussian wave packet
///   psi(x) ~ exp(-|x-x0|^2 / (4 w^2)) exp(i p0.x) chi
/// Preconditions reject packets whose discretization would be meaningless:
/// unresolved width, momentum beyond half the Nyquist band, or tails touching
/// the box boundary.
inline State gaussian_packet(const GridSpec& g, const SpinSpec& s, const Vec3& x0, const Vec3& p0,
                             double width, const std::vector<cplx>& spinor) {
    if (spinor.size() != s.dim())
        throw std::invalid_argument("gaussian_packet: spinor length != 2s+1");
    if (width < 2.0 * g.spacing())
        throw std::invalid_argument("gaussian_packet: width below 2*spacing");
    if (p0.norm() > 0.5 * g.k_max())
        throw std::invalid_argument("gaussian_packet: |p0| exceeds k_max/2");
    for (int a = 0; a < 3; ++a)
        if (std::fabs(x0[a]) + 4.0 * width > 0.5 * g.length())
            throw std::invalid_argument("gaussian_packet: x0 +- 4*width leaves the box");

    State out(g, s, Rep::Position);
    const std::uint32_t n = g.n();
    const double inv4w2 = 1.0 / (4.0 * width * width);
    std::vector<cplx> ax1(n), ax2(n), ax3(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const double x = g.x(i);
        ax1[i] = std::exp(cplx(-(x - x0[0]) * (x - x0[0]) * inv4w2, p0[0] * x));
        ax2[i] = std::exp(cplx(-(x - x0[1]) * (x - x0[1]) * inv4w2, p0[1] * x));
        ax3[i] = std::exp(cplx(-(x - x0[2]) * (x - x0[2]) * inv4w2, p0[2] * x));
    }
    for (std::uint32_t i3 = 0; i3 < n; ++i3)
        for (std::uint32_t i2 = 0; i2 < n; ++i2) {
            const cplx f23 = ax2[i2] * ax3[i3];
            for (std::uint32_t i1 = 0; i1 < n; ++i1) {
                const cplx f = ax1[i1] * f23;
                for (std::uint32_t sp = 0; sp < s.dim(); ++sp)
                    out.at(i1, i2, i3, sp) = f * spinor[sp];
            }
        }
    return normalized(std::move(out));
}

inline State gaussian_packet(const GridSpec& g, const SpinSpec& s, const Vec3& x0, const Vec3& p0,
                             double width) {
    std::vector<cplx> spinor(s.dim(), cplx(0.0, 0.0));
    spinor[0] = 1.0;
    return gaussian_packet(g, s, x0, p0, width, spinor);
}

/// Rank-one projector D = |psi><psi| represented by its (unit) state.
struct RayProjector {
    State psi;

    explicit RayProjector(State s) : psi(std::move(s)) {
        if (std::fabs(norm(psi) - 1.0) > 1e-9)
            throw std::invalid_argument("RayProjector: state is not unit norm");
    }
};

/// Bargmann ray metric d = sqrt(2 (1 - |<psi1|psi2>|)); phase independent.
inline double ray_distance(const RayProjector& d1, const RayProjector& d2) {
    const double ov = std::abs(inner_product(d1.psi, d2.psi));
    return std::sqrt(std::max(0.0, 2.0 * (1.0 - ov)));
}

inline double ray_distance(const State& a, const State& b) {
    return ray_distance(RayProjector(a), RayProjector(b));
}

/// Seed-controlled band-limited test states: random superpositions of
/// Gaussian packets whose widths balance boundary decay against momentum
/// band-limitation, so spectral identities hold to near machine precision.
inline std::vector<State> make_test_states(const GridSpec& g, const SpinSpec& s,
                                           std::uint64_t seed, std::size_t count,
                                           std::size_t packets_per_state = 6) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const double x0_max = g.length() / 16.0;
    const double p0_max = g.k_max() / 12.0;
    const double d_x = 0.5 * g.length() - x0_max;
    const double d_k = g.k_max() - p0_max;
    const double w_star = std::sqrt(d_x / (2.0 * d_k));

    std::vector<State> out;
    out.reserve(count);
    for (std::size_t c = 0; c < count; ++c) {
        State acc(g, s, Rep::Position);
        for (std::size_t p = 0; p < packets_per_state; ++p) {
            const Vec3 x0{x0_max * unit(rng), x0_max * unit(rng), x0_max * unit(rng)};
            const Vec3 p0{p0_max * unit(rng), p0_max * unit(rng), p0_max * unit(rng)};
            const double w = w_star * (1.0 + 0.05 * unit(rng));
            std::vector<cplx> spinor(s.dim());
            for (auto& v : spinor) v = cplx(gauss(rng), gauss(rng));
            const cplx coef(gauss(rng), gauss(rng));
            axpy_inplace(acc, coef, gaussian_packet(g, s, x0, p0, w, spinor));
        }
        if (norm(acc) < 1e-8) {
            --c;  // nearly cancelling draw; try again
            continue;
        }
        out.push_back(normalized(std::move(acc)));
    }
    return out;
}

}  // namespace gqk
