#pragma once

#include <cassert>
#include <memory>
#include <vector>

#include "gqk/core.hpp"

namespace gqk::fft {

/// Twiddle table e^{-2 pi i j / n} for j < n/2, shared by all transforms on
/// one grid. Built once at grid construction; read-only afterwards.
struct Plan {
    std::uint32_t n = 0;
    std::vector<cplx> twiddle;  // forward twiddles, size n/2

    explicit Plan(std::uint32_t n_) : n(n_), twiddle(n_ / 2) {
        for (std::uint32_t j = 0; j < n / 2; ++j) {
            const double ang = -2.0 * pi * static_cast<double>(j) / static_cast<double>(n);
            twiddle[j] = {std::cos(ang), std::sin(ang)};
        }
    }
};

/// In-place radix-2 DIT transform of a contiguous length-n line.
/// forward: sum_j a_j e^{-2 pi i m j / n}; inverse uses the conjugate kernel.
/// No normalization here.
inline void line(cplx* a, const Plan& plan, bool forward) {
    const std::uint32_t n = plan.n;
    // bit reversal
    for (std::uint32_t i = 1, j = 0; i < n; ++i) {
        std::uint32_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::uint32_t len = 2; len <= n; len <<= 1) {
        const std::uint32_t step = n / len;
        for (std::uint32_t i = 0; i < n; i += len) {
            for (std::uint32_t j = 0; j < len / 2; ++j) {
                cplx w = plan.twiddle[j * step];
                if (!forward) w = std::conj(w);
                const cplx u = a[i + j];
                const cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
            }
        }
    }
}

/// Strided transform over every length-n line along one axis of a flat array.
/// Lines sit at base = outer*stride*n + inner with elements base + m*stride;
/// they are gathered into a scratch buffer so the butterfly loop stays
/// contiguous.
inline void axis(std::vector<cplx>& data, const Plan& plan, std::size_t stride, bool forward) {
    const std::uint32_t n = plan.n;
    const std::size_t block = stride * n;
    assert(data.size() % block == 0);
    const std::size_t outer_count = data.size() / block;
    std::vector<cplx> scratch(n);
    for (std::size_t o = 0; o < outer_count; ++o) {
        const std::size_t obase = o * block;
        for (std::size_t in = 0; in < stride; ++in) {
            const std::size_t base = obase + in;
            if (stride == 1) {
                line(data.data() + base, plan, forward);
            } else {
                for (std::uint32_t m = 0; m < n; ++m) scratch[m] = data[base + m * stride];
                line(scratch.data(), plan, forward);
                for (std::uint32_t m = 0; m < n; ++m) data[base + m * stride] = scratch[m];
            }
        }
    }
}

}  // namespace gqk::fft
