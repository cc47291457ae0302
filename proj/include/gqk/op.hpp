#pragma once

#include <functional>
#include <string>
#include <utility>

#include "gqk/grid.hpp"
#include "gqk/spin.hpp"

namespace gqk {

/// A linear map on states. Handles accept either representation and return a
/// state in the representation of their input. Unitary handles also carry the
/// inverse map so conjugations use the true operator inverse.
struct OperatorHandle {
    std::string name;
    bool hermitian = false;
    bool unitary = false;
    std::function<State(const State&)> apply_fn;
    std::function<State(const State&)> inverse_fn;  // set iff unitary

    State operator()(const State& psi) const { return apply_fn(psi); }

    State apply_inverse(const State& psi) const {
        if (!inverse_fn) throw std::logic_error("operator '" + name + "' has no inverse map");
        return inverse_fn(psi);
    }
};

namespace detail {

/// Wraps a position-space pointwise map f(site amplitudes) so the handle is
/// representation agnostic.
template <typename Fn>
State apply_in_rep(const State& psi, Rep natural, Fn&& fn) {
    const Rep orig = psi.rep;
    State work = ensure_rep(psi, natural);
    fn(work);
    return ensure_rep(work, orig);
}

}  // namespace detail

/// Multiplication by the lattice coordinate x_alpha (position representation).
inline OperatorHandle position_op(const GridSpec& g, const SpinSpec& s, int axis) {
    if (axis < 0 || axis > 2) throw std::invalid_argument("position_op: axis out of range");
    OperatorHandle h;
    h.name = "Q" + std::to_string(axis + 1);
    h.hermitian = true;
    h.apply_fn = [g, s, axis](const State& psi) {
        if (!(psi.grid == g) || !(psi.spin == s))
            throw std::invalid_argument("position_op: spec mismatch");
        return detail::apply_in_rep(psi, Rep::Position, [&](State& w) {
            const std::uint32_t n = w.grid.n();
            const std::uint32_t dim = w.dim();
            std::uint32_t idx[3];
            for (idx[2] = 0; idx[2] < n; ++idx[2])
                for (idx[1] = 0; idx[1] < n; ++idx[1])
                    for (idx[0] = 0; idx[0] < n; ++idx[0]) {
                        const double x = w.grid.x(idx[axis]);
                        const std::size_t base = w.index(idx[0], idx[1], idx[2], 0);
                        for (std::uint32_t sp = 0; sp < dim; ++sp) w.amp[base + sp] *= x;
                    }
        });
    };
    return h;
}

/// Spectral derivative: multiplication by k_alpha in the momentum
/// representation.
inline OperatorHandle momentum_op(const GridSpec& g, const SpinSpec& s, int axis) {
    if (axis < 0 || axis > 2) throw std::invalid_argument("momentum_op: axis out of range");
    OperatorHandle h;
    h.name = "P" + std::to_string(axis + 1);
    h.hermitian = true;
    h.apply_fn = [g, s, axis](const State& psi) {
        if (!(psi.grid == g) || !(psi.spin == s))
            throw std::invalid_argument("momentum_op: spec mismatch");
        return detail::apply_in_rep(psi, Rep::Momentum, [&](State& w) {
            const std::uint32_t n = w.grid.n();
            const std::uint32_t dim = w.dim();
            std::uint32_t idx[3];
            for (idx[2] = 0; idx[2] < n; ++idx[2])
                for (idx[1] = 0; idx[1] < n; ++idx[1])
                    for (idx[0] = 0; idx[0] < n; ++idx[0]) {
                        const double k = w.grid.k(idx[axis]);
                        const std::size_t base = w.index(idx[0], idx[1], idx[2], 0);
                        for (std::uint32_t sp = 0; sp < dim; ++sp) w.amp[base + sp] *= k;
                    }
        });
    };
    return h;
}

/// Boost generator G_alpha = mu Q_alpha.
inline OperatorHandle boost_generator(const GridSpec& g, const SpinSpec& s, int axis, double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("boost_generator: mu must be positive");
    OperatorHandle q = position_op(g, s, axis);
    OperatorHandle h;
    h.name = "G" + std::to_string(axis + 1);
    h.hermitian = true;
    h.apply_fn = [q, mu](const State& psi) { return scaled(q(psi), mu); };
    return h;
}

/// J_alpha = Q_beta P_gamma - Q_gamma P_beta + S_alpha for the cyclic triple
/// (alpha, beta, gamma); the spin part acts on the spin index only.
inline OperatorHandle angular_momentum_op(const GridSpec& g, const SpinSpec& s, int axis,
                                          const SpinMatrices& sm) {
    if (axis < 0 || axis > 2) throw std::invalid_argument("angular_momentum_op: axis");
    if (sm.two_s != s.two_s) throw std::invalid_argument("angular_momentum_op: spin mismatch");
    const int beta = (axis + 1) % 3;
    const int gamma = (axis + 2) % 3;
    const OperatorHandle qb = position_op(g, s, beta);
    const OperatorHandle qg = position_op(g, s, gamma);
    const OperatorHandle pb = momentum_op(g, s, beta);
    const OperatorHandle pg = momentum_op(g, s, gamma);
    const Mat smat = sm.s[axis];

    OperatorHandle h;
    h.name = "J" + std::to_string(axis + 1);
    h.hermitian = true;
    h.apply_fn = [qb, qg, pb, pg, smat, s](const State& psi) {
        State orbital = sub(qb(pg(psi)), qg(pb(psi)));
        if (s.dim() > 1) {
            const std::uint32_t dim = s.dim();
            State spinpart = psi;
            std::vector<cplx> tmp(dim);
            for (std::size_t site = 0; site < psi.amp.size(); site += dim) {
                for (std::uint32_t r = 0; r < dim; ++r) {
                    cplx acc{0.0, 0.0};
                    for (std::uint32_t c = 0; c < dim; ++c) acc += smat(r, c) * psi.amp[site + c];
                    tmp[r] = acc;
                }
                for (std::uint32_t r = 0; r < dim; ++r) spinpart.amp[site + r] = tmp[r];
            }
            return add(orbital, spinpart);
        }
        return orbital;
    };
    return h;
}

inline OperatorHandle identity_op() {
    OperatorHandle h;
    h.name = "1";
    h.hermitian = true;
    h.unitary = true;
    h.apply_fn = [](const State& psi) { return psi; };
    h.inverse_fn = h.apply_fn;
    return h;
}

/// (AB - BA) psi
inline State commutator_apply(const OperatorHandle& a, const OperatorHandle& b, const State& psi) {
    State ab = a(b(psi));
    State ba = b(a(psi));
    return sub(ab, ensure_rep(ba, ab.rep));
}

/// <psi|A psi>; requires a normalized state.
inline cplx expectation(const OperatorHandle& a, const State& psi) {
    if (std::fabs(norm(psi) - 1.0) > 1e-9)
        throw std::invalid_argument("expectation: state not normalized");
    State ap = a(psi);
    return inner_product(ensure_rep(psi, ap.rep), ap);
}

/// max over states of ||[A,B] psi - expected psi|| / ||psi||, with an
/// operator-valued or scalar expected commutator.
inline double commutator_residual(const OperatorHandle& a, const OperatorHandle& b,
                                  const OperatorHandle& expected,
                                  const std::vector<State>& states) {
    if (states.empty()) throw std::invalid_argument("commutator_residual: empty state list");
    double worst = 0.0;
    for (const State& psi : states) {
        State lhs = commutator_apply(a, b, psi);
        State rhs = ensure_rep(expected(psi), lhs.rep);
        worst = std::max(worst, norm(sub(lhs, rhs)) / norm(psi));
    }
    return worst;
}

inline double commutator_residual(const OperatorHandle& a, const OperatorHandle& b, cplx expected,
                                  const std::vector<State>& states) {
    OperatorHandle e;
    e.name = "scalar";
    e.apply_fn = [expected](const State& psi) { return scaled(psi, expected); };
    return commutator_residual(a, b, e, states);
}

/// max_{pairs} |<psi|A phi> - <A psi|phi>| over a deterministic set of state
/// pairs; the symmetry defect of a would-be Hermitian handle.
inline double hermiticity_residual(const OperatorHandle& a, const std::vector<State>& states) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < states.size(); i += 2) {
        const State& psi = states[i];
        const State& phi = states[i + 1];
        State aphi = a(phi);
        State apsi = a(psi);
        const cplx lhs = inner_product(ensure_rep(psi, aphi.rep), aphi);
        const cplx rhs = inner_product(ensure_rep(apsi, phi.rep), phi);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

}  // namespace gqk
