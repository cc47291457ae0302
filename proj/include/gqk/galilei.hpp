#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gqk/op.hpp"
#include "gqk/rotation.hpp"

namespace gqk {

/// Galilean transformation without time translation: spatial shift a,
/// rotation (unit quaternion, exact-lattice flag when its matrix is a signed
/// permutation), and boost velocity u. Composition follows the semidirect
/// convention (a,R,u)(a',R',u') = (a + R a', R R', u + R u').
struct GroupElement {
    Vec3 a{};
    Quat q{};
    Vec3 u{};

    bool lattice_rotation() const { return lattice_matrix(q).has_value(); }

    static GroupElement identity() { return {}; }

    static GroupElement translation(const Vec3& a) {
        GroupElement g;
        g.a = a;
        return g;
    }

    static GroupElement boost(const Vec3& u) {
        GroupElement g;
        g.u = u;
        return g;
    }

    static GroupElement rotation(const Quat& q) {
        GroupElement g;
        g.q = q.normalized();
        return g;
    }
};

inline GroupElement compose(const GroupElement& g1, const GroupElement& g2) {
    GroupElement g;
    g.a = g1.a + g1.q.rotate(g2.a);
    g.q = (g1.q * g2.q).normalized();
    g.u = g1.u + g1.q.rotate(g2.u);
    return g;
}

inline GroupElement inverse(const GroupElement& g) {
    GroupElement h;
    h.q = g.q.conj();
    h.a = -h.q.rotate(g.a);
    h.u = -h.q.rotate(g.u);
    return h;
}

/// Max-abs distance between elements; the rotation part is compared as SO(3)
/// matrices so the two SU(2) lifts coincide.
inline double element_distance(const GroupElement& g1, const GroupElement& g2) {
    const auto m1 = g1.q.matrix();
    const auto m2 = g2.q.matrix();
    double dq = 0.0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) dq = std::max(dq, std::fabs(m1[r][c] - m2[r][c]));
    return std::max({(g1.a - g2.a).max_abs(), (g1.u - g2.u).max_abs(), dq});
}

/// Passive action on instantaneous positions: g(x) = R^{-1} x - R^{-1} a.
/// Boosts do not change the instantaneous position.
inline Vec3 act_on_point(const GroupElement& g, const Vec3& x) { return g.q.rotate_inv(x - g.a); }

/// Passive action on positions measured with delay t: subtracts u t.
inline Vec3 act_on_point_t(const GroupElement& g, const Vec3& x, double t) {
    return act_on_point(g, x) - g.u * t;
}

namespace detail {

inline void apply_position_phase(State& w, const Vec3& coef) {
    // multiply by exp(i coef . x)
    const std::uint32_t n = w.grid.n();
    const std::uint32_t dim = w.dim();
    std::array<std::vector<cplx>, 3> ph;
    for (int a = 0; a < 3; ++a) {
        ph[a].resize(n);
        for (std::uint32_t i = 0; i < n; ++i)
            ph[a][i] = std::exp(cplx(0.0, coef[a] * w.grid.x(i)));
    }
    for (std::uint32_t i3 = 0; i3 < n; ++i3)
        for (std::uint32_t i2 = 0; i2 < n; ++i2) {
            const cplx f23 = ph[1][i2] * ph[2][i3];
            for (std::uint32_t i1 = 0; i1 < n; ++i1) {
                const cplx f = ph[0][i1] * f23;
                const std::size_t base = w.index(i1, i2, i3, 0);
                for (std::uint32_t sp = 0; sp < dim; ++sp) w.amp[base + sp] *= f;
            }
        }
}

inline void apply_momentum_phase(State& w, const Vec3& shift) {
    // multiply by exp(-i k . shift)
    const std::uint32_t n = w.grid.n();
    const std::uint32_t dim = w.dim();
    std::array<std::vector<cplx>, 3> ph;
    for (int a = 0; a < 3; ++a) {
        ph[a].resize(n);
        for (std::uint32_t i = 0; i < n; ++i)
            ph[a][i] = std::exp(cplx(0.0, -shift[a] * w.grid.k(i)));
    }
    for (std::uint32_t i3 = 0; i3 < n; ++i3)
        for (std::uint32_t i2 = 0; i2 < n; ++i2) {
            const cplx f23 = ph[1][i2] * ph[2][i3];
            for (std::uint32_t i1 = 0; i1 < n; ++i1) {
                const cplx f = ph[0][i1] * f23;
                const std::size_t base = w.index(i1, i2, i3, 0);
                for (std::uint32_t sp = 0; sp < dim; ++sp) w.amp[base + sp] *= f;
            }
        }
}

/// Exact remap for a signed-permutation rotation: out(x) = L psi(R^{-1}x),
/// with the source index computed by integer arithmetic modulo n.
inline State rotate_lattice(const State& psi, const std::array<std::array<int, 3>, 3>& m,
                            const Mat& rotor) {
    State src = ensure_rep(psi, Rep::Position);
    State out(src.grid, src.spin, Rep::Position);
    const std::int64_t n = src.grid.n();
    const std::int64_t h = n / 2;
    const std::uint32_t dim = src.dim();
    std::vector<cplx> tmp(dim);
    for (std::int64_t i3 = 0; i3 < n; ++i3)
        for (std::int64_t i2 = 0; i2 < n; ++i2)
            for (std::int64_t i1 = 0; i1 < n; ++i1) {
                const std::int64_t c[3] = {i1 - h, i2 - h, i3 - h};
                std::int64_t j[3];
                for (int r = 0; r < 3; ++r) {
                    // R^{-1} = M^T for orthogonal M
                    std::int64_t v = m[0][r] * c[0] + m[1][r] * c[1] + m[2][r] * c[2];
                    v = (v + h) % n;
                    if (v < 0) v += n;
                    j[r] = v;
                }
                const std::size_t dst = out.index(static_cast<std::uint32_t>(i1),
                                                  static_cast<std::uint32_t>(i2),
                                                  static_cast<std::uint32_t>(i3), 0);
                const std::size_t from = src.index(static_cast<std::uint32_t>(j[0]),
                                                   static_cast<std::uint32_t>(j[1]),
                                                   static_cast<std::uint32_t>(j[2]), 0);
                if (dim == 1) {
                    out.amp[dst] = src.amp[from];
                } else {
                    for (std::uint32_t r = 0; r < dim; ++r) {
                        cplx acc{0.0, 0.0};
                        for (std::uint32_t cc = 0; cc < dim; ++cc)
                            acc += rotor(r, cc) * src.amp[from + cc];
                        tmp[r] = acc;
                    }
                    for (std::uint32_t r = 0; r < dim; ++r) out.amp[dst + r] = tmp[r];
                }
            }
    return ensure_rep(out, psi.rep);
}

/// Trilinear-interpolated remap for non-lattice rotations. Not exactly
/// unitary; callers measure the norm drift instead of assuming it.
inline State rotate_interpolated(const State& psi, const Quat& q, const Mat& rotor) {
    State src = ensure_rep(psi, Rep::Position);
    State out(src.grid, src.spin, Rep::Position);
    const std::uint32_t n = src.grid.n();
    const double dx = src.grid.spacing();
    const double half = 0.5 * src.grid.length();
    const std::uint32_t dim = src.dim();
    std::vector<cplx> interp(dim);
    for (std::uint32_t i3 = 0; i3 < n; ++i3)
        for (std::uint32_t i2 = 0; i2 < n; ++i2)
            for (std::uint32_t i1 = 0; i1 < n; ++i1) {
                const Vec3 x{src.grid.x(i1), src.grid.x(i2), src.grid.x(i3)};
                Vec3 y = q.rotate_inv(x);
                double f[3];
                std::uint32_t lo[3];
                for (int a = 0; a < 3; ++a) {
                    double r = (y[a] + half) / dx;  // fractional index
                    r -= std::floor(r / n) * n;     // wrap into [0, n)
                    const double fl = std::floor(r);
                    lo[a] = static_cast<std::uint32_t>(fl) % n;
                    f[a] = r - fl;
                }
                for (std::uint32_t sp = 0; sp < dim; ++sp) interp[sp] = cplx(0, 0);
                for (int c = 0; c < 8; ++c) {
                    const std::uint32_t j1 = (lo[0] + (c & 1)) % n;
                    const std::uint32_t j2 = (lo[1] + ((c >> 1) & 1)) % n;
                    const std::uint32_t j3 = (lo[2] + ((c >> 2) & 1)) % n;
                    const double wgt = ((c & 1) ? f[0] : 1 - f[0]) *
                                       (((c >> 1) & 1) ? f[1] : 1 - f[1]) *
                                       (((c >> 2) & 1) ? f[2] : 1 - f[2]);
                    const std::size_t from = src.index(j1, j2, j3, 0);
                    for (std::uint32_t sp = 0; sp < dim; ++sp)
                        interp[sp] += wgt * src.amp[from + sp];
                }
                const std::size_t dst = out.index(i1, i2, i3, 0);
                if (dim == 1) {
                    out.amp[dst] = interp[0];
                } else {
                    for (std::uint32_t r = 0; r < dim; ++r) {
                        cplx acc{0, 0};
                        for (std::uint32_t cc = 0; cc < dim; ++cc) acc += rotor(r, cc) * interp[cc];
                        out.amp[dst + r] = acc;
                    }
                }
            }
    return ensure_rep(out, psi.rep);
}

}  // namespace detail

struct UnitaryOptions {
    bool allow_interpolated_rotation = false;
    bool allow_nonquantized_boost = false;
};

/// Whether each boost component is an integer multiple of the torus quantum
/// 2 pi / (mu L), which makes exp(i mu u.x) exactly periodic.
inline bool boost_is_quantized(const GridSpec& g, double mu, const Vec3& u, double tol = 1e-9) {
    for (int a = 0; a < 3; ++a) {
        const double quanta = mu * u[a] * g.length() / (2.0 * pi);
        if (std::fabs(quanta - std::round(quanta)) > tol) return false;
    }
    return true;
}

/// The concrete unitary U_g = B(u) T(a) Lambda(R):
///   Lambda(R) psi(x) = L_R psi(R^{-1} x)   (grid remap + spin rotor)
///   T(a): momentum-space phase e^{-i k.a}
///   B(u): position-space phase e^{i mu u.x}
/// so that (U_g psi)(x) = e^{i mu u.x} L_R psi(R^{-1}x - R^{-1}a) and the
/// imprimitivity relation holds for every Euclidean element.
inline OperatorHandle unitary(const GroupElement& g, double mu, const GridSpec& grid,
                              const SpinSpec& spin, const SpinMatrices& sm,
                              UnitaryOptions opt = {}) {
    if (sm.two_s != spin.two_s) throw std::invalid_argument("unitary: spin matrices mismatch");
    const bool has_rot = !g.q.approx_rotation_identity(1e-14);
    const auto lat = lattice_matrix(g.q);
    if (has_rot && !lat && !opt.allow_interpolated_rotation)
        throw std::invalid_argument(
            "unitary: non-lattice rotation requires allow_interpolated_rotation");
    if (!boost_is_quantized(grid, mu, g.u) && !opt.allow_nonquantized_boost)
        throw std::invalid_argument(
            "unitary: boost not quantized to 2 pi k/(mu L); set allow_nonquantized_boost to "
            "accept boundary wrap");

    double theta;
    Vec3 axis;
    g.q.axis_angle(theta, axis);
    const Mat rotor = spin_rotor(sm, theta, axis);
    const bool exact = !has_rot || lat.has_value();

    auto apply_dir = [g, mu, grid, spin, rotor, lat, has_rot](const State& psi, bool forward) {
        if (!(psi.grid == grid) || !(psi.spin == spin))
            throw std::invalid_argument("unitary: spec mismatch");
        const Rep orig = psi.rep;
        State w = psi;
        auto rotate = [&](const State& st, bool fwd) {
            const Mat r = fwd ? rotor : Mat(rotor.adjoint());
            if (lat) {
                auto m = *lat;
                if (!fwd) {  // transpose = inverse signed permutation
                    decltype(m) mt{};
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j) mt[i][j] = m[j][i];
                    m = mt;
                }
                return detail::rotate_lattice(st, m, r);
            }
            return detail::rotate_interpolated(st, fwd ? g.q : g.q.conj(), r);
        };
        if (forward) {
            if (has_rot) w = rotate(w, true);
            if ((g.a).max_abs() > 0) {
                w = ensure_rep(w, Rep::Momentum);
                detail::apply_momentum_phase(w, g.a);
            }
            if ((g.u).max_abs() > 0) {
                w = ensure_rep(w, Rep::Position);
                detail::apply_position_phase(w, g.u * mu);
            }
        } else {
            if ((g.u).max_abs() > 0) {
                w = ensure_rep(w, Rep::Position);
                detail::apply_position_phase(w, g.u * (-mu));
            }
            if ((g.a).max_abs() > 0) {
                w = ensure_rep(w, Rep::Momentum);
                detail::apply_momentum_phase(w, -g.a);
            }
            if (has_rot) w = rotate(w, false);
        }
        return ensure_rep(w, orig);
    };

    OperatorHandle h;
    h.name = "U[g]";
    h.unitary = exact;
    h.apply_fn = [apply_dir](const State& psi) { return apply_dir(psi, true); };
    h.inverse_fn = [apply_dir](const State& psi) { return apply_dir(psi, false); };
    return h;
}

/// U A U^{-1} psi
inline State conjugate_apply(const OperatorHandle& u, const OperatorHandle& a, const State& psi) {
    return u(a(u.apply_inverse(psi)));
}

/// Multiplier sample sigma(g1, g2) with its defects.
struct Multiplier {
    cplx sigma{1.0, 0.0};
    double modulus_defect = 0.0;
    double state_dependence = 0.0;
};

/// Closed form of the multiplier for this realization's factor order:
/// sigma(g1, g2) = exp(i mu (R1 u2).a1).
inline cplx multiplier_exact(const GroupElement& g1, const GroupElement& g2, double mu) {
    return std::exp(iu * (mu * g1.q.rotate(g2.u).dot(g1.a)));
}

/// sigma = <U_{g1} U_{g2} psi | U_{g1 g2} psi> for a unit reference state;
/// a second reference state guards against accidental state dependence.
inline Multiplier multiplier_extract(const GroupElement& g1, const GroupElement& g2,
                                     const State& psi_ref, double mu, const SpinMatrices& sm,
                                     UnitaryOptions opt = {}) {
    if (std::fabs(norm(psi_ref) - 1.0) > 1e-9)
        throw std::invalid_argument("multiplier_extract: reference state not normalized");
    const GridSpec& g = psi_ref.grid;
    const SpinSpec& sp = psi_ref.spin;
    const OperatorHandle u1 = unitary(g1, mu, g, sp, sm, opt);
    const OperatorHandle u2 = unitary(g2, mu, g, sp, sm, opt);
    const OperatorHandle u12 = unitary(compose(g1, g2), mu, g, sp, sm, opt);

    auto extract = [&](const State& psi) {
        State lhs = u1(u2(psi));
        State rhs = u12(psi);
        return inner_product(lhs, ensure_rep(rhs, lhs.rep));
    };

    Multiplier m;
    m.sigma = extract(psi_ref);
    m.modulus_defect = std::fabs(1.0 - std::abs(m.sigma));

    // deterministic second reference: shift by one lattice spacing and one
    // boost quantum
    GroupElement shift;
    shift.a = {g.spacing(), 0.0, 0.0};
    shift.u = {2.0 * pi / (mu * g.length()), 0.0, 0.0};
    const State psi2 = unitary(shift, mu, g, sp, sm)(psi_ref);
    m.state_dependence = std::abs(extract(psi2) - m.sigma);

    if (m.modulus_defect > 1e-6)
        throw std::runtime_error("multiplier_extract: modulus defect above 1e-6; pair is not "
                                 "projectively consistent under the chosen conventions");
    return m;
}

/// Finite union of axis-aligned boxes on the torus; interval endpoints are
/// wrapped into [-L/2, L/2) with seam-crossing boxes split.
struct BoxRegion {
    struct Box {
        Vec3 lo;
        Vec3 hi;  // half-open [lo, hi) per axis
    };
    std::vector<Box> boxes;

    static BoxRegion single(const Vec3& lo, const Vec3& hi) {
        BoxRegion r;
        r.boxes.push_back({lo, hi});
        return r;
    }
};

/// Indicator of the region on the position lattice (1 byte per site).
/// Membership per axis is the wrapped half-open interval [lo, hi).
inline std::vector<std::uint8_t> region_indicator(const BoxRegion& region, const GridSpec& g) {
    const std::uint32_t n = g.n();
    const double L = g.length();
    std::vector<std::uint8_t> ind(g.sites(), 0);
    auto member = [&](double x, double lo, double hi) {
        const double span = hi - lo;
        if (span <= 0) return false;
        if (span >= L) return true;
        double rel = std::fmod(x - lo, L);
        if (rel < -1e-9) rel += L;
        return rel > -1e-9 && rel < span - 1e-9;
    };
    for (const auto& b : region.boxes) {
        for (std::uint32_t i3 = 0; i3 < n; ++i3)
            for (std::uint32_t i2 = 0; i2 < n; ++i2)
                for (std::uint32_t i1 = 0; i1 < n; ++i1) {
                    const bool in = member(g.x(i1), b.lo[0], b.hi[0]) &&
                                    member(g.x(i2), b.lo[1], b.hi[1]) &&
                                    member(g.x(i3), b.lo[2], b.hi[2]);
                    if (in) ind[(static_cast<std::size_t>(i3) * n + i2) * n + i1] = 1;
                }
    }
    return ind;
}

/// E(Delta): multiplication by the indicator in the position representation;
/// idempotent and Hermitian exactly.
inline OperatorHandle projection_E(const BoxRegion& region, const GridSpec& g,
                                   const SpinSpec& s) {
    auto ind = std::make_shared<const std::vector<std::uint8_t>>(region_indicator(region, g));
    OperatorHandle h;
    h.name = "E[Delta]";
    h.hermitian = true;
    h.apply_fn = [ind, g, s](const State& psi) {
        if (!(psi.grid == g) || !(psi.spin == s))
            throw std::invalid_argument("projection_E: spec mismatch");
        return detail::apply_in_rep(psi, Rep::Position, [&](State& w) {
            const std::uint32_t dim = w.dim();
            for (std::size_t site = 0; site < ind->size(); ++site) {
                if ((*ind)[site]) continue;
                const std::size_t base = site * dim;
                for (std::uint32_t sp = 0; sp < dim; ++sp) w.amp[base + sp] = cplx(0, 0);
            }
        });
    };
    return h;
}

inline OperatorHandle projection_from_indicator(std::vector<std::uint8_t> indv, const GridSpec& g,
                                                const SpinSpec& s) {
    auto ind = std::make_shared<const std::vector<std::uint8_t>>(std::move(indv));
    OperatorHandle h;
    h.name = "E[set]";
    h.hermitian = true;
    h.apply_fn = [ind, g, s](const State& psi) {
        if (!(psi.grid == g) || !(psi.spin == s))
            throw std::invalid_argument("projection: spec mismatch");
        return detail::apply_in_rep(psi, Rep::Position, [&](State& w) {
            const std::uint32_t dim = w.dim();
            for (std::size_t site = 0; site < ind->size(); ++site) {
                if ((*ind)[site]) continue;
                const std::size_t base = site * dim;
                for (std::uint32_t sp = 0; sp < dim; ++sp) w.amp[base + sp] = cplx(0, 0);
            }
        });
    };
    return h;
}

/// Exact image indicator of a region under the inverse passive action:
/// chi'(x) = chi(R^{-1}(x - a)), evaluated with integer lattice arithmetic.
inline std::vector<std::uint8_t> transform_indicator(const std::vector<std::uint8_t>& ind,
                                                     const GroupElement& g, const GridSpec& grid) {
    const auto lat = lattice_matrix(g.q);
    if (!lat) throw std::invalid_argument("transform_indicator: non-lattice rotation");
    std::int64_t s[3];
    for (int a = 0; a < 3; ++a) {
        if (!grid.on_lattice(g.a[a]))
            throw std::invalid_argument("transform_indicator: translation not on the lattice");
        s[a] = static_cast<std::int64_t>(std::llround(g.a[a] / grid.spacing()));
    }
    const std::int64_t n = grid.n();
    const std::int64_t h = n / 2;
    const auto& m = *lat;
    std::vector<std::uint8_t> out(ind.size(), 0);
    for (std::int64_t i3 = 0; i3 < n; ++i3)
        for (std::int64_t i2 = 0; i2 < n; ++i2)
            for (std::int64_t i1 = 0; i1 < n; ++i1) {
                const std::int64_t c[3] = {i1 - h - s[0], i2 - h - s[1], i3 - h - s[2]};
                std::int64_t j[3];
                for (int r = 0; r < 3; ++r) {
                    std::int64_t v = m[0][r] * c[0] + m[1][r] * c[1] + m[2][r] * c[2];
                    v = ((v + h) % n + n) % n;
                    j[r] = v;
                }
                const std::size_t src = (static_cast<std::size_t>(j[2]) * n + j[1]) * n + j[0];
                const std::size_t dst = (static_cast<std::size_t>(i3) * n + i2) * n + i1;
                out[dst] = ind[src];
            }
    return out;
}

/// max over states of ||(U_g E(Delta) U_g^{-1} - E(R Delta + a)) psi|| / ||psi||.
inline double imprimitivity_residual(const GroupElement& g, const BoxRegion& region,
                                     const std::vector<State>& states, double mu,
                                     const SpinMatrices& sm) {
    if (states.empty()) throw std::invalid_argument("imprimitivity_residual: empty state list");
    if (g.u.max_abs() > 0)
        throw std::invalid_argument("imprimitivity_residual: element must be Euclidean (u = 0)");
    const GridSpec& grid = states.front().grid;
    const SpinSpec& sp = states.front().spin;
    const auto ind = region_indicator(region, grid);
    const auto moved = transform_indicator(ind, g, grid);
    const OperatorHandle e0 = projection_from_indicator(ind, grid, sp);
    const OperatorHandle e1 = projection_from_indicator(moved, grid, sp);
    const OperatorHandle ug = unitary(g, mu, grid, sp, sm);
    double worst = 0.0;
    for (const State& psi : states) {
        State lhs = conjugate_apply(ug, e0, psi);
        State rhs = ensure_rep(e1(psi), lhs.rep);
        worst = std::max(worst, norm(sub(lhs, rhs)) / norm(psi));
    }
    return worst;
}

/// Sampled continuity diagnostic d(tau) = ray distance between the images of
/// a fixed ray under the path element and the base element; fits the
/// small-parameter behaviour of d.
struct ContinuityTable {
    std::vector<double> tau;
    std::vector<double> dist;
    LineFit loglog;  // d ~ C |tau - tau0|^slope near tau0
    double d_at_tau0 = 0.0;
};

inline ContinuityTable continuity_probe(const std::function<GroupElement(double)>& path,
                                        const RayProjector& ray, double tau0,
                                        const std::vector<double>& taus, double mu,
                                        const SpinMatrices& sm, UnitaryOptions opt = {}) {
    const GridSpec& g = ray.psi.grid;
    const SpinSpec& sp = ray.psi.spin;
    const State base = unitary(path(tau0), mu, g, sp, sm, opt)(ray.psi);
    ContinuityTable t;
    std::vector<double> dtau, dd;
    for (double tau : taus) {
        const State moved = unitary(path(tau), mu, g, sp, sm, opt)(ray.psi);
        const double d = ray_distance(normalized(moved), normalized(base));
        t.tau.push_back(tau);
        t.dist.push_back(d);
        if (std::fabs(tau - tau0) < 1e-15) {
            t.d_at_tau0 = d;
        } else if (d > 0) {
            dtau.push_back(std::fabs(tau - tau0));
            dd.push_back(d);
        }
    }
    t.loglog = fit_loglog(dtau, dd);
    return t;
}

}  // namespace gqk
