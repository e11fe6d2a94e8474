#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "floqwire/errors.hpp"
#include "floqwire/evolve.hpp"
#include "floqwire/random.hpp"

// Pure fermionic Gaussian states as Majorana covariance matrices
// M_ab = <(i/2)[gamma_a, gamma_b]>, with Heisenberg evolution, correlation
// readout and projective parity measurement.

namespace floqwire {

constexpr double kPurityTolerance = 1e-8;

struct CovarianceState {
    Eigen::MatrixXd M;
    int n_sites = 0;
    int wires = 1;

    int dim() const { return static_cast<int>(M.rows()); }

    double antisymmetry_defect() const { return (M + M.transpose()).cwiseAbs().maxCoeff(); }

    // Pure states satisfy M M = -I.
    double purity_defect() const {
        return (M * M + Eigen::MatrixXd::Identity(dim(), dim())).cwiseAbs().maxCoeff();
    }

    void reantisymmetrize() { M = 0.5 * (M - M.transpose().eval()); }
};

// <i Gamma_v Gamma_w> = v^T M w for unit mode vectors.
inline double correlation(const CovarianceState& state, const Eigen::VectorXd& v,
                          const Eigen::VectorXd& w) {
    return v.dot(state.M * w);
}

inline CovarianceState evolve_state(const CovarianceState& state, const OrthogonalPropagator& prop) {
    if (prop.dim() != state.dim()) throw InputError("propagator/state dimension mismatch");
    CovarianceState out = state;
    out.M = prop.O * state.M * prop.O.transpose();
    return out;
}

// In-place variant used in period loops.
inline void evolve_state_inplace(CovarianceState& state, const Eigen::MatrixXd& o) {
    state.M = (o * state.M * o.transpose()).eval();
}

// ---------------------------------------------------------------------------
// Logical initialization

enum class LogicalLabel { s00, s01, s10, s11, plus };

inline const char* logical_label_name(LogicalLabel l) {
    switch (l) {
        case LogicalLabel::s00: return "00";
        case LogicalLabel::s01: return "01";
        case LogicalLabel::s10: return "10";
        case LogicalLabel::s11: return "11";
        case LogicalLabel::plus: return "+";
    }
    return "?";
}

namespace detail {

struct Pairing {
    Eigen::VectorXd v, w;
    double value;  // target <i Gamma_v Gamma_w>
};

// Occupations (n_left, n_pi, n_right) of the three edge fermions for the
// four basis states: |00> = |000>, |01> = |011>, |10> = |110>, |11> = |101>.
inline std::array<int, 3> edge_occupations(LogicalLabel l) {
    switch (l) {
        case LogicalLabel::s00: return {0, 0, 0};
        case LogicalLabel::s01: return {0, 1, 1};
        case LogicalLabel::s10: return {1, 1, 0};
        case LogicalLabel::s11: return {1, 0, 1};
        default: throw InputError("not a basis label");
    }
}

}  // namespace detail

// Pure covariance matrix realizing the requested logical state on the edge
// sector and filling every bulk Floquet mode at occupation zero, which makes
// the state stationary under the frozen drive.
inline CovarianceState init_logical(LogicalLabel label, const EdgeModeSet& modes,
                                    const OrthogonalPropagator& prop) {
    const int dim = prop.dim();
    if (modes.dim() != dim) throw IncompatibleModes("mode/propagator dimension mismatch");

    // The pinned subspaces of O must contain the supplied modes.
    for (int j = 0; j < 6; ++j) {
        double sign = (j < 4) ? 1.0 : -1.0;
        double res = (prop.O * modes.vectors.col(j) - sign * modes.vectors.col(j)).norm();
        if (res > 1e-4)
            throw IncompatibleModes("edge mode " + std::string(edge_mode_name(EdgeMode(j))) +
                                    " is not pinned by the propagator (residual " +
                                    std::to_string(res) + ")");
    }

    std::vector<detail::Pairing> pairs;
    auto mode = [&](EdgeMode m) { return modes.mode(m); };
    if (label == LogicalLabel::plus) {
        // Equal-weight superposition of |01> and |10>: left modes pair with
        // their right partners.
        pairs.push_back({mode(EdgeMode::zero1_left), mode(EdgeMode::zero1_right), 1.0});
        pairs.push_back({mode(EdgeMode::zero2_left), mode(EdgeMode::zero2_right), 1.0});
        pairs.push_back({mode(EdgeMode::pi_right), mode(EdgeMode::pi_left), 1.0});
    } else {
        auto occ = detail::edge_occupations(label);
        pairs.push_back({mode(EdgeMode::zero1_left), mode(EdgeMode::zero2_left),
                         occ[0] == 0 ? 1.0 : -1.0});
        pairs.push_back({mode(EdgeMode::pi_left), mode(EdgeMode::pi_right),
                         occ[1] == 0 ? 1.0 : -1.0});
        pairs.push_back({mode(EdgeMode::zero1_right), mode(EdgeMode::zero2_right),
                         occ[2] == 0 ? 1.0 : -1.0});
    }

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& p : pairs)
        m += p.value * (p.v * p.w.transpose() - p.w * p.v.transpose());

    // Bulk completion: each conjugate eigenvalue pair exp(-/+ i eps*T) of O
    // with eps*T in (0, pi) spans a real invariant plane. Occupation zero of
    // the positive-quasienergy fermion built on that plane means
    // <i Gamma_x Gamma_y> = +1 for z = (x + i y), O^T z = e^{i eps T} z.
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(prop.O.transpose().cast<std::complex<double>>());
    // Collect eigenvectors with phase in (0, pi), grouped by eigenvalue so
    // degenerate groups can be re-orthonormalized.
    std::vector<int> chosen;
    for (int j = 0; j < dim; ++j) {
        double phase = std::arg(es.eigenvalues()[j]);
        if (phase > kPinTolerance && phase < M_PI - kPinTolerance) chosen.push_back(j);
    }
    if (static_cast<int>(chosen.size()) != (dim - 6) / 2)
        throw IncompatibleModes("unexpected bulk mode count: " + std::to_string(chosen.size()));
    Eigen::MatrixXcd bulk(dim, chosen.size());
    for (size_t c = 0; c < chosen.size(); ++c) bulk.col(c) = es.eigenvectors().col(chosen[c]);
    // Modified Gram-Schmidt in complex arithmetic; degenerate eigenvectors
    // from the solver are not guaranteed orthonormal.
    for (int c = 0; c < bulk.cols(); ++c) {
        for (int d = 0; d < c; ++d) bulk.col(c) -= bulk.col(d).dot(bulk.col(c)) * bulk.col(d);
        bulk.col(c).normalize();
    }
    for (int c = 0; c < bulk.cols(); ++c) {
        Eigen::VectorXd x = std::sqrt(2.0) * bulk.col(c).real();
        Eigen::VectorXd y = std::sqrt(2.0) * bulk.col(c).imag();
        m += x * y.transpose() - y * x.transpose();
    }

    CovarianceState state{m, dim / 4, 1};
    if (state.purity_defect() > 1e-6)
        throw PurityLost("bulk completion produced an impure covariance (defect " +
                         std::to_string(state.purity_defect()) + ")");
    return state;
}

// Direct sum of per-wire states (wires stay uncoupled until a schedule
// couples them).
inline CovarianceState direct_sum(const CovarianceState& a, const CovarianceState& b) {
    CovarianceState out;
    out.n_sites = a.n_sites;
    out.wires = a.wires + b.wires;
    out.M = Eigen::MatrixXd::Zero(a.dim() + b.dim(), a.dim() + b.dim());
    out.M.topLeftCorner(a.dim(), a.dim()) = a.M;
    out.M.bottomRightCorner(b.dim(), b.dim()) = b.M;
    return out;
}

// ---------------------------------------------------------------------------
// Projective parity measurement

struct MeasurementRecord {
    int outcome = +1;          // p in {+1, -1}
    double probability = 1.0;  // probability of the realized branch
    bool forced = false;
    std::uint64_t seed = 0;     // generator identity when drawn randomly
    std::uint64_t counter = 0;  // draw index within the generator stream
};

// Measure i Gamma_v Gamma_w on a pure Gaussian state (v, w orthonormal).
// Outcome p has probability (1 + p <i Gamma_v Gamma_w>)/2; the state update
// is the normalized Gaussian projection (validated against the Fock oracle
// in the test suite).
inline MeasurementRecord measure_parity(CovarianceState& state, const Eigen::VectorXd& v,
                                        const Eigen::VectorXd& w, std::optional<int> force,
                                        SplitMix64& rng) {
    if (std::abs(v.dot(w)) > 1e-9) throw InputError("measured pair must be orthogonal");
    const double c = correlation(state, v, w);

    MeasurementRecord rec;
    rec.seed = rng.seed();
    if (force) {
        rec.outcome = *force;
        rec.forced = true;
    } else {
        rec.counter = rng.counter();
        rec.outcome = (rng.next_double() < 0.5 * (1.0 + c)) ? +1 : -1;
    }
    const double p = static_cast<double>(rec.outcome);
    rec.probability = 0.5 * (1.0 + p * c);
    if (rec.probability < 1e-12)
        throw ZeroProbabilityBranch("forced measurement branch has probability " +
                                    std::to_string(rec.probability));

    // Post-measurement covariance. With m_v = M v, m_w = M w and
    // P = I - v v^T - w w^T:
    //   M' = P [M - p (m_v m_w^T - m_w m_v^T)/(1 + p c)] P + p (v w^T - w v^T).
    Eigen::VectorXd mv = state.M * v, mw = state.M * w;
    Eigen::MatrixXd updated =
        state.M - (p / (1.0 + p * c)) * (mv * mw.transpose() - mw * mv.transpose());
    Eigen::MatrixXd vvww = v * v.transpose() + w * w.transpose();
    updated -= vvww * updated + updated * vvww - vvww * updated * vvww;
    updated += p * (v * w.transpose() - w * v.transpose());
    state.M = 0.5 * (updated - updated.transpose().eval());
    return rec;
}

namespace detail {

// Sign-tracked product of Majorana monomials over a small index set.
// A monomial is an ordered list of distinct indices; multiplication
// concatenates, bubble-sorts with a sign per swap and cancels equal
// neighbours (gamma^2 = 1).
struct Monomial {
    std::vector<int> idx;
    int sign = 1;

    Monomial times(const Monomial& other) const {
        Monomial r;
        r.sign = sign * other.sign;
        r.idx = idx;
        r.idx.insert(r.idx.end(), other.idx.begin(), other.idx.end());
        bool changed = true;
        while (changed) {
            changed = false;
            for (size_t i = 0; i + 1 < r.idx.size(); ++i) {
                if (r.idx[i] == r.idx[i + 1]) {
                    r.idx.erase(r.idx.begin() + i, r.idx.begin() + i + 2);
                    changed = true;
                    break;
                }
                if (r.idx[i] > r.idx[i + 1]) {
                    std::swap(r.idx[i], r.idx[i + 1]);
                    r.sign = -r.sign;
                    changed = true;
                    break;
                }
            }
        }
        return r;
    }
};

// Pfaffian of a small antisymmetric matrix by expansion along the first row.
inline double pfaffian_small(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    if (n % 2 == 1) return 0.0;
    if (n == 0) return 1.0;
    if (n == 2) return a(0, 1);
    double sum = 0.0;
    int sign = 1;
    for (int j = 1; j < n; ++j) {
        Eigen::MatrixXd sub(n - 2, n - 2);
        int r = 0;
        for (int p = 1; p < n; ++p) {
            if (p == j) continue;
            int c = 0;
            for (int q = 1; q < n; ++q) {
                if (q == j) continue;
                sub(r, c++) = a(p, q);
            }
            ++r;
        }
        sum += sign * a(0, j) * pfaffian_small(sub);
        sign = -sign;
    }
    return sum;
}

}  // namespace detail

// Measure the product parity (i Gamma_a Gamma_b)(i Gamma_c Gamma_d) of two
// disjoint orthonormal pairs. Outcome p has probability (1 + p <P>)/2 with
// <P> the Wick-contracted four-point function. The Gaussian update below is
// exact whenever the post-measurement branch is itself Gaussian, which holds
// for the stabilizer-like states appearing in the two-wire gate sequence; a
// purity check guards against misuse.
inline MeasurementRecord measure_product_parity(CovarianceState& state, const Eigen::MatrixXd& quad,
                                                std::optional<int> force, SplitMix64& rng) {
    if (quad.cols() != 4) throw InputError("product parity needs four mode vectors");
    const int dim = state.dim();
    // Rotate to a frame whose first four basis vectors are the measured modes.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(quad);
    Eigen::MatrixXd q = qr.householderQ();
    // Keep the measured vectors themselves in the first four columns (QR only
    // guarantees the span; fix signs/mixing explicitly).
    q.leftCols(4) = quad;
    Eigen::MatrixXd mt = q.transpose() * state.M * q;

    auto pair_corr = [&](int x, int y) { return mt(x, y); };
    const double expectation = pair_corr(0, 1) * pair_corr(2, 3) - pair_corr(0, 2) * pair_corr(1, 3) +
                               pair_corr(0, 3) * pair_corr(1, 2);

    MeasurementRecord rec;
    rec.seed = rng.seed();
    if (force) {
        rec.outcome = *force;
        rec.forced = true;
    } else {
        rec.counter = rng.counter();
        rec.outcome = (rng.next_double() < 0.5 * (1.0 + expectation)) ? +1 : -1;
    }
    const double p = static_cast<double>(rec.outcome);
    rec.probability = 0.5 * (1.0 + p * expectation);
    if (rec.probability < 1e-12)
        throw ZeroProbabilityBranch("forced product-parity branch has probability " +
                                    std::to_string(rec.probability));

    const double denom = 1.0 + p * expectation;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);

    // Monomial algebra of i g_x g_y * (i g_0 g_1)(i g_2 g_3): when {x,y} is
    // inside the measured quadruple the product reduces to another pair.
    auto quad_monomial = [&]() {
        detail::Monomial m;
        m.idx = {0, 1, 2, 3};
        return m;
    };
    for (int x = 0; x < 4; ++x)
        for (int y = x + 1; y < 4; ++y) {
            detail::Monomial pxy;
            pxy.idx = {x, y};
            detail::Monomial prod = pxy.times(quad_monomial());
            // (i g_x g_y) P = -i * sign * g_u g_v = -sign * (i g_u g_v), so
            // <i g_x g_y P> = -sign * M~(u, v).
            double corr = (prod.idx.size() == 2) ? -prod.sign * mt(prod.idx[0], prod.idx[1]) : 0.0;
            double val = (mt(x, y) + p * corr) / denom;
            out(x, y) = val;
            out(y, x) = -val;
        }

    // Blocks with exactly one index inside the quadruple vanish; the outside
    // block needs the six-point Wick contraction, a Pfaffian over
    // (x, y, 0, 1, 2, 3).
    for (int x = 4; x < dim; ++x)
        for (int y = x + 1; y < dim; ++y) {
            Eigen::MatrixXd six(6, 6);
            std::array<int, 6> ids = {x, y, 0, 1, 2, 3};
            for (int r = 0; r < 6; ++r)
                for (int c = 0; c < 6; ++c) six(r, c) = mt(ids[r], ids[c]);
            double corr = detail::pfaffian_small(six);
            double val = (mt(x, y) + p * corr) / denom;
            out(x, y) = val;
            out(y, x) = -val;
        }

    state.M = q * out * q.transpose();
    state.reantisymmetrize();
    if (state.purity_defect() > 1e-6)
        throw PurityLost("product-parity branch left the Gaussian manifold");
    return rec;
}

// Pfaffian sign of the covariance (global fermion parity of the pure state).
inline double parity_sign(const CovarianceState& state) {
    // Real Schur of an antisymmetric matrix has 2x2 blocks [[0, s],[-s, 0]];
    // the parity is the product of the block signs. Equivalent and simpler:
    // sign of the Pfaffian via the determinant of M restricted to a canonical
    // pairing, computed from the full LU is unstable, so use the Schur form.
    Eigen::RealSchur<Eigen::MatrixXd> schur(state.M);
    const Eigen::MatrixXd& t = schur.matrixT();
    const Eigen::MatrixXd& u = schur.matrixU();
    double sign = u.determinant() > 0 ? 1.0 : -1.0;
    for (int i = 0; i + 1 < t.rows(); i += 2) sign *= (t(i, i + 1) > 0) ? 1.0 : -1.0;
    return sign;
}

}  // namespace floqwire
