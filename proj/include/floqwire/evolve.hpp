#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "floqwire/errors.hpp"
#include "floqwire/lattice.hpp"

// Single-particle (Heisenberg) evolution of Majorana operators.
//
// For H*period = (i/4) gamma^T A gamma the Heisenberg map of the basis
// operators over a fraction f of the period is
//
//     U^dag gamma_a U = sum_b [exp(f A)]_ab gamma_b,
//
// so a full drive period gives O = exp(A2/2) exp(A1/2). O acts on covariance
// matrices as M -> O M O^T and transports mode coefficient vectors forward
// as v -> O v.

namespace floqwire {

struct OrthogonalPropagator {
    Eigen::MatrixXd O;

    int dim() const { return static_cast<int>(O.rows()); }

    double orthogonality_defect() const {
        return (O.transpose() * O - Eigen::MatrixXd::Identity(dim(), dim()))
            .cwiseAbs()
            .maxCoeff();
    }

    // Project back onto the orthogonal group (polar decomposition); used to
    // stop round-off drift in long products.
    void renormalize() {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(O, Eigen::ComputeThinU | Eigen::ComputeThinV);
        O = svd.matrixU() * svd.matrixV().transpose();
    }
};

// exp(fraction * A) through the eigendecomposition of the Hermitian matrix
// iA, which keeps the result exactly in the orthogonal group up to round-off.
inline Eigen::MatrixXd orthogonal_exp(const Eigen::MatrixXd& a, double fraction) {
    const int n = static_cast<int>(a.rows());
    Eigen::MatrixXcd h = std::complex<double>(0, 1) * a.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXcd phases =
        (std::complex<double>(0, -1) * fraction * es.eigenvalues().array()).exp();
    Eigen::MatrixXcd e =
        es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    return e.real();
}

inline OrthogonalPropagator propagate(const QuadraticHamiltonian& h, double fraction) {
    if (fraction < 0.0 || fraction > 1.0) throw InputError("fraction must lie in [0, 1]");
    return {orthogonal_exp(h.matrix(), fraction)};
}

inline OrthogonalPropagator floquet_propagator(const DriveParams& params) {
    Eigen::MatrixXd o1 = orthogonal_exp(build_segment(params, 1).matrix(), 0.5);
    Eigen::MatrixXd o2 = orthogonal_exp(build_segment(params, 2).matrix(), 0.5);
    return {o2 * o1};
}

// ---------------------------------------------------------------------------
// Spectrum

constexpr double kPinTolerance = 1e-6;  // |eps*T| (or |eps*T - pi|) below this counts as pinned
constexpr int kDefaultEdgeSites = 4;    // sites per edge used for edge-weight reporting

enum class ModeFlag : int { bulk = 0, zero = 1, pi = 2 };

struct SpectrumLine {
    double eigenphase = 0.0;  // eps*T in (-pi, pi]
    double edge_weight = 0.0; // probability mass within n_loc sites of either edge
    ModeFlag flag = ModeFlag::bulk;
};

struct SpectrumReport {
    std::vector<SpectrumLine> lines;  // sorted by eigenphase

    int count(ModeFlag f) const {
        return static_cast<int>(std::count_if(lines.begin(), lines.end(),
                                              [f](const SpectrumLine& l) { return l.flag == f; }));
    }
};

namespace detail {

inline double edge_weight_of(const Eigen::VectorXcd& v, int n_loc, int n_sites) {
    double w = 0.0;
    for (int i = 0; i < v.size(); ++i) {
        int site = i / 4 + 1;  // flattening is site-major (single wire)
        if (site <= n_loc || site > n_sites - n_loc) w += std::norm(v[i]);
    }
    return w / v.squaredNorm();
}

// Mass on the left half vs right half; used to assign pinned modes to edges.
inline double left_fraction(const Eigen::VectorXcd& v, int n_sites) {
    double l = 0.0, tot = 0.0;
    for (int i = 0; i < v.size(); ++i) {
        int site = i / 4 + 1;
        double m = std::norm(v[i]);
        tot += m;
        if (2 * site <= n_sites) l += m;
    }
    return l / tot;
}

}  // namespace detail

struct SpectrumOptions {
    int n_loc = kDefaultEdgeSites;
    double pin_tolerance = kPinTolerance;
};

inline SpectrumReport spectrum(const OrthogonalPropagator& prop, SpectrumOptions opt = {}) {
    const int dim = prop.dim();
    const int n_sites = dim / 4;
    Eigen::EigenSolver<Eigen::MatrixXd> es(prop.O);
    SpectrumReport rep;
    rep.lines.reserve(dim);
    for (int j = 0; j < dim; ++j) {
        SpectrumLine line;
        // Floquet convention: eigenvalue exp(-i eps*T).
        line.eigenphase = -std::arg(es.eigenvalues()[j]);
        if (line.eigenphase <= -M_PI) line.eigenphase = M_PI;
        line.edge_weight = detail::edge_weight_of(es.eigenvectors().col(j), opt.n_loc, n_sites);
        if (std::abs(line.eigenphase) < opt.pin_tolerance)
            line.flag = ModeFlag::zero;
        else if (std::abs(std::abs(line.eigenphase) - M_PI) < opt.pin_tolerance)
            line.flag = ModeFlag::pi;
        rep.lines.push_back(line);
    }
    std::sort(rep.lines.begin(), rep.lines.end(),
              [](const SpectrumLine& a, const SpectrumLine& b) { return a.eigenphase < b.eigenphase; });
    return rep;
}

// Pinned-mode counts per edge, for bulk-boundary comparisons. A mode belongs
// to the left edge when more than half of its weight sits in the left half.
struct EdgeCounts {
    int zero_left = 0, zero_right = 0, pi_left = 0, pi_right = 0;
};

inline EdgeCounts pinned_mode_counts(const OrthogonalPropagator& prop,
                                     double pin_tolerance = kPinTolerance) {
    const int dim = prop.dim();
    const int n_sites = dim / 4;
    Eigen::EigenSolver<Eigen::MatrixXd> es(prop.O);
    EdgeCounts c;
    for (int j = 0; j < dim; ++j) {
        double phase = std::arg(es.eigenvalues()[j]);
        bool zero = std::abs(phase) < pin_tolerance;
        bool pi = std::abs(std::abs(phase) - M_PI) < pin_tolerance;
        if (!zero && !pi) continue;
        bool left = detail::left_fraction(es.eigenvectors().col(j), n_sites) > 0.5;
        if (zero) (left ? c.zero_left : c.zero_right)++;
        if (pi) (left ? c.pi_left : c.pi_right)++;
    }
    return c;
}

// ---------------------------------------------------------------------------
// Edge modes

enum class EdgeMode : int {
    zero1_left = 0,
    zero2_left = 1,
    zero1_right = 2,
    zero2_right = 3,
    pi_left = 4,
    pi_right = 5,
};

inline const char* edge_mode_name(EdgeMode m) {
    switch (m) {
        case EdgeMode::zero1_left: return "zero1_left";
        case EdgeMode::zero2_left: return "zero2_left";
        case EdgeMode::zero1_right: return "zero1_right";
        case EdgeMode::zero2_right: return "zero2_right";
        case EdgeMode::pi_left: return "pi_left";
        case EdgeMode::pi_right: return "pi_right";
    }
    return "?";
}

// Six real unit vectors in the canonical column order
// (zero1_left, zero2_left, zero1_right, zero2_right, pi_left, pi_right).
struct EdgeModeSet {
    Eigen::MatrixXd vectors;  // dim x 6

    int dim() const { return static_cast<int>(vectors.rows()); }
    Eigen::VectorXd mode(EdgeMode m) const { return vectors.col(static_cast<int>(m)); }
    Eigen::MatrixXd zero_block() const { return vectors.leftCols(4); }
    Eigen::MatrixXd pi_block() const { return vectors.rightCols(2); }
};

// Exact single-site edge modes of the fine-tuned (ideal) drive.
inline EdgeModeSet ideal_edge_modes(int n_sites) {
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(4 * n_sites, 6);
    auto idx = [n_sites](int site, Sublattice s, Species nu) {
        return majorana_index(site, s, nu, n_sites);
    };
    const int n = n_sites;
    v(idx(1, Sublattice::A, Species::alpha), 0) = 1.0;                         // zero1_left
    v(idx(1, Sublattice::A, Species::beta), 1) = r;                            // zero2_left
    v(idx(1, Sublattice::B, Species::alpha), 1) = -r;
    v(idx(n, Sublattice::A, Species::beta), 2) = r;                            // zero1_right
    v(idx(n, Sublattice::B, Species::alpha), 2) = r;
    v(idx(n, Sublattice::B, Species::beta), 3) = 1.0;                          // zero2_right
    v(idx(1, Sublattice::A, Species::beta), 4) = r;                            // pi_left
    v(idx(1, Sublattice::B, Species::alpha), 4) = r;
    v(idx(n, Sublattice::A, Species::beta), 5) = r;                            // pi_right
    v(idx(n, Sublattice::B, Species::alpha), 5) = -r;
    return {v};
}

namespace detail {

// Orthonormal basis of the near-null space of (O -/+ I) from the smallest
// right singular vectors.
inline Eigen::MatrixXd pinned_subspace(const Eigen::MatrixXd& o, double eigenvalue_sign, int count,
                                       double* residual = nullptr) {
    const int dim = static_cast<int>(o.rows());
    Eigen::MatrixXd shifted = o - eigenvalue_sign * Eigen::MatrixXd::Identity(dim, dim);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(shifted, Eigen::ComputeFullV);
    // Singular values come sorted in decreasing order.
    if (residual) *residual = svd.singularValues()(dim - count);
    return svd.matrixV().rightCols(count);
}

// Rotate the columns of an orthonormal basis q so they best match the
// reference columns p (orthogonal Procrustes). Returns the smallest singular
// value of q^T p as the alignment quality.
inline double procrustes_align(Eigen::MatrixXd& q, const Eigen::MatrixXd& p) {
    Eigen::MatrixXd c = q.transpose() * p;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
    q = q * (svd.matrixU() * svd.matrixV().transpose());
    return svd.singularValues().minCoeff();
}

}  // namespace detail

struct EdgeModeOptions {
    double pin_tolerance = kPinTolerance;
    double min_alignment = 0.5;
    bool check_pinning = true;
};

// Extract the four zero modes and two pi modes of a propagator. Within each
// degenerate eigenspace the basis is gauge-fixed by Procrustes alignment
// against `reference` (default: the ideal-case set), which keeps mode
// identities continuous through deformations.
inline EdgeModeSet edge_modes(const OrthogonalPropagator& prop,
                              std::optional<EdgeModeSet> reference = std::nullopt,
                              EdgeModeOptions opt = {}) {
    const int dim = prop.dim();
    EdgeModeSet ref = reference ? *reference : ideal_edge_modes(dim / 4);
    if (ref.dim() != dim) throw InputError("reference mode dimension mismatch");

    if (opt.check_pinning) {
        SpectrumOptions sopt;
        sopt.pin_tolerance = opt.pin_tolerance;
        SpectrumReport rep = spectrum(prop, sopt);
        int nz = rep.count(ModeFlag::zero), np = rep.count(ModeFlag::pi);
        if (nz != 4 || np != 2)
            throw WrongDegeneracy("expected 4 zero and 2 pi modes, found " + std::to_string(nz) +
                                  " and " + std::to_string(np));
    }

    Eigen::MatrixXd zero = detail::pinned_subspace(prop.O, +1.0, 4);
    Eigen::MatrixXd pi = detail::pinned_subspace(prop.O, -1.0, 2);
    double a0 = detail::procrustes_align(zero, ref.zero_block());
    double api = detail::procrustes_align(pi, ref.pi_block());
    if (a0 < opt.min_alignment || api < opt.min_alignment)
        throw GaugeAmbiguity("edge-mode alignment below threshold: " + std::to_string(a0) + ", " +
                             std::to_string(api));

    EdgeModeSet out;
    out.vectors.resize(dim, 6);
    out.vectors.leftCols(4) = zero;
    out.vectors.rightCols(2) = pi;
    return out;
}

// ---------------------------------------------------------------------------
// Adiabaticity diagnostics

struct AdiabaticityMetrics {
    double diabatic_error = 0.0;   // worst leakage of an evolved mode out of the final edge subspace
    double max_zero_splitting = 0.0;  // max |eps*T| over the trajectory, zero sector
    double max_pi_splitting = 0.0;    // max ||eps*T| - pi| over the trajectory, pi sector
};

// Leakage of evolved mode vectors out of the instantaneous edge subspace:
// 1 - |P v|^2, maximized over the six modes.
inline double diabatic_error(const EdgeModeSet& final_instantaneous, const Eigen::MatrixXd& evolved) {
    double worst = 0.0;
    const Eigen::MatrixXd& q = final_instantaneous.vectors;
    for (int j = 0; j < evolved.cols(); ++j) {
        double proj = (q.transpose() * evolved.col(j)).squaredNorm() / evolved.col(j).squaredNorm();
        worst = std::max(worst, 1.0 - proj);
    }
    return worst;
}

}  // namespace floqwire
