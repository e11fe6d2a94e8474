#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "floqwire/errors.hpp"
#include "floqwire/lattice.hpp"

// Momentum-space Floquet operators in the symmetric time frame, symmetry
// verification and the pair of integer winding invariants counting zero and
// pi edge modes.

namespace floqwire {

namespace pauli {
inline Eigen::Matrix2cd id() { return Eigen::Matrix2cd::Identity(); }
inline Eigen::Matrix2cd x() {
    Eigen::Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}
inline Eigen::Matrix2cd y() {
    Eigen::Matrix2cd m;
    m << 0, std::complex<double>(0, -1), std::complex<double>(0, 1), 0;
    return m;
}
inline Eigen::Matrix2cd z() {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}
// tau acts on the particle-hole blocks, sigma on the sublattice inside each
// block; kron(tau, sigma) with the Nambu ordering (c_A, c_B, c_A^dag, c_B^dag).
inline Eigen::Matrix4cd kron(const Eigen::Matrix2cd& tau, const Eigen::Matrix2cd& sigma) {
    Eigen::Matrix4cd m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m.block<2, 2>(2 * i, 2 * j) = tau(i, j) * sigma;
    return m;
}
}  // namespace pauli

struct UniformDrive {
    double hop1_intra, hop1_inter, pair1_intra, pair1_inter;
    double hop2_intra, hop2_inter, pair2_intra, pair2_inter;
    double mu1 = 0.0, mu2 = 0.0;
};

// Extract the eight uniform scalars; per-site structure is not representable
// in momentum space.
inline UniformDrive uniform_drive(const DriveParams& p) {
    if (!p.homogeneous()) throw OverridesPresent("momentum-space operators need homogeneous drives");
    auto real0 = [](const Eigen::VectorXcd& v) {
        if (v.size() > 0 && std::abs(v[0].imag()) > 1e-14)
            throw OverridesPresent("momentum-space operators need real uniform amplitudes");
        return v.size() ? v[0].real() : 0.0;
    };
    return {real0(p.hop1_intra), real0(p.hop1_inter), real0(p.pair1_intra), real0(p.pair1_inter),
            real0(p.hop2_intra), real0(p.hop2_inter), real0(p.pair2_intra), real0(p.pair2_inter),
            p.mu1, p.mu2};
}

struct BlochOperator {
    double k = 0.0;
    Eigen::Matrix4cd h1, h2;  // Bloch Hamiltonians (x period)
    Eigen::Matrix4cd F, G, U; // symmetric-time-frame half-step operators, U = F G
};

namespace detail {

inline Eigen::Matrix4cd unitary_exp4(const Eigen::Matrix4cd& h, std::complex<double> scale) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h);
    Eigen::Vector4cd phases = (scale * es.eigenvalues().array()).exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

struct BlochOptions {
    bool fold_breaking_into_h1 = false;  // include the mu terms (breaks chirality)
};

inline BlochOperator bloch(const DriveParams& params, double k, BlochOptions opt = {}) {
    UniformDrive u = uniform_drive(params);
    using pauli::kron;
    const Eigen::Matrix2cd sx = pauli::x(), sy = pauli::y(), sz = pauli::z(), s0 = pauli::id();

    Eigen::Matrix2cd hop1_k = (u.hop1_intra + u.hop1_inter * std::cos(k)) * sx -
                              u.hop1_inter * std::sin(k) * sy;
    Eigen::Matrix2cd hop2_k = (u.hop2_intra - u.hop2_inter * std::cos(k)) * sy -
                              u.hop2_inter * std::sin(k) * sx;
    Eigen::Matrix2cd pair1_k = (u.pair1_intra - u.pair1_inter * std::cos(k)) * sy -
                               u.pair1_inter * std::sin(k) * sx;
    Eigen::Matrix2cd pair2_k = (u.pair2_intra - u.pair2_inter * std::cos(k)) * sy -
                               u.pair2_inter * std::sin(k) * sx;

    BlochOperator b;
    b.k = k;
    b.h1 = -kron(sz, hop1_k) + kron(sy, pair1_k);
    b.h2 = -kron(s0, hop2_k) + kron(sx, pair2_k);
    if (opt.fold_breaking_into_h1)
        b.h1 += kron(sz, u.mu1 * s0 + u.mu2 * sz);

    const std::complex<double> I(0, 1);
    Eigen::Matrix4cd e1 = detail::unitary_exp4(b.h1, -I * 0.25);
    Eigen::Matrix4cd e2 = detail::unitary_exp4(b.h2, -I * 0.25);
    b.F = e1 * e2;
    b.G = e2 * e1;
    b.U = b.F * b.G;
    return b;
}

// ---------------------------------------------------------------------------
// Symmetry verification

struct SymmetryReport {
    double chiral = 0.0;         // max |Gamma F Gamma - G^dag|
    double particle_hole = 0.0;  // max |tau_x conj(U_k) tau_x - U_{-k}|
    double time_reversal = 0.0;  // max |(sz tx) conj(U_k) (sz tx) - U_{-k}^dag|
};

inline SymmetryReport symmetry_check(const DriveParams& params, int k_samples,
                                     BlochOptions opt = {}) {
    using pauli::kron;
    const Eigen::Matrix4cd chiral_op = kron(pauli::id(), pauli::z());
    const Eigen::Matrix4cd tx = kron(pauli::x(), pauli::id());
    const Eigen::Matrix4cd sztx = kron(pauli::x(), pauli::z());
    SymmetryReport rep;
    for (int j = 0; j < k_samples; ++j) {
        double k = -M_PI + (2.0 * M_PI * j) / k_samples;
        BlochOperator bk = bloch(params, k, opt);
        BlochOperator bmk = bloch(params, -k, opt);
        double c = (chiral_op * bk.F * chiral_op - bk.G.adjoint()).cwiseAbs().maxCoeff();
        double ph = (tx * bk.U.conjugate() * tx - bmk.U).cwiseAbs().maxCoeff();
        double tr = (sztx * bk.U.conjugate() * sztx - bmk.U.adjoint()).cwiseAbs().maxCoeff();
        rep.chiral = std::max(rep.chiral, c);
        rep.particle_hole = std::max(rep.particle_hole, ph);
        rep.time_reversal = std::max(rep.time_reversal, tr);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Winding invariants

struct WindingResult {
    int nu_zero = 0;
    int nu_pi = 0;
    double residual_zero = 0.0;  // deviation of the raw integral from the integer
    double residual_pi = 0.0;
};

namespace detail {

// Basis change diagonalizing the chiral operator to tau_z:
// U = [(1+sx) + tz(1-sx)]/2 * [(1+tx) + sz(1-tx)]/2.
inline Eigen::Matrix4cd canonical_basis() {
    using pauli::kron;
    Eigen::Matrix4cd first =
        0.5 * (kron(pauli::id(), pauli::id() + pauli::x()) +
               kron(pauli::z(), pauli::id() - pauli::x()));
    Eigen::Matrix4cd second =
        0.5 * (kron(pauli::id() + pauli::x(), pauli::id()) +
               kron(pauli::id() - pauli::x(), pauli::z()));
    return first * second;
}

}  // namespace detail

struct WindingOptions {
    int grid = 512;
    double integer_tolerance = 1e-6;
    double singular_tolerance = 1e-8;
};

// Winding numbers of det b(k) and det d(k), where b and d are the upper-right
// and lower-right 2x2 blocks of the half-step operator F in the canonical
// basis. Accumulated from phase-unwrapped log-det increments over a closed
// k loop, which quantizes exactly up to unwrapping.
inline WindingResult winding_invariants(const DriveParams& params, WindingOptions opt = {}) {
    if (opt.grid < 64) throw InputError("winding grid must be at least 64 points");
    const Eigen::Matrix4cd ucan = detail::canonical_basis();

    double acc_zero = 0.0, acc_pi = 0.0;
    std::complex<double> prev_b, prev_d;
    std::complex<double> first_b, first_d;
    for (int j = 0; j <= opt.grid; ++j) {
        std::complex<double> det_b, det_d;
        if (j == opt.grid) {
            det_b = first_b;  // exact loop closure
            det_d = first_d;
        } else {
            double k = -M_PI + (2.0 * M_PI * j) / opt.grid;
            Eigen::Matrix4cd f = ucan.adjoint() * bloch(params, k).F * ucan;
            det_b = f.block<2, 2>(0, 2).determinant();
            det_d = f.block<2, 2>(2, 2).determinant();
            if (std::abs(det_b) < opt.singular_tolerance || std::abs(det_d) < opt.singular_tolerance)
                throw GapClosed("block determinant vanishes at k = " + std::to_string(k));
        }
        if (j == 0) {
            first_b = det_b;
            first_d = det_d;
        } else {
            acc_zero += std::arg(det_b / prev_b);
            acc_pi += std::arg(det_d / prev_d);
        }
        prev_b = det_b;
        prev_d = det_d;
    }

    // Sign convention fixed once so that the reference topological point
    // (ideal drive) reports (2, 1).
    double raw_zero = acc_zero / (2.0 * M_PI);
    double raw_pi = acc_pi / (2.0 * M_PI);
    WindingResult res;
    res.nu_zero = static_cast<int>(std::lround(raw_zero));
    res.nu_pi = static_cast<int>(std::lround(raw_pi));
    res.residual_zero = std::abs(raw_zero - res.nu_zero);
    res.residual_pi = std::abs(raw_pi - res.nu_pi);
    if (res.residual_zero > opt.integer_tolerance || res.residual_pi > opt.integer_tolerance)
        throw NonIntegerResult("winding integral failed to quantize; grid too coarse");
    return res;
}

// ---------------------------------------------------------------------------
// Phase-diagram scan

struct PhaseDiagramRow {
    double axis_value = 0.0;
    int nu_zero = 0;
    int nu_pi = 0;
    bool gap_closed = false;  // invariant undefined at this point; scan continues
};

inline std::vector<PhaseDiagramRow> phase_diagram(const DriveParams& base, Field axis, double from,
                                                  double to, int steps, WindingOptions opt = {}) {
    std::vector<PhaseDiagramRow> rows;
    const int count = (steps < 1 || from == to) ? 1 : steps;
    for (int s = 0; s < count; ++s) {
        double value = (count == 1) ? from : from + (to - from) * s / (count - 1);
        DriveParams p = base;
        p.field(axis).setConstant(value);
        PhaseDiagramRow row;
        row.axis_value = value;
        try {
            WindingResult w = winding_invariants(p, opt);
            row.nu_zero = w.nu_zero;
            row.nu_pi = w.nu_pi;
        } catch (const GapClosed&) {
            row.gap_closed = true;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace floqwire
