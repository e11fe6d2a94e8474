#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <vector>

#include "floqwire/errors.hpp"
#include "floqwire/lattice.hpp"

// Exact many-body reference on the full Fock space, for small systems only.
// Used by the test suite to validate the single-particle propagators, the
// covariance evolution and the measurement updates. Never used at more than
// 8 fermionic modes (dimension 256).

namespace floqwire {

class FockSpace {
public:
    explicit FockSpace(int n_modes) : n_modes_(n_modes), dim_(1 << n_modes) {
        if (n_modes > 8) throw TooLarge("Fock oracle limited to 8 modes");
        annihilators_.reserve(n_modes_);
        // Jordan-Wigner with the string on lower mode indices; bit m of a
        // basis index is the occupation of mode m. Mode ordering matches the
        // Majorana flattening: mode = (wire * n_sites + site - 1) * 2 + sublattice.
        for (int m = 0; m < n_modes_; ++m) {
            Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(dim_, dim_);
            for (int basis = 0; basis < dim_; ++basis) {
                if (!(basis >> m & 1)) continue;
                int sign = 1;
                for (int l = 0; l < m; ++l)
                    if (basis >> l & 1) sign = -sign;
                c(basis ^ (1 << m), basis) = sign;
            }
            annihilators_.push_back(std::move(c));
        }
        majoranas_.reserve(2 * n_modes_);
        for (int m = 0; m < n_modes_; ++m) {
            const Eigen::MatrixXcd& c = annihilators_[m];
            Eigen::MatrixXcd cdag = c.adjoint();
            majoranas_.push_back(c + cdag);
            majoranas_.push_back(std::complex<double>(0, 1) * (c - cdag));
        }
    }

    int n_modes() const { return n_modes_; }
    int dim() const { return dim_; }
    const Eigen::MatrixXcd& annihilator(int mode) const { return annihilators_[mode]; }
    const Eigen::MatrixXcd& majorana(int a) const { return majoranas_[a]; }

    Eigen::MatrixXcd majorana_combination(const Eigen::VectorXd& v) const {
        Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(dim_, dim_);
        for (int a = 0; a < 2 * n_modes_; ++a)
            if (v[a] != 0.0) g += v[a] * majoranas_[a];
        return g;
    }

    Eigen::VectorXcd vacuum() const {
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim_);
        psi[0] = 1.0;
        return psi;
    }

    Eigen::MatrixXcd total_parity() const {
        Eigen::VectorXcd d(dim_);
        for (int basis = 0; basis < dim_; ++basis)
            d[basis] = (__builtin_popcount(static_cast<unsigned>(basis)) % 2 == 0) ? 1.0 : -1.0;
        return d.asDiagonal();
    }

    // exp(theta Gamma_v Gamma_w) = cos(theta) + sin(theta) Gamma_v Gamma_w
    // for orthonormal v perp w; exact, no matrix exponential needed.
    Eigen::MatrixXcd pair_rotation(const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                                   double theta) const {
        Eigen::MatrixXcd gv = majorana_combination(v), gw = majorana_combination(w);
        return std::cos(theta) * Eigen::MatrixXcd::Identity(dim_, dim_) +
               std::sin(theta) * gv * gw;
    }

private:
    int n_modes_;
    int dim_;
    std::vector<Eigen::MatrixXcd> annihilators_;
    std::vector<Eigen::MatrixXcd> majoranas_;
};

inline Eigen::MatrixXcd hermitian_exp(const Eigen::MatrixXcd& h, std::complex<double> scale) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXcd phases = (scale * es.eigenvalues().array()).exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// Dense many-body H_1, H_2 (x period) built directly from the fermionic form.
inline Eigen::MatrixXcd oracle_hamiltonian(const FockSpace& fs, const DriveParams& p, int segment,
                                           int wires = 1) {
    if (2 * p.n_sites * wires != fs.n_modes()) throw InputError("mode count mismatch");
    const int dim = fs.dim();
    const std::complex<double> I(0, 1);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    auto mode = [&](int wire, int site, Sublattice s) {
        return (wire * p.n_sites + site - 1) * 2 + static_cast<int>(s);
    };
    for (int w = 0; w < wires; ++w) {
        for (int i = 1; i <= p.n_sites; ++i) {
            const Eigen::MatrixXcd& ca = fs.annihilator(mode(w, i, Sublattice::A));
            const Eigen::MatrixXcd& cb = fs.annihilator(mode(w, i, Sublattice::B));
            auto add_pair = [&](const Eigen::MatrixXcd& cy, const Eigen::MatrixXcd& cx,
                                complexd hop, complexd pr) {
                Eigen::MatrixXcd t;
                if (segment == 1)
                    t = -hop * cy.adjoint() * cx + pr * cy.adjoint() * cx.adjoint();
                else
                    t = -I * hop * cy.adjoint() * cx + I * pr * cy.adjoint() * cx.adjoint();
                h += t + t.adjoint();
            };
            add_pair(cb, ca, (segment == 1 ? p.hop1_intra : p.hop2_intra)[i - 1],
                     (segment == 1 ? p.pair1_intra : p.pair2_intra)[i - 1]);
            if (i < p.n_sites) {
                const Eigen::MatrixXcd& ca_next = fs.annihilator(mode(w, i + 1, Sublattice::A));
                add_pair(ca_next, cb, (segment == 1 ? p.hop1_inter : p.hop2_inter)[i - 1],
                         (segment == 1 ? p.pair1_inter : p.pair2_inter)[i - 1]);
            }
            double va = (segment == 1) ? p.mu1 + p.mu2 : p.bias_a[i - 1];
            double vb = (segment == 1) ? p.mu1 - p.mu2 : p.bias_b[i - 1];
            if (va != 0.0) h += va * ca.adjoint() * ca;
            if (vb != 0.0) h += vb * cb.adjoint() * cb;
        }
    }
    return h;
}

// One-period many-body Floquet operator exp(-i H2 T/2) exp(-i H1 T/2).
inline Eigen::MatrixXcd oracle_propagator(const FockSpace& fs, const DriveParams& p,
                                          int wires = 1) {
    const std::complex<double> I(0, 1);
    Eigen::MatrixXcd u1 = hermitian_exp(oracle_hamiltonian(fs, p, 1, wires), -I * 0.5);
    Eigen::MatrixXcd u2 = hermitian_exp(oracle_hamiltonian(fs, p, 2, wires), -I * 0.5);
    return u2 * u1;
}

// Heisenberg map of the Majorana basis, R_ab from U^dag gamma_a U = R_ab gamma_b.
inline Eigen::MatrixXd oracle_heisenberg_map(const FockSpace& fs, const Eigen::MatrixXcd& u) {
    const int n = 2 * fs.n_modes();
    Eigen::MatrixXd r(n, n);
    for (int a = 0; a < n; ++a) {
        Eigen::MatrixXcd ga = u.adjoint() * fs.majorana(a) * u;
        for (int b = 0; b < n; ++b)
            r(a, b) = (ga * fs.majorana(b)).trace().real() / fs.dim();
    }
    return r;
}

// Covariance matrix M_ab = <psi| (i/2)[gamma_a, gamma_b] |psi>.
inline Eigen::MatrixXd oracle_covariance(const FockSpace& fs, const Eigen::VectorXcd& psi) {
    const int n = 2 * fs.n_modes();
    const std::complex<double> I(0, 1);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    std::vector<Eigen::VectorXcd> gpsi(n);
    for (int a = 0; a < n; ++a) gpsi[a] = fs.majorana(a) * psi;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            // <i gamma_a gamma_b> = i <gamma_a psi | gamma_b psi> (gammas Hermitian)
            std::complex<double> val = gpsi[a].dot(gpsi[b]);
            double mab = (I * val).real();
            m(a, b) = mab;
            m(b, a) = -mab;
        }
    return m;
}

// Projective measurement of i Gamma_v Gamma_w with outcome p = +/-1.
// Returns the outcome probability and normalizes the post-measurement state.
inline double oracle_measure(const FockSpace& fs, Eigen::VectorXcd& psi, const Eigen::VectorXd& v,
                             const Eigen::VectorXd& w, int outcome) {
    const std::complex<double> I(0, 1);
    Eigen::MatrixXcd op = I * fs.majorana_combination(v) * fs.majorana_combination(w);
    Eigen::MatrixXcd proj =
        0.5 * (Eigen::MatrixXcd::Identity(fs.dim(), fs.dim()) + double(outcome) * op);
    Eigen::VectorXcd post = proj * psi;
    double prob = post.squaredNorm();
    if (prob < 1e-12) throw ZeroProbabilityBranch("forced outcome has vanishing probability");
    psi = post / std::sqrt(prob);
    return prob;
}

}  // namespace floqwire
