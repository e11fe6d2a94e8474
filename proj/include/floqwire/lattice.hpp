#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "floqwire/errors.hpp"

// Real-space construction of the two half-period Hamiltonians of a driven
// 1D p-wave superconducting superlattice, in the Majorana representation.
//
// Every coupling is stored as the dimensionless product (coupling x period);
// the period never appears on its own. A quadratic Hamiltonian is kept as
// the real antisymmetric matrix A of
//
//     H_half * period = (i/4) gamma^T A gamma,
//
// where gamma is the column vector of Majorana operators
// gamma_{s,i}^alpha = c_{s,i} + c_{s,i}^dag,  gamma_{s,i}^beta = i(c_{s,i} - c_{s,i}^dag).

namespace floqwire {

using complexd = std::complex<double>;

enum class Sublattice : int { A = 0, B = 1 };
enum class Species : int { alpha = 0, beta = 1 };

// Flattening is (wire, site, sublattice, species) lexicographic with
// 1-based sites, so (A, 1, alpha, wire 0) maps to 0.
inline int majorana_index(int site, Sublattice s, Species nu, int n_sites, int wire = 0) {
    return ((wire * n_sites + (site - 1)) * 2 + static_cast<int>(s)) * 2 + static_cast<int>(nu);
}

struct MajoranaIndex {
    int site = 1;  // 1..N
    Sublattice sublattice = Sublattice::A;
    Species species = Species::alpha;
    int wire = 0;

    int flatten(int n_sites) const {
        return majorana_index(site, sublattice, species, n_sites, wire);
    }
};

// Named scalar fields of the drive. "hop"/"pair" with segment number play the
// role of the intra/inter hopping and pairing amplitudes of the two
// half-period Hamiltonians; bias_a/bias_b are on-site potentials.
enum class Field : int {
    hop1_intra = 0,
    hop1_inter,
    pair1_intra,
    pair1_inter,
    hop2_intra,
    hop2_inter,
    pair2_intra,
    pair2_inter,
    bias_a,
    bias_b,
};

inline const char* field_name(Field f) {
    switch (f) {
        case Field::hop1_intra: return "hop1_intra";
        case Field::hop1_inter: return "hop1_inter";
        case Field::pair1_intra: return "pair1_intra";
        case Field::pair1_inter: return "pair1_inter";
        case Field::hop2_intra: return "hop2_intra";
        case Field::hop2_inter: return "hop2_inter";
        case Field::pair2_intra: return "pair2_intra";
        case Field::pair2_inter: return "pair2_inter";
        case Field::bias_a: return "bias_a";
        case Field::bias_b: return "bias_b";
    }
    return "?";
}

inline Field field_from_name(const std::string& name) {
    for (int i = 0; i <= static_cast<int>(Field::bias_b); ++i) {
        Field f = static_cast<Field>(i);
        if (name == field_name(f)) return f;
    }
    throw UnknownName("unknown field: " + name);
}

// All per-site drive amplitudes (x period) for both half-period segments.
// Segment-2 hopping/pairing entries may carry complex phases; segment-1
// amplitudes and biases are real in every drive used here, but complex
// segment-1 values are handled by the same bilinear map.
struct DriveParams {
    int n_sites = 0;
    Eigen::VectorXcd hop1_intra, hop1_inter, pair1_intra, pair1_inter;
    Eigen::VectorXcd hop2_intra, hop2_inter, pair2_intra, pair2_inter;
    Eigen::VectorXd bias_a, bias_b;  // on-site potential, rides on segment 2
    double mu1 = 0.0;                // chiral-breaking strengths (x period),
    double mu2 = 0.0;                // folded into segment 1 when nonzero

    DriveParams() = default;

    static DriveParams uniform(int n, complexd h1i, complexd h1x, complexd p1i, complexd p1x,
                               complexd h2i, complexd h2x, complexd p2i, complexd p2x) {
        DriveParams p;
        p.n_sites = n;
        p.hop1_intra = Eigen::VectorXcd::Constant(n, h1i);
        p.hop1_inter = Eigen::VectorXcd::Constant(n, h1x);
        p.pair1_intra = Eigen::VectorXcd::Constant(n, p1i);
        p.pair1_inter = Eigen::VectorXcd::Constant(n, p1x);
        p.hop2_intra = Eigen::VectorXcd::Constant(n, h2i);
        p.hop2_inter = Eigen::VectorXcd::Constant(n, h2x);
        p.pair2_intra = Eigen::VectorXcd::Constant(n, p2i);
        p.pair2_inter = Eigen::VectorXcd::Constant(n, p2x);
        p.bias_a = Eigen::VectorXd::Zero(n);
        p.bias_b = Eigen::VectorXd::Zero(n);
        return p;
    }

    // Fine-tuned point with exactly localized, analytically known edge modes.
    static DriveParams ideal(int n) {
        const double h = M_PI / 2.0;
        return uniform(n, h, h, h, h, 0.0, 2.0 * M_PI, 0.0, 0.0);
    }

    // Benchmark point with sizable detuning from the ideal case; edge modes
    // survive but are no longer single-site objects.
    static DriveParams detuned(int n) {
        return uniform(n, M_PI / 2 + 0.14, M_PI / 2 + 0.18, M_PI / 2 + 0.1, M_PI / 2 - 0.24,
                       0.06, 2 * M_PI + 0.19, -0.04, 0.12);
    }

    Eigen::VectorXcd& field(Field f) {
        switch (f) {
            case Field::hop1_intra: return hop1_intra;
            case Field::hop1_inter: return hop1_inter;
            case Field::pair1_intra: return pair1_intra;
            case Field::pair1_inter: return pair1_inter;
            case Field::hop2_intra: return hop2_intra;
            case Field::hop2_inter: return hop2_inter;
            case Field::pair2_intra: return pair2_intra;
            case Field::pair2_inter: return pair2_inter;
            default: throw UnknownName("field is not a complex drive amplitude");
        }
    }
    const Eigen::VectorXcd& field(Field f) const {
        return const_cast<DriveParams*>(this)->field(f);
    }

    void set(Field f, int site, complexd value) {
        if (site < 1 || site > n_sites) throw InputError("site out of range");
        if (f == Field::bias_a)
            bias_a[site - 1] = value.real();
        else if (f == Field::bias_b)
            bias_b[site - 1] = value.real();
        else
            field(f)[site - 1] = value;
    }

    complexd get(Field f, int site) const {
        if (site < 1 || site > n_sites) throw InputError("site out of range");
        if (f == Field::bias_a) return bias_a[site - 1];
        if (f == Field::bias_b) return bias_b[site - 1];
        return field(f)[site - 1];
    }

    bool finite() const {
        auto ok = [](const Eigen::VectorXcd& v) { return v.allFinite(); };
        return ok(hop1_intra) && ok(hop1_inter) && ok(pair1_intra) && ok(pair1_inter) &&
               ok(hop2_intra) && ok(hop2_inter) && ok(pair2_intra) && ok(pair2_inter) &&
               bias_a.allFinite() && bias_b.allFinite() && std::isfinite(mu1) && std::isfinite(mu2);
    }

    // True when every per-site array is constant and no on-site terms are set.
    bool homogeneous() const {
        auto flat = [](const Eigen::VectorXcd& v) {
            return v.size() == 0 || (v.array() == v[0]).all();
        };
        return flat(hop1_intra) && flat(hop1_inter) && flat(pair1_intra) && flat(pair1_inter) &&
               flat(hop2_intra) && flat(hop2_inter) && flat(pair2_intra) && flat(pair2_inter) &&
               (bias_a.array() == 0.0).all() && (bias_b.array() == 0.0).all();
    }

    int dim() const { return 4 * n_sites; }
};

// Real antisymmetric coefficient matrix, stored as its strict upper triangle
// so that A = -A^T holds exactly by construction.
class QuadraticHamiltonian {
public:
    explicit QuadraticHamiltonian(int dim) : upper_(Eigen::MatrixXd::Zero(dim, dim)) {}

    int dim() const { return static_cast<int>(upper_.rows()); }

    // Accumulate  H*period += w * i gamma_a gamma_b  (a != b).
    void add_bilinear(int a, int b, double w) {
        if (a == b || w == 0.0) return;
        if (a < b)
            upper_(a, b) += 2.0 * w;
        else
            upper_(b, a) -= 2.0 * w;
    }

    // Coefficient of i gamma_a gamma_b in H*period.
    double bilinear(int a, int b) const {
        if (a == b) return 0.0;
        return (a < b) ? 0.5 * upper_(a, b) : -0.5 * upper_(b, a);
    }

    Eigen::MatrixXd matrix() const {
        Eigen::MatrixXd u = upper_.triangularView<Eigen::StrictlyUpper>();
        return u - u.transpose();
    }

private:
    Eigen::MatrixXd upper_;
};

namespace detail {

// Majorana bilinear weights of a generic bond
//     -t c_Y^dag c_X + p c_Y^dag c_X^dag + h.c.        (segment 1 form)
//     -i t c_Y^dag c_X + i p c_Y^dag c_X^dag + h.c.    (segment 2 form)
// expressed as coefficients of i gamma_Y^mu gamma_X^nu. Substituting the
// Majorana definition and collecting terms gives, per channel (mu,nu):
inline void add_bond(QuadraticHamiltonian& h, int segment, int a_y_alpha, int a_y_beta,
                     int a_x_alpha, int a_x_beta, complexd t, complexd p) {
    double w_ab, w_ba, w_aa, w_bb;  // (alpha_Y beta_X), (beta_Y alpha_X), (alpha alpha), (beta beta)
    if (segment == 1) {
        w_ab = 0.5 * (t.real() + p.real());
        w_ba = 0.5 * (-t.real() + p.real());
        w_aa = 0.5 * (-t.imag() + p.imag());
        w_bb = 0.5 * (-t.imag() - p.imag());
    } else {
        w_ab = 0.5 * (-t.imag() - p.imag());
        w_ba = 0.5 * (t.imag() - p.imag());
        w_aa = 0.5 * (-t.real() + p.real());
        w_bb = 0.5 * (-t.real() - p.real());
    }
    h.add_bilinear(a_y_alpha, a_x_beta, w_ab);
    h.add_bilinear(a_y_beta, a_x_alpha, w_ba);
    h.add_bilinear(a_y_alpha, a_x_alpha, w_aa);
    h.add_bilinear(a_y_beta, a_x_beta, w_bb);
}

// On-site potential  v c^dag c = v/2 - (i v/2) gamma^alpha gamma^beta;
// the constant is dropped.
inline void add_onsite(QuadraticHamiltonian& h, int a_alpha, int a_beta, double v) {
    h.add_bilinear(a_alpha, a_beta, -0.5 * v);
}

}  // namespace detail

// Build one half-period Hamiltonian. Segment 1 carries the chiral-breaking
// terms and segment 2 the on-site bias; inter-cell entries at the last site
// are ignored under open boundaries.
inline QuadraticHamiltonian build_segment(const DriveParams& params, int segment) {
    if (!params.finite()) throw NonFiniteParameter("drive parameters must be finite");
    if (segment != 1 && segment != 2) throw InputError("segment must be 1 or 2");
    const int n = params.n_sites;
    QuadraticHamiltonian h(4 * n);
    auto idx = [n](int site, Sublattice s, Species nu) { return majorana_index(site, s, nu, n); };

    const auto& hop_intra = (segment == 1) ? params.hop1_intra : params.hop2_intra;
    const auto& hop_inter = (segment == 1) ? params.hop1_inter : params.hop2_inter;
    const auto& pair_intra = (segment == 1) ? params.pair1_intra : params.pair2_intra;
    const auto& pair_inter = (segment == 1) ? params.pair1_inter : params.pair2_inter;

    for (int i = 1; i <= n; ++i) {
        // intra-cell bond: X = (A,i), Y = (B,i)
        detail::add_bond(h, segment, idx(i, Sublattice::B, Species::alpha),
                         idx(i, Sublattice::B, Species::beta), idx(i, Sublattice::A, Species::alpha),
                         idx(i, Sublattice::A, Species::beta), hop_intra[i - 1], pair_intra[i - 1]);
        // inter-cell bond: X = (B,i), Y = (A,i+1)
        if (i < n) {
            detail::add_bond(h, segment, idx(i + 1, Sublattice::A, Species::alpha),
                             idx(i + 1, Sublattice::A, Species::beta),
                             idx(i, Sublattice::B, Species::alpha), idx(i, Sublattice::B, Species::beta),
                             hop_inter[i - 1], pair_inter[i - 1]);
        }
    }

    // The on-site bias rides on the second half-period: H2 = ... + V c^dag c.
    // The first half-period stays untouched during the transport protocols,
    // which is what keeps the two-period pinned subspace degenerate in the
    // every-other-period steps. The chiral-breaking strengths belong to the
    // first half-period.
    if (segment == 2) {
        for (int i = 1; i <= n; ++i) {
            if (params.bias_a[i - 1] != 0.0)
                detail::add_onsite(h, idx(i, Sublattice::A, Species::alpha),
                                   idx(i, Sublattice::A, Species::beta), params.bias_a[i - 1]);
            if (params.bias_b[i - 1] != 0.0)
                detail::add_onsite(h, idx(i, Sublattice::B, Species::alpha),
                                   idx(i, Sublattice::B, Species::beta), params.bias_b[i - 1]);
        }
    }
    if (segment == 1 && (params.mu1 != 0.0 || params.mu2 != 0.0)) {
        for (int i = 1; i <= n; ++i) {
            detail::add_onsite(h, idx(i, Sublattice::A, Species::alpha),
                               idx(i, Sublattice::A, Species::beta), params.mu1 + params.mu2);
            detail::add_onsite(h, idx(i, Sublattice::B, Species::alpha),
                               idx(i, Sublattice::B, Species::beta), params.mu1 - params.mu2);
        }
    }
    return h;
}

// Majorana form of the chiral-symmetry breaking term
//     sum_i (mu1+mu2) c_{A,i}^dag c_{A,i} + (mu1-mu2) c_{B,i}^dag c_{B,i},
// with the normal-ordering constant dropped.
inline QuadraticHamiltonian build_break_term(const DriveParams& params) {
    if (!std::isfinite(params.mu1) || !std::isfinite(params.mu2))
        throw NonFiniteParameter("mu1/mu2 must be finite");
    const int n = params.n_sites;
    QuadraticHamiltonian h(4 * n);
    auto idx = [n](int site, Sublattice s, Species nu) { return majorana_index(site, s, nu, n); };
    for (int i = 1; i <= n; ++i) {
        detail::add_onsite(h, idx(i, Sublattice::A, Species::alpha),
                           idx(i, Sublattice::A, Species::beta), params.mu1 + params.mu2);
        detail::add_onsite(h, idx(i, Sublattice::B, Species::alpha),
                           idx(i, Sublattice::B, Species::beta), params.mu1 - params.mu2);
    }
    return h;
}

}  // namespace floqwire
