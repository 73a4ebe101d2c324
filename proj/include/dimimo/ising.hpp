#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "dimimo/constellation.hpp"
#include "dimimo/detectors.hpp"
#include "dimimo/system.hpp"

namespace dimimo {

// Search space for the correction d around the polynomial-time guess.
// Each coordinate of d is a weighted sum of spins: {-2,0,2} = s1 + s2,
// {-4,...,4} = 2 s1 + s2 + s3, and larger sets continue the binary-weight
// pattern (..., 4, 2, 1, 1).
struct DeltaSearchSpace {
    std::vector<int> levels;   // ordered even integers, e.g. {-2, 0, 2}
    std::vector<int> weights;  // spin weights per coordinate, e.g. {1, 1}

    int spins_per_coord() const { return static_cast<int>(weights.size()); }
    int radius() const { return levels.back(); }
};

// Builds the search space reaching +/-2r in steps of 2: r=1 -> {-2,0,2},
// r=2 -> {-4,-2,0,2,4}, r=4 -> {-8,...,8}, ...
inline DeltaSearchSpace make_delta_space(int reach) {
    if (reach < 2 || reach % 2 != 0)
        throw std::invalid_argument("delta search reach must be a positive even integer");
    DeltaSearchSpace sp;
    for (int v = -reach; v <= reach; v += 2) sp.levels.push_back(v);
    // weights (..., 4, 2, 1, 1) sum to `reach`
    int rem = reach;
    while (rem > 1) {
        const int w = rem / 2;
        sp.weights.push_back(w);
        rem -= w;
    }
    sp.weights.push_back(1);
    return sp;
}

// Ising problem  min_s -h^T s - s^T J s  with symmetric zero-diagonal J.
// `offset` is the constant making  energy + offset  equal the quadratic
// objective the problem was derived from.
struct IsingProblem {
    Mat J;
    Vec h;
    double offset = 0.0;

    Eigen::Index size() const { return h.size(); }
};

// Purely quadratic form with the auxiliary spin at the last index.
struct AugmentedIsing {
    Mat J;  // (n+1) x (n+1), symmetric, zero diagonal
    double offset = 0.0;

    Eigen::Index size() const { return J.rows(); }
};

inline double ising_energy(const IsingProblem& p, const Vec& s) {
    return -p.h.dot(s) - s.dot(p.J * s);
}

inline double ising_energy(const AugmentedIsing& p, const Vec& s) {
    return -s.dot(p.J * s);
}

// Transform matrix T mapping spin vectors to correction vectors, block
// structure [w1*I w2*I ... wk*I] with I of size 2*N_t.
inline Mat build_transform(const std::vector<int>& weights, int n_tx) {
    const int n = 2 * n_tx;
    const int k = static_cast<int>(weights.size());
    Mat t = Mat::Zero(n, static_cast<Eigen::Index>(n) * k);
    for (int b = 0; b < k; ++b)
        t.block(0, static_cast<Eigen::Index>(b) * n, n, n) =
            double(weights[static_cast<std::size_t>(b)]) * Mat::Identity(n, n);
    return t;
}

inline Mat build_transform(const DeltaSearchSpace& space, int n_tx) {
    return build_transform(space.weights, n_tx);
}

// Core algebra shared by the delta and direct formulations: for the
// quadratic objective ||target - H T s||^2 over spins,
//   J = -zeroDiag(T' H' H T),  h = 2 T' H' target,
//   offset = ||target||^2 + trace(T' H' H T),
// so that (-h^T s - s^T J s) + offset reproduces the objective exactly.
inline IsingProblem build_quadratic_ising(const Mat& h_mat, const Mat& t, const Vec& target) {
    const Mat ht = h_mat * t;
    IsingProblem p;
    Mat gram = ht.transpose() * ht;
    p.offset = target.squaredNorm() + gram.trace();
    p.h = 2.0 * ht.transpose() * target;
    gram.diagonal().setZero();
    p.J = -gram;
    return p;
}

inline IsingProblem build_delta_problem(const RealSystem& rs, const Vec& x_mmse,
                                        const DeltaSearchSpace& space) {
    if (rs.H.cols() != x_mmse.size()) throw std::invalid_argument("guess dimension mismatch");
    const Mat t = build_transform(space, static_cast<int>(x_mmse.size()) / 2);
    const Vec residual = rs.y - rs.H * x_mmse;
    return build_quadratic_ising(rs.H, t, residual);
}

// Baseline formulation over the full constellation: PAM levels encoded as
// weighted spin sums (4-QAM: s; 16-QAM: 2 s1 + s2).
inline std::vector<int> pam_spin_weights(const Constellation& c) {
    switch (c.order) {
        case 4: return {1};
        case 16: return {2, 1};
        default:
            throw std::invalid_argument("direct mapping supports only 4- and 16-QAM");
    }
}

inline IsingProblem build_direct_problem(const RealSystem& rs, const Constellation& c) {
    const Mat t = build_transform(pam_spin_weights(c), static_cast<int>(rs.H.cols()) / 2);
    return build_quadratic_ising(rs.H, t, rs.y);
}

// Converts the linear terms to quadratic via an auxiliary spin s_a:
// -(h^T s) s_a - s^T J s, with s_a stored at the last index.
inline AugmentedIsing augment_linear(const IsingProblem& p) {
    const Eigen::Index n = p.size();
    AugmentedIsing a;
    a.J = Mat::Zero(n + 1, n + 1);
    a.J.topLeftCorner(n, n) = p.J;
    a.J.col(n).head(n) = p.h / 2.0;
    a.J.row(n).head(n) = p.h.transpose() / 2.0;
    a.offset = p.offset;
    return a;
}

// s_hat = s_bar * s_a (elementwise).
inline Vec recover_spins(const Vec& s_bar, double s_a) {
    return s_bar * s_a;
}

// x = x_m + T s, rounded onto the constellation.
inline VecC spins_to_solution(const Vec& s, const Mat& t, const Vec& x_mmse,
                              const Constellation& c) {
    if (t.cols() != s.size() || t.rows() != x_mmse.size())
        throw std::invalid_argument("spin/transform dimension mismatch");
    return round_to_constellation(x_mmse + t * s, c);
}

}  // namespace dimimo
