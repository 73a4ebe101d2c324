#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "dimimo/constellation.hpp"
#include "dimimo/rng.hpp"

namespace dimimo {

using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Complex-valued uplink system y = H x + n.
struct ComplexSystem {
    MatC H;            // N_r x N_t channel
    VecC y;            // received vector
    double noise_var;  // sigma^2 per complex entry of n
    int n_tx = 0;
    int n_rx = 0;
};

// Real-valued equivalent: H is 2N_r x 2N_t with the block structure
// [Re -Im; Im Re], y = [Re(y); Im(y)], x = [Re(x); Im(x)].
struct RealSystem {
    Mat H;
    Vec y;
};

inline RealSystem complex_to_real(const ComplexSystem& cs) {
    const int nr = cs.n_rx;
    const int nt = cs.n_tx;
    RealSystem rs;
    rs.H.resize(2 * nr, 2 * nt);
    rs.H.topLeftCorner(nr, nt) = cs.H.real();
    rs.H.topRightCorner(nr, nt) = -cs.H.imag();
    rs.H.bottomLeftCorner(nr, nt) = cs.H.imag();
    rs.H.bottomRightCorner(nr, nt) = cs.H.real();
    rs.y.resize(2 * nr);
    rs.y.head(nr) = cs.y.real();
    rs.y.tail(nr) = cs.y.imag();
    return rs;
}

// Inverse of the x-part of the transform: x_k + i x_{k+N_t}.
inline VecC real_to_complex_symbols(const Vec& x) {
    if (x.size() % 2 != 0) throw std::invalid_argument("real vector must have even length");
    const Eigen::Index nt = x.size() / 2;
    VecC out(nt);
    for (Eigen::Index k = 0; k < nt; ++k) out(k) = cplx(x(k), x(k + nt));
    return out;
}

inline Vec complex_symbols_to_real(const VecC& x) {
    const Eigen::Index nt = x.size();
    Vec out(2 * nt);
    for (Eigen::Index k = 0; k < nt; ++k) {
        out(k) = x(k).real();
        out(k + nt) = x(k).imag();
    }
    return out;
}

// Rayleigh fading: i.i.d. CN(0, 1) entries.
inline MatC sample_channel(int n_tx, int n_rx, Rng& rng) {
    if (n_tx < 1 || n_rx < 1) throw std::invalid_argument("antenna counts must be positive");
    MatC h(n_rx, n_tx);
    const double s = std::sqrt(0.5);
    for (int i = 0; i < n_rx; ++i)
        for (int j = 0; j < n_tx; ++j) h(i, j) = cplx(s * rng.normal(), s * rng.normal());
    return h;
}

// Noise variance for a target average receive SNR per antenna, with
// unit-variance channel entries and the unnormalized constellation:
//   E||Hx||^2 / N_r = N_t E_s,  so  sigma^2 = N_t E_s / SNR_linear.
inline double noise_variance(int n_tx, double snr_db, const Constellation& c) {
    return double(n_tx) * c.avg_energy / std::pow(10.0, snr_db / 10.0);
}

inline ComplexSystem transmit(const MatC& h, const VecC& x, double snr_db,
                              const Constellation& c, Rng& rng) {
    ComplexSystem cs;
    cs.n_rx = static_cast<int>(h.rows());
    cs.n_tx = static_cast<int>(h.cols());
    cs.H = h;
    cs.noise_var = noise_variance(cs.n_tx, snr_db, c);
    const double s = std::sqrt(cs.noise_var / 2.0);
    cs.y = h * x;
    for (int i = 0; i < cs.n_rx; ++i) cs.y(i) += cplx(s * rng.normal(), s * rng.normal());
    return cs;
}

}  // namespace dimimo
