#pragma once

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dimimo/constellation.hpp"
#include "dimimo/system.hpp"

namespace dimimo {

enum class DetectorTag { MMSE, DI, DIRECT, ORACLE };

inline const char* to_string(DetectorTag t) {
    switch (t) {
        case DetectorTag::MMSE: return "MMSE";
        case DetectorTag::DI: return "DI";
        case DetectorTag::DIRECT: return "DIRECT";
        case DetectorTag::ORACLE: return "ORACLE";
    }
    return "?";
}

struct DetectionReport {
    VecC symbols;       // hard decisions, on the constellation
    Vec real_solution;  // pre-rounding real-domain estimate
    double objective = 0.0;
    DetectorTag tag = DetectorTag::MMSE;
};

inline double objective(const ComplexSystem& cs, const VecC& x) {
    if (x.size() != cs.n_tx) throw std::invalid_argument("candidate dimension mismatch");
    return (cs.y - cs.H * x).squaredNorm();
}

// Snap one real coordinate to the nearest level in `levels` (ascending).
// Exact midpoints break toward the smaller-magnitude level; the midpoint at
// zero breaks toward the negative level.
inline int round_to_level(double v, const std::vector<int>& levels) {
    int best = levels.front();
    double best_d = std::abs(v - best);
    for (std::size_t i = 1; i < levels.size(); ++i) {
        const double d = std::abs(v - levels[i]);
        if (d < best_d) {
            best = levels[i];
            best_d = d;
        } else if (d == best_d) {
            const int cand = levels[i];
            if (std::abs(cand) < std::abs(best)) best = cand;
            // equal magnitudes (midpoint at 0): keep the negative one,
            // which is `best` since levels ascend
        }
    }
    return best;
}

// Per-coordinate rounding of a real-domain vector onto the constellation,
// clamping anything outside the grid. BPSK forces the Q coordinates to 0.
inline VecC round_to_constellation(const Vec& x, const Constellation& c) {
    if (x.size() % 2 != 0) throw std::invalid_argument("real vector must have even length");
    const Eigen::Index nt = x.size() / 2;
    VecC out(nt);
    for (Eigen::Index k = 0; k < nt; ++k) {
        const int i_level = round_to_level(x(k), c.pam_levels);
        const int q_level = c.has_q_axis ? round_to_level(x(k + nt), c.pam_levels) : 0;
        out(k) = cplx(i_level, q_level);
    }
    return out;
}

// LMMSE estimate in the complex domain,
//   x_m = (H^H H + (sigma^2 / E_s) I)^-1 H^H y,
// returned as the real-domain vector together with its hard decision.
inline std::pair<Vec, DetectionReport> mmse_detect(const ComplexSystem& cs, const Constellation& c) {
    MatC gram = cs.H.adjoint() * cs.H;
    gram.diagonal().array() += cs.noise_var / c.avg_energy;
    const VecC rhs = cs.H.adjoint() * cs.y;
    const VecC xm = gram.ldlt().solve(rhs);
    if ((gram * xm - rhs).norm() > 1e-8 * (1.0 + rhs.norm()))
        throw std::runtime_error("MMSE solve failed residual check");
    DetectionReport rep;
    rep.tag = DetectorTag::MMSE;
    rep.real_solution = complex_symbols_to_real(xm);
    rep.symbols = round_to_constellation(rep.real_solution, c);
    rep.objective = objective(cs, rep.symbols);
    return {rep.real_solution, rep};
}

// Exhaustive ML search over Phi^{N_t}. Refuses above 24 bits of search
// space; this is a ground-truth fixture, not a practical detector.
inline DetectionReport ml_oracle(const ComplexSystem& cs, const Constellation& c) {
    const int nt = cs.n_tx;
    const long bits = static_cast<long>(nt) * c.bits_per_symbol;
    if (bits > 24)
        throw std::invalid_argument("ml_oracle budget exceeded: " + std::to_string(bits) +
                                    " bits > 24");
    // Enumerate symbols per user in lexicographic (I index, Q index) order.
    std::vector<cplx> alphabet;
    for (int li : c.pam_levels) {
        if (!c.has_q_axis) {
            alphabet.emplace_back(li, 0.0);
            continue;
        }
        for (int lq : c.pam_levels) alphabet.emplace_back(li, lq);
    }
    const std::size_t m = alphabet.size();
    std::vector<std::size_t> idx(static_cast<std::size_t>(nt), 0);
    VecC cand(nt);
    for (int k = 0; k < nt; ++k) cand(k) = alphabet[0];
    VecC best = cand;
    double best_obj = objective(cs, cand);
    while (true) {
        // advance the odometer
        int k = nt - 1;
        while (k >= 0) {
            idx[static_cast<std::size_t>(k)]++;
            if (idx[static_cast<std::size_t>(k)] < m) {
                cand(k) = alphabet[idx[static_cast<std::size_t>(k)]];
                break;
            }
            idx[static_cast<std::size_t>(k)] = 0;
            cand(k) = alphabet[0];
            --k;
        }
        if (k < 0) break;
        const double obj = objective(cs, cand);
        if (obj < best_obj) {  // strict: ties keep the lexicographically first
            best_obj = obj;
            best = cand;
        }
    }
    DetectionReport rep;
    rep.tag = DetectorTag::ORACLE;
    rep.symbols = best;
    rep.real_solution = complex_symbols_to_real(best);
    rep.objective = best_obj;
    return rep;
}

}  // namespace dimimo
