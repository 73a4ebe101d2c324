#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dimimo/cim.hpp"
#include "dimimo/constellation.hpp"
#include "dimimo/detectors.hpp"
#include "dimimo/ising.hpp"
#include "dimimo/system.hpp"

namespace dimimo {

namespace detail {

// Shared candidate-selection stage: decode every healthy anneal, then pick
// the pool member with the lowest ML objective. The rounded MMSE decision
// sits last in the pool, so it wins only when strictly better; the result
// can therefore never be worse than MMSE.
inline DetectionReport select_best(const ComplexSystem& cs, const Constellation& c,
                                   const std::vector<AnnealResult>& batch, const Mat& transform,
                                   const Vec& center, const DetectionReport& mmse_report,
                                   DetectorTag tag) {
    DetectionReport best;
    bool have = false;
    for (const AnnealResult& r : batch) {
        if (r.failed) continue;
        const Eigen::Index n = r.spins.size() - 1;
        const Vec s_hat = recover_spins(r.spins.head(n), r.spins(n));
        const VecC symbols = spins_to_solution(s_hat, transform, center, c);
        const double obj = objective(cs, symbols);
        if (!have || obj < best.objective) {
            best.symbols = symbols;
            best.real_solution = center + transform * s_hat;
            best.objective = obj;
            have = true;
        }
    }
    if (!have || mmse_report.objective < best.objective) {
        best.symbols = mmse_report.symbols;
        best.real_solution = mmse_report.real_solution;
        best.objective = mmse_report.objective;
    }
    best.tag = tag;
    return best;
}

}  // namespace detail

// Full DI-MIMO detection: MMSE guess, delta-Ising problem around it,
// N_a CIM anneals, best-of-pool selection.
inline DetectionReport detect_di_mimo(const ComplexSystem& cs, const Constellation& c,
                                      const DeltaSearchSpace& space, const CimParams& params,
                                      int n_anneals, std::uint64_t seed) {
    const auto [x_m, mmse_report] = mmse_detect(cs, c);
    (void)x_m;
    // The search is centered on the MMSE hard decision, not the raw MMSE
    // output: d = u - x_m is an even integer only between constellation
    // points, and with a lattice center the Ising energy equals the true ML
    // objective of the decoded point (no rounding distortion afterwards).
    const Vec center = complex_symbols_to_real(mmse_report.symbols);
    const RealSystem rs = complex_to_real(cs);
    const AugmentedIsing aug = augment_linear(build_delta_problem(rs, center, space));
    const auto batch = run_candidates(aug, n_anneals, params, seed);
    const Mat t = build_transform(space, cs.n_tx);
    return detail::select_best(cs, c, batch, t, center, mmse_report, DetectorTag::DI);
}

// Baseline pipeline with the direct constellation-to-spin mapping. The
// rounded MMSE decision is kept in the pool for a like-for-like comparison
// with DI-MIMO; pass include_mmse = false for the bare mapping.
inline DetectionReport detect_direct(const ComplexSystem& cs, const Constellation& c,
                                     const CimParams& params, int n_anneals, std::uint64_t seed,
                                     bool include_mmse = true) {
    const auto [x_m, mmse_report] = mmse_detect(cs, c);
    (void)x_m;
    const RealSystem rs = complex_to_real(cs);
    const AugmentedIsing aug = augment_linear(build_direct_problem(rs, c));
    const auto batch = run_candidates(aug, n_anneals, params, seed);
    const Mat t = build_transform(pam_spin_weights(c), cs.n_tx);
    const Vec center = Vec::Zero(2 * cs.n_tx);
    DetectionReport worst_mmse = mmse_report;
    if (!include_mmse) worst_mmse.objective = std::numeric_limits<double>::infinity();
    DetectionReport rep =
        detail::select_best(cs, c, batch, t, center, worst_mmse, DetectorTag::DIRECT);
    return rep;
}

struct TraceRow {
    std::string formulation;  // "DI" or "DIRECT"
    int step = 0;
    double t = 0.0;
    int user = 0;
    double i_value = 0.0;
    double q_value = 0.0;
};

// One traced anneal per formulation from a shared seed; emits the decoded
// (pre-rounding) I/Q value of every user at every step.
inline std::vector<TraceRow> trajectory_capture(const ComplexSystem& cs, const Constellation& c,
                                                const std::vector<DetectorTag>& formulations,
                                                const CimParams& params, std::uint64_t seed) {
    const auto [x_m, mmse_report] = mmse_detect(cs, c);
    (void)x_m;
    const RealSystem rs = complex_to_real(cs);
    std::vector<TraceRow> rows;
    for (DetectorTag tag : formulations) {
        Mat t;
        Vec center;
        AugmentedIsing aug;
        if (tag == DetectorTag::DI) {
            const DeltaSearchSpace space = make_delta_space(2);
            center = complex_symbols_to_real(mmse_report.symbols);  // lattice center
            aug = augment_linear(build_delta_problem(rs, center, space));
            t = build_transform(space, cs.n_tx);
        } else if (tag == DetectorTag::DIRECT) {
            aug = augment_linear(build_direct_problem(rs, c));
            t = build_transform(pam_spin_weights(c), cs.n_tx);
            center = Vec::Zero(2 * cs.n_tx);
        } else {
            throw std::invalid_argument("trajectory capture supports DI and DIRECT only");
        }
        Rng rng(child_seed(seed, 0));
        const AnnealResult res = anneal(aug, params, rng, /*capture_trace=*/true);
        const Eigen::Index n = aug.size() - 1;
        for (std::size_t step = 0; step < res.trace_x.size(); ++step) {
            const Vec spins = detail::signs(res.trace_x[step]);
            const Vec u = center + t * recover_spins(spins.head(n), spins(n));
            for (int k = 0; k < cs.n_tx; ++k) {
                TraceRow row;
                row.formulation = to_string(tag);
                row.step = static_cast<int>(step);
                row.t = static_cast<double>(step) * params.dt;
                row.user = k;
                row.i_value = u(k);
                row.q_value = u(k + cs.n_tx);
                rows.push_back(row);
            }
        }
    }
    return rows;
}

}  // namespace dimimo
