#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dimimo/ising.hpp"
#include "dimimo/rng.hpp"

namespace dimimo {

// ODE parameters of the amplitude-heterogeneity-corrected CIM model:
//   dx_i/dt = (1-p) x_i - x_i^3 + eps(t) e_i sum_{j!=i} J_ij x_j
//   de_i/dt = -beta (x_i^2 - a) e_i
// with a linear coupling ramp eps(t) = gamma * t.
struct CimParams {
    double pump = 0.98;        // p
    double beta = 1.0;
    double target_sq = 2.0;    // a
    double gamma = 1000.0 / 2.56;
    double dt = 0.01;
    int steps = 256;
    double init_sigma = std::sqrt(0.001);
};

inline CimParams default_params() { return CimParams{}; }

inline double epsilon_at(double t, const CimParams& params) { return params.gamma * t; }

struct AnnealResult {
    Vec spins;    // sign(final_x), sign(0) = +1
    Vec final_x;
    bool failed = false;       // non-finite state encountered
    long floor_hits = 0;       // times the e-floor bound
    // Optional per-step capture, row per step: x state (and e state).
    std::vector<Vec> trace_x;
    std::vector<Vec> trace_e;
};

namespace detail {

constexpr double kErrorFloor = 1e-12;

// Integrates `width` independent anneals side by side; column k was
// initialized from its own rng. Both state updates in a step use the state
// at the step's start (explicit forward Euler on the coupled system); the
// ramp is sampled at the step's start time.
inline void integrate_batch(const Mat& coupling, const CimParams& params, Mat& x, Mat& e,
                            long& floor_hits, std::vector<Vec>* trace_x,
                            std::vector<Vec>* trace_e) {
    const double dt = params.dt;
    const double lin = 1.0 - params.pump;
    Mat jx(x.rows(), x.cols());
    Mat dx(x.rows(), x.cols());
    for (int step = 0; step < params.steps; ++step) {
        if (trace_x) trace_x->push_back(x.col(0));
        if (trace_e) trace_e->push_back(e.col(0));
        const double eps = epsilon_at(step * dt, params);
        jx.noalias() = coupling * x;
        dx = lin * x.array() - x.array().cube() + eps * e.array() * jx.array();
        e.array() += dt * (-params.beta * (x.array().square() - params.target_sq) * e.array());
        x.array() += dt * dx.array();
        const long low = (e.array() < kErrorFloor).count();
        if (low > 0) {
            floor_hits += low;
            e = e.array().max(kErrorFloor);
        }
    }
    if (trace_x) trace_x->push_back(x.col(0));
    if (trace_e) trace_e->push_back(e.col(0));
}

inline void init_state(Eigen::Ref<Vec> x, Eigen::Ref<Vec> e, const CimParams& params, Rng& rng) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.normal(0.0, params.init_sigma);
    for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = std::abs(rng.normal(0.0, params.init_sigma));
}

inline Vec signs(const Vec& x) {
    Vec s(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) s(i) = x(i) < 0.0 ? -1.0 : 1.0;
    return s;
}

}  // namespace detail

inline AnnealResult anneal(const AugmentedIsing& prob, const CimParams& params, Rng& rng,
                           bool capture_trace = false) {
    if (params.dt <= 0.0 || params.steps < 1) throw std::invalid_argument("bad CIM parameters");
    const Eigen::Index n = prob.size();
    Mat x(n, 1), e(n, 1);
    detail::init_state(x.col(0), e.col(0), params, rng);
    AnnealResult res;
    detail::integrate_batch(prob.J, params, x, e, res.floor_hits,
                            capture_trace ? &res.trace_x : nullptr,
                            capture_trace ? &res.trace_e : nullptr);
    res.final_x = x.col(0);
    res.failed = !res.final_x.allFinite();
    res.spins = detail::signs(res.final_x);
    return res;
}

namespace detail {

// One matrix-batched round of anneals with child seeds k0 .. k0+width-1.
inline std::vector<AnnealResult> run_batch_offset(const AugmentedIsing& prob, int width,
                                                  const CimParams& params,
                                                  std::uint64_t master_seed, int k0) {
    const Eigen::Index n = prob.size();
    Mat x(n, width), e(n, width);
    for (int k = 0; k < width; ++k) {
        Rng rng(child_seed(master_seed, static_cast<std::uint64_t>(k0 + k)));
        init_state(x.col(k), e.col(k), params, rng);
    }
    long floor_hits = 0;
    integrate_batch(prob.J, params, x, e, floor_hits, nullptr, nullptr);
    std::vector<AnnealResult> out(static_cast<std::size_t>(width));
    for (int k = 0; k < width; ++k) {
        AnnealResult& r = out[static_cast<std::size_t>(k)];
        r.final_x = x.col(k);
        r.failed = !r.final_x.allFinite();
        r.spins = detail::signs(r.final_x);
        r.floor_hits = k == 0 ? floor_hits : 0;
    }
    return out;
}

}  // namespace detail

// N_a independent anneals; anneal k is seeded from child k of master_seed,
// results ordered by k. The batch is integrated as one matrix so the inner
// loop is a GEMM.
inline std::vector<AnnealResult> run_batch(const AugmentedIsing& prob, int n_anneals,
                                           const CimParams& params, std::uint64_t master_seed) {
    if (n_anneals < 1) throw std::invalid_argument("need at least one anneal");
    return detail::run_batch_offset(prob, n_anneals, params, master_seed, 0);
}

// Collects `n_candidates` healthy (finite) anneal results. A physical Ising
// machine emits a spin readout on every run; in the numerical model a run
// whose forward-Euler trajectory overflows carries no usable state, so it is
// discarded and a fresh anneal with the next child seed takes its slot. Gives
// up once 8*n_candidates anneals have been spent and returns what it has;
// the margin fills the pool even at the ~75% divergence rates seen on
// large 64-QAM problems.
inline std::vector<AnnealResult> run_candidates(const AugmentedIsing& prob, int n_candidates,
                                                const CimParams& params,
                                                std::uint64_t master_seed) {
    if (n_candidates < 1) throw std::invalid_argument("need at least one candidate");
    const int cap = 8 * n_candidates;
    std::vector<AnnealResult> healthy;
    healthy.reserve(static_cast<std::size_t>(n_candidates));
    int next_k = 0;
    while (static_cast<int>(healthy.size()) < n_candidates && next_k < cap) {
        const int want = n_candidates - static_cast<int>(healthy.size());
        const int width = std::min(want, cap - next_k);
        auto round = detail::run_batch_offset(prob, width, params, master_seed, next_k);
        for (auto& r : round)
            if (!r.failed) healthy.push_back(std::move(r));
        next_k += width;
    }
    return healthy;
}

}  // namespace dimimo
