#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "dimimo/conv_code.hpp"
#include "dimimo/pipeline.hpp"

namespace dimimo {

// Worker count for experiment-level parallelism: CIM_MIMO_THREADS caps it,
// 0 or unset means hardware concurrency.
inline unsigned worker_count() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("CIM_MIMO_THREADS")) {
        const long v = std::atol(env);
        if (v > 0) n = static_cast<unsigned>(v);
    }
    return n;
}

// Index-space parallel for; results must be written to disjoint slots so
// the outcome is independent of scheduling.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

struct ExperimentConfig {
    int n_tx = 16;
    int n_rx = 16;
    int modulation = 16;                  // M
    std::vector<double> snr_grid_db;
    long total_bits = 100000;             // uncoded BER budget per SNR point
    int n_anneals = 64;
    int delta_reach = 2;                  // D = {-reach, ..., 0, ..., reach}
    std::vector<DetectorTag> detectors = {DetectorTag::MMSE, DetectorTag::DI};
    std::uint64_t master_seed = 1;
    int block_len = 1024;                 // info bits per coded block
    int n_blocks = 200;                   // coded blocks per (M, rate, SNR)
    CimParams cim = default_params();
};

struct ResultRow {
    std::string detector;
    std::string modulation;   // "2".."256", or "AMC" for envelope rows
    std::string code_rate;    // "-" for uncoded rows
    double snr_db = 0.0;
    double ber = 0.0;
    double bler = 0.0;
    double throughput = 0.0;  // bits per channel use
    long bits = 0;
    long instances = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::vector<std::uint8_t> random_bits(std::size_t n, Rng& rng) {
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) b = rng.bit() ? 1 : 0;
    return bits;
}

inline long count_bit_errors(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    long errs = 0;
    for (std::size_t i = 0; i < a.size(); ++i) errs += a[i] != b[i];
    return errs;
}

// Stable sub-seed for one unit of work inside an experiment.
inline std::uint64_t work_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return child_seed(child_seed(master, a), b);
}

inline DetectionReport run_detector(DetectorTag tag, const ComplexSystem& cs,
                                    const Constellation& c, const ExperimentConfig& cfg,
                                    std::uint64_t anneal_seed) {
    switch (tag) {
        case DetectorTag::MMSE: return mmse_detect(cs, c).second;
        case DetectorTag::DI:
            return detect_di_mimo(cs, c, make_delta_space(cfg.delta_reach), cfg.cim,
                                  cfg.n_anneals, anneal_seed);
        case DetectorTag::DIRECT:
            return detect_direct(cs, c, cfg.cim, cfg.n_anneals, anneal_seed);
        case DetectorTag::ORACLE: return ml_oracle(cs, c);
    }
    throw std::invalid_argument("unknown detector");
}

}  // namespace detail

// Uncoded BER sweep: one fresh Rayleigh channel per vector symbol, every
// configured detector sees the same channel and noise realization.
inline std::vector<ResultRow> ber_experiment(const ExperimentConfig& cfg) {
    const Constellation c = make_constellation(cfg.modulation);
    const long bits_per_instance = static_cast<long>(cfg.n_tx) * c.bits_per_symbol;
    const long n_instances = cfg.total_bits / bits_per_instance;
    if (n_instances < 1) throw std::invalid_argument("total_bits below one vector symbol");
    const std::size_t n_det = cfg.detectors.size();

    std::vector<ResultRow> rows;
    for (std::size_t si = 0; si < cfg.snr_grid_db.size(); ++si) {
        const double snr_db = cfg.snr_grid_db[si];
        std::vector<std::vector<long>> errors(static_cast<std::size_t>(n_instances),
                                              std::vector<long>(n_det, 0));
        parallel_for(static_cast<std::size_t>(n_instances), [&](std::size_t inst) {
            const std::uint64_t iseed = detail::work_seed(cfg.master_seed, si, inst);
            Rng rng(iseed);
            const auto bits = detail::random_bits(static_cast<std::size_t>(bits_per_instance), rng);
            const VecC x = Eigen::Map<const VecC>(modulate(bits, c).data(), cfg.n_tx);
            const MatC h = sample_channel(cfg.n_tx, cfg.n_rx, rng);
            const ComplexSystem cs = transmit(h, x, snr_db, c, rng);
            for (std::size_t d = 0; d < n_det; ++d) {
                const auto rep = detail::run_detector(cfg.detectors[d], cs, c, cfg,
                                                      child_seed(iseed, 7));
                std::vector<cplx> sym(rep.symbols.data(), rep.symbols.data() + cfg.n_tx);
                errors[inst][d] = detail::count_bit_errors(bits, demodulate(sym, c));
            }
        });
        for (std::size_t d = 0; d < n_det; ++d) {
            long errs = 0;
            for (long i = 0; i < n_instances; ++i) errs += errors[static_cast<std::size_t>(i)][d];
            ResultRow row;
            row.detector = to_string(cfg.detectors[d]);
            row.modulation = std::to_string(cfg.modulation);
            row.code_rate = "-";
            row.snr_db = snr_db;
            row.bits = n_instances * bits_per_instance;
            row.ber = double(errs) / double(row.bits);
            row.instances = n_instances;
            row.seed = cfg.master_seed;
            rows.push_back(row);
        }
    }
    return rows;
}

namespace detail {

// One coded block end to end; returns per-detector block-error flags.
inline std::vector<bool> coded_block(const ExperimentConfig& cfg, const Constellation& c,
                                     CodeRate rate, double snr_db, std::uint64_t block_seed) {
    Rng rng(block_seed);
    const auto info = random_bits(static_cast<std::size_t>(cfg.block_len), rng);
    const auto coded = conv_encode(info, rate);

    // Seeded uniform interleaver over the coded block.
    std::vector<std::size_t> perm(coded.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[rng.uniform_int(i)]);

    const std::size_t bits_per_use = static_cast<std::size_t>(cfg.n_tx) *
                                     static_cast<std::size_t>(c.bits_per_symbol);
    const std::size_t n_uses = (coded.size() + bits_per_use - 1) / bits_per_use;
    // Interleave into the frame; pad positions past the coded block stay 0.
    std::vector<std::uint8_t> tx(n_uses * bits_per_use, 0);
    for (std::size_t i = 0; i < coded.size(); ++i) tx[perm[i]] = coded[i];

    const std::size_t n_det = cfg.detectors.size();
    std::vector<std::vector<std::uint8_t>> rx(n_det,
                                              std::vector<std::uint8_t>(tx.size(), 0));
    for (std::size_t use = 0; use < n_uses; ++use) {
        std::vector<std::uint8_t> frame(tx.begin() + static_cast<long>(use * bits_per_use),
                                        tx.begin() + static_cast<long>((use + 1) * bits_per_use));
        const VecC x = Eigen::Map<const VecC>(modulate(frame, c).data(), cfg.n_tx);
        const MatC h = sample_channel(cfg.n_tx, cfg.n_rx, rng);
        const ComplexSystem cs = transmit(h, x, snr_db, c, rng);
        for (std::size_t d = 0; d < n_det; ++d) {
            const auto rep = run_detector(cfg.detectors[d], cs, c, cfg,
                                          child_seed(block_seed, 100 + use));
            std::vector<cplx> sym(rep.symbols.data(), rep.symbols.data() + cfg.n_tx);
            const auto bits = demodulate(sym, c);
            std::copy(bits.begin(), bits.end(), rx[d].begin() + static_cast<long>(use * bits_per_use));
        }
    }

    std::vector<bool> block_error(n_det, false);
    for (std::size_t d = 0; d < n_det; ++d) {
        std::vector<std::uint8_t> deinterleaved(coded.size());
        for (std::size_t i = 0; i < coded.size(); ++i) deinterleaved[i] = rx[d][perm[i]];
        const auto decoded = viterbi_decode(deinterleaved, rate, static_cast<std::size_t>(cfg.block_len));
        block_error[d] = decoded != info;
    }
    return block_error;
}

}  // namespace detail

inline const std::vector<int>& amc_modulation_menu() {
    static const std::vector<int> menu = {2, 4, 16, 64, 256};
    return menu;
}

inline const std::vector<CodeRate>& amc_rate_menu() {
    static const std::vector<CodeRate> menu = {CodeRate::R1_3, CodeRate::R1_2, CodeRate::R2_3};
    return menu;
}

// Oracle-AMC spectral efficiency: simulate every (modulation, rate) pair at
// every SNR, emit the per-pair rows and the per-detector envelope rows
// (tagged modulation=AMC). throughput = N_t log2(M) r (1 - BLER).
inline std::vector<ResultRow> amc_experiment(const ExperimentConfig& cfg) {
    const std::size_t n_det = cfg.detectors.size();
    std::vector<ResultRow> rows;
    for (std::size_t si = 0; si < cfg.snr_grid_db.size(); ++si) {
        const double snr_db = cfg.snr_grid_db[si];
        std::vector<ResultRow> best(n_det);
        for (std::size_t d = 0; d < n_det; ++d) best[d].throughput = -1.0;
        std::size_t mcs_index = 0;
        for (int m : amc_modulation_menu()) {
            const Constellation c = make_constellation(m);
            for (CodeRate rate : amc_rate_menu()) {
                std::vector<std::vector<bool>> block_errs(
                    static_cast<std::size_t>(cfg.n_blocks));
                parallel_for(static_cast<std::size_t>(cfg.n_blocks), [&](std::size_t blk) {
                    const std::uint64_t seed = detail::work_seed(
                        cfg.master_seed, (si << 8) | mcs_index, blk);
                    block_errs[blk] = detail::coded_block(cfg, c, rate, snr_db, seed);
                });
                for (std::size_t d = 0; d < n_det; ++d) {
                    long errs = 0;
                    for (const auto& be : block_errs) errs += be[d] ? 1 : 0;
                    ResultRow row;
                    row.detector = to_string(cfg.detectors[d]);
                    row.modulation = std::to_string(m);
                    row.code_rate = to_string(rate);
                    row.snr_db = snr_db;
                    row.bler = double(errs) / double(cfg.n_blocks);
                    row.throughput = double(cfg.n_tx) * c.bits_per_symbol * rate_value(rate) *
                                     (1.0 - row.bler);
                    row.instances = cfg.n_blocks;
                    row.seed = cfg.master_seed;
                    rows.push_back(row);
                    if (row.throughput > best[d].throughput) {
                        best[d] = row;
                        best[d].modulation = "AMC";
                    }
                }
                ++mcs_index;
            }
        }
        for (std::size_t d = 0; d < n_det; ++d) rows.push_back(best[d]);
    }
    return rows;
}

struct OracleCompareRow {
    long instance = 0;
    double obj_mmse = 0.0;
    double obj_di = 0.0;
    double obj_oracle = 0.0;
    bool match = false;
};

// Validation fixture: DI objective against the exhaustive ML objective on
// enumerable instances. Uses the first SNR grid entry.
inline std::vector<OracleCompareRow> oracle_compare_experiment(const ExperimentConfig& cfg,
                                                               long n_instances) {
    const Constellation c = make_constellation(cfg.modulation);
    if (static_cast<long>(cfg.n_tx) * c.bits_per_symbol > 24)
        throw std::invalid_argument("oracle comparison needs N_t*log2(M) <= 24");
    if (cfg.snr_grid_db.empty()) throw std::invalid_argument("SNR grid is empty");
    const double snr_db = cfg.snr_grid_db.front();
    std::vector<OracleCompareRow> rows(static_cast<std::size_t>(n_instances));
    parallel_for(static_cast<std::size_t>(n_instances), [&](std::size_t inst) {
        const std::uint64_t iseed = detail::work_seed(cfg.master_seed, 0, inst);
        Rng rng(iseed);
        const auto bits = detail::random_bits(
            static_cast<std::size_t>(cfg.n_tx) * static_cast<std::size_t>(c.bits_per_symbol), rng);
        const VecC x = Eigen::Map<const VecC>(modulate(bits, c).data(), cfg.n_tx);
        const MatC h = sample_channel(cfg.n_tx, cfg.n_rx, rng);
        const ComplexSystem cs = transmit(h, x, snr_db, c, rng);
        OracleCompareRow& row = rows[inst];
        row.instance = static_cast<long>(inst);
        row.obj_mmse = mmse_detect(cs, c).second.objective;
        row.obj_di = detect_di_mimo(cs, c, make_delta_space(cfg.delta_reach), cfg.cim,
                                    cfg.n_anneals, child_seed(iseed, 7))
                         .objective;
        row.obj_oracle = ml_oracle(cs, c).objective;
        row.match = row.obj_di <= row.obj_oracle + 1e-9;
    });
    return rows;
}

}  // namespace dimimo
