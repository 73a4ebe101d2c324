// Command-line front end for the DI-MIMO link simulator.
//
// Subcommands:
//   ber             uncoded BER sweep over an SNR grid
//   throughput      oracle-AMC spectral efficiency sweep
//   trajectory      per-step decoded I/Q trace of one CIM anneal
//   oracle-compare  DI objective vs exhaustive ML on small instances
//
// Exit codes: 0 success, 2 configuration error, 3 runtime failure.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <vector>

#include "dimimo/csv.hpp"
#include "dimimo/version.hpp"

namespace {

struct CliOptions {
    dimimo::ExperimentConfig cfg;
    std::string snr_spec;
    std::string out_path = "-";
    std::string detector_list = "MMSE,DI";
    long instances = 200;  // oracle-compare only
    std::string config_path;
    bool mod_set = false;
};

// Expands a flat key=value config file into command-line tokens.  Keys the
// user already passed as flags are skipped, so explicit flags win.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file: " + path);
    const auto strip = [](const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string line;
    while (std::getline(in, line)) {
        line = strip(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("bad config line (expected key=value): " + line);
        const std::string flag = "--" + strip(line.substr(0, eq));
        const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
        if (!given) {
            args.push_back(flag);
            args.push_back(strip(line.substr(eq + 1)));
        }
    }
    return args;
}

dimimo::DetectorTag parse_detector(const std::string& name) {
    if (name == "MMSE") return dimimo::DetectorTag::MMSE;
    if (name == "DI") return dimimo::DetectorTag::DI;
    if (name == "DIRECT") return dimimo::DetectorTag::DIRECT;
    if (name == "ORACLE") return dimimo::DetectorTag::ORACLE;
    throw std::invalid_argument("unknown detector '" + name + "'");
}

std::vector<dimimo::DetectorTag> parse_detectors(const std::string& list) {
    std::vector<dimimo::DetectorTag> out;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        const auto comma = list.find(',', pos);
        const auto end = comma == std::string::npos ? list.size() : comma;
        if (end > pos) out.push_back(parse_detector(list.substr(pos, end - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw std::invalid_argument("detector list is empty");
    return out;
}

void add_common(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--nt", o.cfg.n_tx, "transmit antennas / users");
    cmd->add_option("--nr", o.cfg.n_rx, "receive antennas");
    cmd->add_option("--mod", o.cfg.modulation, "modulation order M");
    cmd->add_option("--snr", o.snr_spec, "SNR grid in dB, start:step:stop or a single value");
    cmd->add_option("--na", o.cfg.n_anneals, "anneals per instance");
    cmd->add_option("--reach", o.cfg.delta_reach, "delta search reach (2 -> {-2,0,2})");
    cmd->add_option("--seed", o.cfg.master_seed, "master seed");
    cmd->add_option("--detectors", o.detector_list, "comma list: MMSE,DI,DIRECT,ORACLE");
    cmd->add_option("--out", o.out_path, "output CSV path ('-' for stdout)");
    cmd->add_option("--config", o.config_path, "flat key=value config file; flags override");
}

std::string iso_utc(std::chrono::system_clock::time_point tp) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Sidecar run manifest next to each output file: what ran, with which
// resolved settings, when, and where the data went.
void write_manifest(const std::string& command, const CliOptions& o,
                    std::chrono::system_clock::time_point start) {
    if (o.out_path == "-") return;
    std::ofstream os(o.out_path + ".manifest.json", std::ios::binary);
    if (!os) return;  // the manifest is best-effort; the data file already exists
    os << "{\n"
       << "  \"command\": \"" << command << "\",\n"
       << "  \"version\": \"" << DIMIMO_VERSION << "\",\n"
       << "  \"config\": {\n"
       << "    \"nt\": " << o.cfg.n_tx << ",\n"
       << "    \"nr\": " << o.cfg.n_rx << ",\n"
       << "    \"mod\": " << o.cfg.modulation << ",\n"
       << "    \"snr\": \"" << o.snr_spec << "\",\n"
       << "    \"na\": " << o.cfg.n_anneals << ",\n"
       << "    \"reach\": " << o.cfg.delta_reach << ",\n"
       << "    \"bits\": " << o.cfg.total_bits << ",\n"
       << "    \"blocks\": " << o.cfg.n_blocks << ",\n"
       << "    \"block_len\": " << o.cfg.block_len << ",\n"
       << "    \"detectors\": \"" << o.detector_list << "\"\n"
       << "  },\n"
       << "  \"seed\": " << o.cfg.master_seed << ",\n"
       << "  \"started\": \"" << iso_utc(start) << "\",\n"
       << "  \"finished\": \"" << iso_utc(std::chrono::system_clock::now()) << "\",\n"
       << "  \"outputs\": [\"" << o.out_path << "\"]\n"
       << "}\n";
}

int write_output(const std::string& path, const std::function<void(std::ostream&)>& writer) {
    if (path == "-") {
        writer(std::cout);
        return 0;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        std::cerr << "cannot open output file: " << path << "\n";
        return 3;
    }
    writer(os);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    const auto start_time = std::chrono::system_clock::now();
    CLI::App app{"Delta-Ising MIMO detection on a simulated Coherent Ising Machine"};
    app.require_subcommand(1);

    CliOptions o;
    auto* ber = app.add_subcommand("ber", "uncoded BER sweep");
    add_common(ber, o);
    ber->add_option("--bits", o.cfg.total_bits, "total bits per SNR point");

    auto* tput = app.add_subcommand("throughput", "oracle-AMC spectral efficiency sweep");
    add_common(tput, o);
    tput->add_option("--blocks", o.cfg.n_blocks, "coded blocks per (modulation, rate, SNR)");
    tput->add_option("--block-len", o.cfg.block_len, "info bits per coded block");

    auto* traj = app.add_subcommand("trajectory", "decoded I/Q trace of one anneal");
    add_common(traj, o);

    auto* oracle = app.add_subcommand("oracle-compare", "DI vs exhaustive ML objectives");
    add_common(oracle, o);
    oracle->add_option("--instances", o.instances, "number of random instances");

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
        app.parse(args);
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        o.mod_set = !active->get_option("--mod")->empty();
        if (!o.mod_set && !(tput->parsed())) {  // throughput sweeps the whole menu
            std::cerr << "modulation required\n";
            return 2;
        }
        if (o.snr_spec.empty()) {
            std::cerr << "snr grid required\n";
            return 2;
        }
        o.cfg.detectors = parse_detectors(o.detector_list);
        try {
            o.cfg.snr_grid_db = dimimo::parse_snr_grid(o.snr_spec);
            if (!tput->parsed()) (void)dimimo::make_constellation(o.cfg.modulation);
            (void)dimimo::make_delta_space(o.cfg.delta_reach);
        } catch (const std::exception& e) {
            std::cerr << e.what() << "\n";
            return 2;
        }

        if (ber->parsed()) {
            const auto rows = dimimo::ber_experiment(o.cfg);
            const int rc = write_output(o.out_path,
                                        [&](std::ostream& os) { dimimo::write_ber_csv(rows, os); });
            if (rc == 0) write_manifest("ber", o, start_time);
            return rc;
        }
        if (tput->parsed()) {
            const auto rows = dimimo::amc_experiment(o.cfg);
            const int rc = write_output(
                o.out_path, [&](std::ostream& os) { dimimo::write_throughput_csv(rows, os); });
            if (rc == 0) write_manifest("throughput", o, start_time);
            return rc;
        }
        if (traj->parsed()) {
            const auto c = dimimo::make_constellation(o.cfg.modulation);
            dimimo::Rng rng(o.cfg.master_seed);
            const auto bits = dimimo::detail::random_bits(
                static_cast<std::size_t>(o.cfg.n_tx) * static_cast<std::size_t>(c.bits_per_symbol),
                rng);
            const dimimo::VecC x = Eigen::Map<const dimimo::VecC>(
                dimimo::modulate(bits, c).data(), o.cfg.n_tx);
            const dimimo::MatC h = dimimo::sample_channel(o.cfg.n_tx, o.cfg.n_rx, rng);
            const auto cs = dimimo::transmit(h, x, o.cfg.snr_grid_db.front(), c, rng);
            std::vector<dimimo::DetectorTag> formulations;
            if (traj->get_option("--detectors")->empty()) {
                formulations = {dimimo::DetectorTag::DI, dimimo::DetectorTag::DIRECT};
            } else {
                for (auto t : o.cfg.detectors)
                    if (t == dimimo::DetectorTag::DI || t == dimimo::DetectorTag::DIRECT)
                        formulations.push_back(t);
                if (formulations.empty())
                    formulations = {dimimo::DetectorTag::DI, dimimo::DetectorTag::DIRECT};
            }
            const auto rows = dimimo::trajectory_capture(cs, c, formulations, o.cfg.cim,
                                                         o.cfg.master_seed);
            const int rc = write_output(
                o.out_path, [&](std::ostream& os) { dimimo::write_trajectory_csv(rows, os); });
            if (rc == 0) write_manifest("trajectory", o, start_time);
            return rc;
        }
        if (oracle->parsed()) {
            const auto rows = dimimo::oracle_compare_experiment(o.cfg, o.instances);
            long matches = 0;
            for (const auto& r : rows) matches += r.match ? 1 : 0;
            const int rc = write_output(
                o.out_path, [&](std::ostream& os) { dimimo::write_oracle_csv(rows, os); });
            std::cerr << "match rate: " << matches << "/" << rows.size() << " = "
                      << dimimo::format_number(double(matches) / double(rows.size())) << "\n";
            if (rc == 0) write_manifest("oracle-compare", o, start_time);
            return rc;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
