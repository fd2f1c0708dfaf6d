// flydram: DRAM latency-variation simulator and heterogeneous-timing
// controller evaluation front end.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "flydram/controller.hpp"
#include "flydram/csv.hpp"
#include "flydram/device_model.hpp"
#include "flydram/profiler.hpp"
#include "flydram/simkit.hpp"

namespace fd = flydram;

namespace {

struct GeometryFlags {
    fd::Geometry geom;

    void attach(CLI::App* app) {
        app->add_option("--channels", geom.channels, "memory channels");
        app->add_option("--ranks", geom.ranks_per_channel, "ranks per channel");
        app->add_option("--banks", geom.banks_per_rank, "banks per rank");
        app->add_option("--rows", geom.rows_per_bank, "rows per bank");
        app->add_option("--cachelines", geom.cachelines_per_row, "cache lines per row");
        app->add_option("--line-bytes", geom.cacheline_bytes, "cache line size in bytes");
    }
};

struct VariationFlags {
    fd::VariationParams params;

    void attach(CLI::App* app) {
        app->add_option("--clusters", params.cluster_count,
                        "slow clusters (-1 derives the count from --fast-fraction)");
        app->add_option("--radius", params.cluster_radius, "cluster radius in grid cells");
        app->add_option("--depth", params.cluster_depth_ns, "peak cluster threshold raise (ns)");
        app->add_option("--fast-fraction", params.base_fast_fraction,
                        "target fraction of fast cache lines");
        app->add_option("--penalty", params.pattern_penalty_ns,
                        "extra weak-bit threshold for stored zeros (ns)");
        app->add_option("--jitter", params.jitter_sigma_ns, "per-read threshold jitter sigma (ns)");
    }
};

std::string default_weak_path(const std::string& profile_path) {
    return profile_path + ".weak";
}

fd::LatencyProfile load_profile(const std::string& path, std::string weak_path) {
    if (weak_path.empty()) {
        std::string candidate = default_weak_path(path);
        if (std::filesystem::exists(candidate))
            weak_path = candidate;
    }
    return fd::import_profile_files(path, weak_path);
}

std::vector<double> parse_ns_list(const std::string& csv_list, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(csv_list);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(fd::csv::parse_double(item, what));
    if (out.empty())
        throw fd::ParameterError(what + ": empty list");
    return out;
}

fd::Granularity parse_granularity(const std::string& s, uint32_t& group_size) {
    if (s == "bank")
        return fd::Granularity::Bank;
    if (s == "row")
        return fd::Granularity::Row;
    if (s.rfind("group:", 0) == 0) {
        group_size = uint32_t(std::stoul(s.substr(6)));
        return fd::Granularity::CachelineGroup;
    }
    throw fd::ParameterError("unknown granularity '" + s + "' (bank | row | group:N)");
}

fd::TraceParams parse_workload(const std::string& s) {
    fd::TraceParams p;
    if (s == "stream") {
        p.kind = fd::TraceKind::Stream;
    } else if (s == "random") {
        p.kind = fd::TraceKind::RandomUniform;
    } else if (s.rfind("hotspot", 0) == 0) {
        p.kind = fd::TraceKind::Hotspot;
        if (s.size() > 7) { // hotspot:frac:bias
            auto rest = s.substr(8);
            auto colon = rest.find(':');
            if (s[7] != ':' || colon == std::string::npos)
                throw fd::ParameterError("hotspot workload syntax: hotspot:<fraction>:<bias>");
            p.fraction_hot = fd::csv::parse_double(rest.substr(0, colon), "hotspot fraction");
            p.hot_bias = fd::csv::parse_double(rest.substr(colon + 1), "hotspot bias");
        }
    } else {
        throw fd::ParameterError("unknown workload '" + s + "' (stream | random | hotspot[:f:b])");
    }
    return p;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path);
    if (!out)
        throw fd::FormatError("cannot open for writing: " + path);
    body(out);
}

// ---------------------------------------------------------------------------

int cmd_profile_gen(const GeometryFlags& gf, const VariationFlags& vf, uint64_t seed,
                    const std::string& out, std::string weak_out) {
    if (weak_out.empty())
        weak_out = default_weak_path(out);
    fd::LatencyProfile p = fd::generate_profile(gf.geom, vf.params, seed);
    fd::export_profile_files(p, out, weak_out);
    uint64_t slow = 0;
    for (float t : p.line_trcd_ns)
        if (t > fd::kFastThresholdNs)
            ++slow;
    std::cout << "profile: " << p.line_trcd_ns.size() << " cache lines, " << slow
              << " slow, " << p.weak_bits.size() << " weak-bit entries -> " << out << "\n";
    return 0;
}

int cmd_profile_import(const std::string& in, const std::string& weak) {
    fd::LatencyProfile p = load_profile(in, weak);
    const fd::Geometry& g = p.geometry;
    uint64_t slow = 0;
    float max_trcd = 0;
    for (float t : p.line_trcd_ns) {
        if (t > fd::kFastThresholdNs)
            ++slow;
        max_trcd = std::max(max_trcd, t);
    }
    std::cout << "geometry: " << g.channels << " ch x " << g.ranks_per_channel << " ranks x "
              << g.banks_per_rank << " banks x " << g.rows_per_bank << " rows x "
              << g.cachelines_per_row << " lines x " << g.cacheline_bytes << " B\n";
    std::cout << "cache lines: " << p.line_trcd_ns.size() << ", slow: " << slow
              << ", max min_trcd_ns: " << fd::csv::format_ns(max_trcd) << "\n";
    std::cout << "weak-bit entries: " << p.weak_bits.size() << ", seed: " << p.seed << "\n";
    return 0;
}

int cmd_characterize(const std::string& profile_path, const std::string& weak,
                     const std::string& trcd, const std::string& trp, const std::string& tras,
                     const std::string& patterns, int rounds, uint64_t seed,
                     const std::string& out, const std::string& errormap_prefix) {
    fd::LatencyProfile p = load_profile(profile_path, weak);
    fd::SweepConfig sweep;
    if (!trcd.empty())
        sweep.trcd_values_ns = parse_ns_list(trcd, "--trcd");
    if (!trp.empty())
        sweep.trp_values_ns = parse_ns_list(trp, "--trp");
    if (!tras.empty())
        sweep.tras_values_ns = parse_ns_list(tras, "--tras");
    if (!patterns.empty()) {
        sweep.patterns.clear();
        std::stringstream ss(patterns);
        std::string item;
        while (std::getline(ss, item, ','))
            sweep.patterns.push_back(fd::Pattern::parse(item));
    }
    sweep.rounds = rounds;
    fd::CharacterizationResult res = fd::run_characterization(p, sweep, seed);
    write_file(out, [&](std::ostream& os) { fd::export_ber_table(res.table, os); });
    if (!errormap_prefix.empty()) {
        for (const fd::ErrorMap& em : res.maps) {
            std::string path = errormap_prefix + "_" + em.param + "_" +
                               fd::csv::format_ns(em.value_ns) + ".csv";
            write_file(path, [&](std::ostream& os) { fd::export_error_map(em, os); });
        }
    }
    std::cout << "characterization: " << res.table.records.size() << " records -> " << out << "\n";
    return 0;
}

int cmd_regionmap(const std::string& profile_path, const std::string& weak,
                  const std::string& granularity, uint32_t guardband, const std::string& act_steps,
                  const std::string& pre_steps, const std::string& ras_steps,
                  const std::string& out) {
    fd::LatencyProfile p = load_profile(profile_path, weak);
    uint32_t group_size = 8;
    fd::Granularity gran = parse_granularity(granularity, group_size);
    fd::LatencySteps steps;
    if (!act_steps.empty())
        steps.act_ns = parse_ns_list(act_steps, "--act-steps");
    if (!pre_steps.empty())
        steps.pre_ns = parse_ns_list(pre_steps, "--pre-steps");
    if (!ras_steps.empty())
        steps.ras_ns = parse_ns_list(ras_steps, "--ras-steps");
    fd::RegionMap map = fd::build_region_map(p, gran, steps, guardband, group_size);
    fd::export_region_map_file(map, out);
    std::cout << "region map: " << map.entries.size() << " regions ("
              << fd::granularity_label(gran, group_size) << "), " << map.storage_bytes()
              << " bytes -> " << out << "\n";
    return 0;
}

struct SimulateArgs {
    std::string profile, weak, mode = "baseline", map_path, trace_path, synthetic;
    double fp_rate = 0.01;
    uint64_t length = 100000;
    uint64_t trace_seed = 1;
    int mlp = 4;
    bool ecc = false;
    std::string out, cmdlog, label;
};

int cmd_simulate(const SimulateArgs& a) {
    fd::LatencyProfile profile = load_profile(a.profile, a.weak);

    fd::MemoryTrace trace;
    if (!a.trace_path.empty()) {
        trace = fd::import_trace_file(a.trace_path);
    } else if (!a.synthetic.empty()) {
        fd::TraceParams tp = parse_workload(a.synthetic);
        tp.length = a.length;
        trace = fd::gen_trace(profile.geometry, tp, a.trace_seed);
    } else {
        throw fd::ParameterError("simulate needs --trace or --synthetic");
    }

    fd::RegionMap map;
    fd::SlowSetFilter filter;
    fd::ControllerConfig config = fd::ControllerConfig::baseline();
    if (a.mode == "baseline") {
        // defaults
    } else if (a.mode == "flydram-map" || a.mode == "flydram-filter") {
        if (a.map_path.empty())
            throw fd::ParameterError("mode " + a.mode + " requires --map");
        map = fd::import_region_map_file(a.map_path);
        if (a.mode == "flydram-filter") {
            filter = fd::compress_slow_set(map, a.fp_rate);
            config = fd::ControllerConfig::flydram(map, filter);
        } else {
            config = fd::ControllerConfig::flydram(map);
        }
    } else {
        throw fd::ParameterError("unknown mode '" + a.mode +
                                 "' (baseline | flydram-map | flydram-filter)");
    }

    // Every trace address must fall inside the profile and the region map.
    for (const auto& e : trace.entries) {
        fd::Address addr = profile.geometry.decode(e.address); // throws AddressError
        if (config.map && !config.map->geometry.contains(addr)) {
            char buf[24];
            std::snprintf(buf, sizeof buf, "0x%llx", (unsigned long long)e.address);
            throw fd::ParameterError("region map has no entry for trace address " +
                                     std::string(buf));
        }
    }

    fd::SimOptions opts;
    opts.mlp_limit = a.mlp;
    opts.ecc_enabled = a.ecc;
    std::ofstream cmdlog_stream;
    if (!a.cmdlog.empty()) {
        cmdlog_stream.open(a.cmdlog);
        if (!cmdlog_stream)
            throw fd::FormatError("cannot open for writing: " + a.cmdlog);
        opts.command_log = &cmdlog_stream;
    }

    fd::SimStats stats = fd::simulate(trace, profile, config, opts);
    std::string label = a.label.empty() ? ("mode=" + a.mode) : a.label;
    if (!a.out.empty())
        write_file(a.out, [&](std::ostream& os) {
            fd::export_stats_header(os);
            fd::export_stats_row(stats, label, os);
        });
    std::cout << "served " << stats.requests_served << " requests in " << stats.total_cycles
              << " cycles, avg read latency " << stats.avg_read_latency_cyc
              << " cyc, row hit rate " << stats.row_hit_rate << ", bit flips "
              << stats.injected_bit_flips << "\n";
    return 0;
}

struct SweepArgs {
    GeometryFlags geometry;
    VariationFlags variation;
    std::string profile_seeds = "1,2,3";
    std::string workloads = "stream,random,hotspot";
    std::string modes = "baseline,flydram-map";
    std::string granularity = "row";
    uint64_t length = 100000;
    int mlp = 4;
    double fp_rate = 0.01;
    uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 0;
    std::string out_dir = ".";
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

int cmd_sweep(const SweepArgs& a) {
    if (!a.seed_set)
        throw fd::ParameterError("sweep refuses to run without an explicit --seed");
    int jobs = a.jobs;
    if (jobs <= 0) {
        const char* env = std::getenv("FLYDRAM_JOBS");
        jobs = env ? std::max(1, atoi(env)) : 1;
    }
    uint32_t group_size = 8;
    fd::Granularity gran = parse_granularity(a.granularity, group_size);
    std::vector<std::string> seeds = split_list(a.profile_seeds);
    std::vector<std::string> workloads = split_list(a.workloads);
    std::vector<std::string> modes = split_list(a.modes);
    std::filesystem::create_directories(a.out_dir);

    std::mutex io_mutex;
    std::vector<std::thread> threads;
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= seeds.size())
                return;
            uint64_t pseed = fd::csv::parse_u64(seeds[i], "--profile-seeds");
            fd::LatencyProfile profile =
                fd::generate_profile(a.geometry.geom, a.variation.params, pseed);
            fd::RegionMap map =
                fd::build_region_map(profile, gran, fd::LatencySteps{}, 0, group_size);
            fd::SlowSetFilter filter = fd::compress_slow_set(map, a.fp_rate);
            for (const std::string& wl : workloads) {
                fd::TraceParams tp = parse_workload(wl);
                tp.length = a.length;
                fd::MemoryTrace trace =
                    fd::gen_trace(profile.geometry, tp, fd::derive_seed(a.seed, pseed));
                for (const std::string& mode : modes) {
                    fd::ControllerConfig config = fd::ControllerConfig::baseline();
                    if (mode == "flydram-map")
                        config = fd::ControllerConfig::flydram(map);
                    else if (mode == "flydram-filter")
                        config = fd::ControllerConfig::flydram(map, filter);
                    else if (mode != "baseline")
                        throw fd::ParameterError("unknown mode '" + mode + "'");
                    fd::SimOptions opts;
                    opts.mlp_limit = a.mlp;
                    fd::SimStats stats = fd::simulate(trace, profile, config, opts);
                    std::string label = "profile_seed=" + seeds[i] + ";workload=" + wl +
                                        ";mode=" + mode + ";gran=" + a.granularity;
                    std::string path = a.out_dir + "/run_p" + seeds[i] + "_" + wl + "_" + mode +
                                       ".csv";
                    std::lock_guard lock(io_mutex);
                    write_file(path, [&](std::ostream& os) {
                        fd::export_stats_header(os);
                        fd::export_stats_row(stats, label, os);
                    });
                }
            }
        }
    };
    int nthreads = std::min<int>(jobs, int(seeds.size()));
    for (int t = 0; t < nthreads; ++t)
        threads.emplace_back(worker);
    for (auto& t : threads)
        t.join();
    std::cout << "sweep: " << seeds.size() * workloads.size() * modes.size() << " runs -> "
              << a.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// report

struct StatsRow {
    std::map<std::string, std::string> config; // parsed from the label
    fd::SimStats stats;
    std::string label;
};

std::vector<StatsRow> load_stats_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw fd::FormatError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "#flydram-stats v1")
        throw fd::FormatError(path + ": not a flydram stats CSV (missing version header)");
    std::getline(in, line); // column header
    std::vector<StatsRow> rows;
    int lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        auto f = fd::csv::split(line);
        if (f.size() != 10)
            throw fd::FormatError(path + " line " + std::to_string(lineno) +
                                  ": expected 10 fields");
        StatsRow r;
        std::string ctx = path + " line " + std::to_string(lineno);
        r.label = std::string(f[0]);
        // Labels are ';'-separated k=v pairs.
        std::stringstream label_ss(r.label);
        std::string part;
        while (std::getline(label_ss, part, ';')) {
            auto eq = part.find('=');
            if (eq != std::string::npos)
                r.config[part.substr(0, eq)] = part.substr(eq + 1);
        }
        r.stats.trace_fingerprint = fd::csv::parse_u64(f[1], ctx);
        r.stats.requests_served = fd::csv::parse_u64(f[2], ctx);
        r.stats.avg_read_latency_cyc = fd::csv::parse_double(f[3], ctx);
        r.stats.p99_read_latency_cyc = int64_t(fd::csv::parse_u64(f[4], ctx));
        r.stats.row_hit_rate = fd::csv::parse_double(f[5], ctx);
        r.stats.total_cycles = int64_t(fd::csv::parse_u64(f[6], ctx));
        r.stats.injected_bit_flips = fd::csv::parse_u64(f[7], ctx);
        r.stats.ecc_corrected = fd::csv::parse_u64(f[8], ctx);
        r.stats.regionmap_bytes = fd::csv::parse_u64(f[9], ctx);
        rows.push_back(std::move(r));
    }
    return rows;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out_prefix) {
    if (inputs.empty())
        throw fd::ParameterError("report needs at least one input CSV");

    std::vector<StatsRow> stats_rows;
    std::vector<fd::BERRecord> ber_rows;
    for (const std::string& path : inputs) {
        std::ifstream probe(path);
        if (!probe)
            throw fd::FormatError("cannot open: " + path);
        std::string first;
        std::getline(probe, first);
        probe.close();
        if (first == "#flydram-stats v1") {
            auto rows = load_stats_csv(path);
            stats_rows.insert(stats_rows.end(), rows.begin(), rows.end());
        } else if (first == "#flydram-ber v1") {
            std::ifstream in(path);
            std::string line;
            std::getline(in, line);
            std::getline(in, line);
            int lineno = 2;
            while (std::getline(in, line)) {
                ++lineno;
                if (line.empty() || line[0] == '#')
                    continue;
                auto f = fd::csv::split(line);
                if (f.size() != 7)
                    throw fd::FormatError(path + " line " + std::to_string(lineno) +
                                          ": expected 7 fields");
                std::string ctx = path + " line " + std::to_string(lineno);
                fd::BERRecord r;
                r.param = std::string(f[0]);
                r.value_ns = fd::csv::parse_double(f[1], ctx);
                r.pattern = std::string(f[2]);
                r.round = int(fd::csv::parse_u64(f[3], ctx));
                r.bit_errors = fd::csv::parse_u64(f[4], ctx);
                r.bits_tested = fd::csv::parse_u64(f[5], ctx);
                r.ber = fd::csv::parse_double(f[6], ctx);
                ber_rows.push_back(std::move(r));
            }
        } else {
            throw fd::FormatError(path + ": unrecognized schema (version header '" + first + "')");
        }
    }

    // Per-config means over repeated runs.
    std::map<std::string, std::pair<fd::SimStats, int>> by_label;
    for (const StatsRow& r : stats_rows) {
        auto& [acc, n] = by_label[r.label];
        acc.requests_served += r.stats.requests_served;
        acc.avg_read_latency_cyc += r.stats.avg_read_latency_cyc;
        acc.row_hit_rate += r.stats.row_hit_rate;
        acc.total_cycles += r.stats.total_cycles;
        acc.injected_bit_flips += r.stats.injected_bit_flips;
        acc.trace_fingerprint = r.stats.trace_fingerprint;
        ++n;
    }
    if (!by_label.empty()) {
        std::cout << "config, runs, mean_total_cycles, mean_avg_read_latency_cyc, "
                     "mean_row_hit_rate, bit_flips\n";
        for (auto& [label, entry] : by_label) {
            auto& [acc, n] = entry;
            std::cout << label << ", " << n << ", " << double(acc.total_cycles) / n << ", "
                      << acc.avg_read_latency_cyc / n << ", " << acc.row_hit_rate / n << ", "
                      << acc.injected_bit_flips << "\n";
        }
    }

    // Speedup bars: baseline vs every other mode of the same run group.
    std::map<std::string, std::map<std::string, double>> groups; // group -> mode -> mean cycles
    for (auto& [label, entry] : by_label) {
        StatsRow probe;
        std::stringstream ss(label);
        std::string part, mode, group;
        while (std::getline(ss, part, ';')) {
            if (part.rfind("mode=", 0) == 0)
                mode = part.substr(5);
            else
                group += (group.empty() ? "" : ";") + part;
        }
        if (!mode.empty())
            groups[group][mode] = double(entry.first.total_cycles) / entry.second;
    }
    if (!out_prefix.empty()) {
        write_file(out_prefix + "speedup.csv", [&](std::ostream& os) {
            os << "#flydram-speedup v1\n";
            os << "group,mode,speedup_vs_baseline\n";
            for (auto& [group, modes] : groups) {
                auto base = modes.find("baseline");
                if (base == modes.end())
                    continue;
                for (auto& [mode, cycles] : modes) {
                    if (mode == "baseline")
                        continue;
                    os << group << ',' << mode << ',' << base->second / cycles << '\n';
                }
            }
        });
        if (!ber_rows.empty()) {
            // Box-plot quantiles of BER per swept point, across patterns/rounds.
            std::map<std::pair<std::string, double>, std::vector<double>> dist;
            for (const auto& r : ber_rows)
                dist[{r.param, r.value_ns}].push_back(r.ber);
            write_file(out_prefix + "ber_quantiles.csv", [&](std::ostream& os) {
                os << "#flydram-ber-quantiles v1\n";
                os << "param,value_ns,min,q1,median,q3,max\n";
                for (auto& [key, v] : dist) {
                    std::sort(v.begin(), v.end());
                    auto q = [&](double p) {
                        double idx = p * double(v.size() - 1);
                        size_t lo = size_t(idx);
                        size_t hi = std::min(lo + 1, v.size() - 1);
                        return v[lo] + (idx - double(lo)) * (v[hi] - v[lo]);
                    };
                    char buf[160];
                    std::snprintf(buf, sizeof buf, "%s,%s,%.10g,%.10g,%.10g,%.10g,%.10g",
                                  key.first.c_str(), fd::csv::format_ns(key.second).c_str(),
                                  v.front(), q(0.25), q(0.5), q(0.75), v.back());
                    os << buf << '\n';
                }
            });
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"flydram: DRAM latency-variation simulator"};
    app.require_subcommand(1);

    // profile-gen
    auto* gen = app.add_subcommand("profile-gen", "generate a latency profile");
    GeometryFlags gen_geom;
    VariationFlags gen_var;
    gen_geom.attach(gen);
    gen_var.attach(gen);
    uint64_t gen_seed = 0;
    std::string gen_out, gen_weak_out;
    gen->add_option("--seed", gen_seed, "generator seed")->required();
    gen->add_option("--out", gen_out, "profile CSV path")->required();
    gen->add_option("--weak-out", gen_weak_out, "weak-bit CSV path (default: <out>.weak)");

    // profile-import
    auto* imp = app.add_subcommand("profile-import", "validate and summarize a profile CSV");
    std::string imp_in, imp_weak;
    imp->add_option("--in", imp_in, "profile CSV path")->required();
    imp->add_option("--weak", imp_weak, "weak-bit CSV path");

    // characterize
    auto* chr = app.add_subcommand("characterize", "run latency sweeps against a profile");
    std::string chr_profile, chr_weak, chr_trcd, chr_trp, chr_tras, chr_patterns, chr_out,
        chr_emprefix;
    int chr_rounds = 1;
    uint64_t chr_seed = 0;
    chr->add_option("--profile", chr_profile, "profile CSV")->required();
    chr->add_option("--weak", chr_weak, "weak-bit CSV");
    chr->add_option("--trcd", chr_trcd, "comma list of tRCD values (ns)");
    chr->add_option("--trp", chr_trp, "comma list of tRP values (ns)");
    chr->add_option("--tras", chr_tras, "comma list of tRAS values (ns)");
    chr->add_option("--patterns", chr_patterns,
                    "comma list of all_zeros,all_ones,0x55,0xaa,random");
    chr->add_option("--rounds", chr_rounds, "test rounds per point");
    chr->add_option("--seed", chr_seed, "sweep seed")->required();
    chr->add_option("--out", chr_out, "BER CSV output")->required();
    chr->add_option("--errormap-prefix", chr_emprefix, "write per-value error-map CSVs");

    // regionmap
    auto* rmp = app.add_subcommand("regionmap", "build a conservative region map");
    std::string rmp_profile, rmp_weak, rmp_gran = "row", rmp_act, rmp_pre, rmp_ras, rmp_out;
    uint32_t rmp_guard = 0;
    rmp->add_option("--profile", rmp_profile, "profile CSV")->required();
    rmp->add_option("--weak", rmp_weak, "weak-bit CSV");
    rmp->add_option("--granularity", rmp_gran, "bank | row | group:N");
    rmp->add_option("--guardband", rmp_guard, "extra latency steps above the measured worst");
    rmp->add_option("--act-steps", rmp_act, "tRCD step list (ns)");
    rmp->add_option("--pre-steps", rmp_pre, "tRP step list (ns)");
    rmp->add_option("--ras-steps", rmp_ras, "tRAS step list (ns)");
    rmp->add_option("--out", rmp_out, "region map CSV output")->required();

    // simulate
    auto* sim = app.add_subcommand("simulate", "replay a trace against a profile");
    SimulateArgs sa;
    sim->add_option("--profile", sa.profile, "profile CSV")->required();
    sim->add_option("--weak", sa.weak, "weak-bit CSV");
    sim->add_option("--mode", sa.mode, "baseline | flydram-map | flydram-filter");
    sim->add_option("--map", sa.map_path, "region map CSV (flydram modes)");
    sim->add_option("--fp-rate", sa.fp_rate, "Bloom false-positive rate (filter mode)");
    sim->add_option("--trace", sa.trace_path, "trace file");
    sim->add_option("--synthetic", sa.synthetic, "stream | random | hotspot[:f:b]");
    sim->add_option("--length", sa.length, "synthetic trace length");
    sim->add_option("--trace-seed", sa.trace_seed, "synthetic trace seed");
    sim->add_option("--mlp", sa.mlp, "outstanding-request cap");
    sim->add_flag("--ecc", sa.ecc, "count SECDED-correctable beats");
    sim->add_option("--out", sa.out, "stats CSV output");
    sim->add_option("--cmdlog", sa.cmdlog, "per-command CSV log");
    sim->add_option("--label", sa.label, "config label for the stats row");

    // sweep
    auto* swp = app.add_subcommand("sweep", "run a seeded simulation matrix");
    SweepArgs wa;
    wa.geometry.attach(swp);
    wa.variation.attach(swp);
    swp->add_option("--profile-seeds", wa.profile_seeds, "comma list of profile seeds");
    swp->add_option("--workloads", wa.workloads, "comma list of workloads");
    swp->add_option("--modes", wa.modes, "comma list of controller modes");
    swp->add_option("--granularity", wa.granularity, "region granularity");
    swp->add_option("--length", wa.length, "trace length per run");
    swp->add_option("--mlp", wa.mlp, "outstanding-request cap");
    swp->add_option("--fp-rate", wa.fp_rate, "Bloom false-positive rate");
    swp->add_option("--seed", wa.seed, "master seed (required)")
        ->each([&](const std::string&) { wa.seed_set = true; });
    swp->add_option("--jobs", wa.jobs, "parallel runs (default: $FLYDRAM_JOBS or 1)");
    swp->add_option("--out-dir", wa.out_dir, "output directory");

    // report
    auto* rep = app.add_subcommand("report", "aggregate stats/BER CSVs");
    std::vector<std::string> rep_inputs;
    std::string rep_prefix;
    rep->add_option("inputs", rep_inputs, "stats or BER CSV files")->required();
    rep->add_option("--out-prefix", rep_prefix, "prefix for plot-data CSVs");

    try {
        app.parse(argc, argv);
        if (gen->parsed())
            return cmd_profile_gen(gen_geom, gen_var, gen_seed, gen_out, gen_weak_out);
        if (imp->parsed())
            return cmd_profile_import(imp_in, imp_weak);
        if (chr->parsed())
            return cmd_characterize(chr_profile, chr_weak, chr_trcd, chr_trp, chr_tras,
                                    chr_patterns, chr_rounds, chr_seed, chr_out, chr_emprefix);
        if (rmp->parsed())
            return cmd_regionmap(rmp_profile, rmp_weak, rmp_gran, rmp_guard, rmp_act, rmp_pre,
                                 rmp_ras, rmp_out);
        if (sim->parsed())
            return cmd_simulate(sa);
        if (swp->parsed())
            return cmd_sweep(wa);
        if (rep->parsed())
            return cmd_report(rep_inputs, rep_prefix);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1; // keep --help at 0, fold CLI11 codes to 1
    } catch (const fd::ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const fd::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const fd::AddressError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const fd::MappingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
