// Acceptance gate: one self-contained check per release criterion, each
// printing a single PASS/FAIL line. The binary exits non-zero if any
// criterion fails, so ctest treats the whole gate as one test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "flydram/controller.hpp"
#include "flydram/device_model.hpp"
#include "flydram/profiler.hpp"
#include "flydram/rng.hpp"
#include "flydram/simkit.hpp"
#include "flydram/timing_engine.hpp"

using namespace flydram;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Shared helpers

Command mk_act(uint32_t row, TimingParams t) { return {CmdKind::ACT, 0, row, 0, t}; }
Command mk_rd(uint32_t line, TimingParams t) { return {CmdKind::RD, 0, 0, line, t}; }
Command mk_wr(uint32_t line, TimingParams t) { return {CmdKind::WR, 0, 0, line, t}; }
Command mk_pre(TimingParams t) { return {CmdKind::PRE, 0, 0, 0, t}; }

/// Independent command-legality oracle: replays the issued history and checks
/// every pairwise constraint directly against the raw timestamps.
struct HistoryOracle {
    struct Issued {
        Command cmd;
        Cycle at;
    };
    std::vector<Issued> history;

    bool legal_at(const Command& cmd, Cycle at) const {
        bool open = false;
        Cycle act_at = kNeverCycle, pre_at = kNeverCycle, col_at = kNeverCycle;
        TimingParams act_t, pre_t;
        int64_t col_burst = 4;
        for (const Issued& h : history) {
            switch (h.cmd.kind) {
            case CmdKind::ACT:
                open = true;
                act_at = h.at;
                act_t = h.cmd.timings;
                col_at = kNeverCycle;
                break;
            case CmdKind::RD:
            case CmdKind::WR:
                col_at = h.at;
                col_burst = h.cmd.timings.burst_cyc;
                break;
            case CmdKind::PRE:
                open = false;
                pre_at = h.at;
                pre_t = h.cmd.timings;
                break;
            }
        }
        switch (cmd.kind) {
        case CmdKind::ACT:
            if (open)
                return false;
            return pre_at == kNeverCycle || at >= pre_at + pre_t.trp_cyc;
        case CmdKind::RD:
        case CmdKind::WR:
            if (!open)
                return false;
            if (at < act_at + act_t.trcd_cyc)
                return false;
            return col_at == kNeverCycle || at >= col_at + col_burst;
        case CmdKind::PRE:
            if (!open)
                return false;
            return at >= act_at + act_t.tras_cyc;
        }
        return false;
    }

    Cycle earliest(const Command& cmd, Cycle now, Cycle horizon) const {
        for (Cycle c = now; c <= horizon; ++c)
            if (legal_at(cmd, c))
                return c;
        return horizon + 1;
    }
};

Geometry small_geometry(uint32_t rows, uint32_t lines) {
    Geometry g;
    g.rows_per_bank = rows;
    g.cachelines_per_row = lines;
    return g;
}

LatencyProfile clustered_profile(const Geometry& g, uint64_t seed, int clusters = 8) {
    VariationParams vp;
    vp.cluster_count = clusters;
    return generate_profile(g, vp, seed);
}

Address random_address(const Geometry& g, Rng& rng) {
    Address a;
    a.channel = uint32_t(rng.next_below(g.channels));
    a.rank = uint32_t(rng.next_below(g.ranks_per_channel));
    a.bank = uint32_t(rng.next_below(g.banks_per_rank));
    a.row = uint32_t(rng.next_below(g.rows_per_bank));
    a.cacheline = uint32_t(rng.next_below(g.cachelines_per_row));
    return a;
}

/// Bank-round-robin row-miss trace: every request opens a fresh row, so the
/// closed-form per-request latency holds exactly under mlp 1.
MemoryTrace bank_round_robin_misses(const Geometry& g, uint64_t length) {
    MemoryTrace t;
    uint32_t row = 0;
    uint64_t bank_seq = 0;
    for (uint64_t i = 0; i < length; ++i) {
        Address a;
        uint64_t b = bank_seq % g.total_banks();
        a.channel = uint32_t(b % g.channels);
        uint64_t per_channel = b / g.channels;
        a.rank = uint32_t(per_channel / g.banks_per_rank);
        a.bank = uint32_t(per_channel % g.banks_per_rank);
        a.row = row % g.rows_per_bank;
        a.cacheline = 0;
        t.entries.push_back({0, false, g.encode(a)});
        ++bank_seq;
        if (bank_seq % g.total_banks() == 0)
            ++row;
    }
    return t;
}

// ---------------------------------------------------------------------------
// Criterion 1: the timing engine matches a brute-force legality oracle.

bool criterion_timing_oracle(std::string& detail) {
    const TimingParams choices[] = {TimingParams::ddr3_1333(),
                                    TimingParams::make(7.5, 7.5, 27.0),
                                    TimingParams::make(10.0, 10.0, 27.0),
                                    TimingParams::make(12.5, 10.0, 36.0)};
    Rng rng(2024);
    const Cycle horizon = 200;
    uint64_t checked = 0;
    for (int schedule = 0; schedule < 10000; ++schedule) {
        const int nbanks = 1 + int(rng.next_below(2));
        std::vector<BankState> banks(nbanks);
        std::vector<HistoryOracle> oracles(nbanks);
        Cycle now = 0;
        while (now <= horizon) {
            int bi = int(rng.next_below(uint64_t(nbanks)));
            TimingParams t = choices[rng.next_below(4)];
            Command cmd;
            if (!banks[bi].row_open()) {
                cmd = mk_act(uint32_t(rng.next_below(8)), t);
            } else {
                switch (rng.next_below(3)) {
                case 0: cmd = mk_rd(uint32_t(rng.next_below(8)), t); break;
                case 1: cmd = mk_wr(uint32_t(rng.next_below(8)), t); break;
                default: cmd = mk_pre(t); break;
                }
            }
            cmd.bank = uint32_t(bi);
            Cycle engine = earliest_issue_time(banks[bi], cmd, now);
            Cycle brute = oracles[bi].earliest(cmd, now, horizon + 300);
            ++checked;
            if (engine != brute) {
                detail = "mismatch in schedule " + std::to_string(schedule);
                return false;
            }
            if (engine > horizon)
                break;
            banks[bi] = apply(banks[bi], cmd, engine);
            oracles[bi].history.push_back({cmd, engine});
            now = engine + Cycle(rng.next_below(4));
        }
    }
    detail = std::to_string(checked) + " commands across 10000 schedules, 0 mismatches";
    return true;
}

// ---------------------------------------------------------------------------
// Criterion 2: conservative region maps never cause bit flips.

bool criterion_zero_error(std::string& detail) {
    Geometry g = small_geometry(128, 64);
    const Granularity grans[] = {Granularity::CachelineGroup, Granularity::Row,
                                 Granularity::Bank};
    uint64_t unsafe = 0, checked = 0;
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        LatencyProfile p = clustered_profile(g, seed);
        for (Granularity gran : grans) {
            RegionMap map = build_region_map(p, gran, LatencySteps{}, 0, 8);
            Rng rng(derive_seed(900, seed, uint64_t(gran)));
            for (uint64_t i = 0; i < 1000000; ++i) {
                Address a = random_address(g, rng);
                TimingParams t = lookup_timing(map, a);
                ++checked;
                if (!access_is_safe(p, a, t.trcd_ns, true, t.trp_ns, t.tras_ns))
                    ++unsafe;
            }
        }
    }
    // Tie the per-access check to the end-to-end simulator on one combo.
    LatencyProfile p = clustered_profile(g, 1);
    RegionMap map = build_region_map(p, Granularity::Row, LatencySteps{}, 0, 8);
    TraceParams tp;
    tp.kind = TraceKind::RandomUniform;
    tp.length = 200000;
    SimStats s = simulate(gen_trace(g, tp, 77), p, ControllerConfig::flydram(map));
    uint64_t flips = s.injected_bit_flips + unsafe;
    detail = std::to_string(checked) + " mapped accesses + one simulated run, " +
             std::to_string(flips) + " flips";
    return flips == 0;
}

// ---------------------------------------------------------------------------
// Criterion 3: zero errors at 12.5/10 ns on every profile; errors at 7.5 ns
// on every clustered profile.

bool criterion_guardband(std::string& detail) {
    Geometry g = small_geometry(48, 48);
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        LatencyProfile p = clustered_profile(g, seed);

        SweepConfig safe;
        safe.trcd_values_ns = {10.0, 12.5};
        safe.trp_values_ns = {10.0, 12.5};
        safe.tras_values_ns = {36.0};
        CharacterizationResult res = run_characterization(p, safe, seed);
        for (const BERRecord& r : res.table.records)
            if (r.bit_errors != 0) {
                detail = "seed " + std::to_string(seed) + ": " + r.param + "@" +
                         std::to_string(r.value_ns) + " has errors";
                return false;
            }

        SweepConfig aggressive;
        aggressive.trcd_values_ns = {7.5};
        aggressive.trp_values_ns = {7.5};
        aggressive.tras_values_ns = {36.0};
        CharacterizationResult agg = run_characterization(p, aggressive, seed);
        uint64_t errors = 0;
        for (const BERRecord& r : agg.table.records)
            errors += r.bit_errors;
        if (errors == 0) {
            detail = "seed " + std::to_string(seed) + ": no errors at 7.5 ns";
            return false;
        }
    }
    detail = "10 profiles: all clean at 10/12.5 ns, all erroneous at 7.5 ns";
    return true;
}

// ---------------------------------------------------------------------------
// Criterion 4: BER is monotone in latency; stored zeros are never easier
// than stored ones.

bool criterion_ber_monotone(std::string& detail) {
    Geometry g = small_geometry(32, 32);
    LatencyProfile p = clustered_profile(g, 5, 12);
    CharacterizationResult res = run_characterization(p, SweepConfig{}, 3);

    std::map<std::pair<std::string, std::string>, std::vector<std::pair<double, double>>>
        curves; // (param, pattern) -> (value, ber)
    std::map<std::pair<std::string, double>, std::map<std::string, double>> points;
    for (const BERRecord& r : res.table.records) {
        curves[{r.param, r.pattern}].push_back({r.value_ns, r.ber});
        points[{r.param, r.value_ns}][r.pattern] = r.ber;
    }
    for (auto& [key, curve] : curves) {
        std::sort(curve.begin(), curve.end());
        for (size_t i = 1; i < curve.size(); ++i)
            if (curve[i].second > curve[i - 1].second) {
                detail = key.first + "/" + key.second + ": BER rises with latency";
                return false;
            }
    }
    for (auto& [key, pats] : points)
        if (pats.count("all_zeros") && pats.count("all_ones") &&
            pats.at("all_zeros") < pats.at("all_ones")) {
            detail = key.first + "@" + std::to_string(key.second) + ": ones beat zeros";
            return false;
        }
    detail = std::to_string(res.table.records.size()) +
             " sweep points: monotone, zeros >= ones everywhere";
    return true;
}

// ---------------------------------------------------------------------------
// Criterion 5: error maps are spatially clustered; shuffled controls are not.

bool criterion_locality(std::string& detail) {
    Geometry g = small_geometry(64, 64);
    SweepConfig sweep;
    sweep.trcd_values_ns = {7.5};
    sweep.trp_values_ns = {7.5};
    sweep.tras_values_ns = {36.0};
    sweep.patterns = {{Pattern::Kind::AllZeros, 0}};
    int good = 0;
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        LatencyProfile p = clustered_profile(g, seed, 12);
        CharacterizationResult res = run_characterization(p, sweep, seed);
        const ErrorMap* trcd_map = nullptr;
        for (const ErrorMap& m : res.maps)
            if (m.param == "trcd")
                trcd_map = &m;
        if (!trcd_map || trcd_map->hit_trials.empty())
            continue;
        LocalityResult real = spatial_locality_score(*trcd_map, 1000, seed);

        // Control: the same number of hits scattered uniformly.
        ErrorMap control = *trcd_map;
        control.hit_trials.clear();
        Rng rng(derive_seed(500, seed));
        while (control.hit_trials.size() < trcd_map->hit_trials.size())
            control.hit_trials[rng.next_below(g.total_cachelines())] = 1;
        LocalityResult shuffled = spatial_locality_score(control, 1000, seed);

        if (real.p_value < 0.01 && shuffled.p_value > 0.05)
            ++good;
    }
    detail = std::to_string(good) + "/10 seeds: clustered p<0.01 and control p>0.05";
    return good >= 9;
}

// ---------------------------------------------------------------------------
// Criterion 6: ECC fraction equals the histogram ratio; single-bit beats
// dominate multi-bit ones.

bool criterion_ecc(std::string& detail) {
    BeatHistogram fixed{{0, 900}, {1, 90}, {2, 10}};
    EccResult r = ecc_correctable_fraction(fixed, EccScheme::SECDED_64);
    if (r.correctable_fraction != 0.9) {
        detail = "fixed histogram fraction != 0.9";
        return false;
    }

    Geometry g = small_geometry(64, 64);
    LatencyProfile p = clustered_profile(g, 7, 12);
    Rng rng(7);
    AccessContext ctx;
    ctx.applied = TimingParams::make(7.5, 13.125, 36.0);
    ctx.stored_data.assign(g.bits_per_cacheline() / 64, 0);
    std::vector<std::vector<uint64_t>> bitmaps;
    for (uint32_t ch = 0; ch < g.channels; ++ch)
        for (uint32_t bank = 0; bank < g.banks_per_rank; ++bank)
            for (uint32_t row = 0; row < g.rows_per_bank; ++row)
                for (uint32_t line = 0; line < g.cachelines_per_row; ++line) {
                    ctx.address = {ch, 0, bank, row, line};
                    ReadResult res = inject_read_errors(p, ctx, rng);
                    if (res.flipped_bits > 0)
                        bitmaps.push_back(std::move(res.error_bitmap));
                }
    if (bitmaps.empty()) {
        detail = "no erroneous cache lines at 7.5 ns";
        return false;
    }
    BeatHistogram hist = beat_error_histogram(bitmaps, g.bits_per_cacheline());
    uint64_t single = hist.count(1) ? hist.at(1) : 0;
    uint64_t multi = 0, erroneous = 0;
    for (auto& [bits, freq] : hist)
        if (bits >= 2)
            multi += freq;
    erroneous = single + multi;
    EccResult gen = ecc_correctable_fraction(hist, EccScheme::SECDED_64);
    if (erroneous == 0 || gen.correctable_fraction != double(single) / double(erroneous)) {
        detail = "fraction does not equal the histogram ratio";
        return false;
    }
    if (single <= multi) {
        detail = "multi-bit beats dominate (" + std::to_string(single) + " vs " +
                 std::to_string(multi) + ")";
        return false;
    }
    detail = "exact ratio; single-bit beats " + std::to_string(single) + " vs multi " +
             std::to_string(multi);
    return true;
}

// ---------------------------------------------------------------------------
// Criterion 7: serialized row-miss latency matches the closed form exactly.

bool criterion_latency_oracle(std::string& detail) {
    Geometry g = small_geometry(64, 64);
    LatencyProfile p;
    p.geometry = g;
    p.line_trcd_ns.assign(g.total_cachelines(), 7.2f);
    p.row_trp_ns.assign(g.total_rows(), 7.1f);
    p.row_tras_ns.assign(g.total_rows(), 24.0f);

    const TimingParams spec = TimingParams::ddr3_1333();
    const TimingParams fast = TimingParams::make(7.5, 7.5, 27.0);
    const uint64_t N = 2000;
    const uint64_t B = g.total_banks();
    MemoryTrace t = bank_round_robin_misses(g, N);
    SimOptions opts;
    opts.mlp_limit = 1;

    SimStats base = simulate(t, p, ControllerConfig::baseline(), opts);
    const double first = double(spec.trcd_cyc + spec.tcl_cyc + spec.burst_cyc);
    const double miss = double(spec.trp_cyc) + first;
    const double expected = (double(B) * first + double(N - B) * miss) / double(N);

    RegionMap map = build_region_map(p, Granularity::Row, LatencySteps{}, 0);
    SimStats fly = simulate(t, p, ControllerConfig::flydram(map), opts);
    const double f_first = double(fast.trcd_cyc + spec.tcl_cyc + spec.burst_cyc);
    const double f_miss = double(fast.trp_cyc) + f_first;
    const double f_expected = (double(B) * f_first + double(N - B) * f_miss) / double(N);

    const double delta =
        double((spec.trp_cyc - fast.trp_cyc) + (spec.trcd_cyc - fast.trcd_cyc));
    bool ok = std::abs(base.avg_read_latency_cyc - expected) < 1e-9 &&
              std::abs(fly.avg_read_latency_cyc - f_expected) < 1e-9 &&
              miss - f_miss == delta && base.row_hit_rate == 0.0 &&
              fly.injected_bit_flips == 0;
    detail = "avg " + std::to_string(base.avg_read_latency_cyc) + " vs closed-form " +
             std::to_string(expected) + "; reduced-map delta " + std::to_string(delta) +
             " cyc per miss";
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 8: a 99%-fast device comes within 2% of the all-fast bound, and
// the reduced-timing mode clearly beats the uniform baseline on a miss-heavy
// trace.

bool criterion_upper_bound(std::string& detail) {
    Geometry g = small_geometry(64, 128);
    VariationParams vp99; // defaults target 99% fast lines
    LatencyProfile p99 = generate_profile(g, vp99, 3);
    VariationParams vp_fast;
    vp_fast.cluster_count = 0;
    LatencyProfile pfast = generate_profile(g, vp_fast, 3);

    RegionMap map99 = build_region_map(p99, Granularity::CachelineGroup, LatencySteps{}, 0, 8);
    RegionMap mapfast =
        build_region_map(pfast, Granularity::CachelineGroup, LatencySteps{}, 0, 8);

    const TraceKind suite[] = {TraceKind::Stream, TraceKind::RandomUniform,
                               TraceKind::Hotspot};
    double worst_ratio = 0;
    for (TraceKind kind : suite) {
        TraceParams tp;
        tp.kind = kind;
        tp.length = 30000;
        MemoryTrace t = gen_trace(g, tp, 11);
        SimStats s99 = simulate(t, p99, ControllerConfig::flydram(map99));
        SimStats sfast = simulate(t, pfast, ControllerConfig::flydram(mapfast));
        double ratio = double(s99.total_cycles) / double(sfast.total_cycles);
        worst_ratio = std::max(worst_ratio, ratio);
        if (ratio > 1.02) {
            detail = "workload ratio " + std::to_string(ratio) + " exceeds 1.02";
            return false;
        }
        if (s99.injected_bit_flips != 0)
            return false;
    }

    TraceParams tp;
    tp.kind = TraceKind::RandomUniform;
    tp.length = 50000;
    MemoryTrace t = gen_trace(g, tp, 13);
    SimStats base = simulate(t, p99, ControllerConfig::baseline());
    SimStats fly = simulate(t, p99, ControllerConfig::flydram(map99));
    double sp = speedup(base, fly);
    detail = "worst completion ratio " + std::to_string(worst_ratio) +
             " (bound 1.02); miss-heavy speedup " + std::to_string(sp);
    return sp > 1.05;
}

// ---------------------------------------------------------------------------
// Criterion 9: the slow-set filter never misclassifies slow as fast and
// stays within 1.5x the configured false-positive rate.

bool criterion_bloom(std::string& detail) {
    Geometry g = small_geometry(8192, 8);
    LatencyProfile p = clustered_profile(g, 9, 32);
    RegionMap map = build_region_map(p, Granularity::Row, LatencySteps{}, 0);
    const double fp_rate = 0.01;
    SlowSetFilter filter = compress_slow_set(map, fp_rate);

    RegionTiming fastest{map.steps.act_ns.front(), map.steps.pre_ns.front(),
                         map.steps.ras_ns.front()};
    uint64_t slow_missed = 0, fast_total = 0, false_slow = 0, queries = 0;
    for (uint64_t r = 0; r < map.entries.size(); ++r) {
        bool slow = !(map.entries[r] == fastest);
        bool flagged = filter.member(r);
        ++queries;
        if (slow && !flagged)
            ++slow_missed;
        if (!slow) {
            ++fast_total;
            if (flagged)
                ++false_slow;
        }
    }
    double measured = fast_total ? double(false_slow) / double(fast_total) : 0.0;
    detail = std::to_string(queries) + " queries, " + std::to_string(slow_missed) +
             " slow-as-fast, false-slow rate " + std::to_string(measured) + " (bound " +
             std::to_string(1.5 * fp_rate) + ")";
    return queries >= 100000 && slow_missed == 0 && measured <= 1.5 * fp_rate;
}

// ---------------------------------------------------------------------------
// Criterion 10: round trips are lossless and every seeded subcommand is
// byte-deterministic.

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool run_ok(const std::string& cmd) {
    int status = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
}

bool criterion_roundtrip_determinism(std::string& detail) {
    // Library-level round trips.
    Geometry g = small_geometry(32, 32);
    LatencyProfile p = clustered_profile(g, 4);
    std::stringstream prof, weak;
    export_profile(p, prof, weak);
    std::istringstream weak_in(weak.str());
    LatencyProfile back = import_profile(prof, &weak_in);
    if (!(back == p)) {
        detail = "profile export/import is not the identity";
        return false;
    }
    RegionMap map = build_region_map(p, Granularity::Row, LatencySteps{}, 0);
    std::stringstream map_s;
    export_region_map(map, map_s);
    RegionMap map_back = import_region_map(map_s);
    if (!(map_back.entries == map.entries)) {
        detail = "region map round trip altered entries";
        return false;
    }

    // CLI byte-determinism: every subcommand run twice on identical inputs.
    fs::path dir = fs::temp_directory_path() / "flydram_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cli = FLYDRAM_CLI_PATH;
    auto path = [&](const std::string& leaf) { return (dir / leaf).string(); };

    for (int run = 1; run <= 2; ++run) {
        std::string r = std::to_string(run);
        std::string prof_csv = path("p" + r + ".csv");
        if (!run_ok(cli + " profile-gen --rows 32 --seed 6 --out " + prof_csv) ||
            !run_ok(cli + " characterize --profile " + prof_csv +
                    " --trcd 7.5,10 --trp 13.125 --tras 36 --seed 2 --out " +
                    path("ber" + r + ".csv")) ||
            !run_ok(cli + " regionmap --profile " + prof_csv + " --granularity row --out " +
                    path("map" + r + ".csv")) ||
            !run_ok(cli + " simulate --profile " + prof_csv +
                    " --mode flydram-map --map " + path("map" + r + ".csv") +
                    " --synthetic random --length 5000 --trace-seed 3 --out " +
                    path("stats" + r + ".csv")) ||
            !run_ok(cli + " sweep --rows 32 --profile-seeds 1 --workloads random"
                          " --modes baseline,flydram-map --length 2000 --seed 4 --out-dir " +
                    path("runs" + r)) ||
            !run_ok(cli + " report " + path("runs" + r) + "/run_p1_random_baseline.csv " +
                    path("runs" + r) + "/run_p1_random_flydram-map.csv --out-prefix " +
                    path("rep" + r + "_"))) {
            detail = "a subcommand failed on run " + r;
            return false;
        }
    }
    const std::pair<std::string, std::string> pairs[] = {
        {"p1.csv", "p2.csv"},
        {"p1.csv.weak", "p2.csv.weak"},
        {"ber1.csv", "ber2.csv"},
        {"map1.csv", "map2.csv"},
        {"stats1.csv", "stats2.csv"},
        {"runs1/run_p1_random_baseline.csv", "runs2/run_p1_random_baseline.csv"},
        {"runs1/run_p1_random_flydram-map.csv", "runs2/run_p1_random_flydram-map.csv"},
        {"rep1_speedup.csv", "rep2_speedup.csv"},
    };
    for (const auto& [a, b] : pairs) {
        std::string xa = slurp(dir / a), xb = slurp(dir / b);
        if (xa.empty() || xa != xb) {
            detail = a + " differs between identical runs";
            return false;
        }
    }
    fs::remove_all(dir);
    detail = "export/import identity; all subcommand outputs byte-identical";
    return true;
}

// ---------------------------------------------------------------------------

struct Criterion {
    const char* name;
    std::function<bool(std::string&)> fn;
    double time_limit_s; ///< 0 = no pinned limit
};

} // namespace

int main() {
    const Criterion criteria[] = {
        {"1 timing-legality oracle (10^4 random schedules, 0 mismatches)",
         criterion_timing_oracle, 30.0},
        {"2 zero-error guarantee (10 profiles x 3 granularities x 10^6 accesses)",
         criterion_zero_error, 120.0},
        {"3 guardband: clean at 10/12.5 ns, errors at 7.5 ns", criterion_guardband, 0},
        {"4 BER monotone in latency, stored zeros >= stored ones", criterion_ber_monotone, 0},
        {"5 spatial locality: clustered p<0.01, shuffled control p>0.05",
         criterion_locality, 60.0},
        {"6 ECC fraction exact, single-bit beats dominate", criterion_ecc, 0},
        {"7 closed-form serialized-miss latency, exact cycle delta",
         criterion_latency_oracle, 0},
        {"8 99%-fast within 2% of all-fast bound, speedup > 1.05", criterion_upper_bound, 0},
        {"9 slow-set filter: no false fast, FP rate <= 1.5x target", criterion_bloom, 0},
        {"10 round-trip identity and byte-determinism of every subcommand",
         criterion_roundtrip_determinism, 0},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        std::string detail;
        auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = c.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                          .count();
        if (ok && c.time_limit_s > 0 && secs > c.time_limit_s) {
            ok = false;
            detail += " [exceeded " + std::to_string(c.time_limit_s) + " s limit]";
        }
        char line[512];
        std::snprintf(line, sizeof line, "%s criterion %s — %s (%.1f s)",
                      ok ? "PASS" : "FAIL", c.name, detail.c_str(), secs);
        std::cout << line << "\n";
        if (!ok)
            ++failures;
    }
    if (failures) {
        std::cout << failures << " criteria failed\n";
        return 1;
    }
    std::cout << "all 10 criteria passed\n";
    return 0;
}
