#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "flydram/controller.hpp"
#include "flydram/device_model.hpp"
#include "flydram/geometry.hpp"

namespace flydram {

inline constexpr uint64_t kPageBytes = 4096;

/// Timestamped post-LLC read/write stream over physical addresses.
struct MemoryTrace {
    struct Entry {
        int64_t tick = 0;
        bool is_write = false;
        uint64_t address = 0;

        bool operator==(const Entry&) const = default;
    };
    std::vector<Entry> entries;
    uint32_t stream_count = 1;

    bool operator==(const MemoryTrace&) const = default;
    uint64_t fingerprint() const;
};

enum class TraceKind { Stream, RandomUniform, Hotspot };

struct TraceParams {
    TraceKind kind = TraceKind::RandomUniform;
    uint64_t length = 0;
    double fraction_hot = 0.1; ///< Hotspot only
    double hot_bias = 0.9;     ///< Hotspot only
};

MemoryTrace gen_trace(const Geometry& geometry, const TraceParams& params, uint64_t seed);

/// How the simulated controller picks per-request timings.
struct ControllerConfig {
    enum class Mode { Baseline, FlyMap, FlyFilter } mode = Mode::Baseline;
    TimingParams spec = TimingParams::ddr3_1333();
    const RegionMap* map = nullptr;         ///< FlyMap / FlyFilter
    const SlowSetFilter* filter = nullptr;  ///< FlyFilter

    static ControllerConfig baseline(TimingParams spec = TimingParams::ddr3_1333()) {
        return {Mode::Baseline, spec, nullptr, nullptr};
    }
    static ControllerConfig flydram(const RegionMap& m) {
        return {Mode::FlyMap, m.spec, &m, nullptr};
    }
    static ControllerConfig flydram(const RegionMap& m, const SlowSetFilter& f) {
        return {Mode::FlyFilter, m.spec, &m, &f};
    }
};

struct SimOptions {
    int mlp_limit = 4;       ///< outstanding-request cap of the trace replayer
    bool ecc_enabled = false;
    std::ostream* command_log = nullptr; ///< optional per-command CSV sink
};

struct SimStats {
    uint64_t requests_served = 0;
    double avg_read_latency_cyc = 0;
    int64_t p99_read_latency_cyc = 0;
    double row_hit_rate = 0;
    int64_t total_cycles = 0;
    uint64_t injected_bit_flips = 0;
    uint64_t ecc_corrected = 0;
    uint64_t regionmap_bytes = 0;
    uint64_t trace_fingerprint = 0;
};

SimStats simulate(const MemoryTrace& trace, const LatencyProfile& profile,
                  const ControllerConfig& config, const SimOptions& options = {});

/// Completion-cycle ratio of the same trace under two configurations.
double speedup(const SimStats& base, const SimStats& other);

/// Virtual-page to physical-frame permutation plus the fraction of accesses
/// that land in the fastest frames.
struct PageMapping {
    std::vector<uint64_t> permutation;
    double fast_coverage = 0;
};

/// Greedy latency-aware allocation: hottest pages into the fastest frames.
PageMapping allocate_pages(const std::vector<uint64_t>& page_hotness, const RegionMap& map,
                           const Geometry& geometry);

MemoryTrace remap_trace(const MemoryTrace& trace, const PageMapping& mapping);

void export_trace(const MemoryTrace& trace, std::ostream& out);
MemoryTrace import_trace(std::istream& in);
MemoryTrace import_trace_file(const std::string& path);

void export_stats_header(std::ostream& out);
void export_stats_row(const SimStats& stats, const std::string& config_label, std::ostream& out);

} // namespace flydram
