#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "flydram/device_model.hpp"
#include "flydram/geometry.hpp"
#include "flydram/timing_engine.hpp"
#include "flydram/timing_params.hpp"

namespace flydram {

enum class Granularity { CachelineGroup, Row, Bank };

std::string granularity_label(Granularity g, uint32_t group_size);

/// Candidate latency values the controller may grant, ordered ascending and
/// ending at the vendor spec value. Anchored to the characterized points:
/// tRCD/tRP in {7.5, 10, 12.5, 13.125} ns, tRAS in {27, 36} ns.
struct LatencySteps {
    std::vector<double> act_ns = {7.5, 10.0, 12.5, 13.125};
    std::vector<double> pre_ns = {7.5, 10.0, 12.5, 13.125};
    std::vector<double> ras_ns = {27.0, 36.0};
};

struct RegionTiming {
    double trcd_ns = 0, trp_ns = 0, tras_ns = 0;

    bool operator==(const RegionTiming&) const = default;
};

/// Controller-visible table of safe timings per address region. Entries are
/// conservative: at least the worst required timing of any member location,
/// rounded up to a latency step.
struct RegionMap {
    Geometry geometry;
    Granularity granularity = Granularity::Row;
    uint32_t group_size = 8; ///< cache lines per region at CachelineGroup granularity
    TimingParams spec = TimingParams::ddr3_1333();
    LatencySteps steps;
    std::vector<RegionTiming> entries;

    uint64_t region_count() const { return entries.size(); }
    uint64_t region_of(const Address& a) const;

    /// RegionMap SRAM footprint: 2 bits per parameter level, 3 parameters.
    uint64_t storage_bytes() const { return (entries.size() * 6 + 7) / 8; }
};

RegionMap build_region_map(const LatencyProfile& profile, Granularity granularity,
                           const LatencySteps& steps, uint32_t guardband_steps,
                           uint32_t group_size = 8);

TimingParams lookup_timing(const RegionMap& map, const Address& address);

/// Bloom filter over the slow region set. False positives cost only latency
/// (a fast region served at spec); false negatives cannot occur.
struct SlowSetFilter {
    std::vector<uint64_t> bits;
    uint32_t hash_count = 1;
    double target_fp_rate = 0.01;
    uint64_t inserted = 0;
    TimingParams fast;   ///< served when a region is not in the filter
    TimingParams spec;   ///< served when it is

    bool member(uint64_t region_index) const;
    TimingParams timing_for_region(uint64_t region_index) const {
        return member(region_index) ? spec : fast;
    }
    uint64_t storage_bytes() const { return bits.size() * 8; }
};

SlowSetFilter compress_slow_set(const RegionMap& map, double fp_rate);

// ---------------------------------------------------------------------------
// Request scheduling

struct Request {
    uint64_t id = 0;
    Cycle arrival = 0;
    bool is_write = false;
    Address addr;
};

enum class SchedPolicy { FCFS, FRFCFS };

/// Pending requests of one channel, FIFO-ordered by arrival.
struct RequestQueue {
    std::deque<Request> pending;
    SchedPolicy policy = SchedPolicy::FRFCFS;
};

/// Where per-request timings come from: the uniform baseline, a region map,
/// or a slow-set filter over one.
struct TimingSource {
    enum class Mode { Uniform, Map, Filter } mode = Mode::Uniform;
    TimingParams uniform = TimingParams::ddr3_1333();
    const RegionMap* map = nullptr;
    const SlowSetFilter* filter = nullptr;

    static TimingSource make_uniform(TimingParams t) {
        return {Mode::Uniform, t, nullptr, nullptr};
    }
    static TimingSource make_map(const RegionMap& m) {
        return {Mode::Map, m.spec, &m, nullptr};
    }
    static TimingSource make_filter(const RegionMap& m, const SlowSetFilter& f) {
        return {Mode::Filter, m.spec, &m, &f};
    }

    TimingParams timings_for(const Address& a) const;
};

/// FR-FCFS with open-row policy: prefer issuable column commands to open rows
/// (oldest first), otherwise walk the queue oldest-first and issue the PRE or
/// ACT the head-most request needs. Returns nothing when no command can issue
/// at `now`. PRE commands carry the target request's tRP so the next
/// activation of the bank is granted a precharge long enough for its row.
/// `banks` holds one state per (rank, bank) of the channel; a request maps to
/// index rank * banks_per_rank + bank, which is also Command::bank.
std::optional<Command> next_command(const RequestQueue& queue,
                                    const std::vector<BankState>& banks,
                                    const TimingSource& source, Cycle now,
                                    uint32_t banks_per_rank);

void export_region_map(const RegionMap& map, std::ostream& out);
RegionMap import_region_map(std::istream& in);
void export_region_map_file(const RegionMap& map, const std::string& path);
RegionMap import_region_map_file(const std::string& path);

} // namespace flydram
