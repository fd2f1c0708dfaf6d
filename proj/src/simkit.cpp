#include "flydram/simkit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>

#include "flydram/csv.hpp"
#include "flydram/rng.hpp"

namespace flydram {

uint64_t MemoryTrace::fingerprint() const {
    uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ULL;
    };
    mix(entries.size());
    mix(stream_count);
    for (const Entry& e : entries) {
        mix(uint64_t(e.tick));
        mix(e.is_write ? 2 : 1);
        mix(e.address);
    }
    return h;
}

MemoryTrace gen_trace(const Geometry& geometry, const TraceParams& params, uint64_t seed) {
    geometry.validate();
    if (params.length == 0)
        throw ParameterError("trace length must be positive");
    const uint64_t lines = geometry.total_cachelines();
    const uint64_t line_bytes = geometry.cacheline_bytes;

    MemoryTrace trace;
    trace.entries.reserve(params.length);
    Rng rng(derive_seed(seed, 0x77ace));

    switch (params.kind) {
    case TraceKind::Stream:
        for (uint64_t i = 0; i < params.length; ++i)
            trace.entries.push_back({int64_t(i), false, (i % lines) * line_bytes});
        break;
    case TraceKind::RandomUniform:
        for (uint64_t i = 0; i < params.length; ++i)
            trace.entries.push_back({int64_t(i), false, rng.next_below(lines) * line_bytes});
        break;
    case TraceKind::Hotspot: {
        if (!(params.fraction_hot > 0 && params.fraction_hot < 1))
            throw ParameterError("fraction_hot must lie in (0, 1)");
        if (!(params.hot_bias >= 0 && params.hot_bias <= 1))
            throw ParameterError("hot_bias must lie in [0, 1]");
        const uint64_t pages = geometry.capacity_bytes() / kPageBytes;
        if (pages < 2)
            throw ParameterError("geometry too small for a hotspot trace");
        const uint64_t hot = std::max<uint64_t>(1, uint64_t(std::llround(params.fraction_hot *
                                                                         double(pages))));
        const uint64_t lines_per_page = kPageBytes / line_bytes;
        for (uint64_t i = 0; i < params.length; ++i) {
            uint64_t page = rng.next_double() < params.hot_bias
                                ? rng.next_below(hot)
                                : hot + rng.next_below(pages - hot);
            uint64_t addr = page * kPageBytes + rng.next_below(lines_per_page) * line_bytes;
            trace.entries.push_back({int64_t(i), false, addr});
        }
        break;
    }
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Trace-driven simulation

namespace {

struct PendingMeta {
    Cycle enqueue = 0;
    bool needed_row_management = false;
};

struct ChannelSim {
    RequestQueue queue;
    std::vector<BankState> banks;
    std::vector<PendingMeta> meta; // parallel to queue.pending
};

/// Lower bound on the next cycle >= floor at which this channel can issue
/// any command. Mirrors the candidate enumeration of next_command.
Cycle earliest_work_time(const ChannelSim& ch, const TimingSource& source, Cycle floor,
                         uint32_t banks_per_rank) {
    Cycle best = INT64_MAX;
    auto bank_of = [&](const Address& a) { return a.rank * banks_per_rank + a.bank; };
    std::vector<bool> seen(ch.banks.size(), false);
    for (const Request& req : ch.queue.pending) {
        uint32_t b = bank_of(req.addr);
        const BankState& st = ch.banks[b];
        if (st.row_open() && *st.open_row == req.addr.row && ch.queue.policy == SchedPolicy::FRFCFS) {
            Command cmd{req.is_write ? CmdKind::WR : CmdKind::RD, b, req.addr.row,
                        req.addr.cacheline, source.timings_for(req.addr)};
            best = std::min(best, earliest_issue_time(st, cmd, floor));
        }
        if (seen[b])
            continue;
        seen[b] = true;
        Command cmd;
        if (st.row_open()) {
            if (*st.open_row == req.addr.row) {
                if (ch.queue.policy == SchedPolicy::FRFCFS)
                    continue;
                cmd = Command{req.is_write ? CmdKind::WR : CmdKind::RD, b, req.addr.row,
                              req.addr.cacheline, source.timings_for(req.addr)};
            } else {
                cmd = Command{CmdKind::PRE, b, 0, 0, source.timings_for(req.addr)};
            }
        } else {
            cmd = Command{CmdKind::ACT, b, req.addr.row, 0, source.timings_for(req.addr)};
        }
        best = std::min(best, earliest_issue_time(st, cmd, floor));
    }
    return best;
}

} // namespace

SimStats simulate(const MemoryTrace& trace, const LatencyProfile& profile,
                  const ControllerConfig& config, const SimOptions& options) {
    const Geometry& g = profile.geometry;
    g.validate();
    if (options.mlp_limit < 1)
        throw ParameterError("mlp_limit must be >= 1");
    if ((config.mode == ControllerConfig::Mode::FlyMap ||
         config.mode == ControllerConfig::Mode::FlyFilter) &&
        config.map == nullptr)
        throw ParameterError("flydram mode requires a region map");
    if (config.mode == ControllerConfig::Mode::FlyFilter && config.filter == nullptr)
        throw ParameterError("flydram filter mode requires a slow-set filter");

    TimingSource source;
    switch (config.mode) {
    case ControllerConfig::Mode::Baseline:
        source = TimingSource::make_uniform(config.spec);
        break;
    case ControllerConfig::Mode::FlyMap:
        source = TimingSource::make_map(*config.map);
        break;
    case ControllerConfig::Mode::FlyFilter:
        source = TimingSource::make_filter(*config.map, *config.filter);
        break;
    }

    // Entries replayed in tick order; ties keep trace order.
    std::vector<uint32_t> order(trace.entries.size());
    for (uint32_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        return trace.entries[a].tick < trace.entries[b].tick;
    });

    const uint32_t banks_per_channel = g.ranks_per_channel * g.banks_per_rank;
    std::vector<ChannelSim> channels(g.channels);
    for (auto& ch : channels)
        ch.banks.assign(banks_per_channel, BankState{});

    if (options.command_log)
        *options.command_log << "cycle,channel,bank,kind,row,cacheline,trcd_cyc,trp_cyc,tras_cyc\n";

    SimStats stats;
    stats.trace_fingerprint = trace.fingerprint();
    if (config.map)
        stats.regionmap_bytes = config.mode == ControllerConfig::Mode::FlyFilter
                                    ? config.filter->storage_bytes()
                                    : config.map->storage_bytes();

    std::priority_queue<Cycle, std::vector<Cycle>, std::greater<>> completions;
    std::vector<int64_t> read_latencies;
    read_latencies.reserve(trace.entries.size());
    uint64_t row_hits = 0;
    uint64_t next_id = 0;
    size_t next_entry = 0;
    int outstanding = 0;
    Cycle now = trace.entries.empty() ? 0 : trace.entries[order[0]].tick;
    Cycle last_completion = 0;

    const uint32_t words = (g.bits_per_cacheline() + 63) / 64;
    const std::vector<uint64_t> zeros(words, 0);

    while (true) {
        while (!completions.empty() && completions.top() <= now) {
            completions.pop();
            --outstanding;
        }
        while (next_entry < order.size() && outstanding < options.mlp_limit &&
               trace.entries[order[next_entry]].tick <= now) {
            const auto& e = trace.entries[order[next_entry]];
            Address a = g.decode(e.address);
            channels[a.channel].queue.pending.push_back({next_id++, now, e.is_write, a});
            channels[a.channel].meta.push_back({now, false});
            ++outstanding;
            ++next_entry;
        }

        for (uint32_t ci = 0; ci < channels.size(); ++ci) {
            ChannelSim& ch = channels[ci];
            if (ch.queue.pending.empty())
                continue;
            auto cmd = next_command(ch.queue, ch.banks, source, now, g.banks_per_rank);
            if (!cmd)
                continue;
            BankState& bank = ch.banks[cmd->bank];
            bool first_read = bank.phase == BankState::Phase::Activating;
            TimingParams granted_act = bank.granted_act;
            double preceding_trp =
                bank.last_pre == kNeverCycle ? config.spec.trp_ns : bank.granted_pre.trp_ns;
            bank = apply(bank, *cmd, now);

            if (options.command_log)
                *options.command_log << now << ',' << ci << ',' << cmd->bank << ','
                                     << to_string(cmd->kind) << ',' << cmd->row << ','
                                     << cmd->cacheline << ',' << cmd->timings.trcd_cyc << ','
                                     << cmd->timings.trp_cyc << ',' << cmd->timings.tras_cyc
                                     << '\n';

            if (cmd->kind == CmdKind::ACT || cmd->kind == CmdKind::PRE) {
                // Attribute the row management to the oldest request on this bank.
                for (size_t i = 0; i < ch.queue.pending.size(); ++i) {
                    const Address& a = ch.queue.pending[i].addr;
                    if (a.rank * g.banks_per_rank + a.bank == cmd->bank) {
                        ch.meta[i].needed_row_management = true;
                        break;
                    }
                }
                continue;
            }

            // Column command: retire the oldest matching request.
            size_t idx = ch.queue.pending.size();
            for (size_t i = 0; i < ch.queue.pending.size(); ++i) {
                const Request& r = ch.queue.pending[i];
                if (r.addr.rank * g.banks_per_rank + r.addr.bank == cmd->bank &&
                    r.addr.row == cmd->row && r.addr.cacheline == cmd->cacheline &&
                    r.is_write == (cmd->kind == CmdKind::WR)) {
                    idx = i;
                    break;
                }
            }
            const Request req = ch.queue.pending[idx];
            const PendingMeta meta = ch.meta[idx];
            ch.queue.pending.erase(ch.queue.pending.begin() + idx);
            ch.meta.erase(ch.meta.begin() + idx);

            Cycle done = cmd->kind == CmdKind::RD
                             ? now + config.spec.tcl_cyc + cmd->timings.burst_cyc
                             : now + cmd->timings.burst_cyc;
            completions.push(done);
            last_completion = std::max(last_completion, done);
            ++stats.requests_served;
            if (!meta.needed_row_management)
                ++row_hits;
            if (cmd->kind == CmdKind::RD) {
                read_latencies.push_back(done - meta.enqueue);
                if (!access_is_safe(profile, req.addr, granted_act.trcd_ns, first_read,
                                    preceding_trp, granted_act.tras_ns)) {
                    AccessContext ctx;
                    ctx.applied = granted_act;
                    ctx.is_first_read_after_activate = first_read;
                    ctx.preceding_precharge_ns = preceding_trp;
                    ctx.stored_data = zeros;
                    ctx.address = req.addr;
                    Rng rng(derive_seed(profile.seed, 0x51b, req.id));
                    ReadResult rr = inject_read_errors(profile, ctx, rng);
                    stats.injected_bit_flips += rr.flipped_bits;
                    if (options.ecc_enabled && rr.flipped_bits) {
                        for (uint32_t beat = 0; beat < g.bits_per_cacheline() / 64; ++beat)
                            if (std::popcount(rr.error_bitmap[beat]) == 1)
                                ++stats.ecc_corrected;
                    }
                }
            }
        }

        // Advance to the next event.
        bool queues_empty = true;
        for (const auto& ch : channels)
            if (!ch.queue.pending.empty())
                queues_empty = false;
        if (queues_empty && next_entry >= order.size() && completions.empty())
            break;

        Cycle next_now = INT64_MAX;
        if (!completions.empty())
            next_now = std::min(next_now, completions.top());
        if (next_entry < order.size()) {
            if (outstanding < options.mlp_limit)
                next_now = std::min(next_now,
                                    std::max(trace.entries[order[next_entry]].tick, now + 1));
            // else admission waits for a completion, already covered above
        }
        for (const auto& ch : channels)
            if (!ch.queue.pending.empty())
                next_now = std::min(next_now,
                                    earliest_work_time(ch, source, now + 1, g.banks_per_rank));
        if (next_now == INT64_MAX)
            break;
        now = std::max(next_now, now + 1);
    }

    stats.total_cycles = last_completion;
    if (!read_latencies.empty()) {
        int64_t sum = 0;
        for (int64_t l : read_latencies)
            sum += l;
        stats.avg_read_latency_cyc = double(sum) / double(read_latencies.size());
        size_t k = (read_latencies.size() * 99 + 99) / 100;
        k = std::min(std::max<size_t>(k, 1), read_latencies.size()) - 1;
        std::nth_element(read_latencies.begin(), read_latencies.begin() + k, read_latencies.end());
        stats.p99_read_latency_cyc = read_latencies[k];
    }
    if (stats.requests_served)
        stats.row_hit_rate = double(row_hits) / double(stats.requests_served);
    return stats;
}

double speedup(const SimStats& base, const SimStats& other) {
    if (base.trace_fingerprint != other.trace_fingerprint)
        throw ParameterError("speedup: stats come from different traces");
    if (other.total_cycles == 0)
        return base.total_cycles == 0 ? 1.0 : 0.0;
    return double(base.total_cycles) / double(other.total_cycles);
}

// ---------------------------------------------------------------------------
// Page allocation

PageMapping allocate_pages(const std::vector<uint64_t>& page_hotness, const RegionMap& map,
                           const Geometry& geometry) {
    geometry.validate();
    if (kPageBytes % geometry.cacheline_bytes != 0)
        throw ParameterError("cache line size must divide the page size");
    const uint64_t frames = geometry.capacity_bytes() / kPageBytes;
    if (frames == 0)
        throw ParameterError("geometry smaller than one page");
    if (page_hotness.size() != frames)
        throw ParameterError("page_hotness length (" + std::to_string(page_hotness.size()) +
                             ") must equal the frame count (" + std::to_string(frames) + ")");

    const uint64_t lines_per_page = kPageBytes / geometry.cacheline_bytes;
    std::vector<double> frame_key(frames, 0);
    for (uint64_t f = 0; f < frames; ++f) {
        double worst = 0;
        for (uint64_t l = 0; l < lines_per_page; ++l) {
            Address a = geometry.decode(f * kPageBytes + l * geometry.cacheline_bytes);
            const RegionTiming& e = map.entries[map.region_of(a)];
            worst = std::max(worst, e.trcd_ns + e.trp_ns);
        }
        frame_key[f] = worst;
    }

    std::vector<uint64_t> frames_by_speed(frames), pages_by_heat(frames);
    for (uint64_t i = 0; i < frames; ++i)
        frames_by_speed[i] = pages_by_heat[i] = i;
    std::stable_sort(frames_by_speed.begin(), frames_by_speed.end(),
                     [&](uint64_t a, uint64_t b) { return frame_key[a] < frame_key[b]; });
    std::stable_sort(pages_by_heat.begin(), pages_by_heat.end(),
                     [&](uint64_t a, uint64_t b) { return page_hotness[a] > page_hotness[b]; });

    PageMapping pm;
    pm.permutation.resize(frames);
    for (uint64_t i = 0; i < frames; ++i)
        pm.permutation[pages_by_heat[i]] = frames_by_speed[i];

    double min_key = *std::min_element(frame_key.begin(), frame_key.end());
    uint64_t total = 0, fast = 0;
    for (uint64_t p = 0; p < frames; ++p) {
        total += page_hotness[p];
        if (frame_key[pm.permutation[p]] <= min_key + 1e-9)
            fast += page_hotness[p];
    }
    pm.fast_coverage = total == 0 ? 1.0 : double(fast) / double(total);
    return pm;
}

MemoryTrace remap_trace(const MemoryTrace& trace, const PageMapping& mapping) {
    MemoryTrace out;
    out.stream_count = trace.stream_count;
    out.entries.reserve(trace.entries.size());
    for (const auto& e : trace.entries) {
        uint64_t page = e.address / kPageBytes;
        if (page >= mapping.permutation.size())
            throw MappingError("trace address 0x" + [&] {
                char buf[24];
                std::snprintf(buf, sizeof buf, "%llx", (unsigned long long)e.address);
                return std::string(buf);
            }() + " references unmapped page " + std::to_string(page));
        out.entries.push_back(
            {e.tick, e.is_write, mapping.permutation[page] * kPageBytes + e.address % kPageBytes});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Trace and stats I/O

void export_trace(const MemoryTrace& trace, std::ostream& out) {
    char buf[64];
    for (const auto& e : trace.entries) {
        std::snprintf(buf, sizeof buf, "%lld %c 0x%llx", (long long)e.tick, e.is_write ? 'W' : 'R',
                      (unsigned long long)e.address);
        out << buf << '\n';
    }
}

MemoryTrace import_trace(std::istream& in) {
    MemoryTrace trace;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#')
            continue;
        std::istringstream ss(line);
        int64_t tick;
        std::string op, addr;
        if (!(ss >> tick >> op >> addr) || (op != "R" && op != "W"))
            throw FormatError("trace line " + std::to_string(lineno) +
                              ": expected '<tick> <R|W> <hex-address>'");
        uint64_t address = 0;
        try {
            size_t used = 0;
            address = std::stoull(addr, &used, 16);
            if (used != addr.size())
                throw std::invalid_argument(addr);
        } catch (const std::exception&) {
            throw FormatError("trace line " + std::to_string(lineno) + ": bad address '" + addr +
                              "'");
        }
        trace.entries.push_back({tick, op == "W", address});
    }
    return trace;
}

MemoryTrace import_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw FormatError("cannot open: " + path);
    return import_trace(in);
}

void export_stats_header(std::ostream& out) {
    out << "#flydram-stats v1\n";
    out << "config,trace_fingerprint,requests_served,avg_read_latency_cyc,p99_read_latency_cyc,"
           "row_hit_rate,total_cycles,injected_bit_flips,ecc_corrected,regionmap_bytes\n";
}

void export_stats_row(const SimStats& s, const std::string& config_label, std::ostream& out) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", s.avg_read_latency_cyc);
    std::string avg = buf;
    std::snprintf(buf, sizeof buf, "%.6f", s.row_hit_rate);
    out << config_label << ',' << s.trace_fingerprint << ',' << s.requests_served << ',' << avg
        << ',' << s.p99_read_latency_cyc << ',' << buf << ',' << s.total_cycles << ','
        << s.injected_bit_flips << ',' << s.ecc_corrected << ',' << s.regionmap_bytes << '\n';
}

} // namespace flydram
