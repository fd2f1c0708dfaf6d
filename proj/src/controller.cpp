#include "flydram/controller.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "flydram/csv.hpp"
#include "flydram/rng.hpp"

namespace flydram {

namespace {
constexpr double kEps = 1e-9;
}

std::string granularity_label(Granularity g, uint32_t group_size) {
    switch (g) {
    case Granularity::Bank: return "bank";
    case Granularity::Row: return "row";
    case Granularity::CachelineGroup:
        return "cacheline_group(" + std::to_string(group_size) + ")";
    }
    return "?";
}

uint64_t RegionMap::region_of(const Address& a) const {
    switch (granularity) {
    case Granularity::Bank:
        return geometry.flat_bank(a);
    case Granularity::Row:
        return geometry.flat_row(a);
    case Granularity::CachelineGroup: {
        uint64_t groups_per_row = (geometry.cachelines_per_row + group_size - 1) / group_size;
        return geometry.flat_row(a) * groups_per_row + a.cacheline / group_size;
    }
    }
    throw ParameterError("unknown granularity");
}

namespace {

void check_steps(const std::vector<double>& steps, double spec_value, const char* name) {
    if (steps.empty())
        throw ParameterError(std::string(name) + " latency steps must be non-empty");
    if (!std::is_sorted(steps.begin(), steps.end()))
        throw ParameterError(std::string(name) + " latency steps must be ascending");
    bool has_spec = std::any_of(steps.begin(), steps.end(),
                                [&](double s) { return std::abs(s - spec_value) < kEps; });
    if (!has_spec)
        throw ParameterError(std::string(name) + " latency steps must contain the spec value");
}

double snap_up(double value, const std::vector<double>& steps, uint32_t guardband, double spec) {
    size_t idx = steps.size() - 1;
    for (size_t i = 0; i < steps.size(); ++i)
        if (steps[i] >= value - kEps) {
            idx = i;
            break;
        }
    size_t spec_idx = 0;
    for (size_t i = 0; i < steps.size(); ++i)
        if (std::abs(steps[i] - spec) < kEps)
            spec_idx = i;
    idx = std::min(idx + guardband, spec_idx);
    return steps[idx];
}

} // namespace

RegionMap build_region_map(const LatencyProfile& profile, Granularity granularity,
                           const LatencySteps& steps, uint32_t guardband_steps,
                           uint32_t group_size) {
    if (granularity == Granularity::CachelineGroup && group_size < 1)
        throw ParameterError("group_size must be >= 1");
    RegionMap map;
    map.geometry = profile.geometry;
    map.granularity = granularity;
    map.group_size = group_size;
    map.steps = steps;
    check_steps(steps.act_ns, map.spec.trcd_ns, "activation");
    check_steps(steps.pre_ns, map.spec.trp_ns, "precharge");
    check_steps(steps.ras_ns, map.spec.tras_ns, "restoration");

    const Geometry& g = map.geometry;
    uint64_t groups_per_row = (g.cachelines_per_row + group_size - 1) / group_size;
    uint64_t count = 0;
    switch (granularity) {
    case Granularity::Bank: count = g.total_banks(); break;
    case Granularity::Row: count = g.total_rows(); break;
    case Granularity::CachelineGroup: count = g.total_rows() * groups_per_row; break;
    }

    std::vector<RegionTiming> worst(count, RegionTiming{0, 0, 0});
    for (uint64_t r = 0; r < g.total_rows(); ++r) {
        for (uint32_t l = 0; l < g.cachelines_per_row; ++l) {
            uint64_t fl = r * g.cachelines_per_row + l;
            uint64_t region;
            switch (granularity) {
            case Granularity::Bank: region = r / g.rows_per_bank; break;
            case Granularity::Row: region = r; break;
            default: region = r * groups_per_row + l / group_size; break;
            }
            RegionTiming& w = worst[region];
            w.trcd_ns = std::max(w.trcd_ns, double(profile.line_trcd_ns[fl]));
            w.trp_ns = std::max(w.trp_ns, double(profile.row_trp_ns[r]));
            w.tras_ns = std::max(w.tras_ns, double(profile.row_tras_ns[r]));
        }
    }

    map.entries.resize(count);
    for (uint64_t i = 0; i < count; ++i) {
        map.entries[i].trcd_ns =
            snap_up(worst[i].trcd_ns, steps.act_ns, guardband_steps, map.spec.trcd_ns);
        map.entries[i].trp_ns =
            snap_up(worst[i].trp_ns, steps.pre_ns, guardband_steps, map.spec.trp_ns);
        map.entries[i].tras_ns =
            snap_up(worst[i].tras_ns, steps.ras_ns, guardband_steps, map.spec.tras_ns);
    }
    return map;
}

TimingParams lookup_timing(const RegionMap& map, const Address& address) {
    map.geometry.check(address);
    const RegionTiming& e = map.entries[map.region_of(address)];
    return TimingParams::make(e.trcd_ns, e.trp_ns, e.tras_ns, map.spec.tcl_ns, map.spec.tck_ns);
}

// ---------------------------------------------------------------------------
// Slow-set Bloom filter

namespace {

// Independent mixing per hash function; double hashing correlates too much
// on the sequential region indices the map produces.
uint64_t bloom_hash(uint64_t key, uint32_t i) {
    uint64_t s = key;
    uint64_t mixed = splitmix64(s);
    s = mixed ^ (uint64_t(i + 1) * 0x9e3779b97f4a7c15ULL);
    return splitmix64(s);
}

} // namespace

bool SlowSetFilter::member(uint64_t region_index) const {
    if (bits.empty())
        return false;
    uint64_t m = bits.size() * 64;
    for (uint32_t i = 0; i < hash_count; ++i) {
        uint64_t pos = bloom_hash(region_index, i) % m;
        if (!((bits[pos >> 6] >> (pos & 63)) & 1))
            return false;
    }
    return true;
}

SlowSetFilter compress_slow_set(const RegionMap& map, double fp_rate) {
    if (!(fp_rate > 0.0 && fp_rate < 0.5))
        throw ParameterError("fp_rate must lie in (0, 0.5)");

    SlowSetFilter f;
    f.target_fp_rate = fp_rate;
    f.spec = map.spec;
    f.fast = TimingParams::make(map.steps.act_ns.front(), map.steps.pre_ns.front(),
                                map.steps.ras_ns.front(), map.spec.tcl_ns, map.spec.tck_ns);

    std::vector<uint64_t> slow;
    for (uint64_t i = 0; i < map.entries.size(); ++i) {
        const RegionTiming& e = map.entries[i];
        if (e.trcd_ns > map.steps.act_ns.front() + kEps ||
            e.trp_ns > map.steps.pre_ns.front() + kEps ||
            e.tras_ns > map.steps.ras_ns.front() + kEps)
            slow.push_back(i);
    }

    // Size for half the target rate so sampling noise on small region sets
    // stays comfortably below the configured bound.
    const double ln2 = 0.6931471805599453;
    uint64_t n = std::max<uint64_t>(1, slow.size());
    uint64_t m = uint64_t(std::ceil(-double(n) * std::log(fp_rate * 0.5) / (ln2 * ln2)));
    m = std::max<uint64_t>(64, (m + 63) / 64 * 64);
    f.bits.assign(m / 64, 0);
    f.hash_count = uint32_t(std::clamp<int64_t>(std::llround(double(m) / double(n) * ln2), 1, 16));

    for (uint64_t region : slow)
        for (uint32_t i = 0; i < f.hash_count; ++i) {
            uint64_t pos = bloom_hash(region, i) % m;
            f.bits[pos >> 6] |= uint64_t(1) << (pos & 63);
        }
    f.inserted = slow.size();
    return f;
}

// ---------------------------------------------------------------------------
// Scheduling

TimingParams TimingSource::timings_for(const Address& a) const {
    switch (mode) {
    case Mode::Uniform:
        return uniform;
    case Mode::Map:
        return lookup_timing(*map, a);
    case Mode::Filter:
        map->geometry.check(a);
        return filter->timing_for_region(map->region_of(a));
    }
    throw ParameterError("unknown timing source mode");
}

std::optional<Command> next_command(const RequestQueue& queue, const std::vector<BankState>& banks,
                                    const TimingSource& source, Cycle now,
                                    uint32_t banks_per_rank) {
    auto bank_of = [&](const Address& a) { return a.rank * banks_per_rank + a.bank; };

    if (queue.policy == SchedPolicy::FRFCFS) {
        // Ready column commands to open rows, oldest first.
        for (const Request& req : queue.pending) {
            uint32_t b = bank_of(req.addr);
            const BankState& st = banks[b];
            if (!st.row_open() || *st.open_row != req.addr.row)
                continue;
            Command cmd{req.is_write ? CmdKind::WR : CmdKind::RD, b, req.addr.row,
                        req.addr.cacheline, source.timings_for(req.addr)};
            if (earliest_issue_time(st, cmd, now) <= now)
                return cmd;
        }
    }

    // Row-management commands for the oldest request of each bank. A younger
    // request never closes a row an older same-bank request still needs.
    std::vector<bool> seen_banks(banks.size(), false);
    for (const Request& req : queue.pending) {
        uint32_t b = bank_of(req.addr);
        if (seen_banks[b])
            continue;
        seen_banks[b] = true;
        const BankState& st = banks[b];
        Command cmd;
        if (st.row_open()) {
            if (*st.open_row == req.addr.row) {
                if (queue.policy == SchedPolicy::FRFCFS)
                    continue; // its column command was not ready in the pass above
                cmd = Command{req.is_write ? CmdKind::WR : CmdKind::RD, b, req.addr.row,
                              req.addr.cacheline, source.timings_for(req.addr)};
            } else {
                cmd = Command{CmdKind::PRE, b, 0, 0, source.timings_for(req.addr)};
            }
        } else {
            cmd = Command{CmdKind::ACT, b, req.addr.row, 0, source.timings_for(req.addr)};
        }
        if (earliest_issue_time(st, cmd, now) <= now)
            return cmd;
        if (queue.policy == SchedPolicy::FCFS)
            return std::nullopt;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Region map CSV

namespace {
const char* kMapHeader = "#flydram-regionmap v1";
const char* kMapColumns = "region_index,trcd_ns,trp_ns,tras_ns";

std::string join_steps(const std::vector<double>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i)
            s += '|';
        s += csv::format_ns(v[i]);
    }
    return s;
}

std::vector<double> parse_steps(std::string_view s, const std::string& ctx) {
    std::vector<double> out;
    for (auto f : csv::split(s, '|'))
        out.push_back(csv::parse_double(f, ctx));
    return out;
}
} // namespace

void export_region_map(const RegionMap& map, std::ostream& out) {
    const Geometry& g = map.geometry;
    out << kMapHeader << '\n';
    out << "#geometry channels=" << g.channels << ",ranks=" << g.ranks_per_channel
        << ",banks=" << g.banks_per_rank << ",rows=" << g.rows_per_bank
        << ",cachelines=" << g.cachelines_per_row << ",line_bytes=" << g.cacheline_bytes << '\n';
    out << "#steps act=" << join_steps(map.steps.act_ns) << ",pre=" << join_steps(map.steps.pre_ns)
        << ",ras=" << join_steps(map.steps.ras_ns) << '\n';
    out << "granularity," << granularity_label(map.granularity, map.group_size) << '\n';
    out << kMapColumns << '\n';
    for (uint64_t i = 0; i < map.entries.size(); ++i)
        out << i << ',' << csv::format_ns(map.entries[i].trcd_ns) << ','
            << csv::format_ns(map.entries[i].trp_ns) << ','
            << csv::format_ns(map.entries[i].tras_ns) << '\n';
}

RegionMap import_region_map(std::istream& in) {
    std::string line;
    int lineno = 0;
    auto ctx = [&] { return "regionmap csv line " + std::to_string(lineno); };
    if (!std::getline(in, line) || line != kMapHeader)
        throw FormatError("regionmap csv line 1: missing '" + std::string(kMapHeader) + "' header");
    lineno = 1;

    RegionMap map;
    Geometry g;
    bool have_geometry = false, have_granularity = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.rfind("#geometry ", 0) == 0) {
            for (auto field : csv::split(std::string_view(line).substr(10))) {
                auto eq = field.find('=');
                if (eq == std::string_view::npos)
                    throw FormatError(ctx() + ": malformed geometry header");
                std::string k(field.substr(0, eq));
                uint64_t n = csv::parse_u64(field.substr(eq + 1), ctx());
                if (k == "channels") g.channels = uint32_t(n);
                else if (k == "ranks") g.ranks_per_channel = uint32_t(n);
                else if (k == "banks") g.banks_per_rank = uint32_t(n);
                else if (k == "rows") g.rows_per_bank = uint32_t(n);
                else if (k == "cachelines") g.cachelines_per_row = uint32_t(n);
                else if (k == "line_bytes") g.cacheline_bytes = uint32_t(n);
                else throw FormatError(ctx() + ": unknown geometry key '" + k + "'");
            }
            have_geometry = true;
        } else if (line.rfind("#steps ", 0) == 0) {
            for (auto field : csv::split(std::string_view(line).substr(7))) {
                auto eq = field.find('=');
                if (eq == std::string_view::npos)
                    throw FormatError(ctx() + ": malformed steps header");
                std::string k(field.substr(0, eq));
                auto v = parse_steps(field.substr(eq + 1), ctx());
                if (k == "act") map.steps.act_ns = v;
                else if (k == "pre") map.steps.pre_ns = v;
                else if (k == "ras") map.steps.ras_ns = v;
                else throw FormatError(ctx() + ": unknown steps key '" + k + "'");
            }
        } else if (line.rfind("granularity,", 0) == 0) {
            std::string kind = line.substr(12);
            if (kind == "bank") {
                map.granularity = Granularity::Bank;
            } else if (kind == "row") {
                map.granularity = Granularity::Row;
            } else if (kind.rfind("cacheline_group(", 0) == 0 && kind.back() == ')') {
                map.granularity = Granularity::CachelineGroup;
                map.group_size =
                    uint32_t(csv::parse_u64(kind.substr(16, kind.size() - 17), ctx()));
                if (map.group_size < 1)
                    throw FormatError(ctx() + ": group size must be >= 1");
            } else {
                throw FormatError(ctx() + ": unknown granularity '" + kind + "'");
            }
            have_granularity = true;
        } else if (line == kMapColumns) {
            break;
        } else {
            throw FormatError(ctx() + ": unexpected line before column header");
        }
    }
    if (!have_geometry || !have_granularity)
        throw FormatError("regionmap csv: missing #geometry or granularity header");
    g.validate();
    map.geometry = g;

    uint64_t groups_per_row = (g.cachelines_per_row + map.group_size - 1) / map.group_size;
    uint64_t count = 0;
    switch (map.granularity) {
    case Granularity::Bank: count = g.total_banks(); break;
    case Granularity::Row: count = g.total_rows(); break;
    case Granularity::CachelineGroup: count = g.total_rows() * groups_per_row; break;
    }
    map.entries.assign(count, RegionTiming{-1, -1, -1});

    uint64_t seen = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        auto f = csv::split(line);
        if (f.size() != 4)
            throw FormatError(ctx() + ": expected 4 fields");
        uint64_t idx = csv::parse_u64(f[0], ctx());
        if (idx >= count)
            throw FormatError(ctx() + ": region index out of range");
        if (map.entries[idx].trcd_ns >= 0)
            throw FormatError(ctx() + ": duplicate region index");
        map.entries[idx].trcd_ns = csv::parse_double(f[1], ctx());
        map.entries[idx].trp_ns = csv::parse_double(f[2], ctx());
        map.entries[idx].tras_ns = csv::parse_double(f[3], ctx());
        if (map.entries[idx].trcd_ns <= 0 || map.entries[idx].trp_ns <= 0 ||
            map.entries[idx].tras_ns <= 0)
            throw FormatError(ctx() + ": durations must be positive");
        ++seen;
    }
    if (seen != count)
        throw FormatError("regionmap csv: incomplete map (" + std::to_string(seen) + " of " +
                          std::to_string(count) + " regions)");
    return map;
}

void export_region_map_file(const RegionMap& map, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw FormatError("cannot open for writing: " + path);
    export_region_map(map, out);
}

RegionMap import_region_map_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw FormatError("cannot open: " + path);
    return import_region_map(in);
}

} // namespace flydram
