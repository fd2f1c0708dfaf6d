#include "flydram/device_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "flydram/csv.hpp"

namespace flydram {

namespace {

constexpr double kBaseLoNs = 6.9; // fast-cell threshold band
constexpr double kBaseHiNs = 7.4;
constexpr double kTrasLoNs = 20.0; // restoration floor band, always <= 27 ns
constexpr double kTrasHiNs = 26.0;
constexpr double kSingleWeakBitProb = 0.75;

float q3f(double ns) { return float(csv::quantize_ns(ns)); }

double bump_at(double dist2, double radius, double depth) {
    return depth * std::exp(-dist2 / (2.0 * radius * radius));
}

// Expected number of grid cells a single cluster pushes above the fast
// threshold, with bases uniform in [kBaseLo, kBaseHi]. dims = 2 for the
// (row, cacheline) activation clusters, 1 for the per-row precharge clusters.
double expected_slow_cells_per_cluster(const VariationParams& p, int dims) {
    double excess = kFastThresholdNs - kBaseHiNs; // bump needed to slow the fastest base
    if (p.cluster_depth_ns <= excess)
        return 0.0;
    double dmax = p.cluster_radius * std::sqrt(2.0 * std::log(p.cluster_depth_ns / excess));
    int reach = int(std::ceil(dmax));
    double total = 0.0;
    for (int dx = -reach; dx <= reach; ++dx) {
        int ylo = dims == 2 ? -reach : 0;
        int yhi = dims == 2 ? reach : 0;
        for (int dy = ylo; dy <= yhi; ++dy) {
            double b = bump_at(double(dx) * dx + double(dy) * dy, p.cluster_radius,
                               p.cluster_depth_ns);
            double prob = (b - excess) / (kBaseHiNs - kBaseLoNs);
            total += std::clamp(prob, 0.0, 1.0);
        }
    }
    return total;
}

int derive_cluster_count(const VariationParams& p, uint64_t population, int dims) {
    double target = (1.0 - p.base_fast_fraction) * double(population);
    if (target <= 0)
        return 0;
    double per = expected_slow_cells_per_cluster(p, dims);
    if (per <= 0)
        return 0;
    return std::max(1, int(std::llround(target / per)));
}

uint32_t center_coord(Rng& rng, uint32_t dim, int reach) {
    // Keep centers away from the bank edge so clusters are not clipped,
    // when the bank is large enough to allow it.
    uint32_t margin = std::min<uint32_t>(uint32_t(reach), (dim - 1) / 2);
    return margin + uint32_t(rng.next_below(dim - 2 * margin));
}

} // namespace

void VariationParams::validate() const {
    if (cluster_radius <= 0)
        throw ParameterError("cluster_radius must be positive");
    if (cluster_depth_ns < 0 || pattern_penalty_ns < 0 || jitter_sigma_ns < 0)
        throw ParameterError("durations must be non-negative");
    if (base_fast_fraction < 0 || base_fast_fraction > 1)
        throw ParameterError("base_fast_fraction must lie in [0, 1]");
}

bool LatencyProfile::operator==(const LatencyProfile& o) const {
    return geometry == o.geometry && line_trcd_ns == o.line_trcd_ns && row_trp_ns == o.row_trp_ns &&
           row_tras_ns == o.row_tras_ns && weak_bits == o.weak_bits &&
           pattern_penalty_ns == o.pattern_penalty_ns && jitter_sigma_ns == o.jitter_sigma_ns &&
           seed == o.seed;
}

LatencyProfile generate_profile(const Geometry& geometry, const VariationParams& params,
                                uint64_t seed) {
    geometry.validate();
    params.validate();

    LatencyProfile p;
    p.geometry = geometry;
    p.pattern_penalty_ns = double(q3f(params.pattern_penalty_ns));
    p.jitter_sigma_ns = double(q3f(params.jitter_sigma_ns));
    p.seed = seed;

    const uint64_t lines = geometry.total_cachelines();
    const uint64_t rows = geometry.total_rows();
    const uint64_t banks = geometry.total_banks();
    const uint32_t rows_pb = geometry.rows_per_bank;
    const uint32_t lines_pr = geometry.cachelines_per_row;

    std::vector<double> line_thr(lines);
    std::vector<double> row_trp(rows);
    p.row_tras_ns.resize(rows);

    {
        Rng base_rng(derive_seed(seed, 1));
        for (uint64_t i = 0; i < lines; ++i)
            line_thr[i] = base_rng.uniform(kBaseLoNs, kBaseHiNs);
        for (uint64_t r = 0; r < rows; ++r) {
            row_trp[r] = base_rng.uniform(kBaseLoNs, kBaseHiNs);
            p.row_tras_ns[r] = q3f(base_rng.uniform(kTrasLoNs, kTrasHiNs));
        }
    }

    // Activation clusters: 2D Gaussian bumps in (row, cacheline) space.
    int act_clusters = params.cluster_count >= 0
                           ? params.cluster_count
                           : derive_cluster_count(params, lines, 2);
    if (act_clusters > 0 && params.cluster_depth_ns > 0) {
        Rng crng(derive_seed(seed, 2));
        double dmax = params.cluster_radius *
                      std::sqrt(2.0 * std::log(std::max(params.cluster_depth_ns / 0.01, 1.001)));
        int reach = int(std::ceil(dmax));
        for (int c = 0; c < act_clusters; ++c) {
            uint64_t bank = crng.next_below(banks);
            uint32_t crow = center_coord(crng, rows_pb, reach);
            uint32_t cline = center_coord(crng, lines_pr, reach);
            uint32_t r0 = crow > uint32_t(reach) ? crow - reach : 0;
            uint32_t r1 = std::min<uint32_t>(rows_pb - 1, crow + reach);
            uint32_t l0 = cline > uint32_t(reach) ? cline - reach : 0;
            uint32_t l1 = std::min<uint32_t>(lines_pr - 1, cline + reach);
            for (uint32_t r = r0; r <= r1; ++r) {
                double dr = double(r) - crow;
                uint64_t row_base = (bank * rows_pb + r) * lines_pr;
                for (uint32_t l = l0; l <= l1; ++l) {
                    double dl = double(l) - cline;
                    line_thr[row_base + l] += bump_at(dr * dr + dl * dl, params.cluster_radius,
                                                     params.cluster_depth_ns);
                }
            }
        }
    }

    // Precharge clusters: 1D bumps over the row index of each bank.
    int pre_clusters = params.cluster_count >= 0
                           ? params.cluster_count
                           : derive_cluster_count(params, rows, 1);
    if (pre_clusters > 0 && params.cluster_depth_ns > 0) {
        Rng crng(derive_seed(seed, 3));
        double dmax = params.cluster_radius *
                      std::sqrt(2.0 * std::log(std::max(params.cluster_depth_ns / 0.01, 1.001)));
        int reach = int(std::ceil(dmax));
        for (int c = 0; c < pre_clusters; ++c) {
            uint64_t bank = crng.next_below(banks);
            uint32_t crow = center_coord(crng, rows_pb, reach);
            uint32_t r0 = crow > uint32_t(reach) ? crow - reach : 0;
            uint32_t r1 = std::min<uint32_t>(rows_pb - 1, crow + reach);
            for (uint32_t r = r0; r <= r1; ++r) {
                double dr = double(r) - crow;
                row_trp[bank * rows_pb + r] +=
                    bump_at(dr * dr, params.cluster_radius, params.cluster_depth_ns);
            }
        }
    }

    p.line_trcd_ns.resize(lines);
    for (uint64_t i = 0; i < lines; ++i)
        p.line_trcd_ns[i] = q3f(std::min(line_thr[i], kSlowCapNs));
    p.row_trp_ns.resize(rows);
    for (uint64_t r = 0; r < rows; ++r)
        p.row_trp_ns[r] = q3f(std::min(row_trp[r], kSlowCapNs));

    // Weak bits for every erroneous cache line. The weakest bit's margin
    // equals the pattern penalty, so a stored 0 in that bit fails exactly at
    // the line's threshold and a stored 1 fails one penalty below it.
    const float penalty = float(p.pattern_penalty_ns);
    const uint32_t bits = geometry.bits_per_cacheline();
    for (uint64_t i = 0; i < lines; ++i) {
        uint64_t row = i / lines_pr;
        bool slow = p.line_trcd_ns[i] > kFastThresholdNs || p.row_trp_ns[row] > kFastThresholdNs;
        if (!slow)
            continue;
        Rng wrng(derive_seed(seed, 4, i));
        std::vector<WeakBit> wb;
        int minimal = wrng.next_double() < kSingleWeakBitProb ? 1 : 2 + int(wrng.next_below(2));
        for (int k = 0; k < minimal; ++k)
            wb.push_back({uint16_t(wrng.next_below(bits)), penalty});
        int extra = int(wrng.next_below(3));
        for (int k = 0; k < extra; ++k) {
            float margin = q3f(penalty + wrng.uniform(0.05, 1.5));
            wb.push_back({uint16_t(wrng.next_below(bits)), margin});
        }
        std::sort(wb.begin(), wb.end(),
                  [](const WeakBit& a, const WeakBit& b) { return a.bit < b.bit; });
        wb.erase(std::unique(wb.begin(), wb.end(),
                             [](const WeakBit& a, const WeakBit& b) { return a.bit == b.bit; }),
                 wb.end());
        p.weak_bits.emplace(i, std::move(wb));
    }

    return p;
}

double required_timing(const LatencyProfile& profile, const Address& address, TimingKind kind) {
    profile.geometry.check(address);
    switch (kind) {
    case TimingKind::Activation:
        return profile.line_trcd_ns[profile.geometry.flat_cacheline(address)];
    case TimingKind::Precharge:
        return profile.row_trp_ns[profile.geometry.flat_row(address)];
    case TimingKind::Restoration:
        return profile.row_tras_ns[profile.geometry.flat_row(address)];
    }
    throw ParameterError("unknown timing kind");
}

namespace {

struct LineThresholds {
    double trcd, trp, tras;          // base thresholds of the line / its row
    double u_trcd, u_trp, u_tras;    // thresholds of bits without a weak entry
};

LineThresholds thresholds_for(const LatencyProfile& p, uint64_t flat_line, uint64_t flat_row) {
    LineThresholds t;
    t.trcd = p.line_trcd_ns[flat_line];
    t.trp = p.row_trp_ns[flat_row];
    t.tras = p.row_tras_ns[flat_row];
    t.u_trcd = std::min(t.trcd, kFastThresholdNs);
    t.u_trp = std::min(t.trp, kFastThresholdNs);
    t.u_tras = 0.75 * t.tras; // under-restoration floor for ordinary bits
    return t;
}

inline bool stored_bit(const std::vector<uint64_t>& words, uint32_t bit) {
    return (words[bit >> 6] >> (bit & 63)) & 1;
}

inline void flip_bit(std::vector<uint64_t>& words, uint32_t bit) {
    words[bit >> 6] ^= uint64_t(1) << (bit & 63);
}

} // namespace

bool access_is_safe(const LatencyProfile& profile, const Address& address,
                    double applied_trcd_ns, bool is_first_read, double preceding_precharge_ns,
                    double applied_tras_ns) {
    profile.geometry.check(address);
    if (profile.jitter_sigma_ns > 0)
        return false;
    uint64_t line = profile.geometry.flat_cacheline(address);
    uint64_t row = profile.geometry.flat_row(address);
    const LineThresholds t = thresholds_for(profile, line, row);
    // Worst case over stored data: a stored 0 takes the full pattern penalty,
    // so a weak bit's threshold is base - margin + penalty; ordinary bits sit
    // at the unlisted thresholds.
    double thr_trcd = t.u_trcd, thr_trp = t.u_trp, thr_tras = t.u_tras;
    if (const auto* weak = profile.weak_bits_of(line)) {
        for (const WeakBit& wb : *weak) {
            double lift = profile.pattern_penalty_ns - double(wb.extra_margin_ns);
            thr_trcd = std::max(thr_trcd, t.trcd + lift);
            thr_trp = std::max(thr_trp, t.trp + lift);
            thr_tras = std::max(thr_tras, t.tras + lift);
        }
    }
    if (is_first_read && thr_trcd > applied_trcd_ns)
        return false;
    if (thr_trp > preceding_precharge_ns)
        return false;
    if (thr_tras > applied_tras_ns)
        return false;
    return true;
}

ReadResult inject_read_errors(const LatencyProfile& profile, const AccessContext& ctx, Rng& rng) {
    profile.geometry.check(ctx.address);
    const uint32_t bits = profile.geometry.bits_per_cacheline();
    const uint32_t words = (bits + 63) / 64;
    if (ctx.stored_data.size() != words)
        throw ParameterError("stored_data must hold cacheline_bytes*8 bits");

    const uint64_t flat_line = profile.geometry.flat_cacheline(ctx.address);
    const uint64_t flat_row = profile.geometry.flat_row(ctx.address);
    const LineThresholds t = thresholds_for(profile, flat_line, flat_row);
    const auto* weak = profile.weak_bits_of(flat_line);
    const double penalty = profile.pattern_penalty_ns;
    const double sigma = profile.jitter_sigma_ns;

    const bool first = ctx.is_first_read_after_activate;
    const double trcd = ctx.applied.trcd_ns;
    const double prech = ctx.preceding_precharge_ns;
    const double tras = ctx.applied.tras_ns;

    ReadResult res;
    res.returned_data = ctx.stored_data;
    res.error_bitmap.assign(words, 0);

    auto weak_flips = [&](const WeakBit& wb, double jitter) {
        double pen = stored_bit(ctx.stored_data, wb.bit) ? 0.0 : penalty;
        double m = double(wb.extra_margin_ns);
        // A weak bit is at least as fragile as an ordinary one.
        double e_trcd = std::max(t.trcd - m + pen, t.u_trcd) + jitter;
        double e_trp = std::max(t.trp - m + pen, t.u_trp) + jitter;
        double e_tras = std::max(t.tras - m + pen, t.u_tras) + jitter;
        return (first && e_trcd > trcd) || e_trp > prech || e_tras > tras;
    };

    if (sigma == 0) {
        bool plain_flip = (first && t.u_trcd > trcd) || t.u_trp > prech || t.u_tras > tras;
        if (plain_flip) {
            for (uint32_t w = 0; w < words; ++w)
                res.error_bitmap[w] = ~uint64_t(0);
            if (bits & 63)
                res.error_bitmap[words - 1] &= (uint64_t(1) << (bits & 63)) - 1;
        } else if (weak) {
            for (const WeakBit& wb : *weak)
                if (weak_flips(wb, 0.0))
                    flip_bit(res.error_bitmap, wb.bit);
        }
    } else {
        for (uint32_t b = 0; b < bits; ++b) {
            double jitter = rng.gaussian() * sigma;
            const WeakBit* wb = nullptr;
            if (weak)
                for (const WeakBit& cand : *weak)
                    if (cand.bit == b) {
                        wb = &cand;
                        break;
                    }
            bool flips;
            if (wb) {
                flips = weak_flips(*wb, jitter);
            } else {
                flips = (first && t.u_trcd + jitter > trcd) || t.u_trp + jitter > prech ||
                        t.u_tras + jitter > tras;
            }
            if (flips)
                flip_bit(res.error_bitmap, b);
        }
    }

    for (uint32_t w = 0; w < words; ++w) {
        res.returned_data[w] ^= res.error_bitmap[w];
        res.flipped_bits += uint64_t(std::popcount(res.error_bitmap[w]));
    }
    return res;
}

// ---------------------------------------------------------------------------
// Profile CSV import/export

namespace {

const char* kProfileHeader = "#flydram-profile v1";
const char* kWeakHeader = "#flydram-weakbits v1";
const char* kProfileColumns = "channel,rank,bank,row,cacheline,min_trcd_ns,min_trp_ns,min_tras_ns";
const char* kWeakColumns = "channel,rank,bank,row,cacheline,bit_index,extra_margin_ns";

} // namespace

void export_profile(const LatencyProfile& profile, std::ostream& out, std::ostream& weak_out) {
    const Geometry& g = profile.geometry;
    out << kProfileHeader << '\n';
    out << "#geometry channels=" << g.channels << ",ranks=" << g.ranks_per_channel
        << ",banks=" << g.banks_per_rank << ",rows=" << g.rows_per_bank
        << ",cachelines=" << g.cachelines_per_row << ",line_bytes=" << g.cacheline_bytes << '\n';
    out << "#meta seed=" << profile.seed
        << ",pattern_penalty_ns=" << csv::format_ns(profile.pattern_penalty_ns)
        << ",jitter_sigma_ns=" << csv::format_ns(profile.jitter_sigma_ns) << '\n';
    out << kProfileColumns << '\n';
    Address a;
    for (a.channel = 0; a.channel < g.channels; ++a.channel)
        for (a.rank = 0; a.rank < g.ranks_per_channel; ++a.rank)
            for (a.bank = 0; a.bank < g.banks_per_rank; ++a.bank)
                for (a.row = 0; a.row < g.rows_per_bank; ++a.row) {
                    uint64_t fr = g.flat_row(a);
                    std::string trp = csv::format_ns(profile.row_trp_ns[fr]);
                    std::string tras = csv::format_ns(profile.row_tras_ns[fr]);
                    for (a.cacheline = 0; a.cacheline < g.cachelines_per_row; ++a.cacheline) {
                        out << a.channel << ',' << a.rank << ',' << a.bank << ',' << a.row << ','
                            << a.cacheline << ','
                            << csv::format_ns(profile.line_trcd_ns[g.flat_cacheline(a)]) << ','
                            << trp << ',' << tras << '\n';
                    }
                }

    weak_out << kWeakHeader << '\n';
    weak_out << kWeakColumns << '\n';
    std::vector<uint64_t> keys;
    keys.reserve(profile.weak_bits.size());
    for (const auto& [k, v] : profile.weak_bits)
        keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    for (uint64_t k : keys) {
        uint64_t v = k;
        uint32_t line = uint32_t(v % g.cachelines_per_row);
        v /= g.cachelines_per_row;
        uint32_t row = uint32_t(v % g.rows_per_bank);
        v /= g.rows_per_bank;
        uint32_t bank = uint32_t(v % g.banks_per_rank);
        v /= g.banks_per_rank;
        uint32_t rank = uint32_t(v % g.ranks_per_channel);
        uint32_t channel = uint32_t(v / g.ranks_per_channel);
        for (const WeakBit& wb : profile.weak_bits.at(k))
            weak_out << channel << ',' << rank << ',' << bank << ',' << row << ',' << line << ','
                     << wb.bit << ',' << csv::format_ns(double(wb.extra_margin_ns)) << '\n';
    }
}

namespace {

void parse_kv_comment(const std::string& line, const std::string& prefix,
                      std::vector<std::pair<std::string, std::string>>& out) {
    std::string body = line.substr(prefix.size());
    for (auto field : csv::split(body)) {
        auto eq = field.find('=');
        if (eq == std::string_view::npos)
            throw FormatError("malformed header comment: " + line);
        out.emplace_back(std::string(field.substr(0, eq)), std::string(field.substr(eq + 1)));
    }
}

} // namespace

LatencyProfile import_profile(std::istream& in, std::istream* weak_in) {
    std::string line;
    int lineno = 0;
    auto ctx = [&] { return "profile csv line " + std::to_string(lineno); };

    if (!std::getline(in, line) || line != kProfileHeader)
        throw FormatError("profile csv line 1: missing '" + std::string(kProfileHeader) + "' header");
    lineno = 1;

    LatencyProfile p;
    Geometry g;
    bool have_geometry = false;
    // Header comments and the column line.
    while (std::getline(in, line)) {
        ++lineno;
        if (line.rfind("#geometry ", 0) == 0) {
            std::vector<std::pair<std::string, std::string>> kv;
            parse_kv_comment(line, "#geometry ", kv);
            for (auto& [k, v] : kv) {
                uint64_t n = csv::parse_u64(v, ctx());
                if (k == "channels") g.channels = uint32_t(n);
                else if (k == "ranks") g.ranks_per_channel = uint32_t(n);
                else if (k == "banks") g.banks_per_rank = uint32_t(n);
                else if (k == "rows") g.rows_per_bank = uint32_t(n);
                else if (k == "cachelines") g.cachelines_per_row = uint32_t(n);
                else if (k == "line_bytes") g.cacheline_bytes = uint32_t(n);
                else throw FormatError(ctx() + ": unknown geometry key '" + k + "'");
            }
            have_geometry = true;
        } else if (line.rfind("#meta ", 0) == 0) {
            std::vector<std::pair<std::string, std::string>> kv;
            parse_kv_comment(line, "#meta ", kv);
            for (auto& [k, v] : kv) {
                if (k == "seed")
                    p.seed = csv::parse_u64(v, ctx());
                else if (k == "pattern_penalty_ns")
                    p.pattern_penalty_ns = double(float(csv::parse_double(v, ctx())));
                else if (k == "jitter_sigma_ns")
                    p.jitter_sigma_ns = double(float(csv::parse_double(v, ctx())));
                else
                    throw FormatError(ctx() + ": unknown meta key '" + k + "'");
            }
        } else if (line == kProfileColumns) {
            break;
        } else {
            throw FormatError(ctx() + ": expected column header '" + kProfileColumns + "'");
        }
    }
    if (!have_geometry)
        throw FormatError("profile csv: missing #geometry header");
    g.validate();
    p.geometry = g;
    p.line_trcd_ns.assign(g.total_cachelines(), -1.f);
    p.row_trp_ns.assign(g.total_rows(), -1.f);
    p.row_tras_ns.assign(g.total_rows(), -1.f);

    uint64_t seen = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        auto f = csv::split(line);
        if (f.size() != 8)
            throw FormatError(ctx() + ": expected 8 fields, got " + std::to_string(f.size()));
        Address a;
        a.channel = uint32_t(csv::parse_u64(f[0], ctx()));
        a.rank = uint32_t(csv::parse_u64(f[1], ctx()));
        a.bank = uint32_t(csv::parse_u64(f[2], ctx()));
        a.row = uint32_t(csv::parse_u64(f[3], ctx()));
        a.cacheline = uint32_t(csv::parse_u64(f[4], ctx()));
        if (!g.contains(a))
            throw FormatError(ctx() + ": location outside geometry");
        double trcd = csv::parse_double(f[5], ctx());
        double trp = csv::parse_double(f[6], ctx());
        double tras = csv::parse_double(f[7], ctx());
        if (trcd <= 0 || trp <= 0 || tras <= 0)
            throw FormatError(ctx() + ": durations must be positive");
        uint64_t fl = g.flat_cacheline(a);
        uint64_t fr = g.flat_row(a);
        if (p.line_trcd_ns[fl] >= 0)
            throw FormatError(ctx() + ": duplicate location");
        p.line_trcd_ns[fl] = float(trcd);
        if (p.row_trp_ns[fr] >= 0) {
            if (p.row_trp_ns[fr] != float(trp) || p.row_tras_ns[fr] != float(tras))
                throw FormatError(ctx() + ": min_trp/min_tras differ within one row");
        } else {
            p.row_trp_ns[fr] = float(trp);
            p.row_tras_ns[fr] = float(tras);
        }
        ++seen;
    }
    if (seen != g.total_cachelines())
        throw FormatError("profile csv: incomplete profile (" + std::to_string(seen) + " of " +
                          std::to_string(g.total_cachelines()) + " cache lines)");

    if (weak_in) {
        lineno = 0;
        auto wctx = [&] { return "weakbits csv line " + std::to_string(lineno); };
        if (!std::getline(*weak_in, line) || line != kWeakHeader)
            throw FormatError("weakbits csv line 1: missing '" + std::string(kWeakHeader) +
                              "' header");
        lineno = 1;
        while (std::getline(*weak_in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#' || line == kWeakColumns)
                continue;
            auto f = csv::split(line);
            if (f.size() != 7)
                throw FormatError(wctx() + ": expected 7 fields");
            Address a;
            a.channel = uint32_t(csv::parse_u64(f[0], wctx()));
            a.rank = uint32_t(csv::parse_u64(f[1], wctx()));
            a.bank = uint32_t(csv::parse_u64(f[2], wctx()));
            a.row = uint32_t(csv::parse_u64(f[3], wctx()));
            a.cacheline = uint32_t(csv::parse_u64(f[4], wctx()));
            if (!g.contains(a))
                throw FormatError(wctx() + ": location outside geometry");
            uint64_t bit = csv::parse_u64(f[5], wctx());
            if (bit >= g.bits_per_cacheline())
                throw FormatError(wctx() + ": bit index out of range");
            double margin = csv::parse_double(f[6], wctx());
            if (margin < 0)
                throw FormatError(wctx() + ": negative margin");
            auto& wb = p.weak_bits[g.flat_cacheline(a)];
            wb.push_back({uint16_t(bit), float(margin)});
        }
        for (auto& [k, v] : p.weak_bits) {
            std::sort(v.begin(), v.end(),
                      [](const WeakBit& a, const WeakBit& b) { return a.bit < b.bit; });
            for (size_t i = 1; i < v.size(); ++i)
                if (v[i].bit == v[i - 1].bit)
                    throw FormatError("weakbits csv: duplicate bit for one cache line");
        }
    }
    return p;
}

void export_profile_files(const LatencyProfile& profile, const std::string& profile_path,
                          const std::string& weakbits_path) {
    std::ofstream out(profile_path);
    if (!out)
        throw FormatError("cannot open for writing: " + profile_path);
    std::ofstream weak_out(weakbits_path);
    if (!weak_out)
        throw FormatError("cannot open for writing: " + weakbits_path);
    export_profile(profile, out, weak_out);
}

LatencyProfile import_profile_files(const std::string& profile_path,
                                    const std::string& weakbits_path) {
    std::ifstream in(profile_path);
    if (!in)
        throw FormatError("cannot open: " + profile_path);
    if (weakbits_path.empty())
        return import_profile(in, nullptr);
    std::ifstream weak_in(weakbits_path);
    if (!weak_in)
        throw FormatError("cannot open: " + weakbits_path);
    return import_profile(in, &weak_in);
}

} // namespace flydram
