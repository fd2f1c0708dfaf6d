#include "flydram/profiler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <unordered_set>

#include "flydram/csv.hpp"
#include "flydram/rng.hpp"

namespace flydram {

std::string Pattern::label() const {
    switch (kind) {
    case Kind::AllZeros: return "all_zeros";
    case Kind::AllOnes: return "all_ones";
    case Kind::Alt55: return "0x55";
    case Kind::AltAA: return "0xaa";
    case Kind::Random: return "random";
    }
    return "?";
}

Pattern Pattern::parse(const std::string& label) {
    if (label == "all_zeros") return {Kind::AllZeros, 0};
    if (label == "all_ones") return {Kind::AllOnes, 0};
    if (label == "0x55") return {Kind::Alt55, 0};
    if (label == "0xaa" || label == "0xAA") return {Kind::AltAA, 0};
    if (label == "random") return {Kind::Random, 0};
    throw ParameterError("unknown pattern: " + label);
}

void SweepConfig::validate() const {
    auto check_list = [](const std::vector<double>& v, const char* name) {
        if (v.empty())
            throw ParameterError(std::string(name) + " sweep list must be non-empty");
        if (!std::is_sorted(v.begin(), v.end()))
            throw ParameterError(std::string(name) + " sweep list must be ascending");
        if (v.front() <= 0)
            throw ParameterError(std::string(name) + " sweep values must be positive");
    };
    check_list(trcd_values_ns, "trcd");
    check_list(trp_values_ns, "trp");
    check_list(tras_values_ns, "tras");
    if (patterns.empty())
        throw ParameterError("pattern list must be non-empty");
    if (rounds < 1)
        throw ParameterError("rounds must be >= 1");
}

namespace {

void fill_pattern(std::vector<uint64_t>& words, const Pattern& p, uint64_t stream_seed) {
    switch (p.kind) {
    case Pattern::Kind::AllZeros:
        std::fill(words.begin(), words.end(), 0);
        break;
    case Pattern::Kind::AllOnes:
        std::fill(words.begin(), words.end(), ~uint64_t(0));
        break;
    case Pattern::Kind::Alt55:
        std::fill(words.begin(), words.end(), 0x5555555555555555ULL);
        break;
    case Pattern::Kind::AltAA:
        std::fill(words.begin(), words.end(), 0xaaaaaaaaaaaaaaaaULL);
        break;
    case Pattern::Kind::Random: {
        Rng r(stream_seed);
        for (auto& w : words)
            w = r.next_u64();
        break;
    }
    }
}

struct ParamSweep {
    const char* name;
    int id;
    const std::vector<double>* values;
};

} // namespace

CharacterizationResult run_characterization(const LatencyProfile& profile,
                                            const SweepConfig& sweep, uint64_t seed) {
    sweep.validate();
    const Geometry& g = profile.geometry;
    const uint32_t bits = g.bits_per_cacheline();
    const uint32_t words = (bits + 63) / 64;
    const uint64_t lines = g.total_cachelines();
    const TimingParams spec = TimingParams::ddr3_1333();

    CharacterizationResult result;
    const ParamSweep sweeps[] = {{"trcd", 0, &sweep.trcd_values_ns},
                                 {"trp", 1, &sweep.trp_values_ns},
                                 {"tras", 2, &sweep.tras_values_ns}};

    std::vector<uint64_t> stored(words);
    for (const ParamSweep& ps : sweeps) {
        for (size_t vi = 0; vi < ps.values->size(); ++vi) {
            double value = (*ps.values)[vi];
            ErrorMap em;
            em.geometry = g;
            em.param = ps.name;
            em.value_ns = value;
            em.trials = int(sweep.patterns.size()) * sweep.rounds;

            for (size_t pi = 0; pi < sweep.patterns.size(); ++pi) {
                const Pattern& pat = sweep.patterns[pi];
                for (int round = 0; round < sweep.rounds; ++round) {
                    uint64_t errors = 0;
                    AccessContext ctx;
                    ctx.applied = spec;
                    ctx.preceding_precharge_ns = spec.trp_ns;
                    ctx.is_first_read_after_activate = false;
                    if (ps.id == 0) {
                        // ACT then first-line RD, repeated so that every cache
                        // line is once the first one accessed in its row.
                        ctx.applied.trcd_ns = value;
                        ctx.is_first_read_after_activate = true;
                    } else if (ps.id == 1) {
                        // Short PRE, ACT, then a full-row read.
                        ctx.preceding_precharge_ns = value;
                    } else {
                        ctx.applied.tras_ns = value;
                    }

                    Address a;
                    for (a.channel = 0; a.channel < g.channels; ++a.channel)
                        for (a.rank = 0; a.rank < g.ranks_per_channel; ++a.rank)
                            for (a.bank = 0; a.bank < g.banks_per_rank; ++a.bank)
                                for (a.row = 0; a.row < g.rows_per_bank; ++a.row)
                                    for (a.cacheline = 0; a.cacheline < g.cachelines_per_row;
                                         ++a.cacheline) {
                                        if (access_is_safe(profile, a, ctx.applied.trcd_ns,
                                                           ctx.is_first_read_after_activate,
                                                           ctx.preceding_precharge_ns,
                                                           ctx.applied.tras_ns))
                                            continue;
                                        uint64_t fl = g.flat_cacheline(a);
                                        uint64_t stream = derive_seed(
                                            seed ^ pat.seed, uint64_t(ps.id) * 1000 + vi,
                                            uint64_t(pi) * 10000 + uint64_t(round), fl);
                                        ctx.address = a;
                                        fill_pattern(stored, pat, stream);
                                        ctx.stored_data = stored;
                                        Rng rng(derive_seed(stream, 0xfeed));
                                        ReadResult rr = inject_read_errors(profile, ctx, rng);
                                        if (rr.flipped_bits) {
                                            errors += rr.flipped_bits;
                                            ++em.hit_trials[fl];
                                        }
                                    }

                    BERRecord rec;
                    rec.param = ps.name;
                    rec.value_ns = value;
                    rec.pattern = pat.label();
                    rec.round = round;
                    rec.bit_errors = errors;
                    rec.bits_tested = lines * bits;
                    rec.ber = compute_ber(errors, rec.bits_tested);
                    result.table.records.push_back(std::move(rec));
                }
            }
            result.maps.push_back(std::move(em));
        }
    }
    return result;
}

double compute_ber(uint64_t errors, uint64_t tested) {
    if (tested == 0)
        throw ParameterError("compute_ber: bits_tested must be positive");
    if (errors > tested)
        throw ParameterError("compute_ber: errors exceed bits tested");
    return double(errors) / double(tested);
}

namespace {

double neighbor_score(const std::unordered_set<uint64_t>& cells, const Geometry& g) {
    if (cells.empty())
        return 0.0;
    uint64_t with_neighbor = 0;
    const uint32_t lines = g.cachelines_per_row;
    const uint32_t rows = g.rows_per_bank;
    for (uint64_t c : cells) {
        uint64_t fr = c / lines;
        uint32_t line = uint32_t(c % lines);
        uint32_t row = uint32_t(fr % rows);
        bool found = (line > 0 && cells.count(c - 1)) ||
                     (line + 1 < lines && cells.count(c + 1)) ||
                     (row > 0 && cells.count(c - lines)) ||
                     (row + 1 < rows && cells.count(c + lines));
        if (found)
            ++with_neighbor;
    }
    return double(with_neighbor) / double(cells.size());
}

} // namespace

LocalityResult spatial_locality_score(const ErrorMap& map, int shuffles, uint64_t seed) {
    if (shuffles < 1)
        throw ParameterError("shuffles must be >= 1");
    std::unordered_set<uint64_t> cells;
    for (const auto& [fl, hits] : map.hit_trials)
        if (hits > 0)
            cells.insert(fl);

    LocalityResult res;
    if (cells.empty()) {
        res.degenerate = true;
        return res;
    }
    res.score = neighbor_score(cells, map.geometry);

    const uint64_t total = map.geometry.total_cachelines();
    const uint64_t n = cells.size();
    Rng rng(derive_seed(seed, 0x10ca11));
    int at_least = 0;
    std::unordered_set<uint64_t> shuffled;
    shuffled.reserve(n * 2);
    for (int s = 0; s < shuffles; ++s) {
        shuffled.clear();
        while (shuffled.size() < n)
            shuffled.insert(rng.next_below(total));
        if (neighbor_score(shuffled, map.geometry) >= res.score - 1e-12)
            ++at_least;
    }
    res.p_value = double(1 + at_least) / double(1 + shuffles);
    return res;
}

BeatHistogram beat_error_histogram(const std::vector<std::vector<uint64_t>>& error_bitmaps,
                                   uint32_t bits_per_bitmap, uint32_t beat_bits) {
    if (beat_bits == 0 || bits_per_bitmap % beat_bits != 0)
        throw ParameterError("bitmap length must be divisible by beat_bits");
    const uint32_t words = (bits_per_bitmap + 63) / 64;
    BeatHistogram hist;
    for (const auto& bm : error_bitmaps) {
        if (bm.size() != words)
            throw ParameterError("error bitmap has wrong length");
        for (uint32_t beat = 0; beat < bits_per_bitmap / beat_bits; ++beat) {
            uint32_t count = 0;
            for (uint32_t b = beat * beat_bits; b < (beat + 1) * beat_bits; ++b)
                count += uint32_t((bm[b >> 6] >> (b & 63)) & 1);
            ++hist[count];
        }
    }
    return hist;
}

EccResult ecc_correctable_fraction(const BeatHistogram& histogram, EccScheme scheme) {
    if (scheme != EccScheme::SECDED_64)
        throw ParameterError("unknown ECC scheme");
    uint64_t erroneous = 0, correctable = 0;
    for (const auto& [flips, freq] : histogram) {
        if (flips == 0)
            continue;
        erroneous += freq;
        if (flips == 1)
            correctable += freq; // SECDED corrects exactly single-bit beats
    }
    EccResult res;
    if (erroneous == 0) {
        res.degenerate = true;
        res.correctable_fraction = 1.0;
        return res;
    }
    res.correctable_fraction = double(correctable) / double(erroneous);
    return res;
}

void export_ber_table(const BERTable& table, std::ostream& out) {
    out << "#flydram-ber v1\n";
    out << "param,value_ns,pattern,round,bit_errors,bits_tested,ber\n";
    char buf[32];
    for (const BERRecord& r : table.records) {
        std::snprintf(buf, sizeof buf, "%.10g", r.ber);
        out << r.param << ',' << csv::format_ns(r.value_ns) << ',' << r.pattern << ',' << r.round
            << ',' << r.bit_errors << ',' << r.bits_tested << ',' << buf << '\n';
    }
}

void export_error_map(const ErrorMap& map, std::ostream& out) {
    out << "#flydram-errormap v1\n";
    out << "#param " << map.param << ',' << csv::format_ns(map.value_ns) << ',' << map.trials
        << " trials\n";
    out << "bank,row,cacheline,error_probability\n";
    std::vector<uint64_t> keys;
    keys.reserve(map.hit_trials.size());
    for (const auto& [k, v] : map.hit_trials)
        keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    const Geometry& g = map.geometry;
    char buf[32];
    for (uint64_t k : keys) {
        uint64_t fr = k / g.cachelines_per_row;
        uint32_t line = uint32_t(k % g.cachelines_per_row);
        uint64_t bank = fr / g.rows_per_bank;
        uint32_t row = uint32_t(fr % g.rows_per_bank);
        std::snprintf(buf, sizeof buf, "%.10g", map.probability(k));
        out << bank << ',' << row << ',' << line << ',' << buf << '\n';
    }
}

} // namespace flydram
