#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "flydram/device_model.hpp"
#include "flydram/geometry.hpp"

namespace flydram {

/// Data pattern written before a characterization round.
struct Pattern {
    enum class Kind { AllZeros, AllOnes, Alt55, AltAA, Random } kind = Kind::AllZeros;
    uint64_t seed = 0; ///< Random only

    std::string label() const;
    static Pattern parse(const std::string& label);
};

/// Latency sweep description. Defaults cover the characterized points plus
/// two lower extrapolation points for curve shape.
struct SweepConfig {
    std::vector<double> trcd_values_ns = {2.5, 5.0, 7.5, 10.0, 12.5, 13.125};
    std::vector<double> trp_values_ns = {2.5, 5.0, 7.5, 10.0, 12.5, 13.125};
    std::vector<double> tras_values_ns = {27.0, 36.0};
    std::vector<Pattern> patterns = {{Pattern::Kind::AllZeros, 0},
                                     {Pattern::Kind::AllOnes, 0},
                                     {Pattern::Kind::AltAA, 0},
                                     {Pattern::Kind::Alt55, 0},
                                     {Pattern::Kind::Random, 0}};
    int rounds = 1;

    void validate() const;
};

struct BERRecord {
    std::string param; ///< "trcd" | "trp" | "tras"
    double value_ns = 0;
    std::string pattern;
    int round = 0;
    uint64_t bit_errors = 0;
    uint64_t bits_tested = 0;
    double ber = 0;
};

struct BERTable {
    std::vector<BERRecord> records;
};

/// Per-cell probability of observing at least one timing error across the
/// (pattern, round) trials of one swept value. Sparse: absent cells are 0.
struct ErrorMap {
    Geometry geometry;
    std::string param;
    double value_ns = 0;
    int trials = 0; ///< patterns x rounds
    std::unordered_map<uint64_t, uint32_t> hit_trials; ///< flat cache line -> erroneous trials

    double probability(uint64_t flat_line) const {
        auto it = hit_trials.find(flat_line);
        return it == hit_trials.end() ? 0.0 : double(it->second) / double(trials);
    }
};

struct CharacterizationResult {
    BERTable table;
    std::vector<ErrorMap> maps; ///< one per swept (param, value)
};

/// Software re-run of the characterization methodology: per swept value,
/// pattern and round, write the pattern, access every cache line with the
/// reduced timing and collect the injected flips.
CharacterizationResult run_characterization(const LatencyProfile& profile,
                                            const SweepConfig& sweep, uint64_t seed);

double compute_ber(uint64_t errors, uint64_t tested);

struct LocalityResult {
    double score = 0;    ///< fraction of erroneous cells with an erroneous 4-neighbor
    double p_value = 1;  ///< permutation test against uniform placement
    bool degenerate = false;
};

LocalityResult spatial_locality_score(const ErrorMap& map, int shuffles = 1000,
                                      uint64_t seed = 1);

/// Histogram of flipped-bit counts per data beat over a set of error bitmaps.
using BeatHistogram = std::map<uint32_t, uint64_t>;
BeatHistogram beat_error_histogram(const std::vector<std::vector<uint64_t>>& error_bitmaps,
                                   uint32_t bits_per_bitmap, uint32_t beat_bits = 64);

enum class EccScheme { SECDED_64 };

struct EccResult {
    double correctable_fraction = 1.0;
    bool degenerate = false; ///< no erroneous beats at all
};

EccResult ecc_correctable_fraction(const BeatHistogram& histogram, EccScheme scheme);

void export_ber_table(const BERTable& table, std::ostream& out);
void export_error_map(const ErrorMap& map, std::ostream& out);

} // namespace flydram
