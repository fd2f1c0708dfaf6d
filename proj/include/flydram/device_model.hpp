#pragma once

#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "flydram/geometry.hpp"
#include "flydram/rng.hpp"
#include "flydram/timing_params.hpp"

namespace flydram {

/// Lines whose minimum reliable tRCD/tRP is at or below this value belong to
/// the fast regions; the slowest generated locations sit strictly above it.
inline constexpr double kFastThresholdNs = 7.5;

/// Cap on generated thresholds so the slowest location stays within the
/// observed (7.5, 10] ns band.
inline constexpr double kSlowCapNs = 9.9;

/// Knobs for the clustered variation generator.
struct VariationParams {
    int cluster_count = -1;        ///< slow clusters per DIMM; < 0 derives from base_fast_fraction
    double cluster_radius = 3.0;   ///< Gaussian bump radius, in (row, cacheline) grid units
    double cluster_depth_ns = 2.5; ///< peak threshold raise at a cluster center
    double base_fast_fraction = 0.99;
    double pattern_penalty_ns = 0.5; ///< extra threshold for weak bits storing 0
    double jitter_sigma_ns = 0.0;    ///< per-read Gaussian threshold jitter

    void validate() const;
};

/// One bit that fails ahead of the rest of its cache line. The bit's own
/// threshold is the line (or row) base threshold minus extra_margin_ns.
struct WeakBit {
    uint16_t bit = 0;
    float extra_margin_ns = 0.f;

    bool operator==(const WeakBit&) const = default;
};

/// Per-location minimum reliable timings of one DIMM: the simulated ground
/// truth a real profiling run would recover. All durations are quantized to
/// 0.001 ns so CSV round trips are exact.
struct LatencyProfile {
    Geometry geometry;
    std::vector<float> line_trcd_ns; ///< per cache line, indexed by Geometry::flat_cacheline
    std::vector<float> row_trp_ns;   ///< per row, indexed by Geometry::flat_row
    std::vector<float> row_tras_ns;
    std::unordered_map<uint64_t, std::vector<WeakBit>> weak_bits; ///< flat cache line -> bits
    double pattern_penalty_ns = 0.5;
    double jitter_sigma_ns = 0.0;
    uint64_t seed = 0;

    bool operator==(const LatencyProfile& o) const;

    const std::vector<WeakBit>* weak_bits_of(uint64_t flat_line) const {
        auto it = weak_bits.find(flat_line);
        return it == weak_bits.end() ? nullptr : &it->second;
    }
};

enum class TimingKind { Activation, Precharge, Restoration };

/// One read access as seen by the cell array.
struct AccessContext {
    TimingParams applied;
    bool is_first_read_after_activate = true;
    double preceding_precharge_ns = 13.125; ///< precharge duration actually granted
    std::vector<uint64_t> stored_data;      ///< cacheline_bytes * 8 bits, little-endian words
    Address address;
};

LatencyProfile generate_profile(const Geometry& geometry, const VariationParams& params,
                                uint64_t seed);

/// Ground-truth minimum reliable duration: per cache line for activation,
/// per row for precharge and restoration.
double required_timing(const LatencyProfile& profile, const Address& address, TimingKind kind);

/// Returns (data as read, error bitmap = data XOR stored). A bit flips iff its
/// effective threshold exceeds the applied timing; see README for the model.
struct ReadResult {
    std::vector<uint64_t> returned_data;
    std::vector<uint64_t> error_bitmap;
    uint64_t flipped_bits = 0;
};
ReadResult inject_read_errors(const LatencyProfile& profile, const AccessContext& ctx, Rng& rng);

/// True when no bit of the addressed line can flip under these timings with
/// zero jitter. Used as a fast path; equivalence with inject_read_errors is
/// covered by tests.
bool access_is_safe(const LatencyProfile& profile, const Address& address,
                    double applied_trcd_ns, bool is_first_read, double preceding_precharge_ns,
                    double applied_tras_ns);

void export_profile(const LatencyProfile& profile, std::ostream& profile_out,
                    std::ostream& weakbits_out);
LatencyProfile import_profile(std::istream& profile_in, std::istream* weakbits_in);

/// File-based wrappers; weak bits live next to the profile CSV.
void export_profile_files(const LatencyProfile& profile, const std::string& profile_path,
                          const std::string& weakbits_path);
LatencyProfile import_profile_files(const std::string& profile_path,
                                    const std::string& weakbits_path);

} // namespace flydram
