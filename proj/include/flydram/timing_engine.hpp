#pragma once

#include <cstdint>
#include <optional>

#include "flydram/timing_params.hpp"

namespace flydram {

using Cycle = int64_t;

/// Far enough in the past that no timing constraint can reach it.
inline constexpr Cycle kNeverCycle = -(int64_t(1) << 40);

enum class CmdKind { ACT, RD, WR, PRE };

const char* to_string(CmdKind kind);

struct Command {
    CmdKind kind = CmdKind::ACT;
    uint32_t bank = 0;
    uint32_t row = 0;       // ACT only
    uint32_t cacheline = 0; // RD/WR only
    TimingParams timings;
};

/// Per-bank command-legality state. Heterogeneous timings attach to commands:
/// the constraints a command imposes are those of the timings it was granted,
/// so back-to-back accesses to different-speed rows stay correct.
struct BankState {
    enum class Phase { Idle, Activating, Active, Precharging };

    Phase phase = Phase::Idle;
    std::optional<uint32_t> open_row;
    Cycle last_act = kNeverCycle;
    Cycle last_rd = kNeverCycle;
    Cycle last_wr = kNeverCycle;
    Cycle last_pre = kNeverCycle;
    TimingParams granted_act; ///< timings granted to the in-flight activation
    TimingParams granted_pre; ///< timings granted to the last precharge
    int64_t last_col_burst = 4;
    Cycle last_act_to_pre_gap = 0; ///< ACT->PRE window of the last precharge

    bool row_open() const { return open_row.has_value(); }
};

/// Smallest cycle >= now at which cmd satisfies tRCD, tRAS, tRP and burst
/// occupancy against the previously granted commands. Throws ProtocolError
/// for structurally illegal commands (ACT on an open bank, RD on an idle one).
Cycle earliest_issue_time(const BankState& bank, const Command& cmd, Cycle now);

/// Applies cmd at cycle `at`, returning the successor state. Throws
/// TimingViolationError when `at` precedes the earliest legal cycle; the
/// engine refuses illegal schedules rather than modeling their effects.
BankState apply(const BankState& bank, const Command& cmd, Cycle at);

} // namespace flydram
