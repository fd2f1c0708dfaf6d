#include "flydram/timing_engine.hpp"

#include <algorithm>
#include <string>

#include "flydram/errors.hpp"

namespace flydram {

const char* to_string(CmdKind kind) {
    switch (kind) {
    case CmdKind::ACT: return "ACT";
    case CmdKind::RD: return "RD";
    case CmdKind::WR: return "WR";
    case CmdKind::PRE: return "PRE";
    }
    return "?";
}

Cycle earliest_issue_time(const BankState& bank, const Command& cmd, Cycle now) {
    Cycle t = now;
    switch (cmd.kind) {
    case CmdKind::ACT:
        if (bank.row_open())
            throw ProtocolError("ACT on a bank with an open row");
        if (bank.last_pre != kNeverCycle)
            t = std::max(t, bank.last_pre + bank.granted_pre.trp_cyc);
        break;
    case CmdKind::RD:
    case CmdKind::WR: {
        if (!bank.row_open())
            throw ProtocolError(std::string(to_string(cmd.kind)) + " on a bank without an open row");
        t = std::max(t, bank.last_act + bank.granted_act.trcd_cyc);
        Cycle last_col = std::max(bank.last_rd, bank.last_wr);
        if (last_col != kNeverCycle)
            t = std::max(t, last_col + bank.last_col_burst);
        break;
    }
    case CmdKind::PRE:
        if (!bank.row_open())
            throw ProtocolError("PRE on a bank without an open row");
        t = std::max(t, bank.last_act + bank.granted_act.tras_cyc);
        break;
    }
    return t;
}

BankState apply(const BankState& bank, const Command& cmd, Cycle at) {
    Cycle earliest = earliest_issue_time(bank, cmd, at);
    if (at < earliest)
        throw TimingViolationError(std::string(to_string(cmd.kind)) + " at cycle " +
                                   std::to_string(at) + " before earliest legal cycle " +
                                   std::to_string(earliest));
    BankState next = bank;
    switch (cmd.kind) {
    case CmdKind::ACT:
        next.phase = BankState::Phase::Activating;
        next.open_row = cmd.row;
        next.last_act = at;
        next.granted_act = cmd.timings;
        next.last_rd = kNeverCycle;
        next.last_wr = kNeverCycle;
        break;
    case CmdKind::RD:
        next.phase = BankState::Phase::Active;
        next.last_rd = at;
        next.last_col_burst = cmd.timings.burst_cyc;
        break;
    case CmdKind::WR:
        next.phase = BankState::Phase::Active;
        next.last_wr = at;
        next.last_col_burst = cmd.timings.burst_cyc;
        break;
    case CmdKind::PRE:
        next.phase = BankState::Phase::Idle;
        next.open_row.reset();
        next.last_pre = at;
        next.granted_pre = cmd.timings;
        next.last_act_to_pre_gap = at - bank.last_act;
        break;
    }
    return next;
}

} // namespace flydram
