#pragma once

#include <cmath>
#include <cstdint>

#include "flydram/errors.hpp"

namespace flydram {

/// One set of applied DRAM timings, in nanoseconds and in controller clock
/// cycles. Cycle counts are ceiling(ns / tCK). Defaults are DDR3-1333H:
/// tRCD/tCL/tRP = 13.125 ns, tRAS = 36 ns, tCK = 1.5 ns.
struct TimingParams {
    double trcd_ns = 13.125;
    double trp_ns = 13.125;
    double tras_ns = 36.0;
    double tcl_ns = 13.125;
    double tck_ns = 1.5;

    int64_t trcd_cyc = 0;
    int64_t trp_cyc = 0;
    int64_t tras_cyc = 0;
    int64_t tcl_cyc = 0;
    int64_t burst_cyc = 4; // BL8 at double data rate

    static TimingParams make(double trcd, double trp, double tras, double tcl = 13.125,
                             double tck = 1.5) {
        TimingParams t;
        t.trcd_ns = trcd;
        t.trp_ns = trp;
        t.tras_ns = tras;
        t.tcl_ns = tcl;
        t.tck_ns = tck;
        t.finalize();
        return t;
    }

    static TimingParams ddr3_1333() { return make(13.125, 13.125, 36.0); }

    void finalize() {
        if (trcd_ns <= 0 || trp_ns <= 0 || tras_ns <= 0 || tcl_ns <= 0 || tck_ns <= 0)
            throw ParameterError("timing params must be strictly positive");
        trcd_cyc = to_cycles(trcd_ns);
        trp_cyc = to_cycles(trp_ns);
        tras_cyc = to_cycles(tras_ns);
        tcl_cyc = to_cycles(tcl_ns);
        if (tras_cyc < trcd_cyc)
            throw ParameterError("tRAS must be >= tRCD (restoration window contains activation)");
    }

    int64_t to_cycles(double ns) const { return int64_t(std::ceil(ns / tck_ns - 1e-9)); }

    bool operator==(const TimingParams&) const = default;
};

} // namespace flydram
