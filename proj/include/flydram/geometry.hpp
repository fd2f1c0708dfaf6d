#pragma once

#include <cstdint>
#include <string>

#include "flydram/errors.hpp"

namespace flydram {

/// Decoded DRAM location of one cache line.
struct Address {
    uint32_t channel = 0;
    uint32_t rank = 0;
    uint32_t bank = 0;
    uint32_t row = 0;
    uint32_t cacheline = 0;

    bool operator==(const Address&) const = default;
};

/// DIMM organization. Defaults follow a 2-channel DDR3 system with 1 GiB
/// per channel: 8 banks x 16384 rows x 8 KiB rows of 64 B cache lines.
struct Geometry {
    uint32_t channels = 2;
    uint32_t ranks_per_channel = 1;
    uint32_t banks_per_rank = 8;
    uint32_t rows_per_bank = 16384;
    uint32_t cachelines_per_row = 128;
    uint32_t cacheline_bytes = 64;

    bool operator==(const Geometry&) const = default;

    void validate() const {
        if (channels < 1 || ranks_per_channel < 1 || banks_per_rank < 1 ||
            rows_per_bank < 1 || cachelines_per_row < 1 || cacheline_bytes < 1)
            throw ParameterError("geometry: all counts must be >= 1");
        if ((cacheline_bytes & (cacheline_bytes - 1)) != 0)
            throw ParameterError("geometry: cacheline_bytes must be a power of two");
    }

    uint64_t total_banks() const {
        return uint64_t(channels) * ranks_per_channel * banks_per_rank;
    }
    uint64_t total_rows() const { return total_banks() * rows_per_bank; }
    uint64_t total_cachelines() const { return total_rows() * cachelines_per_row; }
    uint64_t capacity_bytes() const { return total_cachelines() * cacheline_bytes; }
    uint32_t bits_per_cacheline() const { return cacheline_bytes * 8; }

    bool contains(const Address& a) const {
        return a.channel < channels && a.rank < ranks_per_channel &&
               a.bank < banks_per_rank && a.row < rows_per_bank &&
               a.cacheline < cachelines_per_row;
    }

    void check(const Address& a) const {
        if (!contains(a))
            throw AddressError("address outside geometry: ch=" + std::to_string(a.channel) +
                               " rank=" + std::to_string(a.rank) + " bank=" + std::to_string(a.bank) +
                               " row=" + std::to_string(a.row) + " line=" + std::to_string(a.cacheline));
    }

    uint64_t flat_bank(const Address& a) const {
        return (uint64_t(a.channel) * ranks_per_channel + a.rank) * banks_per_rank + a.bank;
    }
    uint64_t flat_row(const Address& a) const {
        return flat_bank(a) * rows_per_bank + a.row;
    }
    uint64_t flat_cacheline(const Address& a) const {
        return flat_row(a) * cachelines_per_row + a.cacheline;
    }

    // Physical address layout, low to high: byte offset, channel,
    // cacheline-within-row, bank, row, rank. Mixed-radix so non-power-of-two
    // counts still work; with power-of-two counts this is the bit layout
    // documented in the README.
    uint64_t encode(const Address& a) const {
        check(a);
        uint64_t v = a.rank;
        v = v * rows_per_bank + a.row;
        v = v * banks_per_rank + a.bank;
        v = v * cachelines_per_row + a.cacheline;
        v = v * channels + a.channel;
        return v * cacheline_bytes;
    }

    Address decode(uint64_t physical) const {
        uint64_t v = physical / cacheline_bytes;
        Address a;
        a.channel = uint32_t(v % channels);
        v /= channels;
        a.cacheline = uint32_t(v % cachelines_per_row);
        v /= cachelines_per_row;
        a.bank = uint32_t(v % banks_per_rank);
        v /= banks_per_rank;
        a.row = uint32_t(v % rows_per_bank);
        v /= rows_per_bank;
        a.rank = uint32_t(v);
        if (a.rank >= ranks_per_channel)
            throw AddressError("physical address beyond capacity: " + std::to_string(physical));
        return a;
    }
};

} // namespace flydram
