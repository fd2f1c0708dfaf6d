#pragma once

#include <stdexcept>
#include <string>

namespace flydram {

/// Invalid argument to an operation (bad geometry, negative duration, ...).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Address outside the modeled geometry.
struct AddressError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// Structurally illegal DRAM command for the current bank state.
struct ProtocolError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Command issued before its earliest legal cycle.
struct TimingViolationError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Malformed input file; message carries the file/line context.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Trace references a page absent from a PageMapping.
struct MappingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace flydram
