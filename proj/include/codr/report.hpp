#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "codr/dataflow.hpp"

namespace codr {

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

namespace sim {

/// Keys are the MemoryCounter fields: one object per level with
/// read_events, write_events, read_bits, write_bits, then alu_mults,
/// alu_adds, crossbar_transfers.
nlohmann::ordered_json to_json(const MemoryCounter& counters);

/// Counters and summary of one layer; feature data is not included.
nlohmann::ordered_json to_json(const SimReport& report);

}  // namespace sim

}  // namespace codr
