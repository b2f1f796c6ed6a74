#include "codr/report.hpp"

#include <charconv>

namespace codr {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

namespace sim {

nlohmann::ordered_json to_json(const MemoryCounter& c) {
    nlohmann::ordered_json j;
    for (auto l : kLevels) {
        const auto& lc = c[l];
        j[std::string(level_name(l))] = {{"read_events", lc.read_events},
                                         {"write_events", lc.write_events},
                                         {"read_bits", lc.read_bits},
                                         {"write_bits", lc.write_bits}};
    }
    j["alu_mults"] = c.alu_mults;
    j["alu_adds"] = c.alu_adds;
    j["crossbar_transfers"] = c.crossbar_transfers;
    return j;
}

nlohmann::ordered_json to_json(const SimReport& r) {
    nlohmann::ordered_json j;
    j["layer_id"] = r.layer_id;
    j["output_shape"] = {r.output.channels(), r.output.rows(), r.output.cols()};
    j["iterations"] = r.iterations;
    j["cycles"] = r.cycles;
    j["unique_entries"] = r.unique_entries;
    j["multiplier_passes"] = r.multiplier_passes;
    j["saturated_outputs"] = r.saturated_outputs;
    j["dram_bytes"] = {{"weights", r.dram.weight_bytes},
                       {"input", r.dram.input_bytes},
                       {"output", r.dram.output_bytes},
                       {"total", r.dram.total()}};
    j["counters"] = to_json(r.counters);
    return j;
}

}  // namespace sim

}  // namespace codr
