#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "codr/dataflow.hpp"

namespace codr::cost {

inline constexpr double kDramPjPerByte = 160.0;

/// Energy per bit moved at each on-chip level plus per-operation costs.
/// Only the DRAM figure is measured ground truth; the rest is illustrative.
struct CostTable {
    std::array<double, sim::kLevels.size()> pj_per_bit{};  // the dram slot is unused
    double dram_per_byte = kDramPjPerByte;
    double alu_mult_pj = 0.0;
    double alu_add_pj = 0.0;
    double crossbar_per_transfer_pj = 0.0;

    static CostTable defaults();

    double& level(sim::Level l) { return pj_per_bit[static_cast<size_t>(l)]; }
    double level(sim::Level l) const { return pj_per_bit[static_cast<size_t>(l)]; }

    /// Throws ValidationError on a negative or non-finite entry.
    void validate() const;
    CostTable scaled(double factor) const;
};

CostTable cost_table_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const CostTable& t);
CostTable load_cost_table(const std::string& path);

/// Energy in pJ per component.
struct EnergyReport {
    std::array<double, sim::kLevels.size()> level_pj{};
    double alu_pj = 0.0;
    double crossbar_pj = 0.0;

    double level(sim::Level l) const { return level_pj[static_cast<size_t>(l)]; }
    double total_pj() const;
    double total_uj() const { return total_pj() * 1e-6; }

    /// (component name, pJ) for every level followed by alu and crossbar.
    std::vector<std::pair<std::string, double>> components() const;
    /// Share of the total per component, in percent; all zero when total is 0.
    std::vector<std::pair<std::string, double>> percentages() const;

    EnergyReport& operator+=(const EnergyReport& o);
};

EnergyReport energy_from_report(const sim::MemoryCounter& counters, const CostTable& table);

nlohmann::ordered_json to_json(const EnergyReport& e);
/// component,energy_pj,energy_uj,percent; one row per component plus total.
std::string to_csv(const EnergyReport& e);

/// Named scalar metrics of one design over a layer set.
struct DesignMetrics {
    std::string name;
    std::map<std::string, double> values;
};

/// Metrics keyed size_bits, <level>_bits, alu_mults, crossbar_transfers,
/// energy_<component>_pj, energy_total_pj. Counters and energy are optional
/// for designs that only have a size model.
DesignMetrics make_metrics(std::string name, double size_bits, const sim::MemoryCounter* counters = nullptr,
                           const EnergyReport* energy = nullptr);

struct Ratio {
    std::string category;
    std::optional<double> value;  // b / a; empty when a is zero
};

/// Ratios b/a for every category both designs report.
std::vector<Ratio> compare_designs(const DesignMetrics& a, const DesignMetrics& b);

nlohmann::ordered_json to_json(const std::vector<Ratio>& ratios);

}  // namespace codr::cost
