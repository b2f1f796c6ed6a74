#include "codr/cost.hpp"

#include <cmath>
#include <fstream>

#include "codr/error.hpp"
#include "codr/report.hpp"

namespace codr::cost {

using sim::Level;

CostTable CostTable::defaults() {
    // Illustrative 45 nm-class figures; replace with measured values.
    CostTable t;
    t.level(Level::weight_sram) = 0.12;
    t.level(Level::input_sram) = 0.14;
    t.level(Level::output_sram) = 0.14;
    t.level(Level::input_rf) = 0.02;
    t.level(Level::weight_rf) = 0.02;
    t.level(Level::output_rf) = 0.03;
    t.alu_mult_pj = 0.2;
    t.alu_add_pj = 0.1;
    t.crossbar_per_transfer_pj = 1.0;
    return t;
}

void CostTable::validate() const {
    auto check = [](double v, const std::string& name) {
        if (!std::isfinite(v) || v < 0.0) throw ValidationError("cost '" + name + "' must be finite and >= 0");
    };
    for (auto l : sim::kLevels) check(level(l), std::string(sim::level_name(l)));
    check(dram_per_byte, "dram_per_byte");
    check(alu_mult_pj, "alu_mult_pj");
    check(alu_add_pj, "alu_add_pj");
    check(crossbar_per_transfer_pj, "crossbar_per_transfer_pj");
}

CostTable CostTable::scaled(double factor) const {
    CostTable t = *this;
    for (auto& v : t.pj_per_bit) v *= factor;
    t.dram_per_byte *= factor;
    t.alu_mult_pj *= factor;
    t.alu_add_pj *= factor;
    t.crossbar_per_transfer_pj *= factor;
    return t;
}

CostTable cost_table_from_json(const nlohmann::json& j) {
    CostTable t = CostTable::defaults();
    try {
        if (j.contains("pj_per_bit")) {
            for (const auto& [key, value] : j.at("pj_per_bit").items()) {
                bool known = false;
                for (auto l : sim::kLevels) {
                    if (l != Level::dram && key == sim::level_name(l)) {
                        t.level(l) = value.get<double>();
                        known = true;
                    }
                }
                if (!known) throw ValidationError("unknown cost level '" + key + "'");
            }
        }
        if (j.contains("dram_per_byte")) t.dram_per_byte = j.at("dram_per_byte").get<double>();
        if (j.contains("alu_mult_pj")) t.alu_mult_pj = j.at("alu_mult_pj").get<double>();
        if (j.contains("alu_add_pj")) t.alu_add_pj = j.at("alu_add_pj").get<double>();
        if (j.contains("crossbar_per_transfer_pj")) {
            t.crossbar_per_transfer_pj = j.at("crossbar_per_transfer_pj").get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("cost table: ") + e.what());
    }
    t.validate();
    return t;
}

nlohmann::ordered_json to_json(const CostTable& t) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json levels;
    for (auto l : sim::kLevels) {
        if (l != Level::dram) levels[std::string(sim::level_name(l))] = t.level(l);
    }
    j["pj_per_bit"] = levels;
    j["dram_per_byte"] = t.dram_per_byte;
    j["alu_mult_pj"] = t.alu_mult_pj;
    j["alu_add_pj"] = t.alu_add_pj;
    j["crossbar_per_transfer_pj"] = t.crossbar_per_transfer_pj;
    return j;
}

CostTable load_cost_table(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open cost table " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("cost table " + path + ": " + e.what());
    }
    return cost_table_from_json(j);
}

double EnergyReport::total_pj() const {
    double total = alu_pj + crossbar_pj;
    for (double v : level_pj) total += v;
    return total;
}

std::vector<std::pair<std::string, double>> EnergyReport::components() const {
    std::vector<std::pair<std::string, double>> out;
    for (auto l : sim::kLevels) out.emplace_back(std::string(sim::level_name(l)), level(l));
    out.emplace_back("alu", alu_pj);
    out.emplace_back("crossbar", crossbar_pj);
    return out;
}

std::vector<std::pair<std::string, double>> EnergyReport::percentages() const {
    const double total = total_pj();
    auto out = components();
    for (auto& [name, v] : out) v = total > 0.0 ? 100.0 * v / total : 0.0;
    return out;
}

EnergyReport& EnergyReport::operator+=(const EnergyReport& o) {
    for (size_t i = 0; i < level_pj.size(); ++i) level_pj[i] += o.level_pj[i];
    alu_pj += o.alu_pj;
    crossbar_pj += o.crossbar_pj;
    return *this;
}

EnergyReport energy_from_report(const sim::MemoryCounter& counters, const CostTable& table) {
    EnergyReport e;
    for (auto l : sim::kLevels) {
        const auto& c = counters[l];
        const double bits = static_cast<double>(c.read_bits + c.write_bits);
        e.level_pj[static_cast<size_t>(l)] =
            l == Level::dram ? bits / 8.0 * table.dram_per_byte : bits * table.level(l);
    }
    e.alu_pj = static_cast<double>(counters.alu_mults) * table.alu_mult_pj +
               static_cast<double>(counters.alu_adds) * table.alu_add_pj;
    e.crossbar_pj = static_cast<double>(counters.crossbar_transfers) * table.crossbar_per_transfer_pj;
    return e;
}

nlohmann::ordered_json to_json(const EnergyReport& e) {
    nlohmann::ordered_json j;
    const auto pct = e.percentages();
    const auto comps = e.components();
    nlohmann::ordered_json components;
    for (size_t i = 0; i < comps.size(); ++i) {
        components[comps[i].first] = {{"energy_pj", comps[i].second},
                                      {"energy_uj", comps[i].second * 1e-6},
                                      {"percent", pct[i].second}};
    }
    j["components"] = components;
    j["total_pj"] = e.total_pj();
    j["total_uj"] = e.total_uj();
    return j;
}

std::string to_csv(const EnergyReport& e) {
    std::string out = "component,energy_pj,energy_uj,percent\n";
    const auto pct = e.percentages();
    const auto comps = e.components();
    for (size_t i = 0; i < comps.size(); ++i) {
        out += comps[i].first + ',' + format_double(comps[i].second) + ',' + format_double(comps[i].second * 1e-6) +
               ',' + format_double(pct[i].second) + '\n';
    }
    out += "total," + format_double(e.total_pj()) + ',' + format_double(e.total_uj()) + ',' +
           format_double(e.total_pj() > 0 ? 100.0 : 0.0) + '\n';
    return out;
}

DesignMetrics make_metrics(std::string name, double size_bits, const sim::MemoryCounter* counters,
                           const EnergyReport* energy) {
    DesignMetrics m;
    m.name = std::move(name);
    m.values["size_bits"] = size_bits;
    if (counters) {
        double sram = 0.0;
        for (auto l : sim::kLevels) {
            const auto& c = (*counters)[l];
            const double bits = static_cast<double>(c.read_bits + c.write_bits);
            m.values[std::string(sim::level_name(l)) + "_bits"] = bits;
            if (l == Level::weight_sram || l == Level::input_sram || l == Level::output_sram) sram += bits;
        }
        m.values["sram_bits"] = sram;
        m.values["alu_mults"] = static_cast<double>(counters->alu_mults);
        m.values["crossbar_transfers"] = static_cast<double>(counters->crossbar_transfers);
    }
    if (energy) {
        for (const auto& [comp, pj] : energy->components()) m.values["energy_" + comp + "_pj"] = pj;
        m.values["energy_total_pj"] = energy->total_pj();
    }
    return m;
}

std::vector<Ratio> compare_designs(const DesignMetrics& a, const DesignMetrics& b) {
    std::vector<Ratio> out;
    for (const auto& [key, av] : a.values) {
        auto it = b.values.find(key);
        if (it == b.values.end()) continue;
        Ratio r{key, std::nullopt};
        if (av != 0.0) r.value = it->second / av;
        out.push_back(r);
    }
    return out;
}

nlohmann::ordered_json to_json(const std::vector<Ratio>& ratios) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& r : ratios) {
        j[r.category] = r.value ? nlohmann::ordered_json(*r.value) : nlohmann::ordered_json(nullptr);
    }
    return j;
}

}  // namespace codr::cost
