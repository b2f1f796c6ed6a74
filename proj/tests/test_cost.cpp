#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "codr/cost.hpp"
#include "codr/error.hpp"

using namespace codr;
using namespace codr::cost;
using sim::Level;

namespace {

sim::MemoryCounter random_counters(std::mt19937_64& rng) {
    sim::MemoryCounter c;
    for (auto l : sim::kLevels) {
        c[l].read(rng() % 1000, rng() % 100000);
        c[l].write(rng() % 1000, rng() % 100000);
    }
    c[Level::dram].read_bits -= c[Level::dram].read_bits % 8;
    c[Level::dram].write_bits -= c[Level::dram].write_bits % 8;
    c.alu_mults = rng() % 100000;
    c.alu_adds = rng() % 100000;
    c.crossbar_transfers = rng() % 1000;
    return c;
}

sim::MemoryCounter times(sim::MemoryCounter c, uint64_t k) {
    for (auto& l : c.levels) {
        l.read_events *= k;
        l.write_events *= k;
        l.read_bits *= k;
        l.write_bits *= k;
    }
    c.alu_mults *= k;
    c.alu_adds *= k;
    c.crossbar_transfers *= k;
    return c;
}

}  // namespace

TEST(CostTable, DefaultDramIs160PerByte) {
    const auto t = CostTable::defaults();
    EXPECT_EQ(t.dram_per_byte, 160.0);
    EXPECT_NO_THROW(t.validate());
}

TEST(Energy, ThousandDramBytes) {
    sim::MemoryCounter c;
    c[Level::dram].read(1000, 8000);
    const auto e = energy_from_report(c, CostTable::defaults());
    EXPECT_EQ(e.level(Level::dram), 160000.0);
    EXPECT_EQ(e.total_pj(), 160000.0);
}

TEST(Energy, ZeroCountersZeroEnergy) {
    const auto e = energy_from_report(sim::MemoryCounter{}, CostTable::defaults());
    EXPECT_EQ(e.total_pj(), 0.0);
    for (const auto& [name, pct] : e.percentages()) EXPECT_EQ(pct, 0.0) << name;
}

TEST(Energy, LinearAndMonotone) {
    std::mt19937_64 rng(51);
    const auto table = CostTable::defaults();
    for (int trial = 0; trial < 50; ++trial) {
        const auto c = random_counters(rng);
        const double one = energy_from_report(c, table).total_pj();
        EXPECT_NEAR(energy_from_report(times(c, 2), table).total_pj(), 2 * one, 1e-9 * one);
        auto more = c;
        more.alu_adds += 1;
        more[Level::weight_rf].read_bits += 5;
        EXPECT_GT(energy_from_report(more, table).total_pj(), one);
    }
}

TEST(Energy, ComponentFormulas) {
    sim::MemoryCounter c;
    c[Level::input_sram].read(10, 80);
    c[Level::input_sram].write(1, 8);
    c.alu_mults = 7;
    c.alu_adds = 3;
    c.crossbar_transfers = 2;
    auto t = CostTable::defaults();
    const auto e = energy_from_report(c, t);
    EXPECT_DOUBLE_EQ(e.level(Level::input_sram), 88 * t.level(Level::input_sram));
    EXPECT_DOUBLE_EQ(e.alu_pj, 7 * t.alu_mult_pj + 3 * t.alu_add_pj);
    EXPECT_DOUBLE_EQ(e.crossbar_pj, 2 * t.crossbar_per_transfer_pj);
}

TEST(Energy, TotalIsSumAndPercentagesAddUp) {
    std::mt19937_64 rng(52);
    const auto e = energy_from_report(random_counters(rng), CostTable::defaults());
    double sum = 0, pct = 0;
    for (const auto& [name, v] : e.components()) sum += v;
    for (const auto& [name, v] : e.percentages()) pct += v;
    EXPECT_NEAR(sum, e.total_pj(), 1e-9 * sum);
    EXPECT_NEAR(pct, 100.0, 1e-9);
    EXPECT_DOUBLE_EQ(e.total_uj(), e.total_pj() * 1e-6);
}

TEST(Energy, ScaledTableScalesTotalsNotRatios) {
    std::mt19937_64 rng(53);
    const auto a = random_counters(rng), b = random_counters(rng);
    const auto t = CostTable::defaults();
    const auto t3 = t.scaled(3.0);
    const auto ea = energy_from_report(a, t), eb = energy_from_report(b, t);
    const auto ea3 = energy_from_report(a, t3), eb3 = energy_from_report(b, t3);
    EXPECT_NEAR(ea3.total_pj(), 3 * ea.total_pj(), 1e-9 * ea.total_pj());
    const auto r = compare_designs(make_metrics("a", 10, &a, &ea), make_metrics("b", 20, &b, &eb));
    const auto r3 = compare_designs(make_metrics("a", 10, &a, &ea3), make_metrics("b", 20, &b, &eb3));
    ASSERT_EQ(r.size(), r3.size());
    for (size_t i = 0; i < r.size(); ++i) {
        ASSERT_EQ(r[i].value.has_value(), r3[i].value.has_value());
        if (r[i].value) {
            EXPECT_NEAR(*r[i].value, *r3[i].value, 1e-9 * *r[i].value) << r[i].category;
        }
    }
}

TEST(Compare, IdenticalAndDoubled) {
    std::mt19937_64 rng(54);
    const auto c = random_counters(rng);
    const auto t = CostTable::defaults();
    const auto e = energy_from_report(c, t);
    for (const auto& r : compare_designs(make_metrics("a", 100, &c, &e), make_metrics("b", 100, &c, &e))) {
        ASSERT_TRUE(r.value) << r.category;
        EXPECT_DOUBLE_EQ(*r.value, 1.0) << r.category;
    }
    const auto c2 = times(c, 2);
    const auto e2 = energy_from_report(c2, t);
    for (const auto& r : compare_designs(make_metrics("a", 100, &c, &e), make_metrics("b", 200, &c2, &e2))) {
        ASSERT_TRUE(r.value) << r.category;
        EXPECT_NEAR(*r.value, 2.0, 1e-12) << r.category;
    }
}

TEST(Compare, DivisionByZeroIsUndefined) {
    const auto r = compare_designs(make_metrics("a", 0), make_metrics("b", 5));
    ASSERT_EQ(r.size(), 1u);
    EXPECT_FALSE(r[0].value);
    EXPECT_TRUE(to_json(r)["size_bits"].is_null());
}

TEST(CostTable, JsonRoundTripAndValidation) {
    auto t = CostTable::defaults();
    t.level(Level::weight_sram) = 0.5;
    const auto back = cost_table_from_json(nlohmann::json::parse(to_json(t).dump()));
    EXPECT_EQ(back.pj_per_bit, t.pj_per_bit);
    EXPECT_EQ(back.dram_per_byte, 160.0);
    EXPECT_THROW(cost_table_from_json(nlohmann::json::parse(R"({"alu_mult_pj": -1})")), ValidationError);
    EXPECT_THROW(cost_table_from_json(nlohmann::json::parse(R"({"pj_per_bit": {"l3": 1}})")), ValidationError);
    EXPECT_THROW(cost_table_from_json(nlohmann::json::parse(R"({"dram_per_byte": "x"})")), ValidationError);
}

TEST(Energy, CsvHasRowPerComponentPlusTotal) {
    sim::MemoryCounter c;
    c[Level::dram].read(1000, 8000);
    const auto csv = to_csv(energy_from_report(c, CostTable::defaults()));
    std::istringstream is(csv);
    std::string line;
    int rows = 0;
    std::string last;
    while (std::getline(is, line)) {
        ++rows;
        last = line;
    }
    EXPECT_EQ(rows, 1 + 9 + 1);
    EXPECT_EQ(last, "total,160000,0.16,100");
}
