#include <random>

#include <gtest/gtest.h>

#include "codr/bitstream.hpp"
#include "codr/error.hpp"
#include "codr/rle.hpp"
#include "codr/synthetic.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace codr;
using namespace codr::rle;

namespace {

std::vector<int> bits_of(const Bitstream& s) {
    std::vector<int> out;
    BitReader r(s);
    while (r.remaining() > 0) out.push_back(static_cast<int>(r.get(1)));
    return out;
}

UnifiedStream stream(int32_t first, std::vector<uint32_t> deltas, std::vector<std::vector<uint32_t>> indexes) {
    UnifiedStream s;
    s.first_value = first;
    s.deltas = std::move(deltas);
    s.indexes = std::move(indexes);
    return s;
}

/// Random valid stream over a vector of `len` positions.
UnifiedStream random_stream(std::mt19937_64& rng, int len, int bits) {
    const double density = std::array{1.0, 0.6, 0.2, 0.05}[rng() % 4];
    const int levels = static_cast<int>(rng() % 5);  // 0 = unconstrained values
    return unify_weight_vector(testutil::random_vector(rng, static_cast<size_t>(len), bits, density, levels));
}

EncodingParams params(int kd, int kc, int ki, int w, int len) {
    return {kd, kc, ki, w, index_width(len)};
}

}  // namespace

TEST(Bitstream, LsbFirstPacking) {
    BitWriter w;
    w.put(0b101, 3);
    w.put(0xF, 4);
    w.put(1, 1);
    w.put(0x3, 2);
    const auto s = w.take();
    ASSERT_EQ(s.bit_length(), 10u);
    ASSERT_EQ(s.byte_length(), 2u);
    EXPECT_EQ(s.bytes()[0], 0xFD);  // 1,0,1 then 1,1,1,1 then 1
    EXPECT_EQ(s.bytes()[1], 0x03);
    BitReader r(s);
    EXPECT_EQ(r.get(3), 0b101u);
    EXPECT_EQ(r.get(4), 0xFu);
    EXPECT_EQ(r.get(1), 1u);
    EXPECT_EQ(r.get(2), 3u);
    EXPECT_THROW(r.get(1), CorruptionError);
}

TEST(Bitstream, RejectsInconsistentLength) {
    EXPECT_THROW(Bitstream(std::vector<uint8_t>{1, 2}, 3), std::exception);
    EXPECT_EQ(ceil_log2(1), 0);
    EXPECT_EQ(ceil_log2(36), 6);
    EXPECT_EQ(ceil_log2(64), 6);
    EXPECT_EQ(sign_extend(0xFE, 8), -2);
}

TEST(Widths, DerivedFromVectorLength) {
    EXPECT_EQ(index_width(36), 6);
    EXPECT_EQ(index_width(1), 1);
    EXPECT_EQ(header_width(36), 6);
    EXPECT_EQ(header_width(64), 7);
    EXPECT_EQ(max_count_width(36), 7);
    EXPECT_NO_THROW(params(8, 7, 6, 8, 36).validate(36));
    EXPECT_THROW(params(9, 1, 1, 8, 36).validate(36), ValidationError);
    EXPECT_THROW(params(1, 8, 1, 8, 36).validate(36), ValidationError);
    EXPECT_THROW(params(1, 1, 7, 8, 36).validate(36), ValidationError);
    EXPECT_THROW(params(0, 1, 1, 8, 36).validate(36), ValidationError);
}

TEST(DeltaStream, FieldLayout) {
    BitWriter a;
    encode_delta_stream(a, 0, std::vector<uint32_t>{}, 2, 8);
    const auto head = a.bit_length();
    encode_delta_stream(a, 0, std::vector<uint32_t>{3}, 2, 8);
    auto bits = bits_of(a.stream());
    EXPECT_EQ(bits.size() - 2 * head, 3u);
    EXPECT_EQ(std::vector<int>(bits.end() - 3, bits.end()), (std::vector<int>{0, 1, 1}));

    BitWriter b;
    encode_delta_stream(b, 0, std::vector<uint32_t>{5}, 2, 8);
    bits = bits_of(b.stream());
    ASSERT_EQ(bits.size(), 18u);
    EXPECT_EQ(std::vector<int>(bits.begin() + 9, bits.end()), (std::vector<int>{1, 1, 0, 1, 0, 0, 0, 0, 0}));
}

TEST(DeltaStream, FirstValueOnlyIsNineBits) {
    BitWriter w;
    encode_delta_stream(w, -2, std::vector<uint32_t>{}, 3, 8);
    const auto bits = bits_of(w.stream());
    EXPECT_EQ(bits, (std::vector<int>{1, 0, 1, 1, 1, 1, 1, 1, 1}));
    BitReader r(w.stream());
    const auto f = decode_delta_stream(r, 3, 8, 1);
    EXPECT_EQ(f.first_value, -2);
    EXPECT_TRUE(f.deltas.empty());
}

TEST(DeltaStream, ZeroEntriesConsumeNothing) {
    BitWriter w;
    w.put(0x55, 8);
    const auto s = w.take();
    BitReader r(s);
    const auto f = decode_delta_stream(r, 2, 8, 0);
    EXPECT_EQ(r.position(), 0u);
    EXPECT_TRUE(f.deltas.empty());
}

TEST(DeltaStream, SizesPerWidth) {
    const std::vector<uint32_t> d{1, 1, 2, 200};
    const size_t expected[] = {22, 18, 21};
    for (int k = 1; k <= 3; ++k) {
        BitWriter w;
        encode_delta_stream(w, -128, d, k, 8);
        EXPECT_EQ(w.bit_length() - 9, expected[k - 1]) << "k=" << k;
        BitReader r(w.stream());
        const auto f = decode_delta_stream(r, k, 8, 5);
        EXPECT_EQ(f.deltas, d);
        EXPECT_EQ(f.first_value, -128);
    }
}

TEST(DeltaStream, RejectsOutOfRange) {
    BitWriter w;
    EXPECT_THROW(encode_delta_stream(w, 0, std::vector<uint32_t>{256}, 2, 8), ValidationError);
    EXPECT_THROW(encode_delta_stream(w, 128, std::vector<uint32_t>{}, 2, 8), ValidationError);
    BitWriter t;
    t.put(1, 1);
    t.put(3, 4);
    const auto s = t.take();
    BitReader r(s);
    EXPECT_THROW(decode_delta_stream(r, 2, 8, 1), CorruptionError);
}

TEST(ChooseParams, PicksNarrowestDeltaWidth) {
    const auto s = stream(-128, {1, 1, 2, 200}, {{0}, {1}, {2}, {3}, {4}});
    const std::vector<UnifiedStream> streams{s};
    const auto p = choose_encoding_params(streams, 8, 8);
    EXPECT_EQ(p.k_delta, 2);
    EXPECT_EQ(p.k_count, 1);
}

TEST(ChooseParams, TiesGoToSmallestWidth) {
    // no deltas and every count 1: every k_delta and k_count ties
    const std::vector<UnifiedStream> streams{stream(5, {}, {{3}}), stream(-7, {}, {{0}})};
    const auto p = choose_encoding_params(streams, 8, 36);
    EXPECT_EQ(p.k_delta, 1);
    EXPECT_EQ(p.k_count, 1);
    EXPECT_EQ(p.k_index, 1);
    const auto empty = choose_encoding_params(std::vector<UnifiedStream>{UnifiedStream{}}, 8, 36);
    EXPECT_EQ(empty.k_delta, 1);
    EXPECT_EQ(empty.k_count, 1);
    EXPECT_EQ(empty.k_index, 1);
}

TEST(CountStream, OverflowInsertsDummy) {
    const auto e = augment_counts(std::vector<uint32_t>{6}, 2);
    ASSERT_EQ(e.size(), 2u);
    EXPECT_EQ(e[0].repetitions, 4u);
    EXPECT_FALSE(e[0].dummy);
    EXPECT_EQ(e[1].repetitions, 2u);
    EXPECT_TRUE(e[1].dummy);

    BitWriter w;
    const auto four = encode_count_stream(w, std::vector<uint32_t>{4}, 2);
    EXPECT_EQ(four.size(), 1u);
    EXPECT_EQ(bits_of(w.stream()), (std::vector<int>{1, 1}));
}

TEST(CountStream, ThreeCountsSixBits) {
    BitWriter w;
    const auto e = encode_count_stream(w, std::vector<uint32_t>{1, 2, 3}, 2);
    EXPECT_EQ(e.size(), 3u);
    EXPECT_EQ(w.bit_length(), 6u);
    const auto s = w.take();
    BitReader r(s);
    EXPECT_EQ(decode_count_stream(r, 2, 3, std::vector<uint32_t>{1, 1}), (std::vector<uint32_t>{1, 2, 3}));
}

TEST(CountStream, MergesDummies) {
    BitWriter w;
    encode_count_stream(w, std::vector<uint32_t>{6}, 2);
    const auto s = w.take();
    BitReader r(s);
    EXPECT_EQ(decode_count_stream(r, 2, 2, std::vector<uint32_t>{0}), (std::vector<uint32_t>{6}));
    BitWriter one;
    encode_count_stream(one, std::vector<uint32_t>{1}, 3);
    EXPECT_EQ(bits_of(one.stream()), (std::vector<int>{0, 0, 0}));
}

TEST(CountStream, RandomRoundTrip) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 500; ++trial) {
        const int len = 36;
        std::vector<uint32_t> counts(1 + rng() % 6);
        for (auto& c : counts) c = 1 + static_cast<uint32_t>(rng() % len);
        const int k = 1 + static_cast<int>(rng() % max_count_width(len));
        BitWriter w;
        const auto entries = encode_count_stream(w, counts, k);
        std::vector<uint32_t> raw;
        for (size_t i = 1; i < entries.size(); ++i) raw.push_back(entries[i].dummy ? 0 : 1);
        const auto s = w.take();
        BitReader r(s);
        ASSERT_EQ(decode_count_stream(r, k, entries.size(), raw), counts);
    }
}

TEST(IndexStream, WorkedExample) {
    const std::vector<std::vector<uint32_t>> groups{{4}, {2, 5}, {0, 3, 7}};
    BitWriter w;
    encode_index_stream(w, groups, 2, 3);
    EXPECT_EQ(w.bit_length(), 22u);
    const auto s = w.take();
    BitReader r(s);
    EXPECT_EQ(decode_index_stream(r, 2, 3, std::vector<uint32_t>{1, 2, 3}), groups);
    EXPECT_EQ(r.remaining(), 0u);
}

TEST(IndexStream, FirstIndexAbsolute) {
    BitWriter w;
    encode_index_stream(w, {{0}}, 2, 6);
    EXPECT_EQ(bits_of(w.stream()), (std::vector<int>{1, 0, 0, 0, 0, 0, 0}));
    BitWriter c;
    encode_index_stream(c, {{10, 11}}, 1, 6);
    EXPECT_EQ(c.bit_length(), 7u + 2u);
}

TEST(IndexStream, EmptyAndErrors) {
    BitWriter w;
    encode_index_stream(w, {}, 2, 3);
    EXPECT_EQ(w.bit_length(), 0u);
    EXPECT_THROW(encode_index_stream(w, {{8}}, 2, 3), ValidationError);
    BitWriter t;
    t.put(1, 1);
    t.put(2, 2);
    const auto s = t.take();
    BitReader r(s);
    EXPECT_THROW(decode_index_stream(r, 2, 3, std::vector<uint32_t>{1}), CorruptionError);
    BitWriter rel;
    rel.put(0, 1);
    rel.put(1, 2);
    const auto rs = rel.take();
    BitReader rr(rs);
    EXPECT_THROW(decode_index_stream(rr, 2, 3, std::vector<uint32_t>{1}), CorruptionError);
}

TEST(Vector, DummyAsFirstEntryIsCorrupt) {
    const int len = 8;
    const auto p = params(2, 2, 2, 8, len);
    BitWriter d, c, i;
    d.put(2, header_width(len));  // two entries
    d.put(1, 1);
    d.put(0, 8);  // first value 0 is not a weight
    d.put(0, 1);
    d.put(1, 2);
    c.put(0, 2);
    c.put(0, 2);
    i.put(1, 1);
    i.put(0, 3);
    i.put(0, 1);
    i.put(1, 2);
    const auto ds = d.take(), cs = c.take(), is = i.take();
    BitReader dr(ds), cr(cs), ir(is);
    EXPECT_THROW(decode_vector(dr, cr, ir, p, len), CorruptionError);
}

TEST(Vector, RoundTripAllParamsWithCoverage) {
    std::mt19937_64 rng(22);
    uint64_t dummies = 0, absolute_fallbacks = 0, cases = 0;
    for (int len : {4, 9, 36, 100}) {
        const int idx_full = index_width(len);
        for (int trial = 0; trial < 30; ++trial) {
            const auto s = random_stream(rng, len, 8);
            for (int kd = 1; kd <= 8; ++kd) {
                for (int kc = 1; kc <= max_count_width(len); ++kc) {
                    for (int ki = 1; ki <= idx_full; ++ki) {
                        const auto p = params(kd, kc, ki, 8, len);
                        BitWriter d, c, i;
                        const auto vb = encode_vector(d, c, i, s, p, len);
                        const auto ds = d.take(), cs = c.take(), is = i.take();
                        BitReader dr(ds), cr(cs), ir(is);
                        VectorBits back;
                        ASSERT_EQ(decode_vector(dr, cr, ir, p, len, &back), s);
                        ASSERT_EQ(back.total(), vb.total());
                        ASSERT_EQ(vb.total(), ds.bit_length() + cs.bit_length() + is.bit_length());
                        ++cases;
                        dummies += augment_counts(s.counts(), kc).size() - s.unique_count();
                    }
                }
            }
            // backward steps force the absolute form
            int64_t prev = -1;
            for (const auto& g : s.indexes) {
                for (auto idx : g) {
                    if (prev >= 0 && idx < prev) ++absolute_fallbacks;
                    prev = idx;
                }
            }
        }
    }
    EXPECT_GT(cases, 1000u);
    EXPECT_GT(dummies, 100u);
    EXPECT_GT(absolute_fallbacks, 100u);
}

TEST(Layer, SizeOracleAndOptimality) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const int len = std::array{4, 9, 36}[trial % 3];
        std::vector<UnifiedStream> streams(1 + rng() % 12);
        for (auto& s : streams) s = random_stream(rng, len, trial % 4 == 0 ? 16 : 8);
        const int w = trial % 4 == 0 ? 16 : 8;
        const auto best = oracle::brute_force(streams, w, len);
        const auto p = choose_encoding_params(streams, w, len);
        EXPECT_EQ(p.k_delta, best.params.k_delta);
        EXPECT_EQ(p.k_count, best.params.k_count);
        EXPECT_EQ(p.k_index, best.params.k_index);
        const auto size = encoded_size(streams, p, len);
        EXPECT_EQ(size.total(), best.bits);
        const auto o = oracle::codr_size(streams, {p.k_delta, p.k_count, p.k_index}, w, len);
        EXPECT_EQ(size.header, o.header);
        EXPECT_EQ(size.delta, o.delta);
        EXPECT_EQ(size.count, o.count);
        EXPECT_EQ(size.index, o.index);

        const auto layer = encode_layer(3, streams, p, len);
        EXPECT_EQ(layer.total_bits(), size.total());
        EXPECT_EQ(layer.delta.bit_length(), size.header + size.delta);
        EXPECT_EQ(layer.count.bit_length(), size.count);
        EXPECT_EQ(layer.index.bit_length(), size.index);
    }
}

TEST(Layer, RoundTripAtDensities) {
    std::mt19937_64 rng(24);
    LayerShape s;
    s.n_in = 6;
    s.m_out = 40;
    s.k_rows = s.k_cols = 3;
    s.in_rows = s.in_cols = 12;
    const TilePlan plan(s, TilingConfig{});
    for (double d : {1.0, 0.5, 0.1}) {
        const auto w = testutil::random_weights(rng, s, 8, d, 0);
        const auto streams = unify_layer(w, plan);
        const auto p = choose_encoding_params(streams, 8, plan.vector_length());
        const auto layer = encode_layer(0, streams, p, plan.vector_length());
        EXPECT_EQ(decode_layer(layer, plan), streams);
    }
}

TEST(Layer, ZeroWeightsGiveHeadersOnly) {
    LayerShape s;
    s.n_in = 4;
    s.m_out = 8;
    s.k_rows = s.k_cols = 3;
    s.in_rows = s.in_cols = 8;
    const TilePlan plan(s, TilingConfig{});
    const auto streams = unify_layer(WeightTensor(8, 4, 3, 3), plan);
    const auto p = choose_encoding_params(streams, 8, plan.vector_length());
    const auto layer = encode_layer(0, streams, p, plan.vector_length());
    EXPECT_EQ(layer.total_bits(), header_bits(plan));
    EXPECT_EQ(header_bits(plan), 8u * static_cast<size_t>(header_width(36)));
    EXPECT_EQ(size_ucnn_baseline(streams, 8, 36), 0u);
}

TEST(Layer, CorruptionNamesVector) {
    LayerShape s;
    s.n_in = 4;
    s.m_out = 8;
    s.k_rows = s.k_cols = 3;
    s.in_rows = s.in_cols = 8;
    const TilePlan plan(s, TilingConfig{});
    std::mt19937_64 rng(25);
    const auto streams = unify_layer(testutil::random_weights(rng, s, 8, 0.5), plan);
    const auto p = choose_encoding_params(streams, 8, plan.vector_length());
    auto layer = encode_layer(7, streams, p, plan.vector_length());
    layer.index = Bitstream(std::vector<uint8_t>(layer.index.bytes().begin(), layer.index.bytes().begin() + 2), 16);
    try {
        decode_layer(layer, plan);
        FAIL();
    } catch (const CorruptionError& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("layer 7"), std::string::npos) << what;
        EXPECT_NE(what.find("vector"), std::string::npos) << what;
    }
}

TEST(Baselines, UcnnHandCount) {
    const std::vector<UnifiedStream> one{stream(9, {}, {{0}})};
    EXPECT_EQ(size_ucnn_baseline(one, 8, 36), (1u + 8u) + (1u + 5u + 1u));
}

TEST(Baselines, UcnnMatchesOracle) {
    std::mt19937_64 rng(26);
    for (int trial = 0; trial < 50; ++trial) {
        const int len = std::array{9, 36, 100}[trial % 3];
        std::vector<UnifiedStream> streams(1 + rng() % 10);
        for (auto& s : streams) s = random_stream(rng, len, 8);
        EXPECT_EQ(size_ucnn_baseline(streams, 8, len), oracle::ucnn_size(streams, 8, len));
    }
}

TEST(Baselines, ScnnDenseAndPadding) {
    WeightTensor dense(1, 1, 1, 5);
    for (auto& v : dense.values()) v = 3;
    EXPECT_EQ(size_scnn_baseline(dense, 8), 5u * 12u);

    WeightTensor gap(1, 1, 1, 18);
    gap.values()[0] = 1;
    gap.values()[17] = 1;  // 16 zeros between
    EXPECT_EQ(size_scnn_baseline(gap, 8), 3u * 12u);
    gap.values()[17] = 0;
    gap.values()[16] = 1;  // 15 zeros fit the run field
    EXPECT_EQ(size_scnn_baseline(gap, 8), 2u * 12u);
}

TEST(Baselines, ScnnMatchesRunScanOracle) {
    std::mt19937_64 rng(27);
    LayerShape s;
    s.n_in = 16;
    s.m_out = 16;
    s.k_rows = s.k_cols = 3;
    s.in_rows = s.in_cols = 8;
    for (double d : {0.1, 0.02, 0.5, 1.0}) {
        const auto w = testutil::random_weights(rng, s, 8, d);
        EXPECT_EQ(size_scnn_baseline(w, 8), oracle::scnn_size(w, 8)) << d;
        EXPECT_EQ(size_scnn_baseline(w, 16), oracle::scnn_size(w, 16)) << d;
    }
}

TEST(Compression, NonIncreasingWithDensityAndUniqueCount) {
    LayerShape s;
    s.n_in = 64;
    s.m_out = 64;
    s.k_rows = s.k_cols = 3;
    s.in_rows = s.in_cols = 16;
    s.pad = 1;
    const TilePlan plan(s, TilingConfig{});
    auto size = [&](double d, int u) {
        const auto streams = unify_layer(gen_synthetic_weights(s, {d, u, 42, 8}), plan);
        return encoded_size(streams, choose_encoding_params(streams, 8, plan.vector_length()), plan.vector_length())
            .total();
    };
    for (int u : {256, 64, 16}) {
        uint64_t prev = UINT64_MAX;
        for (double d : {1.0, 0.55, 0.40, 0.25}) {
            const auto b = size(d, u);
            EXPECT_LE(b, prev) << "D=" << d << " U=" << u;
            prev = b;
        }
    }
    for (double d : {1.0, 0.55, 0.40, 0.25}) {
        uint64_t prev = UINT64_MAX;
        for (int u : {256, 64, 16}) {
            const auto b = size(d, u);
            EXPECT_LE(b, prev) << "D=" << d << " U=" << u;
            prev = b;
        }
    }
}
