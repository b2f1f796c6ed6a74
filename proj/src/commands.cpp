#include "codr/commands.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "codr/codr_file.hpp"
#include "codr/config.hpp"
#include "codr/cost.hpp"
#include "codr/error.hpp"
#include "codr/pipeline.hpp"
#include "codr/report.hpp"
#include "codr/synthetic.hpp"
#include "codr/tensor_file.hpp"

namespace codr {

namespace fs = std::filesystem;

namespace {

struct Run {
    std::vector<LayerConfig> layers;
    TilingConfig cfg;
};

Run load_run(const CommandOptions& o) {
    if (o.layers.empty()) throw ValidationError("--layers is required");
    Run run;
    run.layers = load_layers(o.layers);
    if (o.tiling) run.cfg = load_tiling(*o.tiling);
    validate_run(run.layers, run.cfg);
    if (o.format != "json" && o.format != "csv") {
        throw ValidationError("--format must be json or csv, got '" + o.format + "'");
    }
    return run;
}

SyntheticSpec single_spec(const CommandOptions& o, const LayerConfig& layer) {
    if (o.density.size() != 1 || o.unique.size() != 1) {
        throw ValidationError("expected one --density and one --unique value");
    }
    SyntheticSpec spec;
    spec.density = o.density.front();
    spec.unique_count = o.unique.front();
    spec.seed = o.seed;
    spec.bit_width = layer.bit_width;
    try {
        spec.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(layer.label() + ": " + e.what());
    }
    return spec;
}

std::string layer_file(uint32_t id, const char* kind) {
    return "layer_" + std::to_string(id) + "." + kind + ".tnsr";
}

/// A directory holds per-layer files; a plain file only serves a single layer.
fs::path resolve(const fs::path& p, const LayerConfig& layer, size_t layer_count, const char* kind) {
    if (fs::is_directory(p)) {
        auto f = p / layer_file(layer.id, kind);
        if (!fs::exists(f)) throw ValidationError(layer.label() + ": missing " + f.string());
        return f;
    }
    if (!fs::exists(p)) throw ValidationError("cannot open " + p.string());
    if (layer_count != 1) {
        throw ValidationError(p.string() + " is a single file but the config has " + std::to_string(layer_count) +
                              " layers; pass a directory of " + layer_file(layer.id, kind) + " files");
    }
    return p;
}

std::vector<int32_t> load_bias(const fs::path& weights_path, const fs::path& given, const LayerConfig& layer) {
    fs::path bias_path;
    if (fs::is_directory(given)) {
        bias_path = given / layer_file(layer.id, "bias");
    } else {
        auto name = weights_path.filename().string();
        const auto pos = name.find(".weights.");
        if (pos != std::string::npos) bias_path = weights_path.parent_path() / name.replace(pos, 9, ".bias.");
    }
    if (bias_path.empty() || !fs::exists(bias_path)) return std::vector<int32_t>(layer.shape.m_out, 0);
    const auto t = load_tensor(bias_path);
    if (t.is_float()) throw ValidationError(layer.label() + ": bias tensor must be integer, in accumulator units");
    if (t.dims.size() != 1 || t.dims[0] != static_cast<uint32_t>(layer.shape.m_out)) {
        throw ValidationError(layer.label() + ": bias tensor must have shape [" + std::to_string(layer.shape.m_out) +
                              "]");
    }
    return t.ints;
}

WeightTensor load_weights(const CommandOptions& o, const LayerConfig& layer, size_t layer_count) {
    const auto& s = layer.shape;
    if (!o.weights) return gen_synthetic_weights(s, single_spec(o, layer), layer.id);

    const auto path = resolve(*o.weights, layer, layer_count, "weights");
    const auto t = load_tensor(path);
    const std::vector<uint32_t> want = {static_cast<uint32_t>(s.m_out), static_cast<uint32_t>(s.n_in),
                                        static_cast<uint32_t>(s.k_rows), static_cast<uint32_t>(s.k_cols)};
    if (t.dims != want) throw ValidationError(layer.label() + ": weight tensor shape does not match " + to_string(s));
    WeightTensor w(s.m_out, s.n_in, s.k_rows, s.k_cols);
    if (t.is_float()) {
        const auto q = quantize_tensor(t.floats, layer.bit_width);
        std::copy(q.values.begin(), q.values.end(), w.values().begin());
    } else {
        check_range(t.ints, layer.bit_width, "weights");
        std::copy(t.ints.begin(), t.ints.end(), w.values().begin());
    }
    w.bias() = load_bias(path, *o.weights, layer);
    return w;
}

FeatureMap load_input(const CommandOptions& o, const LayerConfig& layer, size_t layer_count) {
    const auto& s = layer.shape;
    if (!o.input) return gen_synthetic_input(s, layer.bit_width, o.seed, layer.id);
    const auto fm = to_feature_map(load_tensor(resolve(*o.input, layer, layer_count, "input")), layer.bit_width);
    if (fm.channels() != s.n_in || fm.rows() != s.in_rows || fm.cols() != s.in_cols) {
        throw ValidationError(layer.label() + ": input tensor shape does not match " + to_string(s));
    }
    check_range(fm.data(), layer.bit_width, "input features");
    return fm;
}

cost::CostTable load_costs(const CommandOptions& o) {
    return o.costs ? cost::load_cost_table(o.costs->string()) : cost::CostTable::defaults();
}

const rle::EncodedLayer& find_encoded(const std::vector<rle::EncodedLayer>& encoded, const LayerConfig& layer) {
    const auto it = std::find_if(encoded.begin(), encoded.end(),
                                 [&](const rle::EncodedLayer& e) { return e.layer_id == layer.id; });
    if (it == encoded.end()) throw ValidationError(layer.label() + ": not present in the .codr file");
    if (it->bit_width() != layer.bit_width) {
        throw ValidationError(layer.label() + ": .codr bit width " + std::to_string(it->bit_width()) +
                              " differs from the config");
    }
    return *it;
}

std::string tensor_bytes(const TensorFile& t) {
    std::ostringstream os(std::ios::binary);
    write_tensor(os, t);
    return os.str();
}

/// Files are assembled in memory and written only after every step succeeded.
class OutputSet {
public:
    void add(std::string name, std::string data) { files_.emplace_back(std::move(name), std::move(data)); }

    void write(const fs::path& dir, std::ostream& log) const {
        fs::create_directories(dir);
        for (const auto& [name, data] : files_) {
            const auto path = dir / name;
            std::ofstream os(path, std::ios::binary);
            os.write(data.data(), static_cast<std::streamsize>(data.size()));
            if (!os) throw std::runtime_error("failed to write " + path.string());
            log << "wrote " << path.string() << '\n';
        }
    }

private:
    std::vector<std::pair<std::string, std::string>> files_;
};

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

nlohmann::ordered_json to_json(const rle::EncodingParams& p) {
    return {{"k_delta", p.k_delta}, {"k_count", p.k_count}, {"k_index", p.k_index},
            {"w_full", p.w_full},   {"idx_full", p.idx_full}};
}

nlohmann::ordered_json to_json(const CompressionRow& r) {
    nlohmann::ordered_json j;
    j["layer_id"] = r.layer_id;
    if (!r.name.empty()) j["name"] = r.name;
    j["params"] = to_json(r.params);
    j["vectors"] = r.vectors;
    j["weights"] = r.weights;
    j["nonzero_weights"] = r.nonzero;
    j["unique_entries"] = r.unique_entries;
    j["codr_bits"] = {{"header", r.codr.header}, {"delta", r.codr.delta}, {"count", r.codr.count},
                      {"index", r.codr.index},   {"total", r.codr.total()}};
    j["ucnn_bits"] = r.ucnn_bits;
    j["scnn_bits"] = r.scnn_bits;
    j["dense_bits"] = r.dense_bits;
    j["bits_per_weight"] = r.bits_per_weight();
    j["ratio_vs_dense"] = r.ratio_vs_dense();
    return j;
}

const char* kCompressionCsvHeader =
    "layer_id,name,k_delta,k_count,k_index,idx_full,vectors,weights,nonzero_weights,unique_entries,"
    "header_bits,delta_bits,count_bits,index_bits,codr_bits,ucnn_bits,scnn_bits,dense_bits,bits_per_weight,"
    "ratio_vs_dense\n";

std::string csv_row(const CompressionRow& r) {
    std::ostringstream os;
    os << r.layer_id << ',' << r.name << ',' << r.params.k_delta << ',' << r.params.k_count << ','
       << r.params.k_index << ',' << r.params.idx_full << ',' << r.vectors << ',' << r.weights << ',' << r.nonzero
       << ',' << r.unique_entries << ',' << r.codr.header << ',' << r.codr.delta << ',' << r.codr.count << ','
       << r.codr.index << ',' << r.codr.total() << ',' << r.ucnn_bits << ',' << r.scnn_bits << ',' << r.dense_bits
       << ',' << format_double(r.bits_per_weight()) << ',' << format_double(r.ratio_vs_dense()) << '\n';
    return os.str();
}

std::string energy_csv(const std::vector<std::pair<std::string, cost::EnergyReport>>& rows) {
    std::string out = "layer,component,energy_pj,energy_uj,percent\n";
    for (const auto& [label, e] : rows) {
        std::istringstream is(cost::to_csv(e));
        std::string line;
        std::getline(is, line);  // per-report header
        while (std::getline(is, line)) out += label + "," + line + "\n";
    }
    return out;
}

}  // namespace

int cmd_gen_weights(const CommandOptions& o, std::ostream& log) {
    const auto run = load_run(o);
    OutputSet out;
    for (const auto& layer : run.layers) {
        const auto w = gen_synthetic_weights(layer.shape, single_spec(o, layer), layer.id);
        const auto& s = layer.shape;
        out.add(layer_file(layer.id, "weights"),
                tensor_bytes(make_int_tensor({static_cast<uint32_t>(s.m_out), static_cast<uint32_t>(s.n_in),
                                              static_cast<uint32_t>(s.k_rows), static_cast<uint32_t>(s.k_cols)},
                                             {w.values().begin(), w.values().end()}, layer.bit_width)));
        out.add(layer_file(layer.id, "bias"),
                tensor_bytes(make_int_tensor({static_cast<uint32_t>(s.m_out)}, w.bias(), layer.bit_width)));
        const auto input = gen_synthetic_input(s, layer.bit_width, o.seed, layer.id);
        out.add(layer_file(layer.id, "input"), tensor_bytes(from_feature_map(input, layer.bit_width)));
    }
    out.write(o.out, log);
    return kExitOk;
}

int cmd_encode(const CommandOptions& o, std::ostream& log) {
    const auto run = load_run(o);
    std::vector<rle::EncodedLayer> encoded;
    std::vector<CompressionRow> rows;
    for (const auto& layer : run.layers) {
        const auto w = load_weights(o, layer, run.layers.size());
        encoded.push_back(compress_layer(layer, w, run.cfg));
        rows.push_back(measure_compression(layer, w, run.cfg));
    }

    CompressionRow total;
    for (const auto& r : rows) {
        total.vectors += r.vectors;
        total.weights += r.weights;
        total.nonzero += r.nonzero;
        total.unique_entries += r.unique_entries;
        total.codr.header += r.codr.header;
        total.codr.delta += r.codr.delta;
        total.codr.count += r.codr.count;
        total.codr.index += r.codr.index;
        total.ucnn_bits += r.ucnn_bits;
        total.scnn_bits += r.scnn_bits;
        total.dense_bits += r.dense_bits;
    }

    OutputSet out;
    const auto bytes = to_codr_bytes(encoded);
    out.add("model.codr", std::string(bytes.begin(), bytes.end()));
    if (o.format == "json") {
        nlohmann::ordered_json j;
        j["tiling"] = to_json(run.cfg);
        j["layers"] = nlohmann::ordered_json::array();
        for (const auto& r : rows) j["layers"].push_back(to_json(r));
        auto t = to_json(total);
        t.erase("layer_id");
        t.erase("params");
        j["total"] = t;
        const auto codr = cost::make_metrics("codr", static_cast<double>(total.codr.total()));
        j["size_ratio_vs_codr"] = {
            {"ucnn", cost::to_json(cost::compare_designs(
                         codr, cost::make_metrics("ucnn", static_cast<double>(total.ucnn_bits))))["size_bits"]},
            {"scnn", cost::to_json(cost::compare_designs(
                         codr, cost::make_metrics("scnn", static_cast<double>(total.scnn_bits))))["size_bits"]},
            {"dense", cost::to_json(cost::compare_designs(
                          codr, cost::make_metrics("dense", static_cast<double>(total.dense_bits))))["size_bits"]}};
        out.add("compression.json", dump(j));
    } else {
        std::string csv = kCompressionCsvHeader;
        for (const auto& r : rows) csv += csv_row(r);
        out.add("compression.csv", csv);
    }
    out.write(o.out, log);
    for (const auto& r : rows) {
        log << "layer " << r.layer_id << ": codr " << r.codr.total() << " bits, ucnn " << r.ucnn_bits
            << ", scnn " << r.scnn_bits << ", dense " << r.dense_bits << '\n';
    }
    return kExitOk;
}

int cmd_simulate(const CommandOptions& o, std::ostream& log) {
    const auto run = load_run(o);
    if (!o.codr) throw ValidationError("simulate needs --codr");
    const auto table = load_costs(o);
    std::vector<rle::EncodedLayer> encoded;
    try {
        encoded = load_codr(*o.codr);
    } catch (const CorruptionError& e) {
        throw ValidationError(o.codr->string() + ": " + e.what());
    }

    OutputSet out;
    nlohmann::ordered_json layers_json = nlohmann::ordered_json::array();
    nlohmann::ordered_json energy_json = nlohmann::ordered_json::array();
    std::vector<std::pair<std::string, cost::EnergyReport>> energy_rows;
    sim::MemoryCounter total_counters;
    cost::EnergyReport total_energy;

    for (const auto& layer : run.layers) {
        const auto& enc = find_encoded(encoded, layer);
        const auto w = load_weights(o, layer, run.layers.size());
        const auto input = load_input(o, layer, run.layers.size());
        sim::SimOptions opts;
        opts.activation = layer.activation;
        sim::SimReport report;
        try {
            report = sim::run_layer(enc, input, w.bias(), layer.shape, run.cfg, opts);
        } catch (const CorruptionError& e) {
            throw ValidationError(e.what());
        }
        const auto energy = cost::energy_from_report(report.counters, table);
        auto lj = sim::to_json(report);
        lj["energy"] = cost::to_json(energy);
        layers_json.push_back(lj);
        energy_json.push_back({{"layer_id", layer.id}, {"energy", cost::to_json(energy)}});
        energy_rows.emplace_back(std::to_string(layer.id), energy);
        total_counters += report.counters;
        total_energy += energy;
        out.add(layer_file(layer.id, "output"), tensor_bytes(from_feature_map(report.output, layer.bit_width)));
        log << "layer " << layer.id << ": " << report.counters.alu_mults << " multiplications, "
            << format_double(energy.total_uj()) << " uJ\n";
    }
    energy_rows.emplace_back("total", total_energy);

    nlohmann::ordered_json sim;
    sim["tiling"] = to_json(run.cfg);
    sim["cost_table"] = cost::to_json(table);
    sim["layers"] = layers_json;
    sim["total"] = {{"counters", sim::to_json(total_counters)}, {"energy", cost::to_json(total_energy)}};
    out.add("sim_report.json", dump(sim));
    if (o.format == "json") {
        out.add("energy.json", dump({{"layers", energy_json}, {"total", cost::to_json(total_energy)}}));
    } else {
        out.add("energy.csv", energy_csv(energy_rows));
    }
    out.write(o.out, log);
    return kExitOk;
}

int cmd_verify(const CommandOptions& o, std::ostream& log) {
    const auto run = load_run(o);
    std::optional<std::vector<rle::EncodedLayer>> from_file;
    if (o.codr) {
        try {
            from_file = load_codr(*o.codr);
        } catch (const CorruptionError& e) {
            log << "FAIL " << o.codr->string() << ": " << e.what() << '\n';
            return kExitMismatch;
        }
    }

    int status = kExitOk;
    for (const auto& layer : run.layers) {
        const auto w = load_weights(o, layer, run.layers.size());
        const auto input = load_input(o, layer, run.layers.size());
        const auto expected = reference_output(input, w, layer);
        sim::SimOptions opts;
        opts.activation = layer.activation;

        sim::SimReport report;
        try {
            const auto enc = from_file ? find_encoded(*from_file, layer) : compress_layer(layer, w, run.cfg);
            report = sim::run_layer(enc, input, w.bias(), layer.shape, run.cfg, opts);
        } catch (const std::runtime_error& e) {
            // Input, bias and shape were validated above, so anything left is
            // the encoded data.
            if (!from_file) throw;
            log << "FAIL " << layer.label() << ": encoded data rejected: " << e.what() << '\n';
            status = kExitMismatch;
            continue;
        }
        auto mismatch = first_mismatch(report.accumulators, expected);
        if (!mismatch) mismatch = first_mismatch(report.output, saturate(expected, layer.bit_width));
        if (mismatch) {
            log << "FAIL " << layer.label() << ": " << mismatch->describe() << '\n';
            status = kExitMismatch;
        } else {
            log << "PASS " << layer.label() << ": " << expected.size() << " outputs match\n";
        }
    }
    return status;
}

int cmd_sweep(const CommandOptions& o, std::ostream& log) {
    const auto run = load_run(o);
    const auto table = load_costs(o);
    if (o.density.empty() || o.unique.empty()) throw ValidationError("sweep needs at least one density and unique count");
    for (const auto& layer : run.layers) {
        for (double d : o.density) {
            for (int u : o.unique) {
                SyntheticSpec spec{d, u, o.seed, layer.bit_width};
                try {
                    spec.validate();
                } catch (const ValidationError& e) {
                    throw ValidationError(layer.label() + ": " + e.what());
                }
            }
        }
    }

    struct Row {
        uint32_t layer_id;
        double density;
        int unique;
        int design;  // 0 codr, 1 ucnn, 2 scnn
        std::string text;
    };
    static const char* kDesigns[] = {"codr", "ucnn", "scnn"};
    std::vector<Row> rows;

    for (const auto& layer : run.layers) {
        const auto input = gen_synthetic_input(layer.shape, layer.bit_width, o.seed, layer.id);
        for (double d : o.density) {
            for (int u : o.unique) {
                const SyntheticSpec spec{d, u, o.seed, layer.bit_width};
                const auto w = gen_synthetic_weights(layer.shape, spec, layer.id);
                const auto sizes = measure_compression(layer, w, run.cfg);
                const auto enc = compress_layer(layer, w, run.cfg);
                sim::SimOptions opts;
                opts.activation = layer.activation;
                const auto report = sim::run_layer(enc, input, w.bias(), layer.shape, run.cfg, opts);
                const auto energy = cost::energy_from_report(report.counters, table);
                const auto& c = report.counters;
                using sim::Level;
                const uint64_t sram = c[Level::weight_sram].read_bits + c[Level::weight_sram].write_bits +
                                      c[Level::input_sram].read_bits + c[Level::input_sram].write_bits +
                                      c[Level::output_sram].read_bits + c[Level::output_sram].write_bits;
                const uint64_t bits[] = {sizes.codr.total(), sizes.ucnn_bits, sizes.scnn_bits};
                for (int design = 0; design < 3; ++design) {
                    std::ostringstream os;
                    os << layer.id << ',' << format_double(d) << ',' << u << ',' << kDesigns[design] << ','
                       << bits[design] << ','
                       << format_double(static_cast<double>(bits[design]) / static_cast<double>(sizes.weights))
                       << ',' << sizes.nonzero << ',' << sizes.unique_entries << ',';
                    if (design == 0) {
                        os << c.alu_mults << ',' << c[Level::weight_sram].read_bits << ','
                           << c[Level::input_sram].read_bits << ',' << c[Level::output_sram].write_bits << ','
                           << sram << ',' << report.dram.total() << ',' << format_double(energy.total_pj());
                    } else {
                        os << ",,,,,,";
                    }
                    rows.push_back({layer.id, d, u, design, os.str()});
                }
            }
        }
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.layer_id != b.layer_id) return a.layer_id < b.layer_id;
        if (a.density != b.density) return a.density > b.density;
        if (a.unique != b.unique) return a.unique > b.unique;
        return a.design < b.design;
    });

    std::string csv =
        "layer_id,density,unique,design,size_bits,bits_per_weight,nonzero_weights,unique_entries,alu_mults,"
        "weight_sram_read_bits,input_sram_read_bits,output_sram_write_bits,sram_bits,dram_bytes,energy_pj\n";
    for (const auto& r : rows) csv += r.text + "\n";
    OutputSet out;
    out.add("sweep.csv", csv);
    out.write(o.out, log);
    log << rows.size() << " sweep rows\n";
    return kExitOk;
}

}  // namespace codr
