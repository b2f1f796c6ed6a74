#include "codr/config.hpp"

#include <fstream>
#include <set>

#include "codr/dataflow.hpp"
#include "codr/error.hpp"

namespace codr {

namespace {

nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

int get_int(const nlohmann::json& j, const char* key, int fallback, bool required, const std::string& where) {
    if (!j.contains(key)) {
        if (required) throw ValidationError(where + ": missing field '" + key + "'");
        return fallback;
    }
    if (!j.at(key).is_number_integer()) throw ValidationError(where + ": field '" + key + "' must be an integer");
    return j.at(key).get<int>();
}

}  // namespace

std::string LayerConfig::label() const {
    return "layer " + std::to_string(id) + (name.empty() ? "" : " (" + name + ")");
}

std::vector<LayerConfig> parse_layers(const nlohmann::json& j) {
    const nlohmann::json* list = &j;
    if (j.is_object()) {
        if (!j.contains("layers")) throw ValidationError("layer config has no 'layers' array");
        list = &j.at("layers");
    }
    if (!list->is_array() || list->empty()) throw ValidationError("layer config must list at least one layer");

    static const std::set<std::string> known = {"id",     "name",    "n_in",   "m_out", "k_rows",
                                                "k_cols", "in_rows", "in_cols", "stride", "pad",
                                                "activation", "bit_width"};
    std::vector<LayerConfig> layers;
    for (size_t i = 0; i < list->size(); ++i) {
        const auto& e = (*list)[i];
        const std::string where = "layer entry " + std::to_string(i);
        if (!e.is_object()) throw ValidationError(where + " is not an object");
        for (const auto& [key, _] : e.items()) {
            if (!known.count(key)) throw ValidationError(where + ": unknown field '" + key + "'");
        }
        LayerConfig l;
        l.id = static_cast<uint32_t>(get_int(e, "id", static_cast<int>(i), false, where));
        if (e.contains("name")) l.name = e.at("name").get<std::string>();
        l.shape.n_in = get_int(e, "n_in", 0, true, where);
        l.shape.m_out = get_int(e, "m_out", 0, true, where);
        l.shape.k_rows = get_int(e, "k_rows", 0, true, where);
        l.shape.k_cols = get_int(e, "k_cols", l.shape.k_rows, false, where);
        l.shape.in_rows = get_int(e, "in_rows", 0, true, where);
        l.shape.in_cols = get_int(e, "in_cols", l.shape.in_rows, false, where);
        l.shape.stride = get_int(e, "stride", 1, false, where);
        l.shape.pad = get_int(e, "pad", 0, false, where);
        l.bit_width = get_int(e, "bit_width", 8, false, where);
        if (e.contains("activation")) l.activation = parse_activation(e.at("activation").get<std::string>());
        try {
            l.shape.validate();
            validate_bit_width(l.bit_width);
        } catch (const ValidationError& err) {
            throw ValidationError(l.label() + ": " + err.what());
        }
        layers.push_back(std::move(l));
    }
    return layers;
}

std::vector<LayerConfig> load_layers(const std::filesystem::path& path) { return parse_layers(read_json(path)); }

TilingConfig parse_tiling(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("tiling config must be an object");
    static const std::set<std::string> known = {"t_pu", "t_m", "t_n", "t_ro", "t_co", "t_ri", "t_ci"};
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw ValidationError("tiling config: unknown field '" + key + "'");
    }
    TilingConfig cfg;
    const std::string where = "tiling config";
    cfg.t_pu = get_int(j, "t_pu", cfg.t_pu, false, where);
    cfg.t_m = get_int(j, "t_m", cfg.t_m, false, where);
    cfg.t_n = get_int(j, "t_n", cfg.t_n, false, where);
    cfg.t_ro = get_int(j, "t_ro", cfg.t_ro, false, where);
    cfg.t_co = get_int(j, "t_co", cfg.t_co, false, where);
    cfg.t_ri = get_int(j, "t_ri", cfg.t_ri, false, where);
    cfg.t_ci = get_int(j, "t_ci", cfg.t_ci, false, where);
    return cfg;
}

TilingConfig load_tiling(const std::filesystem::path& path) { return parse_tiling(read_json(path)); }

nlohmann::ordered_json to_json(const LayerConfig& l) {
    nlohmann::ordered_json j;
    j["id"] = l.id;
    if (!l.name.empty()) j["name"] = l.name;
    j["n_in"] = l.shape.n_in;
    j["m_out"] = l.shape.m_out;
    j["k_rows"] = l.shape.k_rows;
    j["k_cols"] = l.shape.k_cols;
    j["in_rows"] = l.shape.in_rows;
    j["in_cols"] = l.shape.in_cols;
    j["stride"] = l.shape.stride;
    j["pad"] = l.shape.pad;
    j["activation"] = to_string(l.activation);
    j["bit_width"] = l.bit_width;
    return j;
}

nlohmann::ordered_json to_json(const TilingConfig& c) {
    return {{"t_pu", c.t_pu}, {"t_m", c.t_m},   {"t_n", c.t_n},  {"t_ro", c.t_ro},
            {"t_co", c.t_co}, {"t_ri", c.t_ri}, {"t_ci", c.t_ci}};
}

void validate_run(const std::vector<LayerConfig>& layers, const TilingConfig& cfg) {
    std::set<uint32_t> ids;
    for (const auto& l : layers) {
        if (!ids.insert(l.id).second) throw ValidationError(l.label() + ": duplicate layer id");
        try {
            l.shape.validate();
            validate_bit_width(l.bit_width);
            cfg.validate_for(l.shape);
        } catch (const ValidationError& e) {
            throw ValidationError(l.label() + ": " + e.what());
        }
        // An Iteration holds every input channel's tile and T_PU*T_M output tiles.
        const auto bpf = static_cast<uint64_t>(sim::bytes_per_feature(l.bit_width));
        const uint64_t input_bytes = static_cast<uint64_t>(l.shape.n_in) * cfg.t_ri * cfg.t_ci * bpf;
        const uint64_t output_bytes = static_cast<uint64_t>(cfg.lanes_per_group()) * cfg.t_ro * cfg.t_co * bpf;
        if (input_bytes + output_bytes > kFeatureSramBytes) {
            throw ValidationError(l.label() + ": an Iteration needs " + std::to_string(input_bytes + output_bytes) +
                                  " bytes of feature SRAM, more than " + std::to_string(kFeatureSramBytes));
        }
    }
}

}  // namespace codr
