#include <iostream>

#include "CLI11.hpp"
#include "codr/commands.hpp"

namespace {

struct Flags {
    std::string tiling, weights, input, costs, codr;
};

void add_common(CLI::App* cmd, codr::CommandOptions& o, Flags& f) {
    cmd->add_option("--layers", o.layers, "layer config JSON")->required();
    cmd->add_option("--tiling", f.tiling, "tiling config JSON");
    cmd->add_option("--seed", o.seed, "seed for generated weights and inputs");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "csv"}));
}

void add_tensors(CLI::App* cmd, Flags& f) {
    cmd->add_option("--weights", f.weights, "weight tensor file or directory of layer_<id>.weights.tnsr");
    cmd->add_option("--input", f.input, "input tensor file or directory of layer_<id>.input.tnsr");
}

void add_synthetic(CLI::App* cmd, codr::CommandOptions& o, bool lists) {
    auto* d = cmd->add_option("--density", o.density, "fraction of non-zero weights");
    auto* u = cmd->add_option("--unique", o.unique, "unique weight values, power of two");
    if (!lists) {
        d->expected(1);
        u->expected(1);
    }
}

std::optional<std::filesystem::path> opt(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return std::filesystem::path(s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CoDR weight compression and dataflow simulator"};
    app.require_subcommand(1);

    codr::CommandOptions o;
    Flags f;

    auto* gen = app.add_subcommand("gen-weights", "generate synthetic weights, bias and input tensors");
    add_common(gen, o, f);
    add_synthetic(gen, o, false);

    auto* enc = app.add_subcommand("encode", "compress weights into model.codr with a size report");
    add_common(enc, o, f);
    add_tensors(enc, f);
    add_synthetic(enc, o, false);

    auto* sim = app.add_subcommand("simulate", "run the dataflow simulator and cost model");
    add_common(sim, o, f);
    add_tensors(sim, f);
    add_synthetic(sim, o, false);
    sim->add_option("--codr", f.codr, "encoded model")->required();
    sim->add_option("--costs", f.costs, "cost table JSON");

    auto* ver = app.add_subcommand("verify", "compare the full pipeline with direct convolution");
    add_common(ver, o, f);
    add_tensors(ver, f);
    add_synthetic(ver, o, false);
    ver->add_option("--codr", f.codr, "check this encoded model instead of encoding in memory");

    auto* swp = app.add_subcommand("sweep", "sweep density and unique count over synthetic weights");
    add_common(swp, o, f);
    add_synthetic(swp, o, true);
    swp->add_option("--costs", f.costs, "cost table JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : codr::kExitInvalid;
    }

    o.tiling = opt(f.tiling);
    o.weights = opt(f.weights);
    o.input = opt(f.input);
    o.costs = opt(f.costs);
    o.codr = opt(f.codr);
    if (swp->parsed()) {
        if (swp->count("--density") == 0) o.density = {1.0, 0.55, 0.40, 0.25};
        if (swp->count("--unique") == 0) o.unique = {256, 64, 16};
    }

    try {
        if (gen->parsed()) return codr::cmd_gen_weights(o, std::cout);
        if (enc->parsed()) return codr::cmd_encode(o, std::cout);
        if (sim->parsed()) return codr::cmd_simulate(o, std::cout);
        if (ver->parsed()) return codr::cmd_verify(o, std::cout);
        return codr::cmd_sweep(o, std::cout);
    } catch (const std::exception& e) {
        // Validation, corruption and I/O failures all mean the inputs were unusable.
        std::cerr << "error: " << e.what() << '\n';
        return codr::kExitInvalid;
    }
}
