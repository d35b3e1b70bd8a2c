#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hyprec/cli/commands.hpp"
#include "hyprec/io/tensorpack.hpp"
#include "hyprec/util/errors.hpp"

using namespace hyprec;

namespace {

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

std::string pick_output(const std::string& flag, const cli::RunConfig& cfg) {
    return flag.empty() ? cfg.output : flag;
}

bool all_converged(const std::vector<cli::StudyRow>& rows) {
    for (const auto& r : rows)
        if (!r.stats.all_converged()) return false;
    return true;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid neural-operator / iterative preconditioning toolkit"};
    app.require_subcommand(1);

    std::string config, output, dataset, out_path;
    std::size_t samples = 2500, max_samples = 0;
    std::uint64_t seed = 0;
    double tol = 1e-10;

    auto* solve = app.add_subcommand("solve", "Solve once per seed and report iterations as CSV");
    solve->add_option("-c,--config", config, "Run configuration (JSON)")->required();
    solve->add_option("-o,--output", output, "CSV destination (default: config 'output' or stdout)");

    auto* gen = app.add_subcommand("gen-dataset", "Sample problems and store exact solutions");
    gen->add_option("-c,--config", config, "Configuration with a 'problem' section")->required();
    gen->add_option("-n,--samples", samples, "Number of samples")->capture_default_str();
    gen->add_option("-s,--seed", seed, "Base seed")->capture_default_str();
    gen->add_option("-o,--out", out_path, "TensorPack destination")->required();

    auto* eig = app.add_subcommand("eigen-study", "Per-mode error amplification of I - A M");
    eig->add_option("-c,--config", config, "Run configuration (JSON)")->required();
    eig->add_option("-o,--output", output, "CSV destination");

    auto* mg = app.add_subcommand("mg-study", "Iterations per multigrid smoothing schedule");
    mg->add_option("-c,--config", config, "Run configuration (JSON)")->required();
    mg->add_option("-o,--output", output, "CSV destination");

    auto* as = app.add_subcommand("asm-study", "Iterations per subdomain count and coarse space");
    as->add_option("-c,--config", config, "Run configuration (JSON)")->required();
    as->add_option("-o,--output", output, "CSV destination");

    auto* ver = app.add_subcommand("verify-dataset", "Audit stored targets against the sampled systems");
    ver->add_option("-d,--dataset", dataset, "TensorPack written by gen-dataset")->required();
    ver->add_option("-m,--max-samples", max_samples, "Check only the first m samples (0 = all)");
    ver->add_option("-t,--tol", tol, "Relative residual bound")->capture_default_str();

    auto* dump = app.add_subcommand("dump-basis", "Write the TB coarse basis as a TensorPack");
    dump->add_option("-c,--config", config, "Configuration whose 'preconditioner' is a tb_* expression")
        ->required();
    dump->add_option("-s,--seed", seed, "Seed for problem and column selection");
    dump->add_option("-o,--out", out_path, "TensorPack destination")->required();

    auto* dprob = app.add_subcommand("dump-problem", "Write the assembled system as a TensorPack");
    dprob->add_option("-c,--config", config, "Configuration with a 'problem' section")->required();
    dprob->add_option("-s,--seed", seed, "Problem seed");
    dprob->add_option("-o,--out", out_path, "TensorPack destination")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            const auto cfg = cli::load_config(config);
            const auto stats = cli::run_seeds(cfg, cfg.preconditioner);
            emit(cli::format_solve_csv(cfg, cfg.preconditioner, stats), pick_output(output, cfg));
            return stats.all_converged() ? 0 : 1;
        }
        if (*gen) {
            const auto cfg = cli::load_config(config);
            cli::generate_dataset(cfg.problem, samples, seed).save(out_path);
            return 0;
        }
        if (*eig) {
            const auto cfg = cli::load_config(config);
            emit(cli::format_eigen_csv(cli::run_eigen_study(cfg)), pick_output(output, cfg));
            return 0;
        }
        if (*mg) {
            const auto cfg = cli::load_config(config);
            const auto rows = cli::run_mg_study(cfg);
            emit(cli::format_mg_csv(rows), pick_output(output, cfg));
            return all_converged(rows) ? 0 : 1;
        }
        if (*as) {
            const auto cfg = cli::load_config(config);
            const auto rows = cli::run_asm_study(cfg);
            emit(cli::format_asm_csv(rows), pick_output(output, cfg));
            return all_converged(rows) ? 0 : 1;
        }
        if (*ver) {
            const auto r = cli::verify_dataset(io::TensorPack::load(dataset), max_samples, tol);
            std::cout << "checked=" << r.checked << " max_rel_residual=" << format_double(r.max_rel_residual)
                      << " rhs_mismatches=" << r.rhs_mismatches << " " << (r.ok ? "OK" : "FAILED") << "\n";
            return r.ok ? 0 : 1;
        }
        if (*dump) {
            cli::dump_basis(cli::load_config(config), seed).save(out_path);
            return 0;
        }
        if (*dprob) {
            const auto cfg = cli::load_config(config);
            fem::ProblemFactory factory(cfg.problem);
            cli::problem_to_tensorpack(cli::problem_for_seed(factory, seed)).save(out_path);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
