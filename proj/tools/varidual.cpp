#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "varidual/runner.hpp"

namespace {

int runner_threads() {
    const char* env = std::getenv("VARIDUAL_THREADS");
    if (!env) return 1;
    int n = std::atoi(env);
    return n >= 1 ? n : 1;
}

struct LoadedConfig {
    varidual::ExperimentConfig cfg;
    std::string path;
};

bool load_configs(const std::vector<std::string>& paths, std::vector<LoadedConfig>* out) {
    bool ok = true;
    for (const std::string& p : paths) {
        varidual::ConfigParseResult res = varidual::parse_config_file(p);
        if (!res.ok()) {
            std::cerr << p << ": invalid config\n";
            for (const std::string& e : res.errors) std::cerr << "  " << e << "\n";
            ok = false;
            continue;
        }
        out->push_back({*res.config, p});
    }
    return ok;
}

// Independent experiments may run in parallel; each writes to its own
// output directory and the worst exit code wins.
template <class Fn>
int run_batch(const std::vector<LoadedConfig>& cfgs, Fn&& fn) {
    int limit = runner_threads();
    std::vector<int> codes(cfgs.size(), 0);
    std::size_t next = 0;
    while (next < cfgs.size()) {
        std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(limit), cfgs.size() - next);
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < batch; ++t) {
            std::size_t idx = next + t;
            pool.emplace_back([&, idx] { codes[idx] = fn(cfgs[idx]); });
        }
        for (auto& th : pool) th.join();
        next += batch;
    }
    int worst = 0;
    for (int c : codes) worst = std::max(worst, c);
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"varidual: discretised convex-duality experiments"};
    app.require_subcommand(1);

    std::vector<std::string> config_paths;
    std::string out_override;
    bool svg = false, dump_fields = false;

    auto add_common = [&](CLI::App* cmd, bool multi) {
        if (multi)
            cmd->add_option("--config", config_paths, "experiment config (TOML)")->required();
        else
            cmd->add_option("--config", config_paths, "experiment config (TOML)")->required()->expected(1);
        cmd->add_option("--out", out_override, "output directory override");
        cmd->add_flag("--svg", svg, "emit SVG plots");
        cmd->add_flag("--dump-fields", dump_fields, "dump per-j fields");
    };

    CLI::App* solve = app.add_subcommand("solve", "run the smoothing schedule");
    add_common(solve, true);
    CLI::App* verify = app.add_subcommand("verify", "certify solve artifacts");
    add_common(verify, false);
    CLI::App* table = app.add_subcommand("conjugate-table", "tabulate F, F*, F**, recession, F_j");
    add_common(table, false);
    CLI::App* bv = app.add_subcommand("bv-demo", "mollified-recovery convergence table");
    add_common(bv, false);
    app.add_subcommand("list-catalog", "list integrand kinds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : varidual::exit_code::usage;
    }

    if (app.got_subcommand("list-catalog")) return varidual::list_catalog(std::cout);

    std::vector<LoadedConfig> cfgs;
    if (!load_configs(config_paths, &cfgs)) return varidual::exit_code::usage;
    for (LoadedConfig& lc : cfgs) {
        if (svg) lc.cfg.svg = true;
        if (dump_fields) lc.cfg.dump_fields = true;
        if (!out_override.empty()) lc.cfg.csv_dir = out_override;
    }

    try {
        if (app.got_subcommand("solve"))
            return run_batch(cfgs, [](const LoadedConfig& lc) {
                return varidual::run_solve(lc.cfg, lc.cfg.csv_dir, std::cerr);
            });
        if (app.got_subcommand("verify"))
            return varidual::run_verify(cfgs[0].cfg, cfgs[0].cfg.csv_dir, std::cout, std::cerr);
        if (app.got_subcommand("conjugate-table"))
            return varidual::run_conjugate_table(cfgs[0].cfg, cfgs[0].cfg.csv_dir, std::cerr);
        if (app.got_subcommand("bv-demo")) return varidual::run_bv_demo(cfgs[0].cfg, cfgs[0].cfg.csv_dir, std::cerr);
    } catch (const varidual::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return varidual::exit_code::usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return varidual::exit_code::infeasible;
    }
    return varidual::exit_code::usage;
}
