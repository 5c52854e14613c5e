#include "tbp/errors.hpp"
#include "tbp/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

tbp::PipelineConfig load_config(const std::string &path, bool no_resume, int workers)
{
    tbp::PipelineConfig cfg =
        path.empty() ? tbp::PipelineConfig{} : tbp::PipelineConfig::from_json_file(path);
    if (no_resume) {
        cfg.resume = false;
    }
    if (workers > 0) {
        cfg.workers = workers;
    }
    return cfg;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Periodic-orbit search pipeline for the planar three-body problem"};
    app.require_subcommand(1);

    std::string config_path;
    bool no_resume = false;
    int workers = 0;
    app.add_option("-c,--config", config_path, "JSON config file");
    app.add_flag("--no-resume", no_resume, "ignore existing checkpoints");
    app.add_option("--workers", workers, "override worker count");

    auto *sc_scan = app.add_subcommand("scan", "grid scan for return candidates");
    auto *sc_refine = app.add_subcommand("refine", "correct candidates to periodic orbits");
    auto *sc_classify = app.add_subcommand("classify", "assign free-group words and powers");
    auto *sc_stability = app.add_subcommand("stability", "linear stability of catalog entries");
    auto *sc_dedup = app.add_subcommand("dedup", "group duplicate solutions by T*");
    auto *sc_run = app.add_subcommand("run", "scan + refine + classify + stability + dedup");

    auto *sc_export = app.add_subcommand("export", "export the catalog or one trajectory");
    std::string export_out = "table.tsv";
    std::string export_id;
    sc_export->add_option("-o,--out", export_out, "output file");
    sc_export->add_option("--trajectory", export_id, "solution id to export as a trajectory");

    auto *sc_verify = app.add_subcommand("verify", "re-polish a triplet across regimes");
    std::string v_vx, v_vy, v_T;
    sc_verify->add_option("--vx", v_vx)->required();
    sc_verify->add_option("--vy", v_vy)->required();
    sc_verify->add_option("--period", v_T)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        tbp::PipelineConfig cfg = load_config(config_path, no_resume, workers);
        if (sc_scan->parsed()) {
            return tbp::cmd_scan(cfg);
        }
        if (sc_refine->parsed()) {
            return tbp::cmd_refine(cfg);
        }
        if (sc_classify->parsed()) {
            return tbp::cmd_classify(cfg);
        }
        if (sc_stability->parsed()) {
            return tbp::cmd_stability(cfg);
        }
        if (sc_dedup->parsed()) {
            return tbp::cmd_dedup(cfg);
        }
        if (sc_run->parsed()) {
            return tbp::cmd_run(cfg);
        }
        if (sc_export->parsed()) {
            if (!export_id.empty()) {
                return tbp::cmd_export_trajectory(cfg, export_id, export_out);
            }
            return tbp::cmd_export_table(cfg, export_out);
        }
        if (sc_verify->parsed()) {
            tbp::VerifyOutcome out = tbp::verify_triplet(v_vx, v_vy, v_T, cfg.verify);
            if (!out.converged) {
                std::cout << "verify: diverged\n";
                return 1;
            }
            std::cout << "verify: agreed_digits=" << out.agreed_digits << "\n";
            for (const auto &t : out.triplets) {
                std::cout << t[0] << " " << t[1] << " " << t[2] << "\n";
            }
            return 0;
        }
    } catch (const tbp::io_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
