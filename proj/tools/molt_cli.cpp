#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "molt/molt.hpp"

namespace {

std::vector<double> parse_dt_list(const std::string& csv)
{
    std::vector<double> dts;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const auto comma = csv.find(',', start);
        const std::string tok = csv.substr(start, comma == std::string::npos
                                                      ? std::string::npos
                                                      : comma - start);
        if (!tok.empty()) {
            try {
                dts.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw molt::config_error("--dts: not a number: '" + tok + "'");
            }
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (dts.empty()) throw molt::config_error("--dts: empty list");
    return dts;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"molt: A-stable wave solver of order 2P on MOL^T recursive convolution"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;

    auto* solve = app.add_subcommand("solve", "run one simulation from a config file");
    solve->add_option("--config", config_path, "key = value configuration file")->required();
    solve->add_option("--out", out_dir, "output directory (overrides the config)");

    auto* study = app.add_subcommand("study", "parameter studies");
    study->require_subcommand(1);

    std::string dts_csv;
    auto* conv = study->add_subcommand("convergence", "time-step refinement table");
    conv->add_option("--config", config_path, "configuration file")->required();
    conv->add_option("--dts", dts_csv, "comma-separated time steps")->required();
    conv->add_option("--out", out_dir, "output directory");

    auto* aniso = study->add_subcommand("anisotropy", "point-source wavefront comparison P=1 vs P=2");
    aniso->add_option("--config", config_path, "configuration file")->required();
    aniso->add_option("--out", out_dir, "output directory");

    int stability_steps = 10000;
    auto* stab = study->add_subcommand("stability", "long-run amplitude check");
    stab->add_option("--config", config_path, "configuration file")->required();
    stab->add_option("--steps", stability_steps, "number of steps to march");
    stab->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        molt::RunConfig cfg = molt::load_config(config_path);
        const std::string out = out_dir.empty() ? cfg.out : out_dir;

        if (solve->parsed()) {
            const auto sum = molt::run_simulation(cfg, out);
            std::printf("final_time %.6g  steps %d  max|u| %.6g  wall %.3fs  per-step %.3gs\n",
                        sum.final_time, sum.steps, sum.max_abs_u, sum.wall_seconds,
                        sum.per_step_seconds);
        } else if (conv->parsed()) {
            const auto rows = molt::convergence_study(cfg, parse_dt_list(dts_csv), out);
            std::printf("%-12s %-14s %-8s %s\n", "dt", "error", "rate", "seconds");
            for (const auto& r : rows) {
                if (std::isnan(r.rate))
                    std::printf("%-12g %-14.6e %-8s %.3f\n", r.dt, r.error, "*", r.seconds);
                else
                    std::printf("%-12g %-14.6e %-8.3f %.3f\n", r.dt, r.error, r.rate, r.seconds);
            }
        } else if (aniso->parsed()) {
            const auto rep = molt::anisotropy_study(cfg, out);
            std::printf("t* %.6g  metric(P=1) %.6g  metric(P=2) %.6g  ratio %.4f\n", rep.t_star,
                        rep.metric_p1, rep.metric_p2,
                        rep.metric_p1 > 0 ? rep.metric_p2 / rep.metric_p1 : 0.0);
        } else if (stab->parsed()) {
            const auto rep = molt::stability_study(cfg, stability_steps, out);
            std::printf("steps %d  max|u^n|/max|u^0| %.6g  final %.6g\n", rep.steps, rep.ratio(),
                        rep.final_max);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
