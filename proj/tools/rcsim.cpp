#include <CLI11.hpp>

#include <cmath>
#include <sstream>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "rcsim/config.hpp"
#include "rcsim/errors.hpp"
#include "rcsim/reliability.hpp"
#include "rcsim/report.hpp"
#include "rcsim/simulation.hpp"
#include "rcsim/workload.hpp"

namespace fs = std::filesystem;
using namespace rcsim;

namespace {

struct CommonOptions {
    std::string config;
    std::string trace;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::vector<std::string> settings;
};

void add_common(CLI::App* app, CommonOptions& o) {
    app->add_option("--config", o.config, "INI configuration file")->check(CLI::ExistingFile);
    app->add_option("--trace", o.trace, "replay this trace CSV instead of a generated workload")
        ->check(CLI::ExistingFile);
    app->add_option("--seed", o.seed, "random seed")->each([&o](const std::string&) { o.seed_given = true; });
    app->add_option("--set", o.settings, "override one field, e.g. --set ftl.buffer_pages=256");
}

RunConfig build_config(const CommonOptions& o) {
    RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
    for (const auto& s : o.settings) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
        apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    if (!o.trace.empty()) {
        cfg.workload.source = "trace";
        cfg.workload.trace_path = o.trace;
    }
    if (o.seed_given) cfg.seed = o.seed;
    return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw SimError("write to '" + path.string() + "' failed");
}

template <typename Fn>
void emit(const fs::path& path, Fn fn) {
    std::ostringstream s;
    fn(s);
    write_file(path, s.str());
}

void print_summary(const RunReport& r) {
    std::cout << r.name << ": " << r.throughput_mbps << " MB/s, " << r.iops << " IOPS, WAF " << r.waf
              << ", migrations " << r.migrations.total() << " (copyback " << r.migrations.copyback << ")";
    if (r.normalized_throughput) std::cout << ", normalized " << *r.normalized_throughput;
    std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rcsim: SSD simulator with restricted copyback"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    std::string run_out = "out";
    std::string run_variant;
    auto* run_cmd = app.add_subcommand("run", "simulate one configuration");
    add_common(run_cmd, run_opts);
    run_cmd->add_option("--out", run_out, "output directory");
    run_cmd->add_option("--variant", run_variant, "baseline, rcftl<M>, rcftl<M>_greedy or rcftl<M>--");
    bool event_log = false, decision_log = false;
    run_cmd->add_flag("--event-log", event_log, "write event_log.csv");
    run_cmd->add_flag("--decision-log", decision_log, "write decisions.csv");

    CommonOptions sweep_opts;
    std::string sweep_out = "out";
    std::vector<std::string> sweep_variants;
    unsigned threads = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "compare variants on one configuration");
    add_common(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--out", sweep_out, "output directory");
    sweep_cmd->add_option("--variant", sweep_variants, "variant to include (repeatable)")->required();
    sweep_cmd->add_option("--threads", threads, "parallel simulations (0 = all cores)");

    CommonOptions gen_opts;
    std::string gen_out = "trace.csv";
    auto* gen_cmd = app.add_subcommand("gen-trace", "write the configured workload as a trace CSV");
    add_common(gen_cmd, gen_opts);
    gen_cmd->add_option("--out", gen_out, "output file");

    std::string hist_path;
    std::uint32_t hist_n = 4;
    auto* hist_cmd = app.add_subcommand("analyze-histogram",
                                        "share of off-chip migrations avoidable with threshold n");
    hist_cmd->add_option("histogram", hist_path, "CSV of k,weight")->required()->check(CLI::ExistingFile);
    hist_cmd->add_option("-n,--threshold", hist_n, "copyback threshold");

    CommonOptions ct_opts;
    auto* ct_cmd = app.add_subcommand("print-ct-table", "print the copyback threshold table of the error model");
    add_common(ct_cmd, ct_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            RunConfig cfg = build_config(run_opts);
            if (!run_variant.empty()) apply_variant(cfg.ftl, run_variant);
            cfg.record_event_log = cfg.record_event_log || event_log;
            cfg.record_decisions = cfg.record_decisions || decision_log;
            RunArtifacts artifacts;
            const auto report = run(cfg, &artifacts);
            for (const auto& w : artifacts.warnings) std::cerr << "warning: " << w << '\n';
            fs::create_directories(run_out);
            const fs::path dir(run_out);
            emit(dir / "report.json", [&](std::ostream& o) { write_report_json(o, report); });
            emit(dir / "report.csv", [&](std::ostream& o) { write_report_csv(o, report); });
            emit(dir / "histogram.csv", [&](std::ostream& o) { write_histogram_csv(o, report.histogram); });
            emit(dir / "snapshots.csv", [&](std::ostream& o) { write_snapshots_csv(o, artifacts.snapshots); });
            emit(dir / "config.ini", [&](std::ostream& o) { write_config(o, cfg); });
            if (cfg.record_event_log) write_file(dir / "event_log.csv", artifacts.event_log_csv);
            if (cfg.record_decisions) write_file(dir / "decisions.csv", artifacts.decision_log_csv);
            print_summary(report);
        } else if (*sweep_cmd) {
            if (sweep_variants.size() < 2) throw ConfigError("sweep needs at least two --variant options");
            const RunConfig cfg = build_config(sweep_opts);
            const auto reports = sweep(cfg, sweep_variants, threads);
            fs::create_directories(sweep_out);
            const fs::path dir(sweep_out);
            emit(dir / "sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, reports); });
            for (const auto& r : reports) {
                emit(dir / (r.name + ".json"), [&](std::ostream& o) { write_report_json(o, r); });
                print_summary(r);
            }
        } else if (*gen_cmd) {
            const RunConfig cfg = build_config(gen_opts);
            cfg.validate();
            const auto logical_pages = static_cast<std::uint64_t>(
                std::floor(static_cast<double>(cfg.geometry.total_pages()) * cfg.ftl.logical_ratio));
            const auto requests = build_workload(cfg, logical_pages * cfg.geometry.page_size);
            emit(gen_out, [&](std::ostream& o) { write_trace(o, requests); });
            std::cout << requests.size() << " requests written to " << gen_out << '\n';
        } else if (*hist_cmd) {
            std::ifstream in(hist_path);
            const auto hist = parse_histogram(in);
            if (const auto f = migration_histogram_analysis(hist, hist_n))
                std::cout << "avoided_offchip_fraction," << *f << '\n';
            else
                std::cout << "avoided_offchip_fraction,not applicable (empty histogram)\n";
        } else if (*ct_cmd) {
            const RunConfig cfg = build_config(ct_opts);
            cfg.error_model.validate();
            derive_ct_from_model(cfg.error_model, cfg.retention_months).write_csv(std::cout);
        }
    } catch (const SimError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
