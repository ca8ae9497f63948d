#include "rcsim/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <ostream>
#include <sstream>
#include <thread>

#include "rcsim/errors.hpp"
#include "rcsim/event_engine.hpp"
#include "rcsim/host.hpp"

namespace rcsim {

double default_mean_idle(const RunConfig& cfg) {
    const double pages = std::ceil(static_cast<double>(cfg.workload.request_bytes) / cfg.geometry.page_size);
    return 2.0 * pages * static_cast<double>(cfg.timing.t_dma_in + cfg.timing.t_prog);
}

std::vector<IoRequest> build_workload(const RunConfig& cfg, std::uint64_t logical_bytes,
                                      std::vector<std::string>* warnings) {
    const auto& w = cfg.workload;
    if (w.source == "trace") {
        auto requests = load_trace(w.trace_path, warnings);
        validate_requests(requests, logical_bytes);
        return requests;
    }
    auto working_set = static_cast<std::uint64_t>(std::floor(static_cast<double>(logical_bytes) * w.working_set_fraction));
    working_set -= working_set % w.request_bytes;
    if (w.source == "append_random")
        return generate_append_random(working_set, w.requests, cfg.seed, w.overwrite_ratio, w.request_bytes);

    SyntheticProfile p;
    if (w.profile == "custom") {
        p.name = "custom";
        p.burst_fraction = w.burst_fraction;
    } else {
        p = profile_named(w.profile);
    }
    p.mean_idle = w.mean_idle > 0 ? w.mean_idle : default_mean_idle(cfg);
    p.working_set = working_set;
    p.skew = w.skew;
    p.request_bytes = w.request_bytes;
    p.phase_length = w.phase_length;
    p.seed = cfg.seed;
    return generate_synthetic(p, mix_named(w.mix), w.requests);
}

namespace {

MigrationCounts counts(const std::array<std::uint64_t, 2>& row) {
    return {row[static_cast<std::size_t>(MigrationMode::rcopyback)],
            row[static_cast<std::size_t>(MigrationMode::offchip)]};
}

}  // namespace

RunReport run(const RunConfig& cfg, RunArtifacts* artifacts, const std::vector<FtlObserver*>& observers) {
    cfg.validate();
    EngineConfig ecfg;
    ecfg.geometry = cfg.geometry;
    ecfg.timing = cfg.timing;
    ecfg.dram_ports = cfg.dram_ports;
    ecfg.record_log = cfg.record_event_log && artifacts != nullptr;
    EventEngine engine(ecfg);

    FtlConfig fcfg = cfg.ftl;
    fcfg.record_decisions = cfg.record_decisions && artifacts != nullptr;
    Ftl ftl(engine, fcfg, Reliability(cfg.error_model, cfg.retention_months));
    for (auto* o : observers) ftl.add_observer(o);
    if (cfg.age_pe_max > 0) ftl.age_blocks(cfg.age_pe_max, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    ftl.precondition(cfg.precondition);

    std::vector<std::string> warnings;
    auto requests = build_workload(cfg, ftl.logical_pages() * cfg.geometry.page_size, &warnings);
    const std::size_t n = requests.size();
    const auto steady_index = static_cast<std::size_t>(std::floor(cfg.warmup_fraction * static_cast<double>(n)));
    const bool phased = cfg.workload.source == "synthetic";
    const std::size_t snapshot_every = std::max<std::size_t>(1, n / 100);

    FtlStats at_steady;
    std::vector<std::uint64_t> idle_end;
    std::vector<Snapshot> snapshots;
    HostReplay::Options opts;
    opts.closed_loop = cfg.closed_loop;
    opts.on_issue = [&](std::size_t i) {
        if (i == steady_index) at_steady = ftl.stats();
        if (phased && i > 0 && i % cfg.workload.phase_length == 0)
            idle_end.push_back(ftl.count_blocks_with_counter(0));
        if (artifacts && i % snapshot_every == 0) snapshots.push_back(ftl.snapshot());
    };
    HostReplay host(engine, ftl, std::move(requests), opts);
    host.start();
    while (!host.finished()) {
        if (!engine.step())
            throw CapacityFault("simulation stalled at t=" + std::to_string(engine.now()) + " with " +
                                std::to_string(host.completed()) + " of " + std::to_string(n) +
                                " requests complete");
    }
    ftl.stop_background();
    engine.run();

    const auto& st = ftl.stats();
    RunReport r;
    r.variant = variant_name(cfg.ftl);
    r.name = cfg.name.empty() ? r.variant : cfg.name;
    r.seed = cfg.seed;
    r.requests = n;
    r.host_bytes_read = host.bytes_read();
    r.host_bytes_written = host.bytes_written();
    if (n > 0) {
        const SimTime start = host.issue_time(0);
        r.elapsed_us = host.last_completion() - start;
        if (r.elapsed_us > 0) {
            r.throughput_mbps = static_cast<double>(r.host_bytes_read + r.host_bytes_written) / r.elapsed_us;
            r.iops = static_cast<double>(n) * 1e6 / r.elapsed_us;
        }
    }
    r.warmup_fraction = cfg.warmup_fraction;
    if (steady_index < n) {
        for (std::size_t i = steady_index; i < n; ++i) r.steady_bytes += host.requests()[i].length;
        r.steady_elapsed_us = host.last_completion() - host.issue_time(steady_index);
        if (r.steady_elapsed_us > 0)
            r.steady_throughput_mbps = static_cast<double>(r.steady_bytes) / r.steady_elapsed_us;
        const auto cb = st.migrations_by_mode(MigrationMode::rcopyback) -
                        at_steady.migrations_by_mode(MigrationMode::rcopyback);
        const auto total = st.migrations_total() - at_steady.migrations_total();
        if (total > 0) r.steady_copyback_fraction = static_cast<double>(cb) / static_cast<double>(total);
    }

    r.host_pages_written = st.host_pages_written;
    r.host_pages_programmed = st.host_programs;
    r.nand_pages_programmed = st.nand_pages_programmed;
    r.erases = st.erases;
    if (st.host_programs > 0)
        r.waf = static_cast<double>(st.nand_pages_programmed) / static_cast<double>(st.host_programs);
    r.migrations = {st.migrations_by_mode(MigrationMode::rcopyback), st.migrations_by_mode(MigrationMode::offchip)};
    for (std::size_t k = 0; k < kJobKinds; ++k) {
        r.migrations_by_job[k] = counts(st.migrations[k]);
        r.victims_by_job[k] = counts(st.victims[k]);
    }
    r.decisions_rcopyback = st.decisions_rcopyback;
    r.decisions_offchip = st.decisions_offchip;
    r.mode_fallbacks = st.mode_fallbacks;
    const auto es = engine.stats();
    r.engine_copyback_ops = es.completed(NandOpKind::copyback);
    r.engine_offchip_ops = es.completed(NandOpKind::offchip_copy);

    r.histogram = ftl.migration_histogram();
    for (const auto& [k, v] : r.histogram) r.pages_migrated += v;
    if (cfg.ftl.effective_max_copyback() > 0)
        r.avoided_offchip_fraction = migration_histogram_analysis(r.histogram, cfg.ftl.effective_max_copyback());

    r.idle_end_samples = idle_end.size();
    if (!idle_end.empty()) {
        long double sum = 0;
        for (auto v : idle_end) sum += v;
        r.idle_end_counter0_blocks = static_cast<double>(sum / idle_end.size());
    }
    r.reads_checked = host.reads_checked();
    r.integrity_violations = host.integrity_violations();

    if (artifacts) {
        if (ecfg.record_log) {
            std::ostringstream log;
            engine.write_log_csv(log);
            artifacts->event_log_csv = log.str();
        }
        if (fcfg.record_decisions) {
            std::ostringstream log;
            log << "time,urgency,smoothed_u,mode\n";
            for (const auto& d : ftl.decisions())
                log << d.time << ',' << to_string(d.urgency) << ',' << d.smoothed_u << ',' << to_string(d.mode)
                    << '\n';
            artifacts->decision_log_csv = log.str();
        }
        artifacts->snapshots = std::move(snapshots);
        artifacts->idle_end_counter0 = std::move(idle_end);
        artifacts->warnings = std::move(warnings);
    }
    return r;
}

std::vector<RunReport> sweep(const RunConfig& base, const std::vector<std::string>& variants, unsigned threads) {
    if (variants.empty()) throw ConfigError("sweep needs at least one variant");
    std::vector<RunConfig> configs;
    for (const auto& v : variants) {
        RunConfig c = base;
        apply_variant(c.ftl, v);
        c.name = v;
        configs.push_back(std::move(c));
    }
    std::vector<RunReport> reports(configs.size());
    std::vector<std::exception_ptr> errors(configs.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(configs.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < configs.size();) {
            try {
                reports[i] = run(configs[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::size_t ref = 0;
    for (std::size_t i = 0; i < variants.size(); ++i)
        if (variants[i] == "baseline") {
            ref = i;
            break;
        }
    for (auto& r : reports) {
        r.normalized_against = reports[ref].name;
        if (reports[ref].throughput_mbps > 0) r.normalized_throughput = r.throughput_mbps / reports[ref].throughput_mbps;
    }
    return reports;
}

void write_snapshots_csv(std::ostream& out, const std::vector<Snapshot>& snapshots) {
    out << "time,free_blocks,utilization,smoothed_u,host_pages_written,nand_pages_programmed";
    for (std::size_t k = 0; k < kJobKinds; ++k)
        for (auto m : {MigrationMode::rcopyback, MigrationMode::offchip})
            out << ",victims_" << to_string(static_cast<JobKind>(k)) << '_' << to_string(m);
    out << ",slot_fill\n";
    for (const auto& s : snapshots) {
        out << s.time << ',' << s.free_blocks << ',' << s.utilization << ',' << s.smoothed_u << ','
            << s.host_pages_written << ',' << s.nand_pages_programmed << ',';
        for (const auto& row : s.victims) out << row[0] << ',' << row[1] << ',';
        for (std::size_t i = 0; i < s.slot_fill.size(); ++i) out << (i ? ";" : "") << s.slot_fill[i];
        out << '\n';
    }
}

}  // namespace rcsim
