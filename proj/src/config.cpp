#include "rcsim/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "rcsim/errors.hpp"

namespace rcsim {

namespace {

template <typename T>
T parse_as(const std::string& key, const std::string& text) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end)
        throw ConfigError(key + ": cannot parse '" + text + "'");
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError(key + ": expected a boolean, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

template <typename T>
std::string join_list(const std::vector<T>& v) {
    std::ostringstream out;
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
    return out.str();
}

std::string format_double(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

struct Field {
    std::function<void(RunConfig&, const std::string& key, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename T, typename Access>
Field numeric(Access access) {
    return {[access](RunConfig& c, const std::string& k, const std::string& v) { access(c) = parse_as<T>(k, v); },
            [access](const RunConfig& c) {
                if constexpr (std::is_floating_point_v<T>)
                    return format_double(access(c));
                else
                    return std::to_string(access(c));
            }};
}

template <typename Access>
Field boolean(Access access) {
    return {[access](RunConfig& c, const std::string& k, const std::string& v) { access(c) = parse_bool(k, v); },
            [access](const RunConfig& c) {
                return std::string(access(c) ? "true" : "false");
            }};
}

template <typename Access>
Field text(Access access) {
    return {[access](RunConfig& c, const std::string&, const std::string& v) { access(c) = v; },
            [access](const RunConfig& c) { return access(c); }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> table = {
        {"geometry.channels", numeric<std::uint32_t>([](auto& c) -> auto& { return c.geometry.channels; })},
        {"geometry.chips_per_channel", numeric<std::uint32_t>([](auto& c) -> auto& { return c.geometry.chips_per_channel; })},
        {"geometry.planes_per_chip", numeric<std::uint32_t>([](auto& c) -> auto& { return c.geometry.planes_per_chip; })},
        {"geometry.blocks_per_plane", numeric<std::uint32_t>([](auto& c) -> auto& { return c.geometry.blocks_per_plane; })},
        {"geometry.pages_per_block", numeric<std::uint32_t>([](auto& c) -> auto& { return c.geometry.pages_per_block; })},
        {"geometry.page_size", numeric<std::uint32_t>([](auto& c) -> auto& { return c.geometry.page_size; })},

        {"timing.t_read", numeric<SimTime>([](auto& c) -> auto& { return c.timing.t_read; })},
        {"timing.t_prog", numeric<SimTime>([](auto& c) -> auto& { return c.timing.t_prog; })},
        {"timing.t_erase", numeric<SimTime>([](auto& c) -> auto& { return c.timing.t_erase; })},
        {"timing.t_dma_out", numeric<SimTime>([](auto& c) -> auto& { return c.timing.t_dma_out; })},
        {"timing.t_dma_in", numeric<SimTime>([](auto& c) -> auto& { return c.timing.t_dma_in; })},

        {"engine.dram_ports", numeric<std::uint32_t>([](auto& c) -> auto& { return c.dram_ports; })},

        {"ftl.variant",
         {[](RunConfig& c, const std::string&, const std::string& v) { apply_variant(c.ftl, v); },
          [](const RunConfig& c) { return variant_name(c.ftl); }}},
        {"ftl.logical_ratio", numeric<double>([](auto& c) -> auto& { return c.ftl.logical_ratio; })},
        {"ftl.buffer_pages", numeric<std::uint32_t>([](auto& c) -> auto& { return c.ftl.buffer_pages; })},
        {"ftl.fg_watermark", numeric<std::uint32_t>([](auto& c) -> auto& { return c.ftl.fg_watermark; })},
        {"ftl.bg_watermark", numeric<std::uint32_t>([](auto& c) -> auto& { return c.ftl.bg_watermark; })},
        {"ftl.host_reserve", numeric<std::uint32_t>([](auto& c) -> auto& { return c.ftl.host_reserve; })},
        {"ftl.bg_idle_threshold", numeric<SimTime>([](auto& c) -> auto& { return c.ftl.bg_idle_threshold; })},
        {"ftl.wl_gap", numeric<std::uint32_t>([](auto& c) -> auto& { return c.ftl.wl_gap; })},
        {"ftl.u_threshold", numeric<double>([](auto& c) -> auto& { return c.ftl.u_threshold; })},
        {"ftl.host_programs_per_plane", numeric<std::uint32_t>([](auto& c) -> auto& { return c.ftl.host_programs_per_plane; })},

        {"reliability.retention_months", numeric<double>([](auto& c) -> auto& { return c.retention_months; })},
        {"reliability.bucket_upper",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.error_model.bucket_upper.clear();
              for (const auto& s : split_list(v)) c.error_model.bucket_upper.push_back(parse_as<std::uint32_t>(k, s));
          },
          [](const RunConfig& c) { return join_list(c.error_model.bucket_upper); }}},
        {"reliability.bucket_delta",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.error_model.bucket_delta.clear();
              for (const auto& s : split_list(v)) c.error_model.bucket_delta.push_back(parse_as<double>(k, s));
          },
          [](const RunConfig& c) {
              std::vector<std::string> parts;
              for (double d : c.error_model.bucket_delta) parts.push_back(format_double(d));
              return join_list(parts);
          }}},
        {"reliability.delta_beyond", numeric<double>([](auto& c) -> auto& { return c.error_model.delta_beyond; })},
        {"reliability.base_intercept", numeric<double>([](auto& c) -> auto& { return c.error_model.base_intercept; })},
        {"reliability.base_per_kcycle", numeric<double>([](auto& c) -> auto& { return c.error_model.base_per_kcycle; })},
        {"reliability.base_per_month", numeric<double>([](auto& c) -> auto& { return c.error_model.base_per_month; })},
        {"reliability.ecc_capacity", numeric<double>([](auto& c) -> auto& { return c.error_model.ecc_capacity; })},

        {"workload.source", text([](auto& c) -> auto& { return c.workload.source; })},
        {"workload.trace_path", text([](auto& c) -> auto& { return c.workload.trace_path; })},
        {"workload.profile", text([](auto& c) -> auto& { return c.workload.profile; })},
        {"workload.burst_fraction", numeric<double>([](auto& c) -> auto& { return c.workload.burst_fraction; })},
        {"workload.mix", text([](auto& c) -> auto& { return c.workload.mix; })},
        {"workload.requests", numeric<std::uint64_t>([](auto& c) -> auto& { return c.workload.requests; })},
        {"workload.request_bytes", numeric<std::uint32_t>([](auto& c) -> auto& { return c.workload.request_bytes; })},
        {"workload.working_set_fraction", numeric<double>([](auto& c) -> auto& { return c.workload.working_set_fraction; })},
        {"workload.skew", numeric<double>([](auto& c) -> auto& { return c.workload.skew; })},
        {"workload.mean_idle", numeric<double>([](auto& c) -> auto& { return c.workload.mean_idle; })},
        {"workload.phase_length", numeric<std::uint32_t>([](auto& c) -> auto& { return c.workload.phase_length; })},
        {"workload.overwrite_ratio", numeric<double>([](auto& c) -> auto& { return c.workload.overwrite_ratio; })},

        {"run.name", text([](auto& c) -> auto& { return c.name; })},
        {"run.seed", numeric<std::uint64_t>([](auto& c) -> auto& { return c.seed; })},
        {"run.precondition", numeric<double>([](auto& c) -> auto& { return c.precondition; })},
        {"run.age_pe_max", numeric<std::uint32_t>([](auto& c) -> auto& { return c.age_pe_max; })},
        {"run.closed_loop", boolean([](auto& c) -> auto& { return c.closed_loop; })},
        {"run.warmup_fraction", numeric<double>([](auto& c) -> auto& { return c.warmup_fraction; })},
        {"run.record_event_log", boolean([](auto& c) -> auto& { return c.record_event_log; })},
        {"run.record_decisions", boolean([](auto& c) -> auto& { return c.record_decisions; })},
    };
    return table;
}

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& [name, field] : fields()) {
        if (name == key) {
            field.set(cfg, key, value);
            return;
        }
    }
    throw ConfigError("unknown configuration key '" + key + "'");
}

RunConfig parse_config(std::istream& in) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("config: " + std::string(e.message()) + " at line " + std::to_string(e.line()));
    }
    RunConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError("config key '" + section + "' is outside any section");
        for (const auto& [key, value] : body) apply_setting(cfg, section + "." + key, value.data());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return parse_config(in);
}

void write_config(std::ostream& out, const RunConfig& cfg) {
    std::string section;
    for (const auto& [name, field] : fields()) {
        const auto dot = name.find('.');
        const auto s = name.substr(0, dot);
        if (s != section) {
            out << (section.empty() ? "" : "\n") << '[' << s << "]\n";
            section = s;
        }
        out << name.substr(dot + 1) << " = " << field.get(cfg) << '\n';
    }
}

void apply_variant(FtlConfig& ftl, const std::string& variant) {
    if (variant == "baseline") {
        ftl.variant = FtlVariant::baseline;
        return;
    }
    std::string rest;
    if (variant.rfind("rcftl", 0) == 0) rest = variant.substr(5);
    FtlVariant kind = FtlVariant::rcftl;
    if (rest.size() > 7 && rest.ends_with("_greedy")) {
        kind = FtlVariant::rcftl_greedy;
        rest.resize(rest.size() - 7);
    } else if (rest.size() > 2 && rest.ends_with("--")) {
        kind = FtlVariant::rcftl_greedy;
        rest.resize(rest.size() - 2);
    }
    std::uint32_t m = 0;
    const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), m);
    if (rest.empty() || ec != std::errc{} || ptr != rest.data() + rest.size() || m == 0 || m > 7)
        throw ConfigError("unknown variant '" + variant +
                          "' (baseline, rcftl<M>, rcftl<M>_greedy or rcftl<M>-- with M in 1..7)");
    ftl.variant = kind;
    ftl.max_copyback = m;
}

std::string variant_name(const FtlConfig& ftl) {
    switch (ftl.variant) {
        case FtlVariant::baseline: return "baseline";
        case FtlVariant::rcftl: return "rcftl" + std::to_string(ftl.max_copyback);
        case FtlVariant::rcftl_greedy: return "rcftl" + std::to_string(ftl.max_copyback) + "_greedy";
    }
    return "?";
}

void RunConfig::validate() const {
    validate_geometry(geometry);
    validate_timing(timing);
    if (dram_ports == 0) throw ConfigError("engine.dram_ports must be >= 1");
    ftl.validate(geometry);
    error_model.validate();
    if (!(retention_months > 0)) throw ConfigError("reliability.retention_months must be > 0");
    if (!(precondition >= 0.0 && precondition <= 1.0)) throw ConfigError("run.precondition must lie in [0, 1]");
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0))
        throw ConfigError("run.warmup_fraction must lie in [0, 1)");
    if (workload.source != "synthetic" && workload.source != "append_random" && workload.source != "trace")
        throw ConfigError("workload.source must be synthetic, append_random or trace");
    if (workload.source == "trace" && workload.trace_path.empty())
        throw ConfigError("workload.trace_path is required when workload.source = trace");
    if (!(workload.working_set_fraction > 0.0 && workload.working_set_fraction <= 1.0))
        throw ConfigError("workload.working_set_fraction must lie in (0, 1]");
    if (workload.request_bytes == 0 || workload.request_bytes % 512 != 0)
        throw ConfigError("workload.request_bytes must be a positive multiple of 512");
}

}  // namespace rcsim
