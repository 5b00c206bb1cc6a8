#include "hetnet/report.hpp"

#include "hetnet/errors.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <map>
#include <system_error>

namespace hetnet {

namespace {

std::string num(double d) { return fmt::format("{}", d); }

std::string opt_num(const std::optional<double>& d) { return d ? num(*d) : std::string(); }

nlohmann::ordered_json opt_json(const std::optional<double>& d)
{
    return d ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(nullptr);
}

struct Curve
{
    std::string name;
    std::vector<std::pair<double, double>> points;
};

}  // namespace

std::string report_csv(const MetricsReport& report)
{
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : report.rows)
    {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.experiment, r.sweep_param, num(r.sweep_value),
                           to_string(r.run.algorithm), to_string(r.run.scheme), to_string(r.direction), r.seed_count,
                           opt_num(r.hpue_outage), opt_num(r.lpue_outage), num(r.agg_power), num(r.agg_throughput),
                           num(r.spectral_eff), num(r.convergence_rate));
    }
    return out;
}

std::string report_json(const MetricsReport& report)
{
    nlohmann::ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["experiment"] = report.experiment;

    const std::string text = emit_config(report.config);
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    {
        // Flatten the canonical text back into key -> value pairs.
        std::string section;
        std::size_t pos = 0;
        while (pos < text.size())
        {
            const auto end = text.find('\n', pos);
            const std::string line = text.substr(pos, end - pos);
            pos = end == std::string::npos ? text.size() : end + 1;
            if (line.empty())
                continue;
            if (line.front() == '[')
            {
                section = line.substr(1, line.size() - 2);
                continue;
            }
            const auto eq = line.find(" = ");
            const std::string key = section.empty() ? line.substr(0, eq) : section + "." + line.substr(0, eq);
            cfg[key] = line.substr(eq + 3);
        }
    }
    j["config"] = cfg;
    j["config_text"] = text;

    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : report.rows)
    {
        nlohmann::ordered_json row;
        row["experiment"] = r.experiment;
        row["sweep_param"] = r.sweep_param;
        row["sweep_value"] = r.sweep_value;
        row["algorithm"] = to_string(r.run.algorithm);
        row["scheme"] = to_string(r.run.scheme);
        row["direction"] = to_string(r.direction);
        row["seed_count"] = r.seed_count;
        row["hpue_outage"] = opt_json(r.hpue_outage);
        row["lpue_outage"] = opt_json(r.lpue_outage);
        row["agg_power_w"] = r.agg_power;
        row["agg_throughput_bps_hz"] = r.agg_throughput;
        row["spectral_eff_bps_hz"] = r.spectral_eff;
        row["convergence_rate"] = r.convergence_rate;
        row["lpue_outage_stderr"] = opt_json(r.lpue_outage_stderr);
        row["split_throughput_bps_hz"] = r.split_throughput;
        row["max_protection_ratio"] = opt_json(r.max_protection_ratio);
        row["seeds"] = r.seeds;
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out)
            throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

std::vector<std::filesystem::path> emit_report(const MetricsReport& report, const std::filesystem::path& out_dir)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir / "curves", ec);
    if (ec)
        throw IoError("cannot create output directory '" + out_dir.string() + "': " + ec.message());

    std::vector<std::filesystem::path> written;
    const auto csv = out_dir / "results.csv";
    write_file_atomic(csv, report_csv(report));
    written.push_back(csv);
    const auto json = out_dir / "summary.json";
    write_file_atomic(json, report_json(report));
    written.push_back(json);

    // One xy file per (algorithm, scheme, metric); std::map keeps the file order stable.
    std::map<std::string, Curve> curves;
    auto add = [&](const MetricsRow& r, std::string_view metric, std::optional<double> y) {
        if (!y)
            return;
        const std::string name =
            fmt::format("{}_{}_{}", to_string(r.run.algorithm), to_string(r.run.scheme), metric);
        auto& c = curves[name];
        c.name = std::string(metric);
        c.points.emplace_back(r.sweep_value, *y);
    };
    for (const auto& r : report.rows)
    {
        add(r, "hpue_outage", r.hpue_outage);
        add(r, "lpue_outage", r.lpue_outage);
        add(r, "agg_power_w", r.agg_power);
        add(r, "agg_throughput_bps_hz", r.agg_throughput);
        add(r, "spectral_eff_bps_hz", r.spectral_eff);
        add(r, "convergence_rate", r.convergence_rate);
    }
    for (const auto& [file, curve] : curves)
    {
        std::string text = fmt::format("# {} {}\n", report.rows.empty() ? "n_small" : report.rows.front().sweep_param,
                                       curve.name);
        for (const auto& [x, y] : curve.points)
            text += num(x) + " " + num(y) + "\n";
        const auto path = out_dir / "curves" / (file + ".xy");
        write_file_atomic(path, text);
        written.push_back(path);
    }
    return written;
}

}  // namespace hetnet
