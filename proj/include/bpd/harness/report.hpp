#pragma once

/**
 * @file report.hpp
 * @brief Pass/fail checks and the report.json / metadata.json writers.
 *
 * report.json and the CSV tables are functions of the configuration alone.
 * Wall-clock time, host thread count and the command line go to
 * metadata.json so that reruns can be compared byte for byte.
 */

#include <bpd/core/errors.hpp>
#include <bpd/core/parallel.hpp>

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace bpd::harness {

/// Where a threshold comes from.
enum class ThresholdSource {
    /// a constant fixed by the theory (e.g. delta0 / (1 - delta0))
    proof_constant,
    /// a tolerance read from the configuration
    config_tolerance,
};

inline const char* to_string(ThresholdSource s) {
    return s == ThresholdSource::proof_constant ? "proof-constant" : "config-tolerance";
}

struct Check {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    /// "<=" or ">="
    std::string relation = "<=";
    ThresholdSource source = ThresholdSource::config_tolerance;
    bool pass = false;
    std::string detail;
};

inline Check check_le(std::string name, double measured, double threshold, ThresholdSource source,
                      std::string detail = {}) {
    return Check{std::move(name), measured, threshold, "<=", source, measured <= threshold, std::move(detail)};
}

inline Check check_ge(std::string name, double measured, double threshold, ThresholdSource source,
                      std::string detail = {}) {
    return Check{std::move(name), measured, threshold, ">=", source, measured >= threshold, std::move(detail)};
}

inline nlohmann::ordered_json number_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

struct Report {
    std::string command;
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    std::vector<Check> checks;
    std::vector<std::string> tables;
    std::vector<std::string> notes;

    bool passed() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return !checks.empty();
    }

    void add(Check c) { checks.push_back(std::move(c)); }
    void note(std::string s) { notes.push_back(std::move(s)); }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["passed"] = passed();
        j["summary"] = summary;
        auto arr = nlohmann::ordered_json::array();
        for (const auto& c : checks) {
            nlohmann::ordered_json e;
            e["name"] = c.name;
            e["pass"] = c.pass;
            e["measured"] = number_or_null(c.measured);
            e["relation"] = c.relation;
            e["threshold"] = number_or_null(c.threshold);
            e["threshold_source"] = to_string(c.source);
            if (!c.detail.empty()) e["detail"] = c.detail;
            arr.push_back(std::move(e));
        }
        j["checks"] = std::move(arr);
        j["tables"] = tables;
        j["notes"] = notes;
        return j;
    }
};

/// Output directory that remembers which tables were written.
class OutputDir {
public:
    explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw Error("cannot create output directory '" + dir_.string() + "': " + ec.message());
    }

    const std::filesystem::path& path() const noexcept { return dir_; }

    void write(const std::string& name, const std::string& body, Report* report = nullptr) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw Error("cannot write '" + (dir_ / name).string() + "'");
        out << body;
        if (report) report->tables.push_back(name);
    }

private:
    std::filesystem::path dir_;
};

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline void write_report(OutputDir& out, const Report& report, const std::vector<std::string>& argv,
                         double elapsed_seconds) {
    out.write("report.json", report.to_json().dump(2) + "\n");
    nlohmann::ordered_json meta;
    meta["command"] = report.command;
    meta["argv"] = argv;
    meta["finished_utc"] = utc_timestamp();
    meta["elapsed_seconds"] = elapsed_seconds;
    meta["threads"] = parallel::thread_count();
    out.write("metadata.json", meta.dump(2) + "\n");
}

}  // namespace bpd::harness
