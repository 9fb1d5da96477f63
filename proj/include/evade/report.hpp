#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "evade/env.hpp"

namespace evade {

class MissingArtifacts : public std::runtime_error {
public:
    explicit MissingArtifacts(std::vector<std::string> items)
        : std::runtime_error(join(items)), items_(std::move(items)) {}
    const std::vector<std::string>& items() const { return items_; }

private:
    static std::string join(const std::vector<std::string>& items) {
        std::string s = "missing run artifacts:";
        for (const auto& item : items) s += "\n  - " + item;
        return s;
    }
    std::vector<std::string> items_;
};

inline std::string format_percent(double ratio) {
    const double p = 100.0 * ratio;
    const double r = std::round(p);
    char buf[32];
    if (std::abs(p - r) < 1e-9) {
        std::snprintf(buf, sizeof(buf), "%.0f%%", r);
    } else {
        std::snprintf(buf, sizeof(buf), "%.2f%%", p);
    }
    return buf;
}

inline std::vector<double> moving_average(const std::vector<double>& series, std::size_t window) {
    std::vector<double> out;
    if (window == 0 || series.size() < window) return out;
    double sum = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        sum += series[i];
        if (i + 1 > window) sum -= series[i + 1 - window - 1];
        if (i + 1 >= window) out.push_back(sum / static_cast<double>(window));
    }
    return out;
}

struct RunReport {
    int episodes = 0;
    int safe_episodes = 0;
    double safety_ratio = 0.0;
    std::map<std::string, int> outcome_counts;
    double reached_rate = 0.0;
    long long total_steps = 0;
    long long corrected_steps = 0;
    long long infeasible_steps = 0;
    double min_h = 0.0;
    double deviation_mean = 0.0;
    std::optional<double> deviation_median; // carried by summary.json when present
    std::vector<double> reward_series;
    struct EvalPoint {
        int after_episode = 0;
        std::string outcome;
        bool safe = true;
        double total_reward = 0.0;
    };
    std::vector<EvalPoint> eval_series;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

inline std::map<std::string, std::size_t> csv_header_index(const std::string& header_line) {
    std::map<std::string, std::size_t> idx;
    const auto names = split_csv_line(header_line);
    for (std::size_t i = 0; i < names.size(); ++i) idx[names[i]] = i;
    return idx;
}

} // namespace detail

/// Builds the report purely from files in the run directory. reward_log.csv
/// is required; eval_log.csv and summary.json enrich the report when present.
inline RunReport build_report(const std::filesystem::path& run_dir) {
    const auto reward_log = run_dir / "reward_log.csv";
    if (!std::filesystem::exists(reward_log)) {
        throw MissingArtifacts({"reward_log.csv (required; written by the train command)",
                                "summary.json (optional; deviation median)",
                                "eval_log.csv (optional; evaluation returns)",
                                "config.json (optional; resolved run config)"});
    }

    RunReport report;
    for (Outcome o : {Outcome::ReachedTarget, Outcome::Captured, Outcome::Collided,
                      Outcome::Timeout}) {
        report.outcome_counts[to_string(o)] = 0;
    }
    double min_h = std::numeric_limits<double>::infinity();
    double deviation_sum = 0.0;
    {
        std::ifstream is(reward_log);
        std::string line;
        if (!std::getline(is, line)) throw MissingArtifacts({"reward_log.csv is empty"});
        const auto idx = detail::csv_header_index(line);
        for (const char* col : {"episode", "steps", "outcome", "safe", "corrected_steps",
                                "infeasible_steps", "deviation_sum", "min_h", "total_reward"}) {
            if (!idx.count(col)) {
                throw MissingArtifacts({std::string("reward_log.csv lacks column '") + col + "'"});
            }
        }
        int reached = 0;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            const auto f = detail::split_csv_line(line);
            if (f.size() < idx.size()) {
                throw MissingArtifacts({"reward_log.csv has a short row"});
            }
            ++report.episodes;
            const std::string outcome = f[idx.at("outcome")];
            report.outcome_counts[outcome] += 1;
            reached += outcome == to_string(Outcome::ReachedTarget) ? 1 : 0;
            report.safe_episodes += std::stoi(f[idx.at("safe")]) != 0 ? 1 : 0;
            report.total_steps += std::stoll(f[idx.at("steps")]);
            report.corrected_steps += std::stoll(f[idx.at("corrected_steps")]);
            report.infeasible_steps += std::stoll(f[idx.at("infeasible_steps")]);
            deviation_sum += std::stod(f[idx.at("deviation_sum")]);
            min_h = std::min(min_h, std::stod(f[idx.at("min_h")]));
            report.reward_series.push_back(std::stod(f[idx.at("total_reward")]));
        }
        if (report.episodes == 0) throw MissingArtifacts({"reward_log.csv has no episodes"});
        report.safety_ratio = static_cast<double>(report.safe_episodes) / report.episodes;
        report.reached_rate = static_cast<double>(reached) / report.episodes;
    }
    report.min_h = min_h;
    report.deviation_mean =
        report.corrected_steps > 0 ? deviation_sum / static_cast<double>(report.corrected_steps)
                                   : 0.0;

    const auto summary_path = run_dir / "summary.json";
    if (std::filesystem::exists(summary_path)) {
        std::ifstream is(summary_path);
        try {
            nlohmann::json j = nlohmann::json::parse(is);
            if (j.contains("deviation_median_rad")) {
                report.deviation_median = j.at("deviation_median_rad").get<double>();
            }
        } catch (const nlohmann::json::exception&) {
            // Damaged summary does not block the counts derived from the log.
        }
    }

    const auto eval_path = run_dir / "eval_log.csv";
    if (std::filesystem::exists(eval_path)) {
        std::ifstream is(eval_path);
        std::string line;
        if (std::getline(is, line)) {
            const auto idx = detail::csv_header_index(line);
            const bool usable = idx.count("after_episode") && idx.count("outcome") &&
                                idx.count("safe") && idx.count("total_reward");
            while (usable && std::getline(is, line)) {
                if (line.empty()) continue;
                const auto f = detail::split_csv_line(line);
                if (f.size() < idx.size()) continue;
                RunReport::EvalPoint p;
                p.after_episode = std::stoi(f[idx.at("after_episode")]);
                p.outcome = f[idx.at("outcome")];
                p.safe = std::stoi(f[idx.at("safe")]) != 0;
                p.total_reward = std::stod(f[idx.at("total_reward")]);
                report.eval_series.push_back(p);
            }
        }
    }
    return report;
}

inline nlohmann::json report_to_json(const RunReport& r) {
    nlohmann::json j;
    j["episodes"] = r.episodes;
    j["safe_episodes"] = r.safe_episodes;
    j["safety_ratio"] = r.safety_ratio;
    j["safety_ratio_percent"] = format_percent(r.safety_ratio);
    j["outcome_counts"] = r.outcome_counts;
    j["reached_rate"] = r.reached_rate;
    j["total_steps"] = r.total_steps;
    j["corrected_steps"] = r.corrected_steps;
    j["infeasible_steps"] = r.infeasible_steps;
    j["min_h"] = r.min_h;
    j["deviation_mean_rad"] = r.deviation_mean;
    if (r.deviation_median) j["deviation_median_rad"] = *r.deviation_median;
    j["reward_series"] = r.reward_series;
    j["eval_series"] = nlohmann::json::array();
    for (const auto& p : r.eval_series) {
        j["eval_series"].push_back({{"after_episode", p.after_episode},
                                    {"outcome", p.outcome},
                                    {"safe", p.safe},
                                    {"total_reward", p.total_reward}});
    }
    return j;
}

inline void print_report_text(std::ostream& os, const RunReport& r) {
    os << "episodes: " << r.episodes << "\n";
    os << "safe episodes: " << r.safe_episodes << "\n";
    os << "safety ratio: " << format_percent(r.safety_ratio) << "\n";
    os << "outcomes:";
    for (const auto& [name, count] : r.outcome_counts) os << " " << name << "=" << count;
    os << "\n";
    os << "reached-target rate: " << format_percent(r.reached_rate) << "\n";
    os << "total steps: " << r.total_steps << " (corrected: " << r.corrected_steps
       << ", infeasible: " << r.infeasible_steps << ")\n";
    os << "min barrier value: " << r.min_h << "\n";
    os << "mean shield deviation [rad]: " << r.deviation_mean;
    if (r.deviation_median) os << " (median: " << *r.deviation_median << ")";
    os << "\n";
    if (!r.reward_series.empty()) {
        os << "training return: first=" << r.reward_series.front()
           << " last=" << r.reward_series.back() << "\n";
        const auto ma = moving_average(r.reward_series, 20);
        if (!ma.empty()) {
            os << "training return MA(20): first=" << ma.front() << " last=" << ma.back() << "\n";
        }
    }
    if (!r.eval_series.empty()) {
        int reached = 0;
        for (const auto& p : r.eval_series) {
            reached += p.outcome == to_string(Outcome::ReachedTarget) ? 1 : 0;
        }
        os << "eval episodes: " << r.eval_series.size() << " (reached-target: " << reached
           << ")\n";
    }
}

} // namespace evade
