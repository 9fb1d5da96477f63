#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;

namespace {

const char* cli_path() { return EVADE_CLI_PATH; }

struct TempDir {
    fs::path dir;
    TempDir() {
        dir = fs::temp_directory_path() / ("evade_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    fs::path operator/(const std::string& name) const { return dir / name; }
};

int run(const std::string& args, const fs::path& capture) {
    const std::string cmd =
        std::string("\"") + cli_path() + "\" " + args + " > \"" + capture.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// Small but complete run config: one short episode, a tiny network.
std::string tiny_config_json(int episodes, int max_steps) {
    std::ostringstream os;
    os << R"({
  "run_id": "tiny",
  "seed": 3,
  "episodes": )"
       << episodes << R"(,
  "max_steps": )"
       << max_steps << R"(,
  "dt_s": 0.05,
  "shield_on": true,
  "critical_distance_m": 0.05,
  "evader": {"start_x_m": 0.0, "start_y_m": 0.0, "speed_m_per_s": 0.1574},
  "obstacles": [{"x_m": 1.5, "y_m": 0.0, "vx_m_per_s": 0.02, "vy_m_per_s": 0.0}],
  "td3": {"batch_size": 4, "buffer_capacity": 64, "hidden": [8]},
  "training": {"warmup_steps": 0, "update_every_steps": 1,
               "eval_every_episodes": 1, "eval_episodes": 1,
               "checkpoint_every_episodes": 0}
})";
    return os.str();
}

} // namespace

TEST_CASE("version flag exits cleanly", "[cli]") {
    TempDir tmp;
    const auto out = tmp / "out.txt";
    CHECK(run("--version", out) == 0);
    CHECK_FALSE(slurp(out).empty());
}

TEST_CASE("a subcommand is required", "[cli]") {
    TempDir tmp;
    CHECK(run("", tmp / "out.txt") == 1);
}

TEST_CASE("train requires a config option", "[cli]") {
    TempDir tmp;
    const auto out = tmp / "out.txt";
    CHECK(run("train", out) == 1);
    CHECK_THAT(slurp(out), ContainsSubstring("--config"));
}

TEST_CASE("a missing config file is a validation failure", "[cli]") {
    TempDir tmp;
    const auto out = tmp / "out.txt";
    CHECK(run("train --config /nonexistent/nope.json", out) == 1);
    CHECK_THAT(slurp(out), ContainsSubstring("cannot open config file"));
}

TEST_CASE("an invalid config reports every problem and fails", "[cli]") {
    TempDir tmp;
    const auto cfg = tmp / "bad.json";
    std::ofstream(cfg) << R"({"run_id": "", "dt_s": -1, "typo": 5})";
    const auto out = tmp / "out.txt";
    CHECK(run("train --config \"" + cfg.string() + "\"", out) == 1);
    const std::string text = slurp(out);
    CHECK_THAT(text, ContainsSubstring("invalid config:"));
    CHECK_THAT(text, ContainsSubstring("unknown key 'typo'"));
    CHECK_THAT(text, ContainsSubstring("run_id"));
    CHECK_THAT(text, ContainsSubstring("dt_s"));
}

TEST_CASE("simulate writes a trajectory for a builtin policy", "[cli]") {
    TempDir tmp;
    const auto cfg = tmp / "sim.json";
    std::ofstream(cfg) << R"({
      "run_id": "sim", "seed": 5, "max_steps": 400,
      "target": {"fixed_m": [0.6, 0.4]},
      "obstacles": [{"x_m": 1.5, "y_m": 0.0, "vx_m_per_s": 0.02, "vy_m_per_s": 0.0}]
    })";
    const auto csv = tmp / "traj.csv";
    const auto out = tmp / "out.txt";
    const int code = run("simulate --config \"" + cfg.string() +
                             "\" --policy straight-to-target --output \"" + csv.string() + "\"",
                         out);
    CHECK(code == 0);
    CHECK_THAT(slurp(out), ContainsSubstring("outcome: reached-target"));
    const std::string body = slurp(csv);
    CHECK_THAT(body, ContainsSubstring("time,x_o,y_o,x_d,y_d,theta_d,x_c,y_c"));
    CHECK(body.find('\n') != std::string::npos);
}

TEST_CASE("simulate rejects an unknown builtin policy", "[cli]") {
    TempDir tmp;
    const auto cfg = tmp / "sim.json";
    std::ofstream(cfg) << R"({"run_id": "sim"})";
    const auto out = tmp / "out.txt";
    CHECK(run("simulate --config \"" + cfg.string() + "\" --policy teleport", out) == 1);
    CHECK_THAT(slurp(out), ContainsSubstring("straight-to-target"));
}

TEST_CASE("a missing checkpoint is a runtime failure", "[cli]") {
    TempDir tmp;
    const auto cfg = tmp / "sim.json";
    std::ofstream(cfg) << R"({"run_id": "sim"})";
    const auto out = tmp / "out.txt";
    const int code = run("simulate --config \"" + cfg.string() +
                             "\" --checkpoint /nonexistent/policy.ckpt",
                         out);
    CHECK(code == 2);
    CHECK_THAT(slurp(out), ContainsSubstring("error:"));
}

TEST_CASE("train, evaluate and report work end to end", "[cli]") {
    TempDir tmp;
    const auto cfg = tmp / "tiny.json";
    std::ofstream(cfg) << tiny_config_json(2, 40);
    const auto run_dir = tmp / "run_a";
    const auto out = tmp / "out.txt";

    REQUIRE(run("train --config \"" + cfg.string() + "\" --output \"" + run_dir.string() + "\"",
                out) == 0);
    for (const char* name : {"config.json", "reward_log.csv", "eval_log.csv", "summary.json",
                             "checkpoint_final.ckpt"}) {
        INFO(name);
        CHECK(fs::exists(run_dir / name));
    }
    CHECK(fs::exists(run_dir / "episodes" / "episode_000001.csv"));
    CHECK(fs::exists(run_dir / "episodes" / "episode_000002.csv"));

    SECTION("evaluate loads the checkpoint it trained") {
        const auto eval_dir = tmp / "eval";
        const int code = run("evaluate --config \"" + cfg.string() + "\" --checkpoint \"" +
                                 (run_dir / "checkpoint_final.ckpt").string() +
                                 "\" --episodes 3 --output \"" + eval_dir.string() + "\"",
                             out);
        CHECK(code == 0);
        CHECK(fs::exists(eval_dir / "eval_episodes.csv"));
        CHECK(fs::exists(eval_dir / "eval_summary.json"));
        CHECK_THAT(slurp(out), ContainsSubstring("eval episodes: 3"));
    }

    SECTION("evaluate refuses a checkpoint from another architecture") {
        const auto cfg16 = tmp / "tiny16.json";
        std::string body = tiny_config_json(1, 40);
        body.replace(body.find("[8]"), 3, "[16]");
        std::ofstream(cfg16) << body;
        const int code = run("evaluate --config \"" + cfg16.string() + "\" --checkpoint \"" +
                                 (run_dir / "checkpoint_final.ckpt").string() + "\"",
                             out);
        CHECK(code == 1);
        CHECK_THAT(slurp(out), ContainsSubstring("checkpoint"));
    }

    SECTION("report reads the run directory") {
        REQUIRE(run("report --run \"" + run_dir.string() + "\"", out) == 0);
        const std::string text = slurp(out);
        CHECK_THAT(text, ContainsSubstring("episodes: 2"));
        CHECK_THAT(text, ContainsSubstring("safety ratio:"));

        REQUIRE(run("report --run \"" + run_dir.string() + "\" --json", out) == 0);
        CHECK_THAT(slurp(out), ContainsSubstring("\"episodes\": 2"));
    }

    SECTION("a rerun reproduces the logs byte for byte") {
        const auto run_b = tmp / "run_b";
        REQUIRE(run("train --config \"" + cfg.string() + "\" --output \"" + run_b.string() + "\"",
                    out) == 0);
        CHECK(slurp(run_dir / "reward_log.csv") == slurp(run_b / "reward_log.csv"));
        CHECK(slurp(run_dir / "summary.json") == slurp(run_b / "summary.json"));
        CHECK(slurp(run_dir / "eval_log.csv") == slurp(run_b / "eval_log.csv"));
        CHECK(slurp(run_dir / "episodes" / "episode_000001.csv") ==
              slurp(run_b / "episodes" / "episode_000001.csv"));
    }
}

TEST_CASE("report on an empty directory lists the missing artifacts", "[cli]") {
    TempDir tmp;
    const auto out = tmp / "out.txt";
    CHECK(run("report --run \"" + tmp.dir.string() + "\"", out) == 1);
    CHECK_THAT(slurp(out), ContainsSubstring("missing run artifacts:"));
}

TEST_CASE("seed and shield overrides reach the run", "[cli]") {
    TempDir tmp;
    const auto cfg = tmp / "sim.json";
    std::ofstream(cfg) << R"({"run_id": "sim", "seed": 5, "max_steps": 30})";
    const auto csv_a = tmp / "a.csv";
    const auto csv_b = tmp / "b.csv";
    const auto out = tmp / "out.txt";
    REQUIRE(run("simulate --config \"" + cfg.string() + "\" --policy random --output \"" +
                    csv_a.string() + "\"",
                out) == 0);
    REQUIRE(run("simulate --config \"" + cfg.string() + "\" --policy random --seed 6 --output \"" +
                    csv_b.string() + "\"",
                out) == 0);
    CHECK(slurp(csv_a) != slurp(csv_b)); // different seed, different episode

    CHECK(run("simulate --config \"" + cfg.string() + "\" --shield maybe", out) == 1);
}
