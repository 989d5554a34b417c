#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "offlist/config.hpp"
#include "offlist/error.hpp"

using namespace offlist;

TEST_SUITE("config") {
  TEST_CASE("defaults") {
    const auto c = parse_config("");
    CHECK(c.similarity.message_weight == doctest::Approx(0.4));
    CHECK(c.similarity.threshold == doctest::Approx(0.8));
    CHECK_FALSE(c.since);
    CHECK_FALSE(c.until);
    CHECK(c.window_edge_margin.count() == 14);
    CHECK(c.owners.empty());
  }

  TEST_CASE("parse all sections") {
    const auto c = parse_config(
        "# comment\n"
        "[similarity]\nmessage_weight = 0.25\nthreshold = 0.9\n"
        "[filters]\nbot_patterns = a@*, *@b\npull_request_subject = [GIT PULL]\n"
        "[window]\nsince = 2019-01-01T00:00:00Z\nuntil = 2019-07-01T00:00:00+02:00\nedge_margin_days = 7\n"
        "[owners]\nemails = torvalds@*, , gregkh@*\n");
    CHECK(c.similarity.message_weight == doctest::Approx(0.25));
    CHECK(c.similarity.threshold == doctest::Approx(0.9));
    CHECK(c.noise.bot_patterns == std::vector<std::string>{"a@*", "*@b"});
    CHECK(c.noise.pull_request_subject_markers == std::vector<std::string>{"[GIT PULL]"});
    CHECK(format_rfc3339(*c.until) == "2019-06-30T22:00:00Z");
    CHECK(c.window_edge_margin.count() == 7);
    CHECK(c.owners == std::vector<std::string>{"torvalds@*", "gregkh@*"});
    const auto w = c.window();
    CHECK(w.start == *c.since);
    CHECK(w.end == *c.until);
  }

  TEST_CASE("bad configs") {
    CHECK_THROWS_AS(parse_config("[similarity]\nthreshhold = 0.8\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[similarity]\nthreshold = high\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[similarity]\nthreshold = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[similarity]\nmessage_weight = -0.1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("stray = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[window]\nsince = yesterday\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[window]\nsince = 2019-02-01T00:00:00Z\nuntil = 2019-01-01T00:00:00Z\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("[window]\nedge_margin_days = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[filters]\ncover_letter_regex = (\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[similarity\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/offlist.ini"), ConfigError);
  }

  TEST_CASE("echo and digest") {
    const auto a = parse_config("[similarity]\nthreshold = 0.8\n");
    const auto b = parse_config("");
    CHECK(config_echo(a) == config_echo(b));
    CHECK(config_digest(a) == config_digest(b));
    CHECK(config_digest(a).size() == 64);
    const auto echo = config_echo(a);
    CHECK(echo.find("similarity.threshold = 0.8\n") != std::string::npos);
    CHECK(echo.find("window.since = unbounded\n") != std::string::npos);
    const auto c = parse_config("[owners]\nemails = x@*\n");
    CHECK(config_digest(c) != config_digest(a));
    CHECK(config_echo(parse_config("[similarity]\nthreshold = 0.85\n")).find("threshold = 0.85") != std::string::npos);
  }

  TEST_CASE("owner file") {
    const auto path = std::filesystem::temp_directory_path() / "offlist-unit-owners.txt";
    std::ofstream(path) << "# maintainers\n\ntorvalds@*\n  gregkh@*  \n";
    CHECK(load_owner_file(path) == std::vector<std::string>{"torvalds@*", "gregkh@*"});
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_owner_file(path), ConfigError);
  }
}
