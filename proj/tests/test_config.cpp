#include "doctest.h"

#include "jssr/config.hpp"
#include "jssr/error.hpp"

#include <filesystem>
#include <fstream>

using namespace jssr;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / ("jssr_cfg_" + name);
    std::ofstream(path) << text;
    return path;
}

} // namespace

TEST_CASE("named configs") {
    const ExperimentConfig desk = named_config("desk");
    CHECK(desk.N == 100);
    CHECK(desk.L() == 14);
    CHECK(desk.M == 4);
    CHECK(desk.G == 10);
    CHECK(desk.p == 0.1);
    CHECK(desk.p1_over_p2 == 3.0);
    CHECK(desk.sigma2 == 0.1);
    CHECK(desk.train == 20000);
    CHECK(desk.test == 2000);

    const ExperimentConfig full = named_config("paper-full");
    CHECK(full.N == 500);
    CHECK(full.L() == 70);
    CHECK(full.G == 50);
    CHECK(full.train == 90000);
    CHECK(full.L_over_N == desk.L_over_N);
    CHECK(static_cast<double>(full.N) / static_cast<double>(full.G) ==
          static_cast<double>(desk.N) / static_cast<double>(desk.G));
    CHECK(full.group().mean_activity() == doctest::Approx(desk.group().mean_activity()));
    CHECK(full.group().p1 / full.group().p2 == doctest::Approx(3.0));
    CHECK_THROWS_AS(named_config("huge"), ConfigError);
    CHECK(named_config_names().size() == 2);
}

TEST_CASE("set and get by key") {
    ExperimentConfig c;
    c.set("L_over_N", "0.2");
    CHECK(c.L() == 20);
    c.set("M", "8");
    CHECK(c.get("M") == 8.0);
    CHECK(c.get("p") == 0.1);
    CHECK_THROWS_AS(c.set("bogus", "1"), ConfigError);
    CHECK_THROWS_AS(c.set("M", "four"), ConfigError);
    CHECK_THROWS_AS(c.set("M", "4x"), ConfigError);
    CHECK_THROWS_AS(c.get("name"), ConfigError);
}

TEST_CASE("validation") {
    ExperimentConfig c;
    c.validate();
    c.M = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.L_over_N = 0.001;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.G = 7;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("save and load round trip") {
    ExperimentConfig c = named_config("paper-full");
    c.p = 0.123456789012345;
    c.seed = 18446744073709551615ULL;
    c.lr = 3e-4;
    const auto path = std::filesystem::temp_directory_path() / "jssr_cfg_roundtrip.ini";
    save_config(path, c);
    const ExperimentConfig back = load_config(path);
    CHECK(back.name == "paper-full");
    CHECK(back.N == c.N);
    CHECK(back.p == c.p);
    CHECK(back.seed == c.seed);
    CHECK(back.lr == c.lr);
    CHECK(back.lambda_k_min == c.lambda_k_min);
    std::filesystem::remove(path);
}

TEST_CASE("config file errors") {
    CHECK_THROWS_AS(load_config(write_temp("unknown.ini", "[signal]\nfoo = 1\n")), ConfigError);
    CHECK_THROWS_AS(load_config(write_temp("section.ini", "[samples]\nN = 10\n")), ConfigError);
    CHECK_THROWS_AS(load_config(write_temp("version.ini", "[config]\nversion = 9\n")), ConfigError);
    CHECK_THROWS_AS(load_config(write_temp("syntax.ini", "[signal\nN = 1\n")), ConfigError);
    const ExperimentConfig partial = load_config(write_temp("partial.ini", "[signal]\nM = 2\n"), named_config("desk"));
    CHECK(partial.M == 2);
    CHECK(partial.N == 100);
}
