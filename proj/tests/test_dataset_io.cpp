#include "doctest.h"

#include "jssr/dataset_io.hpp"
#include "jssr/error.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>

using namespace jssr;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("jssr_test_" + name);
}

} // namespace

TEST_CASE("dataset round trip is bitwise") {
    const GroupSparsityConfig cfg{12, 3, 0.4, 0.2};
    const Dataset ds = generate_dataset(cfg, 3, 17, 42);
    const auto path = temp_file("roundtrip.bin");
    write_dataset(path, ds, 0.25);
    const DatasetFile back = read_dataset(path);
    CHECK(back.sigma2 == 0.25);
    CHECK(back.data.seed == 42);
    CHECK(back.data.M == 3);
    CHECK(back.data.cfg.G == 3);
    CHECK(back.data.cfg.p1 == 0.4);
    REQUIRE(back.data.size() == 17);
    for (std::size_t i = 0; i < 17; ++i) {
        CHECK(back.data.samples[i].X == ds.samples[i].X);
        CHECK(back.data.samples[i].activity == ds.samples[i].activity);
    }
    std::filesystem::remove(path);
}

TEST_CASE("streamed writer matches the in-memory writer") {
    const GroupSparsityConfig cfg{10, 5, 0.3, 0.3};
    const auto a = temp_file("mem.bin");
    const auto b = temp_file("stream.bin");
    write_dataset(a, generate_dataset(cfg, 2, 23, 8), 0.1);
    write_generated_dataset(b, cfg, 2, 23, 8, 0.1, 4);
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(fa)), {});
    const std::string sb((std::istreambuf_iterator<char>(fb)), {});
    CHECK(sa == sb);
    std::filesystem::remove(a);
    std::filesystem::remove(b);
}

TEST_CASE("header fields and payload size") {
    const GroupSparsityConfig cfg{6, 2, 0.5, 0.5};
    const auto path = temp_file("header.bin");
    write_dataset(path, generate_dataset(cfg, 2, 3, 1), 0.1);
    std::ifstream in(path, std::ios::binary);
    std::string line;
    std::getline(in, line);
    const auto h = nlohmann::json::parse(line);
    for (const char* key : {"version", "N", "M", "G", "p1", "p2", "sigma2", "count", "seed"}) CHECK(h.contains(key));
    CHECK(h.at("count") == 3);
    const auto header_bytes = static_cast<std::uintmax_t>(line.size() + 1);
    CHECK(std::filesystem::file_size(path) == header_bytes + 3 * (2 * 6 * 2 + 6) * 8);
    std::filesystem::remove(path);
}

TEST_CASE("corrupt files are rejected") {
    const auto path = temp_file("bad.bin");
    {
        std::ofstream out(path);
        out << "not json\n";
    }
    CHECK_THROWS_AS(read_dataset(path), FormatError);

    const GroupSparsityConfig cfg{6, 2, 0.5, 0.5};
    write_dataset(path, generate_dataset(cfg, 2, 2, 1), 0.1);
    std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
    CHECK_THROWS_AS(read_dataset(path), FormatError);
    CHECK_THROWS_AS(read_dataset(temp_file("missing.bin")), FormatError);
    std::filesystem::remove(path);
}
