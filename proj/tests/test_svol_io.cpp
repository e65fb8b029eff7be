#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "gvfseg/svol_io.hpp"

using namespace gvfseg;
namespace fs = std::filesystem;

namespace {

fs::path tmp_file(const std::string& name) {
    auto dir = fs::temp_directory_path() / "gvfseg_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

void write_raw(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("f32 volume round trips bit-exact") {
    GridShape shape(3, 4, 2, 0.5, 1.25, 2.0);
    ScalarVolume vol(shape);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<float> u(-5.0f, 5.0f);
    for (auto& v : vol.data) v = u(rng);

    auto p = tmp_file("roundtrip.svol");
    write_volume(vol, p.string());
    AnyVolume back = read_volume(p.string());
    REQUIRE(back.dtype == VolumeDtype::F32);
    CHECK(back.scalar.shape.ndim == 3);
    CHECK(back.scalar.shape.dims == shape.dims);
    CHECK(back.scalar.shape.spacing == shape.spacing);
    CHECK(back.scalar.data == vol.data);
}

TEST_CASE("u8 volume round trips") {
    GridShape shape(5, 6);
    LabelVolume vol(shape);
    for (std::size_t i = 0; i < vol.data.size(); ++i) vol[i] = static_cast<std::uint8_t>(i % 7);
    auto p = tmp_file("labels.svol");
    write_volume(vol, p.string());
    AnyVolume back = read_volume(p.string());
    REQUIRE(back.dtype == VolumeDtype::U8);
    CHECK(back.label.data == vol.data);
    CHECK(back.label.shape.same_grid(shape));
}

TEST_CASE("as_label refuses f32, as_scalar converts u8") {
    LabelVolume vol(GridShape(2, 2));
    vol[3] = 9;
    auto p = tmp_file("conv.svol");
    write_volume(vol, p.string());
    AnyVolume any = read_volume(p.string());
    ScalarVolume s = any.as_scalar();
    CHECK(s[3] == doctest::Approx(9.0));

    ScalarVolume f(GridShape(2, 2));
    auto pf = tmp_file("conv_f.svol");
    write_volume(f, pf.string());
    CHECK_THROWS_AS(read_volume(pf.string()).as_label(), std::runtime_error);
}

TEST_CASE("malformed headers report path and line") {
    auto p = tmp_file("bad_magic.svol");
    write_raw(p, "svol 2\ndims: 2 2\nspacing: 1 1\ndtype: u8\ndata:\nabcd");
    CHECK_THROWS_WITH_AS(read_volume(p.string()),
                         doctest::Contains("bad_magic.svol:1"), std::runtime_error);

    auto p2 = tmp_file("bad_dims.svol");
    write_raw(p2, "svol 1\ndims: 2 x\nspacing: 1 1\ndtype: u8\ndata:\nabcd");
    CHECK_THROWS_WITH_AS(read_volume(p2.string()),
                         doctest::Contains("bad_dims.svol:2"), std::runtime_error);

    auto p3 = tmp_file("bad_dtype.svol");
    write_raw(p3, "svol 1\ndims: 2 2\nspacing: 1 1\ndtype: i16\ndata:\nabcd");
    CHECK_THROWS_AS(read_volume(p3.string()), std::runtime_error);
}

TEST_CASE("payload size mismatches are rejected") {
    auto p = tmp_file("short.svol");
    write_raw(p, "svol 1\ndims: 2 2\nspacing: 1 1\ndtype: u8\ndata:\nabc");
    CHECK_THROWS_WITH_AS(read_volume(p.string()), doctest::Contains("payload"),
                         std::runtime_error);

    auto p2 = tmp_file("long.svol");
    write_raw(p2, "svol 1\ndims: 2 2\nspacing: 1 1\ndtype: u8\ndata:\nabcde");
    CHECK_THROWS_WITH_AS(read_volume(p2.string()), doctest::Contains("trailing"),
                         std::runtime_error);
}

TEST_CASE("non-finite f32 payloads are rejected") {
    auto p = tmp_file("nan.svol");
    std::string header = "svol 1\ndims: 1 2\nspacing: 1 1\ndtype: f32\ndata:\n";
    float vals[2] = {1.0f, std::numeric_limits<float>::quiet_NaN()};
    std::string bytes(reinterpret_cast<char*>(vals), sizeof(vals));
    write_raw(p, header + bytes);
    CHECK_THROWS_WITH_AS(read_volume(p.string()), doctest::Contains("non-finite"),
                         std::runtime_error);
}

TEST_CASE("pgm import maps rows to axis 0") {
    auto p = tmp_file("img.pgm");
    // 3 wide, 2 high; includes a comment line
    std::string data = "P5\n# demo\n3 2\n255\n";
    data += std::string("\x01\x02\x03\x0a\x0b\x0c", 6);
    write_raw(p, data);
    AnyVolume any = read_any(p.string());
    REQUIRE(any.dtype == VolumeDtype::U8);
    CHECK(any.label.shape.dims[0] == 2);
    CHECK(any.label.shape.dims[1] == 3);
    CHECK(any.label.at({0, 2}) == 3);
    CHECK(any.label.at({1, 0}) == 10);
}

TEST_CASE("read_any dispatches svol by default") {
    LabelVolume vol(GridShape(2, 3));
    auto p = tmp_file("dispatch.svol");
    write_volume(vol, p.string());
    CHECK(read_any(p.string()).dtype == VolumeDtype::U8);
    CHECK_THROWS(read_any((tmp_file("missing.svol")).string()));
}
