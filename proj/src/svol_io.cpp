#include "gvfseg/svol_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace gvfseg {

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::string read_header_line(std::istream& in, const std::string& path, int line) {
    std::string s;
    if (!std::getline(in, s)) parse_fail(path, line, "unexpected end of header");
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

std::vector<double> parse_numbers(const std::string& body, const std::string& path, int line,
                                  const char* what) {
    std::istringstream iss(body);
    std::vector<double> out;
    double v;
    while (iss >> v) out.push_back(v);
    // the loop must have stopped at end of input, not on a bad token
    if (!iss.eof())
        parse_fail(path, line, std::string("malformed ") + what + " line");
    return out;
}

void write_header(std::ostream& out, const GridShape& shape, const char* dtype) {
    out << "svol 1\n";
    out << "dims:";
    for (int a = 0; a < shape.ndim; ++a) out << ' ' << shape.dims[a];
    out << "\nspacing:";
    char buf[64];
    for (int a = 0; a < shape.ndim; ++a) {
        std::snprintf(buf, sizeof(buf), "%.17g", shape.spacing[a]);
        out << ' ' << buf;
    }
    out << "\ndtype: " << dtype << "\ndata:\n";
}

GridShape shape_from(const std::vector<double>& dims, const std::vector<double>& spacing,
                     const std::string& path) {
    if (dims.size() != spacing.size())
        throw std::runtime_error(path + ": dims/spacing axis count mismatch");
    if (dims.size() == 2)
        return GridShape(static_cast<int>(dims[0]), static_cast<int>(dims[1]), spacing[0],
                         spacing[1]);
    if (dims.size() == 3)
        return GridShape(static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                         static_cast<int>(dims[2]), spacing[0], spacing[1], spacing[2]);
    throw std::runtime_error(path + ": dims must list 2 or 3 axes");
}

}  // namespace

ScalarVolume AnyVolume::as_scalar() const {
    if (dtype == VolumeDtype::F32) return scalar;
    ScalarVolume out(label.shape);
    for (std::size_t i = 0; i < label.data.size(); ++i)
        out[i] = static_cast<float>(label[i]);
    return out;
}

LabelVolume AnyVolume::as_label() const {
    if (dtype == VolumeDtype::U8) return label;
    throw std::runtime_error("volume has dtype f32 where a label volume (u8) is required");
}

AnyVolume read_volume(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);

    int line = 1;
    std::string magic = read_header_line(in, path, line);
    if (magic != "svol 1") parse_fail(path, line, "expected 'svol 1' magic");

    ++line;
    std::string dims_line = read_header_line(in, path, line);
    if (dims_line.rfind("dims:", 0) != 0) parse_fail(path, line, "expected 'dims:' line");
    auto dims = parse_numbers(dims_line.substr(5), path, line, "dims");
    for (double d : dims)
        if (d <= 0 || d != static_cast<int>(d)) parse_fail(path, line, "dims must be positive integers");

    ++line;
    std::string sp_line = read_header_line(in, path, line);
    if (sp_line.rfind("spacing:", 0) != 0) parse_fail(path, line, "expected 'spacing:' line");
    auto spacing = parse_numbers(sp_line.substr(8), path, line, "spacing");

    ++line;
    std::string dt_line = read_header_line(in, path, line);
    if (dt_line.rfind("dtype:", 0) != 0) parse_fail(path, line, "expected 'dtype:' line");
    std::string dt = dt_line.substr(6);
    dt.erase(0, dt.find_first_not_of(" \t"));

    ++line;
    std::string data_line = read_header_line(in, path, line);
    if (data_line != "data:") parse_fail(path, line, "expected 'data:' line");

    GridShape shape = shape_from(dims, spacing, path);
    const std::size_t n = shape.voxel_count();

    AnyVolume out;
    if (dt == "f32") {
        out.dtype = VolumeDtype::F32;
        out.scalar = ScalarVolume(shape);
        in.read(reinterpret_cast<char*>(out.scalar.data.data()),
                static_cast<std::streamsize>(n * sizeof(float)));
        if (static_cast<std::size_t>(in.gcount()) != n * sizeof(float))
            throw std::runtime_error(path + ": payload holds " +
                                     std::to_string(in.gcount() / sizeof(float)) +
                                     " f32 values, header declares " + std::to_string(n));
        for (float v : out.scalar.data)
            if (!std::isfinite(v))
                throw std::runtime_error(path + ": non-finite f32 value in payload");
    } else if (dt == "u8") {
        out.dtype = VolumeDtype::U8;
        out.label = LabelVolume(shape);
        in.read(reinterpret_cast<char*>(out.label.data.data()),
                static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n)
            throw std::runtime_error(path + ": payload holds " + std::to_string(in.gcount()) +
                                     " u8 values, header declares " + std::to_string(n));
    } else {
        parse_fail(path, line - 1, "unknown dtype '" + dt + "' (expected f32 or u8)");
    }
    // trailing bytes beyond the payload are a malformed file
    char extra;
    if (in.read(&extra, 1))
        throw std::runtime_error(path + ": trailing bytes after declared payload");
    return out;
}

void write_volume(const ScalarVolume& vol, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_header(out, vol.shape, "f32");
    out.write(reinterpret_cast<const char*>(vol.data.data()),
              static_cast<std::streamsize>(vol.data.size() * sizeof(float)));
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_volume(const LabelVolume& vol, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_header(out, vol.shape, "u8");
    out.write(reinterpret_cast<const char*>(vol.data.data()),
              static_cast<std::streamsize>(vol.data.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

AnyVolume read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error(path + ": not a binary PGM (P5) file");
    auto next_token = [&]() {
        std::string tok;
        // PGM allows '#' comments between tokens
        while (in >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            return tok;
        }
        throw std::runtime_error(path + ": truncated PGM header");
    };
    int width = std::stoi(next_token());
    int height = std::stoi(next_token());
    int maxval = std::stoi(next_token());
    if (maxval <= 0 || maxval > 255)
        throw std::runtime_error(path + ": only 8-bit PGM supported");
    in.get();  // single whitespace after maxval

    // PGM is row-by-row (height rows of width pixels); map rows to axis 0.
    AnyVolume out;
    out.dtype = VolumeDtype::U8;
    out.label = LabelVolume(GridShape(height, width));
    in.read(reinterpret_cast<char*>(out.label.data.data()),
            static_cast<std::streamsize>(out.label.data.size()));
    if (static_cast<std::size_t>(in.gcount()) != out.label.data.size())
        throw std::runtime_error(path + ": truncated PGM payload");
    return out;
}

AnyVolume read_any(const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".pgm") == 0)
        return read_pgm(path);
    return read_volume(path);
}

}  // namespace gvfseg
