#include "sunpatch/grid_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace sunpatch {

namespace {

constexpr std::uint64_t kAbsentBits = 0x7ff8000000000000ULL; // canonical quiet NaN

void put_u64_le(std::ostream& os, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 8);
}

std::uint64_t get_u64_le(std::istream& is) {
    char b[8];
    is.read(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    }
    return v;
}

struct Header {
    int rows = 0;
    int cols = 0;
    std::string dtype;
};

void write_header(std::ostream& os, int rows, int cols, const char* dtype) {
    os << "GRD1 " << rows << " " << cols << " " << dtype << "\n";
}

Header read_header(std::istream& is, const std::string& path) {
    std::string line;
    if (!std::getline(is, line)) {
        throw IoError("cannot read GRD1 header from " + path);
    }
    std::istringstream ss(line);
    std::string magic;
    Header h;
    ss >> magic >> h.rows >> h.cols >> h.dtype;
    if (magic != "GRD1" || ss.fail() || h.rows < 1 || h.cols < 1 ||
        (h.dtype != "f64" && h.dtype != "u8")) {
        throw IoError("malformed GRD1 header in " + path + ": '" + line + "'");
    }
    return h;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path + " for reading");
    return is;
}

void write_f64_body(std::ostream& os, const std::vector<double>& values) {
    for (double v : values) put_u64_le(os, std::bit_cast<std::uint64_t>(v));
}

std::vector<double> read_f64_body(std::istream& is, const Header& h, const std::string& path) {
    std::vector<double> values(static_cast<std::size_t>(h.rows) * h.cols);
    for (double& v : values) v = std::bit_cast<double>(get_u64_le(is));
    if (!is) throw IoError("truncated GRD1 body in " + path);
    return values;
}

} // namespace

void write_values(const std::string& path, int rows, int cols, const std::vector<double>& values) {
    if (values.size() != static_cast<std::size_t>(rows) * cols) {
        throw DimensionMismatchError("value count does not match grid dimensions for " + path);
    }
    auto os = open_out(path);
    write_header(os, rows, cols, "f64");
    write_f64_body(os, values);
    if (!os) throw IoError("write failed for " + path);
}

std::vector<double> read_values(const std::string& path, int& rows, int& cols) {
    auto is = open_in(path);
    const Header h = read_header(is, path);
    if (h.dtype != "f64") throw IoError(path + " is not an f64 grid");
    rows = h.rows;
    cols = h.cols;
    return read_f64_body(is, h, path);
}

void write_grid(const std::string& path, const ImageGrid& grid) {
    write_values(path, grid.rows(), grid.cols(), grid.values());
}

ImageGrid read_grid(const std::string& path, Modality modality) {
    int rows = 0, cols = 0;
    std::vector<double> values = read_values(path, rows, cols);
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw IoError(path + " contains non-finite values; not a plain image grid");
        }
    }
    return ImageGrid(rows, cols, std::move(values), modality);
}

void write_mask(const std::string& path, const RegionMask& mask) {
    auto os = open_out(path);
    write_header(os, mask.rows(), mask.cols(), "u8");
    os.write(reinterpret_cast<const char*>(mask.labels().data()),
             static_cast<std::streamsize>(mask.labels().size()));
    if (!os) throw IoError("write failed for " + path);
}

RegionMask read_mask(const std::string& path) {
    auto is = open_in(path);
    const Header h = read_header(is, path);
    if (h.dtype != "u8") throw IoError(path + " is not a u8 mask grid");
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(h.rows) * h.cols);
    is.read(reinterpret_cast<char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
    if (!is) throw IoError("truncated GRD1 body in " + path);
    return RegionMask(h.rows, h.cols, std::move(labels));
}

void write_masked_grid(const std::string& path, const MaskedGrid& grid) {
    auto os = open_out(path);
    write_header(os, grid.rows, grid.cols, "f64");
    const std::size_t n = grid.values.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t bits =
            grid.present[i] ? std::bit_cast<std::uint64_t>(grid.values[i]) : kAbsentBits;
        put_u64_le(os, bits);
    }
    if (!os) throw IoError("write failed for " + path);
}

MaskedGrid read_masked_grid(const std::string& path) {
    auto is = open_in(path);
    const Header h = read_header(is, path);
    if (h.dtype != "f64") throw IoError(path + " is not an f64 grid");
    MaskedGrid grid(h.rows, h.cols);
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
        const double v = std::bit_cast<double>(get_u64_le(is));
        if (std::isnan(v)) continue;
        grid.values[i] = v;
        grid.present[i] = 1;
    }
    if (!is) throw IoError("truncated GRD1 body in " + path);
    return grid;
}

} // namespace sunpatch
