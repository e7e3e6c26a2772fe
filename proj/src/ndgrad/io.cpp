#include "stylecloak/ndgrad/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace stylecloak::ndgrad {

namespace {

constexpr char kMagic[4] = {'N', 'D', 'T', '1'};
constexpr std::uint8_t kDtypeF64 = 1;

void write_u64_le(std::ostream& os, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64_le(std::istream& is, const std::string& path) {
    unsigned char buf[8];
    if (!is.read(reinterpret_cast<char*>(buf), 8)) {
        throw std::runtime_error("load_tensor: unexpected EOF in " + path);
    }
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

void write_f64_le(std::ostream& os, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    write_u64_le(os, bits);
}

double read_f64_le(std::istream& is, const std::string& path) {
    const std::uint64_t bits = read_u64_le(is, path);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

}  // namespace

void save_tensor(const std::string& path, const Tensor& t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_tensor: cannot open " + path);
    os.write(kMagic, 4);
    os.put(static_cast<char>(kDtypeF64));
    os.put(static_cast<char>(t.rank()));
    for (std::size_t e : t.shape()) write_u64_le(os, e);
    for (std::size_t i = 0; i < t.numel(); ++i) write_f64_le(os, t[i]);
    if (!os) throw std::runtime_error("save_tensor: write failed for " + path);
}

Tensor load_tensor(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_tensor: cannot open " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw std::runtime_error("load_tensor: bad magic in " + path);
    }
    const int dtype = is.get();
    if (dtype != kDtypeF64) {
        throw std::runtime_error("load_tensor: unsupported dtype code " + std::to_string(dtype) +
                                 " in " + path);
    }
    const int rank = is.get();
    if (rank < 0 || rank > 8) throw std::runtime_error("load_tensor: bad rank in " + path);
    std::vector<std::size_t> shape;
    for (int i = 0; i < rank; ++i) {
        shape.push_back(static_cast<std::size_t>(read_u64_le(is, path)));
    }
    const std::size_t n = shape_numel(shape);
    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i) data[i] = read_f64_le(is, path);
    // Must be exactly at EOF now.
    is.peek();
    if (!is.eof()) throw std::runtime_error("load_tensor: trailing bytes in " + path);
    return Tensor::from_data(std::move(shape), std::move(data));
}

}  // namespace stylecloak::ndgrad
