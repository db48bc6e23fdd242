#include "relret/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <limits>

#include "relret/error.hpp"

namespace relret {

namespace {

constexpr char kMagic[4] = {'R', 'R', 'C', 'P'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double d) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(d));
    std::memcpy(&bits, &d, 8);
    put_u64(os, bits);
}

std::uint32_t get_u32(std::istream& is, const char* what) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4))
        throw DataError(std::string("checkpoint truncated reading ") + what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& is, const char* what) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8))
        throw DataError(std::string("checkpoint truncated reading ") + what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& is, const char* what) {
    const std::uint64_t bits = get_u64(is, what);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

std::string get_bytes(std::istream& is, std::uint64_t n, const char* what) {
    std::string s(n, '\0');
    if (n > 0 && !is.read(s.data(), static_cast<std::streamsize>(n)))
        throw DataError(std::string("checkpoint truncated reading ") + what);
    return s;
}

} // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot open checkpoint for writing: " + path);

    os.write(kMagic, 4);
    put_u32(os, ck.format_version);
    put_u64(os, ck.config_json.size());
    os.write(ck.config_json.data(), static_cast<std::streamsize>(ck.config_json.size()));
    put_u64(os, ck.seed);
    put_u64(os, ck.step);
    put_u64(os, ck.params.count());
    for (std::size_t i = 0; i < ck.params.count(); ++i) {
        const std::string& name = ck.params.name_at(i);
        const Tensor2D& t = ck.params.tensor_at(i);
        put_u32(os, static_cast<std::uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        put_u64(os, t.rows);
        put_u64(os, t.cols);
        for (double v : t.data) put_f64(os, v);
    }
    os.flush();
    if (!os) throw DataError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open checkpoint: " + path);

    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw DataError("not a checkpoint file: " + path);

    Checkpoint ck;
    ck.format_version = get_u32(is, "format version");
    if (ck.format_version != kFormatVersion)
        throw DataError("unsupported checkpoint format version " +
                        std::to_string(ck.format_version));
    const std::uint64_t config_len = get_u64(is, "config length");
    ck.config_json = get_bytes(is, config_len, "config");
    ck.seed = get_u64(is, "seed");
    ck.step = get_u64(is, "step");
    const std::uint64_t n_tensors = get_u64(is, "tensor count");
    for (std::uint64_t i = 0; i < n_tensors; ++i) {
        const std::uint32_t name_len = get_u32(is, "tensor name length");
        const std::string name = get_bytes(is, name_len, "tensor name");
        const std::uint64_t rows = get_u64(is, "tensor rows");
        const std::uint64_t cols = get_u64(is, "tensor cols");
        if (rows > 0 && cols > std::numeric_limits<std::size_t>::max() / rows)
            throw DataError("checkpoint tensor too large: " + name);
        Tensor2D t(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
        for (double& v : t.data) v = get_f64(is, "tensor values");
        ck.params.add(name, std::move(t));
    }
    return ck;
}

} // namespace relret
