#include "harness/io.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kinslab {

namespace {
constexpr uint64_t kMagic = 0x4b534c4231ull;  // "KSLB1"
}

uint64_t fnv1a64(const void* data, size_t n, uint64_t seed) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    uint64_t h = seed;
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return 0;
    uint64_t h = 1469598103934665603ull;
    char buf[65536];
    while (in) {
        in.read(buf, sizeof(buf));
        h = fnv1a64(buf, static_cast<size_t>(in.gcount()), h);
    }
    return h;
}

std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

bool write_container(const std::string& path, const std::vector<BinaryField>& fields) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    auto put_u64 = [&](uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
    put_u64(kMagic);
    put_u64(fields.size());
    uint64_t checksum = 1469598103934665603ull;
    for (const auto& f : fields) {
        put_u64(f.name.size());
        out.write(f.name.data(), static_cast<std::streamsize>(f.name.size()));
        put_u64(f.dims.size());
        size_t count = 1;
        for (int d : f.dims) {
            put_u64(static_cast<uint64_t>(d));
            count *= static_cast<size_t>(d);
        }
        if (count != f.data.size())
            throw std::invalid_argument("write_container: dims do not match data size");
        out.write(reinterpret_cast<const char*>(f.data.data()),
                  static_cast<std::streamsize>(8 * f.data.size()));
        checksum = fnv1a64(f.data.data(), 8 * f.data.size(), checksum);
        checksum = fnv1a64(f.name.data(), f.name.size(), checksum);
    }
    put_u64(checksum);
    return static_cast<bool>(out);
}

bool read_container(const std::string& path, std::vector<BinaryField>& fields) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    auto get_u64 = [&](uint64_t& v) -> bool {
        in.read(reinterpret_cast<char*>(&v), 8);
        return static_cast<bool>(in);
    };
    uint64_t magic = 0, nfields = 0;
    if (!get_u64(magic) || magic != kMagic || !get_u64(nfields)) return false;
    uint64_t checksum = 1469598103934665603ull;
    fields.clear();
    for (uint64_t i = 0; i < nfields; ++i) {
        BinaryField f;
        uint64_t nlen = 0;
        if (!get_u64(nlen) || nlen > 4096) return false;
        f.name.resize(nlen);
        in.read(f.name.data(), static_cast<std::streamsize>(nlen));
        uint64_t ndim = 0;
        if (!get_u64(ndim) || ndim > 8) return false;
        size_t count = 1;
        for (uint64_t d = 0; d < ndim; ++d) {
            uint64_t dim = 0;
            if (!get_u64(dim)) return false;
            f.dims.push_back(static_cast<int>(dim));
            count *= static_cast<size_t>(dim);
        }
        f.data.resize(count);
        in.read(reinterpret_cast<char*>(f.data.data()),
                static_cast<std::streamsize>(8 * count));
        if (!in) return false;
        checksum = fnv1a64(f.data.data(), 8 * count, checksum);
        checksum = fnv1a64(f.name.data(), f.name.size(), checksum);
        fields.push_back(std::move(f));
    }
    uint64_t stored = 0;
    if (!get_u64(stored) || stored != checksum) return false;
    return true;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header) {
    FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open csv for writing: " + path);
    f_ = f;
    for (size_t i = 0; i < header.size(); ++i)
        std::fprintf(f, "%s%s", header[i].c_str(), i + 1 < header.size() ? "," : "\n");
}

CsvWriter::~CsvWriter() {
    if (f_) std::fclose(static_cast<FILE*>(f_));
}

void CsvWriter::row(const std::vector<double>& values) {
    FILE* f = static_cast<FILE*>(f_);
    for (size_t i = 0; i < values.size(); ++i)
        std::fprintf(f, "%s%s", fmt_double(values[i]).c_str(),
                     i + 1 < values.size() ? "," : "\n");
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
    FILE* f = static_cast<FILE*>(f_);
    for (size_t i = 0; i < values.size(); ++i)
        std::fprintf(f, "%s%s", values[i].c_str(), i + 1 < values.size() ? "," : "\n");
}

void log_line(const std::string& stage, const std::string& message) {
    static const auto t0 = std::chrono::steady_clock::now();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "[%s] t=%.2fs %s\n", stage.c_str(), secs, message.c_str());
}

bool make_dirs(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    return !ec;
}

bool file_exists(const std::string& path) { return std::filesystem::exists(path); }

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

}  // namespace kinslab
