#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kinslab {

// Self-describing binary container: magic, field count, then per field a
// name, shape and row-major doubles; FNV-1a checksum over the payload at the
// end. Used for kernel-matrix caches and persisted expansion terms.
struct BinaryField {
    std::string name;
    std::vector<int> dims;
    std::vector<double> data;
};

bool write_container(const std::string& path, const std::vector<BinaryField>& fields);
bool read_container(const std::string& path, std::vector<BinaryField>& fields);

uint64_t fnv1a64(const void* data, size_t n, uint64_t seed = 1469598103934665603ull);
uint64_t hash_file(const std::string& path);
std::string hex64(uint64_t v);

// 17-significant-digit formatting used by every CSV so outputs are
// reproducible bit for bit under a fixed config and seed.
std::string fmt_double(double v);

struct CsvWriter {
    explicit CsvWriter(const std::string& path, const std::vector<std::string>& header);
    ~CsvWriter();
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);

private:
    void* f_ = nullptr;
};

void log_line(const std::string& stage, const std::string& message);

bool make_dirs(const std::string& path);
bool file_exists(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace kinslab
