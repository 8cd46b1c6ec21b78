#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vantage {

// Raised on any malformed or truncated artifact file.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// Little-endian binary stream writer. All artifact files are written through
// this so that identical inputs produce identical bytes.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& os) : os_(os) {}

  void put_bytes(const void* data, size_t n) {
    os_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  }
  void put_u8(uint8_t v) { put_bytes(&v, 1); }
  void put_u32(uint32_t v) { put_bytes(&v, 4); }
  void put_i32(int32_t v) { put_bytes(&v, 4); }
  void put_u64(uint64_t v) { put_bytes(&v, 8); }
  void put_i64(int64_t v) { put_bytes(&v, 8); }
  void put_f64(double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(bits);
  }
  void put_f64s(const double* data, size_t n) { put_bytes(data, n * 8); }
  void put_string(const std::string& s) {
    put_u32(static_cast<uint32_t>(s.size()));
    put_bytes(s.data(), s.size());
  }

 private:
  std::ostream& os_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& is, std::string name = "<stream>")
      : is_(is), name_(std::move(name)) {}

  void get_bytes(void* data, size_t n) {
    is_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(is_.gcount()) != n)
      throw io_error(name_ + ": unexpected end of file");
  }
  uint8_t get_u8() { uint8_t v; get_bytes(&v, 1); return v; }
  uint32_t get_u32() { uint32_t v; get_bytes(&v, 4); return v; }
  int32_t get_i32() { int32_t v; get_bytes(&v, 4); return v; }
  uint64_t get_u64() { uint64_t v; get_bytes(&v, 8); return v; }
  int64_t get_i64() { int64_t v; get_bytes(&v, 8); return v; }
  double get_f64() {
    uint64_t bits = get_u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  void get_f64s(double* data, size_t n) { get_bytes(data, n * 8); }
  std::string get_string(uint32_t max_len = 1u << 20) {
    uint32_t n = get_u32();
    if (n > max_len) throw io_error(name_ + ": string length out of range");
    std::string s(n, '\0');
    get_bytes(s.data(), n);
    return s;
  }
  const std::string& name() const { return name_; }

 private:
  std::istream& is_;
  std::string name_;
};

// Writes to <path>.tmp then renames, so failed commands leave no partial
// output behind.
void atomic_write_file(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& body);

std::ifstream open_input(const std::filesystem::path& path);

}  // namespace vantage
