#include "vantage/serial.hpp"

namespace vantage {

void atomic_write_file(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& body) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw io_error("cannot open " + tmp.string() + " for writing");
    body(os);
    os.flush();
    if (!os) {
      fs::remove(tmp);
      throw io_error("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open " + path.string());
  return is;
}

}  // namespace vantage
