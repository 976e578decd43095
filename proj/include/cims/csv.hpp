#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cims {

// Shortest round-trip decimal form; locale-independent and byte-stable, so
// rerunning a sweep reproduces result files exactly.
inline std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

// Incremental CSV emitter: '#'-prefixed metadata lines, one header row, then
// data rows flushed as they are written so a failed point never truncates
// earlier rows.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path);
  }

  void metadata(const std::string& key, const std::string& value) {
    out_ << "# " << key << ": " << value << "\n";
    out_.flush();
  }

  void header(const std::vector<std::string>& columns) {
    write_joined(columns);
  }

  void row(const std::vector<std::string>& fields) { write_joined(fields); }

  bool ok() const { return static_cast<bool>(out_); }

 private:
  void write_joined(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << "\n";
    out_.flush();
  }

  std::ofstream out_;
};

}  // namespace cims
