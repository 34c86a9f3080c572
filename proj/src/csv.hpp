#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace levycouple {

// Writes "# config: ..." then a header row, then rows. Numbers use the
// shortest round-trip form so output is byte-identical across runs.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& config_echo,
            const std::vector<std::string>& header);

  void row(const std::vector<std::string>& cells);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::size_t columns_;
  std::ofstream out_;
};

std::string cell(double x);
std::string cell(std::size_t x);
std::string cell(int x);

// Creates the directory (and parents) if needed; throws IoError otherwise.
void ensure_directory(const std::string& dir);

}  // namespace levycouple
