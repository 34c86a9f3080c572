#include "csv.hpp"

#include <filesystem>

#include "errors.hpp"
#include "model_syntax.hpp"

namespace levycouple {

CsvWriter::CsvWriter(const std::string& path, const std::string& config_echo,
                     const std::vector<std::string>& header)
    : path_(path), columns_(header.size()), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot write '" + path + "'");
  out_ << "# config: " << config_echo << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw InvalidArgument("csv row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << '\n';
  if (!out_) throw IoError("write failed for '" + path_ + "'");
}

std::string cell(double x) { return format_number(x); }
std::string cell(std::size_t x) { return std::to_string(x); }
std::string cell(int x) { return std::to_string(x); }

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create directory '" + dir + "'");
}

}  // namespace levycouple
