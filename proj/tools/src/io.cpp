#include "io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "plshoot/error.hpp"

namespace plshoot::cli {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw Error(ErrorCategory::Numerical, "number formatting failed");
  return std::string(buf, ptr);
}

nlohmann::json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCategory::Validation, "cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw Error(ErrorCategory::Validation, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCategory::Validation, "cannot move '" + tmp.string() + "' into place: " + ec.message());
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace plshoot::cli
