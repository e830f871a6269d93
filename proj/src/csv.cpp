// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "shorsim/io/csv.hpp"

#include <cstdio>
#include <fstream>
#include <system_error>

namespace shorsim::io {

namespace {

std::string format_with(const char* spec, double value) {
  char buffer[64];
  const int written = std::snprintf(buffer, sizeof buffer, spec, value);
  return std::string(buffer, std::size_t(written));
}

}  // namespace

std::string format_double(double value) {
  return format_with("%.12g", value);
}

std::string format_double_exact(double value) {
  return format_with("%.17g", value);
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), std::streamsize(content.size()));
  if (!out)
    throw std::filesystem::filesystem_error(
        "cannot write", path,
        std::make_error_code(std::errc::io_error));
}

}  // namespace shorsim::io
