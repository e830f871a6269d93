// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

namespace shorsim::io {

// Fixed-width-free decimal form used in every emitted table: 12 significant
// digits, so equal doubles always print equally across platforms and runs.
std::string format_double(double value);

// Full round-trip precision, used by the config serializer.
std::string format_double_exact(double value);

// Writes the whole file at once, creating parent directories. Failures are
// filesystem_error.
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

}  // namespace shorsim::io
