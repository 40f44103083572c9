#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace rpci {

/// Runs `write` against a temporary sibling of `path`, then renames it into
/// place. On any exception the temporary is removed and nothing appears at
/// `path`.
void write_atomically(const std::filesystem::path& path,
                      const std::function<void(const std::filesystem::path& tmp)>& write);

void write_text_file(const std::filesystem::path& path, std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace rpci
