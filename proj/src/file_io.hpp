#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace paraeval::detail {

/// Whole-file read and write; failures throw an io error naming the path.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

/// Calls fn(line_no, line) per line; line_no is 1-based and a trailing
/// '\r' is dropped.
template <typename Fn>
void for_each_line(std::string_view content, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(++line_no, line);
    pos = end + 1;
  }
}

bool is_blank(std::string_view s);

}  // namespace paraeval::detail
