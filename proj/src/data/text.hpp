#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sdml::detail {

std::string_view trim(std::string_view s);
std::optional<double> parse_real(std::string_view text);
bool read_record(std::istream& in, std::vector<std::string>& fields);
bool blank(const std::vector<std::string>& fields);

}  // namespace sdml::detail
