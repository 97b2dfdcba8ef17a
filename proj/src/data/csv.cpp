#include "sdml/data.hpp"
#include "sdml/errors.hpp"
#include "text.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <unordered_map>

namespace sdml {

namespace detail {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_real(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

/// Splits one logical CSV record. Quoted fields may contain commas, doubled
/// quotes and newlines; returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string line;
    if (!std::getline(in, line)) return false;

    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (true) {
        if (i == line.size()) {
            if (quoted) {
                std::string more;
                if (!std::getline(in, more)) throw DataError("csv: unterminated quoted field");
                field += '\n';
                line = std::move(more);
                i = 0;
                continue;
            }
            break;
        }
        const char c = line[i++];
        if (quoted) {
            if (c == '"') {
                if (i < line.size() && line[i] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (!field.empty() && field.back() == '\r') field.pop_back();
    fields.push_back(std::move(field));
    return true;
}

bool blank(const std::vector<std::string>& fields) {
    return fields.size() == 1 && trim(fields[0]).empty();
}

}  // namespace detail

Dataset parse_csv(std::istream& in, const LabelColumn& label_column, bool has_header,
                  const std::string& source_id) {
    std::vector<std::string> fields;
    std::vector<std::string> header;
    std::size_t line_no = 0;

    auto next_nonblank = [&]() {
        while (detail::read_record(in, fields)) {
            ++line_no;
            if (!detail::blank(fields)) return true;
        }
        return false;
    };

    if (!next_nonblank()) throw DataError(source_id + ": empty file");
    if (has_header) {
        header = fields;
        if (!next_nonblank()) throw DataError(source_id + ": no data rows after header");
    }
    const std::size_t columns = fields.size();
    if (columns < 2) throw DataError(source_id + ": need at least one feature column and a label column");

    std::size_t label_index = 0;
    if (const auto* name = std::get_if<std::string>(&label_column)) {
        if (!has_header) throw DataError(source_id + ": label column given by name but file has no header");
        auto it = std::find_if(header.begin(), header.end(),
                               [&](const std::string& h) { return detail::trim(h) == *name; });
        if (it == header.end()) throw DataError(source_id + ": label column '" + *name + "' not found");
        label_index = static_cast<std::size_t>(it - header.begin());
    } else {
        label_index = std::get<std::size_t>(label_column);
    }
    if (label_index >= columns) {
        throw DataError(source_id + ": label column index " + std::to_string(label_index) + " out of range");
    }
    if (has_header && header.size() != columns) {
        throw DataError(source_id + ": header has " + std::to_string(header.size()) + " columns, data has " +
                        std::to_string(columns));
    }

    Dataset ds;
    ds.source_id = source_id;
    for (std::size_t c = 0; c < columns; ++c) {
        if (c == label_index) continue;
        ds.feature_names.push_back(has_header ? std::string(detail::trim(header[c])) : "f" + std::to_string(c));
    }

    std::vector<double> values;
    std::unordered_map<std::string, int> class_index;
    std::size_t row = 0;
    do {
        if (fields.size() != columns) {
            throw DataError(source_id + ": line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, expected " + std::to_string(columns));
        }
        for (std::size_t c = 0; c < columns; ++c) {
            if (c == label_index) continue;
            const auto v = detail::parse_real(fields[c]);
            if (!v) {
                throw DataError(source_id + ": non-numeric value '" + fields[c] + "' at row " +
                                std::to_string(row + 1) + ", column " + std::to_string(c));
            }
            values.push_back(*v);
        }
        std::string token(detail::trim(fields[label_index]));
        auto [it, inserted] = class_index.try_emplace(token, static_cast<int>(ds.class_names.size()));
        if (inserted) ds.class_names.push_back(token);
        ds.labels.push_back(it->second);
        ++row;
    } while (next_nonblank());

    const auto m = static_cast<Eigen::Index>(columns - 1);
    ds.features.resize(static_cast<Eigen::Index>(row), m);
    for (std::size_t r = 0; r < row; ++r) {
        for (Eigen::Index c = 0; c < m; ++c) {
            ds.features(static_cast<Eigen::Index>(r), c) = values[r * static_cast<std::size_t>(m) + static_cast<std::size_t>(c)];
        }
    }
    if (ds.class_names.size() < 2) throw DataError(source_id + ": single-class file (need at least 2 classes)");
    ds.validate();
    return ds;
}

Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column, bool has_header) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return parse_csv(in, label_column, has_header, path.filename().string());
}

}  // namespace sdml
