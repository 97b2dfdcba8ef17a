#include "sdml/data.hpp"
#include "sdml/errors.hpp"
#include "text.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

namespace sdml {

namespace {

constexpr std::size_t kKddFields = 42;
constexpr std::array<std::size_t, 3> kSymbolic = {1, 2, 3};
constexpr std::array<const char*, 41> kKddNames = {
    "duration", "protocol_type", "service", "flag", "src_bytes", "dst_bytes", "land",
    "wrong_fragment", "urgent", "hot", "num_failed_logins", "logged_in", "num_compromised",
    "root_shell", "su_attempted", "num_root", "num_file_creations", "num_shells",
    "num_access_files", "num_outbound_cmds", "is_host_login", "is_guest_login", "count",
    "srv_count", "serror_rate", "srv_serror_rate", "rerror_rate", "srv_rerror_rate",
    "same_srv_rate", "diff_srv_rate", "srv_diff_host_rate", "dst_host_count",
    "dst_host_srv_count", "dst_host_same_srv_rate", "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate", "dst_host_srv_diff_host_rate", "dst_host_serror_rate",
    "dst_host_srv_serror_rate", "dst_host_rerror_rate", "dst_host_srv_rerror_rate"};

bool is_symbolic(std::size_t column) {
    return std::find(kSymbolic.begin(), kSymbolic.end(), column) != kSymbolic.end();
}

std::string strip_dot(std::string_view label) {
    label = detail::trim(label);
    if (!label.empty() && label.back() == '.') label.remove_suffix(1);
    return std::string(label);
}

}  // namespace

KddCategoryMap parse_kdd_categories(std::istream& in) {
    KddCategoryMap map;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = detail::trim(std::string_view(line).substr(0, line.find('#')));
        if (body.empty()) continue;
        std::istringstream fields{std::string(body)};
        std::string label;
        std::string category;
        std::string extra;
        if (!(fields >> label >> category) || (fields >> extra)) {
            throw DataError("kdd categories: line " + std::to_string(line_no) + " is not 'label category'");
        }
        map[strip_dot(label)] = category;
    }
    if (map.empty()) throw DataError("kdd categories: no entries");
    return map;
}

KddCategoryMap load_kdd_categories(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return parse_kdd_categories(in);
}

Dataset parse_kdd(std::istream& in, const KddCategoryMap& categories, const std::string& source_id) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> fields;
    std::size_t line_no = 0;
    while (detail::read_record(in, fields)) {
        ++line_no;
        if (detail::blank(fields)) continue;
        if (fields.size() != kKddFields) {
            throw DataError(source_id + ": line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, expected 42");
        }
        records.push_back(fields);
    }
    if (records.empty()) throw DataError(source_id + ": empty file");

    std::array<std::vector<std::string>, 3> levels;
    for (std::size_t s = 0; s < kSymbolic.size(); ++s) {
        std::set<std::string> seen;
        for (const auto& r : records) seen.emplace(detail::trim(r[kSymbolic[s]]));
        levels[s].assign(seen.begin(), seen.end());
    }

    std::set<std::string> category_set;
    std::vector<std::string> category_of_row;
    category_of_row.reserve(records.size());
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto label = strip_dot(records[r].back());
        auto it = categories.find(label);
        if (it == categories.end()) {
            throw DataError(source_id + ": attack label '" + label + "' at line " + std::to_string(r + 1) +
                            " has no category");
        }
        category_set.insert(it->second);
        category_of_row.push_back(it->second);
    }

    Dataset ds;
    ds.source_id = source_id;
    ds.class_names.assign(category_set.begin(), category_set.end());
    for (std::size_t c = 0; c + 1 < kKddFields; ++c) {
        if (!is_symbolic(c)) {
            ds.feature_names.emplace_back(kKddNames[c]);
            continue;
        }
        const auto s = static_cast<std::size_t>(std::find(kSymbolic.begin(), kSymbolic.end(), c) - kSymbolic.begin());
        for (const auto& level : levels[s]) ds.feature_names.push_back(std::string(kKddNames[c]) + "=" + level);
    }

    ds.features = Matrix::Zero(static_cast<Eigen::Index>(records.size()),
                               static_cast<Eigen::Index>(ds.feature_names.size()));
    for (std::size_t r = 0; r < records.size(); ++r) {
        Eigen::Index col = 0;
        for (std::size_t c = 0; c + 1 < kKddFields; ++c) {
            const auto row = static_cast<Eigen::Index>(r);
            if (is_symbolic(c)) {
                const auto s = static_cast<std::size_t>(std::find(kSymbolic.begin(), kSymbolic.end(), c) -
                                                        kSymbolic.begin());
                const auto& lv = levels[s];
                const auto pos = std::lower_bound(lv.begin(), lv.end(), std::string(detail::trim(records[r][c])));
                ds.features(row, col + (pos - lv.begin())) = 1.0;
                col += static_cast<Eigen::Index>(lv.size());
                continue;
            }
            const auto v = detail::parse_real(records[r][c]);
            if (!v) {
                throw DataError(source_id + ": non-numeric value '" + records[r][c] + "' at row " +
                                std::to_string(r + 1) + ", column " + std::to_string(c));
            }
            ds.features(row, col++) = *v;
        }
        const auto& name = category_of_row[r];
        ds.labels.push_back(static_cast<int>(
            std::lower_bound(ds.class_names.begin(), ds.class_names.end(), name) - ds.class_names.begin()));
    }
    ds.validate();
    return ds;
}

Dataset load_kdd(const std::filesystem::path& path, const KddCategoryMap& categories) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return parse_kdd(in, categories, path.filename().string());
}

Dataset make_kdd_surrogate(std::uint64_t seed, const KddClassSizes& sizes) {
    constexpr Eigen::Index kFeatures = 10;
    struct ClassShape {
        const char* name;
        std::size_t count;
        int modes;
        double spread;
    };
    // Alphabetical, matching the ordering of the real loader.
    const std::array<ClassShape, 5> shapes = {{
        {"DOS", sizes.dos, 3, 0.6},
        {"Normal", sizes.normal, 4, 1.0},
        {"Probe", sizes.probe, 2, 0.8},
        {"R2L", sizes.r2l, 2, 0.8},
        {"U2R", sizes.u2r, 1, 0.7},
    }};

    Rng rng(seed);
    std::size_t total = 0;
    for (const auto& s : shapes) total += s.count;

    Dataset ds;
    ds.source_id = "kdd-surrogate";
    for (const auto& s : shapes) ds.class_names.emplace_back(s.name);
    for (Eigen::Index f = 0; f < kFeatures; ++f) ds.feature_names.push_back("s" + std::to_string(f));
    ds.features.resize(static_cast<Eigen::Index>(total), kFeatures);
    ds.labels.reserve(total);

    Eigen::Index row = 0;
    for (std::size_t c = 0; c < shapes.size(); ++c) {
        const auto& shape = shapes[c];
        // Class anchor on its own axis; modes scatter around it.
        Vector anchor = Vector::Zero(kFeatures);
        anchor[static_cast<Eigen::Index>(c)] = 4.0;
        std::vector<Vector> centers;
        for (int k = 0; k < shape.modes; ++k) {
            Vector offset(kFeatures);
            for (Eigen::Index f = 0; f < kFeatures; ++f) offset[f] = rng.normal();
            centers.push_back(anchor + 1.2 * offset / offset.norm());
        }
        for (std::size_t i = 0; i < shape.count; ++i) {
            const auto& center = centers[rng.below(centers.size())];
            for (Eigen::Index f = 0; f < kFeatures; ++f) {
                ds.features(row, f) = center[f] + shape.spread * rng.normal();
            }
            ds.labels.push_back(static_cast<int>(c));
            ++row;
        }
    }
    ds.validate();
    return ds;
}

}  // namespace sdml
