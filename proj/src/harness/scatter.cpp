#include "sdml/errors.hpp"
#include "sdml/harness.hpp"

#include <fstream>
#include <iomanip>

namespace sdml {

void export_scatter(const Matrix& coords, std::span<const int> labels, const std::vector<std::string>& class_names,
                    const std::filesystem::path& path) {
    if (coords.cols() != 2) throw DataError("scatter export needs exactly 2 columns, got " + std::to_string(coords.cols()));
    if (static_cast<std::size_t>(coords.rows()) != labels.size()) throw DataError("scatter export: label count mismatch");
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << "x,y,label\n" << std::setprecision(12);
    for (Eigen::Index i = 0; i < coords.rows(); ++i) {
        const int c = labels[static_cast<std::size_t>(i)];
        if (c < 0 || static_cast<std::size_t>(c) >= class_names.size()) throw DataError("scatter export: label out of range");
        std::string name = class_names[static_cast<std::size_t>(c)];
        if (name.find_first_of(",\"\n") != std::string::npos) {
            std::string quoted = "\"";
            for (char ch : name) {
                if (ch == '"') quoted += '"';
                quoted += ch;
            }
            name = quoted + '"';
        }
        out << coords(i, 0) << ',' << coords(i, 1) << ',' << name << '\n';
    }
}

}  // namespace sdml
