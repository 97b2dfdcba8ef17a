#include "sdml/errors.hpp"
#include "sdml/metric.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace sdml {

namespace {

constexpr const char* kMagic = "sdml-metric-model";
constexpr int kVersion = 1;

std::string shortest(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw NumericError("cannot format value");
    return std::string(buf, ptr);
}

double read_double(std::istream& in) {
    std::string token;
    if (!(in >> token)) throw DataError("model file: truncated");
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw DataError("model file: bad number '" + token + "'");
    }
    return v;
}

void expect(std::istream& in, const std::string& keyword) {
    std::string token;
    if (!(in >> token) || token != keyword) {
        throw DataError("model file: expected '" + keyword + "', found '" + token + "'");
    }
}

template <typename T>
T read_count(std::istream& in, const char* what) {
    long long v = -1;
    if (!(in >> v) || v < 0) throw DataError(std::string("model file: bad ") + what);
    return static_cast<T>(v);
}

}  // namespace

void write_model(std::ostream& out, const MetricModel& model) {
    out << kMagic << ' ' << kVersion << '\n';
    out << "shape " << model.w.rows() << ' ' << model.w.cols() << '\n';
    out << "lambda " << shortest(model.lambda) << '\n';
    out << "iterations " << model.iterations_run << ' ' << (model.converged ? 1 : 0) << '\n';
    out << "W\n";
    for (Eigen::Index i = 0; i < model.w.rows(); ++i) {
        for (Eigen::Index j = 0; j < model.w.cols(); ++j) out << (j ? " " : "") << shortest(model.w(i, j));
        out << '\n';
    }
    out << "t\n";
    for (Eigen::Index j = 0; j < model.t.size(); ++j) out << (j ? " " : "") << shortest(model.t[j]);
    out << '\n';
    out << "trace " << model.objective_trace.size() << '\n';
    for (std::size_t k = 0; k < model.objective_trace.size(); ++k) {
        out << (k ? " " : "") << shortest(model.objective_trace[k]);
    }
    out << '\n';
}

MetricModel read_model(std::istream& in) {
    expect(in, kMagic);
    if (read_count<int>(in, "version") != kVersion) throw DataError("model file: unsupported version");
    expect(in, "shape");
    const auto rows = read_count<Eigen::Index>(in, "row count");
    const auto cols = read_count<Eigen::Index>(in, "column count");
    MetricModel model;
    expect(in, "lambda");
    model.lambda = read_double(in);
    expect(in, "iterations");
    model.iterations_run = read_count<int>(in, "iteration count");
    model.converged = read_count<int>(in, "convergence flag") != 0;
    expect(in, "W");
    model.w.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) model.w(i, j) = read_double(in);
    }
    expect(in, "t");
    model.t.resize(cols);
    for (Eigen::Index j = 0; j < cols; ++j) model.t[j] = read_double(in);
    expect(in, "trace");
    const auto count = read_count<std::size_t>(in, "trace length");
    model.objective_trace.reserve(count);
    for (std::size_t k = 0; k < count; ++k) model.objective_trace.push_back(read_double(in));
    return model;
}

void save_model(const std::filesystem::path& path, const MetricModel& model) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    write_model(out, model);
}

MetricModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return read_model(in);
}

}  // namespace sdml
