#include "lrtf/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "lrtf/errors.hpp"
#include "lrtf/rng.hpp"

namespace lrtf {

Vec Dataset::standardized_row(std::size_t i) const {
    Vec x(raw.input_dim);
    auto r = raw.row(i);
    for (std::size_t j = 0; j < raw.input_dim; ++j) x[j] = (r[j] - input_mean[j]) / input_std[j];
    return x;
}

Dataset split_and_standardize(RawData raw, double train_ratio, std::uint64_t seed) {
    const std::size_t m = raw.num_samples;
    const std::size_t n = raw.input_dim;
    if (m < 10) throw DataError("split_and_standardize: need at least 10 samples, got " + std::to_string(m));
    if (raw.inputs.size() != m * n || raw.targets.size() != m)
        throw DimensionError("split_and_standardize: inconsistent raw data sizes");
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            if (!std::isfinite(raw.inputs[i * n + j]))
                throw DataError("non-finite input at row " + std::to_string(i) + ", column " + std::to_string(j));
        if (!std::isfinite(raw.targets[i]))
            throw DataError("non-finite target at row " + std::to_string(i));
    }

    Dataset ds;
    ds.raw = std::move(raw);

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    Rng rng = Rng::stream(seed, 0xD5);
    rng.shuffle(order);

    const auto train_count = static_cast<std::size_t>(std::llround(train_ratio * static_cast<double>(m)));
    ds.train_idx.assign(order.begin(), order.begin() + train_count);
    ds.test_idx.assign(order.begin() + train_count, order.end());

    ds.input_mean.assign(n, 0.0);
    ds.input_std.assign(n, 0.0);
    const double tm = static_cast<double>(train_count);
    for (std::size_t idx : ds.train_idx) {
        auto r = ds.raw.row(idx);
        for (std::size_t j = 0; j < n; ++j) ds.input_mean[j] += r[j];
        ds.target_mean += ds.raw.targets[idx];
    }
    for (std::size_t j = 0; j < n; ++j) ds.input_mean[j] /= tm;
    ds.target_mean /= tm;
    double tvar = 0.0;
    for (std::size_t idx : ds.train_idx) {
        auto r = ds.raw.row(idx);
        for (std::size_t j = 0; j < n; ++j) {
            const double d = r[j] - ds.input_mean[j];
            ds.input_std[j] += d * d;
        }
        const double dt = ds.raw.targets[idx] - ds.target_mean;
        tvar += dt * dt;
    }
    for (std::size_t j = 0; j < n; ++j) {
        ds.input_std[j] = std::sqrt(ds.input_std[j] / tm);
        if (ds.input_std[j] == 0.0) {
            ds.input_std[j] = 1.0;
            ds.clamped_input_columns.push_back(j);
        }
    }
    ds.target_std = std::sqrt(tvar / tm);
    if (ds.target_std == 0.0) {
        ds.target_std = 1.0;
        ds.target_std_clamped = true;
    }
    return ds;
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void csv_export(const RawData& data, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot write " + path.string());
    for (std::size_t j = 0; j < data.input_dim; ++j) {
        const std::string name = j < data.input_names.size() ? data.input_names[j] : "v" + std::to_string(j);
        os << "x_" << name << ',';
    }
    os << data.target_name << '\n';
    for (std::size_t i = 0; i < data.num_samples; ++i) {
        auto r = data.row(i);
        for (std::size_t j = 0; j < data.input_dim; ++j) os << fmt17(r[j]) << ',';
        os << fmt17(data.targets[i]) << '\n';
    }
}

RawData csv_ingest(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot read " + path.string());
    std::string line;
    if (!std::getline(is, line) || line.empty()) throw DataError(path.string() + ": missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    RawData data;
    {
        std::istringstream header(line);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(header, col, ',')) cols.push_back(col);
        if (cols.size() < 2) throw DataError(path.string() + ": header must name inputs and one target column");
        for (std::size_t j = 0; j + 1 < cols.size(); ++j) {
            std::string name = cols[j];
            if (name.rfind("x_", 0) == 0) name.erase(0, 2);
            data.input_names.push_back(name);
        }
        data.target_name = cols.back();
        data.input_dim = cols.size() - 1;
    }

    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) {
            const char* begin = cell.c_str();
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin || *end != '\0')
                throw DataError(path.string() + ": non-numeric cell '" + cell + "' at line " +
                                std::to_string(line_no));
            vals.push_back(v);
        }
        if (vals.size() != data.input_dim + 1)
            throw DataError(path.string() + ": expected " + std::to_string(data.input_dim + 1) +
                            " cells but found " + std::to_string(vals.size()) + " at line " +
                            std::to_string(line_no));
        data.inputs.insert(data.inputs.end(), vals.begin(), vals.end() - 1);
        data.targets.push_back(vals.back());
        ++data.num_samples;
    }
    return data;
}

}  // namespace lrtf
