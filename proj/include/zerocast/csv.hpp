#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "zerocast/errors.hpp"
#include "zerocast/series.hpp"

namespace zerocast {

namespace detail {

inline double parse_double(std::string_view cell, const std::string& where) {
    double v = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto res = std::from_chars(cell.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw SchemaError("cannot parse number '" + std::string(cell) + "' " + where);
    }
    return v;
}

inline long long parse_int(std::string_view cell, const std::string& where) {
    long long v = 0;
    const auto* end = cell.data() + cell.size();
    const auto res = std::from_chars(cell.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw SchemaError("cannot parse integer '" + std::string(cell) + "' " + where);
    }
    return v;
}

// Shortest decimal representation that round-trips the double exactly.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace detail

/**
 * @brief Loads a long-format demand CSV (header id,t,value) into a Dataset.
 *
 * t must be a 1-based contiguous integer index per id; the frame parameters
 * come from the run configuration, not the file.
 */
inline Dataset load_csv(const std::string& path, const RunConfig& cfg) {
    cfg.validate();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open dataset file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw SchemaError("dataset file '" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "id,t,value") {
        throw SchemaError("dataset header must be 'id,t,value', got '" + line + "'");
    }

    Dataset ds;
    ds.freq = cfg.freq;
    ds.horizon = cfg.horizon;
    ds.context = cfg.context;
    ds.train_end = cfg.train_end;

    std::unordered_map<std::string, std::size_t> index;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = "at row " + std::to_string(row);

        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
            throw SchemaError("expected three columns " + where);
        }
        const std::string id = line.substr(0, c1);
        const std::string_view t_cell = std::string_view(line).substr(c1 + 1, c2 - c1 - 1);
        const std::string_view v_cell = std::string_view(line).substr(c2 + 1);
        if (id.empty()) throw SchemaError("empty id " + where);

        const long long t = detail::parse_int(t_cell, where);
        const double v = detail::parse_double(v_cell, where);
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw DomainError("negative or non-finite value for id '" + id + "' at t=" + std::to_string(t));
        }

        auto [it, inserted] = index.try_emplace(id, ds.series.size());
        if (inserted) ds.series.push_back(TimeSeries{id, {}});
        auto& values = ds.series[it->second].values;
        const long long expected = static_cast<long long>(values.size()) + 1;
        if (t < 1) throw IntegrityError("non-positive t=" + std::to_string(t) + " for id '" + id + "'");
        if (t < expected) {
            throw IntegrityError("duplicate or out-of-order t=" + std::to_string(t) + " for id '" + id + "'");
        }
        if (t > expected) {
            throw IntegrityError("gap in t for id '" + id + "': expected " + std::to_string(expected) +
                                 ", got " + std::to_string(t));
        }
        values.push_back(v);
    }

    ds.validate();
    return ds;
}

inline void write_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot open '" + path + "' for writing");
    out << "id,t,value\n";
    for (const auto& s : ds.series) {
        for (std::size_t k = 0; k < s.values.size(); ++k) {
            out << s.id << ',' << (k + 1) << ',' << detail::format_double(s.values[k]) << '\n';
        }
    }
    if (!out) throw SchemaError("failed writing '" + path + "'");
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    RunConfig cfg;
    try {
        cfg.freq = parse_freq(j.at("freq").get<std::string>());
        cfg.horizon = j.at("horizon").get<int>();
        cfg.context = j.at("context").get<int>();
        cfg.train_end = j.at("train_end").get<int>();
        cfg.batch_size = j.at("batch_size").get<int>();
        cfg.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("config file '" + path + "' is missing required keys: " + e.what());
    }
    cfg.validate();
    return cfg;
}

inline void save_run_config(const RunConfig& cfg, const std::string& path) {
    nlohmann::json j{
        {"freq", freq_name(cfg.freq)}, {"horizon", cfg.horizon},       {"context", cfg.context},
        {"train_end", cfg.train_end},  {"batch_size", cfg.batch_size}, {"seed", cfg.seed},
    };
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
}

} // namespace zerocast
