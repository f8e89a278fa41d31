#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "zerocast/errors.hpp"
#include "zerocast/nets.hpp"

namespace zerocast {

// File layout: "ZCKP" magic, uint32 header length, JSON header describing the
// model and the parameter slices, then the raw little-endian double blob.
static_assert(std::endian::native == std::endian::little,
              "checkpoint blobs are little-endian");

inline constexpr std::string_view kCheckpointMagic = "ZCKP";
inline constexpr int kCheckpointVersion = 1;

inline void save_checkpoint(const Network& net, const std::string& path) {
    nlohmann::json header;
    header["version"] = kCheckpointVersion;
    header["model"] = model_name(net.spec.kind);
    header["head"] = head_name(net.spec.head);
    header["context"] = net.spec.context;
    header["horizon"] = net.spec.horizon;
    header["kernel"] = net.spec.kernel;
    auto slices = nlohmann::json::array();
    for (const auto& [name, s] : net.params.slices()) {
        slices.push_back({{"name", name}, {"len", s.len}});
    }
    header["params"] = slices;
    const std::string head_str = header.dump();

    const std::filesystem::path target(path);
    const std::filesystem::path tmp(path + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw SchemaError("cannot open '" + tmp.string() + "' for writing");
        out.write(kCheckpointMagic.data(), static_cast<std::streamsize>(kCheckpointMagic.size()));
        const auto len = static_cast<std::uint32_t>(head_str.size());
        out.write(reinterpret_cast<const char*>(&len), sizeof(len));
        out.write(head_str.data(), static_cast<std::streamsize>(head_str.size()));
        out.write(reinterpret_cast<const char*>(net.params.values.data()),
                  static_cast<std::streamsize>(net.params.values.size() * sizeof(double)));
        if (!out) throw SchemaError("failed writing checkpoint to '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, target);
}

inline Network load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open checkpoint '" + path + "'");

    char magic[4] = {};
    in.read(magic, 4);
    if (in.gcount() != 4 || std::string_view(magic, 4) != kCheckpointMagic) {
        throw SchemaError("'" + path + "' is not a checkpoint file");
    }
    std::uint32_t head_len = 0;
    in.read(reinterpret_cast<char*>(&head_len), sizeof(head_len));
    if (in.gcount() != sizeof(head_len) || head_len == 0 || head_len > (1u << 20)) {
        throw SchemaError("checkpoint '" + path + "' has an implausible header length");
    }
    std::string head_str(head_len, '\0');
    in.read(head_str.data(), head_len);
    if (in.gcount() != static_cast<std::streamsize>(head_len)) {
        throw SchemaError("checkpoint header in '" + path + "' is truncated");
    }

    Network net;
    try {
        const auto header = nlohmann::json::parse(head_str);
        const int version = header.at("version").get<int>();
        if (version != kCheckpointVersion) {
            throw SchemaError("unsupported checkpoint version " + std::to_string(version));
        }
        net.spec.kind = parse_model(header.at("model").get<std::string>());
        net.spec.head = parse_head(header.at("head").get<std::string>());
        net.spec.context = header.at("context").get<int>();
        net.spec.horizon = header.at("horizon").get<int>();
        net.spec.kernel = header.at("kernel").get<int>();
        for (const auto& entry : header.at("params")) {
            net.params.add_slice(entry.at("name").get<std::string>(),
                                 entry.at("len").get<std::size_t>());
        }
        net.spec.validate();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("invalid checkpoint header in '" + path + "': " + e.what());
    } catch (const ConfigError& e) {
        throw SchemaError("invalid checkpoint header in '" + path + "': " + e.what());
    } catch (const ShapeError& e) {
        throw SchemaError("invalid checkpoint header in '" + path + "': " + e.what());
    }

    const auto blob_bytes =
        static_cast<std::streamsize>(net.params.values.size() * sizeof(double));
    in.read(reinterpret_cast<char*>(net.params.values.data()), blob_bytes);
    if (in.gcount() != blob_bytes) {
        throw IntegrityError("checkpoint '" + path + "' parameter blob is truncated: expected " +
                             std::to_string(blob_bytes) + " bytes, got " +
                             std::to_string(in.gcount()));
    }
    in.peek();
    if (!in.eof()) {
        throw IntegrityError("checkpoint '" + path + "' has trailing bytes after the blob");
    }
    return net;
}

} // namespace zerocast
