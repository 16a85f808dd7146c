#pragma once
// All provisioned secrets in one bundle: segment MAC keys, fob rolling-code
// records, OBD/IoT device keys, the OTA signing key, and the log sealing
// keys. Serialized as hex-encoded JSON so a store written by `run` can be
// fed back to `verify-log`.

#include <fstream>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "autoguardx/bytes.hpp"
#include "autoguardx/rng.hpp"
#include "autoguardx/sealed.hpp"

namespace agx {

struct FobRecord {
    uint32_t fob_id;
    Bytes key;  // 16B AES-128
    uint64_t counter;
};

struct KeyStore {
    Bytes seg_key_critical;     // 32B
    Bytes seg_key_noncritical;  // 32B
    std::vector<FobRecord> fobs;
    std::unordered_map<uint32_t, Bytes> devices;  // 32B each
    Bytes ota_key;                                // 32B
    LogKeys log_keys;                             // 32B + 32B
    uint64_t nonce_salt = 0;

    static KeyStore derive(uint64_t seed) {
        KeyStore ks;
        auto fill = [&](const char* label, size_t n) {
            Bytes b(n);
            Rng::for_label(seed, label).fill(b.data(), n);
            return b;
        };
        ks.seg_key_critical = fill("keys/segment/critical", 32);
        ks.seg_key_noncritical = fill("keys/segment/noncritical", 32);
        ks.fobs.push_back({1, fill("keys/fob/1", 16), 0});
        ks.devices[0x00D1A601] = fill("keys/device/dealer-tool", 32);  // dealer diagnostic tool
        ks.devices[0x007E1E00] = fill("keys/device/telematics", 32);   // telematics unit
        ks.ota_key = fill("keys/ota", 32);
        ks.log_keys.enc_key = fill("keys/log/enc", 32);
        ks.log_keys.mac_key = fill("keys/log/mac", 32);
        ks.nonce_salt = Rng::for_label(seed, "keys/log/salt").next_u64();
        return ks;
    }

    const FobRecord& fob() const { return fobs.at(0); }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["segment_keys"] = {{"critical", to_hex(seg_key_critical)},
                             {"noncritical", to_hex(seg_key_noncritical)}};
        j["fobs"] = nlohmann::json::array();
        for (const FobRecord& f : fobs)
            j["fobs"].push_back({{"fob_id", f.fob_id}, {"key", to_hex(f.key)}, {"counter", f.counter}});
        j["devices"] = nlohmann::json::array();
        for (const auto& [id, key] : devices)
            j["devices"].push_back({{"device_id", id}, {"key", to_hex(key)}});
        j["ota_key"] = to_hex(ota_key);
        j["log_keys"] = {{"enc", to_hex(log_keys.enc_key)},
                         {"mac", to_hex(log_keys.mac_key)},
                         {"nonce_salt", nonce_salt}};
        return j;
    }

    static KeyStore from_json(const nlohmann::json& j) {
        KeyStore ks;
        ks.seg_key_critical = from_hex(j.at("segment_keys").at("critical").get<std::string>());
        ks.seg_key_noncritical = from_hex(j.at("segment_keys").at("noncritical").get<std::string>());
        for (const auto& f : j.at("fobs"))
            ks.fobs.push_back({f.at("fob_id").get<uint32_t>(),
                               from_hex(f.at("key").get<std::string>()),
                               f.at("counter").get<uint64_t>()});
        for (const auto& d : j.at("devices"))
            ks.devices[d.at("device_id").get<uint32_t>()] = from_hex(d.at("key").get<std::string>());
        ks.ota_key = from_hex(j.at("ota_key").get<std::string>());
        ks.log_keys.enc_key = from_hex(j.at("log_keys").at("enc").get<std::string>());
        ks.log_keys.mac_key = from_hex(j.at("log_keys").at("mac").get<std::string>());
        ks.nonce_salt = j.at("log_keys").at("nonce_salt").get<uint64_t>();
        return ks;
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write key file: " + path);
        out << to_json().dump(2) << '\n';
    }

    static KeyStore load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot read key file: " + path);
        nlohmann::json j;
        in >> j;
        return from_json(j);
    }
};

}  // namespace agx
