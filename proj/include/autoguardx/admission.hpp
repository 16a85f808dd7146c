#pragma once
// IoT-side gatekeeping: device admission to the vehicle network and OTA
// package verification. Both are keyed-HMAC checks; both report every
// refusal to the event stream.

#include <unordered_map>

#include "autoguardx/crypto.hpp"
#include "autoguardx/events.hpp"

namespace agx {

// proof = HMAC-SHA256(device_key, "JOIN" ‖ device_id 4B BE), full 32 bytes.
inline Sha256::Digest join_proof(const Bytes& device_key, uint32_t device_id) {
    Bytes msg{'J', 'O', 'I', 'N'};
    put_be32(msg, device_id);
    return hmac_sha256(device_key, msg);
}

class DeviceAdmission {
public:
    DeviceAdmission(Kernel& k, std::unordered_map<uint32_t, Bytes> allowlist, EventSink events)
        : kernel_(k), allowlist_(std::move(allowlist)), events_(std::move(events)) {}

    enum class Result : uint8_t { Admitted, Denied };

    Result admit(uint32_t device_id, std::span<const uint8_t> proof) {
        auto it = allowlist_.find(device_id);
        if (it != allowlist_.end()) {
            auto expect = join_proof(it->second, device_id);
            if (proof.size() == expect.size() && ct_equal(expect, proof)) return Result::Admitted;
        }
        if (events_)
            events_({EventClass::AdmissionDenied, Severity::Critical, kernel_.now(),
                     device_subject(device_id), {}});
        return Result::Denied;
    }

private:
    Kernel& kernel_;
    std::unordered_map<uint32_t, Bytes> allowlist_;
    EventSink events_;
};

// OTA packages carry a full HMAC-SHA256 signature.
inline Sha256::Digest ota_sign(const Bytes& ota_key, std::span<const uint8_t> package) {
    return hmac_sha256(ota_key, package);
}

class OtaVerifier {
public:
    OtaVerifier(Kernel& k, Bytes ota_key, EventSink events)
        : kernel_(k), key_(std::move(ota_key)), events_(std::move(events)) {}

    enum class Result : uint8_t { Valid, Invalid };

    Result verify(std::span<const uint8_t> package, std::span<const uint8_t> signature) {
        auto expect = ota_sign(key_, package);
        if (signature.size() == expect.size() && ct_equal(expect, signature)) return Result::Valid;
        if (events_)
            events_({EventClass::OtaRejected, Severity::Critical, kernel_.now(), "device:ota",
                     Bytes(signature.begin(), signature.end())});
        return Result::Invalid;
    }

private:
    Kernel& kernel_;
    Bytes key_;
    EventSink events_;
};

}  // namespace agx
