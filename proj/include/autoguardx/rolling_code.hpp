#pragma once
// Rolling-code keyless entry. The unlock code is AES-128 of
// counter(8B BE) ‖ fob_id(4B BE) ‖ pad(4B) under the shared fob key; the
// counter travels in the clear, the vehicle accepts only counters in
// (last, last+W] whose code recomputes. The pad field is zero for plain
// button presses and carries the challenge nonce fold during
// challenge-response unlock.

#include <array>
#include <cstdint>
#include <optional>

#include "autoguardx/bytes.hpp"
#include "autoguardx/crypto.hpp"

namespace agx {

constexpr uint32_t kDefaultWindow = 16;

struct RollingCodeState {
    Bytes key;                      // 16 bytes
    uint64_t counter = 0;           // vehicle: last accepted; fob: next to use
    uint32_t window = kDefaultWindow;
    uint32_t fob_id = 0;
};

struct KeyFobMessage {
    uint32_t fob_id;
    uint64_t counter;  // cleartext
    std::array<uint8_t, 16> code;
};

using CodePad = std::array<uint8_t, 4>;
constexpr CodePad kZeroPad{0, 0, 0, 0};

// Challenge nonces are 16 bytes; the spec'd binding folds their first 8
// bytes into the 4-byte pad field.
inline CodePad nonce_pad(std::span<const uint8_t> nonce) {
    CodePad p;
    for (int i = 0; i < 4; ++i) p[i] = nonce[i] ^ nonce[i + 4];
    return p;
}

inline std::array<uint8_t, 16> rolling_code(const Bytes& key, uint64_t counter, uint32_t fob_id,
                                            const CodePad& pad = kZeroPad) {
    std::array<uint8_t, 16> block;
    for (int i = 0; i < 8; ++i) block[i] = static_cast<uint8_t>(counter >> (56 - 8 * i));
    for (int i = 0; i < 4; ++i) block[8 + i] = static_cast<uint8_t>(fob_id >> (24 - 8 * i));
    for (int i = 0; i < 4; ++i) block[12 + i] = pad[i];
    return Aes(key).encrypt_block(block);
}

inline KeyFobMessage fob_generate(RollingCodeState& fob, const CodePad& pad = kZeroPad) {
    if (fob.counter == UINT64_MAX) throw std::runtime_error("rolling-code counter exhausted; fob needs re-provisioning");
    KeyFobMessage msg{fob.fob_id, fob.counter, rolling_code(fob.key, fob.counter, fob.fob_id, pad)};
    ++fob.counter;
    return msg;
}

enum class RollingVerdict : uint8_t { Accept, Replay, BadCode, WindowExceeded };

inline const char* rolling_verdict_name(RollingVerdict v) {
    switch (v) {
        case RollingVerdict::Accept: return "accept";
        case RollingVerdict::Replay: return "replay";
        case RollingVerdict::BadCode: return "bad_code";
        case RollingVerdict::WindowExceeded: return "window_exceeded";
    }
    return "?";
}

inline RollingVerdict vehicle_verify(RollingCodeState& vehicle, const KeyFobMessage& msg,
                                     const CodePad& pad = kZeroPad) {
    if (msg.fob_id != vehicle.fob_id) return RollingVerdict::BadCode;
    if (msg.counter <= vehicle.counter) return RollingVerdict::Replay;
    if (msg.counter > vehicle.counter + vehicle.window) return RollingVerdict::WindowExceeded;
    auto expect = rolling_code(vehicle.key, msg.counter, msg.fob_id, pad);
    if (!ct_equal(expect, msg.code)) return RollingVerdict::BadCode;
    vehicle.counter = msg.counter;
    return RollingVerdict::Accept;
}

// Wire layout: fob_id(4B BE) ‖ counter(8B BE) ‖ code(16B).
inline Bytes serialize(const KeyFobMessage& m) {
    Bytes out;
    out.reserve(28);
    put_be32(out, m.fob_id);
    put_be64(out, m.counter);
    out.insert(out.end(), m.code.begin(), m.code.end());
    return out;
}

inline std::optional<KeyFobMessage> parse_fob_message(std::span<const uint8_t> wire) {
    if (wire.size() != 28) return std::nullopt;
    KeyFobMessage m;
    m.fob_id = read_be32(wire.data());
    m.counter = read_be64(wire.data() + 4);
    std::copy(wire.begin() + 12, wire.end(), m.code.begin());
    return m;
}

}  // namespace agx
