#pragma once
// Self-contained crypto primitives: SHA-256, HMAC-SHA256, AES-128/AES-256
// (encryption direction only; CTR and the rolling-code path never decrypt a
// block) and AES-CTR. No external library; every primitive is pinned to
// standard published test vectors in the test suite before anything that
// builds on it runs.

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>

#include "autoguardx/bytes.hpp"

namespace agx {

// ---------------------------------------------------------------------------
// SHA-256 (FIPS 180-4)
// ---------------------------------------------------------------------------

class Sha256 {
public:
    using Digest = std::array<uint8_t, 32>;

    Sha256() { reset(); }

    void reset() {
        state_ = {0x6A09E667u, 0xBB67AE85u, 0x3C6EF372u, 0xA54FF53Au,
                  0x510E527Fu, 0x9B05688Cu, 0x1F83D9ABu, 0x5BE0CD19u};
        total_ = 0;
        buffered_ = 0;
    }

    void update(std::span<const uint8_t> data) { update(data.data(), data.size()); }

    void update(const uint8_t* data, size_t len) {
        total_ += len;
        if (buffered_ > 0) {
            size_t take = std::min(len, size_t(64) - buffered_);
            std::memcpy(buf_.data() + buffered_, data, take);
            buffered_ += take;
            data += take;
            len -= take;
            if (buffered_ == 64) {
                compress(buf_.data());
                buffered_ = 0;
            }
        }
        while (len >= 64) {
            compress(data);
            data += 64;
            len -= 64;
        }
        if (len > 0) {
            std::memcpy(buf_.data(), data, len);
            buffered_ = len;
        }
    }

    Digest finish() {
        uint64_t bit_len = total_ * 8;
        uint8_t pad = 0x80;
        update(&pad, 1);
        static constexpr uint8_t zeros[64] = {};
        while (buffered_ != 56) update(zeros, buffered_ < 56 ? 56 - buffered_ : 64 - buffered_ + 56);
        uint8_t len_be[8];
        for (int i = 0; i < 8; ++i) len_be[i] = static_cast<uint8_t>(bit_len >> (56 - 8 * i));
        update(len_be, 8);
        Digest d;
        for (int i = 0; i < 8; ++i) {
            d[4 * i] = static_cast<uint8_t>(state_[i] >> 24);
            d[4 * i + 1] = static_cast<uint8_t>(state_[i] >> 16);
            d[4 * i + 2] = static_cast<uint8_t>(state_[i] >> 8);
            d[4 * i + 3] = static_cast<uint8_t>(state_[i]);
        }
        return d;
    }

    static Digest hash(std::span<const uint8_t> data) {
        Sha256 h;
        h.update(data);
        return h.finish();
    }

    // Mid-state access for HMAC pad precomputation.
    std::array<uint32_t, 8> state() const { return state_; }
    uint64_t total() const { return total_; }
    void restore(const std::array<uint32_t, 8>& st, uint64_t total) {
        state_ = st;
        total_ = total;
        buffered_ = 0;
    }

private:
    static uint32_t rotr(uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

    void compress(const uint8_t* block) {
        static constexpr uint32_t K[64] = {
            0x428A2F98u, 0x71374491u, 0xB5C0FBCFu, 0xE9B5DBA5u, 0x3956C25Bu, 0x59F111F1u,
            0x923F82A4u, 0xAB1C5ED5u, 0xD807AA98u, 0x12835B01u, 0x243185BEu, 0x550C7DC3u,
            0x72BE5D74u, 0x80DEB1FEu, 0x9BDC06A7u, 0xC19BF174u, 0xE49B69C1u, 0xEFBE4786u,
            0x0FC19DC6u, 0x240CA1CCu, 0x2DE92C6Fu, 0x4A7484AAu, 0x5CB0A9DCu, 0x76F988DAu,
            0x983E5152u, 0xA831C66Du, 0xB00327C8u, 0xBF597FC7u, 0xC6E00BF3u, 0xD5A79147u,
            0x06CA6351u, 0x14292967u, 0x27B70A85u, 0x2E1B2138u, 0x4D2C6DFCu, 0x53380D13u,
            0x650A7354u, 0x766A0ABBu, 0x81C2C92Eu, 0x92722C85u, 0xA2BFE8A1u, 0xA81A664Bu,
            0xC24B8B70u, 0xC76C51A3u, 0xD192E819u, 0xD6990624u, 0xF40E3585u, 0x106AA070u,
            0x19A4C116u, 0x1E376C08u, 0x2748774Cu, 0x34B0BCB5u, 0x391C0CB3u, 0x4ED8AA4Au,
            0x5B9CCA4Fu, 0x682E6FF3u, 0x748F82EEu, 0x78A5636Fu, 0x84C87814u, 0x8CC70208u,
            0x90BEFFFAu, 0xA4506CEBu, 0xBEF9A3F7u, 0xC67178F2u};
        uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (uint32_t(block[4 * i]) << 24) | (uint32_t(block[4 * i + 1]) << 16) |
                   (uint32_t(block[4 * i + 2]) << 8) | uint32_t(block[4 * i + 3]);
        for (int i = 16; i < 64; ++i) {
            uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        uint32_t a = state_[0], b = state_[1], c = state_[2], d = state_[3];
        uint32_t e = state_[4], f = state_[5], g = state_[6], h = state_[7];
        for (int i = 0; i < 64; ++i) {
            uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            uint32_t ch = (e & f) ^ (~e & g);
            uint32_t t1 = h + s1 + ch + K[i] + w[i];
            uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            uint32_t t2 = s0 + maj;
            h = g;
            g = f;
            f = e;
            e = d + t1;
            d = c;
            c = b;
            b = a;
            a = t1 + t2;
        }
        state_[0] += a;
        state_[1] += b;
        state_[2] += c;
        state_[3] += d;
        state_[4] += e;
        state_[5] += f;
        state_[6] += g;
        state_[7] += h;
    }

    std::array<uint32_t, 8> state_;
    std::array<uint8_t, 64> buf_;
    uint64_t total_ = 0;
    size_t buffered_ = 0;
};

// ---------------------------------------------------------------------------
// HMAC-SHA256 (RFC 2104). HmacKey precomputes the ipad/opad mid-states once
// per key; the per-frame MAC path then costs two compressions for short
// messages.
// ---------------------------------------------------------------------------

class HmacKey {
public:
    explicit HmacKey(std::span<const uint8_t> key) {
        std::array<uint8_t, 64> k{};
        if (key.size() > 64) {
            auto d = Sha256::hash(key);
            std::memcpy(k.data(), d.data(), d.size());
        } else {
            std::memcpy(k.data(), key.data(), key.size());
        }
        std::array<uint8_t, 64> pad;
        for (int i = 0; i < 64; ++i) pad[i] = k[i] ^ 0x36;
        Sha256 h;
        h.update(pad.data(), 64);
        inner_state_ = h.state();
        for (int i = 0; i < 64; ++i) pad[i] = k[i] ^ 0x5C;
        h.reset();
        h.update(pad.data(), 64);
        outer_state_ = h.state();
    }

    Sha256::Digest mac(std::span<const uint8_t> msg) const {
        Sha256 h;
        h.restore(inner_state_, 64);
        h.update(msg);
        auto inner = h.finish();
        h.restore(outer_state_, 64);
        h.update(inner);
        return h.finish();
    }

private:
    std::array<uint32_t, 8> inner_state_;
    std::array<uint32_t, 8> outer_state_;
};

inline Sha256::Digest hmac_sha256(std::span<const uint8_t> key, std::span<const uint8_t> msg) {
    return HmacKey(key).mac(msg);
}

// ---------------------------------------------------------------------------
// AES (FIPS 197), encryption direction, 128- and 256-bit keys.
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr uint8_t kAesSbox[256] = {
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16};

struct AesTables {
    uint32_t te0[256], te1[256], te2[256], te3[256];
    AesTables() {
        for (int i = 0; i < 256; ++i) {
            uint8_t s = kAesSbox[i];
            uint8_t s2 = static_cast<uint8_t>((s << 1) ^ ((s >> 7) * 0x1B));
            uint8_t s3 = static_cast<uint8_t>(s2 ^ s);
            te0[i] = (uint32_t(s2) << 24) | (uint32_t(s) << 16) | (uint32_t(s) << 8) | s3;
            te1[i] = (uint32_t(s3) << 24) | (uint32_t(s2) << 16) | (uint32_t(s) << 8) | s;
            te2[i] = (uint32_t(s) << 24) | (uint32_t(s3) << 16) | (uint32_t(s2) << 8) | s;
            te3[i] = (uint32_t(s) << 24) | (uint32_t(s) << 16) | (uint32_t(s3) << 8) | s2;
        }
    }
};

inline const AesTables& aes_tables() {
    static const AesTables t;
    return t;
}

}  // namespace detail

// Block cipher with a 128- or 256-bit key; encrypt-only.
class Aes {
public:
    Aes(std::span<const uint8_t> key) {
        if (key.size() == 16)
            rounds_ = 10;
        else if (key.size() == 32)
            rounds_ = 14;
        else
            throw std::invalid_argument("AES key must be 16 or 32 bytes");
        expand_key(key.data(), key.size());
    }

    std::array<uint8_t, 16> encrypt_block(std::span<const uint8_t> in) const {
        const auto& T = detail::aes_tables();
        uint32_t s0 = read_be32(in.data()) ^ rk_[0];
        uint32_t s1 = read_be32(in.data() + 4) ^ rk_[1];
        uint32_t s2 = read_be32(in.data() + 8) ^ rk_[2];
        uint32_t s3 = read_be32(in.data() + 12) ^ rk_[3];
        uint32_t t0, t1, t2, t3;
        const uint32_t* rk = rk_.data() + 4;
        for (int r = 1; r < rounds_; ++r, rk += 4) {
            t0 = T.te0[s0 >> 24] ^ T.te1[(s1 >> 16) & 0xFF] ^ T.te2[(s2 >> 8) & 0xFF] ^ T.te3[s3 & 0xFF] ^ rk[0];
            t1 = T.te0[s1 >> 24] ^ T.te1[(s2 >> 16) & 0xFF] ^ T.te2[(s3 >> 8) & 0xFF] ^ T.te3[s0 & 0xFF] ^ rk[1];
            t2 = T.te0[s2 >> 24] ^ T.te1[(s3 >> 16) & 0xFF] ^ T.te2[(s0 >> 8) & 0xFF] ^ T.te3[s1 & 0xFF] ^ rk[2];
            t3 = T.te0[s3 >> 24] ^ T.te1[(s0 >> 16) & 0xFF] ^ T.te2[(s1 >> 8) & 0xFF] ^ T.te3[s2 & 0xFF] ^ rk[3];
            s0 = t0;
            s1 = t1;
            s2 = t2;
            s3 = t3;
        }
        // Final round: SubBytes + ShiftRows + AddRoundKey, no MixColumns.
        auto sb = [](uint8_t b) { return detail::kAesSbox[b]; };
        std::array<uint8_t, 16> out;
        uint32_t o0 = (uint32_t(sb(s0 >> 24)) << 24) | (uint32_t(sb((s1 >> 16) & 0xFF)) << 16) |
                      (uint32_t(sb((s2 >> 8) & 0xFF)) << 8) | sb(s3 & 0xFF);
        uint32_t o1 = (uint32_t(sb(s1 >> 24)) << 24) | (uint32_t(sb((s2 >> 16) & 0xFF)) << 16) |
                      (uint32_t(sb((s3 >> 8) & 0xFF)) << 8) | sb(s0 & 0xFF);
        uint32_t o2 = (uint32_t(sb(s2 >> 24)) << 24) | (uint32_t(sb((s3 >> 16) & 0xFF)) << 16) |
                      (uint32_t(sb((s0 >> 8) & 0xFF)) << 8) | sb(s1 & 0xFF);
        uint32_t o3 = (uint32_t(sb(s3 >> 24)) << 24) | (uint32_t(sb((s0 >> 16) & 0xFF)) << 16) |
                      (uint32_t(sb((s1 >> 8) & 0xFF)) << 8) | sb(s2 & 0xFF);
        o0 ^= rk[0];
        o1 ^= rk[1];
        o2 ^= rk[2];
        o3 ^= rk[3];
        for (int i = 0; i < 4; ++i) {
            uint32_t w = (i == 0 ? o0 : i == 1 ? o1 : i == 2 ? o2 : o3);
            out[4 * i] = static_cast<uint8_t>(w >> 24);
            out[4 * i + 1] = static_cast<uint8_t>(w >> 16);
            out[4 * i + 2] = static_cast<uint8_t>(w >> 8);
            out[4 * i + 3] = static_cast<uint8_t>(w);
        }
        return out;
    }

private:
    void expand_key(const uint8_t* key, size_t len) {
        const int nk = static_cast<int>(len / 4);
        const int total = 4 * (rounds_ + 1);
        for (int i = 0; i < nk; ++i) rk_[i] = read_be32(key + 4 * i);
        uint32_t rcon = 0x01000000u;
        for (int i = nk; i < total; ++i) {
            uint32_t t = rk_[i - 1];
            if (i % nk == 0) {
                t = (t << 8) | (t >> 24);  // RotWord
                t = sub_word(t) ^ rcon;
                rcon = static_cast<uint32_t>((uint64_t(rcon >> 24) << 1 ^ ((rcon >> 31) * 0x1B)) << 24);
            } else if (nk == 8 && i % nk == 4) {
                t = sub_word(t);
            }
            rk_[i] = rk_[i - nk] ^ t;
        }
    }

    static uint32_t sub_word(uint32_t w) {
        return (uint32_t(detail::kAesSbox[w >> 24]) << 24) |
               (uint32_t(detail::kAesSbox[(w >> 16) & 0xFF]) << 16) |
               (uint32_t(detail::kAesSbox[(w >> 8) & 0xFF]) << 8) |
               detail::kAesSbox[w & 0xFF];
    }

    std::array<uint32_t, 60> rk_{};
    int rounds_;
};

// CTR keystream (NIST SP 800-38A): the 16-byte counter block starts at the
// nonce and increments big-endian over the whole block.
inline void aes_ctr_xor(const Aes& cipher, std::array<uint8_t, 16> counter,
                        std::span<const uint8_t> in, uint8_t* out) {
    size_t off = 0;
    while (off < in.size()) {
        auto ks = cipher.encrypt_block(counter);
        size_t n = std::min(in.size() - off, size_t(16));
        for (size_t i = 0; i < n; ++i) out[off + i] = in[off + i] ^ ks[i];
        off += n;
        for (int i = 15; i >= 0; --i) {
            if (++counter[i] != 0) break;
        }
    }
}

inline Bytes aes_ctr(const Aes& cipher, const std::array<uint8_t, 16>& nonce,
                     std::span<const uint8_t> in) {
    Bytes out(in.size());
    aes_ctr_xor(cipher, nonce, in, out.data());
    return out;
}

}  // namespace agx
