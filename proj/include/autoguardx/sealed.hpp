#pragma once
// Encrypt-then-MAC record sealing for the forensic store: AES-256-CTR under
// the encryption key, HMAC-SHA256 over nonce ‖ ciphertext under the MAC key.
// Nonces are salt(8B) ‖ sequence(8B BE), unique per record by construction.

#include <optional>
#include <stdexcept>

#include "autoguardx/bytes.hpp"
#include "autoguardx/crypto.hpp"

namespace agx {

struct IntegrityError : std::runtime_error {
    explicit IntegrityError(const std::string& what) : std::runtime_error(what) {}
};

struct EncryptedRecord {
    std::array<uint8_t, 16> nonce;
    Bytes ciphertext;
    std::array<uint8_t, 32> mac;

    Bytes serialize() const {
        Bytes out;
        out.reserve(48 + ciphertext.size());
        out.insert(out.end(), nonce.begin(), nonce.end());
        out.insert(out.end(), ciphertext.begin(), ciphertext.end());
        out.insert(out.end(), mac.begin(), mac.end());
        return out;
    }

    static std::optional<EncryptedRecord> parse(std::span<const uint8_t> wire) {
        if (wire.size() < 48) return std::nullopt;
        EncryptedRecord r;
        std::copy(wire.begin(), wire.begin() + 16, r.nonce.begin());
        r.ciphertext.assign(wire.begin() + 16, wire.end() - 32);
        std::copy(wire.end() - 32, wire.end(), r.mac.begin());
        return r;
    }
};

struct LogKeys {
    Bytes enc_key;  // 32B, AES-256
    Bytes mac_key;  // 32B
};

class RecordSealer {
public:
    RecordSealer(const LogKeys& keys, uint64_t nonce_salt)
        : cipher_(keys.enc_key), mac_(keys.mac_key), salt_(nonce_salt) {}

    EncryptedRecord seal(std::span<const uint8_t> plaintext) {
        EncryptedRecord rec;
        for (int i = 0; i < 8; ++i) rec.nonce[i] = static_cast<uint8_t>(salt_ >> (56 - 8 * i));
        for (int i = 0; i < 8; ++i) rec.nonce[8 + i] = static_cast<uint8_t>(seq_ >> (56 - 8 * i));
        ++seq_;
        rec.ciphertext = aes_ctr(cipher_, rec.nonce, plaintext);
        rec.mac = mac_over(mac_, rec);
        return rec;
    }

    uint64_t sealed_count() const { return seq_; }

    static Bytes open(const LogKeys& keys, const EncryptedRecord& rec) {
        Aes cipher(keys.enc_key);
        HmacKey mac(keys.mac_key);
        return open_with(cipher, mac, rec);
    }

    static Bytes open_with(const Aes& cipher, const HmacKey& mac, const EncryptedRecord& rec) {
        auto expect = mac_over(mac, rec);
        if (!ct_equal(expect, rec.mac)) throw IntegrityError("record MAC verification failed");
        return aes_ctr(cipher, rec.nonce, rec.ciphertext);
    }

private:
    static Sha256::Digest mac_over(const HmacKey& mac, const EncryptedRecord& rec) {
        Bytes msg(rec.nonce.begin(), rec.nonce.end());
        msg.insert(msg.end(), rec.ciphertext.begin(), rec.ciphertext.end());
        return mac.mac(msg);
    }

    Aes cipher_;
    HmacKey mac_;
    uint64_t salt_;
    uint64_t seq_ = 0;
};

}  // namespace agx
