#pragma once
// Incident logging and forensic analysis.  Every defense event becomes a
// SecurityEvent: sequence-numbered, SHA-256 chained to its predecessor, then
// sealed with encrypt-then-MAC before it touches the store.  Verification
// walks the chain and names the first record that fails; queries and the
// law-enforcement report refuse tampered stores.  The factory baseline logs
// the same events as readable lines — that contrast is what the data-theft
// scenario measures.

#include <algorithm>
#include <cctype>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "autoguardx/bytes.hpp"
#include "autoguardx/crypto.hpp"
#include "autoguardx/events.hpp"
#include "autoguardx/sealed.hpp"

namespace agx {

struct SecurityEvent {
    uint64_t seq = 0;
    Time time = 0;
    EventClass cls = EventClass::UnknownId;
    Severity severity = Severity::Info;
    std::string subject;
    Bytes evidence;
    Sha256::Digest prev_hash{};  // record 0 links to 32 zero bytes
    Sha256::Digest self_hash{};
};

// Hash over (seq ‖ time ‖ class ‖ subject ‖ evidence ‖ prev_hash) with
// length-prefixed variable fields, so distinct events can never collide by
// concatenation.
inline Sha256::Digest event_hash(uint64_t seq, Time time, EventClass cls,
                                 const std::string& subject, const Bytes& evidence,
                                 const Sha256::Digest& prev) {
    Bytes msg;
    msg.reserve(58 + subject.size() + evidence.size());
    put_be64(msg, seq);
    put_be64(msg, time);
    msg.push_back(static_cast<uint8_t>(cls));
    put_be32(msg, static_cast<uint32_t>(subject.size()));
    msg.insert(msg.end(), subject.begin(), subject.end());
    put_be32(msg, static_cast<uint32_t>(evidence.size()));
    msg.insert(msg.end(), evidence.begin(), evidence.end());
    msg.insert(msg.end(), prev.begin(), prev.end());
    return Sha256::hash(msg);
}

inline Bytes serialize_event(const SecurityEvent& e) {
    Bytes out;
    out.reserve(90 + e.subject.size() + e.evidence.size());
    put_be64(out, e.seq);
    put_be64(out, e.time);
    out.push_back(static_cast<uint8_t>(e.cls));
    out.push_back(static_cast<uint8_t>(e.severity));
    put_be32(out, static_cast<uint32_t>(e.subject.size()));
    out.insert(out.end(), e.subject.begin(), e.subject.end());
    put_be32(out, static_cast<uint32_t>(e.evidence.size()));
    out.insert(out.end(), e.evidence.begin(), e.evidence.end());
    out.insert(out.end(), e.prev_hash.begin(), e.prev_hash.end());
    out.insert(out.end(), e.self_hash.begin(), e.self_hash.end());
    return out;
}

inline std::optional<SecurityEvent> parse_event(std::span<const uint8_t> wire) {
    if (wire.size() < 90) return std::nullopt;
    SecurityEvent e;
    const uint8_t* p = wire.data();
    e.seq = read_be64(p);
    e.time = read_be64(p + 8);
    uint8_t cls = p[16], sev = p[17];
    if (cls > static_cast<uint8_t>(EventClass::AdaptiveUpdate) ||
        sev > static_cast<uint8_t>(Severity::Critical))
        return std::nullopt;
    e.cls = static_cast<EventClass>(cls);
    e.severity = static_cast<Severity>(sev);
    size_t off = 18;
    uint32_t subj_len = read_be32(p + off);
    off += 4;
    if (wire.size() < off + subj_len + 4) return std::nullopt;
    e.subject.assign(p + off, p + off + subj_len);
    off += subj_len;
    uint32_t ev_len = read_be32(p + off);
    off += 4;
    if (wire.size() != off + ev_len + 64) return std::nullopt;
    e.evidence.assign(p + off, p + off + ev_len);
    off += ev_len;
    std::copy(p + off, p + off + 32, e.prev_hash.begin());
    std::copy(p + off + 32, p + off + 64, e.self_hash.begin());
    return e;
}

// --- sealed store -----------------------------------------------------------

// Append-only container of sealed records.  On disk each record is framed
// with a big-endian u32 length; nothing else is stored in the clear.
class LogStore {
public:
    void append(EncryptedRecord rec) { records_.push_back(std::move(rec)); }

    const std::vector<EncryptedRecord>& records() const { return records_; }
    size_t size() const { return records_.size(); }

    Bytes serialize() const {
        Bytes out;
        for (const auto& r : records_) {
            Bytes wire = r.serialize();
            put_be32(out, static_cast<uint32_t>(wire.size()));
            out.insert(out.end(), wire.begin(), wire.end());
        }
        return out;
    }

    struct Loaded;
    static Loaded load(std::span<const uint8_t> image);

private:
    std::vector<EncryptedRecord> records_;
};

struct LogStore::Loaded {
    LogStore store;
    // Index of the record whose framing broke, when the image is cut or its
    // length prefixes are inconsistent.
    std::optional<uint64_t> framing_error;
};

inline LogStore::Loaded LogStore::load(std::span<const uint8_t> image) {
    Loaded out;
    size_t off = 0;
    uint64_t index = 0;
    while (off < image.size()) {
        if (off + 4 > image.size()) {
            out.framing_error = index;
            return out;
        }
        uint32_t len = read_be32(image.data() + off);
        off += 4;
        if (len > image.size() - off) {
            out.framing_error = index;
            return out;
        }
        auto rec = EncryptedRecord::parse(image.subspan(off, len));
        if (!rec) {
            out.framing_error = index;
            return out;
        }
        out.store.append(std::move(*rec));
        off += len;
        ++index;
    }
    return out;
}

// --- writing ----------------------------------------------------------------

// The single writer: assigns sequence numbers, maintains the running chain
// head, seals each event, appends.  A failed append throws — events are never
// silently dropped.
class EventLogger {
public:
    EventLogger(const LogKeys& keys, uint64_t nonce_salt) : sealer_(keys, nonce_salt) {}

    SecurityEvent log(const EventRecord& rec) {
        SecurityEvent e;
        e.seq = next_seq_++;
        e.time = rec.time;
        e.cls = rec.cls;
        e.severity = rec.severity;
        e.subject = rec.subject;
        e.evidence = rec.evidence;
        e.prev_hash = head_;
        e.self_hash = event_hash(e.seq, e.time, e.cls, e.subject, e.evidence, e.prev_hash);
        store_.append(sealer_.seal(serialize_event(e)));
        head_ = e.self_hash;
        return e;
    }

    const LogStore& store() const { return store_; }
    const Sha256::Digest& head_hash() const { return head_; }
    uint64_t count() const { return next_seq_; }

private:
    RecordSealer sealer_;
    LogStore store_;
    Sha256::Digest head_{};
    uint64_t next_seq_ = 0;
};

// --- verification and reading -----------------------------------------------

struct VerifyResult {
    bool intact = true;
    uint64_t first_bad_seq = 0;       // valid when !intact
    Sha256::Digest head_hash{};       // last self_hash; zeros for empty store

    static VerifyResult tampered_at(uint64_t seq) { return {false, seq, {}}; }
};

// Decrypts every record and recomputes seal, hashes, and linkage.  Returns
// the first failing sequence number; an untouched store comes back Intact
// with its chain head.
inline VerifyResult verify_chain(const LogStore& store, const LogKeys& keys) {
    Aes cipher(keys.enc_key);
    HmacKey mac(keys.mac_key);
    VerifyResult out;
    Sha256::Digest head{};
    for (uint64_t i = 0; i < store.records().size(); ++i) {
        Bytes plain;
        try {
            plain = RecordSealer::open_with(cipher, mac, store.records()[i]);
        } catch (const IntegrityError&) {
            return VerifyResult::tampered_at(i);
        }
        auto ev = parse_event(plain);
        if (!ev) return VerifyResult::tampered_at(i);
        if (ev->seq != i) return VerifyResult::tampered_at(i);
        if (ev->prev_hash != head) return VerifyResult::tampered_at(i);
        if (ev->self_hash !=
            event_hash(ev->seq, ev->time, ev->cls, ev->subject, ev->evidence, ev->prev_hash))
            return VerifyResult::tampered_at(i);
        head = ev->self_hash;
    }
    out.head_hash = head;
    return out;
}

// Convenience for stores arriving as raw bytes (files, exfiltrated images):
// framing damage is tampering at the record where the framing broke.
inline VerifyResult verify_image(std::span<const uint8_t> image, const LogKeys& keys) {
    auto loaded = LogStore::load(image);
    VerifyResult v = verify_chain(loaded.store, keys);
    if (v.intact && loaded.framing_error) return VerifyResult::tampered_at(*loaded.framing_error);
    return v;
}

struct QueryFilter {
    Time from = 0;                                  // inclusive
    Time to = std::numeric_limits<Time>::max();     // exclusive
    std::optional<std::set<EventClass>> classes;    // no set → all classes
    std::optional<std::string> subject;             // exact match
};

// Returns matching events in seq order.  A tampered store is refused unless
// the caller explicitly overrides, in which case unreadable records are
// skipped (best-effort triage).
inline std::vector<SecurityEvent> query(const LogStore& store, const LogKeys& keys,
                                        const QueryFilter& filter,
                                        bool override_tampered = false) {
    VerifyResult v = verify_chain(store, keys);
    if (!v.intact && !override_tampered)
        throw IntegrityError("store tampered at seq " + std::to_string(v.first_bad_seq));
    Aes cipher(keys.enc_key);
    HmacKey mac(keys.mac_key);
    std::vector<SecurityEvent> out;
    for (const auto& rec : store.records()) {
        Bytes plain;
        try {
            plain = RecordSealer::open_with(cipher, mac, rec);
        } catch (const IntegrityError&) {
            continue;  // only reachable under override
        }
        auto ev = parse_event(plain);
        if (!ev) continue;
        if (ev->time < filter.from || ev->time >= filter.to) continue;
        if (filter.classes && !filter.classes->count(ev->cls)) continue;
        if (filter.subject && ev->subject != *filter.subject) continue;
        out.push_back(std::move(*ev));
    }
    return out;
}

// Law-enforcement report: a deterministic JSON document carrying the incident
// timeline and the chain head for authenticity.  Evidence bytes appear only
// as SHA-256 digests.
inline std::string export_report(const LogStore& store, const LogKeys& keys, Time from,
                                 Time to) {
    VerifyResult v = verify_chain(store, keys);
    if (!v.intact)
        throw IntegrityError("refusing report: store tampered at seq " +
                             std::to_string(v.first_bad_seq));
    QueryFilter filter;
    filter.from = from;
    filter.to = to;
    auto events = query(store, keys, filter);

    nlohmann::ordered_json doc;
    doc["document"] = "vehicle_incident_report";
    doc["chain_head"] = to_hex(v.head_hash);
    doc["window"] = {{"from_us", from}, {"to_us", to}};
    doc["event_count"] = events.size();
    auto& timeline = doc["timeline"] = nlohmann::ordered_json::array();
    for (const auto& e : events) {
        nlohmann::ordered_json row;
        row["seq"] = e.seq;
        row["time_us"] = e.time;
        row["class"] = event_class_name(e.cls);
        row["severity"] = severity_name(e.severity);
        row["subject"] = e.subject;
        row["evidence_sha256"] = to_hex(Sha256::hash(e.evidence));
        timeline.push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
}

// --- factory baseline -------------------------------------------------------

// One readable line per event, the way an unhardened logger writes them.
// Non-printable evidence bytes are dotted out; everything else — including
// the event class in capitals — sits in the clear.
inline std::string plain_log_line(const EventRecord& e) {
    std::string cls = event_class_name(e.cls);
    for (char& c : cls) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    std::string line = std::to_string(e.time) + " " + cls + " " + e.subject;
    if (!e.evidence.empty()) {
        line += " ";
        for (uint8_t b : e.evidence)
            line += (b >= 0x20 && b < 0x7F) ? static_cast<char>(b) : '.';
    }
    line += "\n";
    return line;
}

class PlainLog {
public:
    void log(const EventRecord& e) {
        std::string line = plain_log_line(e);
        buf_.insert(buf_.end(), line.begin(), line.end());
        ++count_;
    }

    const Bytes& bytes() const { return buf_; }
    uint64_t count() const { return count_; }

private:
    Bytes buf_;
    uint64_t count_ = 0;
};

}  // namespace agx
