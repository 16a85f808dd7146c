#pragma once
// Declarative scenario scripts.  A scenario names a fleet subset, a defense
// mode, owner activity, and a schedule of labeled attacks; the runner turns
// one into a full simulation per vehicle profile.  Configs round-trip through
// JSON with fail-closed validation — any unknown key or out-of-range value is
// an error that names the offending fields — and hash canonically so a report
// can prove which config produced it.

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "autoguardx/attacks.hpp"
#include "autoguardx/crypto.hpp"
#include "autoguardx/ids.hpp"
#include "autoguardx/profiles.hpp"

namespace agx {

enum class RunMode : uint8_t { Factory, AutoGuardX };

inline const char* run_mode_name(RunMode m) {
    return m == RunMode::Factory ? "factory" : "autoguardx";
}

inline std::optional<RunMode> parse_run_mode(const std::string& s) {
    if (s == "factory") return RunMode::Factory;
    if (s == "autoguardx") return RunMode::AutoGuardX;
    return std::nullopt;
}

inline std::optional<AttackKind> parse_attack_kind(const std::string& s) {
    static constexpr AttackKind kAll[] = {
        AttackKind::RfReplay,        AttackKind::RfRelay,    AttackKind::CanInjection,
        AttackKind::CanFlood,        AttackKind::ObdReprogram,
        AttackKind::UsbExfiltration, AttackKind::GlassBreak, AttackKind::FobSpoof,
    };
    for (AttackKind k : kAll)
        if (s == attack_kind_name(k)) return k;
    return std::nullopt;
}

// Validation failure carrying the full list of offending fields.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(std::vector<std::string> fields)
        : std::runtime_error(join(fields)), fields_(std::move(fields)) {}

    const std::vector<std::string>& fields() const { return fields_; }

private:
    static std::string join(const std::vector<std::string>& fields) {
        std::string msg = "invalid scenario config:";
        for (const auto& f : fields) {
            msg += "\n  - ";
            msg += f;
        }
        return msg;
    }
    std::vector<std::string> fields_;
};

// Optional overrides onto the detector defaults.
struct ThresholdOverrides {
    std::optional<double> z_max;
    std::optional<double> flood_rate_fps;
    std::optional<double> vib_sigma_factor;
    std::optional<int> payload_margin;
    std::optional<Time> inspect_cost_us;

    bool any() const {
        return z_max || flood_rate_fps || vib_sigma_factor || payload_margin || inspect_cost_us;
    }

    void apply(IdsConfig& cfg) const {
        if (z_max) cfg.z_max = *z_max;
        if (flood_rate_fps) cfg.flood_rate_fps = *flood_rate_fps;
        if (vib_sigma_factor) cfg.vib_sigma_factor = *vib_sigma_factor;
        if (payload_margin) cfg.payload_margin = *payload_margin;
        if (inspect_cost_us) cfg.inspect_cost = *inspect_cost_us;
    }
};

struct ScenarioConfig {
    std::string name;
    uint64_t seed = 1;
    double duration_s = 90.0;
    double warmup_s = 60.0;
    RunMode mode = RunMode::AutoGuardX;
    std::vector<std::string> fleet;         // profile names, see profiles.hpp
    std::vector<double> owner_presses_s;    // genuine fob presses
    double background_fps = 0.0;            // extra telemetry load, 0 = none
    std::vector<AttackInstance> attacks;
    ThresholdOverrides thresholds;
    std::optional<Geofence> fence;

    Time duration() const { return seconds(duration_s); }
    Time warmup() const { return seconds(warmup_s); }

    void validate() const;
    nlohmann::json to_json() const;
    static ScenarioConfig from_json(const nlohmann::json& j);
    static ScenarioConfig load(const std::string& path);
    void save(const std::string& path) const;

    // SHA-256 of the canonical (sorted-key) JSON form; reports embed it.
    std::string canonical_sha256() const {
        const std::string dump = to_json().dump();
        Sha256 h;
        h.update(reinterpret_cast<const uint8_t*>(dump.data()), dump.size());
        return to_hex(h.finish());
    }
};

// --- validation -----------------------------------------------------------

namespace config_detail {

struct FieldErrors {
    std::vector<std::string> list;
    void fail(const std::string& path, const std::string& why) { list.push_back(path + ": " + why); }
    void throw_if_any() const {
        if (!list.empty()) throw ScenarioError(list);
    }
};

template <typename Keys>
inline bool known_key(const std::string& key, const Keys& allowed) {
    for (const char* a : allowed)
        if (key == a) return true;
    return false;
}

inline bool known_key(const std::string& key, std::initializer_list<const char*> allowed) {
    return known_key<std::initializer_list<const char*>>(key, allowed);
}

inline void check_keys(const nlohmann::json& obj, const std::string& path,
                       std::initializer_list<const char*> allowed, FieldErrors& errs) {
    for (const auto& [key, value] : obj.items())
        if (!known_key(key, allowed)) errs.fail(path + "." + key, "unknown key");
}

inline std::optional<double> get_number(const nlohmann::json& obj, const char* key,
                                        const std::string& path, FieldErrors& errs) {
    if (!obj.contains(key)) return std::nullopt;
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        errs.fail(path + "." + key, "must be a number");
        return std::nullopt;
    }
    return v.get<double>();
}

// Ids and device ids read as plain integers or "0x..." strings.
inline std::optional<uint64_t> get_uint(const nlohmann::json& obj, const char* key,
                                        const std::string& path, FieldErrors& errs) {
    if (!obj.contains(key)) return std::nullopt;
    const auto& v = obj.at(key);
    if (v.is_number_unsigned()) return v.get<uint64_t>();
    if (v.is_number_integer()) {  // nlohmann stores literal 7 as signed
        const int64_t n = v.get<int64_t>();
        if (n >= 0) return static_cast<uint64_t>(n);
        errs.fail(path + "." + key, "must be >= 0");
        return std::nullopt;
    }
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0) {
            try {
                size_t used = 0;
                uint64_t parsed = std::stoull(s.substr(2), &used, 16);
                if (used == s.size() - 2) return parsed;
            } catch (const std::exception&) {
            }
        }
        errs.fail(path + "." + key, "must be an unsigned integer or 0x-hex string");
        return std::nullopt;
    }
    errs.fail(path + "." + key, "must be an unsigned integer or 0x-hex string");
    return std::nullopt;
}

inline std::optional<std::string> get_string(const nlohmann::json& obj, const char* key,
                                             const std::string& path, FieldErrors& errs) {
    if (!obj.contains(key)) return std::nullopt;
    const auto& v = obj.at(key);
    if (!v.is_string()) {
        errs.fail(path + "." + key, "must be a string");
        return std::nullopt;
    }
    return v.get<std::string>();
}

// Per-kind parameter contract: which keys an attack object may carry beyond
// kind / ground_truth_id / start_s, and which of those it must carry.
struct AttackParamSpec {
    std::vector<const char*> allowed;
    std::vector<const char*> required;
};

inline AttackParamSpec attack_params(AttackKind k) {
    switch (k) {
        case AttackKind::RfReplay:
            return {{"capture_press_s"}, {"capture_press_s"}};
        case AttackKind::RfRelay:
            return {{"added_rtt_us", "duration_s"}, {"added_rtt_us", "duration_s"}};
        case AttackKind::CanInjection:
            return {{"target_id", "payload_hex", "rate_fps", "duration_s", "segment"},
                    {"target_id", "payload_hex", "rate_fps", "duration_s"}};
        case AttackKind::CanFlood:
            return {{"rate_fps", "duration_s", "segment"}, {"rate_fps", "duration_s"}};
        case AttackKind::ObdReprogram:
            return {{"device_id"}, {"device_id"}};
        case AttackKind::UsbExfiltration:
            return {{"device_id"}, {}};
        case AttackKind::GlassBreak:
            return {{"peak_g", "duration_s"}, {"peak_g", "duration_s"}};
        case AttackKind::FobSpoof:
            return {{"attempts", "interval_s", "capture_press_s"}, {"attempts", "interval_s"}};
    }
    return {{}, {}};
}

}  // namespace config_detail

inline void ScenarioConfig::validate() const {
    using config_detail::FieldErrors;
    FieldErrors errs;

    if (name.empty()) errs.fail("name", "must not be empty");
    if (warmup_s < 60.0) errs.fail("warmup_s", "detector warm-up needs at least 60 s");
    if (duration_s <= warmup_s) errs.fail("duration_s", "must exceed warmup_s");
    if (background_fps < 0.0) errs.fail("background_fps", "must be >= 0");

    if (fleet.empty()) errs.fail("fleet", "must list at least one vehicle profile");
    const auto known = test_fleet();
    std::vector<std::string> seen;
    for (size_t i = 0; i < fleet.size(); ++i) {
        const std::string path = "fleet[" + std::to_string(i) + "]";
        bool found = false;
        for (const BrandProfile& p : known) found = found || p.name == fleet[i];
        if (!found) errs.fail(path, "unknown vehicle profile '" + fleet[i] + "'");
        for (const std::string& s : seen)
            if (s == fleet[i]) errs.fail(path, "duplicate profile");
        seen.push_back(fleet[i]);
    }

    for (size_t i = 0; i < owner_presses_s.size(); ++i)
        if (owner_presses_s[i] < 0.0 || owner_presses_s[i] >= duration_s)
            errs.fail("owner_presses_s[" + std::to_string(i) + "]",
                      "must lie within the scenario duration");

    std::vector<std::string> gt_ids;
    for (size_t i = 0; i < attacks.size(); ++i) {
        const AttackInstance& a = attacks[i];
        const std::string path = "attacks[" + std::to_string(i) + "]";
        if (a.ground_truth_id.empty()) errs.fail(path + ".ground_truth_id", "must not be empty");
        for (const std::string& g : gt_ids)
            if (g == a.ground_truth_id) errs.fail(path + ".ground_truth_id", "duplicate id");
        gt_ids.push_back(a.ground_truth_id);

        if (a.start < warmup()) errs.fail(path + ".start_s", "attack must start after warm-up");
        if (a.start >= duration()) errs.fail(path + ".start_s", "attack must start before the end");

        switch (a.kind) {
            case AttackKind::RfReplay:
                if (a.capture_at == 0 || a.capture_at >= a.start)
                    errs.fail(path + ".capture_press_s", "must precede the replay start");
                break;
            case AttackKind::RfRelay:
                if (a.added_rtt == 0) errs.fail(path + ".added_rtt_us", "must be positive");
                if (a.duration == 0) errs.fail(path + ".duration_s", "must be positive");
                break;
            case AttackKind::CanInjection:
                if (a.target_id > kMaxCanId) errs.fail(path + ".target_id", "exceeds 11 bits");
                if (a.payload.empty() || a.payload.size() > kMaxDlc)
                    errs.fail(path + ".payload_hex", "must encode 1..8 bytes");
                if (a.rate_fps <= 0.0) errs.fail(path + ".rate_fps", "must be positive");
                if (a.duration == 0) errs.fail(path + ".duration_s", "must be positive");
                break;
            case AttackKind::CanFlood:
                if (a.rate_fps < 1.0) errs.fail(path + ".rate_fps", "must be >= 1");
                if (a.duration == 0) errs.fail(path + ".duration_s", "must be positive");
                break;
            case AttackKind::ObdReprogram:
                if (a.device_id == 0) errs.fail(path + ".device_id", "must be nonzero");
                break;
            case AttackKind::UsbExfiltration:
                break;
            case AttackKind::GlassBreak:
                if (a.peak_g <= 0.0) errs.fail(path + ".peak_g", "must be positive");
                if (a.duration == 0) errs.fail(path + ".duration_s", "must be positive");
                break;
            case AttackKind::FobSpoof:
                if (a.attempts < 1) errs.fail(path + ".attempts", "must be >= 1");
                if (a.interval == 0) errs.fail(path + ".interval_s", "must be positive");
                if (a.capture_at != 0 && a.capture_at >= a.start)
                    errs.fail(path + ".capture_press_s", "must precede the spoof start");
                break;
        }
    }

    if (thresholds.z_max && *thresholds.z_max <= 0.0) errs.fail("thresholds.z_max", "must be positive");
    if (thresholds.flood_rate_fps && *thresholds.flood_rate_fps <= 0.0)
        errs.fail("thresholds.flood_rate_fps", "must be positive");
    if (thresholds.vib_sigma_factor && *thresholds.vib_sigma_factor <= 0.0)
        errs.fail("thresholds.vib_sigma_factor", "must be positive");
    if (thresholds.payload_margin && *thresholds.payload_margin < 0)
        errs.fail("thresholds.payload_margin", "must be >= 0");
    if (thresholds.inspect_cost_us && *thresholds.inspect_cost_us == 0)
        errs.fail("thresholds.inspect_cost_us", "must be positive");

    if (fence && fence->radius_m <= 0.0) errs.fail("fence.radius_m", "must be positive");

    errs.throw_if_any();
}

inline nlohmann::json ScenarioConfig::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["seed"] = seed;
    j["duration_s"] = duration_s;
    j["warmup_s"] = warmup_s;
    j["mode"] = run_mode_name(mode);
    j["fleet"] = fleet;
    j["owner_presses_s"] = owner_presses_s;
    if (background_fps > 0.0) j["background_fps"] = background_fps;

    j["attacks"] = nlohmann::json::array();
    for (const AttackInstance& a : attacks) {
        nlohmann::json ja;
        ja["kind"] = attack_kind_name(a.kind);
        ja["ground_truth_id"] = a.ground_truth_id;
        ja["start_s"] = static_cast<double>(a.start) / 1e6;
        switch (a.kind) {
            case AttackKind::RfReplay:
                ja["capture_press_s"] = static_cast<double>(a.capture_at) / 1e6;
                break;
            case AttackKind::RfRelay:
                ja["added_rtt_us"] = a.added_rtt;
                ja["duration_s"] = static_cast<double>(a.duration) / 1e6;
                break;
            case AttackKind::CanInjection:
                ja["target_id"] = a.target_id;
                ja["payload_hex"] = to_hex(a.payload);
                ja["rate_fps"] = a.rate_fps;
                ja["duration_s"] = static_cast<double>(a.duration) / 1e6;
                ja["segment"] = segment_name(a.segment);
                break;
            case AttackKind::CanFlood:
                ja["rate_fps"] = a.rate_fps;
                ja["duration_s"] = static_cast<double>(a.duration) / 1e6;
                ja["segment"] = segment_name(a.segment);
                break;
            case AttackKind::ObdReprogram:
            case AttackKind::UsbExfiltration:
                ja["device_id"] = a.device_id;
                break;
            case AttackKind::GlassBreak:
                ja["peak_g"] = a.peak_g;
                ja["duration_s"] = static_cast<double>(a.duration) / 1e6;
                break;
            case AttackKind::FobSpoof:
                ja["attempts"] = a.attempts;
                ja["interval_s"] = static_cast<double>(a.interval) / 1e6;
                if (a.capture_at != 0)
                    ja["capture_press_s"] = static_cast<double>(a.capture_at) / 1e6;
                break;
        }
        j["attacks"].push_back(std::move(ja));
    }

    if (thresholds.any()) {
        nlohmann::json jt;
        if (thresholds.z_max) jt["z_max"] = *thresholds.z_max;
        if (thresholds.flood_rate_fps) jt["flood_rate_fps"] = *thresholds.flood_rate_fps;
        if (thresholds.vib_sigma_factor) jt["vib_sigma_factor"] = *thresholds.vib_sigma_factor;
        if (thresholds.payload_margin) jt["payload_margin"] = *thresholds.payload_margin;
        if (thresholds.inspect_cost_us) jt["inspect_cost_us"] = *thresholds.inspect_cost_us;
        j["thresholds"] = std::move(jt);
    }
    if (fence)
        j["fence"] = {{"lat", fence->lat_deg}, {"lon", fence->lon_deg}, {"radius_m", fence->radius_m}};
    return j;
}

inline ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j) {
    using namespace config_detail;
    FieldErrors errs;
    ScenarioConfig c;

    if (!j.is_object()) {
        errs.fail("$", "config must be a JSON object");
        errs.throw_if_any();
    }
    check_keys(j, "$",
               {"name", "seed", "duration_s", "warmup_s", "mode", "fleet", "owner_presses_s",
                "background_fps", "attacks", "thresholds", "fence"},
               errs);

    if (auto v = get_string(j, "name", "$", errs)) c.name = *v;
    if (auto v = get_uint(j, "seed", "$", errs)) c.seed = *v;
    if (auto v = get_number(j, "duration_s", "$", errs)) c.duration_s = *v;
    if (auto v = get_number(j, "warmup_s", "$", errs)) c.warmup_s = *v;
    if (auto v = get_number(j, "background_fps", "$", errs)) c.background_fps = *v;
    if (auto v = get_string(j, "mode", "$", errs)) {
        if (auto m = parse_run_mode(*v))
            c.mode = *m;
        else
            errs.fail("$.mode", "must be \"factory\" or \"autoguardx\"");
    }

    if (j.contains("fleet")) {
        if (!j.at("fleet").is_array())
            errs.fail("$.fleet", "must be an array of profile names");
        else
            for (const auto& e : j.at("fleet")) {
                if (e.is_string())
                    c.fleet.push_back(e.get<std::string>());
                else
                    errs.fail("$.fleet", "entries must be strings");
            }
    }
    if (j.contains("owner_presses_s")) {
        if (!j.at("owner_presses_s").is_array())
            errs.fail("$.owner_presses_s", "must be an array of numbers");
        else
            for (const auto& e : j.at("owner_presses_s")) {
                if (e.is_number())
                    c.owner_presses_s.push_back(e.get<double>());
                else
                    errs.fail("$.owner_presses_s", "entries must be numbers");
            }
    }

    if (j.contains("attacks")) {
        if (!j.at("attacks").is_array()) {
            errs.fail("$.attacks", "must be an array");
        } else {
            size_t i = 0;
            for (const auto& ja : j.at("attacks")) {
                const std::string path = "attacks[" + std::to_string(i++) + "]";
                if (!ja.is_object()) {
                    errs.fail(path, "must be an object");
                    continue;
                }
                AttackInstance a;
                auto kind_str = get_string(ja, "kind", path, errs);
                if (!kind_str) {
                    errs.fail(path + ".kind", "required");
                    continue;
                }
                auto kind = parse_attack_kind(*kind_str);
                if (!kind) {
                    errs.fail(path + ".kind", "unknown attack kind '" + *kind_str + "'");
                    continue;
                }
                a.kind = *kind;

                const AttackParamSpec spec = attack_params(a.kind);
                for (const auto& [key, value] : ja.items()) {
                    if (known_key(key, {"kind", "ground_truth_id", "start_s"})) continue;
                    if (!known_key(key, spec.allowed))
                        errs.fail(path + "." + key,
                                  std::string("not a parameter of ") + attack_kind_name(a.kind));
                }
                for (const char* req : spec.required)
                    if (!ja.contains(req)) errs.fail(path + "." + req, "required");

                if (auto v = get_string(ja, "ground_truth_id", path, errs))
                    a.ground_truth_id = *v;
                else
                    errs.fail(path + ".ground_truth_id", "required");
                if (auto v = get_number(ja, "start_s", path, errs))
                    a.start = seconds(*v);
                else
                    errs.fail(path + ".start_s", "required");

                if (auto v = get_number(ja, "capture_press_s", path, errs)) a.capture_at = seconds(*v);
                if (auto v = get_uint(ja, "added_rtt_us", path, errs)) a.added_rtt = *v;
                if (auto v = get_number(ja, "duration_s", path, errs)) a.duration = seconds(*v);
                if (auto v = get_uint(ja, "target_id", path, errs))
                    a.target_id = static_cast<uint16_t>(*v);
                if (auto v = get_string(ja, "payload_hex", path, errs)) {
                    try {
                        a.payload = from_hex(*v);
                    } catch (const std::exception&) {
                        errs.fail(path + ".payload_hex", "must be an even-length hex string");
                    }
                }
                if (auto v = get_number(ja, "rate_fps", path, errs)) a.rate_fps = *v;
                if (auto v = get_string(ja, "segment", path, errs)) {
                    if (*v == "critical")
                        a.segment = Segment::Critical;
                    else if (*v == "noncritical")
                        a.segment = Segment::NonCritical;
                    else
                        errs.fail(path + ".segment", "must be \"critical\" or \"noncritical\"");
                } else if (a.kind == AttackKind::CanFlood) {
                    a.segment = Segment::NonCritical;
                }
                if (auto v = get_uint(ja, "device_id", path, errs))
                    a.device_id = static_cast<uint32_t>(*v);
                if (a.kind == AttackKind::UsbExfiltration && a.device_id == 0)
                    a.device_id = 0xDA7A0001;  // generic grab tool
                if (auto v = get_number(ja, "peak_g", path, errs)) a.peak_g = *v;
                if (auto v = get_uint(ja, "attempts", path, errs)) a.attempts = static_cast<int>(*v);
                if (auto v = get_number(ja, "interval_s", path, errs)) a.interval = seconds(*v);

                c.attacks.push_back(std::move(a));
            }
        }
    }

    if (j.contains("thresholds")) {
        const auto& jt = j.at("thresholds");
        if (!jt.is_object()) {
            errs.fail("$.thresholds", "must be an object");
        } else {
            check_keys(jt, "thresholds",
                       {"z_max", "flood_rate_fps", "vib_sigma_factor", "payload_margin",
                        "inspect_cost_us"},
                       errs);
            if (auto v = get_number(jt, "z_max", "thresholds", errs)) c.thresholds.z_max = *v;
            if (auto v = get_number(jt, "flood_rate_fps", "thresholds", errs))
                c.thresholds.flood_rate_fps = *v;
            if (auto v = get_number(jt, "vib_sigma_factor", "thresholds", errs))
                c.thresholds.vib_sigma_factor = *v;
            if (auto v = get_uint(jt, "payload_margin", "thresholds", errs))
                c.thresholds.payload_margin = static_cast<int>(*v);
            if (auto v = get_uint(jt, "inspect_cost_us", "thresholds", errs))
                c.thresholds.inspect_cost_us = *v;
        }
    }

    if (j.contains("fence")) {
        const auto& jf = j.at("fence");
        if (!jf.is_object()) {
            errs.fail("$.fence", "must be an object");
        } else {
            check_keys(jf, "fence", {"lat", "lon", "radius_m"}, errs);
            Geofence f;
            if (auto v = get_number(jf, "lat", "fence", errs)) f.lat_deg = *v;
            if (auto v = get_number(jf, "lon", "fence", errs)) f.lon_deg = *v;
            if (auto v = get_number(jf, "radius_m", "fence", errs)) f.radius_m = *v;
            c.fence = f;
        }
    }

    errs.throw_if_any();
    c.validate();
    return c;
}

inline ScenarioConfig ScenarioConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError({path + ": cannot open file"});
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError({path + ": " + e.what()});
    }
    return from_json(j);
}

inline void ScenarioConfig::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write scenario file: " + path);
    out << to_json().dump(2) << '\n';
}

// --- bundled evaluation scenarios -----------------------------------------

inline std::vector<std::string> all_profile_names() {
    std::vector<std::string> names;
    for (const BrandProfile& p : test_fleet()) names.push_back(p.name);
    return names;
}

// The nine vehicles whose headlight cavity reaches the CAN harness.
inline std::vector<std::string> harness_exposed_profile_names() {
    std::vector<std::string> names;
    for (const BrandProfile& p : test_fleet())
        if (p.headlight_harness_exposed) names.push_back(p.name);
    return names;
}

namespace builtin {

inline AttackInstance door_injection(const char* gt, double start_s) {
    AttackInstance a;
    a.kind = AttackKind::CanInjection;
    a.ground_truth_id = gt;
    a.start = seconds(start_s);
    a.target_id = kDoorCommandId;
    a.payload = {kDoorUnlockByte, 0xFF, 0xFF, 0xFF};
    a.rate_fps = 20.0;
    a.duration = seconds(1.0);
    a.segment = Segment::Critical;
    return a;
}

inline ScenarioConfig obd_exploit() {
    ScenarioConfig c;
    c.name = "obd_exploit";
    c.seed = 101;
    c.duration_s = 75.0;
    c.fleet = all_profile_names();
    AttackInstance a;
    a.kind = AttackKind::ObdReprogram;
    a.ground_truth_id = "obd-1";
    a.start = seconds(70.0);
    a.device_id = 0x0BAD0001;
    c.attacks.push_back(std::move(a));
    return c;
}

inline ScenarioConfig fob_replay() {
    ScenarioConfig c;
    c.name = "fob_replay";
    c.seed = 102;
    c.duration_s = 80.0;
    c.fleet = {"A1"};
    AttackInstance a;
    a.kind = AttackKind::RfReplay;
    a.ground_truth_id = "replay-1";
    a.start = seconds(70.0);
    a.capture_at = seconds(62.0);
    c.attacks.push_back(std::move(a));
    return c;
}

inline ScenarioConfig usb_data_logging() {
    ScenarioConfig c;
    c.name = "usb_data_logging";
    c.seed = 103;
    c.duration_s = 80.0;
    c.fleet = {"A2"};
    c.owner_presses_s = {62.0};  // puts an unlock record in the log before the theft
    AttackInstance a;
    a.kind = AttackKind::UsbExfiltration;
    a.ground_truth_id = "usb-1";
    a.start = seconds(72.0);
    a.device_id = 0xDA7A0001;
    c.attacks.push_back(std::move(a));
    return c;
}

inline ScenarioConfig glass_break() {
    ScenarioConfig c;
    c.name = "glass_break";
    c.seed = 104;
    c.duration_s = 75.0;
    c.fleet = all_profile_names();
    AttackInstance a;
    a.kind = AttackKind::GlassBreak;
    a.ground_truth_id = "glass-1";
    a.start = seconds(70.0);
    a.peak_g = 3.0;
    a.duration = 50'000;
    c.attacks.push_back(std::move(a));
    return c;
}

inline ScenarioConfig headlight_injection() {
    ScenarioConfig c;
    c.name = "headlight_injection";
    c.seed = 105;
    c.duration_s = 75.0;
    c.fleet = harness_exposed_profile_names();
    c.attacks.push_back(door_injection("inject-1", 70.0));
    return c;
}

inline ScenarioConfig fob_spoof() {
    ScenarioConfig c;
    c.name = "fob_spoof";
    c.seed = 106;
    c.duration_s = 90.0;
    c.fleet = {"A3"};
    AttackInstance a;
    a.kind = AttackKind::FobSpoof;
    a.ground_truth_id = "spoof-1";
    a.start = seconds(70.0);
    a.attempts = 3;
    a.interval = seconds(5.0);
    a.capture_at = seconds(62.0);  // overheard owner press seeds the counter guess
    c.attacks.push_back(std::move(a));
    return c;
}

inline ScenarioConfig concurrent_attack() {
    ScenarioConfig c;
    c.name = "concurrent_attack";
    c.seed = 107;
    c.duration_s = 85.0;
    c.fleet = {"B1"};
    c.attacks.push_back(door_injection("conc-inject", 70.0));
    AttackInstance replay;
    replay.kind = AttackKind::RfReplay;
    replay.ground_truth_id = "conc-replay";
    replay.start = seconds(70.5);
    replay.capture_at = seconds(62.0);
    c.attacks.push_back(std::move(replay));
    AttackInstance obd;
    obd.kind = AttackKind::ObdReprogram;
    obd.ground_truth_id = "conc-obd";
    obd.start = seconds(71.0);
    obd.device_id = 0x0BAD0002;
    c.attacks.push_back(std::move(obd));
    return c;
}

inline ScenarioConfig network_flood() {
    ScenarioConfig c;
    c.name = "network_flood";
    c.seed = 108;
    c.duration_s = 85.0;
    c.fleet = {"B2"};
    AttackInstance a;
    a.kind = AttackKind::CanFlood;
    a.ground_truth_id = "flood-1";
    a.start = seconds(70.0);
    a.rate_fps = 10'000.0;
    a.duration = seconds(10.0);
    a.segment = Segment::NonCritical;
    c.attacks.push_back(std::move(a));
    return c;
}

inline ScenarioConfig cpu_load() {
    ScenarioConfig c;
    c.name = "cpu_load";
    c.seed = 109;
    c.duration_s = 80.0;
    c.fleet = {"B3"};
    // The load model: a 1 kHz telemetry stream in the background while the
    // per-frame inspection budget is cut to a fifth of the default.
    c.background_fps = 1'000.0;
    c.thresholds.inspect_cost_us = 400;
    c.attacks.push_back(door_injection("load-inject", 70.0));
    return c;
}

inline ScenarioConfig ecu_integration() {
    ScenarioConfig c;
    c.name = "ecu_integration";
    c.seed = 110;
    c.duration_s = 90.0;
    c.fleet = all_profile_names();
    c.owner_presses_s = {65.0};  // ordinary owner activity alongside the fleet traffic
    return c;
}

inline ScenarioConfig false_positive() {
    ScenarioConfig c;
    c.name = "false_positive";
    c.seed = 111;
    c.duration_s = 660.0;  // ten benign minutes after warm-up
    c.fleet = {"D1"};
    return c;
}

inline ScenarioConfig alarm_compat() {
    ScenarioConfig c;
    c.name = "alarm_compat";
    c.seed = 112;
    c.duration_s = 85.0;
    c.fleet = {"C3"};
    AttackInstance glass;
    glass.kind = AttackKind::GlassBreak;
    glass.ground_truth_id = "compat-glass";
    glass.start = seconds(70.0);
    glass.peak_g = 3.0;
    glass.duration = 50'000;
    c.attacks.push_back(std::move(glass));
    c.attacks.push_back(door_injection("compat-inject", 75.0));
    return c;
}

}  // namespace builtin

inline std::vector<ScenarioConfig> builtin_scenarios() {
    return {builtin::obd_exploit(),    builtin::fob_replay(),     builtin::usb_data_logging(),
            builtin::glass_break(),    builtin::headlight_injection(), builtin::fob_spoof(),
            builtin::concurrent_attack(), builtin::network_flood(), builtin::cpu_load(),
            builtin::ecu_integration(), builtin::false_positive(), builtin::alarm_compat()};
}

inline ScenarioConfig builtin_scenario(const std::string& name) {
    for (ScenarioConfig& c : builtin_scenarios())
        if (c.name == name) return std::move(c);
    throw std::invalid_argument("no bundled scenario named '" + name + "'");
}

}  // namespace agx
