#pragma once
// Quantitative outcome of a scenario run.  One ProfileMetrics per simulated
// vehicle, pooled into fleet-level aggregates; the report embeds the config
// hash, seed, and code version so any figure can be traced back to the exact
// run that produced it.  Serialization is canonical (sorted keys), which
// makes the report's own SHA-256 a determinism check.

#include <algorithm>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "autoguardx/attacks.hpp"
#include "autoguardx/crypto.hpp"

namespace agx {

constexpr const char* kCodeVersion = "1.0.0";

// One attack instance as experienced by one vehicle.
struct AttackOutcome {
    std::string id;
    AttackKind kind = AttackKind::RfReplay;
    bool detected = false;
    double latency_s = 0.0;  // first matching alert after onset; valid when detected
    bool blocked = false;
};

struct ProfileMetrics {
    std::string name;
    std::optional<double> accuracy;  // empty when nothing was scheduled
    double fpr = 0.0;
    double inspection_rate = 1.0;
    double alarm_consistency = 1.0;
    uint64_t frames_total = 0;
    uint64_t benign_frames = 0;
    uint64_t fully_inspected = 0;
    uint64_t alerts_total = 0;
    uint64_t alerts_matched = 0;
    uint64_t events_logged = 0;
    std::string trace_sha256;
    std::vector<AttackOutcome> attacks;
};

// One attack instance pooled across every vehicle that ran it.
struct AttackAggregate {
    std::string id;
    AttackKind kind = AttackKind::RfReplay;
    int profiles = 0;
    int detected = 0;
    int blocked = 0;
    double max_latency_s = 0.0;   // worst detecting vehicle
    double mean_latency_s = 0.0;  // mean over detecting vehicles
};

struct MetricsReport {
    std::string scenario;
    std::string mode;
    uint64_t seed = 0;
    std::string config_sha256;
    std::string code_version = kCodeVersion;

    std::vector<ProfileMetrics> profiles;
    std::vector<AttackAggregate> attacks;

    std::optional<double> accuracy;  // pooled detected / scheduled; empty when none scheduled
    double mean_latency_s = 0.0;
    double max_latency_s = 0.0;
    double fpr = 0.0;
    double inspection_rate = 1.0;
    double alarm_consistency = 1.0;
    uint64_t frames_total = 0;
    uint64_t benign_frames = 0;
    uint64_t alerts_total = 0;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["scenario"] = scenario;
        j["mode"] = mode;
        j["seed"] = seed;
        j["config_sha256"] = config_sha256;
        j["code_version"] = code_version;

        j["profiles"] = nlohmann::json::array();
        for (const ProfileMetrics& p : profiles) {
            nlohmann::json jp;
            jp["name"] = p.name;
            jp["accuracy"] = p.accuracy ? nlohmann::json(*p.accuracy) : nlohmann::json(nullptr);
            jp["fpr"] = p.fpr;
            jp["inspection_rate"] = p.inspection_rate;
            jp["alarm_consistency"] = p.alarm_consistency;
            jp["frames_total"] = p.frames_total;
            jp["benign_frames"] = p.benign_frames;
            jp["fully_inspected"] = p.fully_inspected;
            jp["alerts_total"] = p.alerts_total;
            jp["alerts_matched"] = p.alerts_matched;
            jp["events_logged"] = p.events_logged;
            jp["trace_sha256"] = p.trace_sha256;
            jp["attacks"] = nlohmann::json::array();
            for (const AttackOutcome& a : p.attacks)
                jp["attacks"].push_back({{"id", a.id},
                                         {"kind", attack_kind_name(a.kind)},
                                         {"detected", a.detected},
                                         {"latency_s", a.latency_s},
                                         {"blocked", a.blocked}});
            j["profiles"].push_back(std::move(jp));
        }

        j["attacks"] = nlohmann::json::array();
        for (const AttackAggregate& a : attacks)
            j["attacks"].push_back({{"id", a.id},
                                    {"kind", attack_kind_name(a.kind)},
                                    {"profiles", a.profiles},
                                    {"detected", a.detected},
                                    {"blocked", a.blocked},
                                    {"max_latency_s", a.max_latency_s},
                                    {"mean_latency_s", a.mean_latency_s}});

        j["aggregate"] = {
            {"accuracy", accuracy ? nlohmann::json(*accuracy) : nlohmann::json(nullptr)},
            {"mean_latency_s", mean_latency_s},
            {"max_latency_s", max_latency_s},
            {"fpr", fpr},
            {"inspection_rate", inspection_rate},
            {"alarm_consistency", alarm_consistency},
            {"frames_total", frames_total},
            {"benign_frames", benign_frames},
            {"alerts_total", alerts_total},
        };
        return j;
    }

    std::string sha256() const {
        const std::string dump = to_json().dump();
        Sha256 h;
        h.update(reinterpret_cast<const uint8_t*>(dump.data()), dump.size());
        return to_hex(h.finish());
    }
};

// Pools per-profile results into the fleet-level view.  Latency figures are
// taken over (attack, vehicle) pairs that detected; accuracy over every pair
// scheduled.
inline void aggregate_metrics(MetricsReport& r) {
    r.attacks.clear();
    uint64_t scheduled = 0, detected = 0;
    double latency_sum = 0.0;
    r.max_latency_s = 0.0;
    uint64_t frames = 0, benign = 0, inspected = 0, alerts = 0, matched = 0;
    uint64_t consistency_den = 0;
    double consistency_num = 0.0;

    for (const ProfileMetrics& p : r.profiles) {
        frames += p.frames_total;
        benign += p.benign_frames;
        inspected += p.fully_inspected;
        alerts += p.alerts_total;
        matched += p.alerts_matched;
        for (const AttackOutcome& a : p.attacks) {
            ++scheduled;
            AttackAggregate* agg = nullptr;
            for (AttackAggregate& x : r.attacks)
                if (x.id == a.id) agg = &x;
            if (!agg) {
                r.attacks.push_back({a.id, a.kind, 0, 0, 0, 0.0, 0.0});
                agg = &r.attacks.back();
            }
            ++agg->profiles;
            if (a.blocked) ++agg->blocked;
            if (a.detected) {
                ++detected;
                ++agg->detected;
                latency_sum += a.latency_s;
                // mean_latency_s holds the running sum until the final pass below
                agg->mean_latency_s += a.latency_s;
                agg->max_latency_s = std::max(agg->max_latency_s, a.latency_s);
                r.max_latency_s = std::max(r.max_latency_s, a.latency_s);
            }
        }
        if (!p.attacks.empty()) {
            uint64_t det = 0;
            for (const AttackOutcome& a : p.attacks) det += a.detected ? 1 : 0;
            consistency_den += det;
            consistency_num += p.alarm_consistency * static_cast<double>(det);
        }
    }
    for (AttackAggregate& a : r.attacks)
        if (a.detected > 0) a.mean_latency_s /= static_cast<double>(a.detected);

    r.frames_total = frames;
    r.benign_frames = benign;
    r.alerts_total = alerts;
    r.accuracy = scheduled > 0
                     ? std::optional<double>(static_cast<double>(detected) /
                                             static_cast<double>(scheduled))
                     : std::nullopt;
    r.mean_latency_s = detected > 0 ? latency_sum / static_cast<double>(detected) : 0.0;
    r.fpr = benign > 0 ? static_cast<double>(alerts - matched) / static_cast<double>(benign) : 0.0;
    r.inspection_rate =
        frames > 0 ? static_cast<double>(inspected) / static_cast<double>(frames) : 1.0;
    r.alarm_consistency =
        consistency_den > 0 ? consistency_num / static_cast<double>(consistency_den) : 1.0;
}

// --- the side-by-side comparison table ------------------------------------

struct ComparisonRow {
    std::string scenario;
    std::string factory;  // "n/a" where no stock baseline exists
    std::string autoguardx;
    bool pass = false;
    std::string failure;  // which claim missed, empty when pass
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
    double suite_accuracy = 0.0;  // pooled over the protected-mode runs
    double suite_max_latency_s = 0.0;
    bool all_pass = false;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["code_version"] = kCodeVersion;
        j["rows"] = nlohmann::json::array();
        for (const ComparisonRow& r : rows) {
            nlohmann::json jr{{"scenario", r.scenario},
                              {"factory", r.factory},
                              {"autoguardx", r.autoguardx},
                              {"pass", r.pass}};
            if (!r.failure.empty()) jr["failure"] = r.failure;
            j["rows"].push_back(std::move(jr));
        }
        j["suite_accuracy"] = suite_accuracy;
        j["suite_max_latency_s"] = suite_max_latency_s;
        j["all_pass"] = all_pass;
        return j;
    }

    std::string to_text() const {
        size_t w0 = 8, w1 = 7, w2 = 10;
        for (const ComparisonRow& r : rows) {
            w0 = std::max(w0, r.scenario.size());
            w1 = std::max(w1, r.factory.size());
            w2 = std::max(w2, r.autoguardx.size());
        }
        auto pad = [](const std::string& s, size_t w) {
            return s + std::string(w - s.size(), ' ');
        };
        std::string out;
        out += pad("scenario", w0) + "  " + pad("factory", w1) + "  " +
               pad("autoguardx", w2) + "  result\n";
        out += std::string(w0, '-') + "  " + std::string(w1, '-') + "  " +
               std::string(w2, '-') + "  ------\n";
        for (const ComparisonRow& r : rows) {
            out += pad(r.scenario, w0) + "  " + pad(r.factory, w1) + "  " +
                   pad(r.autoguardx, w2) + "  " + (r.pass ? "pass" : "FAIL");
            if (!r.failure.empty()) out += "  (" + r.failure + ")";
            out += '\n';
        }
        char tail[128];
        std::snprintf(tail, sizeof tail,
                      "\nsuite accuracy %.4f, worst detection latency %.3f s: %s\n",
                      suite_accuracy, suite_max_latency_s, all_pass ? "all rows hold" : "FAILING");
        out += tail;
        return out;
    }
};

}  // namespace agx
