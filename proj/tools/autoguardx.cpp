// Command-line front end.
//
//   autoguardx run --scenario <file> [--seed N] [--mode factory|autoguardx] [--out DIR]
//   autoguardx table6 [--out DIR]
//   autoguardx soak [--hours N] [--seed N] [--out DIR]
//   autoguardx verify-log --store <file> --keys <file>
//
// Exit codes: 0 — ran and every threshold of the invoked suite held;
// 1 — ran, but a threshold or integrity check failed; 2 — usage or config error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "autoguardx/runner.hpp"

namespace fs = std::filesystem;
using namespace agx;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

void write_bytes(const fs::path& path, const Bytes& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
}

std::string printable(const Bytes& b) {
    std::string s;
    for (uint8_t c : b) s += (c >= 0x20 && c < 0x7F) ? static_cast<char>(c) : '.';
    return s;
}

// One JSON line per security event, alerts and enforcement actions alike.
void write_event_lines(const fs::path& path, const std::vector<EventRecord>& events) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const EventRecord& e : events) {
        nlohmann::json j;
        j["time_us"] = e.time;
        j["class"] = event_class_name(e.cls);
        j["severity"] = severity_name(e.severity);
        j["subject"] = e.subject;
        j["evidence"] = printable(e.evidence);
        out << j.dump() << '\n';
    }
}

// Everything one scenario run leaves on disk: the canonical config, the
// metrics report, and per vehicle the full trace, the event stream, the key
// material, and the persistent log (sealed binary or plaintext).
void write_run_artifacts(const fs::path& dir, const ScenarioConfig& cfg, const ScenarioRun& run) {
    fs::create_directories(dir);
    write_json(dir / "scenario.json", cfg.to_json());
    write_json(dir / "report.json", run.report.to_json());
    for (const ProfileRunResult& p : run.profiles) {
        write_event_lines(dir / ("alerts_" + p.profile + ".jsonl"), p.events);
        write_json(dir / ("keys_" + p.profile + ".json"), p.keys.to_json());
        if (p.log_sealed)
            write_bytes(dir / ("store_" + p.profile + ".bin"), p.log_image);
        else
            write_bytes(dir / ("log_" + p.profile + ".txt"), p.log_image);
    }
}

int cmd_run(const std::string& scenario, bool seed_set, uint64_t seed, const std::string& mode,
            const std::string& out_dir) {
    ScenarioConfig cfg;
    if (fs::exists(scenario)) {
        cfg = ScenarioConfig::load(scenario);
    } else {
        try {
            cfg = builtin_scenario(scenario);
        } catch (const std::invalid_argument&) {
            std::cerr << "error: no scenario file or bundled scenario named '" << scenario
                      << "'\n";
            return 2;
        }
    }
    if (seed_set) cfg.seed = seed;
    if (!mode.empty()) {
        auto m = parse_run_mode(mode);
        if (!m) {
            std::cerr << "error: --mode must be factory or autoguardx\n";
            return 2;
        }
        cfg.mode = *m;
    }
    cfg.validate();

    ScenarioRun run = run_scenario_full(cfg, out_dir);
    write_run_artifacts(out_dir, cfg, run);

    const MetricsReport& r = run.report;
    std::cout << "scenario " << r.scenario << " (" << r.mode << ", seed " << r.seed << "): "
              << r.frames_total << " frames";
    if (r.accuracy) std::cout << ", accuracy " << *r.accuracy;
    std::cout << ", fpr " << r.fpr << ", report " << out_dir << "/report.json\n";
    return 0;
}

int cmd_table6(const std::string& out_dir) {
    Table6Result result = reproduce_table6();

    fs::create_directories(out_dir);
    write_json(fs::path(out_dir) / "table6.json", result.table.to_json());
    write_text(fs::path(out_dir) / "table6.txt", result.table.to_text());
    for (size_t i = 0; i < result.protected_runs.size(); ++i) {
        const MetricsReport& r = result.protected_runs[i].report;
        write_json(fs::path(out_dir) / ("report_" + r.scenario + "_autoguardx.json"), r.to_json());
        if (result.factory_runs[i]) {
            const MetricsReport& f = result.factory_runs[i]->report;
            write_json(fs::path(out_dir) / ("report_" + f.scenario + "_factory.json"), f.to_json());
        }
    }

    std::cout << result.table.to_text();
    if (!result.table.all_pass) {
        for (const ComparisonRow& row : result.table.rows)
            if (!row.pass)
                std::cerr << "FAILED scenario " << row.scenario << ": " << row.failure << "\n";
        return 1;
    }
    return 0;
}

int cmd_soak(double hours, uint64_t seed, const std::string& out_dir) {
    SoakReport rep = benign_soak(hours, seed);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_json(fs::path(out_dir) / "soak.json", rep.to_json());
    }
    std::cout << "soak: " << rep.hours << " h, " << rep.frames << " frames, " << rep.alerts
              << " alerts, fpr " << rep.fpr << "\n";
    for (const auto& [cls, n] : rep.alerts_by_class)
        std::cout << "  " << cls << ": " << n << "\n";
    if (rep.fpr >= 0.003) {
        std::cerr << "FAILED: false-positive rate " << rep.fpr << " is not below 0.003\n";
        return 1;
    }
    return 0;
}

int cmd_verify_log(const std::string& store_path, const std::string& keys_path) {
    std::ifstream in(store_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open store " << store_path << "\n";
        return 2;
    }
    std::string raw((std::istreambuf_iterator<char>(in)), {});
    Bytes image(raw.begin(), raw.end());

    KeyStore ks;
    try {
        ks = KeyStore::load(keys_path);
    } catch (const std::exception& e) {
        std::cerr << "error: cannot load keys " << keys_path << ": " << e.what() << "\n";
        return 2;
    }

    VerifyResult v = verify_image(image, ks.log_keys);
    if (v.intact) {
        auto loaded = LogStore::load(image);
        std::cout << "intact: " << loaded.store.records().size() << " records, chain head "
                  << to_hex(v.head_hash) << "\n";
        return 0;
    }
    std::cerr << "TAMPERED at record " << v.first_bad_seq << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"connected-vehicle defense simulator"};
    app.require_subcommand(1);

    std::string scenario, mode, out_dir = "out";
    uint64_t seed = 0;
    double hours = 10.0;
    std::string store_path, keys_path;

    auto* run = app.add_subcommand("run", "run one scenario and write its artifacts");
    run->add_option("--scenario", scenario, "scenario file (or bundled scenario name)")
        ->required();
    auto* seed_opt = run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--mode", mode, "override the defense mode: factory|autoguardx");
    run->add_option("--out", out_dir, "output directory (default: out)");

    auto* table6 = app.add_subcommand("table6", "run the bundled comparison suite");
    table6->add_option("--out", out_dir, "output directory (default: out)");

    auto* soak = app.add_subcommand("soak", "benign long-haul false-positive measurement");
    soak->add_option("--hours", hours, "virtual hours of benign traffic (default: 10)");
    uint64_t soak_seed = 1;
    soak->add_option("--seed", soak_seed, "traffic seed");
    std::string soak_out;
    soak->add_option("--out", soak_out, "write soak.json here (optional)");

    auto* verify = app.add_subcommand("verify-log", "check a sealed log store's hash chain");
    verify->add_option("--store", store_path, "sealed store file")->required();
    verify->add_option("--keys", keys_path, "key material JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // --help exits 0; every parse failure is usage
    }

    try {
        if (run->parsed())
            return cmd_run(scenario, seed_opt->count() > 0, seed, mode, out_dir);
        if (table6->parsed()) return cmd_table6(out_dir);
        if (soak->parsed()) return cmd_soak(hours, soak_seed, soak_out);
        if (verify->parsed()) return cmd_verify_log(store_path, keys_path);
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
