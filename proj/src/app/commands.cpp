#include "qns/app/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "qns/app/presets.hpp"
#include "qns/error.hpp"

#ifndef QNS_VERSION
#define QNS_VERSION "unknown"
#endif

namespace qns::app {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) invalid(what, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) invalid("--out", "cannot write '" + path.string() + "'");
}

std::string config_hash(const Json& config) { return io::hex64(io::fnv1a(config.dump())); }

class Output {
 public:
  Output(const Invocation& inv, const Json& config) : inv_(inv), config_(config) {
    std::error_code ec;
    fs::create_directories(inv.out, ec);
    if (ec) invalid("--out", "cannot create '" + inv.out.string() + "': " + ec.message());
  }

  void tables(const Tables& t) {
    for (const auto& [name, table] : t) {
      const fs::path path = inv_.out / (name + ".tsv");
      io::write_tsv(path, table);
      files_[path.filename().string()] = io::hex64(io::fnv1a(read_file(path, "--out")));
    }
  }

  Json& extra() { return extra_; }

  void manifest() {
    Json m;
    m["command"] = inv_.command;
    m["preset"] = inv_.preset ? Json(*inv_.preset) : Json(nullptr);
    m["seed"] = config_.value("seed", std::uint64_t{1});
    m["config_hash"] = config_hash(config_);
    m["version"] = QNS_VERSION;
    m["compiler"] = __VERSION__;
    m["config"] = config_;
    m["files"] = files_;
    for (const auto& [k, v] : extra_.items()) m[k] = v;
    write_file(inv_.out / "manifest.json", m.dump(2) + "\n");
  }

 private:
  const Invocation& inv_;
  const Json& config_;
  Json files_ = Json::object();
  Json extra_ = Json::object();
};

std::uint64_t seed_of(const Json& config) {
  return Node(config, "").has("seed") ? Node(config, "").at("seed").count() : 1;
}

}  // namespace

Json resolve_config(const Invocation& inv) {
  Json config = inv.preset ? preset(*inv.preset) : Json::object();
  if (inv.config) {
    const Json file = parse_json(read_file(*inv.config, "--config"), inv.config->string());
    if (!file.is_object()) invalid(inv.config->string(), "top level must be an object");
    config.merge_patch(file);
  }
  if (inv.seed) config["seed"] = *inv.seed;
  if (!config.contains("seed")) config["seed"] = 1;
  seed_of(config);
  return config;
}

Dataset load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) invalid("--dataset", "no dataset directory at '" + dir.string() + "'");
  const fs::path manifest = dir / "manifest.json";
  const fs::path table = dir / "tomography.tsv";
  if (!fs::exists(manifest) || !fs::exists(table)) {
    invalid("--dataset", "'" + dir.string() + "' lacks manifest.json or tomography.tsv");
  }
  const Json m = parse_json(read_file(manifest, "--dataset"), manifest.string());
  if (!m.is_object() || m.value("command", "") != "simulate" || !m.contains("config")) {
    invalid("--dataset", "'" + manifest.string() + "' is not a simulate manifest");
  }
  const Json& config = m["config"];
  return dataset_from_table(io::read_tsv(table), config, seed_of(config));
}

void execute(const Invocation& inv) {
  if (inv.command == "reconstruct") {
    if (!inv.dataset) invalid("--dataset", "reconstruct needs a dataset directory written by simulate");
    const Dataset data = load_dataset(*inv.dataset);
    const Json config = inv.preset || inv.config ? resolve_config(inv) : data.config;
    auto run = run_reconstruct(config, data);
    Output out(inv, config);
    out.tables(run.tables);
    out.extra()["dataset_config_hash"] = config_hash(data.config);
    out.extra()["info"] = run.info;
    out.manifest();
    return;
  }
  if (!inv.preset && !inv.config) invalid("--config", "give --config and/or --preset");
  const Json config = resolve_config(inv);
  if (inv.command == "dpss") {
    auto run = run_dpss(config);
    Output out(inv, config);
    out.tables(run.tables);
    out.manifest();
  } else if (inv.command == "filters") {
    auto run = run_filters(config);
    Output out(inv, config);
    out.tables(run.tables);
    out.manifest();
  } else if (inv.command == "simulate") {
    const Dataset d = run_simulate(config, seed_of(config));
    Output out(inv, config);
    out.tables({{"tomography", dataset_table(d)}});
    out.manifest();
  } else if (inv.command == "compare") {
    auto run = run_compare(config);
    Output out(inv, config);
    out.tables(run.tables);
    out.manifest();
  } else {
    invalid("command", "unknown subcommand '" + inv.command + "'");
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Slepian-waveform quantum noise spectroscopy"};
  app.require_subcommand(1);
  std::string names;
  for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;

  Invocation inv;
  std::string preset_name, config_path, dataset_path, out_path;
  std::uint64_t seed = 0;
  const std::pair<const char*, const char*> commands[] = {
      {"dpss", "Slepian sequences, eigenvalues and DPSWFs"},
      {"filters", "control waveforms and their filter functions"},
      {"simulate", "simulated tomography dataset"},
      {"reconstruct", "spectrum estimates from a simulate dataset"},
      {"compare", "DPSS versus pulsed protocols"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config file, merged over the preset");
    sub->add_option("--preset", preset_name, "built-in config: " + names);
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--out", out_path, "output directory (default qns_out)");
    if (std::string(name) == "reconstruct") sub->add_option("--dataset", dataset_path, "simulate output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  for (const auto* sub : app.get_subcommands()) {
    inv.command = sub->get_name();
    if (sub->count("--preset")) inv.preset = preset_name;
    if (sub->count("--config")) inv.config = config_path;
    if (sub->count("--seed")) inv.seed = seed;
    if (sub->count("--out")) inv.out = out_path;
    if (sub->get_name() == "reconstruct" && sub->count("--dataset")) inv.dataset = dataset_path;
  }

  try {
    execute(inv);
  } catch (const Error& e) {
    std::cerr << "qns " << inv.command << ": " << e.what() << "\n";
    return is_validation_error(e.code()) ? kExitValidation : kExitNumerical;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "qns " << inv.command << ": config: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "qns " << inv.command << ": " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace qns::app
