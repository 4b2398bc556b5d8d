#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qns/app/commands.hpp"
#include "qns/app/presets.hpp"
#include "qns/error.hpp"
#include "qns/io.hpp"

using namespace qns;
using namespace qns::app;
namespace fs = std::filesystem;

namespace {

const fs::path& scratch_root() {
  static const struct Root {
    fs::path path = fs::temp_directory_path() / ("qns_test_cli_" + std::to_string(::getpid()));
    ~Root() {
      std::error_code ec;
      fs::remove_all(path, ec);
    }
  } root;
  return root.path;
}

fs::path scratch(const std::string& name) {
  const fs::path p = scratch_root() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir, const Json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(QNS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Small single-axis simulation: one finite-difference control at two shifts.
Json small_simulation() {
  return Json::parse(R"json({
    "waveforms": [
      {"label": "fd", "type": "finite_difference", "N": 100, "NW": 2, "order": 0, "dt_s": 1e-5,
       "shifts_hz": [5000, 10000], "normalization": {"mode": "max_theta", "value": 0.05}}
    ],
    "noise": {"dephasing": {"form": "white", "level": 0.5, "cutoff_hz": 40000}},
    "ensemble": {"mode": "first_order", "realizations": 50, "shots": 0, "readout_fidelity": 1}
  })json");
}

std::optional<ErrorCode> code_of(const Invocation& inv) {
  try {
    execute(inv);
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("invalid half-bandwidth names the field and exits with 2") {
  const fs::path dir = scratch("bad_w");
  Json cfg = preset("dpss");
  cfg["dpss"]["W"] = 0.7;
  const fs::path p = write_config(dir, cfg);
  Invocation inv{"dpss", std::nullopt, p, std::nullopt, dir / "out", std::nullopt};
  try {
    execute(inv);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(is_validation_error(e.code()));
    CHECK(std::string(e.what()).find("dpss.W") != std::string::npos);
  }
  CHECK(run("dpss --config " + p.string() + " --out " + (dir / "cli").string()) == kExitValidation);
}

TEST_CASE("empty waveform list is rejected") {
  const fs::path dir = scratch("empty");
  Json cfg = small_simulation();
  cfg["waveforms"] = Json::array();
  const fs::path p = write_config(dir, cfg);
  const auto code = code_of({"filters", std::nullopt, p, std::nullopt, dir / "out", std::nullopt});
  REQUIRE(code.has_value());
  CHECK(is_validation_error(*code));
  CHECK(run("simulate --config " + p.string() + " --out " + (dir / "cli").string()) == kExitValidation);
}

TEST_CASE("usage errors exit with 2") {
  const fs::path dir = scratch("usage");
  CHECK(run("dpss --preset no_such_preset --out " + dir.string()) == kExitValidation);
  CHECK(run("dpss --out " + dir.string()) == kExitValidation);
  CHECK(run("reconstruct --dataset " + (dir / "missing").string() + " --out " + dir.string()) == kExitValidation);
  CHECK(run("reconstruct --out " + dir.string()) == kExitValidation);
  CHECK(run("frobnicate") == kExitValidation);
  CHECK(run("--help") == kExitOk);
}

TEST_CASE("dpss preset writes six sequences and their eigenvalues") {
  const fs::path dir = scratch("dpss");
  REQUIRE(run("dpss --preset dpss --out " + dir.string()) == kExitOk);
  const auto seq = io::read_tsv(dir / "dpss_sequences.tsv");
  CHECK(seq.rows.size() == 128);
  std::size_t columns = 0;
  for (const auto& h : seq.header) columns += h.rfind("k", 0) == 0 && h.size() > 1 ? 1 : 0;
  CHECK(columns == 6);
  const auto eig = io::read_tsv(dir / "dpss_eigenvalues.tsv");
  REQUIRE(eig.rows.size() == 6);
  CHECK(std::stod(eig.rows[0][eig.column("lambda")]) >= 0.99999);
  const Json m = Json::parse(slurp(dir / "manifest.json"));
  CHECK(m["command"] == "dpss");
  CHECK(m["seed"] == 1);
  CHECK(m["files"].contains("dpss_sequences.tsv"));
}

TEST_CASE("fig1 filters are concentrated in the shifted band") {
  const fs::path dir = scratch("fig1");
  REQUIRE(run("filters --preset fig1 --out " + dir.string()) == kExitOk);
  const auto summary = io::read_tsv(dir / "filters_summary.tsv");
  REQUIRE(summary.rows.size() == 2);
  const auto& fd = summary.rows[0];
  CHECK(fd[summary.column("label")] == "fd");
  CHECK(std::stod(fd[summary.column("in_band_fraction")]) > 0.99);
  CHECK(fs::exists(dir / "filter_000.tsv"));
  CHECK(fs::exists(dir / "waveform_000.tsv"));
}

TEST_CASE("zero noise gives unit survival probabilities") {
  const fs::path dir = scratch("quiet");
  Json cfg = small_simulation();
  cfg.erase("noise");
  cfg["ensemble"]["mode"] = "exact";
  cfg["ensemble"]["realizations"] = 4;
  const fs::path p = write_config(dir, cfg);
  REQUIRE(run("simulate --config " + p.string() + " --out " + (dir / "out").string()) == kExitOk);
  const auto t = io::read_tsv(dir / "out" / "tomography.tsv");
  REQUIRE(t.rows.size() == 2);
  for (const auto& row : t.rows)
    for (const char* c : {"P_x", "P_y", "P_z"}) CHECK(std::stod(row[t.column(c)]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("same seed reproduces files, another seed does not") {
  const fs::path dir = scratch("seeds");
  const fs::path p = write_config(dir, small_simulation());
  REQUIRE(run("simulate --config " + p.string() + " --seed 7 --out " + (dir / "a").string()) == kExitOk);
  REQUIRE(run("simulate --config " + p.string() + " --seed 7 --out " + (dir / "b").string()) == kExitOk);
  REQUIRE(run("simulate --config " + p.string() + " --seed 8 --out " + (dir / "c").string()) == kExitOk);
  CHECK(slurp(dir / "a" / "tomography.tsv") == slurp(dir / "b" / "tomography.tsv"));
  CHECK(slurp(dir / "a" / "manifest.json") == slurp(dir / "b" / "manifest.json"));
  CHECK(slurp(dir / "a" / "tomography.tsv") != slurp(dir / "c" / "tomography.tsv"));
}

TEST_CASE("dataset round trip through tsv is exact") {
  const fs::path dir = scratch("roundtrip");
  const Json cfg = resolve_config({"simulate", std::nullopt, write_config(dir, small_simulation()), 3, dir,
                                   std::nullopt});
  execute({"simulate", std::nullopt, dir / "config.json", 3, dir / "out", std::nullopt});
  const Dataset direct = run_simulate(cfg, 3);
  const Dataset loaded = load_dataset(dir / "out");
  REQUIRE(loaded.rows.size() == direct.rows.size());
  const fs::path again = dir / "again.tsv";
  io::write_tsv(again, dataset_table(loaded));
  CHECK(slurp(again) == slurp(dir / "out" / "tomography.tsv"));
}

TEST_CASE("reconstruct reads a simulate dataset") {
  const fs::path dir = scratch("reconstruct");
  Json cfg = small_simulation();
  cfg["reconstruction"] = {{"method", "eigenestimate"}, {"axis", "dephasing"}};
  const fs::path p = write_config(dir, cfg);
  REQUIRE(run("simulate --config " + p.string() + " --out " + (dir / "data").string()) == kExitOk);
  REQUIRE(run("reconstruct --dataset " + (dir / "data").string() + " --out " + (dir / "est").string()) == kExitOk);
  const Json m = Json::parse(slurp(dir / "est" / "manifest.json"));
  CHECK(m["command"] == "reconstruct");
  CHECK(m.contains("dataset_config_hash"));
  CHECK(!m["files"].empty());
  // A filters output is not a dataset.
  REQUIRE(run("filters --config " + p.string() + " --out " + (dir / "ff").string()) == kExitOk);
  CHECK(run("reconstruct --dataset " + (dir / "ff").string() + " --out " + (dir / "x").string()) == kExitValidation);
}
