#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wsi/report.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<long> samples;
  std::optional<int> grid;
};

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw wsi::Error(wsi::ErrorKind::io_error, "cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

wsi::Scenario load(const std::string& path, const Overrides& o) {
  wsi::Scenario s;
  try {
    s = wsi::parse_config(read_file(path));
  } catch (const wsi::Error& e) {
    throw wsi::Error(e.kind(), path + ": " + e.detail());
  }
  if (o.seed) s.numeric.seed = *o.seed;
  if (o.samples) s.numeric.samples = *o.samples;
  if (o.grid) s.numeric.grid = *o.grid;
  return s;
}

// 1 when the exponents are not admissible, 2 when some other task errored
int run_one(const std::string& path, const Overrides& o, const std::string& out, const std::vector<std::string>& formats) {
  auto s = load(path, o);
  auto r = wsi::run_scenario(s);
  for (const auto& f : wsi::emit_report(r, out, formats)) std::cout << f << "\n";
  for (const auto& t : r.tasks) std::cerr << s.name << " " << t.task << " " << wsi::to_string(t.status) << " " << t.seconds << " s\n";
  if (!r.valid) return 1;
  return r.has_errors() ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted Sobolev inequalities on convex cones"};
  app.require_subcommand(1);

  std::string config, out = "out", dir;
  std::vector<std::string> formats{"text", "csv"};
  Overrides ov;

  auto* validate = app.add_subcommand("validate", "parse a config and check the exponent ranges");
  validate->add_option("--config", config, "scenario file")->required()->check(CLI::ExistingFile);

  auto* run = app.add_subcommand("run", "run the tasks of one scenario and write reports");
  run->add_option("--config", config, "scenario file")->required()->check(CLI::ExistingFile);

  auto* batch = app.add_subcommand("batch", "run every *.ini or *.cfg file in a directory");
  batch->add_option("--dir", dir, "directory of scenario files")->required()->check(CLI::ExistingDirectory);

  for (auto* sub : {run, batch}) {
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--format", formats, "text and/or csv")->delimiter(',')->check(CLI::IsMember({"text", "csv"}))->capture_default_str();
    sub->add_option("--seed", ov.seed, "override [numeric] seed");
    sub->add_option("--samples", ov.samples, "override [numeric] samples")->check(CLI::PositiveNumber);
    sub->add_option("--grid", ov.grid, "override [numeric] grid")->check(CLI::Range(8, 4096));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*validate) {
      auto s = load(config, ov);
      std::cout << wsi::emit_config(s);
      try {
        auto e = wsi::validate_exponents(s.n(), s.p, s.tau(), s.alpha());
        std::cout << "# " << wsi::describe(e) << "\n# exponents admissible\n";
      } catch (const wsi::Error& e) {
        std::cout << "# " << e.what() << "\n";
        return 1;
      }
      return 0;
    }
    if (*run) return run_one(config, ov, out, formats);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && (entry.path().extension() == ".ini" || entry.path().extension() == ".cfg")) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    int code = 0;
    for (const auto& f : files) {
      try {
        code = std::max(code, run_one(f.string(), ov, out, formats));
      } catch (const wsi::Error& e) {
        std::cerr << e.what() << "\n";
        code = std::max(code, 1);
      }
    }
    return code;
  } catch (const wsi::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}
