#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "wkit/experiment.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path);
  out << contents;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wkit: Whitney extension experiments over sampled closed sets"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;

  const std::vector<std::string> kinds = {"gen-domain", "check-cusp", "check-fjords",
                                          "extend",     "roundtrip",  "patch",
                                          "submersion"};
  for (const std::string& kind : kinds) {
    auto* sub = app.add_subcommand(kind);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override the config seed");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string kind = app.get_subcommands().front()->get_name();

  try {
    const auto output = wkit::run_experiment(kind, read_file(config_path), seed);
    std::filesystem::create_directories(out_dir);
    const auto report_path = std::filesystem::path(out_dir) / (kind + "_report.json");
    write_file(report_path, output.report);
    for (const auto& [name, contents] : output.files) {
      write_file(std::filesystem::path(out_dir) / name, contents);
    }
    std::cout << output.report << "\n";
    return output.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return wkit::kExitConfigError;
  }
}
