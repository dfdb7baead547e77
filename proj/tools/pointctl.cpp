// pointctl <command> --config <path> [--levels N] [--nu X] [--out DIR] [--format csv,vtk,txt]

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "pointctl/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Point-fidelity optimal control solver"};
  std::string command;
  std::string config_path;
  std::optional<int> levels;
  std::optional<double> nu;
  std::optional<std::string> out_dir;
  std::optional<std::string> formats;
  app.add_option("command", command, "solve | eoc | approx-eoc | newton-table | nu-sweep")->required();
  app.add_option("--config", config_path, "key=value run description")->required();
  app.add_option("--levels", levels, "number of study levels");
  app.add_option("--nu", nu, "cost parameter");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", formats, "comma-separated subset of csv,vtk,txt");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::ifstream file(config_path);
  if (!file) {
    std::cerr << "config error: cannot read " << config_path << '\n';
    return 2;
  }
  std::ostringstream text;
  text << file.rdbuf();

  pointctl::RunConfig config;
  try {
    config = pointctl::parse_config(text.str());
    config.command = command;
    if (levels) config.levels = *levels;
    if (nu) config.nu = *nu;
    if (out_dir) config.output_dir = *out_dir;
    if (formats) {
      config.formats.clear();
      std::istringstream list(*formats);
      std::string item;
      while (std::getline(list, item, ',')) {
        if (!item.empty()) config.formats.push_back(item);
      }
    }
    pointctl::validate(config);
  } catch (const pointctl::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  return pointctl::run(config, std::cout, std::cerr);
}
