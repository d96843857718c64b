// Writes the bundled benchmark networks as .kan.json files.
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "kanver/benchmarks.hpp"
#include "kanver/model_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write the bundled benchmark KANs"};
  std::filesystem::path dir = "models";
  app.add_option("dir", dir, "Output directory");
  CLI11_PARSE(app, argc, argv);
  std::filesystem::create_directories(dir);
  for (const auto& b : kanver::bundled_benchmarks()) {
    const auto path = dir / (b.name + ".kan.json");
    kanver::save_model_file(b.net, path);
    std::cout << path.string() << "  units=" << b.net.num_units()
              << "  params=" << b.net.parameter_count() << "\n";
  }
  return 0;
}
