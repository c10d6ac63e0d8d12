// hpcav: scenario-driven front end for the cavity models.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

#include "hpc/commands.hpp"
#include "hpc/scenario.hpp"

namespace {

struct Args {
  std::string scenario;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 1;
};

void add_common(CLI::App* sub, Args& a, bool* seed_set) {
  sub->add_option("--scenario", a.scenario, "scenario JSON file")->required();
  sub->add_option("--out", a.out, "output CSV (default: scenario output, else stdout)");
  sub->add_option_function<std::uint64_t>(
      "--seed",
      [&a, seed_set](const std::uint64_t& v) {
        a.seed = v;
        *seed_set = true;
      },
      "RNG seed overriding the scenario");
  sub->add_option("--threads", a.threads, "worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Helicity-preserving metasurface cavity simulator"};
  app.require_subcommand(1);
  Args a;
  bool seed_set = false;
  auto* sweep = app.add_subcommand("transmission-sweep", "cavity transmission versus detuning or length shift");
  auto* map = app.add_subcommand("field-map", "Riemann-Silberstein map or on-axis intracavity profile");
  auto* sense = app.add_subcommand("sense", "time-resolved homodyne detection of a chiral scatterer");
  auto* compare = app.add_subcommand("compare", "run several routes on one grid and report deviations");
  for (auto* s : {sweep, map, sense, compare}) add_common(s, a, &seed_set);
  CLI11_PARSE(app, argc, argv);

  try {
    const hpc::Scenario sc = hpc::load_scenario(a.scenario);
    hpc::CommandOptions opt;
    opt.threads = a.threads;
    if (seed_set) opt.seed = a.seed;
    const std::string path = a.out.empty() ? sc.output : a.out;
    std::unique_ptr<std::ofstream> file;
    std::ostream* out = &std::cout;
    if (!path.empty()) {
      file = std::make_unique<std::ofstream>(path);
      if (!*file) throw hpc::Error("cannot open output file '" + path + "'");
      out = file.get();
    }
    std::ostream& info = path.empty() ? std::cerr : std::cout;
    if (sweep->parsed()) {
      hpc::cmd_transmission_sweep(sc, *out, opt);
    } else if (map->parsed()) {
      hpc::cmd_field_map(sc, *out, opt);
    } else if (sense->parsed()) {
      info << hpc::cmd_sense(sc, *out, opt) << "\n";
    } else {
      info << hpc::cmd_compare(sc, *out, opt).text();
    }
    out->flush();
    if (!*out) throw hpc::Error("failed writing output");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
