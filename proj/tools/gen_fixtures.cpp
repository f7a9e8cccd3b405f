// Regenerates the bundled data/ fixtures from the in-code tables.
// Usage: gen_fixtures [out_dir]

#include <filesystem>
#include <fstream>
#include <iostream>

#include "aitc/fixtures.hpp"

int main(int argc, char** argv) {
  const std::string out = argc > 1 ? argv[1] : "data";
  std::filesystem::create_directories(out);

  const auto ac = aitc::fixtures::hypothetical_ac();
  const auto bc = aitc::fixtures::hypothetical_bc();
  aitc::save_ipd_csv(ac, out + "/hypothetical_ac.csv");
  aitc::save_ipd_csv(bc, out + "/hypothetical_bc.csv");
  aitc::save_agd_json(aitc::summarize_ipd(ac), out + "/hypothetical_ac_agd.json");
  aitc::save_agd_json(aitc::summarize_ipd(bc), out + "/hypothetical_bc_agd.json");

  {
    std::ofstream f(out + "/paradox_scenario.json");
    f << aitc::fixtures::paradox_scenario().to_json().dump(2) << '\n';
  }
  {
    std::ofstream f(out + "/continuous_scenario.json");
    f << aitc::fixtures::continuous_scenario(1000, 50, 20260810).to_json().dump(2)
      << '\n';
  }
  std::cout << "fixtures written to " << out << "\n";
  return 0;
}
