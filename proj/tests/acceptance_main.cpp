#include <CLI11.hpp>

#include <iostream>

#include "hirank/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Runs the acceptance criteria and prints one PASS/FAIL line per criterion."};
  bool quick = false;
  hirank::AcceptOptions opt;
  app.add_flag("--quick", quick, "reduced instance counts");
  app.add_option("--seed", opt.seed, "base seed");
  app.add_option("--only", opt.only, "criterion ids to run")->check(CLI::Range(1, hirank::kCriteria));
  CLI11_PARSE(app, argc, argv);
  opt.level = quick ? hirank::AcceptLevel::Quick : hirank::AcceptLevel::Full;
  opt.on_result = [](const hirank::CriterionResult& r) { std::cout << hirank::format_result_line(r) << std::endl; };
  auto rs = hirank::run_acceptance(opt);
  int passed = 0;
  for (auto& r : rs) passed += r.pass;
  std::cout << passed << "/" << rs.size() << " criteria passed" << std::endl;
  return passed == static_cast<int>(rs.size()) ? 0 : 1;
}
