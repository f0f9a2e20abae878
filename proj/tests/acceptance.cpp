// Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any
// criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <unistd.h>

#include "sbx/figures.hpp"
#include "sbx/validation.hpp"

namespace fs = std::filesystem;
using namespace sbx;
using validation::CheckResult;

namespace {

constexpr std::uint64_t kSeed = kDefaultSeed;
constexpr std::uint64_t kSamples = 1000000;

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int id, bool pass, const std::string& what) {
  std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << what << std::endl;
  if (!pass) ++failures;
}

std::string summary(const CheckResult& r) {
  std::string s = r.name + " = " + format_value(r.measured) + " (threshold " + format_value(r.threshold) + ")";
  if (!r.detail.empty()) s += "; " + r.detail;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int run_tool(const std::string& args) {
  const int status = std::system((std::string(SBX_EFFCAP_EXE) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / ("sbx_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(work);

  {
    const auto t0 = std::chrono::steady_clock::now();
    const CheckResult r = validation::check_oracle_equivalence();
    const double secs = seconds_since(t0);
    report(1, r.pass && secs < 60.0, summary(r) + "; " + format_value(std::round(secs * 100) / 100) + " s");
  }
  {
    const auto t0 = std::chrono::steady_clock::now();
    const CheckResult r = validation::check_mc_corroboration(kSeed, kSamples);
    const double secs = seconds_since(t0);
    report(2, r.pass && secs < 600.0, summary(r) + "; " + format_value(std::round(secs * 100) / 100) + " s");
  }
  {
    const CheckResult r = validation::check_bound_soundness(validation::BoundForm::at_z);
    const CheckResult sound = validation::check_bound_soundness(validation::BoundForm::at_max_z_w);
    report(3, r.pass,
           summary(r) + " [for reference, max(z, w) form used by the stopping rule: " + format_value(sound.measured) +
               " violations]");
  }
  {
    const CheckResult r = validation::check_ergodic_limit(kSeed, kSamples);
    report(4, r.pass, summary(r));
  }
  {
    const CheckResult r = validation::check_high_snr();
    report(5, r.pass, summary(r));
  }
  {
    const CheckResult a = validation::check_monotone_in_a();
    const CheckResult g = validation::check_monotone_in_snr();
    const CheckResult j = validation::check_jensen(kSeed, kSamples);
    report(6, a.pass && g.pass && j.pass,
           "decreasing in A: " + format_value(a.measured) + " violations; increasing in gamma_bar: " +
               format_value(g.measured) + " violations; Jensen: " + format_value(j.measured) + " violations");
  }
  {
    const CheckResult m = validation::check_mean_identity(kSeed);
    const CheckResult e = validation::check_ebn0_invariance();
    report(7, m.pass && e.pass, summary(m) + "; " + summary(e));
  }
  {
    const fs::path dir = work / "fig3";
    const int code = run_tool("figure --id 3 --out " + dir.string());
    const std::string claims = slurp(dir / "claims.txt");
    const bool produced = code == 0 && claims.find("sensitivity") != std::string::npos;
    std::string what = "Fig. 3 report " + std::string(produced ? "written" : "missing");
    bool all_within = true;
    for (const auto& c : figures::fig3_claims(1.0)) {
      what += "; " + c.description + ": " + format_value(std::round(c.measured * 100) / 100) + "% vs published " +
              format_value(c.claimed) + "% (" + (c.within(10.0) ? "within" : "outside") + " 10 pp)";
      all_within = all_within && c.within(10.0);
    }
    if (!all_within) what += "; T*B=1 misses a claim, sensitivity table emitted in claims.txt";
    report(8, produced, what);
  }
  {
    const fs::path dir = work / "fig5";
    const int code = run_tool("figure --id 5 --out " + dir.string());
    const std::string claims = slurp(dir / "claims.txt");
    const figures::Fig5Report f = figures::fig5_report();
    const CheckResult inv = validation::check_ebn0_invariance();
    const bool produced = code == 0 && claims.find("-6.7") != std::string::npos;
    report(9, produced && inv.pass,
           "reduction A 1 -> 5 at 0 dB: " + format_value(std::round(f.reduction.measured * 100) / 100) +
               "% vs published 39%; Eb/N0_min " + format_value(std::round(f.ebn0_min_db_a1 * 1e4) / 1e4) +
               " dB vs published -6.7 dB (documented discrepancy); invariance " + format_value(inv.measured));
  }
  {
    const std::string args = " --axis snr_db --from 0 --to 30 --step 1 --outputs exact,mc,quadrature --n-samples 100000 "
                             "--seed 11 --out ";
    const fs::path a = work / "a.csv", b = work / "b.csv";
    const bool ran = run_tool("sweep" + args + a.string()) == 0 && run_tool("sweep" + args + b.string()) == 0;
    const bool same_csv = ran && slurp(a) == slurp(b) && !slurp(a).empty();
    const SbxParams p = figures::kReferenceChannel;
    const LinkBudget lb = LinkBudget::from_db(10.0);
    const DelaySpec ds = DelaySpec::from_a(1.0);
    const McEstimate m1 = ec_monte_carlo(p, lb, ds, kSeed, kSamples);
    const McEstimate m2 = ec_monte_carlo(p, lb, ds, kSeed, kSamples);
    const McEstimate e1 = ergodic_capacity_mc(p, lb, kSeed, kSamples);
    const McEstimate e2 = ergodic_capacity_mc(p, lb, kSeed, kSamples);
    const bool same_mc = m1.value == m2.value && m1.std_err == m2.std_err && e1.value == e2.value &&
                         e1.std_err == e2.std_err;
    report(10, same_csv && same_mc,
           std::string("sweep CSV ") + (same_csv ? "byte-identical" : "differs") + " across two runs; MC estimators " +
               (same_mc ? "bit-identical" : "differ") + " for equal seed and shard count");
  }

  fs::remove_all(work);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
