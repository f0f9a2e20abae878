#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "sbx/figures.hpp"
#include "sbx/sweep.hpp"

using namespace sbx;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Config, ParsesKeyValueFile) {
  std::istringstream in(
      "# Fig. 4 style\n"
      "axis = a_constraint\nfrom=1\nto=10\nstep=0.5\n"
      "mx=3\nomega_x=2\nmy=5\nomega_y=10\nsnr_db=10\n"
      "outputs=exact,high-snr\nseed=17\nn_samples=5000\n");
  const SweepConfig cfg = parse_sweep_config(in);
  EXPECT_EQ(cfg.axis, Axis::a_constraint);
  EXPECT_EQ(cfg.point_count(), 19u);
  EXPECT_EQ(cfg.params.m_x, 3.0);
  EXPECT_EQ(cfg.params.m_y, 5.0);
  ASSERT_EQ(cfg.outputs.size(), 2u);
  EXPECT_EQ(cfg.outputs[1], Output::high_snr);
  EXPECT_EQ(cfg.seed, 17u);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, RejectsUnknownKeyAndBadValues) {
  std::istringstream a("colour=blue\n");
  EXPECT_THROW(parse_sweep_config(a), DomainError);
  std::istringstream b("from=abc\n");
  EXPECT_THROW(parse_sweep_config(b), DomainError);
  std::istringstream c("axis=frequency\n");
  EXPECT_THROW(parse_sweep_config(c), DomainError);
  std::istringstream d("no equals sign\n");
  EXPECT_THROW(parse_sweep_config(d), DomainError);
}

TEST(Config, RangeInvariants) {
  SweepConfig cfg;
  cfg.from = 5.0;
  cfg.to = 5.0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg.to = 4.0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = {};
  cfg.step = 0.0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = {};
  cfg.to = 2e6;
  EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(Csv, SnrSweepIncreasing) {
  SweepConfig cfg;
  cfg.params = {2.0, 2.0, 10.0, 10.0};
  const std::string csv = render_sweep_csv(cfg, 2);
  const auto rows = parse_csv(csv);
  ASSERT_EQ(rows.size(), 33u);
  EXPECT_EQ(rows[0][0], kCsvMagic);
  EXPECT_EQ(rows[1][0], "snr_db");
  EXPECT_EQ(rows[1][1], "ec_exact_bits_per_s_per_hz");
  double prev = -1.0;
  for (std::size_t i = 2; i < rows.size(); ++i) {
    const double v = std::stod(rows[i][1]);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Csv, DelaySweepDecreasing) {
  SweepConfig cfg;
  cfg.axis = Axis::a_constraint;
  cfg.from = 1.0;
  cfg.to = 10.0;
  cfg.step = 1.0;
  cfg.params = {2.0, 2.0, 5.0, 10.0};
  const auto rows = parse_csv(render_sweep_csv(cfg, 2));
  ASSERT_EQ(rows.size(), 12u);
  double prev = INFINITY;
  for (std::size_t i = 2; i < rows.size(); ++i) {
    const double v = std::stod(rows[i][1]);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Csv, NotApplicableMarkers) {
  SweepConfig cfg;
  cfg.axis = Axis::a_constraint;
  cfg.from = 1.0;
  cfg.to = 3.0;
  cfg.step = 1.0;
  cfg.outputs = {Output::exact, Output::high_snr, Output::low_snr};
  const auto rows = parse_csv(render_sweep_csv(cfg, 1));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_NE(rows[2][2], kNotApplicable);  // A = 1 < m_x = 2
  EXPECT_EQ(rows[3][2], kNotApplicable);  // A = 2
  EXPECT_EQ(rows[4][2], kNotApplicable);
  for (std::size_t i = 2; i < rows.size(); ++i) EXPECT_EQ(rows[i][3], kNotApplicable);
}

TEST(Csv, DeterministicAcrossRunsAndWorkerCounts) {
  SweepConfig cfg;
  cfg.from = 0.0;
  cfg.to = 20.0;
  cfg.step = 5.0;
  cfg.outputs = {Output::exact, Output::mc};
  cfg.n_samples = 20000;
  const std::string a = render_sweep_csv(cfg, 1);
  EXPECT_EQ(a, render_sweep_csv(cfg, 1));
  EXPECT_EQ(a, render_sweep_csv(cfg, 3));
  cfg.seed += 1;
  EXPECT_NE(a, render_sweep_csv(cfg, 1));
}

TEST(Csv, MatchesPointQueries) {
  SweepConfig cfg;
  cfg.axis = Axis::theta;
  cfg.from = 0.001;
  cfg.to = 0.501;
  cfg.step = 0.1;
  const auto rows = parse_csv(render_sweep_csv(cfg, 2));
  for (std::size_t i = 2; i < rows.size(); ++i) {
    const double theta = cfg.point(i - 2);
    const double ec = effective_capacity_exact(cfg.params, LinkBudget::from_db(cfg.snr_db),
                                               DelaySpec::from_theta(theta, cfg.tb, 1.0))
                          .ec_bits;
    EXPECT_EQ(rows[i][1], format_value(ec));
  }
}

TEST(AtomicWrite, LeavesNoPartialFile) {
  const auto dir = std::filesystem::temp_directory_path() / "sbx_atomic_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "out.csv").string();
  write_file_atomically(path, "hello\n");
  std::ifstream in(path);
  std::string s;
  std::getline(in, s);
  EXPECT_EQ(s, "hello");
  EXPECT_FALSE(std::filesystem::exists(path + ".partial"));
  EXPECT_THROW(write_file_atomically((dir / "missing" / "x.csv").string(), "x"), DomainError);
  std::filesystem::remove_all(dir);
}

TEST(Figures, PresetsAreValid) {
  for (int id = 1; id <= 5; ++id) {
    const auto curves = figures::figure_curves(id, 1, 0);
    EXPECT_FALSE(curves.empty());
    for (const auto& c : curves) EXPECT_NO_THROW(c.config.validate()) << c.name;
  }
  EXPECT_THROW(figures::figure_curves(6, 1, 0), DomainError);
}

TEST(Figures, ClaimsTextNamesPublishedValues) {
  const std::string fig3 = figures::claims_text(3);
  EXPECT_NE(fig3.find("35"), std::string::npos);
  EXPECT_NE(fig3.find("150"), std::string::npos);
  const std::string fig5 = figures::claims_text(5);
  EXPECT_NE(fig5.find("-6.7"), std::string::npos);
  EXPECT_NE(fig5.find("39"), std::string::npos);
}
