#include <gtest/gtest.h>

#include <sstream>

#include "homeo/verify.hpp"

using namespace homeo;

TEST(Verify, DefaultSeedPassesEveryCheck) {
  const auto report = run_verify(1);
  for (const auto& c : report.checks) {
    EXPECT_TRUE(c.pass) << c.module << "/" << c.name << " max " << c.max_violation << " tol " << c.tolerance << " "
                        << c.note;
    EXPECT_GT(c.count, 0u) << c.name;
  }
  EXPECT_TRUE(report.all_pass());
}

TEST(Verify, OtherSeedsPass) {
  for (std::uint64_t seed : {2u, 17u}) EXPECT_TRUE(run_verify(seed).all_pass()) << "seed " << seed;
}

TEST(Verify, CoversEveryModule) {
  const auto report = run_verify(1);
  for (const char* m : {"tensor_core", "energy_net", "potential_net", "material_point", "discovery", "cli_io"}) {
    bool found = false;
    for (const auto& c : report.checks) found |= c.module == m;
    EXPECT_TRUE(found) << m;
  }
  for (const char* name : {"potential_convexity", "potential_nonnegative", "potential_dissipation_sign",
                           "potential_isotropy", "energy_normalization", "energy_derivative_fd",
                           "moduli_hessian_identity", "determinant_preservation_shear_flow"})
    EXPECT_NE(report.find(name), nullptr) << name;
}

TEST(Verify, SampleCountsMatchTheContract) {
  const auto report = run_verify(1);
  EXPECT_GE(report.find("potential_nonnegative")->count, 10000u);
  EXPECT_GE(report.find("potential_convexity")->count, 3000u);
  EXPECT_GE(report.find("potential_dissipation_sign")->count, 10000u);
  EXPECT_GE(report.find("eig_reconstruction")->count, 1000u);
  EXPECT_GE(report.find("determinant_preservation_shear_flow")->count, 200u);
}

TEST(Verify, ReportListsCountsAndViolations) {
  const auto report = run_verify(1);
  std::ostringstream out;
  write_report(out, report);
  const auto text = out.str();
  EXPECT_NE(text.find("seed: 1"), std::string::npos);
  EXPECT_NE(text.find("count"), std::string::npos);
  EXPECT_NE(text.find("max_violation"), std::string::npos);
  EXPECT_NE(text.find("summary: " + std::to_string(report.checks.size()) + "/" +
                      std::to_string(report.checks.size()) + " checks passed"),
            std::string::npos);
  for (const auto& c : report.checks) EXPECT_NE(text.find(c.name), std::string::npos);
}

TEST(Verify, Deterministic) {
  const auto a = run_verify(5), b = run_verify(5);
  ASSERT_EQ(a.checks.size(), b.checks.size());
  for (std::size_t k = 0; k < a.checks.size(); ++k) EXPECT_EQ(a.checks[k].max_violation, b.checks[k].max_violation);
}
