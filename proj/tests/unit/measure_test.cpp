#include <gtest/gtest.h>

#include <algorithm>

#include "gcm/error.hpp"
#include "gcm/measure.hpp"

using namespace gcm;

namespace {

// Expected values below come from tests/oracle/hand_oracle.py.
constexpr double kSd3 = 0.408248290463863;    // pstdev([0, 0.5, 1])
constexpr double kWB = 0.2795138888888889;    // unit B of the 3x2 example
constexpr double kMeanW = 0.4265046296296296;
constexpr double kSdW = 0.42127165297278485;

ObservationMatrix hand_matrix() {
  ObservationMatrix m;
  m.year = 2019;
  m.units = {"A", "B", "C"};
  m.indicators = {{"x1", "x1", 1, Direction::Stimulant}, {"x2", "x2", 2, Direction::Stimulant}};
  m.values = {{2.0, 10.0}, {4.0, 20.0}, {10.0, 40.0}};
  return m;
}

std::vector<UnitScore> scores_of(std::initializer_list<double> ws) {
  std::vector<UnitScore> out;
  int k = 0;
  for (double w : ws) out.push_back({"u" + std::to_string(k++), w, 0.0, w});
  return out;
}

}  // namespace

TEST(NormalizeColumn, Stimulant) {
  const std::vector<double> v{2, 4, 10};
  EXPECT_EQ(normalize_column(v, Direction::Stimulant), (std::vector<double>{0.0, 0.25, 1.0}));
}

TEST(NormalizeColumn, Destimulant) {
  const std::vector<double> v{2, 4, 10};
  EXPECT_EQ(normalize_column(v, Direction::Destimulant), (std::vector<double>{1.0, 0.75, 0.0}));
}

TEST(NormalizeColumn, ExtremesMapToZeroAndOne) {
  const std::vector<double> v{3.7, -1.25, 8.125, 0.1};
  const auto z = normalize_column(v, Direction::Stimulant);
  EXPECT_EQ(z[1], 0.0);
  EXPECT_EQ(z[2], 1.0);
}

TEST(NormalizeColumn, Errors) {
  EXPECT_THROW(normalize_column(std::vector<double>{5.0}, Direction::Stimulant), DegenerateInput);
  EXPECT_THROW(normalize_column(std::vector<double>{}, Direction::Stimulant), DegenerateInput);
  EXPECT_THROW(normalize_column(std::vector<double>{7.0, 7.0, 7.0}, Direction::Stimulant), ConstantColumn);
}

TEST(NormalizeMatrix, ColumnsAreIndependent) {
  auto m = hand_matrix();
  const auto z = normalize_matrix(m);
  EXPECT_EQ(z.values[1][0], 0.25);
  EXPECT_DOUBLE_EQ(z.values[1][1], 1.0 / 3.0);
  m.values[1][1] = 35.0;  // changing column 2 leaves column 1 untouched
  EXPECT_EQ(normalize_matrix(m).values[1][0], 0.25);
}

TEST(NormalizeMatrix, UnitIntervalColumnIsUnchanged) {
  ObservationMatrix m;
  m.units = {"a", "b", "c", "d"};
  m.indicators = {{"x", "x", 1, Direction::Stimulant}};
  m.values = {{0.0}, {0.5}, {1.0}, {0.125}};
  const auto z = normalize_matrix(m);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(z.values[i][0], *m.values[i][0]);
}

TEST(NormalizeMatrix, ConstantColumnNamesIndicator) {
  auto m = hand_matrix();
  for (auto& row : m.values) row[1] = 77.0;
  try {
    normalize_matrix(m);
    FAIL();
  } catch (const ConstantColumn& e) {
    EXPECT_EQ(e.indicator(), "x2");
  }
}

TEST(Median, Examples) {
  EXPECT_EQ(median(std::vector<double>{0.2, 0.8, 0.5}), 0.5);
  EXPECT_EQ(median(std::vector<double>{0.0, 0.2, 0.8, 1.0}), 0.5);
  EXPECT_EQ(median(std::vector<double>{0.37}), 0.37);
  EXPECT_THROW(median(std::vector<double>{}), DegenerateInput);
}

TEST(StdDev, Examples) {
  EXPECT_EQ(std_dev(std::vector<double>{0.3, 0.3, 0.3}), 0.0);
  EXPECT_EQ(std_dev(std::vector<double>{0.0, 1.0}), 0.5);
  EXPECT_NEAR(std_dev(std::vector<double>{0.0, 0.5, 1.0}), kSd3, 1e-15);
  EXPECT_THROW(std_dev(std::vector<double>{}), DegenerateInput);
}

TEST(UnitScore, Examples) {
  auto s = unit_score("Z", std::vector<double>{0, 0, 0});
  EXPECT_EQ(s.median, 0.0);
  EXPECT_EQ(s.std_dev, 0.0);
  EXPECT_EQ(s.w, 0.0);

  s = unit_score("O", std::vector<double>{1, 1, 1, 1});
  EXPECT_EQ(s.median, 1.0);
  EXPECT_EQ(s.std_dev, 0.0);
  EXPECT_EQ(s.w, 1.0);

  s = unit_score("M", std::vector<double>{0, 0.5, 1});
  EXPECT_NEAR(s.w, 0.5 * (1 - kSd3), 1e-15);
  EXPECT_NEAR(s.w, 0.295876, 1e-6);
  EXPECT_EQ(s.unit, "M");
}

TEST(Classify, EqualScoresAreAllGroupOne) {
  const auto scores = scores_of({0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1});
  const auto c = classify(scores);
  EXPECT_EQ(c.sd_w, 0.0);
  EXPECT_EQ(c.members(Group::I).size(), scores.size());
}

TEST(Classify, HandExample) {
  const auto c = classify(scores_of({1.0, 0.279514, 0.0}));
  EXPECT_NEAR(c.mean_w, 0.426505, 1e-6);
  EXPECT_NEAR(c.sd_w, 0.421271, 1e-6);
  EXPECT_EQ(c.group_of("u0"), Group::I);
  EXPECT_EQ(c.group_of("u1"), Group::III);
  EXPECT_EQ(c.group_of("u2"), Group::IV);
  EXPECT_TRUE(c.members(Group::II).empty());
}

TEST(Classify, TiePolicyDecidesTheMeanValue) {
  // mean of {0, 0.5, 1} is exactly 0.5
  const auto scores = scores_of({0.0, 0.5, 1.0});
  EXPECT_EQ(classify(scores, TiePolicy::HigherGroup).group_of("u1"), Group::II);
  EXPECT_EQ(classify(scores, TiePolicy::LowerGroup).group_of("u1"), Group::III);
}

TEST(Classify, Errors) {
  EXPECT_THROW(classify(scores_of({0.5})), DegenerateInput);
  auto dup = scores_of({0.1, 0.2});
  dup[1].unit = dup[0].unit;
  EXPECT_THROW(classify(dup), DegenerateInput);
}

TEST(Pipeline, HandExample) {
  const auto r = run_pipeline(hand_matrix());
  ASSERT_EQ(r.scores.size(), 3u);
  EXPECT_EQ(r.ranking(), (std::vector<std::string>{"C", "B", "A"}));
  EXPECT_EQ(r.scores[0].w, 1.0);
  EXPECT_NEAR(r.scores[1].w, kWB, 1e-15);
  EXPECT_EQ(r.scores[2].w, 0.0);
  EXPECT_NEAR(r.classification.mean_w, kMeanW, 1e-15);
  EXPECT_NEAR(r.classification.sd_w, kSdW, 1e-15);
  EXPECT_EQ(r.classification.group_of("C"), Group::I);
  EXPECT_EQ(r.classification.group_of("B"), Group::III);
  EXPECT_EQ(r.classification.group_of("A"), Group::IV);
  EXPECT_EQ(r.indicator_count, 2u);
  EXPECT_DOUBLE_EQ(r.normalized.values[1][1], 1.0 / 3.0);
}

TEST(Pipeline, DominantUnitScoresOne) {
  auto m = hand_matrix();
  m.units.push_back("D");
  m.values.push_back({{50.0, 90.0}});
  const auto r = run_pipeline(m);
  EXPECT_EQ(r.scores.front().unit, "D");
  EXPECT_EQ(r.scores.front().w, 1.0);
  EXPECT_EQ(r.classification.group_of("D"), Group::I);
}

TEST(Pipeline, ScoreTiesOrderedByUnit) {
  ObservationMatrix m;
  m.units = {"ZZ", "AA", "MM"};
  m.indicators = {{"x", "x", 1, Direction::Stimulant}};
  m.values = {{5.0}, {5.0}, {1.0}};
  const auto r = run_pipeline(m);
  EXPECT_EQ(r.ranking(), (std::vector<std::string>{"AA", "ZZ", "MM"}));
}

TEST(Pipeline, ConstantColumnHandling) {
  auto m = hand_matrix();
  m.indicators.push_back({"flat", "flat", 3, Direction::Stimulant});
  for (auto& row : m.values) row.push_back(7.0);

  try {
    run_pipeline(m);
    FAIL();
  } catch (const ConstantColumn& e) {
    EXPECT_EQ(e.stage(), "normalize");
    EXPECT_EQ(e.indicator(), "flat");
  }

  PipelineSettings s;
  s.constant_column = ConstantColumnPolicy::DropIndicator;
  const auto r = run_pipeline(m, s);
  EXPECT_EQ(r.indicator_count, 2u);
  ASSERT_EQ(r.dropped_indicators.size(), 1u);
  EXPECT_EQ(r.dropped_indicators[0].id, "flat");
  EXPECT_EQ(r.scores, run_pipeline(hand_matrix()).scores);
}

TEST(Pipeline, MissingPolicyStageAndDroppedUnits) {
  auto m = hand_matrix();
  m.units.push_back("D");
  m.values.push_back({{std::nullopt, 15.0}});
  try {
    run_pipeline(m);
    FAIL();
  } catch (const MissingData& e) {
    EXPECT_EQ(e.stage(), "missing");
  }
  PipelineSettings s;
  s.missing = MissingPolicy::DropUnit;
  const auto r = run_pipeline(m, s);
  ASSERT_EQ(r.dropped_units.size(), 1u);
  EXPECT_EQ(r.dropped_units[0].id, "D");
  EXPECT_EQ(r.scores, run_pipeline(hand_matrix()).scores);
}

TEST(Pipeline, StructuralProblemsFailValidation) {
  auto m = hand_matrix();
  m.units[1] = "A";
  try {
    run_pipeline(m);
    FAIL();
  } catch (const DegenerateMatrix& e) {
    EXPECT_EQ(e.stage(), "validate");
  }
}

TEST(Pipeline, ParallelScoringMatchesSerial) {
  auto m = hand_matrix();
  for (int k = 0; k < 40; ++k) {
    m.units.push_back("X" + std::to_string(k));
    m.values.push_back({{3.0 + k * 0.17, 12.0 + (k % 7) * 3.1}});
  }
  PipelineSettings par;
  par.threads = 8;
  EXPECT_EQ(run_pipeline(m), run_pipeline(m, par));
}
