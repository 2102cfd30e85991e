#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "fecm/data/io.hpp"
#include "fecm/data/level_panel.hpp"
#include "fecm/data/outliers.hpp"
#include "fecm/data/standardize.hpp"
#include "fecm/data/transform.hpp"
#include "fecm/random.hpp"
#include "fecm/stats.hpp"

using namespace fecm;

namespace {

std::vector<double> positive_series(Rng& rng, std::size_t n) {
  std::vector<double> y(n);
  double level = 50.0 + 50.0 * rng.uniform();
  for (auto& v : y) {
    level *= std::exp(0.02 * rng.normal());
    v = level;
  }
  return y;
}

Panel make_panel(const Matrix& values, std::vector<SeriesMeta> meta) {
  Panel p;
  p.values = values;
  for (Index t = 0; t < values.rows(); ++t) p.time_index.push_back(Quarter{1985, 1}.plus(static_cast<int>(t)));
  p.meta = std::move(meta);
  return p;
}

SeriesMeta meta(const std::string& name, int tc, bool ir = false, IntegrationOrder io = IntegrationOrder::I1) {
  SeriesMeta m;
  m.mnemonic = name;
  m.tc = transform_code_from_int(tc);
  m.is_interest_rate = ir;
  m.integration_order = io;
  return m;
}

}  // namespace

TEST(ApplyTransformation, IdentityCode) {
  const std::vector<double> y{5, 7, 9};
  const auto out = apply_transformation(y, TransformCode::Level);
  EXPECT_EQ(out.values, y);
  EXPECT_TRUE(out.record.original_first_values.empty());
}

TEST(ApplyTransformation, FirstDifference) {
  const std::vector<double> y{1, 3, 6};
  const auto out = apply_transformation(y, TransformCode::Diff);
  EXPECT_EQ(out.values, (std::vector<double>{2, 3}));
  EXPECT_EQ(out.record.original_first_values, (std::vector<double>{1}));
}

TEST(ApplyTransformation, DiffLogOfConstantGrowth) {
  const std::vector<double> y{100, 110, 121};
  const auto out = apply_transformation(y, TransformCode::DiffLog);
  ASSERT_EQ(out.values.size(), 2u);
  EXPECT_NEAR(out.values[0], std::log(1.1), 1e-14);
  EXPECT_NEAR(out.values[1], std::log(1.1), 1e-14);
  EXPECT_TRUE(out.record.log_applied);
}

TEST(ApplyTransformation, OutputLengthsAndRetainedCounts) {
  const std::vector<double> y{1, 2, 4, 8, 16};
  for (int tc = 1; tc <= 6; ++tc) {
    const auto out = apply_transformation(y, transform_code_from_int(tc));
    const std::size_t consumed = tc == 1 || tc == 4 ? 0 : (tc == 2 || tc == 5 ? 1 : 2);
    EXPECT_EQ(out.values.size(), y.size() - consumed) << "tc " << tc;
    EXPECT_EQ(out.record.original_first_values.size(), consumed) << "tc " << tc;
  }
}

TEST(ApplyTransformation, NonPositiveUnderLogNamesSeriesAndIndex) {
  const std::vector<double> y{3, 2, -1, 4};
  try {
    apply_transformation(y, TransformCode::DiffLog, "CPI");
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("CPI"), std::string::npos);
    EXPECT_NE(msg.find("index 2"), std::string::npos);
  }
}

TEST(ApplyTransformation, TooShortIsContractError) {
  const std::vector<double> y{1, 2};
  EXPECT_THROW(apply_transformation(y, TransformCode::Diff), ContractError);
}

TEST(InvertTransformation, CumulativeSum) {
  TransformRecord rec{TransformCode::Diff, false, {}};
  const std::vector<double> last{6}, d{2, 1};
  EXPECT_EQ(invert_transformation(last, d, rec), (std::vector<double>{8, 9}));
}

TEST(InvertTransformation, ExpOfCumulatedDiffLog) {
  TransformRecord rec{TransformCode::DiffLog, true, {}};
  const std::vector<double> last{121}, d{std::log(1.1)};
  const auto out = invert_transformation(last, d, rec);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_NEAR(out[0], 133.1, 1e-10);
}

TEST(InvertTransformation, MismatchedAnchorCountIsContractError) {
  TransformRecord rec{TransformCode::Diff2, false, {}};
  const std::vector<double> last{1}, d{0.5};
  EXPECT_THROW(invert_transformation(last, d, rec), ContractError);
  TransformRecord bad{TransformCode::Diff, true, {}};
  const std::vector<double> one{1};
  EXPECT_THROW(invert_transformation(one, d, bad), ContractError);
}

// Property: for every code, inversion with the retained leading values
// reproduces the original series.
TEST(TransformProperty, RoundTripAllCodes) {
  Rng rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const auto y = positive_series(rng, 3 + rep % 40);
    for (int tc = 1; tc <= 6; ++tc) {
      const auto fwd = apply_transformation(y, transform_code_from_int(tc));
      const auto back = invert_transformation(fwd.record.original_first_values, fwd.values, fwd.record);
      const std::size_t k = fwd.record.original_first_values.size();
      ASSERT_EQ(back.size() + k, y.size());
      for (std::size_t i = 0; i < back.size(); ++i) ASSERT_NEAR(back[i], y[i + k], 1e-10 * std::abs(y[i + k]));
    }
  }
}

TEST(Cumulate, Examples) {
  EXPECT_EQ(cumulate(std::vector<double>{1, 2, 3}), (std::vector<double>{1, 3, 6}));
  EXPECT_EQ(cumulate(std::vector<double>{0, 0, 0, 0}), (std::vector<double>{0, 0, 0, 0}));
  EXPECT_EQ(cumulate(std::vector<double>{4.5}), (std::vector<double>{4.5}));
}

TEST(Cumulate, InverseOfFirstDifferenceUpToInitialValue) {
  Rng rng(3);
  std::vector<double> y(30);
  for (auto& v : y) v = rng.normal();
  const auto d = apply_transformation(y, TransformCode::Diff);
  const auto c = cumulate(d.values);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(c[i] + y[0], y[i + 1], 1e-12);
  const std::vector<double> cum = cumulate(y);
  const auto dd = apply_transformation(cum, TransformCode::Diff);
  for (std::size_t i = 0; i < dd.values.size(); ++i) EXPECT_NEAR(dd.values[i], y[i + 1], 1e-12);
}

TEST(ReplaceOutliers, NoOutliersLeavesSeriesUnchanged) {
  const std::vector<double> y{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto r = replace_outliers(y);
  EXPECT_EQ(r.cleaned, y);
  EXPECT_TRUE(r.outlier_indices.empty());
}

// Twenty points equal to 1 except a 1000 in position 6: median 1, IQR 0, so
// the spike is flagged and replaced by the median of five preceding ones.
TEST(ReplaceOutliers, SpikeInInterior) {
  std::vector<double> y(20, 1.0);
  y[5] = 1000.0;
  const auto r = replace_outliers(y);
  ASSERT_EQ(r.outlier_indices, (std::vector<std::size_t>{5}));
  EXPECT_EQ(r.cleaned[5], 1.0);
  EXPECT_EQ(r.cleaned, std::vector<double>(20, 1.0));
}

// Sorted values {2 x6, 3 x5, 10}: median 2.5, Q1 2, Q3 3, IQR 1, bound 6.
// 10 in the first position lies 7.5 away and is replaced by the median of the
// remaining eleven values, 2.
TEST(ReplaceOutliers, FirstPositionUsesMedianOfRest) {
  const std::vector<double> y{10, 2, 3, 2, 3, 2, 3, 2, 3, 2, 3, 2};
  const auto r = replace_outliers(y);
  ASSERT_EQ(r.outlier_indices, (std::vector<std::size_t>{0}));
  EXPECT_EQ(r.cleaned[0], 2.0);
}

// Same quantiles with 40 at index 3: replaced by median(2, 3, 2) = 2.
TEST(ReplaceOutliers, EarlyIndexUsesAvailablePredecessors) {
  const std::vector<double> y{2, 3, 2, 40, 3, 2, 3, 2, 3, 2, 3, 2};
  const auto r = replace_outliers(y);
  ASSERT_EQ(r.outlier_indices, (std::vector<std::size_t>{3}));
  EXPECT_EQ(r.cleaned[3], 2.0);
}

// Two adjacent spikes: the second uses the cleaned value of the first.
// Values 0..9 repeated twice with spikes at 12 and 13 (original 2 and 3):
// sorted sample of 20 has median 4.5 and IQR 5 (Q1 2, Q3 7), bound 30.
// Index 12 -> median(7,8,9,0,1) = 7; index 13 -> median(8,9,0,1,7) = 7.
TEST(ReplaceOutliers, ConsecutiveSpikesUseCleanedHistory) {
  std::vector<double> y;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 10; ++i) y.push_back(i);
  y[12] = 500;
  y[13] = -500;
  const auto r = replace_outliers(y);
  ASSERT_EQ(r.outlier_indices, (std::vector<std::size_t>{12, 13}));
  EXPECT_EQ(r.cleaned[12], 7.0);
  EXPECT_EQ(r.cleaned[13], 7.0);
}

TEST(ReplaceOutliers, IdempotentOnFixtures) {
  std::vector<std::vector<double>> fixtures;
  fixtures.push_back(std::vector<double>(20, 1.0));
  fixtures.back()[5] = 1000.0;
  fixtures.push_back({10, 2, 3, 2, 3, 2, 3, 2, 3, 2, 3, 2});
  fixtures.push_back({2, 3, 2, 40, 3, 2, 3, 2, 3, 2, 3, 2});
  Rng rng(11);
  for (int k = 0; k < 20; ++k) {
    std::vector<double> y(60);
    for (auto& v : y) v = rng.normal();
    y[static_cast<std::size_t>(10 + k)] += 40.0;
    fixtures.push_back(y);
  }
  for (const auto& y : fixtures) {
    const auto once = replace_outliers(y);
    const auto twice = replace_outliers(once.cleaned);
    EXPECT_EQ(once.cleaned, twice.cleaned);
    EXPECT_TRUE(twice.outlier_indices.empty());
  }
}

TEST(ReplaceOutliers, TooShortIsContractError) {
  EXPECT_THROW(replace_outliers(std::vector<double>{1, 2, 3, 4, 5}), ContractError);
}

TEST(Standardize, MeanZeroSdOne) {
  Matrix x(3, 1);
  x << 1, 2, 3;
  const auto s = standardize(make_panel(x, {meta("A", 1)}));
  EXPECT_NEAR(s.panel.values.col(0).mean(), 0.0, 1e-15);
  EXPECT_NEAR(s.panel.values.col(0).squaredNorm() / 2.0, 1.0, 1e-15);
  EXPECT_NEAR(s.scaling.mean(0), 2.0, 1e-15);
  EXPECT_NEAR(s.scaling.sd(0), 1.0, 1e-15);
}

TEST(Standardize, IdempotentAndInvertible) {
  Rng rng(5);
  const Matrix x = rng.normal_matrix(40, 4) * 3.0 + Matrix::Constant(40, 4, 7.0);
  const Panel p = make_panel(x, {meta("A", 1), meta("B", 1), meta("C", 1), meta("D", 1)});
  const auto once = standardize(p);
  const auto twice = standardize(once.panel);
  EXPECT_LT((once.panel.values - twice.panel.values).cwiseAbs().maxCoeff(), 1e-12);
  const Panel back = destandardize(once.panel, once.scaling);
  EXPECT_LT((back.values - x).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Standardize, ZeroVarianceColumnIsNamed) {
  Matrix x(4, 2);
  x << 1, 5, 2, 5, 3, 5, 4, 5;
  try {
    standardize(make_panel(x, {meta("A", 1), meta("FLAT", 1)}));
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("FLAT"), std::string::npos);
  }
}

TEST(BuildLevelPanel, LogsCumulationAndInterestRates) {
  Matrix x(4, 4);
  x << 100, 2, 1.0, 5.0,
       110, 3, -1.0, 5.5,
       121, 5, 2.0, 6.0,
       133, 8, 0.5, 6.5;
  const Panel p = make_panel(x, {meta("GDP", 5), meta("M", 2), meta("INF", 1, false, IntegrationOrder::I0),
                                 meta("RATE", 5, true)});
  const Panel lv = build_level_panel(p);
  EXPECT_NEAR(lv.values(2, 0), std::log(121.0), 1e-14);  // logged
  EXPECT_EQ(lv.values(2, 1), 5.0);                        // tc 2: not logged
  EXPECT_EQ(lv.values(3, 2), 2.5);                        // I(0) cumulated
  EXPECT_EQ(lv.values(3, 3), 6.5);                        // interest rate never logged
}

TEST(BuildLevelPanel, NoStationarySeriesIsIdentityApartFromLogs) {
  Rng rng(1);
  Matrix x(20, 2);
  for (Index t = 0; t < 20; ++t) {
    x(t, 0) = 10 + rng.normal();
    x(t, 1) = 50 + t;
  }
  const Panel p = make_panel(x, {meta("A", 2), meta("B", 4)});
  const Panel lv = build_level_panel(p);
  EXPECT_EQ(lv.values.col(0), x.col(0));
  EXPECT_LT((lv.values.col(1) - x.col(1).array().log().matrix()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(BuildLevelPanel, MissingIntegrationOrderIsConfigError) {
  Matrix x = Matrix::Ones(5, 1);
  SeriesMeta m = meta("A", 1);
  m.integration_order.reset();
  EXPECT_THROW(build_level_panel(make_panel(x, {m})), ConfigError);
}

TEST(BuildLevelPanel, Table1FixtureCountsAndAllColumnsIntegrated) {
  const auto meta117 = io::load_metadata(std::string(FECM_SOURCE_DIR) + "/data/table1_metadata.csv");
  ASSERT_EQ(meta117.size(), 117u);
  int i0 = 0;
  for (const auto& m : meta117) i0 += *m.integration_order == IntegrationOrder::I0;
  EXPECT_EQ(i0, 3);

  Rng rng(2024);
  const Index t_len = 136;  // 1985Q1..2018Q4
  Matrix x(t_len, 117);
  for (Index j = 0; j < 117; ++j) {
    const auto& m = meta117[static_cast<std::size_t>(j)];
    double level = 100.0;
    for (Index t = 0; t < t_len; ++t) {
      if (*m.integration_order == IntegrationOrder::I0) {
        x(t, j) = rng.normal();
      } else {
        level *= std::exp(0.01 * rng.normal());
        x(t, j) = level;
      }
    }
  }
  const Panel lv = build_level_panel(make_panel(x, meta117));
  // Every column of the level panel should look integrated: ADF does not
  // reject the unit root for the clear majority.
  int non_reject = 0;
  for (Index j = 0; j < 117; ++j) {
    const auto col = column_vector(lv.values, j);
    non_reject += !stats::adf_test(col, 1).rejects_unit_root_5pct();
  }
  EXPECT_GE(non_reject, 100);
}

// Cumulated white noise is a random walk: ADF keeps the unit root in at
// least 90% of 200 draws.
TEST(BuildLevelPanel, CumulatedWhiteNoiseLooksLikeRandomWalk) {
  int non_reject = 0;
  for (int rep = 0; rep < 200; ++rep) {
    Rng rng(replication_seed(900, static_cast<std::uint64_t>(rep)));
    Matrix x(150, 1);
    for (Index t = 0; t < 150; ++t) x(t, 0) = rng.normal();
    const Panel lv = build_level_panel(make_panel(x, {meta("W", 1, false, IntegrationOrder::I0)}));
    non_reject += !stats::adf_test(column_vector(lv.values, 0), 1).rejects_unit_root_5pct();
  }
  EXPECT_GE(non_reject, 180);
}

TEST(PrepareSample, CleanedLevelsMatchCumulatedCleanDiffs) {
  Rng rng(8);
  Matrix x(40, 2);
  double a = 0, b = 0;
  for (Index t = 0; t < 40; ++t) {
    a += rng.normal();
    b += rng.normal();
    x(t, 0) = a;
    x(t, 1) = b;
  }
  x.block(20, 0, 20, 1).array() += 100.0;  // level shift -> one outlying difference
  const Panel p = make_panel(x, {meta("A", 2), meta("B", 2)});
  const auto s = prepare_sample(p);
  ASSERT_EQ(s.outliers.size(), 1u);
  EXPECT_EQ(s.outliers[0].mnemonic, "A");
  EXPECT_EQ(s.outliers[0].index, 20u);
  for (Index t = 1; t < 40; ++t)
    EXPECT_NEAR(s.levels.values(t, 0) - s.levels.values(t - 1, 0), s.diffs(t - 1, 0), 1e-12);
  EXPECT_EQ(s.levels.values.col(1), x.col(1));
}

TEST(BalancePanel, TrimsToCommonSpan) {
  const double na = std::numeric_limits<double>::quiet_NaN();
  Matrix x(5, 2);
  x << na, 1, 2, 2, 3, 3, 4, 4, 5, na;
  const Panel b = balance_panel(make_panel(x, {meta("A", 1), meta("B", 1)}));
  EXPECT_EQ(b.rows(), 3);
  EXPECT_EQ(b.time_index.front(), (Quarter{1985, 2}));
  x(2, 0) = na;
  EXPECT_THROW(balance_panel(make_panel(x, {meta("A", 1), meta("B", 1)})), ConfigError);
}

TEST(Quarter, ParseFormatAndArithmetic) {
  EXPECT_EQ(Quarter::parse("2012Q1"), (Quarter{2012, 1}));
  EXPECT_EQ(Quarter::parse("2018:Q4"), (Quarter{2018, 4}));
  EXPECT_EQ((Quarter{2011, 4}).plus(1), (Quarter{2012, 1}));
  EXPECT_EQ((Quarter{1985, 1}).plus(135).to_string(), "2018Q4");
  EXPECT_THROW(Quarter::parse("2012M1"), ConfigError);
}

TEST(PanelIo, ReadsDelimitedTextAndRejectsUnknownColumns) {
  std::istringstream meta_in(
      "mnemonic,description,tc,is_interest_rate,integration_order\n"
      "A,\"Series, with comma\",5,false,I1\n"
      "R,Rate,2,true,I1\n");
  const auto m = io::read_metadata(meta_in);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].description, "Series, with comma");
  EXPECT_TRUE(m[1].is_interest_rate);
  std::istringstream panel_in("date,A,R\n2000Q1,1.5,3\n2000Q2,NA,4\n2000Q3,2.5,5\n");
  const Panel p = io::read_panel(panel_in, m);
  EXPECT_EQ(p.rows(), 3);
  EXPECT_TRUE(std::isnan(p.values(1, 0)));
  std::istringstream bad("date,A,Z\n2000Q1,1,2\n");
  EXPECT_THROW(io::read_panel(bad, m), ConfigError);
}

TEST(Seasonality, FlagsStrongQuarterlyPatternOnly) {
  Rng rng(12);
  Matrix x(80, 2);
  double a = 0, b = 0;
  for (Index t = 0; t < 80; ++t) {
    a += rng.normal() * 0.1 + (t % 4 == 0 ? 2.0 : -0.6667);
    b += rng.normal();
    x(t, 0) = a;
    x(t, 1) = b;
  }
  const Panel p = make_panel(x, {meta("SEAS", 2), meta("PLAIN", 2)});
  const auto flagged = seasonality_warnings(p);
  ASSERT_EQ(flagged.size(), 1u);
  EXPECT_EQ(flagged[0], "SEAS");
}
