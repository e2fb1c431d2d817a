// Copyright 2026 The estlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "estlab/covmodel.hpp"
#include "estlab/experiments.hpp"
#include "estlab/fisher.hpp"
#include "test_support.hpp"

using namespace estlab;
using estlab::testing::rel;

TEST(Grids, LinAndLog) {
    EXPECT_EQ(linspace(0, 1, 5), (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
    EXPECT_EQ(linspace(3, 7, 1), std::vector<double>{3});
    const auto g = logspace(-2, 6, 40);
    ASSERT_EQ(g.size(), 40u);
    EXPECT_NEAR(g.front(), 1e-2, 1e-17);
    EXPECT_NEAR(g.back(), 1e6, 1e-9);
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g[i], g[i - 1]);
}

TEST(Table1, ReferenceParameters) {
    const auto cells = table1_cells(1.0, 0.05, 1000, 0.005);
    ASSERT_EQ(cells.size(), 6u);
    const double white = 1000 / 1.05;
    const double expected[6] = {white, white, white, 1000 / 51.0, 800.0, 1000.0};
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_LT(rel(cells[i].closed_form, expected[i]), 1e-12) << cells[i].approach << " " << cells[i].regime;
        EXPECT_LT(rel(cells[i].numeric, cells[i].closed_form), 1e-8) << cells[i].approach << " " << cells[i].regime;
        EXPECT_TRUE(cells[i].agree);
    }
    EXPECT_NEAR(cells[3].closed_form, 19.6078, 1e-4);
    EXPECT_NEAR(cells[0].closed_form, 952.381, 1e-3);
    // The limiting formula column keeps N/(a+c) for correlated WVA.
    EXPECT_LT(rel(cells[4].table_value, white), 1e-15);
}

TEST(Table1, NoCorrelationCollapsesToWhite) {
    for (const auto &cell : table1_cells(2.0, 0.0, 400, 0.01)) {
        EXPECT_LT(rel(cell.numeric, 200.0), 1e-10) << cell.approach << " " << cell.regime;
        EXPECT_LT(rel(cell.closed_form, 200.0), 1e-12);
    }
}

TEST(Table1, CsvShape) {
    const Table t = table1(1.0, 0.05, 1000, 0.005);
    EXPECT_EQ(t.rows.size(), 6u);
    for (const auto &r : t.rows) EXPECT_EQ(r.size(), t.headers.size());
    EXPECT_NEAR(t.number(5, "closed_form"), 1000.0, 1e-9);
    EXPECT_THROW(table1(1.0, -0.01, 10, 0.5), InvalidSpec);
    EXPECT_THROW(table1(1.0, 0.05, 10, 1.5), InvalidGamma);
}

TEST(Fig2, Examples) {
    const Table t = fig2_surface({1.0}, {0.0, -0.99, -0.999999});
    EXPECT_NEAR(t.number(0, "inverse_fisher"), 0.5, 1e-15);
    EXPECT_LT(t.number(1, "inverse_fisher"), t.number(0, "inverse_fisher"));
    EXPECT_LT(t.number(2, "inverse_fisher"), 1e-6);
    EXPECT_THROW(fig2_surface({1.0}, {1.0}), InvalidSpec);
    EXPECT_THROW(fig2_surface({0.0}, {0.0}), InvalidSpec);
}

TEST(Fig2, RelabelingSymmetry) {
    const auto xs = default_fig2_x();
    const auto rs = default_fig2_r();
    const Table t = fig2_surface(xs, rs);
    ASSERT_EQ(t.rows.size(), xs.size() * rs.size());
    // Row i·|r| + j and its mirror x → 1/x share the value in √(var1·var2) units.
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const std::size_t mirror = xs.size() - 1 - i;
        ASSERT_LT(rel(xs[i] * xs[mirror], 1.0), 1e-12);
        for (std::size_t j = 0; j < rs.size(); ++j) {
            EXPECT_LT(rel(t.number(i * rs.size() + j, "inverse_fisher"),
                          t.number(mirror * rs.size() + j, "inverse_fisher")),
                      1e-9);
        }
    }
}

TEST(Fig345, Examples) {
    const Table flat = fig345_curves({{"f", 1.0, 1.0}}, linspace(-1, 2, 7));
    for (std::size_t i = 0; i < flat.rows.size(); ++i) EXPECT_NEAR(flat.number(i, "variance"), 1.0, 1e-15);
    EXPECT_EQ(flat.number(0, "alpha_star"), 0.5);

    const Table half = fig345_curves({{"f", 1.0, 0.5}}, {0.5});
    EXPECT_NEAR(half.number(0, "variance"), 0.75, 1e-15);
}

TEST(Fig345, OptimumReproducesInverseInformation) {
    const auto fams = default_fig345_families();
    const auto grid = default_alpha_grid();
    const Table t = fig345_curves(fams, grid);
    ASSERT_EQ(t.rows.size(), fams.size() * grid.size());
    for (std::size_t k = 0; k < fams.size(); ++k) {
        const auto s = TwoOutcomeSpec::from_xr(fams[k].x, fams[k].r);
        const std::size_t row = k * grid.size();
        const double vmin = t.number(row, "min_variance");
        EXPECT_NEAR(two_outcome_variance(s, t.number(row, "alpha_star")), vmin, 1e-12);
        for (std::size_t j = 0; j < grid.size(); ++j) EXPECT_GE(t.number(row + j, "variance"), vmin - 1e-12);
        if (std::abs(fams[k].r) < 1) {
            EXPECT_LT(rel(vmin, 1.0 / fi_two_outcome(s)), 1e-12);
        }
    }
}

TEST(Fig6, SumIsConstant) {
    const Table t = fig6_decomposition(100, 0.5, default_phi_grid());
    ASSERT_EQ(t.rows.size(), 100u);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        EXPECT_NEAR(t.number(i, "sum"), 1.0, 1e-9);
        EXPECT_NEAR(t.number(i, "i1") + t.number(i, "i2") + t.number(i, "i3"), t.number(i, "sum"), 1e-12);
    }
}

TEST(Fig6, SmallAngleLimit) {
    const Table t = fig6_decomposition(100, 0.5, {1e-3});
    EXPECT_NEAR(t.number(0, "i1"), 1.0, 1e-4);
    EXPECT_NEAR(t.number(0, "i2"), 0.0, 1e-4);
    EXPECT_NEAR(t.number(0, "i3"), 0.0, 1e-4);
}

TEST(Fig6, QuarterTurnMatchesNumericBlocks) {
    const Table t = fig6_decomposition(100, 0.5, {std::numbers::pi / 2});
    const SpinModel sm = spin_model(std::numbers::pi / 2);
    const auto d = make_design(100, Scheme::ContiguousBlocks, 0.5).with_coefficients(sm.aw, sm.awp);
    const FisherReport r = fi_partitioned(build(CovSpec::solvable(1.0, 0.5, 100)), d);
    EXPECT_NEAR(t.number(0, "i1"), r.terms->i1 / 100.0, 1e-10);
    EXPECT_NEAR(t.number(0, "i2"), r.terms->i2 / 100.0, 1e-10);
    EXPECT_NEAR(t.number(0, "i3"), r.terms->i3 / 100.0, 1e-10);
}

class Fig7Sweep : public ::testing::Test {
protected:
    static void SetUpTestSuite() { rows_ = new std::vector<Fig7Row>(fig7_rows(Fig7Config{})); }
    static void TearDownTestSuite() { delete rows_; }
    static std::vector<Fig7Row> *rows_;
};
std::vector<Fig7Row> *Fig7Sweep::rows_ = nullptr;

TEST_F(Fig7Sweep, Endpoints) {
    const auto &r = *rows_;
    ASSERT_EQ(r.size(), 40u);
    const double white = 1000 / 1.05;
    EXPECT_LT(rel(r.front().fi_direct, white), 1e-9);
    EXPECT_LT(rel(r.front().fi_wva, white), 1e-9);
    EXPECT_LT(rel(r.front().fi_bgsub, white), 1e-9);
    EXPECT_NEAR(r.back().fi_direct, 19.61, 0.01);
    EXPECT_LT(rel(r.back().fi_wva, 800.0), 1e-3);
    EXPECT_LT(rel(r.back().fi_bgsub, 1000.0), 1e-3);
    EXPECT_EQ(r.front().retained, 5.0);
}

TEST_F(Fig7Sweep, Monotone) {
    const auto &r = *rows_;
    const double eps = 1e-9;
    for (std::size_t i = 1; i < r.size(); ++i) {
        EXPECT_LE(r[i].fi_direct, r[i - 1].fi_direct * (1 + eps)) << r[i].eta;
        EXPECT_LE(r[i].fi_wva, r[i - 1].fi_wva * (1 + eps)) << r[i].eta;
        EXPECT_GE(r[i].fi_bgsub, r[i - 1].fi_bgsub * (1 - eps)) << r[i].eta;
    }
    for (const auto &row : r) {
        EXPECT_GE(row.fi_bgsub, 1000 / 1.1);
        EXPECT_GE(row.fi_bgsub, row.fi_wva);
    }
}

TEST_F(Fig7Sweep, WvaKneeNearInverseGamma) {
    for (const auto &row : *rows_) {
        if (row.eta <= 30) {
            EXPECT_LT(rel(row.fi_wva, 1000 / 1.05), 1e-3) << row.eta;
        }
        if (row.eta >= 2000) {
            EXPECT_LT(row.fi_wva, 0.95 * 1000 / 1.05) << row.eta;
        }
    }
}

TEST_F(Fig7Sweep, EqualWeightNeverBeatsInformation) {
    for (const auto &row : *rows_) {
        EXPECT_LE(row.ew_direct, row.fi_direct * (1 + 1e-12));
        EXPECT_LE(row.ew_wva, row.fi_wva * (1 + 1e-12));
        EXPECT_LE(row.ew_bgsub, row.fi_bgsub * (1 + 1e-12));
    }
}

TEST(Fig7, BernoulliAveragesReps) {
    Fig7Config cfg;
    cfg.n = 400;
    cfg.gamma = 0.05;
    cfg.eta_grid = {0.01, 1e6};
    cfg.scheme = Scheme::BernoulliPostselect;
    cfg.reps = 16;
    cfg.seed = 3;
    const auto a = fig7_rows(cfg);
    const auto b = fig7_rows(cfg);
    EXPECT_EQ(a[0].fi_wva, b[0].fi_wva);
    EXPECT_NEAR(a[0].retained, 20.0, 5.0);
    // White limit: information is A_w² m/(a+c) averaged over patterns.
    EXPECT_LT(rel(a[0].fi_wva, 20.0 * a[0].retained / 1.05), 1e-9);
    cfg.scheme = Scheme::AlternatingSign;
    EXPECT_THROW(fig7_rows(cfg), ValidationError);
}

TEST(Fig7, CsvCarriesSeed) {
    Fig7Config cfg;
    cfg.n = 50;
    cfg.gamma = 0.1;
    cfg.eta_grid = {1.0};
    cfg.seed = 77;
    const Table t = fig7_sweep(cfg);
    EXPECT_EQ(t.seed, 77u);
    EXPECT_EQ(t.to_csv().rfind("# estlab-version=", 0), 0u);
}

TEST(DeltaInformation, Examples) {
    EXPECT_EQ(delta_i(1.0, 0.0, 1000).exact, 0.0);
    const DeltaI d = delta_i(1.0, 0.001, 1000);
    EXPECT_NEAR(d.exact, 0.999001, 1e-6);
    EXPECT_NEAR(d.approx, 0.999001, 1e-6);
    EXPECT_NEAR(delta_i(1.0, 0.05, 1000).exact, 47.619, 1e-3);
    EXPECT_THROW(delta_i(0.0, 0.1, 10), InvalidSpec);
    EXPECT_THROW(delta_i(1.0, -0.1, 10), InvalidSpec);
}

TEST(Csv, Format) {
    Table t;
    t.headers = {"x", "y"};
    t.add_row({0.1, 1});
    t.config = "k=v";
    t.seed = 5;
    const std::string csv = t.to_csv();
    EXPECT_EQ(csv, "# estlab-version=" + std::string(kVersion) + " config=" + digest_hex("k=v") +
                       " seed=5\nx,y\n0.10000000000000001,1\n");
    EXPECT_EQ(csv.find('\r'), std::string::npos);
    EXPECT_THROW(t.add_row({1.0}), std::invalid_argument);
}
