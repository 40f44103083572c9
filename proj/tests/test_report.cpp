#include <gtest/gtest.h>

#include "rpci/agreement.hpp"
#include "rpci/error.hpp"
#include "rpci/report.hpp"
#include "rpci/study.hpp"

namespace rpci {
namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t pos; (pos = s.find("\r\n", start)) != std::string::npos; start = pos + 2) {
    out.push_back(s.substr(start, pos - start));
  }
  EXPECT_EQ(start, s.size()) << "every line must end in CRLF";
  return out;
}

PatientRecord record(const std::string& id, double base, bool hole) {
  PatientRecord r;
  r.metrics.patient_id = id;
  std::array<std::size_t, kRegionCount> counts{};
  for (int i = 0; i < kRegionCount; ++i) {
    auto& m = r.metrics.regions[static_cast<std::size_t>(i)];
    m.region = RegionId(i);
    counts[static_cast<std::size_t>(i)] = static_cast<std::size_t>(100 + i);
    if (hole && i == 4) continue;
    m.dice = base - 0.01 * i;
    m.hd95_mm = 1.0 + 0.5 * i + base;
    m.asd_mm = 0.25 * i + base;
  }
  r.gt_voxel_counts = counts;
  summarize_overall(r.metrics);
  return r;
}

MetricReport sample_report(bool hole_everywhere = false) {
  return aggregate({record("p2", 0.9, hole_everywhere), record("p1", 0.8, true), record("p3", 0.85, hole_everywhere)});
}

TEST(Report, CsvLayout) {
  const std::string csv = render_report(sample_report(), ReportFormat::kCsv);
  const auto rows = lines(csv);
  ASSERT_EQ(rows.size(), 15u);  // header + 13 regions + Overall
  EXPECT_EQ(rows[0], "Region,Name,Stored label,Total voxel %,Dice,HD95 (mm),ASD (mm)");
  EXPECT_EQ(rows[1].substr(0, 17), "0,central,1,7.26,");  // 100 / 1378
  EXPECT_EQ(rows[14].substr(0, 13), "Overall,,,-,0");
  EXPECT_NE(rows[1].find(" ± "), std::string::npos);
}

TEST(Report, CsvMissingCellsAreNa) {
  const MetricReport r = sample_report(true);
  const auto rows = lines(render_report(r, ReportFormat::kCsv));
  EXPECT_EQ(rows[5], "4,left flank,5,7.55,n/a,n/a,n/a");
  EXPECT_EQ(r.warnings.size(), 3u);
}

TEST(Report, RenderParseRenderIsIdempotent) {
  for (const bool hole : {false, true}) {
    const MetricReport r = sample_report(hole);
    for (const auto f : {ReportFormat::kCsv, ReportFormat::kJson}) {
      const std::string once = render_report(r, f);
      const std::string twice = render_report(parse_report(once, f), f);
      EXPECT_EQ(once, twice);
    }
    EXPECT_EQ(parse_report(render_report(r, ReportFormat::kJson), ReportFormat::kJson), r);
  }
}

TEST(Report, JsonCarriesFullPrecision) {
  MetricReport r = sample_report();
  r.rows[0].cells[0]->mean = 0.1 + 0.2;
  const auto back = parse_report(render_report(r, ReportFormat::kJson), ReportFormat::kJson);
  EXPECT_EQ(back.rows[0].cells[0]->mean, 0.1 + 0.2);
  EXPECT_EQ(back.rows.back().region, std::nullopt);
}

TEST(Report, AgreementColumns) {
  PatientMetrics a;
  a.patient_id = "p/A";
  for (int i = 0; i < kRegionCount; ++i) {
    a.regions[static_cast<std::size_t>(i)] = {RegionId(i), 0.9, 2.0, 0.5};
  }
  const MetricReport r = aggregate_agreement({a}, {});
  const auto rows = lines(render_report(r, ReportFormat::kCsv));
  ASSERT_EQ(rows.size(), 15u);
  EXPECT_EQ(rows[0], "Region,Name,Stored label,Dice_H,Dice_M,HD95_H (mm),HD95_M (mm),ASD_H (mm),ASD_M (mm)");
  EXPECT_EQ(rows[1], "0,central,1,0.90 ± 0.00,n/a,2.00 ± 0.00,n/a,0.50 ± 0.00,n/a");
  const auto back = parse_report(render_report(r, ReportFormat::kCsv), ReportFormat::kCsv);
  EXPECT_EQ(back.kind, "agreement");
}

TEST(Report, QuotesFieldsWithCommas) {
  const auto rows = lines(render_report(sample_report(), ReportFormat::kCsv));
  // Region names contain no commas, so no quoting appears in practice.
  for (const auto& row : rows) EXPECT_EQ(row.find('"'), std::string::npos);
}

TEST(Report, RejectsMalformedInput) {
  EXPECT_THROW(parse_report("Foo,Bar\r\n", ReportFormat::kCsv), ValidationError);
  EXPECT_THROW(parse_report("Region,Name,Stored label,Dice\r\n0,central,1,abc\r\n", ReportFormat::kCsv),
               ValidationError);
  EXPECT_THROW(parse_report("{", ReportFormat::kJson), ValidationError);
  EXPECT_THROW(parse_report_format("xml"), ValidationError);
}

}  // namespace
}  // namespace rpci
