#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rpci/agreement.hpp"
#include "rpci/error.hpp"
#include "rpci/fileio.hpp"
#include "rpci/metrics.hpp"
#include "rpci/nifti.hpp"
#include "rpci/parallel.hpp"
#include "rpci/phantom.hpp"
#include "rpci/preprocess.hpp"
#include "rpci/priors.hpp"
#include "rpci/report.hpp"
#include "rpci/study.hpp"
#include "rpci_version.hpp"

namespace rpci::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr double kDegree = std::numbers::pi / 180.0;

struct Options {
  int threads = 0;
  std::string format = "csv";

  struct {
    fs::path out_dir;
    std::vector<int> dims = {64, 64, 64};
    std::vector<double> spacing = {1.0, 1.0, 1.0};
    std::uint64_t seed = 0;
    double bowel_fraction = 0.2;
    double perturb_mm = 0.0;
    std::uint64_t perturb_seed = 1;
  } phantom;

  struct {
    fs::path in;
    fs::path out;
    double magnitude_mm = 2.0;
    std::uint64_t seed = 1;
  } perturb;

  struct {
    fs::path ct;
    fs::path labels;
    fs::path out_dir;
    double margin_mm = 15.0;
    double dilate_mm = 0.0;
  } preprocess;

  struct {
    fs::path gt;
    fs::path pred;
    std::string id = "case";
    fs::path manifest;
    std::string model;
    fs::path records;
    fs::path out;
    fs::path fn_mask;
  } evaluate;

  struct {
    fs::path manifest;
    std::string model;
    fs::path out;
  } agreement;

  struct {
    fs::path labels;
    fs::path out;
    fs::path summary;
    std::vector<double> root;
    double start_deg = 0.0;
    std::string sweep = "cw";
    std::vector<int> order = {9, 10, 11, 12};
    std::vector<int> bowel_labels = {10, 11, 12, 13};
  } fan;

  struct {
    fs::path manifest;
    std::vector<std::string> ids;
    int k = 5;
    std::uint64_t seed = 0;
    fs::path out;
  } folds;

  struct {
    std::vector<fs::path> records;
    fs::path from;
    fs::path out;
  } report;
};

Json vec_json(const Eigen::Vector3d& v) {
  // Adding +0.0 turns -0.0 into 0.0.
  return Json{v.x() + 0.0, v.y() + 0.0, v.z() + 0.0};
}

Json config_json(const FanConfig& c) {
  return Json{{"root_world_mm", vec_json(c.root_world)},
              {"plane_up", vec_json(c.plane.up)},
              {"plane_left", vec_json(c.plane.left)},
              {"start_angle_rad", c.start_angle},
              {"sweep", c.sweep > 0 ? "cw" : "ccw"},
              {"region_order", c.region_order}};
}

std::string fan_json(const FanPartition& p) {
  Json j;
  j["format"] = "rpci-fan-partition";
  j["version"] = 1;
  j["config"] = config_json(p.config);
  j["cut_angles_rad"] = p.cut_angles;
  j["achieved_fractions"] = p.achieved_fractions;
  return j.dump(2) + "\n";
}

void emit(const std::string& text, const fs::path& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

// --- subcommands -----------------------------------------------------------

void run_phantom(const Options& o, std::ostream& out, std::ostream& err) {
  PhantomSpec spec;
  spec.dims = Index3(o.phantom.dims[0], o.phantom.dims[1], o.phantom.dims[2]);
  spec.spacing = Spacing(o.phantom.spacing[0], o.phantom.spacing[1], o.phantom.spacing[2]);
  spec.seed = o.phantom.seed;
  spec.bowel_fraction = o.phantom.bowel_fraction;
  err << "phantom: dims " << spec.dims.transpose() << ", spacing " << spec.spacing.mm().transpose() << " mm, seed "
      << spec.seed << ", bowel_fraction " << spec.bowel_fraction << "\n";
  const Phantom ph = generate_phantom(spec);
  ensure_dir(o.phantom.out_dir);
  write_volume(ph.ct, o.phantom.out_dir / "ct.nii.gz");
  write_volume(ph.labels, o.phantom.out_dir / "labels.nii.gz");
  write_text_file(o.phantom.out_dir / "fan.json", fan_json(ph.partition));
  if (o.phantom.perturb_mm > 0.0) {
    err << "phantom: perturbed copy " << o.phantom.perturb_mm << " mm, seed " << o.phantom.perturb_seed << "\n";
    write_volume(perturb_labels(ph.labels, o.phantom.perturb_mm, o.phantom.perturb_seed),
                 o.phantom.out_dir / "pred.nii.gz");
  }
  out << o.phantom.out_dir.string() << "\n";
}

void run_perturb(const Options& o, std::ostream&, std::ostream& err) {
  err << "perturb: " << o.perturb.in << " by " << o.perturb.magnitude_mm << " mm, seed " << o.perturb.seed << "\n";
  write_volume(perturb_labels(read_label_volume(o.perturb.in), o.perturb.magnitude_mm, o.perturb.seed), o.perturb.out);
}

void run_preprocess(const Options& o, std::ostream&, std::ostream& err) {
  CropSpec crop{o.preprocess.margin_mm};
  DilationSpec dilation{o.preprocess.dilate_mm};
  crop.validate();
  dilation.validate();
  err << "preprocess: margin " << crop.margin_mm << " mm, dilation " << dilation.radius_mm << " mm\n";
  const auto ct = read_scalar_volume(o.preprocess.ct);
  auto labels = read_label_volume(o.preprocess.labels);
  if (dilation.radius_mm > 0.0) labels = dilate_labels(labels, dilation);
  const auto [ct_crop, labels_crop] = crop_with_margin(ct, labels, crop);
  err << "preprocess: cropped " << ct.dims().transpose() << " -> " << ct_crop.dims().transpose() << "\n";
  ensure_dir(o.preprocess.out_dir);
  write_volume(ct_crop, o.preprocess.out_dir / "ct.nii.gz");
  write_volume(labels_crop, o.preprocess.out_dir / "labels.nii.gz");
}

// Picks the prediction named `model`, or the only one when `model` is empty.
std::optional<fs::path> prediction_of(const PatientEntry& p, const std::string& model) {
  if (model.empty()) {
    if (p.predictions.size() > 1) {
      throw ValidationError("patient " + p.id + " has several predictions; choose one with --model");
    }
    if (p.predictions.empty()) return std::nullopt;
    return p.predictions.begin()->second;
  }
  const auto it = p.predictions.find(model);
  if (it == p.predictions.end()) return std::nullopt;
  return it->second;
}

void run_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto& e = o.evaluate;
  const ReportFormat format = parse_report_format(o.format);
  std::vector<PatientRecord> records;
  if (!e.manifest.empty()) {
    const StudyManifest m = load_manifest(e.manifest);
    err << "evaluate: manifest " << e.manifest << ", model " << (e.model.empty() ? "(only)" : e.model) << "\n";
    for (const auto& p : m.patients) {
      const auto pred = prediction_of(p, e.model);
      if (!p.gt || !pred) {
        err << "evaluate: skipping " << p.id << " (no ground truth or prediction)\n";
        continue;
      }
      records.push_back(make_record(read_label_volume(*p.gt), read_label_volume(*pred), p.id));
    }
    if (records.empty()) throw ValidationError("manifest has no patient with both ground truth and prediction");
  } else {
    if (e.gt.empty() || e.pred.empty()) throw ValidationError("evaluate needs --gt and --pred, or --manifest");
    err << "evaluate: " << e.gt << " vs " << e.pred << " as " << e.id << "\n";
    const auto gt = read_label_volume(e.gt);
    const auto pred = read_label_volume(e.pred);
    records.push_back(make_record(gt, pred, e.id));
    if (!e.fn_mask.empty()) write_volume(false_negative_mask(gt, pred), e.fn_mask);
  }
  if (!e.records.empty()) write_text_file(e.records, render_records(records));
  const MetricReport report = aggregate(records);
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  emit(render_report(report, format), e.out, out);
}

void run_agreement(const Options& o, std::ostream& out, std::ostream& err) {
  const ReportFormat format = parse_report_format(o.format);
  const StudyManifest m = load_manifest(o.agreement.manifest);
  err << "agreement: manifest " << o.agreement.manifest << ", model "
      << (o.agreement.model.empty() ? "(none)" : o.agreement.model) << "\n";
  std::vector<PatientMetrics> human;
  std::vector<PatientMetrics> model;
  for (const auto& p : m.patients) {
    if (p.observers.size() < 2) {
      err << "agreement: skipping " << p.id << " (fewer than 2 observers)\n";
      continue;
    }
    ObserverSet obs;
    obs.patient_id = p.id;
    for (const auto& [id, path] : p.observers) obs.observers.emplace(id, read_label_volume(path));
    const auto rest = observer_vs_rest(obs);
    human.insert(human.end(), rest.begin(), rest.end());
    if (!o.agreement.model.empty()) {
      if (const auto pred = prediction_of(p, o.agreement.model)) {
        model.push_back(model_vs_observers(read_label_volume(*pred), obs));
      }
    }
  }
  if (human.empty()) throw ValidationError("manifest has no patient with at least 2 observers");
  const MetricReport report = aggregate_agreement(human, model);
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  emit(render_report(report, format), o.agreement.out, out);
}

void run_fan(const Options& o, std::ostream& out, std::ostream& err) {
  const auto& f = o.fan;
  FanConfig cfg;
  cfg.root_world = Point3(f.root[0], f.root[1], f.root[2]);
  cfg.start_angle = f.start_deg * kDegree;
  cfg.sweep = f.sweep == "cw" ? 1 : -1;
  if (f.order.size() != 4) throw ValidationError("--order needs 4 regions");
  std::copy(f.order.begin(), f.order.end(), cfg.region_order.begin());
  cfg.validate();
  err << "fan-partition: " << config_json(cfg).dump() << "\n";

  LabelVolume labels = read_label_volume(f.labels);
  Mask bowel(labels.grid());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    bowel[i] = std::find(f.bowel_labels.begin(), f.bowel_labels.end(), labels[i]) != f.bowel_labels.end() ? 1 : 0;
  }
  const FanPartition p = balance_fan(bowel, cfg);
  const LabelVolume fan = apply_fan(bowel, p);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (bowel[i]) labels[i] = fan[i];
  }
  write_volume(labels, f.out);
  emit(fan_json(p), f.summary, out);
}

void run_folds(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<std::string> ids = o.folds.ids;
  if (!o.folds.manifest.empty()) {
    for (const auto& p : load_manifest(o.folds.manifest).patients) ids.push_back(p.id);
  }
  err << "folds: " << ids.size() << " patients, k " << o.folds.k << ", seed " << o.folds.seed << "\n";
  emit(render_folds_csv(make_folds(ids, o.folds.k, o.folds.seed)), o.folds.out, out);
}

void run_report(const Options& o, std::ostream& out, std::ostream& err) {
  const ReportFormat format = parse_report_format(o.format);
  MetricReport report;
  if (!o.report.from.empty()) {
    const std::string ext = o.report.from.extension().string();
    const ReportFormat in_format = ext == ".json" ? ReportFormat::kJson : ReportFormat::kCsv;
    err << "report: re-rendering " << o.report.from << "\n";
    report = parse_report(read_text_file(o.report.from), in_format);
  } else {
    if (o.report.records.empty()) throw ValidationError("report needs --records or --from");
    std::vector<PatientRecord> records;
    for (const auto& path : o.report.records) {
      auto part = parse_records(read_text_file(path));
      records.insert(records.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    err << "report: aggregating " << records.size() << " patient records\n";
    report = aggregate(std::move(records));
  }
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  emit(render_report(report, format), o.report.out, out);
}

void add_format(CLI::App* app, Options& o) {
  app->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Regional peritoneal cancer index segmentation toolkit", "rpci"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string("rpci ") + RPCI_VERSION + " (" + RPCI_BUILD_TYPE + ")");
  app.add_option("--threads", o.threads, "Worker threads (default: RPCI_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  auto* phantom = app.add_subcommand("phantom", "Write a synthetic abdomen (ct, labels, fan.json)");
  phantom->add_option("--out", o.phantom.out_dir, "Output directory")->required();
  phantom->add_option("--dims", o.phantom.dims, "Grid size nx,ny,nz")->delimiter(',')->expected(3);
  phantom->add_option("--spacing", o.phantom.spacing, "Voxel size in mm sx,sy,sz")->delimiter(',')->expected(3);
  phantom->add_option("--seed", o.phantom.seed, "CT noise seed");
  phantom->add_option("--bowel-fraction", o.phantom.bowel_fraction, "Torso share of the small-bowel fan");
  phantom->add_option("--perturb", o.phantom.perturb_mm, "Also write pred.nii.gz perturbed by this many mm");
  phantom->add_option("--perturb-seed", o.phantom.perturb_seed, "Seed of the perturbation field");

  auto* perturb = app.add_subcommand("perturb", "Displace label boundaries by a smooth random field");
  perturb->add_option("--in", o.perturb.in, "Input labels")->required();
  perturb->add_option("--out", o.perturb.out, "Output labels")->required();
  perturb->add_option("--magnitude", o.perturb.magnitude_mm, "Maximum displacement in mm");
  perturb->add_option("--seed", o.perturb.seed, "Seed of the displacement field");

  auto* preprocess = app.add_subcommand("preprocess", "Crop CT and labels to the labelled region");
  preprocess->add_option("--ct", o.preprocess.ct, "CT volume")->required();
  preprocess->add_option("--labels", o.preprocess.labels, "Label volume")->required();
  preprocess->add_option("--out", o.preprocess.out_dir, "Output directory")->required();
  preprocess->add_option("--margin", o.preprocess.margin_mm, "Crop margin in mm");
  preprocess->add_option("--dilate", o.preprocess.dilate_mm, "Label dilation radius in mm before cropping");

  auto* evaluate = app.add_subcommand("evaluate", "Dice, HD95 and ASD per region");
  evaluate->add_option("--gt", o.evaluate.gt, "Ground-truth labels");
  evaluate->add_option("--pred", o.evaluate.pred, "Predicted labels");
  evaluate->add_option("--id", o.evaluate.id, "Patient id for a single pair");
  evaluate->add_option("--manifest", o.evaluate.manifest, "Study manifest (evaluates every patient)");
  evaluate->add_option("--model", o.evaluate.model, "Prediction name in the manifest");
  evaluate->add_option("--records", o.evaluate.records, "Also write per-patient metrics JSON here");
  evaluate->add_option("--fn-mask", o.evaluate.fn_mask, "Write the false-negative label map (single pair)");
  evaluate->add_option("--out", o.evaluate.out, "Report path (default: stdout)");
  add_format(evaluate, o);

  auto* agreement = app.add_subcommand("agreement", "Interobserver and model-vs-observer agreement");
  agreement->add_option("--manifest", o.agreement.manifest, "Study manifest with observers")->required();
  agreement->add_option("--model", o.agreement.model, "Prediction name to compare with the observers");
  agreement->add_option("--out", o.agreement.out, "Report path (default: stdout)");
  add_format(agreement, o);

  auto* fan = app.add_subcommand("fan-partition", "Split small-bowel labels into four equal-volume sectors");
  fan->add_option("--labels", o.fan.labels, "Label volume")->required();
  fan->add_option("--out", o.fan.out, "Relabelled volume")->required();
  fan->add_option("--summary", o.fan.summary, "Fan JSON path (default: stdout)");
  fan->add_option("--root", o.fan.root, "Mesenteric root in world mm x,y,z")->delimiter(',')->expected(3)->required();
  fan->add_option("--start-angle", o.fan.start_deg, "Start of the first sector, degrees from superior");
  fan->add_option("--sweep", o.fan.sweep, "cw: superior towards patient left")->check(CLI::IsMember({"cw", "ccw"}));
  fan->add_option("--order", o.fan.order, "Region of each sector")->delimiter(',')->expected(4);
  fan->add_option("--bowel-labels", o.fan.bowel_labels, "Stored labels that form the bowel mask")
      ->delimiter(',')
      ->expected(1, 13);

  auto* folds = app.add_subcommand("folds", "Deterministic k-fold patient split");
  folds->add_option("--manifest", o.folds.manifest, "Study manifest");
  folds->add_option("--ids", o.folds.ids, "Patient ids")->delimiter(',');
  folds->add_option("-k,--k", o.folds.k, "Fold count");
  folds->add_option("--seed", o.folds.seed, "Shuffle seed");
  folds->add_option("--out", o.folds.out, "CSV path (default: stdout)");

  auto* report = app.add_subcommand("report", "Aggregate patient records or re-render a report");
  report->add_option("--records", o.report.records, "Per-patient metrics JSON files");
  report->add_option("--from", o.report.from, "Existing report (.csv or .json) to re-render");
  report->add_option("--out", o.report.out, "Report path (default: stdout)");
  add_format(report, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitValidation;
  }

  try {
    set_thread_count(o.threads);
    err << "rpci " << RPCI_VERSION << ": threads " << thread_count() << "\n";
    if (*phantom) run_phantom(o, out, err);
    if (*perturb) run_perturb(o, out, err);
    if (*preprocess) run_preprocess(o, out, err);
    if (*evaluate) run_evaluate(o, out, err);
    if (*agreement) run_agreement(o, out, err);
    if (*fan) run_fan(o, out, err);
    if (*folds) run_folds(o, out, err);
    if (*report) run_report(o, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace rpci::cli
