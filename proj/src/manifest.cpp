#include "ttc/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "ttc/augment.hpp"
#include "ttc/errors.hpp"
#include "ttc/image_io.hpp"

namespace fs = std::filesystem;

namespace ttc {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::string c = s;
  std::replace(c.begin(), c.end(), ',', ' ');
  std::istringstream is(c);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ArgumentError("manifest key '" + key + "': '" + v + "' is not a number");
}

Index to_index(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos == v.size()) return static_cast<Index>(d);
  } catch (const std::exception&) {
  }
  throw ArgumentError("manifest key '" + key + "': '" + v + "' is not an integer");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ArgumentError("manifest key '" + key + "': '" + v + "' is not a boolean");
}

fs::path resolve(const fs::path& base, const std::string& v) {
  const fs::path p(v);
  return p.is_absolute() || base.empty() ? p : base / p;
}

template <typename T, typename Fn>
std::vector<T> to_list(const std::string& key, const std::string& v, Fn conv) {
  std::vector<T> out;
  for (const auto& tok : split_list(v)) out.push_back(conv(key, tok));
  if (out.empty()) throw ArgumentError("manifest key '" + key + "' needs at least one value");
  return out;
}

}  // namespace

void set_manifest_key(ExperimentManifest& m, const std::string& key, const std::string& value,
                      const fs::path& base_dir) {
  const std::string v = trim(value);
  if (key == "data_kind") {
    if (v == "image") m.kind = DataKind::Image;
    else if (v == "frames" || v == "frame-directory") m.kind = DataKind::Frames;
    else if (v == "synthetic") m.kind = DataKind::Synthetic;
    else throw ArgumentError("unknown data_kind '" + v + "'");
  } else if (key == "input") {
    m.input = resolve(base_dir, v);
  } else if (key == "merge_rows") {
    m.merge_rows = to_bool(key, v);
  } else if (key == "mr") {
    m.mr = to_double(key, v);
  } else if (key == "overlay") {
    m.overlay = resolve(base_dir, v);
  } else if (key == "seed") {
    m.seed = static_cast<std::uint64_t>(to_index(key, v));
  } else if (key == "ka") {
    if (v == "none" || v.empty()) m.ka_levels.reset();
    else m.ka_levels = v;
  } else if (key == "ka_order") {
    if (v != "fine" && v != "coarse") throw ArgumentError("ka_order must be 'fine' or 'coarse'");
    m.ka_coarse_first = v == "coarse";
  } else if (key == "pad") {
    m.pad = to_bool(key, v);
  } else if (key == "solver") {
    const SolverConfig p = preset(v);
    m.solver = v;
    m.config.scheme = p.scheme;
    m.config.engine = p.engine;
  } else if (key == "f") {
    m.config.f = to_double(key, v);
  } else if (key == "th") {
    m.config.th = to_double(key, v);
  } else if (key == "ranks") {
    m.config.ranks = to_list<Index>(key, v, to_index);
  } else if (key == "tol") {
    m.config.tol = to_double(key, v);
  } else if (key == "maxiter") {
    m.config.maxiter = static_cast<int>(to_index(key, v));
  } else if (key == "sweep_f") {
    m.sweep_f = to_bool(key, v);
  } else if (key == "out") {
    m.out = resolve(base_dir, v);
  } else if (key == "generator") {
    if (v == "tt") m.synthetic.generator = GeneratorKind::TT;
    else if (v == "tucker") m.synthetic.generator = GeneratorKind::Tucker;
    else throw ArgumentError("generator must be 'tt' or 'tucker'");
  } else if (key == "shape") {
    m.synthetic.shape = to_list<Index>(key, v, to_index);
  } else if (key == "rank_axis") {
    m.synthetic.rank_axis = to_list<Index>(key, v, to_index);
  } else if (key == "mr_axis") {
    m.synthetic.mr_axis = to_list<double>(key, v, to_double);
  } else if (key == "solvers") {
    m.synthetic_solvers = split_list(v);
  } else if (key == "trials") {
    m.synthetic.trials = static_cast<int>(to_index(key, v));
  } else if (key == "true_ranks") {
    m.true_ranks = to_bool(key, v);
  } else if (key == "success_threshold") {
    m.synthetic.success_threshold = to_double(key, v);
  } else if (key == "workers") {
    m.synthetic.workers = static_cast<int>(to_index(key, v));
  } else if (key == "graymaps") {
    m.graymaps = to_bool(key, v);
  } else {
    throw ArgumentError("unknown manifest key '" + key + "'");
  }
}

ExperimentManifest parse_manifest(const std::string& text, const fs::path& base_dir) {
  ExperimentManifest m;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  std::vector<std::pair<std::string, std::string>> entries;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ArgumentError("manifest line " + std::to_string(lineno) + ": expected key = value");
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  // The solver preset goes first so later keys refine it regardless of order.
  std::stable_partition(entries.begin(), entries.end(), [](const auto& e) { return e.first == "solver"; });
  for (const auto& [k, v] : entries) set_manifest_key(m, k, v, base_dir);
  return m;
}

ExperimentManifest load_manifest(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open manifest " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_manifest(ss.str(), path.parent_path());
}

void ExperimentManifest::validate() const {
  if (kind == DataKind::Synthetic) {
    if (synthetic.shape.size() < 2) throw ArgumentError("synthetic manifest needs a shape of order >= 2");
    if (synthetic.rank_axis.empty() || synthetic.mr_axis.empty())
      throw ArgumentError("synthetic manifest needs rank_axis and mr_axis");
    if (synthetic_solvers.empty()) throw ArgumentError("synthetic manifest needs solvers");
    return;
  }
  if (input.empty()) throw ArgumentError("manifest has no input");
  if (!fs::exists(input)) throw ArgumentError("input does not exist: " + input.string());
  if (mr.has_value() == overlay.has_value())
    throw ArgumentError("manifest needs exactly one mask source (mr or overlay)");
  if (overlay && !fs::exists(*overlay)) throw ArgumentError("overlay does not exist: " + overlay->string());
  if (mr && !(*mr >= 0.0 && *mr < 1.0)) throw ArgumentError("mr must lie in [0,1)");
  if (kind == DataKind::Frames && overlay) throw ArgumentError("overlay masks apply to single images only");
  if (kind == DataKind::Frames && ka_levels && !merge_rows)
    throw ArgumentError("ket augmentation needs merge_rows for frame input");
  if (ka_levels) parse_levels(*ka_levels);
}

std::string format_manifest(const ExperimentManifest& m) {
  std::ostringstream os;
  os << std::setprecision(17);
  auto list = [](const auto& v) {
    std::ostringstream s;
    s << std::setprecision(17);
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
    return s.str();
  };
  switch (m.kind) {
    case DataKind::Image: os << "data_kind = image\n"; break;
    case DataKind::Frames: os << "data_kind = frames\n"; break;
    case DataKind::Synthetic: os << "data_kind = synthetic\n"; break;
  }
  if (m.kind != DataKind::Synthetic) {
    os << "input = " << m.input.string() << "\n";
    if (m.kind == DataKind::Frames) os << "merge_rows = " << (m.merge_rows ? "true" : "false") << "\n";
    if (m.mr) os << "mr = " << *m.mr << "\n";
    if (m.overlay) os << "overlay = " << m.overlay->string() << "\n";
    os << "ka = " << (m.ka_levels ? *m.ka_levels : "none") << "\n";
    os << "ka_order = " << (m.ka_coarse_first ? "coarse" : "fine") << "\n";
    os << "pad = " << (m.pad ? "true" : "false") << "\n";
    os << "solver = " << m.solver << "\n";
    if (m.config.ranks) os << "ranks = " << list(*m.config.ranks) << "\n";
    os << "sweep_f = " << (m.sweep_f ? "true" : "false") << "\n";
  } else {
    os << "generator = " << to_string(m.synthetic.generator) << "\n";
    os << "shape = " << list(m.synthetic.shape) << "\n";
    os << "rank_axis = " << list(m.synthetic.rank_axis) << "\n";
    os << "mr_axis = " << list(m.synthetic.mr_axis) << "\n";
    os << "solvers = " << list(m.synthetic_solvers) << "\n";
    os << "trials = " << m.synthetic.trials << "\n";
    os << "true_ranks = " << (m.true_ranks ? "true" : "false") << "\n";
    os << "success_threshold = " << m.synthetic.success_threshold << "\n";
  }
  os << "seed = " << m.seed << "\n";
  os << "f = " << m.config.f << "\n";
  os << "th = " << m.config.th << "\n";
  os << "tol = " << m.config.tol << "\n";
  os << "maxiter = " << m.config.maxiter << "\n";
  os << "out = " << m.out.string() << "\n";
  return os.str();
}

namespace {

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream os(p);
  if (!os) throw IoError("cannot write " + p.string());
  os << s;
}

void write_trace(const fs::path& p, const SolveReport& rep) {
  std::ofstream os(p);
  if (!os) throw IoError("cannot write " + p.string());
  os << "iteration,epsilon,objective\n" << std::setprecision(17);
  for (std::size_t i = 0; i < rep.trace.size(); ++i) {
    os << i + 1 << "," << rep.trace[i].epsilon << ",";
    if (rep.trace[i].objective) os << *rep.trace[i].objective;
    os << "\n";
  }
}

nlohmann::json quality_json(const QualityReport& q) {
  nlohmann::json j;
  j["rse"] = q.rse;
  if (q.ssim) j["ssim"] = *q.ssim;
  j["frame_ssim"] = q.frame_ssim;
  return j;
}

// (H,W,C) -> (1,H,W,C) so images and videos share the per-frame SSIM path.
DenseTensor as_single_frame(const DenseTensor& img) {
  Shape s{1};
  s.insert(s.end(), img.shape().begin(), img.shape().end());
  return DenseTensor(s, {img.data().begin(), img.data().end()});
}

ExperimentOutcome run_synthetic(const ExperimentManifest& m) {
  PhaseDiagramSpec spec = m.synthetic;
  spec.seed = m.seed;
  spec.solvers.clear();
  for (const auto& id : m.synthetic_solvers) {
    SweepSolver s{id, preset(id), m.true_ranks, m.sweep_f};
    s.config.f = m.config.f;
    s.config.th = m.config.th;
    s.config.tol = m.config.tol;
    s.config.maxiter = m.config.maxiter;
    spec.solvers.push_back(std::move(s));
  }
  ExperimentOutcome out;
  out.phase = run_phase_diagram(spec);
  write_phase_outputs(*out.phase, m.out, m.graymaps);
  return out;
}

}  // namespace

ExperimentOutcome run_manifest(const ExperimentManifest& m) {
  std::string stage = "validate";
  ExperimentOutcome out;
  try {
    m.validate();
    fs::create_directories(m.out);
    fs::remove(m.out / "FAILED");
    write_text(m.out / "manifest.txt", format_manifest(m));
    if (m.kind == DataKind::Synthetic) {
      stage = "synthetic";
      ExperimentOutcome syn = run_synthetic(m);
      return syn;
    }

    stage = "load";
    Index frames = 0;
    DenseTensor truth;
    if (m.kind == DataKind::Image) {
      truth = load_image(m.input);
    } else {
      truth = load_video_frames(m.input, m.merge_rows);
      frames = static_cast<Index>(list_frames(m.input).size());
    }

    stage = "mask";
    ObservationMask mask = m.overlay ? mask_from_overlay(truth, load_image(*m.overlay))
                                     : sample_mask(truth.shape(), *m.mr, m.seed).observe(truth);

    stage = "augment";
    std::optional<KaLayout> layout;
    DenseTensor work = truth;
    ObservationMask work_mask = mask;
    const Index H = truth.dim(0), W = truth.order() >= 2 ? truth.dim(1) : 1;
    if (m.ka_levels) {
      const auto levels = parse_levels(*m.ka_levels);
      Index LH = 1, LW = 1;
      for (const auto& l : levels) LH *= l.u, LW *= l.v;
      if ((LH != H || LW != W) && !m.pad)
        throw ArgumentError("layout " + *m.ka_levels + " covers " + std::to_string(LH) + "x" +
                            std::to_string(LW) + " but data is " + std::to_string(H) + "x" +
                            std::to_string(W) + " (set pad = true to replicate edges)");
      if (LH < H || LW < W) throw ArgumentError("layout is smaller than the data");
      if (LH != H || LW != W) {
        work = pad_replicate(truth, LH, LW);
        // Padded pixels are unobserved.
        std::vector<Index> idx;
        for (Index i : mask.indices()) {
          const Index h = i % H, w = (i / H) % W, c = i / (H * W);
          idx.push_back(h + LH * (w + LW * c));
        }
        work_mask = ObservationMask(work.shape(), std::move(idx), mask.values());
      }
      layout.emplace(LH, LW, truth.dim(2), levels, m.ka_coarse_first);
      work_mask = ka_mask(work_mask, *layout);
    }

    stage = "solve";
    std::vector<double> fs_try{m.config.f};
    if (m.sweep_f && m.config.engine == Engine::Shrinkage)
      fs_try.assign(std::begin(kPenaltyFactors), std::end(kPenaltyFactors));
    DenseTensor best_recovered;
    double best_rse = 0.0;
    for (double f : fs_try) {
      SolverConfig cfg = m.config;
      cfg.f = f;
      cfg.seed = m.seed;
      SolveReport rep = solve(work_mask, cfg);
      DenseTensor rec = layout ? ka_inverse(rep.recovered, *layout) : rep.recovered;
      if (rec.shape() != truth.shape()) rec = crop(rec, H, W);
      const double e = rse(rec, truth);
      if (!out.solve || e < best_rse) {
        best_rse = e;
        best_recovered = std::move(rec);
        out.solve = std::move(rep);
        out.f = f;
      }
    }

    stage = "metrics";
    const DenseTensor observed = mask.zero_filled();
    const bool video = m.kind == DataKind::Frames;
    auto framed = [&](const DenseTensor& t) {
      if (!video) return as_single_frame(t);
      return m.merge_rows ? split_frame_rows(t, frames) : t;
    };
    out.quality = mean_ssim(framed(best_recovered), framed(truth), 0);
    out.zero_fill = mean_ssim(framed(observed), framed(truth), 0);

    stage = "write";
    if (!video) {
      save_image(best_recovered, m.out / "recovered.png");
      save_image(observed, m.out / "observed.png");
    } else {
      const DenseTensor rec = framed(best_recovered), obs = framed(observed);
      fs::create_directories(m.out / "frames");
      fs::create_directories(m.out / "observed");
      for (Index f = 0; f < rec.dim(0); ++f) {
        std::ostringstream name;
        name << "frame_" << std::setw(4) << std::setfill('0') << f << ".png";
        save_image(frame(rec, f), m.out / "frames" / name.str());
        save_image(frame(obs, f), m.out / "observed" / name.str());
      }
    }
    write_trace(m.out / "trace.csv", *out.solve);

    nlohmann::json j = quality_json(*out.quality);
    j["solver"] = m.solver;
    j["missing_ratio"] = mask.missing_ratio();
    j["observed"] = mask.count();
    j["iterations"] = out.solve->iterations;
    j["converged"] = out.solve->converged;
    j["ranks"] = out.solve->ranks;
    j["f"] = out.f;
    j["th"] = m.config.th;
    j["tol"] = m.config.tol;
    j["maxiter"] = m.config.maxiter;
    j["seed"] = m.seed;
    j["ka_levels"] = layout ? layout->levels_string() : "none";
    j["solved_shape"] = work_mask.shape();
    j["original_shape"] = truth.shape();
    j["zero_fill"] = quality_json(*out.zero_fill);
    std::vector<std::string> warnings = out.solve->warnings;
    warnings.insert(warnings.end(), out.quality->warnings.begin(), out.quality->warnings.end());
    j["warnings"] = warnings;
    j["elapsed_seconds"] = out.solve->elapsed;
    write_text(m.out / "quality.json", j.dump(2) + "\n");
  } catch (const std::exception& e) {
    out.status = 1;
    out.error = stage + ": " + e.what();
    std::error_code ec;
    fs::create_directories(m.out, ec);
    std::ofstream failed(m.out / "FAILED");
    failed << "stage: " << stage << "\nerror: " << e.what()
           << "\nother files in this directory are partial\n";
  }
  return out;
}

}  // namespace ttc
